use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;
use tribody::accsum::{default_n_max, poisson_crosscheck, ResumParams};
use tribody::kinematics::{Momenta, Vec3};
use tribody::normint::{sigma_direct_with, sigma_stationary, DirectOpts};
use tribody::omega::{compute_b, fit_expansion, omega, derived_kernel, OmegaKernel, TestKernel};
use tribody::scalprod::{KernelAnsatz, ScatteringAmplitude};
use tribody::specfun::MathieuEven;
use tribody::{verify, Error, RunConfig};

const SIGMA_HELP: &str = "CSV columns:
  theta        angle between k̂′ and k̂″ = ẑ, radians
  direct_re    Σ_n by direct quadrature, real part
  direct_im    Σ_n by direct quadrature, imaginary part
  stationary   stationary-phase approximation of Σ_n";

const OMEGA_HELP: &str = "CSV columns:
  n    level index
  re   Re Ω_n
  im   Im Ω_n";

const RESUM_HELP: &str = "Sweeps R = √(|α₁|x) over x from --x-min to --x at fixed M; α₁ is the
coupling of pair 1 from the configured charges and masses.

CSV columns:
  R          √(|α₁|x)
  direct_re  patched direct tail sum Σ_{n≥M} χΘ(n), real part
  direct_im  same, imaginary part
  closed_re  closed form 3U sin(2R)/(2√π C(R) R^{5/2}), real part
  closed_im  same, imaginary part
  rel_dev    |direct − closed| / (3|U|/(2√π|C(R)|R^{5/2}))";

const VERIFY_HELP: &str = "Runs the ten numerical checks and prints one PASS/FAIL line per check.
Exit status 1 if any check fails.";

const BCOEFFS_HELP: &str = "JSON fields:
  D1, D2              least-squares fit of nΩ_n = D1 + D2 ln n, as [re, im]
  B1, B2              real constants from the fit (averaged with the conjugate kernel)
  B1_formula, B2_formula  the same constants from the coefficient formulas
  residual            relative rms residual of the fit
  n_grid              levels used (from omega.n_grid)";

const ZKER_HELP: &str = "JSON fields:
  varpi0_in, varpi0_out  prefactors ϖ₀ of the two channels, [re, im]
  z_in, z_out            weak-limit amplitudes Z, [re, im]
  threshold              p/√E, lower edge of the t support
  b                      η_eff − ω
  value                  R̃_n(t, φ), [re, im]";

#[derive(Parser)]
#[command(name = "tribody", version, about = "Asymptotics of three charged particles")]
struct Cli {
    /// TOML run configuration
    #[arg(long, env = "TRIBODY_CONFIG", global = true)]
    config: Option<PathBuf>,
    /// Output file (stdout if absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel sweeps
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Relative quadrature tolerance; overrides quadrature.rel_tol
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for randomized sampling in `verify`
    #[arg(long, global = true, default_value_t = 20_240_917)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum KernelName {
    Derived,
    One,
    V,
    OneMinusV,
}

impl KernelName {
    fn build(self) -> OmegaKernel {
        match self {
            Self::Derived => derived_kernel(),
            Self::One => OmegaKernel::test(TestKernel::One),
            Self::V => OmegaKernel::test(TestKernel::V),
            Self::OneMinusV => OmegaKernel::test(TestKernel::OneMinusV),
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    #[command(after_help = VERIFY_HELP)]
    Verify,
    /// Σ_n(k̂′, ẑ) over an angle sweep
    #[command(after_help = SIGMA_HELP)]
    Sigma {
        #[arg(long, default_value_t = 20)]
        n: usize,
        /// Coupling α; defaults to α₁ of the configuration
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        theta_max: f64,
        #[arg(long, default_value_t = 16)]
        steps: usize,
    },
    /// B₁, B₂ of an Ω kernel
    #[command(after_help = BCOEFFS_HELP)]
    Bcoeffs {
        #[arg(long, value_enum, default_value_t = KernelName::Derived)]
        kernel: KernelName,
    },
    /// Ω_n on a geometric grid of n
    #[command(after_help = OMEGA_HELP)]
    OmegaSweep {
        #[arg(long, value_enum, default_value_t = KernelName::Derived)]
        kernel: KernelName,
        #[arg(long, value_parser = parse_count, default_value = "10")]
        n_min: u64,
        #[arg(long, value_parser = parse_count, default_value = "1e6")]
        n_max: u64,
        #[arg(long, default_value_t = 11)]
        steps: usize,
    },
    /// The kernel R̃_n at one point
    #[command(after_help = ZKER_HELP)]
    Zker {
        #[arg(long, value_parser = parse_vec3, default_value = "0.9,0.3,0.2", allow_hyphen_values = true)]
        k: Vec3,
        #[arg(long, value_parser = parse_vec3, default_value = "0.1,-0.4,1.1", allow_hyphen_values = true)]
        p: Vec3,
        /// Direction k̂′
        #[arg(long, value_parser = parse_vec3, default_value = "0,0,1", allow_hyphen_values = true)]
        khat: Vec3,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 0.9)]
        t: f64,
        #[arg(long, default_value_t = 0.3)]
        phi: f64,
        /// Order 2l of the Mathieu function ce_{2l}
        #[arg(long, default_value_t = 0)]
        order2l: usize,
        /// Mathieu parameter s
        #[arg(long, default_value_t = 0.5)]
        s: f64,
        #[arg(long = "B1", allow_hyphen_values = true)]
        b1: Option<f64>,
        #[arg(long = "B2", allow_hyphen_values = true)]
        b2: Option<f64>,
    },
    /// Direct tail sum against the closed form over an R-sweep
    #[command(after_help = RESUM_HELP)]
    Resum {
        #[arg(long = "M")]
        m: Option<usize>,
        #[arg(long)]
        x: Option<f64>,
        #[arg(long)]
        x_min: Option<f64>,
        #[arg(long = "B1", allow_hyphen_values = true)]
        b1: Option<f64>,
        #[arg(long = "B2", allow_hyphen_values = true)]
        b2: Option<f64>,
        /// Smooth factor U as "re,im"
        #[arg(long = "U", value_parser = parse_complex, default_value = "1,0", allow_hyphen_values = true)]
        u: Complex64,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Map from each computed quantity to the operation that evaluates it
    Concordance,
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Verify => "verify",
            Cmd::Sigma { .. } => "sigma",
            Cmd::Bcoeffs { .. } => "bcoeffs",
            Cmd::OmegaSweep { .. } => "omega-sweep",
            Cmd::Zker { .. } => "zker",
            Cmd::Resum { .. } => "resum",
            Cmd::Concordance => "concordance",
        }
    }
}

fn parse_numbers(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got {}", v.len()));
    }
    Ok(v)
}

fn parse_vec3(s: &str) -> Result<Vec3, String> {
    let v = parse_numbers(s, 3)?;
    Ok([v[0], v[1], v[2]])
}

/// A positive integer, also accepted in exponent form such as 1e6.
fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if x >= 0.0 && x.fract() == 0.0 && x < u64::MAX as f64 {
        Ok(x as u64)
    } else {
        Err(format!("'{s}' is not a non-negative integer"))
    }
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let v = parse_numbers(s, 2)?;
    Ok(Complex64::new(v[0], v[1]))
}

/// Provenance of an output file; embedded as a header so the run can be repeated.
#[derive(Serialize)]
struct RunManifest {
    tool: &'static str,
    version: &'static str,
    subcommand: &'static str,
    config: Option<String>,
    arguments: Vec<String>,
    out: Option<String>,
    seed: u64,
}

enum Output {
    Csv { columns: &'static str, rows: Vec<String> },
    Json(serde_json::Value),
    Text(String),
}

fn render(manifest: &RunManifest, output: Output) -> String {
    let header = serde_json::to_string(manifest).expect("manifest serializes");
    match output {
        Output::Csv { columns, rows } => {
            let mut s = format!("# {} {} {}\n# manifest: {header}\n{columns}\n", manifest.tool, manifest.version, manifest.subcommand);
            for r in rows {
                s.push_str(&r);
                s.push('\n');
            }
            s
        }
        Output::Json(v) => {
            let doc = json!({ "manifest": manifest, "result": v });
            serde_json::to_string_pretty(&doc).expect("result serializes") + "\n"
        }
        Output::Text(t) => format!("# {} {} {}\n# manifest: {header}\n{t}", manifest.tool, manifest.version, manifest.subcommand),
    }
}

fn e(x: f64) -> String {
    // + 0.0 folds −0 into +0
    format!("{:.12e}", x + 0.0)
}

fn c_json(z: Complex64) -> serde_json::Value {
    json!([z.re, z.im])
}

struct Status {
    output: Output,
    failed: bool,
}

fn ok(output: Output) -> tribody::Result<Status> {
    Ok(Status { output, failed: false })
}

fn execute(cli: &Cli, cfg: &RunConfig) -> tribody::Result<Status> {
    let alpha1 = cfg.system.couplings()?.alpha[0];
    match &cli.cmd {
        Cmd::Verify => {
            let results = verify::run_all(cli.seed);
            let mut t = String::new();
            for c in &results {
                let _ = writeln!(t, "{}", c.line());
                for n in &c.notes {
                    let _ = writeln!(t, "          {n}");
                }
            }
            let passed = results.iter().filter(|c| c.passed).count();
            let _ = writeln!(t, "{passed}/{} pass", results.len());
            Ok(Status {
                output: Output::Text(t),
                failed: passed != results.len(),
            })
        }
        Cmd::Sigma { n, alpha, theta_max, steps } => {
            let alpha = alpha.unwrap_or(alpha1);
            let opts = DirectOpts {
                start_order: cfg.quadrature.sigma_start_order,
                max_order: cfg.quadrature.sigma_max_order,
                rel_tol: cfg.quadrature.rel_tol,
            };
            let z = [0.0, 0.0, 1.0];
            let mut rows = Vec::new();
            for j in 1..=*steps {
                let th = theta_max * j as f64 / *steps as f64;
                let k1 = tribody::kinematics::direction(th, 0.0);
                let d = sigma_direct_with(*n, alpha, k1, z, opts)?.value;
                let s = sigma_stationary(*n, alpha, th)?.value.im;
                rows.push(format!("{},{},{},{}", e(th), e(d.re), e(d.im), e(s)));
            }
            ok(Output::Csv {
                columns: "theta,direct_re,direct_im,stationary",
                rows,
            })
        }
        Cmd::Bcoeffs { kernel } => {
            let k = kernel.build();
            let fit = fit_expansion(&k, &cfg.omega.n_grid)?;
            let formula = compute_b(&k)?;
            ok(Output::Json(json!({
                "kernel": kernel,
                "D1": c_json(fit.d1),
                "D2": c_json(fit.d2),
                "B1": fit.b1,
                "B2": fit.b2,
                "B1_formula": formula.b1,
                "B2_formula": formula.b2,
                "residual": fit.fit_residual,
                "ill_conditioned": fit.ill_conditioned,
                "n_grid": fit.n_grid,
            })))
        }
        Cmd::OmegaSweep { kernel, n_min, n_max, steps } => {
            if *n_min == 0 || n_max < n_min || *steps < 2 {
                return Err(Error::Domain {
                    op: "cli::omega-sweep",
                    detail: format!("need 0 < n_min ≤ n_max and steps ≥ 2, got {n_min}, {n_max}, {steps}"),
                });
            }
            let k = kernel.build();
            let ratio = (*n_max as f64 / *n_min as f64).ln();
            let mut ns: Vec<u64> = (0..*steps)
                .map(|j| (*n_min as f64 * (ratio * j as f64 / (*steps - 1) as f64).exp()).round() as u64)
                .collect();
            ns.dedup();
            let mut rows = Vec::new();
            for n in ns {
                let w = omega(&k, n)?.value;
                rows.push(format!("{n},{},{}", e(w.re), e(w.im)));
            }
            ok(Output::Csv { columns: "n,re,im", rows })
        }
        Cmd::Zker {
            k,
            p,
            khat,
            n,
            t,
            phi,
            order2l,
            s,
            b1,
            b2,
        } => {
            let q = Momenta::new(&cfg.system, *k, *p)?;
            let mathieu = MathieuEven::new(*order2l, *s)?;
            let b1 = b1.unwrap_or(cfg.resum.b1);
            let b2 = b2.unwrap_or(cfg.resum.b2);
            let ans = KernelAnsatz::new(&cfg.system, &q, *khat, b1, b2, mathieu, cfg.scalprod.delta_chi, &ScatteringAmplitude::Coulomb)?;
            let value = ans.value(*n, *t, *phi)?;
            ok(Output::Json(json!({
                "varpi0_in": c_json(ans.varpi0_in),
                "varpi0_out": c_json(ans.varpi0_out),
                "z_in": c_json(ans.z_in),
                "z_out": c_json(ans.z_out),
                "threshold": ans.threshold,
                "b": ans.b,
                "value": c_json(value),
            })))
        }
        Cmd::Resum {
            m,
            x,
            x_min,
            b1,
            b2,
            u,
            steps,
        } => {
            let m = m.unwrap_or(cfg.resum.m);
            let x = x.unwrap_or(cfg.resum.x);
            let x_min = x_min.unwrap_or(x / 16.0);
            let steps = steps.unwrap_or(cfg.resum.steps);
            let (b1, b2) = (b1.unwrap_or(cfg.resum.b1), b2.unwrap_or(cfg.resum.b2));
            if !(x_min > 0.0 && x_min < x) || steps < 2 {
                return Err(Error::Domain {
                    op: "cli::resum",
                    detail: format!("need 0 < x_min < x and steps ≥ 2, got {x_min}, {x}, {steps}"),
                });
            }
            let mut rows = Vec::new();
            for j in 0..steps {
                let xj = x_min * ((x / x_min).ln() * j as f64 / (steps - 1) as f64).exp();
                let p = ResumParams::new(m, xj, alpha1, b1, b2)?.with_patch(cfg.resum.patch.into());
                let cc = poisson_crosscheck(&p, default_n_max(&p), *u)?;
                rows.push(format!(
                    "{},{},{},{},{},{}",
                    e(cc.r),
                    e(cc.direct.re),
                    e(cc.direct.im),
                    e(cc.closed.leading.re),
                    e(cc.closed.leading.im),
                    e(cc.rel_dev)
                ));
            }
            ok(Output::Csv {
                columns: "R,direct_re,direct_im,closed_re,closed_im,rel_dev",
                rows,
            })
        }
        Cmd::Concordance => ok(Output::Text(concordance())),
    }
}

const CONCORDANCE: &[(&str, &str)] = &[
    ("Γ(z), ln Γ(z) for complex z", "specfun::gamma_complex, specfun::ln_gamma_complex"),
    ("Kummer Φ(a, c, z)", "specfun::kummer_phi"),
    ("terminating ₂F₁(−m, b; c; w)", "specfun::hyp2f1_terminating"),
    ("Laguerre L_n(x), oscillatory asymptotic form", "specfun::laguerre, specfun::laguerre_oscillation_asym"),
    ("Legendre P_l, spherical harmonics Y_l^m", "specfun::legendre_p, specfun::spherical_harmonic"),
    ("even Mathieu ce_2l, Ce_2l and the ζ, ϑ change of variables", "specfun::MathieuEven, specfun::fix_zm_forward"),
    ("pair couplings α_j and effective spectator coupling", "kinematics::couplings"),
    ("Jacobi coordinates and pairing rotations", "kinematics::JacobiState::to_pairing"),
    ("momenta, η_j, ω, b", "kinematics::Momenta::new"),
    ("asymptotic domains Ω_μ, Ω_ν", "kinematics::in_domain"),
    ("Coulomb wave ψ_k(x)", "pairstates::coulomb_wave"),
    ("three-body distorted wave (product of pair factors)", "pairstates::bbk_wave"),
    ("hydrogenic bound states R_nl", "pairstates::bound_radial"),
    ("generating function of the level-n states and its expansion", "pairstates::generating_function, pairstates::generating_function_expansion"),
    ("partial-wave components of the Coulomb factor", "pairstates::partial_component"),
    ("projection of a sphere kernel onto R_nlm", "pairstates::reconstruct_r_nlm"),
    ("overlap integral Σ_n by direct quadrature", "normint::sigma_direct"),
    ("phase S(θ, φ), its stationary points and Hessian", "normint::phase_function, normint::hessian_check"),
    ("Σ_n by stationary phase", "normint::sigma_stationary"),
    ("Ω_n for a kernel (f, g, F, β)", "omega::omega"),
    ("coefficients ϖ_i, Υ and D₁, D₂", "omega::varpi_coefficients"),
    ("fit of nΩ_n to D₁ + D₂ ln n", "omega::fit_expansion"),
    ("B₁, B₂", "omega::compute_b"),
    ("derived normalization kernel f, g, F", "omega::derived_kernel"),
    ("spectator factors and channel coefficients B₀", "scalprod::channel_coefficients"),
    ("radial integral of the bound–continuum overlap", "scalprod::radial_closed"),
    ("weak-limit amplitude Z₁, its finite-n form", "scalprod::z1_closed, scalprod::z1_finite_n"),
    ("angular integral H with Coulomb scattering amplitude", "scalprod::h_integral"),
    ("weak asymptotics of the scalar product", "scalprod::q_weak_asymptotics"),
    ("regularized plus-power (t)_+^{ib} e^{−εt}", "scalprod::regularized_plus_power"),
    ("prefactor ϖ₀ and the kernel R̃_n", "scalprod::varpi0, scalprod::KernelAnsatz"),
    ("term Θ(n) of the accumulation-point sum", "accsum::theta_term"),
    ("direct tail sum Σ_{n≥M} Θ(n)", "accsum::direct_tail_sum"),
    ("phase derivatives Φ_l^±′ and the no-stationary-point scan", "accsum::phase_no_stationary_check"),
    ("Υ̂(R) and C(R)", "accsum::upsilon_hat, accsum::c_of_r"),
    ("closed forms of the accumulation-point term", "accsum::closed_form_psi_acc"),
    ("Poisson pieces I–IV", "accsum::poisson_pieces"),
    ("direct vs closed cross-check", "accsum::poisson_crosscheck"),
];

fn concordance() -> String {
    let w = CONCORDANCE.iter().map(|(a, _)| a.chars().count()).max().unwrap_or(0);
    let mut s = String::new();
    for (q, op) in CONCORDANCE {
        let pad = w - q.chars().count();
        let _ = writeln!(s, "{q}{}  {op}", " ".repeat(pad));
    }
    s
}

fn error_json(kind: &str, op: &str, message: &str) -> String {
    json!({ "error": { "kind": kind, "op": op, "message": message } }).to_string()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = err.print();
                return ExitCode::SUCCESS;
            }
            let kind = if err.kind() == ErrorKind::InvalidSubcommand { "unknown_subcommand" } else { "usage" };
            eprintln!("{}", error_json(kind, "cli", err.to_string().trim()));
            return ExitCode::from(2);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(err) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("{}", error_json("usage", "cli", &err.to_string()));
            return ExitCode::from(2);
        }
    }
    let loaded = match &cli.config {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    };
    let result = loaded.and_then(|mut cfg| {
        if let Some(t) = cli.tol {
            cfg.quadrature.rel_tol = t;
            cfg.validate()?;
        }
        execute(&cli, &cfg)
    });
    let status = match result {
        Ok(s) => s,
        Err(err) => {
            eprintln!("{}", error_json(err.kind(), err.op(), &err.to_string()));
            return ExitCode::from(2);
        }
    };
    let manifest = RunManifest {
        tool: "tribody",
        version: env!("CARGO_PKG_VERSION"),
        subcommand: cli.cmd.name(),
        config: cli.config.as_ref().map(|p| p.display().to_string()),
        arguments: std::env::args().skip(1).collect(),
        out: cli.out.as_ref().map(|p| p.display().to_string()),
        seed: cli.seed,
    };
    let text = render(&manifest, status.output);
    match &cli.out {
        Some(path) => {
            if let Err(err) = std::fs::write(path, text) {
                eprintln!("{}", error_json("io", "cli", &format!("{}: {err}", path.display())));
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if status.failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
