//! The oscillatory double integral
//! Ω_n = ∫₀¹du ∫₀¹dv e^{−4nβuv f(u,v)} e^{4inu^{3/2} g(u,v)} F(u,v),
//! its large-n form Ω_n = D₁/n + D₂ ln n/n + o(1/n), the closed-form
//! coefficients ϖ₁..ϖ₇ and Υ, and the B₁, B₂ constants.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::amplitude::ComplexAmplitude;
use crate::error::{Error, Result};
use crate::quad::{adaptive, adaptive_with_breaks, gauss_legendre, AdaptiveOpts};

pub type RealFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type ComplexFn = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// f, g, F on [0,1]² and β. `u_independent` kernels depend on v only and can
/// be integrated along a complex u-contour.
#[derive(Clone)]
pub struct OmegaKernel {
    pub name: String,
    pub f: RealFn,
    pub g: RealFn,
    pub big_f: ComplexFn,
    pub beta: f64,
    pub u_independent: bool,
}

impl fmt::Debug for OmegaKernel {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.debug_struct("OmegaKernel")
            .field("name", &self.name)
            .field("beta", &self.beta)
            .field("u_independent", &self.u_independent)
            .finish()
    }
}

/// The analytic test family f ≡ 1, g = 13/6 + v(1 − v), F ∈ {1, v, 1 − v}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestKernel {
    One,
    V,
    OneMinusV,
}

pub const BETA: f64 = 1.0 / 16.0;

impl OmegaKernel {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        g: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        big_f: impl Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
        beta: f64,
    ) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
            g: Arc::new(g),
            big_f: Arc::new(big_f),
            beta,
            u_independent: false,
        }
    }

    /// Kernel whose f, g, F depend on v only.
    pub fn separable(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
        big_f: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        beta: f64,
    ) -> Self {
        Self {
            u_independent: true,
            ..Self::new(name, move |_, v| f(v), move |_, v| g(v), move |_, v| big_f(v), beta)
        }
    }

    pub fn test(which: TestKernel) -> Self {
        let g = |v: f64| 13.0 / 6.0 + v * (1.0 - v);
        match which {
            TestKernel::One => Self::separable("F=1", |_| 1.0, g, |_| Complex64::new(1.0, 0.0), BETA),
            TestKernel::V => Self::separable("F=v", |_| 1.0, g, |v| Complex64::new(v, 0.0), BETA),
            TestKernel::OneMinusV => Self::separable("F=1-v", |_| 1.0, g, |v| Complex64::new(1.0 - v, 0.0), BETA),
        }
    }

    /// The same kernel with G replaced by G*, i.e. g → −g.
    pub fn conjugate_phase(&self) -> Self {
        let g = self.g.clone();
        Self {
            name: format!("{}*", self.name),
            g: Arc::new(move |u, v| -g(u, v)),
            ..self.clone()
        }
    }

    /// F(u, v) replaced by F(0, v).
    pub fn leading_part(&self) -> Self {
        let big_f = self.big_f.clone();
        Self {
            name: format!("{}[u=0]", self.name),
            big_f: Arc::new(move |_, v| big_f(0.0, v)),
            ..self.clone()
        }
    }

    /// G(u, v) = βv f(u, v) − i√u g(u, v).
    pub fn big_g(&self, u: f64, v: f64) -> Complex64 {
        Complex64::new(self.beta * v * (self.f)(u, v), -u.sqrt() * (self.g)(u, v))
    }

    fn f_is_real(&self) -> bool {
        (0..=8).all(|i| (0..=8).all(|j| (self.big_f)(i as f64 / 8.0, j as f64 / 8.0).im == 0.0))
    }
}

/// The kernel obtained from the angular s-integral of the direct normalization
/// by s = 1 − ζ²/16, (α, ζ) = ρ(sin ω, cos ω), u = ρ², v = sin²ω, without the
/// continuum-kernel factor:
///
/// f = 16 s sin²(α/4)/(uv),
/// g = S(θ₀, φ₀)/(4u^{3/2}) with S = 4 arccos(√s cos(α/4)) − 4√s cos(α/4) √(1 − s cos²(α/4)),
/// F̂ = (sin α/α)(u/32) s / (cos(α/4) √cos(α/2) √(1 − s cos²(α/4)) √(1 − s cos(α/2))),
///
/// with α = √(uv), s = 1 − u(1 − v)/16. Every piece is written in a form
/// that stays accurate at u → 0.
pub fn derived_kernel() -> OmegaKernel {
    OmegaKernel::new(
        "derived",
        |u, v| {
            let p = KernelPoint::new(u, v);
            p.s * p.sinc4 * p.sinc4
        },
        |u, v| KernelPoint::new(u, v).g(),
        |u, v| Complex64::new(KernelPoint::new(u, v).big_f(), 0.0),
        BETA,
    )
}

struct KernelPoint {
    u: f64,
    alpha: f64,
    s: f64,
    /// sin(α/4)/(α/4)
    sinc4: f64,
    /// (1 − s cos²(α/4))/u
    e2: f64,
    /// (1 − s cos(α/2))/u
    e3: f64,
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

impl KernelPoint {
    fn new(u: f64, v: f64) -> Self {
        let alpha = (u * v).sqrt();
        let s = 1.0 - BETA * u * (1.0 - v);
        let sinc4 = sinc(0.25 * alpha);
        let e2 = BETA * (1.0 - v + s * v * sinc4 * sinc4);
        let e3 = BETA * (1.0 - v + 2.0 * s * v * sinc4 * sinc4);
        Self { u, alpha, s, sinc4, e2, e3 }
    }

    /// S/(4u^{3/2}) = 2 Σ_k c_k e2^{3/2} (u e2)^k / (2k + 3), c_k = C(2k,k)/4^k,
    /// from S = 8 ∫₀^ε x²/√(1 − x²) dx with ε² = u e2.
    fn g(&self) -> f64 {
        let eps2 = self.u * self.e2;
        if eps2 < 0.25 {
            let mut sum = 0.0;
            let mut c = 1.0;
            let mut p = 1.0;
            for k in 0..60 {
                let kf = k as f64;
                let term = c * p / (2.0 * kf + 3.0);
                sum += term;
                if term < 1e-18 * sum {
                    break;
                }
                c *= (2.0 * kf + 1.0) / (2.0 * kf + 2.0);
                p *= eps2;
            }
            2.0 * self.e2.powf(1.5) * sum
        } else {
            let eps = eps2.sqrt();
            let s0 = 4.0 * (eps.asin() - eps * (1.0 - eps2).sqrt());
            s0 / (4.0 * self.u.powf(1.5))
        }
    }

    fn big_f(&self) -> f64 {
        let c4 = (0.25 * self.alpha).cos();
        let c2 = (0.5 * self.alpha).cos();
        sinc(self.alpha) * self.s / (32.0 * c4 * c2.sqrt() * (self.e2 * self.e3).sqrt())
    }
}

/// Integration tolerances for Ω_n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OmegaOpts {
    pub rel_tol: f64,
    /// Largest phase advance per initial u-panel, radians.
    pub phase_per_panel: f64,
}

impl Default for OmegaOpts {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            phase_per_panel: 2.0,
        }
    }
}

fn inner_opts(n: f64, rel: f64) -> AdaptiveOpts {
    AdaptiveOpts {
        abs_tol: 1e-16 / n,
        rel_tol: rel,
        max_panels: 2_000_000,
    }
}

fn geometric_breaks(lo: f64, hi: f64, ratio: f64) -> Vec<f64> {
    let mut out = vec![0.0];
    let mut x = lo;
    while x < hi {
        out.push(x);
        x *= ratio;
    }
    out.push(hi);
    out
}

fn merge_breaks(mut a: Vec<f64>) -> Vec<f64> {
    a.sort_by(f64::total_cmp);
    a.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * y.abs().max(1e-300));
    a
}

fn v_breaks(n: f64) -> Vec<f64> {
    geometric_breaks(0.25 / n, 1.0, 2.0)
}

/// Ω_n by real-axis quadrature: outer adaptive in v with geometric breaks
/// down to 1/n, inner adaptive in u with initial panels uniform in w = u^{3/2}
/// so each advances the phase by at most `phase_per_panel`, truncated where
/// the decay exponent passes 46 (requires u f(u, v) nondecreasing in u).
pub fn omega_direct(kernel: &OmegaKernel, n: u64) -> Result<ComplexAmplitude> {
    omega_direct_with(kernel, n, OmegaOpts::default())
}

pub fn omega_direct_with(kernel: &OmegaKernel, n: u64, opts: OmegaOpts) -> Result<ComplexAmplitude> {
    const OP: &str = "omega::omega_direct";
    if n == 0 {
        return Err(Error::Domain {
            op: OP,
            detail: "n must be positive".into(),
        });
    }
    let nf = n as f64;
    let inner = |v: f64| -> Result<Complex64> {
        let gmax = [0.0, 0.25, 0.5, 0.75, 1.0]
            .iter()
            .map(|&u| (kernel.g)(u, v).abs())
            .fold(0.0, f64::max);
        let decay = |u: f64| 4.0 * nf * kernel.beta * u * v * (kernel.f)(u, v);
        let u_end = if decay(1.0) <= 46.0 {
            1.0
        } else {
            // bisection for the cutoff
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..60 {
                let m = 0.5 * (lo + hi);
                if decay(m) > 46.0 {
                    hi = m;
                } else {
                    lo = m;
                }
            }
            hi
        };
        let w_end = u_end.powf(1.5);
        let panels = ((4.0 * nf * gmax * w_end / opts.phase_per_panel).ceil() as usize).clamp(4, 1_000_000);
        let mut breaks: Vec<f64> = (0..=panels).map(|k| (w_end * k as f64 / panels as f64).powf(2.0 / 3.0)).collect();
        let d0 = decay(1.0);
        if d0 > 0.0 {
            let scale = 1.0 / d0;
            breaks.extend(geometric_breaks(scale / 8.0, u_end, 2.0).into_iter().filter(|&x| x < u_end));
        }
        let breaks = merge_breaks(breaks);
        let integrand = |u: f64| {
            let phase = 4.0 * nf * u * u.sqrt() * (kernel.g)(u, v);
            let e = (-decay(u)).exp();
            (kernel.big_f)(u, v) * Complex64::from_polar(e, phase)
        };
        let r = adaptive_with_breaks(integrand, &breaks, inner_opts(nf, 0.1 * opts.rel_tol))?;
        Ok(r.value)
    };
    let failed = std::cell::Cell::new(None);
    let outer = |v: f64| match inner(v) {
        Ok(z) => z,
        Err(e) => {
            failed.set(Some(e));
            Complex64::new(0.0, 0.0)
        }
    };
    let r = adaptive_with_breaks(outer, &v_breaks(nf), inner_opts(nf, opts.rel_tol));
    if let Some(e) = failed.take() {
        return Err(e);
    }
    r.map_err(|e| match e {
        Error::Quadrature { last, previous, .. } => Error::Quadrature { op: OP, last, previous },
        other => other,
    })
}

/// J(a, b) = ∫₀¹ e^{−au + ibu^{3/2}} du for a ≥ 0.
pub fn j_integral(a: f64, b: f64) -> Result<ComplexAmplitude> {
    if b < 0.0 {
        return Ok(j_integral(a, -b)?.conj_amp());
    }
    if b == 0.0 {
        let v = if a < 1e-8 { 1.0 - 0.5 * a } else { -(-a).exp_m1() / a };
        return Ok(ComplexAmplitude::exact(Complex64::new(v, 0.0)));
    }
    let opts = AdaptiveOpts {
        abs_tol: 1e-20,
        rel_tol: 1e-12,
        max_panels: 200_000,
    };
    let e = |u: Complex64| (-a * u + I * b * u * u.sqrt()).exp();
    let len = (60.0 / a.max(1e-300)).min(1.0);
    if b * len.powf(1.5) <= 1000.0 {
        // real axis: the integrand has at most ~1000 rad of phase before it decays
        let k = ((b * len.powf(1.5) / 2.0).ceil() as usize).max(4);
        let mut breaks: Vec<f64> = (0..=k).map(|j| len * (j as f64 / k as f64).powf(2.0 / 3.0)).collect();
        if a > 0.0 {
            breaks.extend(geometric_breaks(0.125 / a, len, 2.0).into_iter().filter(|&x| x < len));
        }
        let r = adaptive_with_breaks(|u| e(Complex64::new(u, 0.0)), &merge_breaks(breaks), opts)?;
        return Ok(r);
    }
    // contour 0 → iY → 1 + iY → 1 in the upper half plane; the ib u^{3/2} term decays on it
    let y_top = (60.0 / (0.7 * b)).powf(2.0 / 3.0).min(0.5);
    let scale = b.powf(-2.0 / 3.0);
    let up_breaks = merge_breaks(geometric_breaks(1e-3 * scale, y_top, 2.0));
    let up = adaptive_with_breaks(|y| e(Complex64::new(0.0, y)) * I, &up_breaks, opts)?;
    let top_scale = (1.0 / (b * y_top)).powi(2).min(y_top) * 1e-3;
    let top_breaks = merge_breaks(geometric_breaks(top_scale, 1.0, 2.0));
    let top = adaptive_with_breaks(|x| e(Complex64::new(x, y_top)), &top_breaks, opts)?;
    // near u = 1 the phase b·Re u^{3/2} is ~b; factor e^{−a+ib} out and use (1+iy)^{3/2} − 1
    let down_breaks = merge_breaks(geometric_breaks(1e-3 / b, y_top, 2.0));
    let shifted = |y: f64| {
        let l = Complex64::new(0.5 * (y * y).ln_1p(), y.atan()) * 1.5;
        let em1 = Complex64::new(l.re.exp_m1() * l.im.cos() - 2.0 * (0.5 * l.im).sin().powi(2), l.re.exp() * l.im.sin());
        (Complex64::new(0.0, -a * y) + I * b * em1).exp() * I
    };
    let down = adaptive_with_breaks(shifted, &down_breaks, opts)?;
    let corner = Complex64::from_polar((-a).exp(), b);
    Ok(ComplexAmplitude::new(
        up.value + top.value - corner * down.value,
        up.err + top.err + down.err * corner.norm(),
    ))
}

trait ConjAmp {
    fn conj_amp(self) -> Self;
}

impl ConjAmp for ComplexAmplitude {
    fn conj_amp(self) -> Self {
        ComplexAmplitude::new(self.value.conj(), self.err)
    }
}

/// Ω_n for a u-independent kernel: Ω_n = ∫₀¹ dv F(v) J(4nβv f(v), 4n g(v)),
/// with J on a complex contour. Reaches n ~ 10¹² where real-axis quadrature cannot.
pub fn omega_contour(kernel: &OmegaKernel, n: u64) -> Result<ComplexAmplitude> {
    const OP: &str = "omega::omega_contour";
    if !kernel.u_independent {
        return Err(Error::Unsupported {
            op: OP,
            detail: format!("kernel `{}` depends on u", kernel.name),
        });
    }
    if n == 0 {
        return Err(Error::Domain {
            op: OP,
            detail: "n must be positive".into(),
        });
    }
    let nf = n as f64;
    let failed = std::cell::Cell::new(None);
    let integrand = |v: f64| {
        let a = 4.0 * nf * kernel.beta * v * (kernel.f)(0.0, v);
        let b = 4.0 * nf * (kernel.g)(0.0, v);
        match j_integral(a, b) {
            Ok(j) => (kernel.big_f)(0.0, v) * j.value,
            Err(e) => {
                failed.set(Some(e));
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let r = adaptive_with_breaks(integrand, &v_breaks(nf), inner_opts(nf, 1e-10));
    if let Some(e) = failed.take() {
        return Err(e);
    }
    r.map_err(|e| match e {
        Error::Quadrature { last, previous, .. } => Error::Quadrature { op: OP, last, previous },
        other => other,
    })
}

/// Ω_n by the contour route when the kernel allows it, else by real-axis quadrature.
pub fn omega(kernel: &OmegaKernel, n: u64) -> Result<ComplexAmplitude> {
    if kernel.u_independent {
        omega_contour(kernel, n)
    } else {
        omega_direct(kernel, n)
    }
}

/// ϖ₁..ϖ₇ and Υ. `varpi[3]` carries the factor g(0,0) produced by the integration
/// by parts that yields it; `varpi4_as_printed` is the same term without it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarpiCoefficients {
    pub varpi: [Complex64; 7],
    pub upsilon: Complex64,
    pub varpi4_as_printed: Complex64,
}

impl VarpiCoefficients {
    /// D₁ = ϖ₁ − ϖ₂ + ϖ₃ + ϖ₄ + ϖ₅ + ϖ₆ + ϖ₇: the boundary term at v = 1 enters as −ϖ₂/n.
    pub fn d1(&self) -> Complex64 {
        let w = &self.varpi;
        w[0] - w[1] + w[2] + w[3] + w[4] + w[5] + w[6]
    }

    pub fn d2(&self) -> Complex64 {
        self.upsilon
    }

    /// The plain sum Σϖ_i with the printed ϖ₄.
    pub fn d1_as_printed(&self) -> Complex64 {
        let w = &self.varpi;
        w[0] + w[1] + w[2] + self.varpi4_as_printed + w[4] + w[5] + w[6]
    }
}

const DERIV_STEP: f64 = 1e-3;

/// Five-point derivative on [0, 1], one-sided near the ends.
fn deriv(f: &dyn Fn(f64) -> Complex64, x: f64) -> Complex64 {
    let h = DERIV_STEP;
    if x - 2.0 * h >= 0.0 && x + 2.0 * h <= 1.0 {
        (f(x - 2.0 * h) - f(x - h) * 8.0 + f(x + h) * 8.0 - f(x + 2.0 * h)) / (12.0 * h)
    } else {
        let s = if x - 2.0 * h < 0.0 { h } else { -h };
        (f(x) * -25.0 + f(x + s) * 48.0 - f(x + 2.0 * s) * 36.0 + f(x + 3.0 * s) * 16.0 - f(x + 4.0 * s) * 3.0) / (12.0 * s)
    }
}

/// The coefficients from their defining one- and two-dimensional integrals.
pub fn varpi_coefficients(kernel: &OmegaKernel) -> Result<VarpiCoefficients> {
    const OP: &str = "omega::varpi_coefficients";
    let beta = kernel.beta;
    let big_f0 = |v: f64| (kernel.big_f)(0.0, v);
    let g_re = |v: f64| Complex64::new(beta * v * (kernel.f)(0.0, v), 0.0);
    let gv = |v: f64| deriv(&g_re, v);
    let check = |v: f64| -> Result<Complex64> {
        let d = gv(v);
        if d.norm() < 1e-10 {
            Err(Error::Singular { op: OP, value: d.norm() })
        } else {
            Ok(d)
        }
    };
    let gv0 = check(0.0)?;
    let gv1 = check(1.0)?;
    let h = |v: f64| big_f0(v) / gv(v);
    let hp = |v: f64| deriv(&h, v);
    let k = |v: f64| hp(v) / gv(v);
    let kp = |v: f64| deriv(&k, v);
    let g00 = (kernel.g)(0.0, 0.0);
    let g01 = kernel.big_g(0.0, 1.0).re;
    if g01 <= 0.0 {
        return Err(Error::Domain {
            op: OP,
            detail: format!("G(0,1) = {g01} must be positive"),
        });
    }
    let opts = AdaptiveOpts::rel(1e-12);

    // ϖ₁ = ∫₀¹dt ∫₀¹dv e^{−4tG(0,v)} F(0,v)
    let gl = gauss_legendre(48);
    let mut w1 = Complex64::new(0.0, 0.0);
    for (t, wt) in gl.mapped(0.0, 1.0) {
        for (v, wv) in gl.mapped(0.0, 1.0) {
            w1 += big_f0(v) * (-4.0 * t * g_re(v)).exp() * (wt * wv);
        }
    }

    // ϖ₂ = F(0,1) G(0,1)/G'_v(0,1) ∫₁^∞ ln t e^{−4tG(0,1)} dt
    let c = 4.0 * g01;
    let lnint = adaptive(|t| Complex64::new(t.ln() * (-c * t).exp(), 0.0), 1.0, 1.0 + 80.0 / c, opts)?.value;
    let w2 = big_f0(1.0) * g01 / gv1 * lnint;

    // ϖ₃ = (1/6) F(0,0)/G'_v(0,0) ∫₁^∞ e^{4iρg}/ρ dρ, ρ = 1 ± iy
    if g00 == 0.0 {
        return Err(Error::Singular { op: OP, value: 0.0 });
    }
    let cg = 4.0 * g00;
    let sgn = g00.signum();
    let ylen = 80.0 / cg.abs();
    let e1 = adaptive(
        |y| {
            let rho = Complex64::new(1.0, sgn * y);
            (I * cg * rho).exp() / rho * (I * sgn)
        },
        0.0,
        ylen,
        opts,
    )?
    .value;
    let w3 = big_f0(0.0) / gv0 * e1 / 6.0;

    // ϖ₄ = −i(2/3) g(0,0) F(0,0)/G'_v(0,0) ∫₀¹ ln ρ e^{4iρg} dρ, ρ = e^{−x}
    let logint = adaptive(|x| -x * (-x).exp() * (I * cg * (-x).exp()).exp(), 0.0, 60.0, opts)?.value;
    let w4_printed = -I * (2.0 / 3.0) * big_f0(0.0) / gv0 * logint;
    let w4 = w4_printed * g00;

    let upsilon = big_f0(0.0) / gv0 / 12.0;

    // ϖ₅ = −(1/16)(1/G'_v(0,1)) h'(1) ∫₁^∞ e^{−4tG(0,1)}/t² dt, t = 1/σ
    let e2 = adaptive(|s| Complex64::new((-c / s.max(1e-300)).exp(), 0.0), 0.0, 1.0, opts)?.value;
    let w5 = -hp(1.0) / gv1 * e2 / 16.0;
    let w6 = hp(0.0) / gv0 / 16.0;

    // ϖ₇ = (1/16) ∫₁^∞ dt/t² ∫₀¹ dv e^{−4tG(0,v)} k'(v), t = 1/σ
    let kp_nodes: Vec<(f64, f64, Complex64)> = gauss_legendre(64)
        .mapped(0.0, 1.0)
        .map(|(v, w)| (v, w, kp(v)))
        .collect();
    let sum_v = |t: f64| -> Complex64 {
        kp_nodes
            .iter()
            .map(|&(v, w, d)| d * ((-4.0 * t * g_re(v).re).exp() * w))
            .sum()
    };
    let w7 = if kp_nodes.iter().all(|(_, _, d)| d.norm() < 1e-9) {
        Complex64::new(0.0, 0.0)
    } else {
        adaptive(|s| if s == 0.0 { Complex64::new(0.0, 0.0) } else { sum_v(1.0 / s) }, 0.0, 1.0, opts)?.value / 16.0
    };

    Ok(VarpiCoefficients {
        varpi: [w1, w2, w3, w4, w5, w6, w7],
        upsilon,
        varpi4_as_printed: w4_printed,
    })
}

/// Least-squares fit of n Ω_n on {1, ln n}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmegaExpansion {
    pub d1: Complex64,
    pub d2: Complex64,
    /// sqrt(Σ|residual|² / Σ|n Ω_n|²).
    pub fit_residual: f64,
    pub b1: f64,
    pub b2: f64,
    pub n_grid: Vec<u64>,
    pub n_omega: Vec<Complex64>,
    /// The grid spans less than a decade.
    pub ill_conditioned: bool,
}

/// Fit of D₁ + D₂ ln n to samples (n, n Ω_n).
pub fn fit_samples(n_grid: &[u64], n_omega: &[Complex64]) -> Result<(Complex64, Complex64, f64)> {
    if n_grid.len() < 4 || n_grid.len() != n_omega.len() {
        return Err(Error::Domain {
            op: "omega::fit_expansion",
            detail: format!("need at least 4 matching samples, got {}", n_grid.len()),
        });
    }
    let m = n_grid.len() as f64;
    let ls: Vec<f64> = n_grid.iter().map(|&n| (n as f64).ln()).collect();
    let sl: f64 = ls.iter().sum();
    let sll: f64 = ls.iter().map(|l| l * l).sum();
    let sy: Complex64 = n_omega.iter().sum();
    let sly: Complex64 = ls.iter().zip(n_omega).map(|(l, y)| y * *l).sum();
    let det = m * sll - sl * sl;
    let d2 = (sly * m - sy * sl) / det;
    let d1 = (sy - d2 * sl) / m;
    let res2: f64 = ls.iter().zip(n_omega).map(|(l, y)| (y - d1 - d2 * *l).norm_sqr()).sum();
    let tot: f64 = n_omega.iter().map(|y| y.norm_sqr()).sum();
    Ok((d1, d2, (res2 / tot).sqrt()))
}

pub fn fit_expansion(kernel: &OmegaKernel, n_grid: &[u64]) -> Result<OmegaExpansion> {
    let mut n_omega = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        n_omega.push(omega(kernel, n)?.value * n as f64);
    }
    let (d1, d2, fit_residual) = fit_samples(n_grid, &n_omega)?;
    let (b1, b2) = if kernel.f_is_real() {
        (d1.re, d2.re)
    } else {
        let conj = kernel.conjugate_phase();
        let mut c = Vec::with_capacity(n_grid.len());
        for &n in n_grid {
            c.push(omega(&conj, n)?.value * n as f64);
        }
        let (c1, c2, _) = fit_samples(n_grid, &c)?;
        (0.5 * (d1 + c1).re, 0.5 * (d2 + c2).re)
    };
    let lo = *n_grid.iter().min().unwrap_or(&1) as f64;
    let hi = *n_grid.iter().max().unwrap_or(&1) as f64;
    Ok(OmegaExpansion {
        d1,
        d2,
        fit_residual,
        b1,
        b2,
        n_grid: n_grid.to_vec(),
        n_omega,
        ill_conditioned: hi / lo < 10.0,
    })
}

/// B₁, B₂ from the coefficient formulas: B_i = ½(D_i(G) + D_i(G*)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BCoefficients {
    pub b1: f64,
    pub b2: f64,
    pub d1: Complex64,
    pub d2: Complex64,
    pub d1_conjugate: Complex64,
    pub d2_conjugate: Complex64,
}

pub fn compute_b(kernel: &OmegaKernel) -> Result<BCoefficients> {
    let w = varpi_coefficients(kernel)?;
    let wc = varpi_coefficients(&kernel.conjugate_phase())?;
    let (d1, d2, c1, c2) = (w.d1(), w.d2(), wc.d1(), wc.d2());
    // the average is real up to rounding; keep the real part
    Ok(BCoefficients {
        b1: 0.5 * (d1 + c1).re,
        b2: 0.5 * (d2 + c2).re,
        d1,
        d2,
        d1_conjugate: c1,
        d2_conjugate: c2,
    })
}

/// n^power |Ω_n − Ω_n^{II}|, where Ω^{II} uses F(0, v) in place of F(u, v).
pub fn remainder_scaled(kernel: &OmegaKernel, n: u64, power: f64) -> Result<f64> {
    let full = omega_direct(kernel, n)?.value;
    let lead = omega_direct(&kernel.leading_part(), n)?.value;
    Ok((full - lead).norm() * (n as f64).powf(power))
}
