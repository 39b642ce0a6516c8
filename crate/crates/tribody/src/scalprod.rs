//! Weak large-y asymptotics of the scalar product of the BBK wave with the
//! degenerate bound-state generating function: the channel coefficients
//! B₀^{in/out}, L_{in/out}, the Z^{in/out} integrals and their closed forms,
//! the H^{in/out} sphere integrals, and the kernel ansatz for R_n.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::amplitude::ComplexAmplitude;
use crate::error::{Error, Result};
use crate::kinematics::{dot, norm, scale, sub, add, unit, Momenta, SystemConfig, Vec3};
use crate::pairstates::normalization;
use crate::quad::{adaptive_with_breaks, orthonormal_frame, AdaptiveOpts, SphereGrid};
use crate::specfun::{gamma_complex, hyp2f1_terminating, kummer_phi, MathieuEven};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const SINGULAR_COS: f64 = 1e-12;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// x^{iy} for x > 0.
fn pow_i(x: f64, y: f64) -> Complex64 {
    Complex64::from_polar(1.0, y * x.ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelCoefficients {
    pub b0_in: Complex64,
    pub b0_out: Complex64,
    pub l_in: Vec3,
    pub l_out: Vec3,
    /// ω = η₂ + η₃
    pub omega: f64,
    /// A₀ = −N₀^{(23)}/(4π²)
    pub a0: Complex64,
}

/// Γ(−iη)(1 − e^{2πη}) = −i Γ(1 − iη) (e^{2πη} − 1)/η, equal to −2πi at η = 0.
pub fn spectator_factor(eta: f64) -> Result<Complex64> {
    let g = gamma_complex(Complex64::new(1.0, -eta))?.value;
    let ratio = if eta == 0.0 { 2.0 * PI } else { (2.0 * PI * eta).exp_m1() / eta };
    Ok(-I * g * ratio)
}

/// The coefficients from the spectator-pair data: η₂, η₃, the pair momenta
/// k₂, k₃ and the direction p̂. A pair with η = 0 drops out of both B₀ and L.
pub fn channel_coefficients_from(eta2: f64, eta3: f64, k2: Vec3, k3: Vec3, phat: Vec3) -> Result<ChannelCoefficients> {
    const OP: &str = "scalprod::channel_coefficients";
    let phat = unit(phat);
    let mut b_in = c(1.0);
    let mut b_out = c(1.0);
    let mut l_in = [0.0; 3];
    let mut l_out = [0.0; 3];
    // sign +1 for pair 2, −1 for pair 3: the in-channel uses 1 − ⟨p̂,k̂₂⟩ and 1 + ⟨p̂,k̂₃⟩
    for (eta, kv, sign) in [(eta2, k2, 1.0), (eta3, k3, -1.0)] {
        if eta == 0.0 {
            continue;
        }
        let kn = norm(kv);
        let khat = unit(kv);
        let cs = dot(phat, khat);
        if 1.0 - cs.abs() < SINGULAR_COS {
            return Err(Error::Kinematics {
                op: OP,
                detail: format!("⟨p̂, k̂⟩ = {cs} lies on a forward/backward singular line"),
            });
        }
        let (m_in, m_out) = (1.0 - sign * cs, 1.0 + sign * cs);
        let h = 0.5 * 3f64.sqrt() * kn;
        b_in *= pow_i(h * m_in, eta);
        b_out *= pow_i(h * m_out, eta);
        let f = eta / 3f64.sqrt();
        l_in = add(l_in, scale(sub(khat, scale(phat, sign)), f / m_in));
        l_out = add(l_out, scale(add(khat, scale(phat, sign)), f / m_out));
    }
    let n0 = normalization(eta2)? * normalization(eta3)?;
    let a0 = -n0 / (4.0 * PI * PI);
    let common = a0 * spectator_factor(eta2)? * spectator_factor(eta3)? * (-0.5 * PI * (eta2 + eta3)).exp();
    Ok(ChannelCoefficients {
        b0_in: common * b_in,
        b0_out: common * b_out,
        l_in,
        l_out,
        omega: eta2 + eta3,
        a0,
    })
}

pub fn channel_coefficients(config: &SystemConfig, q: &Momenta) -> Result<ChannelCoefficients> {
    config.validate()?;
    channel_coefficients_from(q.eta[1], q.eta[2], q.k_pair[1], q.k_pair[2], q.p)
}

/// Pair-1 data entering Z: k = |k|, k̂, η = η₁, |α₁| = 2k|η|, N_c^{(1)}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ActivePair {
    pub k: f64,
    pub khat: Vec3,
    pub eta: f64,
    pub alpha_abs: f64,
    pub nc: Complex64,
}

impl ActivePair {
    pub fn new(k: Vec3, eta: f64) -> Result<Self> {
        let kn = norm(k);
        if kn == 0.0 || eta == 0.0 {
            return Err(Error::Domain {
                op: "scalprod::ActivePair",
                detail: "pair 1 needs k > 0 and a nonzero coupling".into(),
            });
        }
        Ok(Self {
            k: kn,
            khat: unit(k),
            eta,
            alpha_abs: 2.0 * kn * eta.abs(),
            nc: normalization(eta)?,
        })
    }

    pub fn from_momenta(q: &Momenta) -> Result<Self> {
        Self::new(q.k, q.eta[0])
    }

    /// |α₁|/(2k)
    pub fn kappa(&self) -> f64 {
        0.5 * self.alpha_abs / self.k
    }

    /// 1/k^{4+iη}
    fn inv_k_power(&self) -> Complex64 {
        pow_i(self.k, -self.eta) / self.k.powi(4)
    }

    fn a(&self) -> Complex64 {
        Complex64::new(3.0, self.eta)
    }
}

/// ∫₀^∞ t^{2+iη} e^{−λt} L_{n−1}(rt) dt = Γ(3+iη)/λ^{3+iη} ₂F₁(1−n, 3+iη; 1; r/λ),
/// λ = |α₁|/2 + ikn.
pub fn radial_closed(n: usize, eta: f64, alpha_abs: f64, k: f64, r: f64) -> Result<Complex64> {
    let a = Complex64::new(3.0, eta);
    let lambda = Complex64::new(0.5 * alpha_abs, k * n as f64);
    let f = hyp2f1_terminating(n - 1, a, c(1.0), r / lambda)?.value;
    Ok(gamma_complex(a)?.value * (-a * lambda.ln()).exp() * f)
}

/// Z₁ at finite n in the ₂F₁ form, for the vector L.
pub fn z1_finite_n(pair: &ActivePair, l: Vec3, khat2: Vec3, n: usize) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::Domain {
            op: "scalprod::z1_finite_n",
            detail: "n must be positive".into(),
        });
    }
    let a = pair.a();
    let nf = n as f64;
    let lambda = Complex64::new(0.5 * pair.alpha_abs, pair.k * nf);
    let r = 0.5 * pair.alpha_abs * (1.0 + dot(unit(khat2), pair.khat));
    let f = hyp2f1_terminating(n - 1, a, c(1.0), r / lambda)?.value;
    // C_n/λ^{3+iη} with n^{3+iη} folded into the exponent
    let ratio = (a * (c(nf.ln()) - lambda.ln())).exp();
    Ok(-pair.nc / (I * pair.k) * dot(pair.khat, l) * gamma_complex(a)?.value * ratio * f)
}

/// The n → ∞ form of Z₁:
/// −N_c e^{πη/2} k^{−4−iη} ⟨k̂, L⟩ Γ(3+iη) Φ(3+iη, 1, iκ(1 + ⟨k̂″, k̂⟩)).
pub fn z1_closed(pair: &ActivePair, l: Vec3, khat2: Vec3) -> Result<Complex64> {
    let a = pair.a();
    let z = I * pair.kappa() * (1.0 + dot(unit(khat2), pair.khat));
    let phi = kummer_phi(a, c(1.0), z)?.value;
    Ok(-pair.nc * (0.5 * PI * pair.eta).exp() * pair.inv_k_power() * dot(pair.khat, l) * gamma_complex(a)?.value * phi)
}

/// Z₁^{in} in closed form for pair 1 of `q`.
pub fn z_in_closed(q: &Momenta, khat2: Vec3) -> Result<Complex64> {
    let cc = channel_coefficients_from(q.eta[1], q.eta[2], q.k_pair[1], q.k_pair[2], q.p)?;
    z1_closed(&ActivePair::from_momenta(q)?, cc.l_in, khat2)
}

/// Angular factor s_c(x̂, k̂) of the outgoing spherical wave.
#[derive(Clone)]
pub enum ScatteringAmplitude {
    /// c_η (1 − ⟨x̂, k̂⟩)^{−1−iη} with c_η = −iη 2^{iη}/(2π), so that
    /// ∫ s_c dx̂ = 1 (in the regularised sense) and s_c → δ(x̂, k̂) as η → 0.
    Coulomb,
    Constant(Complex64),
    /// s_c(x̂, k̂, η)
    Custom(Arc<dyn Fn(Vec3, Vec3, f64) -> Complex64 + Send + Sync>),
}

impl fmt::Debug for ScatteringAmplitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Coulomb => write!(f, "Coulomb"),
            Self::Constant(v) => write!(f, "Constant({v})"),
            Self::Custom(_) => write!(f, "Custom"),
        }
    }
}

pub fn coulomb_sc_constant(eta: f64) -> Complex64 {
    -I * eta * pow_i(2.0, eta) / (2.0 * PI)
}

/// Pointwise Coulomb s_c; singular in the forward direction.
pub fn coulomb_sc(eta: f64, xhat: Vec3, khat: Vec3) -> Result<Complex64> {
    let w = 1.0 - dot(unit(xhat), unit(khat));
    if w <= 0.0 {
        return Err(Error::Singular {
            op: "scalprod::coulomb_sc",
            value: w,
        });
    }
    Ok(coulomb_sc_constant(eta) * (Complex64::new(-1.0, -eta) * w.ln()).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Wave {
    In,
    Out,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HIntegral {
    pub value: Complex64,
    pub err: f64,
    /// Contribution of the cap θ < `CAP` about k̂ (Coulomb s_c only).
    pub cap_contribution: Complex64,
}

/// Half-angle of the forward cap whose contribution is reported separately.
pub const CAP: f64 = 1e-3;

/// H = ∫dx̂ ⟨x̂, L⟩ Φ(3+iη, 1, −iκ(1 − ⟨k̂″, x̂⟩)) s_c(x̂, k̂) with explicit η and κ,
/// so that the conjugate structure H(η, κ)* = H(−η, −κ) can be probed directly.
///
/// For the Coulomb amplitude the forward singularity is handled by subtraction:
/// H = f(k̂) + c_η ∫dθ sin θ (1 − cos θ)^{−1−iη} ∫dφ [f − f(k̂)],
/// with polar angles about k̂ and a φ trapezoid.
pub fn h_integral_raw(eta: f64, kappa: f64, l: Vec3, khat: Vec3, khat2: Vec3, sc: &ScatteringAmplitude) -> Result<HIntegral> {
    const OP: &str = "scalprod::h_integral";
    let a = Complex64::new(3.0, eta);
    let khat = unit(khat);
    let khat2 = unit(khat2);
    let f = |x: Vec3| -> Result<Complex64> {
        let z = -I * kappa * (1.0 - dot(khat2, x));
        Ok(kummer_phi(a, c(1.0), z)?.value * dot(x, l))
    };
    let failed = std::cell::Cell::new(None);
    let guard = |r: Result<Complex64>| match r {
        Ok(v) => v,
        Err(e) => {
            failed.set(Some(e));
            c(0.0)
        }
    };
    let out = match sc {
        ScatteringAmplitude::Coulomb => {
            let f0 = f(khat)?;
            let (e1, e2) = orthonormal_frame(khat);
            let n_phi = 64usize.max(16 * (2.0 * kappa.abs() + eta.abs()).ceil() as usize);
            let ring = |theta: f64| -> Complex64 {
                let (st, ct) = theta.sin_cos();
                let mut acc = c(0.0);
                for j in 0..n_phi {
                    let phi = 2.0 * PI * j as f64 / n_phi as f64;
                    let (sp, cp) = phi.sin_cos();
                    let x = add(add(scale(e1, st * cp), scale(e2, st * sp)), scale(khat, ct));
                    acc += guard(f(x)) - f0;
                }
                acc * (2.0 * PI / n_phi as f64)
            };
            let integrand = |theta: f64| {
                if theta == 0.0 {
                    return c(0.0);
                }
                let half = (0.5 * theta).sin();
                let w = 2.0 * half * half;
                ring(theta) * theta.sin() * (Complex64::new(-1.0, -eta) * w.ln()).exp()
            };
            let opts = AdaptiveOpts {
                abs_tol: 1e-15,
                rel_tol: 1e-11,
                max_panels: 20_000,
            };
            let breaks: Vec<f64> = (0..=16).map(|i| CAP + (PI - CAP) * i as f64 / 16.0).collect();
            let rest = adaptive_with_breaks(integrand, &breaks, opts)?;
            // the cap is tiny; its tolerance follows the bulk, not its own size
            let scale_abs = rest.value.norm().max(f0.norm()).max(1e-300);
            let cap_opts = AdaptiveOpts {
                abs_tol: 1e-13 * scale_abs,
                ..opts
            };
            // f − f(k̂) cancels to roundoff as θ → 0 and the 1/w weight turns that
            // into 1/θ noise; the integrand itself is O(θ), so [0, θ_min] is dropped
            // and its size booked as error
            let theta_min = 1e-6;
            let cap = adaptive_with_breaks(integrand, &[theta_min, 1e-5, 1e-4, CAP], cap_opts)?;
            let dropped = 0.5 * integrand(theta_min).norm() * theta_min;
            let ce = coulomb_sc_constant(eta);
            HIntegral {
                value: f0 + ce * (cap.value + rest.value),
                err: ce.norm() * (cap.err + rest.err + dropped),
                cap_contribution: ce * cap.value,
            }
        }
        ScatteringAmplitude::Constant(s0) => {
            let n_t = 48 + (4.0 * kappa.abs()) as usize;
            let grid = SphereGrid::product_about(n_t, 2 * n_t, khat2);
            let v = grid.integrate(|x| guard(f(x))) * s0;
            HIntegral {
                value: v,
                err: 0.0,
                cap_contribution: c(0.0),
            }
        }
        ScatteringAmplitude::Custom(g) => {
            let n_t = 64 + (4.0 * kappa.abs()) as usize;
            let grid = SphereGrid::product_about(n_t, 2 * n_t, khat);
            let v = grid.integrate(|x| guard(f(x)) * g(x, khat, eta));
            HIntegral {
                value: v,
                err: 0.0,
                cap_contribution: c(0.0),
            }
        }
    };
    if let Some(e) = failed.take() {
        return Err(match e {
            Error::Quadrature { last, previous, .. } => Error::Quadrature { op: OP, last, previous },
            other => other,
        });
    }
    Ok(out)
}

/// H^{in} or H^{out} for pair 1 of `q` and bound-state direction k̂″.
pub fn h_integral(q: &Momenta, khat2: Vec3, wave: Wave, sc: &ScatteringAmplitude) -> Result<HIntegral> {
    let cc = channel_coefficients_from(q.eta[1], q.eta[2], q.k_pair[1], q.k_pair[2], q.p)?;
    let pair = ActivePair::from_momenta(q)?;
    let l = match wave {
        Wave::In => cc.l_in,
        Wave::Out => cc.l_out,
    };
    h_integral_raw(pair.eta, pair.kappa(), l, pair.khat, khat2, sc)
}

/// Coefficient of H in Z: +N_c Γ(3+iη) e^{−πη/2}/k^{4+iη}. The diverging
/// wave enters ψ_c with a minus sign, so Z = Z₁ − (−N_c Γ e^{−πη/2} H/k^{4+iη}).
pub fn z2_coefficient(pair: &ActivePair) -> Result<Complex64> {
    Ok(pair.nc * gamma_complex(pair.a())?.value * (-0.5 * PI * pair.eta).exp() * pair.inv_k_power())
}

/// Symbolic part of one wave: δ(ŷ, direction·p̂) y^{−2} e^{i(momentum_sign·yp + ω ln y)}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveTag {
    pub direction: f64,
    pub momentum_sign: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakAsymptotics {
    /// i B₀^{in} 2π/(ip)
    pub prefactor_in: Complex64,
    /// −i B₀^{out} 2π/(ip)
    pub prefactor_out: Complex64,
    pub z_in: Complex64,
    pub z_out: Complex64,
    pub z1_in: Complex64,
    pub z1_out: Complex64,
    pub h_in: HIntegral,
    pub h_out: HIntegral,
    /// Z₁^{in} at the finite n requested, ₂F₁ form.
    pub z1_in_finite_n: Complex64,
    pub channel: ChannelCoefficients,
    pub tag_in: WaveTag,
    pub tag_out: WaveTag,
}

pub fn q_weak_asymptotics(
    config: &SystemConfig,
    q: &Momenta,
    n: usize,
    khat2: Vec3,
    sc: &ScatteringAmplitude,
) -> Result<WeakAsymptotics> {
    let cc = channel_coefficients(config, q)?;
    let pair = ActivePair::from_momenta(q)?;
    let p = norm(q.p);
    if p == 0.0 {
        return Err(Error::Kinematics {
            op: "scalprod::q_weak_asymptotics",
            detail: "p = 0".into(),
        });
    }
    let z1_in = z1_closed(&pair, cc.l_in, khat2)?;
    let z1_out = z1_closed(&pair, cc.l_out, khat2)?;
    let h_in = h_integral_raw(pair.eta, pair.kappa(), cc.l_in, pair.khat, khat2, sc)?;
    let h_out = h_integral_raw(pair.eta, pair.kappa(), cc.l_out, pair.khat, khat2, sc)?;
    let k2 = z2_coefficient(&pair)?;
    let pre = 2.0 * PI / p;
    Ok(WeakAsymptotics {
        prefactor_in: cc.b0_in * pre,
        prefactor_out: -cc.b0_out * pre,
        z_in: z1_in + k2 * h_in.value,
        z_out: z1_out + k2 * h_out.value,
        z1_in,
        z1_out,
        h_in,
        h_out,
        z1_in_finite_n: z1_finite_n(&pair, cc.l_in, khat2, n)?,
        channel: cc,
        tag_in: WaveTag {
            direction: -1.0,
            momentum_sign: -1.0,
            omega: cc.omega,
        },
        tag_out: WaveTag {
            direction: 1.0,
            momentum_sign: 1.0,
            omega: cc.omega,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegularizedPower {
    pub value: ComplexAmplitude,
    /// Γ(1+ib)/(ε+ia)^{1+ib}
    pub closed: Complex64,
    /// ε < 10⁻⁶ a: the real-axis integral needs ~a/ε panels.
    pub slow: bool,
}

/// Γ(1+ib)/μ^{1+ib}, principal branch, Re μ ≥ 0.
pub fn plus_power_closed(b: f64, mu: Complex64) -> Result<Complex64> {
    let s = Complex64::new(1.0, b);
    Ok(gamma_complex(s)?.value * (-s * mu.ln()).exp())
}

/// ∫₀^∞ σ^{ib} e^{−(ε+ia)σ} dσ on the real axis.
pub fn regularized_plus_power(b: f64, a: f64, epsilon: f64) -> Result<RegularizedPower> {
    const OP: &str = "scalprod::regularized_plus_power";
    if epsilon <= 0.0 {
        return Err(Error::Domain {
            op: OP,
            detail: format!("ε = {epsilon} must be positive"),
        });
    }
    let mu = Complex64::new(epsilon, a);
    let closed = plus_power_closed(b, mu)?;
    let end = 46.0 / epsilon;
    let panels = (a.abs() * end / 2.0).ceil() as usize + 8;
    if panels > 4_000_000 {
        return Err(Error::NonConvergence { op: OP, terms: panels });
    }
    // [0, δ] in closed form: σ^{ib} e^{−μσ} ≈ σ^{ib} there
    let delta = 1e-12 / mu.norm();
    let head = (Complex64::new(1.0, b) * delta.ln()).exp() / Complex64::new(1.0, b);
    let mut breaks: Vec<f64> = Vec::new();
    let mut x = delta;
    let knee = (1.0 / mu.norm()).min(end);
    while x < knee {
        breaks.push(x);
        x *= 2.0;
    }
    breaks.extend((0..=panels).map(|i| knee + (end - knee) * i as f64 / panels as f64));
    let f = |s: f64| (Complex64::new(-epsilon, -a) * s + I * b * s.ln()).exp();
    let opts = AdaptiveOpts {
        abs_tol: 1e-14,
        rel_tol: 1e-12,
        max_panels: 4 * panels + 1000,
    };
    let body = adaptive_with_breaks(f, &breaks, opts).map_err(|e| match e {
        Error::Quadrature { last, previous, .. } => Error::Quadrature { op: OP, last, previous },
        other => other,
    })?;
    Ok(RegularizedPower {
        value: ComplexAmplitude::new(body.value + head, body.err + delta * delta),
        closed,
        slow: epsilon < 1e-6 * a.abs(),
    })
}

/// Smooth cutoff χ_p: 0 for t ≤ t₀, 1 for t ≥ t₀ + δ, C^∞ in between.
pub fn chi_p(t: f64, threshold: f64, delta: f64) -> f64 {
    let x = (t - threshold) / delta;
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / x).exp();
        let b = (-1.0 / (1.0 - x)).exp();
        a / (a + b)
    }
}

/// ϖ₀ = B₀|α₁|³E^{1+ib/2}e^{−πb/2}/(2⁵π²A₀^{(2l)}Γ(1+ib)). With this sign of
/// πb/2 the in-equation closes under Γ(1+ib)/(i√E)^{1+ib}.
pub fn varpi0(b0: Complex64, alpha_abs: f64, energy: f64, b: f64, a0_2l: f64) -> Result<Complex64> {
    varpi0_signed(b0, alpha_abs, energy, b, a0_2l, -1.0)
}

/// The same constant with e^{+πb/2}.
pub fn varpi0_as_printed(b0: Complex64, alpha_abs: f64, energy: f64, b: f64, a0_2l: f64) -> Result<Complex64> {
    varpi0_signed(b0, alpha_abs, energy, b, a0_2l, 1.0)
}

fn varpi0_signed(b0: Complex64, alpha_abs: f64, energy: f64, b: f64, a0_2l: f64, sign: f64) -> Result<Complex64> {
    if a0_2l == 0.0 {
        return Err(Error::Singular {
            op: "scalprod::varpi0",
            value: 0.0,
        });
    }
    let g = gamma_complex(Complex64::new(1.0, b))?.value;
    let e_pow = pow_i(energy, 0.5 * b) * energy;
    Ok(b0 * alpha_abs.powi(3) * e_pow * (sign * 0.5 * PI * b).exp() / (32.0 * PI * PI * a0_2l * g))
}

/// w_n = n³(B₂ ln n + B₁)/(2p′_n) · 2⁵π/|α₁|³
pub fn w_n(n: usize, b1: f64, b2: f64, p_prime: f64, alpha_abs: f64) -> f64 {
    let nf = n as f64;
    nf.powi(3) * (b2 * nf.ln() + b1) / (2.0 * p_prime) * 32.0 * PI / alpha_abs.powi(3)
}

/// Precomputed pieces of the kernel R̃_n(q, t, φ, k̂′) for fixed q and k̂′.
#[derive(Debug, Clone)]
pub struct KernelAnsatz {
    pub varpi0_in: Complex64,
    pub varpi0_out: Complex64,
    pub z_in: Complex64,
    pub z_out: Complex64,
    /// p/√E, the lower edge of the support in t.
    pub threshold: f64,
    pub b: f64,
    pub b1: f64,
    pub b2: f64,
    pub delta_chi: f64,
    pub mathieu: MathieuEven,
}

impl KernelAnsatz {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        config: &SystemConfig,
        q: &Momenta,
        khat: Vec3,
        b1: f64,
        b2: f64,
        mathieu: MathieuEven,
        delta_chi: f64,
        sc: &ScatteringAmplitude,
    ) -> Result<Self> {
        if delta_chi <= 0.0 {
            return Err(Error::Domain {
                op: "scalprod::kernel_Rn",
                detail: format!("δ_χ = {delta_chi} must be positive"),
            });
        }
        let w = q_weak_asymptotics(config, q, 1, khat, sc)?;
        let pair = ActivePair::from_momenta(q)?;
        let a0 = mathieu.a0();
        Ok(Self {
            varpi0_in: varpi0(w.channel.b0_in, pair.alpha_abs, q.energy, q.b, a0)?,
            varpi0_out: varpi0(w.channel.b0_out, pair.alpha_abs, q.energy, q.b, a0)?,
            z_in: w.z_in,
            z_out: w.z_out,
            threshold: norm(q.p) / q.energy.sqrt(),
            b: q.b,
            b1,
            b2,
            delta_chi,
            mathieu,
        })
    }

    pub fn value(&self, n: usize, t: f64, phi: f64) -> Result<Complex64> {
        const OP: &str = "scalprod::kernel_Rn";
        if t <= self.threshold || t > 1.0 {
            return Err(Error::Domain {
                op: OP,
                detail: format!("t = {t} outside the support ({}, 1]", self.threshold),
            });
        }
        if n == 0 {
            return Err(Error::Domain {
                op: OP,
                detail: "n must be positive".into(),
            });
        }
        let nf = n as f64;
        let denom = nf.powi(3) * (self.b2 * nf.ln() + self.b1);
        if denom == 0.0 {
            return Err(Error::Singular { op: OP, value: denom });
        }
        let shape = pow_i(t - self.threshold, self.b) * chi_p(t, self.threshold, self.delta_chi) * self.mathieu.ce(phi);
        Ok((self.varpi0_in * self.z_in + self.varpi0_out * self.z_out) * shape / denom)
    }
}

/// Pointwise R̃_n; builds the ansatz (two H sphere integrals) on every call.
#[allow(clippy::too_many_arguments)]
pub fn kernel_rn(
    config: &SystemConfig,
    q: &Momenta,
    n: usize,
    t: f64,
    phi: f64,
    khat: Vec3,
    b1: f64,
    b2: f64,
    mathieu: &MathieuEven,
    delta_chi: f64,
) -> Result<Complex64> {
    KernelAnsatz::new(config, q, khat, b1, b2, mathieu.clone(), delta_chi, &ScatteringAmplitude::Coulomb)?.value(n, t, phi)
}
