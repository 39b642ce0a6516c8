//! Accumulation-point contribution of the highly excited pair states: the
//! term function Θ(n), its direct tail sum, the Poisson split into the pieces
//! I–IV, and the closed forms built on Υ̂(R).
//!
//! With s = R²/(4u²) the oscillating factor of Θ collapses to
//! (−1)ⁿcos(2n[arccos√s − √(s(1−s))]) = cos(R·H(s)), H(s) = arcsin(√s)/√s + √(1−s),
//! so the summand is smooth in n. The direct sums use that form and close the
//! tail with an Euler–Maclaurin midpoint integral.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quad::{adaptive_with_breaks, segment, AdaptiveOpts};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Shape of the patch χ_d^δ that switches the sum off between s = d − δ and s = d.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Patch {
    /// Quintic smoothstep, C².
    C2,
    /// exp(−1/z) blend, C^∞.
    Smooth,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResumParams {
    pub m: usize,
    pub x: f64,
    pub alpha1: f64,
    /// R = √(|α₁|x)
    pub r: f64,
    /// d = R²/(4M²)
    pub d: f64,
    pub b1: f64,
    pub b2: f64,
    pub c_of_r: Complex64,
    /// D = B₂/2
    pub d_coef: f64,
    /// Patch width, d/10 by default.
    pub delta: f64,
    pub patch: Patch,
}

/// C(R) = B₁ + (3/2)B₂ ln R − B₂ ln 2 + iB₂π/4
pub fn c_of_r(r: f64, b1: f64, b2: f64) -> Complex64 {
    Complex64::new(b1 + 1.5 * b2 * r.ln() - b2 * 2f64.ln(), b2 * PI / 4.0)
}

impl ResumParams {
    pub fn new(m: usize, x: f64, alpha1: f64, b1: f64, b2: f64) -> Result<Self> {
        const OP: &str = "accsum::ResumParams";
        if m < 2 {
            return Err(Error::Domain {
                op: OP,
                detail: format!("M = {m} must be ≥ 2"),
            });
        }
        if !(x > 0.0) || alpha1 == 0.0 || !alpha1.is_finite() {
            return Err(Error::Domain {
                op: OP,
                detail: format!("need x > 0 and α₁ ≠ 0, got x = {x}, α₁ = {alpha1}"),
            });
        }
        let r = (alpha1.abs() * x).sqrt();
        let d = r * r / (4.0 * (m * m) as f64);
        if !(d > 0.0 && d < 1.0) {
            return Err(Error::Domain {
                op: OP,
                detail: format!("d = R²/4M² = {d} outside (0, 1); need x < 4M²/|α₁|"),
            });
        }
        // B₂ ln u + B₁ must not vanish for u ≥ M − 1
        if b2 != 0.0 {
            let u0 = (-b1 / b2).exp();
            if u0 >= m as f64 - 1.0 {
                return Err(Error::Singular {
                    op: OP,
                    value: b2 * ((m - 1) as f64).ln() + b1,
                });
            }
        } else if b1 == 0.0 {
            return Err(Error::Singular { op: OP, value: 0.0 });
        }
        Ok(Self {
            m,
            x,
            alpha1,
            r,
            d,
            b1,
            b2,
            c_of_r: c_of_r(r, b1, b2),
            d_coef: 0.5 * b2,
            delta: 0.1 * d,
            patch: Patch::C2,
        })
    }

    /// Parameters for a given R with M = ⌈R/(2√d_target)⌉, so that d ≤ d_target.
    pub fn from_radius(r: f64, d_target: f64, alpha1: f64, b1: f64, b2: f64) -> Result<Self> {
        if !(d_target > 0.0 && d_target < 1.0) || !(r > 0.0) {
            return Err(Error::Domain {
                op: "accsum::ResumParams",
                detail: format!("need R > 0 and 0 < d < 1, got R = {r}, d = {d_target}"),
            });
        }
        let m = ((r / (2.0 * d_target.sqrt())).ceil() as usize).max(2);
        Self::new(m, r * r / alpha1.abs(), alpha1, b1, b2)
    }

    pub fn with_delta(mut self, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < self.d) {
            return Err(Error::Domain {
                op: "accsum::ResumParams",
                detail: format!("patch width δ = {delta} outside (0, d = {})", self.d),
            });
        }
        self.delta = delta;
        Ok(self)
    }

    pub fn with_patch(mut self, patch: Patch) -> Self {
        self.patch = patch;
        self
    }

    /// t_n = x/n²
    pub fn t_n(&self, n: f64) -> f64 {
        self.x / (n * n)
    }

    /// s = |α₁|t_u/4 = R²/(4u²)
    pub fn s_of(&self, u: f64) -> f64 {
        self.r * self.r / (4.0 * u * u)
    }

    /// B₁ + B₂ ln(R/(2√s)), the denominator as a function of s.
    pub fn denominator(&self, s: f64) -> f64 {
        self.b1 + self.b2 * (self.r / (2.0 * s.sqrt())).ln()
    }

    /// χ_d^δ(s): 1 below d − δ, 0 above d.
    pub fn patch_weight(&self, s: f64) -> f64 {
        let lo = self.d - self.delta;
        if s <= lo {
            return 1.0;
        }
        if s >= self.d {
            return 0.0;
        }
        let z = (self.d - s) / self.delta;
        match self.patch {
            Patch::C2 => z * z * z * (10.0 - 15.0 * z + 6.0 * z * z),
            Patch::Smooth => {
                let f = |y: f64| if y > 0.0 { (-1.0 / y).exp() } else { 0.0 };
                f(z) / (f(z) + f(1.0 - z))
            }
        }
    }
}

/// Θ(n) exactly as written: (−1)ⁿ/(n⁴(B₂ ln n + B₁))·U·(8πn|α₁|t_n)^{−1/2}(a)^{−1/4}(1−a)^{−1/4}
/// cos(2n[arccos√a − √a√(1−a)]), a = |α₁|t_n/4.
pub fn theta_term(p: &ResumParams, n: usize, u_value: Complex64) -> Result<Complex64> {
    let nf = n as f64;
    let tn = p.t_n(nf);
    let a = p.alpha1.abs() * tn / 4.0;
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Regime {
            op: "accsum::theta_term",
            detail: format!("|α₁|t_n/4 = {a} at n = {n}"),
        });
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let den = nf.powi(4) * (p.b2 * nf.ln() + p.b1);
    let amp = (8.0 * PI * nf * p.alpha1.abs() * tn).powf(-0.5) * a.powf(-0.25) * (1.0 - a).powf(-0.25);
    let phase = 2.0 * nf * (a.sqrt().acos() - a.sqrt() * (1.0 - a).sqrt());
    Ok(u_value * (sign * amp * phase.cos() / den))
}

/// H(s) = arcsin(√s)/√s + √(1 − s); H(0) = 2.
pub fn phase_h(s: f64) -> f64 {
    let q = s.sqrt();
    let head = if q < 1e-8 { 1.0 + s / 6.0 } else { q.asin() / q };
    head + (1.0 - s).sqrt()
}

/// Θ at continuous u > R/2 in the smooth form amp(u)·cos(R·H(s)), without U.
pub fn theta_smooth(p: &ResumParams, u: f64) -> Result<f64> {
    let s = p.s_of(u);
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Regime {
            op: "accsum::theta_smooth",
            detail: format!("s = {s} at u = {u}"),
        });
    }
    let amp = (u / (8.0 * PI)).sqrt() / p.r * s.powf(-0.25) * (1.0 - s).powf(-0.25) / (u.powi(4) * (p.b2 * u.ln() + p.b1));
    Ok(amp * (p.r * phase_h(s)).cos())
}

/// Neumaier-compensated sum.
pub fn compensated_sum<T: IntoIterator<Item = f64>>(terms: T) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailSum {
    /// partial + tail
    pub value: Complex64,
    /// Σ_{n=M}^{N_max} of the (weighted) terms.
    pub partial: Complex64,
    /// ∫_{N_max+½}^∞ Θ(u) du
    pub tail: Complex64,
    /// Bound on what the midpoint tail misses, |Θ′(N_max+½)|/24 plus the quadrature error.
    pub tail_bound: f64,
    pub terms: usize,
}

const TAIL_TOL: f64 = 1e-10;

fn quad_opts() -> AdaptiveOpts {
    AdaptiveOpts {
        abs_tol: 1e-300,
        rel_tol: 1e-12,
        max_panels: 20_000,
    }
}

/// Σ_{n=M}^∞ Θ(n), with terms beyond N_max replaced by the midpoint integral.
pub fn direct_tail_sum(p: &ResumParams, n_max: usize, u_value: Complex64) -> Result<TailSum> {
    direct_sum(p, n_max, u_value, false)
}

/// Σ_{n=M}^∞ χ_d^δ(s_n)Θ(n), the series the Poisson split and the closed forms describe.
pub fn direct_patched_sum(p: &ResumParams, n_max: usize, u_value: Complex64) -> Result<TailSum> {
    direct_sum(p, n_max, u_value, true)
}

fn direct_sum(p: &ResumParams, n_max: usize, u_value: Complex64, patched: bool) -> Result<TailSum> {
    const OP: &str = "accsum::direct_tail_sum";
    if n_max <= p.m {
        return Err(Error::Domain {
            op: OP,
            detail: format!("N_max = {n_max} must exceed M = {}", p.m),
        });
    }
    let s_end = p.s_of(n_max as f64 + 0.5);
    if patched && s_end > p.d - p.delta {
        return Err(Error::Domain {
            op: OP,
            detail: "N_max inside the patch region".into(),
        });
    }
    let mut terms = Vec::with_capacity(n_max - p.m + 1);
    for n in p.m..=n_max {
        let w = if patched { p.patch_weight(p.s_of(n as f64)) } else { 1.0 };
        terms.push(if w == 0.0 { 0.0 } else { w * theta_smooth(p, n as f64)? });
    }
    // smallest terms first
    let partial = compensated_sum(terms.iter().rev().copied());
    let scale = compensated_sum(terms.iter().rev().map(|t| t.abs()));
    // ∫_{N+½}^∞ Θ du in s: (R^{−7/2}/√π) ∫₀^{s*} cos(RH(s))/(den(s)(1−s)^{1/4}) ds
    let pref = p.r.powf(-3.5) / PI.sqrt();
    let f = |s: f64| {
        if s == 0.0 {
            return c(0.0);
        }
        c((p.r * phase_h(s)).cos() / (p.denominator(s) * (1.0 - s).powf(0.25)))
    };
    let breaks: Vec<f64> = std::iter::once(0.0).chain((0..=12).rev().map(|k| s_end * 0.1f64.powi(k))).collect();
    let tail_q = adaptive_with_breaks(f, &breaks, quad_opts())?;
    let tail = pref * tail_q.value.re;
    let h = 0.5;
    let um = n_max as f64 + 0.5;
    let deriv = (theta_smooth(p, um + h)? - theta_smooth(p, um - h)?) / (2.0 * h);
    let tail_bound = (deriv.abs() / 24.0 + pref * tail_q.err) * u_value.norm();
    let value = u_value * (partial + tail);
    // against Σ|Θ| rather than the sum, which passes through zero as R varies
    if tail_bound > TAIL_TOL * scale * u_value.norm() {
        return Err(Error::NonConvergence {
            op: OP,
            terms: n_max - p.m + 1,
        });
    }
    Ok(TailSum {
        value,
        partial: u_value * partial,
        tail: u_value * tail,
        tail_bound,
        terms: n_max - p.m + 1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// Φ_l^±′(s) = −(1/(2s^{3/2})){π/2 + lπ ± (arccos√s + √(s(1−s)))}
pub fn phase_derivative(l: i64, branch: Branch, s: f64) -> f64 {
    // π/2 − (arccos√s + √(s(1−s))) = arcsin√s − √(s(1−s)) ≈ (2/3)s^{3/2}; keep it from cancelling
    let small = s.sqrt().asin() - (s * (1.0 - s)).sqrt();
    let g = s.sqrt().acos() + (s * (1.0 - s)).sqrt();
    let brace = match (branch, l) {
        (Branch::Minus, 0) => small,
        (Branch::Plus, -1) => -small,
        (Branch::Plus, _) => PI / 2.0 + l as f64 * PI + g,
        (Branch::Minus, _) => PI / 2.0 + l as f64 * PI - g,
    };
    -brace / (2.0 * s.powf(1.5))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryScan {
    /// No sign change and no zero of Φ_l^±′ on the grid.
    pub no_stationary: bool,
    pub min_abs: f64,
    pub worst_l: i64,
    pub worst_branch: Branch,
    pub worst_s: f64,
}

/// Scans Φ_l^±′ on a uniform grid of (0, d] for |l| ≤ l_range.
pub fn phase_no_stationary_check(d: f64, l_range: i64) -> Result<StationaryScan> {
    if !(d > 0.0 && d < 1.0) {
        return Err(Error::Domain {
            op: "accsum::phase_no_stationary_check",
            detail: format!("d = {d} outside (0, 1)"),
        });
    }
    const GRID: usize = 4000;
    let mut scan = StationaryScan {
        no_stationary: true,
        min_abs: f64::INFINITY,
        worst_l: 0,
        worst_branch: Branch::Plus,
        worst_s: 0.0,
    };
    for l in -l_range..=l_range {
        for branch in [Branch::Plus, Branch::Minus] {
            let mut prev_sign = 0.0;
            for j in 1..=GRID {
                let s = d * j as f64 / GRID as f64;
                let v = phase_derivative(l, branch, s);
                if v.abs() < scan.min_abs {
                    scan.min_abs = v.abs();
                    scan.worst_l = l;
                    scan.worst_branch = branch;
                    scan.worst_s = s;
                }
                let sign = v.signum();
                if v == 0.0 || (prev_sign != 0.0 && sign != prev_sign) {
                    scan.no_stationary = false;
                }
                prev_sign = sign;
            }
        }
    }
    Ok(scan)
}

/// ∫₀^∞ e^{−t/3}/(C − D ln t) dt, split at t = 1 with t = e^{−v} below.
pub fn upsilon_integral(cr: Complex64, d_coef: f64) -> Result<Complex64> {
    const OP: &str = "accsum::upsilon_hat";
    if (d_coef == 0.0 && cr.norm() == 0.0) || (d_coef != 0.0 && cr.im == 0.0) {
        return Err(Error::Singular { op: OP, value: cr.im });
    }
    let lower = |v: f64| (-v - (-v).exp() / 3.0).exp() / (cr + d_coef * v);
    let upper = |w: f64| c((-(1.0 + w) / 3.0).exp()) / (cr - d_coef * (1.0 + w).ln());
    let brk_lo = [0.0, 1.0, 3.0, 8.0, 20.0, 45.0];
    let brk_hi = [0.0, 1.0, 3.0, 10.0, 30.0, 70.0, 140.0];
    let opts = AdaptiveOpts {
        abs_tol: 1e-16 / cr.norm().max(1e-300),
        rel_tol: 1e-13,
        max_panels: 4000,
    };
    let a = adaptive_with_breaks(lower, &brk_lo, opts)?;
    let b = adaptive_with_breaks(upper, &brk_hi, opts)?;
    Ok(a.value + b.value)
}

/// Υ̂(R) = −ie^{2iR}∫₀^∞ e^{−t/3}/(C(R) − D ln t) dt
pub fn upsilon_hat(p: &ResumParams) -> Result<Complex64> {
    Ok(-I * (2.0 * I * p.r).exp() * upsilon_integral(p.c_of_r, p.d_coef)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForm {
    /// (3/(2√π))U sin(2R)/(C(R)R^{5/2})
    pub leading: Complex64,
    /// U(Υ̂ + Υ̂*)/(4√πR^{5/2})
    pub upsilon_form: Complex64,
    pub upsilon: Complex64,
    /// 3|U|/(2√π|C|R^{5/2}), the scale both forms oscillate within.
    pub envelope: f64,
    /// |leading − upsilon_form|/envelope
    pub rel_diff: f64,
}

/// Both closed forms of the accumulation-point term, as printed.
pub fn closed_form_psi_acc(p: &ResumParams, u_value: Complex64) -> Result<ClosedForm> {
    if !(p.x > 1.0) {
        return Err(Error::Domain {
            op: "accsum::closed_form_psi_acc",
            detail: format!("x = {} must be ≫ 1", p.x),
        });
    }
    let r52 = p.r.powf(2.5);
    let leading = u_value * (3.0 / (2.0 * PI.sqrt())) * (2.0 * p.r).sin() / (p.c_of_r * r52);
    let ups = upsilon_hat(p)?;
    let upsilon_form = u_value * (ups + ups.conj()) / (4.0 * PI.sqrt() * r52);
    let envelope = 3.0 * u_value.norm() / (2.0 * PI.sqrt() * p.c_of_r.norm() * r52);
    let rel_diff = if envelope == 0.0 { 0.0 } else { (leading - upsilon_form).norm() / envelope };
    Ok(ClosedForm {
        leading,
        upsilon_form,
        upsilon: ups,
        envelope,
        rel_diff,
    })
}

/// Prefactor of the Poisson integrals obtained from Θ by u = R/(2√s): R^{−7/2}/√π.
pub fn poisson_prefactor(r: f64) -> f64 {
    r.powf(-3.5) / PI.sqrt()
}

/// The prefactor as printed in the resummed form, 1/(2√πR^{3/2}); larger by R²/2.
pub fn poisson_prefactor_as_printed(r: f64) -> f64 {
    1.0 / (2.0 * PI.sqrt() * r.powf(1.5))
}

/// J(k) = ½∫₀^d χ(s) e^{iR(H(s) + πk/√s)}/(den(s)(1−s)^{1/4}) ds.
///
/// The σ = −1 integrals are conj J(−k). For k ≠ 0 the integral runs in w = 1/√s:
/// on the real axis through the patch, then up (k > 0) or down (k < 0) the
/// vertical line Re w = 1/√(d−δ), where e^{iπkRw} decays.
pub fn poisson_integral(p: &ResumParams, k: i64) -> Result<Complex64> {
    let r = p.r;
    let amp_s = |s: f64| p.patch_weight(s) / (p.denominator(s) * (1.0 - s).powf(0.25));
    if k == 0 {
        let f = |s: f64| {
            if s == 0.0 {
                return c(0.0);
            }
            let w = amp_s(s);
            if w == 0.0 {
                return c(0.0);
            }
            Complex64::from_polar(0.5 * w, r * phase_h(s))
        };
        let lo = p.d - p.delta;
        let n_osc = ((r * (2.0 - phase_h(p.d)) / (2.0 * PI)).ceil() as usize).clamp(1, 4000);
        let mut breaks: Vec<f64> = (0..=12).rev().map(|j| lo * 0.1f64.powi(j + 1)).collect();
        breaks.insert(0, 0.0);
        breaks.extend((1..=4 * n_osc).map(|j| lo * j as f64 / (4 * n_osc) as f64));
        breaks.push(p.d);
        let q = adaptive_with_breaks(f, &breaks, quad_opts())?;
        return Ok(q.value);
    }
    let kf = k as f64;
    let w_d = 1.0 / p.d.sqrt();
    let w_1 = 1.0 / (p.d - p.delta).sqrt();
    // real segment through the patch
    let f_real = |w: f64| {
        let s = 1.0 / (w * w);
        let a = amp_s(s);
        if a == 0.0 {
            return c(0.0);
        }
        Complex64::from_polar(a / (w * w * w), r * (phase_h(s) + PI * kf * w))
    };
    let n_osc = ((r * kf.abs() * (w_1 - w_d) / 2.0).ceil() as usize).clamp(1, 100_000);
    let breaks: Vec<f64> = (0..=2 * n_osc).map(|j| w_d + (w_1 - w_d) * j as f64 / (2 * n_osc) as f64).collect();
    let real = adaptive_with_breaks(f_real, &breaks, quad_opts())?.value;
    // vertical ray, χ = 1
    let b1 = p.b1;
    let b2 = p.b2;
    let f_ray = |w: Complex64| {
        let inv = w.inv();
        let h = w * inv.asin() + (c(1.0) - inv * inv).sqrt();
        let den = b1 + b2 * (w * (r / 2.0)).ln();
        let damp = (-0.25 * (c(1.0) - inv * inv).ln()).exp();
        (I * r * (h + PI * kf * w)).exp() * damp / (den * w * w * w)
    };
    let sign = kf.signum();
    let decay = r * PI * kf.abs();
    let z0 = c(w_1);
    let mut ray = c(0.0);
    let mut lo = 0.0;
    for hi in [1.0, 4.0, 12.0, 40.0] {
        let h = hi / decay;
        ray += segment(f_ray, z0 + I * (sign * lo), z0 + I * (sign * h), quad_opts())?.value;
        lo = h;
    }
    Ok(real + ray)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoissonPieces {
    /// Pieces I–IV with U and the prefactor R^{−7/2}/√π applied.
    pub i: Complex64,
    pub ii: Complex64,
    pub iii: Complex64,
    pub iv: Complex64,
    /// l = 0 term of I and l = −1 term of II.
    pub i_leading: Complex64,
    pub ii_leading: Complex64,
    pub total: Complex64,
    /// J(k) for k = −k_max..=k_max, without prefactor or U.
    pub j: Vec<(i64, Complex64)>,
    pub k_max: i64,
    /// |J(k_max)| + |J(−k_max)| relative to |J(0)|.
    pub truncation: f64,
}

/// Poisson split of the patched tail sum. The k-sum stops once three successive
/// |J(k)| + |J(−k)| fall below `rel_tol`·|J(0)|, or at `k_cap`.
pub fn poisson_pieces(p: &ResumParams, u_value: Complex64, rel_tol: f64, k_cap: i64) -> Result<PoissonPieces> {
    let j0 = poisson_integral(p, 0)?;
    let mut j = vec![(0, j0)];
    let mut small = 0;
    let mut k = 0;
    let mut last = f64::INFINITY;
    while k < k_cap && small < 3 {
        k += 1;
        let jp = poisson_integral(p, k)?;
        let jm = poisson_integral(p, -k)?;
        j.push((k, jp));
        j.push((-k, jm));
        last = (jp.norm() + jm.norm()) / j0.norm();
        if last < rel_tol {
            small += 1;
        } else {
            small = 0;
        }
    }
    j.sort_by_key(|e| e.0);
    let pref = u_value * poisson_prefactor(p.r);
    let sum_re = |f: &dyn Fn(i64) -> bool| -> Complex64 {
        let re = compensated_sum(j.iter().filter(|e| f(e.0)).map(|e| e.1.re));
        let im = compensated_sum(j.iter().filter(|e| f(e.0)).map(|e| e.1.im));
        Complex64::new(re, im)
    };
    let i_raw = sum_re(&|k| k >= 0);
    let iii_raw = sum_re(&|k| k <= -1);
    let i = pref * i_raw;
    let ii = pref * i_raw.conj();
    let iii = pref * iii_raw;
    let iv = pref * iii_raw.conj();
    Ok(PoissonPieces {
        i,
        ii,
        iii,
        iv,
        i_leading: pref * j0,
        ii_leading: pref * j0.conj(),
        total: i + ii + iii + iv,
        j,
        k_max: k,
        truncation: last,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossCheck {
    pub r: f64,
    pub m: usize,
    pub d: f64,
    /// Patched direct sum.
    pub direct: Complex64,
    pub closed: ClosedForm,
    /// |direct − leading closed form|/envelope
    pub rel_dev: f64,
    /// |direct − Υ̂ form|/envelope
    pub rel_dev_upsilon: f64,
    /// |direct − (2/R²)·Υ̂ form|/((2/R²)·envelope): the comparison with the prefactor
    /// that follows from Θ.
    pub rel_dev_rescaled: f64,
}

/// Patched direct sum against the closed forms. Deviations are measured against
/// the closed-form envelope 3|U|/(2√π|C|R^{5/2}) so that zeros of sin 2R do not blow them up.
pub fn poisson_crosscheck(p: &ResumParams, n_max: usize, u_value: Complex64) -> Result<CrossCheck> {
    let direct = direct_patched_sum(p, n_max, u_value)?.value;
    let closed = closed_form_psi_acc(p, u_value)?;
    let env = closed.envelope;
    let rescale = 2.0 / (p.r * p.r);
    let ratio = |a: Complex64, b: Complex64, e: f64| if e == 0.0 { 0.0 } else { (a - b).norm() / e };
    Ok(CrossCheck {
        r: p.r,
        m: p.m,
        d: p.d,
        direct,
        closed,
        rel_dev: ratio(direct, closed.leading, env),
        rel_dev_upsilon: ratio(direct, closed.upsilon_form, env),
        rel_dev_rescaled: ratio(direct, closed.upsilon_form * rescale, env * rescale),
    })
}

/// N_max used by the sweeps: 64M.
pub fn default_n_max(p: &ResumParams) -> usize {
    64 * p.m
}

/// Cross-checks over an R-sweep at fixed target d; results in the order of `rs`.
pub fn crosscheck_sweep(rs: &[f64], d_target: f64, alpha1: f64, b1: f64, b2: f64, u_value: Complex64) -> Result<Vec<CrossCheck>> {
    rs.par_iter()
        .map(|&r| {
            let p = ResumParams::from_radius(r, d_target, alpha1, b1, b2)?;
            poisson_crosscheck(&p, default_n_max(&p), u_value)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroAlignment {
    pub crossings: Vec<f64>,
    /// Zeros mπ/2 of sin 2R in the window.
    pub zeros: Vec<f64>,
    /// Largest |crossing − zero| over the pairing in order; ∞ when the counts differ.
    pub max_offset: f64,
}

/// Sign changes of the patched direct sum (U = 1, M fixed by the upper end of
/// the window) on a grid of R, paired in order with the zeros of sin 2R.
pub fn zero_crossing_alignment(r_lo: f64, r_hi: f64, steps: usize, d_target: f64, alpha1: f64, b1: f64, b2: f64) -> Result<ZeroAlignment> {
    let top = ResumParams::from_radius(r_hi, d_target, alpha1, b1, b2)?;
    let m = top.m;
    let n_max = default_n_max(&top);
    let grid: Vec<f64> = (0..=steps).map(|j| r_lo + (r_hi - r_lo) * j as f64 / steps as f64).collect();
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&r| {
            let p = ResumParams::new(m, r * r / alpha1.abs(), alpha1, b1, b2)?;
            Ok(direct_patched_sum(&p, n_max, c(1.0))?.value.re)
        })
        .collect::<Result<_>>()?;
    let mut crossings = Vec::new();
    for w in 0..steps {
        let (a, b) = (values[w], values[w + 1]);
        if a == 0.0 || a.signum() != b.signum() {
            let t = if a == b { 0.0 } else { a / (a - b) };
            crossings.push(grid[w] + t * (grid[w + 1] - grid[w]));
        }
    }
    let first = (2.0 * r_lo / PI).ceil() as i64;
    let last = (2.0 * r_hi / PI).floor() as i64;
    let zeros: Vec<f64> = (first..=last).map(|m| m as f64 * PI / 2.0).collect();
    let max_offset = if crossings.len() == zeros.len() {
        crossings.iter().zip(&zeros).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    Ok(ZeroAlignment {
        crossings,
        zeros,
        max_offset,
    })
}
