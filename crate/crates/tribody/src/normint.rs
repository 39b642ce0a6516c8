//! Overlap Σ_n(k̂′, k̂″) of two bound-state generating functions of equal
//! principal number: direct quadrature of the reduced radial-angular form and
//! the stationary-phase reduction of its angular integral.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplitude::ComplexAmplitude;
use crate::error::{Error, Result};
use crate::kinematics::{dot, Vec3};
use crate::quad::{adaptive, AdaptiveOpts, LaguerreRule, SphereGrid};
use crate::specfun::laguerre_log;

/// Radial and angular resolution for [`sigma_direct_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectOpts {
    /// First Gauss–Laguerre order; doubled until two successive orders agree.
    pub start_order: usize,
    pub max_order: usize,
    pub rel_tol: f64,
}

impl Default for DirectOpts {
    fn default() -> Self {
        Self {
            start_order: 200,
            max_order: 1600,
            rel_tol: 1e-9,
        }
    }
}

/// Σ_n(k̂′, k̂″) = n³/|α|³ ∫dx̂ ∫dt t² e^{−t} L_{n−1}(t sin²(θ̃/2)) L_{n−1}(t sin²(θ/2)),
/// cos θ = ⟨x̂, k̂′⟩, cos θ̃ = ⟨x̂, k̂″⟩.
pub fn sigma_direct(n: usize, alpha: f64, khat1: Vec3, khat2: Vec3) -> Result<ComplexAmplitude> {
    sigma_direct_with(n, alpha, khat1, khat2, DirectOpts::default())
}

pub fn sigma_direct_with(n: usize, alpha: f64, khat1: Vec3, khat2: Vec3, opts: DirectOpts) -> Result<ComplexAmplitude> {
    const OP: &str = "normint::sigma_direct";
    if n == 0 {
        return Err(Error::Domain {
            op: OP,
            detail: "n must be at least 1".into(),
        });
    }
    if alpha == 0.0 || !alpha.is_finite() {
        return Err(Error::Domain {
            op: OP,
            detail: format!("coupling must be finite and non-zero, got {alpha}"),
        });
    }
    // After the t integration the angular integrand is a polynomial of degree
    // 2n − 2 in the components of x̂, so this grid integrates it exactly.
    let n_theta = n + 8;
    let grid = SphereGrid::product_about(n_theta, 2 * n_theta, khat2);
    let rows: Vec<(f64, Vec<Vec3>, f64)> = grid
        .points
        .chunks(2 * n_theta)
        .zip(grid.weights.chunks(2 * n_theta))
        .map(|(pts, w)| {
            let b = 0.5 * (1.0 - dot(pts[0], khat2)).max(0.0);
            (b, pts.to_vec(), w[0])
        })
        .collect();

    let mut order = opts.start_order.max(n + 1);
    let mut previous = radial_angular(n, &rows, khat1, &LaguerreRule::new(order));
    loop {
        let next_order = 2 * order;
        if next_order > opts.max_order.max(2 * opts.start_order) {
            return Err(Error::Quadrature {
                op: OP,
                last: previous,
                previous: f64::NAN,
            });
        }
        let value = radial_angular(n, &rows, khat1, &LaguerreRule::new(next_order));
        let diff = (value - previous).abs();
        if diff <= opts.rel_tol * value.abs().max(f64::MIN_POSITIVE) {
            let scale = (n as f64 / alpha.abs()).powi(3);
            let err = (diff + 1e-14 * value.abs()) * scale;
            return Ok(ComplexAmplitude::new(Complex64::new(value * scale, 0.0), err));
        }
        previous = value;
        order = next_order;
    }
}

fn radial_angular(n: usize, rows: &[(f64, Vec<Vec3>, f64)], khat1: Vec3, rule: &LaguerreRule) -> f64 {
    let m = n - 1;
    let radial: Vec<(f64, f64)> = rule
        .nodes
        .iter()
        .zip(&rule.log_weights)
        .map(|(&t, &lw)| (t, lw + 2.0 * t.ln()))
        .collect();
    let row_sums: Vec<f64> = rows
        .par_iter()
        .map(|(b, pts, w)| {
            let lb: Vec<(f64, f64)> = radial.iter().map(|&(t, _)| laguerre_log(m, b * t)).collect();
            let mut acc = 0.0;
            for &x in pts {
                let a = 0.5 * (1.0 - dot(x, khat1)).max(0.0);
                // |L_m(x)| ≤ e^{x/2} on x ≥ 0 bounds every term; nodes more than
                // e^{-46} below the largest bound cannot move the sum.
                let bound = |&(t, lw): &(f64, f64)| lw + 0.5 * (a + b) * t;
                let top = radial.iter().map(bound).fold(f64::NEG_INFINITY, f64::max);
                let mut s = 0.0;
                for (i, node) in radial.iter().enumerate() {
                    if bound(node) < top - 46.0 {
                        continue;
                    }
                    let &(t, lw) = node;
                    let (sa, la) = laguerre_log(m, a * t);
                    let (sb, lbv) = lb[i];
                    s += sa * sb * (lw + la + lbv).exp();
                }
                acc += s;
            }
            acc * w
        })
        .collect();
    row_sums.iter().sum()
}

/// A point of the angular phase function. θ, φ locate x̂ with k̂″ on the polar
/// axis; k̂′ sits at (θ_{k′}, φ_{k′}); `s` is t/υ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub theta: f64,
    pub phi: f64,
    pub theta_kprime: f64,
    pub phi_kprime: f64,
    pub s: f64,
}

impl PhasePoint {
    /// The stationary point θ_0 = π − θ_{k′}/2, φ_0 = φ_{k′} + π.
    pub fn stationary(theta_kprime: f64, phi_kprime: f64, s: f64) -> Self {
        Self {
            theta: PI - 0.5 * theta_kprime,
            phi: phi_kprime + PI,
            theta_kprime,
            phi_kprime,
            s,
        }
    }

    /// θ̃ from cos θ̃ = sin θ sin θ_{k′} cos(φ − φ_{k′}) + cos θ cos θ_{k′}.
    pub fn theta_tilde(&self) -> f64 {
        let c = self.theta.sin() * self.theta_kprime.sin() * (self.phi - self.phi_kprime).cos()
            + self.theta.cos() * self.theta_kprime.cos();
        c.clamp(-1.0, 1.0).acos()
    }

    fn with_angles(&self, theta: f64, phi: f64) -> Self {
        Self { theta, phi, ..*self }
    }
}

fn half_phase(s: f64, angle: f64) -> f64 {
    let w = s.sqrt() * (0.5 * angle).sin();
    2.0 * w.clamp(-1.0, 1.0).acos() - 2.0 * w * (1.0 - w * w).max(0.0).sqrt()
}

/// S(θ, φ) = A(θ) + A(θ̃), A(x) = 2 arccos(√s sin(x/2)) − 2√s sin(x/2) √(1 − s sin²(x/2)).
pub fn phase_function(point: PhasePoint) -> Result<f64> {
    if !(point.s > 0.0 && point.s < 1.0) {
        return Err(Error::Domain {
            op: "normint::phase_function",
            detail: format!("s must lie in (0, 1), got {}", point.s),
        });
    }
    Ok(half_phase(point.s, point.theta) + half_phase(point.s, point.theta_tilde()))
}

/// S at the stationary point: 4 arccos(√s c) − 4√s c √(1 − s c²), c = cos(θ_{k′}/4).
pub fn stationary_phase_value(theta_kprime: f64, s: f64) -> f64 {
    let w = s.sqrt() * (0.25 * theta_kprime).cos();
    4.0 * w.acos() - 4.0 * w * (1.0 - w * w).max(0.0).sqrt()
}

/// Central-difference gradient (∂_θ S, ∂_φ S).
pub fn phase_gradient(point: PhasePoint, h: f64) -> Result<[f64; 2]> {
    let f = |t: f64, p: f64| phase_function(point.with_angles(t, p));
    let gt = (f(point.theta + h, point.phi)? - f(point.theta - h, point.phi)?) / (2.0 * h);
    let gp = (f(point.theta, point.phi + h)? - f(point.theta, point.phi - h)?) / (2.0 * h);
    Ok([gt, gp])
}

/// The two roots of the θ-equation paired with the two φ-branches. Only the
/// second lies in 0 ≤ θ ≤ π for θ_{k′} > 0.
pub fn stationary_candidates(theta_kprime: f64) -> [(f64, f64); 2] {
    [(PI + 0.5 * theta_kprime, 0.0), (PI - 0.5 * theta_kprime, PI)]
}

pub fn in_polar_range(theta: f64) -> bool {
    (0.0..=PI).contains(&theta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HessianCheck {
    /// Rows/columns ordered (θ, φ).
    pub analytic: [[f64; 2]; 2],
    pub numeric: [[f64; 2]; 2],
    pub analytic_det: f64,
    pub gradient: [f64; 2],
    /// ν₊ − ν₋ of the numeric matrix.
    pub signature: i32,
    /// det below 1e-12, the θ_{k′} → 0 limit.
    pub degenerate: bool,
}

impl HessianCheck {
    pub fn max_rel_deviation(&self) -> f64 {
        let scale = self.analytic.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let a = self.analytic[i][j];
                let d = (a - self.numeric[i][j]).abs();
                // the mixed entry vanishes analytically; compare it against the matrix scale
                let r = if a == 0.0 { d / scale } else { d / a.abs() };
                worst = worst.max(r);
            }
        }
        worst
    }
}

/// Analytic second derivatives of S at (θ_0, φ_0) against a finite-difference Hessian.
pub fn hessian_check(theta_kprime: f64, s: f64) -> Result<HessianCheck> {
    if !(theta_kprime > 0.0 && theta_kprime < PI) {
        return Err(Error::Domain {
            op: "normint::hessian_check",
            detail: format!("θ_k′ must lie in (0, π), got {theta_kprime}"),
        });
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Domain {
            op: "normint::hessian_check",
            detail: format!("s must lie in (0, 1), got {s}"),
        });
    }
    let c4 = (0.25 * theta_kprime).cos();
    let root = (1.0 - s * c4 * c4).sqrt();
    let s_pp = s.sqrt() * theta_kprime.sin() * (0.5 * theta_kprime).sin() * root / c4;
    let s_tt = 2.0 * s.sqrt() * c4 / root * (1.0 - s * (0.5 * theta_kprime).cos());
    let analytic = [[s_tt, 0.0], [0.0, s_pp]];
    let analytic_det = 2.0 * s * theta_kprime.sin() * (0.5 * theta_kprime).sin() * (1.0 - s * (0.5 * theta_kprime).cos());

    let p0 = PhasePoint::stationary(theta_kprime, 0.3, s);
    let f = |dt: f64, dp: f64| phase_function(p0.with_angles(p0.theta + dt, p0.phi + dp));
    let h = 1e-3;
    let c = f(0.0, 0.0)?;
    let tt = (f(h, 0.0)? - 2.0 * c + f(-h, 0.0)?) / (h * h);
    let pp = (f(0.0, h)? - 2.0 * c + f(0.0, -h)?) / (h * h);
    let tp = (f(h, h)? - f(h, -h)? - f(-h, h)? + f(-h, -h)?) / (4.0 * h * h);
    let numeric = [[tt, tp], [tp, pp]];
    let gradient = phase_gradient(p0, 1e-5)?;

    let tr = tt + pp;
    let det = tt * pp - tp * tp;
    let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
    let signature = [0.5 * tr + disc, 0.5 * tr - disc]
        .iter()
        .map(|&e| if e > 0.0 { 1 } else if e < 0.0 { -1 } else { 0 })
        .sum();
    Ok(HessianCheck {
        analytic,
        numeric,
        analytic_det,
        gradient,
        signature,
        degenerate: analytic_det.abs() < 1e-12,
    })
}

/// The s-integral left after stationary phase over x̂:
/// 2⁴n⁴/|α|³ ∫₀¹ ds s e^{−4ns sin²(θ_{k′}/4)} e^{inS(θ_0,φ_0)+iπ/2} / (cos(θ_{k′}/4) √cos(θ_{k′}/2) √(1 − s cos²(θ_{k′}/4)) √(1 − s cos(θ_{k′}/2))).
/// The asymptotic Σ_n is the imaginary part. Integrated in ζ with s = 1 − ζ²/16.
pub fn sigma_stationary(n: usize, alpha: f64, theta_kprime: f64) -> Result<ComplexAmplitude> {
    const OP: &str = "normint::sigma_stationary";
    if n == 0 || alpha == 0.0 {
        return Err(Error::Domain {
            op: OP,
            detail: "need n ≥ 1 and α ≠ 0".into(),
        });
    }
    if !(0.0..PI).contains(&theta_kprime) {
        return Err(Error::Domain {
            op: OP,
            detail: format!("θ_k′ must lie in [0, π), got {theta_kprime}"),
        });
    }
    let c4 = (0.25 * theta_kprime).cos();
    let c2 = (0.5 * theta_kprime).cos();
    let s4 = (0.25 * theta_kprime).sin();
    // both square roots vanish at s = 1 when θ_k′ = 0 and the integral diverges
    if s4 * s4 < 1e-12 {
        return Err(Error::Singular { op: OP, value: s4 * s4 });
    }
    let nf = n as f64;
    let damp = 4.0 * nf * s4 * s4;
    let lead = c4 * c2.sqrt();
    let integrand = |zeta: f64| {
        let s = 1.0 - zeta * zeta / 16.0;
        let one_m = zeta * zeta / 16.0;
        // 1 − s c² and 1 − s cos(θ/2) written without cancellation
        let d1 = one_m * c4 * c4 + s4 * s4;
        let d2 = one_m * c2 + 2.0 * s4 * s4;
        let phase = nf * stationary_phase_value(theta_kprime, s) + 0.5 * PI;
        let mag = s * (-damp * s).exp() / (lead * d1.sqrt() * d2.sqrt());
        Complex64::from_polar(mag * zeta / 8.0, phase)
    };
    let r = adaptive(integrand, 0.0, 4.0, AdaptiveOpts::rel(1e-10)).map_err(|e| match e {
        Error::Quadrature { last, previous, .. } => Error::Quadrature { op: OP, last, previous },
        other => other,
    })?;
    let scale = 16.0 * nf.powi(4) / alpha.abs().powi(3);
    Ok(r.scale(Complex64::new(scale, 0.0)))
}
