use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// L_n(x) by the three-term recurrence.
pub fn laguerre(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut p0 = 1.0;
    let mut p1 = 1.0 - x;
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0 - x) * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// L_n(x) as (sign, ln|L_n(x)|), usable where L_n(x) itself overflows.
pub fn laguerre_log(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p0 = 1.0;
    let mut p1 = 1.0 - x;
    let mut scale = 0.0;
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0 - x) * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
        let m = p1.abs();
        if m > 1e100 {
            p0 /= m;
            p1 /= m;
            scale += m.ln();
        }
    }
    if p1 == 0.0 {
        (0.0, f64::NEG_INFINITY)
    } else {
        (p1.signum(), p1.abs().ln() + scale)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Oscillation,
    Outside,
}

/// Position of x relative to the oscillation domain of L_n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaguerreRegime {
    pub n: usize,
    pub x: f64,
    pub upsilon: f64,
    /// Half-width of the excluded boundary layers, υ^0.3.
    pub delta: f64,
    /// θ_* with x = υ cos²θ_*; NaN outside [0, υ].
    pub theta_star: f64,
    pub regime: Regime,
}

pub const DELTA_EXPONENT: f64 = 0.3;

impl LaguerreRegime {
    pub fn new(n: usize, x: f64) -> Self {
        let upsilon = 4.0 * n as f64 + 2.0;
        let delta = upsilon.powf(DELTA_EXPONENT);
        let theta_star = if (0.0..=upsilon).contains(&x) {
            (x / upsilon).sqrt().acos()
        } else {
            f64::NAN
        };
        let regime = if x > delta && x < upsilon - delta {
            Regime::Oscillation
        } else {
            Regime::Outside
        };
        Self {
            n,
            x,
            upsilon,
            delta,
            theta_star,
            regime,
        }
    }

    /// The point x = υ cos²θ for a given angle.
    pub fn from_theta(n: usize, theta: f64) -> Self {
        let upsilon = 4.0 * n as f64 + 2.0;
        let c = theta.cos();
        let mut r = Self::new(n, upsilon * c * c);
        r.theta_star = theta;
        r
    }
}

/// Number of terms kept in the oscillatory expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TricomiOrder {
    /// Leading term only.
    #[default]
    K1,
    /// Leading term plus the A_1(θ_*) correction.
    K2,
}

pub fn tricomi_a1(theta: f64) -> f64 {
    let s2 = theta.sin().powi(2);
    (5.0 / (4.0 * s2) - s2 - 1.0) / 12.0
}

/// Oscillatory large-n approximation of e^{-x/2} L_n(x) for Δ < x < υ − Δ.
pub fn laguerre_oscillation_asym(n: usize, x: f64, order: TricomiOrder) -> Result<f64> {
    let r = LaguerreRegime::new(n, x);
    if r.regime != Regime::Oscillation {
        return Err(Error::Regime {
            op: "specfun::laguerre_oscillation_asym",
            detail: format!(
                "x = {x} not in ({:.6}, {:.6}) for n = {n}",
                r.delta,
                r.upsilon - r.delta
            ),
        });
    }
    Ok(oscillation_form(n, r.upsilon, r.theta_star, order))
}

fn oscillation_form(n: usize, upsilon: f64, theta: f64, order: TricomiOrder) -> f64 {
    let s2t = (2.0 * theta).sin();
    let phase = 0.25 * (upsilon * (2.0 * theta - s2t) + PI);
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut bracket = phase.sin();
    if order == TricomiOrder::K2 {
        bracket += tricomi_a1(theta) / (0.25 * upsilon * s2t) * (phase + 1.5 * PI).sin();
    }
    2.0 * sign * bracket / (PI * upsilon * s2t).sqrt()
}

/// The asymptotic form evaluated directly at an angle θ_* (x = υ cos²θ_*),
/// bypassing the domain check.
pub fn laguerre_oscillation_at_theta(n: usize, theta: f64, order: TricomiOrder) -> f64 {
    oscillation_form(n, 4.0 * n as f64 + 2.0, theta, order)
}

/// e^{-x/2} L_n(x) from the exact recurrence.
pub fn laguerre_damped(n: usize, x: f64) -> f64 {
    let (s, l) = laguerre_log(n, x);
    s * (l - 0.5 * x).exp()
}

/// Error of the oscillatory form scaled by its envelope 2(πυ sin2θ)^{-1/2},
/// maximised over θ = θ_c + j/υ, |j| ≤ half_width. Pointwise relative error is
/// meaningless near zeros of L_n; the envelope-scaled error is not.
pub fn tricomi_window_error(n: usize, theta_c: f64, half_width: i32, order: TricomiOrder) -> f64 {
    let upsilon = 4.0 * n as f64 + 2.0;
    let mut worst = 0.0f64;
    for j in -half_width..=half_width {
        let theta = theta_c + j as f64 / upsilon;
        let c = theta.cos();
        let x = upsilon * c * c;
        let exact = laguerre_damped(n, x);
        let approx = oscillation_form(n, upsilon, theta, order);
        let envelope = 2.0 / (PI * upsilon * (2.0 * theta).sin()).sqrt();
        worst = worst.max((approx - exact).abs() / envelope);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_orders() {
        assert_eq!(laguerre(0, 7.3), 1.0);
        assert_eq!(laguerre(1, 2.0), -1.0);
        let x: f64 = 0.7;
        assert!((laguerre(2, x) - (1.0 - 2.0 * x + x * x / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn log_form_matches_plain() {
        let (s, l) = laguerre_log(30, 12.5);
        assert!((s * l.exp() - laguerre(30, 12.5)).abs() < 1e-10 * laguerre(30, 12.5).abs());
    }

    #[test]
    fn regime_boundaries() {
        let r = LaguerreRegime::new(100, 201.0);
        assert_eq!(r.regime, Regime::Oscillation);
        assert!((r.upsilon * r.theta_star.cos().powi(2) - 201.0).abs() < 1e-12);
        assert_eq!(LaguerreRegime::new(100, 0.5).regime, Regime::Outside);
        assert_eq!(LaguerreRegime::new(100, 500.0).regime, Regime::Outside);
        assert!(laguerre_oscillation_asym(100, 500.0, TricomiOrder::K1).is_err());
    }
}
