use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TAIL: f64 = 1e-14;
const MAX_DIM: usize = 2000;

/// Fourier coefficients of the even π-periodic Mathieu function ce_{2l}(φ, s),
/// normalised as 2A_0² + Σ_{r≥1} A_{2r}² = 1 with A_{2l} > 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MathieuEven {
    pub order_2l: usize,
    pub s: f64,
    /// Characteristic value a_{2l}(s).
    pub a: f64,
    /// A_0, A_2, A_4, ... truncated where |A_{2r}| < 1e-14 max|A|.
    pub coeffs: Vec<f64>,
    /// Coefficients past the truncation point, needed by Ce_{2l}(ζ, s) where
    /// cosh 2rζ amplifies them.
    pub tail: Vec<f64>,
}

impl MathieuEven {
    /// Solves the truncated recurrence
    /// a A_0 = s A_2, (a−4)A_2 = s(2A_0 + A_4), (a−4r²)A_{2r} = s(A_{2r−2} + A_{2r+2}),
    /// as a symmetric tridiagonal eigenproblem in (√2 A_0, A_2, A_4, ...),
    /// growing the dimension until the last coefficient is negligible.
    pub fn new(order_2l: usize, s: f64) -> Result<Self> {
        if !order_2l.is_multiple_of(2) {
            return Err(Error::Domain {
                op: "specfun::mathieu_ce",
                detail: format!("order {order_2l} is odd"),
            });
        }
        let l = order_2l / 2;
        let mut dim = l + 16 + (2.0 * s.abs().sqrt()) as usize;
        loop {
            let mut m = DMatrix::<f64>::zeros(dim, dim);
            for r in 0..dim {
                m[(r, r)] = 4.0 * (r * r) as f64;
                if r + 1 < dim {
                    let off = if r == 0 { s * std::f64::consts::SQRT_2 } else { s };
                    m[(r, r + 1)] = off;
                    m[(r + 1, r)] = off;
                }
            }
            let eig = SymmetricEigen::new(m);
            let mut order: Vec<usize> = (0..dim).collect();
            order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
            let idx = order[l];
            let v = eig.eigenvectors.column(idx);
            let vmax = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
            if v[dim - 1].abs() < TAIL * vmax && v[dim - 2].abs() < TAIL * vmax * 10.0 {
                let sign = if v[l] < 0.0 { -1.0 } else { 1.0 };
                let a = eig.eigenvalues[idx];
                let mut all: Vec<f64> = v.iter().map(|x| x * sign).collect();
                all[0] /= std::f64::consts::SQRT_2;
                let peak = (0..dim)
                    .max_by(|&i, &j| all[i].abs().total_cmp(&all[j].abs()))
                    .unwrap_or(0)
                    .max(l)
                    .max(1);
                let all = refine_tail(&all[..=peak], a, s);
                let cut = all
                    .iter()
                    .rposition(|c| c.abs() >= TAIL * vmax)
                    .unwrap_or(0)
                    .max(l);
                let tail = all[cut + 1..].to_vec();
                let mut coeffs = all;
                coeffs.truncate(cut + 1);
                return Ok(Self {
                    order_2l,
                    s,
                    a,
                    coeffs,
                    tail,
                });
            }
            if dim >= MAX_DIM {
                return Err(Error::NonConvergence {
                    op: "specfun::mathieu_ce",
                    terms: dim,
                });
            }
            dim = (dim * 2).min(MAX_DIM);
        }
    }

    /// ce_{2l}(φ, s) = Σ A_{2r} cos 2rφ
    pub fn ce(&self, phi: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(r, a)| a * (2.0 * r as f64 * phi).cos())
            .sum()
    }

    /// Associated function Ce_{2l}(ζ, s) = Σ A_{2r} cosh 2rζ.
    pub fn ce_assoc(&self, zeta: f64) -> f64 {
        self.coeffs
            .iter()
            .chain(&self.tail)
            .enumerate()
            .map(|(r, a)| a * (2.0 * r as f64 * zeta).cosh())
            .sum()
    }

    /// Largest residual of the three-term recurrence relative to max|A|.
    pub fn recurrence_residual(&self) -> f64 {
        let a = &self.coeffs;
        let get = |r: usize| {
            a.get(r)
                .or_else(|| self.tail.get(r - a.len()))
                .copied()
                .unwrap_or(0.0)
        };
        let amax = a.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        let mut worst = (self.a * get(0) - self.s * get(1)).abs();
        worst = worst.max(((self.a - 4.0) * get(1) - self.s * (2.0 * get(0) + get(2))).abs());
        for r in 2..a.len() {
            let res = (self.a - 4.0 * (r * r) as f64) * get(r) - self.s * (get(r - 1) + get(r + 1));
            worst = worst.max(res.abs());
        }
        worst / amax
    }

    pub fn a0(&self) -> f64 {
        self.coeffs[0]
    }
}

/// Replaces everything past `head` by the minimal solution of the recurrence,
/// A_{2r}/A_{2r−2} = s/(a − 4r² − s A_{2r+2}/A_{2r}), evaluated backwards.
/// Eigenvector entries far below the peak carry only absolute accuracy.
fn refine_tail(head: &[f64], a: f64, s: f64) -> Vec<f64> {
    const DEPTH: usize = 400;
    let r0 = head.len() - 1;
    let top = r0 + DEPTH;
    let mut ratios = vec![0.0; top + 2];
    for r in (r0 + 1..=top).rev() {
        let denom = a - 4.0 * (r * r) as f64 - s * ratios[r + 1];
        ratios[r] = if denom == 0.0 { 0.0 } else { s / denom };
    }
    let mut out = head.to_vec();
    let floor = 1e-40 * head.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for r in r0 + 1..=top {
        let next = out[r - 1] * ratios[r];
        if next.abs() <= floor {
            break;
        }
        out.push(next);
    }
    out
}

/// Value of ce_{2l}(φ, s).
pub fn mathieu_ce(order_2l: usize, s: f64, phi: f64) -> Result<f64> {
    Ok(MathieuEven::new(order_2l, s)?.ce(phi))
}

/// (z_1, α) from (ζ, ϑ): z_1 = 2√s √(cosh²ζ − sin²ϑ), tan α = tanh ζ tan ϑ.
pub fn fix_zm_forward(zeta: f64, vartheta: f64, s: f64) -> (f64, f64) {
    let z1 = 2.0 * s.sqrt() * (zeta.cosh().powi(2) - vartheta.sin().powi(2)).sqrt();
    let alpha = (zeta.tanh() * vartheta.sin()).atan2(vartheta.cos());
    (z1, alpha)
}

/// Inverse of [`fix_zm_forward`] with ζ ≥ 0 and ϑ in the quadrant of α.
pub fn fix_zm_inverse(z1: f64, alpha: f64, s: f64) -> (f64, f64) {
    let c = z1 * z1 / (4.0 * s);
    let cos2 = alpha.cos().powi(2);
    let disc = ((1.0 + c) * (1.0 + c) - 4.0 * c * cos2).max(0.0);
    let u = 0.5 * ((1.0 + c) + disc.sqrt());
    let w = (u - c).clamp(0.0, 1.0);
    let zeta = u.sqrt().max(1.0).acosh();
    let sin_v = w.sqrt();
    let mut vartheta = sin_v.asin();
    // Put ϑ in the quadrant of α so that tan α = tanh ζ tan ϑ with matching signs.
    let (sa, ca) = alpha.sin_cos();
    if ca < 0.0 {
        vartheta = std::f64::consts::PI - vartheta;
    }
    if sa < 0.0 {
        vartheta = -vartheta;
    }
    (zeta, vartheta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_parameter_limit() {
        let m = MathieuEven::new(2, 0.0).unwrap();
        for phi in [0.0, 0.3, 1.1] {
            assert!((m.ce(phi) - (2.0 * phi).cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn normalization_and_residual() {
        for s in [0.1, 0.5, 2.0, 25.0] {
            for l2 in [0, 2, 4] {
                let m = MathieuEven::new(l2, s).unwrap();
                let n: f64 = 2.0 * m.coeffs[0].powi(2) + m.coeffs[1..].iter().map(|a| a * a).sum::<f64>();
                assert!((n - 1.0).abs() < 1e-12);
                assert!(m.recurrence_residual() < 1e-10);
            }
        }
    }

    #[test]
    fn fix_zm_round_trip() {
        let (z1, alpha) = fix_zm_forward(0.7, 0.4, 0.5);
        let (zeta, vt) = fix_zm_inverse(z1, alpha, 0.5);
        assert!((zeta - 0.7).abs() < 1e-10 && (vt - 0.4).abs() < 1e-10);
    }
}
