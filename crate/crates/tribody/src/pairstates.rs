//! Two-body Coulomb scattering and bound states, the three-body distorted
//! wave built from them, and the generating function of degenerate bound
//! states with its partial-wave decomposition.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::amplitude::ComplexAmplitude;
use crate::error::{Error, Result};
use crate::kinematics::{dot, norm, JacobiState, Momenta, SystemConfig, Vec3};
use crate::quad::SphereGrid;
use crate::specfun::{gamma_complex, kummer_phi, laguerre, ln_gamma_complex, spherical_harmonic};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Coulomb scattering state parameters: coupling α, momentum k, η = α/(2k),
/// N_c = (2π)^{-3/2} e^{-πη/2} Γ(1+iη).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoulombWaveParams {
    pub alpha: f64,
    pub k: Vec3,
    pub eta: f64,
    pub nc: Complex64,
}

impl CoulombWaveParams {
    pub fn new(alpha: f64, k: Vec3) -> Result<Self> {
        let kn = norm(k);
        if kn == 0.0 {
            return Err(Error::Kinematics {
                op: "pairstates::coulomb_wave",
                detail: "zero momentum".into(),
            });
        }
        let eta = alpha / (2.0 * kn);
        Ok(Self {
            alpha,
            k,
            eta,
            nc: normalization(eta)?,
        })
    }
}

/// N_c = (2π)^{-3/2} e^{-πη/2} Γ(1+iη)
pub fn normalization(eta: f64) -> Result<Complex64> {
    let g = gamma_complex(Complex64::new(1.0, eta))?.value;
    Ok(g * (-0.5 * PI * eta).exp() * (2.0 * PI).powf(-1.5))
}

/// Distortion factor D(x, k) = Φ(−iη, 1, i(xk − ⟨x,k⟩)).
pub fn distortion(eta: f64, x: Vec3, k: Vec3) -> Result<ComplexAmplitude> {
    let arg = I * (norm(x) * norm(k) - dot(x, k));
    kummer_phi(Complex64::new(0.0, -eta), Complex64::new(1.0, 0.0), arg)
}

/// ψ_c(x, k) = N_c e^{i⟨x,k⟩} D(x, k)
pub fn coulomb_wave(params: &CoulombWaveParams, x: Vec3) -> Result<ComplexAmplitude> {
    let d = distortion(params.eta, x, params.k)?;
    Ok(d.scale(params.nc * (I * dot(x, params.k)).exp()))
}

/// The pieces of the three-body distorted wave at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BbkFactors {
    /// N_0 = Π N_c^{(j)}
    pub n0: Complex64,
    /// e^{i⟨z,q⟩}
    pub plane: Complex64,
    /// D(x_j, k_j), indexed by pair − 1.
    pub d: [ComplexAmplitude; 3],
}

impl BbkFactors {
    pub fn value(&self) -> ComplexAmplitude {
        let mut acc = ComplexAmplitude::exact(self.n0 * self.plane);
        for d in &self.d {
            acc = acc.mul(*d);
        }
        acc
    }
}

pub fn bbk_factors(config: &SystemConfig, q: &Momenta, z: &JacobiState) -> Result<BbkFactors> {
    config.validate()?;
    let pairs = z.all_pairings(config)?;
    let zq = dot(pairs[0].x, q.k_pair[0]) + dot(pairs[0].y, q.p_pair[0]);
    let mut n0 = Complex64::new(1.0, 0.0);
    let mut d = [ComplexAmplitude::exact(Complex64::new(1.0, 0.0)); 3];
    for j in 0..3 {
        let eta = q.eta[j];
        n0 *= normalization(eta)?;
        d[j] = distortion(eta, pairs[j].x, q.k_pair[j])?;
    }
    Ok(BbkFactors {
        n0,
        plane: (I * zq).exp(),
        d,
    })
}

/// Ψ^BBK(z, q) = N_0 e^{i⟨z,q⟩} D(x_1,k_1) D(x_2,k_2) D(x_3,k_3)
pub fn bbk_wave(config: &SystemConfig, q: &Momenta, z: &JacobiState) -> Result<ComplexAmplitude> {
    Ok(bbk_factors(config, q, z)?.value())
}

/// Quantum numbers n ≥ 1, 0 ≤ l < n, |m| ≤ l.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundStateIndex {
    pub n: usize,
    pub l: usize,
    pub m: i64,
}

impl BoundStateIndex {
    pub fn new(n: usize, l: usize, m: i64) -> Result<Self> {
        if n == 0 || l >= n || m.unsigned_abs() as usize > l {
            return Err(Error::Domain {
                op: "pairstates::BoundStateIndex",
                detail: format!("need n ≥ 1, l < n, |m| ≤ l; got ({n}, {l}, {m})"),
            });
        }
        Ok(Self { n, l, m })
    }
}

fn ln_factorial(k: usize) -> f64 {
    ln_gamma_complex(Complex64::new(k as f64 + 1.0, 0.0))
        .map(|z| z.re)
        .unwrap_or(0.0)
}

/// Radial normalization N_nl making ∫ ψ_nl(x)² x² dx = 1 for
/// ψ_nl = N e^{-κx/2} x^l Φ(l+1−n, 2l+2, κx), κ = |α|/n.
pub fn bound_normalization(n: usize, l: usize, alpha: f64) -> f64 {
    let kappa = alpha.abs() / n as f64;
    let ln_n = (1.5 + l as f64) * kappa.ln() + 0.5 * (ln_factorial(n + l) - ln_factorial(n - l - 1) - (2.0 * n as f64).ln())
        - ln_factorial(2 * l + 1);
    ln_n.exp()
}

fn require_attractive(alpha: f64, op: &'static str) -> Result<()> {
    if alpha < 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            op,
            detail: format!("bound states need an attractive coupling, got alpha = {alpha}"),
        })
    }
}

/// Radial bound state ψ_nl(x), unit L² normalized with measure x² dx.
pub fn bound_radial(index: BoundStateIndex, alpha: f64, x: f64) -> Result<f64> {
    require_attractive(alpha, "pairstates::bound_radial")?;
    if x < 0.0 {
        return Err(Error::Domain {
            op: "pairstates::bound_radial",
            detail: format!("negative radius {x}"),
        });
    }
    let (n, l) = (index.n, index.l);
    let kappa = alpha.abs() / n as f64;
    let phi = kummer_phi(
        Complex64::new(l as f64 + 1.0 - n as f64, 0.0),
        Complex64::new(2.0 * l as f64 + 2.0, 0.0),
        Complex64::new(kappa * x, 0.0),
    )?
    .value
    .re;
    Ok(bound_normalization(n, l, alpha) * (-0.5 * kappa * x).exp() * x.powi(l as i32) * phi)
}

/// β_nl = (1−n)(2−n)…(l−n), with β_n0 = 1.
pub fn beta_coefficient(n: usize, l: usize) -> f64 {
    (1..=l).map(|j| j as f64 - n as f64).product()
}

/// g_n(x, k̂) = e^{-|α|x/2n} L_{n−1}((|α|/n) x sin²(θ/2)), sin²(θ/2) = (1 − ⟨k̂,x̂⟩)/2.
pub fn generating_function(n: usize, alpha: f64, x: Vec3, khat: Vec3) -> Result<f64> {
    require_attractive(alpha, "pairstates::generating_function")?;
    if n == 0 {
        return Err(Error::Domain {
            op: "pairstates::generating_function",
            detail: "n must be ≥ 1".into(),
        });
    }
    let r = norm(x);
    let nf = n as f64;
    let a = alpha.abs();
    let cos = if r == 0.0 { 1.0 } else { dot(khat, x) / (r * norm(khat)) };
    let half = 0.5 * (1.0 - cos);
    Ok((-a * r / (2.0 * nf)).exp() * laguerre(n - 1, a / nf * r * half))
}

/// Bound-state expansion of g_n:
/// 4π e^{-|α|x/2n} Σ_{l<n} Σ_m β_nl/(2l+1)! (−|α|/n)^l x^l Φ(l+1−n, 2l+2, |α|x/n) Y_l^m(x̂) Y_l^m(k̂)*.
pub fn generating_function_expansion(n: usize, alpha: f64, x: Vec3, khat: Vec3) -> Result<Complex64> {
    require_attractive(alpha, "pairstates::generating_function")?;
    let r = norm(x);
    let nf = n as f64;
    let a = alpha.abs();
    let mut total = Complex64::new(0.0, 0.0);
    for l in 0..n {
        let lf = l as f64;
        let phi = kummer_phi(
            Complex64::new(lf + 1.0 - nf, 0.0),
            Complex64::new(2.0 * lf + 2.0, 0.0),
            Complex64::new(a * r / nf, 0.0),
        )?
        .value
        .re;
        let radial = beta_coefficient(n, l) / (ln_factorial(2 * l + 1)).exp() * (-a / nf * r).powi(l as i32) * phi;
        let mut angular = Complex64::new(0.0, 0.0);
        for m in -(l as i64)..=(l as i64) {
            angular += spherical_harmonic(l, m, x)? * spherical_harmonic(l, m, khat)?.conj();
        }
        total += angular * radial;
    }
    Ok(total * 4.0 * PI * (-a * r / (2.0 * nf)).exp())
}

/// Partial component of the Coulomb factor e^{-ikx}ψ̃_c in the Legendre expansion
/// Φ(1+iγ, 1, −ikx(1−t)) = Σ (2l+1) Φ_l P_l(t):
/// Φ_l = Γ(iγ+l+1)/(Γ(iγ+1)Γ(2l+2)) (2ikx)^l Φ(iγ+l+1, 2l+2, −2ikx).
pub fn partial_component(gamma: f64, k: f64, x: f64, l: usize) -> Result<Complex64> {
    if k <= 0.0 {
        return Err(Error::Domain {
            op: "pairstates::partial_component",
            detail: format!("k must be positive, got {k}"),
        });
    }
    let lf = l as f64;
    let ig = Complex64::new(0.0, gamma);
    let phi = kummer_phi(ig + lf + 1.0, Complex64::new(2.0 * lf + 2.0, 0.0), Complex64::new(0.0, -2.0 * k * x))?.value;
    if x == 0.0 {
        return Ok(if l == 0 { phi } else { Complex64::new(0.0, 0.0) });
    }
    let ln_pref = ln_gamma_complex(ig + lf + 1.0)? - ln_gamma_complex(ig + 1.0)? - ln_factorial(2 * l + 1)
        + lf * Complex64::new(0.0, 2.0 * k * x).ln();
    Ok(ln_pref.exp() * phi)
}

/// Projection of a sphere kernel onto one bound state:
/// (1/N_nl) β_nl/(2l+1)! (−|α|/n)^l ∫ dω̂ R_n(ω̂) Y_l^m(ω̂)*.
pub fn reconstruct_r_nlm<F: Fn(Vec3) -> Complex64>(
    kernel: F,
    index: BoundStateIndex,
    alpha: f64,
    grid: &SphereGrid,
) -> Result<ComplexAmplitude> {
    require_attractive(alpha, "pairstates::reconstruct_R_nlm")?;
    let (n, l) = (index.n, index.l);
    let beta = beta_coefficient(n, l);
    if beta == 0.0 {
        return Ok(ComplexAmplitude::exact(Complex64::new(0.0, 0.0)));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut abs_acc = 0.0;
    for (p, &w) in grid.points.iter().zip(&grid.weights) {
        let term = kernel(*p) * spherical_harmonic(l, index.m, *p)?.conj() * w;
        abs_acc += term.norm();
        acc += term;
    }
    let pref = beta / ln_factorial(2 * l + 1).exp() * (-alpha.abs() / n as f64).powi(l as i32)
        / bound_normalization(n, l, alpha);
    Ok(ComplexAmplitude::new(acc * pref, 1e-15 * abs_acc * pref.abs() * (grid.points.len() as f64).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_values() {
        assert_eq!(beta_coefficient(4, 4), 0.0);
        assert_eq!(beta_coefficient(3, 2), 2.0);
        assert_eq!(beta_coefficient(5, 0), 1.0);
        for n in 1..8 {
            for l in n..n + 4 {
                assert_eq!(beta_coefficient(n, l), 0.0);
            }
        }
    }

    #[test]
    fn plane_wave_limit() {
        let p = CoulombWaveParams::new(0.0, [0.3, 0.0, 1.0]).unwrap();
        let x = [0.5, -1.0, 2.0];
        let v = coulomb_wave(&p, x).unwrap().value;
        let e = (I * dot(x, p.k)).exp() * (2.0 * PI).powf(-1.5);
        assert!((v - e).norm() < 1e-15);
    }

    #[test]
    fn forward_direction() {
        let p = CoulombWaveParams::new(-2.0, [0.0, 0.0, 1.5]).unwrap();
        let d = distortion(p.eta, [0.0, 0.0, 3.0], p.k).unwrap().value;
        assert_eq!(d, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn ground_state_origin() {
        let idx = BoundStateIndex::new(1, 0, 0).unwrap();
        let v = bound_radial(idx, -2.0, 0.0).unwrap();
        assert!((v - bound_normalization(1, 0, -2.0)).abs() < 1e-15);
        assert!(bound_radial(idx, 1.0, 0.0).is_err());
    }

    #[test]
    fn generating_function_trivial_cases() {
        let g = generating_function(1, -1.5, [1.0, 2.0, 0.5], [0.0, 0.0, 1.0]).unwrap();
        assert!((g - (-0.75 * norm([1.0, 2.0, 0.5])).exp()).abs() < 1e-15);
        let x = [0.3, 0.4, 1.2];
        let khat = crate::kinematics::unit(x);
        let g = generating_function(4, -1.0, x, khat).unwrap();
        assert!((g - (-norm(x) / 8.0).exp()).abs() < 1e-14);
    }
}
