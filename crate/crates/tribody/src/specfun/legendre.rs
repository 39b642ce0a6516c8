use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// P_l(t) by Bonnet's recurrence.
pub fn legendre_p(l: usize, t: f64) -> f64 {
    if l == 0 {
        return 1.0;
    }
    let mut p0 = 1.0;
    let mut p1 = t;
    for k in 2..=l {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * t * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Orthonormalised associated Legendre function for m ≥ 0, Condon–Shortley
/// phase included: Y_l^m(θ, φ) = this · e^{imφ}.
fn normalized_assoc_legendre(l: usize, m: usize, ct: f64) -> f64 {
    let st = (1.0 - ct * ct).max(0.0).sqrt();
    let mut pmm = (1.0 / (4.0 * PI)).sqrt();
    for k in 1..=m {
        let kf = k as f64;
        pmm *= -((2.0 * kf + 1.0) / (2.0 * kf)).sqrt() * st;
    }
    if l == m {
        return pmm;
    }
    let mut p_prev = pmm;
    let mut p = (2.0 * m as f64 + 3.0).sqrt() * ct * pmm;
    let mf = m as f64;
    for ll in (m + 2)..=l {
        let lf = ll as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
        let next = a * (ct * p - b * p_prev);
        p_prev = p;
        p = next;
    }
    p
}

/// Orthonormal spherical harmonic Y_l^m at a unit direction, Condon–Shortley convention.
pub fn spherical_harmonic(l: usize, m: i64, direction: [f64; 3]) -> Result<Complex64> {
    if m.unsigned_abs() as usize > l {
        return Err(Error::Domain {
            op: "specfun::spherical_harmonic",
            detail: format!("|m| = {} > l = {l}", m.abs()),
        });
    }
    let r = (direction[0].powi(2) + direction[1].powi(2) + direction[2].powi(2)).sqrt();
    let ct = (direction[2] / r).clamp(-1.0, 1.0);
    let phi = direction[1].atan2(direction[0]);
    let ma = m.unsigned_abs() as usize;
    let p = normalized_assoc_legendre(l, ma, ct);
    let y = Complex64::from_polar(p, ma as f64 * phi);
    if m >= 0 {
        Ok(y)
    } else if ma.is_multiple_of(2) {
        Ok(y.conj())
    } else {
        Ok(-y.conj())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_values() {
        assert_eq!(legendre_p(0, 0.3), 1.0);
        assert_eq!(legendre_p(1, -0.4), -0.4);
        let y = spherical_harmonic(0, 0, [0.3, 0.1, 0.9]).unwrap();
        assert!((y.re - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-15);
        let y = spherical_harmonic(1, 0, [0.0, 0.0, 1.0]).unwrap();
        assert!((y.re - (3.0 / (4.0 * PI)).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn condon_shortley_sign() {
        // Y_1^1 = −√(3/8π) sinθ e^{iφ}
        let y = spherical_harmonic(1, 1, [1.0, 0.0, 0.0]).unwrap();
        assert!((y.re + (3.0 / (8.0 * PI)).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn bad_order() {
        assert!(spherical_harmonic(1, 2, [0.0, 0.0, 1.0]).is_err());
    }
}
