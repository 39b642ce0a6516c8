use std::f64::consts::PI;

use num_complex::Complex64;

use crate::amplitude::ComplexAmplitude;
use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// ln Γ(z) for Re z ≥ 1/2 by the Lanczos sum.
fn ln_gamma_right(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut a = Complex64::new(LANCZOS[0], 0.0);
    for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + a.ln()
}

/// ln Γ(z) on a branch continuous in z away from the negative real axis.
/// The imaginary part is only meaningful modulo 2π.
pub fn ln_gamma_complex(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(Error::Pole {
            op: "specfun::ln_gamma_complex",
            at: format!("{z}"),
        });
    }
    if z.re >= 0.5 {
        Ok(ln_gamma_right(z))
    } else {
        // Γ(z)Γ(1−z) = π / sin(πz)
        let s = (z * PI).sin();
        Ok(Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma_right(1.0 - z))
    }
}

/// Γ(z) for complex z, accurate to about 13 significant digits on |z| ≤ 50.
pub fn gamma_complex(z: Complex64) -> Result<ComplexAmplitude> {
    if is_pole(z) {
        return Err(Error::Pole {
            op: "specfun::gamma_complex",
            at: format!("{z}"),
        });
    }
    if z.im == 0.0 && z.re > 0.0 && z.re <= 171.0 && z.re == z.re.round() {
        let n = z.re as u32;
        let v: f64 = (1..n).map(f64::from).product();
        return Ok(ComplexAmplitude::exact(Complex64::new(v, 0.0)));
    }
    let value = if z.re >= 0.5 {
        ln_gamma_right(z).exp()
    } else {
        let s = (z * PI).sin();
        PI / (s * ln_gamma_right(1.0 - z).exp())
    };
    let m = z.norm();
    let err = value.norm() * 4e-16 * (10.0 + m * (2.0 + m).ln());
    Ok(ComplexAmplitude::new(value, err))
}
