use num_complex::Complex64;

use super::gamma::ln_gamma_complex;
use crate::amplitude::ComplexAmplitude;
use crate::error::{Error, Result};

const MAX_TERMS: usize = 100_000;
const EPS: f64 = 1e-16;

fn non_positive_integer(z: Complex64) -> Option<usize> {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() && z.re > -1e9 {
        Some((-z.re) as usize)
    } else {
        None
    }
}

/// Taylor series of Φ(a, c, z), stopped after three consecutive terms below
/// EPS·|sum|.
fn kummer_series(a: Complex64, c: Complex64, z: Complex64) -> Result<ComplexAmplitude> {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut max_term = 1.0f64;
    let mut small = 0;
    let terminating = non_positive_integer(a);
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        if let Some(m) = terminating {
            if k >= m {
                let err = EPS * max_term * (k as f64 + 1.0).sqrt() + EPS * sum.norm();
                return Ok(ComplexAmplitude::new(sum, err));
            }
        }
        term = term * (a + kf) / (c + kf) * z / (kf + 1.0);
        sum += term;
        let t = term.norm();
        max_term = max_term.max(t);
        if t < EPS * sum.norm() {
            small += 1;
            if small >= 3 {
                let err = EPS * max_term * (kf + 1.0).sqrt() + EPS * sum.norm();
                return Ok(ComplexAmplitude::new(sum, err));
            }
        } else {
            small = 0;
        }
        if !sum.re.is_finite() || !sum.im.is_finite() {
            break;
        }
    }
    Err(Error::NonConvergence {
        op: "specfun::kummer_phi",
        terms: MAX_TERMS,
    })
}

/// Φ(−m, c, z) by the contiguous recurrence in the first parameter,
/// (c+k)Φ(−k−1) = (2k+c−z)Φ(−k) − kΦ(−k+1). Stable for Re z ≥ 0, where the
/// Taylor series of the polynomial cancels heavily.
fn kummer_polynomial(m: usize, c: Complex64, z: Complex64) -> ComplexAmplitude {
    let mut prev = Complex64::new(1.0, 0.0);
    if m == 0 {
        return ComplexAmplitude::exact(prev);
    }
    let mut cur = 1.0 - z / c;
    let mut scale = (1.0f64).max(cur.norm());
    for k in 1..m {
        let kf = k as f64;
        let next = ((2.0 * kf + c - z) * cur - kf * prev) / (c + kf);
        prev = cur;
        cur = next;
        scale = scale.max(cur.norm());
    }
    let err = EPS * (m as f64) * scale.max(cur.norm());
    ComplexAmplitude::new(cur, err)
}

/// Confluent hypergeometric function Φ(a, c, z) = ₁F₁(a; c; z).
pub fn kummer_phi(a: Complex64, c: Complex64, z: Complex64) -> Result<ComplexAmplitude> {
    let a_poly = non_positive_integer(a);
    if let Some(cm) = non_positive_integer(c) {
        match a_poly {
            Some(am) if am <= cm => {}
            _ => {
                return Err(Error::Pole {
                    op: "specfun::kummer_phi",
                    at: format!("c = {c}"),
                })
            }
        }
    }
    if z == Complex64::new(0.0, 0.0) {
        return Ok(ComplexAmplitude::exact(Complex64::new(1.0, 0.0)));
    }
    if let Some(m) = a_poly {
        if z.re >= 0.0 && non_positive_integer(c).is_none() {
            return Ok(kummer_polynomial(m, c, z));
        }
        return kummer_series(a, c, z);
    }
    if z.re < 0.0 {
        // Φ(a,c,z) = e^z Φ(c−a, c, −z)
        let inner = kummer_right_half(c - a, c, -z)?;
        return Ok(inner.scale(z.exp()));
    }
    kummer_right_half(a, c, z)
}

/// Series radius below which the Taylor sum keeps full precision.
const SERIES_RADIUS: f64 = 8.0;
const ACCEPT: f64 = 1e-13;

/// Φ for Re z ≥ 0: Taylor series near the origin, the large-|z| expansion when
/// its smallest term is small enough, and ODE stepping from the series disc
/// otherwise.
fn kummer_right_half(a: Complex64, c: Complex64, z: Complex64) -> Result<ComplexAmplitude> {
    if z.norm() <= SERIES_RADIUS {
        return kummer_series(a, c, z);
    }
    if let Some(v) = kummer_asymptotic(a, c, z)? {
        if v.err <= ACCEPT * v.value.norm() {
            return Ok(v);
        }
    }
    // with |z| moderate the terms peak near e^{|z|}; skip straight to stepping then
    if z.norm() < 40.0 {
        let v = kummer_series(a, c, z)?;
        if v.err <= ACCEPT * v.value.norm() {
            return Ok(v);
        }
    }
    kummer_stepped(a, c, z)
}

fn rgamma(z: Complex64) -> Complex64 {
    if non_positive_integer(z).is_some() {
        return Complex64::new(0.0, 0.0);
    }
    match ln_gamma_complex(z) {
        Ok(l) => (-l).exp(),
        Err(_) => Complex64::new(0.0, 0.0),
    }
}

/// Large-|z| expansion
/// Φ/Γ(c) ≈ e^{±iπa} z^{−a}/Γ(c−a) Σ (a)_s(a−c+1)_s/s! (−z)^{−s} + e^z z^{a−c}/Γ(a) Σ (c−a)_s(1−a)_s/s! z^{−s},
/// upper sign for Im z ≥ 0. Each sum is cut at its smallest term, which is also the error
/// estimate. Returns None when a sum has not started to decrease within the term budget.
fn kummer_asymptotic(a: Complex64, c: Complex64, z: Complex64) -> Result<Option<ComplexAmplitude>> {
    let one = Complex64::new(1.0, 0.0);
    let sum = |p: Complex64, q: Complex64, x: Complex64| -> Option<(Complex64, f64)> {
        let mut term = one;
        let mut acc = one;
        let mut last = 1.0f64;
        let inv = one / x;
        for s in 0..400 {
            let sf = s as f64;
            let next = term * (p + sf) * (q + sf) / (sf + 1.0) * inv;
            let t = next.norm();
            if t == 0.0 {
                return Some((acc + next, 0.0));
            }
            if t > last && s > 0 {
                return Some((acc, last));
            }
            acc += next;
            term = next;
            last = t;
            if t < 1e-17 * acc.norm() {
                return Some((acc, t));
            }
        }
        None
    };
    let Some((s1, e1)) = sum(a, a - c + 1.0, -z) else { return Ok(None) };
    let Some((s2, e2)) = sum(c - a, one - a, z) else { return Ok(None) };
    let sign = if z.im >= 0.0 { 1.0 } else { -1.0 };
    let lnz = z.ln();
    let gc = gamma_of(c)?;
    let f1 = Complex64::new(0.0, sign * std::f64::consts::PI) * a - a * lnz;
    let p1 = f1.exp() * rgamma(c - a) * gc;
    let p2 = (z + (a - c) * lnz).exp() * rgamma(a) * gc;
    let value = p1 * s1 + p2 * s2;
    if !value.re.is_finite() || !value.im.is_finite() {
        return Ok(None);
    }
    let err = p1.norm() * e1 + p2.norm() * e2 + 1e-15 * (p1 * s1).norm().max((p2 * s2).norm());
    Ok(Some(ComplexAmplitude::new(value, err)))
}

fn gamma_of(c: Complex64) -> Result<Complex64> {
    Ok(ln_gamma_complex(c)?.exp())
}

/// Taylor coefficients of the solution of x w'' + (c − x) w' − a w = 0 about x0,
/// evaluated at x0 + h: returns (w, w').
fn ode_step(a: Complex64, c: Complex64, x0: Complex64, w: Complex64, dw: Complex64, h: Complex64) -> (Complex64, Complex64) {
    let mut d0 = w;
    let mut d1 = dw;
    let mut val = d0 + d1 * h;
    let mut der = d1;
    let mut hp = h;
    let mut small = 0;
    let scale = w.norm() + dw.norm() * h.norm();
    for k in 0..2000 {
        let kf = k as f64;
        let d2 = (-(kf + 1.0) * (c - x0 + kf) * d1 + (a + kf) * d0) / (x0 * ((kf + 1.0) * (kf + 2.0)));
        // hp = h^{k+1}
        let t = d2 * hp * h;
        val += t;
        der += d2 * (kf + 2.0) * hp;
        hp *= h;
        d0 = d1;
        d1 = d2;
        if t.norm() < 1e-17 * (scale + val.norm()) {
            small += 1;
            if small >= 3 {
                break;
            }
        } else {
            small = 0;
        }
    }
    (val, der)
}

/// Integrates the Kummer equation along the ray from |x| = SERIES_RADIUS out to z.
fn kummer_stepped(a: Complex64, c: Complex64, z: Complex64) -> Result<ComplexAmplitude> {
    let dir = z / z.norm();
    let mut x = dir * SERIES_RADIUS;
    let w0 = kummer_series(a, c, x)?;
    let dw0 = kummer_series(a + 1.0, c + 1.0, x)?.scale(a / c);
    let (mut w, mut dw) = (w0.value, dw0.value);
    let mut r = SERIES_RADIUS;
    let target = z.norm();
    let mut steps = 0usize;
    while r < target {
        let h = (0.5 * r).min(3.0).min(target - r);
        let (nw, ndw) = ode_step(a, c, x, w, dw, dir * h);
        w = nw;
        dw = ndw;
        r += h;
        x = dir * r;
        steps += 1;
        if steps > 1_000_000 || !w.re.is_finite() || !w.im.is_finite() {
            return Err(Error::NonConvergence {
                op: "specfun::kummer_phi",
                terms: steps,
            });
        }
    }
    let err = (w0.rel_err() + 1e-15 * (steps as f64).sqrt()) * w.norm();
    Ok(ComplexAmplitude::new(w, err))
}

pub fn kummer_phi_real(a: f64, c: f64, z: f64) -> Result<f64> {
    Ok(kummer_phi(Complex64::new(a, 0.0), Complex64::new(c, 0.0), Complex64::new(z, 0.0))?
        .value
        .re)
}

/// Terminating Gauss series ₂F₁(−m, b; c; w).
pub fn hyp2f1_terminating(m: usize, b: Complex64, c: Complex64, w: Complex64) -> Result<ComplexAmplitude> {
    if non_positive_integer(c).is_some_and(|cm| cm < m) {
        return Err(Error::Pole {
            op: "specfun::hyp2f1_terminating",
            at: format!("c = {c}"),
        });
    }
    let a = -(m as f64);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut max_term = 1.0f64;
    for k in 0..m {
        let kf = k as f64;
        term = term * (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * w;
        sum += term;
        max_term = max_term.max(term.norm());
    }
    Ok(ComplexAmplitude::new(sum, EPS * max_term * (m as f64 + 1.0)))
}
