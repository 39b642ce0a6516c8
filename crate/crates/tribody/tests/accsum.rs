use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use tribody::accsum::*;
use tribody::Error;

const B1: f64 = -0.31;
const B2: f64 = -0.63;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn params(r: f64) -> ResumParams {
    ResumParams::from_radius(r, 0.5, -1.0, B1, B2).unwrap()
}

#[test]
fn params_validation() {
    let p = ResumParams::new(200, 50.0, -3.0, B1, B2).unwrap();
    assert_eq!(p.r, (150.0f64).sqrt());
    assert!((p.d - 150.0 / (4.0 * 40000.0)).abs() < 1e-16);
    assert_eq!(p.c_of_r.im, B2 * PI / 4.0);
    assert_eq!(p.d_coef, B2 / 2.0);
    assert!(matches!(ResumParams::new(1, 1.0, -1.0, B1, B2), Err(Error::Domain { .. })));
    assert!(matches!(ResumParams::new(10, 400.0, -1.0, B1, B2), Err(Error::Domain { .. })));
    assert!(matches!(ResumParams::new(10, 10.0, 0.0, B1, B2), Err(Error::Domain { .. })));
    // B₂ ln n + B₁ = 0 at n = e³ ≈ 20 lies above M − 1
    assert!(matches!(ResumParams::new(10, 10.0, -1.0, 3.0, -1.0), Err(Error::Singular { .. })));
    assert!(p.with_delta(0.0).is_err());
}

proptest! {
    #[test]
    fn c_of_r_imaginary_part_is_constant(r in 1.0f64..1e8, b1 in -2.0f64..2.0, b2 in -2.0f64..2.0) {
        prop_assert_eq!(c_of_r(r, b1, b2).im, b2 * PI / 4.0);
    }
}

#[test]
fn theta_literal_matches_smooth_form() {
    let p = params(100.0);
    for n in [p.m, p.m + 1, p.m + 10, 3 * p.m, 40 * p.m] {
        let a = theta_term(&p, n, one()).unwrap().re;
        let b = theta_smooth(&p, n as f64).unwrap();
        assert!((a - b).abs() <= 1e-11 * b.abs().max(1e-300), "n = {n}: {a} vs {b}");
    }
}

#[test]
fn theta_sign_and_domain() {
    let p = params(100.0);
    let r = theta_term(&p, 49, one());
    assert!(matches!(r, Err(Error::Regime { .. })), "n below R/2 must be rejected");
    assert_eq!(theta_term(&p, p.m, Complex64::new(0.0, 0.0)).unwrap(), Complex64::new(0.0, 0.0));
    let u = Complex64::new(0.3, -1.2);
    assert!((theta_term(&p, p.m + 3, u).unwrap() - u * theta_term(&p, p.m + 3, one()).unwrap()).norm() < 1e-25);
}

#[test]
fn theta_amplitude_grows_at_turning_point() {
    // amplitude ∝ (1 − s)^{−1/4} as s = R²/(4u²) → 1, i.e. u → R/2
    let p = params(1000.0);
    let amp = |u: f64| {
        let s = p.s_of(u);
        theta_smooth(&p, u).unwrap().abs() / (p.r * phase_h(s)).cos().abs()
    };
    let us = [500.0 + 1e-6, 500.0 + 1e-4, 500.0 + 1e-2];
    let reg: Vec<f64> = us.iter().map(|&u| amp(u) * (1.0 - p.s_of(u)).powf(0.25)).collect();
    assert!((reg[0] / reg[2] - 1.0).abs() < 1e-4, "{reg:?}");
    assert!(amp(us[0]) > 9.0 * amp(us[2]));
    assert!(theta_smooth(&p, 500.0).is_err());
}

#[test]
fn theta_envelope_exponent() {
    // fixed x, n ≫ R: |Θ|·|B₂ ln n + B₁| ∝ n^{−3}
    let p = ResumParams::new(20, 100.0, -1.0, B1, B2).unwrap();
    let env = |n: f64| {
        let s = p.s_of(n);
        (n / (8.0 * PI)).sqrt() / p.r * s.powf(-0.25) * (1.0 - s).powf(-0.25) / n.powi(4)
    };
    let (n1, n2) = (1e4, 1e6);
    let slope = (env(n2) / env(n1)).ln() / (n2 / n1).ln();
    assert!((slope + 3.0).abs() < 1e-3, "slope {slope}");
    // the smooth form sits under that envelope
    for n in [1e4, 3e4, 1e5] {
        let t = theta_smooth(&p, n).unwrap().abs() * (B2 * n.ln() + B1).abs();
        assert!(t <= env(n) * (1.0 + 1e-12));
    }
}

#[test]
fn direct_sum_properties() {
    let p = params(100.0);
    let a = direct_tail_sum(&p, 64 * p.m, one()).unwrap();
    let b = direct_tail_sum(&p, 128 * p.m, one()).unwrap();
    assert!((a.value - b.value).norm() <= a.tail_bound + b.tail_bound + 1e-15 * a.value.norm(), "{a:?} vs {b:?}");
    assert_eq!(direct_tail_sum(&p, 64 * p.m, Complex64::new(0.0, 0.0)).unwrap().value, Complex64::new(0.0, 0.0));
    // linear in 1/(B₂ ln n + B₁)
    let q = ResumParams::new(p.m, p.x, -1.0, 2.0 * B1, 2.0 * B2).unwrap();
    let c = direct_tail_sum(&q, 64 * p.m, one()).unwrap();
    assert!((c.value * 2.0 - a.value).norm() < 1e-12 * a.value.norm());
    assert!(matches!(direct_tail_sum(&p, p.m, one()), Err(Error::Domain { .. })));
    // an N_max too small for the envelope to certify the tail
    assert!(matches!(direct_tail_sum(&p, p.m + 3, one()), Err(Error::NonConvergence { .. })));
}

#[test]
fn summation_order_invariance() {
    let p = params(300.0);
    let terms: Vec<f64> = (p.m..20 * p.m).map(|n| theta_term(&p, n, one()).unwrap().re).collect();
    let fwd = compensated_sum(terms.iter().copied());
    let rev = compensated_sum(terms.iter().rev().copied());
    assert!((fwd - rev).abs() <= 1e-12 * fwd.abs());
}

#[test]
fn stationary_phase_scan() {
    // l = 0, + branch: brace ≥ π/2
    for s in [1e-4, 0.1, 0.5, 0.9] {
        assert!(phase_derivative(0, Branch::Plus, s) < -PI / 4.0 / s.powf(1.5));
    }
    let scan = phase_no_stationary_check(0.9, 1).unwrap();
    assert!(scan.no_stationary && scan.min_abs > 0.0);
    let scan = phase_no_stationary_check(0.99, 50).unwrap();
    assert!(scan.no_stationary, "{scan:?}");
    let scan = phase_no_stationary_check(0.99, 100).unwrap();
    assert!(scan.no_stationary);
    // the smallest |Φ′| sits at s → 0 on l = 0/−1, where Φ′ → −1/3
    assert!((scan.min_abs - 1.0 / 3.0).abs() < 1e-3, "{scan:?}");
    assert!(phase_no_stationary_check(1.0, 3).is_err());
}

#[test]
fn upsilon_leading_order() {
    let mut devs = Vec::new();
    for r in [1e2, 1e4, 1e6] {
        let p = ResumParams::new(2 * (r as usize), r * r, -1.0, B1, B2).unwrap();
        let u = upsilon_hat(&p).unwrap();
        let ratio = u * p.c_of_r / (Complex64::new(0.0, -3.0) * (Complex64::new(0.0, 2.0 * r)).exp());
        let dev = (ratio - 1.0).norm();
        assert!(dev < 1.5 / r.ln(), "R = {r}: {ratio}");
        devs.push(dev);
    }
    assert!(devs.windows(2).all(|w| w[1] < w[0]), "{devs:?}");
}

#[test]
fn upsilon_constant_denominator() {
    let p = ResumParams::new(100, 1e4, -1.0, 1.7, 0.0).unwrap();
    let u = upsilon_hat(&p).unwrap();
    let exact = Complex64::new(0.0, -1.0) * Complex64::new(0.0, 2.0 * p.r).exp() * 3.0 / p.c_of_r;
    assert!((u - exact).norm() < 1e-12 * exact.norm());
    assert!(matches!(upsilon_integral(Complex64::new(1.0, 0.0), 0.3), Err(Error::Singular { .. })));
}

#[test]
fn upsilon_conjugate_structure() {
    let p = params(100.0);
    let u = upsilon_hat(&p).unwrap();
    let alt = Complex64::new(0.0, 1.0) * Complex64::new(0.0, -2.0 * p.r).exp() * upsilon_integral(p.c_of_r.conj(), p.d_coef).unwrap();
    assert!((u.conj() - alt).norm() < 1e-12 * u.norm());
}

#[test]
fn closed_forms_agree_to_log_order() {
    let p = ResumParams::new(1000, 1e6, -1.0, B1, B2).unwrap();
    let cf = closed_form_psi_acc(&p, one()).unwrap();
    assert!(cf.rel_diff < 2.0 / p.r.ln(), "{cf:?}");
    assert_eq!(closed_form_psi_acc(&p, Complex64::new(0.0, 0.0)).unwrap().leading, Complex64::new(0.0, 0.0));
    // zeros of the leading form at R = mπ/2
    let r0 = 200.0 * PI;
    let q = ResumParams::new(400, r0 * r0, -1.0, B1, B2).unwrap();
    assert!(closed_form_psi_acc(&q, one()).unwrap().leading.norm() < 1e-12 * cf.envelope);
    let small = ResumParams::new(2, 0.5, -1.0, B1, B2).unwrap();
    assert!(matches!(closed_form_psi_acc(&small, one()), Err(Error::Domain { .. })));
}

#[test]
fn poisson_identity_is_exact() {
    // Σ χΘ(n) = Σ_l ∫ χΘ(u)e^{2πilu}du with the prefactor that follows from Θ
    for patch in [Patch::Smooth, Patch::C2] {
        let p = params(100.0).with_patch(patch);
        let direct = direct_patched_sum(&p, 64 * p.m, one()).unwrap().value;
        let pieces = poisson_pieces(&p, one(), 1e-11, 4000).unwrap();
        let tol = if patch == Patch::Smooth { 1e-9 } else { 1e-7 };
        assert!((pieces.total - direct).norm() < tol * direct.norm(), "{patch:?}: {} vs {direct}", pieces.total);
        assert_eq!(pieces.ii, pieces.i.conj());
        assert_eq!(pieces.iv, pieces.iii.conj());
    }
}

#[test]
fn printed_prefactor_ratio() {
    for r in [30.0, 300.0] {
        assert!((poisson_prefactor_as_printed(r) / poisson_prefactor(r) - r * r / 2.0).abs() < 1e-9 * r * r);
    }
}

#[test]
fn leading_poisson_term_is_upsilon() {
    // the l = 0 term tends to Υ̂/(2R); the remainder is the patch-end contribution
    let mut devs = Vec::new();
    for r in [300.0, 1000.0, 3000.0] {
        let p = params(r).with_patch(Patch::Smooth);
        let j0 = poisson_integral(&p, 0).unwrap();
        let u = upsilon_hat(&p).unwrap() / (2.0 * p.r);
        devs.push((j0 - u).norm() / u.norm());
    }
    assert!(devs.windows(2).all(|w| w[1] < w[0]) && devs[2] < 0.1, "{devs:?}");
}

#[test]
fn off_leading_pieces_are_small() {
    let p = params(100.0);
    let pieces = poisson_pieces(&p, one(), 1e-10, 4000).unwrap();
    let main = (pieces.i + pieces.ii).norm();
    assert!(pieces.iii.norm() * 10.0 < main && pieces.iv.norm() * 10.0 < main, "{pieces:?}");
    assert!((pieces.i_leading - pieces.i).norm() < 0.1 * pieces.i.norm());
}

#[test]
fn rescaled_closed_form_tracks_direct_sum() {
    let rs = [30.0, 100.0, 300.0, 1000.0, 3000.0];
    let cc = crosscheck_sweep(&rs, 0.5, -1.0, B1, B2, one()).unwrap();
    let dev: Vec<f64> = cc.iter().map(|c| c.rel_dev_rescaled).collect();
    assert!(dev.windows(2).all(|w| w[1] < w[0]), "{dev:?}");
    assert!(dev[4] < 0.01, "{dev:?}");
    // the printed normalization leaves the direct sum ~R²/2 below the closed form
    for c in &cc {
        assert!(c.direct.norm() < 4.0 / (c.r * c.r) * c.closed.envelope);
    }
}

#[test]
fn zero_crossings_follow_sin_2r() {
    let z = zero_crossing_alignment(1000.0, 1006.0, 600, 0.5, -1.0, B1, B2).unwrap();
    assert_eq!(z.crossings.len(), z.zeros.len());
    assert!(z.max_offset < 0.1, "{z:?}");
}

#[test]
fn sweep_is_deterministic() {
    let a = crosscheck_sweep(&[30.0, 100.0], 0.5, -1.0, B1, B2, one()).unwrap();
    let b = crosscheck_sweep(&[30.0, 100.0], 0.5, -1.0, B1, B2, one()).unwrap();
    assert_eq!(a, b);
}
