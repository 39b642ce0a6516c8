use std::f64::consts::PI;
use std::time::Instant;

use tribody::kinematics::direction;
use tribody::normint::*;

const Z: [f64; 3] = [0.0, 0.0, 1.0];

#[test]
fn ground_state_overlap_is_gamma_integral() {
    // L_0 = 1: n³/|α|³ · 4π · Γ(3)
    let alpha: f64 = -1.3;
    let v = sigma_direct(1, alpha, direction(0.7, 0.2), Z).unwrap();
    let expect = 8.0 * PI / alpha.abs().powi(3);
    assert!((v.value.re - expect).abs() < 1e-11 * expect, "{} vs {expect}", v.value.re);
}

#[test]
fn direct_is_symmetric_and_positive_on_axis() {
    let (a, b) = (direction(0.4, 0.1), direction(1.1, 2.0));
    let ab = sigma_direct(7, -1.0, a, b).unwrap().value.re;
    let ba = sigma_direct(7, -1.0, b, a).unwrap().value.re;
    assert!((ab - ba).abs() < 1e-10 * ab.abs().max(1.0));
    assert!(sigma_direct(7, -1.0, a, a).unwrap().value.re > 0.0);
}

#[test]
fn direct_matches_brute_force_small_n() {
    // independent route: quadrature over x, radial adaptive with the bound-state-like integrand
    use num_complex::Complex64;
    use tribody::kinematics::dot;
    use tribody::quad::{adaptive, AdaptiveOpts, SphereGrid};
    use tribody::specfun::laguerre;
    let n = 3;
    let (k1, k2) = (direction(0.9, 0.4), Z);
    let grid = SphereGrid::product(24, 48);
    let v = grid.integrate(|x| {
        let a = 0.5 * (1.0 - dot(x, k1));
        let b = 0.5 * (1.0 - dot(x, k2));
        adaptive(
            |t| Complex64::new(t * t * (-t).exp() * laguerre(n - 1, a * t) * laguerre(n - 1, b * t), 0.0),
            0.0,
            120.0,
            AdaptiveOpts::rel(1e-13),
        )
        .unwrap()
        .value
    });
    let direct = sigma_direct(n, -1.0, k1, k2).unwrap().value.re / (n as f64).powi(3);
    assert!((direct - v.re).abs() < 1e-10 * v.re.abs());
}

#[test]
fn phase_limits() {
    let p = PhasePoint {
        theta: 1.0,
        phi: 0.5,
        theta_kprime: 0.7,
        phi_kprime: 0.0,
        s: 1e-12,
    };
    assert!((phase_function(p).unwrap() - 2.0 * PI).abs() < 1e-5);
    let st = PhasePoint::stationary(0.9, 0.2, 0.5);
    assert!((st.theta_tilde() - st.theta).abs() < 1e-7);
    assert!((phase_function(st).unwrap() - stationary_phase_value(0.9, 0.5)).abs() < 1e-12);
}

#[test]
fn stationary_point_sweep() {
    for &tk in &[0.2, 0.8, 1.5, 2.4] {
        for &s in &[0.2, 0.5, 0.8] {
            let h = hessian_check(tk, s).unwrap();
            assert!(h.gradient[0].hypot(h.gradient[1]) <= 1e-6, "θk={tk} s={s}: {:?}", h.gradient);
            assert!(h.max_rel_deviation() <= 1e-4, "θk={tk} s={s}: {h:?}");
            assert_eq!(h.signature, 2);
            assert!(!h.degenerate);
            let prod = h.analytic[0][0] * h.analytic[1][1];
            assert!((prod - h.analytic_det).abs() < 1e-12 * prod);
        }
    }
    assert_eq!(hessian_check(PI / 3.0, 0.7).unwrap().signature, 2);
    assert!(hessian_check(1e-7, 0.5).unwrap().degenerate);
}

#[test]
fn rejected_candidate_leaves_polar_range() {
    for &tk in &[1e-3, 0.5, 1.5, 3.0] {
        let [bad, good] = stationary_candidates(tk);
        assert!(!in_polar_range(bad.0));
        assert!(in_polar_range(good.0));
    }
}

#[test]
fn stationary_decay_with_angle() {
    for n in [20usize, 40, 80] {
        let near = sigma_stationary(n, -1.0, 0.05).unwrap().norm();
        let far = sigma_stationary(n, -1.0, 0.6).unwrap().norm();
        assert!(far < near, "n={n}: {far} vs {near}");
    }
    assert!(sigma_stationary(10, -1.0, 0.0).is_err());
}

#[test]
fn stationary_matches_direct_in_magnitude() {
    let t = Instant::now();
    let n = 60;
    let direct = sigma_direct(n, -1.0, direction(0.3, 0.0), Z).unwrap().value.re;
    let stat = sigma_stationary(n, -1.0, 0.3).unwrap().value.im;
    let ratio = direct / stat;
    eprintln!("n=60 θ=0.3: direct {direct:e} stationary {stat:e} ratio {ratio:.3} ({:?})", t.elapsed());
    assert!((0.5..=2.0).contains(&ratio));
}

#[test]
fn overlap_concentrates_with_n() {
    let mut last = f64::INFINITY;
    let mut widths = Vec::new();
    for n in [20usize, 40, 80] {
        let t = Instant::now();
        let on = sigma_direct(n, -1.0, Z, Z).unwrap().value.re;
        // walk out in 2.5° steps until the profile drops below one half
        let mut angles = vec![0.0];
        let mut profile = vec![1.0];
        while *profile.last().unwrap() >= 0.5 {
            let a = angles.len() as f64 * PI / 72.0;
            let p = sigma_direct(n, -1.0, direction(a, 0.0), Z).unwrap().value.re / on;
            assert!(p < *profile.last().unwrap(), "n={n}: profile not decreasing at {a}");
            angles.push(a);
            profile.push(p);
        }
        let ratio30 = sigma_direct(n, -1.0, direction(PI / 6.0, 0.0), Z).unwrap().value.re / on;
        assert!(ratio30 < last, "n={n}: {ratio30} !< {last}");
        last = ratio30;
        let k = profile.len() - 1;
        let w = angles[k - 1] + (angles[k] - angles[k - 1]) * (profile[k - 1] - 0.5) / (profile[k - 1] - profile[k]);
        eprintln!("n={n} ratio30={ratio30:.4} half-width={w:.4} ({:?})", t.elapsed());
        widths.push(w);
    }
    assert!(widths.windows(2).all(|w| w[1] < w[0]), "{widths:?}");
}
