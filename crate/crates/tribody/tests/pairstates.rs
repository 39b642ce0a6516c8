use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tribody::kinematics::{direction, dot, norm, unit, JacobiState, Momenta, SystemConfig, Vec3};
use tribody::pairstates::*;
use tribody::quad::{adaptive, gauss_legendre, AdaptiveOpts, SphereGrid};
use tribody::specfun::{kummer_phi, legendre_p, spherical_harmonic};

fn radial_overlap(a: BoundStateIndex, b: BoundStateIndex, alpha: f64) -> f64 {
    let f = |x: f64| Complex64::new(bound_radial(a, alpha, x).unwrap() * bound_radial(b, alpha, x).unwrap() * x * x, 0.0);
    let upper = 80.0 * a.n.max(b.n) as f64 / alpha.abs();
    adaptive(f, 0.0, upper, AdaptiveOpts::rel(1e-13)).unwrap().value.re
}

#[test]
fn bound_states_are_orthonormal() {
    let alpha = -2.0;
    let ground = BoundStateIndex::new(1, 0, 0).unwrap();
    assert!((radial_overlap(ground, ground, alpha) - 1.0).abs() < 1e-10);
    let s20 = BoundStateIndex::new(2, 0, 0).unwrap();
    assert!(radial_overlap(s20, ground, alpha).abs() < 1e-10);
    for l in 0..3 {
        for n in (l + 1)..=5 {
            for np in (l + 1)..=5 {
                let a = BoundStateIndex::new(n, l, 0).unwrap();
                let b = BoundStateIndex::new(np, l, 0).unwrap();
                let expect = if n == np { 1.0 } else { 0.0 };
                let v = radial_overlap(a, b, alpha);
                assert!((v - expect).abs() < 1e-9, "({n},{l}) ({np},{l}): {v}");
            }
        }
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    let ct: f64 = rng.gen_range(-1.0..1.0);
    let phi: f64 = rng.gen_range(0.0..2.0 * PI);
    direction(ct.acos(), phi)
}

#[test]
fn generating_function_matches_bound_state_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let alpha: f64 = -1.7;
    let mut worst: f64 = 0.0;
    for n in 1..=6usize {
        for _ in 0..100 {
            let r = rng.gen_range(0.0..20.0) * n as f64 / alpha.abs();
            let x = tribody::kinematics::scale(random_unit(&mut rng), r);
            let khat = random_unit(&mut rng);
            let g = generating_function(n, alpha, x, khat).unwrap();
            let sum = generating_function_expansion(n, alpha, x, khat).unwrap();
            worst = worst.max((sum - Complex64::new(g, 0.0)).norm());
        }
    }
    assert!(worst <= 1e-8, "max deviation {worst}");
}

#[test]
fn generating_function_is_continued_coulomb_factor() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let alpha: f64 = -0.9;
    for n in 1..=6usize {
        for _ in 0..20 {
            let x = tribody::kinematics::scale(random_unit(&mut rng), rng.gen_range(0.0..15.0));
            let khat = random_unit(&mut rng);
            let g = generating_function(n, alpha, x, khat).unwrap();
            let arg = alpha.abs() / (2.0 * n as f64) * norm(x) * (1.0 - dot(khat, unit(x)));
            let phi = kummer_phi(
                Complex64::new(1.0 - n as f64, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(arg, 0.0),
            )
            .unwrap()
            .value
            .re;
            let e = (-alpha.abs() * norm(x) / (2.0 * n as f64)).exp() * phi;
            assert!((g - e).abs() <= 1e-10 * e.abs().max(1e-3));
        }
    }
}

#[test]
fn partial_component_matches_projection() {
    let (gamma, k, x, l) = (0.5, 1.0, 2.0, 1usize);
    let rule = gauss_legendre(80);
    let proj: Complex64 = rule
        .mapped(-1.0, 1.0)
        .map(|(t, w)| {
            let phi = kummer_phi(
                Complex64::new(1.0, gamma),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, -k * x * (1.0 - t)),
            )
            .unwrap()
            .value;
            phi * legendre_p(l, t) * w
        })
        .sum::<Complex64>()
        * 0.5;
    let closed = partial_component(gamma, k, x, l).unwrap();
    assert!((closed - proj).norm() < 1e-8, "{closed} vs {proj}");
}

#[test]
fn partial_component_zero_charge() {
    // γ = 0: Φ_0 = Φ(1, 2, −2ikx) = (1 − e^{−2ikx})/(2ikx)
    let (k, x) = (0.8, 1.7);
    let z = Complex64::new(0.0, 2.0 * k * x);
    let expect = (1.0 - (-z).exp()) / z;
    let v = partial_component(0.0, k, x, 0).unwrap();
    assert!((v - expect).norm() < 1e-14);
}

#[test]
fn partial_wave_resummation_converges() {
    let (gamma, k, x) = (0.5, 1.0, 3.0);
    let comps: Vec<Complex64> = (0..=40).map(|l| partial_component(gamma, k, x, l).unwrap()).collect();
    for t in [-0.9, -0.3, 0.2, 0.7] {
        let sum: Complex64 = comps
            .iter()
            .enumerate()
            .map(|(l, c)| c * (2.0 * l as f64 + 1.0) * legendre_p(l, t))
            .sum();
        let exact = kummer_phi(
            Complex64::new(1.0, gamma),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, -k * x * (1.0 - t)),
        )
        .unwrap()
        .value;
        assert!((sum - exact).norm() < 1e-6, "t={t}: {sum} vs {exact}");
    }
}

fn pde_residual(params: &CoulombWaveParams, x: Vec3, h: f64) -> f64 {
    let psi = |p: Vec3| coulomb_wave(params, p).unwrap().value;
    let c = psi(x);
    let mut lap = c * -6.0;
    for axis in 0..3 {
        let mut a = x;
        let mut b = x;
        a[axis] += h;
        b[axis] -= h;
        lap += psi(a) + psi(b);
    }
    lap /= h * h;
    let k2 = dot(params.k, params.k);
    (-lap + c * (params.alpha / norm(x)) - c * k2).norm()
}

#[test]
fn coulomb_wave_solves_the_pair_equation() {
    let params = CoulombWaveParams::new(-1.5, [0.2, -0.3, 1.1]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut pts = Vec::new();
    while pts.len() < 12 {
        let d = random_unit(&mut rng);
        if dot(d, unit(params.k)) > 0.9 {
            continue;
        }
        pts.push(tribody::kinematics::scale(d, rng.gen_range(1.0..5.0)));
    }
    let r1: f64 = pts.iter().map(|&p| pde_residual(&params, p, 0.04)).fold(0.0, f64::max);
    let r2: f64 = pts.iter().map(|&p| pde_residual(&params, p, 0.02)).fold(0.0, f64::max);
    let order = (r1 / r2).log2();
    assert!(order >= 1.8, "observed order {order} ({r1:e} → {r2:e})");
}

#[test]
fn bbk_limits_and_factorization() {
    let neutral = SystemConfig {
        masses: [1.0; 3],
        charges: [0.0; 3],
    };
    let q = Momenta::new(&neutral, [0.3, 0.1, 0.9], [-0.2, 0.5, 0.4]).unwrap();
    let z = JacobiState::new(1, [1.0, -2.0, 0.5], [0.7, 0.3, -1.1]).unwrap();
    let v = bbk_wave(&neutral, &q, &z).unwrap().value;
    let zq = dot(z.x, q.k) + dot(z.y, q.p);
    let expect = Complex64::new(0.0, zq).exp() * (2.0 * PI).powf(-4.5);
    assert!((v - expect).norm() < 1e-15);

    let cfg = SystemConfig::default();
    let q = Momenta::new(&cfg, [0.3, 0.1, 0.9], [-0.2, 0.5, 0.4]).unwrap();
    let f = bbk_factors(&cfg, &q, &z).unwrap();
    let product: f64 = f.d.iter().map(|d| d.value.norm()).product();
    let v = bbk_wave(&cfg, &q, &z).unwrap().value;
    assert!((v.norm() - f.n0.norm() * product).abs() < 1e-14 * v.norm());
}

#[test]
fn bbk_triple_forward_is_plane_wave() {
    let cfg = SystemConfig::default();
    let z = JacobiState::new(1, [1.0, -2.0, 0.5], [0.7, 0.3, -1.1]).unwrap();
    let pairs = z.all_pairings(&cfg).unwrap();
    // Momenta proportional to the configuration make every x_j parallel to its k_j.
    let q = Momenta::new(&cfg, tribody::kinematics::scale(pairs[0].x, 0.4), tribody::kinematics::scale(pairs[0].y, 0.4)).unwrap();
    let f = bbk_factors(&cfg, &q, &z).unwrap();
    for d in &f.d {
        assert!((d.value - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }
    let v = bbk_wave(&cfg, &q, &z).unwrap().value;
    assert!((v - f.n0 * f.plane).norm() < 1e-12 * v.norm());
}

#[test]
fn reconstruction_projections() {
    let grid = SphereGrid::product(64, 128);
    let alpha: f64 = -1.2;
    let n = 4;
    let p1 = reconstruct_r_nlm(|_| Complex64::new(1.0, 0.0), BoundStateIndex::new(n, 1, 0).unwrap(), alpha, &grid).unwrap();
    assert!(p1.value.norm() < 1e-12);

    let idx = BoundStateIndex::new(n, 2, 0).unwrap();
    let p2 = reconstruct_r_nlm(|d| spherical_harmonic(2, 0, d).unwrap(), idx, alpha, &grid).unwrap();
    let expect = beta_coefficient(n, 2) / 120.0 * (alpha.abs() / n as f64).powi(2) / bound_normalization(n, 2, alpha);
    assert!((p2.value - Complex64::new(expect, 0.0)).norm() < 1e-10 * expect.abs());

    let high = BoundStateIndex { n: 2, l: 3, m: 0 };
    let p3 = reconstruct_r_nlm(|d| spherical_harmonic(3, 0, d).unwrap(), high, alpha, &grid).unwrap();
    assert_eq!(p3.value, Complex64::new(0.0, 0.0));
}
