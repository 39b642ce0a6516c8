use num_complex::Complex64;
use proptest::prelude::*;
use tribody::omega::*;
use tribody::quad::gauss_legendre;
use tribody::Error;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn constant_g_kernel() -> OmegaKernel {
    OmegaKernel::separable("g=13/6", |_| 1.0, |_| 13.0 / 6.0, |_| c(1.0), BETA)
}

#[test]
fn zero_amplitude_gives_zero() {
    let k = OmegaKernel::new("F=0", |_, _| 1.0, |_, v| 13.0 / 6.0 + v * (1.0 - v), |_, _| c(0.0), BETA);
    assert_eq!(omega_direct(&k, 50).unwrap().value, c(0.0));
    let w = varpi_coefficients(&k).unwrap();
    assert!(w.varpi.iter().all(|x| x.norm() == 0.0));
    assert_eq!(w.upsilon, c(0.0));
}

#[test]
fn dense_grid_oracle_at_n50() {
    // v-integral done analytically, u = s² removes the u^{3/2} branch point;
    // 4000 panels of 8-point Gauss–Legendre in s
    let n = 50.0;
    let a = 4.0 * n * BETA;
    let b = 4.0 * n * 13.0 / 6.0;
    let gl = gauss_legendre(8);
    let panels = 4000;
    let mut oracle = c(0.0);
    for p in 0..panels {
        let (lo, hi) = (p as f64 / panels as f64, (p + 1) as f64 / panels as f64);
        for (s, w) in gl.mapped(lo, hi) {
            let u = s * s;
            let inner = -(-a * u).exp_m1() / (a * u);
            oracle += Complex64::from_polar(1.0, b * u * s) * (2.0 * s * inner * w);
        }
    }
    let k = constant_g_kernel();
    let direct = omega_direct(&k, 50).unwrap().value;
    let contour = omega_contour(&k, 50).unwrap().value;
    assert!(rel(direct, oracle) < 1e-6, "{direct} vs {oracle}");
    assert!(rel(contour, oracle) < 1e-6, "{contour} vs {oracle}");
}

#[test]
fn dense_grid_oracle_u_dependent_amplitude() {
    let g = |v: f64| 13.0 / 6.0 + v * (1.0 - v);
    let k = OmegaKernel::new("F=1+uv", |_, _| 1.0, move |_, v| g(v), |u, v| c(1.0 + u * v), BETA);
    let n = 50.0;
    let gl = gauss_legendre(8);
    let (ps, pv) = (600, 64);
    let mut oracle = c(0.0);
    for i in 0..ps {
        for (s, ws) in gl.mapped(i as f64 / ps as f64, (i + 1) as f64 / ps as f64) {
            let u = s * s;
            for j in 0..pv {
                for (v, wv) in gl.mapped(j as f64 / pv as f64, (j + 1) as f64 / pv as f64) {
                    let amp = (-4.0 * n * BETA * u * v).exp() * (1.0 + u * v) * 2.0 * s * ws * wv;
                    oracle += Complex64::from_polar(amp, 4.0 * n * u * s * g(v));
                }
            }
        }
    }
    let direct = omega_direct(&k, 50).unwrap().value;
    assert!(rel(direct, oracle) < 1e-8, "{direct} vs {oracle}");
}

#[test]
fn magnitude_decreases_with_n() {
    for k in [constant_g_kernel(), OmegaKernel::test(TestKernel::One)] {
        let mags: Vec<f64> = [25, 50, 100, 200].iter().map(|&n| omega_direct(&k, n).unwrap().value.norm()).collect();
        assert!(mags.windows(2).all(|w| w[1] < w[0]), "{}: {mags:?}", k.name);
    }
}

#[test]
fn contour_route_matches_direct() {
    for which in [TestKernel::One, TestKernel::V, TestKernel::OneMinusV] {
        let k = OmegaKernel::test(which);
        for n in [50, 400] {
            let d = omega_direct(&k, n).unwrap().value;
            let r = omega_contour(&k, n).unwrap().value;
            assert!(rel(r, d) < 1e-9, "{} n={n}: {r} vs {d}", k.name);
        }
    }
}

#[test]
fn j_integral_against_dense_sum() {
    // b beyond the real-axis threshold, so the contour path is exercised
    let (a, b) = (10.0, 5000.0);
    let gl = gauss_legendre(8);
    let panels = 20_000;
    let mut oracle = c(0.0);
    for p in 0..panels {
        for (s, w) in gl.mapped(p as f64 / panels as f64, (p + 1) as f64 / panels as f64) {
            let u = s * s;
            oracle += Complex64::from_polar((-a * u).exp() * 2.0 * s * w, b * u * s);
        }
    }
    let j = j_integral(a, b).unwrap().value;
    assert!(rel(j, oracle) < 1e-9, "{j} vs {oracle}");
    assert_eq!(j_integral(0.0, 0.0).unwrap().value, c(1.0));
    assert!((j_integral(2.0, 0.0).unwrap().value.re - (1.0 - (-2.0f64).exp()) / 2.0).abs() < 1e-16);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn j_integral_bounded_and_conjugate(a in 0.0f64..200.0, lb in -2.0f64..7.0) {
        let b = 10f64.powf(lb);
        let j = j_integral(a, b).unwrap().value;
        let bound = if a == 0.0 { 1.0 } else { -(-a).exp_m1() / a };
        prop_assert!(j.norm() <= bound * (1.0 + 1e-9));
        let jc = j_integral(a, -b).unwrap().value;
        prop_assert!((jc - j.conj()).norm() <= 1e-15 * j.norm().max(1e-300));
    }
}

#[test]
fn first_coefficient_matches_series() {
    // ϖ₁ = ∫₀¹ (1 − e^{−cv})/(cv) dv = Ein(c)/c for f ≡ 1, F ≡ 1, c = 4β
    let cc = 4.0 * BETA;
    let mut ein = 0.0;
    let mut term = 1.0;
    for k in 1..30 {
        term *= cc / k as f64;
        ein += if k % 2 == 1 { term } else { -term } / k as f64;
    }
    let w = varpi_coefficients(&OmegaKernel::test(TestKernel::One)).unwrap();
    assert!((w.varpi[0] - c(ein / cc)).norm() < 1e-13, "{} vs {}", w.varpi[0], ein / cc);
}

#[test]
fn upsilon_is_inverse_twelve_beta() {
    let w = varpi_coefficients(&OmegaKernel::test(TestKernel::One)).unwrap();
    assert!((w.upsilon - c(1.0 / (12.0 * BETA))).norm() < 1e-10);
    let w = varpi_coefficients(&OmegaKernel::test(TestKernel::V)).unwrap();
    assert!(w.upsilon.norm() < 1e-12);
    assert_eq!(w.d2(), w.upsilon);
}

#[test]
fn synthetic_fit_is_exact() {
    let grid = [50u64, 100, 200, 400, 800];
    let samples: Vec<Complex64> = grid.iter().map(|&n| c(2.0 + 3.0 * (n as f64).ln())).collect();
    let (d1, d2, res) = fit_samples(&grid, &samples).unwrap();
    assert!((d1 - c(2.0)).norm() < 1e-12);
    assert!((d2 - c(3.0)).norm() < 1e-12);
    assert!(res < 1e-14);
    assert!(matches!(fit_samples(&grid[..3], &samples[..3]), Err(Error::Domain { .. })));
    let narrow = fit_expansion(&OmegaKernel::test(TestKernel::One), &[100, 120, 140, 160]).unwrap();
    assert!(narrow.ill_conditioned);
}

#[test]
fn fit_matches_coefficient_formulas() {
    let grid = [1_000_000_000_000u64, 10_000_000_000_000, 100_000_000_000_000, 1_000_000_000_000_000, 10_000_000_000_000_000];
    for which in [TestKernel::One, TestKernel::V, TestKernel::OneMinusV] {
        let k = OmegaKernel::test(which);
        let w = varpi_coefficients(&k).unwrap();
        let e = fit_expansion(&k, &grid).unwrap();
        let scale = w.d1().norm().hypot(w.d2().norm());
        assert!(rel(e.d1, w.d1()) <= 0.05, "{}: {} vs {}", k.name, e.d1, w.d1());
        assert!((e.d2 - w.d2()).norm() <= 0.05 * scale, "{}: {} vs {}", k.name, e.d2, w.d2());
        assert!(!e.ill_conditioned);
    }
}

#[test]
fn residual_shrinks_as_grid_moves_out() {
    let k = OmegaKernel::test(TestKernel::V);
    let low = fit_expansion(&k, &[100_000_000, 1_000_000_000, 10_000_000_000, 100_000_000_000]).unwrap();
    let high = fit_expansion(&k, &[10_000_000_000_000, 100_000_000_000_000, 1_000_000_000_000_000, 10_000_000_000_000_000]).unwrap();
    assert!(high.fit_residual < 0.5 * low.fit_residual, "{} vs {}", high.fit_residual, low.fit_residual);
}

#[test]
fn real_phase_kernel_has_closed_form() {
    // g ≡ 0: nΩ_n = 4(ln(n/4) + γ + E₁(n/4)), so D₂ = 4, D₁ = 4(γ − ln 4) and B = D
    let k = OmegaKernel::separable("g=0", |_| 1.0, |_| 0.0, |_| c(1.0), BETA);
    let e = fit_expansion(&k, &[1000, 10_000, 100_000, 1_000_000]).unwrap();
    assert!((e.d2 - c(4.0)).norm() < 1e-9, "{}", e.d2);
    assert!((e.d1 - c(4.0 * (EULER_GAMMA - 4f64.ln()))).norm() < 1e-8, "{}", e.d1);
    assert_eq!((e.b1, e.b2), (e.d1.re, e.d2.re));
    let direct = omega_direct(&k, 1000).unwrap().value * 1000.0;
    assert!((direct - c(4.0 * (250f64.ln() + EULER_GAMMA))).norm() < 1e-9);
}

#[test]
fn derived_kernel_regression() {
    let p = derived_kernel();
    let table = [
        (0.5, 0.5, 0.979_258_716_114_689_3, 0.010_351_798_854_095_969, 0.399_376_882_985_653_8),
        (1.0, 1.0, 0.979_339_504_877_018_3, 0.010_287_230_697_898_5, 0.334_682_005_097_601_5),
        (1e-3, 0.2, 0.999_945_833_548_610_8, 0.010_416_692_710_714_363, 0.456_412_579_400_216_8),
        (0.9, 0.01, 0.944_135_454_685_111, 0.010_588_962_269_436_662, 0.469_895_891_132_887_55),
        (0.04, 0.97, 0.999_116_988_587_912_5, 0.010_411_092_621_670_679, 0.355_507_593_747_013_5),
        (1e-8, 0.5, 0.999_999_999_583_333_3, 0.010_416_666_665_364_583, 0.408_248_290_286_671_9),
    ];
    for (u, v, f, g, big_f) in table {
        assert!(((p.f)(u, v) - f).abs() < 1e-14 * f, "f({u},{v})");
        assert!(((p.g)(u, v) - g).abs() < 1e-13 * g, "g({u},{v}) = {}", (p.g)(u, v));
        assert!(((p.big_f)(u, v).re - big_f).abs() < 1e-13 * big_f, "F({u},{v})");
    }
    assert_eq!(p.beta, 1.0 / 16.0);
}

#[test]
fn derived_kernel_leading_forms() {
    let p = derived_kernel();
    for i in 0..=20 {
        let v = i as f64 / 20.0;
        assert!(((p.f)(0.0, v) - 1.0).abs() < 1e-15);
        // the derived phase is v-independent at u = 0, not 13/6 + v(1 − v)
        assert!(((p.g)(0.0, v) - 1.0 / 96.0).abs() < 1e-17);
        assert!(((p.big_f)(0.0, v).re - 0.5 / (1.0 + v).sqrt()).abs() < 1e-15);
    }
}

#[test]
fn derived_kernel_invariants() {
    let p = derived_kernel();
    for i in 0..=40 {
        for j in 0..=40 {
            let (u, v) = (i as f64 / 40.0, j as f64 / 40.0);
            assert!((p.f)(u, v) >= 0.0);
        }
    }
    // 1 + φ = f/(1 − βu(1 − v)), φ = O(uv) on a shrinking grid
    for k in 1..=6 {
        let h = 10f64.powi(-k);
        for (u, v) in [(h, h), (h, 1.0), (1.0, h), (h, 0.5)] {
            let phi = (p.f)(u, v) / (1.0 - BETA * u * (1.0 - v)) - 1.0;
            assert!(phi.abs() <= u * v / 47.0, "φ({u},{v}) = {phi}");
        }
    }
}

#[test]
fn derived_kernel_constants() {
    let b = compute_b(&derived_kernel()).unwrap();
    assert!((b.b1 - 1.096_721_192_0).abs() < 1e-8, "{}", b.b1);
    assert!((b.b2 - 2.0 / 3.0).abs() < 1e-9, "{}", b.b2);
    assert!((b.d1 - b.d1_conjugate.conj()).norm() < 1e-10);
}

#[test]
fn derived_kernel_follows_two_term_form() {
    let e = fit_expansion(&derived_kernel(), &[1000, 3000, 10_000, 30_000, 100_000]).unwrap();
    assert!(e.fit_residual <= 0.02, "{}", e.fit_residual);
    assert!((e.d2.re - 2.0 / 3.0).abs() < 0.02, "{}", e.d2);
}

#[test]
fn u_remainder_decays_like_n_to_minus_four_thirds() {
    let k = OmegaKernel::new("F=1+u", |_, _| 1.0, |_, v| 13.0 / 6.0 + v * (1.0 - v), |u, _| c(1.0 + u), BETA);
    let ns = [100u64, 200, 400, 800];
    let r: Vec<f64> = ns.iter().map(|&n| remainder_scaled(&k, n, 4.0 / 3.0).unwrap()).collect();
    let (lo, hi) = r.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    assert!(hi / lo < 1.3, "{r:?}");
    // n² times the same remainder keeps growing
    let r2: Vec<f64> = ns.iter().zip(&r).map(|(&n, x)| x * (n as f64).powf(2.0 / 3.0)).collect();
    assert!(r2.windows(2).all(|w| w[1] > 1.3 * w[0]), "{r2:?}");
}

#[test]
fn direct_is_reproducible() {
    let k = OmegaKernel::test(TestKernel::OneMinusV);
    let a = omega_direct(&k, 200).unwrap().value;
    let b = omega_direct(&k, 200).unwrap().value;
    assert_eq!(a, b);
    let finer = omega_direct_with(&k, 200, OmegaOpts { phase_per_panel: 0.5, ..OmegaOpts::default() }).unwrap().value;
    assert!(rel(finer, a) < 1e-9);
}

#[test]
fn error_paths() {
    let k = OmegaKernel::test(TestKernel::One);
    assert!(matches!(omega_direct(&k, 0), Err(Error::Domain { .. })));
    let u_dep = OmegaKernel::new("u", |_, _| 1.0, |_, _| 1.0, |u, _| c(u), BETA);
    assert!(matches!(omega_contour(&u_dep, 10), Err(Error::Unsupported { .. })));
    let flat = OmegaKernel::separable("f=0", |_| 0.0, |_| 1.0, |_| c(1.0), BETA);
    assert!(matches!(varpi_coefficients(&flat), Err(Error::Singular { .. })));
}
