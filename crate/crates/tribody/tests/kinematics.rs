use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tribody::kinematics::*;

fn vec3() -> impl Strategy<Value = Vec3> {
    prop::array::uniform3(-50.0f64..50.0)
}

proptest! {
    #[test]
    fn pairing_round_trip(x in vec3(), y in vec3()) {
        let cfg = SystemConfig::default();
        let s = JacobiState::new(1, x, y).unwrap();
        let back = s.to_pairing(2, &cfg).unwrap().to_pairing(3, &cfg).unwrap().to_pairing(1, &cfg).unwrap();
        for k in 0..3 {
            prop_assert!((back.x[k] - x[k]).abs() <= 1e-13 * (1.0 + norm(x) + norm(y)));
            prop_assert!((back.y[k] - y[k]).abs() <= 1e-13 * (1.0 + norm(x) + norm(y)));
        }
    }

    #[test]
    fn pairing_preserves_norm(x in vec3(), y in vec3(), target in 1usize..4) {
        let cfg = SystemConfig::default();
        let s = JacobiState::new(1, x, y).unwrap();
        let t = s.to_pairing(target, &cfg).unwrap();
        prop_assert!((t.z_squared() - s.z_squared()).abs() <= 1e-14 * s.z_squared().max(1.0) * 4.0);
    }

    #[test]
    fn pair_separations_sum_to_zero(x in vec3(), y in vec3()) {
        let cfg = SystemConfig::default();
        let all = JacobiState::new(1, x, y).unwrap().all_pairings(&cfg).unwrap();
        let s = add(add(all[0].x, all[1].x), all[2].x);
        prop_assert!(norm(s) <= 1e-13 * (1.0 + norm(x) + norm(y)));
    }

    #[test]
    fn charge_flip_flips_couplings(z in prop::array::uniform3(-4.0f64..4.0), which in 0usize..3) {
        let cfg = SystemConfig { masses: [1.0; 3], charges: z };
        let mut flipped = cfg.clone();
        flipped.charges[which] = -flipped.charges[which];
        let a = couplings(&cfg).unwrap().alpha;
        let b = couplings(&flipped).unwrap().alpha;
        for l in 0..3 {
            // α_l contains charge i iff i ≠ l
            let sign = if l == which { 1.0 } else { -1.0 };
            prop_assert!((b[l] - sign * a[l]).abs() < 1e-15);
        }
    }
}

#[test]
fn identity_pairing() {
    let cfg = SystemConfig::default();
    let s = JacobiState::new(2, [1.0, 2.0, 3.0], [4.0, 5.0, 6.0]).unwrap();
    assert_eq!(s.to_pairing(2, &cfg).unwrap(), s);
}

#[test]
fn neutral_couplings_vanish() {
    let cfg = SystemConfig {
        masses: [1.0; 3],
        charges: [0.0; 3],
    };
    let c = couplings(&cfg).unwrap();
    assert_eq!(c.alpha, [0.0; 3]);
}

#[test]
fn momenta_bookkeeping() {
    let cfg = SystemConfig::default();
    let q = Momenta::new(&cfg, [0.3, 0.4, 0.0], [0.0, 0.0, 1.2]).unwrap();
    assert!((q.energy - (0.25 + 1.44)).abs() < 1e-15);
    let c = couplings(&cfg).unwrap();
    for j in 0..3 {
        assert!((q.eta[j] * 2.0 * norm(q.k_pair[j]) - c.alpha[j]).abs() < 1e-14);
        let e = dot(q.k_pair[j], q.k_pair[j]) + dot(q.p_pair[j], q.p_pair[j]);
        assert!((e - q.energy).abs() < 1e-14);
    }
    assert!((q.omega - q.eta[1] - q.eta[2]).abs() < 1e-15);
    let p5 = q.p_prime(5, c.alpha[0]);
    assert!((p5 - (q.energy + 36.0 / 100.0).sqrt()).abs() < 1e-15);
}

#[test]
fn domain_intersection_agrees() {
    let spec = DomainSpec::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10_000 {
        let y: f64 = 10f64.powf(rng.gen_range(-1.0..5.0));
        let x: f64 = y * rng.gen_range(0.0..1.2);
        let inter = in_domain_radii(x, y, spec, Domain::OmegaMu) && in_domain_radii(x, y, spec, Domain::OmegaPlus);
        assert_eq!(in_domain_radii(x, y, spec, Domain::OmegaMuNu), inter, "x={x} y={y}");
    }
}
