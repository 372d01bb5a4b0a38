use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::qmath::C64;

fn small_budget() -> Budget {
    Budget { starts: 4, iterations: 150 }
}

/// Largest |eigenvalue| of a 2×2 Hermitian matrix.
fn eig_norm(m: &ComplexMatrix) -> f64 {
    let (a, d) = (m.get(0, 0).re, m.get(1, 1).re);
    let b = m.get(0, 1).norm();
    let r = (((a - d) / 2.0).powi(2) + b * b).sqrt();
    ((a + d) / 2.0 + r).abs().max(((a + d) / 2.0 - r).abs())
}

fn brute_effect(s: &FiniteStrategy, j: usize) -> ComplexMatrix {
    let mut f = ComplexMatrix::zeros(2);
    for x in 0..s.atoms.len() {
        for m in 0..s.messages() {
            let e = s.effects[m][x].effect();
            f = &f + &e.matrix().scale(s.atoms[x] * s.encoder[j][x][m]);
        }
    }
    f
}

#[test]
fn halton_grids_are_nested_and_antipodal_free() {
    let big = TargetFamily::halton(32).unwrap();
    let small = TargetFamily::halton(9).unwrap();
    assert_eq!(&big.grid()[..9], small.grid());
    assert!(big.is_antipodal_free());
    assert_eq!(big.prefix(9).unwrap(), small);
    assert!(TargetFamily::new(vec![BlochVector::new(0.0, 0.0, 1.0); 2]).is_err());
}

#[test]
fn single_state_is_exact() {
    let t = TargetFamily::new(vec![BlochVector::new(0.0, 0.0, 1.0)]).unwrap();
    let s = FiniteStrategy::new(
        vec![1.0],
        vec![vec![vec![1.0]]],
        vec![vec![RankOneEffect::new(0.5, BlochVector::new(0.0, 0.0, -1.0)).unwrap()]],
    )
    .unwrap();
    assert!(strategy_error(&s, &t).unwrap() < 1e-15);
    let diff = effective_effect(&s, 0).unwrap().matrix().max_abs_diff(t.target_effect(0).matrix());
    assert!(diff < 1e-15);
}

#[test]
fn uniform_encoder_with_identical_effects() {
    let e = RankOneEffect::new(0.7, BlochVector::new(0.6, 0.0, 0.8)).unwrap();
    let s = FiniteStrategy::new(vec![0.5, 0.5], vec![vec![vec![1.0 / 3.0; 3]; 2]; 4], vec![vec![e; 2]; 3]).unwrap();
    for j in 0..4 {
        assert!(effective_effect(&s, j).unwrap().matrix().max_abs_diff(e.effect().matrix()) < 1e-14);
    }
}

#[test]
fn effective_effect_matches_double_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let s = FiniteStrategy::random(&mut rng, 5, 3, 4);
        s.validate().unwrap();
        for j in 0..5 {
            assert!(effective_effect(&s, j).unwrap().matrix().max_abs_diff(&brute_effect(&s, j)) < 1e-14);
        }
    }
}

#[test]
fn error_matches_eigenvalue_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let t = TargetFamily::halton(6).unwrap();
    for _ in 0..20 {
        let s = FiniteStrategy::random(&mut rng, 6, 2, 3);
        let errs = state_errors(&s, &t).unwrap();
        for (j, e) in errs.iter().enumerate() {
            let d = &brute_effect(&s, j) - t.target_effect(j).matrix();
            assert!((e - eig_norm(&d)).abs() < 1e-13);
        }
    }
}

#[test]
fn zero_effects_give_half() {
    let t = TargetFamily::halton(3).unwrap();
    let zero = RankOneEffect::new(0.0, BlochVector::new(1.0, 0.0, 0.0)).unwrap();
    let s = FiniteStrategy::new(vec![1.0], vec![vec![vec![1.0]]; 3], vec![vec![zero]]).unwrap();
    assert!((strategy_error(&s, &t).unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn exact_when_messages_cover_grid() {
    for (m, n) in [(1, 1), (2, 2), (4, 3), (4, 4)] {
        let t = TargetFamily::halton(n).unwrap();
        let r = optimize(&t, m, 1, 5, small_budget()).unwrap();
        assert!(r.best_error < EXACT_TOL, "{m} {n}: {}", r.best_error);
        let v = counting_bound(&r.strategy, &t).unwrap();
        assert!(v.validated, "{v:?}");
        for mass in v.masses {
            assert!((mass - 0.5).abs() < 1e-12 || mass >= 0.5);
        }
    }
}

#[test]
fn explicit_construction_masses_are_half() {
    let t = TargetFamily::halton(4).unwrap();
    let s = FiniteStrategy::explicit(&t, 4, 2).unwrap();
    let v = counting_bound(&s, &t).unwrap();
    assert!(v.validated);
    assert!(v.masses.iter().all(|&m| (m - 1.0).abs() < 1e-15));
    assert!(FiniteStrategy::explicit(&t, 3, 1).is_err());
}

#[test]
fn shared_support_is_flagged() {
    let t = TargetFamily::halton(2).unwrap();
    let e = RankOneEffect::new(0.5, t.grid()[0].scale(-1.0)).unwrap();
    let s = FiniteStrategy::new(vec![1.0], vec![vec![vec![1.0]]; 2], vec![vec![e]]).unwrap();
    let v = counting_bound(&s, &t).unwrap();
    assert!(!v.exact && !v.validated);
    assert!(v.violations.contains(&Violation::SharedSupport { message: 0, atom: 0, states: (0, 1) }));
}

#[test]
fn beyond_twice_messages_has_floor() {
    let t = TargetFamily::halton(3).unwrap();
    let r = optimize(&t, 1, 4, 7, small_budget()).unwrap();
    assert!(r.best_error > 1e-8, "{}", r.best_error);
    let v = counting_bound(&r.strategy, &t).unwrap();
    assert!(!v.validated);
}

/// Smallest enclosing ball radius of three points.
fn enclosing_radius(p: [BlochVector; 3]) -> f64 {
    let (a, b) = (p[1].sub(p[0]), p[2].sub(p[0]));
    let sides = [a.norm(), b.norm(), p[2].sub(p[1]).norm()];
    let cross = a.cross(b).norm();
    let circum = sides[0] * sides[1] * sides[2] / (2.0 * cross);
    let acute = (0..3).all(|i| {
        let s2: f64 = (0..3).filter(|&k| k != i).map(|k| sides[k] * sides[k]).sum();
        s2 >= sides[i] * sides[i]
    });
    if acute { circum } else { sides.iter().cloned().fold(0.0, f64::max) / 2.0 }
}

#[test]
fn single_message_floor_matches_enclosing_ball() {
    // With one message the effect is constant and the best error is R/4.
    let t = TargetFamily::halton(3).unwrap();
    let r = optimize(&t, 1, 4, 2, Budget::default()).unwrap();
    let want = enclosing_radius([t.grid()[0], t.grid()[1], t.grid()[2]]) / 4.0;
    assert!(r.best_error >= want - 1e-12);
    assert!(r.best_error < want + 1e-3, "{} vs {want}", r.best_error);
}

#[test]
fn optimisation_is_deterministic() {
    let t = TargetFamily::halton(5).unwrap();
    let a = optimize(&t, 2, 2, 11, small_budget()).unwrap();
    let b = optimize(&t, 2, 2, 11, small_budget()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn sweep_is_monotone() {
    let reports = floor_sweep(&[1, 2], 3, Budget { starts: 2, iterations: 100 }).unwrap();
    let get = |m: usize, n: usize| reports.iter().find(|r| r.messages == m && r.states == n).unwrap().best_error;
    assert!(get(1, 3) <= get(1, 4) && get(1, 4) <= get(1, 8));
    assert!(get(2, 5) <= get(2, 8) && get(2, 8) <= get(2, 16));
    assert!(get(2, 8) <= get(1, 8));
    assert!(reports.iter().all(|r| r.best_error > 1e-8));
}

#[test]
fn embedding_preserves_effects() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let s = FiniteStrategy::random(&mut rng, 6, 2, 2);
    let e = s.embed(3, 6).unwrap();
    for j in 0..6 {
        assert!(effective_effect(&s, j).unwrap().matrix().max_abs_diff(effective_effect(&e, j).unwrap().matrix()) < 1e-14);
    }
    let r = s.restrict(4).unwrap();
    assert_eq!(r.states(), 4);
    assert!(s.embed(1, 2).is_err());
    assert!(s.embed(2, 3).is_err());
}

#[test]
fn malformed_strategies_rejected() {
    let e = RankOneEffect::new(0.5, BlochVector::new(0.0, 0.0, 1.0)).unwrap();
    assert!(FiniteStrategy::new(vec![1.0], vec![vec![vec![0.5, 0.6]]], vec![vec![e]; 2]).is_err());
    assert!(FiniteStrategy::new(vec![0.5, 0.5], vec![vec![vec![1.0]]], vec![vec![e]]).is_err());
    assert!(RankOneEffect::new(1.5, BlochVector::new(0.0, 0.0, 1.0)).is_err());
    assert!(RankOneEffect::new(0.5, BlochVector::new(0.0, 0.0, 0.5)).is_err());
}

#[test]
fn report_serde_round_trip() {
    let t = TargetFamily::halton(3).unwrap();
    let r = optimize(&t, 1, 1, 1, Budget { starts: 1, iterations: 5 }).unwrap();
    let json = serde_json::to_string(&r).unwrap();
    let back: WitnessReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, r);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn effective_effect_is_affine(seed in any::<u64>(), t in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = FiniteStrategy::random(&mut rng, 2, 3, 2);
        let mut b = a.clone();
        b.encoder = FiniteStrategy::random(&mut rng, 2, 3, 2).encoder;
        let mut mix = a.clone();
        for j in 0..2 {
            for x in 0..2 {
                for m in 0..3 {
                    mix.encoder[j][x][m] = t * a.encoder[j][x][m] + (1.0 - t) * b.encoder[j][x][m];
                }
            }
        }
        let c = C64::new(t, 0.0);
        for j in 0..2 {
            let lhs = effective_effect(&mix, j).unwrap().matrix().clone();
            let fa = effective_effect(&a, j).unwrap().matrix().clone();
            let fb = effective_effect(&b, j).unwrap().matrix().clone();
            let rhs = ComplexMatrix::from_inner(fa.inner() * c + fb.inner() * (C64::new(1.0, 0.0) - c));
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-8);
        }

        let mut w = a.clone();
        w.effects[1][0].weight *= t;
        let mut zero = a.clone();
        zero.effects[1][0].weight = 0.0;
        for j in 0..2 {
            let f = effective_effect(&w, j).unwrap().matrix().clone();
            let f0 = effective_effect(&zero, j).unwrap().matrix().clone();
            let f1 = effective_effect(&a, j).unwrap().matrix().clone();
            let rhs = ComplexMatrix::from_inner(f0.inner() * (C64::new(1.0, 0.0) - c) + f1.inner() * c);
            prop_assert!(f.max_abs_diff(&rhs) < 1e-8);
        }
    }
}
