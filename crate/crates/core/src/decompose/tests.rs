use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::qmath::catalog::{catalog_product, ket_alpha, ket_beta_perp, ket_z, ket_z_perp, tb_grouping, CatalogName};
use crate::qmath::measure::{born, coarse_grain, product_povm};
use crate::qmath::random::{haar_state, random_povm};
use crate::qmath::{bloch_to_density, BlochVector};

fn tb() -> Vec<ProductRank1Effect> {
    catalog_product(CatalogName::Tb).unwrap()
}

fn tb_family() -> ExtremalFamily {
    ExtremalFamily::for_joint(&tb()).unwrap()
}

/// Closed-form twisted-butterfly mixture weights.
fn closed_form_mu(psi: BlochVector) -> [f64; 4] {
    let r = 2.0 * 2f64.sqrt();
    let mu1 = ((1.0 - r * psi.x + 3.0 * psi.z) / 8.0).max(0.0);
    let mu2 = 0.5 * (1.0 + psi.z) - mu1;
    let mu3 = 0.75 * (1.0 - r / 3.0 * psi.x + psi.z / 3.0) - 2.0 * mu1;
    let mu4 = 0.75 * (1.0 + r / 3.0 * psi.x + psi.z / 3.0) - 2.0 * mu2;
    [mu1, mu2, mu3, mu4]
}

fn xz_state(theta: f64) -> DensityMatrix {
    bloch_to_density(BlochVector::new(theta.sin(), 0.0, theta.cos())).unwrap()
}

#[test]
fn tb_family_has_four_extremals() {
    let f = tb_family();
    let supports: Vec<Vec<usize>> = f.extremals().iter().map(|e| e.support.clone()).collect();
    assert_eq!(supports, vec![vec![0, 1], vec![0, 3], vec![1, 2, 4], vec![2, 3, 4]]);
    let expect = [vec![1.0, 1.0], vec![1.0, 1.0], vec![0.5, 0.75, 0.75], vec![0.75, 0.5, 0.75]];
    for (e, w) in f.extremals().iter().zip(expect) {
        for (a, b) in e.weights.iter().zip(&w) {
            assert!((a - b).abs() < 1e-12, "{:?}", e);
        }
    }
}

#[test]
fn distinct_tb_projectors_give_two_extremals() {
    // Without the repeated |z⟩ only the basis and the {z, α, β⊥} trine remain.
    let f = ExtremalFamily::new(vec![ket_z(), ket_z_perp(), ket_alpha(), ket_beta_perp()]).unwrap();
    assert_eq!(f.len(), 2);
    assert_eq!(f.extremals()[1].support, vec![0, 2, 3]);
    let w = &f.extremals()[1].weights;
    assert!((w[0] - 0.5).abs() < 1e-12 && (w[1] - 0.75).abs() < 1e-12 && (w[2] - 0.75).abs() < 1e-12);
}

#[test]
fn orthonormal_pair_is_single_extremal() {
    let effects: Vec<Effect> = [ket_z(), ket_z_perp()]
        .iter()
        .map(|s| Effect::weighted_projector(1.0, s).unwrap())
        .collect();
    let e = enumerate_extremals(&effects).unwrap();
    assert_eq!(e.len(), 1);
    assert_eq!(e[0].support, vec![0, 1]);
    assert!(e[0].weights.iter().all(|w| (w - 1.0).abs() < 1e-12));
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

#[test]
fn trine_weights_match_cramer_rule() {
    let angles = [0.0, 2.0 * std::f64::consts::PI / 3.0, 4.0 * std::f64::consts::PI / 3.0];
    let rays: Vec<PureState> = angles
        .iter()
        .map(|&t| PureState::from_bloch(BlochVector::new(t.sin(), 0.0, t.cos())).unwrap())
        .collect();
    // Columns (1, n_x, n_z) of ½(I + n·σ); right-hand side is I = (2, 0, 0).
    let cols: Vec<[f64; 3]> = angles.iter().map(|&t| [0.5, 0.5 * t.sin(), 0.5 * t.cos()]).collect();
    let m = |c: &[[f64; 3]]| [[c[0][0], c[1][0], c[2][0]], [c[0][1], c[1][1], c[2][1]], [c[0][2], c[1][2], c[2][2]]];
    let d = det3(m(&cols));
    let rhs = [1.0, 0.0, 0.0];
    let oracle: Vec<f64> = (0..3)
        .map(|i| {
            let mut c = cols.clone();
            c[i] = rhs;
            det3(m(&c)) / d
        })
        .collect();
    let f = ExtremalFamily::new(rays).unwrap();
    assert_eq!(f.len(), 1);
    for (w, o) in f.extremals()[0].weights.iter().zip(&oracle) {
        assert!((w - o).abs() < 1e-12);
        assert!((w - 2.0 / 3.0).abs() < 1e-12);
    }
}

#[test]
fn non_rank_one_projector_rejected() {
    let half = Effect::new(ComplexMatrix::identity(2).scale(0.5)).unwrap();
    assert!(matches!(enumerate_extremals(&[half]), Err(Error::NotRankOne(_))));
}

#[test]
fn mixed_dimensions_rejected() {
    let f = ExtremalFamily::new(vec![ket_z(), PureState::basis(3, 0)]);
    assert!(matches!(f, Err(Error::DimensionMismatch { .. })));
}

#[test]
fn tb_effective_povm_at_zero() {
    let p = effective_povm(&tb(), &xz_state(0.0)).unwrap();
    let expect = [1.0, 0.5, 0.0, 0.5, 0.0];
    for (w, e) in p.weights().iter().zip(expect) {
        assert!((w - e).abs() < 1e-12, "{:?}", p.weights());
    }
}

#[test]
fn effective_povm_at_maximally_mixed_halves_weights() {
    let p = effective_povm(&tb(), &DensityMatrix::maximally_mixed(2)).unwrap();
    for (w, e) in p.weights().iter().zip(tb()) {
        assert!((w - e.weight / 2.0).abs() < 1e-12);
    }
}

#[test]
fn effective_povm_rejects_incomplete_joint() {
    let mut j = tb();
    j.pop();
    assert!(matches!(effective_povm(&j, &xz_state(0.0)), Err(Error::Incomplete(_))));
}

#[test]
fn tb_mixture_at_zero() {
    let f = tb_family();
    let p = effective_povm(&tb(), &xz_state(0.0)).unwrap();
    let d = mixture_weights(&p, &f).unwrap();
    let expect = [0.5, 0.5, 0.0, 0.0];
    for (m, e) in d.mu.iter().zip(expect) {
        assert!((m - e).abs() < 1e-12, "{:?}", d.mu);
    }
}

#[test]
fn single_extremal_target_is_its_own_mixture() {
    let f = tb_family();
    let m3 = &f.extremals()[2];
    let terms = f
        .projectors()
        .iter()
        .enumerate()
        .map(|(a, p)| Rank1Term { weight: m3.weight_of(a), projector: p.clone() })
        .collect();
    let d = mixture_weights(&Rank1Povm::new(terms).unwrap(), &f).unwrap();
    for (m, e) in d.mu.iter().zip([0.0, 0.0, 1.0, 0.0]) {
        assert!((m - e).abs() < 1e-12);
    }
}

#[test]
fn target_outside_family_is_rejected() {
    let f = tb_family();
    let basis = Rank1Povm::new(vec![
        Rank1Term { weight: 1.0, projector: ket_z() },
        Rank1Term { weight: 1.0, projector: ket_z_perp() },
    ])
    .unwrap();
    assert!(matches!(mixture_weights(&basis, &f), Err(Error::DimensionMismatch { .. })));
    let x = PureState::from_real(&[1.0, 1.0]).unwrap();
    let xp = x.qubit_perp().unwrap();
    let other = Rank1Povm::new(vec![
        Rank1Term { weight: 0.0, projector: ket_z_perp() },
        Rank1Term { weight: 1.0, projector: x },
        Rank1Term { weight: 0.0, projector: ket_alpha() },
        Rank1Term { weight: 1.0, projector: xp },
        Rank1Term { weight: 0.0, projector: ket_beta_perp() },
    ])
    .unwrap();
    assert!(matches!(mixture_weights(&other, &f), Err(Error::DecompositionInfeasible(_))));
}

#[test]
fn closed_forms_on_random_states() {
    let f = tb_family();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let s = haar_state(&mut rng, 2);
        let rho = DensityMatrix::from_pure(&s);
        let d = mixture_weights(&effective_povm(&tb(), &rho).unwrap(), &f).unwrap();
        let oracle = closed_form_mu(s.bloch().unwrap());
        for (m, o) in d.mu.iter().zip(oracle) {
            assert!((m - o).abs() < 1e-9, "{:?} vs {:?}", d.mu, oracle);
        }
    }
}

#[test]
fn min_norm_is_feasible_and_no_longer_than_lexmin() {
    let f = tb_family();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let rho = DensityMatrix::from_pure(&haar_state(&mut rng, 2));
        let p = effective_povm(&tb(), &rho).unwrap();
        let lex = mixture_weights_with(&p, &f, TieBreak::LexMin).unwrap();
        let mn = mixture_weights_with(&p, &f, TieBreak::MinNorm).unwrap();
        assert!(mn.residual < 1e-9);
        assert!(mn.mu.iter().all(|&m| m >= 0.0));
        let n2 = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
        assert!(n2(&mn.mu) <= n2(&lex.mu) + 1e-9);
    }
}

#[test]
fn mixture_reproduces_joint_statistics() {
    let joint = tb();
    let f = tb_family();
    let full = product_povm(&joint).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let psi = DensityMatrix::from_pure(&haar_state(&mut rng, 2));
        let phi = DensityMatrix::from_pure(&haar_state(&mut rng, 2));
        let d = mixture_weights(&effective_povm(&joint, &psi).unwrap(), &f).unwrap();
        let mut sim = vec![0.0; joint.len()];
        for (lam, mu) in d.mu.iter().enumerate() {
            let q = born(&phi, &f.measurement(lam)).unwrap();
            for (s, v) in sim.iter_mut().zip(q) {
                *s += mu * v;
            }
        }
        let exact = born(&psi.tensor(&phi), &full).unwrap();
        for (a, b) in sim.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}

#[test]
fn tb_grouping_refines_to_five_terms() {
    let r = refine_separable(&tb_grouping()).unwrap();
    assert_eq!(r.terms.len(), 5);
    assert_eq!(r.coarse_map, vec![0, 1, 1, 2, 2]);
}

#[test]
fn rank_one_product_refines_to_itself() {
    let comp = catalog_product(CatalogName::Comp).unwrap();
    let groups: Vec<Vec<ProductRank1Effect>> = comp.iter().map(|e| vec![e.clone()]).collect();
    let r = refine_separable(&groups).unwrap();
    assert_eq!(r.terms, comp);
    assert_eq!(r.coarse_map, vec![0, 1, 2, 3]);
}

#[test]
fn refine_rejects_incomplete() {
    let comp = catalog_product(CatalogName::Comp).unwrap();
    assert!(refine_separable(&[comp[..3].to_vec()]).is_err());
}

#[test]
fn shift_grouping_preserves_born_statistics() {
    let shift = catalog_product(CatalogName::Shift).unwrap();
    let groups = vec![
        vec![shift[0].clone(), shift[5].clone()],
        vec![shift[1].clone()],
        vec![shift[2].clone(), shift[3].clone(), shift[7].clone()],
        vec![shift[4].clone(), shift[6].clone()],
    ];
    let r = refine_separable(&groups).unwrap();
    let refined = product_povm(&r.terms).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let states: Vec<DensityMatrix> = (0..3).map(|_| DensityMatrix::from_pure(&haar_state(&mut rng, 2))).collect();
        let joint = states[0].tensor(&states[1]).tensor(&states[2]);
        let coarse = coarse_grain(&born(&joint, &refined).unwrap(), &r.coarse_map, groups.len());
        for (g, group) in groups.iter().enumerate() {
            let mut m = ComplexMatrix::zeros(8);
            for e in group {
                m = &m + &e.matrix();
            }
            let direct = joint.matrix().trace_product(&m).re;
            assert!((coarse[g] - direct).abs() < 1e-12);
        }
    }
}

#[test]
fn computational_measurement_reduces_to_one_bit() {
    let comp = catalog_product(CatalogName::Comp).unwrap();
    let f = ExtremalFamily::for_joint(&comp).unwrap();
    assert_eq!(f.len(), 4);
    let r = linear_reduction(&comp, &f).unwrap().unwrap();
    assert_eq!(r.cost_bits, 1);
    assert_eq!(r.operators.len(), 2);
    let pz = ket_z().projector();
    let pzp = ket_z_perp().projector();
    let ok = |a: &ComplexMatrix, b: &ComplexMatrix| a.max_abs_diff(b) < 1e-10;
    assert!(
        (ok(&r.operators[0], &pz) && ok(&r.operators[1], &pzp))
            || (ok(&r.operators[0], &pzp) && ok(&r.operators[1], &pz))
    );
}

#[test]
fn decomposition_serde_round_trip() {
    let f = tb_family();
    let d = mixture_weights(&effective_povm(&tb(), &xz_state(0.3)).unwrap(), &f).unwrap();
    let json = serde_json::to_string(&d).unwrap();
    let back: ExtremalDecomposition = serde_json::from_str(&json).unwrap();
    assert_eq!(back, d);
    let p = effective_povm(&tb(), &xz_state(0.3)).unwrap();
    let back: Rank1Povm = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
    assert_eq!(back, p);
}

#[test]
fn from_effects_splits_weights() {
    let p = Rank1Povm::from_effects(product_povm(&tb()).unwrap().effects()).unwrap();
    assert_eq!(p.len(), 5);
    for (w, e) in p.weights().iter().zip([1.0, 0.75, 0.75, 0.75, 0.75]) {
        assert!((w - e).abs() < 1e-12);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let m = random_povm(&mut rng, 2, 2);
    assert!(Rank1Povm::from_effects(m.effects()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn effective_povm_is_complete(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = DensityMatrix::from_pure(&haar_state(&mut rng, 2));
        let p = effective_povm(&tb(), &rho).unwrap();
        prop_assert!(p.to_povm().completeness_defect() < 1e-10);
    }

    #[test]
    fn mixture_reproduces_weights(theta in 0.0f64..std::f64::consts::TAU, seed in any::<u64>()) {
        let f = tb_family();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for rho in [xz_state(theta), DensityMatrix::from_pure(&haar_state(&mut rng, 2))] {
            let p = effective_povm(&tb(), &rho).unwrap();
            let d = mixture_weights(&p, &f).unwrap();
            prop_assert!((d.mu.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            prop_assert!(d.mu.iter().all(|&m| m >= 0.0));
            for (w, t) in d.outcome_weights(p.len()).iter().zip(p.weights()) {
                prop_assert!((w - t).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn extremals_are_complete_and_distinct(seed in any::<u64>(), k in 2usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rays: Vec<PureState> = (0..k).map(|_| haar_state(&mut rng, 2)).collect();
        let f = ExtremalFamily::new(rays.clone()).unwrap();
        let mut seen = std::collections::HashSet::new();
        for e in f.extremals() {
            prop_assert!(seen.insert(e.support.clone()));
            prop_assert!(e.weights.iter().all(|&w| w > WEIGHT_FLOOR));
            prop_assert!(e.povm(&rays).completeness_defect() < 1e-10);
        }
    }
}
