//! Random states, measurements and instruments for property tests and
//! benchmarks.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use super::matrix::{c, ComplexMatrix, C64};
use super::measure::{Instrument, Povm, ProductRank1Effect};
use super::state::{BlochVector, Effect, PureState};

fn gaussian_c<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c(re, im)
}

/// Haar-random pure state.
pub fn haar_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> PureState {
    loop {
        let amps: Vec<C64> = (0..dim).map(|_| gaussian_c(rng)).collect();
        if let Ok(s) = PureState::new(amps) {
            return s;
        }
    }
}

/// Uniformly random unit Bloch vector.
pub fn unit_bloch<R: Rng + ?Sized>(rng: &mut R) -> BlochVector {
    loop {
        let v = BlochVector::new(
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
        );
        let n = v.norm();
        if n > 1e-9 {
            return v.scale(1.0 / n);
        }
    }
}

/// Uniformly random point of the Bloch ball.
pub fn ball_bloch<R: Rng + ?Sized>(rng: &mut R) -> BlochVector {
    let r = rng.random::<f64>().cbrt();
    unit_bloch(rng).scale(r)
}

/// Uniform point of the probability simplex with `n` vertices.
pub fn flat_simplex<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// Random isometry `C^dim → C^(dim·blocks)` split into `blocks` square
/// Kraus blocks.
fn random_kraus<R: Rng + ?Sized>(rng: &mut R, dim: usize, blocks: usize) -> Vec<ComplexMatrix> {
    let rows = dim * blocks;
    let g = DMatrix::from_fn(rows, dim, |_, _| gaussian_c(rng));
    let q = g.qr().q();
    (0..blocks)
        .map(|b| ComplexMatrix::from_inner(q.rows(b * dim, dim).into_owned()))
        .collect()
}

/// Random POVM with `outcomes` effects `K_k† K_k`.
pub fn random_povm<R: Rng + ?Sized>(rng: &mut R, dim: usize, outcomes: usize) -> Povm {
    let effects = random_kraus(rng, dim, outcomes)
        .into_iter()
        .map(|k| {
            let e = &k.adjoint() * &k;
            let herm = (&e + &e.adjoint()).scale(0.5);
            Effect::new(herm).expect("K†K is an effect")
        })
        .collect();
    Povm::new(effects).expect("isometry blocks are complete")
}

/// Random instrument with one Kraus operator per outcome.
pub fn random_instrument<R: Rng + ?Sized>(rng: &mut R, dim: usize, outcomes: usize) -> Instrument {
    Instrument::new(random_kraus(rng, dim, outcomes)).expect("isometry blocks are complete")
}

/// Random qubit rank-one POVM as `(weight, ray)` terms: either a basis or
/// `w P_{n₁} + w P_{n₂} + w s P_{−(n₁+n₂)/s}` with `s = |n₁ + n₂|`.
pub fn random_rank1_qubit<R: Rng + ?Sized>(rng: &mut R) -> Vec<(f64, PureState)> {
    let n1 = unit_bloch(rng);
    if rng.random::<bool>() {
        let s = PureState::from_bloch(n1).expect("unit");
        let t = s.qubit_perp().expect("qubit");
        return vec![(1.0, s), (1.0, t)];
    }
    loop {
        let n2 = unit_bloch(rng);
        let sum = n1.add(n2);
        let s = sum.norm();
        if s > 1e-3 {
            let w = 2.0 / (2.0 + s);
            let ray = |v: BlochVector| PureState::from_bloch(v).expect("unit");
            return vec![(w, ray(n1)), (w, ray(n2)), (w * s, ray(sum.scale(-1.0 / s)))];
        }
    }
}

/// Random rank-one product POVM on `C² ⊗ C²`: a random rank-one sender
/// measurement followed by an independent receiver measurement per sender
/// term.
pub fn random_product_rank1<R: Rng + ?Sized>(rng: &mut R) -> Vec<ProductRank1Effect> {
    let mut out = Vec::new();
    for (wa, a) in random_rank1_qubit(rng) {
        for (wb, b) in random_rank1_qubit(rng) {
            out.push(ProductRank1Effect::new(wa * wb, vec![a.clone(), b]).expect("weights in (0, 1]"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_povm_is_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in 1..=4 {
            let m = random_povm(&mut rng, d, 3);
            assert!(m.completeness_defect() < 1e-10);
        }
    }

    #[test]
    fn simplex_sums_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = flat_simplex(&mut rng, 5);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn random_product_povms_are_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let terms = random_rank1_qubit(&mut rng);
            let mut sum = ComplexMatrix::zeros(2);
            for (w, s) in &terms {
                sum = &sum + &s.projector().scale(*w);
            }
            assert!(sum.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
            let joint = random_product_rank1(&mut rng);
            assert_eq!(super::super::measure::check_product_completeness(&joint).unwrap(), vec![2, 2]);
        }
    }

    #[test]
    fn ball_points_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            assert!(ball_bloch(&mut rng).norm() <= 1.0);
            assert!(unit_bloch(&mut rng).is_unit(1e-12));
        }
    }
}
