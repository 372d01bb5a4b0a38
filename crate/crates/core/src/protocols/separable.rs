//! Simulation of separable measurements through extremal decompositions of
//! the receiver's effective measurement.

use serde::{Deserialize, Serialize};

use super::{cost_bits, Encoder, OneRoundProtocol, SharedRandomness};
use crate::decompose::{linear_reduction, ExtremalFamily, LinearReduction, TieBreak};
use crate::error::{Error, Result};
use crate::qmath::measure::{check_product_completeness, ProductRank1Effect};
use crate::qmath::{Effect, Povm};

/// Protocol for a bipartite rank-one product measurement together with its
/// cost and, when one exists, a cheaper protocol whose sender simply
/// measures `ψ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem4Protocol {
    pub protocol: OneRoundProtocol,
    pub family: ExtremalFamily,
    pub cost_bits: u32,
    pub reduction: Option<LinearReduction>,
    pub reduced_protocol: Option<OneRoundProtocol>,
    pub reduced_cost_bits: u32,
}

/// Sender sends `λ ~ μ_λ(ψ)`; receiver measures the extremal `M^λ`.
pub fn theorem4_protocol(joint: &[ProductRank1Effect], family: &ExtremalFamily) -> Result<Theorem4Protocol> {
    let dims = check_product_completeness(joint)?;
    if dims.len() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: dims.len() });
    }
    if family.projectors().len() != joint.len()
        || joint
            .iter()
            .zip(family.projectors())
            .any(|(e, p)| !e.factors[1].same_ray(p, 1e-8))
    {
        return Err(Error::DecompositionInfeasible("family does not match the receiver's projectors".into()));
    }
    if family.is_empty() {
        return Err(Error::DecompositionInfeasible("family has no extremal measurement".into()));
    }
    let l = family.len();
    let protocol = OneRoundProtocol::new(
        SharedRandomness::single(),
        vec![Encoder::Decomposition { joint: joint.to_vec(), family: family.clone(), tie: TieBreak::LexMin }],
        (0..l).map(|lam| family.measurement(lam)).collect(),
    )?;
    let cost = cost_bits(l);
    let reduction = linear_reduction(joint, family)?;
    let reduced_protocol = match &reduction {
        Some(r) if r.cost_bits < cost => Some(reduced(r, family)?),
        _ => None,
    };
    let reduced_cost_bits = match &reduced_protocol {
        Some(p) => p.cost_bits(),
        None => cost,
    };
    Ok(Theorem4Protocol { protocol, family: family.clone(), cost_bits: cost, reduction, reduced_protocol, reduced_cost_bits })
}

fn reduced(r: &LinearReduction, family: &ExtremalFamily) -> Result<OneRoundProtocol> {
    let effects = r
        .operators
        .iter()
        .map(|n| Effect::new(n.clone()))
        .collect::<Result<Vec<_>>>()?;
    OneRoundProtocol::new(
        SharedRandomness::single(),
        vec![Encoder::Measure(Povm::new(effects)?)],
        r.subset.iter().map(|&lam| family.measurement(lam)).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{run_analytic, run_sampled};
    use crate::qmath::catalog::{catalog_product, CatalogName};
    use crate::qmath::random::haar_state;
    use crate::qmath::{born, product_povm, DensityMatrix, PureState};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn build(name: CatalogName) -> (Vec<ProductRank1Effect>, Theorem4Protocol) {
        let joint = catalog_product(name).unwrap();
        let family = ExtremalFamily::for_joint(&joint).unwrap();
        let p = theorem4_protocol(&joint, &family).unwrap();
        (joint, p)
    }

    fn check_born(joint: &[ProductRank1Effect], p: &OneRoundProtocol, seed: u64, trials: usize) {
        let full = product_povm(joint).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..trials {
            let psi = DensityMatrix::from_pure(&haar_state(&mut rng, 2));
            let phi = DensityMatrix::from_pure(&haar_state(&mut rng, 2));
            let sim = run_analytic(p, &psi, &phi).unwrap();
            let exact = born(&psi.tensor(&phi), &full).unwrap();
            for (a, b) in sim.iter().zip(&exact) {
                assert!((a - b).abs() < 1e-10, "{sim:?} vs {exact:?}");
            }
        }
    }

    #[test]
    fn tb_uses_four_messages_and_two_bits() {
        let (joint, p) = build(CatalogName::Tb);
        assert_eq!(p.protocol.alphabet(), 4);
        assert_eq!(p.cost_bits, 2);
        check_born(&joint, &p.protocol, 1, 60);
    }

    #[test]
    fn computational_measurement_needs_one_bit() {
        let (joint, p) = build(CatalogName::Comp);
        assert_eq!(p.cost_bits, 2);
        assert_eq!(p.reduced_cost_bits, 1);
        let reduced = p.reduced_protocol.as_ref().unwrap();
        assert_eq!(reduced.alphabet(), 2);
        check_born(&joint, reduced, 2, 60);
        check_born(&joint, &p.protocol, 3, 20);
    }

    #[test]
    fn twisted_a_is_reproduced_with_two_bits() {
        let (joint, p) = build(CatalogName::TwistA);
        assert_eq!(p.cost_bits, 2);
        check_born(&joint, &p.protocol, 4, 60);
    }

    #[test]
    fn random_six_outcome_product_measurement() {
        // Sender basis {a, a⊥}; receiver measures a split basis after a and a
        // trine after a⊥.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let tau = 2.0 * std::f64::consts::PI / 3.0;
        for trial in 0..5 {
            let a = haar_state(&mut rng, 2);
            let ap = a.qubit_perp().unwrap();
            let b = haar_state(&mut rng, 2);
            let bp = b.qubit_perp().unwrap();
            let n = b.bloch().unwrap();
            let axis = n.cross(haar_state(&mut rng, 2).bloch().unwrap()).normalized();
            let trine = |k: f64| {
                let v = n.scale((k * tau).cos()).add(axis.cross(n).scale((k * tau).sin()));
                PureState::from_bloch(v).unwrap()
            };
            let pe = |w: f64, x: &PureState, y: PureState| ProductRank1Effect::new(w, vec![x.clone(), y]).unwrap();
            let joint = vec![
                pe(0.5, &a, b.clone()),
                pe(0.5, &a, b.clone()),
                pe(1.0, &a, bp),
                pe(2.0 / 3.0, &ap, trine(0.0)),
                pe(2.0 / 3.0, &ap, trine(1.0)),
                pe(2.0 / 3.0, &ap, trine(2.0)),
            ];
            let family = ExtremalFamily::for_joint(&joint).unwrap();
            let p = theorem4_protocol(&joint, &family).unwrap();
            check_born(&joint, &p.protocol, 9 + trial, 10);
        }
    }

    #[test]
    fn sampled_tb_run_agrees_with_analytic() {
        let (_, p) = build(CatalogName::Tb);
        let psi = DensityMatrix::from_pure(&PureState::from_real(&[0.8, 0.6]).unwrap());
        let phi = DensityMatrix::from_pure(&PureState::from_real(&[0.6, -0.8]).unwrap());
        let exact = run_analytic(&p.protocol, &psi, &phi).unwrap();
        let s = run_sampled(&p.protocol, &psi, &phi, 1_000_000, 42).unwrap();
        assert!(s.max_z(&exact) < 4.0, "{:?} vs {exact:?}", s.frequencies);
    }

    #[test]
    fn mismatched_family_rejected() {
        let joint = catalog_product(CatalogName::Tb).unwrap();
        let other = ExtremalFamily::for_joint(&catalog_product(CatalogName::TwistA).unwrap()).unwrap();
        assert!(theorem4_protocol(&joint, &other).is_err());
    }
}
