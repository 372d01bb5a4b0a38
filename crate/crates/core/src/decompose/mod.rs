//! Rank-one extremal measurements and convex decompositions of
//! state-dependent effective measurements.
//!
//! A rank-one measurement `{s_a P_a}` is extremal when its nonzero projectors
//! are linearly independent. [`enumerate_extremals`] lists every extremal
//! measurement supported on a fixed list of projectors, [`effective_povm`]
//! conditions a bipartite product measurement on the sender's state, and
//! [`mixture_weights`] writes the result as a convex mixture of extremals.

mod mixture;
mod reduction;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{lstsq, min_singular_value};
use crate::qmath::measure::{check_product_completeness, Povm, ProductRank1Effect, COMPLETENESS_TOL};
use crate::qmath::{ComplexMatrix, DensityMatrix, Effect, PureState};

pub use mixture::{mixture_weights, mixture_weights_with, TieBreak};
pub use reduction::{linear_reduction, LinearReduction};
pub(crate) use reduction::bits_for;

/// Singular-value threshold for linear independence of projectors.
pub const INDEPENDENCE_TOL: f64 = 1e-8;
/// Smallest weight kept in an extremal measurement.
pub const WEIGHT_FLOOR: f64 = 1e-10;
/// Largest accepted residual of a mixture.
pub const MIXTURE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rank1Term {
    pub weight: f64,
    pub projector: PureState,
}

/// Rank-one measurement `{s_a P_a}`; zero weights are allowed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Rank1PovmRepr", into = "Rank1PovmRepr")]
pub struct Rank1Povm {
    terms: Vec<Rank1Term>,
}

#[derive(Serialize, Deserialize)]
struct Rank1PovmRepr {
    terms: Vec<Rank1Term>,
}

impl From<Rank1Povm> for Rank1PovmRepr {
    fn from(p: Rank1Povm) -> Self {
        Rank1PovmRepr { terms: p.terms }
    }
}

impl TryFrom<Rank1PovmRepr> for Rank1Povm {
    type Error = Error;
    fn try_from(r: Rank1PovmRepr) -> Result<Self> {
        Rank1Povm::new(r.terms)
    }
}

impl Rank1Povm {
    pub fn new(terms: Vec<Rank1Term>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::OutOfRange("empty rank-one measurement".into()))?;
        let dim = first.projector.dim();
        let mut sum = ComplexMatrix::zeros(dim);
        for t in &terms {
            if t.projector.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: t.projector.dim() });
            }
            if !(t.weight >= 0.0) || t.weight > 1.0 + 1e-12 {
                return Err(Error::OutOfRange(format!("rank-one weight {}", t.weight)));
            }
            sum = &sum + &t.projector.projector().scale(t.weight);
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if dev > COMPLETENESS_TOL {
            return Err(Error::Incomplete(dev));
        }
        Ok(Rank1Povm { terms })
    }

    /// Splits every effect into weight and rank-one projector.
    pub fn from_effects(effects: &[Effect]) -> Result<Self> {
        let terms = effects
            .iter()
            .map(|e| {
                let w = e.matrix().trace().re;
                if w <= 0.0 {
                    return Err(Error::NotRankOne("zero effect has no projector".into()));
                }
                let p = Effect::new(e.matrix().scale(1.0 / w))?.as_rank_one_projector()?;
                Ok(Rank1Term { weight: w, projector: p })
            })
            .collect::<Result<_>>()?;
        Rank1Povm::new(terms)
    }

    pub fn terms(&self) -> &[Rank1Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.terms[0].projector.dim()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.weight).collect()
    }

    pub fn to_povm(&self) -> Povm {
        Povm::new(
            self.terms
                .iter()
                .map(|t| Effect::new(t.projector.projector().scale(t.weight)).expect("weight in [0, 1]"))
                .collect(),
        )
        .expect("validated on construction")
    }
}

/// Extremal rank-one measurement on a subset of a projector list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremalPovm {
    pub support: Vec<usize>,
    pub weights: Vec<f64>,
}

impl ExtremalPovm {
    /// Weight of outcome `a`, zero off the support.
    pub fn weight_of(&self, a: usize) -> f64 {
        self.support
            .iter()
            .position(|&s| s == a)
            .map_or(0.0, |i| self.weights[i])
    }

    /// Full measurement over every outcome of `projectors`.
    pub fn povm(&self, projectors: &[PureState]) -> Povm {
        let effects = (0..projectors.len())
            .map(|a| {
                Effect::new(projectors[a].projector().scale(self.weight_of(a)))
                    .expect("extremal weights are at most one")
            })
            .collect();
        Povm::new(effects).expect("extremal measurements are complete")
    }
}

/// Projector list together with all of its extremal measurements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremalFamily {
    projectors: Vec<PureState>,
    extremals: Vec<ExtremalPovm>,
}

impl ExtremalFamily {
    pub fn new(projectors: Vec<PureState>) -> Result<Self> {
        let extremals = enumerate_rays(&projectors)?;
        Ok(ExtremalFamily { projectors, extremals })
    }

    /// Family on the receiver's factor (the last one) of each joint outcome.
    pub fn for_joint(joint: &[ProductRank1Effect]) -> Result<Self> {
        check_product_completeness(joint)?;
        ExtremalFamily::new(joint.iter().map(|e| e.factors.last().unwrap().clone()).collect())
    }

    pub fn projectors(&self) -> &[PureState] {
        &self.projectors
    }

    pub fn extremals(&self) -> &[ExtremalPovm] {
        &self.extremals
    }

    pub fn len(&self) -> usize {
        self.extremals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.extremals.is_empty()
    }

    pub fn measurement(&self, lambda: usize) -> Povm {
        self.extremals[lambda].povm(&self.projectors)
    }
}

/// Convex mixture `Σ_λ μ_λ M^λ`, aligned with the family's extremals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremalDecomposition {
    pub mu: Vec<f64>,
    pub extremals: Vec<ExtremalPovm>,
    pub residual: f64,
}

impl ExtremalDecomposition {
    /// Outcome weights `Σ_λ μ_λ s_a^λ`.
    pub fn outcome_weights(&self, outcomes: usize) -> Vec<f64> {
        (0..outcomes)
            .map(|a| {
                self.mu
                    .iter()
                    .zip(&self.extremals)
                    .map(|(m, e)| m * e.weight_of(a))
                    .sum()
            })
            .collect()
    }
}

/// Enumerates the extremal rank-one measurements over `projectors`.
pub fn enumerate_extremals(projectors: &[Effect]) -> Result<Vec<ExtremalPovm>> {
    let rays = projectors
        .iter()
        .map(Effect::as_rank_one_projector)
        .collect::<Result<Vec<_>>>()?;
    enumerate_rays(&rays)
}

fn enumerate_rays(rays: &[PureState]) -> Result<Vec<ExtremalPovm>> {
    let k = rays.len();
    if k == 0 || k > 16 {
        return Err(Error::OutOfRange(format!("{k} projectors; expected 1 to 16")));
    }
    let d = rays[0].dim();
    if let Some(r) = rays.iter().find(|r| r.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: r.dim() });
    }
    if d > 4 {
        return Err(Error::OutOfRange(format!("dimension {d} exceeds 4")));
    }
    let coords: Vec<Vec<f64>> = rays.iter().map(|r| r.projector().hermitian_coords()).collect();
    let target = DVector::from_vec(ComplexMatrix::identity(d).hermitian_coords());
    let mut out = Vec::new();
    for mask in 1u32..(1u32 << k) {
        let support: Vec<usize> = (0..k).filter(|&a| mask & (1 << a) != 0).collect();
        if support.len() > d * d {
            continue;
        }
        let a = DMatrix::from_fn(d * d, support.len(), |i, j| coords[support[j]][i]);
        if min_singular_value(&a) <= INDEPENDENCE_TOL {
            continue;
        }
        let (s, _) = lstsq(&a, &target);
        if s.iter().any(|&w| w <= WEIGHT_FLOOR) {
            continue;
        }
        let mut sum = ComplexMatrix::zeros(d);
        for (j, &idx) in support.iter().enumerate() {
            sum = &sum + &rays[idx].projector().scale(s[j]);
        }
        if sum.max_abs_diff(&ComplexMatrix::identity(d)) > COMPLETENESS_TOL {
            continue;
        }
        out.push(ExtremalPovm { support, weights: s.iter().copied().collect() });
    }
    out.sort_by(|x, y| x.support.cmp(&y.support));
    Ok(out)
}

/// Conditions a bipartite product measurement on the sender's state:
/// term `i` is `(p_i Tr[P_{u_i} ψ], P_{v_i})`.
pub fn effective_povm(joint: &[ProductRank1Effect], psi: &DensityMatrix) -> Result<Rank1Povm> {
    check_product_completeness(joint)?;
    if joint[0].parties() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: joint[0].parties() });
    }
    let reduced = reduce_first_party(joint, psi)?;
    Rank1Povm::new(
        reduced
            .into_iter()
            .map(|e| Rank1Term { weight: e.weight, projector: e.factors[0].clone() })
            .collect(),
    )
}

/// Absorbs the first party's state into the weights. Outcomes are kept
/// one-to-one, so weights may vanish.
pub fn reduce_first_party(
    joint: &[ProductRank1Effect],
    psi: &DensityMatrix,
) -> Result<Vec<ProductRank1Effect>> {
    let first = joint
        .first()
        .ok_or_else(|| Error::OutOfRange("empty product measurement".into()))?;
    if first.parties() < 2 {
        return Err(Error::OutOfRange("need at least two parties to reduce".into()));
    }
    if psi.dim() != first.factors[0].dim() {
        return Err(Error::DimensionMismatch { expected: first.factors[0].dim(), found: psi.dim() });
    }
    Ok(joint
        .iter()
        .map(|e| ProductRank1Effect {
            weight: (e.weight * psi.overlap_with(&e.factors[0])).max(0.0),
            factors: e.factors[1..].to_vec(),
        })
        .collect())
}

/// Flattened rank-one product refinement with the map back to the original
/// outcome labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Refinement {
    pub terms: Vec<ProductRank1Effect>,
    pub coarse_map: Vec<usize>,
}

/// Flattens effects given as explicit sums of product rank-one terms.
pub fn refine_separable(effects: &[Vec<ProductRank1Effect>]) -> Result<Refinement> {
    let mut terms = Vec::new();
    let mut coarse_map = Vec::new();
    for (label, group) in effects.iter().enumerate() {
        for t in group {
            terms.push(t.clone());
            coarse_map.push(label);
        }
    }
    check_product_completeness(&terms)?;
    Ok(Refinement { terms, coarse_map })
}

#[cfg(test)]
mod tests;
