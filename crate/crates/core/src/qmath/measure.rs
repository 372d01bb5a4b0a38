use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, C64};
use super::state::{BlochVector, DensityMatrix, Effect, PureState, STATE_TOL};
use crate::error::{Error, Result};

pub const COMPLETENESS_TOL: f64 = 1e-10;

/// Ordered list of effects summing to the identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PovmRepr", into = "PovmRepr")]
pub struct Povm {
    effects: Vec<Effect>,
    labels: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct PovmRepr {
    labels: Vec<String>,
    effects: Vec<Effect>,
}

impl From<Povm> for PovmRepr {
    fn from(p: Povm) -> Self {
        PovmRepr { labels: p.labels, effects: p.effects }
    }
}

impl TryFrom<PovmRepr> for Povm {
    type Error = Error;
    fn try_from(r: PovmRepr) -> Result<Self> {
        Povm::with_labels(r.effects, r.labels)
    }
}

impl Povm {
    /// Labels default to the outcome index.
    pub fn new(effects: Vec<Effect>) -> Result<Self> {
        let labels = (0..effects.len()).map(|i| i.to_string()).collect();
        Povm::with_labels(effects, labels)
    }

    pub fn with_labels(effects: Vec<Effect>, labels: Vec<String>) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::OutOfRange("a measurement needs at least one effect".into()));
        }
        if labels.len() != effects.len() {
            return Err(Error::DimensionMismatch { expected: effects.len(), found: labels.len() });
        }
        let dim = effects[0].dim();
        let mut sum = ComplexMatrix::zeros(dim);
        for e in &effects {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: e.dim() });
            }
            sum = &sum + e.matrix();
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if dev > COMPLETENESS_TOL {
            return Err(Error::Incomplete(dev));
        }
        Ok(Povm { effects, labels })
    }

    /// Projective measurement in the given orthonormal states.
    pub fn from_basis(states: &[PureState]) -> Result<Self> {
        Povm::new(states.iter().map(|s| Effect::weighted_projector(1.0, s)).collect::<Result<_>>()?)
    }

    /// Measurement that always returns outcome `which` out of `outcomes`.
    pub fn deterministic(dim: usize, outcomes: usize, which: usize) -> Self {
        let effects = (0..outcomes)
            .map(|k| if k == which { Effect::identity(dim) } else { Effect::zero(dim) })
            .collect();
        Povm::new(effects).expect("deterministic measurement is complete")
    }

    pub fn effects(&self) -> &[Effect] {
        &self.effects
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    /// Maximum entrywise deviation of `Σ E_k` from the identity.
    pub fn completeness_defect(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.dim());
        for e in &self.effects {
            sum = &sum + e.matrix();
        }
        sum.max_abs_diff(&ComplexMatrix::identity(self.dim()))
    }
}

/// Born rule `p_k = Tr[ρ E_k]`.
pub fn born(state: &DensityMatrix, m: &Povm) -> Result<Vec<f64>> {
    if state.dim() != m.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), found: state.dim() });
    }
    Ok(m.effects()
        .iter()
        .map(|e| state.matrix().trace_product(e.matrix()).re)
        .collect())
}

/// Born rule on a pure state.
pub fn born_pure(state: &PureState, m: &Povm) -> Result<Vec<f64>> {
    if state.dim() != m.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), found: state.dim() });
    }
    Ok(m.effects().iter().map(|e| state.expectation(e.matrix())).collect())
}

/// Probability `¼(1 − ψ̂·φ̂)` of the singlet outcome on `ψ ⊗ φ`.
pub fn singlet_probability(psi: BlochVector, phi: BlochVector) -> Result<f64> {
    psi.validate_unit()?;
    phi.validate_unit()?;
    Ok(0.25 * (1.0 - psi.dot(phi)))
}

/// Measurement operators `{M_k}` with `Σ M_k† M_k = I`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstrumentRepr", into = "InstrumentRepr")]
pub struct Instrument {
    kraus: Vec<ComplexMatrix>,
}

#[derive(Serialize, Deserialize)]
struct InstrumentRepr {
    kraus: Vec<ComplexMatrix>,
}

impl From<Instrument> for InstrumentRepr {
    fn from(i: Instrument) -> Self {
        InstrumentRepr { kraus: i.kraus }
    }
}

impl TryFrom<InstrumentRepr> for Instrument {
    type Error = Error;
    fn try_from(r: InstrumentRepr) -> Result<Self> {
        Instrument::new(r.kraus)
    }
}

impl Instrument {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::OutOfRange("an instrument needs at least one outcome".into()));
        }
        let dim = kraus[0].dim();
        let mut sum = ComplexMatrix::zeros(dim);
        for k in &kraus {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: k.dim() });
            }
            if !k.is_finite() {
                return Err(Error::OutOfRange("non-finite Kraus operator".into()));
            }
            sum = &sum + &(&k.adjoint() * k);
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if dev > COMPLETENESS_TOL {
            return Err(Error::Incomplete(dev));
        }
        Ok(Instrument { kraus })
    }

    /// Single-outcome instrument that leaves the state untouched.
    pub fn trivial(dim: usize) -> Self {
        Instrument { kraus: vec![ComplexMatrix::identity(dim)] }
    }

    /// Lüders instrument of a projective measurement.
    pub fn projective(states: &[PureState]) -> Result<Self> {
        Instrument::new(states.iter().map(PureState::projector).collect())
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn len(&self) -> usize {
        self.kraus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kraus.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].dim()
    }

    /// Unnormalized post-measurement state `M_k ρ M_k†`.
    pub fn apply(&self, k: usize, rho: &ComplexMatrix) -> ComplexMatrix {
        rho.sandwich(&self.kraus[k])
    }
}

/// Weighted rank-1 product effect `w · P_{f₁} ⊗ … ⊗ P_{f_n}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductRank1Effect {
    pub weight: f64,
    pub factors: Vec<PureState>,
}

impl ProductRank1Effect {
    pub fn new(weight: f64, factors: Vec<PureState>) -> Result<Self> {
        if !(weight > 0.0 && weight <= 1.0 + STATE_TOL) {
            return Err(Error::OutOfRange(format!("product effect weight {weight} outside (0, 1]")));
        }
        if factors.is_empty() {
            return Err(Error::OutOfRange("product effect needs at least one factor".into()));
        }
        Ok(ProductRank1Effect { weight, factors })
    }

    pub fn parties(&self) -> usize {
        self.factors.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(PureState::dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(PureState::dim).product()
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let mut v = self.factors[0].clone();
        for f in &self.factors[1..] {
            v = v.tensor(f);
        }
        v.projector().scale(self.weight)
    }

    /// Splits a weighted rank-one effect on `⊗ dims` into product factors.
    pub fn factorize(effect: &Effect, dims: &[usize]) -> Result<Self> {
        let total: usize = dims.iter().product();
        if dims.is_empty() || effect.dim() != total {
            return Err(Error::DimensionMismatch { expected: total, found: effect.dim() });
        }
        let w = effect.matrix().trace().re;
        if w <= 0.0 {
            return Err(Error::NotRankOne("zero effect".into()));
        }
        let ray = Effect::new(effect.matrix().scale(1.0 / w))?.as_rank_one_projector()?;
        let mut factors = Vec::with_capacity(dims.len());
        let mut rest: Vec<C64> = ray.amplitudes().iter().copied().collect();
        for (i, &d) in dims.iter().enumerate() {
            if i + 1 == dims.len() {
                factors.push(PureState::new(rest.clone())?);
                break;
            }
            let cols = rest.len() / d;
            let m = DMatrix::from_row_slice(d, cols, &rest);
            let svd = m.svd(true, true);
            let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
            let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
            order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
            let top = order[0];
            if order.len() > 1 && svd.singular_values[order[1]] > 1e-8 {
                return Err(Error::NonProduct(format!(
                    "Schmidt coefficient {:e} across factor {i}",
                    svd.singular_values[order[1]]
                )));
            }
            factors.push(PureState::new(u.column(top).iter().copied().collect())?);
            rest = vt.row(top).iter().copied().collect();
        }
        ProductRank1Effect::new(w, factors)
    }

    /// Probability `w Π_i Tr[P_{f_i} ρ_i]` on a product state.
    pub fn product_probability(&self, states: &[&DensityMatrix]) -> Result<f64> {
        if states.len() != self.factors.len() {
            return Err(Error::DimensionMismatch { expected: self.factors.len(), found: states.len() });
        }
        let mut p = self.weight;
        for (f, s) in self.factors.iter().zip(states) {
            if f.dim() != s.dim() {
                return Err(Error::DimensionMismatch { expected: f.dim(), found: s.dim() });
            }
            p *= s.overlap_with(f);
        }
        Ok(p)
    }
}

/// Assembles the full measurement of a list of product effects.
pub fn product_povm(effects: &[ProductRank1Effect]) -> Result<Povm> {
    Povm::new(
        effects
            .iter()
            .map(|e| Effect::new(e.matrix()))
            .collect::<Result<_>>()?,
    )
}

/// Checks that product effects share party dimensions and sum to identity.
pub fn check_product_completeness(effects: &[ProductRank1Effect]) -> Result<Vec<usize>> {
    let first = effects
        .first()
        .ok_or_else(|| Error::OutOfRange("empty product measurement".into()))?;
    let dims = first.dims();
    let total: usize = dims.iter().product();
    let mut sum = ComplexMatrix::zeros(total);
    for e in effects {
        if e.dims() != dims {
            return Err(Error::DimensionMismatch { expected: total, found: e.total_dim() });
        }
        sum = &sum + &e.matrix();
    }
    let dev = sum.max_abs_diff(&ComplexMatrix::identity(total));
    if dev > COMPLETENESS_TOL {
        return Err(Error::Incomplete(dev));
    }
    Ok(dims)
}

/// Sums probabilities of refined outcomes into their coarse labels.
pub fn coarse_grain(probs: &[f64], map: &[usize], labels: usize) -> Vec<f64> {
    let mut out = vec![0.0; labels];
    for (p, &l) in probs.iter().zip(map) {
        out[l] += p;
    }
    out
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::state::bloch_to_density;

    #[test]
    fn factorize_recovers_product_factors() {
        let a = PureState::from_real(&[0.6, 0.8]).unwrap();
        let b = PureState::new(vec![C64::new(0.0, 1.0), C64::new(1.0, 0.0)]).unwrap();
        let c = PureState::basis(2, 1);
        let e = ProductRank1Effect::new(0.75, vec![a.clone(), b.clone(), c.clone()]).unwrap();
        let f = ProductRank1Effect::factorize(&Effect::new(e.matrix()).unwrap(), &[2, 2, 2]).unwrap();
        assert!((f.weight - 0.75).abs() < 1e-12);
        assert!(f.matrix().max_abs_diff(&e.matrix()) < 1e-12);
        for (x, y) in f.factors.iter().zip([a, b, c]) {
            assert!(x.same_ray(&y, 1e-10));
        }
    }

    #[test]
    fn factorize_rejects_entangled() {
        let s = PureState::from_real(&[0.0, 1.0, -1.0, 0.0]).unwrap();
        let e = Effect::weighted_projector(1.0, &s).unwrap();
        assert!(matches!(ProductRank1Effect::factorize(&e, &[2, 2]), Err(Error::NonProduct(_))));
    }

    #[test]
    fn computational_measurement_on_zero() {
        let m = Povm::from_basis(&[PureState::basis(2, 0), PureState::basis(2, 1)]).unwrap();
        let p = born(&DensityMatrix::from_pure(&PureState::basis(2, 0)), &m).unwrap();
        assert_eq!(p, vec![1.0, 0.0]);
    }

    #[test]
    fn born_dimension_mismatch() {
        let m = Povm::deterministic(2, 2, 0);
        assert!(born(&DensityMatrix::maximally_mixed(4), &m).is_err());
    }

    #[test]
    fn incomplete_povm_rejected() {
        let e = Effect::weighted_projector(1.0, &PureState::basis(2, 0)).unwrap();
        assert!(matches!(Povm::new(vec![e]), Err(Error::Incomplete(_))));
    }

    #[test]
    fn singlet_probability_values() {
        let z = BlochVector::new(0.0, 0.0, 1.0);
        let x = BlochVector::new(1.0, 0.0, 0.0);
        assert_eq!(singlet_probability(z, z).unwrap(), 0.0);
        assert_eq!(singlet_probability(z, z.neg()).unwrap(), 0.5);
        assert_eq!(singlet_probability(z, x).unwrap(), 0.25);
        assert!(singlet_probability(z.scale(0.5), x).is_err());
    }

    #[test]
    fn orthogonal_bloch_singlet_matches_trace() {
        let singlet = crate::qmath::catalog::singlet_povm();
        let psi = bloch_to_density(BlochVector::new(0.0, 0.0, 1.0)).unwrap();
        let phi = bloch_to_density(BlochVector::new(0.0, 1.0, 0.0)).unwrap();
        let p = born(&psi.tensor(&phi), &singlet).unwrap();
        assert!((p[0] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn instrument_completeness() {
        let inst = Instrument::projective(&[PureState::basis(2, 0), PureState::basis(2, 1)]).unwrap();
        assert_eq!(inst.len(), 2);
        let half = ComplexMatrix::identity(2).scale(0.5);
        assert!(matches!(Instrument::new(vec![half]), Err(Error::Incomplete(_))));
    }

    #[test]
    fn coarse_grain_sums_groups() {
        assert_eq!(coarse_grain(&[0.1, 0.2, 0.3, 0.4], &[0, 1, 1, 0], 2), vec![0.5, 0.5]);
    }
}
