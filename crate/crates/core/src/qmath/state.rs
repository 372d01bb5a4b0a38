use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::matrix::{c, sigma_x, sigma_y, sigma_z, ComplexMatrix, C64};
use crate::error::{Error, Result};

pub const STATE_TOL: f64 = 1e-12;

/// Real 3-vector parametrising a qubit state `½(I + n·σ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        BlochVector { x, y, z }
    }

    pub const fn zero() -> Self {
        BlochVector::new(0.0, 0.0, 0.0)
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        BlochVector::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, o: BlochVector) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: BlochVector) -> BlochVector {
        BlochVector::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(self, s: f64) -> BlochVector {
        BlochVector::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn add(self, o: BlochVector) -> BlochVector {
        BlochVector::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }

    pub fn sub(self, o: BlochVector) -> BlochVector {
        BlochVector::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    pub fn neg(self) -> BlochVector {
        self.scale(-1.0)
    }

    pub fn normalized(self) -> BlochVector {
        self.scale(1.0 / self.norm())
    }

    pub fn is_unit(self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    /// Fails unless `|n| ≤ 1 + 1e-12`.
    pub fn validate(self) -> Result<Self> {
        let n = self.norm();
        if !n.is_finite() || n > 1.0 + STATE_TOL {
            return Err(Error::InvalidBlochVector(n));
        }
        Ok(self)
    }

    /// Fails unless the vector has unit norm within `1e-12`.
    pub fn validate_unit(self) -> Result<Self> {
        if !self.is_unit(STATE_TOL) {
            return Err(Error::InvalidBlochVector(self.norm()));
        }
        Ok(self)
    }
}

/// Normalized state vector with canonical global phase (first nonzero
/// amplitude real and positive).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PureRepr", into = "PureRepr")]
pub struct PureState {
    amps: DVector<C64>,
}

#[derive(Serialize, Deserialize)]
struct PureRepr {
    dim: usize,
    amplitudes: Vec<[f64; 2]>,
}

impl From<PureState> for PureRepr {
    fn from(p: PureState) -> Self {
        PureRepr {
            dim: p.dim(),
            amplitudes: p.amps.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<PureRepr> for PureState {
    type Error = Error;
    fn try_from(r: PureRepr) -> Result<Self> {
        if r.amplitudes.len() != r.dim {
            return Err(Error::DimensionMismatch {
                expected: r.dim,
                found: r.amplitudes.len(),
            });
        }
        PureState::new(r.amplitudes.iter().map(|a| c(a[0], a[1])).collect())
    }
}

impl PureState {
    /// Normalizes `amplitudes` and fixes the global phase.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::OutOfRange("empty state vector".into()));
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm < 1e-300 {
            return Err(Error::OutOfRange("state vector has zero or non-finite norm".into()));
        }
        let mut amps = DVector::from_vec(amplitudes) / c(norm, 0.0);
        if let Some(lead) = amps.iter().copied().find(|z| z.norm() > 1e-12) {
            let phase = lead.conj() / lead.norm();
            amps *= phase;
        }
        Ok(PureState { amps })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        PureState::new(amplitudes.iter().map(|&a| c(a, 0.0)).collect())
    }

    /// Computational basis vector `|index⟩` in dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = vec![c(0.0, 0.0); dim];
        v[index] = c(1.0, 0.0);
        PureState { amps: DVector::from_vec(v) }
    }

    /// Qubit state with unit Bloch vector `n`.
    pub fn from_bloch(n: BlochVector) -> Result<Self> {
        let n = n.validate_unit()?;
        let theta = n.z.clamp(-1.0, 1.0).acos();
        let phi = n.y.atan2(n.x);
        let a = (0.5 * theta).cos();
        let b = C64::from_polar((0.5 * theta).sin(), phi);
        PureState::new(vec![c(a, 0.0), b])
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::from_inner(&self.amps * self.amps.adjoint())
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.amps.dotc(&other.amps)
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &PureState) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        PureState {
            amps: self.amps.kronecker(&other.amps),
        }
    }

    /// Expectation `⟨ψ|ρ|ψ⟩`.
    pub fn expectation(&self, m: &ComplexMatrix) -> f64 {
        (self.amps.adjoint() * m.inner() * &self.amps)[(0, 0)].re
    }

    /// Bloch vector of a qubit state.
    pub fn bloch(&self) -> Result<BlochVector> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: self.dim() });
        }
        let p = self.projector();
        Ok(bloch_components(&p))
    }

    /// Orthogonal qubit state `|ψ⊥⟩`.
    pub fn qubit_perp(&self) -> Result<PureState> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: self.dim() });
        }
        let a = self.amps[0];
        let b = self.amps[1];
        PureState::new(vec![-b.conj(), a.conj()])
    }

    /// Same ray as `other` within `tol` (fidelity-based).
    pub fn same_ray(&self, other: &PureState, tol: f64) -> bool {
        self.dim() == other.dim() && (1.0 - self.overlap(other)).abs() <= tol
    }

    pub fn into_density(self) -> DensityMatrix {
        DensityMatrix(self.projector())
    }
}

fn bloch_components(m: &ComplexMatrix) -> BlochVector {
    BlochVector::new(
        m.trace_product(&sigma_x()).re,
        m.trace_product(&sigma_y()).re,
        m.trace_product(&sigma_z()).re,
    )
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct DensityMatrix(ComplexMatrix);

impl From<DensityMatrix> for ComplexMatrix {
    fn from(d: DensityMatrix) -> Self {
        d.0
    }
}

impl TryFrom<ComplexMatrix> for DensityMatrix {
    type Error = Error;
    fn try_from(m: ComplexMatrix) -> Result<Self> {
        DensityMatrix::new(m)
    }
}

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::InvalidState("non-finite entries".into()));
        }
        let herm = m.hermiticity_defect();
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (defect {herm:e})")));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = m.hermitian_eigenvalues()[0];
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(DensityMatrix(m))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix(ComplexMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    pub fn from_pure(p: &PureState) -> Self {
        DensityMatrix(p.projector())
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix(self.0.tensor(&other.0))
    }

    /// `Tr[ρ P_ψ]`.
    pub fn overlap_with(&self, p: &PureState) -> f64 {
        p.expectation(&self.0)
    }
}

/// `½(I + n·σ)`.
pub fn bloch_to_density(n: BlochVector) -> Result<DensityMatrix> {
    let n = n.validate()?;
    let m = &(&(&ComplexMatrix::identity(2) + &sigma_x().scale(n.x)) + &sigma_y().scale(n.y))
        + &sigma_z().scale(n.z);
    Ok(DensityMatrix(m.scale(0.5)))
}

/// `n_k = Tr[ρ σ_k]`.
pub fn density_to_bloch(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: rho.dim() });
    }
    Ok(bloch_components(rho.matrix()))
}

/// Qubit depolarizing channel `ηρ + (1−η)I/2`.
pub fn depolarize(rho: &DensityMatrix, eta: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::OutOfRange(format!("depolarizing parameter {eta} outside [0, 1]")));
    }
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: rho.dim() });
    }
    let mixed = ComplexMatrix::identity(2).scale(0.5 * (1.0 - eta));
    Ok(DensityMatrix(&rho.matrix().scale(eta) + &mixed))
}

/// Hermitian operator with spectrum in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct Effect(ComplexMatrix);

impl From<Effect> for ComplexMatrix {
    fn from(e: Effect) -> Self {
        e.0
    }
}

impl TryFrom<ComplexMatrix> for Effect {
    type Error = Error;
    fn try_from(m: ComplexMatrix) -> Result<Self> {
        Effect::new(m)
    }
}

impl Effect {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::InvalidEffect("non-finite entries".into()));
        }
        let herm = m.hermiticity_defect();
        if herm > STATE_TOL {
            return Err(Error::InvalidEffect(format!("not Hermitian (defect {herm:e})")));
        }
        let ev = m.hermitian_eigenvalues();
        let (lo, hi) = (ev[0], ev[ev.len() - 1]);
        if lo < -STATE_TOL || hi > 1.0 + STATE_TOL {
            return Err(Error::InvalidEffect(format!("spectrum [{lo:e}, {hi:e}] outside [0, 1]")));
        }
        Ok(Effect(m))
    }

    pub fn zero(dim: usize) -> Self {
        Effect(ComplexMatrix::zeros(dim))
    }

    pub fn identity(dim: usize) -> Self {
        Effect(ComplexMatrix::identity(dim))
    }

    /// `weight · |ψ⟩⟨ψ|`.
    pub fn weighted_projector(weight: f64, state: &PureState) -> Result<Self> {
        if !(0.0..=1.0 + STATE_TOL).contains(&weight) {
            return Err(Error::InvalidEffect(format!("weight {weight} outside [0, 1]")));
        }
        Ok(Effect(state.projector().scale(weight)))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// If the effect is a rank-1 projector (trace 1, idempotent within
    /// `1e-10`), returns the state it projects on.
    pub fn as_rank_one_projector(&self) -> Result<PureState> {
        let tr = self.0.trace().re;
        let sq = &self.0 * &self.0;
        let idem = sq.max_abs_diff(&self.0);
        if (tr - 1.0).abs() > 1e-10 || idem > 1e-10 {
            return Err(Error::NotRankOne(format!("trace {tr}, idempotency defect {idem:e}")));
        }
        let (_, vecs) = self.0.hermitian_eigen();
        PureState::new(vecs.last().cloned().expect("nonempty spectrum"))
    }
}
