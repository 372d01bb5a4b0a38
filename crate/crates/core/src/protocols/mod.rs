//! One-round prepare-and-measure protocols with shared randomness.
//!
//! A protocol draws an atom `x` of shared randomness, lets the sender map
//! their classical description of `ψ` to a message `m`, and has the receiver
//! measure `φ` with a POVM selected by `(x, m)`. The receiver never sees `ψ`
//! and the sender never sees `φ`.

pub mod multipartite;
pub mod product_basis;
pub mod rac;
pub mod separable;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decompose::{effective_povm, mixture_weights_with, ExtremalFamily, TieBreak};
use crate::error::{Error, Result};
use crate::qmath::measure::ProductRank1Effect;
use crate::qmath::{born, DensityMatrix, Povm};

pub use multipartite::{multipartite_protocol, MultipartiteConfig, MultipartiteProtocol};
pub use product_basis::{theorem3_protocol, BlockProductBasis, ProductBlock};
pub use rac::{rac_classical_exhaustive, rac_qubit, rac_via_simulator};
pub use separable::{theorem4_protocol, Theorem4Protocol};

/// Tolerance on normalisation of probability vectors.
pub const PROB_TOL: f64 = 1e-12;

/// Number of bits needed to send one of `n` messages.
pub fn cost_bits(n: usize) -> u32 {
    crate::decompose::bits_for(n)
}

pub(crate) fn check_distribution(p: &[f64], what: &str) -> Result<()> {
    let s: f64 = p.iter().sum();
    if p.iter().any(|&v| !(v >= -PROB_TOL)) || (s - 1.0).abs() > PROB_TOL * (p.len().max(1) as f64) {
        return Err(Error::MalformedProtocol(format!("{what} is not a distribution (sum {s})")));
    }
    Ok(())
}

/// Finite shared randomness `x ~ p(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SharedRandomness {
    weights: Vec<f64>,
}

impl TryFrom<Vec<f64>> for SharedRandomness {
    type Error = Error;
    fn try_from(w: Vec<f64>) -> Result<Self> {
        SharedRandomness::new(w)
    }
}

impl From<SharedRandomness> for Vec<f64> {
    fn from(s: SharedRandomness) -> Self {
        s.weights
    }
}

impl SharedRandomness {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::MalformedProtocol("atom weights must be positive".into()));
        }
        check_distribution(&weights, "shared randomness")?;
        Ok(SharedRandomness { weights })
    }

    pub fn single() -> Self {
        SharedRandomness { weights: vec![1.0] }
    }

    pub fn uniform(n: usize) -> Self {
        SharedRandomness { weights: vec![1.0 / n as f64; n] }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Sender's rule mapping `ψ` to a message distribution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encoder {
    /// Distribution independent of `ψ`.
    Fixed(Vec<f64>),
    /// Outcome statistics of a measurement of `ψ`.
    Measure(Povm),
    /// Independent components; the first is the most significant digit.
    Product(Vec<Encoder>),
    /// Message `(m₁, m₂)` where the encoder of `m₂` depends on `m₁`; every
    /// entry of `rest` has the same alphabet.
    Sequential { first: Box<Encoder>, rest: Vec<Encoder> },
    /// Mixture weights of the decomposition of the effective measurement of
    /// `joint` conditioned on `ψ`.
    Decomposition { joint: Vec<ProductRank1Effect>, family: ExtremalFamily, tie: TieBreak },
    /// Lookup on a declared grid of states, matched within `1e-9`.
    Table { states: Vec<DensityMatrix>, rows: Vec<Vec<f64>> },
}

impl Encoder {
    pub fn point(alphabet: usize, m: usize) -> Encoder {
        let mut p = vec![0.0; alphabet];
        p[m] = 1.0;
        Encoder::Fixed(p)
    }

    pub fn alphabet(&self) -> usize {
        match self {
            Encoder::Fixed(p) => p.len(),
            Encoder::Measure(m) => m.len(),
            Encoder::Product(parts) => parts.iter().map(Encoder::alphabet).product(),
            Encoder::Sequential { first, rest } => first.alphabet() * rest.first().map_or(1, Encoder::alphabet),
            Encoder::Decomposition { family, .. } => family.len(),
            Encoder::Table { rows, .. } => rows.first().map_or(0, Vec::len),
        }
    }

    /// Checks internal consistency: alphabet agreement and normalisation of
    /// fixed parts.
    pub fn validate(&self) -> Result<()> {
        match self {
            Encoder::Fixed(p) => check_distribution(p, "fixed encoder"),
            Encoder::Measure(_) => Ok(()),
            Encoder::Product(parts) => {
                if parts.is_empty() {
                    return Err(Error::MalformedProtocol("empty product encoder".into()));
                }
                parts.iter().try_for_each(Encoder::validate)
            }
            Encoder::Sequential { first, rest } => {
                first.validate()?;
                if rest.len() != first.alphabet() {
                    return Err(Error::MalformedProtocol("sequential encoder needs one branch per first message".into()));
                }
                let l = rest[0].alphabet();
                for r in rest {
                    r.validate()?;
                    if r.alphabet() != l {
                        return Err(Error::MalformedProtocol("sequential branches differ in alphabet".into()));
                    }
                }
                Ok(())
            }
            Encoder::Decomposition { joint, family, .. } => {
                if joint.len() != family.projectors().len() {
                    return Err(Error::MalformedProtocol("family does not match the joint outcomes".into()));
                }
                Ok(())
            }
            Encoder::Table { states, rows } => {
                if states.len() != rows.len() || rows.is_empty() {
                    return Err(Error::MalformedProtocol("table needs one row per state".into()));
                }
                let l = rows[0].len();
                for r in rows {
                    if r.len() != l {
                        return Err(Error::MalformedProtocol("table rows differ in length".into()));
                    }
                    check_distribution(r, "table row")?;
                }
                Ok(())
            }
        }
    }

    /// Message distribution for the state `ψ`.
    pub fn distribution(&self, psi: &DensityMatrix) -> Result<Vec<f64>> {
        match self {
            Encoder::Fixed(p) => Ok(p.clone()),
            Encoder::Measure(m) => Ok(born(psi, m)?.into_iter().map(|v| v.max(0.0)).collect()),
            Encoder::Product(parts) => {
                let mut out = vec![1.0];
                for part in parts {
                    let q = part.distribution(psi)?;
                    out = out.iter().flat_map(|a| q.iter().map(move |b| a * b)).collect();
                }
                Ok(out)
            }
            Encoder::Sequential { first, rest } => {
                let p = first.distribution(psi)?;
                let mut out = Vec::with_capacity(self.alphabet());
                for (m, pm) in p.iter().enumerate() {
                    if *pm == 0.0 {
                        out.extend(std::iter::repeat_n(0.0, rest[m].alphabet()));
                    } else {
                        out.extend(rest[m].distribution(psi)?.into_iter().map(|q| pm * q));
                    }
                }
                Ok(out)
            }
            Encoder::Decomposition { joint, family, tie } => {
                let target = effective_povm(joint, psi)?;
                Ok(mixture_weights_with(&target, family, *tie)?.mu)
            }
            Encoder::Table { states, rows } => {
                for (s, r) in states.iter().zip(rows) {
                    if s.dim() == psi.dim() && s.matrix().max_abs_diff(psi.matrix()) < 1e-9 {
                        return Ok(r.clone());
                    }
                }
                Err(Error::OutOfRange("state is not on the encoder's grid".into()))
            }
        }
    }
}

/// One-round protocol: shared randomness, an encoder per atom and a decoder
/// POVM per `(atom, message)`, stored at index `atom · L + m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneRoundProtocol {
    pub randomness: SharedRandomness,
    pub encoders: Vec<Encoder>,
    pub decoders: Vec<Povm>,
}

impl OneRoundProtocol {
    pub fn new(randomness: SharedRandomness, encoders: Vec<Encoder>, decoders: Vec<Povm>) -> Result<Self> {
        let p = OneRoundProtocol { randomness, encoders, decoders };
        p.validate()?;
        Ok(p)
    }

    /// Single atom, single message, fixed measurement.
    pub fn trivial(m: Povm) -> Self {
        OneRoundProtocol {
            randomness: SharedRandomness::single(),
            encoders: vec![Encoder::Fixed(vec![1.0])],
            decoders: vec![m],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.randomness.len();
        if self.encoders.len() != k {
            return Err(Error::MalformedProtocol(format!("{} encoders for {k} atoms", self.encoders.len())));
        }
        let l = self.encoders[0].alphabet();
        for e in &self.encoders {
            e.validate()?;
            if e.alphabet() != l {
                return Err(Error::MalformedProtocol("encoders differ in alphabet".into()));
            }
        }
        if self.decoders.len() != k * l {
            return Err(Error::MalformedProtocol(format!("{} decoders, expected {}", self.decoders.len(), k * l)));
        }
        let (d, n) = (self.decoders[0].dim(), self.decoders[0].len());
        if self.decoders.iter().any(|m| m.dim() != d || m.len() != n) {
            return Err(Error::MalformedProtocol("decoders differ in dimension or outcome count".into()));
        }
        Ok(())
    }

    pub fn alphabet(&self) -> usize {
        self.encoders[0].alphabet()
    }

    pub fn cost_bits(&self) -> u32 {
        cost_bits(self.alphabet())
    }

    pub fn outcomes(&self) -> usize {
        self.decoders[0].len()
    }

    pub fn receiver_dim(&self) -> usize {
        self.decoders[0].dim()
    }

    pub fn decoder(&self, atom: usize, m: usize) -> &Povm {
        &self.decoders[atom * self.alphabet() + m]
    }
}

/// Exact outcome distribution `Σ_x Σ_m p(x) p(m|x,ψ) Tr[φ M^{m,x}]`.
pub fn run_analytic(p: &OneRoundProtocol, psi: &DensityMatrix, phi: &DensityMatrix) -> Result<Vec<f64>> {
    if phi.dim() != p.receiver_dim() {
        return Err(Error::DimensionMismatch { expected: p.receiver_dim(), found: phi.dim() });
    }
    let mut out = vec![0.0; p.outcomes()];
    for (x, &px) in p.randomness.weights().iter().enumerate() {
        let q = p.encoders[x].distribution(psi)?;
        for (m, &pm) in q.iter().enumerate() {
            if pm == 0.0 {
                continue;
            }
            for (o, v) in out.iter_mut().zip(born(phi, p.decoder(x, m))?) {
                *o += px * pm * v;
            }
        }
    }
    Ok(out)
}

/// Samples processed per random stream.
pub const CHUNK: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledRun {
    pub samples: u64,
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
    pub std_errors: Vec<f64>,
}

impl SampledRun {
    pub fn from_counts(counts: Vec<u64>) -> Self {
        let n: u64 = counts.iter().sum();
        let frequencies: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
        let std_errors = frequencies.iter().map(|f| (f * (1.0 - f) / n as f64).sqrt()).collect();
        SampledRun { samples: n, counts, frequencies, std_errors }
    }

    /// Largest `|f − p| / s.e.`, with zero-variance outcomes compared exactly.
    pub fn max_z(&self, exact: &[f64]) -> f64 {
        self.frequencies
            .iter()
            .zip(&self.std_errors)
            .zip(exact)
            .map(|((f, s), p)| {
                let d = (f - p).abs();
                if *s > 0.0 {
                    d / s
                } else if d < 1e-12 {
                    0.0
                } else {
                    f64::INFINITY
                }
            })
            .fold(0.0, f64::max)
    }
}

pub(crate) fn cdf(p: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    p.iter()
        .map(|v| {
            acc += v.max(0.0);
            acc
        })
        .collect()
}

/// Index drawn from a cumulative table; `u` uniform in `[0, 1)`.
pub(crate) fn draw(cdf: &[f64], u: f64) -> usize {
    let u = u * cdf[cdf.len() - 1];
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

/// Random stream of chunk `chunk`: the master seed selects the ChaCha key and
/// the chunk index selects the stream.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Monte Carlo run of the protocol: atom, message and outcome are drawn in
/// sequence. Deterministic for a given seed and independent of thread count.
pub fn run_sampled(
    p: &OneRoundProtocol,
    psi: &DensityMatrix,
    phi: &DensityMatrix,
    n: u64,
    seed: u64,
) -> Result<SampledRun> {
    if n == 0 {
        return Err(Error::OutOfRange("sample count must be at least 1".into()));
    }
    if phi.dim() != p.receiver_dim() {
        return Err(Error::DimensionMismatch { expected: p.receiver_dim(), found: phi.dim() });
    }
    let l = p.alphabet();
    let atom_cdf = cdf(p.randomness.weights());
    let msg_cdf: Vec<Vec<f64>> = p
        .encoders
        .iter()
        .map(|e| e.distribution(psi).map(|q| cdf(&q)))
        .collect::<Result<_>>()?;
    let out_cdf: Vec<Vec<f64>> = p
        .decoders
        .iter()
        .map(|m| born(phi, m).map(|q| cdf(&q)))
        .collect::<Result<_>>()?;
    let outcomes = p.outcomes();
    let chunks = n.div_ceil(CHUNK as u64);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c);
            let size = (n - c * CHUNK as u64).min(CHUNK as u64);
            let mut local = vec![0u64; outcomes];
            for _ in 0..size {
                let x = draw(&atom_cdf, rng.random());
                let m = draw(&msg_cdf[x], rng.random());
                let k = draw(&out_cdf[x * l + m], rng.random());
                local[k] += 1;
            }
            local
        })
        .reduce(
            || vec![0u64; outcomes],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(SampledRun::from_counts(counts))
}

/// Anything that produces outcome statistics for `(ψ, φ)`.
pub trait Simulator {
    fn distribution(&self, psi: &DensityMatrix, phi: &DensityMatrix) -> Result<Vec<f64>>;
}

impl Simulator for OneRoundProtocol {
    fn distribution(&self, psi: &DensityMatrix, phi: &DensityMatrix) -> Result<Vec<f64>> {
        run_analytic(self, psi, phi)
    }
}

/// Reference simulator returning the quantum statistics on `ψ ⊗ φ`.
#[derive(Clone, Debug)]
pub struct BornOracle {
    pub measurement: Povm,
}

impl Simulator for BornOracle {
    fn distribution(&self, psi: &DensityMatrix, phi: &DensityMatrix) -> Result<Vec<f64>> {
        born(&psi.tensor(phi), &self.measurement)
    }
}
