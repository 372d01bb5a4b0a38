//! Simulation of orthonormal product bases of `C² ⊗ C^d` in block form.
//!
//! A block is `{|α⟩|β_j⟩} ∪ {|α⊥⟩|β̃_j⟩}` where `{β_j}` and `{β̃_j}` are two
//! orthonormal bases of the same receiver subspace. The sender measures
//! `{α_i, α_i⊥}` on an independent copy of `ψ` for every block and sends one
//! bit per block; the receiver's block subspace selects which bit to read.

use serde::{Deserialize, Serialize};

use super::{Encoder, OneRoundProtocol, SharedRandomness};
use crate::error::{Error, Result};
use crate::qmath::measure::ProductRank1Effect;
use crate::qmath::{ComplexMatrix, Effect, Povm, PureState};

const TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductBlock {
    pub alpha: PureState,
    pub beta: Vec<PureState>,
    pub beta_tilde: Vec<PureState>,
}

impl ProductBlock {
    pub fn alpha_perp(&self) -> PureState {
        self.alpha.qubit_perp().expect("alpha is a qubit state")
    }

    pub fn subspace_projector(&self) -> ComplexMatrix {
        sum_projectors(&self.beta)
    }
}

fn sum_projectors(states: &[PureState]) -> ComplexMatrix {
    let d = states[0].dim();
    states.iter().fold(ComplexMatrix::zeros(d), |acc, s| &acc + &s.projector())
}

fn orthonormal(states: &[PureState]) -> bool {
    states.iter().enumerate().all(|(i, a)| {
        states[i + 1..].iter().all(|b| a.inner(b).norm() < TOL)
    })
}

/// Orthonormal product basis of `C² ⊗ C^d` grouped into blocks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<ProductBlock>", into = "Vec<ProductBlock>")]
pub struct BlockProductBasis {
    blocks: Vec<ProductBlock>,
}

impl TryFrom<Vec<ProductBlock>> for BlockProductBasis {
    type Error = Error;
    fn try_from(b: Vec<ProductBlock>) -> Result<Self> {
        BlockProductBasis::new(b)
    }
}

impl From<BlockProductBasis> for Vec<ProductBlock> {
    fn from(b: BlockProductBasis) -> Self {
        b.blocks
    }
}

/// One branch of the receiver's decision: block, bit and the basis read.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchRow {
    pub block: usize,
    pub bit: u8,
    pub sender_state: PureState,
    pub receiver_basis: Vec<PureState>,
}

impl BlockProductBasis {
    pub fn new(blocks: Vec<ProductBlock>) -> Result<Self> {
        let bad = |m: &str| Err(Error::NotBlockForm(m.to_string()));
        if blocks.is_empty() {
            return bad("no blocks");
        }
        let d = match blocks[0].beta.first() {
            Some(b) => b.dim(),
            None => return bad("empty block"),
        };
        let mut total = 0;
        for (i, b) in blocks.iter().enumerate() {
            if b.alpha.dim() != 2 {
                return bad("sender factor must be a qubit");
            }
            if b.beta.is_empty() || b.beta.len() != b.beta_tilde.len() {
                return bad("each block needs equally many β and β̃ states");
            }
            if b.beta.iter().chain(&b.beta_tilde).any(|s| s.dim() != d) {
                return Err(Error::DimensionMismatch { expected: d, found: 0 });
            }
            if !orthonormal(&b.beta) || !orthonormal(&b.beta_tilde) {
                return Err(Error::NotBlockForm(format!("block {i} states are not orthonormal")));
            }
            if sum_projectors(&b.beta).max_abs_diff(&sum_projectors(&b.beta_tilde)) > TOL {
                return Err(Error::NotBlockForm(format!("block {i}: β and β̃ span different subspaces")));
            }
            for later in &blocks[i + 1..] {
                if b.beta.iter().any(|x| later.beta.iter().any(|y| x.inner(y).norm() > TOL)) {
                    return bad("block subspaces overlap");
                }
            }
            total += b.beta.len();
        }
        if total != d {
            return Err(Error::NotBlockForm(format!("block subspaces cover {total} of {d} dimensions")));
        }
        Ok(BlockProductBasis { blocks })
    }

    /// Groups a raw product basis by the sender's projector pair. Returns the
    /// basis and, for each of its elements, the index in `elements`.
    pub fn discover(elements: &[(PureState, PureState)]) -> Result<(Self, Vec<usize>)> {
        let mut blocks: Vec<ProductBlock> = Vec::new();
        let mut origin: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        for (k, (a, b)) in elements.iter().enumerate() {
            if a.dim() != 2 {
                return Err(Error::NotBlockForm("sender factor must be a qubit".into()));
            }
            let perp = a.qubit_perp()?;
            match blocks.iter().position(|bl| bl.alpha.same_ray(a, TOL) || bl.alpha.same_ray(&perp, TOL)) {
                Some(i) if blocks[i].alpha.same_ray(a, TOL) => {
                    blocks[i].beta.push(b.clone());
                    origin[i].0.push(k);
                }
                Some(i) => {
                    blocks[i].beta_tilde.push(b.clone());
                    origin[i].1.push(k);
                }
                None => {
                    blocks.push(ProductBlock { alpha: a.clone(), beta: vec![b.clone()], beta_tilde: vec![] });
                    origin.push((vec![k], vec![]));
                }
            }
        }
        let order = origin.into_iter().flat_map(|(x, y)| x.into_iter().chain(y)).collect();
        Ok((BlockProductBasis::new(blocks)?, order))
    }

    /// Basis on `C² ⊗ C⁶` with three blocks using the σ_z, σ_x and σ_y
    /// eigenbases on the sender's side.
    pub fn three_block_example() -> Self {
        use crate::qmath::C64;
        let e = |k: usize| PureState::basis(6, k);
        let pm = |i: usize, j: usize, sign: f64| {
            let mut v = vec![0.0; 6];
            v[i] = 1.0;
            v[j] = sign;
            PureState::from_real(&v).unwrap()
        };
        let y_plus = PureState::new(vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)]).unwrap();
        let block = |alpha: PureState, i: usize| ProductBlock {
            alpha,
            beta: vec![e(i), e(i + 1)],
            beta_tilde: vec![pm(i, i + 1, 1.0), pm(i, i + 1, -1.0)],
        };
        BlockProductBasis::new(vec![
            block(PureState::basis(2, 0), 0),
            block(PureState::from_real(&[1.0, 1.0]).unwrap(), 2),
            block(y_plus, 4),
        ])
        .expect("valid block form")
    }

    pub fn blocks(&self) -> &[ProductBlock] {
        &self.blocks
    }

    pub fn receiver_dim(&self) -> usize {
        self.blocks[0].beta[0].dim()
    }

    /// Elements in protocol order: per block, `α ⊗ β_j` then `α⊥ ⊗ β̃_j`.
    pub fn elements(&self) -> Vec<(PureState, PureState)> {
        let mut out = Vec::new();
        for b in &self.blocks {
            let ap = b.alpha_perp();
            out.extend(b.beta.iter().map(|s| (b.alpha.clone(), s.clone())));
            out.extend(b.beta_tilde.iter().map(|s| (ap.clone(), s.clone())));
        }
        out
    }

    pub fn product_effects(&self) -> Vec<ProductRank1Effect> {
        self.elements()
            .into_iter()
            .map(|(a, b)| ProductRank1Effect::new(1.0, vec![a, b]).expect("unit weight"))
            .collect()
    }

    /// Receiver's first measurement: projectors onto the block subspaces.
    pub fn subspace_projectors(&self) -> Vec<ComplexMatrix> {
        self.blocks.iter().map(ProductBlock::subspace_projector).collect()
    }

    pub fn branch_table(&self) -> Vec<BranchRow> {
        let mut rows = Vec::new();
        for (i, b) in self.blocks.iter().enumerate() {
            rows.push(BranchRow { block: i, bit: 0, sender_state: b.alpha.clone(), receiver_basis: b.beta.clone() });
            rows.push(BranchRow { block: i, bit: 1, sender_state: b.alpha_perp(), receiver_basis: b.beta_tilde.clone() });
        }
        rows
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem3Protocol {
    pub protocol: OneRoundProtocol,
    pub basis: BlockProductBasis,
    pub cost_bits: u32,
}

/// One bit per block: bit `i` is 0 when the sender's `{α_i, α_i⊥}`
/// measurement returns `α_i`. Outcomes follow [`BlockProductBasis::elements`].
pub fn theorem3_protocol(basis: &BlockProductBasis) -> Result<Theorem3Protocol> {
    let n = basis.blocks.len();
    if n > 20 {
        return Err(Error::OutOfRange(format!("{n} blocks exceed the message table limit")));
    }
    let encoder = Encoder::Product(
        basis
            .blocks
            .iter()
            .map(|b| Povm::from_basis(&[b.alpha.clone(), b.alpha_perp()]).map(Encoder::Measure))
            .collect::<Result<_>>()?,
    );
    let d = basis.receiver_dim();
    let mut decoders = Vec::with_capacity(1 << n);
    for m in 0..(1usize << n) {
        let mut effects = Vec::new();
        for (i, b) in basis.blocks.iter().enumerate() {
            let bit = (m >> (n - 1 - i)) & 1;
            for s in &b.beta {
                effects.push(if bit == 0 { Effect::weighted_projector(1.0, s)? } else { Effect::zero(d) });
            }
            for s in &b.beta_tilde {
                effects.push(if bit == 1 { Effect::weighted_projector(1.0, s)? } else { Effect::zero(d) });
            }
        }
        decoders.push(Povm::new(effects)?);
    }
    let protocol = OneRoundProtocol::new(SharedRandomness::single(), vec![encoder], decoders)?;
    Ok(Theorem3Protocol { protocol, basis: basis.clone(), cost_bits: n as u32 })
}
