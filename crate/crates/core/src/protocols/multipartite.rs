//! Several senders and one receiver measuring a fully product rank-one
//! measurement.
//!
//! The first sender treats all remaining parties as one system, samples an
//! extremal `λ` of the remaining measurement and leaves a smaller instance of
//! the same problem. In configuration A every later sender learns `λ`; in
//! configuration B later senders never hear from earlier ones and instead
//! send one message for every possible history, the receiver reading the
//! entry selected by the messages it already holds.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{cdf, chunk_rng, cost_bits, draw, Encoder, SampledRun, CHUNK};
use crate::decompose::{linear_reduction, ExtremalFamily, TieBreak};
use crate::error::{Error, Result};
use crate::qmath::measure::{check_product_completeness, ProductRank1Effect};
use crate::qmath::{born, DensityMatrix, Effect, Povm, PureState};

const MAX_TABLES: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MultipartiteConfig {
    /// Broadcast: later senders know earlier messages.
    A,
    /// No sender-to-sender communication; later senders send tables.
    B,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Child {
    Sender(Box<SenderNode>),
    /// Receiver's measurement over the original outcomes.
    Receiver(Povm),
}

/// One sender's step, conditioned on the messages sent before it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SenderNode {
    pub party: usize,
    /// Original outcome index of each term handled here.
    pub outcome_ids: Vec<usize>,
    pub encoder: Encoder,
    /// Child per message.
    pub children: Vec<Child>,
}

impl SenderNode {
    pub fn alphabet(&self) -> usize {
        self.children.len()
    }

    fn cost(&self, config: MultipartiteConfig) -> u32 {
        let own = cost_bits(self.alphabet());
        let child = self
            .children
            .iter()
            .map(|c| match c {
                Child::Sender(n) => n.cost(config),
                Child::Receiver(_) => 0,
            })
            .max()
            .unwrap_or(0);
        match config {
            MultipartiteConfig::A => own + child,
            MultipartiteConfig::B => own + self.alphabet() as u32 * child,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultipartiteProtocol {
    pub config: MultipartiteConfig,
    pub root: SenderNode,
    pub senders: usize,
    pub outcomes: usize,
    pub receiver_dim: usize,
    pub cost_bits: u32,
}

/// Builds the recursive protocol for a fully product measurement whose last
/// factor belongs to the receiver.
pub fn multipartite_protocol(
    joint: &[ProductRank1Effect],
    config: MultipartiteConfig,
) -> Result<MultipartiteProtocol> {
    let dims = check_product_completeness(joint)?;
    if dims.len() < 2 {
        return Err(Error::OutOfRange("need at least one sender and a receiver".into()));
    }
    let ids: Vec<usize> = (0..joint.len()).collect();
    let root = build_node(joint, &ids, 0, joint.len())?;
    let cost_bits = root.cost(config);
    Ok(MultipartiteProtocol {
        config,
        root,
        senders: dims.len() - 1,
        outcomes: joint.len(),
        receiver_dim: *dims.last().unwrap(),
        cost_bits,
    })
}

/// Reads a measurement given as full effects into product form.
pub fn product_form(m: &Povm, dims: &[usize]) -> Result<Vec<ProductRank1Effect>> {
    m.effects().iter().map(|e| ProductRank1Effect::factorize(e, dims)).collect()
}

fn rest_ray(e: &ProductRank1Effect) -> PureState {
    let mut v = e.factors[1].clone();
    for f in &e.factors[2..] {
        v = v.tensor(f);
    }
    v
}

fn build_node(joint: &[ProductRank1Effect], ids: &[usize], party: usize, total: usize) -> Result<SenderNode> {
    let flat: Vec<ProductRank1Effect> = joint
        .iter()
        .map(|e| ProductRank1Effect { weight: e.weight, factors: vec![e.factors[0].clone(), rest_ray(e)] })
        .collect();
    let family = ExtremalFamily::new(flat.iter().map(|e| e.factors[1].clone()).collect())?;
    if family.is_empty() {
        return Err(Error::DecompositionInfeasible("no extremal measurement on the remaining parties".into()));
    }
    let full_cost = cost_bits(family.len());
    let (encoder, branches) = match linear_reduction(&flat, &family)? {
        Some(r) if r.cost_bits < full_cost => {
            let effects = r.operators.iter().map(|n| Effect::new(n.clone())).collect::<Result<Vec<_>>>()?;
            (Encoder::Measure(Povm::new(effects)?), r.subset)
        }
        _ => (
            Encoder::Decomposition { joint: flat.clone(), family: family.clone(), tie: TieBreak::LexMin },
            (0..family.len()).collect(),
        ),
    };
    let remaining = joint[0].parties() - 1;
    let children = branches
        .iter()
        .map(|&lam| {
            let ext = &family.extremals()[lam];
            if remaining == 1 {
                let d = joint[0].factors[1].dim();
                let mut effects = vec![Effect::zero(d); total];
                for (&a, &s) in ext.support.iter().zip(&ext.weights) {
                    effects[ids[a]] = Effect::new(joint[a].factors[1].projector().scale(s))?;
                }
                Ok(Child::Receiver(Povm::new(effects)?))
            } else {
                let sub: Vec<ProductRank1Effect> = ext
                    .support
                    .iter()
                    .zip(&ext.weights)
                    .map(|(&a, &s)| ProductRank1Effect { weight: s, factors: joint[a].factors[1..].to_vec() })
                    .collect();
                let sub_ids: Vec<usize> = ext.support.iter().map(|&a| ids[a]).collect();
                Ok(Child::Sender(Box::new(build_node(&sub, &sub_ids, party + 1, total)?)))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SenderNode { party, outcome_ids: ids.to_vec(), encoder, children })
}

impl MultipartiteProtocol {
    /// Exact outcome distribution for sender states `states` (one per sender,
    /// in order) and receiver state `phi`.
    pub fn distribution(&self, states: &[DensityMatrix], phi: &DensityMatrix) -> Result<Vec<f64>> {
        if states.len() != self.senders {
            return Err(Error::DimensionMismatch { expected: self.senders, found: states.len() });
        }
        if phi.dim() != self.receiver_dim {
            return Err(Error::DimensionMismatch { expected: self.receiver_dim, found: phi.dim() });
        }
        let mut out = vec![0.0; self.outcomes];
        match self.config {
            MultipartiteConfig::A => eval_broadcast(&self.root, states, phi, 1.0, &mut out)?,
            MultipartiteConfig::B => eval_tables(&self.root, states, phi, 1.0, &mut out)?,
        }
        Ok(out)
    }

    /// Number of bits sent by each sender.
    pub fn sender_bits(&self) -> Vec<u32> {
        let mut out = vec![0; self.senders];
        let mut level = vec![&self.root];
        let mut copies = 1u32;
        while !level.is_empty() {
            let party = level[0].party;
            let own = level.iter().map(|n| cost_bits(n.alphabet())).max().unwrap_or(0);
            out[party] = match self.config {
                MultipartiteConfig::A => own,
                MultipartiteConfig::B => copies * own,
            };
            copies *= level.iter().map(|n| n.alphabet() as u32).max().unwrap_or(1);
            level = level
                .iter()
                .flat_map(|n| n.children.iter())
                .filter_map(|c| match c {
                    Child::Sender(n) => Some(n.as_ref()),
                    Child::Receiver(_) => None,
                })
                .collect();
        }
        out
    }
    /// Monte Carlo run: every sender draws its message (configuration B: its
    /// whole table) and the receiver measures the selected POVM.
    /// Deterministic for a given seed and independent of thread count.
    pub fn sample(&self, states: &[DensityMatrix], phi: &DensityMatrix, n: u64, seed: u64) -> Result<SampledRun> {
        if n == 0 {
            return Err(Error::OutOfRange("sample count must be at least 1".into()));
        }
        if states.len() != self.senders {
            return Err(Error::DimensionMismatch { expected: self.senders, found: states.len() });
        }
        if phi.dim() != self.receiver_dim {
            return Err(Error::DimensionMismatch { expected: self.receiver_dim, found: phi.dim() });
        }
        let tree = prepare(&self.root, states, 0, phi)?;
        let outcomes = self.outcomes;
        let chunks = n.div_ceil(CHUNK as u64);
        let counts = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = chunk_rng(seed, c);
                let size = (n - c * CHUNK as u64).min(CHUNK as u64);
                let mut local = vec![0u64; outcomes];
                for _ in 0..size {
                    let k = match self.config {
                        MultipartiteConfig::A => walk_broadcast(&tree, &mut rng),
                        MultipartiteConfig::B => walk_tables(&tree, &mut rng),
                    };
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
}

/// Sender tree with every distribution tabulated as a CDF.
enum Prepared {
    Receiver(Vec<f64>),
    Sender { cdf: Vec<f64>, children: Vec<Prepared> },
}

fn prepare(node: &SenderNode, states: &[DensityMatrix], depth: usize, phi: &DensityMatrix) -> Result<Prepared> {
    let children = node
        .children
        .iter()
        .map(|c| match c {
            Child::Receiver(povm) => Ok(Prepared::Receiver(cdf(&born(phi, povm)?))),
            Child::Sender(next) => prepare(next, states, depth + 1, phi),
        })
        .collect::<Result<_>>()?;
    Ok(Prepared::Sender { cdf: cdf(&node.encoder.distribution(&states[depth])?), children })
}

fn walk_broadcast<R: Rng>(mut node: &Prepared, rng: &mut R) -> usize {
    loop {
        match node {
            Prepared::Receiver(c) => return draw(c, rng.random()),
            Prepared::Sender { cdf, children } => node = &children[draw(cdf, rng.random())],
        }
    }
}

fn walk_tables<R: Rng>(node: &Prepared, rng: &mut R) -> usize {
    let Prepared::Sender { cdf, children } = node else {
        return walk_broadcast(node, rng);
    };
    let m = draw(cdf, rng.random());
    if matches!(children[0], Prepared::Receiver(_)) {
        return walk_broadcast(&children[m], rng);
    }
    // The next sender fills every entry without learning `m`.
    let table: Vec<usize> = children
        .iter()
        .map(|c| match c {
            Prepared::Sender { cdf, .. } => draw(cdf, rng.random()),
            Prepared::Receiver(_) => 0,
        })
        .collect();
    let Prepared::Sender { children: next, .. } = &children[m] else {
        unreachable!("sender levels are uniform");
    };
    match &next[table[m]] {
        leaf @ Prepared::Receiver(_) => walk_broadcast(leaf, rng),
        deeper => walk_tables(deeper, rng),
    }
}

fn add_receiver(povm: &Povm, phi: &DensityMatrix, weight: f64, out: &mut [f64]) -> Result<()> {
    for (o, p) in out.iter_mut().zip(born(phi, povm)?) {
        *o += weight * p;
    }
    Ok(())
}

fn eval_broadcast(node: &SenderNode, states: &[DensityMatrix], phi: &DensityMatrix, weight: f64, out: &mut [f64]) -> Result<()> {
    let mu = node.encoder.distribution(&states[0])?;
    for (m, &w) in mu.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        match &node.children[m] {
            Child::Receiver(povm) => add_receiver(povm, phi, weight * w, out)?,
            Child::Sender(next) => eval_broadcast(next, &states[1..], phi, weight * w, out)?,
        }
    }
    Ok(())
}

/// The next sender fills one table entry per message `m` of this sender
/// without seeing `m`; every table is enumerated with its probability.
fn eval_tables(node: &SenderNode, states: &[DensityMatrix], phi: &DensityMatrix, weight: f64, out: &mut [f64]) -> Result<()> {
    let mu = node.encoder.distribution(&states[0])?;
    let senders: Vec<&SenderNode> = node
        .children
        .iter()
        .filter_map(|c| match c {
            Child::Sender(n) => Some(n.as_ref()),
            Child::Receiver(_) => None,
        })
        .collect();
    if senders.is_empty() {
        for (m, &w) in mu.iter().enumerate() {
            if let Child::Receiver(povm) = &node.children[m] {
                add_receiver(povm, phi, weight * w, out)?;
            }
        }
        return Ok(());
    }
    let rows: Vec<Vec<f64>> = senders
        .iter()
        .map(|n| n.encoder.distribution(&states[1]))
        .collect::<Result<_>>()?;
    let count = rows.iter().try_fold(1usize, |acc, r| acc.checked_mul(r.len())).unwrap_or(usize::MAX);
    if count > MAX_TABLES {
        return Err(Error::OutOfRange(format!("{count} message tables exceed the evaluation limit")));
    }
    let mut table = vec![0usize; rows.len()];
    for _ in 0..count {
        let p: f64 = table.iter().zip(&rows).map(|(&t, r)| r[t]).product();
        if p > 0.0 {
            for (m, &w) in mu.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let next = senders[m];
                let entry = table[m];
                let scaled = weight * w * p;
                match &next.children[entry] {
                    Child::Receiver(povm) => add_receiver(povm, phi, scaled, out)?,
                    Child::Sender(deeper) => eval_tables(deeper, &states[2..], phi, scaled, out)?,
                }
            }
        }
        for k in (0..table.len()).rev() {
            table[k] += 1;
            if table[k] < rows[k].len() {
                break;
            }
            table[k] = 0;
        }
    }
    Ok(())
}
