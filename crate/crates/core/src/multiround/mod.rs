//! Finite back-and-forth protocols and their collapse to one round.
//!
//! Rounds alternate between the sender (who holds `ψ`) and the receiver
//! (who holds `φ` and applies instruments, announcing the outcome). A final
//! measurement selected by the whole transcript yields the outcome `b`.
//!
//! The last three rounds `A, B, A` collapse into one sender round: the sender
//! sends her first message together with the reply she would give to every
//! possible receiver outcome, and the receiver's instrument and final
//! measurement merge into `Σ_k K_k† π^b K_k`. Repeating this reduces any odd
//! depth to a single message.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocols::{cost_bits, Encoder, OneRoundProtocol, SharedRandomness};
use crate::qmath::random::{flat_simplex, random_instrument, random_povm};
use crate::qmath::{ComplexMatrix, DensityMatrix, Effect, Instrument, Povm};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Round {
    /// Sender round; `coins[atom · H + history]` gives the message law.
    Sender { alphabet: usize, coins: Vec<Encoder> },
    /// Receiver round; `instruments[atom · H + history]` acts on `φ`.
    Receiver { alphabet: usize, instruments: Vec<Instrument> },
}

impl Round {
    pub fn alphabet(&self) -> usize {
        match self {
            Round::Sender { alphabet, .. } | Round::Receiver { alphabet, .. } => *alphabet,
        }
    }

    fn entries(&self) -> usize {
        match self {
            Round::Sender { coins, .. } => coins.len(),
            Round::Receiver { instruments, .. } => instruments.len(),
        }
    }

    pub fn is_sender(&self) -> bool {
        matches!(self, Round::Sender { .. })
    }
}

/// Interactive protocol; histories are mixed-radix indices of the messages
/// exchanged so far, earliest message most significant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractiveProtocol {
    pub randomness: SharedRandomness,
    pub rounds: Vec<Round>,
    /// `finals[atom · H + history]` over the full transcript.
    pub finals: Vec<Povm>,
}

/// Collapsed sender message: the first message and the reply planned for
/// every receiver outcome.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapsedMessage {
    pub m1: usize,
    pub table: Vec<usize>,
}

impl CollapsedMessage {
    pub fn decode(index: usize, reply_alphabet: usize, k: usize) -> Self {
        let width = reply_alphabet.pow(k as u32);
        let mut rest = index % width;
        let mut table = vec![0; k];
        for slot in table.iter_mut().rev() {
            *slot = rest % reply_alphabet;
            rest /= reply_alphabet;
        }
        CollapsedMessage { m1: index / width, table }
    }

    pub fn encode(&self, reply_alphabet: usize) -> usize {
        let width = reply_alphabet.pow(self.table.len() as u32);
        self.m1 * width + self.table.iter().fold(0, |acc, &e| acc * reply_alphabet + e)
    }
}

impl InteractiveProtocol {
    pub fn new(randomness: SharedRandomness, rounds: Vec<Round>, finals: Vec<Povm>) -> Result<Self> {
        let p = InteractiveProtocol { randomness, rounds, finals };
        p.validate()?;
        Ok(p)
    }

    /// Number of histories before round `r` (`r = rounds.len()` for finals).
    pub fn histories(&self, r: usize) -> usize {
        self.rounds[..r].iter().map(Round::alphabet).product()
    }

    pub fn depth(&self) -> usize {
        self.rounds.len()
    }

    pub fn receiver_dim(&self) -> usize {
        self.finals[0].dim()
    }

    pub fn outcomes(&self) -> usize {
        self.finals[0].len()
    }

    pub fn validate(&self) -> Result<()> {
        let atoms = self.randomness.len();
        if self.finals.is_empty() {
            return Err(Error::MalformedProtocol("no final measurements".into()));
        }
        let d = self.finals[0].dim();
        for (r, round) in self.rounds.iter().enumerate() {
            let want = atoms * self.histories(r);
            if round.alphabet() == 0 || round.entries() != want {
                return Err(Error::MalformedProtocol(format!("round {r} has {} entries, expected {want}", round.entries())));
            }
            match round {
                Round::Sender { alphabet, coins } => {
                    for c in coins {
                        c.validate()?;
                        if c.alphabet() != *alphabet {
                            return Err(Error::MalformedProtocol(format!("round {r} coin alphabet mismatch")));
                        }
                    }
                }
                Round::Receiver { alphabet, instruments } => {
                    if instruments.iter().any(|i| i.len() != *alphabet || i.dim() != d) {
                        return Err(Error::MalformedProtocol(format!("round {r} instrument mismatch")));
                    }
                }
            }
        }
        let want = atoms * self.histories(self.rounds.len());
        if self.finals.len() != want {
            return Err(Error::MalformedProtocol(format!("{} finals, expected {want}", self.finals.len())));
        }
        let n = self.finals[0].len();
        if self.finals.iter().any(|m| m.dim() != d || m.len() != n) {
            return Err(Error::MalformedProtocol("finals differ in dimension or outcome count".into()));
        }
        Ok(())
    }

    /// Wraps a one-round protocol as sender, trivial receiver, trivial sender.
    pub fn from_one_round(p: &OneRoundProtocol) -> Self {
        let atoms = p.randomness.len();
        let l = p.alphabet();
        let d = p.receiver_dim();
        InteractiveProtocol {
            randomness: p.randomness.clone(),
            rounds: vec![
                Round::Sender { alphabet: l, coins: p.encoders.clone() },
                Round::Receiver { alphabet: 1, instruments: vec![Instrument::trivial(d); atoms * l] },
                Round::Sender { alphabet: 1, coins: vec![Encoder::Fixed(vec![1.0]); atoms * l] },
            ],
            finals: p.decoders.clone(),
        }
    }
}

/// Sender, receiver, sender protocol.
pub type ThreeRoundProtocol = InteractiveProtocol;

/// Exact distribution of a three-round protocol.
pub fn run_three_round(p: &ThreeRoundProtocol, psi: &DensityMatrix, phi: &DensityMatrix) -> Result<Vec<f64>> {
    if p.depth() != 3 || !p.rounds[0].is_sender() || p.rounds[1].is_sender() || !p.rounds[2].is_sender() {
        return Err(Error::MalformedProtocol("expected sender, receiver, sender rounds".into()));
    }
    evaluate(p, psi, phi)
}

/// Exact outcome distribution by direct summation over transcripts.
pub fn evaluate(p: &InteractiveProtocol, psi: &DensityMatrix, phi: &DensityMatrix) -> Result<Vec<f64>> {
    if phi.dim() != p.receiver_dim() {
        return Err(Error::DimensionMismatch { expected: p.receiver_dim(), found: phi.dim() });
    }
    let mut out = vec![0.0; p.outcomes()];
    for (x, &px) in p.randomness.weights().iter().enumerate() {
        walk(p, psi, x, 0, 0, px, phi.matrix().clone(), &mut out)?;
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn walk(
    p: &InteractiveProtocol,
    psi: &DensityMatrix,
    x: usize,
    r: usize,
    hist: usize,
    weight: f64,
    rho: ComplexMatrix,
    out: &mut [f64],
) -> Result<()> {
    let h = p.histories(r);
    if r == p.rounds.len() {
        for (o, e) in out.iter_mut().zip(p.finals[x * h + hist].effects()) {
            *o += weight * rho.trace_product(e.matrix()).re;
        }
        return Ok(());
    }
    match &p.rounds[r] {
        Round::Sender { alphabet, coins } => {
            let q = coins[x * h + hist].distribution(psi)?;
            for (m, &qm) in q.iter().enumerate() {
                if qm != 0.0 {
                    walk(p, psi, x, r + 1, hist * alphabet + m, weight * qm, rho.clone(), out)?;
                }
            }
        }
        Round::Receiver { alphabet, instruments } => {
            let inst = &instruments[x * h + hist];
            for k in 0..*alphabet {
                walk(p, psi, x, r + 1, hist * alphabet + k, weight, inst.apply(k, &rho), out)?;
            }
        }
    }
    Ok(())
}

/// Brings a protocol to odd depth starting and ending with the sender:
/// a leading receiver round gets a trivial sender round in front, a trailing
/// receiver round is merged into the finals. Consecutive rounds of the same
/// party are rejected.
pub fn normalize(p: &InteractiveProtocol) -> Result<InteractiveProtocol> {
    p.validate()?;
    let mut q = p.clone();
    let atoms = q.randomness.len();
    if q.rounds.first().is_none_or(|r| !r.is_sender()) {
        q.rounds.insert(0, Round::Sender { alphabet: 1, coins: vec![Encoder::Fixed(vec![1.0]); atoms] });
    }
    if q.rounds.last().is_some_and(|r| !r.is_sender()) {
        let last = q.rounds.len() - 1;
        let h = q.histories(last);
        let Some(Round::Receiver { alphabet, instruments }) = q.rounds.pop() else { unreachable!() };
        let mut finals = Vec::with_capacity(atoms * h);
        for x in 0..atoms {
            for hist in 0..h {
                let inst = &instruments[x * h + hist];
                let posts: Vec<&Povm> = (0..alphabet).map(|k| &q.finals[(x * h + hist) * alphabet + k]).collect();
                finals.push(heisenberg(inst, &posts)?);
            }
        }
        q.finals = finals;
    }
    for w in q.rounds.windows(2) {
        if w[0].is_sender() == w[1].is_sender() {
            return Err(Error::MalformedProtocol("rounds must alternate between parties".into()));
        }
    }
    q.validate()?;
    Ok(q)
}

/// `E^b = Σ_k K_k† π^b_k K_k`.
fn heisenberg(inst: &Instrument, posts: &[&Povm]) -> Result<Povm> {
    let d = inst.dim();
    let n = posts[0].len();
    let effects = (0..n)
        .map(|b| {
            let mut e = ComplexMatrix::zeros(d);
            for (k, kr) in inst.kraus().iter().enumerate() {
                e = &e + &posts[k].effects()[b].matrix().sandwich(&kr.adjoint());
            }
            Effect::new(hermitize(&e))
        })
        .collect::<Result<Vec<_>>>()?;
    Povm::new(effects)
}

fn hermitize(m: &ComplexMatrix) -> ComplexMatrix {
    (m + &m.adjoint()).scale(0.5)
}

/// Replaces the last three rounds `A, B, A` by one sender round with
/// alphabet `|m₁| · |m₃|^k`.
pub fn collapse_last_three(p: &InteractiveProtocol) -> Result<InteractiveProtocol> {
    let n = p.rounds.len();
    if n < 3 || n.is_multiple_of(2) || !p.rounds[n - 3].is_sender() {
        return Err(Error::MalformedProtocol("need odd depth ending sender, receiver, sender".into()));
    }
    let atoms = p.randomness.len();
    let h = p.histories(n - 3);
    let (Round::Sender { alphabet: l1, coins: c1 }, Round::Receiver { alphabet: k, instruments }, Round::Sender { alphabet: l3, coins: c3 }) =
        (&p.rounds[n - 3], &p.rounds[n - 2], &p.rounds[n - 1])
    else {
        return Err(Error::MalformedProtocol("rounds must alternate between parties".into()));
    };
    let (l1, k, l3) = (*l1, *k, *l3);
    let width = l3.checked_pow(k as u32).ok_or_else(|| Error::OutOfRange("collapsed alphabet overflows".into()))?;
    let alphabet = l1.checked_mul(width).ok_or_else(|| Error::OutOfRange("collapsed alphabet overflows".into()))?;
    let mut coins = Vec::with_capacity(atoms * h);
    let mut finals = Vec::with_capacity(atoms * h * alphabet);
    for x in 0..atoms {
        for hist in 0..h {
            let rest = (0..l1)
                .map(|m1| {
                    let h2 = hist * l1 + m1;
                    Encoder::Product((0..k).map(|m2| c3[x * h * l1 * k + h2 * k + m2].clone()).collect())
                })
                .collect();
            coins.push(Encoder::Sequential { first: Box::new(c1[x * h + hist].clone()), rest });
            for msg in 0..alphabet {
                let cm = CollapsedMessage::decode(msg, l3, k);
                let h2 = hist * l1 + cm.m1;
                let inst = &instruments[x * h * l1 + h2];
                let h_final = h * l1 * k * l3;
                let posts: Vec<&Povm> = (0..k)
                    .map(|m2| &p.finals[x * h_final + (h2 * k + m2) * l3 + cm.table[m2]])
                    .collect();
                finals.push(heisenberg(inst, &posts)?);
            }
        }
    }
    let mut rounds = p.rounds[..n - 3].to_vec();
    rounds.push(Round::Sender { alphabet, coins });
    InteractiveProtocol::new(p.randomness.clone(), rounds, finals)
}

/// One-round protocol together with the sender alphabet after each stage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Collapse {
    pub protocol: OneRoundProtocol,
    pub stage_alphabets: Vec<usize>,
    pub cost_bits: u32,
}

/// Normalises and collapses repeatedly until one sender round remains.
pub fn collapse_to_one_round(p: &InteractiveProtocol) -> Result<Collapse> {
    let mut q = normalize(p)?;
    let mut stages = Vec::new();
    while q.rounds.len() > 1 {
        q = collapse_last_three(&q)?;
        stages.push(q.rounds.last().unwrap().alphabet());
    }
    let Some(Round::Sender { coins, .. }) = q.rounds.pop() else {
        return Err(Error::MalformedProtocol("protocol has no sender round".into()));
    };
    let protocol = OneRoundProtocol::new(q.randomness, coins, q.finals)?;
    let cost_bits = cost_bits(protocol.alphabet());
    Ok(Collapse { protocol, stage_alphabets: stages, cost_bits })
}

/// Collapse of a protocol of odd depth at most 7.
pub fn collapse_odd_rounds(p: &InteractiveProtocol) -> Result<Collapse> {
    if p.depth().is_multiple_of(2) {
        return Err(Error::MalformedProtocol(format!("depth {} is even; normalise first", p.depth())));
    }
    if p.depth() > 7 {
        return Err(Error::OutOfRange(format!("depth {} exceeds 7", p.depth())));
    }
    collapse_to_one_round(p)
}

/// Predicted sender alphabet after each collapse stage, saturating at
/// `usize::MAX`.
pub fn predicted_stage_alphabets(alphabets: &[usize]) -> Vec<usize> {
    let mut a = alphabets.to_vec();
    let mut out = Vec::new();
    while a.len() >= 3 {
        let n = a.len();
        let merged = u32::try_from(a[n - 2])
            .ok()
            .and_then(|k| a[n - 1].checked_pow(k))
            .and_then(|t| t.checked_mul(a[n - 3]))
            .unwrap_or(usize::MAX);
        a.truncate(n - 3);
        a.push(merged);
        out.push(merged);
    }
    out
}

/// Random protocol of the given round alphabets (sender first), with
/// sender coins that measure `ψ` and random instruments and finals.
pub fn random_interactive<R: Rng + ?Sized>(
    rng: &mut R,
    atoms: usize,
    alphabets: &[usize],
    dim: usize,
    outcomes: usize,
) -> InteractiveProtocol {
    let weights = loop {
        let w = flat_simplex(rng, atoms);
        if w.iter().all(|&v| v > 1e-6) {
            break w;
        }
    };
    let mut rounds = Vec::new();
    let mut h = 1;
    for (r, &l) in alphabets.iter().enumerate() {
        let n = atoms * h;
        rounds.push(if r % 2 == 0 {
            Round::Sender { alphabet: l, coins: (0..n).map(|_| Encoder::Measure(random_povm(rng, 2, l))).collect() }
        } else {
            Round::Receiver { alphabet: l, instruments: (0..n).map(|_| random_instrument(rng, dim, l)).collect() }
        });
        h *= l;
    }
    let finals = (0..atoms * h).map(|_| random_povm(rng, dim, outcomes)).collect();
    InteractiveProtocol::new(SharedRandomness::new(weights).expect("positive weights"), rounds, finals)
        .expect("consistent random protocol")
}

/// Receiver measures `σ_z` and announces it; the sender answers with her
/// `σ_z` outcome after `|0⟩` and her `σ_x` outcome after `|1⟩`. Outcomes
/// follow the twisted measurement's order.
pub fn twisted_interactive() -> InteractiveProtocol {
    use crate::qmath::catalog::{ket_x, ket_x_perp, ket_z, ket_z_perp};
    let z = Povm::from_basis(&[ket_z(), ket_z_perp()]).unwrap();
    let x = Povm::from_basis(&[ket_x(), ket_x_perp()]).unwrap();
    InteractiveProtocol::new(
        SharedRandomness::single(),
        vec![
            Round::Receiver { alphabet: 2, instruments: vec![Instrument::projective(&[ket_z(), ket_z_perp()]).unwrap()] },
            Round::Sender { alphabet: 2, coins: vec![Encoder::Measure(z), Encoder::Measure(x)] },
        ],
        (0..4).map(|t| Povm::deterministic(2, 4, t)).collect(),
    )
    .expect("valid protocol")
}
