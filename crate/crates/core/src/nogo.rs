//! Finite-message witnesses against exact qubit-channel simulation.
//!
//! For the singlet-type target every `ψ` forces Bob's effective effect to be
//! `F_ψ = ½P_{ψ⊥}`. A one-round strategy with `M` messages and `K` uniform
//! shared-randomness atoms is optimised against a grid of `N` such targets.
//! Exact strategies exist for `N ≤ M`; beyond `2M` states the supports
//! `Λ^m_ψ` would have to be disjoint with total mass above one, so a
//! positive error floor is expected.
//!
//! Effects are handled in coordinates `(c, v)` with `E = ½(cI + v·σ)`, so a
//! rank-one effect `e P_χ` is `(e, eχ)` and the operator norm of a difference
//! is `½(|Δc| + |Δv|)`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocols::chunk_rng;
use crate::qmath::random::{flat_simplex, unit_bloch};
use crate::qmath::{bloch_to_density, BlochVector, ComplexMatrix, Effect};

/// Support threshold for `Λ^m_ψ`.
pub const SUPPORT_TOL: f64 = 1e-10;
/// Error below which a strategy counts as exact.
pub const EXACT_TOL: f64 = 1e-9;

/// Grid of input directions `ψ̂_j`; the targets are `½P_{ψ̂_j⊥}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<BlochVector>", into = "Vec<BlochVector>")]
pub struct TargetFamily {
    grid: Vec<BlochVector>,
}

impl TryFrom<Vec<BlochVector>> for TargetFamily {
    type Error = Error;
    fn try_from(v: Vec<BlochVector>) -> Result<Self> {
        TargetFamily::new(v)
    }
}

impl From<TargetFamily> for Vec<BlochVector> {
    fn from(t: TargetFamily) -> Self {
        t.grid
    }
}

impl TargetFamily {
    pub fn new(grid: Vec<BlochVector>) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::OutOfRange("empty target grid".into()));
        }
        let grid = grid.into_iter().map(|v| v.validate_unit()).collect::<Result<Vec<_>>>()?;
        for (i, a) in grid.iter().enumerate() {
            for b in &grid[..i] {
                if a.dot(*b).clamp(-1.0, 1.0).acos() < 1e-9 {
                    return Err(Error::OutOfRange(format!("grid point {i} repeats an earlier one")));
                }
            }
        }
        Ok(TargetFamily { grid })
    }

    /// First `n` points of a Halton sequence on the sphere; grids are nested
    /// in `n`.
    pub fn halton(n: usize) -> Result<Self> {
        let grid = (1..=n)
            .map(|i| {
                let z = 1.0 - 2.0 * radical_inverse(i, 2);
                let a = 2.0 * std::f64::consts::PI * radical_inverse(i, 3);
                let r = (1.0 - z * z).max(0.0).sqrt();
                BlochVector::new(r * a.cos(), r * a.sin(), z).normalized()
            })
            .collect();
        Self::new(grid)
    }

    pub fn grid(&self) -> &[BlochVector] {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Leading `n` points.
    pub fn prefix(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.len() {
            return Err(Error::OutOfRange(format!("prefix {n} of a {}-point grid", self.len())));
        }
        Ok(TargetFamily { grid: self.grid[..n].to_vec() })
    }

    pub fn is_antipodal_free(&self) -> bool {
        self.grid.iter().enumerate().all(|(i, a)| self.grid[..i].iter().all(|b| a.add(*b).norm() > 1e-9))
    }

    /// Coordinates of `½P_{ψ̂_j⊥}`.
    fn target(&self, j: usize) -> [f64; 4] {
        let p = self.grid[j];
        [0.5, -0.5 * p.x, -0.5 * p.y, -0.5 * p.z]
    }

    pub fn target_effect(&self, j: usize) -> Effect {
        Effect::new(bloch_to_density(self.grid[j].scale(-1.0)).expect("unit").matrix().scale(0.5)).expect("valid effect")
    }
}

fn radical_inverse(mut i: usize, base: usize) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * inv;
        i /= base;
        inv /= base as f64;
    }
    out
}

/// `e · P_χ` with `e ∈ [0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankOneEffect {
    pub weight: f64,
    pub direction: BlochVector,
}

impl RankOneEffect {
    pub fn new(weight: f64, direction: BlochVector) -> Result<Self> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::OutOfRange(format!("effect weight {weight} outside [0, 1]")));
        }
        Ok(RankOneEffect { weight, direction: direction.validate_unit()? })
    }

    fn coords(&self) -> [f64; 4] {
        let (e, d) = (self.weight, self.direction);
        [e, e * d.x, e * d.y, e * d.z]
    }

    pub fn effect(&self) -> Effect {
        Effect::new(bloch_to_density(self.direction).expect("unit").matrix().scale(self.weight)).expect("valid effect")
    }
}

/// One-round strategy with `M` messages over `K` atoms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteStrategy {
    pub atoms: Vec<f64>,
    /// `encoder[j][x][m] = p(m | x, ψ_j)`.
    pub encoder: Vec<Vec<Vec<f64>>>,
    /// `effects[m][x] = E^{m,x}`.
    pub effects: Vec<Vec<RankOneEffect>>,
}

impl FiniteStrategy {
    pub fn new(atoms: Vec<f64>, encoder: Vec<Vec<Vec<f64>>>, effects: Vec<Vec<RankOneEffect>>) -> Result<Self> {
        let s = FiniteStrategy { atoms, encoder, effects };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.atoms.len();
        let m = self.effects.len();
        if k == 0 || m == 0 || self.encoder.is_empty() {
            return Err(Error::MalformedProtocol("strategy needs atoms, messages and grid rows".into()));
        }
        crate::protocols::check_distribution(&self.atoms, "atom weights")?;
        if self.effects.iter().any(|row| row.len() != k) {
            return Err(Error::MalformedProtocol("effects must be indexed by message and atom".into()));
        }
        for rows in &self.encoder {
            if rows.len() != k || rows.iter().any(|q| q.len() != m) {
                return Err(Error::MalformedProtocol("encoder must be indexed by state, atom and message".into()));
            }
            for q in rows {
                crate::protocols::check_distribution(q, "encoder row")?;
            }
        }
        for e in self.effects.iter().flatten() {
            RankOneEffect::new(e.weight, e.direction)?;
        }
        Ok(())
    }

    pub fn messages(&self) -> usize {
        self.effects.len()
    }

    pub fn states(&self) -> usize {
        self.encoder.len()
    }

    /// Message `j` for state `j`, with effect `½P_{ψ̂_j⊥}`; needs `N ≤ M`.
    pub fn explicit(t: &TargetFamily, messages: usize, atoms: usize) -> Result<Self> {
        if t.len() > messages {
            return Err(Error::OutOfRange(format!("{} states need at least as many messages, got {messages}", t.len())));
        }
        let zero = RankOneEffect { weight: 0.0, direction: BlochVector::new(0.0, 0.0, 1.0) };
        let effects = (0..messages)
            .map(|m| {
                let e = if m < t.len() { RankOneEffect { weight: 0.5, direction: t.grid[m].scale(-1.0) } } else { zero };
                vec![e; atoms]
            })
            .collect();
        let encoder = (0..t.len()).map(|j| vec![point(messages, j); atoms]).collect();
        FiniteStrategy::new(vec![1.0 / atoms as f64; atoms], encoder, effects)
    }

    /// Random strategy with uniform atoms.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, states: usize, messages: usize, atoms: usize) -> Self {
        let effects = (0..messages)
            .map(|_| (0..atoms).map(|_| RankOneEffect { weight: rng.random::<f64>(), direction: unit_bloch(rng) }).collect())
            .collect();
        let encoder = (0..states).map(|_| (0..atoms).map(|_| flat_simplex(rng, messages)).collect()).collect();
        FiniteStrategy { atoms: vec![1.0 / atoms as f64; atoms], encoder, effects }
    }

    /// Rows for the first `n` states.
    pub fn restrict(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.states() {
            return Err(Error::OutOfRange(format!("cannot restrict {} states to {n}", self.states())));
        }
        Ok(FiniteStrategy { atoms: self.atoms.clone(), encoder: self.encoder[..n].to_vec(), effects: self.effects.clone() })
    }

    /// Same strategy with unused extra messages and each atom split into
    /// `atoms / K` equal copies.
    pub fn embed(&self, messages: usize, atoms: usize) -> Result<Self> {
        let (m0, k0) = (self.messages(), self.atoms.len());
        if messages < m0 || atoms < k0 || !atoms.is_multiple_of(k0) {
            return Err(Error::OutOfRange(format!("cannot embed ({m0}, {k0}) into ({messages}, {atoms})")));
        }
        let r = atoms / k0;
        let zero = RankOneEffect { weight: 0.0, direction: BlochVector::new(0.0, 0.0, 1.0) };
        let effects = (0..messages)
            .map(|m| (0..atoms).map(|x| if m < m0 { self.effects[m][x / r] } else { zero }).collect())
            .collect();
        let encoder = self
            .encoder
            .iter()
            .map(|rows| {
                (0..atoms)
                    .map(|x| {
                        let mut q = rows[x / r].clone();
                        q.resize(messages, 0.0);
                        q
                    })
                    .collect()
            })
            .collect();
        let atoms_w = self.atoms.iter().flat_map(|&p| std::iter::repeat_n(p / r as f64, r)).collect();
        FiniteStrategy::new(atoms_w, encoder, effects)
    }

    fn coords(&self, j: usize) -> [f64; 4] {
        let mut f = [0.0; 4];
        for (x, &px) in self.atoms.iter().enumerate() {
            for (m, &q) in self.encoder[j][x].iter().enumerate() {
                let u = self.effects[m][x].coords();
                for k in 0..4 {
                    f[k] += px * q * u[k];
                }
            }
        }
        f
    }
}

fn point(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

/// `Σ_{m,x} p(x) p(m|x,ψ_j) E^{m,x}`.
pub fn effective_effect(s: &FiniteStrategy, j: usize) -> Result<Effect> {
    if j >= s.states() {
        return Err(Error::OutOfRange(format!("state index {j} with {} rows", s.states())));
    }
    let [c, vx, vy, vz] = s.coords(j);
    let m = &(&(&ComplexMatrix::identity(2).scale(c) + &crate::qmath::sigma_x().scale(vx))
        + &crate::qmath::sigma_y().scale(vy))
        + &crate::qmath::sigma_z().scale(vz);
    Effect::new(m.scale(0.5))
}

fn op_norm_diff(f: &[f64; 4], t: &[f64; 4]) -> f64 {
    let dv = ((f[1] - t[1]).powi(2) + (f[2] - t[2]).powi(2) + (f[3] - t[3]).powi(2)).sqrt();
    0.5 * ((f[0] - t[0]).abs() + dv)
}

/// Per-state operator-norm errors.
pub fn state_errors(s: &FiniteStrategy, t: &TargetFamily) -> Result<Vec<f64>> {
    if s.states() != t.len() {
        return Err(Error::DimensionMismatch { expected: t.len(), found: s.states() });
    }
    Ok((0..t.len()).map(|j| op_norm_diff(&s.coords(j), &t.target(j))).collect())
}

/// `max_j ‖F_j − ½P_{ψ̂_j⊥}‖`.
pub fn strategy_error(s: &FiniteStrategy, t: &TargetFamily) -> Result<f64> {
    Ok(state_errors(s, t)?.into_iter().fold(0.0, f64::max))
}

/// Multi-start schedule: `starts` restarts of `iterations` sweeps each.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub starts: usize,
    pub iterations: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { starts: 8, iterations: 400 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub messages: usize,
    pub atoms: usize,
    pub states: usize,
    pub best_error: f64,
    pub iterations: usize,
    pub starts: usize,
    pub seed: u64,
    pub strategy: FiniteStrategy,
}

/// Best strategy found by alternating minimisation.
pub fn optimize(t: &TargetFamily, messages: usize, atoms: usize, seed: u64, budget: Budget) -> Result<WitnessReport> {
    optimize_from(t, messages, atoms, seed, budget, &[])
}

/// As [`optimize`], with extra starting points tried before the random starts.
/// The explicit construction is added when `N ≤ M`.
pub fn optimize_from(
    t: &TargetFamily,
    messages: usize,
    atoms: usize,
    seed: u64,
    budget: Budget,
    warm: &[FiniteStrategy],
) -> Result<WitnessReport> {
    if messages == 0 || atoms == 0 {
        return Err(Error::OutOfRange("messages and atoms must be at least 1".into()));
    }
    let mut inits: Vec<FiniteStrategy> = Vec::new();
    if t.len() <= messages {
        inits.push(FiniteStrategy::explicit(t, messages, atoms)?);
    }
    for w in warm {
        if w.states() != t.len() || w.messages() != messages || w.atoms.len() != atoms {
            return Err(Error::DimensionMismatch { expected: t.len(), found: w.states() });
        }
        w.validate()?;
        inits.push(w.clone());
    }
    let fixed = inits.len();
    let runs: Vec<(f64, FiniteStrategy)> = (0..fixed + budget.starts)
        .into_par_iter()
        .map(|s| {
            let init = if s < fixed {
                inits[s].clone()
            } else {
                FiniteStrategy::random(&mut chunk_rng(seed, s as u64), t.len(), messages, atoms)
            };
            descend(init, t, budget.iterations)
        })
        .collect();
    let (best_error, strategy) = runs
        .into_iter()
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .expect("at least one start");
    Ok(WitnessReport {
        messages,
        atoms,
        states: t.len(),
        best_error,
        iterations: budget.iterations,
        starts: fixed + budget.starts,
        seed,
        strategy,
    })
}

/// Alternating minimisation of a reweighted least-squares surrogate; returns
/// the best iterate under the operator-norm error.
fn descend(mut s: FiniteStrategy, t: &TargetFamily, iterations: usize) -> (f64, FiniteStrategy) {
    let n = t.len();
    let targets: Vec<[f64; 4]> = (0..n).map(|j| t.target(j)).collect();
    let mut f: Vec<[f64; 4]> = (0..n).map(|j| s.coords(j)).collect();
    let mut omega = vec![1.0; n];
    let errors = |f: &[[f64; 4]]| f.iter().zip(&targets).map(|(a, b)| op_norm_diff(a, b)).collect::<Vec<_>>();
    let mut errs = errors(&f);
    let mut best = (errs.iter().cloned().fold(0.0, f64::max), s.clone());
    for _ in 0..iterations {
        if best.0 < 1e-14 {
            break;
        }
        effects_step(&mut s, &mut f, &targets, &omega);
        encoder_step(&mut s, &mut f, &targets);
        errs = errors(&f);
        let worst = errs.iter().cloned().fold(0.0, f64::max);
        if worst < best.0 {
            // Recompute from scratch so drift in the running sums never counts.
            let exact = strategy_error(&s, t).expect("shapes match");
            if exact < best.0 {
                best = (exact, s.clone());
            }
        }
        // Lawson-style multiplicative weights push the surrogate towards the minimax.
        let total: f64 = omega.iter().zip(&errs).map(|(w, e)| w * e).sum();
        if total > 0.0 {
            for (w, e) in omega.iter_mut().zip(&errs) {
                *w = (*w * e * n as f64 / total).max(1e-6);
            }
        }
    }
    best
}

fn effects_step(s: &mut FiniteStrategy, f: &mut [[f64; 4]], targets: &[[f64; 4]], omega: &[f64]) {
    for m in 0..s.messages() {
        for x in 0..s.atoms.len() {
            let old = s.effects[m][x].coords();
            let mut num = [0.0; 4];
            let mut den = 0.0;
            for j in 0..f.len() {
                let w = s.atoms[x] * s.encoder[j][x][m];
                if w == 0.0 {
                    continue;
                }
                for k in 0..4 {
                    num[k] += omega[j] * w * (targets[j][k] - f[j][k] + w * old[k]);
                }
                den += omega[j] * w * w;
            }
            if den < 1e-300 {
                continue;
            }
            let new = project_rank_one(num.map(|v| v / den), s.effects[m][x].direction);
            let u = new.coords();
            for j in 0..f.len() {
                let w = s.atoms[x] * s.encoder[j][x][m];
                for k in 0..4 {
                    f[j][k] += w * (u[k] - old[k]);
                }
            }
            s.effects[m][x] = new;
        }
    }
}

/// Nearest `(e, eχ)` with `e ∈ [0, 1]`, `|χ| = 1`.
fn project_rank_one(u: [f64; 4], fallback: BlochVector) -> RankOneEffect {
    let v = BlochVector::new(u[1], u[2], u[3]);
    let len = v.norm();
    let e = (0.5 * (u[0] + len)).clamp(0.0, 1.0);
    let direction = if len > 1e-300 { v.scale(1.0 / len) } else { fallback };
    RankOneEffect { weight: e, direction }
}

/// Frank–Wolfe with exact line search on each row `p(·|x, ψ_j)`.
fn encoder_step(s: &mut FiniteStrategy, f: &mut [[f64; 4]], targets: &[[f64; 4]]) {
    let m_count = s.messages();
    for j in 0..f.len() {
        for x in 0..s.atoms.len() {
            let px = s.atoms[x];
            let us: Vec<[f64; 4]> = (0..m_count).map(|m| s.effects[m][x].coords()).collect();
            for _ in 0..20 {
                let r: [f64; 4] = std::array::from_fn(|k| targets[j][k] - f[j][k]);
                let score = |m: usize| -(0..4).map(|k| us[m][k] * r[k]).sum::<f64>();
                let vertex = (0..m_count).fold(0, |b, m| if score(m) < score(b) { m } else { b });
                let q = &s.encoder[j][x];
                let delta: [f64; 4] =
                    std::array::from_fn(|k| px * (us[vertex][k] - (0..m_count).map(|m| q[m] * us[m][k]).sum::<f64>()));
                let dd: f64 = delta.iter().map(|d| d * d).sum();
                if dd < 1e-30 {
                    break;
                }
                let gamma = ((0..4).map(|k| r[k] * delta[k]).sum::<f64>() / dd).clamp(0.0, 1.0);
                if gamma < 1e-12 {
                    break;
                }
                let q = &mut s.encoder[j][x];
                for (m, v) in q.iter_mut().enumerate() {
                    *v = (1.0 - gamma) * *v + if m == vertex { gamma } else { 0.0 };
                }
                for k in 0..4 {
                    f[j][k] += gamma * delta[k];
                }
            }
            let q = &mut s.encoder[j][x];
            let total: f64 = q.iter().sum();
            q.iter_mut().for_each(|v| *v /= total);
        }
    }
}

/// Localised inconsistency found by [`counting_bound`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Violation {
    /// `Σ_m Σ_{x∈Λ^m_ψ} p(x) < ½`.
    MassDeficit { state: usize, mass: f64 },
    /// Atom `x` supports message `m` for two distinct states.
    SharedSupport { message: usize, atom: usize, states: (usize, usize) },
    /// An exact strategy on more than `2M` states.
    ExceedsBound { states: usize, bound: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountingVerdict {
    pub messages: usize,
    pub states: usize,
    pub error: f64,
    pub exact: bool,
    /// Per-state mass of the supports `Λ^m_ψ`.
    pub masses: Vec<f64>,
    pub violations: Vec<Violation>,
    /// Exact and free of violations.
    pub validated: bool,
}

/// Rebuilds the supports `Λ^m_ψ = {x : p(m|x,ψ) e^{m,x} > 10⁻¹⁰}` and checks
/// the mass and disjointness conditions that force `N ≤ 2M`.
pub fn counting_bound(s: &FiniteStrategy, t: &TargetFamily) -> Result<CountingVerdict> {
    s.validate()?;
    let error = strategy_error(s, t)?;
    let (n, mm, k) = (t.len(), s.messages(), s.atoms.len());
    let support = |j: usize, m: usize, x: usize| s.encoder[j][x][m] * s.effects[m][x].weight > SUPPORT_TOL;
    let mut violations = Vec::new();
    let masses: Vec<f64> = (0..n)
        .map(|j| (0..mm).map(|m| (0..k).filter(|&x| support(j, m, x)).map(|x| s.atoms[x]).sum::<f64>()).sum())
        .collect();
    for (j, &mass) in masses.iter().enumerate() {
        if mass < 0.5 - 1e-6 {
            violations.push(Violation::MassDeficit { state: j, mass });
        }
    }
    for m in 0..mm {
        for x in 0..k {
            let users: Vec<usize> = (0..n).filter(|&j| support(j, m, x)).collect();
            for (i, &a) in users.iter().enumerate() {
                for &b in &users[i + 1..] {
                    violations.push(Violation::SharedSupport { message: m, atom: x, states: (a, b) });
                }
            }
        }
    }
    let exact = error < EXACT_TOL;
    if exact && n > 2 * mm {
        violations.push(Violation::ExceedsBound { states: n, bound: 2 * mm });
    }
    Ok(CountingVerdict { messages: mm, states: n, error, exact, masses, validated: exact && violations.is_empty(), violations })
}

/// One sweep cell: `M` messages, `K` atoms, the first `N` grid points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub messages: usize,
    pub atoms: usize,
    pub states: usize,
}

/// Optimises every cell on prefixes of one Halton grid. Cells run in order
/// of increasing `M` and decreasing `N`; each is seeded with restrictions and
/// embeddings of earlier results with `N' ≥ N`, `M' ≤ M` and `K' | K`, so the
/// reported errors are monotone in `N` and `M` by construction. Reports come
/// back in the order the cells were given.
pub fn sweep(cells: &[Cell], seed: u64, budget: Budget) -> Result<Vec<WitnessReport>> {
    let n_max = cells.iter().map(|c| c.states).max().ok_or_else(|| Error::OutOfRange("empty sweep".into()))?;
    let full = TargetFamily::halton(n_max)?;
    let mut order: Vec<usize> = (0..cells.len()).collect();
    order.sort_by_key(|&i| (cells[i].messages, std::cmp::Reverse(cells[i].states), cells[i].atoms));
    let mut done: Vec<Option<WitnessReport>> = vec![None; cells.len()];
    for i in order {
        let c = cells[i];
        let t = full.prefix(c.states)?;
        let warm = done
            .iter()
            .flatten()
            .filter(|r| r.states >= c.states && r.messages <= c.messages && c.atoms.is_multiple_of(r.atoms))
            .map(|r| r.strategy.restrict(c.states)?.embed(c.messages, c.atoms))
            .collect::<Result<Vec<_>>>()?;
        done[i] = Some(optimize_from(&t, c.messages, c.atoms, seed, budget, &warm)?);
    }
    Ok(done.into_iter().map(|r| r.expect("every cell ran")).collect())
}

/// Cells `N ∈ {2M+1, 4M, 8M}` with `K = 4M` for each `M`.
pub fn floor_cells(ms: &[usize]) -> Vec<Cell> {
    let mut out = Vec::new();
    for &m in ms {
        let mut ns = vec![2 * m + 1, 4 * m, 8 * m];
        ns.dedup();
        out.extend(ns.into_iter().map(|n| Cell { messages: m, atoms: 4 * m, states: n }));
    }
    out
}

pub fn floor_sweep(ms: &[usize], seed: u64, budget: Budget) -> Result<Vec<WitnessReport>> {
    sweep(&floor_cells(ms), seed, budget)
}

#[cfg(test)]
mod tests;
