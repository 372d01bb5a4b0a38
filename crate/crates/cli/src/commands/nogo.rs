//! Error-floor sweep for finite-message simulation of a qubit channel.

use serde::{Deserialize, Serialize};

use chansim::nogo::{counting_bound, floor_cells, sweep, Budget, Cell, CountingVerdict, TargetFamily, WitnessReport, EXACT_TOL};

use crate::config::{self, reject_flag};
use crate::output::{csv_report, emit, json_report, sibling, Failure, Status};
use crate::Common;

/// Slack allowed in the monotonicity columns.
pub const MONOTONE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NogoConfig {
    /// Message counts swept over `N ∈ {2M+1, 4M, 8M}` with `K = 4M`.
    pub messages: Vec<usize>,
    /// Explicit cells; replace the `messages` sweep when non-empty.
    pub rows: Vec<Cell>,
    pub budget: Budget,
    pub seed: u64,
}

impl Default for NogoConfig {
    fn default() -> Self {
        NogoConfig { messages: vec![1, 2, 4], rows: Vec::new(), budget: Budget::default(), seed: 7 }
    }
}

#[derive(Debug, Serialize)]
pub struct Row {
    pub messages: usize,
    pub atoms: usize,
    pub states: usize,
    pub best_error: f64,
    pub exact: bool,
    pub validated: bool,
    pub violations: usize,
    pub monotone_in_states: bool,
    pub monotone_in_messages: bool,
    pub seed: u64,
    pub starts: usize,
    pub iterations: usize,
}

#[derive(Debug, Serialize)]
struct Audit<'a> {
    report: &'a WitnessReport,
    verdict: &'a CountingVerdict,
}

/// A cell may not do worse than one it nests into: fewer states with the
/// same messages, or more messages on the same or fewer states.
fn monotone(reports: &[WitnessReport], i: usize) -> (bool, bool) {
    let r = &reports[i];
    let within = |o: &WitnessReport| r.best_error <= o.best_error + MONOTONE_TOL;
    let nests = |o: &WitnessReport| r.atoms.is_multiple_of(o.atoms) && o.states >= r.states;
    let states = reports
        .iter()
        .filter(|o| o.messages == r.messages && o.states > r.states && nests(o))
        .all(within);
    let messages = reports.iter().filter(|o| o.messages < r.messages && nests(o)).all(within);
    (states, messages)
}

pub fn run(args: &Common) -> Result<Status, Failure> {
    reject_flag("nogo", "samples", args.samples.is_some())?;
    let mut cfg: NogoConfig = config::load(args.config.as_deref())?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    let cells = if cfg.rows.is_empty() { floor_cells(&cfg.messages) } else { cfg.rows.clone() };
    if cells.is_empty() {
        return Err(Failure::Malformed("no cells to sweep".into()));
    }
    if cells.iter().any(|c| c.messages == 0 || c.atoms == 0 || c.states == 0) {
        return Err(Failure::Malformed("messages, atoms and states must be positive".into()));
    }
    if cfg.budget.starts == 0 {
        return Err(Failure::Malformed("budget needs at least one start".into()));
    }
    let reports = sweep(&cells, cfg.seed, cfg.budget)?;
    let grid = TargetFamily::halton(cells.iter().map(|c| c.states).max().unwrap_or(1))?;
    let verdicts = reports
        .iter()
        .map(|r| counting_bound(&r.strategy, &grid.prefix(r.states)?))
        .collect::<chansim::Result<Vec<_>>>()?;

    let mut problems = Vec::new();
    let rows: Vec<Row> = reports
        .iter()
        .zip(&verdicts)
        .enumerate()
        .map(|(i, (r, v))| {
            let (in_states, in_messages) = monotone(&reports, i);
            let exact = r.best_error < EXACT_TOL;
            if exact && !v.validated {
                problems.push(format!("(M,K,N)=({},{},{}) exact but fails the counting check", r.messages, r.atoms, r.states));
            }
            if !(in_states && in_messages) {
                problems.push(format!("(M,K,N)=({},{},{}) breaks monotonicity", r.messages, r.atoms, r.states));
            }
            Row {
                messages: r.messages,
                atoms: r.atoms,
                states: r.states,
                best_error: r.best_error,
                exact,
                validated: v.validated,
                violations: v.violations.len(),
                monotone_in_states: in_states,
                monotone_in_messages: in_messages,
                seed: r.seed,
                starts: r.starts,
                iterations: r.iterations,
            }
        })
        .collect();

    if let Some(out) = args.out.as_deref() {
        let audit: Vec<Audit> = reports.iter().zip(&verdicts).map(|(report, verdict)| Audit { report, verdict }).collect();
        emit(Some(&sibling(out, "strategies")), &json_report("nogo", &cfg, &audit)?)?;
    }
    emit(args.out.as_deref(), &csv_report("nogo", &cfg, &rows)?)?;
    if !problems.is_empty() {
        Ok(Status::Violation(problems.join("; ")))
    } else if rows.iter().all(|r| r.exact) {
        Ok(Status::Success)
    } else {
        Ok(Status::Floor)
    }
}
