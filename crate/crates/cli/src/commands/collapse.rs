//! Collapse of an interactive protocol to one round, checked against direct evaluation.

use serde::{Deserialize, Serialize};

use chansim::multiround::{
    collapse_to_one_round, evaluate, normalize, predicted_stage_alphabets, random_interactive, twisted_interactive,
    InteractiveProtocol,
};
use chansim::protocols::{chunk_rng, run_analytic, Encoder, OneRoundProtocol, SharedRandomness};
use chansim::qmath::random::{flat_simplex, haar_state, random_povm};

use super::{density, max_dev};
use crate::config::{self, reject_flag};
use crate::output::{emit, json_report, sibling, Failure, Status};
use crate::Common;

/// Tolerance up to three rounds after normalization.
pub const SHALLOW_TOL: f64 = 1e-12;
/// Tolerance for deeper recursions.
pub const DEEP_TOL: f64 = 1e-10;
/// Largest one-round alphabet the command will build.
pub const MAX_ALPHABET: usize = 1 << 20;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CollapseConfig {
    /// JSON file holding an interactive protocol.
    pub protocol: Option<String>,
    /// `twisted` or `wrapper`.
    pub builtin: Option<String>,
    /// Round alphabets of a random protocol, sender round first.
    pub alphabets: Vec<usize>,
    pub atoms: usize,
    pub outcomes: usize,
    pub sender_dim: usize,
    pub receiver_dim: usize,
    /// Random `(ψ, φ)` pairs compared.
    pub pairs: usize,
    pub seed: u64,
}

impl Default for CollapseConfig {
    fn default() -> Self {
        CollapseConfig {
            protocol: None,
            builtin: None,
            alphabets: vec![2, 2, 2],
            atoms: 2,
            outcomes: 2,
            sender_dim: 2,
            receiver_dim: 2,
            pairs: 10,
            seed: 1,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CollapseResult {
    pub source: String,
    pub depth: usize,
    pub normalized_depth: usize,
    pub round_alphabets: Vec<usize>,
    /// Sender alphabet after each collapse stage.
    pub stage_alphabets: Vec<usize>,
    pub predicted_stage_alphabets: Vec<usize>,
    pub alphabet: usize,
    pub cost_bits: u32,
    pub pairs: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub original_file: Option<String>,
    pub collapsed_file: Option<String>,
}

/// One-round protocol with measuring senders and random decoders, wrapped as three rounds.
fn wrapper(cfg: &CollapseConfig) -> Result<InteractiveProtocol, Failure> {
    let l = *cfg.alphabets.first().ok_or_else(|| Failure::Malformed("alphabets is empty".into()))?;
    let mut rng = chunk_rng(cfg.seed, 0);
    let p = OneRoundProtocol::new(
        SharedRandomness::new(flat_simplex(&mut rng, cfg.atoms))?,
        (0..cfg.atoms).map(|_| Encoder::Measure(random_povm(&mut rng, cfg.sender_dim, l))).collect(),
        (0..cfg.atoms * l).map(|_| random_povm(&mut rng, cfg.receiver_dim, cfg.outcomes)).collect(),
    )?;
    Ok(InteractiveProtocol::from_one_round(&p))
}

fn check_sizes(cfg: &CollapseConfig) -> Result<(), Failure> {
    let ok = |v: usize| (1..=64).contains(&v);
    if !(ok(cfg.atoms) && ok(cfg.outcomes) && ok(cfg.sender_dim) && ok(cfg.receiver_dim) && cfg.alphabets.iter().all(|&a| ok(a))) {
        return Err(Failure::Malformed("atoms, outcomes, dimensions and alphabets must lie in 1..=64".into()));
    }
    Ok(())
}

pub fn run(args: &Common) -> Result<Status, Failure> {
    reject_flag("collapse", "samples", args.samples.is_some())?;
    let mut cfg: CollapseConfig = config::load(args.config.as_deref())?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    check_sizes(&cfg)?;
    let (source, p) = match (&cfg.protocol, cfg.builtin.as_deref()) {
        (Some(_), Some(_)) => return Err(Failure::Malformed("give either protocol or builtin, not both".into())),
        (Some(file), None) => {
            let path = config::resolve(args.config.as_deref(), file.as_ref());
            let p: InteractiveProtocol = config::read_json(&path)?;
            p.validate()?;
            (file.clone(), p)
        }
        (None, Some("twisted")) => ("twisted".to_string(), twisted_interactive()),
        (None, Some("wrapper")) => ("wrapper".to_string(), wrapper(&cfg)?),
        (None, Some(other)) => return Err(Failure::Malformed(format!("unknown builtin `{other}`"))),
        (None, None) => {
            if cfg.alphabets.is_empty() {
                return Err(Failure::Malformed("alphabets is empty".into()));
            }
            let mut rng = chunk_rng(cfg.seed, 0);
            let p = random_interactive(&mut rng, cfg.atoms, &cfg.alphabets, cfg.receiver_dim, cfg.outcomes);
            (format!("random {:?}", cfg.alphabets), p)
        }
    };

    let normal = normalize(&p)?;
    let round_alphabets: Vec<usize> = normal.rounds.iter().map(|r| r.alphabet()).collect();
    let predicted = predicted_stage_alphabets(&round_alphabets);
    let final_alphabet = predicted.last().copied().unwrap_or(round_alphabets[0]);
    if predicted.iter().any(|&a| a > MAX_ALPHABET) {
        return Err(Failure::Malformed(format!("collapsed alphabets {predicted:?} exceed {MAX_ALPHABET}")));
    }
    let c = collapse_to_one_round(&p)?;

    let mut rng = chunk_rng(cfg.seed, 1);
    let mut dev: f64 = 0.0;
    for _ in 0..cfg.pairs {
        let psi = density(&haar_state(&mut rng, cfg.sender_dim));
        let phi = density(&haar_state(&mut rng, p.receiver_dim()));
        dev = dev.max(max_dev(&run_analytic(&c.protocol, &psi, &phi)?, &evaluate(&p, &psi, &phi)?));
    }
    let tolerance = if normal.depth() <= 3 { SHALLOW_TOL } else { DEEP_TOL };

    let (original_file, collapsed_file) = match args.out.as_deref() {
        Some(out) => {
            let (a, b) = (sibling(out, "original"), sibling(out, "collapsed"));
            emit(Some(&a), &json_report("collapse", &cfg, &p)?)?;
            emit(Some(&b), &json_report("collapse", &cfg, &c.protocol)?)?;
            (Some(a.display().to_string()), Some(b.display().to_string()))
        }
        None => (None, None),
    };
    let result = CollapseResult {
        source,
        depth: p.depth(),
        normalized_depth: normal.depth(),
        round_alphabets,
        stage_alphabets: c.stage_alphabets.clone(),
        predicted_stage_alphabets: predicted,
        alphabet: final_alphabet,
        cost_bits: c.cost_bits,
        pairs: cfg.pairs,
        max_deviation: dev,
        tolerance,
        original_file,
        collapsed_file,
    };
    emit(args.out.as_deref(), &json_report("collapse", &cfg, &result)?)?;
    if dev < tolerance && c.stage_alphabets == result.predicted_stage_alphabets && c.protocol.alphabet() == final_alphabet {
        Ok(Status::Success)
    } else {
        Ok(Status::Violation(format!(
            "deviation {dev:e} (tolerance {tolerance:e}), stages {:?} vs predicted {:?}",
            c.stage_alphabets, result.predicted_stage_alphabets
        )))
    }
}
