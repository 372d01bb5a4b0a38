//! Extremal decomposition of the receiver's conditional measurement.

use serde::{Deserialize, Serialize};

use chansim::decompose::{effective_povm, linear_reduction, mixture_weights_with, ExtremalFamily, ExtremalPovm, TieBreak};
use chansim::protocols::cost_bits;
use chansim::qmath::PureState;

use super::{density, input_states, max_dev, measurement, state};
use crate::config::{self, reject_flag};
use crate::output::{emit, json_report, Failure, Status};
use crate::Common;

/// Largest tolerated gap between the mixture and the effective weights.
pub const MIXTURE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecomposeConfig {
    /// Bipartite catalog name or JSON file of product effects.
    pub measurement: String,
    /// Sender state as `[re, im]` amplitudes; Haar random when absent.
    pub psi: Option<Vec<[f64; 2]>>,
    pub tie_break: TieBreak,
    pub seed: u64,
}

impl Default for DecomposeConfig {
    fn default() -> Self {
        DecomposeConfig { measurement: "tb".into(), psi: None, tie_break: TieBreak::LexMin, seed: 1 }
    }
}

#[derive(Debug, Serialize)]
pub struct DecomposeResult {
    pub measurement: String,
    pub psi: PureState,
    /// Receiver projector of each outcome.
    pub projectors: Vec<PureState>,
    pub effective_weights: Vec<f64>,
    pub extremals: Vec<ExtremalPovm>,
    pub mu: Vec<f64>,
    pub residual: f64,
    /// Largest gap between `Σ_λ μ_λ s_a^λ` and the effective weights.
    pub reconstruction_error: f64,
    pub cost_bits: u32,
    /// Bits when the sender can measure directly, if that is cheaper.
    pub reduced_cost_bits: u32,
    pub reduction_subset: Option<Vec<usize>>,
}

pub fn run(args: &Common) -> Result<Status, Failure> {
    reject_flag("decompose", "samples", args.samples.is_some())?;
    let mut cfg: DecomposeConfig = config::load(args.config.as_deref())?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    let m = measurement(&cfg.measurement, args.config.as_deref())?;
    if m.dims.len() != 2 {
        return Err(Failure::Malformed(format!("{} has {} parties; decompose needs two", cfg.measurement, m.dims.len())));
    }
    let psi = match &cfg.psi {
        Some(a) => state(a, m.dims[0])?,
        None => input_states(None, &m.dims[..1], cfg.seed)?.remove(0),
    };
    let target = effective_povm(&m.joint, &density(&psi))?;
    let family = ExtremalFamily::for_joint(&m.joint)?;
    let d = mixture_weights_with(&target, &family, cfg.tie_break)?;
    let weights = target.weights();
    let reconstruction_error = max_dev(&d.outcome_weights(weights.len()), &weights);
    let cost = cost_bits(family.len());
    let reduction = linear_reduction(&m.joint, &family)?.filter(|r| r.cost_bits < cost);

    let mu_sum: f64 = d.mu.iter().sum();
    let mu_min = d.mu.iter().cloned().fold(f64::INFINITY, f64::min);
    let status = if reconstruction_error > MIXTURE_TOL || (mu_sum - 1.0).abs() > MIXTURE_TOL || mu_min < -MIXTURE_TOL {
        Status::Violation(format!(
            "mixture off target: reconstruction {reconstruction_error:e}, sum {mu_sum}, min weight {mu_min}"
        ))
    } else {
        Status::Success
    };
    let result = DecomposeResult {
        measurement: cfg.measurement.clone(),
        psi,
        projectors: family.projectors().to_vec(),
        effective_weights: weights,
        extremals: d.extremals,
        mu: d.mu,
        residual: d.residual,
        reconstruction_error,
        cost_bits: cost,
        reduced_cost_bits: reduction.as_ref().map_or(cost, |r| r.cost_bits),
        reduction_subset: reduction.map(|r| r.subset),
    };
    emit(args.out.as_deref(), &json_report("decompose", &cfg, &result)?)?;
    Ok(status)
}
