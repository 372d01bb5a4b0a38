//! Protocol statistics for a product measurement against the Born rule.

use serde::{Deserialize, Serialize};

use chansim::decompose::ExtremalFamily;
use chansim::protocols::{
    multipartite_protocol, run_analytic, run_sampled, theorem3_protocol, theorem4_protocol, MultipartiteConfig,
    SampledRun,
};
use chansim::qmath::{born, product_povm, DensityMatrix, PureState};

use super::{density, input_states, max_dev, measurement, Source};
use crate::output::{emit, json_report, Failure, Status};
use crate::{config, Common};

/// Largest tolerated gap between protocol and Born statistics.
pub const ANALYTIC_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    /// Catalog name, `appendixD`, or a JSON file of product effects.
    pub measurement: String,
    /// One state per party as `[re, im]` amplitudes; Haar random when absent.
    pub states: Option<Vec<Vec<[f64; 2]>>>,
    /// Sender layout for three or more parties.
    pub multipartite: MultipartiteConfig,
    pub samples: u64,
    pub seed: u64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig {
            measurement: "tb".into(),
            states: None,
            multipartite: MultipartiteConfig::A,
            samples: 100_000,
            seed: 1,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Sampled {
    pub samples: u64,
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// Largest `|frequency − analytic| / s.e.` over outcomes.
    pub max_z: f64,
}

#[derive(Debug, Serialize)]
pub struct SimulateResult {
    pub measurement: String,
    pub protocol: &'static str,
    pub dims: Vec<usize>,
    pub labels: Option<Vec<String>>,
    pub states: Vec<PureState>,
    /// Bits sent by the protocol that was run.
    pub cost_bits: u32,
    /// Bits of the unreduced extremal protocol, when a cheaper one was run.
    pub unreduced_cost_bits: Option<u32>,
    /// Per-sender bits for several senders.
    pub sender_bits: Option<Vec<u32>>,
    pub analytic: Vec<f64>,
    pub born: Vec<f64>,
    pub max_analytic_deviation: f64,
    pub tolerance: f64,
    pub sampled: Option<Sampled>,
}

pub fn run(args: &Common) -> Result<Status, Failure> {
    let mut cfg: SimulateConfig = config::load(args.config.as_deref())?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(n) = args.samples {
        cfg.samples = n;
    }
    let m = measurement(&cfg.measurement, args.config.as_deref())?;
    let states = input_states(cfg.states.as_deref(), &m.dims, cfg.seed)?;
    let rhos: Vec<DensityMatrix> = states.iter().map(density).collect();
    let joint_state = rhos[1..].iter().fold(rhos[0].clone(), |acc, r| acc.tensor(r));
    let born_p = born(&joint_state, &product_povm(&m.joint)?)?;
    let (senders, phi) = rhos.split_at(rhos.len() - 1);
    let phi = &phi[0];

    let (protocol, cost_bits, unreduced, sender_bits, analytic, sampled) = if m.dims.len() == 2 {
        let (kind, p, cost, unreduced) = match &m.source {
            Source::BlockExample(basis) => {
                let t = theorem3_protocol(basis)?;
                ("block-product", t.protocol, t.cost_bits, None)
            }
            _ => {
                let t = theorem4_protocol(&m.joint, &ExtremalFamily::for_joint(&m.joint)?)?;
                match t.reduced_protocol {
                    Some(r) => ("separable-linear", r, t.reduced_cost_bits, Some(t.cost_bits)),
                    None => ("separable", t.protocol, t.cost_bits, None),
                }
            }
        };
        let analytic = run_analytic(&p, &senders[0], phi)?;
        let sampled = match cfg.samples {
            0 => None,
            n => Some(run_sampled(&p, &senders[0], phi, n, cfg.seed)?),
        };
        (kind, cost, unreduced, None, analytic, sampled)
    } else {
        let p = multipartite_protocol(&m.joint, cfg.multipartite)?;
        let kind = match cfg.multipartite {
            MultipartiteConfig::A => "multi-sender-broadcast",
            MultipartiteConfig::B => "multi-sender-tables",
        };
        let analytic = p.distribution(senders, phi)?;
        let sampled = match cfg.samples {
            0 => None,
            n => Some(p.sample(senders, phi, n, cfg.seed)?),
        };
        (kind, p.cost_bits, None, Some(p.sender_bits()), analytic, sampled)
    };

    let dev = max_dev(&analytic, &born_p);
    let sampled = sampled.map(|s: SampledRun| Sampled {
        max_z: s.max_z(&analytic),
        samples: s.samples,
        counts: s.counts,
        frequencies: s.frequencies,
        std_errors: s.std_errors,
    });
    let result = SimulateResult {
        measurement: cfg.measurement.clone(),
        protocol,
        dims: m.dims,
        labels: m.labels,
        states,
        cost_bits,
        unreduced_cost_bits: unreduced,
        sender_bits,
        analytic,
        born: born_p,
        max_analytic_deviation: dev,
        tolerance: ANALYTIC_TOL,
        sampled,
    };
    emit(args.out.as_deref(), &json_report("simulate", &cfg, &result)?)?;
    if dev < ANALYTIC_TOL {
        Ok(Status::Success)
    } else {
        Ok(Status::Violation(format!("analytic deviation {dev:e} exceeds {ANALYTIC_TOL:e}")))
    }
}
