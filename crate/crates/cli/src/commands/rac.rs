//! Two-bit random access code: classical bits, a qubit, and simulated qubits.

use serde::{Deserialize, Serialize};

use chansim::decompose::ExtremalFamily;
use chansim::protocols::rac::{rac_one_bit_search, RacClassical};
use chansim::protocols::{rac_classical_exhaustive, rac_qubit, rac_via_simulator, theorem4_protocol};
use chansim::qmath::catalog::catalog_product;
use chansim::qmath::CatalogName;

use crate::config::{self, reject_flag};
use crate::output::{emit, json_report, Failure, Status};
use crate::Common;

const TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RacConfig {
    /// Largest number of shared-randomness atoms in the one-bit search.
    pub max_atoms: usize,
}

impl Default for RacConfig {
    fn default() -> Self {
        RacConfig { max_atoms: 4 }
    }
}

#[derive(Debug, Serialize)]
pub struct OneBit {
    pub best_success: f64,
    pub best_encoding: u8,
    pub by_atoms: Vec<f64>,
    /// Best protocol re-evaluated through the reduction.
    pub via_simulator: f64,
}

#[derive(Debug, Serialize)]
pub struct TwoBit {
    pub measurement: &'static str,
    pub cost_bits: u32,
    pub success: f64,
}

#[derive(Debug, Serialize)]
pub struct RacResult {
    pub classical: RacClassical,
    pub qubit_success: f64,
    pub qubit_optimum: f64,
    pub one_bit: OneBit,
    pub two_bit: TwoBit,
}

pub fn run(args: &Common) -> Result<Status, Failure> {
    reject_flag("rac", "samples", args.samples.is_some())?;
    reject_flag("rac", "seed", args.seed.is_some())?;
    let cfg: RacConfig = config::load(args.config.as_deref())?;
    let classical = rac_classical_exhaustive();
    let qubit = rac_qubit();
    let optimum = (2.0 + 2f64.sqrt()) / 4.0;
    let search = rac_one_bit_search(cfg.max_atoms)?;
    let via = rac_via_simulator(&search.protocol)?;
    let joint = catalog_product(CatalogName::TwistA)?;
    let two = theorem4_protocol(&joint, &ExtremalFamily::for_joint(&joint)?)?;
    let two_success = rac_via_simulator(&two.protocol)?;

    let mut problems = Vec::new();
    if 4 * classical.best_correct != 3 * classical.instances {
        problems.push(format!("classical success {}/{} is not 3/4", classical.best_correct, classical.instances));
    }
    if (qubit - optimum).abs() > TOL {
        problems.push(format!("qubit success {qubit} is not (2+√2)/4"));
    }
    if search.best_success > 0.75 + TOL || via > 0.75 + TOL {
        problems.push(format!("one-bit simulation beats 3/4: {} / {via}", search.best_success));
    }
    if two.cost_bits != 2 || (two_success - optimum).abs() > TOL {
        problems.push(format!("two-bit simulation gives {two_success} at {} bits", two.cost_bits));
    }
    let result = RacResult {
        classical,
        qubit_success: qubit,
        qubit_optimum: optimum,
        one_bit: OneBit {
            best_success: search.best_success,
            best_encoding: search.best_encoding,
            by_atoms: search.by_atoms,
            via_simulator: via,
        },
        two_bit: TwoBit { measurement: "twistA", cost_bits: two.cost_bits, success: two_success },
    };
    emit(args.out.as_deref(), &json_report("rac", &cfg, &result)?)?;
    if problems.is_empty() {
        Ok(Status::Success)
    } else {
        Ok(Status::Violation(problems.join("; ")))
    }
}
