//! Depolarizing parameter reached by m-bit codebooks, one CSV row each.

use serde::{Deserialize, Serialize};

use chansim::depolarize::{estimate_eta, reference_eta, Codebook};
use chansim::protocols::cost_bits;

use crate::output::{csv_report, emit, Failure, Status};
use crate::{config, Common};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DepolarizeConfig {
    /// Message sizes swept with the default codebook of each size.
    pub bits: Vec<u32>,
    /// Extra codebooks by name: `antipodal`, `tetrahedron`, `cube`, `fibonacci<m>`.
    pub codebooks: Vec<String>,
    pub samples: u64,
    pub seed: u64,
}

impl Default for DepolarizeConfig {
    fn default() -> Self {
        DepolarizeConfig { bits: vec![1, 2, 3], codebooks: Vec::new(), samples: 1_000_000, seed: 1 }
    }
}

#[derive(Debug, Serialize)]
pub struct Row {
    pub m: u32,
    pub codebook: String,
    pub eta_hat: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
    /// Quoted value for the default codebook of one, two or three bits.
    pub reference_eta: Option<f64>,
    /// `(eta_hat − reference_eta) / std_error`.
    pub reference_z: Option<f64>,
}

fn default_name(m: u32) -> String {
    match m {
        1 => "antipodal".into(),
        2 => "tetrahedron".into(),
        3 => "cube".into(),
        _ => format!("fibonacci{m}"),
    }
}

pub fn run(args: &Common) -> Result<Status, Failure> {
    let mut cfg: DepolarizeConfig = config::load(args.config.as_deref())?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(n) = args.samples {
        cfg.samples = n;
    }
    let mut books = Vec::new();
    for &m in &cfg.bits {
        books.push((default_name(m), Codebook::for_bits(m)?, reference_eta(m)));
    }
    for name in &cfg.codebooks {
        books.push((name.clone(), Codebook::named(name)?, None));
    }
    let mut rows = Vec::with_capacity(books.len());
    for (name, book, reference) in books {
        let e = estimate_eta(&book, cfg.samples, cfg.seed)?;
        rows.push(Row {
            m: cost_bits(book.len()),
            codebook: name,
            eta_hat: e.eta,
            std_error: e.std_error,
            samples: e.samples,
            seed: e.seed,
            reference_eta: reference,
            reference_z: reference.map(|r| (e.eta - r) / e.std_error),
        });
    }
    emit(args.out.as_deref(), &csv_report("depolarize", &cfg, &rows)?)?;
    Ok(Status::Success)
}
