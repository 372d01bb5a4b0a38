//! One module per subcommand, plus input resolution they share.

pub mod collapse;
pub mod decompose;
pub mod depolarize;
pub mod nogo;
pub mod rac;
pub mod simulate;

use std::path::Path;

use chansim::protocols::{chunk_rng, BlockProductBasis};
use chansim::qmath::catalog::{catalog_labels, catalog_product};
use chansim::qmath::measure::{check_product_completeness, ProductRank1Effect};
use chansim::qmath::random::haar_state;
use chansim::qmath::{CatalogName, DensityMatrix, PureState, C64};

use crate::config;
use crate::output::Failure;

/// Stream of the master seed reserved for drawing unspecified input states;
/// sampling uses streams counted up from zero.
const STATE_STREAM: u64 = u64::MAX;

/// Name accepted for the three-block product basis on C² ⊗ C⁶.
pub const BLOCK_EXAMPLE: &str = "appendixD";

pub enum Source {
    Catalog,
    BlockExample(BlockProductBasis),
    File,
}

/// Product measurement named in a config.
pub struct Measurement {
    pub joint: Vec<ProductRank1Effect>,
    pub dims: Vec<usize>,
    pub labels: Option<Vec<String>>,
    pub source: Source,
}

/// Resolves a catalog name, the block example, or a JSON file of product effects.
pub fn measurement(name: &str, config_path: Option<&Path>) -> Result<Measurement, Failure> {
    let (joint, labels, source) = if name == BLOCK_EXAMPLE {
        let basis = BlockProductBasis::three_block_example();
        (basis.product_effects(), None, Source::BlockExample(basis))
    } else if let Ok(c) = name.parse::<CatalogName>() {
        (catalog_product(c)?, Some(catalog_labels(c)), Source::Catalog)
    } else {
        let path = config::resolve(config_path, Path::new(name));
        if !path.is_file() {
            return Err(Failure::Malformed(format!(
                "unknown measurement `{name}`: not a catalog name, `{BLOCK_EXAMPLE}`, or a readable file"
            )));
        }
        let joint: Vec<ProductRank1Effect> = config::read_json(&path)?;
        (joint, None, Source::File)
    };
    let dims = check_product_completeness(&joint)?;
    Ok(Measurement { joint, dims, labels, source })
}

/// Parses explicit amplitudes, or draws Haar-random states of the given dimensions.
pub fn input_states(given: Option<&[Vec<[f64; 2]>]>, dims: &[usize], seed: u64) -> Result<Vec<PureState>, Failure> {
    match given {
        Some(states) => {
            if states.len() != dims.len() {
                return Err(Failure::Malformed(format!("expected {} states, got {}", dims.len(), states.len())));
            }
            states.iter().zip(dims).map(|(s, &d)| state(s, d)).collect()
        }
        None => {
            let mut rng = chunk_rng(seed, STATE_STREAM);
            Ok(dims.iter().map(|&d| haar_state(&mut rng, d)).collect())
        }
    }
}

/// One state from `[re, im]` pairs; the vector is normalized.
pub fn state(amplitudes: &[[f64; 2]], dim: usize) -> Result<PureState, Failure> {
    if amplitudes.len() != dim {
        return Err(Failure::Malformed(format!("state has {} amplitudes, expected {dim}", amplitudes.len())));
    }
    Ok(PureState::new(amplitudes.iter().map(|a| C64::new(a[0], a[1])).collect())?)
}

pub fn density(s: &PureState) -> DensityMatrix {
    DensityMatrix::from_pure(s)
}

pub fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
