//! Qubit linear algebra: states, effects, measurements and instruments.

pub mod catalog;
pub mod matrix;
pub mod measure;
pub mod random;
pub mod state;

pub use catalog::{catalog_measurement, CatalogName};
pub use matrix::{sigma_x, sigma_y, sigma_z, tensor, tensor_all, ComplexMatrix, C64};
pub use measure::{
    born, born_pure, coarse_grain, product_povm, singlet_probability, Instrument, Povm,
    ProductRank1Effect, COMPLETENESS_TOL,
};
pub use state::{
    bloch_to_density, density_to_bloch, depolarize, BlochVector, DensityMatrix, Effect, PureState,
    STATE_TOL,
};
