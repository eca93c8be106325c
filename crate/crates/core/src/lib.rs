//! Design-space exploration for hybrid quantum neural networks on tabular binary
//! classification: a state-vector simulator, feature encodings, layered ansätze, a
//! parameter-shift trained classifier head, evaluation metrics, data preparation and
//! a reproducible grid sweep.
//!
//! Numeric cores are generic over [`scalar::Scalar`] (`f32` or `f64`); the aliases
//! below fix the precision for the common cases.

pub mod ansatz;
pub mod dataprep;
pub mod dse;
pub mod encode;
pub mod error;
pub mod kv;
pub mod metrics;
pub mod model;
pub mod optim;
pub mod scalar;
pub mod seed;
pub mod simcore;

pub use error::{Error, ErrorClass, Result};
pub use model::{HqnnConfig, Measurement};
pub use scalar::Scalar;

pub type State = simcore::QuantumState<f64>;
pub type Circuit = simcore::Circuit<f64>;
pub type Model = model::Hqnn<f64>;
pub type Params = model::ModelParams<f64>;
pub type Adam = optim::Adam<f64>;
pub type FoldResult = optim::FoldResult<f64>;

pub type StateF32 = simcore::QuantumState<f32>;
pub type ModelF32 = model::Hqnn<f32>;
pub type ParamsF32 = model::ModelParams<f32>;
