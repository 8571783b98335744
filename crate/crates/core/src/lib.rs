//! Random Gaussian quotients of ℓ₁- and ℓ_p-sums of a fixed normed space,
//! checks that locate isometric 1-complemented copies of that space inside
//! them, and Monte Carlo validators for the probabilistic estimates used
//! along the way.

pub mod body;
pub mod error;
pub mod lemmas;
pub mod linalg;
pub mod params;
pub mod witness;

pub use body::{
    make_norm_oracle, zp_sandwich_check, BlockGaussianMap, BodyDescriptor, Gauge, NormKind,
    NormOracle, QuotientBody, QuotientMap, SandwichReport,
};
pub use error::{Error, Result};
pub use linalg::{DenseMatrix, RngStream, Subspace};
pub use params::{certify_params, certify_params_q, Constants, ParamCertificate};
pub use witness::{find_witness, find_witness_with, PerturbationReport, WitnessOptions, WitnessReport};
