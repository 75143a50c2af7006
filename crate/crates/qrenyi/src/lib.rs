//! Renyi-entropic uncertainty relations for quantum states and their use as bounds on phase,
//! rotation and time estimation.
//!
//! The spectral, entropy and quantum modules are generic over [`scalar::Real`]; the `f64`
//! aliases below cover the common case. The metrology and time-energy modules work in `f64`.
#![forbid(unsafe_code)]
pub mod entropy;
pub mod error;
pub mod linalg;
pub mod metrology;
pub mod optimize;
pub mod phase;
pub mod quantum;
pub mod random;
pub mod scalar;
pub mod spectral;
pub mod time_energy;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Order = entropy::RenyiOrder<f64>;
pub type Density = spectral::DensityOperator<f64>;
pub type Hermitian = spectral::HermitianMatrix<f64>;
pub type Gen = spectral::Generator<f64>;
pub type CMatrix = linalg::Matrix<f64>;
pub type Discrete = entropy::DiscreteDistribution<f64>;
pub type Circular = entropy::CircularDensity<f64>;
pub type RealLine = entropy::RealLineDensity<f64>;
pub type Trig = phase::TrigDensity<f64>;
pub type Ensemble = quantum::SignalEnsemble<f64>;
pub type Asymmetry = quantum::AsymmetryResult<f64>;
pub type Holevo = quantum::HolevoResult<f64>;
