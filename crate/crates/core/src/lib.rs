//! Deterministic simulator and benchmark harness for an uncertainty-triggered
//! wake-up inference system.
//!
//! An always-on log-domain Bayesian front end ([`bayesfront`]) screens a
//! stream of two-channel beat segments ([`datapipe`]). Its likelihood words
//! are stored in complementary memristor pairs whose reads degrade with the
//! operating point ([`memsim`]). A wake controller ([`wakectl`]) escalates
//! abnormal, ambiguous, or invalid front-end outputs to an int8 MLP back end
//! ([`mlpback`]), and a closed-form model ([`energymodel`]) turns measured wake
//! statistics into mean energy per input. [`report`] holds the metrics, the
//! run report, the config file and the end-to-end experiment driver.
//!
//! Math that only needs field arithmetic is generic over [`Scalar`], so the
//! energy model can be evaluated in `f32`, `f64`, or exact rationals. The
//! aliases below pin the concrete types the rest of the crate uses.

pub mod bayesfront;
pub mod datapipe;
pub mod energymodel;
mod error;
pub mod interp;
pub mod memsim;
pub mod mlpback;
pub mod report;
mod rng;
mod scalar;
pub mod wakectl;

pub use error::{Error, ErrorKind, Result};
pub use rng::{keyed_rng, seeded_rng, standard_normal};
pub use scalar::Scalar;

/// Exact rational scalar used to check energy identities without rounding.
pub type Rational = num_rational::Ratio<i128>;

/// Double-precision energy parameters.
pub type EnergyParams = energymodel::EnergyParams<f64>;
/// Energy parameters in exact rational arithmetic.
pub type ExactEnergyParams = energymodel::EnergyParams<Rational>;
/// Double-precision wake rates.
pub type WakeRates = energymodel::WakeRates<f64>;
/// Double-precision energy decomposition.
pub type EnergyBreakdown = energymodel::EnergyBreakdown<f64>;
/// Piecewise-linear table over `f64`.
pub type Curve = interp::Curve<f64>;
/// Log-domain likelihood codec at double precision.
pub type LogCodec = bayesfront::LogCodec<f64>;
