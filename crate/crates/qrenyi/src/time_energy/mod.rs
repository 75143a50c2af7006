//! Canonical time observables of systems with discrete energy spectra: periodic and
//! almost-periodic time densities, Besicovitch means, almost-periodic Renyi entropies and the
//! energy-time uncertainty checks built on them.
//!
//! Everything here is concrete `f64`.

mod bounds;
mod density;
mod spectrum;

pub use bounds::{corollary9_check, time_estimation_bounds, Corollary9Record, TimeEstimationRecord};
pub use density::{
    almost_periodic_density, almost_periodic_renyi_entropy, ap_entropy, besicovitch_mean, cesaro_windows, entropy_sweep,
    information_gain_lower_bound, periodic_time_entropy, write_entropy_sweep, AlmostPeriodicDensity, ApEntropy, EntropySweepRow,
    MeanEstimate, MeanKind, MeanMethod, MeanOptions, WindowSchedule,
};
pub use spectrum::{rationalize, EnergySpectrum, Periodicity, TorusStructure, COMMENSURABILITY_TOL};
