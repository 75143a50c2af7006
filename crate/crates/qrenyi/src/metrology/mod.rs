//! Phase and rotation estimation: canonical and general POVMs, exact error densities, the
//! scaling function `f(alpha)` and checkers for the entropic, RMSE and length-deviation bounds.
//!
//! Everything here is concrete `f64`.

mod bounds;
mod conjecture;
mod povm;
mod scaling;
mod scenario;

pub use bounds::{
    asymmetry_phase_check, bounds_report, canonical_povm_for, corollary1_check, fisher_comparison, interval_check,
    interval_rmse_bounds, l2_identity, min_phase_deviation, nonlinear_generator_check, phase_deviation, rotation_bounds,
    spectrum_distribution, theorem1_check, theorem2_bounds, violations, write_rows, AsymmetryPhaseRecord, BoundRow,
    Corollary1Record, FisherComparison, IntervalRecord, IntervalRmseBounds, NonlinearRecord, RotationRecord, Theorem1Record,
    Theorem2Bounds, SLACK_TOL,
};
pub use conjecture::{asymptotic_ceiling, conjecture_search, mean_deviation_product, vacuum_value, ConjectureReport, ProbeFamily, AIRY_ZERO};
pub use povm::{canonical_phase_density, integer_labels, Estimator, EstimatorEffect, PhasePovm, COMPLETENESS_TOL};
pub use scaling::{f_max, heisenberg_constant, maximize_scaling_function, scaling_function_f};
pub use scenario::{
    averaged_effect, dephasing_map, error_distribution, interval_error_distribution, ErrorStatistics, EstimationScenario, Prior,
    DEFAULT_GRID,
};
