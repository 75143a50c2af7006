//! Quantum Renyi quantities: sandwiched divergences, Renyi asymmetry `A_alpha^G`, Renyi-Holevo
//! quantities of signal ensembles and the derived coherence measures.
//!
//! | quantity | definition |
//! |---|---|
//! | `A_alpha^G(rho)` | `inf_{sigma: [sigma, G] = 0} D_alpha(rho || sigma)` |
//! | `A_1^G(rho)` | `H(rho_G) - H(rho)` |
//! | `A_alpha^G(psi)` (pure) | `H_beta(G)`, `1/alpha + 1/beta = 2` |
//! | `chi_alpha` | `inf_sigma D_alpha(rho_XE || rho_X (x) sigma)` |

mod asymmetry;
mod coherence;
mod divergence;
mod holevo;
mod search;

pub use asymmetry::{PURITY_TOL,
    asymmetry, asymmetry_alpha1, asymmetry_numeric, asymmetry_pure, asymmetry_upper_bound, AsymmetryMethod,
    AsymmetryResult,
};
pub use coherence::{
    coherence_bounds, coherence_measures, coherent_phase_robustness, coherent_phase_state, phase_density, CoherenceBounds,
    CoherenceMeasures, PHASE_GRID,
};
pub use divergence::sandwiched_relative_entropy;
pub use holevo::{
    holevo_value_at, renyi_holevo, renyi_holevo_with, uniform_ensemble_asymmetry_approximation, EnsembleProvenance, HolevoResult,
    SignalEnsemble,
};
pub use search::SearchOptions;

use serde::Serialize;

/// Outcome of one start of a multi-start search.
#[derive(Clone, Debug, Serialize)]
pub struct StartReport {
    pub provenance: String,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}
