//! Standalone versions of the combinatorial and probabilistic estimates the
//! construction depends on, with Monte Carlo validators.

mod gamma;
mod mean_width;
mod tails;
mod turan;

pub use gamma::{gamma_m, ln_choose, ln_gamma, regularized_gamma_p, regularized_gamma_q};
pub use mean_width::{
    coordinate_section_mean_width, mean_width_mc, tled_bound_check, MeanWidthEstimate, TledReport,
    MIN_TRIALS,
};
pub use tails::{
    chevet_gordon_bound, chevet_gordon_experiment, shrinking_experiment, sv_tail_experiment,
    ChevetGordonResult, ProbeSet, ShrinkExperimentResult, TailExperimentResult, CLOUD_MSTAR_TRIALS,
};
pub use turan::{turan_brute, turan_select, ZeroOneMatrix, BRUTE_FORCE_LIMIT};

/// Standard deviation of a binomial frequency with success probability `p`
/// (clamped to [0, 1]).
pub fn binomial_sigma(p: f64, trials: usize) -> f64 {
    let p = p.clamp(0.0, 1.0);
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// `empirical ≤ bound + 3·σ_binomial(bound)`.
pub fn within_three_sigma(empirical: f64, bound: f64, trials: usize) -> bool {
    empirical <= bound + 3.0 * binomial_sigma(bound, trials)
}
