//! Monte Carlo estimation of the mean width functional
//! `M*(S) = ∫_{S^{s−1}} sup_{y∈S} ⟨x, y⟩ dx`.

use serde::{Deserialize, Serialize};

use super::gamma::ln_gamma;
use crate::body::QuotientBody;
use crate::error::{Error, Result};
use crate::linalg::{self, RngStream};
use crate::witness::check_global_diameter;

pub const MIN_TRIALS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanWidthEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub trials: usize,
}

fn summarize(values: &[f64]) -> MeanWidthEstimate {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    MeanWidthEstimate {
        estimate: mean,
        std_error: (var / n).sqrt(),
        trials: values.len(),
    }
}

/// Averages `support` over `trials` uniform points of the sphere in ℝˢ.
pub fn mean_width_mc<F>(support: F, s: usize, trials: usize, rng: &RngStream) -> Result<MeanWidthEstimate>
where
    F: Fn(&[f64]) -> f64,
{
    if s == 0 {
        return Err(Error::invalid("sphere dimension must be at least 1"));
    }
    if trials < MIN_TRIALS {
        return Err(Error::invalid(format!("need at least {MIN_TRIALS} trials, got {trials}")));
    }
    let mut gen = rng.generator();
    let mut values = Vec::with_capacity(trials);
    for _ in 0..trials {
        let x = linalg::sphere_point(s, &mut gen);
        let h = support(&x);
        if !h.is_finite() {
            return Err(Error::Numerical("support function returned a non-finite value".into()));
        }
        values.push(h);
    }
    Ok(summarize(&values))
}

/// `M*` of the unit ball of a k-dimensional subspace of ℝᵐ, i.e. `E|Px|`
/// for x uniform on the sphere and P a rank-k orthogonal projection.
pub fn coordinate_section_mean_width(m: usize, k: usize) -> Result<f64> {
    if k == 0 || k > m {
        return Err(Error::invalid(format!("need 1 ≤ k ≤ m, got k={k}, m={m}")));
    }
    let (mf, kf) = (m as f64, k as f64);
    Ok((ln_gamma(mf / 2.0) + ln_gamma((kf + 1.0) / 2.0) - ln_gamma(kf / 2.0) - ln_gamma((mf + 1.0) / 2.0)).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TledReport {
    pub jc: Vec<usize>,
    pub trials: usize,
    /// `M*(D̃_{Jᶜ})`
    pub hull: MeanWidthEstimate,
    /// `M*(D̃_j)` for each j in Jᶜ, same sphere points.
    pub blocks: Vec<f64>,
    pub max_block: f64,
    /// `√(log N / m)`
    pub log_term: f64,
    pub c0: f64,
    pub holds: bool,
    /// Smallest constant for which the inequality holds on this instance;
    /// absent when no constant works (log N = 0 and a positive gap).
    pub c0_min: Option<f64>,
}

/// Compares `M*(D̃_{Jᶜ})` with `C₀√(log N/m) + max_{j∈Jᶜ} M*(D̃_j)`, where
/// `D̃_j = G̃|_{F_j}(B₂ᵏ)`. Both sides use the same sphere points.
pub fn tled_bound_check(
    body: &QuotientBody,
    jc: &[usize],
    c0: f64,
    trials: usize,
    rng: &RngStream,
) -> Result<TledReport> {
    if jc.is_empty() {
        return Err(Error::invalid("the index set Jᶜ is empty"));
    }
    if let Some(&j) = jc.iter().find(|&&j| j >= body.blocks()) {
        return Err(Error::IndexOutOfRange {
            index: j,
            len: body.blocks(),
        });
    }
    if trials < MIN_TRIALS {
        return Err(Error::invalid(format!("need at least {MIN_TRIALS} trials, got {trials}")));
    }
    if !check_global_diameter(body)? {
        return Err(Error::precondition("some block of G has operator norm above 2"));
    }
    let m = body.m();
    let blocks: Vec<_> = jc
        .iter()
        .map(|&j| body.block_restriction(j).map(|b| b.into_dmatrix()))
        .collect::<Result<_>>()?;
    let mut gen = rng.generator();
    let mut hull = Vec::with_capacity(trials);
    let mut sums = vec![0.0; jc.len()];
    for _ in 0..trials {
        let x = nalgebra::DVector::from_vec(linalg::sphere_point(m, &mut gen));
        let mut best = 0.0f64;
        for (b, s) in blocks.iter().zip(sums.iter_mut()) {
            let h = (b.transpose() * &x).norm();
            *s += h;
            best = best.max(h);
        }
        hull.push(best);
    }
    let hull = summarize(&hull);
    let per_block: Vec<f64> = sums.iter().map(|s| s / trials as f64).collect();
    let max_block = per_block.iter().fold(f64::NEG_INFINITY, |a, b| a.max(*b));
    let log_term = ((body.blocks() as f64).ln() / m as f64).sqrt();
    let gap = hull.estimate - max_block;
    let c0_min = if gap <= 0.0 {
        Some(0.0)
    } else if log_term > 0.0 {
        Some(gap / log_term)
    } else {
        None
    };
    Ok(TledReport {
        jc: jc.to_vec(),
        trials,
        hull,
        blocks: per_block,
        max_block,
        log_term,
        c0,
        holds: hull.estimate <= c0 * log_term + max_block,
        c0_min,
    })
}
