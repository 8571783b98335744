//! Empirical tails for Gaussian singular values and for the diameter of
//! random projections.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::mean_width::{coordinate_section_mean_width, mean_width_mc, MIN_TRIALS};
use super::within_three_sigma;
use crate::error::{Error, Result};
use crate::linalg::{self, RngStream};

/// Sphere samples used to estimate `M*` of a point cloud.
pub const CLOUD_MSTAR_TRIALS: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailExperimentResult {
    pub m: usize,
    pub k: usize,
    pub sigma: f64,
    pub t_grid: Vec<f64>,
    /// Frequency of `s₁ > (√m + √k)σ + t`.
    pub empirical_upper: Vec<f64>,
    /// Frequency of `s_k < (√m − √k)σ − t`.
    pub empirical_lower: Vec<f64>,
    /// `e^{−t²/2σ²}`
    pub theoretical: Vec<f64>,
    pub trials: usize,
}

impl TailExperimentResult {
    /// Grid positions where either tail exceeds its bound by more than
    /// three binomial standard deviations.
    pub fn violations(&self) -> Vec<usize> {
        (0..self.t_grid.len())
            .filter(|&i| {
                !within_three_sigma(self.empirical_upper[i], self.theoretical[i], self.trials)
                    || !within_three_sigma(self.empirical_lower[i], self.theoretical[i], self.trials)
            })
            .collect()
    }
}

/// Samples `trials` Gaussian `m x k` matrices with entry standard deviation
/// `sigma` (trial i uses `rng.child(i)`) and records both singular-value
/// tails on a grid of deviations `t`.
pub fn sv_tail_experiment(
    m: usize,
    k: usize,
    sigma: f64,
    t_grid: &[f64],
    trials: usize,
    rng: &RngStream,
) -> Result<TailExperimentResult> {
    if k == 0 || k > m {
        return Err(Error::invalid(format!("need 1 ≤ k ≤ m, got k={k}, m={m}")));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
    }
    if t_grid.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return Err(Error::invalid("t values must be finite and nonnegative"));
    }
    if trials < MIN_TRIALS {
        return Err(Error::invalid(format!("need at least {MIN_TRIALS} trials, got {trials}")));
    }
    let (sm, sk) = ((m as f64).sqrt(), (k as f64).sqrt());
    let mut upper = vec![0usize; t_grid.len()];
    let mut lower = vec![0usize; t_grid.len()];
    for trial in 0..trials {
        let mut gen = rng.child(trial as u64).generator();
        let a = linalg::gaussian_dmatrix(m, k, sigma, &mut gen);
        let s = linalg::singular_values_of(&a)?;
        let (s1, sk_min) = (s[0], s[k - 1]);
        for (i, t) in t_grid.iter().enumerate() {
            if s1 > (sm + sk) * sigma + t {
                upper[i] += 1;
            }
            if sk_min < (sm - sk) * sigma - t {
                lower[i] += 1;
            }
        }
    }
    let freq = |c: &[usize]| c.iter().map(|&x| x as f64 / trials as f64).collect();
    Ok(TailExperimentResult {
        m,
        k,
        sigma,
        t_grid: t_grid.to_vec(),
        empirical_upper: freq(&upper),
        empirical_lower: freq(&lower),
        theoretical: t_grid.iter().map(|t| (-t * t / (2.0 * sigma * sigma)).exp()).collect(),
        trials,
    })
}

/// A subset S of ℝᵐ probed by the projection experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeSet {
    /// `radius · (B₂ᵐ ∩ span(e₁, …, e_dim))`
    BallSection { dim: usize, radius: f64 },
    /// Finitely many points of ℝᵐ.
    PointCloud(Vec<Vec<f64>>),
}

impl ProbeSet {
    pub fn descriptor(&self) -> String {
        match self {
            ProbeSet::BallSection { dim, radius } => format!("ball-section(dim={dim}, radius={radius})"),
            ProbeSet::PointCloud(p) => format!("point-cloud({} points)", p.len()),
        }
    }

    fn validate(&self, m: usize) -> Result<()> {
        match self {
            ProbeSet::BallSection { dim, radius } => {
                if *dim == 0 || *dim > m {
                    return Err(Error::invalid(format!("section dimension {dim} outside 1..={m}")));
                }
                if !(*radius >= 0.0 && radius.is_finite()) {
                    return Err(Error::invalid(format!("bad section radius {radius}")));
                }
            }
            ProbeSet::PointCloud(points) => {
                if points.is_empty() {
                    return Err(Error::invalid("point cloud is empty"));
                }
                if let Some(p) = points.iter().find(|p| p.len() != m) {
                    return Err(Error::DimensionMismatch(format!(
                        "cloud point of length {} in ℝ^{m}",
                        p.len()
                    )));
                }
                if points.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(Error::invalid("cloud has non-finite coordinates"));
                }
            }
        }
        Ok(())
    }

    /// `max_{x∈S} |x|`
    pub fn radius(&self) -> f64 {
        match self {
            ProbeSet::BallSection { radius, .. } => *radius,
            ProbeSet::PointCloud(p) => p.iter().map(|x| linalg::euclidean_norm(x)).fold(0.0, f64::max),
        }
    }

    /// `M*(S)`: closed form for sections, Monte Carlo for clouds.
    pub fn mstar(&self, m: usize, rng: &RngStream) -> Result<f64> {
        self.validate(m)?;
        match self {
            ProbeSet::BallSection { dim, radius } => Ok(radius * coordinate_section_mean_width(m, *dim)?),
            ProbeSet::PointCloud(points) => {
                let support = |x: &[f64]| {
                    points
                        .iter()
                        .map(|y| linalg::dot(x, y))
                        .fold(f64::NEG_INFINITY, f64::max)
                };
                Ok(mean_width_mc(support, m, CLOUD_MSTAR_TRIALS, rng)?.estimate)
            }
        }
    }

    /// `max_{x∈S} |A x|` for a matrix acting on ℝᵐ.
    fn max_image_norm(&self, a: &DMatrix<f64>) -> Result<f64> {
        match self {
            ProbeSet::BallSection { dim, radius } => {
                Ok(radius * linalg::operator_norm(&a.columns(0, *dim).into_owned())?)
            }
            ProbeSet::PointCloud(points) => Ok(points
                .iter()
                .map(|p| (a * nalgebra::DVector::from_column_slice(p)).norm())
                .fold(0.0, f64::max)),
        }
    }
}

fn mstar_stream(rng: &RngStream) -> RngStream {
    rng.child(u64::MAX)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShrinkExperimentResult {
    pub m: usize,
    pub d: usize,
    pub a: f64,
    pub t: f64,
    pub set_descriptor: String,
    /// `a√(d/m) + M*(S) + t`
    pub radius_bound: f64,
    pub empirical_fail: f64,
    /// `min(1, e^{−t²m/2a² + 1})`
    pub theoretical_fail: f64,
    pub mstar_used: f64,
    pub trials: usize,
}

impl ShrinkExperimentResult {
    pub fn within_bound(&self) -> bool {
        within_three_sigma(self.empirical_fail, self.theoretical_fail, self.trials)
    }
}

/// Projects S onto Haar-random d-dimensional subspaces of ℝᵐ (trial i uses
/// `rng.child(i)`) and counts how often the image leaves the ball of radius
/// `a√(d/m) + M*(S) + t`.
pub fn shrinking_experiment(
    set: &ProbeSet,
    m: usize,
    d: usize,
    a: f64,
    t: f64,
    trials: usize,
    rng: &RngStream,
) -> Result<ShrinkExperimentResult> {
    if d == 0 || d > m {
        return Err(Error::invalid(format!("need 1 ≤ d ≤ m, got d={d}, m={m}")));
    }
    if !(a > 0.0 && a.is_finite()) || !(t > 0.0 && t.is_finite()) {
        return Err(Error::invalid(format!("a and t must be positive, got a={a}, t={t}")));
    }
    if trials < MIN_TRIALS {
        return Err(Error::invalid(format!("need at least {MIN_TRIALS} trials, got {trials}")));
    }
    set.validate(m)?;
    if set.radius() > a * (1.0 + 1e-12) {
        return Err(Error::precondition(format!(
            "set has radius {} which exceeds a = {a}",
            set.radius()
        )));
    }
    let mstar = set.mstar(m, &mstar_stream(rng))?;
    let radius_bound = a * (d as f64 / m as f64).sqrt() + mstar + t;
    let mut fails = 0usize;
    for trial in 0..trials {
        let h = linalg::sample_grassmann(m, d, &rng.child(trial as u64))?;
        let ut = h.basis().as_dmatrix().transpose();
        if set.max_image_norm(&ut)? > radius_bound {
            fails += 1;
        }
    }
    Ok(ShrinkExperimentResult {
        m,
        d,
        a,
        t,
        set_descriptor: set.descriptor(),
        radius_bound,
        empirical_fail: fails as f64 / trials as f64,
        theoretical_fail: (-t * t * m as f64 / (2.0 * a * a) + 1.0).exp().min(1.0),
        mstar_used: mstar,
        trials,
    })
}

/// `√(d/m)·a + M*(S)`, the bound on `E max_{x∈S} |Ax|` for a `d x m` matrix
/// A with `N(0, 1/m)` entries.
pub fn chevet_gordon_bound(d: usize, m: usize, a: f64, mstar: f64) -> Result<f64> {
    if d == 0 || m == 0 {
        return Err(Error::invalid("d and m must be at least 1"));
    }
    if !(a >= 0.0 && a.is_finite()) || !mstar.is_finite() {
        return Err(Error::invalid(format!("bad inputs a={a}, mstar={mstar}")));
    }
    Ok((d as f64 / m as f64).sqrt() * a + mstar)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChevetGordonResult {
    pub d: usize,
    pub m: usize,
    pub set_descriptor: String,
    pub a: f64,
    pub mstar_used: f64,
    pub bound: f64,
    /// Monte Carlo mean of `max_{x∈S} |Ax|`.
    pub mean_max: f64,
    pub std_error: f64,
    pub trials: usize,
}

impl ChevetGordonResult {
    pub fn within_bound(&self) -> bool {
        self.mean_max <= self.bound + 3.0 * self.std_error
    }
}

/// Estimates `E max_{x∈S} |Ax|` over Gaussian `d x m` matrices with entry
/// variance `1/m` and compares it with [`chevet_gordon_bound`].
pub fn chevet_gordon_experiment(
    set: &ProbeSet,
    d: usize,
    m: usize,
    trials: usize,
    rng: &RngStream,
) -> Result<ChevetGordonResult> {
    if trials < MIN_TRIALS {
        return Err(Error::invalid(format!("need at least {MIN_TRIALS} trials, got {trials}")));
    }
    set.validate(m)?;
    let a = set.radius();
    let mstar = set.mstar(m, &mstar_stream(rng))?;
    let bound = chevet_gordon_bound(d, m, a, mstar)?;
    let std_dev = 1.0 / (m as f64).sqrt();
    let mut values = Vec::with_capacity(trials);
    for trial in 0..trials {
        let mut gen = rng.child(trial as u64).generator();
        let mat = linalg::gaussian_dmatrix(d, m, std_dev, &mut gen);
        values.push(set.max_image_norm(&mat)?);
    }
    let n = trials as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(ChevetGordonResult {
        d,
        m,
        set_descriptor: set.descriptor(),
        a,
        mstar_used: mstar,
        bound,
        mean_max: mean,
        std_error: (var / n).sqrt(),
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_deviation_makes_bound_vacuous() {
        let r = sv_tail_experiment(4, 2, 1.0, &[0.0, 0.5], 100, &RngStream::new(1, 0)).unwrap();
        assert_eq!(r.theoretical[0], 1.0);
        assert_eq!(r.empirical_upper.len(), 2);
        assert!(r.violations().is_empty());
    }

    #[test]
    fn large_t_never_fails() {
        let set = ProbeSet::BallSection { dim: 3, radius: 1.0 };
        let r = shrinking_experiment(&set, 10, 2, 1.0, 1.0, 200, &RngStream::new(2, 0)).unwrap();
        assert!(r.radius_bound >= 1.0);
        assert_eq!(r.empirical_fail, 0.0);
    }

    #[test]
    fn oversized_set_is_rejected() {
        let set = ProbeSet::PointCloud(vec![vec![2.0, 0.0, 0.0]]);
        let e = shrinking_experiment(&set, 3, 1, 1.0, 0.1, 100, &RngStream::new(0, 0));
        assert!(matches!(e, Err(Error::Precondition(_))));
    }

    #[test]
    fn bound_for_origin() {
        assert_eq!(chevet_gordon_bound(4, 16, 2.0, 0.0).unwrap(), 1.0);
        let set = ProbeSet::PointCloud(vec![vec![0.0; 5]]);
        let r = chevet_gordon_experiment(&set, 2, 5, 100, &RngStream::new(0, 1)).unwrap();
        assert_eq!(r.mean_max, 0.0);
        assert!(r.within_bound());
    }
}
