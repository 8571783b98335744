//! Random quotient bodies `K̃ = Q·G(B_Z)` of ℓ₁- and ℓ_p-sums of a target
//! space W.
//!
//! `Z = ℓ_pᴺ(W)` is identified with ℝ^{Nk}; block `j` (0-based) occupies
//! columns `j·k .. (j+1)·k` of the Gaussian map `G: ℝ^{Nk} → ℝⁿ`. A quotient
//! is represented by an orthonormal basis `U` of its range, and the effective
//! map is `G̃ = Uᵀ·G`, expressed in the coordinates of that basis.

mod norm;
mod simplex;

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix, RngStream, Subspace};

pub use norm::{make_norm_oracle, CustomNorm, NormKind, NormOracle};
pub use simplex::FEASIBILITY_TOLERANCE;

pub(crate) use simplex::{solve as solve_lp, LinearProgram, LpOutcome};

/// The Gaussian map `G: ℝ^{Nk} → ℝⁿ` with its column-block structure.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockGaussianMap {
    n: usize,
    blocks: usize,
    k: usize,
    g: DenseMatrix,
    provenance: Option<RngStream>,
}

impl BlockGaussianMap {
    /// Samples `G` with i.i.d. `N(0, 1/n)` entries.
    pub fn sample(n: usize, blocks: usize, k: usize, rng: RngStream) -> Result<Self> {
        if n == 0 || blocks == 0 || k == 0 {
            return Err(Error::invalid("n, N and k must all be at least 1"));
        }
        let g = linalg::sample_gaussian_matrix(n, blocks * k, 1.0 / n as f64, &rng)?;
        Ok(Self {
            n,
            blocks,
            k,
            g,
            provenance: Some(rng),
        })
    }

    /// Wraps a deterministic `n x (blocks·k)` matrix.
    pub fn from_matrix(blocks: usize, k: usize, g: DenseMatrix) -> Result<Self> {
        if blocks == 0 || k == 0 || g.cols() != blocks * k {
            return Err(Error::DimensionMismatch(format!(
                "{} columns cannot hold {blocks} blocks of width {k}",
                g.cols()
            )));
        }
        Ok(Self {
            n: g.rows(),
            blocks,
            k,
            g,
            provenance: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.g
    }

    pub fn provenance(&self) -> Option<RngStream> {
        self.provenance
    }

    /// `G|_{F_j}` before any quotient.
    pub fn block(&self, j: usize) -> Result<DenseMatrix> {
        if j >= self.blocks {
            return Err(Error::IndexOutOfRange {
                index: j,
                len: self.blocks,
            });
        }
        self.g.column_block(j * self.k, self.k)
    }
}

/// A rank-m orthogonal quotient map of ℝⁿ, stored through its range.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientMap {
    range: Subspace,
}

impl QuotientMap {
    pub fn new(range: Subspace) -> Self {
        Self { range }
    }

    /// Haar-random rank-m quotient of ℝⁿ.
    pub fn sample(n: usize, m: usize, rng: &RngStream) -> Result<Self> {
        Ok(Self::new(linalg::sample_grassmann(n, m, rng)?))
    }

    pub fn range(&self) -> &Subspace {
        &self.range
    }

    pub fn rank(&self) -> usize {
        self.range.dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.range.ambient_dim()
    }
}

/// Outcome of a Minkowski-gauge linear program.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gauge {
    Finite(f64),
    /// The point is outside the linear span of the body.
    Infeasible,
}

impl Gauge {
    pub fn value(self) -> Option<f64> {
        match self {
            Gauge::Finite(v) => Some(v),
            Gauge::Infeasible => None,
        }
    }
}

/// The body `K̃ = G̃(B_{Z_p})`, with `G̃ = Uᵀ·G` for a quotient with range
/// basis `U` (or `G` itself when no quotient is applied).
#[derive(Debug, Clone)]
pub struct QuotientBody {
    map: Arc<BlockGaussianMap>,
    quotient: Option<QuotientMap>,
    w: NormOracle,
    p_exponent: f64,
    effective: DenseMatrix,
}

impl QuotientBody {
    pub fn new(
        map: Arc<BlockGaussianMap>,
        quotient: Option<QuotientMap>,
        w: NormOracle,
        p_exponent: f64,
    ) -> Result<Self> {
        if w.k() != map.k() {
            return Err(Error::DimensionMismatch(format!(
                "W has dimension {} but the map has blocks of width {}",
                w.k(),
                map.k()
            )));
        }
        if !(p_exponent >= 1.0 && p_exponent.is_finite()) {
            return Err(Error::invalid(format!(
                "p_exponent must lie in [1, ∞), got {p_exponent}"
            )));
        }
        let effective = match &quotient {
            None => map.matrix().clone(),
            Some(q) => {
                if q.ambient_dim() != map.n() {
                    return Err(Error::DimensionMismatch(format!(
                        "quotient acts on ℝ^{} but the map lands in ℝ^{}",
                        q.ambient_dim(),
                        map.n()
                    )));
                }
                q.range().basis().transpose().mul(map.matrix())?
            }
        };
        Ok(Self {
            map,
            quotient,
            w,
            p_exponent,
            effective,
        })
    }

    /// Same map, W and exponent under a different quotient.
    pub fn with_quotient(&self, quotient: Option<QuotientMap>) -> Result<Self> {
        Self::new(self.map.clone(), quotient, self.w.clone(), self.p_exponent)
    }

    pub fn map(&self) -> &Arc<BlockGaussianMap> {
        &self.map
    }

    pub fn quotient(&self) -> Option<&QuotientMap> {
        self.quotient.as_ref()
    }

    pub fn w(&self) -> &NormOracle {
        &self.w
    }

    pub fn p_exponent(&self) -> f64 {
        self.p_exponent
    }

    pub fn n(&self) -> usize {
        self.map.n()
    }

    /// Rank of the quotient (n when no quotient is applied).
    pub fn m(&self) -> usize {
        self.effective.rows()
    }

    pub fn blocks(&self) -> usize {
        self.map.blocks()
    }

    pub fn k(&self) -> usize {
        self.map.k()
    }

    /// `G̃`, of shape `m x Nk`.
    pub fn effective(&self) -> &DenseMatrix {
        &self.effective
    }

    /// The `m x k` block `G̃|_{F_j}`.
    pub fn block_restriction(&self, j: usize) -> Result<DenseMatrix> {
        if j >= self.blocks() {
            return Err(Error::IndexOutOfRange {
                index: j,
                len: self.blocks(),
            });
        }
        self.effective.column_block(j * self.k(), self.k())
    }

    fn check_direction(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.m() {
            return Err(Error::DimensionMismatch(format!(
                "direction of length {} for a body in ℝ^{}",
                x.len(),
                self.m()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("direction has non-finite entries"));
        }
        Ok(())
    }

    /// Per-block values `f((G̃|_{F_j})ᵀ x)`.
    fn block_duals(&self, x: &[f64], f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        let gt = self.effective.as_dmatrix();
        let k = self.k();
        let mut buf = vec![0.0; k];
        (0..self.blocks())
            .map(|j| {
                for (c, b) in buf.iter_mut().enumerate() {
                    let col = gt.column(j * k + c);
                    *b = col.iter().zip(x).map(|(g, v)| g * v).sum();
                }
                f(&buf)
            })
            .collect()
    }

    fn aggregate(&self, per_block: &[f64]) -> f64 {
        if self.p_exponent == 1.0 {
            per_block.iter().fold(0.0f64, |m, v| m.max(*v))
        } else {
            let conj = self.p_exponent / (self.p_exponent - 1.0);
            norm::lp_norm(per_block, conj)
        }
    }

    /// Support function `h_K̃(x) = sup_{y ∈ K̃} ⟨x, y⟩`: the ℓ_{p′} aggregate
    /// (max for p = 1) of `dual_gauge_W((G̃|_{F_j})ᵀ x)` over blocks.
    pub fn support_function(&self, x: &[f64]) -> Result<f64> {
        self.check_direction(x)?;
        Ok(self.aggregate(&self.block_duals(x, |y| self.w.dual_gauge(y))))
    }

    /// Support function of `D̃`, the body obtained by replacing B_W with B₂ᵏ.
    pub fn support_euclidean(&self, x: &[f64]) -> Result<f64> {
        self.check_direction(x)?;
        Ok(self.aggregate(&self.block_duals(x, linalg::euclidean_norm)))
    }

    /// Norm of `z ∈ ℝ^{Nk}` in `Z_p`: the ℓ_p sum of the block gauges.
    pub fn sequence_gauge(&self, z: &[f64]) -> Result<f64> {
        let k = self.k();
        if z.len() != self.blocks() * k {
            return Err(Error::DimensionMismatch(format!(
                "sequence of length {} for {} blocks of width {k}",
                z.len(),
                self.blocks()
            )));
        }
        let per: Vec<f64> = z.chunks(k).map(|c| self.w.gauge(c)).collect();
        Ok(if self.p_exponent == 1.0 {
            per.iter().sum()
        } else {
            norm::lp_norm(&per, self.p_exponent)
        })
    }

    /// Minkowski gauge `‖x‖_K̃` by linear programming. W must be polytopal
    /// (L1 or LINF) and the sum must be ℓ₁.
    pub fn gauge_lp(&self, x: &[f64]) -> Result<Gauge> {
        self.check_direction(x)?;
        if self.p_exponent != 1.0 {
            return Err(Error::precondition("gauge_lp needs p_exponent = 1"));
        }
        polytope_gauge(self.effective.as_dmatrix(), self.blocks(), &self.w, x)
    }
}

/// `min Σ_j gauge_W(w_j)` subject to `Σ_j B_j w_j = x`, where `B_j` are the
/// consecutive `k`-column blocks of `mat`.
pub(crate) fn polytope_gauge(
    mat: &DMatrix<f64>,
    blocks: usize,
    w: &NormOracle,
    x: &[f64],
) -> Result<Gauge> {
    if x.iter().all(|v| *v == 0.0) {
        return Ok(Gauge::Finite(0.0));
    }
    let k = w.k();
    let nk = blocks * k;
    let rows = mat.nrows();
    let c = w.scale();
    let lp = match w.kind() {
        NormKind::L1 => {
            // w = u⁺ − u⁻
            let mut cost = vec![c; 2 * nk];
            cost.iter_mut().for_each(|v| *v = c);
            let eq_rows = (0..rows)
                .map(|r| {
                    let mut row = vec![0.0; 2 * nk];
                    for col in 0..nk {
                        row[col] = mat[(r, col)];
                        row[nk + col] = -mat[(r, col)];
                    }
                    row
                })
                .collect();
            LinearProgram {
                cost,
                eq_rows,
                eq_rhs: x.to_vec(),
                ..Default::default()
            }
        }
        NormKind::Linf => {
            // variables: u⁺ (nk), u⁻ (nk), s (blocks); |u⁺ − u⁻|_i ≤ s_j on block j
            let nv = 2 * nk + blocks;
            let mut cost = vec![0.0; nv];
            cost[2 * nk..].iter_mut().for_each(|v| *v = c);
            let eq_rows = (0..rows)
                .map(|r| {
                    let mut row = vec![0.0; nv];
                    for col in 0..nk {
                        row[col] = mat[(r, col)];
                        row[nk + col] = -mat[(r, col)];
                    }
                    row
                })
                .collect();
            let mut ub_rows = Vec::with_capacity(2 * nk);
            for col in 0..nk {
                let j = col / k;
                for sign in [1.0, -1.0] {
                    let mut row = vec![0.0; nv];
                    row[col] = sign;
                    row[nk + col] = -sign;
                    row[2 * nk + j] = -1.0;
                    ub_rows.push(row);
                }
            }
            LinearProgram {
                cost,
                eq_rows,
                eq_rhs: x.to_vec(),
                ub_rhs: vec![0.0; ub_rows.len()],
                ub_rows,
            }
        }
        _ => return Err(Error::NotPolytopal),
    };
    match solve_lp(&lp)? {
        LpOutcome::Infeasible => Ok(Gauge::Infeasible),
        LpOutcome::Optimal { objective, .. } => Ok(Gauge::Finite(objective.max(0.0))),
    }
}

/// Serializable recipe that rebuilds a body bit-identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyDescriptor {
    pub n: usize,
    #[serde(rename = "N")]
    pub blocks: usize,
    pub k: usize,
    pub kind: NormKind,
    /// Exponent of the outer sum (1 for ℓ₁ᴺ(W)).
    pub p: f64,
    pub seed: u64,
    pub stream: u64,
}

impl BodyDescriptor {
    pub fn rng(&self) -> RngStream {
        RngStream::new(self.seed, self.stream)
    }

    pub fn build_map(&self) -> Result<BlockGaussianMap> {
        BlockGaussianMap::sample(self.n, self.blocks, self.k, self.rng())
    }

    /// The body without quotient.
    pub fn build(&self) -> Result<QuotientBody> {
        let w = make_norm_oracle(self.kind, self.k)?;
        QuotientBody::new(Arc::new(self.build_map()?), None, w, self.p)
    }
}

/// Result of testing `B_Z ⊆ B_{Z_p} ⊆ N^{1/q}·B_Z` on random vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub trials: usize,
    pub q: f64,
    pub upper_factor: f64,
    /// Largest `‖x‖_{Z_p} − ‖x‖_Z`.
    pub max_lower_violation: f64,
    /// Largest `‖x‖_Z − N^{1/q}‖x‖_{Z_p}`.
    pub max_upper_violation: f64,
    /// Trials where either inequality failed by more than 1e-9 (relative).
    pub violations: usize,
}

/// Checks `‖x‖_{Z_p} ≤ ‖x‖_Z ≤ N^{1/q}·‖x‖_{Z_p}` for random `x ∈ ℝ^{Nk}`.
/// Every fourth test vector is supported on a single block, where both
/// gauges coincide.
pub fn zp_sandwich_check(
    body_z: &QuotientBody,
    body_zp: &QuotientBody,
    q: f64,
    trials: usize,
    rng: &RngStream,
) -> Result<SandwichReport> {
    if !(q > 1.0 && q.is_finite()) {
        return Err(Error::invalid(format!("q must lie in (1, ∞), got {q}")));
    }
    if body_z.map().matrix() != body_zp.map().matrix()
        || body_z.blocks() != body_zp.blocks()
        || body_z.w().kind() != body_zp.w().kind()
    {
        return Err(Error::precondition("both bodies must share the map and W"));
    }
    let p = q / (q - 1.0);
    if body_z.p_exponent() != 1.0 || (body_zp.p_exponent() - p).abs() > 1e-12 * p {
        return Err(Error::precondition(format!(
            "expected exponents 1 and q/(q-1) = {p}, got {} and {}",
            body_z.p_exponent(),
            body_zp.p_exponent()
        )));
    }
    let (blocks, k) = (body_z.blocks(), body_z.k());
    let factor = (blocks as f64).powf(1.0 / q);
    let mut gen = rng.generator();
    let mut report = SandwichReport {
        trials,
        q,
        upper_factor: factor,
        max_lower_violation: f64::NEG_INFINITY,
        max_upper_violation: f64::NEG_INFINITY,
        violations: 0,
    };
    for t in 0..trials {
        let mut x = linalg::gaussian_vec(blocks * k, &mut gen);
        if t % 4 == 3 {
            let keep = gen.random_range(0..blocks);
            for (j, chunk) in x.chunks_mut(k).enumerate() {
                if j != keep {
                    chunk.iter_mut().for_each(|v| *v = 0.0);
                }
            }
        }
        let gz = body_z.sequence_gauge(&x)?;
        let gzp = body_zp.sequence_gauge(&x)?;
        let lower = gzp - gz;
        let upper = gz - factor * gzp;
        report.max_lower_violation = report.max_lower_violation.max(lower);
        report.max_upper_violation = report.max_upper_violation.max(upper);
        let tol = 1e-9 * gz.max(1.0);
        if lower > tol || upper > tol {
            report.violations += 1;
        }
    }
    Ok(report)
}
