//! Locating a block `j` whose image `Ẽ_j` carries an isometric,
//! 1-complemented copy of W inside a quotient body.
//!
//! The sufficient test combines a frame condition on `G̃|_{F_j}`, a bound
//! `κ` on the projections onto `Ẽ_j` of all competing Euclidean blocks, and
//! the arithmetic condition `κ ≤ (1/(2√k))√(m/n)`. All inequalities are
//! decided inclusively.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::body::{polytope_gauge, Gauge, QuotientBody, QuotientMap};
use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix, Subspace};

/// Slack on gauge values when deciding membership in `K̃_j`.
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameCheck {
    pub s_min: f64,
    pub s_max: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    /// `s₁(P_{Ẽ_j} G̃|_{F_i})` for `i ≠ j`, in increasing order of i.
    pub cross_norms: Vec<f64>,
    pub max_cross_norm: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub j: usize,
    pub s_min_block: f64,
    pub s_max_block: f64,
    pub omega_j0_pass: bool,
    pub cross_norms: Vec<f64>,
    pub max_cross_norm: f64,
    pub omega_jprime_pass: bool,
    pub brutal_pass: bool,
    pub exact_lp_pass: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub quotient_id: String,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub kappa: f64,
    /// `κ ≤ (1/(2√k))√(m/n)`
    pub cubeball_pass: bool,
    pub per_block: Vec<BlockReport>,
    pub witness: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct WitnessOptions {
    pub quotient_id: String,
    /// Also run [`exact_isometry_check`] on every block.
    pub exact: bool,
}

fn frame_window(body: &QuotientBody, j: usize, lo: f64, hi: f64) -> Result<FrameCheck> {
    let block = body.block_restriction(j)?;
    let s = linalg::singular_values(&block)?;
    let (s_max, s_min) = (s[0], s[s.len() - 1]);
    let scale = (body.m() as f64 / body.n() as f64).sqrt();
    Ok(FrameCheck {
        s_min,
        s_max,
        pass: lo * scale <= s_min && s_max <= hi * scale,
    })
}

/// Extreme singular values of `G̃|_{F_j}` and whether they lie in
/// `[½√(m/n), 2√(m/n)]`.
pub fn check_block_frame(body: &QuotientBody, j: usize) -> Result<FrameCheck> {
    frame_window(body, j, 0.5, 2.0)
}

/// Orthonormal basis (in the coordinates of `ℝᵐ`) of `Ẽ_j`.
fn block_span(body: &QuotientBody, j: usize) -> Result<Subspace> {
    linalg::span_of_columns(&body.block_restriction(j)?)
}

fn cross_from_span(body: &QuotientBody, span: &Subspace, j: usize, kappa: f64) -> Result<CrossCheck> {
    let k = body.k();
    // coordinates of P_{Ẽ_j} G̃ in the basis of Ẽ_j
    let coords = span.basis().as_dmatrix().transpose() * body.effective().as_dmatrix();
    let mut cross_norms = Vec::with_capacity(body.blocks().saturating_sub(1));
    for i in (0..body.blocks()).filter(|&i| i != j) {
        cross_norms.push(linalg::operator_norm(&coords.columns(i * k, k).into_owned())?);
    }
    let max_cross_norm = cross_norms.iter().fold(0.0f64, |a, b| a.max(*b));
    Ok(CrossCheck {
        pass: max_cross_norm <= kappa,
        cross_norms,
        max_cross_norm,
    })
}

/// Whether the projections onto `Ẽ_j` of all other Euclidean blocks
/// `D̃_i = G̃|_{F_i}(B₂ᵏ)` lie in `κB₂ᵐ`, decided through `s₁(P_{Ẽ_j}G̃|_{F_i})`.
pub fn check_cross_inclusion(body: &QuotientBody, j: usize, kappa: f64) -> Result<CrossCheck> {
    if !(kappa > 0.0) {
        return Err(Error::invalid(format!("kappa must be positive, got {kappa}")));
    }
    let span = block_span(body, j)?;
    cross_from_span(body, &span, j, kappa)
}

/// `κ ≤ (1/(2√k))√(m/n)`
pub fn cubeball_holds(kappa: f64, k: usize, m: usize, n: usize) -> bool {
    kappa <= (m as f64 / n as f64).sqrt() / (2.0 * (k as f64).sqrt())
}

pub fn find_witness(body: &QuotientBody, kappa: f64) -> Result<WitnessReport> {
    find_witness_with(body, kappa, &WitnessOptions::default())
}

/// Scans every block and reports the smallest index passing the sufficient
/// test (or, when requested, the exact LP test).
pub fn find_witness_with(body: &QuotientBody, kappa: f64, opts: &WitnessOptions) -> Result<WitnessReport> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::invalid(format!("kappa must be positive, got {kappa}")));
    }
    let cubeball_pass = cubeball_holds(kappa, body.k(), body.m(), body.n());
    let mut per_block = Vec::with_capacity(body.blocks());
    for j in 0..body.blocks() {
        let frame = check_block_frame(body, j)?;
        let span = block_span(body, j)?;
        let cross = cross_from_span(body, &span, j, kappa)?;
        let exact_lp_pass = if opts.exact {
            Some(exact_check_with_span(body, j, &span)?)
        } else {
            None
        };
        per_block.push(BlockReport {
            j,
            s_min_block: frame.s_min,
            s_max_block: frame.s_max,
            omega_j0_pass: frame.pass,
            cross_norms: cross.cross_norms,
            max_cross_norm: cross.max_cross_norm,
            omega_jprime_pass: cross.pass,
            brutal_pass: frame.pass && cross.pass && cubeball_pass,
            exact_lp_pass,
        });
    }
    let witness = per_block
        .iter()
        .find(|b| b.brutal_pass || b.exact_lp_pass == Some(true))
        .map(|b| b.j);
    Ok(WitnessReport {
        quotient_id: opts.quotient_id.clone(),
        n: body.n(),
        m: body.m(),
        k: body.k(),
        kappa,
        cubeball_pass,
        per_block,
        witness,
    })
}

/// Decides `P_{Ẽ_j}(K̃_j′) ⊆ K̃_j` by checking that the projection of every
/// vertex image `G̃|_{F_i} v` (i ≠ j, v a vertex of B_W) has gauge at most 1
/// in `K̃_j = G̃|_{F_j}(B_W)`. The gauge is found by linear programming in the
/// coordinates of `Ẽ_j`.
pub fn exact_isometry_check(body: &QuotientBody, j: usize) -> Result<bool> {
    let span = block_span(body, j)?;
    exact_check_with_span(body, j, &span)
}

fn exact_check_with_span(body: &QuotientBody, j: usize, span: &Subspace) -> Result<bool> {
    if body.p_exponent() != 1.0 {
        return Err(Error::precondition("the exact check needs p_exponent = 1"));
    }
    let w = body.w();
    let vertices = w.polytopal_vertices().filter(|_| w.is_polytopal()).ok_or(Error::NotPolytopal)?;
    let k = body.k();
    let coords: DMatrix<f64> = span.basis().as_dmatrix().transpose() * body.effective().as_dmatrix();
    let own = coords.columns(j * k, k).into_owned();
    for i in (0..body.blocks()).filter(|&i| i != j) {
        let block = coords.columns(i * k, k);
        for v in &vertices {
            let c = block * nalgebra::DVector::from_column_slice(v);
            match polytope_gauge(&own, 1, w, c.as_slice())? {
                Gauge::Finite(g) if g <= 1.0 + MEMBERSHIP_TOLERANCE => {}
                _ => return Ok(false),
            }
        }
    }
    Ok(true)
}

/// `max_j s₁(G|_{F_j})`, before any quotient.
pub fn global_diameter(body: &QuotientBody) -> Result<f64> {
    let map = body.map();
    let mut worst = 0.0f64;
    for j in 0..map.blocks() {
        worst = worst.max(map.block(j)?.operator_norm()?);
    }
    Ok(worst)
}

/// True iff every block of G has operator norm at most 2, i.e. the
/// Euclidean hull D lies in `2B₂ⁿ`.
pub fn check_global_diameter(body: &QuotientBody) -> Result<bool> {
    Ok(global_diameter(body)? <= 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    /// `1/(8√n)`
    pub delta: f64,
    /// `‖Q − Q′‖`
    pub proj_dist: f64,
    /// `4δ√(n/m)`
    pub delta1: f64,
    pub s_min_relaxed: f64,
    pub s_max_relaxed: f64,
    /// Frame bounds with factors 1/4 and 9/4 under Q′.
    pub relaxed_bounds_pass: bool,
    pub max_cross_relaxed: f64,
    /// Cross norms at most 2κ under Q′.
    pub relaxed_kappa_pass: bool,
    /// `‖P_{Ẽ_j} − P_{Ē_j}‖` in ℝⁿ.
    pub proj_diff: f64,
    pub proj_diff_pass: bool,
    /// Frame and cross conditions held at Q and the global diameter event
    /// holds, so `proj_diff ≤ δ₁` is guaranteed.
    pub qualifying: bool,
}

fn quotient_range(body: &QuotientBody) -> Subspace {
    body.quotient()
        .map(|q| q.range().clone())
        .unwrap_or_else(|| Subspace::full(body.n()))
}

/// Lift of `Ẽ_j` from quotient coordinates to ℝⁿ.
fn ambient_block_span(body: &QuotientBody, j: usize) -> Result<Subspace> {
    let local = block_span(body, j)?;
    let u = quotient_range(body);
    Subspace::from_orthonormal(u.basis().mul(local.basis())?)
}

/// Re-runs the checks for block j after replacing Q by a nearby Q′ with
/// `‖Q − Q′‖ ≤ δ = 1/(8√n)`.
pub fn perturbation_check(
    body: &QuotientBody,
    q_prime: &QuotientMap,
    j: usize,
    kappa: f64,
) -> Result<PerturbationReport> {
    if !(kappa > 0.0) {
        return Err(Error::invalid(format!("kappa must be positive, got {kappa}")));
    }
    let n = body.n();
    let q_range = quotient_range(body);
    if q_prime.ambient_dim() != n || q_prime.rank() != body.m() {
        return Err(Error::DimensionMismatch(format!(
            "Q′ has rank {} in ℝ^{}, expected rank {} in ℝ^{n}",
            q_prime.rank(),
            q_prime.ambient_dim(),
            body.m()
        )));
    }
    let delta = 1.0 / (8.0 * (n as f64).sqrt());
    let proj_dist = linalg::projection_distance(&q_range, q_prime.range())?;
    if proj_dist > delta * (1.0 + 1e-12) {
        return Err(Error::precondition(format!(
            "‖Q − Q′‖ = {proj_dist} exceeds δ = {delta}"
        )));
    }
    let m = body.m();
    let delta1 = 4.0 * delta * (n as f64 / m as f64).sqrt();

    let perturbed = body.with_quotient(Some(q_prime.clone()))?;
    let relaxed = frame_window(&perturbed, j, 0.25, 2.25)?;
    let cross_relaxed = check_cross_inclusion(&perturbed, j, 2.0 * kappa)?;

    let strict_frame = check_block_frame(body, j)?;
    let strict_cross = check_cross_inclusion(body, j, kappa)?;
    let qualifying = strict_frame.pass && strict_cross.pass && check_global_diameter(body)?;

    let proj_diff = linalg::projection_distance(
        &ambient_block_span(body, j)?,
        &ambient_block_span(&perturbed, j)?,
    )?;
    Ok(PerturbationReport {
        delta,
        proj_dist,
        delta1,
        s_min_relaxed: relaxed.s_min,
        s_max_relaxed: relaxed.s_max,
        relaxed_bounds_pass: relaxed.pass,
        max_cross_relaxed: cross_relaxed.max_cross_norm,
        relaxed_kappa_pass: cross_relaxed.pass,
        proj_diff,
        proj_diff_pass: proj_diff <= delta1,
        qualifying,
    })
}

/// `G̃|_{F_j}`-images of the vertices of B_W, for callers that need the
/// generators of `K̃_j`.
pub fn block_vertex_images(body: &QuotientBody, j: usize) -> Result<Vec<Vec<f64>>> {
    let vertices = body.w().polytopal_vertices().ok_or(Error::NotPolytopal)?;
    let block: DenseMatrix = body.block_restriction(j)?;
    vertices.iter().map(|v| block.mul_vec(v)).collect()
}
