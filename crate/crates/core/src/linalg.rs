//! Seedable dense linear algebra: Gaussian sampling, singular values,
//! orthonormal frames, orthogonal projectors and Haar-random subspaces.
//!
//! Matrices are backed by `nalgebra::DMatrix<f64>`; the wrappers here add
//! the finiteness and orthonormality invariants the geometric code relies on.

use nalgebra::{DMatrix, SVD};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative threshold (against the largest singular value) below which a
/// column set is treated as rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Tolerance for `basisᵀ·basis = I` on subspace construction.
pub const ORTHONORMAL_TOLERANCE: f64 = 1e-10;

const SVD_MAX_ITER: usize = 10_000;

/// A replayable random stream: the pair (seed, stream id) fully determines
/// every draw. Distinct stream ids select disjoint ChaCha streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn generator(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Derives an independent stream for sub-task `index`. Children of
    /// distinct parents or distinct indices never share (seed, stream).
    pub fn child(&self, index: u64) -> RngStream {
        let seed = splitmix64(splitmix64(self.seed) ^ self.stream_id.rotate_left(32) ^ 0x5bd1_e995);
        RngStream {
            seed,
            stream_id: index,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Dense real matrix with finite entries and at least one row and column.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix(DMatrix<f64>);

impl DenseMatrix {
    /// Builds a matrix from entries in row-major order.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Self::from_dmatrix(DMatrix::from_row_slice(rows, cols, entries))
    }

    pub fn from_dmatrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(Error::invalid("matrices need at least one row and one column"));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite matrix entry".into()));
        }
        Ok(Self(m))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[(row, col)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<f64> {
        self.0
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                out.push(self.0[(r, c)]);
            }
        }
        out
    }

    /// Columns `start .. start + count` as a new matrix.
    pub fn column_block(&self, start: usize, count: usize) -> Result<Self> {
        if count == 0 || start + count > self.cols() {
            return Err(Error::DimensionMismatch(format!(
                "column block {start}..{} of a matrix with {} columns",
                start + count,
                self.cols()
            )));
        }
        Ok(Self(self.0.columns(start, count).into_owned()))
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn mul(&self, other: &DenseMatrix) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(Self(&self.0 * &other.0))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for a matrix with {} columns",
                x.len(),
                self.cols()
            )));
        }
        let mut out = vec![0.0; self.rows()];
        for (c, xc) in x.iter().enumerate() {
            if *xc == 0.0 {
                continue;
            }
            for (r, o) in out.iter_mut().enumerate() {
                *o += self.0[(r, c)] * xc;
            }
        }
        Ok(out)
    }

    /// Scales every entry; the result must stay finite.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::from_dmatrix(&self.0 * factor)
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> Result<f64> {
        operator_norm(&self.0)
    }
}

/// Samples a `rows x cols` matrix of i.i.d. centered Gaussians with the given
/// variance. Entries are drawn in row-major order from the start of `rng`.
pub fn sample_gaussian_matrix(
    rows: usize,
    cols: usize,
    variance: f64,
    rng: &RngStream,
) -> Result<DenseMatrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::invalid("gaussian matrix needs rows, cols >= 1"));
    }
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(Error::invalid(format!("variance must be positive, got {variance}")));
    }
    let mut gen = rng.generator();
    DenseMatrix::from_dmatrix(gaussian_dmatrix(rows, cols, variance.sqrt(), &mut gen))
}

pub(crate) fn gaussian_dmatrix<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    std_dev: f64,
    rng: &mut R,
) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            let g: f64 = rng.sample(StandardNormal);
            m[(r, c)] = std_dev * g;
        }
    }
    m
}

pub(crate) fn gaussian_vec<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<f64> {
    (0..len).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Uniform point on the unit sphere of ℝ^dim (normalized Gaussian).
pub(crate) fn sphere_point<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let mut v = gaussian_vec(dim, rng);
        let norm = euclidean_norm(&v);
        if norm > 0.0 {
            v.iter_mut().for_each(|x| *x /= norm);
            return v;
        }
    }
}

pub fn euclidean_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Singular values in non-increasing order.
pub fn singular_values(a: &DenseMatrix) -> Result<Vec<f64>> {
    singular_values_of(a.as_dmatrix())
}

pub(crate) fn singular_values_of(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    let svd = SVD::try_new(a.clone(), false, false, f64::EPSILON, SVD_MAX_ITER)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}

/// Spectral norm with closed forms for one or two columns (or rows), which
/// dominate the block computations in witness searches.
pub(crate) fn operator_norm(a: &DMatrix<f64>) -> Result<f64> {
    let (r, c) = a.shape();
    if r.min(c) == 1 {
        return Ok(a.iter().map(|x| x * x).sum::<f64>().sqrt());
    }
    if r.min(c) == 2 {
        // largest eigenvalue of the 2x2 Gram matrix
        let (p, q, s) = if c == 2 {
            let (c0, c1) = (a.column(0), a.column(1));
            (c0.dot(&c0), c0.dot(&c1), c1.dot(&c1))
        } else {
            let (r0, r1) = (a.row(0), a.row(1));
            (r0.dot(&r0), r0.dot(&r1), r1.dot(&r1))
        };
        let half_tr = 0.5 * (p + s);
        let disc = (0.25 * (p - s) * (p - s) + q * q).sqrt();
        return Ok((half_tr + disc).max(0.0).sqrt());
    }
    Ok(singular_values_of(a)?[0])
}

/// A linear subspace stored through an orthonormal basis of its columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: DenseMatrix,
}

impl Subspace {
    /// Wraps a basis that is already orthonormal (checked to 1e-10).
    pub fn from_orthonormal(basis: DenseMatrix) -> Result<Self> {
        if basis.cols() > basis.rows() {
            return Err(Error::invalid(format!(
                "subspace of dimension {} in ambient dimension {}",
                basis.cols(),
                basis.rows()
            )));
        }
        let b = basis.as_dmatrix();
        let gram = b.transpose() * b;
        let dim = basis.cols();
        let residual = (gram - DMatrix::<f64>::identity(dim, dim)).amax();
        if residual > ORTHONORMAL_TOLERANCE {
            return Err(Error::invalid(format!(
                "basis is not orthonormal (residual {residual:e})"
            )));
        }
        Ok(Self { basis })
    }

    /// The whole ambient space with the standard basis.
    pub fn full(ambient: usize) -> Self {
        Self {
            basis: DenseMatrix::identity(ambient),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &DenseMatrix {
        &self.basis
    }

    /// Orthogonal projector `basis·basisᵀ` onto the subspace.
    pub fn projector(&self) -> DenseMatrix {
        let b = self.basis.as_dmatrix();
        DenseMatrix(b * b.transpose())
    }

    /// Image of the subspace under an orthogonal map of the ambient space.
    pub fn rotated(&self, orthogonal: &DenseMatrix) -> Result<Self> {
        Self::from_orthonormal(orthogonal.mul(&self.basis)?)
    }
}

/// Orthonormal basis of the column span of `a`, which must have full column
/// rank relative to [`RANK_TOLERANCE`].
pub fn span_of_columns(a: &DenseMatrix) -> Result<Subspace> {
    let m = a.as_dmatrix();
    if m.ncols() > m.nrows() {
        return Err(Error::RankDeficient {
            ratio: 0.0,
            tolerance: RANK_TOLERANCE,
        });
    }
    let svd = SVD::try_new(m.clone(), true, false, f64::EPSILON, SVD_MAX_ITER)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let s = &svd.singular_values;
    let smax = s.max();
    let smin = s.min();
    let ratio = if smax > 0.0 { smin / smax } else { 0.0 };
    if !(ratio > RANK_TOLERANCE) {
        return Err(Error::RankDeficient {
            ratio,
            tolerance: RANK_TOLERANCE,
        });
    }
    let u = svd.u.expect("U requested");
    Subspace::from_orthonormal(DenseMatrix(u.columns(0, m.ncols()).into_owned()))
}

/// Orthogonal projector onto `s`.
pub fn projector(s: &Subspace) -> DenseMatrix {
    s.projector()
}

/// Operator-norm distance `‖P₁ − P₂‖` between two equidimensional subspaces.
pub fn projection_distance(s1: &Subspace, s2: &Subspace) -> Result<f64> {
    if s1.ambient_dim() != s2.ambient_dim() || s1.dim() != s2.dim() {
        return Err(Error::DimensionMismatch(format!(
            "subspaces of dimension {} in ℝ^{} and {} in ℝ^{}",
            s1.dim(),
            s1.ambient_dim(),
            s2.dim(),
            s2.ambient_dim()
        )));
    }
    let diff = s1.projector().into_dmatrix() - s2.projector().into_dmatrix();
    Ok(singular_values_of(&diff)?[0])
}

/// Haar-random `dim`-dimensional subspace of ℝ^ambient: the span of a
/// Gaussian frame, orthonormalized by QR. The full space is returned with
/// its standard basis.
pub fn sample_grassmann(ambient: usize, dim: usize, rng: &RngStream) -> Result<Subspace> {
    if dim == 0 || dim > ambient {
        return Err(Error::invalid(format!(
            "Grassmannian needs 1 <= dim <= ambient, got dim={dim}, ambient={ambient}"
        )));
    }
    if dim == ambient {
        return Ok(Subspace::full(ambient));
    }
    let mut gen = rng.generator();
    let g = gaussian_dmatrix(ambient, dim, 1.0, &mut gen);
    orthonormal_frame(g)
}

fn orthonormal_frame(g: DMatrix<f64>) -> Result<Subspace> {
    let dim = g.ncols();
    let q = g.qr().q();
    Subspace::from_orthonormal(DenseMatrix::from_dmatrix(q.columns(0, dim).into_owned())?)
}

/// Haar-random orthogonal `n x n` matrix.
pub fn sample_orthogonal(n: usize, rng: &RngStream) -> Result<DenseMatrix> {
    if n == 0 {
        return Err(Error::invalid("orthogonal group of dimension 0"));
    }
    let mut gen = rng.generator();
    let g = gaussian_dmatrix(n, n, 1.0, &mut gen);
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    // sign fix so the distribution is exactly Haar
    let mut q = q;
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    DenseMatrix::from_dmatrix(q)
}

/// Rotates `s` by the given principal angles: a random orthonormal frame
/// `u_i` of `s` and random orthonormal directions `w_i` of its orthogonal
/// complement are chosen, and `u_i` is replaced by `cos θ_i u_i + sin θ_i w_i`.
/// The result satisfies `‖P_s − P_result‖ = max |sin θ_i|`.
pub fn tilt_subspace(s: &Subspace, angles: &[f64], rng: &RngStream) -> Result<Subspace> {
    let (n, d) = (s.ambient_dim(), s.dim());
    let r = angles.len();
    if r > d.min(n - d) {
        return Err(Error::invalid(format!(
            "{r} tilt angles for a {d}-dimensional subspace of ℝ^{n}"
        )));
    }
    if r == 0 {
        return Ok(s.clone());
    }
    let mut gen = rng.generator();
    let b = s.basis().as_dmatrix();
    let rot = gaussian_dmatrix(d, d, 1.0, &mut gen).qr().q();
    let frame = b * rot;
    let z = gaussian_dmatrix(n, r, 1.0, &mut gen);
    let z_perp = &z - b * (b.transpose() * &z);
    let w = z_perp.qr().q();
    let mut out = frame.clone();
    for (i, theta) in angles.iter().enumerate() {
        let col = frame.column(i) * theta.cos() + w.column(i) * theta.sin();
        out.set_column(i, &col);
    }
    Subspace::from_orthonormal(DenseMatrix::from_dmatrix(out)?)
}
