//! Small dense symmetric linear algebra.
//!
//! Everything here targets matrices of dimension up to a few dozen: a
//! plain row-major [`Matrix`], a symmetry-enforcing [`SymMatrix`], a
//! cyclic Jacobi eigensolver, spectral norms through the Gram matrix
//! `MᵀM`, Wishart-type PSD sampling, fractional powers and word
//! evaluation. The Jacobi solver is the single eigen-routine the rest of
//! the crate builds on.

use crate::error::{Error, Result};
use crate::rng::Rng64;
use crate::word::Word;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Off-diagonal Frobenius mass below `JACOBI_TOL * ||M||_F` counts as
/// converged.
const JACOBI_TOL: f64 = 1e-14;
/// Sweep limit; hitting it signals pathological input.
const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense row-major matrix, not necessarily symmetric or square.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Matrix> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    /// Product; panics on shape mismatch (callers validate at the API
    /// boundary).
    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let row = k * rhs.cols;
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[row + j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        let mut out = vec![0.0; self.rows];
        for i in 0..self.rows {
            let mut acc = 0.0;
            for j in 0..self.cols {
                acc += self.data[i * self.cols + j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a + b)
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a - b)
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, c: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    /// `M^k` by repeated squaring; `M^0 = Id`.
    pub fn pow(&self, k: u32) -> Matrix {
        assert!(self.is_square(), "power of a non-square matrix");
        let mut result = Matrix::identity(self.rows);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }
}

/// Determinant by LU with partial pivoting.
pub fn det(m: &Matrix) -> f64 {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let n = m.rows;
    let mut a = m.data.clone();
    let mut sign = 1.0;
    let mut result = 1.0;
    for k in 0..n {
        let mut piv = k;
        for i in k + 1..n {
            if a[i * n + k].abs() > a[piv * n + k].abs() {
                piv = i;
            }
        }
        if a[piv * n + k] == 0.0 {
            return 0.0;
        }
        if piv != k {
            for j in 0..n {
                a.swap(k * n + j, piv * n + j);
            }
            sign = -sign;
        }
        let d = a[k * n + k];
        result *= d;
        for i in k + 1..n {
            let f = a[i * n + k] / d;
            for j in k..n {
                a[i * n + j] -= f * a[k * n + j];
            }
        }
    }
    sign * result
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Dense real symmetric matrix. Symmetry is enforced on construction by
/// averaging with the transpose, so `entry(i, j) == entry(j, i)` holds
/// exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    mat: Matrix,
    psd_certified: bool,
}

impl SymMatrix {
    /// Builds from row-major entries, symmetrizing.
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<SymMatrix> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be >= 1".into()));
        }
        let mat = Matrix::from_row_major(dim, dim, entries)?;
        Ok(SymMatrix::from_matrix(&mat))
    }

    /// Symmetrizes an arbitrary square matrix.
    pub fn from_matrix(m: &Matrix) -> SymMatrix {
        assert!(m.is_square(), "SymMatrix requires a square matrix");
        let n = m.rows();
        let mut sym = Matrix::zeros(n, n);
        for i in 0..n {
            sym.set(i, i, m.get(i, i));
            for j in i + 1..n {
                let v = 0.5 * (m.get(i, j) + m.get(j, i));
                sym.set(i, j, v);
                sym.set(j, i, v);
            }
        }
        SymMatrix {
            mat: sym,
            psd_certified: false,
        }
    }

    pub fn identity(dim: usize) -> SymMatrix {
        SymMatrix {
            mat: Matrix::identity(dim),
            psd_certified: true,
        }
    }

    pub fn zeros(dim: usize) -> SymMatrix {
        SymMatrix {
            mat: Matrix::zeros(dim, dim),
            psd_certified: true,
        }
    }

    pub fn diag(values: &[f64]) -> SymMatrix {
        let n = values.len();
        let mut m = Matrix::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, v);
        }
        SymMatrix {
            psd_certified: values.iter().all(|&v| v >= 0.0),
            mat: m,
        }
    }

    /// Gram matrix `G Gᵀ`, PSD by construction.
    pub fn gram(factor: &Matrix) -> SymMatrix {
        let g = factor.mul(&factor.transpose());
        let mut sym = SymMatrix::from_matrix(&g);
        sym.psd_certified = true;
        sym
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.mat.get(i, j)
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.mat
    }

    pub fn psd_certified(&self) -> bool {
        self.psd_certified
    }

    /// Checks all eigenvalues are at least `-1e-10 * ||M||` and records
    /// the outcome in the `psd_certified` flag.
    pub fn certify_psd(&mut self) -> Result<bool> {
        let eig = eigen_sym(self)?;
        let scale = eig.eigenvalues.first().map_or(0.0, |l| l.abs());
        let min = *eig.eigenvalues.last().expect("dim >= 1");
        self.psd_certified = min >= -1e-10 * scale.max(1e-300);
        Ok(self.psd_certified)
    }

    /// Spectral norm of a symmetric matrix: the largest absolute
    /// eigenvalue, straight from the Jacobi solver.
    pub fn spectral_norm(&self) -> Result<f64> {
        let eig = eigen_sym(self)?;
        Ok(eig
            .eigenvalues
            .iter()
            .fold(0.0f64, |acc, &l| acc.max(l.abs())))
    }

    /// `a * X + b * Y` (symmetric linear combination).
    pub fn linear_comb(a: f64, x: &SymMatrix, b: f64, y: &SymMatrix) -> Result<SymMatrix> {
        if x.dim() != y.dim() {
            return Err(Error::DimensionMismatch(format!(
                "linear_comb of dims {} and {}",
                x.dim(),
                y.dim()
            )));
        }
        let m = x.mat.scale(a).add(&y.mat.scale(b));
        Ok(SymMatrix {
            mat: m,
            psd_certified: false,
        })
    }

    pub fn scale(&self, c: f64) -> SymMatrix {
        SymMatrix {
            mat: self.mat.scale(c),
            psd_certified: self.psd_certified && c >= 0.0,
        }
    }

    /// `M + delta * Id`; keeps the PSD flag for nonnegative `delta`.
    pub fn add_scaled_identity(&self, delta: f64) -> SymMatrix {
        let mut m = self.mat.clone();
        for i in 0..self.dim() {
            let v = m.get(i, i) + delta;
            m.set(i, i, v);
        }
        SymMatrix {
            mat: m,
            psd_certified: self.psd_certified && delta >= 0.0,
        }
    }

    /// Maximum absolute asymmetry `|a_ij - a_ji|` of raw entries, for
    /// loaders that want to warn before symmetrization.
    pub fn asymmetry(dim: usize, entries: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in i + 1..dim {
                worst = worst.max((entries[i * dim + j] - entries[j * dim + i]).abs());
            }
        }
        worst
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    dim: usize,
    entries: Vec<f64>,
}

impl Serialize for SymMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            dim: self.dim(),
            entries: self.mat.data().to_vec(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<SymMatrix, D::Error> {
        let raw = MatrixJson::deserialize(d)?;
        SymMatrix::new(raw.dim, raw.entries).map_err(serde::de::Error::custom)
    }
}

/// Parses the `{"dim": N, "entries": [...]}` matrix format, returning the
/// symmetrized matrix together with the maximum asymmetry of the raw
/// entries (callers warn when it exceeds 1e-9).
pub fn sym_from_json(text: &str) -> Result<(SymMatrix, f64)> {
    let raw: MatrixJson = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("matrix json: {e}")))?;
    if raw.entries.len() != raw.dim * raw.dim {
        return Err(Error::DimensionMismatch(format!(
            "matrix json: dim {} needs {} entries, got {}",
            raw.dim,
            raw.dim * raw.dim,
            raw.entries.len()
        )));
    }
    let asym = SymMatrix::asymmetry(raw.dim, &raw.entries);
    Ok((SymMatrix::new(raw.dim, raw.entries)?, asym))
}

/// Eigendecomposition of a symmetric matrix, eigenvalues sorted
/// descending, eigenvectors as orthonormal columns.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
}

impl EigenDecomposition {
    /// Columns of `eigenvectors` whose eigenvalue is within
    /// `rel_tol * lambda_1` of the top eigenvalue.
    pub fn top_eigenspace(&self, rel_tol: f64) -> Vec<Vec<f64>> {
        let lam1 = self.eigenvalues[0];
        let cut = lam1 - rel_tol * lam1.abs().max(1e-300);
        self.eigenvalues
            .iter()
            .enumerate()
            .take_while(|&(_, &l)| l >= cut)
            .map(|(j, _)| self.eigenvectors.column(j))
            .collect()
    }
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Sweeps rotate away each off-diagonal entry in turn until the
/// off-diagonal Frobenius mass falls below `1e-14 * ||M||_F`; at most
/// 100 sweeps. Accuracy at the dimensions used here (N <= ~50) is close
/// to componentwise machine precision.
pub fn eigen_sym(m: &SymMatrix) -> Result<EigenDecomposition> {
    let n = m.dim();
    let mut a = m.as_matrix().data().to_vec();
    let mut q = Matrix::identity(n);
    let norm_f = m.as_matrix().frobenius_norm();

    if n > 1 && norm_f > 0.0 {
        let tol = JACOBI_TOL * norm_f;
        let mut converged = false;
        for _ in 0..JACOBI_MAX_SWEEPS {
            let mut off = 0.0;
            for p in 0..n {
                for r in p + 1..n {
                    off += 2.0 * a[p * n + r] * a[p * n + r];
                }
            }
            if off.sqrt() <= tol {
                converged = true;
                break;
            }
            for p in 0..n - 1 {
                for r in p + 1..n {
                    let apr = a[p * n + r];
                    if apr.abs() < 1e-300 {
                        a[p * n + r] = 0.0;
                        a[r * n + p] = 0.0;
                        continue;
                    }
                    let theta = (a[r * n + r] - a[p * n + p]) / (2.0 * apr);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    let app = a[p * n + p];
                    let arr = a[r * n + r];
                    a[p * n + p] = app - t * apr;
                    a[r * n + r] = arr + t * apr;
                    a[p * n + r] = 0.0;
                    a[r * n + p] = 0.0;
                    for i in 0..n {
                        if i == p || i == r {
                            continue;
                        }
                        let aip = a[i * n + p];
                        let air = a[i * n + r];
                        let new_p = c * aip - s * air;
                        let new_r = s * aip + c * air;
                        a[i * n + p] = new_p;
                        a[p * n + i] = new_p;
                        a[i * n + r] = new_r;
                        a[r * n + i] = new_r;
                    }
                    for i in 0..n {
                        let qip = q.get(i, p);
                        let qir = q.get(i, r);
                        q.set(i, p, c * qip - s * qir);
                        q.set(i, r, s * qip + c * qir);
                    }
                }
            }
        }
        if !converged {
            return Err(Error::NonConvergence(JACOBI_MAX_SWEEPS));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].partial_cmp(&a[i * n + i]).expect("no NaN"));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors.set(i, col, q.get(i, src));
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors: vectors,
    })
}

/// Spectral norm of an arbitrary real square matrix together with a
/// maximizing unit vector (top eigenvector of `MᵀM`).
#[derive(Clone, Debug)]
pub struct SpectralNorm {
    pub value: f64,
    pub maximizer: Vec<f64>,
}

/// `||M|| = sqrt(lambda_max(MᵀM))`, via the Jacobi solver.
pub fn spectral_norm(m: &Matrix) -> Result<SpectralNorm> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(
            "spectral_norm expects a square matrix".into(),
        ));
    }
    let gram = SymMatrix::from_matrix(&m.transpose().mul(m));
    let eig = eigen_sym(&gram)?;
    let lam = eig.eigenvalues[0].max(0.0);
    Ok(SpectralNorm {
        value: lam.sqrt(),
        maximizer: eig.eigenvectors.column(0),
    })
}

/// Evaluates a word at a pair of symmetric matrices:
/// `A^{m1} B^{n1} ... A^{ms} B^{ns}`. Powers use repeated squaring.
pub fn eval_word(word: &Word, a: &SymMatrix, b: &SymMatrix) -> Result<Matrix> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "eval_word: A is {}x{0}, B is {}x{1}",
            a.dim(),
            b.dim()
        )));
    }
    let mut result = Matrix::identity(a.dim());
    for &(m, n) in word.blocks() {
        if m > 0 {
            result = result.mul(&a.as_matrix().pow(m));
        }
        if n > 0 {
            result = result.mul(&b.as_matrix().pow(n));
        }
    }
    Ok(result)
}

/// Wishart-type PSD sample: `G Gᵀ` for `G` a `dim x rank` matrix of
/// independent standard normals drawn row-major from `rng`. With
/// `normalize`, the result is rescaled to unit spectral norm (the
/// rearrangement inequalities are scale invariant, so this loses no
/// generality). `rank < dim` produces rank-deficient samples.
pub fn sample_psd(dim: usize, rank: usize, normalize: bool, rng: &mut Rng64) -> SymMatrix {
    assert!(dim >= 1 && rank >= 1 && rank <= dim, "1 <= rank <= dim");
    let mut g = Matrix::zeros(dim, rank);
    for i in 0..dim {
        for j in 0..rank {
            g.set(i, j, StandardNormal.sample(rng));
        }
    }
    let sym = SymMatrix::gram(&g);
    if !normalize {
        return sym;
    }
    let norm = sym
        .spectral_norm()
        .expect("jacobi on a sampled gram matrix converges");
    if norm > 0.0 {
        let mut scaled = sym.scale(1.0 / norm);
        scaled.psd_certified = true;
        scaled
    } else {
        sym
    }
}

/// Full-rank normalized sample from a bare seed.
pub fn sample_psd_seeded(dim: usize, seed: u64, normalize: bool) -> SymMatrix {
    let mut rng = crate::rng::master(seed);
    sample_psd(dim, dim, normalize, &mut rng)
}

/// Fractional power `M^p` of a PSD matrix via `Q diag(lambda^p) Qᵀ`,
/// with eigenvalues clamped at zero first. Rejects `p < 0` and
/// non-PSD input.
pub fn frac_power(m: &SymMatrix, p: f64) -> Result<SymMatrix> {
    if p < 0.0 || !p.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "frac_power requires p >= 0, got {p}"
        )));
    }
    let eig = eigen_sym(m)?;
    let scale = eig.eigenvalues.first().map_or(0.0, |l| l.abs());
    let min = *eig.eigenvalues.last().expect("dim >= 1");
    if min < -1e-10 * scale.max(1e-300) {
        return Err(Error::InvalidArgument(format!(
            "frac_power requires a PSD matrix; found eigenvalue {min}"
        )));
    }
    let n = m.dim();
    let mut out = Matrix::zeros(n, n);
    for k in 0..n {
        let lam = eig.eigenvalues[k].max(0.0);
        let f = lam.powf(p);
        if f == 0.0 {
            continue;
        }
        for i in 0..n {
            let qi = eig.eigenvectors.get(i, k);
            if qi == 0.0 {
                continue;
            }
            for j in 0..n {
                let v = out.get(i, j) + f * qi * eig.eigenvectors.get(j, k);
                out.set(i, j, v);
            }
        }
    }
    let mut sym = SymMatrix::from_matrix(&out);
    sym.psd_certified = true;
    Ok(sym)
}

/// Smallest singular value of the commutator `AB - BA`.
///
/// For symmetric `A, B` the commutator is skew-symmetric, hence always
/// singular in odd dimension; a strictly positive value is only possible
/// when the dimension is even.
pub fn commutator_min_sv(a: &SymMatrix, b: &SymMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(
            "commutator of different dimensions".into(),
        ));
    }
    let ab = a.as_matrix().mul(b.as_matrix());
    let ba = b.as_matrix().mul(a.as_matrix());
    let k = ab.sub(&ba);
    let gram = SymMatrix::from_matrix(&k.transpose().mul(&k));
    let eig = eigen_sym(&gram)?;
    let min = eig.eigenvalues.last().expect("dim >= 1").max(0.0);
    Ok(min.sqrt())
}
