//! Dense real linear-algebra kernels: Cholesky factorization, cyclic-Jacobi
//! symmetric eigendecomposition, the symmetric-definite generalized
//! eigenproblem, the symmetric matrix exponential, primal/dual ridge
//! regression and PCA.
//!
//! Everything here is a pure function of its inputs and safe to call
//! concurrently. Matrices are small dense `f64`; symmetric matrices store
//! the lower triangle only, so symmetry holds exactly by construction.

use crate::{Error, Result};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds a matrix from column vectors. All columns must share one length.
    pub fn from_cols(cols: &[Vec<f64>]) -> Self {
        let nc = cols.len();
        let nr = cols.first().map_or(0, Vec::len);
        debug_assert!(cols.iter().all(|c| c.len() == nr));
        Mat::from_fn(nr, nc, |i, j| cols[j][i])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[f64]) {
        debug_assert_eq!(v.len(), self.rows);
        for (i, x) in v.iter().enumerate() {
            self.set(i, j, *x);
        }
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.get(k, j);
                }
            }
        }
        out
    }

    pub fn mat_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "mat_vec dimension mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// `self^T * v` without forming the transpose.
    pub fn transpose_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.rows, v.len(), "transpose_vec dimension mismatch");
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j) * v[i]).sum())
            .collect()
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn scale(&self, s: f64) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }
}

/// Symmetric matrix with packed lower-triangular storage, so
/// `a[i][j] == a[j][i]` holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    order: usize,
    // row-packed lower triangle: (i, j) with i >= j lives at i*(i+1)/2 + j
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(order: usize) -> Self {
        SymMatrix {
            order,
            data: vec![0.0; order * (order + 1) / 2],
        }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = SymMatrix::zeros(order);
        for i in 0..order {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = SymMatrix::zeros(order);
        for i in 0..order {
            for j in 0..=i {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn diag(entries: &[f64]) -> Self {
        let mut m = SymMatrix::zeros(entries.len());
        for (i, v) in entries.iter().enumerate() {
            m.set(i, i, *v);
        }
        m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    fn idx(i: usize, j: usize) -> usize {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        hi * (hi + 1) / 2 + lo
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[Self::idx(i, j)]
    }

    /// Sets both `(i, j)` and `(j, i)` (single storage slot).
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[Self::idx(i, j)] = v;
    }

    /// Accumulates the outer product `w * v v^T`.
    pub fn add_outer(&mut self, v: &[f64], w: f64) {
        debug_assert_eq!(v.len(), self.order);
        for i in 0..self.order {
            for j in 0..=i {
                self.data[Self::idx(i, j)] += w * v[i] * v[j];
            }
        }
    }

    /// `self + shift * I`.
    pub fn add_scaled_identity(&self, shift: f64) -> SymMatrix {
        let mut out = self.clone();
        for i in 0..self.order {
            out.set(i, i, out.get(i, i) + shift);
        }
        out
    }

    pub fn scale(&self, s: f64) -> SymMatrix {
        SymMatrix {
            order: self.order,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn to_full(&self) -> Mat {
        Mat::from_fn(self.order, self.order, |i, j| self.get(i, j))
    }

    pub fn frob_norm(&self) -> f64 {
        self.to_full().frob_norm()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn quad_form(&self, v: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.order {
            for j in 0..self.order {
                acc += v[i] * self.get(i, j) * v[j];
            }
        }
        acc
    }
}

/// Eigendecomposition result: values sorted non-increasing, unit-norm
/// eigenvector columns with the largest-magnitude component non-negative.
#[derive(Debug, Clone)]
pub struct EigPair {
    pub values: Vec<f64>,
    pub vectors: Mat,
}

impl EigPair {
    /// Keeps the leading `t` eigenpairs.
    pub fn truncate(&self, t: usize) -> EigPair {
        EigPair {
            values: self.values[..t].to_vec(),
            vectors: Mat::from_fn(self.vectors.rows(), t, |i, j| self.vectors.get(i, j)),
        }
    }
}

/// Ridge regression instance: `argmin ||design w - rhs||^2 + rho ||w||^2`.
#[derive(Debug, Clone)]
pub struct RidgeProblem {
    pub design: Mat,
    pub rhs: Vec<f64>,
    pub rho: f64,
}

/// Cholesky factorization `A = L L^T` with `L` lower triangular.
///
/// Pivots at or below `order * eps * max_diag` reject the matrix as not
/// positive definite.
pub fn cholesky(a: &SymMatrix) -> Result<Mat> {
    let n = a.order();
    if !a.is_finite() {
        return Err(Error::NonFinite {
            context: "cholesky input",
        });
    }
    let max_diag = (0..n).map(|i| a.get(i, i)).fold(0.0_f64, f64::max);
    let tol = n as f64 * f64::EPSILON * max_diag.max(0.0);
    let mut l = Mat::zeros(n, n);
    for j in 0..n {
        let mut d = a.get(j, j);
        for k in 0..j {
            d -= l.get(j, k) * l.get(j, k);
        }
        if d <= tol {
            return Err(Error::NotPositiveDefinite { index: j, pivot: d });
        }
        let djj = d.sqrt();
        l.set(j, j, djj);
        for i in (j + 1)..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, s / djj);
        }
    }
    Ok(l)
}

/// Solves `L y = b` for lower-triangular `L`.
fn forward_sub(l: &Mat, b: &[f64]) -> Vec<f64> {
    let n = l.rows();
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for (k, yk) in y.iter().enumerate().take(i) {
            s -= l.get(i, k) * yk;
        }
        y[i] = s / l.get(i, i);
    }
    y
}

/// Solves `L^T x = y` for lower-triangular `L`.
fn back_sub_transposed(l: &Mat, y: &[f64]) -> Vec<f64> {
    let n = l.rows();
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for (k, xk) in x.iter().enumerate().skip(i + 1) {
            s -= l.get(k, i) * xk;
        }
        x[i] = s / l.get(i, i);
    }
    x
}

/// Solves the SPD system `A x = b` via Cholesky.
pub fn spd_solve(a: &SymMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let l = cholesky(a)?;
    Ok(back_sub_transposed(&l, &forward_sub(&l, b)))
}

const JACOBI_MAX_SWEEPS: usize = 64;

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
pub fn sym_eig(a: &SymMatrix) -> Result<EigPair> {
    if !a.is_finite() {
        return Err(Error::NonFinite {
            context: "sym_eig input",
        });
    }
    let n = a.order();
    let mut m = a.to_full();
    let mut v = Mat::identity(n);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| m.get(p, q).abs())
            .sum();
        if off <= 1e-14 * m.frob_norm().max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = 0.5 * (aqq - app) / apq;
                let t = if theta.abs() > 1e150 {
                    // rotation angle underflows; tan(phi) ~ 1/(2 theta)
                    0.5 / theta
                } else {
                    let sgn = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sgn / (theta.abs() + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }

    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n).map(|j| (m.get(j, j), v.col(j))).collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let values = pairs.iter().map(|p| p.0).collect();
    let mut vectors = Mat::zeros(n, n);
    for (j, (_, col)) in pairs.iter().enumerate() {
        vectors.set_col(j, &normalize_sign(col));
    }
    Ok(EigPair { values, vectors })
}

/// Unit-normalizes and flips so the largest-magnitude component is non-negative.
fn normalize_sign(v: &[f64]) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let scale = if norm > 0.0 { 1.0 / norm } else { 1.0 };
    let mut lead = 0.0_f64;
    for &x in v {
        if x.abs() > lead.abs() {
            lead = x;
        }
    }
    let sign = if lead < 0.0 { -1.0 } else { 1.0 };
    v.iter().map(|x| x * scale * sign).collect()
}

/// Generalized symmetric-definite eigenproblem `A p = lambda B p`.
///
/// Solved by Cholesky whitening of `B`: with `B = L L^T`, the standard
/// problem `L^-1 A L^-T w = lambda w` is symmetric; eigenvectors map back
/// as `p = L^-T w` and are rescaled to unit Euclidean norm.
pub fn sym_gevd(a: &SymMatrix, b: &SymMatrix) -> Result<EigPair> {
    let n = a.order();
    if b.order() != n {
        return Err(Error::DimensionMismatch {
            context: "sym_gevd operands",
            expected: n,
            got: b.order(),
        });
    }
    let l = cholesky(b)?;
    // C = L^-1 A L^-T, formed column by column
    let a_full = a.to_full();
    let mut x = Mat::zeros(n, n); // X = L^-1 A
    for j in 0..n {
        x.set_col(j, &forward_sub(&l, &a_full.col(j)));
    }
    let xt = x.transpose();
    let mut c = Mat::zeros(n, n); // C = L^-1 X^T = L^-1 A^T L^-T (A symmetric)
    for j in 0..n {
        c.set_col(j, &forward_sub(&l, &xt.col(j)));
    }
    let c_sym = SymMatrix::from_fn(n, |i, j| 0.5 * (c.get(i, j) + c.get(j, i)));
    let eig = sym_eig(&c_sym)?;
    let mut vectors = Mat::zeros(n, n);
    for j in 0..n {
        let p = back_sub_transposed(&l, &eig.vectors.col(j));
        vectors.set_col(j, &normalize_sign(&p));
    }
    Ok(EigPair {
        values: eig.values,
        vectors,
    })
}

/// Symmetric matrix exponential `V diag(e^lambda) V^T`. Always SPD.
pub fn sym_expm(a: &SymMatrix) -> Result<SymMatrix> {
    let eig = sym_eig(a)?;
    let n = a.order();
    let exps: Vec<f64> = eig.values.iter().map(|l| l.exp()).collect();
    if exps.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite {
            context: "sym_expm overflow",
        });
    }
    let out = SymMatrix::from_fn(n, |i, j| {
        (0..n)
            .map(|k| eig.vectors.get(i, k) * exps[k] * eig.vectors.get(j, k))
            .sum()
    });
    Ok(out)
}

/// Spectral norm (largest absolute eigenvalue) of a symmetric matrix.
pub fn spectral_norm(a: &SymMatrix) -> Result<f64> {
    let eig = sym_eig(a)?;
    Ok(eig.values.iter().fold(0.0_f64, |m, l| m.max(l.abs())))
}

/// Ridge regression `argmin ||D w - b||^2 + rho ||w||^2`.
///
/// Uses the primal normal equations `(D^T D + rho I) w = D^T b` when the
/// design is tall, and the dual form `w = D^T (D D^T + rho I)^-1 b` when it
/// is wide (the Woodbury route, so the solve stays at the smaller order).
pub fn ridge_solve(p: &RidgeProblem) -> Result<Vec<f64>> {
    let (rows, cols) = (p.design.rows(), p.design.cols());
    if p.rhs.len() != rows {
        return Err(Error::DimensionMismatch {
            context: "ridge rhs",
            expected: rows,
            got: p.rhs.len(),
        });
    }
    if p.rho <= 0.0 || !p.rho.is_finite() {
        return Err(Error::Config(format!("ridge rho must be positive, got {}", p.rho)));
    }
    if !p.design.is_finite() || p.rhs.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite {
            context: "ridge inputs",
        });
    }
    let d = &p.design;
    if cols <= rows {
        // (D^T D + rho I) w = D^T b
        let gram = SymMatrix::from_fn(cols, |i, j| {
            (0..rows).map(|k| d.get(k, i) * d.get(k, j)).sum()
        })
        .add_scaled_identity(p.rho);
        spd_solve(&gram, &d.transpose_vec(&p.rhs))
    } else {
        // w = D^T (D D^T + rho I)^-1 b
        let gram = SymMatrix::from_fn(rows, |i, j| {
            (0..cols).map(|k| d.get(i, k) * d.get(j, k)).sum()
        })
        .add_scaled_identity(p.rho);
        let alpha = spd_solve(&gram, &p.rhs)?;
        Ok(d.transpose_vec(&alpha))
    }
}

/// Fitted PCA map. `degenerate` flags all-identical input samples, where the
/// returned basis is an arbitrary orthonormal set.
#[derive(Debug, Clone)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    pub basis: Mat,
    pub eigvals: Vec<f64>,
    pub degenerate: bool,
}

impl PcaModel {
    /// Projects a single vector into the PCA subspace.
    pub fn project_vec(&self, x: &[f64]) -> Vec<f64> {
        let centered: Vec<f64> = x.iter().zip(&self.mean).map(|(a, m)| a - m).collect();
        self.basis.transpose_vec(&centered)
    }

    /// Projects every column of a `d x N` matrix.
    pub fn project_mat(&self, x: &Mat) -> Mat {
        let cols: Vec<Vec<f64>> = (0..x.cols()).map(|j| self.project_vec(&x.col(j))).collect();
        Mat::from_cols(&cols)
    }
}

/// Fits PCA on the columns of a `d x N` sample matrix, keeping the top `q`
/// eigenvectors of the centered sample covariance.
pub fn pca_fit(x: &Mat, q: usize) -> Result<PcaModel> {
    let (d, n) = (x.rows(), x.cols());
    if n < 2 {
        return Err(Error::NotEnoughSamples {
            context: "pca_fit",
            needed: 2,
            available: n,
        });
    }
    if q == 0 || q > d.min(n) {
        return Err(Error::BadDimension(format!(
            "pca target dimension {q} outside 1..=min(d={d}, N={n})"
        )));
    }
    let mean: Vec<f64> = (0..d)
        .map(|i| (0..n).map(|j| x.get(i, j)).sum::<f64>() / n as f64)
        .collect();
    let cov = SymMatrix::from_fn(d, |i, j| {
        (0..n)
            .map(|k| (x.get(i, k) - mean[i]) * (x.get(j, k) - mean[j]))
            .sum::<f64>()
            / (n - 1) as f64
    });
    let eig = sym_eig(&cov)?;
    let top = eig.truncate(q);
    let degenerate = eig.values.iter().all(|l| l.abs() <= 1e-14 * d as f64);
    Ok(PcaModel {
        mean,
        basis: top.vectors,
        eigvals: top.values,
        degenerate,
    })
}
