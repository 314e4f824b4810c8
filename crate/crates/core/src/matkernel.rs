//! Dense complex linear algebra for the small matrices that appear in
//! two- and three-party states (dimension ≤ 16).
//!
//! Everything here is a pure function of its inputs. The kernels are chosen
//! for accuracy at tiny sizes rather than speed:
//!
//! * [`determinant`]: LU with partial pivoting.
//! * [`eig_hermitian`]: cyclic complex Jacobi rotations.
//! * [`eig_general`]: Householder reduction to Hessenberg form followed by
//!   single-shift complex QR with Wilkinson shifts.
//! * [`singular_values`]: one-sided (Hestenes) Jacobi, which keeps tiny
//!   singular values accurate to working precision in absolute terms.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest supported matrix dimension.
pub const MAX_DIM: usize = 16;

/// Allowed ‖m − m†‖_max for input to [`eig_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-10;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C1;
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Contract("matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::from_vec(r, c, rows.concat())
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    /// Outer product |a⟩⟨b|.
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Self {
        let mut m = Self::zeros(a.len(), b.len());
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                m[(i, j)] = x * y.conj();
            }
        }
        m
    }

    /// Projector |v⟩⟨v|.
    pub fn projector(v: &[Complex64]) -> Self {
        Self::outer(v, v)
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

    /// Row-major entries.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].conj();
            }
        }
        t
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Frobenius norm.
    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn norm_max(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// ‖m − m†‖_max.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Matrix product, failing on incompatible shapes.
    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if self.cols != v.len() {
            return Err(Error::Dimension(format!(
                "cannot apply {}x{} matrix to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Hermitian part (m + m†)/2.
    pub fn hermitian_part(&self) -> Self {
        let adj = self.adjoint();
        let mut out = self.clone();
        for (o, a) in out.data.iter_mut().zip(&adj.data) {
            *o = (*o + a) * 0.5;
        }
        out
    }

    fn check_square(&self, what: &str) -> Result<usize> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "{what} needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        if self.rows > MAX_DIM {
            return Err(Error::Dimension(format!(
                "{what}: dimension {} exceeds {MAX_DIM}",
                self.rows
            )));
        }
        Ok(self.rows)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Panics on shape mismatch; use [`ComplexMatrix::matmul`] for a fallible product.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("shape mismatch in mul")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Tensor (Kronecker) product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let x = a[(i, j)];
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = x * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Tensor product of two vectors.
pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// Result of an LU factorisation with partial pivoting, `P·m = L·U`.
#[derive(Debug, Clone)]
pub struct Lu {
    /// Packed factors: strictly lower part holds L (unit diagonal), upper part U.
    packed: ComplexMatrix,
    /// Parity of the row permutation.
    odd_permutation: bool,
}

impl Lu {
    pub fn new(m: &ComplexMatrix) -> Result<Self> {
        let n = m.check_square("LU")?;
        let mut a = m.clone();
        let mut odd = false;
        for k in 0..n {
            let (pivot_row, pivot_abs) =
                (k..n)
                    .map(|i| (i, a[(i, k)].norm()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_row != k {
                for j in 0..n {
                    a.data.swap(k * n + j, pivot_row * n + j);
                }
                odd = !odd;
            }
            if pivot_abs == 0.0 {
                continue;
            }
            let pivot = a[(k, k)];
            for i in k + 1..n {
                let factor = a[(i, k)] / pivot;
                a[(i, k)] = factor;
                if factor == C0 {
                    continue;
                }
                for j in k + 1..n {
                    let u = a[(k, j)];
                    a[(i, j)] -= factor * u;
                }
            }
        }
        Ok(Self {
            packed: a,
            odd_permutation: odd,
        })
    }

    /// Diagonal of U.
    pub fn pivots(&self) -> Vec<Complex64> {
        (0..self.packed.rows).map(|i| self.packed[(i, i)]).collect()
    }

    pub fn determinant(&self) -> Complex64 {
        let det: Complex64 = self.pivots().into_iter().product();
        if self.odd_permutation {
            -det
        } else {
            det
        }
    }
}

/// Determinant by LU with partial pivoting.
pub fn determinant(m: &ComplexMatrix) -> Result<Complex64> {
    Ok(Lu::new(m)?.determinant())
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// Returns eigenvector `k` as a vector.
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }

    /// V·diag(f(λ))·V†.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vi * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Full eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.
pub fn eigh(m: &ComplexMatrix) -> Result<HermitianEigen> {
    let n = m.check_square("eig_hermitian")?;
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::Contract(format!(
            "matrix is not Hermitian: max |m - m^dagger| = {defect:e}"
        )));
    }
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.norm_fro();

    for _sweep in 0..64 {
        let off: f64 = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-17 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g == 0.0 {
                    continue;
                }
                let (c, s, e) = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, apq);
                rotate_columns(&mut a, p, q, c, s, e);
                rotate_rows_adjoint(&mut a, p, q, c, s, e);
                rotate_columns(&mut v, p, q, c, s, e);
                a[(p, q)] = C0;
                a[(q, p)] = C0;
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (k, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, k)] = v[(i, src)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// Ascending real spectrum of a Hermitian matrix.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(eigh(m)?.values)
}

/// Rotation (c, s, phase) that annihilates the (p, q) entry of the 2×2
/// Hermitian block [[app, apq], [apq*, aqq]] under G† A G with
/// G = [[c, s·e], [−s·e*, c]].
fn jacobi_rotation(app: f64, aqq: f64, apq: Complex64) -> (f64, f64, Complex64) {
    let g = apq.norm();
    let e = apq / g;
    let tau = (aqq - app) / (2.0 * g);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c, e)
}

/// m ← m·G on columns p, q.
fn rotate_columns(m: &mut ComplexMatrix, p: usize, q: usize, c: f64, s: f64, e: Complex64) {
    for k in 0..m.rows {
        let mp = m[(k, p)];
        let mq = m[(k, q)];
        m[(k, p)] = mp * c - mq * (e.conj() * s);
        m[(k, q)] = mp * (e * s) + mq * c;
    }
}

/// m ← G†·m on rows p, q.
fn rotate_rows_adjoint(m: &mut ComplexMatrix, p: usize, q: usize, c: f64, s: f64, e: Complex64) {
    for k in 0..m.cols {
        let mp = m[(p, k)];
        let mq = m[(q, k)];
        m[(p, k)] = mp * c - mq * (e * s);
        m[(q, k)] = mp * (e.conj() * s) + mq * c;
    }
}

/// Eigenvalues of a general square matrix (unordered multiset).
pub fn eig_general(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = m.check_square("eig_general")?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = hessenberg(m);
    let mut eigenvalues = vec![C0; n];
    let mut hi = n - 1;
    let mut iterations = 0usize;
    let eps = f64::EPSILON;

    while hi > 0 {
        // Find the start of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if sub <= eps * diag || sub < f64::MIN_POSITIVE {
                h[(lo, lo - 1)] = C0;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eigenvalues[hi] = h[(hi, hi)];
            hi -= 1;
            iterations = 0;
            continue;
        }
        iterations += 1;
        if iterations > 300 {
            return Err(Error::Contract("QR iteration failed to converge".into()));
        }

        let shift = if iterations % 11 == 10 {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + Complex64::new(h[(hi, hi - 1)].norm(), 0.0) * 0.75
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        for k in lo..=hi {
            h[(k, k)] -= shift;
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let g = Givens::zeroing(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi {
                let (x, y) = g.apply(h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = x;
                h[(k + 1, j)] = y;
            }
            rotations.push(g);
        }
        for (offset, g) in rotations.iter().enumerate() {
            let k = lo + offset;
            for i in lo..=(k + 1).min(hi) {
                let (x, y) = g.apply_adjoint_right(h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = x;
                h[(i, k + 1)] = y;
            }
        }
        for k in lo..=hi {
            h[(k, k)] += shift;
        }
    }
    eigenvalues[0] = h[(0, 0)];
    Ok(eigenvalues)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let r1 = mean + disc;
    let r2 = mean - disc;
    if (r1 - d).norm() <= (r2 - d).norm() {
        r1
    } else {
        r2
    }
}

/// Unitary 2×2 rotation G with G·(x, y)ᵀ = (r, 0)ᵀ.
#[derive(Debug, Clone, Copy)]
struct Givens {
    g11: Complex64,
    g12: Complex64,
    g21: Complex64,
    g22: Complex64,
}

impl Givens {
    fn zeroing(x: Complex64, y: Complex64) -> Self {
        let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
        if r == 0.0 {
            return Self {
                g11: C1,
                g12: C0,
                g21: C0,
                g22: C1,
            };
        }
        Self {
            g11: x.conj() / r,
            g12: y.conj() / r,
            g21: -y / r,
            g22: x / r,
        }
    }

    fn apply(&self, x: Complex64, y: Complex64) -> (Complex64, Complex64) {
        (self.g11 * x + self.g12 * y, self.g21 * x + self.g22 * y)
    }

    /// Row vector (x, y) times G†.
    fn apply_adjoint_right(&self, x: Complex64, y: Complex64) -> (Complex64, Complex64) {
        (
            x * self.g11.conj() + y * self.g12.conj(),
            x * self.g21.conj() + y * self.g22.conj(),
        )
    }
}

/// Unitary similarity to upper Hessenberg form by Householder reflections.
fn hessenberg(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.rows;
    let mut h = m.clone();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let alpha = x.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 { C1 } else { x[0] / x[0].norm() };
        let mut v = x;
        v[0] += phase * alpha;
        let vnorm = v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in &mut v {
            *z /= vnorm;
        }
        // h ← (I − 2vv†) h on rows k+1..n
        for j in 0..n {
            let dot: Complex64 = (k + 1..n).map(|i| v[i - k - 1].conj() * h[(i, j)]).sum();
            for i in k + 1..n {
                h[(i, j)] -= v[i - k - 1] * dot * 2.0;
            }
        }
        // h ← h (I − 2vv†) on columns k+1..n
        for i in 0..n {
            let dot: Complex64 = (k + 1..n).map(|j| h[(i, j)] * v[j - k - 1]).sum();
            for j in k + 1..n {
                h[(i, j)] -= dot * v[j - k - 1].conj() * 2.0;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = C0;
        }
    }
    h
}

/// Singular values in descending order (one-sided Jacobi).
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if m.rows > MAX_DIM || m.cols > MAX_DIM {
        return Err(Error::Dimension(format!(
            "singular_values: {}x{} exceeds {MAX_DIM}",
            m.rows, m.cols
        )));
    }
    // Work on the orientation with no more columns than rows.
    let mut a = if m.cols > m.rows { m.adjoint() } else { m.clone() };
    let n = a.cols;
    for _sweep in 0..64 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = C0;
                for i in 0..a.rows {
                    let ap = a[(i, p)];
                    let aq = a[(i, q)];
                    alpha += ap.norm_sqr();
                    beta += aq.norm_sqr();
                    gamma += ap.conj() * aq;
                }
                let g = gamma.norm();
                if g == 0.0 || g <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let (c, s, e) = jacobi_rotation(alpha, beta, gamma);
                rotate_columns(&mut a, p, q, c, s, e);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut values: Vec<f64> = (0..n)
        .map(|j| (0..a.rows).map(|i| a[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    values.sort_by(|x, y| y.total_cmp(x));
    Ok(values)
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(m)?.iter().sum())
}
