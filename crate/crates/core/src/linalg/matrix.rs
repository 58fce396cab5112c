use crate::linalg::LinalgError;
use crate::scalar::Scalar;
use num_complex::Complex;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

/// Dense complex matrix stored row-major. The universal carrier for states,
/// Hamiltonians, unitaries, and superoperator matrices.
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Complex::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Build from nested row slices of real entries; convenient in tests.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = if r > 0 { rows[0].len() } else { 0 };
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| Complex::new(T::from_f64(rows[i][j]), T::zero()))
    }

    pub fn diag(entries: &[Complex<T>]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &x) in entries.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
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

    /// Side length of a square matrix; panics on rectangular input.
    pub fn dim(&self) -> usize {
        assert!(self.is_square(), "matrix is {}x{}, not square", self.rows, self.cols);
        self.rows
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.conj()).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex<T> {
        assert!(self.is_square(), "trace of a non-square matrix");
        let mut t = Complex::new(T::zero(), T::zero());
        for i in 0..self.rows {
            t += self[(i, i)];
        }
        t
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn scale_re(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    /// Frobenius norm, the 2-norm of the entry vector.
    pub fn frob_norm(&self) -> T {
        self.data
            .iter()
            .map(|x| x.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|x| x.norm()).fold(T::zero(), T::max)
    }

    /// Relative deviation from Hermiticity, `‖a − a†‖ / max(‖a‖, 1)`.
    pub fn hermiticity_residual(&self) -> T {
        let diff = self - &self.dagger();
        diff.frob_norm() / self.frob_norm().max(T::one())
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.is_square() && self.hermiticity_residual() <= tol
    }

    /// Matrix product using a cache-friendly i-k-j kernel.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "product shape mismatch: {}x{} times {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let (m, k, n) = (self.rows, self.cols, other.cols);
        let mut out = Self::zeros(m, n);
        for i in 0..m {
            let arow = &self.data[i * k..(i + 1) * k];
            let crow = &mut out.data[i * n..(i + 1) * n];
            for (kk, &aik) in arow.iter().enumerate() {
                let brow = &other.data[kk * n..(kk + 1) * n];
                for j in 0..n {
                    crow[j] += aik * brow[j];
                }
            }
        }
        out
    }

    /// Matrix–vector product.
    pub fn matvec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.rows];
        for i in 0..self.rows {
            let arow = &self.data[i * self.cols..(i + 1) * self.cols];
            let mut s = Complex::new(T::zero(), T::zero());
            for (a, b) in arow.iter().zip(v.iter()) {
                s += *a * *b;
            }
            out[i] = s;
        }
        out
    }
}

impl<T: Scalar> Index<(usize, usize)> for Matrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Scalar> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "sum shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T: Scalar> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "difference shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl<T: Scalar> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| -a).collect(),
        }
    }
}

impl<T: Scalar> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, other: &Matrix<T>) -> Matrix<T> {
        self.matmul(other)
    }
}

impl<T: Scalar> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        let shown = self.rows.min(8);
        for i in 0..shown {
            write!(f, "  ")?;
            for j in 0..self.cols.min(8) {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re.to_f64(), z.im.to_f64())?;
            }
            writeln!(f, "{}", if self.cols > 8 { "..." } else { "" })?;
        }
        if self.rows > 8 {
            writeln!(f, "  ...")?;
        }
        write!(f, "]")
    }
}

/// Kronecker product; the first factor varies slowest, so
/// `kron(a, b)[(i1*rb + i2, j1*cb + j2)] = a[(i1, j1)] * b[(i2, j2)]`.
pub fn kron<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let (ra, ca) = (a.rows(), a.cols());
    let (rb, cb) = (b.rows(), b.cols());
    let mut out = Matrix::zeros(ra * rb, ca * cb);
    for i1 in 0..ra {
        for j1 in 0..ca {
            let aij = a[(i1, j1)];
            for i2 in 0..rb {
                let out_row = (i1 * rb + i2) * out.cols;
                let b_row = i2 * cb;
                for j2 in 0..cb {
                    out.data[out_row + j1 * cb + j2] = aij * b.data[b_row + j2];
                }
            }
        }
    }
    out
}

/// Conjugate transpose as a free function; `dagger(dagger(a)) = a`.
pub fn dagger<T: Scalar>(a: &Matrix<T>) -> Matrix<T> {
    a.dagger()
}

/// Hilbert–Schmidt inner product `⟨a, b⟩ = Tr(a† b)`, conjugate-linear in the
/// first argument.
pub fn hs_inner<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Complex<T>, LinalgError> {
    if (a.rows(), a.cols()) != (b.rows(), b.cols()) {
        return Err(LinalgError::DimensionMismatch {
            expected: format!("{}x{}", a.rows(), a.cols()),
            found: format!("{}x{}", b.rows(), b.cols()),
        });
    }
    let mut s = Complex::new(T::zero(), T::zero());
    for (x, y) in a.data().iter().zip(b.data().iter()) {
        s += x.conj() * *y;
    }
    Ok(s)
}

/// Stack the columns of `a` into a single vector: entry `(i, j)` lands at
/// position `j * rows + i`.
pub fn vectorize<T: Scalar>(a: &Matrix<T>) -> Vec<Complex<T>> {
    let (r, c) = (a.rows(), a.cols());
    let mut v = Vec::with_capacity(r * c);
    for j in 0..c {
        for i in 0..r {
            v.push(a[(i, j)]);
        }
    }
    v
}

/// Inverse of [`vectorize`] for square matrices; the input length must be a
/// perfect square.
pub fn devectorize<T: Scalar>(v: &[Complex<T>]) -> Matrix<T> {
    let d = (v.len() as f64).sqrt().round() as usize;
    assert_eq!(d * d, v.len(), "devectorize input length {} is not a perfect square", v.len());
    Matrix::from_fn(d, d, |i, j| v[j * d + i])
}

/// Three-factor product `o1 · o2 · o3` computed through the vectorization
/// identity `vec(o1 o2 o3) = (o3ᵀ ⊗ o1) vec(o2)`. This is how superoperator
/// matrices act on vectorized states, so the op doubles as the convention
/// anchor for the whole crate.
pub fn apply_matrix_triple<T: Scalar>(o1: &Matrix<T>, o2: &Matrix<T>, o3: &Matrix<T>) -> Matrix<T> {
    let lhs = kron(&o3.transpose(), o1);
    devectorize(&lhs.matvec(&vectorize(o2)))
}
