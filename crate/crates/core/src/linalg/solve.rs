use crate::linalg::{devectorize, LinalgError, Matrix};
use crate::scalar::Scalar;
use num_complex::Complex;

/// LU factorization with partial pivoting, for repeated linear solves against
/// one matrix (inverse iteration, small inverses).
pub struct LuDecomp<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> LuDecomp<T> {
    /// Factor `a = P·L·U`. Fails with `Singular` only when a pivot is exactly
    /// zero; near-singular systems factor fine (inverse iteration relies on
    /// amplifying exactly such systems).
    pub fn new(a: &Matrix<T>) -> Result<Self, LinalgError> {
        assert!(a.is_square(), "LU of a non-square matrix");
        let n = a.dim();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut pivot_row = k;
            let mut pivot_mag = lu[(k, k)].norm();
            for i in (k + 1)..n {
                let mag = lu[(i, k)].norm();
                if mag > pivot_mag {
                    pivot_mag = mag;
                    pivot_row = i;
                }
            }
            if pivot_mag == T::zero() {
                return Err(LinalgError::Singular);
            }
            if pivot_row != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(pivot_row, j)];
                    lu[(pivot_row, j)] = tmp;
                }
                perm.swap(k, pivot_row);
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                for j in (k + 1)..n {
                    let sub = factor * lu[(k, j)];
                    let entry = &mut lu[(i, j)];
                    *entry -= sub;
                }
            }
        }
        Ok(LuDecomp { lu, perm })
    }

    /// Solve `a·x = b` using the stored factors.
    pub fn solve(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.lu.dim();
        assert_eq!(b.len(), n, "right-hand side length mismatch");
        let mut x: Vec<Complex<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }

    /// Dense inverse, assembled column by column from unit right-hand sides.
    pub fn inverse(&self) -> Matrix<T> {
        let n = self.lu.dim();
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![Complex::new(T::zero(), T::zero()); n];
        for j in 0..n {
            e[j] = Complex::new(T::one(), T::zero());
            let col = self.solve(&e);
            e[j] = Complex::new(T::zero(), T::zero());
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }
}

/// Basis of the right null space of a (possibly rectangular) matrix, found by
/// Gauss–Jordan reduction with partial pivoting.
///
/// Pivot magnitudes are compared against `rank_tol × max|entry|`; a pivot in
/// the ambiguous decade just below that threshold aborts with
/// `NumericalRankAmbiguity` rather than silently guessing the rank.
pub fn null_space<T: Scalar>(a: &Matrix<T>) -> Result<Vec<Vec<Complex<T>>>, LinalgError> {
    let (m, n) = (a.rows(), a.cols());
    let mut w = a.clone();
    let threshold = T::rank_tol() * w.max_abs();
    let ten = T::from_f64(10.0);

    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut r = 0usize;
    for col in 0..n {
        let mut pivot_row = r;
        let mut pivot_mag = T::zero();
        for i in r..m {
            let mag = w[(i, col)].norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = i;
            }
        }
        if r >= m || pivot_mag <= threshold {
            if pivot_mag > threshold / ten {
                return Err(LinalgError::NumericalRankAmbiguity {
                    pivot: pivot_mag.to_f64(),
                    threshold: threshold.to_f64(),
                });
            }
            continue; // free column
        }
        if pivot_row != r {
            for j in 0..n {
                let tmp = w[(r, j)];
                w[(r, j)] = w[(pivot_row, j)];
                w[(pivot_row, j)] = tmp;
            }
        }
        let pivot = w[(r, col)];
        for j in col..n {
            let v = w[(r, j)] / pivot;
            w[(r, j)] = v;
        }
        for i in 0..m {
            if i == r {
                continue;
            }
            let factor = w[(i, col)];
            if factor.norm() > T::zero() {
                for j in col..n {
                    let sub = factor * w[(r, j)];
                    let entry = &mut w[(i, j)];
                    *entry -= sub;
                }
            }
        }
        pivots.push((r, col));
        r += 1;
    }

    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut basis = Vec::new();
    for free_col in 0..n {
        if pivot_cols.contains(&free_col) {
            continue;
        }
        let mut v = vec![Complex::new(T::zero(), T::zero()); n];
        v[free_col] = Complex::new(T::one(), T::zero());
        for &(pr, pc) in &pivots {
            v[pc] = -w[(pr, free_col)];
        }
        let norm = v.iter().map(|z| z.norm_sqr()).fold(T::zero(), |s, x| s + x).sqrt();
        if norm > T::zero() {
            let inv = Complex::new(T::one() / norm, T::zero());
            for z in v.iter_mut() {
                *z = *z * inv;
            }
        }
        basis.push(v);
    }
    Ok(basis)
}

/// Fixed points of a trace-preserving map from the superoperator matrix `s`:
/// the null space of `s − I`, each basis vector devectorized to a `d×d`
/// operator of unit Frobenius norm. A valid trace-preserving map always has
/// at least one fixed point; an empty result means `s` was not one.
pub fn fixed_point_null_space<T: Scalar>(s: &Matrix<T>) -> Result<Vec<Matrix<T>>, LinalgError> {
    assert!(s.is_square(), "superoperator matrix must be square");
    let d2 = s.dim();
    let d = (d2 as f64).sqrt().round() as usize;
    if d * d != d2 {
        return Err(LinalgError::DimensionMismatch {
            expected: "d² × d² superoperator".into(),
            found: format!("{d2} x {d2}"),
        });
    }
    let shifted = s - &Matrix::identity(d2);
    let basis = null_space(&shifted)?;
    if basis.is_empty() {
        return Err(LinalgError::NoFixedPoint);
    }
    Ok(basis.iter().map(|v| devectorize(v)).collect())
}
