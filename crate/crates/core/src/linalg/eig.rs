use crate::linalg::{LinalgError, Matrix};
use crate::scalar::Scalar;
use num_complex::Complex;

/// Eigendecomposition of a Hermitian matrix: `h = V · diag(eigenvalues) · V†`.
#[derive(Clone)]
pub struct HermitianEigen<T> {
    /// Real eigenvalues in ascending order.
    pub eigenvalues: Vec<T>,
    /// Unitary matrix whose columns are the corresponding eigenvectors.
    pub eigenvectors: Matrix<T>,
}

/// Eigendecomposition of a Hermitian matrix by Householder tridiagonalization
/// followed by the implicit-shift QL iteration. Designed for the dense sizes
/// used here (up to a few hundred); everything is O(d³).
///
/// The input must satisfy `‖h − h†‖_F ≤ hermiticity_tol · max(‖h‖_F, 1)`;
/// the decomposition then reconstructs `h` to the same order of accuracy.
pub fn hermitian_eig<T: Scalar>(h: &Matrix<T>) -> Result<HermitianEigen<T>, LinalgError> {
    if !h.is_square() {
        return Err(LinalgError::DimensionMismatch {
            expected: "square matrix".into(),
            found: format!("{}x{}", h.rows(), h.cols()),
        });
    }
    let residual = h.hermiticity_residual();
    if residual > T::hermiticity_tol() {
        return Err(LinalgError::NotHermitian {
            residual: residual.to_f64(),
        });
    }
    let n = h.dim();
    if n == 0 {
        return Ok(HermitianEigen {
            eigenvalues: vec![],
            eigenvectors: Matrix::zeros(0, 0),
        });
    }

    // Work on the exactly Hermitian average so tiny input asymmetry cannot
    // leak into the reduction.
    let half = Complex::new(T::from_f64(0.5), T::zero());
    let mut a = (&(h + &h.dagger())).scale(half);
    let mut q = Matrix::<T>::identity(n);

    // --- Householder reduction to tridiagonal form ---------------------
    // After step k the k-th column holds its final tridiagonal entries; the
    // trailing block stays Hermitian via the rank-2 update
    // B ← B − u w† − w u† with p = βBu, w = p − (β/2)(u†p)u.
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let mut norm_sq = T::zero();
        for i in 0..m {
            norm_sq = norm_sq + a[(k + 1 + i, k)].norm_sqr();
        }
        let norm_x = norm_sq.sqrt();
        if norm_x == T::zero() {
            continue;
        }

        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == T::zero() {
            Complex::new(T::one(), T::zero())
        } else {
            x0 / Complex::new(x0.norm(), T::zero())
        };

        let mut u: Vec<Complex<T>> = (0..m).map(|i| a[(k + 1 + i, k)]).collect();
        u[0] += phase * norm_x;
        let unorm_sq = u.iter().map(|z| z.norm_sqr()).fold(T::zero(), |s, v| s + v);
        if unorm_sq == T::zero() {
            continue;
        }
        let beta = T::from_f64(2.0) / unorm_sq;

        // p = β B u over the trailing block B = a[k+1.., k+1..].
        let mut p = vec![Complex::new(T::zero(), T::zero()); m];
        for i in 0..m {
            let mut s = Complex::new(T::zero(), T::zero());
            for j in 0..m {
                s += a[(k + 1 + i, k + 1 + j)] * u[j];
            }
            p[i] = s * beta;
        }
        let udag_p: Complex<T> = u
            .iter()
            .zip(p.iter())
            .map(|(ui, pi)| ui.conj() * *pi)
            .fold(Complex::new(T::zero(), T::zero()), |s, v| s + v);
        let kappa = Complex::new(udag_p.re * T::from_f64(0.5) * beta, T::zero());
        let w: Vec<Complex<T>> = p.iter().zip(u.iter()).map(|(&pi, &ui)| pi - ui * kappa).collect();

        for i in 0..m {
            for j in 0..m {
                let upd = u[i] * w[j].conj() + w[i] * u[j].conj();
                let entry = &mut a[(k + 1 + i, k + 1 + j)];
                *entry -= upd;
            }
        }

        // The reflected column: T[k+1, k] = −phase·‖x‖, zeros below.
        a[(k + 1, k)] = -phase * norm_x;
        for i in 1..m {
            a[(k + 1 + i, k)] = Complex::new(T::zero(), T::zero());
        }

        // Accumulate Q ← Q·H on the trailing columns.
        for r in 0..n {
            let mut t = Complex::new(T::zero(), T::zero());
            for j in 0..m {
                t += q[(r, k + 1 + j)] * u[j];
            }
            let tb = t * beta;
            for j in 0..m {
                let entry = &mut q[(r, k + 1 + j)];
                *entry -= tb * u[j].conj();
            }
        }
    }

    // --- Chase subdiagonal phases into the columns of Q -----------------
    // A unitary diagonal D with conj(s_{k+1})·sub_k·s_k = |sub_k| turns the
    // complex tridiagonal into a real one with nonnegative subdiagonal.
    let mut d = vec![T::zero(); n];
    for i in 0..n {
        d[i] = a[(i, i)].re;
    }
    let mut e = vec![T::zero(); n];
    let mut s = Complex::new(T::one(), T::zero());
    let mut v = q;
    for k in 0..n.saturating_sub(1) {
        let sub = a[(k + 1, k)];
        let mag = sub.norm();
        e[k] = mag;
        if mag > T::zero() {
            s = s * (sub / Complex::new(mag, T::zero()));
        }
        for r in 0..n {
            let entry = &mut v[(r, k + 1)];
            *entry = *entry * s;
        }
    }

    tql2(&mut d, &mut e, &mut v)?;

    // Ascending selection sort with matching column swaps.
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        for j in (i + 1)..n {
            if d[j] < d[k] {
                k = j;
            }
        }
        if k != i {
            d.swap(i, k);
            for r in 0..n {
                let tmp = v[(r, i)];
                v[(r, i)] = v[(r, k)];
                v[(r, k)] = tmp;
            }
        }
    }

    Ok(HermitianEigen {
        eigenvalues: d,
        eigenvectors: v,
    })
}

const QL_MAX_ITER: usize = 30;

/// Implicit-shift QL iteration on a real symmetric tridiagonal matrix
/// (diagonal `d`, subdiagonal `e[k] = T[k+1,k]`, `e[n-1]` ignored), applying
/// the accumulated real rotations to the complex columns of `v`.
fn tql2<T: Scalar>(d: &mut [T], e: &mut [T], v: &mut Matrix<T>) -> Result<(), LinalgError> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = T::zero();

    let eps = T::epsilon();
    let mut f = T::zero();
    let mut tst1 = T::zero();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > QL_MAX_ITER {
                    return Err(LinalgError::NoConvergence {
                        index: l,
                        iterations: QL_MAX_ITER,
                    });
                }

                // Implicit shift from the leading 2x2.
                let g = d[l];
                let two = T::from_f64(2.0);
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for i in (l + 2)..n {
                    d[i] = d[i] - h;
                }
                f = f + h;

                // One QL sweep from m down to l.
                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let gg = c * e[i];
                    let hh = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * gg;
                    d[i + 1] = hh + s * (c * gg + s * d[i]);

                    for k in 0..v.rows() {
                        let tmp = v[(k, i + 1)];
                        v[(k, i + 1)] = v[(k, i)] * s + tmp * c;
                        v[(k, i)] = v[(k, i)] * c - tmp * s;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] = d[l] + f;
        e[l] = T::zero();
    }
    Ok(())
}

/// Unitary propagator `e^{−i t h}` of a Hermitian generator, computed through
/// the eigendecomposition as `V · e^{−i t Λ} · V†`.
pub fn expm_i<T: Scalar>(h: &Matrix<T>, t: T) -> Result<Matrix<T>, LinalgError> {
    let eig = hermitian_eig(h)?;
    Ok(propagator_from_eigen(&eig, t))
}

/// Same as [`expm_i`] but reusing an existing decomposition; handy when many
/// durations share one generator.
pub fn propagator_from_eigen<T: Scalar>(eig: &HermitianEigen<T>, t: T) -> Matrix<T> {
    let v = &eig.eigenvectors;
    let n = v.rows();
    let mut scaled = v.clone();
    for (j, &lam) in eig.eigenvalues.iter().enumerate() {
        let ph = Complex::from_polar(T::one(), -(t * lam));
        for i in 0..n {
            let entry = &mut scaled[(i, j)];
            *entry = *entry * ph;
        }
    }
    &scaled * &v.dagger()
}

/// Exponential of a general (not necessarily Hermitian) square matrix by
/// scaling and squaring with a fixed-order Taylor evaluation. The argument is
/// halved until its max-magnitude entry times the dimension is below 1/4, the
/// series is summed to order 16, and the result is squared back up.
pub fn expm<T: Scalar>(a: &Matrix<T>) -> Matrix<T> {
    assert!(a.is_square(), "matrix exponential needs a square matrix");
    let n = a.dim();
    let norm_bound = a.max_abs() * T::from_f64(n as f64);
    let mut squarings = 0u32;
    let mut scale = T::one();
    while norm_bound * scale > T::from_f64(0.25) && squarings < 64 {
        scale = scale * T::from_f64(0.5);
        squarings += 1;
    }
    let scaled = a.scale_re(scale);

    let mut result = Matrix::identity(n);
    let mut term = Matrix::identity(n);
    for k in 1..=16 {
        term = (&term * &scaled).scale_re(T::one() / T::from_f64(k as f64));
        result = &result + &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Operator 2-norm (largest singular value), computed as the square root of
/// the top eigenvalue of `M†M`.
pub fn spectral_norm<T: Scalar>(m: &Matrix<T>) -> Result<T, LinalgError> {
    let gram = &m.dagger() * m;
    let eig = hermitian_eig(&gram)?;
    let top = eig.eigenvalues.last().copied().unwrap_or_else(T::zero);
    Ok(top.max(T::zero()).sqrt())
}
