//! Spin-model construction: ring and long-range-chain Hamiltonians, the
//! system–ancilla coupling, the pair of non-Hermitian symmetry operators for
//! the four-site ring, and the measured observables.
//!
//! Conventions fixed here and relied on everywhere else:
//!
//! * Tensor factors: within the system, site 1 is the **leftmost** Kronecker
//!   factor; joint operators order **system ⊗ ancilla**.
//! * On-site basis: index 0 is the state written `|0⟩`, and `σz|0⟩ = −|0⟩`.
//!   The sign is not arbitrary: with the opposite choice the symmetry
//!   eigenfrequency checks in [`crate::symmetry`] fail, so the commutator
//!   tests pin it empirically. Consequently "all spins up" (σz = +1
//!   everywhere) is the **last** basis index `2^M − 1`, and the ancilla
//!   ground state `|0⟩⟨0|` has σz expectation −1.

use crate::linalg::{kron, Matrix};
use crate::scalar::Scalar;
use num_complex::Complex;

/// Errors from model construction.
#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("site index {site} outside 1..={sites}")]
    IndexOutOfRange { site: usize, sites: usize },

    #[error("central coupled site undefined for even site count {sites}")]
    EvenSiteCount { sites: usize },

    #[error("symmetry operators are only defined for the 4-site ring, not M={sites}")]
    UnsupportedSize { sites: usize },
}

/// Parameters of the anisotropic Heisenberg ring.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XxzParams<T> {
    /// Number of sites (≥ 3 so the periodic ring has no double-counted bond).
    pub m: usize,
    /// On-site field ω₀.
    pub omega0: T,
    /// Anisotropy Δ of the zz coupling.
    pub delta: T,
}

impl<T: Scalar> XxzParams<T> {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.m < 3 {
            return Err(ModelError::InvalidParams(format!(
                "ring needs at least 3 sites, got {}",
                self.m
            )));
        }
        Ok(())
    }
}

/// Parameters of the long-range transverse-field chain with algebraically
/// decaying xx couplings `J/|i−j|^α`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IsingParams<T> {
    pub m: usize,
    /// Transverse field B.
    pub b: T,
    /// Overall coupling J.
    pub j: T,
    /// Decay exponent α.
    pub alpha: T,
}

impl<T: Scalar> IsingParams<T> {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.m < 2 {
            return Err(ModelError::InvalidParams(format!(
                "chain needs at least 2 sites, got {}",
                self.m
            )));
        }
        if self.alpha <= T::zero() {
            return Err(ModelError::InvalidParams("decay exponent must be positive".into()));
        }
        Ok(())
    }

    /// The ancilla couples to the central site `ceil(M/2)`.
    pub fn coupled_site(&self) -> usize {
        self.m.div_ceil(2)
    }
}

/// System–ancilla coupling strength: collisions of duration τ at dissipation
/// rate Γ require `g = √(Γ/4τ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CouplingParams<T> {
    pub gamma: T,
    pub tau: T,
}

impl<T: Scalar> CouplingParams<T> {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.gamma > T::zero()) || !(self.tau > T::zero()) {
            return Err(ModelError::InvalidParams(
                "dissipation strength and collision duration must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Derived coupling `g = √(Γ/(4τ))`.
    pub fn g(&self) -> T {
        (self.gamma / (T::from_f64(4.0) * self.tau)).sqrt()
    }
}

/// A (generally non-Hermitian) operator Ξ together with the eigenfrequency λ
/// it is expected to carry under the system Hamiltonian: `[H, Ξ] = λ Ξ`.
#[derive(Clone)]
pub struct SymmetryOperator<T> {
    pub xi: Matrix<T>,
    pub lambda_expected: T,
}

/// Pauli axis selector for [`pauli_site`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

fn single_pauli<T: Scalar>(axis: PauliAxis) -> Matrix<T> {
    let one = Complex::new(T::one(), T::zero());
    let i = Complex::new(T::zero(), T::one());
    let mut m = Matrix::zeros(2, 2);
    match axis {
        PauliAxis::X => {
            m[(0, 1)] = one;
            m[(1, 0)] = one;
        }
        PauliAxis::Y => {
            m[(0, 1)] = i;
            m[(1, 0)] = -i;
        }
        PauliAxis::Z => {
            m[(0, 0)] = -one;
            m[(1, 1)] = one;
        }
    }
    m
}

/// Pauli operator on site `k` of an `m`-site register (1-based, site 1
/// leftmost): `1^{⊗(k−1)} ⊗ σ_axis ⊗ 1^{⊗(m−k)}`, dimension `2^m`.
pub fn pauli_site<T: Scalar>(axis: PauliAxis, k: usize, m: usize) -> Result<Matrix<T>, ModelError> {
    if k == 0 || k > m {
        return Err(ModelError::IndexOutOfRange { site: k, sites: m });
    }
    let sigma = single_pauli::<T>(axis);
    let mut out = Matrix::identity(1);
    for site in 1..=m {
        let factor = if site == k { &sigma } else { &Matrix::identity(2) };
        out = kron(&out, factor);
    }
    Ok(out)
}

/// Anisotropic Heisenberg ring with periodic boundary conditions:
/// `Σ_j [σx⁽ʲ⁾σx⁽ʲ⁺¹⁾ + σy⁽ʲ⁾σy⁽ʲ⁺¹⁾ + Δ σz⁽ʲ⁾σz⁽ʲ⁺¹⁾ + (ω₀/2) σz⁽ʲ⁾]`
/// with site `M+1 ≡ 1`.
pub fn build_xxz<T: Scalar>(p: &XxzParams<T>) -> Result<Matrix<T>, ModelError> {
    p.validate()?;
    let m = p.m;
    let dim = 1usize << m;
    let mut h = Matrix::zeros(dim, dim);
    let delta = Complex::new(p.delta, T::zero());
    let half_omega = Complex::new(p.omega0 * T::from_f64(0.5), T::zero());
    for j in 1..=m {
        let next = if j == m { 1 } else { j + 1 };
        for (axis, weight) in [
            (PauliAxis::X, Complex::new(T::one(), T::zero())),
            (PauliAxis::Y, Complex::new(T::one(), T::zero())),
            (PauliAxis::Z, delta),
        ] {
            let bond = &pauli_site(axis, j, m)? * &pauli_site(axis, next, m)?;
            h = &h + &bond.scale(weight);
        }
        h = &h + &pauli_site(PauliAxis::Z, j, m)?.scale(half_omega);
    }
    Ok(h)
}

/// Transverse-field chain with long-range xx couplings:
/// `Σ_i B σz⁽ⁱ⁾ + Σ_{i<j} (J/|i−j|^α) σx⁽ⁱ⁾σx⁽ʲ⁾`.
pub fn build_ising<T: Scalar>(p: &IsingParams<T>) -> Result<Matrix<T>, ModelError> {
    p.validate()?;
    let m = p.m;
    let dim = 1usize << m;
    let mut h = Matrix::zeros(dim, dim);
    for i in 1..=m {
        h = &h + &pauli_site(PauliAxis::Z, i, m)?.scale(Complex::new(p.b, T::zero()));
        for j in (i + 1)..=m {
            let dist = T::from_f64((j - i) as f64);
            let coupling = p.j / dist.powf(p.alpha);
            let bond = &pauli_site(PauliAxis::X, i, m)? * &pauli_site(PauliAxis::X, j, m)?;
            h = &h + &bond.scale(Complex::new(coupling, T::zero()));
        }
    }
    Ok(h)
}

/// Exchange coupling between site 1 of an `m`-site system and a single
/// ancilla qubit, in system ⊗ ancilla ordering:
/// `g (σx⁽¹⁾⊗σx + σy⁽¹⁾⊗σy)` on dimension `2^m · 2`.
pub fn build_sa_xxz<T: Scalar>(c: &CouplingParams<T>, m: usize) -> Result<Matrix<T>, ModelError> {
    c.validate()?;
    if m == 0 {
        return Err(ModelError::InvalidParams("system needs at least one site".into()));
    }
    let g = Complex::new(c.g(), T::zero());
    let xx = kron(&pauli_site::<T>(PauliAxis::X, 1, m)?, &single_pauli(PauliAxis::X));
    let yy = kron(&pauli_site::<T>(PauliAxis::Y, 1, m)?, &single_pauli(PauliAxis::Y));
    Ok((&xx + &yy).scale(g))
}

/// Ancilla side of the long-range chain: the ancilla carries the same
/// transverse field and exchanges excitations with the central site
/// `c = ceil(M/2)` (M must be odd for the centre to exist):
/// `B (1_S ⊗ σz) + g (σx⁽ᶜ⁾⊗σx + σy⁽ᶜ⁾⊗σy)`.
pub fn build_sa_ising<T: Scalar>(
    p: &IsingParams<T>,
    c: &CouplingParams<T>,
) -> Result<Matrix<T>, ModelError> {
    p.validate()?;
    c.validate()?;
    if p.m % 2 == 0 {
        return Err(ModelError::EvenSiteCount { sites: p.m });
    }
    let site = p.coupled_site();
    let m = p.m;
    let dim = 1usize << m;
    let g = Complex::new(c.g(), T::zero());
    let field = kron(&Matrix::identity(dim), &single_pauli::<T>(PauliAxis::Z))
        .scale(Complex::new(p.b, T::zero()));
    let xx = kron(&pauli_site::<T>(PauliAxis::X, site, m)?, &single_pauli(PauliAxis::X));
    let yy = kron(&pauli_site::<T>(PauliAxis::Y, site, m)?, &single_pauli(PauliAxis::Y));
    Ok(&field + &(&xx + &yy).scale(g))
}

/// Rank-one operator `(Σ wᵢ|i⟩)(Σ wⱼ⟨j|)` from sparse real amplitude lists.
pub fn basis_bra_ket<T: Scalar>(dim: usize, kets: &[(usize, T)], bras: &[(usize, T)]) -> Matrix<T> {
    let mut out = Matrix::zeros(dim, dim);
    for &(i, wi) in kets {
        for &(j, wj) in bras {
            out[(i, j)] = Complex::new(wi * wj, T::zero());
        }
    }
    out
}

/// The two dynamical symmetry operators of the 4-site ring, stored
/// unnormalized exactly as defined:
///
/// * `Ξ₁ = 1⁽¹⁾ ⊗ (|001⟩−|100⟩)(⟨011|−⟨110|)` on sites 2–4, with
///   eigenfrequency `λ₁ = −ω₀`;
/// * `Ξ₂ = ½(|0100⟩−|0001⟩)⟨0000|` with `λ₂ = ω₀ − 4Δ`.
///
/// Basis labels read site 1 → site 4 left to right, `|0⟩` being index 0.
pub fn xi_operators<T: Scalar>(p: &XxzParams<T>) -> Result<Vec<SymmetryOperator<T>>, ModelError> {
    p.validate()?;
    if p.m != 4 {
        return Err(ModelError::UnsupportedSize { sites: p.m });
    }
    let one = T::one();
    let half = T::from_f64(0.5);

    // Sites 2–4 subspace (8-dim): |001⟩ = 1, |100⟩ = 4, |011⟩ = 3, |110⟩ = 6.
    let inner = basis_bra_ket::<T>(8, &[(1, one), (4, -one)], &[(3, one), (6, -one)]);
    let xi1 = kron(&Matrix::identity(2), &inner);

    // Full register (16-dim): |0100⟩ = 4, |0001⟩ = 1, |0000⟩ = 0.
    let xi2 = basis_bra_ket::<T>(16, &[(4, half), (1, -half)], &[(0, one)]);

    let four = T::from_f64(4.0);
    Ok(vec![
        SymmetryOperator {
            xi: xi1,
            lambda_expected: -p.omega0,
        },
        SymmetryOperator {
            xi: xi2,
            lambda_expected: p.omega0 - four * p.delta,
        },
    ])
}

/// Odd/even population imbalance `Σ_{j odd} σz⁽ʲ⁾ − Σ_{j even} σz⁽ʲ⁾`.
pub fn imbalance_operator<T: Scalar>(m: usize) -> Result<Matrix<T>, ModelError> {
    if m == 0 {
        return Err(ModelError::InvalidParams("need at least one site".into()));
    }
    let dim = 1usize << m;
    let mut out = Matrix::zeros(dim, dim);
    for j in 1..=m {
        let sign = if j % 2 == 1 { T::one() } else { -T::one() };
        out = &out + &pauli_site(PauliAxis::Z, j, m)?.scale(Complex::new(sign, T::zero()));
    }
    Ok(out)
}

/// Fresh-ancilla state `|0⟩⟨0|`. Under this crate's basis convention the σz
/// expectation in this state is −1; it is the zero-excitation state that
/// lets the chain dump excitations into the ancilla stream.
pub fn ancilla_ground<T: Scalar>() -> Matrix<T> {
    let mut m = Matrix::zeros(2, 2);
    m[(0, 0)] = Complex::new(T::one(), T::zero());
    m
}

/// Total magnetization `Σ_j σz⁽ʲ⁾`, the generator of the U(1) symmetry the
/// ring Hamiltonian respects and the long-range chain breaks.
pub fn total_sz<T: Scalar>(m: usize) -> Result<Matrix<T>, ModelError> {
    let dim = 1usize << m;
    let mut out = Matrix::zeros(dim, dim);
    for j in 1..=m {
        out = &out + &pauli_site(PauliAxis::Z, j, m)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    

    type M = Matrix<f64>;

    fn commutator(a: &M, b: &M) -> M {
        &(a * b) - &(b * a)
    }

    #[test]
    fn single_site_paulis() {
        let sz = pauli_site::<f64>(PauliAxis::Z, 1, 1).unwrap();
        assert_eq!(sz[(0, 0)].re, -1.0);
        assert_eq!(sz[(1, 1)].re, 1.0);
        let sx2 = pauli_site::<f64>(PauliAxis::X, 2, 2).unwrap();
        let expected = kron(&M::identity(2), &single_pauli(PauliAxis::X));
        assert!((&sx2 - &expected).frob_norm() == 0.0);
    }

    #[test]
    fn pauli_site_is_traceless_and_involutive() {
        for axis in [PauliAxis::X, PauliAxis::Y, PauliAxis::Z] {
            for (k, m) in [(1usize, 3usize), (2, 3), (3, 4)] {
                let p = pauli_site::<f64>(axis, k, m).unwrap();
                assert_eq!(p.trace().norm(), 0.0);
                let sq = &p * &p;
                assert!((&sq - &M::identity(1 << m)).frob_norm() == 0.0);
            }
        }
    }

    #[test]
    fn pauli_site_rejects_bad_index() {
        assert!(matches!(
            pauli_site::<f64>(PauliAxis::X, 0, 3),
            Err(ModelError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            pauli_site::<f64>(PauliAxis::X, 4, 3),
            Err(ModelError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn pauli_algebra_holds() {
        // σx σy = i σz must hold in the flipped-z basis too.
        let sx = single_pauli::<f64>(PauliAxis::X);
        let sy = single_pauli::<f64>(PauliAxis::Y);
        let sz = single_pauli::<f64>(PauliAxis::Z);
        let lhs = &sx * &sy;
        let rhs = sz.scale(Complex::new(0.0, 1.0));
        assert!((&lhs - &rhs).frob_norm() == 0.0);
    }

    #[test]
    fn ring_diagonal_elements() {
        let h = build_xxz(&XxzParams { m: 4, omega0: 1.0f64, delta: 1.0 }).unwrap();
        // |0000⟩ (index 0) has σz = −1 on every site: 4Δ − 2ω₀.
        assert!((h[(0, 0)].re - 2.0).abs() < 1e-14);
        // The fully aligned σz = +1 state is the last index: 4Δ + 2ω₀.
        assert!((h[(15, 15)].re - 6.0).abs() < 1e-14);
    }

    #[test]
    fn ring_is_traceless_and_hermitian() {
        for omega0 in [0.0f64, 1.7] {
            let h = build_xxz(&XxzParams { m: 4, omega0, delta: 0.3 }).unwrap();
            assert!(h.trace().norm() < 1e-13);
            assert!((&h - &h.dagger()).frob_norm() == 0.0);
        }
    }

    #[test]
    fn ring_commutes_with_total_magnetization() {
        for (m, delta, omega0) in [(4usize, 1.0f64, 1.0f64), (4, -0.5, 0.3), (5, 0.7, 2.0)] {
            let h = build_xxz(&XxzParams { m, omega0, delta }).unwrap();
            let sz_tot = total_sz::<f64>(m).unwrap();
            assert!(
                commutator(&h, &sz_tot).frob_norm() < 1e-12,
                "U(1) violation at M={m}"
            );
        }
    }

    #[test]
    fn chain_small_case_and_diagonal() {
        let h2 = build_ising(&IsingParams { m: 2, b: 0.0f64, j: 1.0, alpha: 1.0 }).unwrap();
        let xx = &pauli_site::<f64>(PauliAxis::X, 1, 2).unwrap()
            * &pauli_site::<f64>(PauliAxis::X, 2, 2).unwrap();
        assert!((&h2 - &xx).frob_norm() == 0.0);

        let p = IsingParams { m: 7, b: 5.0f64, j: 1.0, alpha: 1.1 };
        let h7 = build_ising(&p).unwrap();
        // xx bonds have zero diagonal, so the all-aligned diagonal entry is
        // exactly 7B; all-up (σz=+1 everywhere) is the last index.
        let last = (1 << 7) - 1;
        assert!((h7[(last, last)].re - 35.0).abs() < 1e-12);
        assert!((&h7 - &h7.dagger()).frob_norm() == 0.0);
    }

    #[test]
    fn chain_breaks_magnetization_symmetry() {
        let h = build_ising(&IsingParams { m: 3, b: 1.0f64, j: 1.0, alpha: 1.1 }).unwrap();
        let sz_tot = total_sz::<f64>(3).unwrap();
        assert!(commutator(&h, &sz_tot).frob_norm() > 1.0);
    }

    #[test]
    fn exchange_coupling_entries_and_scaling() {
        // Single-site system: g (σx⊗σx + σy⊗σy) is 2g on the one-excitation
        // flip-flop entries and zero elsewhere.
        let c = CouplingParams { gamma: 1.0f64, tau: 1.0 };
        assert!((c.g() - 0.5).abs() < 1e-15);
        let h = build_sa_xxz(&c, 1).unwrap();
        assert_eq!(h.dim(), 4);
        assert!((h[(1, 2)].re - 1.0).abs() < 1e-14);
        assert!((h[(2, 1)].re - 1.0).abs() < 1e-14);
        assert!((h[(0, 3)].norm()) < 1e-15);
        assert!((&h - &h.dagger()).frob_norm() == 0.0);

        let weak = build_sa_xxz(&CouplingParams { gamma: 1e-30, tau: 1.0 }, 2).unwrap();
        assert!(weak.frob_norm() < 1e-14);
    }

    #[test]
    fn chain_ancilla_block_matches_direct_construction() {
        let p = IsingParams { m: 3, b: 2.0f64, j: 1.0, alpha: 1.5 };
        let c = CouplingParams { gamma: 4.0, tau: 0.5 };
        assert!((c.g() - 2f64.sqrt()).abs() < 1e-15);
        let h = build_sa_ising(&p, &c).unwrap();
        assert_eq!(p.coupled_site(), 2);
        let direct = &kron(&M::identity(8), &single_pauli(PauliAxis::Z)).scale(Complex::new(2.0, 0.0))
            + &(&kron(&pauli_site::<f64>(PauliAxis::X, 2, 3).unwrap(), &single_pauli(PauliAxis::X))
                + &kron(&pauli_site::<f64>(PauliAxis::Y, 2, 3).unwrap(), &single_pauli(PauliAxis::Y)))
                .scale(Complex::new(2f64.sqrt(), 0.0));
        assert!((&h - &direct).frob_norm() == 0.0);
    }

    #[test]
    fn chain_ancilla_rejects_even_sites() {
        let p = IsingParams { m: 4, b: 1.0f64, j: 1.0, alpha: 1.0 };
        let c = CouplingParams { gamma: 1.0f64, tau: 1.0 };
        assert!(matches!(
            build_sa_ising(&p, &c),
            Err(ModelError::EvenSiteCount { sites: 4 })
        ));
    }

    #[test]
    fn symmetry_operator_shapes_and_entries() {
        let p = XxzParams { m: 4, omega0: 1.0f64, delta: 0.5 };
        let ops = xi_operators(&p).unwrap();
        assert_eq!(ops.len(), 2);

        let xi1 = &ops[0].xi;
        let nonzero1: Vec<f64> = xi1
            .data()
            .iter()
            .map(|z| z.norm())
            .filter(|&n| n > 0.0)
            .collect();
        assert_eq!(nonzero1.len(), 8);
        assert!(nonzero1.iter().all(|&n| (n - 1.0).abs() < 1e-15));
        assert!((ops[0].lambda_expected + 1.0).abs() < 1e-15);

        let xi2 = &ops[1].xi;
        let nonzero2: Vec<f64> = xi2
            .data()
            .iter()
            .map(|z| z.norm())
            .filter(|&n| n > 0.0)
            .collect();
        assert_eq!(nonzero2.len(), 2);
        assert!(nonzero2.iter().all(|&n| (n - 0.5).abs() < 1e-15));
        assert!((ops[1].lambda_expected + 1.0).abs() < 1e-15);
    }

    #[test]
    fn symmetry_operators_need_four_sites() {
        let p = XxzParams { m: 3, omega0: 1.0f64, delta: 0.5 };
        assert!(matches!(
            xi_operators(&p),
            Err(ModelError::UnsupportedSize { sites: 3 })
        ));
    }

    #[test]
    fn symmetry_operators_satisfy_eigencommutator() {
        // [H, Ξ] = λ Ξ exactly, for several parameter pairs. This is the test
        // that pins the σz sign convention.
        for (omega0, delta) in [(1.0f64, 1.0f64), (1.0, 0.5), (0.3, -0.7), (2.0, 0.0)] {
            let p = XxzParams { m: 4, omega0, delta };
            let h = build_xxz(&p).unwrap();
            for op in xi_operators(&p).unwrap() {
                let res = &commutator(&h, &op.xi) - &op.xi.scale(Complex::new(op.lambda_expected, 0.0));
                assert!(
                    res.frob_norm() < 1e-13,
                    "residual {:e} at ω₀={omega0}, Δ={delta}",
                    res.frob_norm()
                );
            }
        }
    }

    #[test]
    fn imbalance_examples() {
        let i1 = imbalance_operator::<f64>(1).unwrap();
        assert!((&i1 - &single_pauli(PauliAxis::Z)).frob_norm() == 0.0);

        let i2 = imbalance_operator::<f64>(2).unwrap();
        let direct = &kron(&single_pauli::<f64>(PauliAxis::Z), &M::identity(2))
            - &kron(&M::identity(2), &single_pauli(PauliAxis::Z));
        assert!((&i2 - &direct).frob_norm() == 0.0);

        // All-up over 7 sites: 4 odd sites minus 3 even sites.
        let i7 = imbalance_operator::<f64>(7).unwrap();
        let last = (1 << 7) - 1;
        assert!((i7[(last, last)].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ancilla_ground_state() {
        let rho = ancilla_ground::<f64>();
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
        assert!(((&rho * &rho).trace().re - 1.0).abs() < 1e-15);
        // σz expectation is −1 in this basis ordering (zero excitations).
        let sz = single_pauli::<f64>(PauliAxis::Z);
        assert!(((&sz * &rho).trace().re + 1.0).abs() < 1e-15);
    }
}
