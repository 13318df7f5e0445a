//! Single- and two-qubit state representations in the Pauli basis.
//!
//! A qubit is a [`BlochVector`] or its [`QubitDensity`] `(𝟙 + a·σ)/2`. A pair
//! of qubits is a [`CoefficientTensor`] `e_{μν}`, the real coefficients of
//! `E = ¼ Σ e_{μν} σ_μ ⊗ σ_ν` with `σ_0 = 𝟙` and `e_{00} = 1`. Row index μ
//! belongs to subsystem A, column index ν to subsystem B.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, kron, pauli, real3_apply, Matrix2, Matrix4, Real3};

/// Full two-qubit operator (density matrix or unitary).
pub type ComplexMatrix4 = Matrix4;

/// Tolerance on unit trace when converting matrices back to coefficients.
pub const TRACE_TOL: f64 = 1e-10;

/// Minimum-eigenvalue threshold for a state to count as physical.
pub const PHYSICAL_TOL: f64 = 1e-10;

/// Real 3-vector `a` parameterizing `ρ = (𝟙 + a·σ)/2`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BlochVector(pub [f64; 3]);

impl BlochVector {
    pub const ZERO: BlochVector = BlochVector([0.0; 3]);

    pub const fn new(a1: f64, a2: f64, a3: f64) -> Self {
        BlochVector([a1, a2, a3])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `|a|² ≤ 1 + 1e-12`.
    pub fn is_physical(&self) -> bool {
        self.norm_sqr() <= 1.0 + 1e-12
    }

    /// `Tr ρ² = (1 + |a|²)/2`.
    pub fn purity(&self) -> f64 {
        purity_qubit(self)
    }

    /// `R·a` for a 3×3 rotation `R`.
    pub fn rotated(&self, r: &Real3) -> Self {
        BlochVector(real3_apply(r, &self.0))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

impl From<[f64; 3]> for BlochVector {
    fn from(a: [f64; 3]) -> Self {
        BlochVector(a)
    }
}

/// 2×2 single-qubit density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitDensity(Matrix2);

impl QubitDensity {
    /// Wrap a matrix after checking Hermiticity and unit trace (both to 1e-10).
    pub fn new(m: Matrix2) -> Result<Self> {
        let dev = m.hermitian_deviation();
        if dev > TRACE_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = m.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::NonUnitTrace(tr.re));
        }
        Ok(QubitDensity(m))
    }

    /// Wrap without validation. Used for outputs of maps that may leave the
    /// physical region (non-CP maps applied off their domain).
    pub fn from_matrix_unchecked(m: Matrix2) -> Self {
        QubitDensity(m)
    }

    pub fn matrix(&self) -> &Matrix2 {
        &self.0
    }

    pub fn bloch(&self) -> BlochVector {
        bloch_components(&self.0)
    }

    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    /// Both eigenvalues ≥ −1e-12.
    pub fn is_positive(&self) -> bool {
        hermitian_eigenvalues(&self.0).map(|ev| ev[0] >= -1e-12).unwrap_or(false)
    }
}

/// `ρ = (𝟙 + Σ a_i σ_i)/2`. Unphysical `|a| > 1` yields a non-PSD matrix.
pub fn bloch_to_density(a: &BlochVector) -> QubitDensity {
    let mut m = pauli(0);
    for i in 0..3 {
        m = m + pauli(i + 1).scale(Complex64::new(a.0[i], 0.0));
    }
    QubitDensity(m.scale(Complex64::new(0.5, 0.0)))
}

/// `a_i = Tr[ρ σ_i]`.
pub fn density_to_bloch(rho: &Matrix2) -> Result<BlochVector> {
    QubitDensity::new(*rho).map(|q| q.bloch())
}

fn bloch_components(rho: &Matrix2) -> BlochVector {
    let a1 = 2.0 * rho.0[1][0].re;
    let a2 = 2.0 * rho.0[1][0].im;
    let a3 = (rho.0[0][0] - rho.0[1][1]).re;
    BlochVector([a1, a2, a3])
}

/// Real 4×4 Pauli-basis coefficients of a two-qubit state, `e[0][0] = 1`.
///
/// The tensor stores raw values and never renormalizes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoefficientTensor([[f64; 4]; 4]);

impl CoefficientTensor {
    /// Checks `e[0][0] == 1` exactly.
    pub fn new(e: [[f64; 4]; 4]) -> Result<Self> {
        if e[0][0] != 1.0 {
            return Err(Error::InvalidTensor(e[0][0]));
        }
        Ok(CoefficientTensor(e))
    }

    /// The maximally mixed pair, `E = 𝟙/4`.
    pub fn maximally_mixed() -> Self {
        let mut e = [[0.0; 4]; 4];
        e[0][0] = 1.0;
        CoefficientTensor(e)
    }

    /// Assemble from marginals and an arbitrary correlation block `e_{ij}`.
    pub fn from_parts(a: &BlochVector, b: &BlochVector, correlations: &Real3) -> Self {
        let mut e = [[0.0; 4]; 4];
        e[0][0] = 1.0;
        for i in 0..3 {
            e[i + 1][0] = a.0[i];
            e[0][i + 1] = b.0[i];
            for j in 0..3 {
                e[i + 1][j + 1] = correlations[i][j];
            }
        }
        CoefficientTensor(e)
    }

    pub fn as_array(&self) -> &[[f64; 4]; 4] {
        &self.0
    }

    pub fn get(&self, mu: usize, nu: usize) -> f64 {
        self.0[mu][nu]
    }

    /// The 3×3 block `e_{ij}`, `i, j ∈ {1,2,3}`.
    pub fn correlations(&self) -> Real3 {
        std::array::from_fn(|i| std::array::from_fn(|j| self.0[i + 1][j + 1]))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.iter().flatten().zip(other.0.iter().flatten()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub(crate) fn from_array_unchecked(e: [[f64; 4]; 4]) -> Self {
        debug_assert_eq!(e[0][0], 1.0);
        CoefficientTensor(e)
    }
}

/// Which half of the pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Simply-separable pair `ρ^A ⊗ ρ^B`: `e_{i0} = a_i`, `e_{0j} = b_j`, `e_{ij} = a_i b_j`.
pub fn product_tensor(a: &BlochVector, b: &BlochVector) -> CoefficientTensor {
    let corr = std::array::from_fn(|i| std::array::from_fn(|j| a.0[i] * b.0[j]));
    CoefficientTensor::from_parts(a, b, &corr)
}

fn pauli_products() -> &'static [[Matrix4; 4]; 4] {
    static PRODUCTS: OnceLock<[[Matrix4; 4]; 4]> = OnceLock::new();
    PRODUCTS.get_or_init(|| std::array::from_fn(|mu| std::array::from_fn(|nu| kron(&pauli(mu), &pauli(nu)))))
}

/// `E = ¼ Σ_{μν} e_{μν} σ_μ ⊗ σ_ν`.
pub fn tensor_to_density(e: &CoefficientTensor) -> ComplexMatrix4 {
    let products = pauli_products();
    let mut m = Matrix4::zeros();
    for (row, prow) in e.0.iter().zip(products.iter()) {
        for (&c, p) in row.iter().zip(prow) {
            if c != 0.0 {
                m = m + p.scale(Complex64::new(0.25 * c, 0.0));
            }
        }
    }
    m
}

/// `e_{μν} = Tr[E (σ_μ ⊗ σ_ν)]`; rejects non-Hermitian or non-unit-trace input.
pub fn density_to_tensor(m: &ComplexMatrix4) -> Result<CoefficientTensor> {
    let dev = m.hermitian_deviation();
    if dev > TRACE_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let tr = m.trace();
    if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
        return Err(Error::NonUnitTrace(tr.re));
    }
    let products = pauli_products();
    let mut e = [[0.0; 4]; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            if mu == 0 && nu == 0 {
                continue;
            }
            let p = &products[mu][nu];
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..4 {
                for j in 0..4 {
                    s += m.0[i][j] * p.0[j][i];
                }
            }
            e[mu][nu] = s.re;
        }
    }
    e[0][0] = 1.0;
    Ok(CoefficientTensor(e))
}

/// Bloch vector of one qubit after tracing out the other.
pub fn reduced_bloch(e: &CoefficientTensor, side: Side) -> BlochVector {
    match side {
        Side::A => BlochVector([e.0[1][0], e.0[2][0], e.0[3][0]]),
        Side::B => BlochVector([e.0[0][1], e.0[0][2], e.0[0][3]]),
    }
}

/// `P = (1 + |a|²)/2`.
pub fn purity_qubit(a: &BlochVector) -> f64 {
    0.5 * (1.0 + a.norm_sqr())
}

/// `Tr[E²] = ¼ Σ e_{μν}²`.
pub fn purity_global(e: &CoefficientTensor) -> f64 {
    0.25 * e.0.iter().flatten().map(|x| x * x).sum::<f64>()
}

/// Minimum eigenvalue of the reconstructed 4×4 density matrix.
pub fn min_eigenvalue(e: &CoefficientTensor) -> f64 {
    // A real tensor always reconstructs to a Hermitian matrix.
    hermitian_eigenvalues(&tensor_to_density(e)).expect("reconstructed state is Hermitian")[0]
}

/// True iff the reconstructed state is positive semidefinite to −1e-10.
pub fn is_physical(e: &CoefficientTensor) -> bool {
    min_eigenvalue(e) >= -PHYSICAL_TOL
}

/// Exchange the two qubits (transpose of `e`).
pub fn swap_subsystems(e: &CoefficientTensor) -> CoefficientTensor {
    CoefficientTensor(std::array::from_fn(|mu| std::array::from_fn(|nu| e.0[nu][mu])))
}
