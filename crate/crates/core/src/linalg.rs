//! Fixed-size dense linear algebra for one- and two-qubit operators.
//!
//! Everything here works on stack arrays of dimension at most four, which is
//! all a two-qubit engine needs. The Hermitian eigen-solver is a cyclic
//! complex Jacobi iteration and the 3×3 real SVD is one-sided (Hestenes)
//! Jacobi, so the crate carries no LAPACK dependency.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Hermiticity tolerance accepted by the eigen-solver.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Jacobi convergence threshold on the off-diagonal Frobenius norm, relative
/// to `max(1, ‖M‖_F)`.
pub const JACOBI_TOL: f64 = 1e-13;

/// Sweep limit for both Jacobi iterations.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Square complex matrix stored row-major on the stack.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix<const N: usize>(pub [[Complex64; N]; N]);

pub type Matrix2 = Matrix<2>;
pub type Matrix4 = Matrix<4>;

impl<const N: usize> Matrix<N> {
    pub fn zeros() -> Self {
        Matrix([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_real(rows: [[f64; N]; N]) -> Self {
        let mut m = Self::zeros();
        for (i, row) in rows.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                m.0[i][j] = Complex64::new(x, 0.0);
            }
        }
        m
    }

    pub fn diagonal(values: [Complex64; N]) -> Self {
        let mut m = Self::zeros();
        for (i, v) in values.into_iter().enumerate() {
            m.0[i][i] = v;
        }
        m
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[j][i] = self.0[i][j].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[j][i] = self.0[i][j];
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    pub fn scale(&self, k: Complex64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|x| *x *= k);
        m
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().flatten().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.iter().flatten().zip(other.0.iter().flatten()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermitian_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// `‖U·U† − 𝟙‖_max`.
    pub fn unitarity_deviation(&self) -> f64 {
        (*self * self.adjoint()).max_abs_diff(&Self::identity())
    }

    /// Apply to a column vector.
    pub fn apply(&self, v: &[Complex64; N]) -> [Complex64; N] {
        let mut out = [ZERO; N];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..N).map(|j| self.0[i][j] * v[j]).sum();
        }
        out
    }

    pub fn column(&self, j: usize) -> [Complex64; N] {
        std::array::from_fn(|i| self.0[i][j])
    }
}

impl<const N: usize> Default for Matrix<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> Index<(usize, usize)> for Matrix<N> {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.0[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for Matrix<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.0[i][j]
    }
}

impl<const N: usize> Mul for Matrix<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..N {
                    m.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        m
    }
}

impl<const N: usize> Add for Matrix<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *a += b;
        }
        self
    }
}

impl<const N: usize> Sub for Matrix<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *a -= b;
        }
        self
    }
}

/// Pauli matrix `σ_μ` with `σ_0 = 𝟙`; basis state `|0⟩` is σ3-up.
pub fn pauli(mu: usize) -> Matrix2 {
    match mu {
        0 => Matrix([[ONE, ZERO], [ZERO, ONE]]),
        1 => Matrix([[ZERO, ONE], [ONE, ZERO]]),
        2 => Matrix([[ZERO, -I], [I, ZERO]]),
        3 => Matrix([[ONE, ZERO], [ZERO, -ONE]]),
        _ => panic!("pauli index {mu} out of range 0..4"),
    }
}

/// Kronecker product `a ⊗ b`; index `2r + s` addresses `|r⟩_A |s⟩_B`.
pub fn kron(a: &Matrix2, b: &Matrix2) -> Matrix4 {
    let mut m = Matrix4::zeros();
    for r in 0..2 {
        for rp in 0..2 {
            for s in 0..2 {
                for sp in 0..2 {
                    m.0[2 * r + s][2 * rp + sp] = a.0[r][rp] * b.0[s][sp];
                }
            }
        }
    }
    m
}

/// Partial trace over the second qubit of a 4×4 operator.
pub fn partial_trace_b(m: &Matrix4) -> Matrix2 {
    let mut out = Matrix2::zeros();
    for r in 0..2 {
        for rp in 0..2 {
            out.0[r][rp] = m.0[2 * r][2 * rp] + m.0[2 * r + 1][2 * rp + 1];
        }
    }
    out
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Copy, Debug)]
pub struct HermitianEigen<const N: usize> {
    /// Eigenvalues in ascending order.
    pub values: [f64; N],
    /// Unitary whose columns are the matching eigenvectors.
    pub vectors: Matrix<N>,
}

/// Cyclic complex Jacobi eigen-decomposition of a Hermitian matrix.
///
/// Each rotation first removes the phase of the pivot `a_pq`, then applies
/// the real Jacobi rotation that annihilates it. Sweeps stop once the
/// off-diagonal Frobenius norm drops below [`JACOBI_TOL`] (scaled by the
/// matrix norm when that exceeds one) or after [`JACOBI_MAX_SWEEPS`].
pub fn hermitian_eigen<const N: usize>(m: &Matrix<N>) -> Result<HermitianEigen<N>> {
    let dev = m.hermitian_deviation();
    // Negated so a NaN deviation is rejected too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(dev <= HERMITIAN_TOL) {
        return Err(Error::NotHermitian(dev));
    }
    // Symmetrize so round-off in the input does not leak into the rotations.
    let mut a = (*m + m.adjoint()).scale(Complex64::new(0.5, 0.0));
    let mut v = Matrix::<N>::identity();
    let threshold = JACOBI_TOL * m.frobenius_norm().max(1.0);

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) < threshold {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let beta = a.0[p][q];
                let mag = beta.norm();
                if mag == 0.0 {
                    continue;
                }
                let phase = beta / mag;
                let theta = (a.0[q][q].re - a.0[p][p].re) / (2.0 * mag);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                let mut g = Matrix::<N>::identity();
                g.0[p][p] = Complex64::new(c, 0.0);
                g.0[p][q] = Complex64::new(s, 0.0);
                g.0[q][p] = -phase.conj() * s;
                g.0[q][q] = phase.conj() * c;

                a = g.adjoint() * a * g;
                a.0[p][q] = ZERO;
                a.0[q][p] = ZERO;
                v = v * g;
            }
        }
    }

    let mut order: [usize; N] = std::array::from_fn(|i| i);
    order.sort_by(|&i, &j| a.0[i][i].re.total_cmp(&a.0[j][j].re));
    let values = std::array::from_fn(|k| a.0[order[k]][order[k]].re);
    let mut vectors = Matrix::<N>::zeros();
    for (k, &src) in order.iter().enumerate() {
        for i in 0..N {
            vectors.0[i][k] = v.0[i][src];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// Ascending real eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues<const N: usize>(m: &Matrix<N>) -> Result<[f64; N]> {
    hermitian_eigen(m).map(|e| e.values)
}

fn off_diagonal_norm<const N: usize>(a: &Matrix<N>) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        for j in 0..N {
            if i != j {
                s += a.0[i][j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Real 3×3 matrix, row-major.
pub type Real3 = [[f64; 3]; 3];

pub fn real3_identity() -> Real3 {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

pub fn real3_mul(a: &Real3, b: &Real3) -> Real3 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()))
}

pub fn real3_transpose(a: &Real3) -> Real3 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i]))
}

pub fn real3_det(a: &Real3) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

pub fn real3_apply(a: &Real3, v: &[f64; 3]) -> [f64; 3] {
    std::array::from_fn(|i| (0..3).map(|k| a[i][k] * v[k]).sum())
}

/// Singular value decomposition `M = U·diag(σ)·Vᵀ` of a real 3×3 matrix.
#[derive(Clone, Copy, Debug)]
pub struct Svd3 {
    pub u: Real3,
    /// Non-negative, descending.
    pub singular: [f64; 3],
    pub v: Real3,
}

/// One-sided Jacobi SVD.
///
/// Columns of a working copy of `M` are orthogonalized pairwise by plane
/// rotations accumulated into `V`; the final column norms are the singular
/// values. Columns of `U` belonging to (numerically) zero singular values
/// are completed to an orthonormal basis.
pub fn svd3(m: &Real3) -> Svd3 {
    let mut w = *m;
    let mut v = real3_identity();
    let col_dot = |w: &Real3, p: usize, q: usize| (0..3).map(|i| w[i][p] * w[i][q]).sum::<f64>();

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..3 {
            for q in (p + 1)..3 {
                let alpha = col_dot(&w, p, p);
                let beta = col_dot(&w, q, q);
                let gamma = col_dot(&w, p, q);
                if gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for mat in [&mut w, &mut v] {
                    for row in mat.iter_mut() {
                        let (xp, xq) = (row[p], row[q]);
                        row[p] = c * xp - s * xq;
                        row[q] = s * xp + c * xq;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: [f64; 3] = std::array::from_fn(|j| col_dot(&w, j, j).sqrt());
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));

    let scale = norms[order[0]].max(f64::MIN_POSITIVE);
    let mut u = [[0.0; 3]; 3];
    let mut v_sorted = [[0.0; 3]; 3];
    let mut singular = [0.0; 3];
    let mut valid = [false; 3];
    for (k, &j) in order.iter().enumerate() {
        singular[k] = norms[j];
        for i in 0..3 {
            v_sorted[i][k] = v[i][j];
        }
        if norms[j] > 1e-14 * scale && norms[j] > 0.0 {
            valid[k] = true;
            for i in 0..3 {
                u[i][k] = w[i][j] / norms[j];
            }
        }
    }
    complete_orthonormal(&mut u, &valid);
    Svd3 { u, singular, v: v_sorted }
}

/// Fill the columns of `q` not marked valid so that `q` becomes orthogonal.
fn complete_orthonormal(q: &mut Real3, valid: &[bool; 3]) {
    for k in 0..3 {
        if valid[k] {
            continue;
        }
        let mut best: Option<[f64; 3]> = None;
        let mut best_norm = 0.0;
        for e in 0..3 {
            let mut cand = [0.0; 3];
            cand[e] = 1.0;
            for (j, ok) in valid.iter().enumerate() {
                if *ok || j < k {
                    let d: f64 = (0..3).map(|i| q[i][j] * cand[i]).sum();
                    for i in 0..3 {
                        cand[i] -= d * q[i][j];
                    }
                }
            }
            let n = cand.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > best_norm {
                best_norm = n;
                best = Some(cand.map(|x| x / n));
            }
        }
        let col = best.expect("a 3-vector orthogonal to at most two others exists");
        for i in 0..3 {
            q[i][k] = col[i];
        }
    }
}
