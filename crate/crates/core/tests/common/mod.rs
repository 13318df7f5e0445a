#![allow(dead_code)]

use num_complex::Complex64;
use pauliflow::linalg::{kron, pauli, Matrix2, Matrix4, Real3};
use pauliflow::{evolve_oracle, reduced_bloch, BlochVector, CanonicalCoupling, CoefficientTensor, Side};

/// Reduced state of qubit A after brute-force evolution.
pub fn oracle_reduced(e: &CoefficientTensor, g: &CanonicalCoupling, t: f64) -> BlochVector {
    reduced_bloch(&evolve_oracle(e, g, t), Side::A)
}

pub fn max_diff3(a: &BlochVector, b: &BlochVector) -> f64 {
    a.0.iter().zip(b.0).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// SU(2) element `U` with `U σ_k U† = Σ_i R_ik σ_i`.
pub fn su2_lift(r: &Real3) -> Matrix2 {
    let trace = r[0][0] + r[1][1] + r[2][2];
    let theta = ((trace - 1.0) / 2.0).clamp(-1.0, 1.0).acos();
    let axis = if theta.sin() > 1e-6 {
        let s = 2.0 * theta.sin();
        [(r[2][1] - r[1][2]) / s, (r[0][2] - r[2][0]) / s, (r[1][0] - r[0][1]) / s]
    } else if theta < 1.0 {
        [0.0, 0.0, 1.0]
    } else {
        // Half-turn: R = 2nnᵀ − 𝟙.
        let k = (0..3).max_by(|&i, &j| r[i][i].total_cmp(&r[j][j])).unwrap();
        let nk = ((r[k][k] + 1.0) / 2.0).sqrt();
        std::array::from_fn(|i| if i == k { nk } else { r[i][k] / (2.0 * nk) })
    };
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let mut u = Matrix2::identity().scale(Complex64::new(c, 0.0));
    for (i, n) in axis.iter().enumerate() {
        u = u - pauli(i + 1).scale(Complex64::new(0.0, s * n));
    }
    u
}

pub fn local_unitary(ra: &Real3, rb: &Real3) -> Matrix4 {
    kron(&su2_lift(ra), &su2_lift(rb))
}
