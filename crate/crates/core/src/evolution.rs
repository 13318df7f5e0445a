//! Closed-form propagation under the canonical coupling `H = Σ γ_i σ_i ⊗ σ_i`.
//!
//! With no free evolution the propagator factorizes into three commuting
//! pieces, `U = Π_j [cos(γ_j t) 𝟙⊗𝟙 − i sin(γ_j t) σ_j⊗σ_j]`, and each Pauli
//! coefficient mixes with at most three others through `C_i = cos(2γ_i t)`
//! and `S_i = sin(2γ_i t)`. [`evolve_tensor`] applies that mixing directly;
//! [`evolve_oracle`] builds `U` and conjugates the 4×4 density matrix, and
//! the two are required to agree to 1e-10.
//!
//! Sign convention: for `U = e^{−iHt}` and `{i, j, k}` cyclic,
//!
//! ```text
//! e_{i0} → e_{i0} C_j C_k + e_{0i} S_j S_k − e_{jk} C_j S_k + e_{kj} C_k S_j
//! e_{0i} → e_{0i} C_j C_k + e_{i0} S_j S_k − e_{kj} C_j S_k + e_{jk} C_k S_j
//! e_{ij} → e_{ij} C_i C_j + e_{ji} S_i S_j − ε_{ijk} (e_{0k} C_j S_i − e_{k0} C_i S_j)
//! ```
//!
//! Every term odd in the `S_i` flips sign under `t → −t`; see the sign
//! ledger chapter of the book for how each sign was pinned.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigen, kron, pauli, real3_apply, real3_det, real3_identity, real3_mul, real3_transpose, svd3, Matrix4,
    Real3,
};
use crate::pauli::{
    density_to_tensor, reduced_bloch, tensor_to_density, BlochVector, CoefficientTensor, ComplexMatrix4, Side,
};
use crate::trajectory::{grid_len, Sample, Trajectory};

/// The three canonical couplings `γ_i` (angular frequency, ħ = 1).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CanonicalCoupling {
    pub gamma: [f64; 3],
}

impl CanonicalCoupling {
    pub const ZERO: CanonicalCoupling = CanonicalCoupling { gamma: [0.0; 3] };

    pub const fn new(g1: f64, g2: f64, g3: f64) -> Self {
        CanonicalCoupling { gamma: [g1, g2, g3] }
    }

    pub fn is_zero(&self) -> bool {
        self.gamma.iter().all(|&g| g == 0.0)
    }

    pub fn negated(&self) -> Self {
        CanonicalCoupling { gamma: self.gamma.map(|g| -g) }
    }

    pub fn scaled(&self, k: f64) -> Self {
        CanonicalCoupling { gamma: self.gamma.map(|g| k * g) }
    }

    pub fn is_finite(&self) -> bool {
        self.gamma.iter().all(|g| g.is_finite())
    }

    /// `Σ γ_i σ_i ⊗ σ_i` as a 4×4 matrix.
    pub fn hamiltonian(&self) -> Matrix4 {
        GeneralHamiltonian::from(*self).matrix()
    }
}

/// `H = Σ α_i σ_i⊗𝟙 + Σ β_i 𝟙⊗σ_i + Σ Γ_ij σ_i⊗σ_j`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GeneralHamiltonian {
    pub alpha: [f64; 3],
    pub beta: [f64; 3],
    pub coupling: Real3,
}

impl GeneralHamiltonian {
    /// Purely nonlocal Hamiltonian with coupling matrix `Γ`.
    pub fn nonlocal(coupling: Real3) -> Self {
        GeneralHamiltonian { alpha: [0.0; 3], beta: [0.0; 3], coupling }
    }

    pub fn matrix(&self) -> Matrix4 {
        let id = pauli(0);
        let mut h = Matrix4::zeros();
        let re = |x: f64| Complex64::new(x, 0.0);
        for i in 0..3 {
            let s = pauli(i + 1);
            h = h + kron(&s, &id).scale(re(self.alpha[i]));
            h = h + kron(&id, &s).scale(re(self.beta[i]));
            for j in 0..3 {
                h = h + kron(&s, &pauli(j + 1)).scale(re(self.coupling[i][j]));
            }
        }
        h
    }
}

impl From<CanonicalCoupling> for GeneralHamiltonian {
    fn from(c: CanonicalCoupling) -> Self {
        let g = c.gamma;
        GeneralHamiltonian::nonlocal([[g[0], 0.0, 0.0], [0.0, g[1], 0.0], [0.0, 0.0, g[2]]])
    }
}

/// `C_i = cos(2γ_i t)`, `S_i = sin(2γ_i t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrigFactors {
    pub cos: [f64; 3],
    pub sin: [f64; 3],
}

pub fn trig_factors(coupling: &CanonicalCoupling, t: f64) -> TrigFactors {
    let mut cos = [0.0; 3];
    let mut sin = [0.0; 3];
    for i in 0..3 {
        let (s, c) = (2.0 * coupling.gamma[i] * t).sin_cos();
        cos[i] = c;
        sin[i] = s;
    }
    TrigFactors { cos, sin }
}

/// `U = Π_j [cos(γ_j t) 𝟙⊗𝟙 − i sin(γ_j t) σ_j⊗σ_j]`.
pub fn build_unitary(coupling: &CanonicalCoupling, t: f64) -> ComplexMatrix4 {
    let mut u = Matrix4::identity();
    for j in 0..3 {
        let (s, c) = (coupling.gamma[j] * t).sin_cos();
        let sj = pauli(j + 1);
        let factor = Matrix4::identity().scale(Complex64::new(c, 0.0)) + kron(&sj, &sj).scale(Complex64::new(0.0, -s));
        u = u * factor;
    }
    u
}

/// Brute-force route: `U E U†` on the reconstructed 4×4 matrix.
pub fn evolve_oracle(e: &CoefficientTensor, coupling: &CanonicalCoupling, t: f64) -> CoefficientTensor {
    let u = build_unitary(coupling, t);
    let rho = tensor_to_density(e);
    density_to_tensor(&(u * rho * u.adjoint())).expect("unitary conjugation preserves unit trace")
}

fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Closed-form coefficient update (see the module docs for the formulas).
pub fn evolve_tensor(e: &CoefficientTensor, coupling: &CanonicalCoupling, t: f64) -> CoefficientTensor {
    let TrigFactors { cos: c, sin: s } = trig_factors(coupling, t);
    let x = e.as_array();
    let mut out = [[0.0; 4]; 4];
    out[0][0] = 1.0;

    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let (pi, pj, pk) = (i + 1, j + 1, k + 1);
        out[pi][0] =
            x[pi][0] * c[j] * c[k] + x[0][pi] * s[j] * s[k] - x[pj][pk] * c[j] * s[k] + x[pk][pj] * c[k] * s[j];
        out[0][pi] =
            x[0][pi] * c[j] * c[k] + x[pi][0] * s[j] * s[k] - x[pk][pj] * c[j] * s[k] + x[pj][pk] * c[k] * s[j];
    }

    for i in 0..3 {
        for j in 0..3 {
            let mut v = x[i + 1][j + 1] * c[i] * c[j] + x[j + 1][i + 1] * s[i] * s[j];
            if i != j {
                let k = 3 - i - j;
                v -= levi_civita(i, j, k) * (x[0][k + 1] * c[j] * s[i] - x[k + 1][0] * c[i] * s[j]);
            }
            out[i + 1][j + 1] = v;
        }
    }
    CoefficientTensor::from_array_unchecked(out)
}

/// One piece of a piecewise-constant coupling sequence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub coupling: CanonicalCoupling,
    pub duration: f64,
}

/// Ordered segments applied one after another.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Schedule {
    segments: Vec<Segment>,
}

impl Schedule {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if let Some(bad) = segments.iter().find(|s| !(s.duration.is_finite() && s.duration >= 0.0)) {
            return Err(Error::InvalidDuration(bad.duration));
        }
        Ok(Schedule { segments })
    }

    pub fn single(coupling: CanonicalCoupling, duration: f64) -> Result<Self> {
        Self::new(vec![Segment { coupling, duration }])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Final tensor after every segment, without sampling.
    pub fn apply(&self, e: &CoefficientTensor) -> CoefficientTensor {
        self.segments.iter().fold(*e, |acc, s| evolve_tensor(&acc, &s.coupling, s.duration))
    }
}

/// Sampled trajectory plus the exact end-of-schedule state.
#[derive(Clone, Debug, PartialEq)]
pub struct ScheduleRun {
    pub trajectory: Trajectory,
    pub final_state: CoefficientTensor,
}

/// Run a schedule, sampling at every multiple of `sample_dt` and at every
/// switch between segments.
///
/// Each segment starts from the exact final tensor of the previous one, so
/// a boundary sample is the same whether viewed from the left or the right.
/// The end of the schedule is sampled only when it lies on the `sample_dt`
/// grid; the exact end state is always returned in `final_state`.
pub fn evolve_schedule(e: &CoefficientTensor, schedule: &Schedule, sample_dt: f64) -> Result<ScheduleRun> {
    if !(sample_dt.is_finite() && sample_dt > 0.0) {
        return Err(Error::InvalidDuration(sample_dt));
    }
    let segs = schedule.segments();
    if segs.is_empty() {
        return Ok(ScheduleRun {
            trajectory: Trajectory { samples: vec![Sample::from_tensor(0.0, e)] },
            final_state: *e,
        });
    }

    // Start time and start state of every segment.
    let mut starts = Vec::with_capacity(segs.len());
    let mut state = *e;
    let mut t0 = 0.0;
    for s in segs {
        starts.push((t0, state));
        state = evolve_tensor(&state, &s.coupling, s.duration);
        t0 += s.duration;
    }
    let total = t0;

    let mut times: Vec<f64> = (0..grid_len(total, sample_dt)).map(|k| k as f64 * sample_dt).collect();
    times.extend(starts.iter().skip(1).map(|(t, _)| *t));
    times.sort_by(f64::total_cmp);
    times.dedup_by(|b, a| (*b - *a).abs() <= 1e-12 * total.max(1.0));

    let samples = times
        .into_iter()
        .map(|t| {
            // Last segment whose start is ≤ t; boundaries resolve to the
            // segment that begins there.
            let idx = starts.partition_point(|(start, _)| *start <= t + 1e-12 * total.max(1.0)).max(1) - 1;
            let (start, start_state) = starts[idx];
            let offset = (t - start).clamp(0.0, segs[idx].duration);
            Sample::from_tensor(t, &evolve_tensor(&start_state, &segs[idx].coupling, offset))
        })
        .collect();

    Ok(ScheduleRun { trajectory: Trajectory { samples }, final_state: state })
}

/// Result of reducing a purely nonlocal `Γ` to canonical form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Canonicalization {
    pub coupling: CanonicalCoupling,
    /// Proper rotation acting on qubit A.
    pub rotation_a: Real3,
    /// Proper rotation acting on qubit B.
    pub rotation_b: Real3,
}

impl Canonicalization {
    /// `R_A · diag(γ) · R_Bᵀ`.
    pub fn reconstruct(&self) -> Real3 {
        let g = self.coupling.gamma;
        std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..3).map(|k| self.rotation_a[i][k] * g[k] * self.rotation_b[j][k]).sum())
        })
    }

    /// Evolve under the original `Γ`: rotate into the canonical frame,
    /// apply the closed form, rotate back.
    pub fn evolve(&self, e: &CoefficientTensor, t: f64) -> CoefficientTensor {
        let (ra, rb) = (&self.rotation_a, &self.rotation_b);
        let inner = rotate_tensor(e, &real3_transpose(ra), &real3_transpose(rb));
        rotate_tensor(&evolve_tensor(&inner, &self.coupling, t), ra, rb)
    }
}

/// `a → R_A a`, `b → R_B b`, `T → R_A T R_Bᵀ`: conjugation of the state by
/// the local unitaries that implement the two rotations.
pub fn rotate_tensor(e: &CoefficientTensor, ra: &Real3, rb: &Real3) -> CoefficientTensor {
    let a = BlochVector(real3_apply(ra, &reduced_bloch(e, Side::A).0));
    let b = BlochVector(real3_apply(rb, &reduced_bloch(e, Side::B).0));
    let t = real3_mul(&real3_mul(ra, &e.correlations()), &real3_transpose(rb));
    CoefficientTensor::from_parts(&a, &b, &t)
}

/// Write `Γ = R_A · diag(γ) · R_Bᵀ` with `R_A`, `R_B` proper rotations and
/// `|γ1| ≥ |γ2| ≥ |γ3|`.
///
/// Local terms are rejected. A rotation of determinant −1 from the SVD has
/// its last column negated together with `γ3`.
pub fn canonicalize_coupling(h: &GeneralHamiltonian) -> Result<Canonicalization> {
    if h.alpha.iter().chain(h.beta.iter()).any(|&x| x != 0.0) {
        return Err(Error::UnsupportedLocalTerms);
    }
    let svd = svd3(&h.coupling);
    let (mut ra, mut rb) = (svd.u, svd.v);
    let mut gamma = svd.singular;
    for r in [&mut ra, &mut rb] {
        if real3_det(r) < 0.0 {
            for row in r.iter_mut() {
                row[2] = -row[2];
            }
            gamma[2] = -gamma[2];
        }
    }
    // An all-zero Γ gives U = V = 𝟙 already; keep the identity explicit.
    if svd.singular[0] == 0.0 {
        ra = real3_identity();
        rb = real3_identity();
    }
    Ok(Canonicalization { coupling: CanonicalCoupling { gamma }, rotation_a: ra, rotation_b: rb })
}

/// `e^{−iHt}` through the eigen-decomposition of the Hermitian 4×4 `H`.
pub fn expm_oracle(h: &GeneralHamiltonian, t: f64) -> ComplexMatrix4 {
    let eig = hermitian_eigen(&h.matrix()).expect("Hamiltonian built from real coefficients is Hermitian");
    let phases = eig.values.map(|lambda| Complex64::from_polar(1.0, -lambda * t));
    eig.vectors * Matrix4::diagonal(phases) * eig.vectors.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{product_tensor, purity_global, reduced_bloch, BlochVector, Side};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_8, PI};

    #[test]
    fn trig_factor_fixtures() {
        let f = trig_factors(&CanonicalCoupling::new(0.3, -1.0, 2.0), 0.0);
        assert_eq!(f.cos, [1.0; 3]);
        assert_eq!(f.sin, [0.0; 3]);

        let f = trig_factors(&CanonicalCoupling::new(0.0, 0.0, 1.0), FRAC_PI_4);
        assert!(f.cos[2].abs() < 1e-16 && (f.sin[2] - 1.0).abs() < 1e-16);
        assert_eq!((f.cos[0], f.cos[1], f.sin[0], f.sin[1]), (1.0, 1.0, 0.0, 0.0));

        let f = trig_factors(&CanonicalCoupling::new(1.0, 1.0, 1.0), FRAC_PI_8);
        for i in 0..3 {
            assert!((f.cos[i] - FRAC_1_SQRT_2).abs() < 1e-15);
            assert!((f.sin[i] - FRAC_1_SQRT_2).abs() < 1e-15);
            assert!((f.cos[i].powi(2) + f.sin[i].powi(2) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn unitary_fixtures() {
        let g = CanonicalCoupling::new(0.4, 1.1, -0.7);
        assert_eq!(build_unitary(&g, 0.0), Matrix4::identity());

        let u = build_unitary(&CanonicalCoupling::new(0.0, 0.0, 1.0), FRAC_PI_4);
        let s3 = pauli(3);
        let want = (Matrix4::identity() + kron(&s3, &s3).scale(Complex64::new(0.0, -1.0)))
            .scale(Complex64::new(FRAC_1_SQRT_2, 0.0));
        assert!(u.max_abs_diff(&want) < 1e-15);
        assert!(build_unitary(&g, 2.3).unitarity_deviation() < 1e-12);
    }

    #[test]
    fn zero_coupling_is_identity() {
        let e = product_tensor(&BlochVector::new(0.1, 0.5, -0.3), &BlochVector::new(0.6, 0.0, 0.2));
        assert_eq!(evolve_tensor(&e, &CanonicalCoupling::ZERO, 5.0), e);
        assert!(evolve_oracle(&e, &CanonicalCoupling::ZERO, 5.0).max_abs_diff(&e) < 1e-15);
    }

    #[test]
    fn purity_fully_swapped_at_quarter_period() {
        let e = product_tensor(&BlochVector::new(1.0, 0.0, 0.0), &BlochVector::ZERO);
        let out = evolve_tensor(&e, &CanonicalCoupling::new(0.0, 1.0, 1.0), FRAC_PI_4);
        assert!(reduced_bloch(&out, Side::A).norm() < 1e-15);
        assert!(reduced_bloch(&out, Side::B).max_abs_diff(&BlochVector::new(1.0, 0.0, 0.0)) < 1e-15);
    }

    #[test]
    fn bell_generation_tensor() {
        let e = product_tensor(&BlochVector::new(1.0, 0.0, 0.0), &BlochVector::new(0.0, 1.0, 0.0));
        let out = evolve_tensor(&e, &CanonicalCoupling::new(0.0, 0.0, 1.0), FRAC_PI_4);
        let x = out.as_array();
        // Oracle-fixed signs under U = e^{-iHt}.
        assert!((x[1][2] - 1.0).abs() < 1e-15);
        assert!((x[2][3] - 1.0).abs() < 1e-15);
        assert!((x[3][1] + 1.0).abs() < 1e-15);
        for i in 1..4 {
            assert!(x[i][0].abs() < 1e-15 && x[0][i].abs() < 1e-15);
        }
        assert!((purity_global(&out) - 1.0).abs() < 1e-14);
        assert!(out.max_abs_diff(&evolve_oracle(&e, &CanonicalCoupling::new(0.0, 0.0, 1.0), FRAC_PI_4)) < 1e-14);
    }

    #[test]
    fn schedule_fixtures() {
        let e = product_tensor(&BlochVector::new(1.0, 0.0, 0.0), &BlochVector::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0));
        let g1 = CanonicalCoupling::new(0.0, 1.0, 0.0);
        let g2 = CanonicalCoupling::new(0.0, 0.0, 1.0);

        let one = evolve_schedule(&e, &Schedule::single(g1, 1.3).unwrap(), 0.1).unwrap();
        assert_eq!(one.final_state, evolve_tensor(&e, &g1, 1.3));

        let split =
            Schedule::new(vec![Segment { coupling: g1, duration: 0.4 }, Segment { coupling: g1, duration: 0.9 }])
                .unwrap();
        let joined = evolve_schedule(&e, &split, 0.1).unwrap().final_state;
        assert!(joined.max_abs_diff(&one.final_state) < 1e-12);

        let worked = Schedule::new(vec![
            Segment { coupling: g1, duration: FRAC_PI_8 },
            Segment { coupling: g2, duration: PI - FRAC_PI_8 },
        ])
        .unwrap();
        let run = evolve_schedule(&e, &worked, 0.05).unwrap();
        let boundary = run.trajectory.iter().find(|s| (s.t - FRAC_PI_8).abs() < 1e-15).unwrap();
        // Oracle sign: −sin(π/4)/√2.
        assert!((boundary.bloch_a.0[2] + 0.5).abs() < 1e-15);
        assert!(run.trajectory.check_invariants());
    }

    #[test]
    fn empty_schedule_yields_input() {
        let e = product_tensor(&BlochVector::new(0.0, 0.3, 0.0), &BlochVector::ZERO);
        let run = evolve_schedule(&e, &Schedule::default(), 0.1).unwrap();
        assert_eq!(run.trajectory.len(), 1);
        assert_eq!(run.final_state, e);
        assert!(evolve_schedule(&e, &Schedule::default(), 0.0).is_err());
        assert!(Schedule::single(CanonicalCoupling::ZERO, -1.0).is_err());
    }

    #[test]
    fn schedule_row_count_excludes_off_grid_end() {
        let e = product_tensor(&BlochVector::new(1.0, 0.0, 0.0), &BlochVector::ZERO);
        let s = Schedule::single(CanonicalCoupling::new(0.0, 1.0, 1.0), std::f64::consts::FRAC_PI_2).unwrap();
        let run = evolve_schedule(&e, &s, 0.01).unwrap();
        assert_eq!(run.trajectory.len(), 158);
    }

    #[test]
    fn canonicalize_diagonal_and_rotated() {
        let c =
            canonicalize_coupling(&GeneralHamiltonian::nonlocal([[3.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 1.0]]))
                .unwrap();
        assert_eq!(c.coupling.gamma, [3.0, 2.0, 1.0]);
        assert_eq!(c.rotation_a, real3_identity());
        assert_eq!(c.rotation_b, real3_identity());

        let r = crate::random::rotation_about([0.0, 0.6, 0.8], 0.9);
        let gamma: Real3 = std::array::from_fn(|i| std::array::from_fn(|j| r[i][j] * [3.0, 2.0, 1.0][j]));
        let c = canonicalize_coupling(&GeneralHamiltonian::nonlocal(gamma)).unwrap();
        for k in 0..3 {
            assert!((c.coupling.gamma[k] - [3.0, 2.0, 1.0][k]).abs() < 1e-12);
        }
        for i in 0..3 {
            for j in 0..3 {
                assert!((c.rotation_a[i][j] - r[i][j]).abs() < 1e-12);
                assert!((c.rotation_b[i][j] - real3_identity()[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn canonical_frame_evolution_matches_expm() {
        let mut rng = crate::random::ScenarioRng::new(9);
        for _ in 0..20 {
            let gamma: Real3 = std::array::from_fn(|_| std::array::from_fn(|_| rng.uniform(-2.0, 2.0)));
            let h = GeneralHamiltonian::nonlocal(gamma);
            let c = canonicalize_coupling(&h).unwrap();
            let e = rng.physical_tensor();
            let t = rng.uniform(0.0, PI);
            let u = expm_oracle(&h, t);
            let want = density_to_tensor(&(u * tensor_to_density(&e) * u.adjoint())).unwrap();
            assert!(c.evolve(&e, t).max_abs_diff(&want) < 1e-10);
        }
    }

    #[test]
    fn canonicalize_rejects_local_terms() {
        let mut h = GeneralHamiltonian::nonlocal(real3_identity());
        h.beta[1] = 0.2;
        assert_eq!(canonicalize_coupling(&h), Err(Error::UnsupportedLocalTerms));
    }

    #[test]
    fn canonicalize_zero_coupling() {
        let c = canonicalize_coupling(&GeneralHamiltonian::default()).unwrap();
        assert!(c.coupling.is_zero());
        assert_eq!(real3_det(&c.rotation_a), 1.0);
    }

    #[test]
    fn expm_fixtures() {
        assert!(expm_oracle(&GeneralHamiltonian::default(), 1.7).max_abs_diff(&Matrix4::identity()) < 1e-15);
        let g = CanonicalCoupling::new(0.7, -1.3, 0.2);
        let u = expm_oracle(&g.into(), 0.9);
        assert!(u.max_abs_diff(&build_unitary(&g, 0.9)) < 1e-10);
    }
}
