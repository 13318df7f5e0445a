//! Reduced dynamical maps of one qubit coupled to a second.
//!
//! A map is stored in B-form: a 4×4 matrix whose rows are indexed by the pair
//! `(r, s)` and columns by `(r′, s′)`, pair order `(1,1), (1,2), (2,1), (2,2)`,
//! acting as
//!
//! ```text
//! ρ′_{rr′} = Σ_{s,s′} B_{(r,s),(r′,s′)} ρ_{ss′}
//! ```
//!
//! In this form the map is Hermitian-preserving iff `B` is Hermitian, and
//! completely positive iff `B` has no negative eigenvalues. The identity
//! channel has eigenvalues `{2, 0, 0, 0}`.
//!
//! Two constructors are provided. [`build_map_separable`] covers a system
//! that starts uncorrelated with an environment of Bloch vector `b`; such maps
//! are always CP. [`build_map_general`] covers an arbitrary correlated start:
//! the environment marginal and the cross terms can no longer be factored
//! out of the state, so they enter the map as constants. That map has exact
//! zeros at `(1,2), (2,1), (3,4), (4,3)` (1-based), is physically meaningful
//! only on its compatibility domain ([`domain_contains`]) and may have
//! negative eigenvalues.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::{trig_factors, CanonicalCoupling, TrigFactors};
use crate::linalg::{hermitian_eigenvalues, Matrix, Matrix2, Matrix4, Real3, HERMITIAN_TOL};
use crate::pauli::{is_physical, reduced_bloch, BlochVector, CoefficientTensor, QubitDensity, Side};

/// A map is CP when its smallest B-form eigenvalue is at least `-CP_TOL`.
pub const CP_TOL: f64 = 1e-10;

/// A map is reported as *not* CP only below `-NON_CP_TOL`.
pub const NON_CP_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CpStatus {
    CompletelyPositive,
    NotCompletelyPositive,
    /// Not yet examined, or the smallest eigenvalue sits between the two
    /// thresholds.
    Unchecked,
}

impl CpStatus {
    fn classify(min_eigenvalue: f64) -> Self {
        if min_eigenvalue >= -CP_TOL {
            CpStatus::CompletelyPositive
        } else if min_eigenvalue < -NON_CP_TOL {
            CpStatus::NotCompletelyPositive
        } else {
            CpStatus::Unchecked
        }
    }
}

/// Environment marginal `e_{0i}` and cross terms `e_{ij}` of a correlated
/// initial pair. Together with a system Bloch vector they determine the full
/// initial tensor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelatedContext {
    pub environment: BlochVector,
    pub correlations: Real3,
}

impl CorrelatedContext {
    pub fn from_tensor(e: &CoefficientTensor) -> Self {
        CorrelatedContext { environment: reduced_bloch(e, Side::B), correlations: e.correlations() }
    }

    /// Full initial tensor for system Bloch vector `a`.
    pub fn assemble(&self, a: &BlochVector) -> CoefficientTensor {
        CoefficientTensor::from_parts(a, &self.environment, &self.correlations)
    }
}

/// How a map was built.
#[derive(Clone, Debug, PartialEq)]
pub enum MapContext {
    Separable {
        environment: BlochVector,
        coupling: CanonicalCoupling,
        interval: (f64, f64),
    },
    Correlated {
        context: CorrelatedContext,
        coupling: CanonicalCoupling,
        interval: (f64, f64),
    },
    Composite {
        parts: usize,
    },
    /// Supplied directly as a matrix.
    Explicit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DynamicalMap {
    b: Matrix4,
    context: MapContext,
    cp: CpStatus,
}

/// Smallest B-form eigenvalue and the CP verdict.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CpReport {
    pub min_eigenvalue: f64,
    pub cp: bool,
}

impl DynamicalMap {
    pub fn from_b_form(b: Matrix4, context: MapContext) -> Self {
        DynamicalMap { b, context, cp: CpStatus::Unchecked }
    }

    /// `vec(ρ′) = A · vec(ρ)` with `A_{(r,r′),(s,s′)} = B_{(r,s),(r′,s′)}`.
    pub fn from_action_form(a: Matrix4, context: MapContext) -> Self {
        Self::from_b_form(reshuffle(&a), context)
    }

    pub fn identity() -> Self {
        Self::from_b_form(
            Matrix4::from_real([[1.0, 0.0, 0.0, 1.0], [0.0; 4], [0.0; 4], [1.0, 0.0, 0.0, 1.0]]),
            MapContext::Explicit,
        )
    }

    /// `ρ ↦ 𝟙/2`.
    pub fn depolarizing() -> Self {
        Self::from_b_form(Matrix4::identity().scale(Complex64::new(0.5, 0.0)), MapContext::Explicit)
    }

    /// `ρ ↦ ρᵀ`, positive but not completely positive.
    pub fn transpose() -> Self {
        Self::from_b_form(
            Matrix4::from_real([
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ]),
            MapContext::Explicit,
        )
    }

    pub fn b_form(&self) -> &Matrix4 {
        &self.b
    }

    pub fn action_form(&self) -> Matrix4 {
        reshuffle(&self.b)
    }

    pub fn context(&self) -> &MapContext {
        &self.context
    }

    pub fn cp_status(&self) -> CpStatus {
        self.cp
    }

    pub fn with_interval(mut self, start: f64, end: f64) -> Self {
        match &mut self.context {
            MapContext::Separable { interval, .. } | MapContext::Correlated { interval, .. } => {
                *interval = (start, end)
            }
            _ => {}
        }
        self
    }

    /// Ascending B-form eigenvalues.
    pub fn eigenvalues(&self) -> Result<[f64; 4]> {
        hermitian_eigenvalues(&self.b)
    }

    /// Run [`cp_check`] and store the verdict.
    pub fn with_cp_checked(mut self) -> Result<Self> {
        let report = cp_check(&self)?;
        self.cp = CpStatus::classify(report.min_eigenvalue);
        Ok(self)
    }

    pub fn apply(&self, rho: &QubitDensity) -> QubitDensity {
        apply_map(self, rho)
    }
}

/// `M_{(r,s),(r′,s′)} ↔ M_{(r,r′),(s,s′)}`; an involution.
fn reshuffle(m: &Matrix4) -> Matrix4 {
    let mut out = Matrix4::zeros();
    for r in 0..2 {
        for s in 0..2 {
            for rp in 0..2 {
                for sp in 0..2 {
                    out.0[2 * r + rp][2 * s + sp] = m.0[2 * r + s][2 * rp + sp];
                }
            }
        }
    }
    out
}

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// B-form map for a system starting uncorrelated with an environment of
/// Bloch vector `b`, evolved for `t` under `coupling`.
pub fn build_map_separable(b: &BlochVector, coupling: &CanonicalCoupling, t: f64) -> DynamicalMap {
    let TrigFactors { cos: [c1, c2, c3], sin: [s1, s2, s3] } = trig_factors(coupling, t);
    let [b1, b2, b3] = b.0;

    let d_plus = b3 * s1 * s2;
    let cc = c1 * c2;
    let q01 = cx(-b2 * c1 * s2, b1 * c2 * s1);
    let q02 = cx((b1 * s3 + b2 * c3) * s2, -(b2 * s3 - b1 * c3) * s1);
    let q03 = cx(c1 + c2, 0.0) * cx(c3, -b3 * s3);
    let q12 = cx(c2 - c1, 0.0) * cx(c3, b3 * s3);
    let q13 = cx((b1 * s3 - b2 * c3) * s2, -(b2 * s3 + b1 * c3) * s1);
    let q23 = cx(b2 * c1 * s2, -b1 * c2 * s1);

    let m = Matrix([
        [cx(1.0 + d_plus + cc, 0.0), q01, q02, q03],
        [q01.conj(), cx(1.0 + d_plus - cc, 0.0), q12, q13],
        [q02.conj(), q12.conj(), cx(1.0 - d_plus - cc, 0.0), q23],
        [q03.conj(), q13.conj(), q23.conj(), cx(1.0 - d_plus + cc, 0.0)],
    ])
    .scale(cx(0.5, 0.0));

    let context = MapContext::Separable { environment: *b, coupling: *coupling, interval: (0.0, t) };
    DynamicalMap::from_b_form(m, context).with_cp_checked().expect("separable B-form is Hermitian by construction")
}

/// B-form map for a correlated start. Only the `a_i C_j C_k` part of the
/// reduced evolution is linear in the system state; everything carried by
/// `e_{0i}` and `e_{ij}` enters as a constant multiplied by `Tr ρ`.
pub fn build_map_general(env: &CorrelatedContext, coupling: &CanonicalCoupling, t: f64) -> DynamicalMap {
    let TrigFactors { cos: [c1, c2, c3], sin: [s1, s2, s3] } = trig_factors(coupling, t);
    let [e01, e02, e03] = env.environment.0;
    let x = &env.correlations;
    let (e12, e13, e21, e23, e31, e32) = (x[0][1], x[0][2], x[1][0], x[1][2], x[2][0], x[2][1]);

    // Constant parts of a_1(t), a_2(t), a_3(t).
    let k1 = e01 * s2 * s3 - e23 * c2 * s3 + e32 * c3 * s2;
    let k2 = e02 * s3 * s1 - e31 * c3 * s1 + e13 * c1 * s3;
    let k3 = e03 * s1 * s2 - e12 * c1 * s2 + e21 * c2 * s1;

    let cc = c1 * c2;
    let off = cx(k1, -k2);
    let zero = cx(0.0, 0.0);
    let m = Matrix([
        [cx(1.0 + cc + k3, 0.0), zero, off, cx((c1 + c2) * c3, 0.0)],
        [zero, cx(1.0 - cc + k3, 0.0), cx((c2 - c1) * c3, 0.0), off],
        [off.conj(), cx((c2 - c1) * c3, 0.0), cx(1.0 - cc - k3, 0.0), zero],
        [cx((c1 + c2) * c3, 0.0), off.conj(), zero, cx(1.0 + cc - k3, 0.0)],
    ])
    .scale(cx(0.5, 0.0));

    let context = MapContext::Correlated { context: *env, coupling: *coupling, interval: (0.0, t) };
    DynamicalMap::from_b_form(m, context).with_cp_checked().expect("correlated B-form is Hermitian by construction")
}

/// `ρ′_{rr′} = Σ_{s,s′} B_{(r,s),(r′,s′)} ρ_{ss′}`.
pub fn apply_map(m: &DynamicalMap, rho: &QubitDensity) -> QubitDensity {
    let b = &m.b;
    let p = rho.matrix();
    let mut out = Matrix2::zeros();
    for r in 0..2 {
        for rp in 0..2 {
            let mut acc = cx(0.0, 0.0);
            for s in 0..2 {
                for sp in 0..2 {
                    acc += b.0[2 * r + s][2 * rp + sp] * p.0[s][sp];
                }
            }
            out.0[r][rp] = acc;
        }
    }
    QubitDensity::from_matrix_unchecked(out)
}

/// `m_n ∘ … ∘ m_1` for `maps = [m_1, …, m_n]`, via action-form products.
pub fn compose_maps(maps: &[DynamicalMap]) -> Result<DynamicalMap> {
    let (first, rest) = maps.split_first().ok_or(Error::EmptyComposition)?;
    if rest.is_empty() {
        return Ok(first.clone());
    }
    let action = rest.iter().fold(first.action_form(), |acc, m| m.action_form() * acc);
    DynamicalMap::from_action_form(action, MapContext::Composite { parts: maps.len() }).with_cp_checked()
}

/// Smallest B-form eigenvalue; `cp` iff it is at least `-CP_TOL`.
pub fn cp_check(m: &DynamicalMap) -> Result<CpReport> {
    let dev = m.b.hermitian_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let min_eigenvalue = m.eigenvalues()?[0];
    Ok(CpReport { min_eigenvalue, cp: min_eigenvalue >= -CP_TOL })
}

/// True iff `a` together with the context assembles to a physical pair.
pub fn domain_contains(env: &CorrelatedContext, a: &BlochVector) -> bool {
    is_physical(&env.assemble(a))
}

/// A correlated start, coupling and time whose map is not CP.
#[derive(Clone, Debug, PartialEq)]
pub struct NonCpWitness {
    pub coupling: CanonicalCoupling,
    pub t: f64,
    pub min_eigenvalue: f64,
    pub map: DynamicalMap,
}

/// Scan `couplings × times` for the first correlated map with an
/// eigenvalue below `-NON_CP_TOL`.
pub fn find_non_cp_witness(
    start: &CoefficientTensor,
    couplings: &[CanonicalCoupling],
    times: &[f64],
) -> Option<NonCpWitness> {
    let env = CorrelatedContext::from_tensor(start);
    couplings.iter().find_map(|g| {
        times.iter().find_map(|&t| {
            let map = build_map_general(&env, g, t);
            let min = map.eigenvalues().ok()?[0];
            (min < -NON_CP_TOL).then_some(NonCpWitness { coupling: *g, t, min_eigenvalue: min, map })
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::evolve_oracle;
    use crate::pauli::{bloch_to_density, product_tensor};
    use crate::random::ScenarioRng;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

    fn approx_eigs(got: [f64; 4], want: [f64; 4], tol: f64) {
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < tol, "{got:?} vs {want:?}");
        }
    }

    fn oracle_reduced(e: &CoefficientTensor, g: &CanonicalCoupling, t: f64) -> BlochVector {
        reduced_bloch(&evolve_oracle(e, g, t), Side::A)
    }

    #[test]
    fn identity_at_time_zero() {
        let m = build_map_separable(&BlochVector::new(0.3, -0.4, 0.1), &CanonicalCoupling::new(1.0, 2.0, 3.0), 0.0);
        assert_eq!(*m.b_form(), *DynamicalMap::identity().b_form());
        approx_eigs(m.eigenvalues().unwrap(), [0.0, 0.0, 0.0, 2.0], 1e-14);
        assert_eq!(m.cp_status(), CpStatus::CompletelyPositive);

        let env = CorrelatedContext { environment: BlochVector::ZERO, correlations: [[0.0; 3]; 3] };
        let m = build_map_general(&env, &CanonicalCoupling::new(1.0, 2.0, 3.0), 0.0);
        assert_eq!(*m.b_form(), *DynamicalMap::identity().b_form());
    }

    #[test]
    fn depolarizing_construction() {
        let m = build_map_separable(&BlochVector::ZERO, &CanonicalCoupling::new(0.0, 1.0, 1.0), FRAC_PI_4);
        assert!(m.b_form().max_abs_diff(DynamicalMap::depolarizing().b_form()) < 1e-15);
        approx_eigs(m.eigenvalues().unwrap(), [0.5; 4], 1e-14);
        let rho = bloch_to_density(&BlochVector::new(0.2, 0.9, -0.1));
        let out = apply_map(&m, &rho);
        assert!(out.matrix().max_abs_diff(&Matrix2::from_real([[0.5, 0.0], [0.0, 0.5]])) < 1e-15);
    }

    #[test]
    fn separable_map_matches_oracle() {
        let mut rng = ScenarioRng::new(77);
        for _ in 0..20 {
            let b = rng.bloch(1.0);
            let g = rng.coupling(3.0);
            let t = rng.uniform(0.0, std::f64::consts::PI);
            let m = build_map_separable(&b, &g, t);
            assert_eq!(m.cp_status(), CpStatus::CompletelyPositive);
            for _ in 0..10 {
                let a = rng.bloch(1.0);
                let got = apply_map(&m, &bloch_to_density(&a)).bloch();
                let want = oracle_reduced(&product_tensor(&a, &b), &g, t);
                assert!(got.max_abs_diff(&want) < 1e-10);
            }
        }
    }

    #[test]
    fn correlated_map_zero_pattern_and_oracle() {
        let mut rng = ScenarioRng::new(78);
        for _ in 0..20 {
            let e = rng.physical_tensor();
            let env = CorrelatedContext::from_tensor(&e);
            let g = rng.coupling(3.0);
            let t = rng.uniform(0.0, 3.0);
            let m = build_map_general(&env, &g, t);
            let b = m.b_form();
            for (i, j) in [(0, 1), (1, 0), (2, 3), (3, 2)] {
                assert_eq!(b.0[i][j], Complex64::new(0.0, 0.0));
            }
            let a = reduced_bloch(&e, Side::A);
            assert!(domain_contains(&env, &a));
            let got = apply_map(&m, &bloch_to_density(&a)).bloch();
            assert!(got.max_abs_diff(&oracle_reduced(&e, &g, t)) < 1e-10);
        }
    }

    #[test]
    fn transpose_is_not_cp() {
        let r = cp_check(&DynamicalMap::transpose()).unwrap();
        assert!((r.min_eigenvalue + 1.0).abs() < 1e-14);
        assert!(!r.cp);
        let m = DynamicalMap::transpose().with_cp_checked().unwrap();
        assert_eq!(m.cp_status(), CpStatus::NotCompletelyPositive);
    }

    #[test]
    fn identity_is_cp() {
        let r = cp_check(&DynamicalMap::identity()).unwrap();
        assert!(r.min_eigenvalue.abs() < 1e-14 && r.cp);
    }

    #[test]
    fn cp_check_rejects_non_hermitian() {
        let mut b = *DynamicalMap::identity().b_form();
        b.0[0][1] = cx(0.3, 0.0);
        let m = DynamicalMap::from_b_form(b, MapContext::Explicit);
        assert!(matches!(cp_check(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn composition_fixtures() {
        let m = build_map_separable(&BlochVector::new(0.1, 0.2, 0.3), &CanonicalCoupling::new(0.5, 0.2, 1.0), 0.7);
        let composed = compose_maps(&[DynamicalMap::identity(), m.clone()]).unwrap();
        assert!(composed.b_form().max_abs_diff(m.b_form()) < 1e-12);
        let absorbed = compose_maps(&[m.clone(), DynamicalMap::depolarizing()]).unwrap();
        assert!(absorbed.b_form().max_abs_diff(DynamicalMap::depolarizing().b_form()) < 1e-12);
        assert_eq!(compose_maps(&[]).unwrap_err(), Error::EmptyComposition);
    }

    #[test]
    fn composite_applies_in_order() {
        let m1 = build_map_separable(&BlochVector::new(0.0, 0.0, 1.0), &CanonicalCoupling::new(0.0, 1.0, 0.0), 0.3);
        let m2 = build_map_separable(&BlochVector::new(1.0, 0.0, 0.0), &CanonicalCoupling::new(0.0, 0.0, 1.0), 0.6);
        let rho = bloch_to_density(&BlochVector::new(0.2, 0.5, 0.1));
        let seq = apply_map(&m2, &apply_map(&m1, &rho));
        let comp = apply_map(&compose_maps(&[m1, m2]).unwrap(), &rho);
        assert!(seq.matrix().max_abs_diff(comp.matrix()) < 1e-14);
    }

    #[test]
    fn domain_fixtures() {
        let b = BlochVector::new(0.0, 0.6, 0.0);
        let a = BlochVector::new(0.8, 0.0, 0.0);
        let env = CorrelatedContext::from_tensor(&product_tensor(&a, &b));
        assert!(domain_contains(&env, &a));

        let mut corr = [[0.0; 3]; 3];
        corr[0][1] = 1.0;
        corr[1][2] = -1.0;
        corr[2][0] = 1.0;
        let bell = CorrelatedContext { environment: BlochVector::ZERO, correlations: corr };
        assert!(!domain_contains(&bell, &BlochVector::new(1.0, 0.0, 0.0)));
        assert!(domain_contains(&bell, &BlochVector::ZERO));

        let mixed_env = CorrelatedContext { environment: BlochVector::ZERO, correlations: [[0.0; 3]; 3] };
        let mut rng = ScenarioRng::new(4);
        for _ in 0..50 {
            assert!(domain_contains(&mixed_env, &rng.bloch(1.0)));
        }
    }

    #[test]
    fn maximally_entangled_start_gives_non_cp_map() {
        let mut corr = [[0.0; 3]; 3];
        corr[0][1] = 1.0;
        corr[1][2] = -1.0;
        corr[2][0] = 1.0;
        let env = CorrelatedContext { environment: BlochVector::ZERO, correlations: corr };
        let m = build_map_general(&env, &CanonicalCoupling::new(1.0, 0.0, 0.0), FRAC_PI_8);
        assert!(m.eigenvalues().unwrap()[0] < -1e-6);
        assert_eq!(m.cp_status(), CpStatus::NotCompletelyPositive);
    }

    #[test]
    fn reshuffle_is_involution() {
        let m = build_map_separable(&BlochVector::new(0.1, 0.2, 0.3), &CanonicalCoupling::new(0.5, 0.2, 1.0), 0.7);
        assert_eq!(reshuffle(&reshuffle(m.b_form())), *m.b_form());
    }
}
