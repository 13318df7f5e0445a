mod common;

use pauliflow::evolution::expm_oracle;
use pauliflow::linalg::{real3_apply, Real3};
use pauliflow::{
    build_unitary, canonicalize_coupling, evolve_oracle, evolve_tensor, is_physical, purity_global, swap_subsystems,
    CanonicalCoupling, GeneralHamiltonian, ScenarioRng,
};
use std::f64::consts::PI;

const CASES: usize = 250;

#[test]
fn closed_form_matches_oracle() {
    let mut rng = ScenarioRng::new(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let e = rng.physical_tensor();
        let g = rng.coupling(3.0);
        let t = rng.uniform(0.0, PI);
        worst = worst.max(evolve_tensor(&e, &g, t).max_abs_diff(&evolve_oracle(&e, &g, t)));
    }
    assert!(worst < 1e-10, "max coefficient error {worst:e}");
}

#[test]
fn purity_and_trace_conserved() {
    let mut rng = ScenarioRng::new(2);
    for _ in 0..CASES {
        let e = rng.physical_tensor();
        let out = evolve_tensor(&e, &rng.coupling(3.0), rng.uniform(0.0, PI));
        assert!((purity_global(&out) - purity_global(&e)).abs() < 1e-12);
        assert_eq!(out.get(0, 0), 1.0);
        assert!(is_physical(&out));
    }
}

#[test]
fn exchange_symmetry() {
    let mut rng = ScenarioRng::new(3);
    for _ in 0..CASES {
        let e = rng.physical_tensor();
        let g = rng.coupling(3.0);
        let t = rng.uniform(0.0, PI);
        let lhs = evolve_tensor(&swap_subsystems(&e), &g, t);
        let rhs = swap_subsystems(&evolve_tensor(&e, &g, t));
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }
}

#[test]
fn time_composition() {
    let mut rng = ScenarioRng::new(4);
    for _ in 0..CASES {
        let e = rng.physical_tensor();
        let g = rng.coupling(3.0);
        let (t1, t2) = (rng.uniform(0.0, PI), rng.uniform(0.0, PI));
        let once = evolve_tensor(&e, &g, t1 + t2);
        let twice = evolve_tensor(&evolve_tensor(&e, &g, t1), &g, t2);
        assert!(once.max_abs_diff(&twice) < 1e-12);
    }
}

#[test]
fn period_pi_for_integer_couplings() {
    let mut rng = ScenarioRng::new(5);
    for _ in 0..CASES {
        let e = rng.physical_tensor();
        let g = CanonicalCoupling { gamma: std::array::from_fn(|_| rng.uniform(-3.5, 3.5).round()) };
        let t = rng.uniform(0.0, PI);
        assert!(evolve_tensor(&e, &g, t).max_abs_diff(&evolve_tensor(&e, &g, t + PI)) < 1e-12);
    }
}

#[test]
fn reversibility() {
    let mut rng = ScenarioRng::new(6);
    for _ in 0..CASES {
        let e = rng.physical_tensor();
        let g = rng.coupling(3.0);
        let t = rng.uniform(0.0, PI);
        let back = evolve_tensor(&evolve_tensor(&e, &g, t), &g.negated(), t);
        assert!(back.max_abs_diff(&e) < 1e-12);
    }
}

#[test]
fn canonical_form_reproduces_general_propagator() {
    let mut rng = ScenarioRng::new(7);
    for _ in 0..CASES {
        let gamma: Real3 = std::array::from_fn(|_| std::array::from_fn(|_| rng.uniform(-2.0, 2.0)));
        let h = GeneralHamiltonian::nonlocal(gamma);
        let c = canonicalize_coupling(&h).unwrap();
        let rebuilt = c.reconstruct();
        for i in 0..3 {
            for j in 0..3 {
                assert!((rebuilt[i][j] - gamma[i][j]).abs() < 1e-10);
            }
        }
        let g = c.coupling.gamma;
        assert!(g[0] >= g[1].abs() - 1e-12 && g[1] >= g[2].abs() - 1e-12);

        let t = rng.uniform(0.0, PI);
        let w = common::local_unitary(&c.rotation_a, &c.rotation_b);
        let via_canonical = w * build_unitary(&c.coupling, t) * w.adjoint();
        assert!(via_canonical.max_abs_diff(&expm_oracle(&h, t)) < 1e-10);
    }
}

#[test]
fn su2_lift_matches_rotation() {
    let mut rng = ScenarioRng::new(8);
    for _ in 0..50 {
        let r = rng.rotation();
        let u = common::su2_lift(&r);
        let v = rng.unit_vector();
        let rotated = real3_apply(&r, &v);
        let rho = pauliflow::bloch_to_density(&v.into());
        let conj = u * *rho.matrix() * u.adjoint();
        let got = pauliflow::density_to_bloch(&conj).unwrap();
        for k in 0..3 {
            assert!((got.0[k] - rotated[k]).abs() < 1e-12);
        }
    }
}
