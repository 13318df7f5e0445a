//! Two-qubit dynamics in the Pauli coefficient basis.
//!
//! A two-qubit state is stored as the real 4×4 tensor `e_{μν}` with
//! `E = ¼ Σ e_{μν} σ_μ⊗σ_ν`. Under the canonical coupling
//! `H = Σ γ_i σ_i⊗σ_i` those sixteen numbers evolve in closed form, which
//! makes it cheap to
//!
//! * follow purity and entanglement through time ([`evolution`]),
//! * build the reduced dynamical map on one qubit, CP or not ([`maps`]),
//! * run a collision-model environment ([`collision`]),
//! * search coupling schedules for maximal entanglement ([`entangle`]).
//!
//! Every closed form is checked against a brute-force `U E U†` oracle that
//! works with explicit 4×4 matrices.
//!
//! ```
//! use pauliflow::{evolve_tensor, product_tensor, entanglement_linear, BlochVector, CanonicalCoupling};
//! use std::f64::consts::FRAC_PI_4;
//!
//! let e = product_tensor(&BlochVector::new(1.0, 0.0, 0.0), &BlochVector::new(0.0, 1.0, 0.0));
//! let bell = evolve_tensor(&e, &CanonicalCoupling::new(0.0, 0.0, 1.0), FRAC_PI_4);
//! assert!((entanglement_linear(&bell).unwrap() - 0.5).abs() < 1e-12);
//! ```

pub mod collision;
pub mod entangle;
pub mod error;
pub mod evolution;
pub mod linalg;
pub mod maps;
pub mod pauli;
pub mod random;
pub mod search;
pub mod trajectory;

pub use collision::{
    purity_swap_demo, simulate_collisions_full, simulate_collisions_maps, BathSpec, Collision, CollisionRun,
    SWAP_DEMO_COUPLING,
};
pub use entangle::{
    entanglement_linear, find_bell_time, fit_cosine, measure_by_id, objective_curve, optimize_schedule, BellTime,
    CosineFit, DurationSpec, EntanglementMeasure, LinearEntropy, ObjectiveMode, OptResult, OptimizationProblem,
    SegmentTemplate,
};
pub use error::{Error, Result};
pub use evolution::{
    build_unitary, canonicalize_coupling, evolve_oracle, evolve_schedule, evolve_tensor, rotate_tensor,
    CanonicalCoupling, Canonicalization, GeneralHamiltonian, Schedule, ScheduleRun, Segment,
};
pub use maps::{
    apply_map, build_map_general, build_map_separable, compose_maps, cp_check, domain_contains, find_non_cp_witness,
    CorrelatedContext, CpReport, CpStatus, DynamicalMap, MapContext, NonCpWitness,
};
pub use pauli::{
    bloch_to_density, density_to_bloch, density_to_tensor, is_physical, min_eigenvalue, product_tensor, purity_global,
    purity_qubit, reduced_bloch, swap_subsystems, tensor_to_density, BlochVector, CoefficientTensor, QubitDensity,
    Side,
};
pub use random::ScenarioRng;
pub use trajectory::{Sample, Trajectory};

/// Book chapters compiled as doctests so their snippets stay in sync.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/pauli_basis.md")]
    mod pauli_basis {}
    #[doc = include_str!("../../../book/src/evolution.md")]
    mod evolution {}
    #[doc = include_str!("../../../book/src/sign_ledger.md")]
    mod sign_ledger {}
    #[doc = include_str!("../../../book/src/maps.md")]
    mod maps {}
    #[doc = include_str!("../../../book/src/collisions.md")]
    mod collisions {}
    #[doc = include_str!("../../../book/src/optimization.md")]
    mod optimization {}
}
