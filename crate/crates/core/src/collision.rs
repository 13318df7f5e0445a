//! Decoherence as repeated collisions with fresh environment qubits.
//!
//! Each collision couples the system to a new environment qubit for a short
//! time and then discards it, so system-environment correlations never
//! survive past a collision. The same history can therefore be computed two
//! ways: by evolving the full pair and tracing out after every collision, or
//! by composing one separable dynamical map per collision.

use crate::error::{Error, Result};
use crate::evolution::{evolve_tensor, CanonicalCoupling};
use crate::maps::{apply_map, build_map_separable, compose_maps};
use crate::pauli::{bloch_to_density, product_tensor, reduced_bloch, BlochVector, QubitDensity, Side};
use crate::trajectory::{grid_len, Sample, Trajectory};

/// Coupling of the purity-swapping demonstration.
pub const SWAP_DEMO_COUPLING: CanonicalCoupling = CanonicalCoupling::new(0.0, 1.0, 1.0);

/// One fresh environment qubit and how long it interacts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Collision {
    pub environment: BlochVector,
    pub coupling: CanonicalCoupling,
    pub duration: f64,
}

/// Ordered stream of collisions.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BathSpec {
    collisions: Vec<Collision>,
}

impl BathSpec {
    pub fn new(collisions: Vec<Collision>) -> Result<Self> {
        for c in &collisions {
            if !(c.duration.is_finite() && c.duration >= 0.0) {
                return Err(Error::InvalidDuration(c.duration));
            }
            if !c.environment.is_physical() {
                return Err(Error::UnphysicalBloch(c.environment.norm()));
            }
        }
        Ok(BathSpec { collisions })
    }

    /// `count` identical collisions.
    pub fn repeated(count: usize, collision: Collision) -> Result<Self> {
        Self::new(vec![collision; count])
    }

    pub fn collisions(&self) -> &[Collision] {
        &self.collisions
    }

    pub fn len(&self) -> usize {
        self.collisions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.collisions.is_empty()
    }
}

/// Start `a = (1, 0, 0)` against a maximally mixed partner and sample both
/// purities on the grid `k·dt ≤ t_max`.
///
/// For [`SWAP_DEMO_COUPLING`] the purities follow `(1 + cos⁴ 2t)/2` and
/// `(1 + sin⁴ 2t)/2`, crossing at `t = π/8` and fully exchanged at `π/4`.
pub fn purity_swap_demo(coupling: &CanonicalCoupling, t_max: f64, dt: f64) -> Result<Trajectory> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidDuration(dt));
    }
    let e = product_tensor(&BlochVector::new(1.0, 0.0, 0.0), &BlochVector::ZERO);
    let samples = (0..grid_len(t_max, dt))
        .map(|k| {
            let t = k as f64 * dt;
            Sample::from_tensor(t, &evolve_tensor(&e, coupling, t))
        })
        .collect();
    Ok(Trajectory { samples })
}

/// Output of the full two-qubit collision simulation.
#[derive(Clone, Debug, PartialEq)]
pub struct CollisionRun {
    pub trajectory: Trajectory,
    pub final_state: QubitDensity,
    /// `P^A` before the first collision and after each one.
    pub boundary_purities: Vec<f64>,
}

/// Evolve the system against each fresh environment in turn, tracing the
/// environment out at the end of every collision.
///
/// Samples are taken `samples_per_collision` times per collision at equal
/// spacing, ending on the collision boundary; the first sample is `t = 0`.
/// `purity_B` always refers to the environment qubit currently in contact.
pub fn simulate_collisions_full(
    rho_a: &QubitDensity,
    bath: &BathSpec,
    samples_per_collision: usize,
) -> Result<CollisionRun> {
    if samples_per_collision == 0 {
        return Err(Error::InvalidProblem("samples_per_collision must be at least 1".into()));
    }
    let mut a = rho_a.bloch();
    let mut t0 = 0.0;
    let mut samples = Vec::new();
    let mut boundary_purities = vec![a.purity()];

    for (i, c) in bath.collisions().iter().enumerate() {
        let start = product_tensor(&a, &c.environment);
        if i == 0 {
            samples.push(Sample::from_tensor(0.0, &start));
        }
        if c.duration > 0.0 {
            for j in 1..=samples_per_collision {
                let dt = c.duration * j as f64 / samples_per_collision as f64;
                samples.push(Sample::from_tensor(t0 + dt, &evolve_tensor(&start, &c.coupling, dt)));
            }
        }
        let end = evolve_tensor(&start, &c.coupling, c.duration);
        a = reduced_bloch(&end, Side::A);
        boundary_purities.push(a.purity());
        t0 += c.duration;
    }

    if bath.is_empty() {
        samples.push(Sample::from_tensor(0.0, &product_tensor(&a, &BlochVector::ZERO)));
    }

    Ok(CollisionRun { trajectory: Trajectory { samples }, final_state: bloch_to_density(&a), boundary_purities })
}

/// Same history as [`simulate_collisions_full`], computed as the composition
/// of one separable map per collision.
pub fn simulate_collisions_maps(rho_a: &QubitDensity, bath: &BathSpec) -> QubitDensity {
    let mut t0 = 0.0;
    let maps: Vec<_> = bath
        .collisions()
        .iter()
        .map(|c| {
            let m = build_map_separable(&c.environment, &c.coupling, c.duration).with_interval(t0, t0 + c.duration);
            t0 += c.duration;
            m
        })
        .collect();
    match compose_maps(&maps) {
        Ok(total) => apply_map(&total, rho_a),
        Err(_) => *rho_a,
    }
}
