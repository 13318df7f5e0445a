//! Time series of two-qubit state summaries.

use crate::pauli::{purity_global, purity_qubit, reduced_bloch, BlochVector, CoefficientTensor, Side};

/// Global purity must be within this of 1 for the linear-entropy
/// entanglement column to be defined.
pub const PURE_STATE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub bloch_a: BlochVector,
    pub bloch_b: BlochVector,
    pub purity_a: f64,
    pub purity_b: f64,
    /// `1 − P^A`, present only while the pair is globally pure.
    pub entanglement: Option<f64>,
    pub global_purity: f64,
}

impl Sample {
    pub fn from_tensor(t: f64, e: &CoefficientTensor) -> Self {
        let bloch_a = reduced_bloch(e, Side::A);
        let bloch_b = reduced_bloch(e, Side::B);
        let purity_a = purity_qubit(&bloch_a);
        let global_purity = purity_global(e);
        let entanglement = ((global_purity - 1.0).abs() <= PURE_STATE_TOL).then_some(1.0 - purity_a);
        Sample { t, bloch_a, bloch_b, purity_a, purity_b: purity_qubit(&bloch_b), entanglement, global_purity }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Sample> {
        self.samples.iter()
    }

    /// Times strictly increasing, purities in range.
    pub fn check_invariants(&self) -> bool {
        let eps = 1e-12;
        self.samples.windows(2).all(|w| w[1].t > w[0].t)
            && self.samples.iter().all(|s| {
                (0.5 - eps..=1.0 + eps).contains(&s.purity_a)
                    && (0.5 - eps..=1.0 + eps).contains(&s.purity_b)
                    && (0.25 - eps..=1.0 + eps).contains(&s.global_purity)
            })
    }
}

impl<'a> IntoIterator for &'a Trajectory {
    type Item = &'a Sample;
    type IntoIter = std::slice::Iter<'a, Sample>;
    fn into_iter(self) -> Self::IntoIter {
        self.samples.iter()
    }
}

/// Number of grid points `k·dt` with `k·dt ≤ t_max`, i.e. `⌊t_max/dt⌋ + 1`.
///
/// A relative slack of 1e-9 keeps `t_max = n·dt` from losing its last point
/// to round-off.
pub fn grid_len(t_max: f64, dt: f64) -> usize {
    if t_max <= 0.0 {
        return 1;
    }
    (t_max / dt + 1e-9).floor() as usize + 1
}
