//! Seeded scenario generation for property suites and the oracle check.
//!
//! Every generator draws from a ChaCha8 stream, so a seed fully determines
//! the sequence of states, couplings and times on every platform.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp, StandardNormal};

use crate::evolution::CanonicalCoupling;
use crate::linalg::{Matrix4, Real3};
use crate::pauli::{density_to_tensor, product_tensor, BlochVector, CoefficientTensor};

#[derive(Clone, Debug)]
pub struct ScenarioRng {
    seed: u64,
    rng: ChaCha8Rng,
}

impl ScenarioRng {
    pub fn new(seed: u64) -> Self {
        ScenarioRng { seed, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.rng.random::<f64>()
    }

    fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Exponentially distributed with the given mean; `0` for a zero mean.
    pub fn exponential(&mut self, mean: f64) -> f64 {
        match Exp::new(1.0 / mean) {
            Ok(d) if mean > 0.0 => self.rng.sample(d),
            _ => 0.0,
        }
    }

    /// Uniform unit vector.
    pub fn unit_vector(&mut self) -> [f64; 3] {
        loop {
            let v = [self.normal(), self.normal(), self.normal()];
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > 1e-9 {
                return v.map(|x| x / n);
            }
        }
    }

    /// Uniform point in the ball of radius `max_norm`.
    pub fn bloch(&mut self, max_norm: f64) -> BlochVector {
        let r = max_norm * self.rng.random::<f64>().cbrt();
        BlochVector(self.unit_vector().map(|x| r * x))
    }

    /// Uniform point on the Bloch sphere.
    pub fn pure_bloch(&mut self) -> BlochVector {
        BlochVector(self.unit_vector())
    }

    /// Each `γ_i` uniform in `[-range, range]`.
    pub fn coupling(&mut self, range: f64) -> CanonicalCoupling {
        CanonicalCoupling::new(self.uniform(-range, range), self.uniform(-range, range), self.uniform(-range, range))
    }

    /// Haar-distributed pure two-qubit state vector.
    pub fn state_vector(&mut self) -> [Complex64; 4] {
        let mut v: [Complex64; 4] = std::array::from_fn(|_| Complex64::new(0.0, 0.0));
        for x in v.iter_mut() {
            *x = Complex64::new(self.normal(), self.normal());
        }
        let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        v.map(|x| x / n)
    }

    /// Random globally pure coefficient tensor.
    pub fn pure_tensor(&mut self) -> CoefficientTensor {
        let v = self.state_vector();
        density_to_tensor(&projector(&v)).expect("projector has unit trace")
    }

    /// Random physical tensor: either a product of two Bloch-ball states or a
    /// mixture `p|v⟩⟨v| + (1 − p)|w⟩⟨w|` of two random pure states.
    pub fn physical_tensor(&mut self) -> CoefficientTensor {
        if self.rng.random::<f64>() < 0.25 {
            let (a, b) = (self.bloch(1.0), self.bloch(1.0));
            return product_tensor(&a, &b);
        }
        let p = self.rng.random::<f64>();
        let v = projector(&self.state_vector());
        let w = projector(&self.state_vector());
        let m = v.scale(Complex64::new(p, 0.0)) + w.scale(Complex64::new(1.0 - p, 0.0));
        density_to_tensor(&m).expect("mixture has unit trace")
    }

    /// Random proper rotation from a uniform axis and angle.
    pub fn rotation(&mut self) -> Real3 {
        let axis = self.unit_vector();
        let angle = self.uniform(0.0, std::f64::consts::TAU);
        rotation_about(axis, angle)
    }
}

/// `|v⟩⟨v|`.
pub fn projector(v: &[Complex64; 4]) -> Matrix4 {
    let mut m = Matrix4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            m.0[i][j] = v[i] * v[j].conj();
        }
    }
    m
}

/// Rodrigues rotation matrix about a unit axis.
pub fn rotation_about(axis: [f64; 3], angle: f64) -> Real3 {
    let [x, y, z] = axis;
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    [
        [c + x * x * t, x * y * t - z * s, x * z * t + y * s],
        [y * x * t + z * s, c + y * y * t, y * z * t - x * s],
        [z * x * t - y * s, z * y * t + x * s, c + z * z * t],
    ]
}
