use num_complex::Complex64;
use pauliflow::linalg::{hermitian_eigen, Matrix4};
use pauliflow::{
    bloch_to_density, density_to_bloch, density_to_tensor, is_physical, purity_global, purity_qubit, swap_subsystems,
    tensor_to_density, BlochVector, ScenarioRng,
};
use proptest::prelude::*;

fn bloch_strategy() -> impl Strategy<Value = BlochVector> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, 0.0f64..=1.0).prop_map(|(x, y, z, r)| {
        let n = (x * x + y * y + z * z).sqrt().max(1e-12);
        BlochVector::new(r * x / n, r * y / n, r * z / n)
    })
}

proptest! {
    #[test]
    fn bloch_density_round_trip(a in bloch_strategy()) {
        let back = density_to_bloch(bloch_to_density(&a).matrix()).unwrap();
        prop_assert!(back.max_abs_diff(&a) < 1e-14);
        let p = purity_qubit(&a);
        prop_assert!((0.5..=1.0 + 1e-15).contains(&p));
    }

    #[test]
    fn tensor_density_round_trip(seed in any::<u64>()) {
        let e = ScenarioRng::new(seed).physical_tensor();
        let back = density_to_tensor(&tensor_to_density(&e)).unwrap();
        prop_assert!(back.max_abs_diff(&e) < 1e-14);
        let p = purity_global(&e);
        prop_assert!((0.25 - 1e-12..=1.0 + 1e-12).contains(&p));
    }

    #[test]
    fn swap_keeps_purity_and_physicality(seed in any::<u64>()) {
        let e = ScenarioRng::new(seed).physical_tensor();
        let s = swap_subsystems(&e);
        prop_assert!((purity_global(&s) - purity_global(&e)).abs() < 1e-14);
        prop_assert!(is_physical(&s));
        prop_assert_eq!(swap_subsystems(&s), e);
    }

    #[test]
    fn eigen_decomposition_residuals(entries in prop::collection::vec(-2.0f64..2.0, 16)) {
        let mut m = Matrix4::zeros();
        for i in 0..4 {
            m.0[i][i] = Complex64::new(entries[4 * i + i], 0.0);
            for j in i + 1..4 {
                let z = Complex64::new(entries[4 * i + j], entries[4 * j + i]);
                m.0[i][j] = z;
                m.0[j][i] = z.conj();
            }
        }
        let eig = hermitian_eigen(&m).unwrap();
        let sum: f64 = eig.values.iter().sum();
        prop_assert!((sum - m.trace().re).abs() < 1e-10);
        for k in 0..4 {
            let v = eig.vectors.column(k);
            let mv = m.apply(&v);
            for i in 0..4 {
                prop_assert!((mv[i] - v[i] * eig.values[k]).norm() < 1e-9);
            }
        }
    }
}

#[test]
fn coefficient_purity_matches_matrix_trace() {
    let mut rng = ScenarioRng::new(51);
    for _ in 0..1000 {
        let e = rng.physical_tensor();
        let m = tensor_to_density(&e);
        let tr = (m * m).trace().re;
        assert!((purity_global(&e) - tr).abs() < 1e-12);
    }
}
