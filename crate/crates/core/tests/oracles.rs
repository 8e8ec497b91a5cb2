//! Library results against independently coded reference computations.

mod common;

use common::*;
use num_complex::Complex64 as C;
use proptest::prelude::*;

use qbath::bath::bath_correlation;
use qbath::dynamics::{propagate, HierarchyConfig, Method};
use qbath::metrics::{pairwise_concurrence, qfi, two_qubit_concurrence};
use qbath::{build_fmo_system, BathSpec, DensityMatrix};

// ---------------------------------------------------------------- C(t)

#[test]
fn correlation_matches_quadrature() {
    for bath in [BathSpec::fmo_default(), BathSpec::drude_only(35.0, 50.0, 77.0).unwrap()] {
        let mut worst: f64 = 0.0;
        for t in [5.0, 10.0, 25.0, 50.0, 100.0, 200.0, 350.0, 500.0, 750.0, 1000.0] {
            let lib = bath_correlation(t, &bath, 12).unwrap();
            let oracle = correlation_quadrature(t, &bath);
            let rel = (lib - oracle).norm() / oracle.norm();
            worst = worst.max(rel);
            assert!(rel < 1e-3, "T={} t={t}: {lib} vs {oracle} ({rel:.2e})", bath.temperature());
        }
        eprintln!("C(t) worst relative deviation at T={}: {worst:.2e}", bath.temperature());
    }
}

// -------------------------------------------------- closed-system dynamics

#[test]
fn closed_system_matches_matrix_exponential() {
    let sys = build_fmo_system();
    let h = sys.hamiltonian();
    let bath = BathSpec::drude_only(0.0, 50.0, 295.0).unwrap();
    let rho0 = DensityMatrix::pure_site(7, 0).unwrap();
    for method in [Method::Heom, Method::Redfield] {
        let traj = propagate(&sys, &bath, &rho0, 1000.0, &HierarchyConfig::default(), method, None).unwrap();
        let mut worst: f64 = 0.0;
        for (t, s) in traj.times().iter().zip(traj.states()) {
            let u = exact_unitary(&h, *t);
            let exact = &u * rho0.matrix() * u.adjoint();
            let diff = (s.matrix() - exact).iter().fold(0.0_f64, |m, z| m.max(z.norm()));
            worst = worst.max(diff);
        }
        assert!(worst < 1e-6, "{method}: max element deviation {worst:.2e}");
    }
}

// -------------------------------------------------------------------- QFI

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn qfi_matches_bures_finite_difference(seed in prop::collection::vec(-1.0f64..1.0, 64), d in 2usize..5) {
        let rho = random_state(d, &seed);
        let g = random_hermitian(d, &seed);
        let lib = qfi(&DensityMatrix::new(rho.clone()).unwrap(), &g).unwrap();
        let fd = qfi_finite_difference(&rho, &g);
        prop_assert!((lib - fd).abs() < 1e-6 * lib.max(1.0), "lib {} fd {}", lib, fd);
    }

    #[test]
    fn concurrence_matches_wootters(seed in prop::collection::vec(-1.0f64..1.0, 64)) {
        let rho = random_state(4, &seed);
        let lib = two_qubit_concurrence(&rho).unwrap();
        let oracle = wootters(&rho);
        prop_assert!((lib - oracle).abs() < 1e-8, "lib {} oracle {}", lib, oracle);
    }
}

#[test]
fn qfi_pure_state_is_four_times_variance() {
    let psi = [C::new(0.6, 0.0), C::new(0.0, 0.8)];
    let rho = DensityMatrix::from_state_vector(&psi).unwrap();
    let g = CM::from_row_slice(2, 2, &[C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(-1.0, 0.0)]);
    // <Z> = 0.36 − 0.64, <Z²> = 1
    let var = 1.0 - (0.36f64 - 0.64).powi(2);
    assert!((qfi(&rho, &g).unwrap() - 4.0 * var).abs() < 1e-12);
}

// ------------------------------------------------------------- concurrence

#[test]
fn werner_state_concurrence() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let bell = DensityMatrix::from_state_vector(&[C::new(0.0, 0.0), C::new(h, 0.0), C::new(h, 0.0), C::new(0.0, 0.0)]).unwrap();
    for p in [0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0] {
        let rho = bell.matrix() * C::new(p, 0.0) + CM::identity(4, 4) * C::new((1.0 - p) / 4.0, 0.0);
        let expected = ((3.0 * p - 1.0) / 2.0).max(0.0);
        let lib = two_qubit_concurrence(&rho).unwrap();
        assert!((lib - expected).abs() < 1e-8, "p={p}: {lib} vs {expected}");
        assert!((wootters(&rho) - expected).abs() < 1e-8);
    }
}

#[test]
fn single_excitation_pair_concurrence_is_twice_coherence() {
    let psi: Vec<C> = [0.5, 0.3, 0.4, 0.2, 0.1, 0.6, 0.3].iter().map(|&x| C::new(x, 0.1 * x)).collect();
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let psi: Vec<C> = psi.iter().map(|z| z / norm).collect();
    let rho = DensityMatrix::from_state_vector(&psi).unwrap();
    for (i, j) in [(0, 1), (2, 5), (3, 6)] {
        let c = pairwise_concurrence(&rho, i, j).unwrap();
        assert!((c - 2.0 * rho.get(i, j).norm()).abs() < 1e-8);
    }
}
