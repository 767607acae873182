//! The Jacobi eigensolver and the dual route, checked against independent oracles:
//! bisection on principal-minor sign changes for small matrices, and a
//! library eigensolver on the explicit d x d sample covariance.

use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;
use spca_core::model::rng::seeded_rng;
use spca_core::selection::angle_between;
use spca_core::spectral::{dual_covariance, dual_first_component, sym_eigen, SymMatrix};
use spca_core::DataMatrix;
use spca_oracles::eigen::{self, bisection_eigenvalues};

fn random_symmetric(order: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = seeded_rng(seed, 7);
    let mut m = vec![vec![0.0; order]; order];
    for i in 0..order {
        for j in i..order {
            let v: f64 = rng.sample(StandardNormal);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    m
}

fn random_data(d: usize, n: usize, seed: u64) -> DataMatrix {
    let mut rng = seeded_rng(seed, 9);
    let values = (0..d * n).map(|_| rng.sample(StandardNormal)).collect();
    DataMatrix::from_row_major(d, n, values).unwrap()
}

fn direct_leading_eigenvector(x: &DataMatrix) -> Vec<f64> {
    eigen::direct_leading_eigenvector(x.dim(), x.samples(), x.as_row_major())
}

#[test]
fn jacobi_matches_bisection_oracle_on_small_matrices() {
    for seed in 0..40 {
        for order in 1..=5 {
            let rows = random_symmetric(order, seed * 10 + order as u64);
            let m = SymMatrix::from_rows(&rows).unwrap();
            let pairs = sym_eigen(&m).unwrap();
            let oracle = bisection_eigenvalues(&rows);
            let scale = m.frobenius_norm();
            for (p, o) in pairs.iter().zip(&oracle) {
                assert!((p.value - o).abs() <= 1e-10 * scale.max(1.0), "seed {seed}: {} vs {o}", p.value);
                let mv = m.mul_vec(&p.vector);
                let resid: f64 = mv
                    .iter()
                    .zip(&p.vector)
                    .map(|(a, v)| (a - p.value * v).powi(2))
                    .sum::<f64>()
                    .sqrt();
                assert!(resid <= 1e-10 * scale.max(1.0), "residual {resid}");
            }
        }
    }
}

#[test]
fn dual_route_matches_direct_covariance_on_twenty_by_five() {
    let x = random_data(20, 5, 2024);
    let dual = dual_first_component(&x).unwrap();
    let direct = direct_leading_eigenvector(&x);
    let a = angle_between(&dual.u_tilde, &direct);
    assert!(a <= 1e-8, "angle {a} degrees");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dual_and_primal_agree(d in 1usize..=64, n in 1usize..=8, seed in any::<u64>()) {
        let d = d.max(n);
        let x = random_data(d, n, seed);
        let dual = dual_first_component(&x).unwrap();
        prop_assume!(!dual.ambiguous);
        let a = angle_between(&dual.u_tilde, &direct_leading_eigenvector(&x));
        prop_assert!(a <= 1e-8, "angle {} degrees", a);
    }

    #[test]
    fn dual_spectrum_is_non_negative_and_deterministic(d in 1usize..=40, n in 1usize..=8, seed in any::<u64>()) {
        let x = random_data(d, n, seed);
        let s = dual_covariance(&x);
        let pairs = sym_eigen(&s).unwrap();
        let floor = -1e-12 * s.frobenius_norm();
        prop_assert!(pairs.iter().all(|p| p.value >= floor));
        let again = sym_eigen(&s).unwrap();
        for (a, b) in pairs.iter().zip(&again) {
            prop_assert_eq!(a.value.to_bits(), b.value.to_bits());
            prop_assert!(a.vector.iter().zip(&b.vector).all(|(p, q)| p.to_bits() == q.to_bits()));
        }
    }
}
