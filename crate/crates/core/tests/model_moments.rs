//! Monte-Carlo checks of the samplers against their population moments.

use spca_core::estimators::pca_first;
use spca_core::model::rng::replication_seed;
use spca_core::model::{
    build_eigensystem, failure_probability, sample_counterexample, sample_gaussian, CounterexampleModel,
    SpikedSpec,
};

#[test]
fn spike_coordinate_variance_matches_population() {
    // d=200, n=25, α=1, β=0: Var(x_1) = d^α = 200.
    let sys = build_eigensystem(SpikedSpec::new(200, 25, 1.0, 0.0).unwrap());
    let mut sum_sq = 0.0;
    let mut count = 0.0;
    for rep in 0..500 {
        let x = sample_gaussian(&sys, replication_seed(1, 0, rep));
        sum_sq += x.row(0).iter().map(|v| v * v).sum::<f64>();
        count += 25.0;
    }
    let var = sum_sq / count;
    assert!((var - 200.0).abs() <= 0.2 * 200.0, "variance {var}");
    // the tighter check a correct sampler should meet: 4 standard errors
    let se = 200.0 * (2.0 / count).sqrt();
    assert!((var - 200.0).abs() <= 4.0 * se, "variance {var}, se {se}");
}

#[test]
fn pooled_covariance_matches_population_structure() {
    let d = 24;
    let spec = SpikedSpec::new(d, 25, 0.8, 0.7).unwrap();
    let sys = build_eigensystem(spec);
    let mut cov = vec![0.0; d * d];
    let mut samples = 0.0;
    for rep in 0..400 {
        let x = sample_gaussian(&sys, replication_seed(2, 0, rep));
        for t in 0..25 {
            for i in 0..d {
                for j in 0..d {
                    cov[i * d + j] += x.get(i, t) * x.get(j, t);
                }
            }
        }
        samples += 25.0;
    }
    cov.iter_mut().for_each(|c| *c /= samples);
    // population: d^α u1 u1ᵀ + (I - u1 u1ᵀ)
    let u1 = sys.u1();
    let spike = spec.spike();
    let mut max_err: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let pop = (spike - 1.0) * u1[i] * u1[j] + if i == j { 1.0 } else { 0.0 };
            max_err = max_err.max((cov[i * d + j] - pop).abs());
        }
    }
    assert!(max_err < 0.15, "max entry error {max_err}");
}

#[test]
fn no_spike_gives_near_identity_covariance() {
    let d = 20;
    let sys = build_eigensystem(SpikedSpec::new(d, 25, 0.0, 0.5).unwrap());
    let mut cov = vec![0.0; d * d];
    let mut samples = 0.0;
    for rep in 0..400 {
        let x = sample_gaussian(&sys, replication_seed(3, 0, rep));
        for t in 0..25 {
            for i in 0..d {
                for j in 0..d {
                    cov[i * d + j] += x.get(i, t) * x.get(j, t);
                }
            }
        }
        samples += 25.0;
    }
    cov.iter_mut().for_each(|c| *c /= samples);
    let m = spca_core::spectral::SymMatrix::from_upper(d, |i, j| 0.5 * (cov[i * d + j] + cov[j * d + i])).unwrap();
    let eig = spca_core::spectral::sym_eigen(&m).unwrap();
    for p in &eig {
        assert!((0.85..=1.15).contains(&p.value), "eigenvalue {}", p.value);
    }
}

#[test]
fn counterexample_moments() {
    let (d, alpha) = (100, 0.5);
    let model = CounterexampleModel::new(d, alpha).unwrap();
    let x = sample_counterexample(d, alpha, 10_000, 5).unwrap();
    let n = 10_000.0;
    for i in [0usize, 1, 50, 99] {
        let mean = x.row(i).iter().sum::<f64>() / n;
        let second = x.row(i).iter().map(|v| v * v).sum::<f64>() / n;
        let expected_second = if i == 0 { model.spike_level().powi(2) } else { 2.0 };
        let se = (expected_second / n).sqrt();
        assert!(mean.abs() <= 4.0 * se, "coordinate {i}: mean {mean}");
        if i == 0 {
            assert!((second - 10.0).abs() < 1e-9);
        }
    }
    // pooled second moment of the noise coordinates is 2, not 1
    let pooled: f64 = (1..d).map(|i| x.row(i).iter().map(|v| v * v).sum::<f64>()).sum::<f64>() / (n * (d - 1) as f64);
    let level4 = model.noise_level().powi(4);
    let se = ((level4 * 2.0 * model.noise_probability() - 4.0) / (n * (d - 1) as f64)).sqrt();
    assert!((pooled - 2.0).abs() <= 4.0 * se, "pooled second moment {pooled}");
}

#[test]
fn single_sample_argmax_frequency_matches_failure_probability() {
    let (d, alpha, reps) = (100, 0.5, 10_000u64);
    let mut hits = 0u64;
    for rep in 0..reps {
        let x = sample_counterexample(d, alpha, 1, replication_seed(6, 0, rep)).unwrap();
        let u = pca_first(&x).unwrap();
        let argmax = u
            .entries()
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |acc, (i, v)| if v.abs() > acc.1 { (i, v.abs()) } else { acc })
            .0;
        hits += (argmax == 0) as u64;
    }
    let p = failure_probability(d, alpha);
    let freq = hits as f64 / reps as f64;
    let se = (p * (1.0 - p) / reps as f64).sqrt();
    assert!((freq - p).abs() <= 3.0 * se, "freq {freq}, p {p}, se {se}");
}
