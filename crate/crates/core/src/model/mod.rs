//! Population models and samplers.
//!
//! The default model is the single-spike Gaussian model with eigenvalues
//! `(d^α, 1, …, 1)` whose leading eigenvector has `⌊d^β⌋` equal non-zero
//! loadings. The remaining eigenvectors inside the support are Helmert-type
//! contrasts `(1, …, 1, -(i-1), 0, …, 0)` and the tail is the standard basis.
//! The basis is never materialized as a d x d matrix: the sampler uses suffix
//! sums over the Helmert block and plain Gaussian noise for the tail.
//!
//! Normal variates come from `rand_distr::StandardNormal` (ziggurat method)
//! driven by a ChaCha8 generator, see [`rng`].

mod counterexample;
pub mod rng;

pub use counterexample::{failure_probability, sample_counterexample, CounterexampleModel};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::data::{DataMatrix, Provenance};
use crate::error::{Result, SpcaError};

/// Parameters of the single-spike model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpikedSpec {
    pub d: usize,
    pub n: usize,
    /// Spike index: the leading eigenvalue is `d^alpha`.
    pub alpha: f64,
    /// Sparsity index: the leading eigenvector has `⌊d^beta⌋` non-zeros.
    pub beta: f64,
    /// Second-eigenvalue index. Always 0 for the built-in construction.
    pub theta: f64,
    /// Minimum-loading index: `max |u_i1|^{-1} = d^{eta/2}` over the support.
    pub eta: f64,
}

impl SpikedSpec {
    pub fn new(d: usize, n: usize, alpha: f64, beta: f64) -> Result<Self> {
        if d == 0 || n == 0 {
            return Err(SpcaError::Domain(format!("d and n must be positive, got d={d}, n={n}")));
        }
        if !(0.0..=1.5).contains(&alpha) {
            return Err(SpcaError::Domain(format!("alpha must lie in [0, 1.5], got {alpha}")));
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(SpcaError::Domain(format!("beta must lie in [0, 1], got {beta}")));
        }
        let k = support_size(d, beta);
        let eta = if d > 1 { (k as f64).ln() / (d as f64).ln() } else { 0.0 };
        Ok(Self {
            d,
            n,
            alpha,
            beta,
            theta: 0.0,
            eta,
        })
    }

    /// `⌊d^β⌋`.
    pub fn support_size(&self) -> usize {
        support_size(self.d, self.beta)
    }

    /// Leading eigenvalue `d^α`.
    pub fn spike(&self) -> f64 {
        (self.d as f64).powf(self.alpha)
    }
}

/// `⌊d^β⌋`, robust to `powf` landing a hair below an exact integer.
pub fn support_size(d: usize, beta: f64) -> usize {
    let r = (d as f64).powf(beta);
    let k = (r + 1e-9 * r.max(1.0)).floor() as usize;
    k.clamp(1, d)
}

/// The population eigensystem of the single-spike model, described procedurally.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    spec: SpikedSpec,
    support: usize,
}

pub fn build_eigensystem(spec: SpikedSpec) -> EigenSystem {
    EigenSystem {
        support: spec.support_size(),
        spec,
    }
}

impl EigenSystem {
    pub fn spec(&self) -> &SpikedSpec {
        &self.spec
    }

    /// Indices of the non-zero entries of `u1`: `0..⌊d^β⌋`.
    pub fn u1_support(&self) -> Vec<usize> {
        (0..self.support).collect()
    }

    pub fn support_size(&self) -> usize {
        self.support
    }

    /// Population eigenvalues, descending: `(d^α, 1, …, 1)`.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev = vec![1.0; self.spec.d];
        ev[0] = self.spec.spike();
        ev
    }

    /// `Σ λ_i = d^α + d - 1`.
    pub fn trace(&self) -> f64 {
        self.spec.spike() + (self.spec.d - 1) as f64
    }

    pub fn u1(&self) -> Vec<f64> {
        self.eigenvector(0)
    }

    /// The `index`-th population eigenvector (0-based).
    pub fn eigenvector(&self, index: usize) -> Vec<f64> {
        let d = self.spec.d;
        assert!(index < d, "eigenvector index {index} out of range for d={d}");
        let k = self.support;
        let mut u = vec![0.0; d];
        if index == 0 {
            let w = 1.0 / (k as f64).sqrt();
            u[..k].iter_mut().for_each(|x| *x = w);
        } else if index < k {
            let m = index as f64;
            let c = helmert_scale(index);
            u[..index].iter_mut().for_each(|x| *x = c);
            u[index] = -m * c;
        } else {
            u[index] = 1.0;
        }
        u
    }
}

/// `1 / sqrt(m (m + 1))`, the normalizer of the m-th Helmert contrast.
fn helmert_scale(m: usize) -> f64 {
    let m = m as f64;
    1.0 / (m * (m + 1.0)).sqrt()
}

/// Draws `X = d^{α/2} u1 z1ᵀ + Σ_{i≥2} u_i z_iᵀ` with `z_i ~ N(0, I_n)`.
pub fn sample_gaussian(sys: &EigenSystem, seed: u64) -> DataMatrix {
    let mut rng = rng::seeded_rng(seed, rng::GAUSSIAN_STREAM);
    sample_gaussian_with(sys, &mut rng).with_provenance(Provenance {
        model: model_id(sys.spec()),
        seed,
        replication: 0,
    })
}

/// Same as [`sample_gaussian`] with a caller-supplied generator.
///
/// The `z_i` are drawn in order `i = 1, …, d`, each as n consecutive normals.
pub fn sample_gaussian_with<R: Rng + ?Sized>(sys: &EigenSystem, rng: &mut R) -> DataMatrix {
    let SpikedSpec { d, n, .. } = sys.spec;
    let k = sys.support;
    let mut z = vec![0.0; d * n];
    z.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));

    let spike = sys.spec.spike().sqrt() / (k as f64).sqrt();
    let mut x = z.clone();
    // Helmert block: row j receives Σ_{m>j} c_m z_m - j c_j z_j.
    let mut suffix = vec![0.0; n];
    for j in (0..k).rev() {
        let row = &mut x[j * n..(j + 1) * n];
        let zj = &z[j * n..(j + 1) * n];
        let z0 = &z[..n];
        if j == 0 {
            for t in 0..n {
                row[t] = spike * z0[t] + suffix[t];
            }
        } else {
            let c = helmert_scale(j);
            for t in 0..n {
                row[t] = spike * z0[t] + suffix[t] - j as f64 * c * zj[t];
                suffix[t] += c * zj[t];
            }
        }
    }
    DataMatrix::from_row_major(d, n, x).expect("sampled values are finite")
}

fn model_id(spec: &SpikedSpec) -> String {
    format!("spiked(d={},n={},alpha={},beta={})", spec.d, spec.n, spec.alpha, spec.beta)
}

/// A single spike along an arbitrary unit direction over isotropic noise:
/// covariance `λ1 u1 u1ᵀ + (I - u1 u1ᵀ)`.
///
/// This is the hook for models outside the built-in construction, for
/// instance unequal non-zero loadings.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralSpike {
    u1: Vec<f64>,
    lambda1: f64,
    n: usize,
}

impl GeneralSpike {
    pub fn new(u1: Vec<f64>, lambda1: f64, n: usize) -> Result<Self> {
        let norm = crate::data::l2_norm(&u1);
        if norm == 0.0 || !norm.is_finite() {
            return Err(SpcaError::Domain("u1 must be a finite non-zero vector".into()));
        }
        if !(lambda1 >= 0.0) || n == 0 {
            return Err(SpcaError::Domain(format!(
                "need lambda1 >= 0 and n > 0, got lambda1={lambda1}, n={n}"
            )));
        }
        Ok(Self {
            u1: u1.into_iter().map(|v| v / norm).collect(),
            lambda1,
            n,
        })
    }

    pub fn u1(&self) -> &[f64] {
        &self.u1
    }

    pub fn u1_support(&self) -> Vec<usize> {
        (0..self.u1.len()).filter(|&i| self.u1[i] != 0.0).collect()
    }

    /// `X = Z + (sqrt(λ1) - 1) u1 (u1ᵀ Z)` with Z standard normal.
    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R) -> DataMatrix {
        let (d, n) = (self.u1.len(), self.n);
        let mut x: Vec<f64> = (0..d * n).map(|_| rng.sample(StandardNormal)).collect();
        let mut proj = vec![0.0; n];
        for (i, &ui) in self.u1.iter().enumerate() {
            for t in 0..n {
                proj[t] += ui * x[i * n + t];
            }
        }
        let c = self.lambda1.sqrt() - 1.0;
        for (i, &ui) in self.u1.iter().enumerate() {
            for t in 0..n {
                x[i * n + t] += c * ui * proj[t];
            }
        }
        DataMatrix::from_row_major(d, n, x).expect("sampled values are finite")
    }
}

/// Sphericity of a spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphericity {
    /// `ε = (Σλ)² / (d Σλ²)`, in `(0, 1]`.
    pub epsilon: f64,
    /// `(d ε)^{-1} = Σλ² / (Σλ)²`; it must vanish as d grows for the dual
    /// covariance to concentrate.
    pub inverse_d_epsilon: f64,
}

pub fn sphericity(eigenvalues: &[f64]) -> Result<Sphericity> {
    if eigenvalues.is_empty() {
        return Err(SpcaError::Degenerate("empty spectrum".into()));
    }
    if eigenvalues.iter().any(|&l| !(l >= 0.0) || !l.is_finite()) {
        return Err(SpcaError::Domain("eigenvalues must be finite and non-negative".into()));
    }
    let sum: f64 = eigenvalues.iter().sum();
    let sum_sq: f64 = eigenvalues.iter().map(|l| l * l).sum();
    if sum == 0.0 {
        return Err(SpcaError::Degenerate("all eigenvalues are zero".into()));
    }
    let inverse_d_epsilon = sum_sq / (sum * sum);
    Ok(Sphericity {
        epsilon: 1.0 / (eigenvalues.len() as f64 * inverse_d_epsilon),
        inverse_d_epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::dot;

    #[test]
    fn small_construction_matches_closed_form() {
        let sys = build_eigensystem(SpikedSpec::new(4, 3, 0.5, 0.5).unwrap());
        let r = 1.0 / 2f64.sqrt();
        assert_eq!(sys.support_size(), 2);
        assert_eq!(sys.u1(), vec![r, r, 0.0, 0.0]);
        let u2 = sys.eigenvector(1);
        assert!((u2[0] - r).abs() < 1e-15 && (u2[1] + r).abs() < 1e-15);
        assert_eq!(&u2[2..], &[0.0, 0.0]);
        assert_eq!(sys.eigenvector(2), vec![0.0, 0.0, 1.0, 0.0]);
        assert_eq!(sys.eigenvector(3), vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(sys.eigenvalues(), vec![2.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn beta_zero_gives_first_basis_vector() {
        let sys = build_eigensystem(SpikedSpec::new(7, 3, 0.4, 0.0).unwrap());
        let mut e1 = vec![0.0; 7];
        e1[0] = 1.0;
        assert_eq!(sys.u1(), e1);
    }

    #[test]
    fn support_size_handles_exact_powers() {
        assert_eq!(support_size(10_000, 0.5), 100);
        assert_eq!(support_size(10_000, 0.25), 10);
        assert_eq!(support_size(2_000, 0.7), 204);
        assert_eq!(support_size(5, 1.0), 5);
        assert_eq!(support_size(5, 0.0), 1);
    }

    #[test]
    fn materialized_support_basis_is_orthonormal() {
        for (d, beta) in [(50, 1.0), (300, 0.7), (1000, 0.5)] {
            let sys = build_eigensystem(SpikedSpec::new(d, 2, 0.3, beta).unwrap());
            let k = sys.support_size();
            let basis: Vec<Vec<f64>> = (0..k).map(|i| sys.eigenvector(i)).collect();
            for i in 0..k {
                for j in 0..k {
                    let g = dot(&basis[i], &basis[j]);
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert!((g - e).abs() <= 1e-12, "gram({i},{j}) = {g}");
                }
            }
        }
    }

    #[test]
    fn u1_loadings_are_exact() {
        let sys = build_eigensystem(SpikedSpec::new(1000, 2, 0.3, 0.5).unwrap());
        let k = sys.support_size();
        let w = 1.0 / (k as f64).sqrt();
        let u1 = sys.u1();
        assert!(u1[..k].iter().all(|&v| v == w));
        assert!(u1[k..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn trace_is_spike_plus_d_minus_one() {
        let sys = build_eigensystem(SpikedSpec::new(2000, 2, 0.6, 0.1).unwrap());
        let sum: f64 = sys.eigenvalues().iter().sum();
        assert!((sum - sys.trace()).abs() <= 1e-12 * sys.trace());
        assert_eq!(sys.trace(), 2000f64.powf(0.6) + 1999.0);
    }

    #[test]
    fn sampler_agrees_with_dense_basis() {
        // Rebuild X from materialized eigenvectors and the same normals.
        let spec = SpikedSpec::new(40, 4, 0.7, 0.8).unwrap();
        let sys = build_eigensystem(spec);
        let x = sample_gaussian(&sys, 11);
        let mut rng = rng::seeded_rng(11, rng::GAUSSIAN_STREAM);
        let z: Vec<f64> = (0..40 * 4).map(|_| rng.sample(StandardNormal)).collect();
        let mut dense = vec![0.0; 40 * 4];
        for i in 0..40 {
            let u = sys.eigenvector(i);
            let scale = if i == 0 { spec.spike().sqrt() } else { 1.0 };
            for r in 0..40 {
                for t in 0..4 {
                    dense[r * 4 + t] += scale * u[r] * z[i * 4 + t];
                }
            }
        }
        for (a, b) in x.as_row_major().iter().zip(&dense) {
            assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let sys = build_eigensystem(SpikedSpec::new(300, 5, 0.6, 0.3).unwrap());
        let a = sample_gaussian(&sys, 99);
        let b = sample_gaussian(&sys, 99);
        assert_eq!(a, b);
        assert_ne!(a, sample_gaussian(&sys, 100));
        assert_eq!(a.provenance().seed, 99);
    }

    #[test]
    fn general_spike_hook_rejects_zero_direction() {
        assert!(GeneralSpike::new(vec![0.0; 3], 2.0, 4).is_err());
        let g = GeneralSpike::new(vec![3.0, 0.0, 4.0], 2.0, 4).unwrap();
        assert_eq!(g.u1(), &[0.6, 0.0, 0.8]);
        assert_eq!(g.u1_support(), vec![0, 2]);
    }

    #[test]
    fn sphericity_cases() {
        let iso = sphericity(&[1.0; 6]).unwrap();
        assert!((iso.epsilon - 1.0).abs() < 1e-15);
        let s = sphericity(&[2.0, 1.0, 1.0, 1.0]).unwrap();
        assert!((s.epsilon - 25.0 / 28.0).abs() < 1e-15);
        assert!((s.inverse_d_epsilon - 7.0 / 25.0).abs() < 1e-15);
        assert!(matches!(sphericity(&[0.0, 0.0]), Err(SpcaError::Degenerate(_))));
        assert!(sphericity(&[]).is_err());
    }

    #[test]
    fn epsilon_condition_holds_for_sublinear_spike() {
        let stats: Vec<f64> = [100usize, 1000, 10_000]
            .iter()
            .map(|&d| {
                let sys = build_eigensystem(SpikedSpec::new(d, 2, 0.6, 0.0).unwrap());
                sphericity(&sys.eigenvalues()).unwrap().inverse_d_epsilon
            })
            .collect();
        assert!(stats[0] > stats[1] && stats[1] > stats[2]);
        assert!(stats[2] < 2e-3);
    }
}
