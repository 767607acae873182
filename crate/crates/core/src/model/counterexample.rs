//! A discrete, non-Gaussian model on which thresholding cannot locate the
//! spike coordinate.
//!
//! Coordinates are independent. The first is `±d^{α/2}` with probability 1/2
//! each. Every other coordinate is `±d^{(α+1)/4}` with probability
//! `d^{-(α+1)/2}` each and 0 otherwise, so its second moment is
//! `2 d^{(α+1)/2} d^{-(α+1)/2} = 2`. The noise coordinates are therefore twice
//! as variable as a unit-variance noise model; the failure probability below
//! does not depend on that constant.

use rand::Rng;

use super::rng;
use crate::data::{DataMatrix, Provenance};
use crate::error::{Result, SpcaError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CounterexampleModel {
    pub d: usize,
    pub alpha: f64,
}

impl CounterexampleModel {
    pub fn new(d: usize, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(SpcaError::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        if d == 0 {
            return Err(SpcaError::Domain("d must be positive".into()));
        }
        Ok(Self { d, alpha })
    }

    /// Magnitude of the first coordinate, `d^{α/2}`.
    pub fn spike_level(&self) -> f64 {
        (self.d as f64).powf(self.alpha / 2.0)
    }

    /// Magnitude of a non-zero noise coordinate, `d^{(α+1)/4}`.
    pub fn noise_level(&self) -> f64 {
        (self.d as f64).powf((self.alpha + 1.0) / 4.0)
    }

    /// Probability of each signed non-zero noise value, `d^{-(α+1)/2}`.
    pub fn noise_probability(&self) -> f64 {
        (self.d as f64).powf(-(self.alpha + 1.0) / 2.0)
    }

    /// Second moment of a noise coordinate; equals 2 for every d and α.
    pub fn noise_second_moment(&self) -> f64 {
        2.0 * self.noise_level().powi(2) * self.noise_probability()
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> DataMatrix {
        let (spike, level, p) = (self.spike_level(), self.noise_level(), self.noise_probability());
        let mut values = Vec::with_capacity(self.d * n);
        for _ in 0..n {
            values.push(if rng.random::<bool>() { spike } else { -spike });
        }
        for _ in 1..self.d {
            for _ in 0..n {
                let u: f64 = rng.random();
                values.push(if u < p {
                    level
                } else if u < 2.0 * p {
                    -level
                } else {
                    0.0
                });
            }
        }
        DataMatrix::from_row_major(self.d, n, values).expect("values are finite")
    }
}

/// Draws n independent columns from the discrete model.
pub fn sample_counterexample(d: usize, alpha: f64, n: usize, seed: u64) -> Result<DataMatrix> {
    if n == 0 {
        return Err(SpcaError::Domain("n must be positive".into()));
    }
    let model = CounterexampleModel::new(d, alpha)?;
    let mut rng = rng::seeded_rng(seed, rng::DISCRETE_STREAM);
    Ok(model.sample_with(n, &mut rng).with_provenance(Provenance {
        model: format!("counterexample(d={d},alpha={alpha})"),
        seed,
        replication: 0,
    }))
}

/// Probability that every noise coordinate is zero, which for n = 1 is the
/// probability that the first sample-eigenvector entry has the largest
/// magnitude: `(1 - 2 d^{-(α+1)/2})^{d-1}`.
///
/// Meant for `α ∈ (0, 1)` and `d ≥ 2`.
pub fn failure_probability(d: usize, alpha: f64) -> f64 {
    let d = d as f64;
    (1.0 - 2.0 * d.powf(-(alpha + 1.0) / 2.0)).powf(d - 1.0)
}
