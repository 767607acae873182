use std::fmt;
use std::str::FromStr;

use crate::error::{Result, SpcaError};

/// Default SCAD shape parameter.
pub const DEFAULT_SCAD_A: f64 = 3.7;

/// Sparsity-inducing penalty family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PenaltyFamily {
    Soft,
    Hard,
    Scad,
}

impl PenaltyFamily {
    pub fn as_str(&self) -> &'static str {
        match self {
            PenaltyFamily::Soft => "soft",
            PenaltyFamily::Hard => "hard",
            PenaltyFamily::Scad => "scad",
        }
    }
}

impl fmt::Display for PenaltyFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PenaltyFamily {
    type Err = SpcaError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "soft" | "l1" | "lasso" => Ok(PenaltyFamily::Soft),
            "hard" => Ok(PenaltyFamily::Hard),
            "scad" => Ok(PenaltyFamily::Scad),
            other => Err(SpcaError::Domain(format!("unknown penalty family '{other}'"))),
        }
    }
}

/// A penalty family together with its thresholding parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltySpec {
    pub family: PenaltyFamily,
    pub lambda: f64,
    /// SCAD shape; ignored by the other families.
    pub scad_a: f64,
}

impl PenaltySpec {
    pub fn new(family: PenaltyFamily, lambda: f64, scad_a: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(SpcaError::Domain(format!("lambda must be finite and >= 0, got {lambda}")));
        }
        if !(scad_a > 2.0) || !scad_a.is_finite() {
            return Err(SpcaError::Domain(format!("SCAD shape must exceed 2, got {scad_a}")));
        }
        Ok(Self {
            family,
            lambda,
            scad_a,
        })
    }

    pub fn hard(lambda: f64) -> Result<Self> {
        Self::new(PenaltyFamily::Hard, lambda, DEFAULT_SCAD_A)
    }

    pub fn soft(lambda: f64) -> Result<Self> {
        Self::new(PenaltyFamily::Soft, lambda, DEFAULT_SCAD_A)
    }

    pub fn scad(lambda: f64, a: f64) -> Result<Self> {
        Self::new(PenaltyFamily::Scad, lambda, a)
    }

    /// Same family and shape with a different `lambda`.
    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self { lambda, ..*self }
    }
}

/// The thresholding rule `h_λ` that minimizes `½(x - u)² + p_λ(|u|)` over u.
pub fn threshold_scalar(x: f64, p: &PenaltySpec) -> f64 {
    let lambda = p.lambda;
    let ax = x.abs();
    match p.family {
        PenaltyFamily::Hard => {
            if ax > lambda {
                x
            } else {
                0.0
            }
        }
        PenaltyFamily::Soft => soft(x, lambda),
        PenaltyFamily::Scad => {
            let a = p.scad_a;
            if ax <= 2.0 * lambda {
                soft(x, lambda)
            } else if ax <= a * lambda {
                ((a - 1.0) * x - x.signum() * a * lambda) / (a - 2.0)
            } else {
                x
            }
        }
    }
}

fn soft(x: f64, lambda: f64) -> f64 {
    let shrunk = x.abs() - lambda;
    if shrunk > 0.0 {
        x.signum() * shrunk
    } else {
        0.0
    }
}

/// Applies [`threshold_scalar`] componentwise.
pub fn threshold_vec(w: &[f64], p: &PenaltySpec) -> Vec<f64> {
    w.iter().map(|&x| threshold_scalar(x, p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hard_and_soft_definition_cases() {
        let h = PenaltySpec::hard(1.0).unwrap();
        assert_eq!(threshold_scalar(2.0, &h), 2.0);
        assert_eq!(threshold_scalar(0.5, &h), 0.0);
        assert_eq!(threshold_scalar(-1.0, &h), 0.0);
        let s = PenaltySpec::soft(0.5).unwrap();
        assert_eq!(threshold_scalar(2.0, &s), 1.5);
        assert_eq!(threshold_scalar(-0.3, &s), 0.0);
        assert_eq!(threshold_scalar(-2.0, &s), -1.5);
    }

    #[test]
    fn scad_three_pieces() {
        let p = PenaltySpec::scad(1.0, 3.7).unwrap();
        assert!((threshold_scalar(1.5, &p) - 0.5).abs() < 1e-15);
        let mid = (2.7 * 2.5 - 3.7) / 1.7;
        assert!((threshold_scalar(2.5, &p) - mid).abs() < 1e-15);
        assert!((threshold_scalar(-2.5, &p) + mid).abs() < 1e-15);
        assert_eq!(threshold_scalar(5.0, &p), 5.0);
        // continuous at both knots
        assert!((threshold_scalar(2.0, &p) - 1.0).abs() < 1e-15);
        assert!((threshold_scalar(3.7, &p) - 3.7).abs() < 1e-12);
    }

    #[test]
    fn zero_lambda_is_identity_for_every_family() {
        for p in [
            PenaltySpec::hard(0.0).unwrap(),
            PenaltySpec::soft(0.0).unwrap(),
            PenaltySpec::scad(0.0, 3.7).unwrap(),
        ] {
            for x in [-3.2, -1e-9, 0.0, 0.7, 12.0] {
                assert_eq!(threshold_scalar(x, &p), x, "{:?} at {x}", p.family);
            }
        }
    }

    #[test]
    fn validation() {
        assert!(PenaltySpec::hard(-0.1).is_err());
        assert!(PenaltySpec::scad(1.0, 2.0).is_err());
        assert!(PenaltySpec::soft(f64::NAN).is_err());
        assert_eq!("SCAD".parse::<PenaltyFamily>().unwrap(), PenaltyFamily::Scad);
        assert!("ridge".parse::<PenaltyFamily>().is_err());
    }
}
