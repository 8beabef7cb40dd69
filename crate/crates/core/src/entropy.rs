//! Self-information, Shannon entropy and von Neumann entropy.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::linalg::{Complex, ComplexMatrix};
use crate::quantum::DensityOperator;

/// Probabilities at or below this contribute nothing (`0 log 0 = 0`).
pub const ZERO_PROBABILITY: f64 = 1e-12;
/// Allowed deviation of a distribution's sum from 1.
pub const DISTRIBUTION_SUM_TOL: f64 = 1e-9;

/// A finite probability distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityDistribution {
    probs: Vec<f64>,
}

impl ProbabilityDistribution {
    /// Validates `probs`; entries in `[-1e-12, 0)` are clamped to zero.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Empty("distribution"));
        }
        let mut clamped = Vec::with_capacity(probs.len());
        for p in probs {
            if !(-ZERO_PROBABILITY..=1.0 + DISTRIBUTION_SUM_TOL).contains(&p) {
                return Err(Error::InvalidProbability(p));
            }
            clamped.push(p.max(0.0));
        }
        let sum = compensated_sum(clamped.iter().copied());
        if (sum - 1.0).abs() > DISTRIBUTION_SUM_TOL {
            return Err(Error::WeightSum(sum));
        }
        Ok(Self { probs: clamped })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Unit in which an entropy value is reported.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum EntropyUnit {
    /// log base 2.
    #[default]
    Bits,
    /// Natural log.
    Nats,
    /// `k_B` times nats.
    Physical { k_b: f64 },
}

impl EntropyUnit {
    /// Physical units with `k_B = 1`.
    pub fn physical() -> Self {
        Self::Physical { k_b: 1.0 }
    }

    /// Converts a value in bits into this unit.
    pub fn from_bits(self, bits: f64) -> f64 {
        match self {
            Self::Bits => bits,
            Self::Nats => bits * LN_2,
            Self::Physical { k_b } => k_b * (bits * LN_2),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Self::Bits => "bits",
            Self::Nats => "nats",
            Self::Physical { .. } => "k_B",
        }
    }
}

/// Neumaier's compensated sum.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `-log2 p`, in bits.
pub fn self_information(p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(-p.log2())
}

/// `H = -sum p_i log2 p_i`, reported in `unit`.
pub fn shannon_entropy(dist: &ProbabilityDistribution, unit: EntropyUnit) -> f64 {
    let bits = compensated_sum(
        dist.probs
            .iter()
            .filter(|&&p| p > ZERO_PROBABILITY)
            .map(|&p| -p * p.log2()),
    );
    unit.from_bits(bits.max(0.0))
}

/// `S(rho) = H(eigenvalues of rho)`.
pub fn von_neumann_entropy(rho: &DensityOperator, unit: EntropyUnit) -> Result<f64> {
    let dist = ProbabilityDistribution::new(rho.eigenvalues().to_vec())?;
    Ok(shannon_entropy(&dist, unit))
}

/// `-Tr(rho log2 rho)` in bits, evaluated as a matrix product and trace.
///
/// `log2 rho` is built from the spectrum with `log2 0` replaced by 0 on the
/// kernel, then multiplied against the stored matrix of `rho`.
pub fn trace_form_entropy(rho: &DensityOperator) -> Result<f64> {
    let log_rho = rho
        .spectrum()
        .map_eigenvalues(|x| if x > ZERO_PROBABILITY { x.log2() } else { 0.0 })
        .reconstruct();
    let product: ComplexMatrix = rho.matrix().matmul(&log_rho)?;
    let s: Complex = -product.trace();
    Ok(s.re.max(0.0))
}

/// `log2 d`, the largest entropy of a `d`-level system.
pub fn max_entropy(dim: usize) -> Result<f64> {
    if dim < 1 {
        return Err(Error::InvalidDimension(dim));
    }
    Ok((dim as f64).log2())
}

/// `H(p, 1 - p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    term(p) + term(1.0 - p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::spin::{x_plus, z_minus, z_plus};
    use crate::quantum::{Ensemble, Ket};

    fn dist(p: &[f64]) -> ProbabilityDistribution {
        ProbabilityDistribution::new(p.to_vec()).unwrap()
    }

    #[test]
    fn self_information_examples() {
        assert_eq!(self_information(0.5).unwrap(), 1.0);
        assert_eq!(self_information(1.0).unwrap(), 0.0);
        assert_eq!(self_information(0.125).unwrap(), 3.0);
        assert!(self_information(0.0).is_err());
        assert!(self_information(-0.1).is_err());
        assert!(self_information(1.5).is_err());
        let (a, b) = (0.3, 0.45);
        let lhs = self_information(a * b).unwrap();
        let rhs = self_information(a).unwrap() + self_information(b).unwrap();
        assert!((lhs - rhs).abs() < 1e-14);
    }

    #[test]
    fn shannon_examples() {
        assert_eq!(shannon_entropy(&dist(&[1.0, 0.0]), EntropyUnit::Bits), 0.0);
        assert_eq!(shannon_entropy(&dist(&[0.5, 0.5]), EntropyUnit::Bits), 1.0);
        // -(3/4) log2(3/4) - (1/4) log2(1/4) = 2 - (3/4) log2 3
        let expected = 2.0 - 0.75 * 3f64.log2();
        let h = shannon_entropy(&dist(&[0.75, 0.25]), EntropyUnit::Bits);
        assert!((h - expected).abs() < 1e-15);
        assert!((h - 0.811278).abs() < 1e-6);
    }

    #[test]
    fn distribution_validation() {
        assert!(ProbabilityDistribution::new(vec![]).is_err());
        assert!(ProbabilityDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(ProbabilityDistribution::new(vec![1.1, -0.1]).is_err());
        assert!(ProbabilityDistribution::new(vec![f64::NAN]).is_err());
        let d = ProbabilityDistribution::new(vec![1.0, -1e-13]).unwrap();
        assert_eq!(d.probs(), &[1.0, 0.0]);
    }

    #[test]
    fn units() {
        let bits = 0.8;
        assert_eq!(EntropyUnit::Nats.from_bits(bits), bits * LN_2);
        assert_eq!(
            EntropyUnit::Physical { k_b: 2.0 }.from_bits(bits),
            2.0 * (bits * LN_2)
        );
        assert_eq!(EntropyUnit::default(), EntropyUnit::Bits);
        let h = shannon_entropy(&dist(&[0.5, 0.5]), EntropyUnit::Nats);
        assert_eq!(h, LN_2);
    }

    #[test]
    fn von_neumann_examples() {
        let rho1 = DensityOperator::pure(&z_plus()).unwrap();
        assert_eq!(von_neumann_entropy(&rho1, EntropyUnit::Bits).unwrap(), 0.0);
        assert_eq!(trace_form_entropy(&rho1).unwrap(), 0.0);

        let mixed = DensityOperator::maximally_mixed(2).unwrap();
        assert!((von_neumann_entropy(&mixed, EntropyUnit::Bits).unwrap() - 1.0).abs() < 1e-12);
        assert!((trace_form_entropy(&mixed).unwrap() - 1.0).abs() < 1e-12);

        let e2 = Ensemble::new(vec![(0.5, z_plus()), (0.5, x_plus())]).unwrap();
        let rho2 = DensityOperator::from_ensemble(&e2).unwrap();
        let lambda = (1.0 - (1.0f64 - 2.0 * 0.25).sqrt()) / 2.0;
        let expected = binary_entropy(lambda);
        let s = von_neumann_entropy(&rho2, EntropyUnit::Bits).unwrap();
        assert!((s - expected).abs() < 1e-12);
        assert!((s - 0.600876).abs() < 1e-6);
        assert!((trace_form_entropy(&rho2).unwrap() - s).abs() < 1e-9);
    }

    #[test]
    fn max_entropy_examples() {
        assert_eq!(max_entropy(2).unwrap(), 1.0);
        assert_eq!(max_entropy(1).unwrap(), 0.0);
        assert_eq!(max_entropy(8).unwrap(), 3.0);
        assert!(max_entropy(0).is_err());
    }

    #[test]
    fn admixing_non_eigenvector_lowers_entropy() {
        for eps in [0.1, 0.3] {
            let e = Ensemble::new(vec![
                ((1.0 - eps) / 2.0, z_plus()),
                ((1.0 - eps) / 2.0, z_minus()),
                (eps, x_plus()),
            ])
            .unwrap();
            let rho = DensityOperator::from_ensemble(&e).unwrap();
            let s = von_neumann_entropy(&rho, EntropyUnit::Bits).unwrap();
            assert!(s < max_entropy(2).unwrap(), "eps = {eps}: S = {s}");
        }
    }

    #[test]
    fn pure_state_in_higher_dimension() {
        let k = Ket::normalized(
            crate::linalg::ComplexVector::new(vec![
                Complex::new(1.0, 2.0),
                Complex::new(-0.5, 0.0),
                Complex::new(0.0, 3.0),
            ])
            .unwrap(),
        )
        .unwrap();
        let rho = DensityOperator::pure(&k).unwrap();
        assert!(von_neumann_entropy(&rho, EntropyUnit::Bits).unwrap() < 1e-10);
        assert!(trace_form_entropy(&rho).unwrap() < 1e-10);
    }
}
