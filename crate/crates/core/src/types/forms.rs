use num_complex::Complex64;

use super::{PolePairSet, PoleSet};
use crate::error::{Error, Result};

/// `[Σ φⱼ/(s − λⱼ)] / [1 + Σ ϕⱼ/(s − λⱼ)]`
#[derive(Debug, Clone, PartialEq)]
pub struct UnstructuredBarycentric {
    pub poles: PoleSet,
    pub num_weights: Vec<Complex64>,
    pub den_weights: Vec<Complex64>,
}

impl UnstructuredBarycentric {
    pub fn new(
        poles: PoleSet,
        num_weights: Vec<Complex64>,
        den_weights: Vec<Complex64>,
    ) -> Result<Self> {
        check_len("numerator weights", poles.len(), num_weights.len())?;
        check_len("denominator weights", poles.len(), den_weights.len())?;
        Ok(Self {
            poles,
            num_weights,
            den_weights,
        })
    }

    pub fn order(&self) -> usize {
        self.poles.len()
    }
}

/// Structured numerator over pole pairs, first-order denominator over all
/// `2r` points.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialStructuredBarycentric {
    pub pairs: PolePairSet,
    pub num_residues: Vec<Complex64>,
    pub den_weights_plus: Vec<Complex64>,
    pub den_weights_minus: Vec<Complex64>,
}

impl PartialStructuredBarycentric {
    pub fn new(
        pairs: PolePairSet,
        num_residues: Vec<Complex64>,
        den_weights_plus: Vec<Complex64>,
        den_weights_minus: Vec<Complex64>,
    ) -> Result<Self> {
        check_len("numerator residues", pairs.len(), num_residues.len())?;
        check_len("denominator weights (+)", pairs.len(), den_weights_plus.len())?;
        check_len("denominator weights (-)", pairs.len(), den_weights_minus.len())?;
        Ok(Self {
            pairs,
            num_residues,
            den_weights_plus,
            den_weights_minus,
        })
    }

    pub fn order(&self) -> usize {
        self.pairs.len()
    }

    /// Denominator weights interleaved to match [`PolePairSet::points`].
    pub fn den_weights_interleaved(&self) -> Vec<Complex64> {
        self.den_weights_plus
            .iter()
            .zip(&self.den_weights_minus)
            .flat_map(|(&p, &m)| [p, m])
            .collect()
    }

    pub fn max_den_weight(&self) -> f64 {
        self.den_weights_plus
            .iter()
            .chain(&self.den_weights_minus)
            .map(|w| w.norm())
            .fold(0.0, f64::max)
    }
}

/// Structured numerator and structured denominator over the same pole pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct FullyStructuredBarycentric {
    pub pairs: PolePairSet,
    pub num_residues: Vec<Complex64>,
    pub den_residues: Vec<Complex64>,
}

impl FullyStructuredBarycentric {
    pub fn new(
        pairs: PolePairSet,
        num_residues: Vec<Complex64>,
        den_residues: Vec<Complex64>,
    ) -> Result<Self> {
        check_len("numerator residues", pairs.len(), num_residues.len())?;
        check_len("denominator residues", pairs.len(), den_residues.len())?;
        Ok(Self {
            pairs,
            num_residues,
            den_residues,
        })
    }

    pub fn order(&self) -> usize {
        self.pairs.len()
    }

    pub fn max_den_weight(&self) -> f64 {
        self.den_residues.iter().map(|w| w.norm()).fold(0.0, f64::max)
    }
}

fn check_len(what: &str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Dimension(format!(
            "{what}: expected {expected} entries, got {got}"
        )));
    }
    Ok(())
}
