use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Modally damped second-order model in diagonal form:
/// `M = diag(1/ω)`, `E = diag(2ψ)`, `K = diag(ω)`, `Bu = b`, `Cp = c = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondOrderModel {
    omega: Vec<f64>,
    psi: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
}

impl SecondOrderModel {
    pub fn new(omega: Vec<f64>, psi: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let c = vec![1.0; omega.len()];
        Self::with_output(omega, psi, b, c)
    }

    /// Constructor used by deserialization; validates that `c` is all ones.
    pub fn with_output(omega: Vec<f64>, psi: Vec<f64>, b: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        let model = Self { omega, psi, b, c };
        model.validate()?;
        Ok(model)
    }

    /// Checks every structural invariant of the realization.
    pub fn validate(&self) -> Result<()> {
        let r = self.omega.len();
        if r == 0 {
            return Err(Error::Structure("model has no modes".into()));
        }
        if self.psi.len() != r || self.b.len() != r || self.c.len() != r {
            return Err(Error::Structure("parameter arrays differ in length".into()));
        }
        if let Some(w) = self.omega.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::Structure(format!("natural frequency {w} is not positive")));
        }
        if let Some(p) = self.psi.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::Structure(format!("damping ratio {p} is negative")));
        }
        if self.b.iter().any(|b| !b.is_finite()) {
            return Err(Error::Structure("input vector is not finite".into()));
        }
        if self.c.iter().any(|&c| c != 1.0) {
            return Err(Error::Structure("output vector must be all ones".into()));
        }
        if !self.is_modally_damped() {
            return Err(Error::Structure("damping does not commute through M⁻¹K".into()));
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.omega.len()
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn mass_diag(&self) -> Vec<f64> {
        self.omega.iter().map(|w| 1.0 / w).collect()
    }

    pub fn damping_diag(&self) -> Vec<f64> {
        self.psi.iter().map(|p| 2.0 * p).collect()
    }

    pub fn stiffness_diag(&self) -> Vec<f64> {
        self.omega.clone()
    }

    /// `E·M⁻¹·K == K·M⁻¹·E` on the diagonal realization. Off-diagonal entries
    /// of both products vanish identically; diagonal entries agree up to the
    /// rounding of a triple product.
    pub fn is_modally_damped(&self) -> bool {
        let m = self.mass_diag();
        let e = self.damping_diag();
        let k = self.stiffness_diag();
        (0..self.order()).all(|j| {
            let emk = (e[j] * (1.0 / m[j])) * k[j];
            let kme = (k[j] * (1.0 / m[j])) * e[j];
            (emk - kme).abs() <= 4.0 * f64::EPSILON * emk.abs().max(kme.abs())
        })
    }
}

/// First-order pole-residue model `Σ φⱼ/(s − λⱼ)` with all-ones output.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstOrderModel {
    poles: Vec<Complex64>,
    residues: Vec<Complex64>,
}

impl FirstOrderModel {
    pub fn new(poles: Vec<Complex64>, residues: Vec<Complex64>) -> Result<Self> {
        if poles.is_empty() {
            return Err(Error::Structure("model has no poles".into()));
        }
        if poles.len() != residues.len() {
            return Err(Error::Structure("poles and residues differ in length".into()));
        }
        Ok(Self { poles, residues })
    }

    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }

    pub fn residues(&self) -> &[Complex64] {
        &self.residues
    }

    pub fn order(&self) -> usize {
        self.poles.len()
    }
}
