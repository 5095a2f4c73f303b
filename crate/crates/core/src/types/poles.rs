use num_complex::Complex64;

use super::{all_distinct, is_conjugate_closed};
use crate::error::{Error, Result};

/// Support (expansion) points of an unstructured barycentric form.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleSet {
    lambdas: Vec<Complex64>,
}

impl PoleSet {
    pub fn new(lambdas: Vec<Complex64>) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::Config("pole set is empty".into()));
        }
        if !all_distinct(&lambdas) {
            return Err(Error::DuplicatePoints);
        }
        Ok(Self { lambdas })
    }

    pub fn lambdas(&self) -> &[Complex64] {
        &self.lambdas
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn is_conjugate_closed(&self) -> bool {
        is_conjugate_closed(&self.lambdas, 0.0)
    }
}

/// A pair of support points `(λ⁺, λ⁻)` with the natural frequency `ω` and
/// damping ratio `ψ` of the quadratic factor `(s − λ⁺)(s − λ⁻)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolePair {
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    pub omega: Complex64,
    pub psi: Complex64,
}

/// Builds a pole pair from its two roots.
///
/// `ω` is the principal square root of `λ⁺λ⁻` (so `Re ω ≥ 0`, and `Im ω ≥ 0`
/// when `ω` is purely imaginary), and `ψ = −(λ⁺ + λ⁻)/(2ω)`.
pub fn pair_from_lambdas(lambda_plus: Complex64, lambda_minus: Complex64) -> Result<PolePair> {
    let product = lambda_plus * lambda_minus;
    if product == Complex64::new(0.0, 0.0) {
        return Err(Error::DegeneratePair);
    }
    let omega = principal_sqrt(product);
    let psi = -(lambda_plus + lambda_minus) / (2.0 * omega);
    Ok(PolePair {
        lambda_plus,
        lambda_minus,
        omega,
        psi,
    })
}

/// Roots `λ± = −ωψ ± ω·sqrt(ψ² − 1)` of `s² + 2ψωs + ω²`.
pub fn lambdas_from_modal(omega: Complex64, psi: Complex64) -> (Complex64, Complex64) {
    let disc = (psi * psi - 1.0).sqrt();
    let center = -omega * psi;
    let spread = omega * disc;
    (center + spread, center - spread)
}

fn principal_sqrt(z: Complex64) -> Complex64 {
    // Real products get an exact real or imaginary root so that conjugate
    // pairs always produce a real natural frequency.
    let mut w = if z.im == 0.0 {
        if z.re >= 0.0 {
            Complex64::new(z.re.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-z.re).sqrt())
        }
    } else {
        z.sqrt()
    };
    if w.re < 0.0 || (w.re == 0.0 && w.im < 0.0) {
        w = -w;
    }
    w
}

impl PolePair {
    pub fn from_lambdas(lambda_plus: Complex64, lambda_minus: Complex64) -> Result<Self> {
        pair_from_lambdas(lambda_plus, lambda_minus)
    }

    /// Pair with the given `(ω, ψ)`; the roots are recomputed from the modal
    /// parameters so that the stored `ω, ψ` are exactly the inputs.
    pub fn from_modal(omega: Complex64, psi: Complex64) -> Result<Self> {
        if omega == Complex64::new(0.0, 0.0) {
            return Err(Error::DegeneratePair);
        }
        let (lambda_plus, lambda_minus) = lambdas_from_modal(omega, psi);
        Ok(Self {
            lambda_plus,
            lambda_minus,
            omega,
            psi,
        })
    }

    /// `(s − λ⁺)(s − λ⁻)` evaluated in product form.
    pub fn quadratic(&self, s: Complex64) -> Complex64 {
        (s - self.lambda_plus) * (s - self.lambda_minus)
    }

    pub fn is_conjugate(&self) -> bool {
        self.lambda_minus == self.lambda_plus.conj() && self.lambda_plus.im != 0.0
    }

    pub fn is_real(&self) -> bool {
        self.lambda_plus.im == 0.0 && self.lambda_minus.im == 0.0
    }
}

/// `r` pole pairs; the `2r` points are distinct across pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct PolePairSet {
    pairs: Vec<PolePair>,
}

impl PolePairSet {
    pub fn new(pairs: Vec<PolePair>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Config("pole pair set is empty".into()));
        }
        // Points must be distinct across pairs; a pair may hold a double root.
        let mut reps = Vec::with_capacity(2 * pairs.len());
        for p in &pairs {
            reps.push(p.lambda_plus);
            if p.lambda_minus != p.lambda_plus {
                reps.push(p.lambda_minus);
            }
        }
        if !all_distinct(&reps) {
            return Err(Error::DuplicatePoints);
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[PolePair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// All points interleaved as `[λ⁺₁, λ⁻₁, λ⁺₂, λ⁻₂, …]`.
    pub fn points(&self) -> Vec<Complex64> {
        self.pairs
            .iter()
            .flat_map(|p| [p.lambda_plus, p.lambda_minus])
            .collect()
    }

    pub fn is_conjugate_closed(&self) -> bool {
        is_conjugate_closed(&self.points(), 0.0)
    }

    /// Every pair has a real natural frequency and damping ratio.
    pub fn has_real_modal_parameters(&self) -> bool {
        self.pairs
            .iter()
            .all(|p| p.is_conjugate() || p.is_real())
    }
}
