//! Weighted linear least-squares systems of the three fitting iterations.
//!
//! Column layouts:
//! * unstructured: `[1/(ξ−λ₁) … 1/(ξ−λᵣ) | −h/(ξ−λ₁) … −h/(ξ−λᵣ)]`
//! * partially structured: `[ωⱼ/q_j(ξ) …ⱼ | −h/(ξ−λ₁⁺), −h/(ξ−λ₁⁻), −h/(ξ−λ₂⁺), …]`
//! * fully structured: `[ωⱼ/q_j(ξ) …ⱼ | −ωⱼh/q_j(ξ) …ⱼ]`
//!
//! where `q_j(ξ) = (ξ − λⱼ⁺)(ξ − λⱼ⁻)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, RANK_DEFICIENCY_THRESHOLD};
use crate::types::{FrequencySampleSet, PolePairSet, PoleSet};

/// Weights are clipped into `[WEIGHT_MIN, WEIGHT_MAX]`.
pub const WEIGHT_MIN: f64 = 1e-8;
pub const WEIGHT_MAX: f64 = 1e8;

/// `min ‖Δ(Ax − h)‖₂` with `Δ = diag(weights)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedLS {
    pub a: DMatrix<Complex64>,
    pub rhs: Vec<Complex64>,
    pub weights: Vec<f64>,
}

impl WeightedLS {
    pub fn new(a: DMatrix<Complex64>, rhs: Vec<Complex64>, weights: Vec<f64>) -> Result<Self> {
        let (rows, cols) = a.shape();
        if rhs.len() != rows || weights.len() != rows {
            return Err(Error::Dimension(format!(
                "matrix has {rows} rows, rhs {} and weights {}",
                rhs.len(),
                weights.len()
            )));
        }
        if rows < cols {
            return Err(Error::Dimension(format!("{rows} rows for {cols} unknowns")));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::Dimension("weights must be positive and finite".into()));
        }
        Ok(Self { a, rhs, weights })
    }

    /// Problem with unit weights.
    pub fn unweighted(a: DMatrix<Complex64>, rhs: Vec<Complex64>) -> Result<Self> {
        let n = rhs.len();
        Self::new(a, rhs, vec![1.0; n])
    }

    /// `‖Δ(Ax − h)‖₂`.
    pub fn residual(&self, x: &[Complex64]) -> f64 {
        let xv = DVector::from_column_slice(x);
        let ax = &self.a * xv;
        ax.iter()
            .zip(&self.rhs)
            .zip(&self.weights)
            .map(|((v, h), w)| (w * (v - h)).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// One real degree of freedom, or a conjugate pair of complex unknowns
/// `x_i = a + ib`, `x_j = a − ib` carried by two real unknowns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RealBlock {
    Real(usize),
    ConjugatePair(usize, usize),
}

/// Map from real unknowns to the complex solution vector.
#[derive(Debug, Clone, PartialEq)]
pub struct RealParametrization {
    blocks: Vec<RealBlock>,
    unknowns: usize,
}

impl RealParametrization {
    pub fn new(blocks: Vec<RealBlock>, unknowns: usize) -> Result<Self> {
        let mut seen = vec![false; unknowns];
        let mut mark = |i: usize| -> Result<()> {
            if i >= unknowns || seen[i] {
                return Err(Error::Realness(format!("unknown {i} covered twice or out of range")));
            }
            seen[i] = true;
            Ok(())
        };
        for b in &blocks {
            match *b {
                RealBlock::Real(i) => mark(i)?,
                RealBlock::ConjugatePair(i, j) => {
                    mark(i)?;
                    mark(j)?;
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Realness("not every unknown is parametrized".into()));
        }
        Ok(Self { blocks, unknowns })
    }

    pub fn blocks(&self) -> &[RealBlock] {
        &self.blocks
    }

    /// Real residues/weights for real poles, conjugate residues/weights for
    /// conjugate pole pairs, in both the numerator and denominator blocks.
    pub fn unstructured(poles: &PoleSet) -> Result<Self> {
        let lambdas = poles.lambdas();
        let r = lambdas.len();
        let mut blocks = Vec::with_capacity(2 * r);
        let mut used = vec![false; r];
        let mut base = Vec::new();
        for i in 0..r {
            if used[i] {
                continue;
            }
            let l = lambdas[i];
            if l.im == 0.0 {
                used[i] = true;
                base.push(RealBlock::Real(i));
                continue;
            }
            let j = (0..r)
                .find(|&j| !used[j] && j != i && lambdas[j] == l.conj())
                .ok_or_else(|| Error::Realness(format!("support point {l} has no conjugate")))?;
            used[i] = true;
            used[j] = true;
            let (p, m) = if l.im > 0.0 { (i, j) } else { (j, i) };
            base.push(RealBlock::ConjugatePair(p, m));
        }
        blocks.extend(base.iter().copied());
        blocks.extend(base.iter().map(|b| match *b {
            RealBlock::Real(i) => RealBlock::Real(r + i),
            RealBlock::ConjugatePair(i, j) => RealBlock::ConjugatePair(r + i, r + j),
        }));
        Self::new(blocks, 2 * r)
    }

    /// Real structured residues; conjugate or real denominator weights per pair.
    pub fn partial(pairs: &PolePairSet) -> Result<Self> {
        let r = pairs.len();
        let mut blocks: Vec<RealBlock> = (0..r).map(RealBlock::Real).collect();
        for (j, p) in pairs.pairs().iter().enumerate() {
            let (ip, im) = (r + 2 * j, r + 2 * j + 1);
            if p.is_conjugate() {
                blocks.push(RealBlock::ConjugatePair(ip, im));
            } else if p.is_real() {
                blocks.push(RealBlock::Real(ip));
                blocks.push(RealBlock::Real(im));
            } else {
                return Err(Error::Realness(format!(
                    "pair ({}, {}) is neither conjugate nor real",
                    p.lambda_plus, p.lambda_minus
                )));
            }
        }
        Self::new(blocks, 3 * r)
    }

    /// Real structured residues in numerator and denominator.
    pub fn full(pairs: &PolePairSet) -> Result<Self> {
        if !pairs.has_real_modal_parameters() {
            return Err(Error::Realness("pole pairs have complex modal parameters".into()));
        }
        let r = pairs.len();
        Self::new((0..2 * r).map(RealBlock::Real).collect(), 2 * r)
    }

    fn real_unknowns(&self) -> usize {
        self.blocks
            .iter()
            .map(|b| match b {
                RealBlock::Real(_) => 1,
                RealBlock::ConjugatePair(..) => 2,
            })
            .sum()
    }
}

fn check_support(xi: Complex64, support: Complex64) -> Result<Complex64> {
    let d = xi - support;
    if d == Complex64::new(0.0, 0.0) {
        return Err(Error::SingularSupport { point: xi, support });
    }
    Ok(d)
}

/// ℓ × 2r Cauchy-type matrix of classical vector fitting.
pub fn assemble_unstructured(
    samples: &FrequencySampleSet,
    poles: &PoleSet,
) -> Result<DMatrix<Complex64>> {
    let r = poles.len();
    let mut a = DMatrix::zeros(samples.len(), 2 * r);
    for (i, (&xi, &h)) in samples.points().iter().zip(samples.values()).enumerate() {
        for (j, &l) in poles.lambdas().iter().enumerate() {
            let inv = 1.0 / check_support(xi, l)?;
            a[(i, j)] = inv;
            a[(i, r + j)] = -h * inv;
        }
    }
    Ok(a)
}

/// ℓ × 3r matrix of the partially structured form.
pub fn assemble_so1(
    samples: &FrequencySampleSet,
    pairs: &PolePairSet,
) -> Result<DMatrix<Complex64>> {
    let r = pairs.len();
    let mut a = DMatrix::zeros(samples.len(), 3 * r);
    for (i, (&xi, &h)) in samples.points().iter().zip(samples.values()).enumerate() {
        for (j, p) in pairs.pairs().iter().enumerate() {
            let dp = check_support(xi, p.lambda_plus)?;
            let dm = check_support(xi, p.lambda_minus)?;
            a[(i, j)] = p.omega / (dp * dm);
            a[(i, r + 2 * j)] = -h / dp;
            a[(i, r + 2 * j + 1)] = -h / dm;
        }
    }
    Ok(a)
}

/// ℓ × 2r matrix of the fully structured form.
pub fn assemble_so2(
    samples: &FrequencySampleSet,
    pairs: &PolePairSet,
) -> Result<DMatrix<Complex64>> {
    let r = pairs.len();
    let mut a = DMatrix::zeros(samples.len(), 2 * r);
    for (i, (&xi, &h)) in samples.points().iter().zip(samples.values()).enumerate() {
        for (j, p) in pairs.pairs().iter().enumerate() {
            let dp = check_support(xi, p.lambda_plus)?;
            let dm = check_support(xi, p.lambda_minus)?;
            let col = p.omega / (dp * dm);
            a[(i, j)] = col;
            a[(i, r + j)] = -h * col;
        }
    }
    Ok(a)
}

/// Weights `δᵢ = 1/|d(ξᵢ)|` of the previous denominator, clipped into
/// `[WEIGHT_MIN, WEIGHT_MAX]`. Also returns the number of clipped entries.
pub fn update_weights<F>(den: F, samples: &FrequencySampleSet) -> Result<(Vec<f64>, usize)>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut clipped = 0;
    let weights = samples
        .points()
        .iter()
        .map(|&xi| {
            let d = den(xi)?.norm();
            let w = if d > 0.0 { 1.0 / d } else { f64::INFINITY };
            let w = if w.is_nan() { WEIGHT_MIN } else { w };
            if !(WEIGHT_MIN..=WEIGHT_MAX).contains(&w) {
                clipped += 1;
            }
            Ok(w.clamp(WEIGHT_MIN, WEIGHT_MAX))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((weights, clipped))
}

/// Solution of a weighted least-squares problem.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedLsSolution {
    pub x: Vec<Complex64>,
    /// `‖Δ(Ax − h)‖₂` at the returned solution.
    pub residual: f64,
    pub condition_estimate: f64,
    pub rank_deficient: bool,
}

/// Solves `min ‖Δ(Ax − h)‖₂`.
///
/// Without a parametrization the unknowns are complex. With one, the problem
/// is rewritten over the real unknowns of the parametrization and solved as a
/// real problem whose rows stack the real and imaginary parts.
pub fn solve_weighted_ls(
    problem: &WeightedLS,
    realness: Option<&RealParametrization>,
) -> Result<WeightedLsSolution> {
    let (rows, cols) = problem.a.shape();
    let scaled = DMatrix::from_fn(rows, cols, |i, j| problem.a[(i, j)] * problem.weights[i]);
    let rhs: Vec<Complex64> = problem
        .rhs
        .iter()
        .zip(&problem.weights)
        .map(|(h, w)| h * *w)
        .collect();

    let (x, condition_estimate, rank_deficient) = match realness {
        None => {
            let sol = linalg::solve_least_squares_complex(&scaled, &DVector::from_vec(rhs))?;
            (sol.x, sol.condition_estimate, sol.rank_deficient)
        }
        Some(param) => {
            if param.unknowns != cols {
                return Err(Error::Dimension(format!(
                    "parametrization covers {} unknowns, system has {cols}",
                    param.unknowns
                )));
            }
            let n = param.real_unknowns();
            let i = Complex64::new(0.0, 1.0);
            let mut real_cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
            for b in param.blocks() {
                match *b {
                    RealBlock::Real(j) => real_cols.push(scaled.column(j).iter().copied().collect()),
                    RealBlock::ConjugatePair(p, m) => {
                        let cp = scaled.column(p);
                        let cm = scaled.column(m);
                        real_cols.push(cp.iter().zip(cm.iter()).map(|(a, b)| a + b).collect());
                        real_cols.push(cp.iter().zip(cm.iter()).map(|(a, b)| i * (a - b)).collect());
                    }
                }
            }
            let big = DMatrix::from_fn(2 * rows, n, |r, c| {
                if r < rows {
                    real_cols[c][r].re
                } else {
                    real_cols[c][r - rows].im
                }
            });
            let big_rhs = DVector::from_fn(2 * rows, |r, _| {
                if r < rows {
                    rhs[r].re
                } else {
                    rhs[r - rows].im
                }
            });
            let sol = linalg::solve_least_squares(&big, &big_rhs)?;
            let mut x = vec![Complex64::new(0.0, 0.0); cols];
            let mut k = 0;
            for b in param.blocks() {
                match *b {
                    RealBlock::Real(j) => {
                        x[j] = Complex64::new(sol.x[k], 0.0);
                        k += 1;
                    }
                    RealBlock::ConjugatePair(p, m) => {
                        x[p] = Complex64::new(sol.x[k], sol.x[k + 1]);
                        x[m] = x[p].conj();
                        k += 2;
                    }
                }
            }
            (x, sol.condition_estimate, sol.rank_deficient)
        }
    };
    let residual = problem.residual(&x);
    Ok(WeightedLsSolution {
        x,
        residual,
        condition_estimate,
        rank_deficient: rank_deficient || condition_estimate > RANK_DEFICIENCY_THRESHOLD,
    })
}
