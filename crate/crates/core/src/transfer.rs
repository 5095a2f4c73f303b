//! Evaluation of barycentric forms and realized models, and pointwise errors.
//!
//! Barycentric forms are always evaluated as a quotient of partial-fraction
//! sums; they are never expanded into polynomials.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::types::{
    lambdas_from_modal, FirstOrderModel, FrequencySampleSet, FullyStructuredBarycentric,
    PartialStructuredBarycentric, PolePairSet, SecondOrderModel, UnstructuredBarycentric,
};

/// Below this magnitude a denominator is treated as zero.
const ZERO_DENOMINATOR: f64 = 1e-300;

/// Below this magnitude a measurement is treated as zero.
pub const ZERO_MEASUREMENT: f64 = 1e-300;

fn check_supports(supports: impl IntoIterator<Item = Complex64>, s: Complex64) -> Result<()> {
    if supports.into_iter().any(|l| l == s) {
        return Err(Error::EvaluationAtSupport(s));
    }
    Ok(())
}

fn quotient(num: Complex64, den: Complex64, s: Complex64) -> Result<Complex64> {
    if den.norm() < ZERO_DENOMINATOR {
        return Err(Error::EvaluationAtPole(s));
    }
    Ok(num / den)
}

/// `1 + Σ ϕⱼ/(s − λⱼ)`.
pub fn first_order_sum(lambdas: &[Complex64], weights: &[Complex64], s: Complex64) -> Complex64 {
    lambdas
        .iter()
        .zip(weights)
        .map(|(&l, &w)| w / (s - l))
        .sum()
}

/// `Σ ωⱼ xⱼ / ((s − λⱼ⁺)(s − λⱼ⁻))`.
pub fn second_order_sum(pairs: &PolePairSet, coeffs: &[Complex64], s: Complex64) -> Complex64 {
    pairs
        .pairs()
        .iter()
        .zip(coeffs)
        .map(|(p, &x)| p.omega * x / p.quadratic(s))
        .sum()
}

pub fn eval_unstructured(form: &UnstructuredBarycentric, s: Complex64) -> Result<Complex64> {
    let lambdas = form.poles.lambdas();
    check_supports(lambdas.iter().copied(), s)?;
    let num = first_order_sum(lambdas, &form.num_weights, s);
    let den = 1.0 + first_order_sum(lambdas, &form.den_weights, s);
    quotient(num, den, s)
}

/// Denominator `d(s)` of an unstructured form.
pub fn den_unstructured(form: &UnstructuredBarycentric, s: Complex64) -> Result<Complex64> {
    let lambdas = form.poles.lambdas();
    check_supports(lambdas.iter().copied(), s)?;
    Ok(1.0 + first_order_sum(lambdas, &form.den_weights, s))
}

pub fn eval_partial(form: &PartialStructuredBarycentric, s: Complex64) -> Result<Complex64> {
    let den = den_partial(form, s)?;
    let num = second_order_sum(&form.pairs, &form.num_residues, s);
    quotient(num, den, s)
}

/// Denominator `1 + Σ ϕᵢ⁺/(s − λᵢ⁺) + Σ ϕᵢ⁻/(s − λᵢ⁻)` of the partially
/// structured form.
pub fn den_partial(form: &PartialStructuredBarycentric, s: Complex64) -> Result<Complex64> {
    let points = form.pairs.points();
    check_supports(points.iter().copied(), s)?;
    Ok(1.0 + first_order_sum(&points, &form.den_weights_interleaved(), s))
}

pub fn eval_full(form: &FullyStructuredBarycentric, s: Complex64) -> Result<Complex64> {
    let den = den_full(form, s)?;
    let num = second_order_sum(&form.pairs, &form.num_residues, s);
    quotient(num, den, s)
}

/// Denominator `1 + Σ ωⱼϕⱼ/((s − λⱼ⁺)(s − λⱼ⁻))` of the fully structured form.
pub fn den_full(form: &FullyStructuredBarycentric, s: Complex64) -> Result<Complex64> {
    check_supports(form.pairs.points(), s)?;
    Ok(1.0 + second_order_sum(&form.pairs, &form.den_residues, s))
}

/// `Σ ωⱼbⱼ/(s² + 2ψⱼωⱼs + ωⱼ²)`, which equals `Cp(s²M + sE + K)⁻¹Bu` for the
/// diagonal realization.
pub fn eval_second_order(model: &SecondOrderModel, s: Complex64) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for ((&w, &p), &b) in model.omega().iter().zip(model.psi()).zip(model.b()) {
        let q = s * (s + 2.0 * p * w) + w * w;
        if q.norm() < ZERO_DENOMINATOR {
            return Err(Error::EvaluationAtPole(s));
        }
        acc += w * b / q;
    }
    Ok(acc)
}

pub fn eval_first_order(model: &FirstOrderModel, s: Complex64) -> Result<Complex64> {
    if model.poles().contains(&s) {
        return Err(Error::EvaluationAtPole(s));
    }
    Ok(first_order_sum(model.poles(), model.residues(), s))
}

/// Splits every mode into two simple poles:
/// `ωb/((s − λ⁺)(s − λ⁻)) = φ⁺/(s − λ⁺) − φ⁺/(s − λ⁻)` with `φ⁺ = ωb/(λ⁺ − λ⁻)`.
pub fn expand_to_first_order(model: &SecondOrderModel) -> Result<FirstOrderModel> {
    let mut poles = Vec::with_capacity(2 * model.order());
    let mut residues = Vec::with_capacity(2 * model.order());
    for ((&w, &p), &b) in model.omega().iter().zip(model.psi()).zip(model.b()) {
        let (lp, lm) = lambdas_from_modal(Complex64::new(w, 0.0), Complex64::new(p, 0.0));
        let gap = lp - lm;
        if gap.norm() <= 1e-12 * w {
            return Err(Error::CriticallyDamped);
        }
        let res = w * b / gap;
        poles.extend([lp, lm]);
        residues.extend([res, -res]);
    }
    FirstOrderModel::new(poles, residues)
}

/// `|Ĥ(ξᵢ) − hᵢ| / |hᵢ|` for every sample.
pub fn pointwise_relative_error<F>(evaluate: F, samples: &FrequencySampleSet) -> Result<Vec<f64>>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    samples
        .points()
        .iter()
        .zip(samples.values())
        .enumerate()
        .map(|(i, (&xi, &h))| {
            if h.norm() < ZERO_MEASUREMENT {
                return Err(Error::ZeroMeasurement(i));
            }
            Ok((evaluate(xi)? - h).norm() / h.norm())
        })
        .collect()
}

/// Like [`pointwise_relative_error`], but uses the absolute error at zero
/// measurements. The flag reports whether that happened.
pub fn pointwise_error_with_fallback<F>(
    evaluate: F,
    samples: &FrequencySampleSet,
) -> Result<(Vec<f64>, bool)>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut fallback = false;
    let errors = samples
        .points()
        .iter()
        .zip(samples.values())
        .map(|(&xi, &h)| {
            let diff = (evaluate(xi)? - h).norm();
            if h.norm() < ZERO_MEASUREMENT {
                fallback = true;
                Ok(diff)
            } else {
                Ok(diff / h.norm())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((errors, fallback))
}
