//! The three fixed-point iterations: classical vector fitting and the two
//! structure-preserving second-order variants.
//!
//! Each step assembles the weighted least-squares problem for the current
//! support points, solves it, relocates the support points to the zeros of
//! the fitted denominator and reweights the rows by the inverse magnitude of
//! that denominator. The learned model is always read off the numerator.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ls::{
    assemble_so1, assemble_so2, assemble_unstructured, solve_weighted_ls, update_weights,
    RealParametrization, WeightedLS, WeightedLsSolution,
};
use crate::pole_update::{
    conjugate_cleanup, max_relative_movement, split_pairs, stabilize, zeros_so1, zeros_so2,
    zeros_unstructured,
};
use crate::transfer::{
    den_full, den_partial, den_unstructured, eval_first_order, eval_second_order,
    pointwise_error_with_fallback,
};
use crate::types::{
    FirstOrderModel, FitReport, FrequencySampleSet, FullyStructuredBarycentric, InitStrategy,
    IterationConfig, IterationRecord, PartialStructuredBarycentric, PolePair, PolePairSet,
    PoleSet, SecondOrderModel, Termination, UnstructuredBarycentric,
};

/// Damping offset of the initial support points, `λ = (−α + i)·ω̃`.
pub const INIT_DAMPING: f64 = 1e-2;

/// Tolerance on the imaginary parts of realized modal parameters.
pub const REALNESS_TOL: f64 = 1e-8;

fn init_frequencies(strategy: InitStrategy, count: usize, range: (f64, f64)) -> Result<Vec<f64>> {
    let (f_lo, f_hi) = range;
    if !(f_lo >= 0.0 && f_lo < f_hi && f_hi.is_finite()) {
        return Err(Error::Range(format!("[{f_lo}, {f_hi}] is not a valid frequency range")));
    }
    let lo = f_lo.max(f_hi * 1e-4);
    let freqs = match strategy {
        InitStrategy::LogspaceImag => {
            if count == 1 {
                vec![(lo * f_hi).sqrt()]
            } else {
                let (a, b) = (lo.log10(), f_hi.log10());
                (0..count)
                    .map(|k| {
                        if k + 1 == count {
                            f_hi
                        } else {
                            10f64.powf(a + (b - a) * k as f64 / (count - 1) as f64)
                        }
                    })
                    .collect()
            }
        }
        InitStrategy::LinspaceImag => {
            if count == 1 {
                vec![0.5 * (lo + f_hi)]
            } else {
                (0..count)
                    .map(|k| lo + (f_hi - lo) * k as f64 / (count - 1) as f64)
                    .collect()
            }
        }
        InitStrategy::UserSupplied => {
            return Err(Error::Config("user-supplied support points must be passed explicitly".into()))
        }
    };
    Ok(freqs)
}

/// Initial pole pairs `λ⁺ = (−α + i)·ω̃ⱼ`, `λ⁻ = conj(λ⁺)`.
pub fn init_poles(strategy: InitStrategy, r: usize, range: (f64, f64)) -> Result<PolePairSet> {
    if r < 1 {
        return Err(Error::Config("order must be at least 1".into()));
    }
    let pairs = init_frequencies(strategy, r, range)?
        .into_iter()
        .map(|w| {
            let lp = Complex64::new(-INIT_DAMPING * w, w);
            PolePair::from_lambdas(lp, lp.conj())
        })
        .collect::<Result<Vec<_>>>()?;
    PolePairSet::new(pairs)
}

/// Initial support points for classical vector fitting: `⌊r/2⌋` conjugate
/// pairs placed as in [`init_poles`], plus one real point at `−f_hi` when `r`
/// is odd.
pub fn init_pole_set(strategy: InitStrategy, r: usize, range: (f64, f64)) -> Result<PoleSet> {
    if r < 1 {
        return Err(Error::Config("order must be at least 1".into()));
    }
    let mut lambdas = Vec::with_capacity(r);
    if r >= 2 {
        for p in init_poles(strategy, r / 2, range)?.pairs() {
            lambdas.extend([p.lambda_plus, p.lambda_minus]);
        }
    }
    if r % 2 == 1 {
        init_frequencies(strategy, 1, range)?;
        lambdas.push(Complex64::new(-range.1, 0.0));
    }
    PoleSet::new(lambdas)
}

/// Builds the diagonal second-order realization from numerator parameters.
pub fn realize_second_order(pairs: &PolePairSet, residues: &[Complex64]) -> Result<SecondOrderModel> {
    if residues.len() != pairs.len() {
        return Err(Error::Dimension("one residue per pole pair is required".into()));
    }
    let mut omega = Vec::with_capacity(pairs.len());
    let mut psi = Vec::with_capacity(pairs.len());
    let mut b = Vec::with_capacity(pairs.len());
    for (p, &res) in pairs.pairs().iter().zip(residues) {
        if p.omega.im.abs() > REALNESS_TOL * p.omega.norm() {
            return Err(Error::Realness(format!("natural frequency {} is complex", p.omega)));
        }
        if p.psi.im.abs() > REALNESS_TOL * p.psi.norm().max(1.0) {
            return Err(Error::Realness(format!("damping ratio {} is complex", p.psi)));
        }
        if res.im.abs() > REALNESS_TOL * res.norm().max(1.0) {
            return Err(Error::Realness(format!("residue {res} is complex")));
        }
        omega.push(p.omega.re);
        psi.push(p.psi.re);
        b.push(res.re);
    }
    SecondOrderModel::new(omega, psi, b)
}

fn check_samples(samples: &FrequencySampleSet, config: &IterationConfig, columns: usize) -> Result<()> {
    config.validate(samples.len(), columns)?;
    if config.enforce_realness && !samples.is_conjugate_closed() {
        return Err(Error::Config("realness enforcement needs conjugate-closed samples".into()));
    }
    Ok(())
}

fn check_init_points(points: &[Complex64], config: &IterationConfig) -> Result<()> {
    if config.enforce_stability && points.iter().any(|p| p.re >= 0.0) {
        return Err(Error::Config("initial support points must lie in the open left half-plane".into()));
    }
    if config.enforce_realness && !crate::types::is_conjugate_closed(points, 0.0) {
        return Err(Error::Config("initial support points must be closed under conjugation".into()));
    }
    Ok(())
}

fn max_error<F>(eval: F, samples: &FrequencySampleSet, report: &mut FitReport) -> f64
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    match pointwise_error_with_fallback(eval, samples) {
        Ok((errors, fallback)) => {
            report.absolute_error_fallback |= fallback;
            errors.into_iter().fold(0.0, f64::max)
        }
        Err(_) => f64::INFINITY,
    }
}

fn solve(problem: &WeightedLS, param: Option<&RealParametrization>, report: &mut FitReport) -> Result<WeightedLsSolution> {
    let sol = solve_weighted_ls(problem, param)?;
    if sol.rank_deficient {
        report.rank_deficient_solves += 1;
    }
    Ok(sol)
}

/// Classical (unstructured) vector fitting.
pub fn fit_vf(
    samples: &FrequencySampleSet,
    init: &PoleSet,
    config: &IterationConfig,
) -> Result<(FirstOrderModel, FitReport)> {
    check_samples(samples, config, 2)?;
    if init.len() != config.order {
        return Err(Error::Config(format!("{} initial points for order {}", init.len(), config.order)));
    }
    check_init_points(init.lambdas(), config)?;

    let r = config.order;
    let h = samples.values().to_vec();
    let mut poles = init.clone();
    let mut weights = vec![1.0; samples.len()];
    let mut report = FitReport::empty();

    let step = |poles: &PoleSet, weights: &[f64], report: &mut FitReport| -> Result<(WeightedLsSolution, f64)> {
        let a = assemble_unstructured(samples, poles)?;
        let problem = WeightedLS::new(a, h.clone(), weights.to_vec())?;
        let param = if config.enforce_realness {
            Some(RealParametrization::unstructured(poles)?)
        } else {
            None
        };
        let sol = solve(&problem, param.as_ref(), report)?;
        let max_w = sol.x[r..].iter().map(|w| w.norm()).fold(0.0, f64::max);
        Ok((sol, max_w))
    };

    for k in 1..=config.max_iters {
        let (sol, max_w) = step(&poles, &weights, &mut report)?;
        let numerator = FirstOrderModel::new(poles.lambdas().to_vec(), sol.x[..r].to_vec())?;
        let max_rel_err = max_error(|s| eval_first_order(&numerator, s), samples, &mut report);
        let mut record = IterationRecord {
            iteration: k,
            poles: poles.lambdas().to_vec(),
            max_den_weight: max_w,
            ls_residual: sol.residual,
            max_rel_err,
            max_pole_move: 0.0,
        };
        if max_w <= config.weight_tol {
            report.records.push(record);
            report.converged = true;
            report.weights_converged = true;
            report.termination = Termination::WeightTolerance;
            return Ok((numerator, report));
        }

        let form = UnstructuredBarycentric::new(poles.clone(), sol.x[..r].to_vec(), sol.x[r..].to_vec())?;
        let mut zeros = zeros_unstructured(poles.lambdas(), &form.den_weights)?;
        if config.enforce_stability {
            zeros = stabilize(&zeros);
        }
        if config.enforce_realness {
            zeros = conjugate_cleanup(&zeros)?;
        }
        let next = PoleSet::new(zeros)?;
        let (w, clipped) = update_weights(|s| den_unstructured(&form, s), samples)?;
        report.clipped_weights += clipped;
        weights = w;
        record.max_pole_move = max_relative_movement(poles.lambdas(), next.lambdas());
        let moved = record.max_pole_move;
        report.records.push(record);
        poles = next;
        if moved <= config.pole_move_tol {
            report.converged = true;
            report.termination = Termination::PoleMovement;
            break;
        }
    }

    let (sol, _) = step(&poles, &weights, &mut report)?;
    let model = FirstOrderModel::new(poles.lambdas().to_vec(), sol.x[..r].to_vec())?;
    Ok((model, report))
}

/// Which structured barycentric form drives the iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Structure {
    Partial,
    Full,
}

impl Structure {
    fn columns_per_order(self) -> usize {
        match self {
            Structure::Partial => 3,
            Structure::Full => 2,
        }
    }
}

struct StructuredStep {
    sol: WeightedLsSolution,
    max_w: f64,
}

fn structured_step(
    structure: Structure,
    samples: &FrequencySampleSet,
    pairs: &PolePairSet,
    weights: &[f64],
    config: &IterationConfig,
    report: &mut FitReport,
) -> Result<StructuredStep> {
    let r = pairs.len();
    let (a, param) = match structure {
        Structure::Partial => (
            assemble_so1(samples, pairs)?,
            if config.enforce_realness { Some(RealParametrization::partial(pairs)?) } else { None },
        ),
        Structure::Full => (
            assemble_so2(samples, pairs)?,
            if config.enforce_realness { Some(RealParametrization::full(pairs)?) } else { None },
        ),
    };
    let problem = WeightedLS::new(a, samples.values().to_vec(), weights.to_vec())?;
    let sol = solve(&problem, param.as_ref(), report)?;
    let max_w = sol.x[r..].iter().map(|w| w.norm()).fold(0.0, f64::max);
    Ok(StructuredStep { sol, max_w })
}

fn fit_structured(
    structure: Structure,
    samples: &FrequencySampleSet,
    init: &PolePairSet,
    config: &IterationConfig,
) -> Result<(SecondOrderModel, FitReport)> {
    check_samples(samples, config, structure.columns_per_order())?;
    if init.len() != config.order {
        return Err(Error::Config(format!("{} initial pairs for order {}", init.len(), config.order)));
    }
    check_init_points(&init.points(), config)?;

    let r = config.order;
    let mut pairs = init.clone();
    let mut weights = vec![1.0; samples.len()];
    let mut report = FitReport::empty();

    // The learned model is the numerator with the current support points.
    let numerator = |pairs: &PolePairSet, x: &[Complex64]| -> Result<SecondOrderModel> {
        realize_second_order(pairs, &x[..r])
    };
    let numerator_error = |pairs: &PolePairSet, x: &[Complex64], report: &mut FitReport| -> f64 {
        let form = crate::transfer::second_order_sum;
        let res = x[..r].to_vec();
        max_error(|s| Ok(form(pairs, &res, s)), samples, report)
    };

    for k in 1..=config.max_iters {
        let StructuredStep { sol, max_w } =
            structured_step(structure, samples, &pairs, &weights, config, &mut report)?;
        let mut record = IterationRecord {
            iteration: k,
            poles: pairs.points(),
            max_den_weight: max_w,
            ls_residual: sol.residual,
            max_rel_err: numerator_error(&pairs, &sol.x, &mut report),
            max_pole_move: 0.0,
        };
        if max_w <= config.weight_tol {
            report.records.push(record);
            report.converged = true;
            report.weights_converged = true;
            report.termination = Termination::WeightTolerance;
            let model = numerator(&pairs, &sol.x)?;
            return Ok((model, report));
        }

        let (zeros, den): (Vec<Complex64>, Box<dyn Fn(Complex64) -> Result<Complex64>>) = match structure {
            Structure::Partial => {
                let form = PartialStructuredBarycentric::new(
                    pairs.clone(),
                    sol.x[..r].to_vec(),
                    (0..r).map(|j| sol.x[r + 2 * j]).collect(),
                    (0..r).map(|j| sol.x[r + 2 * j + 1]).collect(),
                )?;
                let zeros = zeros_so1(&form)?;
                (zeros, Box::new(move |s| den_partial(&form, s)))
            }
            Structure::Full => {
                let form = FullyStructuredBarycentric::new(
                    pairs.clone(),
                    sol.x[..r].to_vec(),
                    sol.x[r..].to_vec(),
                )?;
                let zeros = zeros_so2(&form)?;
                (zeros, Box::new(move |s| den_full(&form, s)))
            }
        };
        let zeros = if config.enforce_stability { stabilize(&zeros) } else { zeros };
        let next = split_pairs(&zeros, config.enforce_realness)?;
        let (w, clipped) = update_weights(den, samples)?;
        report.clipped_weights += clipped;
        weights = w;
        record.max_pole_move = max_relative_movement(&pairs.points(), &next.points());
        let moved = record.max_pole_move;
        report.records.push(record);
        pairs = next;
        if moved <= config.pole_move_tol {
            report.converged = true;
            report.termination = Termination::PoleMovement;
            break;
        }
    }

    let StructuredStep { sol, .. } = structured_step(structure, samples, &pairs, &weights, config, &mut report)?;
    let model = numerator(&pairs, &sol.x)?;
    Ok((model, report))
}

/// Second-order vector fitting with the partially structured barycentric
/// form. The model is realized from the numerator whether or not the
/// denominator weights converged; the report tells which.
pub fn fit_sovf1(
    samples: &FrequencySampleSet,
    init: &PolePairSet,
    config: &IterationConfig,
) -> Result<(SecondOrderModel, FitReport)> {
    fit_structured(Structure::Partial, samples, init, config)
}

/// Second-order vector fitting with the fully structured barycentric form;
/// support points move to the eigenvalues of the quadratic pencil.
pub fn fit_sovf2(
    samples: &FrequencySampleSet,
    init: &PolePairSet,
    config: &IterationConfig,
) -> Result<(SecondOrderModel, FitReport)> {
    fit_structured(Structure::Full, samples, init, config)
}

/// Pointwise relative errors of a second-order model (absolute at zero
/// measurements).
pub fn second_order_errors(model: &SecondOrderModel, samples: &FrequencySampleSet) -> Result<Vec<f64>> {
    Ok(pointwise_error_with_fallback(|s| eval_second_order(model, s), samples)?.0)
}

/// Pointwise relative errors of a first-order model (absolute at zero
/// measurements).
pub fn first_order_errors(model: &FirstOrderModel, samples: &FrequencySampleSet) -> Result<Vec<f64>> {
    Ok(pointwise_error_with_fallback(|s| eval_first_order(model, s), samples)?.0)
}
