//! Synthetic modally damped truth systems: Rayleigh-damped spring-mass
//! chains, exact frequency-response sampling and modal decomposition.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::types::{FrequencySampleSet, SecondOrderModel};

/// Tolerance on the off-diagonal part of `XᵀEX` relative to its diagonal.
pub const MODAL_DAMPING_TOL: f64 = 1e-8;

/// `M q̈ + E q̇ + K q = Bu u`, `y = Cp q`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSecondOrderSystem {
    pub m: DMatrix<f64>,
    pub e: DMatrix<f64>,
    pub k: DMatrix<f64>,
    pub bu: DVector<f64>,
    pub cp: DVector<f64>,
}

impl DenseSecondOrderSystem {
    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    /// Relative size of `E·M⁻¹·K − K·M⁻¹·E`.
    pub fn modal_damping_defect(&self) -> Result<f64> {
        let m_inv = self
            .m
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Structure("mass matrix is singular".into()))?;
        let lhs = &self.e * &m_inv * &self.k;
        let rhs = &self.k * &m_inv * &self.e;
        let scale = lhs.norm().max(rhs.norm()).max(f64::MIN_POSITIVE);
        Ok((lhs - rhs).norm() / scale)
    }

    /// `Cp (s²M + sE + K)⁻¹ Bu` by a dense LU solve.
    pub fn transfer(&self, s: Complex64) -> Result<Complex64> {
        let n = self.dim();
        let s2 = s * s;
        let a = DMatrix::from_fn(n, n, |i, j| {
            s2 * self.m[(i, j)] + s * self.e[(i, j)] + Complex64::new(self.k[(i, j)], 0.0)
        });
        let b = DVector::from_fn(n, |i, _| Complex64::new(self.bu[i], 0.0));
        let x = a.lu().solve(&b).ok_or(Error::Resonance(s))?;
        if x.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Resonance(s));
        }
        Ok(x.iter().zip(self.cp.iter()).map(|(xi, c)| xi * *c).sum())
    }
}

/// Modal data of a modally damped system with `YᵀMX = Ω⁻¹`, `YᵀKX = Ω`,
/// `YᵀEX = 2Ψ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalDecomposition {
    pub omega: Vec<f64>,
    pub psi: Vec<f64>,
    pub residues: Vec<f64>,
    pub x: DMatrix<f64>,
    pub y: DMatrix<f64>,
}

impl ModalDecomposition {
    /// Structured pole-residue model `Σ ωⱼφⱼ/(s² + 2ψⱼωⱼs + ωⱼ²)`.
    pub fn to_model(&self) -> Result<SecondOrderModel> {
        SecondOrderModel::new(self.omega.clone(), self.psi.clone(), self.residues.clone())
    }
}

/// Chain of `n` masses `m0` joined by springs `k0`, fixed at both ends, with
/// Rayleigh damping `E = αM + βK`. Input at the first mass, output at the
/// last.
pub fn make_rayleigh_chain(n: usize, alpha: f64, beta: f64, m0: f64, k0: f64) -> Result<DenseSecondOrderSystem> {
    if n == 0 {
        return Err(Error::Config("chain needs at least one mass".into()));
    }
    if !(m0 > 0.0 && k0 > 0.0 && alpha >= 0.0 && beta >= 0.0) {
        return Err(Error::Config("chain parameters must be positive (damping nonnegative)".into()));
    }
    let m = DMatrix::identity(n, n) * m0;
    let k = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            2.0 * k0
        } else if i.abs_diff(j) == 1 {
            -k0
        } else {
            0.0
        }
    });
    let e = &m * alpha + &k * beta;
    let mut bu = DVector::zeros(n);
    bu[0] = 1.0;
    let mut cp = DVector::zeros(n);
    cp[n - 1] = 1.0;
    Ok(DenseSecondOrderSystem { m, e, k, bu, cp })
}

/// Optional multiplicative complex Gaussian noise `h ← h·(1 + σ·z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Noise {
    pub relative_sigma: f64,
    pub seed: u64,
}

/// Samples the transfer function at `points`. With `conj_close` the set is
/// closed under conjugation afterwards; noise, if any, is applied before the
/// closure so the closed set stays exactly symmetric.
pub fn sample_dense(
    system: &DenseSecondOrderSystem,
    points: &[Complex64],
    conj_close: bool,
    noise: Option<Noise>,
) -> Result<FrequencySampleSet> {
    let mut values = points
        .iter()
        .map(|&s| system.transfer(s))
        .collect::<Result<Vec<_>>>()?;
    if let Some(noise) = noise {
        apply_noise(&mut values, noise)?;
    }
    let set = FrequencySampleSet::new(points.to_vec(), values)?;
    if conj_close {
        set.close_under_conjugation()
    } else {
        Ok(set)
    }
}

/// Samples any transfer function evaluator, e.g. a stored model.
pub fn sample_fn<F>(eval: F, points: &[Complex64], conj_close: bool, noise: Option<Noise>) -> Result<FrequencySampleSet>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut values = points.iter().map(|&s| eval(s)).collect::<Result<Vec<_>>>()?;
    if let Some(noise) = noise {
        apply_noise(&mut values, noise)?;
    }
    let set = FrequencySampleSet::new(points.to_vec(), values)?;
    if conj_close {
        set.close_under_conjugation()
    } else {
        Ok(set)
    }
}

fn apply_noise(values: &mut [Complex64], noise: Noise) -> Result<()> {
    let normal = Normal::new(0.0, noise.relative_sigma / std::f64::consts::SQRT_2)
        .map_err(|e| Error::Config(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    for v in values.iter_mut() {
        let z = Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng));
        *v *= 1.0 + z;
    }
    Ok(())
}

/// Modal decomposition of a symmetric-definite, modally damped system.
///
/// Solves `KX = MXΩ²` through the Cholesky factor of `M`, scales the
/// eigenvectors so that `XᵀMX = Ω⁻¹` and `XᵀKX = Ω` (with `Y = X`), and
/// reads the damping ratios off `XᵀEX = 2Ψ`.
pub fn modal_decompose(system: &DenseSecondOrderSystem) -> Result<ModalDecomposition> {
    let n = system.dim();
    let chol = system
        .m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Structure("mass matrix is not positive definite".into()))?;
    let l = chol.l();
    let l_inv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Structure("mass matrix is singular".into()))?;
    let s = &l_inv * &system.k * l_inv.transpose();
    let s = (&s + s.transpose()) * 0.5;
    let eig = s.symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    if order.iter().any(|&j| eig.eigenvalues[j] <= 0.0) {
        return Err(Error::Structure("stiffness matrix is not positive definite".into()));
    }

    let omega: Vec<f64> = order.iter().map(|&j| eig.eigenvalues[j].sqrt()).collect();
    let vecs = DMatrix::from_fn(n, n, |i, c| eig.eigenvectors[(i, order[c])]);
    let mut x = l_inv.transpose() * vecs;
    for (c, w) in omega.iter().enumerate() {
        x.column_mut(c).scale_mut(1.0 / w.sqrt());
    }
    let y = x.clone();

    let ete = y.transpose() * &system.e * &x;
    let diag_scale = (0..n).map(|j| ete[(j, j)].abs()).fold(0.0, f64::max);
    let offdiag = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| ete[(i, j)].abs())
        .fold(0.0, f64::max);
    if offdiag > MODAL_DAMPING_TOL * diag_scale.max(f64::MIN_POSITIVE) && offdiag > 0.0 {
        return Err(Error::Structure(format!(
            "damping is not modal: off-diagonal {offdiag:e} vs diagonal {diag_scale:e}"
        )));
    }
    let psi: Vec<f64> = (0..n).map(|j| 0.5 * ete[(j, j)]).collect();

    let cx = system.cp.transpose() * &x;
    let yb = y.transpose() * &system.bu;
    let residues: Vec<f64> = (0..n).map(|j| cx[j] * yb[j]).collect();

    Ok(ModalDecomposition {
        omega,
        psi,
        residues,
        x,
        y,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

/// `count` points `iω` on the positive imaginary axis, endpoints included.
pub fn make_point_grid(f_lo: f64, f_hi: f64, count: usize, spacing: Spacing) -> Result<Vec<Complex64>> {
    if !(f_lo < f_hi && f_lo.is_finite() && f_hi.is_finite()) {
        return Err(Error::Range(format!("[{f_lo}, {f_hi}]")));
    }
    if count < 2 {
        return Err(Error::Range(format!("grid needs at least 2 points, got {count}")));
    }
    let last = (count - 1) as f64;
    let freqs: Vec<f64> = match spacing {
        Spacing::Linear => (0..count)
            .map(|k| {
                if k + 1 == count {
                    f_hi
                } else {
                    f_lo + (f_hi - f_lo) * k as f64 / last
                }
            })
            .collect(),
        Spacing::Log => {
            if f_lo <= 0.0 {
                return Err(Error::Range("log spacing needs a positive lower bound".into()));
            }
            let (a, b) = (f_lo.log10(), f_hi.log10());
            (0..count)
                .map(|k| {
                    if k == 0 {
                        f_lo
                    } else if k + 1 == count {
                        f_hi
                    } else {
                        10f64.powf(a + (b - a) * k as f64 / last)
                    }
                })
                .collect()
        }
    };
    Ok(freqs.into_iter().map(|w| Complex64::new(0.0, w)).collect())
}
