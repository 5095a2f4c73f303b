//! Independent reference implementations used by the integration tests and
//! the acceptance suite. Nothing here calls into the library's numerics.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

pub type C = Complex64;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// Polynomial product, coefficients in ascending powers.
pub fn poly_mul(a: &[C], b: &[C]) -> Vec<C> {
    let mut out = vec![C::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn poly_add(a: &[C], b: &[C]) -> Vec<C> {
    let mut out = vec![C::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] += x;
    }
    out
}

pub fn poly_eval(p: &[C], s: C) -> C {
    p.iter().rev().fold(C::zero(), |acc, &k| acc * s + k)
}

fn poly_deriv(p: &[C]) -> Vec<C> {
    p.iter().enumerate().skip(1).map(|(k, &x)| x * k as f64).collect()
}

/// Roots by Aberth–Ehrlich iteration followed by Newton polishing.
pub fn poly_roots(p: &[C]) -> Vec<C> {
    let mut p = p.to_vec();
    while p.last().is_some_and(|x| x.norm() == 0.0) {
        p.pop();
    }
    let n = p.len() - 1;
    if n == 0 {
        return vec![];
    }
    let lead = p[n];
    let p: Vec<C> = p.iter().map(|x| x / lead).collect();
    let dp = poly_deriv(&p);
    // Fujiwara-style radius for the starting circle
    let radius = (0..n)
        .map(|k| p[k].norm().powf(1.0 / (n - k) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<C> = (0..n)
        .map(|k| C::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..2000 {
        let mut biggest = 0.0f64;
        for k in 0..n {
            let ratio = poly_eval(&p, z[k]) / poly_eval(&dp, z[k]);
            let repulsion: C = (0..n).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let step = ratio / (1.0 - ratio * repulsion);
            if step.is_finite() {
                z[k] -= step;
                biggest = biggest.max(step.norm() / z[k].norm().max(1e-300));
            }
        }
        if biggest < 1e-15 {
            break;
        }
    }
    for zk in z.iter_mut() {
        for _ in 0..3 {
            let step = poly_eval(&p, *zk) / poly_eval(&dp, *zk);
            if step.is_finite() && step.norm() < 1e-6 * zk.norm().max(1.0) {
                *zk -= step;
            }
        }
    }
    z
}

/// Numerator of `1 + Σ ϕⱼ/(s − λⱼ)` over the common denominator.
pub fn unstructured_numerator(lambdas: &[C], phi: &[C]) -> Vec<C> {
    let linear = |l: C| vec![-l, C::new(1.0, 0.0)];
    let mut total = lambdas
        .iter()
        .fold(vec![C::new(1.0, 0.0)], |acc, &l| poly_mul(&acc, &linear(l)));
    for j in 0..lambdas.len() {
        let term = lambdas
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != j)
            .fold(vec![phi[j]], |acc, (_, &l)| poly_mul(&acc, &linear(l)));
        total = poly_add(&total, &term);
    }
    total
}

/// Zeros of `1 + Σ ϕⱼ/(s − λⱼ)` via the expanded polynomial.
pub fn companion_oracle(lambdas: &[C], phi: &[C]) -> Vec<C> {
    poly_roots(&unstructured_numerator(lambdas, phi))
}

/// Determinant by LU with partial pivoting.
pub fn det(mut m: DMatrix<C>) -> C {
    let n = m.nrows();
    let mut d = C::new(1.0, 0.0);
    for k in 0..n {
        let piv = (k..n).max_by(|&a, &b| m[(a, k)].norm().total_cmp(&m[(b, k)].norm())).unwrap();
        if m[(piv, k)].norm() == 0.0 {
            return C::zero();
        }
        if piv != k {
            m.swap_rows(piv, k);
            d = -d;
        }
        d *= m[(k, k)];
        for i in k + 1..n {
            let f = m[(i, k)] / m[(k, k)];
            for j in k..n {
                let v = m[(k, j)];
                m[(i, j)] -= f * v;
            }
        }
    }
    d
}

/// `P(λ) = λ²·diag(1/ω) + λ·diag(2ψ) + diag(ω) + ϕ·1ᵀ`.
pub fn quadratic_pencil(omega: &[C], psi: &[C], phi: &[C], s: C) -> DMatrix<C> {
    let r = omega.len();
    DMatrix::from_fn(r, r, |i, j| {
        let diag = if i == j { s * s / omega[i] + 2.0 * psi[i] * s + omega[i] } else { C::zero() };
        diag + phi[i]
    })
}

/// Coefficients of `det P(λ)` recovered from determinants sampled on a
/// circle of radius `rho`, then its roots.
pub fn determinant_grid_oracle(omega: &[C], psi: &[C], phi: &[C], rho: f64) -> Vec<C> {
    let deg = 2 * omega.len();
    let n = deg + 1;
    let nodes: Vec<C> = (0..n)
        .map(|k| C::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    let values: Vec<C> = nodes.iter().map(|&u| det(quadratic_pencil(omega, psi, phi, u * rho))).collect();
    let coeffs: Vec<C> = (0..n)
        .map(|m| {
            let sum: C = (0..n).map(|k| values[k] * nodes[k].powu(m as u32).conj()).sum();
            sum / n as f64 / rho.powi(m as i32)
        })
        .collect();
    poly_roots(&coeffs[..=deg])
}

/// Backward error `‖P x‖ / (scale ‖x‖)` of an approximate null vector found
/// by two steps of inverse iteration. `scale` is the coefficient-norm
/// weighting of the pencil at the evaluation point.
pub fn pencil_residual(m: DMatrix<C>, scale: f64) -> f64 {
    let n = m.nrows();
    let lu = m.clone().lu();
    let mut x = nalgebra::DVector::from_fn(n, |i, _| C::new(1.0, 0.1 * i as f64));
    for _ in 0..2 {
        match lu.solve(&x) {
            Some(y) if y.iter().all(|v| v.is_finite()) => {
                let ny = y.norm();
                if ny == 0.0 {
                    return 0.0;
                }
                x = y / C::new(ny, 0.0);
            }
            _ => return 0.0,
        }
    }
    (&m * &x).norm() / (scale * x.norm())
}

/// `|z|²‖M‖ + |z|‖E‖ + ‖K + ϕ·1ᵀ‖` in the Frobenius norm.
pub fn quadratic_pencil_scale(omega: &[C], psi: &[C], phi: &[C], z: C) -> f64 {
    let fro = |v: Vec<C>| v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let r = omega.len();
    let k = DMatrix::from_fn(r, r, |i, j| if i == j { omega[i] + phi[i] } else { phi[i] });
    z.norm_sqr() * fro(omega.iter().map(|w| 1.0 / w).collect())
        + z.norm() * fro(psi.iter().map(|p| 2.0 * p).collect())
        + k.norm()
}

/// Residual of `z` as an eigenvalue of `diag(λ) − ϕ·1ᵀ`.
pub fn rank_one_residual(lambdas: &[C], phi: &[C], z: C) -> f64 {
    let n = lambdas.len();
    let a = DMatrix::from_fn(n, n, |i, j| if i == j { lambdas[i] - phi[i] } else { -phi[i] });
    let shifted = DMatrix::from_fn(n, n, |i, j| if i == j { a[(i, j)] - z } else { a[(i, j)] });
    pencil_residual(shifted, a.norm() + z.norm() * (n as f64).sqrt())
}

/// Greedy nearest matching; returns the worst relative mismatch.
pub fn match_sets(expected: &[C], got: &[C]) -> f64 {
    if expected.len() != got.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; got.len()];
    let mut worst = 0.0f64;
    let mut order: Vec<usize> = (0..expected.len()).collect();
    order.sort_by(|&a, &b| expected[a].re.total_cmp(&expected[b].re).then(expected[a].im.total_cmp(&expected[b].im)));
    for i in order {
        let e = expected[i];
        let (j, d) = (0..got.len())
            .filter(|&j| !used[j])
            .map(|j| (j, (got[j] - e).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d / e.norm().max(1.0));
    }
    worst
}

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite input")
}

/// Exact solution of the normal equations `AᵀA x = Aᵀb` for a real system.
pub fn exact_normal_equations(a: &DMatrix<f64>, b: &[f64]) -> Vec<f64> {
    let (m, n) = a.shape();
    let ar: Vec<Vec<BigRational>> = (0..m).map(|i| (0..n).map(|j| rat(a[(i, j)])).collect()).collect();
    let br: Vec<BigRational> = b.iter().map(|&x| rat(x)).collect();
    let mut g: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); n + 1]; n];
    for p in 0..n {
        for q in p..n {
            let mut acc = BigRational::zero();
            for row in &ar {
                acc += &row[p] * &row[q];
            }
            g[q][p] = acc.clone();
            g[p][q] = acc;
        }
        let mut acc = BigRational::zero();
        for (row, bi) in ar.iter().zip(&br) {
            acc += &row[p] * bi;
        }
        g[p][n] = acc;
    }
    for k in 0..n {
        let piv = (k..n).find(|&i| !g[i][k].is_zero()).expect("normal matrix is singular");
        g.swap(k, piv);
        for i in 0..n {
            if i == k || g[i][k].is_zero() {
                continue;
            }
            let f = &g[i][k] / &g[k][k];
            for j in k..=n {
                let v = &f * &g[k][j];
                g[i][j] -= v;
            }
        }
    }
    (0..n)
        .map(|k| {
            let v = &g[k][n] / &g[k][k];
            v.to_f64().unwrap_or_else(|| ratio_to_f64(&v))
        })
        .collect()
}

fn ratio_to_f64(v: &BigRational) -> f64 {
    let num: &BigInt = v.numer();
    let den: &BigInt = v.denom();
    num.to_f64().unwrap() / den.to_f64().unwrap()
}

/// Column of the real-unknown design for one block of a parametrization.
pub enum Unknown {
    Real(usize),
    Pair(usize, usize),
    Complex(usize),
}

/// Exact weighted least squares over a complex matrix with the given
/// unknown layout; returns the complex solution vector.
pub fn ls_oracle(a: &DMatrix<C>, rhs: &[C], weights: &[f64], layout: &[Unknown]) -> Vec<C> {
    let rows = a.nrows();
    let i = C::new(0.0, 1.0);
    let mut cols: Vec<Vec<C>> = Vec::new();
    for u in layout {
        match *u {
            Unknown::Real(j) => cols.push(a.column(j).iter().copied().collect()),
            Unknown::Complex(j) => {
                cols.push(a.column(j).iter().copied().collect());
                cols.push(a.column(j).iter().map(|x| i * x).collect());
            }
            Unknown::Pair(p, m) => {
                cols.push((0..rows).map(|r| a[(r, p)] + a[(r, m)]).collect());
                cols.push((0..rows).map(|r| i * (a[(r, p)] - a[(r, m)])).collect());
            }
        }
    }
    let n = cols.len();
    let big = DMatrix::from_fn(2 * rows, n, |r, k| {
        if r < rows {
            cols[k][r].re * weights[r]
        } else {
            cols[k][r - rows].im * weights[r - rows]
        }
    });
    let b: Vec<f64> = (0..2 * rows)
        .map(|r| if r < rows { rhs[r].re * weights[r] } else { rhs[r - rows].im * weights[r - rows] })
        .collect();
    let t = exact_normal_equations(&big, &b);
    let mut x = vec![C::zero(); a.ncols()];
    let mut k = 0;
    for u in layout {
        match *u {
            Unknown::Real(j) => {
                x[j] = C::new(t[k], 0.0);
                k += 1;
            }
            Unknown::Complex(j) => {
                x[j] = C::new(t[k], t[k + 1]);
                k += 2;
            }
            Unknown::Pair(p, m) => {
                x[p] = C::new(t[k], t[k + 1]);
                x[m] = C::new(t[k], -t[k + 1]);
                k += 2;
            }
        }
    }
    x
}

/// `H(s) = Σ bⱼ / (s²/ωⱼ + 2ψⱼ s + ωⱼ)` through a dense linear solve of the
/// full diagonal pencil.
pub fn dense_second_order(omega: &[f64], psi: &[f64], b: &[f64], s: C) -> C {
    let r = omega.len();
    let p = DMatrix::from_fn(r, r, |i, j| {
        if i == j { s * s / omega[i] + 2.0 * psi[i] * s + omega[i] } else { C::zero() }
    });
    let rhs = nalgebra::DVector::from_iterator(r, b.iter().map(|&x| C::new(x, 0.0)));
    let x = p.lu().solve(&rhs).expect("pencil is singular");
    x.iter().sum()
}

/// Random well-separated stable conjugate pairs `(λ⁺, λ⁻)` with natural
/// frequencies in `[lo, hi]` and damping ratios in `[z_lo, z_hi]`.
pub fn random_stable_pairs<R: Rng>(rng: &mut R, r: usize, lo: f64, hi: f64, z_lo: f64, z_hi: f64) -> Vec<(C, C)> {
    let mut freqs: Vec<f64> = Vec::new();
    while freqs.len() < r {
        let w = lo * (hi / lo).powf(rng.random::<f64>());
        if freqs.iter().all(|f| (f - w).abs() > 0.05 * w) {
            freqs.push(w);
        }
    }
    freqs.sort_by(f64::total_cmp);
    freqs
        .into_iter()
        .map(|w| {
            let z = rng.random_range(z_lo..z_hi);
            let l = C::new(-z * w, w * (1.0 - z * z).sqrt());
            (l, l.conj())
        })
        .collect()
}

pub fn random_complex<R: Rng>(rng: &mut R, scale: f64) -> C {
    C::new(rng.random_range(-1.0..1.0) * scale, rng.random_range(-1.0..1.0) * scale)
}
