//! Dense kernels: eigenvalues of small nonsymmetric matrices and a
//! column-pivoted Householder least-squares solver with column equilibration.

use nalgebra::{ComplexField, DMatrix, DVector, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Condition estimate above which a least-squares system counts as
/// numerically rank deficient.
pub const RANK_DEFICIENCY_THRESHOLD: f64 = 1e14;

const SCHUR_MAX_ITERS: usize = 100_000;

/// Diagonal similarity scaling by powers of two (no permutations), in place.
fn balance<T>(m: &mut DMatrix<T>)
where
    T: ComplexField<RealField = f64> + Copy,
{
    let n = m.nrows();
    let radix = 2.0f64;
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..n {
                if j != i {
                    col += m[(j, i)].norm1();
                    row += m[(i, j)].norm1();
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let sum = col + row;
            let mut f = 1.0;
            let mut c = col;
            let mut r = row;
            while c < r / radix {
                c *= radix;
                r /= radix;
                f *= radix;
            }
            while c >= r * radix {
                c /= radix;
                r *= radix;
                f /= radix;
            }
            if (c + r) < 0.95 * sum {
                converged = false;
                for j in 0..n {
                    m[(i, j)] = m[(i, j)].unscale(f);
                    m[(j, i)] = m[(j, i)].scale(f);
                }
            }
        }
    }
}

/// Eigenvalues of a real square matrix. Complex eigenvalues come out in exact
/// conjugate pairs.
pub fn eigenvalues_real(mut m: DMatrix<f64>) -> Result<Vec<Complex64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenSolver);
    }
    if m.nrows() == 1 {
        return Ok(vec![Complex64::new(m[(0, 0)], 0.0)]);
    }
    balance(&mut m);
    let schur = Schur::try_new(m, f64::EPSILON, SCHUR_MAX_ITERS).ok_or(Error::EigenSolver)?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Eigenvalues of a complex square matrix.
pub fn eigenvalues_complex(mut m: DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    if m.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::EigenSolver);
    }
    if m.nrows() == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    balance(&mut m);
    let schur = Schur::try_new(m, f64::EPSILON, SCHUR_MAX_ITERS).ok_or(Error::EigenSolver)?;
    let (_, t) = schur.unpack();
    Ok(t.diagonal().iter().copied().collect())
}

/// Result of a least-squares solve.
#[derive(Debug, Clone, PartialEq)]
pub struct LsSolution<T> {
    pub x: Vec<T>,
    /// Ratio of the largest to the smallest pivot of the equilibrated system.
    pub condition_estimate: f64,
    pub rank_deficient: bool,
}

/// Minimizes `‖Ax − b‖₂` over real `x`.
///
/// Columns are scaled to unit 2-norm, the scaled matrix is factored by a
/// Householder QR with column pivoting, and the solution is unscaled. When
/// the pivot ratio exceeds [`RANK_DEFICIENCY_THRESHOLD`] the minimum-norm
/// solution of the truncated problem is returned instead.
pub fn solve_least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<LsSolution<f64>> {
    let (m, n) = a.shape();
    if b.len() != m {
        return Err(Error::Dimension("right-hand side length differs from row count".into()));
    }
    if n == 0 {
        return Ok(LsSolution {
            x: Vec::new(),
            condition_estimate: 1.0,
            rank_deficient: false,
        });
    }
    if m < n {
        return Err(Error::Dimension(format!("{m} rows cannot determine {n} unknowns")));
    }
    if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Dimension("least-squares data is not finite".into()));
    }

    let scales: Vec<f64> = (0..n)
        .map(|j| {
            let norm = a.column(j).norm();
            if norm > 0.0 {
                1.0 / norm
            } else {
                1.0
            }
        })
        .collect();
    let mut r = a.clone();
    for (j, &s) in scales.iter().enumerate() {
        r.column_mut(j).scale_mut(s);
    }
    let scaled = r.clone();
    let mut rhs = b.clone();
    let mut perm: Vec<usize> = (0..n).collect();

    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| {
                let ni = r.view((k, i), (m - k, 1)).norm_squared();
                let nj = r.view((k, j), (m - k, 1)).norm_squared();
                ni.total_cmp(&nj).then(j.cmp(&i))
            })
            .unwrap_or(k);
        if pivot != k {
            r.swap_columns(k, pivot);
            perm.swap(k, pivot);
        }
        let norm = r.view((k, k), (m - k, 1)).norm();
        if norm == 0.0 {
            continue;
        }
        let alpha = if r[(k, k)] >= 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..m).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        if vtv == 0.0 {
            continue;
        }
        let beta = 2.0 / vtv;
        for j in k + 1..n {
            let dot: f64 = v.iter().enumerate().map(|(i, vi)| vi * r[(k + i, j)]).sum();
            let f = beta * dot;
            for (i, vi) in v.iter().enumerate() {
                r[(k + i, j)] -= f * vi;
            }
        }
        let dot: f64 = v.iter().enumerate().map(|(i, vi)| vi * rhs[k + i]).sum();
        let f = beta * dot;
        for (i, vi) in v.iter().enumerate() {
            rhs[k + i] -= f * vi;
        }
        r[(k, k)] = alpha;
        for i in k + 1..m {
            r[(i, k)] = 0.0;
        }
    }

    let largest = r[(0, 0)].abs();
    let smallest = (0..n).map(|k| r[(k, k)].abs()).fold(f64::INFINITY, f64::min);
    let condition_estimate = if smallest > 0.0 {
        largest / smallest
    } else {
        f64::INFINITY
    };

    let mut y = vec![0.0; n];
    // NaN counts as rank deficient
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    let rank_deficient = !(condition_estimate <= RANK_DEFICIENCY_THRESHOLD);
    if !rank_deficient {
        for k in (0..n).rev() {
            let mut acc = rhs[k];
            for j in k + 1..n {
                acc -= r[(k, j)] * y[j];
            }
            y[k] = acc / r[(k, k)];
        }
        let mut x = vec![0.0; n];
        for (k, &p) in perm.iter().enumerate() {
            x[p] = y[k] * scales[p];
        }
        return Ok(LsSolution {
            x,
            condition_estimate,
            rank_deficient,
        });
    }

    // Minimum-norm solution of the equilibrated system, truncated at the
    // same relative threshold.
    let svd = scaled.svd(true, true);
    let cutoff = svd.singular_values.max() / RANK_DEFICIENCY_THRESHOLD;
    let z = svd
        .solve(b, cutoff)
        .map_err(|e| Error::Dimension(e.to_string()))?;
    let x = z.iter().zip(&scales).map(|(zi, s)| zi * s).collect();
    Ok(LsSolution {
        x,
        condition_estimate,
        rank_deficient,
    })
}

/// Minimizes `‖Ax − b‖₂` over complex `x` through the real embedding
/// `[Re A, −Im A; Im A, Re A]`.
pub fn solve_least_squares_complex(
    a: &DMatrix<Complex64>,
    b: &DVector<Complex64>,
) -> Result<LsSolution<Complex64>> {
    let (m, n) = a.shape();
    let mut big = DMatrix::zeros(2 * m, 2 * n);
    let mut rhs = DVector::zeros(2 * m);
    for i in 0..m {
        for j in 0..n {
            let v = a[(i, j)];
            big[(i, j)] = v.re;
            big[(i, n + j)] = -v.im;
            big[(m + i, j)] = v.im;
            big[(m + i, n + j)] = v.re;
        }
        rhs[i] = b[i].re;
        rhs[m + i] = b[i].im;
    }
    let sol = solve_least_squares(&big, &rhs)?;
    let x = (0..n)
        .map(|j| Complex64::new(sol.x[j], sol.x[n + j]))
        .collect();
    Ok(LsSolution {
        x,
        condition_estimate: sol.condition_estimate,
        rank_deficient: sol.rank_deficient,
    })
}
