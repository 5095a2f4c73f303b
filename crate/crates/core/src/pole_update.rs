//! Relocation of support points: zeros of the current denominator, stability
//! reflection, and splitting into pole pairs.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues_complex, eigenvalues_real};
use crate::types::{
    pair_from_lambdas, FullyStructuredBarycentric, PartialStructuredBarycentric, PolePair,
    PolePairSet, SNAP_REL_TOL,
};

/// Relative tolerance when matching a point with the conjugate of another.
const CONJ_MATCH_TOL: f64 = 1e-8;

/// Zeros of `d(s) = 1 + Σ ϕⱼ/(s − λⱼ)`, computed as the eigenvalues of
/// `diag(λ) − ϕ·1ᵀ`.
///
/// When the points and weights are conjugate-symmetric the equivalent real
/// realization is used, so complex zeros come out in exact conjugate pairs.
pub fn zeros_unstructured(lambdas: &[Complex64], den_weights: &[Complex64]) -> Result<Vec<Complex64>> {
    if lambdas.len() != den_weights.len() {
        return Err(Error::Dimension("points and weights differ in length".into()));
    }
    if !crate::types::all_distinct(lambdas) {
        return Err(Error::DuplicatePoints);
    }
    match real_blocks(lambdas, den_weights) {
        Some(blocks) => eigenvalues_real(real_rank_one_update(&blocks)),
        None => {
            let m = lambdas.len();
            let mat = DMatrix::from_fn(m, m, |i, j| {
                let diag = if i == j { lambdas[i] } else { Complex64::new(0.0, 0.0) };
                diag - den_weights[i]
            });
            eigenvalues_complex(mat)
        }
    }
}

enum Block {
    Real { lambda: f64, weight: f64 },
    Pair { lambda: Complex64, weight: Complex64 },
}

fn real_blocks(lambdas: &[Complex64], weights: &[Complex64]) -> Option<Vec<Block>> {
    let mut used = vec![false; lambdas.len()];
    let mut blocks = Vec::new();
    for i in 0..lambdas.len() {
        if used[i] {
            continue;
        }
        let (l, w) = (lambdas[i], weights[i]);
        used[i] = true;
        if l.im == 0.0 {
            if w.im != 0.0 {
                return None;
            }
            blocks.push(Block::Real { lambda: l.re, weight: w.re });
            continue;
        }
        let j = (0..lambdas.len()).find(|&j| !used[j] && lambdas[j] == l.conj())?;
        if weights[j] != w.conj() {
            return None;
        }
        used[j] = true;
        let (lambda, weight) = if l.im > 0.0 { (l, w) } else { (l.conj(), w.conj()) };
        blocks.push(Block::Pair { lambda, weight });
    }
    Some(blocks)
}

/// Real `A − g·cᵀ` whose eigenvalues are the zeros of the conjugate-symmetric
/// denominator. A pair `σ ± iω` with weights `a ± ib` becomes the block
/// `[[σ, ω], [−ω, σ]]` with `c = [1, 0]` and `g = [2a, −2b]`.
fn real_rank_one_update(blocks: &[Block]) -> DMatrix<f64> {
    let n: usize = blocks
        .iter()
        .map(|b| match b {
            Block::Real { .. } => 1,
            Block::Pair { .. } => 2,
        })
        .sum();
    let mut a = DMatrix::zeros(n, n);
    let mut g = vec![0.0; n];
    let mut c = vec![0.0; n];
    let mut k = 0;
    for b in blocks {
        match *b {
            Block::Real { lambda, weight } => {
                a[(k, k)] = lambda;
                g[k] = weight;
                c[k] = 1.0;
                k += 1;
            }
            Block::Pair { lambda, weight } => {
                a[(k, k)] = lambda.re;
                a[(k, k + 1)] = lambda.im;
                a[(k + 1, k)] = -lambda.im;
                a[(k + 1, k + 1)] = lambda.re;
                g[k] = 2.0 * weight.re;
                g[k + 1] = -2.0 * weight.im;
                c[k] = 1.0;
                k += 2;
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] -= g[i] * c[j];
        }
    }
    a
}

/// Zeros of the partially structured denominator over all `2r` points.
pub fn zeros_so1(form: &PartialStructuredBarycentric) -> Result<Vec<Complex64>> {
    zeros_unstructured(&form.pairs.points(), &form.den_weights_interleaved())
}

/// Zeros of the fully structured denominator: the `2r` eigenvalues of the
/// quadratic pencil `λ²M + λE + (K + ϕ·1ᵀ)`, with `M = diag(1/ω)`,
/// `E = diag(2ψ)`, `K = diag(ω)`, via the first companion linearization
/// `[[0, I], [−M⁻¹(K + ϕ·1ᵀ), −M⁻¹E]]`.
pub fn zeros_so2(form: &FullyStructuredBarycentric) -> Result<Vec<Complex64>> {
    let pairs = form.pairs.pairs();
    let r = pairs.len();
    if pairs.iter().any(|p| p.omega == Complex64::new(0.0, 0.0)) {
        return Err(Error::SingularMass);
    }
    let omega: Vec<Complex64> = pairs.iter().map(|p| p.omega).collect();
    let psi: Vec<Complex64> = pairs.iter().map(|p| p.psi).collect();
    let phi = &form.den_residues;
    let companion = |i: usize, j: usize| -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        match (i < r, j < r) {
            (true, true) => zero,
            (true, false) => {
                if j - r == i {
                    Complex64::new(1.0, 0.0)
                } else {
                    zero
                }
            }
            (false, true) => {
                let row = i - r;
                let stiff = if row == j { omega[row] } else { zero };
                -omega[row] * (stiff + phi[row])
            }
            (false, false) => {
                let row = i - r;
                if j - r == row {
                    -omega[row] * 2.0 * psi[row]
                } else {
                    zero
                }
            }
        }
    };
    let is_real = omega
        .iter()
        .chain(&psi)
        .chain(phi.iter())
        .all(|v| v.im == 0.0);
    if is_real {
        eigenvalues_real(DMatrix::from_fn(2 * r, 2 * r, |i, j| companion(i, j).re))
    } else {
        eigenvalues_complex(DMatrix::from_fn(2 * r, 2 * r, companion))
    }
}

/// Reflects right-half-plane points into the left half-plane and pushes
/// points on the imaginary axis slightly to the left.
pub fn stabilize(points: &[Complex64]) -> Vec<Complex64> {
    points
        .iter()
        .map(|p| {
            if p.re > 0.0 {
                Complex64::new(-p.re, p.im)
            } else if p.re == 0.0 {
                Complex64::new(-1e-8 * p.im.abs().max(1.0), p.im)
            } else {
                *p
            }
        })
        .collect()
}

/// Largest relative displacement of the new points from the nearest old
/// point.
pub fn max_relative_movement(old: &[Complex64], new: &[Complex64]) -> f64 {
    new.iter()
        .map(|n| {
            old.iter()
                .map(|o| (n - o).norm() / o.norm().max(f64::MIN_POSITIVE))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Groups a point set into exact conjugate pairs `(upper, lower)` and real
/// points. Near-real points without a conjugate partner are snapped to the
/// real axis; a near-real conjugate pair stays a pair so that no two points
/// coincide.
pub(crate) fn conjugate_groups(points: &[Complex64]) -> Result<(Vec<(Complex64, Complex64)>, Vec<f64>)> {
    let n = points.len();
    let mut used = vec![false; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (pa, pb) = (points[a], points[b]);
        pb.im.total_cmp(&pa.im).then(pa.re.total_cmp(&pb.re)).then(a.cmp(&b))
    });
    let mut pairs = Vec::new();
    let mut reals = Vec::new();
    for &i in &order {
        if used[i] {
            continue;
        }
        let p = points[i];
        if p.im <= 0.0 {
            continue;
        }
        let target = p.conj();
        let partner = (0..n)
            .filter(|&j| !used[j] && j != i && points[j].im < 0.0)
            .map(|j| (j, (points[j] - target).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        match partner {
            Some((j, dist)) if dist <= CONJ_MATCH_TOL * p.norm() => {
                used[i] = true;
                used[j] = true;
                let upper = Complex64::new(0.5 * (p.re + points[j].re), 0.5 * (p.im - points[j].im));
                pairs.push((upper, upper.conj()));
            }
            _ => {}
        }
    }
    for i in 0..n {
        if used[i] {
            continue;
        }
        let p = points[i];
        if p.im.abs() <= SNAP_REL_TOL * p.norm() {
            reals.push(p.re);
        } else {
            return Err(Error::Pairing(format!("point {p} has no conjugate partner")));
        }
    }
    Ok((pairs, reals))
}

/// Splits `2r` points into `r` pole pairs.
///
/// With `realness`, conjugate pairs are formed first (upper half-plane member
/// as `λ⁺`); the remaining real points are sorted by magnitude and the i-th
/// smallest (`λ⁺`) is paired with the i-th largest (`λ⁻`). Without it, pairs
/// are formed greedily by the smallest conjugate-reflection distance
/// `|a − conj(b)|`, ties broken by index. Pairs are returned sorted by
/// natural frequency.
pub fn split_pairs(points: &[Complex64], realness: bool) -> Result<PolePairSet> {
    if points.is_empty() || !points.len().is_multiple_of(2) {
        return Err(Error::Pairing(format!("expected an even, nonzero number of points, got {}", points.len())));
    }
    let mut pairs: Vec<PolePair> = Vec::with_capacity(points.len() / 2);
    if realness {
        let (conj, mut reals) = conjugate_groups(points)?;
        if reals.len() % 2 != 0 {
            return Err(Error::Pairing(format!("{} real points cannot be paired", reals.len())));
        }
        for (p, m) in conj {
            pairs.push(pair_from_lambdas(p, m)?);
        }
        reals.sort_by(|a, b| a.abs().total_cmp(&b.abs()).then(a.total_cmp(b)));
        let half = reals.len() / 2;
        for i in 0..half {
            let small = Complex64::new(reals[i], 0.0);
            let large = Complex64::new(reals[reals.len() - 1 - i], 0.0);
            pairs.push(pair_from_lambdas(small, large)?);
        }
    } else {
        let n = points.len();
        let mut used = vec![false; n];
        for _ in 0..n / 2 {
            let mut best: Option<(usize, usize, f64)> = None;
            for i in 0..n {
                if used[i] {
                    continue;
                }
                for j in i + 1..n {
                    if used[j] {
                        continue;
                    }
                    let d = (points[i] - points[j].conj()).norm();
                    if best.is_none_or(|(_, _, bd)| d < bd) {
                        best = Some((i, j, d));
                    }
                }
            }
            let (i, j, _) = best.expect("an unused pair remains");
            used[i] = true;
            used[j] = true;
            let (p, m) = if points[j].im > points[i].im { (points[j], points[i]) } else { (points[i], points[j]) };
            pairs.push(pair_from_lambdas(p, m)?);
        }
    }
    pairs.sort_by(|a, b| {
        a.omega
            .norm()
            .total_cmp(&b.omega.norm())
            .then(a.psi.re.total_cmp(&b.psi.re))
            .then(a.lambda_plus.im.total_cmp(&b.lambda_plus.im))
    });
    PolePairSet::new(pairs)
}

/// Makes a point set exactly conjugate-closed (averaging matched pairs and
/// snapping unmatched near-real points). Output order: pairs as
/// `(upper, lower)` followed by the real points.
pub fn conjugate_cleanup(points: &[Complex64]) -> Result<Vec<Complex64>> {
    let (pairs, reals) = conjugate_groups(points)?;
    let mut out: Vec<Complex64> = pairs.into_iter().flat_map(|(p, m)| [p, m]).collect();
    out.extend(reals.into_iter().map(|r| Complex64::new(r, 0.0)));
    Ok(out)
}
