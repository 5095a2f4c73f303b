use num_complex::Complex64;

use super::all_distinct;
use crate::error::{Error, Result};

/// Frequency-response data: sampling points and the measured transfer function
/// values at those points.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySampleSet {
    points: Vec<Complex64>,
    values: Vec<Complex64>,
    conjugate_closed: bool,
}

impl FrequencySampleSet {
    pub fn new(points: Vec<Complex64>, values: Vec<Complex64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Dimension("sample set is empty".into()));
        }
        if points.len() != values.len() {
            return Err(Error::Dimension(format!(
                "{} points but {} values",
                points.len(),
                values.len()
            )));
        }
        if !all_distinct(&points) {
            return Err(Error::DuplicatePoints);
        }
        let conjugate_closed = exact_closure(&points, &values);
        Ok(Self {
            points,
            values,
            conjugate_closed,
        })
    }

    /// Appends the conjugate counterpart of every non-real point. Values at
    /// real points are replaced by their real part so that the closed set is
    /// exactly conjugate-symmetric.
    pub fn close_under_conjugation(self) -> Result<Self> {
        if self.conjugate_closed {
            return Ok(self);
        }
        let mut points = Vec::with_capacity(2 * self.points.len());
        let mut values = Vec::with_capacity(2 * self.points.len());
        for (&p, &v) in self.points.iter().zip(&self.values) {
            if p.im == 0.0 {
                points.push(p);
                values.push(Complex64::new(v.re, 0.0));
            } else {
                points.push(p);
                values.push(v);
            }
        }
        for (&p, &v) in self.points.iter().zip(&self.values) {
            if p.im != 0.0 {
                points.push(p.conj());
                values.push(v.conj());
            }
        }
        let closed = Self::new(points, values)?;
        if !closed.conjugate_closed {
            return Err(Error::Dimension(
                "sample set already holds conjugate points with inconsistent values".into(),
            ));
        }
        Ok(closed)
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_conjugate_closed(&self) -> bool {
        self.conjugate_closed
    }

    /// Smallest and largest nonnegative imaginary part over all points.
    pub fn frequency_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for p in &self.points {
            let w = p.im.abs();
            lo = lo.min(w);
            hi = hi.max(w);
        }
        (lo, hi)
    }
}

fn exact_closure(points: &[Complex64], values: &[Complex64]) -> bool {
    let mut index: Vec<usize> = (0..points.len()).collect();
    let key = |c: &Complex64| (c.re + 0.0, c.im + 0.0);
    index.sort_by(|&a, &b| {
        let (ar, ai) = key(&points[a]);
        let (br, bi) = key(&points[b]);
        ar.total_cmp(&br).then(ai.total_cmp(&bi))
    });
    points.iter().zip(values).all(|(p, v)| {
        let target = p.conj();
        let found = index.binary_search_by(|&j| {
            let (jr, ji) = key(&points[j]);
            jr.total_cmp(&(target.re + 0.0)).then(ji.total_cmp(&(target.im + 0.0)))
        });
        match found {
            Ok(pos) => values[index[pos]] == v.conj(),
            Err(_) => false,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_duplicates_and_mismatched_lengths() {
        assert_eq!(
            FrequencySampleSet::new(vec![c(0.0, 1.0), c(0.0, 1.0)], vec![c(1.0, 0.0); 2]),
            Err(Error::DuplicatePoints)
        );
        assert!(FrequencySampleSet::new(vec![c(0.0, 1.0)], vec![]).is_err());
        assert!(FrequencySampleSet::new(vec![], vec![]).is_err());
    }

    #[test]
    fn closure_appends_conjugates() {
        let s = FrequencySampleSet::new(
            vec![c(0.0, 0.0), c(0.0, 1.0), c(0.0, 2.0)],
            vec![c(1.0, 1e-17), c(1.0, 2.0), c(3.0, -1.0)],
        )
        .unwrap();
        assert!(!s.is_conjugate_closed());
        let s = s.close_under_conjugation().unwrap();
        assert!(s.is_conjugate_closed());
        assert_eq!(s.len(), 5);
        assert_eq!(s.points()[3], c(0.0, -1.0));
        assert_eq!(s.values()[4], c(3.0, 1.0));
        assert_eq!(s.values()[0].im, 0.0);
    }
}
