use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Tolerance on `| ‖λ‖₂ - 1 |` for a vector to count as unit.
pub const UNIT_TOLERANCE: f64 = 1e-12;

pub(crate) fn norm2(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

/// Unit vector in ℝⁿ; the decision variable of both norm maximizations.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereVector {
    coords: Vec<f64>,
}

impl SphereVector {
    /// Accepts `coords` as-is if it is unit to within [`UNIT_TOLERANCE`].
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("empty vector"));
        }
        let norm = norm2(&coords);
        if !((norm - 1.0).abs() <= UNIT_TOLERANCE) {
            return Err(Error::NotUnit(norm));
        }
        Ok(Self { coords })
    }

    pub fn normalize(mut coords: Vec<f64>) -> Result<Self> {
        let norm = norm2(&coords);
        if coords.is_empty() || !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        coords.iter_mut().for_each(|c| *c /= norm);
        Ok(Self { coords })
    }

    /// Standard basis vector `e_i` (0-based).
    pub fn basis(n: usize, i: usize) -> Result<Self> {
        if i >= n {
            return Err(Error::CoordinateOutOfRange { i, n });
        }
        let mut coords = alloc::vec![0.0; n];
        coords[i] = 1.0;
        Ok(Self { coords })
    }

    /// `(1, ..., 1)/√n`.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::normalize(alloc::vec![1.0; n])
    }

    /// Normalized standard Gaussian vector.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        loop {
            let coords: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
            if let Ok(v) = Self::normalize(coords) {
                return v;
            }
        }
    }

    /// Embed into dimension `n + extra` by appending zeros.
    pub fn padded(&self, extra: usize) -> Self {
        let mut coords = self.coords.clone();
        coords.resize(coords.len() + extra, 0.0);
        Self { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn negated(&self) -> Self {
        Self { coords: self.coords.iter().map(|c| -c).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.coords.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}
