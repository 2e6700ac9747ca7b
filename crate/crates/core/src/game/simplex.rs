use crate::error::{Error, Result};
use crate::real::{self, Real};

/// Absolute tolerance on `Σ p_i = 1` for a valid simplex point.
pub const SIMPLEX_SUM_TOL: f64 = 1e-12;

/// A probability vector. Construction validates; inputs that are off the
/// simplex are rejected, never renormalized.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexPoint<T = f64>(Vec<T>);

impl<T: Real> SimplexPoint<T> {
    pub fn new(probs: Vec<T>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::invalid("empty probability vector"));
        }
        for (i, p) in probs.iter().enumerate() {
            if !p.is_finite() || *p < T::zero() {
                return Err(Error::invalid(format!(
                    "coordinate {i} is {p:?}; probabilities must be finite and nonnegative"
                )));
            }
        }
        let total = real::sum(&probs);
        if (total.clone() - T::one()).abs() > T::from_f64(SIMPLEX_SUM_TOL) {
            return Err(Error::invalid(format!(
                "coordinates sum to {:.17}, not 1",
                total.to_f64()
            )));
        }
        Ok(Self(probs))
    }

    pub fn uniform(len: usize) -> Self {
        assert!(len > 0, "uniform distribution over zero outcomes");
        let w = T::one() / T::from_f64(len as f64);
        Self(vec![w; len])
    }

    pub fn vertex(len: usize, index: usize) -> Self {
        assert!(
            index < len,
            "vertex {index} out of range for dimension {len}"
        );
        let mut v = vec![T::zero(); len];
        v[index] = T::one();
        Self(v)
    }

    pub(crate) fn from_vec_unchecked(probs: Vec<T>) -> Self {
        debug_assert!(!probs.is_empty());
        Self(probs)
    }

    pub fn probs(&self) -> &[T] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn l1_distance(&self, other: &Self) -> T {
        real::l1_distance(&self.0, &other.0)
    }

    pub fn min_coordinate(&self) -> T {
        self.0
            .iter()
            .skip(1)
            .fold(self.0[0].clone(), |acc, v| acc.min(v.clone()))
    }

    /// `(1 - alpha) self + alpha other`, coordinate-wise.
    pub fn interpolate(&self, other: &[T], alpha: &T) -> Self {
        debug_assert_eq!(self.len(), other.len());
        let keep = T::one() - alpha;
        Self(
            self.0
                .iter()
                .zip(other)
                .map(|(a, b)| keep.clone() * a + alpha.clone() * b)
                .collect(),
        )
    }
}

impl SimplexPoint<f64> {
    pub fn to_precision<U: Real>(&self) -> SimplexPoint<U> {
        SimplexPoint(self.0.iter().map(|&v| U::from_f64(v)).collect())
    }
}

/// Iterate pair `(x, y)`: `x` over player I's `n` actions, `y` over player
/// II's `m` actions.
#[derive(Clone, Debug, PartialEq)]
pub struct JointState<T = f64> {
    pub x: SimplexPoint<T>,
    pub y: SimplexPoint<T>,
}

impl<T: Real> JointState<T> {
    pub fn new(x: SimplexPoint<T>, y: SimplexPoint<T>) -> Self {
        Self { x, y }
    }

    pub fn uniform(n: usize, m: usize) -> Self {
        Self {
            x: SimplexPoint::uniform(n),
            y: SimplexPoint::uniform(m),
        }
    }
}

impl JointState<f64> {
    pub fn to_precision<U: Real>(&self) -> JointState<U> {
        JointState {
            x: self.x.to_precision(),
            y: self.y.to_precision(),
        }
    }
}
