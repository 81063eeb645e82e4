//! π-weighted inner-product space primitives.
//!
//! Real functions on the state space, equipped with the inner product
//! `<f, g> = sum_x pi(x) f(x) g(x)`. Mean-zero functions (the image of
//! [`center`]) form the subspace where every mixing quantity in this crate
//! lives: for those, `<f, f>` is exactly the π-variance.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Tolerance on `sum(weights) == 1` when validating a probability vector.
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-12;

/// A probability distribution over states `0..n-1`.
///
/// Entries are nonnegative, sum to one within [`PROBABILITY_SUM_TOLERANCE`],
/// and there are at least two states.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    weights: Vec<f64>,
}

impl ProbabilityVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "probability vector needs at least 2 states, got {}",
                weights.len()
            )));
        }
        if let Some((i, &w)) = weights
            .iter()
            .enumerate()
            .find(|(_, &w)| !w.is_finite() || w < 0.0)
        {
            return Err(Error::InvalidArgument(format!(
                "probability vector entry {i} is {w}, must be finite and >= 0"
            )));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "probability vector entries sum to {sum:.17}, not 1"
            )));
        }
        Ok(Self { weights })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn get(&self, state: usize) -> f64 {
        self.weights[state]
    }

    /// True when every state has strictly positive mass.
    pub fn is_strictly_positive(&self) -> bool {
        self.weights.iter().all(|&w| w > 0.0)
    }

    /// Max absolute entrywise difference to another distribution.
    pub fn max_abs_diff(&self, other: &ProbabilityVector) -> Result<f64> {
        check_same_len(self.len(), other.len())?;
        Ok(self
            .weights
            .iter()
            .zip(other.weights.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// A real-valued function on the state space.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    values: Vec<f64>,
}

impl Observable {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn constant(value: f64, n: usize) -> Self {
        Self {
            values: vec![value; n],
        }
    }

    pub fn ones(n: usize) -> Self {
        Self::constant(1.0, n)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, state: usize) -> f64 {
        self.values[state]
    }

    pub fn scale(&self, c: f64) -> Observable {
        Observable::new(self.values.iter().map(|v| c * v).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn check_same_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

fn check_dims(pi: &ProbabilityVector, f: &Observable) -> Result<()> {
    check_same_len(pi.len(), f.len())
}

/// `<f, g> = sum_x pi(x) f(x) g(x)`.
pub fn inner(pi: &ProbabilityVector, f: &Observable, g: &Observable) -> Result<f64> {
    check_dims(pi, f)?;
    check_dims(pi, g)?;
    Ok(pi
        .weights()
        .iter()
        .zip(f.values().iter().zip(g.values()))
        .map(|(&w, (&a, &b))| w * a * b)
        .sum())
}

/// π-norm `sqrt(<f, f>)`.
pub fn norm(pi: &ProbabilityVector, f: &Observable) -> Result<f64> {
    Ok(libm::sqrt(inner(pi, f, f)?.max(0.0)))
}

/// π-mean `<f, 1> = E_pi[f]`.
pub fn mean(pi: &ProbabilityVector, f: &Observable) -> Result<f64> {
    check_dims(pi, f)?;
    Ok(pi
        .weights()
        .iter()
        .zip(f.values())
        .map(|(&w, &a)| w * a)
        .sum())
}

/// Projects `f` onto the mean-zero subspace: returns `f - E_pi[f]`.
pub fn center(pi: &ProbabilityVector, f: &Observable) -> Result<Observable> {
    let m = mean(pi, f)?;
    Ok(Observable::new(f.values().iter().map(|&a| a - m).collect()))
}

/// π-variance of `f`: the squared norm of the centered function.
pub fn variance(pi: &ProbabilityVector, f: &Observable) -> Result<f64> {
    let f0 = center(pi, f)?;
    inner(pi, &f0, &f0)
}
