//! Seeded trajectory simulation and empirical variance estimation.
//!
//! Trajectories start from the stationary law by default (exact inverse-CDF
//! draw), so there is no burn-in to worry about, and every step is fully
//! determined by the seed. The asymptotic variance of an ergodic average is
//! estimated by non-overlapping batch means with batch length `floor(sqrt n)`
//! and cross-validated against the exact linear-algebra value.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::hilbert::{self, Observable};
use crate::kernel::ReversiblePair;
use crate::rng::{sample_index, SplitMix64};
use crate::variance;
use crate::{Error, Result};

/// Seed for the deterministic generator; identical seed and parameters give
/// identical trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSeed(pub u64);

/// Where a trajectory starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialLaw {
    /// Exact draw from the stationary distribution.
    Stationary,
    /// Deterministic start in the given state.
    Fixed(usize),
}

/// A realized path of the chain.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    states: Vec<usize>,
    state_count: usize,
    seed: RngSeed,
    initial_law: InitialLaw,
}

impl Trajectory {
    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn seed(&self) -> RngSeed {
        self.seed
    }

    pub fn initial_law(&self) -> InitialLaw {
        self.initial_law
    }
}

/// Batch-means estimate of the asymptotic variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchMeansEstimate {
    /// `batch_length * sample variance of the batch means`.
    pub estimate: f64,
    pub batch_count: usize,
    pub batch_length: usize,
    /// `estimate * sqrt(2 / (batch_count - 1))`.
    pub standard_error: f64,
}

/// Outcome of comparing the batch-means estimate to the exact solver value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalCheck {
    pub empirical: BatchMeansEstimate,
    pub exact: f64,
    /// `rel_tol * max(exact, 0.01 * Var_pi(h)) + 3 * standard_error`.
    pub threshold: f64,
    pub pass: bool,
}

/// Samples `n` steps of the chain; step `t+1` is drawn from row `X_t` of `P`
/// by inverse CDF. Fully determined by `(pair, n, seed, initial_law)`.
pub fn sample_trajectory(
    pair: &ReversiblePair,
    n: usize,
    seed: RngSeed,
    initial_law: InitialLaw,
) -> Result<Trajectory> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "trajectory length must be >= 1".to_string(),
        ));
    }
    let state_count = pair.n();
    let mut rng = SplitMix64::stream(seed.0, 0x7472_616a); // "traj"

    let mut states = Vec::with_capacity(n);
    let first = match initial_law {
        InitialLaw::Stationary => sample_index(&mut rng, pair.pi().weights()),
        InitialLaw::Fixed(k) => {
            if k >= state_count {
                return Err(Error::InvalidArgument(format!(
                    "initial state {k} out of range for {state_count} states"
                )));
            }
            k
        }
    };
    states.push(first);
    for _ in 1..n {
        let current = *states.last().expect("nonempty");
        states.push(sample_index(&mut rng, pair.kernel().row(current)));
    }
    Ok(Trajectory {
        states,
        state_count,
        seed,
        initial_law,
    })
}

/// `(1/n) sum_t h(X_t)`.
pub fn ergodic_average(traj: &Trajectory, h: &Observable) -> Result<f64> {
    if h.len() != traj.state_count {
        return Err(Error::DimensionMismatch {
            expected: traj.state_count,
            got: h.len(),
        });
    }
    let sum: f64 = traj.states.iter().map(|&x| h.get(x)).sum();
    Ok(sum / traj.len() as f64)
}

/// Non-overlapping batch-means estimate of `Var(P, h)` from one trajectory.
///
/// Batch length is `floor(sqrt n)`; any trailing partial batch is dropped.
pub fn empirical_asymptotic_variance(
    traj: &Trajectory,
    h: &Observable,
) -> Result<BatchMeansEstimate> {
    let n = traj.len();
    if n < 100 {
        return Err(Error::InvalidArgument(format!(
            "batch means needs at least 100 steps, got {n}"
        )));
    }
    if h.len() != traj.state_count {
        return Err(Error::DimensionMismatch {
            expected: traj.state_count,
            got: h.len(),
        });
    }

    let batch_length = n.isqrt();
    let batch_count = n / batch_length;

    let mut means = Vec::with_capacity(batch_count);
    for b in 0..batch_count {
        let chunk = &traj.states[b * batch_length..(b + 1) * batch_length];
        let sum: f64 = chunk.iter().map(|&x| h.get(x)).sum();
        means.push(sum / batch_length as f64);
    }

    let grand = means.iter().sum::<f64>() / batch_count as f64;
    let sample_var =
        means.iter().map(|m| (m - grand) * (m - grand)).sum::<f64>() / (batch_count - 1) as f64;

    let estimate = batch_length as f64 * sample_var;
    Ok(BatchMeansEstimate {
        estimate,
        batch_count,
        batch_length,
        standard_error: estimate * libm::sqrt(2.0 / (batch_count - 1) as f64),
    })
}

/// Simulates a stationary trajectory and compares the batch-means estimate
/// to the exact asymptotic variance.
///
/// Passes when `|empirical - exact|` is within
/// `rel_tol * max(exact, 0.01 * Var_pi(h)) + 3 * standard_error`; the floor
/// keeps the check meaningful when the exact variance is (near) zero.
pub fn empirical_vs_exact(
    pair: &ReversiblePair,
    h: &Observable,
    n: usize,
    seed: RngSeed,
    rel_tol: f64,
) -> Result<EmpiricalCheck> {
    if n < 10_000 {
        return Err(Error::InvalidArgument(format!(
            "empirical cross-check needs at least 10^4 steps, got {n}"
        )));
    }
    let exact = variance::asymptotic_variance(pair, h)?.value;
    let traj = sample_trajectory(pair, n, seed, InitialLaw::Stationary)?;
    let empirical = empirical_asymptotic_variance(&traj, h)?;

    let h_var = hilbert::variance(pair.pi(), h)?;
    let threshold = rel_tol * exact.max(0.01 * h_var) + 3.0 * empirical.standard_error;
    Ok(EmpiricalCheck {
        empirical,
        exact,
        threshold,
        pass: (empirical.estimate - exact).abs() <= threshold,
    })
}
