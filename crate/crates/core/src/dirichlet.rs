//! Dirichlet forms and kernel orderings.
//!
//! The Dirichlet form `D_P(f) = <f, (I-P) f>` equals half the π-P-expected
//! squared jump `(1/2) sum_{x,y} pi(x) P(x,y) (f(y) - f(x))^2`; both routes
//! are evaluated on every call and must agree. Its infimum over unit-norm
//! mean-zero functions is the right spectral gap, which is what makes the
//! form useful for comparing kernels: if every off-diagonal stationary flow
//! of `P1` dominates `gamma` times the flow of `P2`, then
//! `D_{P1}(f) >= gamma D_{P2}(f)` for every `f`, and the right gaps inherit
//! the same ordering.

use alloc::format;
use alloc::string::ToString;

use crate::hilbert::{self, Observable};
use crate::kernel::{self, ReversiblePair};
use crate::rng::SplitMix64;
use crate::simulate::RngSeed;
use crate::spectral;
use crate::{Error, Result};

/// Largest accepted disagreement between the operator form and the
/// squared-jump form, scaled by `max(1, ||f||^2)`.
pub const FORM_CONSISTENCY_TOLERANCE: f64 = 1e-8;

/// Tolerance used when comparing the stationary laws of two kernels.
pub const SHARED_PI_TOLERANCE: f64 = 1e-10;

/// Certificate that `D_{P1}(f) >= gamma * D_{P2}(f)` for all `f`, obtained
/// from the minimum ratio of off-diagonal stationary flows.
///
/// `gamma` is zero when `P2` moves somewhere `P1` cannot, and
/// `f64::INFINITY` when `P2` has no off-diagonal flow at all (its Dirichlet
/// form vanishes identically, so any ratio certifies).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderingCertificate {
    pub gamma: f64,
    /// State pair attaining the minimum flow ratio, when one exists.
    pub witness: Option<(usize, usize)>,
}

impl OrderingCertificate {
    pub fn is_unbounded(&self) -> bool {
        self.gamma.is_infinite()
    }
}

/// Verdict of a right-gap ordering check `rho1 >= gamma * rho2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapOrderingVerdict {
    pub rho_right_1: f64,
    pub gamma_rho_right_2: f64,
    pub pass: bool,
}

/// Estimate/exact pair for the variational form of the right gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapEstimate {
    /// Minimum Dirichlet form over the sampled unit mean-zero functions and
    /// the deflated eigenfunction at `lambda0_max`.
    pub estimate: f64,
    /// `rho_right` from the spectral route.
    pub exact: f64,
}

/// Dirichlet form `D_P(f)`, evaluated both as `<f,(I-P)f>` and as the
/// half-expected squared jump; returns the squared-jump value after checking
/// the two agree.
pub fn dirichlet_form(pair: &ReversiblePair, f: &Observable) -> Result<f64> {
    let n = pair.n();
    if f.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: f.len(),
        });
    }

    let pf = kernel::apply(pair.kernel(), f)?;
    let operator_form = hilbert::inner(pair.pi(), f, f)? - hilbert::inner(pair.pi(), f, &pf)?;

    let mut jump_form = 0.0;
    for x in 0..n {
        let fx = f.get(x);
        for y in 0..n {
            if y == x {
                continue;
            }
            let diff = f.get(y) - fx;
            jump_form += pair.flow(x, y) * diff * diff;
        }
    }
    jump_form *= 0.5;

    let scale = hilbert::inner(pair.pi(), f, f)?.max(1.0);
    if (operator_form - jump_form).abs() > FORM_CONSISTENCY_TOLERANCE * scale {
        return Err(Error::Inconsistency(format!(
            "Dirichlet form routes disagree: operator {operator_form:e} vs jump {jump_form:e}"
        )));
    }
    Ok(jump_form)
}

/// Verifies the variational characterization of the right gap:
/// `rho_right = inf { D_P(f) : f mean-zero, ||f|| = 1 }`.
///
/// Samples `trials` random unit mean-zero functions (per-trial substreams of
/// `seed`, so the result is independent of evaluation order), throws in the
/// deflated eigenfunction at `lambda0_max`, and returns the sampled minimum
/// next to the spectral value.
pub fn variational_right_gap(
    pair: &ReversiblePair,
    trials: usize,
    seed: RngSeed,
) -> Result<GapEstimate> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".to_string()));
    }
    let dec = spectral::decompose(pair)?;
    let exact = dec.gaps().rho_right;

    let minimizer = dec.gap_minimizer();
    let mut estimate = dirichlet_form(pair, &minimizer)?;

    for trial in 0..trials {
        let f = random_unit_mean_zero(pair, seed, trial as u64)?;
        estimate = estimate.min(dirichlet_form(pair, &f)?);
    }
    Ok(GapEstimate { estimate, exact })
}

fn random_unit_mean_zero(pair: &ReversiblePair, seed: RngSeed, trial: u64) -> Result<Observable> {
    let mut rng = SplitMix64::stream(seed.0, trial);
    loop {
        let raw = Observable::new((0..pair.n()).map(|_| rng.next_normal()).collect());
        let centered = hilbert::center(pair.pi(), &raw)?;
        let norm = hilbert::norm(pair.pi(), &centered)?;
        if norm > 1e-9 {
            return Ok(centered.scale(1.0 / norm));
        }
    }
}

/// Flow-ratio ordering certificate between two kernels sharing a stationary
/// law: `gamma = min over x != y with flow_2 > 0 of flow_1 / flow_2`.
///
/// Diagonal entries never enter; the squared-jump form kills them.
pub fn flow_gamma(pair1: &ReversiblePair, pair2: &ReversiblePair) -> Result<OrderingCertificate> {
    let n = pair1.n();
    if pair2.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: pair2.n(),
        });
    }
    if pair1.pi().max_abs_diff(pair2.pi())? > SHARED_PI_TOLERANCE {
        return Err(Error::InvalidArgument(
            "kernels do not share a stationary distribution".to_string(),
        ));
    }

    let mut gamma = f64::INFINITY;
    let mut witness = None;
    for x in 0..n {
        for y in 0..n {
            if x == y {
                continue;
            }
            let flow2 = pair2.flow(x, y);
            if flow2 <= 0.0 {
                continue;
            }
            let ratio = pair1.flow(x, y) / flow2;
            if ratio < gamma {
                gamma = ratio;
                witness = Some((x, y));
            }
        }
    }
    Ok(OrderingCertificate { gamma, witness })
}

/// Checks the gap ordering implied by a flow certificate:
/// `rho_right(P1) >= gamma * rho_right(P2)`.
///
/// An unbounded certificate means `D_{P2}` vanishes identically, so the
/// ordering holds trivially.
pub fn check_gap_ordering(
    pair1: &ReversiblePair,
    pair2: &ReversiblePair,
    cert: &OrderingCertificate,
) -> Result<GapOrderingVerdict> {
    let rho1 = spectral::decompose(pair1)?.gaps().rho_right;
    if cert.is_unbounded() {
        return Ok(GapOrderingVerdict {
            rho_right_1: rho1,
            gamma_rho_right_2: 0.0,
            pass: true,
        });
    }
    let rho2 = spectral::decompose(pair2)?.gaps().rho_right;
    let rhs = cert.gamma * rho2;
    Ok(GapOrderingVerdict {
        rho_right_1: rho1,
        gamma_rho_right_2: rhs,
        pass: rho1 >= rhs - 1e-8,
    })
}
