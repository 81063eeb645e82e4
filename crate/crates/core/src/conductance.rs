//! Conductance, Cheeger bounds, and related inequality diagnostics.
//!
//! The conductance of a set `A` is the normalized stationary flow out of it,
//! `kappa(A) = flow(A, A^c) / pi(A)`; its symmetric cousin
//! `kappa*(A) = kappa(A) / pi(A^c)` equals the Dirichlet form of the
//! normalized indicator of `A`. Minimizing over sets gives the kernel
//! conductances `kappa` (over `pi(A) <= 1/2`) and `kappa*` (unrestricted),
//! sandwiched as `kappa <= kappa* <= 2 kappa`. The Cheeger bounds tie them to
//! the right spectral gap from both sides:
//! `kappa*^2 / 2 <= rho_right <= kappa*`, so nonzero conductance, a positive
//! right gap, and variance bounding are all the same property.
//!
//! Exact minimization enumerates complement classes of subsets (fixing state
//! 0 inside `A`) with incremental flow updates in Gray-code order; for larger
//! spaces a sampled mode reports an upper bound only.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::dirichlet;
use crate::hilbert::{self, Observable, ProbabilityVector};
use crate::kernel::ReversiblePair;
use crate::rng::SplitMix64;
use crate::simulate::RngSeed;
use crate::spectral;
use crate::{Error, Result};

/// Hard cap on the bitmask representation of a [`StateSet`].
pub const MAX_STATES: usize = 63;

/// Largest state count for the exhaustive subset sweep.
pub const MAX_EXACT_STATES: usize = 24;

/// Sets with `pi(A)` up to `1/2 + KAPPA_BOUNDARY_TOLERANCE` count toward the
/// restricted infimum, so exact-half splits are included.
pub const KAPPA_BOUNDARY_TOLERANCE: f64 = 1e-12;

/// Incremental flow accumulators are recomputed from scratch this often
/// during the exhaustive sweep to stop rounding drift.
const REFRESH_INTERVAL: u64 = 256;

/// A subset of the state space as a bitmask (hence the `n <= 63` cap).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateSet {
    mask: u64,
    n: usize,
}

impl StateSet {
    pub fn new(mask: u64, n: usize) -> Result<Self> {
        if !(2..=MAX_STATES).contains(&n) {
            return Err(Error::InvalidArgument(format!(
                "state sets support 2..={MAX_STATES} states, got {n}"
            )));
        }
        let full = (1u64 << n) - 1;
        if mask & !full != 0 {
            return Err(Error::InvalidArgument(format!(
                "mask {mask:#x} has bits beyond the {n} states"
            )));
        }
        Ok(Self { mask, n })
    }

    pub fn from_indices(indices: &[usize], n: usize) -> Result<Self> {
        let mut mask = 0u64;
        for &i in indices {
            if i >= n {
                return Err(Error::InvalidArgument(format!(
                    "state {i} out of range for {n} states"
                )));
            }
            mask |= 1 << i;
        }
        Self::new(mask, n)
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn contains(&self, state: usize) -> bool {
        state < self.n && self.mask & (1 << state) != 0
    }

    pub fn complement(&self) -> StateSet {
        let full = (1u64 << self.n) - 1;
        StateSet {
            mask: full & !self.mask,
            n: self.n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn is_full(&self) -> bool {
        self.mask == (1u64 << self.n) - 1
    }

    pub fn is_proper(&self) -> bool {
        !self.is_empty() && !self.is_full()
    }

    pub fn size(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.contains(i)).collect()
    }

    pub fn pi_mass(&self, pi: &ProbabilityVector) -> Result<f64> {
        if pi.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: pi.len(),
            });
        }
        Ok(self.indices().iter().map(|&i| pi.get(i)).sum())
    }
}

/// Conductance of one set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SetConductance {
    /// `flow(A, A^c) / pi(A)`.
    pub kappa: f64,
    /// `flow(A, A^c) / (pi(A) pi(A^c))`; symmetric under complement.
    pub kappa_star: f64,
}

/// How to minimize over sets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConductanceMethod {
    /// Exhaustive sweep over complement classes; requires
    /// `n <=` [`MAX_EXACT_STATES`].
    Exact,
    /// Uniform random subsets; the result is only an upper bound on the true
    /// conductances and is flagged as such.
    Sampled { samples: usize, seed: RngSeed },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConductanceMode {
    Exact,
    Sampled,
}

/// Minimized conductances with their minimizing sets.
#[derive(Debug, Clone, PartialEq)]
pub struct ConductanceReport {
    /// `inf { kappa(A) : pi(A) <= 1/2 }`.
    pub kappa: f64,
    /// `inf_A kappa*(A)`.
    pub kappa_star: f64,
    pub argmin_kappa: StateSet,
    /// Canonical representative (smaller mask of the complement pair).
    pub argmin_kappa_star: StateSet,
    pub mode: ConductanceMode,
    pub sets_examined: u64,
}

/// Margins of the Cheeger bounds; each must be nonnegative up to 1e-8.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheegerVerdict {
    pub rho_right: f64,
    pub kappa: f64,
    pub kappa_star: f64,
    /// `kappa* - rho_right` (upper Cheeger bound).
    pub upper_margin: f64,
    /// `2 kappa - kappa*` (sandwich).
    pub sandwich_margin: f64,
    /// `rho_right - kappa*^2 / 2` (lower Cheeger bound).
    pub lower_margin_star: f64,
    /// `rho_right - kappa^2 / 2`.
    pub lower_margin: f64,
    pub pass: bool,
}

/// Indicator-function identity `D_P(f_A) = kappa*(A)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndicatorIdentity {
    pub dirichlet: f64,
    pub kappa_star: f64,
}

/// Quantities of the two-step lower-bound argument relating the Dirichlet
/// form to conductance through level sets of `g^2`, `g = f + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LawlerSokalDiagnostic {
    pub dirichlet: f64,
    /// `E_mu[|g(X)^2 - g(Y)^2|]^2 / (8 E_pi[g^2])`; the Dirichlet form must
    /// dominate it (Cauchy–Schwarz step).
    pub dirichlet_lower_bound: f64,
    /// `E_mu[|g(X)^2 - g(Y)^2|]` under the edge measure
    /// `mu(x,y) = pi(x) P(x,y)`.
    pub joint_expectation: f64,
    /// `kappa* . E_{pi x pi}[|g(X)^2 - g(Y)^2|]`; the joint expectation must
    /// dominate it (level-set step).
    pub conductance_bound: f64,
    pub pass: bool,
}

fn check_proper(pair: &ReversiblePair, set: &StateSet) -> Result<()> {
    if set.n() != pair.n() {
        return Err(Error::DimensionMismatch {
            expected: pair.n(),
            got: set.n(),
        });
    }
    if !set.is_proper() {
        return Err(Error::InvalidArgument(
            "conductance needs a nonempty proper subset".to_string(),
        ));
    }
    Ok(())
}

/// Conductance of a single set, by direct summation.
pub fn set_conductance(pair: &ReversiblePair, set: &StateSet) -> Result<SetConductance> {
    check_proper(pair, set)?;
    let pi_a = set.pi_mass(pair.pi())?;
    let pi_ac = set.complement().pi_mass(pair.pi())?;
    if pi_a <= 0.0 || pi_ac <= 0.0 {
        return Err(Error::InvalidArgument(
            "conductance needs positive stationary mass on both sides".to_string(),
        ));
    }
    let mut out_flow = 0.0;
    for x in set.indices() {
        for y in 0..pair.n() {
            if !set.contains(y) {
                out_flow += pair.flow(x, y);
            }
        }
    }
    Ok(SetConductance {
        kappa: out_flow / pi_a,
        kappa_star: out_flow / (pi_a * pi_ac),
    })
}

/// Minimizes the conductances over sets.
///
/// Exact mode sweeps every complement class once (state 0 pinned inside `A`)
/// and uses `kappa*(A) = kappa*(A^c)`; the restricted `kappa` infimum
/// considers whichever sides satisfy `pi <= 1/2` (boundary included). Sampled
/// mode draws uniform subsets and reports an upper bound.
pub fn kernel_conductance(
    pair: &ReversiblePair,
    method: ConductanceMethod,
) -> Result<ConductanceReport> {
    let n = pair.n();
    if n > MAX_STATES {
        return Err(Error::TooLarge { n, max: MAX_STATES });
    }
    match method {
        ConductanceMethod::Exact => {
            if n > MAX_EXACT_STATES {
                return Err(Error::TooLarge {
                    n,
                    max: MAX_EXACT_STATES,
                });
            }
            exact_sweep(pair)
        }
        ConductanceMethod::Sampled { samples, seed } => {
            if samples == 0 {
                return Err(Error::InvalidArgument("samples must be >= 1".to_string()));
            }
            sampled_sweep(pair, samples, seed)
        }
    }
}

/// Running minimum with the deterministic tie rule (smaller mask wins).
struct ArgMin {
    value: f64,
    mask: u64,
}

impl ArgMin {
    fn new() -> Self {
        Self {
            value: f64::INFINITY,
            mask: u64::MAX,
        }
    }

    fn offer(&mut self, value: f64, mask: u64) {
        if value < self.value || (value == self.value && mask < self.mask) {
            self.value = value;
            self.mask = mask;
        }
    }
}

fn exact_sweep(pair: &ReversiblePair) -> Result<ConductanceReport> {
    let n = pair.n();
    let pi = pair.pi();
    let full: u64 = (1 << n) - 1;

    let mut members = vec![false; n];
    members[0] = true;
    let mut mask: u64 = 1;
    let mut pi_a = pi.get(0);
    // Flow leaving A and flow entering A; identical under exact detailed
    // balance, tracked separately so kappa(A^c) is by-definition exact.
    let mut out_flow: f64 = (1..n).map(|y| pair.flow(0, y)).sum();
    let mut in_flow: f64 = (1..n).map(|y| pair.flow(y, 0)).sum();

    let mut best_star = ArgMin::new();
    let mut best_kappa = ArgMin::new();
    let mut examined: u64 = 0;

    let classes: u64 = 1 << (n - 1);
    for step in 0..classes {
        if step > 0 {
            let j = 1 + step.trailing_zeros() as usize;
            let pj = pi.get(j);
            if members[j] {
                members[j] = false;
                mask &= !(1 << j);
                pi_a -= pj;
                for x in 0..n {
                    if members[x] {
                        out_flow += pair.flow(x, j);
                        in_flow += pair.flow(j, x);
                    } else if x != j {
                        out_flow -= pair.flow(j, x);
                        in_flow -= pair.flow(x, j);
                    }
                }
            } else {
                members[j] = true;
                mask |= 1 << j;
                pi_a += pj;
                for x in 0..n {
                    if !members[x] {
                        out_flow += pair.flow(j, x);
                        in_flow += pair.flow(x, j);
                    } else if x != j {
                        out_flow -= pair.flow(x, j);
                        in_flow -= pair.flow(j, x);
                    }
                }
            }
        }
        if step % REFRESH_INTERVAL == 0 && step > 0 {
            pi_a = (0..n).filter(|&x| members[x]).map(|x| pi.get(x)).sum();
            out_flow = 0.0;
            in_flow = 0.0;
            for x in 0..n {
                if !members[x] {
                    continue;
                }
                for y in 0..n {
                    if !members[y] {
                        out_flow += pair.flow(x, y);
                        in_flow += pair.flow(y, x);
                    }
                }
            }
        }
        if mask == full {
            continue; // improper split
        }
        examined += 1;

        let out_flow = out_flow.max(0.0);
        let in_flow = in_flow.max(0.0);
        let pi_ac = 1.0 - pi_a;
        if pi_a > 0.0 && pi_ac > 0.0 {
            let star = out_flow / (pi_a * pi_ac);
            best_star.offer(star, mask.min(full & !mask));
        }
        if pi_a > 0.0 && pi_a <= 0.5 + KAPPA_BOUNDARY_TOLERANCE {
            best_kappa.offer(out_flow / pi_a, mask);
        }
        if pi_ac > 0.0 && pi_ac <= 0.5 + KAPPA_BOUNDARY_TOLERANCE {
            best_kappa.offer(in_flow / pi_ac, full & !mask);
        }
    }

    finish_report(
        pair,
        best_kappa,
        best_star,
        ConductanceMode::Exact,
        examined,
    )
}

fn sampled_sweep(
    pair: &ReversiblePair,
    samples: usize,
    seed: RngSeed,
) -> Result<ConductanceReport> {
    let n = pair.n();
    let full: u64 = (1 << n) - 1;
    let mut rng = SplitMix64::stream(seed.0, 0x7365_7473); // "sets"

    let mut best_star = ArgMin::new();
    let mut best_kappa = ArgMin::new();

    for _ in 0..samples {
        let mask = loop {
            let candidate = rng.next_u64() & full;
            if candidate != 0 && candidate != full {
                break candidate;
            }
        };
        let set = StateSet::new(mask, n)?;
        let pi_a = set.pi_mass(pair.pi())?;
        let pi_ac = 1.0 - pi_a;
        if pi_a <= 0.0 || pi_ac <= 0.0 {
            continue;
        }
        let mut out_flow = 0.0;
        let mut in_flow = 0.0;
        for x in set.indices() {
            for y in 0..n {
                if !set.contains(y) {
                    out_flow += pair.flow(x, y);
                    in_flow += pair.flow(y, x);
                }
            }
        }
        best_star.offer(out_flow / (pi_a * pi_ac), mask.min(full & !mask));
        if pi_a <= 0.5 + KAPPA_BOUNDARY_TOLERANCE {
            best_kappa.offer(out_flow / pi_a, mask);
        }
        if pi_ac <= 0.5 + KAPPA_BOUNDARY_TOLERANCE {
            best_kappa.offer(in_flow / pi_ac, full & !mask);
        }
    }

    finish_report(
        pair,
        best_kappa,
        best_star,
        ConductanceMode::Sampled,
        samples as u64,
    )
}

fn finish_report(
    pair: &ReversiblePair,
    best_kappa: ArgMin,
    best_star: ArgMin,
    mode: ConductanceMode,
    sets_examined: u64,
) -> Result<ConductanceReport> {
    if !best_star.value.is_finite() || !best_kappa.value.is_finite() {
        return Err(Error::InvalidArgument(
            "no proper split with positive mass on both sides".to_string(),
        ));
    }
    Ok(ConductanceReport {
        kappa: best_kappa.value,
        kappa_star: best_star.value,
        argmin_kappa: StateSet::new(best_kappa.mask, pair.n())?,
        argmin_kappa_star: StateSet::new(best_star.mask, pair.n())?,
        mode,
        sets_examined,
    })
}

/// Normalized indicator of `A`: mean-zero, unit π-norm.
pub fn indicator_function(pair: &ReversiblePair, set: &StateSet) -> Result<Observable> {
    check_proper(pair, set)?;
    let pi_a = set.pi_mass(pair.pi())?;
    let pi_ac = 1.0 - pi_a;
    if pi_a <= 0.0 || pi_ac <= 0.0 {
        return Err(Error::InvalidArgument(
            "indicator normalization needs positive mass on both sides".to_string(),
        ));
    }
    let denom = libm::sqrt(pi_a * pi_ac);
    Ok(Observable::new(
        (0..pair.n())
            .map(|x| {
                let ind = if set.contains(x) { 1.0 } else { 0.0 };
                (ind - pi_a) / denom
            })
            .collect(),
    ))
}

/// Checks `D_P(f_A) = kappa*(A)` for the normalized indicator of `A`.
pub fn indicator_dirichlet_check(
    pair: &ReversiblePair,
    set: &StateSet,
) -> Result<IndicatorIdentity> {
    let f = indicator_function(pair, set)?;
    let dirichlet = dirichlet::dirichlet_form(pair, &f)?;
    let kappa_star = set_conductance(pair, set)?.kappa_star;
    if (dirichlet - kappa_star).abs() > 1e-10 * kappa_star.abs().max(1.0) {
        return Err(Error::Inconsistency(format!(
            "indicator identity broken: Dirichlet {dirichlet:e} vs kappa* {kappa_star:e}"
        )));
    }
    Ok(IndicatorIdentity {
        dirichlet,
        kappa_star,
    })
}

/// Checks all four Cheeger-bound inequalities with exact conductances.
pub fn cheeger_check(pair: &ReversiblePair) -> Result<CheegerVerdict> {
    let rho_right = spectral::decompose(pair)?.gaps().rho_right;
    let report = kernel_conductance(pair, ConductanceMethod::Exact)?;
    let kappa = report.kappa;
    let kappa_star = report.kappa_star;

    let upper_margin = kappa_star - rho_right;
    let sandwich_margin = 2.0 * kappa - kappa_star;
    let lower_margin_star = rho_right - kappa_star * kappa_star / 2.0;
    let lower_margin = rho_right - kappa * kappa / 2.0;
    let pass = upper_margin >= -1e-8
        && sandwich_margin >= -1e-8
        && lower_margin_star >= -1e-8
        && lower_margin >= -1e-8;

    Ok(CheegerVerdict {
        rho_right,
        kappa,
        kappa_star,
        upper_margin,
        sandwich_margin,
        lower_margin_star,
        lower_margin,
        pass,
    })
}

/// Evaluates the two inequalities that bound the Dirichlet form from below
/// through conductance, for the shifted function `g = f + c`.
///
/// `f` must be mean-zero with unit π-norm, so `E_pi[g^2] = 1 + c^2` exactly.
pub fn lawler_sokal_diagnostic(
    pair: &ReversiblePair,
    f: &Observable,
    c: f64,
) -> Result<LawlerSokalDiagnostic> {
    let n = pair.n();
    if f.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: f.len(),
        });
    }
    let norm = hilbert::norm(pair.pi(), f)?;
    if hilbert::mean(pair.pi(), f)?.abs() > 1e-10 || (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(
            "diagnostic needs a mean-zero, unit-norm f".to_string(),
        ));
    }

    let g_sq: Vec<f64> = f.values().iter().map(|&v| (v + c) * (v + c)).collect();
    let e_pi_g_sq: f64 = pair
        .pi()
        .weights()
        .iter()
        .zip(&g_sq)
        .map(|(&w, &v)| w * v)
        .sum();

    let mut joint_expectation = 0.0;
    let mut product_expectation = 0.0;
    for x in 0..n {
        for y in 0..n {
            let diff = (g_sq[x] - g_sq[y]).abs();
            joint_expectation += pair.flow(x, y) * diff;
            product_expectation += pair.pi().get(x) * pair.pi().get(y) * diff;
        }
    }

    let dirichlet = dirichlet::dirichlet_form(pair, f)?;
    let dirichlet_lower_bound = joint_expectation * joint_expectation / (8.0 * e_pi_g_sq);
    let kappa_star = kernel_conductance(pair, ConductanceMethod::Exact)?.kappa_star;
    let conductance_bound = kappa_star * product_expectation;

    let pass =
        dirichlet >= dirichlet_lower_bound - 1e-8 && joint_expectation >= conductance_bound - 1e-8;

    Ok(LawlerSokalDiagnostic {
        dirichlet,
        dirichlet_lower_bound,
        joint_expectation,
        conductance_bound,
        pass,
    })
}

/// Exact moment inequality for a standardized discrete distribution: with
/// `A, B` i.i.d. draws of the standardized `f(X)`, `X ~ pi`,
/// `E|A^2 - B^2| + 4 E|A - B|^2 >= 2`. Returns the left side.
pub fn moment_inequality_check(pi: &ProbabilityVector, f: &Observable) -> Result<f64> {
    let var = hilbert::variance(pi, f)?;
    if var <= 0.0 {
        return Err(Error::InvalidArgument(
            "moment inequality needs a non-degenerate distribution".to_string(),
        ));
    }
    let mean = hilbert::mean(pi, f)?;
    let sd = libm::sqrt(var);
    let z: Vec<f64> = f.values().iter().map(|&v| (v - mean) / sd).collect();

    let n = pi.len();
    let mut e_sq_diff = 0.0;
    let mut e_abs_diff = 0.0;
    for i in 0..n {
        for j in 0..n {
            let w = pi.get(i) * pi.get(j);
            e_sq_diff += w * (z[i] * z[i] - z[j] * z[j]).abs();
            e_abs_diff += w * (z[i] - z[j]).abs();
        }
    }

    let lhs = e_sq_diff + 4.0 * e_abs_diff * e_abs_diff;
    if lhs < 2.0 - 1e-10 {
        return Err(Error::Inconsistency(format!(
            "moment inequality violated: lhs = {lhs:.17}"
        )));
    }
    Ok(lhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::{self, fixtures};

    #[test]
    fn set_conductance_fixtures() {
        let flip = fixtures::flip();
        let a = StateSet::from_indices(&[0], 2).unwrap();
        let sc = set_conductance(&flip, &a).unwrap();
        assert!((sc.kappa - 1.0).abs() < 1e-14);
        assert!((sc.kappa_star - 2.0).abs() < 1e-14);

        let lazy2 = fixtures::lazy2();
        let a = StateSet::from_indices(&[1], 2).unwrap();
        let sc = set_conductance(&lazy2, &a).unwrap();
        assert!((sc.kappa - 0.6).abs() < 1e-14);
        assert!((sc.kappa_star - 0.9).abs() < 1e-14);

        let id = fixtures::identity(4);
        let a = StateSet::from_indices(&[0, 2], 4).unwrap();
        let sc = set_conductance(&id, &a).unwrap();
        assert_eq!(sc.kappa, 0.0);
        assert_eq!(sc.kappa_star, 0.0);
    }

    #[test]
    fn set_conductance_rejects_improper_sets() {
        let flip = fixtures::flip();
        let empty = StateSet::new(0, 2).unwrap();
        let full = StateSet::new(3, 2).unwrap();
        assert!(set_conductance(&flip, &empty).is_err());
        assert!(set_conductance(&flip, &full).is_err());
    }

    #[test]
    fn kernel_conductance_fixtures() {
        let flip = fixtures::flip();
        let report = kernel_conductance(&flip, ConductanceMethod::Exact).unwrap();
        assert!((report.kappa - 1.0).abs() < 1e-14);
        assert!((report.kappa_star - 2.0).abs() < 1e-14);
        assert_eq!(report.mode, ConductanceMode::Exact);
        assert_eq!(report.sets_examined, 1);

        let lazy2 = fixtures::lazy2();
        let report = kernel_conductance(&lazy2, ConductanceMethod::Exact).unwrap();
        assert!((report.kappa - 0.6).abs() < 1e-14);
        assert!((report.kappa_star - 0.9).abs() < 1e-14);
        // The only admissible kappa set is {1}.
        assert_eq!(report.argmin_kappa.indices(), vec![1]);
    }

    #[test]
    fn exact_sweep_matches_bruteforce_on_mh3() {
        let pair = fixtures::mh3();
        let report = kernel_conductance(&pair, ConductanceMethod::Exact).unwrap();

        // Independent brute force over all 6 proper subsets.
        let mut best_star = f64::INFINITY;
        let mut best_kappa = f64::INFINITY;
        for mask in 1u64..7 {
            let set = StateSet::new(mask, 3).unwrap();
            let sc = set_conductance(&pair, &set).unwrap();
            best_star = best_star.min(sc.kappa_star);
            if set.pi_mass(pair.pi()).unwrap() <= 0.5 + 1e-12 {
                best_kappa = best_kappa.min(sc.kappa);
            }
        }
        assert!((report.kappa_star - best_star).abs() < 1e-13);
        assert!((report.kappa - best_kappa).abs() < 1e-13);
        assert_eq!(report.sets_examined, 3);
    }

    #[test]
    fn exact_sweep_matches_bruteforce_on_random_pairs() {
        // n reaches 10 so the sweep's periodic accumulator refresh (every 256
        // subsets) is also covered.
        for seed in 0..16u64 {
            let n = 3 + (seed as usize % 8);
            let pair = testkit::random_reversible_pair(seed, n);
            let report = kernel_conductance(&pair, ConductanceMethod::Exact).unwrap();

            let full = (1u64 << n) - 1;
            let mut best_star = f64::INFINITY;
            let mut best_kappa = f64::INFINITY;
            for mask in 1..full {
                let set = StateSet::new(mask, n).unwrap();
                let sc = set_conductance(&pair, &set).unwrap();
                best_star = best_star.min(sc.kappa_star);
                if set.pi_mass(pair.pi()).unwrap() <= 0.5 + 1e-12 {
                    best_kappa = best_kappa.min(sc.kappa);
                }
            }
            assert!(
                (report.kappa_star - best_star).abs() < 1e-12,
                "seed {seed}: {} vs {}",
                report.kappa_star,
                best_star
            );
            assert!(
                (report.kappa - best_kappa).abs() < 1e-12,
                "seed {seed}: {} vs {}",
                report.kappa,
                best_kappa
            );
        }
    }

    #[test]
    fn sampled_mode_upper_bounds_exact() {
        let pair = testkit::random_reversible_pair(3, 7);
        let exact = kernel_conductance(&pair, ConductanceMethod::Exact).unwrap();
        let sampled = kernel_conductance(
            &pair,
            ConductanceMethod::Sampled {
                samples: 200,
                seed: RngSeed(5),
            },
        )
        .unwrap();
        assert_eq!(sampled.mode, ConductanceMode::Sampled);
        assert!(sampled.kappa >= exact.kappa - 1e-12);
        assert!(sampled.kappa_star >= exact.kappa_star - 1e-12);
    }

    #[test]
    fn exact_mode_size_gate() {
        let pair = testkit::random_reversible_pair(1, 4);
        assert!(kernel_conductance(&pair, ConductanceMethod::Exact).is_ok());
        // 25 states is past the exact limit; construct without analyzing.
        let big = testkit::random_reversible_pair(2, 25);
        assert!(matches!(
            kernel_conductance(&big, ConductanceMethod::Exact),
            Err(Error::TooLarge {
                n: 25,
                max: MAX_EXACT_STATES
            })
        ));
    }

    #[test]
    fn indicator_identity_fixtures() {
        let flip = fixtures::flip();
        let a = StateSet::from_indices(&[0], 2).unwrap();
        let id = indicator_dirichlet_check(&flip, &a).unwrap();
        assert!((id.dirichlet - 2.0).abs() < 1e-12);
        assert!((id.kappa_star - 2.0).abs() < 1e-12);

        let lazy2 = fixtures::lazy2();
        let a = StateSet::from_indices(&[1], 2).unwrap();
        let id = indicator_dirichlet_check(&lazy2, &a).unwrap();
        assert!((id.dirichlet - 0.9).abs() < 1e-12);
        assert!((id.kappa_star - 0.9).abs() < 1e-12);
    }

    #[test]
    fn cheeger_fixtures() {
        let v = cheeger_check(&fixtures::flip()).unwrap();
        assert!(v.pass);
        assert!(v.upper_margin.abs() < 1e-12);
        assert!(v.sandwich_margin.abs() < 1e-12);
        assert!(v.lower_margin_star.abs() < 1e-12);
        assert!((v.lower_margin - 1.5).abs() < 1e-12);

        let v = cheeger_check(&fixtures::lazy2()).unwrap();
        assert!(v.pass);
        assert!((v.rho_right - 0.9).abs() < 1e-12);
        assert!((v.kappa - 0.6).abs() < 1e-12);
        assert!((v.kappa_star - 0.9).abs() < 1e-12);
        assert!((v.lower_margin_star - 0.495).abs() < 1e-12);

        let v = cheeger_check(&fixtures::identity(3)).unwrap();
        assert!(v.pass);
        assert_eq!(v.rho_right, 0.0);
        assert_eq!(v.kappa, 0.0);
        assert_eq!(v.kappa_star, 0.0);
    }

    #[test]
    fn lawler_sokal_degenerate_and_generic() {
        let flip = fixtures::flip();
        let f = Observable::new(vec![1.0, -1.0]);
        let d = lawler_sokal_diagnostic(&flip, &f, 0.0).unwrap();
        // g^2 is constant: both expectations vanish, bounds degenerate to 0.
        assert!(d.pass);
        assert!(d.joint_expectation.abs() < 1e-14);
        assert!(d.conductance_bound.abs() < 1e-14);
        assert!((d.dirichlet - 2.0).abs() < 1e-12);

        let lazy2 = fixtures::lazy2();
        let f = testkit::random_unit_mean_zero(4, lazy2.pi());
        for &c in &[0.0, 1.0, -1.0, 10.0, -10.0] {
            let d = lawler_sokal_diagnostic(&lazy2, &f, c).unwrap();
            assert!(d.pass, "c = {c}: {d:?}");
        }
    }

    #[test]
    fn lawler_sokal_rejects_unnormalized_f() {
        let lazy2 = fixtures::lazy2();
        let f = Observable::new(vec![1.0, -1.0]); // not unit norm under this pi
        assert!(lawler_sokal_diagnostic(&lazy2, &f, 0.0).is_err());
    }

    #[test]
    fn moment_inequality_fixtures() {
        let pi = ProbabilityVector::uniform(2).unwrap();
        let f = Observable::new(vec![1.0, -1.0]);
        let lhs = moment_inequality_check(&pi, &f).unwrap();
        // E|A^2-B^2| = 0 and E|A-B| = 1, so lhs = 4.
        assert!((lhs - 4.0).abs() < 1e-12);

        let pi = ProbabilityVector::new(vec![2.0 / 3.0, 1.0 / 3.0]).unwrap();
        let s = libm::sqrt(2.0);
        let f = Observable::new(vec![1.0 / s, -s]);
        let lhs = moment_inequality_check(&pi, &f).unwrap();
        assert!((lhs - (2.0 / 3.0 + 32.0 / 9.0)).abs() < 1e-12);

        let constant = Observable::new(vec![3.0, 3.0]);
        assert!(moment_inequality_check(&pi, &constant).is_err());
    }

    #[test]
    fn moment_inequality_random_two_point_laws() {
        for seed in 1..100u64 {
            let p = (seed as f64) / 100.0;
            let pi = ProbabilityVector::new(vec![p, 1.0 - p]).unwrap();
            let f = Observable::new(vec![1.0, 0.0]);
            let lhs = moment_inequality_check(&pi, &f).unwrap();
            assert!(lhs >= 2.0 - 1e-10, "p = {p}: lhs = {lhs}");
        }
    }

    #[test]
    fn state_set_basics() {
        let s = StateSet::from_indices(&[0, 2], 4).unwrap();
        assert_eq!(s.mask(), 0b0101);
        assert!(s.contains(0) && s.contains(2));
        assert!(!s.contains(1) && !s.contains(3));
        assert_eq!(s.complement().mask(), 0b1010);
        assert_eq!(s.size(), 2);
        assert!(s.is_proper());
        assert!(StateSet::new(1 << 5, 4).is_err());
        assert!(StateSet::from_indices(&[4], 4).is_err());
    }
}
