//! Seeded generators and named fixtures used by the test suites (and handy
//! for benchmarks or exploratory work).
//!
//! Random reversible pairs are built from symmetric positive edge weights:
//! with `W` symmetric, `pi(x) ∝ sum_y W(x,y)` and `P(x,y) = W(x,y)/sum_y`
//! satisfy detailed balance exactly; strictly positive weights keep the chain
//! irreducible. `random_pair_sharing_pi` instead scales a random symmetric
//! flow to fit under a prescribed `pi`, which is what the kernel-ordering
//! checks need.

use alloc::vec;
use alloc::vec::Vec;

use crate::hilbert::{self, Observable, ProbabilityVector};
use crate::kernel::{ReversiblePair, TransitionKernel};
use crate::linalg::SquareMatrix;
use crate::rng::SplitMix64;

/// The named chains that recur throughout the test suites.
pub mod fixtures {
    use super::*;
    use crate::kernel::{build_metropolis_hastings, ProposalKernel};

    /// Two-state flip chain `[[0,1],[1,0]]` with uniform stationary law: the
    /// periodic extreme with right gap 2 and left gap 0.
    pub fn flip() -> ReversiblePair {
        let kernel = TransitionKernel::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        ReversiblePair::new(kernel, ProbabilityVector::uniform(2).unwrap()).unwrap()
    }

    /// Two-state chain `[[0.7,0.3],[0.6,0.4]]`, stationary law (2/3, 1/3),
    /// single non-unit eigenvalue 0.1.
    pub fn lazy2() -> ReversiblePair {
        let kernel = TransitionKernel::from_rows(&[vec![0.7, 0.3], vec![0.6, 0.4]]).unwrap();
        let pi = ProbabilityVector::new(vec![2.0 / 3.0, 1.0 / 3.0]).unwrap();
        ReversiblePair::new(kernel, pi).unwrap()
    }

    /// Metropolis–Hastings chain for target (0.2, 0.3, 0.5) with the uniform
    /// two-other-states proposal.
    pub fn mh3() -> ReversiblePair {
        let pi = ProbabilityVector::new(vec![0.2, 0.3, 0.5]).unwrap();
        let q = ProposalKernel::from_rows(&[
            vec![0.0, 0.5, 0.5],
            vec![0.5, 0.0, 0.5],
            vec![0.5, 0.5, 0.0],
        ])
        .unwrap();
        build_metropolis_hastings(&pi, &q).unwrap()
    }

    /// Identity kernel on `n` states with uniform stationary law; reducible,
    /// every distribution is stationary.
    pub fn identity(n: usize) -> ReversiblePair {
        ReversiblePair::new(
            TransitionKernel::identity(n).unwrap(),
            ProbabilityVector::uniform(n).unwrap(),
        )
        .unwrap()
    }
}

/// Random irreducible reversible pair on `n >= 2` states.
pub fn random_reversible_pair(seed: u64, n: usize) -> ReversiblePair {
    assert!(n >= 2, "need at least two states");
    let mut rng = SplitMix64::stream(seed, 0x7061_6972); // "pair"
    let mut weights = SquareMatrix::zeros(n);
    for x in 0..n {
        for y in x..n {
            // Strictly positive symmetric weights; heavier diagonal mixes the
            // spectrum away from the periodic edge.
            let w = 0.1 + rng.next_f64();
            let w = if x == y { 0.5 * w } else { w };
            weights.set(x, y, w);
            weights.set(y, x, w);
        }
    }

    let row_sums: Vec<f64> = (0..n).map(|x| weights.row(x).iter().sum()).collect();
    let total: f64 = row_sums.iter().sum();

    let mut pi: Vec<f64> = row_sums.iter().map(|s| s / total).collect();
    // Force an exact unit sum so validation never trips on rounding.
    let correction: f64 = pi.iter().sum();
    for w in pi.iter_mut() {
        *w /= correction;
    }

    let mut matrix = SquareMatrix::zeros(n);
    for x in 0..n {
        for y in 0..n {
            matrix.set(x, y, weights.get(x, y) / row_sums[x]);
        }
    }

    let kernel = normalize_rows(matrix);
    ReversiblePair::new(kernel, ProbabilityVector::new(pi).unwrap())
        .expect("weighted-graph construction is reversible")
}

/// Random reversible pair with the prescribed stationary law.
///
/// Draws a symmetric off-diagonal flow, scales it until every row fits under
/// its stationary mass, and puts the remainder on the diagonal.
pub fn random_pair_sharing_pi(seed: u64, pi: &ProbabilityVector) -> ReversiblePair {
    let n = pi.len();
    let mut rng = SplitMix64::stream(seed, 0x666c_6f77); // "flow"
    let mut flow = SquareMatrix::zeros(n);
    for x in 0..n {
        for y in (x + 1)..n {
            let f = rng.next_f64();
            flow.set(x, y, f);
            flow.set(y, x, f);
        }
    }
    // Scale so off-diagonal flow out of x stays below 0.9 * pi(x).
    let mut scale = f64::INFINITY;
    for x in 0..n {
        let out: f64 = flow.row(x).iter().sum();
        if out > 0.0 {
            scale = scale.min(0.9 * pi.get(x) / out);
        }
    }
    let mut matrix = SquareMatrix::zeros(n);
    for x in 0..n {
        let mut off = 0.0;
        for y in 0..n {
            if x != y {
                let p = scale * flow.get(x, y) / pi.get(x);
                matrix.set(x, y, p);
                off += p;
            }
        }
        matrix.set(x, x, 1.0 - off);
    }

    let kernel = normalize_rows(matrix);
    ReversiblePair::new(kernel, pi.clone()).expect("scaled symmetric flow is reversible")
}

fn normalize_rows(mut matrix: SquareMatrix) -> TransitionKernel {
    let n = matrix.n();
    for x in 0..n {
        let sum: f64 = matrix.row(x).iter().sum();
        for y in 0..n {
            matrix.set(x, y, matrix.get(x, y) / sum);
        }
    }
    TransitionKernel::new(matrix).expect("rows normalized")
}

/// Observable with independent standard-normal entries.
pub fn random_observable(seed: u64, n: usize) -> Observable {
    let mut rng = SplitMix64::stream(seed, 0x6f62_7300); // "obs"
    Observable::new((0..n).map(|_| rng.next_normal()).collect())
}

/// Unit-norm mean-zero observable under the given `pi`.
pub fn random_unit_mean_zero(seed: u64, pi: &ProbabilityVector) -> Observable {
    let mut rng = SplitMix64::stream(seed, 0x756d_7a00); // "umz"
    loop {
        let raw = Observable::new((0..pi.len()).map(|_| rng.next_normal()).collect());
        let centered = hilbert::center(pi, &raw).expect("matching dimensions");
        let norm = hilbert::norm(pi, &centered).expect("matching dimensions");
        if norm > 1e-9 {
            return centered.scale(1.0 / norm);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::check_detailed_balance;

    #[test]
    fn random_pairs_are_reversible_and_deterministic() {
        for seed in 0..20 {
            let n = 2 + (seed as usize % 7);
            let pair = random_reversible_pair(seed, n);
            assert!(check_detailed_balance(pair.kernel(), pair.pi()).unwrap() < 1e-14);
            let again = random_reversible_pair(seed, n);
            assert_eq!(pair.kernel(), again.kernel());
        }
    }

    #[test]
    fn shared_pi_pairs_share_pi() {
        let base = random_reversible_pair(5, 6);
        for seed in 0..10 {
            let other = random_pair_sharing_pi(seed, base.pi());
            assert_eq!(other.pi(), base.pi());
            assert!(check_detailed_balance(other.kernel(), other.pi()).unwrap() < 1e-14);
        }
    }

    #[test]
    fn unit_mean_zero_is_unit_and_mean_zero() {
        let pair = random_reversible_pair(9, 5);
        for seed in 0..10 {
            let f = random_unit_mean_zero(seed, pair.pi());
            let m = hilbert::mean(pair.pi(), &f).unwrap();
            let n = hilbert::norm(pair.pi(), &f).unwrap();
            assert!(m.abs() < 1e-12);
            assert!((n - 1.0).abs() < 1e-12);
        }
    }
}
