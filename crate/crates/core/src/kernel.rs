//! Transition kernels and reversibility.
//!
//! The central object is [`ReversiblePair`]: a row-stochastic matrix `P`
//! together with a distribution `pi` satisfying detailed balance
//! `pi(x) P(x,y) = pi(y) P(y,x)`. Detailed balance makes `pi` stationary and
//! `P` self-adjoint in L²(π), which is what the spectral, Dirichlet and
//! conductance modules all build on.
//!
//! Construction helpers cover the two standard ways reversible kernels arise
//! in practice: Metropolis–Hastings propose-accept-reject kernels for a given
//! target, and lazy mixtures `(1-beta) I + beta P`.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::hilbert::{Observable, ProbabilityVector};
use crate::linalg::{solve_linear, SquareMatrix};
use crate::{Error, Result};

/// Tolerance on row sums of a stochastic matrix.
pub const ROW_SUM_TOLERANCE: f64 = 1e-12;

/// Default ceiling on the detailed-balance violation of a [`ReversiblePair`].
pub const DEFAULT_DB_TOLERANCE: f64 = 1e-10;

/// Tolerance on the independent stationarity check `pi P = pi`.
pub const STATIONARITY_TOLERANCE: f64 = 1e-10;

/// A row-stochastic matrix: row `x` is the distribution of the next state
/// given the current state `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionKernel {
    matrix: SquareMatrix,
}

fn check_stochastic(matrix: &SquareMatrix, what: &str) -> Result<()> {
    let n = matrix.n();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "{what} needs at least 2 states, got {n}"
        )));
    }
    for x in 0..n {
        let mut sum = 0.0;
        for (y, &p) in matrix.row(x).iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "{what} entry ({x},{y}) is {p}, must be finite and >= 0"
                )));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "{what} row {x} sums to {sum:.17}, not 1"
            )));
        }
    }
    Ok(())
}

impl TransitionKernel {
    pub fn new(matrix: SquareMatrix) -> Result<Self> {
        check_stochastic(&matrix, "transition kernel")?;
        Ok(Self { matrix })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(SquareMatrix::from_rows(rows)?)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(SquareMatrix::identity(n))
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn entry(&self, x: usize, y: usize) -> f64 {
        self.matrix.get(x, y)
    }

    pub fn row(&self, x: usize) -> &[f64] {
        self.matrix.row(x)
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.matrix
    }
}

/// A row-stochastic proposal `q(x, .)` for propose-accept-reject kernels.
#[derive(Debug, Clone, PartialEq)]
pub struct ProposalKernel {
    matrix: SquareMatrix,
}

impl ProposalKernel {
    pub fn new(matrix: SquareMatrix) -> Result<Self> {
        check_stochastic(&matrix, "proposal kernel")?;
        Ok(Self { matrix })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(SquareMatrix::from_rows(rows)?)
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn entry(&self, x: usize, y: usize) -> f64 {
        self.matrix.get(x, y)
    }
}

/// A kernel/distribution pair verified to satisfy detailed balance.
///
/// `db_tolerance` is the largest permitted violation of
/// `pi(x) P(x,y) = pi(y) P(y,x)`; construction also independently checks the
/// implied stationarity `pi P = pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReversiblePair {
    kernel: TransitionKernel,
    pi: ProbabilityVector,
    db_tolerance: f64,
}

impl ReversiblePair {
    /// Validates with [`DEFAULT_DB_TOLERANCE`].
    pub fn new(kernel: TransitionKernel, pi: ProbabilityVector) -> Result<Self> {
        Self::with_tolerance(kernel, pi, DEFAULT_DB_TOLERANCE)
    }

    /// Validates with an explicit detailed-balance tolerance.
    pub fn with_tolerance(
        kernel: TransitionKernel,
        pi: ProbabilityVector,
        db_tolerance: f64,
    ) -> Result<Self> {
        if !db_tolerance.is_finite() || db_tolerance < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "db_tolerance must be >= 0, got {db_tolerance}"
            )));
        }
        let violation = check_detailed_balance(&kernel, &pi)?;
        if violation > db_tolerance {
            return Err(Error::NotReversible {
                violation,
                tolerance: db_tolerance,
            });
        }
        let pair = Self {
            kernel,
            pi,
            db_tolerance,
        };
        let drift = pair.stationarity_defect();
        if drift > STATIONARITY_TOLERANCE {
            return Err(Error::Inconsistency(format!(
                "pi P differs from pi by {drift:e} despite detailed balance"
            )));
        }
        Ok(pair)
    }

    /// Skips all validation. Intended for diagnostics on deliberately broken
    /// pairs (e.g. measuring the self-adjointness defect of a non-reversible
    /// kernel); every analysis in this crate assumes a validated pair.
    pub fn new_unchecked(
        kernel: TransitionKernel,
        pi: ProbabilityVector,
        db_tolerance: f64,
    ) -> Self {
        Self {
            kernel,
            pi,
            db_tolerance,
        }
    }

    pub fn kernel(&self) -> &TransitionKernel {
        &self.kernel
    }

    pub fn pi(&self) -> &ProbabilityVector {
        &self.pi
    }

    pub fn db_tolerance(&self) -> f64 {
        self.db_tolerance
    }

    pub fn n(&self) -> usize {
        self.kernel.n()
    }

    /// Off-diagonal stationary flow `pi(x) P(x,y)`.
    pub fn flow(&self, x: usize, y: usize) -> f64 {
        self.pi.get(x) * self.kernel.entry(x, y)
    }

    /// Max-norm of `pi P - pi`.
    pub fn stationarity_defect(&self) -> f64 {
        let n = self.n();
        let mut worst = 0.0f64;
        for y in 0..n {
            let mut image = 0.0;
            for x in 0..n {
                image += self.pi.get(x) * self.kernel.entry(x, y);
            }
            worst = worst.max((image - self.pi.get(y)).abs());
        }
        worst
    }
}

/// Max over `(x, y)` of `|pi(x) P(x,y) - pi(y) P(y,x)|`.
pub fn check_detailed_balance(kernel: &TransitionKernel, pi: &ProbabilityVector) -> Result<f64> {
    let n = kernel.n();
    if pi.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: pi.len(),
        });
    }
    let mut worst = 0.0f64;
    for x in 0..n {
        for y in (x + 1)..n {
            let forward = pi.get(x) * kernel.entry(x, y);
            let backward = pi.get(y) * kernel.entry(y, x);
            worst = worst.max((forward - backward).abs());
        }
    }
    Ok(worst)
}

/// Stationary distribution of an irreducible kernel.
///
/// Solves the singular system `pi (P - I) = 0` with one equation replaced by
/// the normalization `sum(pi) = 1`, so periodic chains work (no power
/// iteration). A reducible kernel (eigenvalue 1 not simple) leaves the system
/// rank deficient and is reported as [`Error::NonUniqueStationary`].
pub fn find_stationary(kernel: &TransitionKernel) -> Result<ProbabilityVector> {
    let n = kernel.n();
    let mut system = kernel.matrix().transpose();
    for i in 0..n {
        system.set(i, i, system.get(i, i) - 1.0);
    }
    // Rows of P^T - I are linearly dependent (columns of P - I sum to zero),
    // so replacing the last row with the normalization keeps the solution set.
    for j in 0..n {
        system.set(n - 1, j, 1.0);
    }
    let mut rhs = vec![0.0; n];
    rhs[n - 1] = 1.0;

    let mut weights = match solve_linear(&system, &rhs) {
        Ok(w) => w,
        Err(Error::SingularSystem) => return Err(Error::NonUniqueStationary),
        Err(e) => return Err(e),
    };

    // Clip solver noise, renormalize exactly, and re-validate.
    for w in weights.iter_mut() {
        if *w < 0.0 {
            if *w < -1e-12 {
                return Err(Error::NonUniqueStationary);
            }
            *w = 0.0;
        }
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::NonUniqueStationary);
    }
    for w in weights.iter_mut() {
        *w /= total;
    }
    let pi = ProbabilityVector::new(weights)?;

    let residual = stationarity_residual(kernel, &pi);
    if residual > 1e-12 {
        return Err(Error::NonUniqueStationary);
    }
    Ok(pi)
}

fn stationarity_residual(kernel: &TransitionKernel, pi: &ProbabilityVector) -> f64 {
    let n = kernel.n();
    let mut worst = 0.0f64;
    for y in 0..n {
        let mut image = 0.0;
        for x in 0..n {
            image += pi.get(x) * kernel.entry(x, y);
        }
        worst = worst.max((image - pi.get(y)).abs());
    }
    worst
}

/// `(P f)(x) = sum_y P(x,y) f(y)`.
pub fn apply(kernel: &TransitionKernel, f: &Observable) -> Result<Observable> {
    if f.len() != kernel.n() {
        return Err(Error::DimensionMismatch {
            expected: kernel.n(),
            got: f.len(),
        });
    }
    Ok(Observable::new(kernel.matrix().mul_vec(f.values())))
}

/// `|<Pf, g> - <f, Pg>|` in L²(π); zero (to rounding) for a reversible pair.
pub fn self_adjoint_defect(pair: &ReversiblePair, f: &Observable, g: &Observable) -> Result<f64> {
    let pf = apply(pair.kernel(), f)?;
    let pg = apply(pair.kernel(), g)?;
    let lhs = crate::hilbert::inner(pair.pi(), &pf, g)?;
    let rhs = crate::hilbert::inner(pair.pi(), f, &pg)?;
    Ok((lhs - rhs).abs())
}

/// Metropolis–Hastings kernel for target `pi` and proposal `q`.
///
/// Off-diagonal entries are `q(x,y) min(1, pi(y)q(y,x) / (pi(x)q(x,y)))`;
/// a proposal with `q(y,x) = 0` is never accepted, and the diagonal absorbs
/// all rejected mass. Detailed balance then holds by construction.
pub fn build_metropolis_hastings(
    pi: &ProbabilityVector,
    proposal: &ProposalKernel,
) -> Result<ReversiblePair> {
    let n = proposal.n();
    if pi.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: pi.len(),
        });
    }
    if !pi.is_strictly_positive() {
        return Err(Error::InvalidArgument(
            "Metropolis-Hastings target must have strictly positive mass on every state"
                .to_string(),
        ));
    }

    let mut matrix = SquareMatrix::zeros(n);
    for x in 0..n {
        let mut off_diagonal = 0.0;
        for y in 0..n {
            if y == x {
                continue;
            }
            let q_xy = proposal.entry(x, y);
            if q_xy == 0.0 {
                continue; // move never proposed
            }
            let q_yx = proposal.entry(y, x);
            if q_yx == 0.0 {
                continue; // acceptance ratio is zero
            }
            let ratio = (pi.get(y) * q_yx) / (pi.get(x) * q_xy);
            let alpha = ratio.min(1.0);
            let p = q_xy * alpha;
            matrix.set(x, y, p);
            off_diagonal += p;
        }
        matrix.set(x, x, (1.0 - off_diagonal).max(0.0));
    }

    ReversiblePair::new(TransitionKernel::new(matrix)?, pi.clone())
}

/// The lazy mixture `(1-beta) I + beta P`, reversible for the same `pi`.
pub fn lazy_mixture(pair: &ReversiblePair, beta: f64) -> Result<ReversiblePair> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "mixture weight must be in (0, 1], got {beta}"
        )));
    }
    let n = pair.n();
    let mut matrix = SquareMatrix::zeros(n);
    for x in 0..n {
        for y in 0..n {
            let base = if x == y { 1.0 - beta } else { 0.0 };
            matrix.set(x, y, base + beta * pair.kernel().entry(x, y));
        }
    }
    ReversiblePair::with_tolerance(
        TransitionKernel::new(matrix)?,
        pair.pi().clone(),
        pair.db_tolerance(),
    )
}
