//! Eigendecomposition of reversible kernels and everything derived from it:
//! spectral gaps, spectral measures, geometric decay bounds.
//!
//! A reversible pair is symmetrized as `S = D^{1/2} P D^{-1/2}` with
//! `D = diag(pi)`; detailed balance makes `S` symmetric, so its eigenvalues
//! are real, equal to those of `P`, and the back-transformed eigenvectors
//! `e_i = D^{-1/2} v_i` are orthonormal in L²(π). The constant function is
//! always an eigenfunction at 1; spectral gaps live on its orthogonal
//! complement, which is isolated here by an explicit Householder deflation of
//! the `sqrt(pi)` direction rather than by trusting eigenvalue ordering.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::hilbert::{self, Observable, ProbabilityVector};
use crate::kernel::{self, ReversiblePair};
use crate::linalg::{deflate_lift, deflate_symmetric, jacobi_eigen, SquareMatrix};
use crate::{Error, Result};

/// Eigenvalues within this distance of 1 are treated as part of the unit
/// eigenvalue cluster when detecting multiplicity.
pub const UNIT_EIGENVALUE_TOLERANCE: f64 = 1e-8;

/// Eigenvalues (descending) and π-orthonormal eigenfunctions of a reversible
/// kernel. Index 0 always carries the constant eigenfunction at eigenvalue 1.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenfunctions: Vec<Observable>,
    pi: ProbabilityVector,
    /// Symmetrized matrix, kept for deflation-based gap computations.
    sym: SquareMatrix,
}

/// Spectral gaps of `P` restricted to mean-zero functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralGapReport {
    /// Largest eigenvalue on the mean-zero subspace.
    pub lambda0_max: f64,
    /// Smallest eigenvalue on the mean-zero subspace.
    pub lambda0_min: f64,
    /// Right spectral gap `1 - lambda0_max`.
    pub rho_right: f64,
    /// Left spectral gap `1 + lambda0_min`.
    pub rho_left: f64,
    /// `max(|lambda0_max|, |lambda0_min|)`; geometric decay rate.
    pub lambda_bar: f64,
}

/// One atom of a spectral measure: mass `<f, e_i>^2` at eigenvalue `lambda_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralAtom {
    pub lambda: f64,
    pub mass: f64,
}

/// Discrete spectral measure of an observable: `<f, P^n f> = sum_i mass_i * lambda_i^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure {
    atoms: Vec<SpectralAtom>,
}

impl SpectralMeasure {
    pub fn atoms(&self) -> &[SpectralAtom] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// `sum_i mass_i * lambda_i^n`, the spectral form of `<f, P^n f>`.
    pub fn moment(&self, n: u32) -> f64 {
        self.atoms
            .iter()
            .map(|a| {
                let mut p = 1.0;
                for _ in 0..n {
                    p *= a.lambda;
                }
                a.mass * p
            })
            .sum()
    }
}

/// One row of a geometric decay check: `||P^n f0|| <= lambda_bar^n ||f0||`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayBound {
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
}

/// Symmetrize-and-eigendecompose a reversible pair.
///
/// Requires strictly positive `pi`. The symmetrized matrix is checked against
/// the pair's detailed-balance tolerance before solving, so a pair assembled
/// with `new_unchecked` still cannot slip a non-symmetric problem through.
pub fn decompose(pair: &ReversiblePair) -> Result<SpectralDecomposition> {
    let n = pair.n();
    let pi = pair.pi();
    if !pi.is_strictly_positive() {
        return Err(Error::InvalidArgument(
            "spectral decomposition needs strictly positive stationary mass".to_string(),
        ));
    }

    let violation = kernel::check_detailed_balance(pair.kernel(), pi)?;
    if violation > pair.db_tolerance() {
        return Err(Error::NotReversible {
            violation,
            tolerance: pair.db_tolerance(),
        });
    }

    let sqrt_pi: Vec<f64> = pi.weights().iter().map(|&w| libm::sqrt(w)).collect();
    let mut sym = SquareMatrix::zeros(n);
    for x in 0..n {
        for y in 0..n {
            sym.set(x, y, sqrt_pi[x] * pair.kernel().entry(x, y) / sqrt_pi[y]);
        }
    }
    // Averaging away the rounding asymmetry keeps Jacobi exactly symmetric.
    for x in 0..n {
        for y in (x + 1)..n {
            let avg = 0.5 * (sym.get(x, y) + sym.get(y, x));
            sym.set(x, y, avg);
            sym.set(y, x, avg);
        }
    }

    let eig = jacobi_eigen(&sym)?;
    let mut vectors = eig.vectors;
    let eigenvalues = eig.values;

    align_unit_cluster(&mut vectors, &eigenvalues, &sqrt_pi)?;

    let mut eigenfunctions = Vec::with_capacity(n);
    for k in 0..n {
        let mut values: Vec<f64> = (0..n).map(|x| vectors.get(x, k) / sqrt_pi[x]).collect();
        // Deterministic sign: the entry of largest magnitude is positive.
        let lead = values
            .iter()
            .enumerate()
            .fold((0usize, 0.0f64), |best, (i, &v)| {
                if v.abs() > best.1 {
                    (i, v.abs())
                } else {
                    best
                }
            })
            .0;
        if values[lead] < 0.0 {
            for v in values.iter_mut() {
                *v = -*v;
            }
        }
        eigenfunctions.push(Observable::new(values));
    }

    Ok(SpectralDecomposition {
        eigenvalues,
        eigenfunctions,
        pi: pi.clone(),
        sym,
    })
}

/// Rotates the basis of the near-unit eigenvalue cluster so that its first
/// vector is exactly the `sqrt(pi)` direction, i.e. so the constant function
/// sits at index 0 even when eigenvalue 1 is degenerate.
fn align_unit_cluster(
    vectors: &mut SquareMatrix,
    eigenvalues: &[f64],
    sqrt_pi: &[f64],
) -> Result<()> {
    let n = eigenvalues.len();
    let cluster = eigenvalues
        .iter()
        .take_while(|&&l| l > 1.0 - UNIT_EIGENVALUE_TOLERANCE)
        .count();
    if cluster == 0 {
        return Err(Error::Inconsistency(
            "stochastic matrix lost its unit eigenvalue".to_string(),
        ));
    }
    if cluster == 1 {
        // Simple eigenvalue: the top eigenvector already spans sqrt(pi).
        return Ok(());
    }

    let column = |m: &SquareMatrix, k: usize| -> Vec<f64> { (0..n).map(|r| m.get(r, k)).collect() };

    // Project sqrt(pi) into the cluster span.
    let mut first = alloc::vec![0.0; n];
    for k in 0..cluster {
        let v = column(vectors, k);
        let dot: f64 = v.iter().zip(sqrt_pi).map(|(a, b)| a * b).sum();
        for r in 0..n {
            first[r] += dot * v[r];
        }
    }
    let norm = libm::sqrt(first.iter().map(|x| x * x).sum::<f64>());
    if norm < 0.9 {
        return Err(Error::Inconsistency(
            "sqrt(pi) is not inside the unit eigenvalue cluster".to_string(),
        ));
    }
    for x in first.iter_mut() {
        *x /= norm;
    }

    // Gram-Schmidt the old cluster basis against the new leading vector.
    let mut basis: Vec<Vec<f64>> = alloc::vec![first];
    for k in 0..cluster {
        if basis.len() == cluster {
            break;
        }
        let mut v = column(vectors, k);
        for b in &basis {
            let dot: f64 = v.iter().zip(b).map(|(a, c)| a * c).sum();
            for r in 0..n {
                v[r] -= dot * b[r];
            }
        }
        let norm = libm::sqrt(v.iter().map(|x| x * x).sum::<f64>());
        if norm > 1e-6 {
            for x in v.iter_mut() {
                *x /= norm;
            }
            basis.push(v);
        }
    }
    if basis.len() != cluster {
        return Err(Error::Inconsistency(
            "could not re-orthonormalize the unit eigenvalue cluster".to_string(),
        ));
    }
    for (k, b) in basis.iter().enumerate() {
        for r in 0..n {
            vectors.set(r, k, b[r]);
        }
    }
    Ok(())
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvalues sorted descending; index 0 is the unit eigenvalue.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// π-orthonormal eigenfunctions matching [`Self::eigenvalues`].
    pub fn eigenfunctions(&self) -> &[Observable] {
        &self.eigenfunctions
    }

    pub fn pi(&self) -> &ProbabilityVector {
        &self.pi
    }

    /// Spectral gaps computed by deflating the `sqrt(pi)` direction out of
    /// the symmetrized matrix and re-solving on the complement, so the unit
    /// eigenvalue can never shadow the mean-zero spectrum.
    ///
    /// If the deflated spectrum still reaches the unit cluster the eigenvalue
    /// 1 is not simple: the report then pins `lambda0_max = 1`,
    /// `rho_right = 0`.
    pub fn gaps(&self) -> SpectralGapReport {
        let (values, _) = self.deflated_spectrum();
        let mut lambda0_max = values[0];
        let lambda0_min = values[values.len() - 1];

        if lambda0_max > 1.0 - UNIT_EIGENVALUE_TOLERANCE {
            lambda0_max = 1.0;
        }
        let rho_right = (1.0 - lambda0_max).clamp(0.0, 2.0);
        let rho_left = (1.0 + lambda0_min).clamp(0.0, 2.0);
        SpectralGapReport {
            lambda0_max,
            lambda0_min,
            rho_right,
            rho_left,
            lambda_bar: lambda0_max.abs().max(lambda0_min.abs()),
        }
    }

    /// Unit-norm mean-zero eigenfunction attaining `lambda0_max` (the
    /// minimizer of the Dirichlet form over the unit sphere of L₀²(π)).
    pub(crate) fn gap_minimizer(&self) -> Observable {
        let (_, top) = self.deflated_spectrum();
        let sqrt_pi: Vec<f64> = self.pi.weights().iter().map(|&w| libm::sqrt(w)).collect();
        let lifted = deflate_lift(&sqrt_pi, &top);
        Observable::new(lifted.iter().zip(&sqrt_pi).map(|(&v, &s)| v / s).collect())
    }

    /// Eigenvalues of the symmetrized matrix restricted to the orthogonal
    /// complement of `sqrt(pi)`, plus the top eigenvector of that block.
    fn deflated_spectrum(&self) -> (Vec<f64>, Vec<f64>) {
        let sqrt_pi: Vec<f64> = self.pi.weights().iter().map(|&w| libm::sqrt(w)).collect();
        let block = deflate_symmetric(&self.sym, &sqrt_pi);
        let eig = jacobi_eigen(&block).expect("deflated block is symmetric");
        let top: Vec<f64> = (0..block.n()).map(|r| eig.vectors.get(r, 0)).collect();
        (eig.values, top)
    }
}

/// Spectral measure of `f`: atoms `(lambda_i, <f, e_i>^2)` in decomposition
/// order. Total mass is `<f, f>` by Parseval.
pub fn spectral_measure(dec: &SpectralDecomposition, f: &Observable) -> Result<SpectralMeasure> {
    if f.len() != dec.n() {
        return Err(Error::DimensionMismatch {
            expected: dec.n(),
            got: f.len(),
        });
    }
    let atoms = dec
        .eigenvalues
        .iter()
        .zip(&dec.eigenfunctions)
        .map(|(&lambda, e)| {
            let a = hilbert::inner(&dec.pi, f, e)?;
            Ok(SpectralAtom {
                lambda,
                mass: a * a,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralMeasure { atoms })
}

/// Checks the geometric decay bound `||P^n f0|| <= lambda_bar^n ||f0||` for
/// `n = 1..=n_max`, where `f0` is the centered `f`.
pub fn decay_bound_check(
    pair: &ReversiblePair,
    f: &Observable,
    n_max: usize,
) -> Result<Vec<DecayBound>> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be >= 1".to_string()));
    }
    let dec = decompose(pair)?;
    let lambda_bar = dec.gaps().lambda_bar;

    let f0 = hilbert::center(pair.pi(), f)?;
    let norm0 = hilbert::norm(pair.pi(), &f0)?;

    let mut rows = Vec::with_capacity(n_max);
    let mut iterate = f0;
    let mut bound = norm0;
    for n in 1..=n_max {
        iterate = kernel::apply(pair.kernel(), &iterate)?;
        bound *= lambda_bar;
        rows.push(DecayBound {
            n,
            lhs: hilbert::norm(pair.pi(), &iterate)?,
            rhs: bound,
        });
    }
    Ok(rows)
}
