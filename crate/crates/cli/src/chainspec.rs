//! On-disk chain descriptions.
//!
//! A chain file is a single JSON document:
//!
//! ```json
//! {
//!   "n": 2,
//!   "P": [[0.7, 0.3], [0.6, 0.4]],
//!   "pi": [0.6666666666666666, 0.3333333333333333],
//!   "functions": { "h": [1.0, 0.0] }
//! }
//! ```
//!
//! Exactly one of `P` or `target`+`proposal` must be present. With `P`, the
//! stationary distribution `pi` may be omitted and is then solved for; with
//! `target`+`proposal`, the kernel is built by the Metropolis–Hastings rule.
//! `functions` holds the named observables commands refer to.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use revmix_core::hilbert::{Observable, ProbabilityVector};
use revmix_core::kernel::{
    build_metropolis_hastings, find_stationary, ProposalKernel, ReversiblePair, TransitionKernel,
};

use crate::report::Value;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error in {origin}: {message}")]
    Parse { origin: String, message: String },
    #[error("invalid chain description in {origin}: {message}")]
    Invalid { origin: String, message: String },
    #[error("{0}")]
    Core(#[from] revmix_core::Error),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChainSpec {
    n: usize,
    #[serde(rename = "P", default)]
    p: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pi: Option<Vec<f64>>,
    #[serde(default)]
    target: Option<Vec<f64>>,
    #[serde(default)]
    proposal: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    functions: BTreeMap<String, Vec<f64>>,
}

/// A loaded, validated chain with its named observables.
#[derive(Debug, Clone)]
pub struct ChainSpec {
    pub n: usize,
    pub pair: ReversiblePair,
    pub functions: BTreeMap<String, Observable>,
    /// True when `pi` was solved from `P` rather than given.
    pub pi_inferred: bool,
    /// True when the kernel came from the Metropolis–Hastings construction.
    pub built_from_proposal: bool,
}

pub fn load_chain_spec(path: &Path) -> Result<ChainSpec, SpecError> {
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| SpecError::Io {
        path: origin.clone(),
        message: e.to_string(),
    })?;
    chain_spec_from_str(&text, &origin)
}

pub fn chain_spec_from_str(text: &str, origin: &str) -> Result<ChainSpec, SpecError> {
    let raw: RawChainSpec = serde_json::from_str(text).map_err(|e| SpecError::Parse {
        origin: origin.to_string(),
        message: e.to_string(),
    })?;
    let invalid = |message: String| SpecError::Invalid {
        origin: origin.to_string(),
        message,
    };

    let n = raw.n;
    if n < 2 {
        return Err(invalid(format!("n must be at least 2, got {n}")));
    }

    let check_square = |name: &str, rows: &[Vec<f64>]| -> Result<(), SpecError> {
        if rows.len() != n {
            return Err(invalid(format!(
                "{name} has {} rows, expected n = {n}",
                rows.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(invalid(format!(
                    "{name} row {i} has {} entries, expected n = {n}",
                    row.len()
                )));
            }
        }
        Ok(())
    };

    let (pair, pi_inferred, built_from_proposal) = match (&raw.p, &raw.target, &raw.proposal) {
        (Some(p), None, None) => {
            check_square("P", p)?;
            let kernel = TransitionKernel::from_rows(p)?;
            match &raw.pi {
                Some(pi) => {
                    if pi.len() != n {
                        return Err(invalid(format!(
                            "pi has {} entries, expected n = {n}",
                            pi.len()
                        )));
                    }
                    let pi = ProbabilityVector::new(pi.clone())?;
                    (ReversiblePair::new(kernel, pi)?, false, false)
                }
                None => {
                    let pi = find_stationary(&kernel)?;
                    (ReversiblePair::new(kernel, pi)?, true, false)
                }
            }
        }
        (None, Some(target), Some(proposal)) => {
            if raw.pi.is_some() {
                return Err(invalid(
                    "pi is only valid alongside P; the Metropolis-Hastings target is `target`"
                        .to_string(),
                ));
            }
            if target.len() != n {
                return Err(invalid(format!(
                    "target has {} entries, expected n = {n}",
                    target.len()
                )));
            }
            check_square("proposal", proposal)?;
            let target = ProbabilityVector::new(target.clone())?;
            let proposal = ProposalKernel::from_rows(proposal)?;
            (build_metropolis_hastings(&target, &proposal)?, false, true)
        }
        _ => {
            return Err(invalid(
                "exactly one of `P` or `target`+`proposal` must be present".to_string(),
            ));
        }
    };

    let mut functions = BTreeMap::new();
    for (name, values) in raw.functions {
        if values.len() != n {
            return Err(invalid(format!(
                "function {name:?} has {} entries, expected n = {n}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(invalid(format!(
                "function {name:?} has non-finite entry {bad}"
            )));
        }
        functions.insert(name, Observable::new(values));
    }

    Ok(ChainSpec {
        n,
        pair,
        functions,
        pi_inferred,
        built_from_proposal,
    })
}

impl ChainSpec {
    pub fn function(&self, name: &str) -> Result<&Observable, SpecError> {
        self.functions.get(name).ok_or_else(|| SpecError::Invalid {
            origin: "function lookup".to_string(),
            message: format!(
                "no function named {name:?}; available: {:?}",
                self.functions.keys().collect::<Vec<_>>()
            ),
        })
    }

    /// Serializes the resolved chain (kernel, stationary law, functions) in
    /// the same format `load_chain_spec` reads, with 17-significant-digit
    /// numbers so reloading reproduces the analyses bit for bit.
    pub fn to_json(&self) -> String {
        let n = self.n;
        let rows: Vec<Value> = (0..n)
            .map(|x| {
                Value::List(
                    self.pair
                        .kernel()
                        .row(x)
                        .iter()
                        .map(|&v| Value::Num(v))
                        .collect(),
                )
            })
            .collect();
        let pi = Value::List(
            self.pair
                .pi()
                .weights()
                .iter()
                .map(|&w| Value::Num(w))
                .collect(),
        );
        let functions = Value::Map(
            self.functions
                .iter()
                .map(|(name, f)| {
                    (
                        name.clone(),
                        Value::List(f.values().iter().map(|&v| Value::Num(v)).collect()),
                    )
                })
                .collect(),
        );
        Value::Map(vec![
            ("n".to_string(), Value::UInt(n as u64)),
            ("P".to_string(), Value::List(rows)),
            ("pi".to_string(), pi),
            ("functions".to_string(), functions),
        ])
        .to_json()
    }
}
