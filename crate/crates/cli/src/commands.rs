//! Command implementations shared by the binary and the test suites.
//!
//! Each command produces a [`CommandOutput`]: a JSON report tree, a
//! human-readable text rendering, and a verdict flag. Verdict failures (an
//! inequality that should hold numerically but does not) map to exit code 1;
//! unusable input maps to exit code 2 through [`SpecError`].

use std::fmt::Write as _;

use revmix_core::conductance::{self, ConductanceMethod, ConductanceMode};
use revmix_core::dirichlet;
use revmix_core::simulate::{self, InitialLaw, RngSeed};
use revmix_core::spectral;
use revmix_core::variance;

use crate::chainspec::{ChainSpec, SpecError};
use crate::report::Value;

#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub json: Value,
    pub text: String,
    /// False when a checked inequality failed; the process then exits 1.
    pub verdict_ok: bool,
}

fn entry(map: &mut Vec<(String, Value)>, key: &str, value: Value) {
    map.push((key.to_string(), value));
}

/// `analyze`: eigenvalues, spectral gaps, variance-bounding verdict.
pub fn analyze(spec: &ChainSpec) -> Result<CommandOutput, SpecError> {
    let dec = spectral::decompose(&spec.pair)?;
    let gaps = dec.gaps();
    let variance_bounding = gaps.rho_right > variance::VARIANCE_BOUNDING_FLOOR;

    let mut map = Value::map();
    entry(&mut map, "command", Value::Str("analyze".into()));
    entry(&mut map, "n", Value::UInt(spec.n as u64));
    entry(
        &mut map,
        "pi",
        Value::List(
            spec.pair
                .pi()
                .weights()
                .iter()
                .map(|&w| Value::Num(w))
                .collect(),
        ),
    );
    entry(
        &mut map,
        "eigenvalues",
        Value::List(dec.eigenvalues().iter().map(|&l| Value::Num(l)).collect()),
    );
    entry(&mut map, "lambda0_max", Value::Num(gaps.lambda0_max));
    entry(&mut map, "lambda0_min", Value::Num(gaps.lambda0_min));
    entry(&mut map, "rho_right", Value::Num(gaps.rho_right));
    entry(&mut map, "rho_left", Value::Num(gaps.rho_left));
    entry(&mut map, "lambda_bar", Value::Num(gaps.lambda_bar));
    entry(
        &mut map,
        "variance_bounding",
        Value::Bool(variance_bounding),
    );

    let mut text = String::new();
    let _ = writeln!(text, "states: {}", spec.n);
    let _ = writeln!(text, "eigenvalues: {}", join_nums(dec.eigenvalues()));
    let _ = writeln!(text, "lambda0_max = {}", gaps.lambda0_max);
    let _ = writeln!(text, "lambda0_min = {}", gaps.lambda0_min);
    let _ = writeln!(text, "rho_right = {}", gaps.rho_right);
    let _ = writeln!(text, "rho_left = {}", gaps.rho_left);
    let _ = writeln!(text, "lambda_bar = {}", gaps.lambda_bar);
    let _ = writeln!(text, "variance bounding: {variance_bounding}");

    Ok(CommandOutput {
        json: Value::Map(map),
        text,
        verdict_ok: true,
    })
}

/// `variance`: exact asymptotic variance of a named observable, optionally
/// cross-checked by simulation.
pub fn variance_cmd(
    spec: &ChainSpec,
    function: &str,
    simulation: Option<(usize, u64, f64)>,
) -> Result<CommandOutput, SpecError> {
    let h = spec.function(function)?;
    let report = variance::asymptotic_variance(&spec.pair, h)?;

    let mut map = Value::map();
    entry(&mut map, "command", Value::Str("variance".into()));
    entry(&mut map, "function", Value::Str(function.into()));
    entry(&mut map, "value", Value::Num(report.value));
    entry(&mut map, "h_variance", Value::Num(report.h_variance));
    entry(
        &mut map,
        "spectral_value",
        Value::Num(report.spectral_value),
    );
    entry(&mut map, "upper_bound", Value::Num(report.upper_bound));
    entry(
        &mut map,
        "variance_bounding",
        Value::Bool(report.variance_bounding),
    );
    entry(
        &mut map,
        "conditioning_warning",
        Value::Bool(report.conditioning_warning),
    );

    let mut text = String::new();
    let _ = writeln!(text, "function: {function}");
    let _ = writeln!(text, "asymptotic variance = {}", report.value);
    let _ = writeln!(text, "stationary variance <h0,h0> = {}", report.h_variance);
    let _ = writeln!(text, "spectral route = {}", report.spectral_value);
    let _ = writeln!(text, "spectral upper bound = {}", report.upper_bound);
    if report.conditioning_warning {
        let _ = writeln!(
            text,
            "warning: right gap below 1e-6, solve is ill conditioned"
        );
    }

    let mut verdict_ok = true;
    if let Some((steps, seed, rel_tol)) = simulation {
        let check = simulate::empirical_vs_exact(&spec.pair, h, steps, RngSeed(seed), rel_tol)?;
        verdict_ok = check.pass;

        let mut sim = Value::map();
        entry(&mut sim, "steps", Value::UInt(steps as u64));
        entry(&mut sim, "seed", Value::UInt(seed));
        entry(&mut sim, "estimate", Value::Num(check.empirical.estimate));
        entry(
            &mut sim,
            "standard_error",
            Value::Num(check.empirical.standard_error),
        );
        entry(
            &mut sim,
            "batch_count",
            Value::UInt(check.empirical.batch_count as u64),
        );
        entry(
            &mut sim,
            "batch_length",
            Value::UInt(check.empirical.batch_length as u64),
        );
        entry(&mut sim, "rel_tol", Value::Num(rel_tol));
        entry(&mut sim, "threshold", Value::Num(check.threshold));
        entry(&mut sim, "pass", Value::Bool(check.pass));
        entry(&mut map, "simulation", Value::Map(sim));

        let _ = writeln!(
            text,
            "batch means ({} steps, seed {}): estimate = {} (se {})",
            steps, seed, check.empirical.estimate, check.empirical.standard_error
        );
        let _ = writeln!(
            text,
            "|estimate - exact| <= {}: {}",
            check.threshold,
            if check.pass { "pass" } else { "FAIL" }
        );
    }

    Ok(CommandOutput {
        json: Value::Map(map),
        text,
        verdict_ok,
    })
}

/// `conductance`: minimize set conductance exactly or by sampling.
pub fn conductance_cmd(
    spec: &ChainSpec,
    method: ConductanceMethod,
) -> Result<CommandOutput, SpecError> {
    let report = conductance::kernel_conductance(&spec.pair, method)?;
    let mode = match report.mode {
        ConductanceMode::Exact => "exact",
        ConductanceMode::Sampled => "sampled",
    };

    let mut map = Value::map();
    entry(&mut map, "command", Value::Str("conductance".into()));
    entry(&mut map, "mode", Value::Str(mode.into()));
    entry(&mut map, "kappa", Value::Num(report.kappa));
    entry(&mut map, "kappa_star", Value::Num(report.kappa_star));
    entry(
        &mut map,
        "argmin_kappa",
        Value::from_states(&report.argmin_kappa.indices()),
    );
    entry(
        &mut map,
        "argmin_kappa_star",
        Value::from_states(&report.argmin_kappa_star.indices()),
    );
    entry(&mut map, "sets_examined", Value::UInt(report.sets_examined));

    let mut text = String::new();
    let _ = writeln!(text, "mode: {mode}");
    let _ = writeln!(
        text,
        "kappa = {} at A = {:?}",
        report.kappa,
        report.argmin_kappa.indices()
    );
    let _ = writeln!(
        text,
        "kappa_star = {} at A = {:?}",
        report.kappa_star,
        report.argmin_kappa_star.indices()
    );
    let _ = writeln!(text, "sets examined: {}", report.sets_examined);
    if report.mode == ConductanceMode::Sampled {
        let _ = writeln!(text, "note: sampled values are upper bounds only");
    }

    Ok(CommandOutput {
        json: Value::Map(map),
        text,
        verdict_ok: true,
    })
}

/// `cheeger`: all four Cheeger-bound margins.
pub fn cheeger(spec: &ChainSpec) -> Result<CommandOutput, SpecError> {
    let v = conductance::cheeger_check(&spec.pair)?;

    let mut map = Value::map();
    entry(&mut map, "command", Value::Str("cheeger".into()));
    entry(&mut map, "rho_right", Value::Num(v.rho_right));
    entry(&mut map, "kappa", Value::Num(v.kappa));
    entry(&mut map, "kappa_star", Value::Num(v.kappa_star));
    entry(&mut map, "upper_margin", Value::Num(v.upper_margin));
    entry(&mut map, "sandwich_margin", Value::Num(v.sandwich_margin));
    entry(
        &mut map,
        "lower_margin_star",
        Value::Num(v.lower_margin_star),
    );
    entry(&mut map, "lower_margin", Value::Num(v.lower_margin));
    entry(&mut map, "pass", Value::Bool(v.pass));

    let mut text = String::new();
    let _ = writeln!(
        text,
        "rho_right = {}, kappa = {}, kappa_star = {}",
        v.rho_right, v.kappa, v.kappa_star
    );
    let _ = writeln!(text, "kappa_star - rho_right      = {}", v.upper_margin);
    let _ = writeln!(text, "2 kappa - kappa_star        = {}", v.sandwich_margin);
    let _ = writeln!(
        text,
        "rho_right - kappa_star^2/2  = {}",
        v.lower_margin_star
    );
    let _ = writeln!(text, "rho_right - kappa^2/2       = {}", v.lower_margin);
    let _ = writeln!(
        text,
        "cheeger bounds: {}",
        if v.pass { "pass" } else { "FAIL" }
    );

    Ok(CommandOutput {
        json: Value::Map(map),
        text,
        verdict_ok: v.pass,
    })
}

/// `compare`: flow certificate plus gap and variance orderings.
pub fn compare(
    spec1: &ChainSpec,
    spec2: &ChainSpec,
    function: &str,
) -> Result<CommandOutput, SpecError> {
    let h = spec1.function(function)?;
    let cert = dirichlet::flow_gamma(&spec1.pair, &spec2.pair)?;
    let gap = dirichlet::check_gap_ordering(&spec1.pair, &spec2.pair, &cert)?;
    let var = variance::check_variance_ordering(&spec1.pair, &spec2.pair, h, &cert)?;
    let verdict_ok = gap.pass && var.pass && var.peskun_pass.unwrap_or(true);

    let mut map = Value::map();
    entry(&mut map, "command", Value::Str("compare".into()));
    entry(&mut map, "function", Value::Str(function.into()));
    entry(&mut map, "gamma", Value::num_or_null(cert.gamma));
    entry(
        &mut map,
        "gamma_unbounded",
        Value::Bool(cert.is_unbounded()),
    );
    entry(
        &mut map,
        "witness",
        match cert.witness {
            Some((x, y)) => Value::from_states(&[x, y]),
            None => Value::Null,
        },
    );
    let mut gap_map = Value::map();
    entry(&mut gap_map, "rho_right_1", Value::Num(gap.rho_right_1));
    entry(
        &mut gap_map,
        "gamma_rho_right_2",
        Value::Num(gap.gamma_rho_right_2),
    );
    entry(&mut gap_map, "pass", Value::Bool(gap.pass));
    entry(&mut map, "gap_ordering", Value::Map(gap_map));

    let mut var_map = Value::map();
    entry(&mut var_map, "lhs", Value::num_or_null(var.lhs));
    entry(&mut var_map, "rhs", Value::num_or_null(var.rhs));
    entry(&mut var_map, "vacuous", Value::Bool(var.vacuous));
    entry(
        &mut var_map,
        "peskun_pass",
        match var.peskun_pass {
            Some(p) => Value::Bool(p),
            None => Value::Null,
        },
    );
    entry(&mut var_map, "pass", Value::Bool(var.pass));
    entry(&mut map, "variance_ordering", Value::Map(var_map));

    let mut text = String::new();
    if cert.is_unbounded() {
        let _ = writeln!(
            text,
            "gamma = unbounded (second kernel has no off-diagonal flow)"
        );
    } else {
        let _ = writeln!(
            text,
            "gamma = {}{}",
            cert.gamma,
            match cert.witness {
                Some((x, y)) => format!(" (witness flow {x} -> {y})"),
                None => String::new(),
            }
        );
    }
    let _ = writeln!(
        text,
        "gap ordering: rho_right_1 = {} >= gamma * rho_right_2 = {}: {}",
        gap.rho_right_1,
        gap.gamma_rho_right_2,
        if gap.pass { "pass" } else { "FAIL" }
    );
    if var.vacuous {
        let _ = writeln!(text, "variance ordering: vacuous (right side infinite)");
    } else {
        let _ = writeln!(
            text,
            "variance ordering: {} <= {}: {}",
            var.lhs,
            var.rhs,
            if var.pass { "pass" } else { "FAIL" }
        );
    }
    if let Some(p) = var.peskun_pass {
        let _ = writeln!(
            text,
            "peskun (gamma >= 1): Var1 <= Var2: {}",
            if p { "pass" } else { "FAIL" }
        );
    }

    Ok(CommandOutput {
        json: Value::Map(map),
        text,
        verdict_ok,
    })
}

/// `simulate`: trajectory, ergodic average, batch-means estimate.
pub fn simulate_cmd(
    spec: &ChainSpec,
    steps: usize,
    seed: u64,
    function: &str,
) -> Result<CommandOutput, SpecError> {
    let h = spec.function(function)?;
    let traj =
        simulate::sample_trajectory(&spec.pair, steps, RngSeed(seed), InitialLaw::Stationary)?;
    let average = simulate::ergodic_average(&traj, h)?;
    let batch = simulate::empirical_asymptotic_variance(&traj, h)?;
    // The exact value is a reference only; a non-variance-bounding chain
    // still simulates fine.
    let exact = variance::asymptotic_variance(&spec.pair, h)
        .ok()
        .map(|r| r.value);

    let mut map = Value::map();
    entry(&mut map, "command", Value::Str("simulate".into()));
    entry(&mut map, "function", Value::Str(function.into()));
    entry(&mut map, "steps", Value::UInt(steps as u64));
    entry(&mut map, "seed", Value::UInt(seed));
    entry(&mut map, "ergodic_average", Value::Num(average));
    entry(&mut map, "estimate", Value::Num(batch.estimate));
    entry(&mut map, "standard_error", Value::Num(batch.standard_error));
    entry(
        &mut map,
        "batch_count",
        Value::UInt(batch.batch_count as u64),
    );
    entry(
        &mut map,
        "batch_length",
        Value::UInt(batch.batch_length as u64),
    );
    entry(
        &mut map,
        "exact",
        match exact {
            Some(v) => Value::Num(v),
            None => Value::Null,
        },
    );

    let mut text = String::new();
    let _ = writeln!(
        text,
        "steps = {steps}, seed = {seed}, function = {function}"
    );
    let _ = writeln!(text, "ergodic average = {average}");
    let _ = writeln!(
        text,
        "batch means estimate = {} (se {}, {} batches of {})",
        batch.estimate, batch.standard_error, batch.batch_count, batch.batch_length
    );
    match exact {
        Some(v) => {
            let _ = writeln!(text, "exact asymptotic variance = {v}");
        }
        None => {
            let _ = writeln!(
                text,
                "exact asymptotic variance unavailable (not variance bounding)"
            );
        }
    }

    Ok(CommandOutput {
        json: Value::Map(map),
        text,
        verdict_ok: true,
    })
}

fn join_nums(xs: &[f64]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}
