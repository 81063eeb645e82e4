//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the quantities it pinned. Tolerances are hard-coded here on purpose; they
//! are the contract.
//!
//! Criteria:
//! 1. flip fixture exact values (gaps, variance, conductance, margins), < 1 s
//! 2. lazy2 fixture exact values, the spectral bound attained exactly
//! 3. ordering equality case lazy2 vs its half-lazy mixture (gamma = 2)
//! 4. identity property sweep over 500 random reversible pairs, < 30 s
//! 5. variational property sweep over the same 500 pairs
//! 6. Cheeger property sweep over 200 random pairs with exhaustive subsets
//! 7. standardized moment inequality on 1000 random discrete laws
//! 8. batch-means vs exact variance on lazy2 and mh3, 10^6 steps x 3 seeds
//! 9. CLI golden files reproduced byte for byte

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use revmix_core::conductance::{self, StateSet};
use revmix_core::dirichlet;
use revmix_core::hilbert::{self, Observable, ProbabilityVector};
use revmix_core::kernel::{self, lazy_mixture};
use revmix_core::simulate::{self, RngSeed};
use revmix_core::spectral;
use revmix_core::testkit::{self, fixtures};
use revmix_core::variance;

const EXACT: f64 = 1e-10;

fn suite_pairs(count: u64, min_n: usize, max_n: usize) -> Vec<kernel::ReversiblePair> {
    (0..count)
        .map(|seed| {
            let n = min_n + (seed as usize % (max_n - min_n + 1));
            testkit::random_reversible_pair(seed, n)
        })
        .collect()
}

#[test]
fn criterion_1_flip_exact_values() {
    let start = Instant::now();
    let flip = fixtures::flip();

    let gaps = spectral::decompose(&flip).unwrap().gaps();
    assert!(
        (gaps.rho_right - 2.0).abs() <= EXACT,
        "rho_right {}",
        gaps.rho_right
    );
    assert!(gaps.rho_left.abs() <= EXACT, "rho_left {}", gaps.rho_left);

    let h = Observable::new(vec![1.0, -1.0]);
    let var = variance::asymptotic_variance(&flip, &h).unwrap();
    assert!(var.value.abs() <= EXACT, "variance {}", var.value);

    let cheeger = conductance::cheeger_check(&flip).unwrap();
    assert!((cheeger.kappa - 1.0).abs() <= EXACT);
    assert!((cheeger.kappa_star - 2.0).abs() <= EXACT);
    // The three binding margins vanish; the kappa^2/2 bound is slack (1.5).
    assert!(cheeger.upper_margin.abs() <= EXACT);
    assert!(cheeger.sandwich_margin.abs() <= EXACT);
    assert!(cheeger.lower_margin_star.abs() <= EXACT);
    assert!((cheeger.lower_margin - 1.5).abs() <= EXACT);
    assert!(cheeger.pass);

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!(
        "acceptance criterion 1: PASS (flip: rho_right 2, rho_left 0, Var 0, kappa 1, kappa* 2, binding margins 0, {elapsed:?})"
    );
}

#[test]
fn criterion_2_lazy2_exact_values() {
    let lazy2 = fixtures::lazy2();

    let gaps = spectral::decompose(&lazy2).unwrap().gaps();
    assert!(
        (gaps.rho_right - 0.9).abs() <= EXACT,
        "rho_right {}",
        gaps.rho_right
    );

    let s = 2.0f64.sqrt();
    let h = Observable::new(vec![1.0 / s, -s]);
    let var = variance::asymptotic_variance(&lazy2, &h).unwrap();
    assert!(
        (var.value - 11.0 / 9.0).abs() <= EXACT,
        "variance {}",
        var.value
    );
    assert!(
        (var.value - var.upper_bound).abs() <= EXACT,
        "bound not attained: {} vs {}",
        var.value,
        var.upper_bound
    );

    let cheeger = conductance::cheeger_check(&lazy2).unwrap();
    assert!((cheeger.kappa - 0.6).abs() <= EXACT);
    assert!((cheeger.kappa_star - 0.9).abs() <= EXACT);
    assert!(
        (cheeger.lower_margin_star - 0.495).abs() <= EXACT,
        "quadratic margin {}",
        cheeger.lower_margin_star
    );
    assert!(cheeger.pass);

    println!(
        "acceptance criterion 2: PASS (lazy2: rho_right 0.9, Var 11/9 = bound, kappa 0.6, kappa* 0.9, margin 0.495)"
    );
}

#[test]
fn criterion_3_ordering_equality_case() {
    let lazy2 = fixtures::lazy2();
    let half = lazy_mixture(&lazy2, 0.5).unwrap();
    let s = 2.0f64.sqrt();
    let h = Observable::new(vec![1.0 / s, -s]);

    let cert = dirichlet::flow_gamma(&lazy2, &half).unwrap();
    assert!((cert.gamma - 2.0).abs() <= EXACT, "gamma {}", cert.gamma);

    let gap = dirichlet::check_gap_ordering(&lazy2, &half, &cert).unwrap();
    assert!(gap.pass);
    assert!(
        (gap.rho_right_1 - gap.gamma_rho_right_2).abs() <= EXACT,
        "gap ordering not tight: {} vs {}",
        gap.rho_right_1,
        gap.gamma_rho_right_2
    );

    // Independent spectral oracle for the mixture: its single mean-zero
    // eigenvalue is trace - 1 = 0.55, so Var = <h,h> (1+0.55)/(1-0.55) = 31/9.
    let lambda = half.kernel().entry(0, 0) + half.kernel().entry(1, 1) - 1.0;
    let h_sq = hilbert::variance(half.pi(), &h).unwrap();
    let var2_oracle = h_sq * (1.0 + lambda) / (1.0 - lambda);
    assert!(
        (var2_oracle - 31.0 / 9.0).abs() <= EXACT,
        "oracle {var2_oracle}"
    );
    let var2 = variance::asymptotic_variance(&half, &h).unwrap().value;
    assert!(
        (var2 - var2_oracle).abs() <= EXACT,
        "{var2} vs oracle {var2_oracle}"
    );

    let ordering = variance::check_variance_ordering(&lazy2, &half, &h, &cert).unwrap();
    assert!(ordering.pass && !ordering.vacuous);
    assert!(
        (ordering.lhs - ordering.rhs).abs() <= EXACT,
        "variance ordering not tight: {} vs {}",
        ordering.lhs,
        ordering.rhs
    );

    println!(
        "acceptance criterion 3: PASS (gamma 2, gap ordering tight at 0.9, variance ordering tight at 20/9, Var2 = 31/9)"
    );
}

#[test]
fn criterion_4_identity_property_suite() {
    let start = Instant::now();
    let pairs = suite_pairs(500, 3, 10);

    for (seed, pair) in pairs.iter().enumerate() {
        let seed = seed as u64;
        let n = pair.n();
        let f = testkit::random_observable(seed ^ 0xA, n);
        let g = testkit::random_observable(seed ^ 0xB, n);

        // Dirichlet operator form vs squared-jump form.
        let jump = dirichlet::dirichlet_form(pair, &f).unwrap();
        let pf = kernel::apply(pair.kernel(), &f).unwrap();
        let operator = hilbert::inner(pair.pi(), &f, &f).unwrap()
            - hilbert::inner(pair.pi(), &f, &pf).unwrap();
        let scale = hilbert::inner(pair.pi(), &f, &f).unwrap().max(1.0);
        assert!(
            (operator - jump).abs() <= 1e-10 * scale,
            "seed {seed}: forms differ by {}",
            (operator - jump).abs()
        );

        // Self-adjointness.
        let defect = kernel::self_adjoint_defect(pair, &f, &g).unwrap();
        assert!(defect <= 1e-10, "seed {seed}: defect {defect:e}");

        // Contraction.
        let norm_f = hilbert::norm(pair.pi(), &f).unwrap();
        let norm_pf = hilbert::norm(pair.pi(), &pf).unwrap();
        assert!(norm_pf <= norm_f + 1e-12, "seed {seed}");

        // Spectral-measure reconstruction of <f, P^k f>, k <= 3.
        let dec = spectral::decompose(pair).unwrap();
        let measure = spectral::spectral_measure(&dec, &f).unwrap();
        let mut iterate = f.clone();
        for power in 0u32..=3 {
            let direct = hilbert::inner(pair.pi(), &f, &iterate).unwrap();
            assert!(
                (direct - measure.moment(power)).abs() <= 1e-8 * direct.abs().max(1.0),
                "seed {seed}, power {power}"
            );
            iterate = kernel::apply(pair.kernel(), &iterate).unwrap();
        }
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!(
        "acceptance criterion 4: PASS (500 pairs, n in 3..=10: form equality, self-adjointness, contraction, reconstruction; {elapsed:?})"
    );
}

#[test]
fn criterion_5_variational_property_suite() {
    let pairs = suite_pairs(500, 3, 10);

    for (seed, pair) in pairs.iter().enumerate() {
        let seed = seed as u64;

        // Quadratic representation of <f, (I-P)^{-1} f>.
        let f = testkit::random_unit_mean_zero(seed ^ 0xC, pair.pi());
        let inverse = variance::variational_inverse_form(pair, &f, 20, RngSeed(seed)).unwrap();
        assert!(
            inverse.sup_estimate <= inverse.exact + 1e-10,
            "seed {seed}: sup {} exceeds exact {}",
            inverse.sup_estimate,
            inverse.exact
        );
        assert!(
            inverse.optimizer_defect <= 1e-8,
            "seed {seed}: optimizer defect {:e}",
            inverse.optimizer_defect
        );

        // Unit mean-zero Dirichlet forms never undercut the right gap.
        let gap = dirichlet::variational_right_gap(pair, 20, RngSeed(seed ^ 0xD)).unwrap();
        assert!(
            gap.estimate >= gap.exact - 1e-8,
            "seed {seed}: estimate {} below gap {}",
            gap.estimate,
            gap.exact
        );
        // And the deflated eigenfunction attains it.
        assert!(
            (gap.estimate - gap.exact).abs() <= 1e-8,
            "seed {seed}: infimum not attained"
        );
    }

    println!(
        "acceptance criterion 5: PASS (500 pairs: one-sided variational objective, optimizer attains, Dirichlet >= gap)"
    );
}

#[test]
fn criterion_6_cheeger_property_suite() {
    let pairs = suite_pairs(200, 2, 10);

    for (seed, pair) in pairs.iter().enumerate() {
        let verdict = conductance::cheeger_check(pair).unwrap();
        assert!(verdict.upper_margin >= -1e-8, "seed {seed}: {verdict:?}");
        assert!(verdict.sandwich_margin >= -1e-8, "seed {seed}: {verdict:?}");
        assert!(
            verdict.lower_margin_star >= -1e-8,
            "seed {seed}: {verdict:?}"
        );
        assert!(verdict.lower_margin >= -1e-8, "seed {seed}: {verdict:?}");
        assert!(verdict.pass);
    }

    // Indicator identity on 100 random (pair, set) draws.
    for seed in 0..100u64 {
        let pair = &pairs[(seed as usize * 7) % pairs.len()];
        let n = pair.n();
        let full = (1u64 << n) - 1;
        let mask = 1 + (seed.wrapping_mul(0x9E3779B97F4A7C15) % (full - 1));
        let set = StateSet::new(mask, n).unwrap();
        let id = conductance::indicator_dirichlet_check(pair, &set).unwrap();
        assert!(
            (id.dirichlet - id.kappa_star).abs() <= 1e-10 * id.kappa_star.max(1.0),
            "seed {seed}: indicator identity off by {:e}",
            (id.dirichlet - id.kappa_star).abs()
        );
    }

    // Level-set inequalities across shifts.
    for (seed, pair) in pairs.iter().enumerate() {
        let f = testkit::random_unit_mean_zero(seed as u64 ^ 0xE, pair.pi());
        for &c in &[0.0, 1.0, -1.0, 10.0, -10.0] {
            let d = conductance::lawler_sokal_diagnostic(pair, &f, c).unwrap();
            assert!(d.pass, "seed {seed}, c {c}: {d:?}");
        }
    }

    println!(
        "acceptance criterion 6: PASS (200 pairs, exhaustive subsets: Cheeger sandwich + quadratic bounds, indicator identity x100, level-set bounds for c in {{0,+-1,+-10}})"
    );
}

#[test]
fn criterion_7_moment_inequality_suite() {
    let mut worst = f64::INFINITY;
    for seed in 0..1000u64 {
        let n = 2 + (seed as usize % 9);
        // Random positive masses, normalized; random atom values.
        let pair_seed = seed.wrapping_mul(0x2545F4914F6CDD1D).wrapping_add(1);
        let raw: Vec<f64> = (0..n)
            .map(|i| {
                let x = pair_seed
                    .wrapping_add(i as u64)
                    .wrapping_mul(0x9E3779B97F4A7C15);
                0.05 + (x >> 11) as f64 / (1u64 << 53) as f64
            })
            .collect();
        let total: f64 = raw.iter().sum();
        let pi = ProbabilityVector::new(raw.into_iter().map(|w| w / total).collect()).unwrap();
        let f = testkit::random_observable(seed ^ 0xF00, n);
        if hilbert::variance(&pi, &f).unwrap() <= 1e-12 {
            continue;
        }
        let lhs = conductance::moment_inequality_check(&pi, &f).unwrap();
        assert!(lhs >= 2.0 - 1e-10, "seed {seed}: lhs {lhs}");
        worst = worst.min(lhs);
    }
    println!(
        "acceptance criterion 7: PASS (1000 standardized discrete laws, 2..=10 atoms, min lhs = {worst:.6} >= 2)"
    );
}

#[test]
fn criterion_8_simulation_cross_check() {
    let s = 2.0f64.sqrt();
    let cases: [(&str, kernel::ReversiblePair, Observable); 2] = [
        (
            "lazy2",
            fixtures::lazy2(),
            Observable::new(vec![1.0 / s, -s]),
        ),
        (
            "mh3",
            fixtures::mh3(),
            Observable::new(vec![1.0, 0.0, -1.0]),
        ),
    ];

    for (name, pair, h) in &cases {
        let start = Instant::now();
        for seed in [1u64, 2, 3] {
            let check =
                simulate::empirical_vs_exact(pair, h, 1_000_000, RngSeed(seed), 0.1).unwrap();
            assert!(
                check.pass,
                "{name}, seed {seed}: estimate {} vs exact {} (threshold {})",
                check.empirical.estimate, check.exact, check.threshold
            );
        }
        let elapsed = start.elapsed();
        assert!(elapsed.as_secs_f64() < 60.0, "{name} took {elapsed:?}");
        println!(
            "acceptance criterion 8 ({name}): PASS (10^6 steps, seeds 1-3 within 10% + 3 se; {elapsed:?})"
        );
    }
}

#[test]
fn criterion_9_cli_golden_files() {
    let fixture_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let golden_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let fx = |name: &str| -> PathBuf { fixture_dir.join(name) };

    let mut checked = 0usize;
    let mut run = |args: Vec<String>, golden_name: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_revmix"))
            .args(&args)
            .output()
            .expect("binary runs");
        assert!(out.status.success(), "{args:?} failed");
        let expect = std::fs::read(golden_dir.join(golden_name)).expect("golden exists");
        assert_eq!(
            out.stdout, expect,
            "{args:?} no longer matches {golden_name}"
        );
        checked += 1;
    };

    for name in ["flip", "lazy2", "mh3"] {
        let file = fx(&format!("{name}.chain")).display().to_string();
        run(
            vec![
                "analyze".into(),
                file.clone(),
                "--format".into(),
                "json".into(),
            ],
            &format!("analyze_{name}.json"),
        );
        run(
            vec![
                "variance".into(),
                file.clone(),
                "--function".into(),
                "h".into(),
                "--format".into(),
                "json".into(),
            ],
            &format!("variance_{name}.json"),
        );
        run(
            vec![
                "conductance".into(),
                file.clone(),
                "--format".into(),
                "json".into(),
            ],
            &format!("conductance_{name}.json"),
        );
        run(
            vec!["cheeger".into(), file, "--format".into(), "json".into()],
            &format!("cheeger_{name}.json"),
        );
    }
    run(
        vec![
            "compare".into(),
            fx("lazy2.chain").display().to_string(),
            fx("lazy2_half.chain").display().to_string(),
            "--function".into(),
            "h".into(),
            "--format".into(),
            "json".into(),
        ],
        "compare_lazy2_half.json",
    );

    println!("acceptance criterion 9: PASS ({checked} golden reports byte-identical)");
}
