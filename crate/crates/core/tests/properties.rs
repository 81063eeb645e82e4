//! Property suites for the algebraic invariants: inner-product identities,
//! kernel contraction, Dirichlet form equivalences, conductance symmetries,
//! and the standardized moment inequality.

use proptest::prelude::*;

use revmix_core::conductance::{self, StateSet};
use revmix_core::dirichlet;
use revmix_core::hilbert::{self, Observable, ProbabilityVector};
use revmix_core::kernel::{self, ProposalKernel, ReversiblePair};
use revmix_core::spectral;
use revmix_core::testkit;

fn prob_vector(n: usize) -> impl Strategy<Value = ProbabilityVector> {
    prop::collection::vec(0.05f64..1.0, n).prop_map(|raw| {
        let sum: f64 = raw.iter().sum();
        ProbabilityVector::new(raw.into_iter().map(|w| w / sum).collect()).unwrap()
    })
}

fn observable(n: usize) -> impl Strategy<Value = Observable> {
    prop::collection::vec(-100.0f64..100.0, n).prop_map(Observable::new)
}

/// Proposal with structural zeros: entries below the mask threshold drop out,
/// rows that lose everything fall back to uniform.
fn proposal(n: usize) -> impl Strategy<Value = ProposalKernel> {
    prop::collection::vec(prop::collection::vec(0.0f64..1.0, n), n).prop_map(move |rows| {
        let rows: Vec<Vec<f64>> = rows
            .into_iter()
            .map(|row| {
                let masked: Vec<f64> = row.iter().map(|&v| if v < 0.3 { 0.0 } else { v }).collect();
                let sum: f64 = masked.iter().sum();
                if sum > 0.0 {
                    masked.into_iter().map(|v| v / sum).collect()
                } else {
                    vec![1.0 / n as f64; n]
                }
            })
            .collect();
        ProposalKernel::from_rows(&rows).unwrap()
    })
}

fn pair_and_n() -> impl Strategy<Value = ReversiblePair> {
    (any::<u64>(), 2usize..8).prop_map(|(seed, n)| testkit::random_reversible_pair(seed, n))
}

proptest! {
    #[test]
    fn cauchy_schwarz((pi, f, g) in (2usize..8).prop_flat_map(|n| {
        (prob_vector(n), observable(n), observable(n))
    })) {
        let fg = hilbert::inner(&pi, &f, &g).unwrap();
        let ff = hilbert::inner(&pi, &f, &f).unwrap();
        let gg = hilbert::inner(&pi, &g, &g).unwrap();
        prop_assert!(fg * fg <= ff * gg + 1e-12 * (1.0 + ff * gg));
    }

    #[test]
    fn center_is_idempotent((pi, f) in (2usize..8).prop_flat_map(|n| {
        (prob_vector(n), observable(n))
    })) {
        let once = hilbert::center(&pi, &f).unwrap();
        let twice = hilbert::center(&pi, &once).unwrap();
        // Residual error comes from re-computing a mean that nearly cancels,
        // so it scales with the original magnitude of f.
        let scale = 1.0 + f.max_abs();
        for (a, b) in once.values().iter().zip(twice.values()) {
            prop_assert!((a - b).abs() < 1e-14 * scale);
        }
        let against_ones = hilbert::inner(&pi, &once, &Observable::ones(pi.len())).unwrap();
        prop_assert!(against_ones.abs() < 1e-12 * (1.0 + f.max_abs()));
    }

    #[test]
    fn kernel_is_a_contraction((pair, seed) in (pair_and_n(), any::<u64>())) {
        let f = testkit::random_observable(seed, pair.n());
        let pf = kernel::apply(pair.kernel(), &f).unwrap();
        let before = hilbert::norm(pair.pi(), &f).unwrap();
        let after = hilbert::norm(pair.pi(), &pf).unwrap();
        prop_assert!(after <= before + 1e-12 * (1.0 + before));
    }

    #[test]
    fn metropolis_is_reversible_by_construction((pi, q) in (2usize..7).prop_flat_map(|n| {
        (prob_vector(n), proposal(n))
    })) {
        let built = kernel::build_metropolis_hastings(&pi, &q).unwrap();
        let violation = kernel::check_detailed_balance(built.kernel(), built.pi()).unwrap();
        prop_assert!(violation <= 1e-12, "violation {violation:e}");
    }

    #[test]
    fn stationary_solver_reproduces_pi(pair in pair_and_n()) {
        let solved = kernel::find_stationary(pair.kernel()).unwrap();
        prop_assert!(solved.max_abs_diff(pair.pi()).unwrap() < 1e-10);
    }

    #[test]
    fn lazy_mixture_scales_off_diagonal_flow((pair, beta) in (pair_and_n(), 0.05f64..1.0)) {
        let mixed = kernel::lazy_mixture(&pair, beta).unwrap();
        for x in 0..pair.n() {
            for y in 0..pair.n() {
                if x != y {
                    let expect = beta * pair.kernel().entry(x, y);
                    prop_assert!((mixed.kernel().entry(x, y) - expect).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn decomposition_invariants(pair in pair_and_n()) {
        let dec = spectral::decompose(&pair).unwrap();
        let n = pair.n();
        prop_assert!((dec.eigenvalues()[0] - 1.0).abs() <= 1e-10);
        for &l in dec.eigenvalues() {
            prop_assert!(l.abs() <= 1.0 + 1e-10);
        }
        for i in 0..n {
            for j in i..n {
                let ip = hilbert::inner(
                    pair.pi(),
                    &dec.eigenfunctions()[i],
                    &dec.eigenfunctions()[j],
                ).unwrap();
                let expect = if i == j { 1.0 } else { 0.0 };
                prop_assert!((ip - expect).abs() <= 1e-10, "orthonormality ({i},{j})");
            }
            let pe = kernel::apply(pair.kernel(), &dec.eigenfunctions()[i]).unwrap();
            for x in 0..n {
                let residual = pe.get(x) - dec.eigenvalues()[i] * dec.eigenfunctions()[i].get(x);
                prop_assert!(residual.abs() <= 1e-8, "eigenpair {i} residual at {x}");
            }
        }
        // Weighted-graph pairs are irreducible, so the right gap is positive.
        prop_assert!(dec.gaps().rho_right > 0.0);
    }

    #[test]
    fn spectral_measure_reconstructs_moments((pair, seed) in (pair_and_n(), any::<u64>())) {
        let f = testkit::random_observable(seed, pair.n());
        let dec = spectral::decompose(&pair).unwrap();
        let measure = spectral::spectral_measure(&dec, &f).unwrap();
        let mut iterate = f.clone();
        for power in 0u32..4 {
            let direct = hilbert::inner(pair.pi(), &f, &iterate).unwrap();
            prop_assert!(
                (direct - measure.moment(power)).abs() < 1e-8 * (1.0 + direct.abs()),
                "moment {power}: {direct} vs {}", measure.moment(power)
            );
            iterate = kernel::apply(pair.kernel(), &iterate).unwrap();
        }
    }

    #[test]
    fn dirichlet_form_routes_and_scaling((pair, seed, c) in (pair_and_n(), any::<u64>(), -5.0f64..5.0)) {
        let f = testkit::random_observable(seed, pair.n());
        let d = dirichlet::dirichlet_form(&pair, &f).unwrap();
        prop_assert!(d >= -1e-12);

        // Operator route recomputed here; the library returns the jump form.
        let pf = kernel::apply(pair.kernel(), &f).unwrap();
        let operator = hilbert::inner(pair.pi(), &f, &f).unwrap()
            - hilbert::inner(pair.pi(), &f, &pf).unwrap();
        let scale = hilbert::inner(pair.pi(), &f, &f).unwrap().max(1.0);
        prop_assert!((operator - d).abs() <= 1e-10 * scale);

        let scaled = dirichlet::dirichlet_form(&pair, &f.scale(c)).unwrap();
        prop_assert!((scaled - c * c * d).abs() <= 1e-10 * (1.0 + c * c) * scale);
    }

    #[test]
    fn dirichlet_form_dominates_gap((pair, seed) in (pair_and_n(), any::<u64>())) {
        let f = testkit::random_unit_mean_zero(seed, pair.pi());
        let d = dirichlet::dirichlet_form(&pair, &f).unwrap();
        let rho = spectral::decompose(&pair).unwrap().gaps().rho_right;
        prop_assert!(d >= rho - 1e-8);
    }

    #[test]
    fn flow_certificate_orders_dirichlet_forms((seed_a, seed_b, seed_f, n) in
        (any::<u64>(), any::<u64>(), any::<u64>(), 2usize..7))
    {
        let base = testkit::random_reversible_pair(seed_a, n);
        let other = testkit::random_pair_sharing_pi(seed_b, base.pi());
        let cert = dirichlet::flow_gamma(&base, &other).unwrap();
        prop_assert!(cert.gamma.is_finite());
        let f = testkit::random_observable(seed_f, n);
        let d1 = dirichlet::dirichlet_form(&base, &f).unwrap();
        let d2 = dirichlet::dirichlet_form(&other, &f).unwrap();
        prop_assert!(d1 >= cert.gamma * d2 - 1e-10 * (1.0 + d2));
    }

    #[test]
    fn conductance_symmetry_and_flow_balance((pair, mask) in
        pair_and_n().prop_flat_map(|pair| {
            let n = pair.n();
            (Just(pair), 1u64..((1u64 << n) - 1))
        }))
    {
        let set = StateSet::new(mask, pair.n()).unwrap();
        let sc = conductance::set_conductance(&pair, &set).unwrap();
        let cc = conductance::set_conductance(&pair, &set.complement()).unwrap();
        prop_assert!((sc.kappa_star - cc.kappa_star).abs() <= 1e-12);

        let pi_a = set.pi_mass(pair.pi()).unwrap();
        let pi_ac = 1.0 - pi_a;
        prop_assert!((pi_a * sc.kappa - pi_ac * cc.kappa).abs() <= 1e-12);
        prop_assert!(sc.kappa <= pi_ac / pi_a + 1e-12);
    }

    #[test]
    fn indicator_identity_holds((pair, mask) in
        pair_and_n().prop_flat_map(|pair| {
            let n = pair.n();
            (Just(pair), 1u64..((1u64 << n) - 1))
        }))
    {
        let set = StateSet::new(mask, pair.n()).unwrap();
        let id = conductance::indicator_dirichlet_check(&pair, &set).unwrap();
        prop_assert!((id.dirichlet - id.kappa_star).abs() <= 1e-10 * id.kappa_star.max(1.0));
    }

    #[test]
    fn moment_inequality_on_random_discrete_laws((pi, f) in (2usize..10).prop_flat_map(|n| {
        (prob_vector(n), observable(n))
    })) {
        if hilbert::variance(&pi, &f).unwrap() > 1e-9 {
            let lhs = conductance::moment_inequality_check(&pi, &f).unwrap();
            prop_assert!(lhs >= 2.0 - 1e-10);
        }
    }
}
