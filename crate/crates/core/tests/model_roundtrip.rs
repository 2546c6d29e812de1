//! Generator / prediction / fit / inference consistency on exact lattices.

use std::collections::BTreeMap;

use orgnet::graph::DegreeMode;
use orgnet::hiermodel::{
    fit_power_law, generate_broadcast_network, infer_structure, predicted_count,
    predicted_exponent, HierarchyParams, NoiseParams,
};

/// A sub-grid of the full acceptance lattice, kept quick.
fn grid() -> Vec<(u64, u64, u32)> {
    vec![(2, 1, 3), (2, 4, 2), (3, 2, 3), (4, 2, 2), (5, 8, 2)]
}

#[test]
fn generator_histogram_is_the_exact_lattice() {
    for (span, support, levels) in grid() {
        let employees = span.pow(levels) * 16;
        let params = HierarchyParams::new(employees, span, support, levels).unwrap();
        let graph = generate_broadcast_network(&params, &NoiseParams::default(), 1).unwrap();
        let dist = graph.out_degree_distribution(DegreeMode::DistinctRecipients);
        let mut expected = BTreeMap::new();
        for j in 0..=levels {
            expected.insert(employees / span.pow(j), (support * span).pow(j));
        }
        assert_eq!(dist.counts, expected, "l={span} a={support} x={levels}");
        for (&w, &n) in &dist.counts {
            assert_eq!(
                predicted_count(w as f64, &params).unwrap(),
                n as f64,
                "lattice point w={w}"
            );
        }
    }
}

#[test]
fn fit_recovers_exponent_and_support() {
    for (span, support, levels) in grid() {
        let employees = span.pow(levels) * 16;
        let params = HierarchyParams::new(employees, span, support, levels).unwrap();
        let graph = generate_broadcast_network(&params, &NoiseParams::default(), 1).unwrap();
        let dist = graph.out_degree_distribution(DegreeMode::DistinctRecipients);
        // Cutoff below the smallest broadcast size keeps all lattice
        // points and excludes nothing else (employees have degree 0).
        let fit = fit_power_law(&dist, 1).unwrap();
        let expected_beta = predicted_exponent(span as f64, support as f64).unwrap();
        assert!(
            (fit.beta - expected_beta).abs() < 1e-9,
            "l={span} a={support}: beta {} vs {expected_beta}",
            fit.beta
        );
        assert!(fit.residual < 1e-9);
        let report = infer_structure(&fit, span as f64, employees as f64);
        match report {
            Ok(report) => assert!(
                (report.a_hat - support as f64).abs() < 1e-9,
                "a_hat {} vs {support}",
                report.a_hat
            ),
            // a = 1 gives slope exactly 1: the model declares itself
            // inapplicable rather than inverting.
            Err(_) => assert_eq!(support, 1),
        }
    }
}

#[test]
fn termination_level_is_consistent() {
    let fit = orgnet::PowerLawFit {
        beta: 2.0,
        intercept: 16.0,
        w_cutoff: 40,
        residual: 0.0,
        points_used: 4,
    };
    let report = infer_structure(&fit, 4.0, 4096.0).unwrap();
    let lhs = (report.a_hat * report.assumed_l).powf(report.x_hat);
    let rhs = report.n_input / report.assumed_l.powf(report.x_hat);
    assert!(((lhs - rhs) / rhs).abs() < 1e-6);
}
