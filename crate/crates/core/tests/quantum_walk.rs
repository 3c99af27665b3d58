mod common;

use common::{binary, connected_sequence, max_abs};
use num_complex::Complex64;
use proptest::prelude::*;
use threshold_walk::oracle::{expm, laplacian, numeric_time_average};
use threshold_walk::quantum::{
    binary_propagator_matrix, closed_form_covers, localization_rates, propagator_entry_binary,
    propagator_entry_general, propagator_matrix, time_averaged_closed_form,
};
use threshold_walk::sweep::median;
use threshold_walk::{evolve, time_averaged, HiddenVariableConfig, Method, ThresholdGraph};

const TIMES: [f64; 5] = [0.0, 0.37, 1.0, std::f64::consts::PI, 10.0];

proptest! {
    #![proptest_config(common::cases(32))]

    #[test]
    fn both_paths_match_matrix_exponential(g in connected_sequence(40), t in 0.0f64..12.0) {
        let oracle = expm(&laplacian(&g).unwrap(), Complex64::new(0.0, t)).unwrap();
        for method in [Method::ClosedForm, Method::Spectral] {
            let u = propagator_matrix(&g, t, method).unwrap();
            prop_assert!(u.max_abs_diff(&oracle) <= 1e-9, "{:?}: {:e}", method, u.max_abs_diff(&oracle));
        }
    }

    #[test]
    fn unitary_and_symmetric(g in connected_sequence(48), t in -10.0f64..10.0) {
        let u = propagator_matrix(&g, t, Method::ClosedForm).unwrap();
        prop_assert!(u.unitarity_defect() <= 1e-10);
        prop_assert!(u.max_abs_diff(&u.transpose()) <= 1e-12);
        for s in 0..g.n() {
            let psi = evolve(&g, s, t, Method::ClosedForm).unwrap();
            prop_assert!((psi.norm_sqr() - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn general_formula_reduces_to_binary(g in binary(40)) {
        for &t in &TIMES {
            for v in 0..g.n() {
                for w in 0..g.n() {
                    if !closed_form_covers(&g, v, w) {
                        continue;
                    }
                    let a = propagator_entry_general(&g, v, w, t).unwrap();
                    let b = propagator_entry_binary(&g, v, w, t).unwrap();
                    prop_assert!((a - b).norm() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn closed_form_time_averages(g in binary(64)) {
        let top = g.top_clique_vertex().unwrap();
        let mut starts = vec![top];
        if let Some(v0) = g.bottom_independent_vertex() {
            starts.push(v0);
        }
        for s in starts {
            let exact = time_averaged(&g, s).unwrap();
            let closed = time_averaged_closed_form(&g, s).unwrap();
            prop_assert!(max_abs(&exact.masses, &closed.masses) <= 1e-12);
            prop_assert!((exact.total() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn top_clique_average_on_general_graphs(g in connected_sequence(64)) {
        let top = g.top_clique_vertex().unwrap();
        let exact = time_averaged(&g, top).unwrap();
        let closed = time_averaged_closed_form(&g, top).unwrap();
        prop_assert!(max_abs(&exact.masses, &closed.masses) <= 1e-12);
    }
}

#[test]
fn seeded_binary_and_general_against_oracle() {
    let mut worst: f64 = 0.0;
    for seed in 0..20u64 {
        let n = 4 + (seed as usize * 13) % 40;
        let g = ThresholdGraph::generate(&HiddenVariableConfig::binary(n, 0.4, seed)).unwrap();
        if !g.is_connected() {
            continue;
        }
        let g2 = common::uniform_connected(n, 0.7, seed);
        for graph in [&g, &g2] {
            let lap = laplacian(graph).unwrap();
            for &t in &TIMES {
                let oracle = expm(&lap, Complex64::new(0.0, t)).unwrap();
                let u = propagator_matrix(graph, t, Method::ClosedForm).unwrap();
                worst = worst.max(u.max_abs_diff(&oracle));
            }
        }
        for &t in &TIMES {
            let b = binary_propagator_matrix(&g, t).unwrap();
            let u = propagator_matrix(&g, t, Method::Spectral).unwrap();
            worst = worst.max(u.max_abs_diff(&b));
        }
    }
    assert!(worst <= 1e-9, "{worst:e}");
}

#[test]
fn numeric_average_converges_to_projector_sum() {
    for (k, l) in [(3, 2), (2, 5), (4, 4)] {
        let g = ThresholdGraph::from_runs(vec![0, k], vec![l, 0]).unwrap();
        for start in [0, k] {
            let numeric = numeric_time_average(&g, start, 2000.0, 200_000).unwrap();
            let exact = time_averaged(&g, start).unwrap();
            assert!(max_abs(&numeric, &exact.masses) <= 5e-3);
        }
    }
    let g = ThresholdGraph::from_runs(vec![2, 1, 2], vec![1, 2, 0]).unwrap();
    let numeric = numeric_time_average(&g, 0, 2000.0, 200_000).unwrap();
    let exact = time_averaged(&g, 0).unwrap();
    assert!(max_abs(&numeric, &exact.masses) <= 5e-3);
}

#[test]
fn localization_trend() {
    let seeds: Vec<u64> = (0..11).collect();
    let rows = localization_rates(0.5, &[64, 256, 1024], &seeds).unwrap();
    for n in [64usize, 256, 1024] {
        let nf = n as f64;
        let mut v1: Vec<f64> = rows
            .iter()
            .filter(|r| r.n == n)
            .map(|r| r.clique_rate / nf)
            .collect();
        let mut v0: Vec<f64> = rows
            .iter()
            .filter(|r| r.n == n)
            .filter_map(|r| r.independent_rate.map(|x| x / nf))
            .collect();
        assert!(median(&mut v1).unwrap() <= 5.0 / nf);
        assert!(median(&mut v0).unwrap() <= 5.0 / nf);
        for r in rows.iter().filter(|r| r.n == n) {
            assert!((r.clique_rate - (2.0 - 2.0 / nf)).abs() <= 1e-12);
        }
    }
}

#[test]
fn cross_block_probability() {
    let g = ThresholdGraph::from_runs(vec![0, 3], vec![4, 0]).unwrap();
    let n = 7.0;
    for t in [0.3, 1.1, 2.9] {
        let p = propagator_entry_binary(&g, 5, 0, t).unwrap().norm_sqr();
        assert!((p - (2.0 - 2.0 * (n * t).cos()) / (n * n)).abs() <= 1e-12);
    }
}
