use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use threshold_walk::graph::{block_degrees, creation_sequence, BlockStructure};
use threshold_walk::oracle::{bfs_connected, raw_adjacency, raw_edge_list};
use threshold_walk::{HiddenDistribution, HiddenVariableConfig, Part, ThresholdGraph};

fn uniform(n: usize, theta: f64, seed: u64) -> HiddenVariableConfig {
    HiddenVariableConfig {
        n,
        distribution: HiddenDistribution::Uniform {
            low: 0.0,
            high: 1.0,
        },
        theta,
        seed,
    }
}

/// Hand-drawn edge set of the eight-vertex graph with k = l = (2, 1, 1).
/// Positions follow the canonical order (V3^0, V3^1, V2^0, V2^1, V1^0 x2, V1^1 x2).
const EXAMPLE_EDGES: [(usize, usize); 11] = [
    (1, 2),
    (1, 3),
    (1, 4),
    (1, 5),
    (1, 6),
    (1, 7),
    (3, 4),
    (3, 5),
    (3, 6),
    (3, 7),
    (6, 7),
];

#[test]
fn example_sequence_matches_drawn_graph() {
    let g = ThresholdGraph::from_creation_sequence(&[1, 1, 0, 0, 1, 0, 1, 0]).unwrap();
    assert_eq!(g.edge_list(), EXAMPLE_EDGES.to_vec());
    assert!(!g.is_connected());
    assert_eq!(g.degree(0), 0);
    assert!(!bfs_connected(&raw_adjacency(g.hidden_values(), g.theta())));
}

#[test]
fn example_degrees_from_brute_force() {
    let g = ThresholdGraph::from_creation_sequence(&[1, 1, 0, 0, 1, 0, 1, 0]).unwrap();
    let adj = raw_adjacency(g.hidden_values(), g.theta());
    let brute = |part: Part, level: usize| -> Vec<usize> {
        (0..g.n())
            .filter(|&p| g.level_of(p) == (level, part))
            .map(|p| adj[g.vertex_at(p)].iter().filter(|&&a| a).count())
            .collect()
    };
    let (dk, dl) = block_degrees(&g.blocks().k, &g.blocks().l);
    assert_eq!(dk, vec![3, 5, 6]);
    assert_eq!(dl, vec![2, 1, 0]);
    for level in 0..3 {
        assert!(brute(Part::Clique, level).iter().all(|&d| d == dk[level]));
        assert!(brute(Part::Independent, level)
            .iter()
            .all(|&d| d == dl[level]));
    }
}

#[test]
fn binary_degrees_from_brute_force() {
    let x = vec![1.0, 1.0, 1.0, 0.0, 0.0];
    let adj = raw_adjacency(&x, 0.5);
    let deg: Vec<usize> = adj
        .iter()
        .map(|r| r.iter().filter(|&&a| a).count())
        .collect();
    assert_eq!(deg, vec![4, 4, 4, 3, 3]);
    let (dk, dl) = block_degrees(&[0, 3], &[2, 0]);
    assert_eq!(dk[1], 4);
    assert_eq!(dl[0], 3);
    let (dk, _) = block_degrees(&[6], &[0]);
    assert_eq!(dk, vec![5]);
}

#[test]
fn connectivity_shortcut_agrees_with_bfs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for seed in 0..400 {
        let n = rng.gen_range(2..=20);
        let theta = rng.gen_range(0.5..1.5);
        let g = ThresholdGraph::generate(&uniform(n, theta, seed)).unwrap();
        let bfs = bfs_connected(&raw_adjacency(g.hidden_values(), g.theta()));
        assert_eq!(g.is_connected(), bfs, "seed {seed}, n {n}");
    }
}

#[test]
fn binary_graphs_are_connected_split_graphs() {
    for seed in 0..200 {
        let g = ThresholdGraph::generate(&HiddenVariableConfig::binary(30, 0.3, seed)).unwrap();
        let ones = g.hidden_values().iter().filter(|&&x| x == 1.0).count();
        let (k, l) = g.binary_split().expect("binary model yields a split graph");
        assert_eq!(k + l, 30);
        if ones >= 1 {
            assert!(g.is_connected());
        }
        if l >= 2 {
            assert_eq!(k, ones);
            assert_eq!(g.blocks().levels(), 2);
            assert_eq!((g.blocks().k[0], g.blocks().l[1]), (0, 0));
        }
    }
}

#[test]
fn clique_fraction_concentrates_at_p() {
    // 10^4 seeds at n = 10^3: mean of k_G / n within three standard errors of p.
    let (n, p, seeds) = (1000usize, 0.3, 10_000u64);
    let fractions: Vec<f64> = (0..seeds)
        .map(|seed| {
            let x = HiddenVariableConfig::binary(n, p, seed).sample().unwrap();
            x.iter().filter(|&&v| v == 1.0).count() as f64 / n as f64
        })
        .collect();
    let mean = fractions.iter().sum::<f64>() / seeds as f64;
    let se = (p * (1.0 - p) / n as f64).sqrt() / (seeds as f64).sqrt();
    assert!((mean - p).abs() < 3.0 * se, "mean {mean}, se {se}");
    // the graph's clique size is the number of ones (spot check)
    for seed in 0..20 {
        let cfg = HiddenVariableConfig::binary(n, p, seed);
        let g = ThresholdGraph::generate(&cfg).unwrap();
        let ones = cfg.sample().unwrap().iter().filter(|&&v| v == 1.0).count();
        assert_eq!(g.binary_split().unwrap().0, ones);
    }
}

#[test]
fn tie_at_threshold_is_not_an_edge() {
    let g = ThresholdGraph::generate(&HiddenVariableConfig::explicit(vec![0.25, 0.25, 0.75], 1.0))
        .unwrap();
    // 0.25 + 0.75 == 1.0 exactly: no edges at all
    assert_eq!(g.edge_count(), 0);
    assert_eq!(
        creation_sequence(&[0.25, 0.25, 0.75], 1.0).unwrap(),
        vec![0, 0, 0]
    );
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(64) })]

    #[test]
    fn blocks_adjacency_sequence_round_trip(seed in any::<u64>(), n in 2usize..200, theta in 0.2f64..1.8) {
        let g = ThresholdGraph::generate(&uniform(n, theta, seed)).unwrap();
        // rebuild from the edge set alone: peel dominating / isolated vertices
        let edges = g.edge_list();
        let mut adj = vec![vec![false; n]; n];
        for &(u, w) in &edges {
            adj[u][w] = true;
            adj[w][u] = true;
        }
        let mut alive: Vec<usize> = (0..n).collect();
        let mut bits = vec![0u8; n];
        for j in (1..n).rev() {
            let deg = |v: usize, alive: &[usize]| alive.iter().filter(|&&w| adj[v][w]).count();
            let dom = alive.iter().position(|&v| deg(v, &alive) == alive.len() - 1);
            let iso = alive.iter().position(|&v| deg(v, &alive) == 0);
            match (dom, iso) {
                (Some(i), _) => { bits[j] = 1; alive.remove(i); }
                (None, Some(i)) => { bits[j] = 0; alive.remove(i); }
                (None, None) => panic!("not a threshold graph"),
            }
        }
        bits[0] = bits[1];
        prop_assert_eq!(&BlockStructure::from_creation_sequence(&bits).unwrap(), g.blocks());
        prop_assert_eq!(g.blocks().to_creation_sequence(), creation_sequence(g.hidden_values(), theta).unwrap());
    }

    #[test]
    fn degree_formula_matches_row_sums(seed in any::<u64>(), n in 2usize..120, theta in 0.2f64..1.8) {
        let g = ThresholdGraph::generate(&uniform(n, theta, seed)).unwrap();
        let adj = raw_adjacency(g.hidden_values(), theta);
        for (v, neighbours) in adj.iter().enumerate() {
            let row = neighbours.iter().filter(|&&a| a).count();
            prop_assert_eq!(row, g.degree(g.position_of(v)));
        }
        g.blocks().check_relations().unwrap();
    }

    #[test]
    fn edge_list_matches_raw_rule(seed in any::<u64>(), n in 2usize..=12, theta in 0.2f64..1.8) {
        let g = ThresholdGraph::generate(&uniform(n, theta, seed)).unwrap();
        let mut raw: Vec<(usize, usize)> = raw_edge_list(g.hidden_values(), theta)
            .into_iter()
            .map(|(u, w)| {
                let (a, b) = (g.position_of(u), g.position_of(w));
                (a.min(b), a.max(b))
            })
            .collect();
        raw.sort();
        prop_assert_eq!(raw, g.edge_list());
    }

    #[test]
    fn canonical_order_layout(seed in any::<u64>(), n in 2usize..150, theta in 0.2f64..1.8) {
        let g = ThresholdGraph::generate(&uniform(n, theta, seed)).unwrap();
        let keys: Vec<(usize, u8)> = (0..n)
            .map(|p| {
                let (level, part) = g.level_of(p);
                // descending level, independent before clique
                (usize::MAX - level, part.bit())
            })
            .collect();
        prop_assert!(keys.windows(2).all(|w| w[0] <= w[1]));
        for (level, (&k, &l)) in g.blocks().k.iter().zip(&g.blocks().l).enumerate() {
            let count = |part| (0..n).filter(|&p| g.level_of(p) == (level, part)).count();
            prop_assert_eq!(count(Part::Clique), k);
            prop_assert_eq!(count(Part::Independent), l);
        }
        let mut seen = vec![false; n];
        for v in 0..n {
            let p = g.position_of(v);
            prop_assert!(!seen[p]);
            seen[p] = true;
            prop_assert_eq!(g.vertex_at(p), v);
        }
    }

    #[test]
    fn block_adjacency_rule(bits in prop::collection::vec(0u8..=1, 2..40)) {
        let mut bits = bits;
        bits[0] = bits[1];
        let g = ThresholdGraph::from_creation_sequence(&bits).unwrap();
        for p in 0..g.n() {
            for q in 0..g.n() {
                if p == q { continue; }
                let (ip, pp) = g.level_of(p);
                let (iq, pq) = g.level_of(q);
                let want = match (pp, pq) {
                    (Part::Clique, Part::Clique) => true,
                    (Part::Clique, Part::Independent) => iq < ip,
                    (Part::Independent, Part::Clique) => ip < iq,
                    (Part::Independent, Part::Independent) => false,
                };
                prop_assert_eq!(g.adjacent(p, q), want);
            }
        }
    }
}
