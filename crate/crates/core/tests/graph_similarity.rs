// SPDX-License-Identifier: Apache-2.0

mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use simll::graph::{drnl_label, CircuitGraph, TargetLink};
use simll::similarity::{link_clusters, link_fingerprints, node_clusters};

use common::*;

/// `p` refines `q` when every block of `p` sits inside one block of `q`.
fn refines(p: &[Vec<usize>], q: &[Vec<usize>]) -> bool {
    let mut owner = BTreeMap::new();
    for (i, block) in q.iter().enumerate() {
        for &x in block {
            owner.insert(x, i);
        }
    }
    p.iter()
        .all(|block| block.iter().all(|x| owner[x] == owner[&block[0]]))
}

fn relabel(p: &[Vec<usize>], map: &[usize]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = p
        .iter()
        .map(|b| {
            let mut b: Vec<usize> = b.iter().map(|&x| map[x]).collect();
            b.sort();
            b
        })
        .collect();
    out.sort();
    out
}

#[allow(clippy::needless_range_loop)]
fn closure(raw: &RawGraph) -> Vec<Vec<bool>> {
    let n = raw.len();
    let mut r = vec![vec![false; n]; n];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(a, b) in &raw.edges {
        r[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

#[test]
fn drnl_small_table() {
    assert_eq!(drnl_label(Some(0), Some(1)), 1);
    assert_eq!(drnl_label(Some(1), Some(1)), 2);
    assert_eq!(drnl_label(Some(1), Some(2)), 3);
    assert_eq!(drnl_label(Some(1), Some(3)), 4);
    assert_eq!(drnl_label(Some(2), Some(2)), 5);
    assert_eq!(drnl_label(None, Some(1)), 0);
    assert_eq!(drnl_label(Some(3), None), 0);
}

#[test]
fn fixture_graphs_mirror_netlists() {
    for (name, n) in large() {
        let g = CircuitGraph::from_netlist(&n);
        let fanin: usize = n.gates.iter().map(|g| g.inputs.len()).sum();
        assert_eq!(g.links().len(), fanin, "{name}");
        assert_eq!(g.node_count(), n.inputs.len() + n.gates.len(), "{name}");
        assert!(g.is_acyclic(), "{name}");
    }
}

#[test]
fn c432_partitions_refine_with_depth() {
    let n = load(C432);
    let g = CircuitGraph::from_netlist(&n);
    let mut prev = node_clusters(&g, 0).canonical_partition();
    for h in 1..=4 {
        let cur = node_clusters(&g, h).canonical_partition();
        assert!(refines(&cur, &prev), "h={h}");
        prev = cur;
    }
}

#[test]
fn fingerprints_are_deterministic() {
    let n = load(C880);
    let g = CircuitGraph::from_netlist(&n);
    let a = link_fingerprints(&g, 2, TargetLink::Remove);
    let b = link_fingerprints(&g, 2, TargetLink::Remove);
    assert_eq!(a, b);
    let digests: Vec<String> = a.iter().map(|f| f.digest()).collect();
    assert_eq!(digests, b.iter().map(|f| f.digest()).collect::<Vec<_>>());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn drnl_symmetric_and_monotone(a in 1usize..40, b in 1usize..40) {
        let l = drnl_label(Some(a), Some(b));
        prop_assert_eq!(l, drnl_label(Some(b), Some(a)));
        prop_assert_eq!(l as i64, drnl_formula(Some(a), Some(b)));
        // Larger distance sum means a larger label; for equal sums the
        // more balanced pair wins.
        prop_assert!(drnl_label(Some(a), Some(b + 1)) > l);
        if a + 1 < b {
            prop_assert!(drnl_label(Some(a + 1), Some(b - 1)) > l);
        }
    }

    #[test]
    fn drnl_injective_on_reachable_pairs(a in 1usize..30, b in 1usize..30, c in 1usize..30, d in 1usize..30) {
        let same = (a.min(b), a.max(b)) == (c.min(d), c.max(d));
        prop_assert_eq!(drnl_label(Some(a), Some(b)) == drnl_label(Some(c), Some(d)), same);
    }

    #[test]
    fn subgraph_matches_brute_force(seed in any::<u64>(), h in 1usize..4) {
        let raw = RawGraph::random(seed, 50);
        prop_assume!(!raw.edges.is_empty());
        let g = raw.build();
        let adj = raw.neighbor_sets();
        let full = all_pairs(&adj);
        let (u, v) = raw.edges[seed as usize % raw.edges.len()];
        let sub = g.enclosing_subgraph(u, v, h, TargetLink::Remove).unwrap();
        let want: Vec<usize> = (0..raw.len())
            .filter(|&x| full[u][x].is_some_and(|d| d <= h) || full[v][x].is_some_and(|d| d <= h))
            .collect();
        prop_assert_eq!(&sub.nodes, &want);

        // Labels from distances in the subgraph without the target edge.
        let pos: BTreeMap<usize, usize> = want.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let mut local = vec![BTreeSet::new(); want.len()];
        for (i, &x) in want.iter().enumerate() {
            for &y in &adj[x] {
                let target = (x == u && y == v) || (x == v && y == u);
                if let (Some(&j), false) = (pos.get(&y), target) {
                    local[i].insert(j);
                }
            }
        }
        let d = all_pairs(&local);
        let (lu, lv) = (pos[&u], pos[&v]);
        for (i, &x) in want.iter().enumerate() {
            let label = sub.label_of(x).unwrap() as i64;
            if i == lu || i == lv {
                prop_assert_eq!(label, 1);
            } else {
                prop_assert_eq!(label, drnl_formula(d[lu][i], d[lv][i]));
            }
        }
    }

    #[test]
    fn reaches_matches_closure(seed in any::<u64>()) {
        let raw = RawGraph::random(seed, 50);
        let g = raw.build();
        let r = closure(&raw);
        for (a, row) in r.iter().enumerate() {
            for (b, &want) in row.iter().enumerate() {
                prop_assert_eq!(g.reaches(a, b), want, "{} -> {}", a, b);
            }
        }
    }

    #[test]
    fn clustering_matches_oracle(seed in any::<u64>(), h in 0usize..4) {
        let raw = RawGraph::random(seed, 24);
        let g = raw.build();
        prop_assert_eq!(node_clusters(&g, h).canonical_partition(), oracle_node_partition(&raw, h));
        prop_assert_eq!(link_clusters(&g, h).canonical_partition(), oracle_link_partition(&raw, h));
    }

    #[test]
    fn node_refinement_monotone_in_depth(seed in any::<u64>()) {
        let raw = RawGraph::random(seed, 40);
        let g = raw.build();
        for h in 0..4 {
            let coarse = node_clusters(&g, h).canonical_partition();
            let fine = node_clusters(&g, h + 1).canonical_partition();
            prop_assert!(refines(&fine, &coarse), "h={}", h);
        }
    }

    #[test]
    fn clustering_is_permutation_invariant(seed in any::<u64>(), h in 1usize..3) {
        let raw = RawGraph::random(seed, 30);
        let mut perm: Vec<usize> = (0..raw.len()).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 0x5eed));
        let mut features = vec![String::new(); raw.len()];
        for (old, &new) in perm.iter().enumerate() {
            features[new] = raw.features[old].clone();
        }
        // Shuffle the edge list too, tracking where each link goes.
        let mut order: Vec<usize> = (0..raw.edges.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 0xed6e));
        let edges = order
            .iter()
            .map(|&e| (perm[raw.edges[e].0], perm[raw.edges[e].1]))
            .collect();
        let mut link_map = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            link_map[old] = new;
        }
        let moved = RawGraph { features, edges };

        let (a, b) = (raw.build(), moved.build());
        prop_assert_eq!(
            relabel(&node_clusters(&a, h).canonical_partition(), &perm),
            node_clusters(&b, h).canonical_partition()
        );
        prop_assert_eq!(
            relabel(&link_clusters(&a, h).canonical_partition(), &link_map),
            link_clusters(&b, h).canonical_partition()
        );
    }
}
