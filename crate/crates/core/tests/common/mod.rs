// SPDX-License-Identifier: Apache-2.0

//! Shared fixtures and a brute-force refinement oracle for integration tests.
//!
//! The oracle deliberately shares no code with the library: distances come
//! from Floyd-Warshall, labels from the closed formula in signed arithmetic,
//! and refinement states are full signature strings rather than interned ids.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use simll::graph::CircuitGraph;
use simll::netlist::{parse_bench, Netlist};

pub const C17: &str = include_str!("../../fixtures/c17.bench");
pub const C432: &str = include_str!("../../fixtures/c432.bench");
pub const C499: &str = include_str!("../../fixtures/c499.bench");
pub const C880: &str = include_str!("../../fixtures/c880.bench");

pub fn load(text: &str) -> Netlist {
    parse_bench(text).expect("fixture parses")
}

pub fn c17() -> Netlist {
    load(C17)
}

/// The three larger fixtures by name.
pub fn large() -> Vec<(&'static str, Netlist)> {
    vec![
        ("c432", load(C432)),
        ("c499", load(C499)),
        ("c880", load(C880)),
    ]
}

/// Plain description of a random labeled graph.
#[derive(Debug, Clone)]
pub struct RawGraph {
    pub features: Vec<String>,
    pub edges: Vec<(usize, usize)>,
}

impl RawGraph {
    pub fn random(seed: u64, max_nodes: usize) -> RawGraph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(2..=max_nodes);
        let alphabet = ["IN", "AND", "OR", "XOR"];
        let features = (0..n)
            .map(|_| alphabet[rng.random_range(0..alphabet.len())].to_string())
            .collect();
        let density: f64 = rng.random_range(0.05..0.3);
        let mut edges = Vec::new();
        for dst in 1..n {
            for src in 0..dst {
                if rng.random_bool(density) {
                    edges.push((src, dst));
                }
            }
        }
        RawGraph { features, edges }
    }

    pub fn build(&self) -> CircuitGraph {
        let names = (0..self.features.len()).map(|i| format!("v{i}")).collect();
        CircuitGraph::from_parts(names, self.features.clone(), &self.edges).unwrap()
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn neighbor_sets(&self) -> Vec<BTreeSet<usize>> {
        let mut adj = vec![BTreeSet::new(); self.len()];
        for &(a, b) in &self.edges {
            adj[a].insert(b);
            adj[b].insert(a);
        }
        adj
    }
}

/// All-pairs undirected distances; `None` means unreachable.
pub fn all_pairs(adj: &[BTreeSet<usize>]) -> Vec<Vec<Option<usize>>> {
    let n = adj.len();
    let mut d = vec![vec![None; n]; n];
    for i in 0..n {
        d[i][i] = Some(0);
        for &j in &adj[i] {
            d[i][j] = Some(1);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

/// Closed-form double-radius label, evaluated in signed arithmetic.
pub fn drnl_formula(du: Option<usize>, dv: Option<usize>) -> i64 {
    match (du, dv) {
        (Some(a), Some(b)) => {
            let (a, b) = (a as i64, b as i64);
            let d = a + b;
            1 + a.min(b) + (d / 2) * ((d / 2) + (d % 2) - 1)
        }
        _ => 0,
    }
}

/// Signature-string refinement: `h` rounds of `own[sorted neighbor sigs]`.
pub fn signatures(adj: &[BTreeSet<usize>], features: &[String], h: usize) -> Vec<String> {
    let mut sig: Vec<String> = features.to_vec();
    for _ in 0..h {
        sig = (0..adj.len())
            .map(|v| {
                let mut ns: Vec<&str> = adj[v].iter().map(|&w| sig[w].as_str()).collect();
                ns.sort();
                format!("{}[{}]", sig[v], ns.join(";"))
            })
            .collect();
    }
    sig
}

fn partition<K: Ord>(keys: Vec<K>) -> Vec<Vec<usize>> {
    let mut groups: BTreeMap<K, Vec<usize>> = BTreeMap::new();
    for (i, k) in keys.into_iter().enumerate() {
        groups.entry(k).or_default().push(i);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort();
    out
}

pub fn oracle_node_partition(g: &RawGraph, h: usize) -> Vec<Vec<usize>> {
    partition(signatures(&g.neighbor_sets(), &g.features, h))
}

/// Sorted signature multiset of the enclosing subgraph around `(u, v)`,
/// with the target edge removed.
pub fn oracle_link_key(g: &RawGraph, u: usize, v: usize, h: usize) -> Vec<String> {
    let adj = g.neighbor_sets();
    let full = all_pairs(&adj);
    let nodes: Vec<usize> = (0..g.len())
        .filter(|&x| full[u][x].is_some_and(|d| d <= h) || full[v][x].is_some_and(|d| d <= h))
        .collect();
    let pos: BTreeMap<usize, usize> = nodes.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut sub = vec![BTreeSet::new(); nodes.len()];
    for (i, &x) in nodes.iter().enumerate() {
        for &y in &adj[x] {
            if let Some(&j) = pos.get(&y) {
                let target = (x == u && y == v) || (x == v && y == u);
                if !target {
                    sub[i].insert(j);
                }
            }
        }
    }
    let d = all_pairs(&sub);
    let (lu, lv) = (pos[&u], pos[&v]);
    let features: Vec<String> = nodes
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let label = if i == lu || i == lv {
                1
            } else {
                drnl_formula(d[lu][i], d[lv][i])
            };
            format!("{}/{}", g.features[x], label)
        })
        .collect();
    let mut sig = signatures(&sub, &features, h);
    sig.sort();
    sig
}

pub fn oracle_link_partition(g: &RawGraph, h: usize) -> Vec<Vec<usize>> {
    partition(
        g.edges
            .iter()
            .map(|&(u, v)| oracle_link_key(g, u, v, h))
            .collect(),
    )
}

/// Random combinational netlist over `1..=max_inputs` inputs and
/// `1..=max_gates` gates. Every gate output nobody reads becomes a primary
/// output, so the result has no floating wires.
pub fn random_netlist(seed: u64, max_inputs: usize, max_gates: usize) -> Netlist {
    use simll::netlist::{Gate, GateType};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut n = Netlist::new(format!("rand{seed}"));
    let ni = rng.random_range(1..=max_inputs);
    let ng = rng.random_range(1..=max_gates);
    let mut nets: Vec<String> = (0..ni).map(|i| format!("i{i}")).collect();
    n.inputs = nets.clone();
    let mut read = vec![false; ni + ng];
    for gi in 0..ng {
        let kind = GateType::ALL[rng.random_range(0..GateType::ALL.len())];
        let arity = match kind {
            GateType::Not | GateType::Buf => 1,
            GateType::Mux => 3,
            _ => rng.random_range(2..=3),
        };
        let ins: Vec<usize> = (0..arity)
            .map(|_| rng.random_range(0..nets.len()))
            .collect();
        for &i in &ins {
            read[i] = true;
        }
        let names: Vec<&str> = ins.iter().map(|&i| nets[i].as_str()).collect();
        let out = format!("g{gi}");
        n.gates.push(Gate::new(out.clone(), kind, &names));
        nets.push(out);
    }
    for (i, net) in nets.iter().enumerate().skip(ni) {
        if !read[i] || rng.random_bool(0.1) {
            n.outputs.push(net.clone());
        }
    }
    n
}
