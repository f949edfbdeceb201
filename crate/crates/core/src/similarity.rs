// SPDX-License-Identifier: Apache-2.0

//! Topological/functional similarity by iterative state refinement.
//!
//! Each node starts from the interned form of its feature string and, for
//! `h` synchronous rounds, re-interns `own(sorted neighbor states)`. Nodes
//! with equal final states form a node cluster. Links are compared through
//! their enclosing subgraphs: features are tagged with the double-radius
//! label, refined inside the subgraph only, and the sorted multiset of final
//! states is the link's fingerprint.
//!
//! Interning (string -> sequential token) makes the update function exactly
//! injective. Token values depend on insertion order, which is fixed by
//! visiting nodes and links in canonical order.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::graph::{CircuitGraph, EnclosingSubgraph, GraphError, Link, TargetLink};

/// Default number of refinement rounds / subgraph hops.
pub const DEFAULT_HOPS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeState(pub u32);

#[derive(Debug, Default, Clone)]
pub struct StateInterner {
    table: HashMap<String, u32>,
}

impl StateInterner {
    pub fn new() -> Self {
        Self::default()
    }

    /// Injective update: equal strings get equal tokens, distinct strings
    /// get distinct tokens.
    pub fn update(&mut self, s: &str) -> NodeState {
        if let Some(&t) = self.table.get(s) {
            return NodeState(t);
        }
        let t = self.table.len() as u32;
        self.table.insert(s.to_string(), t);
        NodeState(t)
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

/// `h` rounds of refinement over an undirected adjacency list.
pub fn refine<S: AsRef<str>>(
    adjacency: &[Vec<usize>],
    features: &[S],
    h: usize,
    interner: &mut StateInterner,
) -> Vec<NodeState> {
    let mut states: Vec<NodeState> = features
        .iter()
        .map(|f| interner.update(f.as_ref()))
        .collect();
    let mut buf = String::new();
    let mut neigh = Vec::new();
    for _ in 0..h {
        let mut next = Vec::with_capacity(states.len());
        for (v, adj) in adjacency.iter().enumerate() {
            neigh.clear();
            neigh.extend(adj.iter().map(|&w| states[w].0));
            neigh.sort_unstable();
            buf.clear();
            write!(buf, "{}(", states[v].0).unwrap();
            for (i, t) in neigh.iter().enumerate() {
                if i > 0 {
                    buf.push(',');
                }
                write!(buf, "{t}").unwrap();
            }
            buf.push(')');
            next.push(interner.update(&buf));
        }
        states = next;
    }
    states
}

/// Canonical fingerprint: a sorted multiset of states.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint(pub Vec<u32>);

impl Fingerprint {
    /// Short stable digest for listings.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for t in &self.0 {
            h.update(t.to_le_bytes());
        }
        hex::encode(&h.finalize()[..8])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClusterKind {
    Nodes,
    Links,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    pub fingerprint: Fingerprint,
    /// Node ids or link indices, ascending.
    pub members: Vec<usize>,
}

impl Cluster {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// A partition of nodes or links, largest cluster first; ties keep the
/// order of each cluster's first member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterSet {
    pub kind: ClusterKind,
    pub clusters: Vec<Cluster>,
}

impl ClusterSet {
    fn from_keys(kind: ClusterKind, keys: Vec<Fingerprint>) -> ClusterSet {
        let mut groups: BTreeMap<Fingerprint, Vec<usize>> = BTreeMap::new();
        for (i, k) in keys.into_iter().enumerate() {
            groups.entry(k).or_default().push(i);
        }
        let mut clusters: Vec<Cluster> = groups
            .into_iter()
            .map(|(fingerprint, members)| Cluster {
                fingerprint,
                members,
            })
            .collect();
        clusters.sort_by(|a, b| b.len().cmp(&a.len()).then(a.members[0].cmp(&b.members[0])));
        ClusterSet { kind, clusters }
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn element_count(&self) -> usize {
        self.clusters.iter().map(Cluster::len).sum()
    }

    /// Cluster index of each element.
    pub fn assignment(&self) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.element_count()];
        for (c, cl) in self.clusters.iter().enumerate() {
            for &m in &cl.members {
                out[m] = c;
            }
        }
        out
    }

    /// Partition as a sorted list of sorted member lists, independent of
    /// fingerprints and cluster order.
    pub fn canonical_partition(&self) -> Vec<Vec<usize>> {
        let mut p: Vec<Vec<usize>> = self.clusters.iter().map(|c| c.members.clone()).collect();
        p.sort();
        p
    }
}

/// Node clustering by `h` rounds of refinement over the whole graph.
pub fn node_clusters(g: &CircuitGraph, h: usize) -> ClusterSet {
    let mut interner = StateInterner::new();
    let states = refine(g.adjacency(), g.features(), h, &mut interner);
    ClusterSet::from_keys(
        ClusterKind::Nodes,
        states.into_iter().map(|s| Fingerprint(vec![s.0])).collect(),
    )
}

fn subgraph_fingerprint(
    sub: &EnclosingSubgraph,
    h: usize,
    interner: &mut StateInterner,
) -> Fingerprint {
    let mut states: Vec<u32> = refine(&sub.adjacency, &sub.features, h, interner)
        .into_iter()
        .map(|s| s.0)
        .collect();
    states.sort_unstable();
    Fingerprint(states)
}

/// Fingerprint of the candidate link `(u, v)`; tokens come from `interner`,
/// so fingerprints are only comparable when they share one.
pub fn link_fingerprint(
    g: &CircuitGraph,
    u: usize,
    v: usize,
    h: usize,
    mode: TargetLink,
    interner: &mut StateInterner,
) -> Result<Fingerprint, GraphError> {
    let sub = g.enclosing_subgraph(u, v, h, mode)?;
    Ok(subgraph_fingerprint(&sub, h, interner))
}

/// Fingerprints for every link of `g`, in link order, sharing one interner.
pub fn link_fingerprints(g: &CircuitGraph, h: usize, mode: TargetLink) -> Vec<Fingerprint> {
    let subs: Vec<EnclosingSubgraph> = g
        .links()
        .par_iter()
        .map(|l: &Link| {
            g.enclosing_subgraph(l.src, l.dst, h, mode)
                .expect("link endpoints are graph nodes")
        })
        .collect();
    let mut interner = StateInterner::new();
    subs.iter()
        .map(|s| subgraph_fingerprint(s, h, &mut interner))
        .collect()
}

/// Link clustering: links with equal fingerprint multisets share a cluster.
pub fn link_clusters(g: &CircuitGraph, h: usize) -> ClusterSet {
    link_clusters_with(g, h, TargetLink::Remove)
}

pub fn link_clusters_with(g: &CircuitGraph, h: usize, mode: TargetLink) -> ClusterSet {
    ClusterSet::from_keys(ClusterKind::Links, link_fingerprints(g, h, mode))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionStats {
    pub clusters: usize,
    pub elements: usize,
    /// cluster size -> number of clusters of that size
    pub histogram: BTreeMap<usize, usize>,
    /// Fraction of elements that share a cluster with at least one other.
    pub shared_fraction: f64,
}

impl PartitionStats {
    pub fn of(set: &ClusterSet) -> PartitionStats {
        let mut histogram = BTreeMap::new();
        for c in &set.clusters {
            *histogram.entry(c.len()).or_default() += 1;
        }
        let elements = set.element_count();
        let shared: usize = set
            .clusters
            .iter()
            .filter(|c| c.len() >= 2)
            .map(Cluster::len)
            .sum();
        PartitionStats {
            clusters: set.len(),
            elements,
            histogram,
            shared_fraction: if elements == 0 {
                0.0
            } else {
                shared as f64 / elements as f64
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterStats {
    pub nodes: PartitionStats,
    pub links: PartitionStats,
}

pub fn cluster_stats(nc: &ClusterSet, lc: &ClusterSet) -> ClusterStats {
    ClusterStats {
        nodes: PartitionStats::of(nc),
        links: PartitionStats::of(lc),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse_bench;

    fn labeled(features: &[&str], edges: &[(usize, usize)]) -> CircuitGraph {
        CircuitGraph::from_parts(
            (0..features.len()).map(|i| format!("n{i}")).collect(),
            features.iter().map(|s| s.to_string()).collect(),
            edges,
        )
        .unwrap()
    }

    #[test]
    fn update_is_injective_and_stable() {
        let mut a = StateInterner::new();
        let x = a.update("NAND");
        assert_eq!(a.update("NAND"), x);
        assert_ne!(a.update("NOR"), x);
        let mut b = StateInterner::new();
        assert_eq!(b.update("NAND"), x);
        assert_eq!(b.update("NOR"), a.update("NOR"));
    }

    #[test]
    fn symmetric_nands_cluster() {
        let n = parse_bench(
            "INPUT(a)\nINPUT(b)\nINPUT(c)\nINPUT(d)\nOUTPUT(y)\nOUTPUT(z)\n\
             p = NAND(a, b)\nq = NAND(c, d)\ny = NOT(p)\nz = NOT(q)\n",
        )
        .unwrap();
        let g = CircuitGraph::from_netlist(&n);
        let nc = node_clusters(&g, 1);
        let (p, q) = (g.node("p").unwrap(), g.node("q").unwrap());
        let a = nc.assignment();
        assert_eq!(a[p], a[q]);
    }

    #[test]
    fn different_types_split() {
        let n = parse_bench(
            "INPUT(a)\nINPUT(b)\nINPUT(c)\nINPUT(d)\nOUTPUT(p)\nOUTPUT(q)\np = NAND(a, b)\nq = OR(c, d)\n",
        )
        .unwrap();
        let g = CircuitGraph::from_netlist(&n);
        for h in 0..3 {
            let a = node_clusters(&g, h).assignment();
            assert_ne!(a[g.node("p").unwrap()], a[g.node("q").unwrap()]);
        }
    }

    #[test]
    fn labeled_path_abba() {
        let g = labeled(&["A", "B", "B", "A"], &[(0, 1), (1, 2), (2, 3)]);
        let nc = node_clusters(&g, 1);
        assert_eq!(nc.canonical_partition(), vec![vec![0, 3], vec![1, 2]]);
    }

    #[test]
    fn mirrored_links_share_fingerprint() {
        // two identical gates with mirrored wiring: a -> x <- b, a -> y <- b
        let g = labeled(
            &["IN", "IN", "AND", "AND"],
            &[(0, 2), (1, 2), (0, 3), (1, 3)],
        );
        let mut i = StateInterner::new();
        let f1 = link_fingerprint(&g, 0, 2, 2, TargetLink::Remove, &mut i).unwrap();
        let f2 = link_fingerprint(&g, 1, 3, 2, TargetLink::Remove, &mut i).unwrap();
        assert_eq!(f1, f2);
        let lc = link_clusters(&g, 2);
        assert_eq!(lc.len(), 1);
        assert_eq!(lc.clusters[0].len(), 4);
    }

    #[test]
    fn fingerprint_size_matches_subgraph() {
        let g = labeled(
            &["A", "B", "C", "D", "E"],
            &[(0, 1), (1, 2), (2, 3), (3, 4)],
        );
        let mut i = StateInterner::new();
        let f = link_fingerprint(&g, 1, 2, 2, TargetLink::Remove, &mut i).unwrap();
        assert_eq!(f.len(), 5);
        assert!(link_fingerprint(&g, 1, 99, 2, TargetLink::Remove, &mut i).is_err());
    }

    #[test]
    fn path_ends_are_equivalent() {
        // A - B - C - B - A
        let g = labeled(
            &["A", "B", "C", "B", "A"],
            &[(0, 1), (1, 2), (2, 3), (3, 4)],
        );
        let mut i = StateInterner::new();
        let left = link_fingerprint(&g, 0, 1, 1, TargetLink::Remove, &mut i).unwrap();
        let right = link_fingerprint(&g, 4, 3, 1, TargetLink::Remove, &mut i).unwrap();
        let right_rev = link_fingerprint(&g, 3, 4, 1, TargetLink::Remove, &mut i).unwrap();
        assert_eq!(left, right);
        assert_eq!(left, right_rev);
    }

    #[test]
    fn c17_link_partition_covers_links() {
        let n = parse_bench(include_str!("../fixtures/c17.bench")).unwrap();
        let g = CircuitGraph::from_netlist(&n);
        let lc = link_clusters(&g, 2);
        assert_eq!(lc.element_count(), 12);
        let fps = link_fingerprints(&g, 2, TargetLink::Remove);
        for c in &lc.clusters {
            for &m in &c.members {
                assert_eq!(fps[m], c.fingerprint);
            }
        }
        let stats = cluster_stats(&node_clusters(&g, 2), &lc);
        let total: usize = stats.links.histogram.iter().map(|(s, c)| s * c).sum();
        assert_eq!(total, 12);
        let total: usize = stats.nodes.histogram.iter().map(|(s, c)| s * c).sum();
        assert_eq!(total, 11);
    }

    #[test]
    fn stats_extremes() {
        let singletons = ClusterSet::from_keys(
            ClusterKind::Nodes,
            (0..4).map(|i| Fingerprint(vec![i])).collect(),
        );
        let one = ClusterSet::from_keys(ClusterKind::Nodes, vec![Fingerprint(vec![0]); 4]);
        let s = cluster_stats(&singletons, &one);
        assert_eq!(s.nodes.shared_fraction, 0.0);
        assert_eq!(s.links.shared_fraction, 1.0);
        assert_eq!(s.links.histogram, BTreeMap::from([(4, 1)]));
    }
}
