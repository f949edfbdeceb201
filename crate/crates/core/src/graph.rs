// SPDX-License-Identifier: Apache-2.0

//! Graph view of a netlist.
//!
//! Nodes are net drivers: primary inputs, key inputs and gate outputs, in
//! that order. Every gate input pin contributes one directed edge
//! `driver -> gate`, so a net with several readers is a single node with
//! several outgoing links. Similarity analysis works on the undirected view
//! (fan-in plus fan-out); loop checks use directed reachability.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write;

use thiserror::Error;

use crate::netlist::Netlist;

pub type NodeId = usize;

/// Feature string given to primary and key inputs.
pub const INPUT_FEATURE: &str = "IN";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Link {
    pub src: NodeId,
    pub dst: NodeId,
    /// Input pin of `dst` the link drives.
    pub pin: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("edge {0} -> {1} references a node outside the graph")]
    BadEdge(usize, usize),
}

#[derive(Debug, Clone, Default)]
pub struct CircuitGraph {
    names: Vec<String>,
    features: Vec<String>,
    index: HashMap<String, NodeId>,
    links: Vec<Link>,
    fanin: Vec<Vec<NodeId>>,
    fanout: Vec<Vec<NodeId>>,
    neighbors: Vec<Vec<NodeId>>,
}

/// Whether the target link is taken out of its own enclosing subgraph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TargetLink {
    /// Drop every `u`–`v` edge before computing distances and refining.
    #[default]
    Remove,
    Keep,
}

impl CircuitGraph {
    pub fn from_netlist(n: &Netlist) -> CircuitGraph {
        Self::from_netlist_filtered(n, |_| true)
    }

    /// Build the graph keeping only gates for which `keep` returns true.
    /// Edges touching a dropped gate disappear with it.
    pub fn from_netlist_filtered(
        n: &Netlist,
        keep: impl Fn(&crate::netlist::Gate) -> bool,
    ) -> CircuitGraph {
        let mut names = Vec::with_capacity(n.num_nets());
        let mut features = Vec::with_capacity(n.num_nets());
        for i in n.inputs.iter().chain(&n.key_inputs) {
            names.push(i.clone());
            features.push(INPUT_FEATURE.to_string());
        }
        let kept: Vec<_> = n.gates.iter().filter(|g| keep(g)).collect();
        for g in &kept {
            names.push(g.output.clone());
            features.push(g.kind.name().to_string());
        }
        let index: HashMap<String, NodeId> = names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let mut edges = Vec::new();
        for g in &kept {
            let dst = index[&g.output];
            for (pin, i) in g.inputs.iter().enumerate() {
                if let Some(&src) = index.get(i) {
                    edges.push(Link { src, dst, pin });
                }
            }
        }
        Self::assemble(names, features, index, edges)
    }

    /// Build from raw parts; `edges` are `(src, dst)` pairs with pins numbered
    /// per destination in the given order.
    pub fn from_parts(
        names: Vec<String>,
        features: Vec<String>,
        edges: &[(NodeId, NodeId)],
    ) -> Result<CircuitGraph, GraphError> {
        assert_eq!(names.len(), features.len());
        let n = names.len();
        let mut pins = vec![0usize; n];
        let mut links = Vec::with_capacity(edges.len());
        for &(src, dst) in edges {
            if src >= n || dst >= n {
                return Err(GraphError::BadEdge(src, dst));
            }
            links.push(Link {
                src,
                dst,
                pin: pins[dst],
            });
            pins[dst] += 1;
        }
        let index = names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Ok(Self::assemble(names, features, index, links))
    }

    fn assemble(
        names: Vec<String>,
        features: Vec<String>,
        index: HashMap<String, NodeId>,
        links: Vec<Link>,
    ) -> CircuitGraph {
        let n = names.len();
        let mut fanin = vec![Vec::new(); n];
        let mut fanout = vec![Vec::new(); n];
        let mut neighbors = vec![Vec::new(); n];
        for l in &links {
            fanin[l.dst].push(l.src);
            fanout[l.src].push(l.dst);
            neighbors[l.src].push(l.dst);
            neighbors[l.dst].push(l.src);
        }
        for adj in &mut neighbors {
            adj.sort_unstable();
            adj.dedup();
        }
        CircuitGraph {
            names,
            features,
            index,
            links,
            fanin,
            fanout,
            neighbors,
        }
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn name(&self, v: NodeId) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn feature(&self, v: NodeId) -> &str {
        &self.features[v]
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn node(&self, name: &str) -> Option<NodeId> {
        self.index.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<NodeId, GraphError> {
        self.node(name)
            .ok_or_else(|| GraphError::UnknownNode(name.to_string()))
    }

    /// Readers of `v`, one entry per link (duplicates when a gate reads a net twice).
    pub fn fanout(&self, v: NodeId) -> &[NodeId] {
        &self.fanout[v]
    }

    pub fn fanin(&self, v: NodeId) -> &[NodeId] {
        &self.fanin[v]
    }

    /// Undirected neighbor set (fan-in ∪ fan-out), sorted.
    pub fn undirected_neighbors(&self, v: NodeId) -> Result<&[NodeId], GraphError> {
        self.neighbors
            .get(v)
            .map(Vec::as_slice)
            .ok_or_else(|| GraphError::UnknownNode(v.to_string()))
    }

    pub(crate) fn adjacency(&self) -> &[Vec<NodeId>] {
        &self.neighbors
    }

    /// Undirected BFS distances from `v`, truncated at `h` hops.
    pub fn bfs_distances(&self, v: NodeId, h: usize) -> BTreeMap<NodeId, usize> {
        let mut dist = BTreeMap::new();
        if v >= self.node_count() {
            return dist;
        }
        dist.insert(v, 0);
        let mut queue = VecDeque::from([v]);
        while let Some(x) = queue.pop_front() {
            let d = dist[&x];
            if d == h {
                continue;
            }
            for &w in &self.neighbors[x] {
                if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(w) {
                    e.insert(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Directed reachability `a ⇝ b`. Every node reaches itself.
    pub fn reaches(&self, a: NodeId, b: NodeId) -> bool {
        if a == b {
            return true;
        }
        let mut seen = vec![false; self.node_count()];
        let mut stack = vec![a];
        seen[a] = true;
        while let Some(x) = stack.pop() {
            for &y in &self.fanout[x] {
                if y == b {
                    return true;
                }
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        false
    }

    pub fn is_acyclic(&self) -> bool {
        let mut indegree: Vec<usize> = self.fanin.iter().map(Vec::len).collect();
        let mut stack: Vec<_> = (0..self.node_count())
            .filter(|&v| indegree[v] == 0)
            .collect();
        let mut seen = 0;
        while let Some(v) = stack.pop() {
            seen += 1;
            for &w in &self.fanout[v] {
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    stack.push(w);
                }
            }
        }
        seen == self.node_count()
    }

    /// h-hop enclosing subgraph around the candidate link `(u, v)`. The link
    /// need not exist in the graph.
    pub fn enclosing_subgraph(
        &self,
        u: NodeId,
        v: NodeId,
        h: usize,
        mode: TargetLink,
    ) -> Result<EnclosingSubgraph, GraphError> {
        let n = self.node_count();
        if u >= n {
            return Err(GraphError::UnknownNode(u.to_string()));
        }
        if v >= n {
            return Err(GraphError::UnknownNode(v.to_string()));
        }
        let mut nodes: Vec<NodeId> = self.bfs_distances(u, h).into_keys().collect();
        nodes.extend(self.bfs_distances(v, h).into_keys());
        nodes.sort_unstable();
        nodes.dedup();
        let local: HashMap<NodeId, usize> =
            nodes.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let (lu, lv) = (local[&u], local[&v]);

        let mut adjacency = vec![Vec::new(); nodes.len()];
        for (i, &x) in nodes.iter().enumerate() {
            for &w in &self.neighbors[x] {
                if let Some(&j) = local.get(&w) {
                    let is_target = (i == lu && j == lv) || (i == lv && j == lu);
                    if is_target && mode == TargetLink::Remove {
                        continue;
                    }
                    adjacency[i].push(j);
                }
            }
        }

        let du = local_bfs(&adjacency, lu);
        let dv = local_bfs(&adjacency, lv);
        let labels: Vec<u32> = (0..nodes.len())
            .map(|i| {
                if i == lu || i == lv {
                    1
                } else {
                    drnl_label(du[i], dv[i])
                }
            })
            .collect();
        let features = nodes
            .iter()
            .zip(&labels)
            .map(|(&x, l)| format!("{}/{l}", self.features[x]))
            .collect();
        Ok(EnclosingSubgraph {
            target: (u, v),
            local_target: (lu, lv),
            nodes,
            adjacency,
            labels,
            features,
        })
    }
}

pub fn to_graph(n: &Netlist) -> CircuitGraph {
    CircuitGraph::from_netlist(n)
}

fn local_bfs(adj: &[Vec<usize>], s: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[s] = Some(0);
    let mut queue = VecDeque::from([s]);
    while let Some(x) = queue.pop_front() {
        let d = dist[x].unwrap();
        for &w in &adj[x] {
            if dist[w].is_none() {
                dist[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Double-radius node label from the distances to the two target nodes;
/// `None` means unreachable and yields 0.
pub fn drnl_label(du: Option<usize>, dv: Option<usize>) -> u32 {
    let (Some(du), Some(dv)) = (du, dv) else {
        return 0;
    };
    let d = du + dv;
    let (half, rem) = (d / 2, d % 2);
    // half + rem - 1 is negative only for d = 0, where half is 0 anyway
    let tail = (half + rem).saturating_sub(1);
    (1 + du.min(dv) + half * tail) as u32
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnclosingSubgraph {
    pub target: (NodeId, NodeId),
    /// Positions of the two targets in `nodes`.
    pub local_target: (usize, usize),
    /// Global node ids, sorted.
    pub nodes: Vec<NodeId>,
    /// Undirected adjacency over local indices.
    pub adjacency: Vec<Vec<usize>>,
    pub labels: Vec<u32>,
    /// `feature/label` per node.
    pub features: Vec<String>,
}

impl EnclosingSubgraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn label_of(&self, global: NodeId) -> Option<u32> {
        self.nodes
            .binary_search(&global)
            .ok()
            .map(|i| self.labels[i])
    }

    /// Edge-list dump: `# node label` header lines then one `u v` line per
    /// undirected edge, using net names.
    pub fn to_edge_list(&self, g: &CircuitGraph) -> String {
        let mut s = String::new();
        for (i, &x) in self.nodes.iter().enumerate() {
            writeln!(s, "# {} {}", g.name(x), self.labels[i]).unwrap();
        }
        for (i, adj) in self.adjacency.iter().enumerate() {
            for &j in adj {
                if i < j {
                    writeln!(s, "{} {}", g.name(self.nodes[i]), g.name(self.nodes[j])).unwrap();
                }
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse_bench;

    fn chain(names: &[&str]) -> CircuitGraph {
        let edges: Vec<_> = (1..names.len()).map(|i| (i - 1, i)).collect();
        CircuitGraph::from_parts(
            names.iter().map(|s| s.to_string()).collect(),
            vec!["X".to_string(); names.len()],
            &edges,
        )
        .unwrap()
    }

    #[test]
    fn c17_graph_size() {
        let n = parse_bench(include_str!("../fixtures/c17.bench")).unwrap();
        let g = to_graph(&n);
        assert_eq!(g.node_count(), 11);
        assert_eq!(g.links().len(), 12);
        assert!(g.is_acyclic());
        assert_eq!(g.feature(0), INPUT_FEATURE);
        assert_eq!(g.feature(5), "NAND");
    }

    #[test]
    fn single_gate_and_empty() {
        let n = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = NAND(a, b)").unwrap();
        let g = to_graph(&n);
        assert_eq!((g.node_count(), g.links().len()), (3, 2));
        let y = g.node("y").unwrap();
        let names: Vec<_> = g
            .undirected_neighbors(y)
            .unwrap()
            .iter()
            .map(|&v| g.name(v))
            .collect();
        assert_eq!(names, vec!["a", "b"]);
        let a = g.node("a").unwrap();
        assert_eq!(g.undirected_neighbors(a).unwrap(), &[y]);
        assert!(g.undirected_neighbors(17).is_err());

        let empty = to_graph(&Netlist::default());
        assert_eq!((empty.node_count(), empty.links().len()), (0, 0));
    }

    #[test]
    fn isolated_input_has_no_neighbors() {
        let n = parse_bench("INPUT(a)\nINPUT(b)\nINPUT(c)\nOUTPUT(y)\ny = AND(a, b)").unwrap();
        let g = to_graph(&n);
        assert!(g
            .undirected_neighbors(g.node("c").unwrap())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn bfs_truncation() {
        let g = chain(&["a", "b", "c", "d"]);
        assert_eq!(g.bfs_distances(0, 0), BTreeMap::from([(0, 0)]));
        assert_eq!(
            g.bfs_distances(0, 2),
            BTreeMap::from([(0, 0), (1, 1), (2, 2)])
        );
        let two = CircuitGraph::from_parts(
            vec!["a".into(), "b".into(), "z".into()],
            vec!["X".into(); 3],
            &[(0, 1)],
        )
        .unwrap();
        assert!(!two.bfs_distances(0, 5).contains_key(&2));
    }

    #[test]
    fn drnl_values() {
        assert_eq!(drnl_label(Some(0), Some(1)), 1);
        assert_eq!(drnl_label(Some(1), Some(2)), 3);
        assert_eq!(drnl_label(Some(1), Some(1)), 2);
        assert_eq!(drnl_label(Some(2), None), 0);
        assert_eq!(drnl_label(None, None), 0);
    }

    #[test]
    fn path_subgraph_h1() {
        // t - u - v - w
        let g = chain(&["t", "u", "v", "w"]);
        let s = g.enclosing_subgraph(1, 2, 1, TargetLink::Remove).unwrap();
        assert_eq!(s.nodes, vec![0, 1, 2, 3]);
        assert_eq!(s.label_of(1), Some(1));
        assert_eq!(s.label_of(2), Some(1));
        // with the u-v edge gone, t and w only reach one target
        assert_eq!(s.label_of(0), Some(0));
        assert_eq!(s.label_of(3), Some(0));
        let keep = g.enclosing_subgraph(1, 2, 1, TargetLink::Keep).unwrap();
        // t: d_u = 1, d_v = 2
        assert_eq!(keep.label_of(0), Some(3));
    }

    #[test]
    fn common_neighbor_label() {
        // x feeds both u and v; u -> v is the target
        let g = CircuitGraph::from_parts(
            vec!["x".into(), "u".into(), "v".into()],
            vec!["X".into(); 3],
            &[(0, 1), (0, 2), (1, 2)],
        )
        .unwrap();
        let s = g.enclosing_subgraph(1, 2, 2, TargetLink::Remove).unwrap();
        assert_eq!(s.label_of(0), Some(2));
        assert!(s.to_edge_list(&g).contains("# x 2"));
    }

    #[test]
    fn reachability() {
        let g = chain(&["a", "b", "c"]);
        assert!(g.reaches(0, 0));
        assert!(g.reaches(0, 2));
        assert!(!g.reaches(2, 0));
        let two = CircuitGraph::from_parts(vec!["a".into(), "b".into()], vec!["X".into(); 2], &[])
            .unwrap();
        assert!(!two.reaches(0, 1));
    }
}
