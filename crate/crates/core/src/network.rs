//! Network graph: nodes with loads, typed edges, topology checks and cycle
//! handling.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gasprops::MassFraction;
use crate::pipeflow::PipeParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Supply,
    Demand,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    /// kg/(m² s); negative at supplies.
    pub load: f64,
    /// Injected composition, supplies only.
    pub zeta: Option<MassFraction>,
    /// Prescribed pressure, Pa.
    pub pressure: Option<f64>,
}

impl Node {
    pub fn supply(id: impl Into<String>, load: f64, zeta: MassFraction) -> Self {
        Self { id: id.into(), kind: NodeKind::Supply, load, zeta: Some(zeta), pressure: None }
    }

    pub fn demand(id: impl Into<String>, load: f64) -> Self {
        Self { id: id.into(), kind: NodeKind::Demand, load, zeta: None, pressure: None }
    }

    pub fn with_pressure(mut self, p: f64) -> Self {
        self.pressure = Some(p);
        self
    }

    pub fn is_supply(&self) -> bool {
        self.kind == NodeKind::Supply
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeKind {
    Pipe(PipeParams),
    Compressor { gamma: f64 },
    Valve,
}

impl EdgeKind {
    pub fn label(&self) -> &'static str {
        match self {
            EdgeKind::Pipe(_) => "pipe",
            EdgeKind::Compressor { .. } => "compressor",
            EdgeKind::Valve => "valve",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: String,
    /// Foot node id.
    pub from: String,
    /// Head node id.
    pub to: String,
    pub kind: EdgeKind,
}

impl Edge {
    pub fn new(id: impl Into<String>, from: impl Into<String>, to: impl Into<String>, kind: EdgeKind) -> Self {
        Self { id: id.into(), from: from.into(), to: to.into(), kind }
    }

    pub fn is_compressor(&self) -> bool {
        matches!(self.kind, EdgeKind::Compressor { .. })
    }
}

/// Directed graph with resolved endpoint indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    node_index: HashMap<String, usize>,
    edge_index: HashMap<String, usize>,
    /// `(foot, head)` per edge.
    ends: Vec<(usize, usize)>,
    /// Incident edge indices per node.
    incident: Vec<Vec<usize>>,
}

impl Network {
    /// Resolves ids; fails on duplicates or dangling endpoints. Everything
    /// else is reported by [`validate`].
    pub fn new(nodes: Vec<Node>, edges: Vec<Edge>) -> Result<Self> {
        let mut node_index = HashMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if node_index.insert(n.id.clone(), i).is_some() {
                return Err(Error::InvalidInput(format!("duplicate node id {}", n.id)));
            }
        }
        let mut edge_index = HashMap::new();
        let mut ends = Vec::with_capacity(edges.len());
        let mut incident = vec![Vec::new(); nodes.len()];
        for (k, e) in edges.iter().enumerate() {
            if edge_index.insert(e.id.clone(), k).is_some() {
                return Err(Error::InvalidInput(format!("duplicate edge id {}", e.id)));
            }
            let f = *node_index.get(&e.from).ok_or_else(|| Error::UnknownNode(e.from.clone()))?;
            let h = *node_index.get(&e.to).ok_or_else(|| Error::UnknownNode(e.to.clone()))?;
            ends.push((f, h));
            incident[f].push(k);
            if h != f {
                incident[h].push(k);
            }
        }
        Ok(Self { nodes, edges, node_index, edge_index, ends, incident })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node(&self, v: usize) -> &Node {
        &self.nodes[v]
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn node_idx(&self, id: &str) -> Result<usize> {
        self.node_index.get(id).copied().ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    pub fn edge_idx(&self, id: &str) -> Result<usize> {
        self.edge_index.get(id).copied().ok_or_else(|| Error::UnknownEdge(id.to_string()))
    }

    /// `(foot, head)` node indices of edge `e`.
    pub fn ends(&self, e: usize) -> (usize, usize) {
        self.ends[e]
    }

    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    /// The node at the other end of `e` seen from `v`.
    pub fn opposite(&self, e: usize, v: usize) -> usize {
        let (f, h) = self.ends[e];
        if f == v {
            h
        } else {
            f
        }
    }

    /// Incidence entry `a(v, e)`: −1 at the foot, +1 at the head.
    pub fn incidence(&self, v: usize, e: usize) -> i8 {
        let (f, h) = self.ends[e];
        if f == h {
            0
        } else if v == f {
            -1
        } else if v == h {
            1
        } else {
            0
        }
    }

    pub fn loads(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.load).collect()
    }

    /// `|E| − |V| + 1` for a connected graph.
    pub fn cycle_rank(&self) -> isize {
        self.edges.len() as isize - self.nodes.len() as isize + 1
    }

    pub fn is_connected(&self) -> bool {
        if self.nodes.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &e in &self.incident[v] {
                let w = self.opposite(e, v);
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.nodes.len()
    }

    /// Number of nodes carrying a pressure specification.
    pub fn pressure_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.pressure.is_some()).count()
    }

    /// More than one prescribed pressure means pressures at all supplies with
    /// free supply loads.
    pub fn is_mixed_bc(&self) -> bool {
        self.pressure_count() > 1
    }

    /// Copy with the given loads.
    pub fn with_loads(&self, loads: &[f64]) -> Network {
        let mut out = self.clone();
        for (n, &b) in out.nodes.iter_mut().zip(loads) {
            n.load = b;
        }
        out
    }

    /// Copy with every pressure specification cleared except at `v`.
    pub fn with_reference(&self, v: usize, p: f64) -> Network {
        let mut out = self.clone();
        for (i, n) in out.nodes.iter_mut().enumerate() {
            n.pressure = (i == v).then_some(p);
        }
        out
    }

    pub(crate) fn nodes_mut(&mut self) -> &mut [Node] {
        &mut self.nodes
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    Tree,
    OneCycle,
    Invalid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    /// Graph classification; boundary-data problems do not change it.
    pub topology: Topology,
    pub violations: Vec<String>,
}

impl Diagnostics {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<Topology> {
        if self.violations.is_empty() {
            Ok(self.topology)
        } else {
            Err(Error::Validation(self.violations))
        }
    }
}

/// Balance tolerance for `Σ b`.
pub fn balance_tolerance(loads: &[f64]) -> f64 {
    1e-9 * loads.iter().map(|b| b.abs()).sum::<f64>().max(1.0)
}

/// Checks all structural and boundary-data invariants.
pub fn validate(net: &Network) -> Diagnostics {
    let mut v = Vec::new();
    if net.nodes.is_empty() {
        v.push("network has no nodes".to_string());
    }
    for (k, e) in net.edges.iter().enumerate() {
        let (f, h) = net.ends(k);
        if f == h {
            v.push(format!("edge {} is a self-loop", e.id));
        }
        match e.kind {
            EdgeKind::Compressor { gamma } if !(gamma >= 1.0 && gamma.is_finite()) => {
                v.push(format!("compressor {} has ratio {gamma} < 1", e.id));
            }
            EdgeKind::Pipe(p) => {
                if let Err(err) = PipeParams::new(p.length, p.diameter, p.friction, p.mode) {
                    v.push(format!("pipe {}: {err}", e.id));
                }
            }
            _ => {}
        }
    }
    for n in &net.nodes {
        match n.kind {
            NodeKind::Supply => {
                if n.zeta.is_none() {
                    v.push(format!("supply {} has no composition", n.id));
                }
                if n.load > 0.0 {
                    v.push(format!("supply {} has positive load {}", n.id, n.load));
                }
            }
            NodeKind::Demand => {
                if n.zeta.is_some() {
                    v.push(format!("demand {} carries a composition", n.id));
                }
                if n.load < 0.0 {
                    v.push(format!("demand {} has negative load {}", n.id, n.load));
                }
            }
        }
        if let Some(p) = n.pressure {
            if !(p > 0.0 && p.is_finite()) {
                v.push(format!("node {} has non-positive pressure {p}", n.id));
            }
        }
    }
    if !net.nodes.iter().any(Node::is_supply) && !net.nodes.is_empty() {
        v.push("network has no supply".to_string());
    }
    match net.pressure_count() {
        0 => v.push("no node carries a reference pressure".to_string()),
        1 => {
            let loads = net.loads();
            let sum: f64 = loads.iter().sum();
            if sum.abs() > balance_tolerance(&loads) {
                v.push(format!("unbalanced loads: sum = {sum}"));
            }
        }
        _ => {
            for n in &net.nodes {
                match (n.kind, n.pressure) {
                    (NodeKind::Supply, None) => v.push(format!("supply {} lacks a pressure in mixed mode", n.id)),
                    (NodeKind::Demand, Some(_)) => v.push(format!("demand {} carries a pressure in mixed mode", n.id)),
                    _ => {}
                }
            }
        }
    }

    let connected = net.is_connected();
    if !connected {
        v.push("network is not connected".to_string());
    }
    let rank = net.cycle_rank();
    let topology = if !connected || !(0..=1).contains(&rank) {
        if connected && rank > 1 {
            v.push(format!("cycle count {rank} > 1"));
        }
        Topology::Invalid
    } else if rank == 0 {
        Topology::Tree
    } else {
        Topology::OneCycle
    };
    if topology == Topology::OneCycle {
        if let Ok(Some(c)) = find_cycle(net) {
            for &e in &c.edges {
                if net.edges[e].is_compressor() {
                    v.push(format!("compressor {} lies on the cycle", net.edges[e].id));
                }
            }
        }
    }
    // Parallel edges with a compressor among them.
    let mut by_pair: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for k in 0..net.edges.len() {
        let (f, h) = net.ends(k);
        by_pair.entry((f.min(h), f.max(h))).or_default().push(k);
    }
    let mut pairs: Vec<_> = by_pair.into_values().filter(|ks| ks.len() > 1).collect();
    pairs.sort();
    for ks in pairs {
        if ks.iter().any(|&k| net.edges[k].is_compressor()) {
            let ids: Vec<_> = ks.iter().map(|&k| net.edges[k].id.as_str()).collect();
            v.push(format!("compressor runs parallel to another edge: {}", ids.join(", ")));
        }
    }
    Diagnostics { topology, violations: v }
}

/// The unique cycle of a one-cycle network in traversal order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleInfo {
    /// `v_1 … v_n` as node indices.
    pub nodes: Vec<usize>,
    /// `e_i` joins `nodes[i]` and `nodes[(i + 1) % n]`.
    pub edges: Vec<usize>,
    /// Whether `e_i` is oriented from `nodes[i]` to `nodes[i + 1]`.
    pub forward: Vec<bool>,
}

impl CycleInfo {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node_ids<'a>(&self, net: &'a Network) -> Vec<&'a str> {
        self.nodes.iter().map(|&v| net.nodes[v].id.as_str()).collect()
    }

    pub fn edge_ids<'a>(&self, net: &'a Network) -> Vec<&'a str> {
        self.edges.iter().map(|&e| net.edges[e].id.as_str()).collect()
    }
}

/// Finds the cycle; `None` for trees.
///
/// The traversal starts at the lexicographically smallest node id on the
/// cycle and continues towards its smaller-id cycle neighbour.
pub fn find_cycle(net: &Network) -> Result<Option<CycleInfo>> {
    let rank = net.cycle_rank();
    if rank > 1 {
        return Err(Error::MultipleCycles(rank as usize));
    }
    if rank < 1 || net.nodes.is_empty() {
        return Ok(None);
    }
    // BFS spanning tree; the first edge closing a loop is the chord.
    let n = net.nodes.len();
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut tree_edge = vec![false; net.edges.len()];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for &e in &net.incident[v] {
            let w = net.opposite(e, v);
            if !seen[w] {
                seen[w] = true;
                tree_edge[e] = true;
                parent[w] = Some((v, e));
                queue.push_back(w);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Validation(vec!["network is not connected".into()]));
    }
    let Some(chord) = (0..net.edges.len()).find(|&e| !tree_edge[e]) else {
        return Ok(None);
    };
    let (a, b) = net.ends(chord);
    let path_to_root = |mut v: usize| {
        let mut path = vec![v];
        while let Some((p, _)) = parent[v] {
            path.push(p);
            v = p;
        }
        path
    };
    let pa = path_to_root(a);
    let pb = path_to_root(b);
    let on_pb: BTreeSet<usize> = pb.iter().copied().collect();
    let meet = *pa.iter().find(|v| on_pb.contains(v)).expect("common ancestor");
    let mut cyc_nodes: Vec<usize> = pa.iter().copied().take_while(|&v| v != meet).collect();
    cyc_nodes.push(meet);
    let tail: Vec<usize> = pb.iter().copied().take_while(|&v| v != meet).collect();
    cyc_nodes.extend(tail.into_iter().rev());
    // cyc_nodes walks a → meet → b along tree edges; the chord closes b → a.
    let m = cyc_nodes.len();
    let mut cyc_edges = Vec::with_capacity(m);
    for i in 0..m {
        let (u, w) = (cyc_nodes[i], cyc_nodes[(i + 1) % m]);
        let e = if i + 1 == m {
            chord
        } else if parent[u].map(|(p, _)| p) == Some(w) {
            parent[u].unwrap().1
        } else {
            parent[w].unwrap().1
        };
        cyc_edges.push(e);
    }

    // Canonical start and direction.
    let start = (0..m).min_by(|&i, &j| net.nodes[cyc_nodes[i]].id.cmp(&net.nodes[cyc_nodes[j]].id)).unwrap();
    let next = cyc_nodes[(start + 1) % m];
    let prev = cyc_nodes[(start + m - 1) % m];
    let forward_dir = if m == 2 {
        // Two parallel edges: traverse the smaller edge id first.
        net.edges[cyc_edges[start]].id <= net.edges[cyc_edges[(start + 1) % m]].id
    } else {
        net.nodes[next].id <= net.nodes[prev].id
    };
    let (nodes, edges): (Vec<usize>, Vec<usize>) = if forward_dir {
        ((0..m).map(|i| cyc_nodes[(start + i) % m]).collect(), (0..m).map(|i| cyc_edges[(start + i) % m]).collect())
    } else {
        (
            (0..m).map(|i| cyc_nodes[(start + m - i) % m]).collect(),
            (0..m).map(|i| cyc_edges[(start + m - 1 - i) % m]).collect(),
        )
    };
    let forward = (0..m).map(|i| net.ends(edges[i]).0 == nodes[i]).collect();
    Ok(Some(CycleInfo { nodes, edges, forward }))
}

/// Tree obtained by removing the cut edge and attaching two boundary nodes.
#[derive(Debug, Clone)]
pub struct CutNetwork {
    pub net: Network,
    /// Demand node at the foot side, load `λ`.
    pub v_l: usize,
    /// Supply node at the head side, load `−λ`, composition `μ`.
    pub v_r: usize,
    /// `(f(e_c), v_l)`; carries the cut edge's own hydraulics.
    pub e_l: usize,
    /// `(v_r, h(e_c))`, friction free.
    pub e_r: usize,
    /// The removed edge as it appears in the original network.
    pub cut_edge: Edge,
}

impl CutNetwork {
    /// Sets `b_{v_l} = λ`, `b_{v_r} = −λ` and `ζ_{v_r} = μ`.
    pub fn set_parameters(&mut self, lambda: f64, mu: MassFraction) {
        let nodes = self.net.nodes_mut();
        nodes[self.v_l].load = lambda;
        nodes[self.v_r].load = -lambda;
        nodes[self.v_r].zeta = Some(mu);
    }
}

fn fresh_id(taken: impl Fn(&str) -> bool, base: String) -> String {
    let mut id = base.clone();
    let mut k = 1;
    while taken(&id) {
        id = format!("{base}{k}");
        k += 1;
    }
    id
}

/// Removes `cut_edge` and reconnects both ends to new boundary nodes.
pub fn cut_network(net: &Network, cut_edge: &str) -> Result<CutNetwork> {
    let k = net.edge_idx(cut_edge)?;
    let cycle = find_cycle(net)?.ok_or_else(|| Error::NotACycleEdge(cut_edge.to_string()))?;
    if !cycle.edges.contains(&k) {
        return Err(Error::NotACycleEdge(cut_edge.to_string()));
    }
    let original = net.edges[k].clone();
    if original.is_compressor() {
        return Err(Error::CutThroughCompressor(original.id));
    }
    let l_id = fresh_id(|s| net.node_index.contains_key(s), format!("{cut_edge}:l"));
    let r_id = fresh_id(|s| net.node_index.contains_key(s), format!("{cut_edge}:r"));
    let el_id = fresh_id(|s| net.edge_index.contains_key(s), format!("{cut_edge}:el"));
    let er_id = fresh_id(|s| net.edge_index.contains_key(s), format!("{cut_edge}:er"));
    let mut nodes = net.nodes.clone();
    nodes.push(Node::demand(l_id.clone(), 0.0));
    nodes.push(Node::supply(r_id.clone(), 0.0, MassFraction::ZERO));
    let mut edges: Vec<Edge> = net.edges.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, e)| e.clone()).collect();
    edges.push(Edge::new(el_id, original.from.clone(), l_id, original.kind));
    edges.push(Edge::new(er_id, r_id, original.to.clone(), EdgeKind::Valve));
    let tree = Network::new(nodes, edges)?;
    let (n, m) = (tree.nodes.len(), tree.edges.len());
    Ok(CutNetwork { net: tree, v_l: n - 2, v_r: n - 1, e_l: m - 2, e_r: m - 1, cut_edge: original })
}

/// Swaps foot and head of a pipe or valve.
pub fn flip_edge(net: &Network, edge_id: &str) -> Result<Network> {
    let k = net.edge_idx(edge_id)?;
    if net.edges[k].is_compressor() {
        return Err(Error::CannotFlipCompressor(edge_id.to_string()));
    }
    let mut edges = net.edges.clone();
    let e = &mut edges[k];
    std::mem::swap(&mut e.from, &mut e.to);
    Network::new(net.nodes.clone(), edges)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::eos::MomentumMode;

    pub(crate) fn pipe() -> EdgeKind {
        EdgeKind::Pipe(PipeParams::new(1e4, 0.5, 0.05, MomentumMode::Full).unwrap())
    }

    pub(crate) fn triangle() -> Network {
        Network::new(
            vec![
                Node::supply("v1", -3.0, MassFraction::ZERO).with_pressure(60e5),
                Node::demand("v2", 1.0),
                Node::demand("v3", 2.0),
            ],
            vec![Edge::new("a", "v1", "v2", pipe()), Edge::new("b", "v2", "v3", pipe()), Edge::new("c", "v3", "v1", pipe())],
        )
        .unwrap()
    }

    fn path() -> Network {
        Network::new(
            vec![
                Node::supply("v1", -5.0, MassFraction::ZERO).with_pressure(60e5),
                Node::demand("v2", 2.0),
                Node::demand("v3", 3.0),
            ],
            vec![Edge::new("a", "v1", "v2", pipe()), Edge::new("b", "v2", "v3", pipe())],
        )
        .unwrap()
    }

    #[test]
    fn incidence_columns_sum_to_zero() {
        let net = triangle();
        for e in 0..net.edges().len() {
            let s: i32 = (0..net.nodes().len()).map(|v| net.incidence(v, e) as i32).sum();
            assert_eq!(s, 0);
            let (f, h) = net.ends(e);
            assert_eq!(net.incidence(f, e), -1);
            assert_eq!(net.incidence(h, e), 1);
        }
    }

    #[test]
    fn validate_classifies() {
        assert_eq!(validate(&path()).into_result().unwrap(), Topology::Tree);
        assert_eq!(validate(&triangle()).into_result().unwrap(), Topology::OneCycle);
    }

    #[test]
    fn validate_reports_violations() {
        let mut nodes = triangle().nodes().to_vec();
        nodes[1].load += 1e-3;
        let mut edges = triangle().edges().to_vec();
        edges.push(Edge::new("d", "v1", "v3", pipe()));
        let net = Network::new(nodes, edges).unwrap();
        let d = validate(&net);
        assert!(d.violations.iter().any(|s| s.contains("unbalanced")), "{:?}", d.violations);
        assert!(d.violations.iter().any(|s| s.contains("cycle count")), "{:?}", d.violations);
        assert!(matches!(find_cycle(&net), Err(Error::MultipleCycles(2))));

        let mut nodes = path().nodes().to_vec();
        nodes[0].zeta = None;
        assert!(!validate(&Network::new(nodes, path().edges().to_vec()).unwrap()).is_valid());
    }

    #[test]
    fn compressor_on_cycle_is_rejected() {
        let mut edges = triangle().edges().to_vec();
        edges[1].kind = EdgeKind::Compressor { gamma: 1.1 };
        let d = validate(&Network::new(triangle().nodes().to_vec(), edges).unwrap());
        assert!(d.violations.iter().any(|s| s.contains("on the cycle")));
    }

    #[test]
    fn cycle_traversal_is_canonical() {
        assert!(find_cycle(&path()).unwrap().is_none());
        let net = triangle();
        let c = find_cycle(&net).unwrap().unwrap();
        assert_eq!(c.node_ids(&net), ["v1", "v2", "v3"]);
        assert_eq!(c.edge_ids(&net), ["a", "b", "c"]);
        assert_eq!(c.forward, [true, true, true]);
        // Same cycle written in a different order and orientation.
        let rev = Network::new(
            net.nodes().iter().rev().cloned().collect(),
            vec![Edge::new("c", "v1", "v3", pipe()), Edge::new("b", "v3", "v2", pipe()), Edge::new("a", "v2", "v1", pipe())],
        )
        .unwrap();
        let c = find_cycle(&rev).unwrap().unwrap();
        assert_eq!(c.node_ids(&rev), ["v1", "v2", "v3"]);
        assert_eq!(c.edge_ids(&rev), ["a", "b", "c"]);
        assert_eq!(c.forward, [false, false, false]);
    }

    #[test]
    fn cut_triangle_gives_path() {
        let net = triangle();
        let cut = cut_network(&net, "b").unwrap();
        assert_eq!(cut.net.nodes().len(), 5);
        assert_eq!(cut.net.edges().len(), 4);
        assert_eq!(validate(&cut.net).into_result().unwrap(), Topology::Tree);
        assert_eq!(cut.net.ends(cut.e_l), (net.node_idx("v2").unwrap(), cut.v_l));
        assert_eq!(cut.net.ends(cut.e_r), (cut.v_r, net.node_idx("v3").unwrap()));
        assert!(matches!(cut_network(&path(), "a"), Err(Error::NotACycleEdge(_))));
    }

    #[test]
    fn flip_is_an_involution() {
        let net = triangle();
        let twice = flip_edge(&flip_edge(&net, "b").unwrap(), "b").unwrap();
        assert_eq!(twice, net);
        let mut edges = path().edges().to_vec();
        edges[0].kind = EdgeKind::Compressor { gamma: 1.2 };
        let net = Network::new(path().nodes().to_vec(), edges).unwrap();
        assert!(matches!(flip_edge(&net, "a"), Err(Error::CannotFlipCompressor(_))));
    }
}
