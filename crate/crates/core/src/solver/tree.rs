//! Flow, composition and pressure on tree-shaped networks.

use std::collections::VecDeque;

use crate::eos::CompressibilityModel;
use crate::error::{Error, Result};
use crate::gasprops::MassFraction;
use crate::network::{balance_tolerance, EdgeKind, Network};
use crate::pipeflow::{compressor_in, compressor_out, downstream_pressure, upstream_pressure, EdgeState};

/// Flows below this magnitude on a compressor count as backflow-free.
pub const COMPRESSOR_BACKFLOW_TOL: f64 = 1e-12;

/// Unique flows with `A q = b` on a tree, by repeated leaf elimination.
pub fn solve_tree_flows(net: &Network) -> Result<Vec<f64>> {
    let loads = net.loads();
    let sum: f64 = loads.iter().sum();
    if sum.abs() > balance_tolerance(&loads) {
        return Err(Error::Unbalanced(sum));
    }
    if net.cycle_rank() != 0 {
        return Err(Error::InvalidInput("flow elimination needs a tree".into()));
    }
    let n = net.nodes().len();
    let mut residual = loads;
    let mut open_degree: Vec<usize> = (0..n).map(|v| net.incident(v).len()).collect();
    let mut assigned = vec![false; net.edges().len()];
    let mut q = vec![0.0; net.edges().len()];
    let mut leaves: VecDeque<usize> = (0..n).filter(|&v| open_degree[v] == 1).collect();
    while let Some(v) = leaves.pop_front() {
        if open_degree[v] != 1 {
            continue;
        }
        let e = *net.incident(v).iter().find(|&&e| !assigned[e]).expect("one open edge");
        let a = net.incidence(v, e) as f64;
        q[e] = residual[v] / a;
        assigned[e] = true;
        open_degree[v] = 0;
        let w = net.opposite(e, v);
        residual[w] -= net.incidence(w, e) as f64 * q[e];
        open_degree[w] -= 1;
        if open_degree[w] == 1 {
            leaves.push_back(w);
        }
    }
    Ok(q)
}

/// Node and edge compositions from the mixing rule, processed in flow order.
///
/// Zero-flow edges are treated as oriented foot to head and contribute
/// nothing to the mixture. A node without any throughput takes the
/// composition of the upstream end of an incoming zero-flow edge, else its
/// own supply composition, else 0.
pub fn propagate_composition(net: &Network, q: &[f64]) -> Result<(Vec<MassFraction>, Vec<MassFraction>)> {
    let n = net.nodes().len();
    let m = net.edges().len();
    // Arc direction per edge: the upstream node.
    let upstream: Vec<usize> = (0..m)
        .map(|e| {
            let (f, h) = net.ends(e);
            if q[e] >= 0.0 {
                f
            } else {
                h
            }
        })
        .collect();
    let mut indegree = vec![0usize; n];
    for e in 0..m {
        indegree[net.opposite(e, upstream[e])] += 1;
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut eta = vec![MassFraction::ZERO; n];
    let mut eta_edge = vec![MassFraction::ZERO; m];
    let mut done = 0;
    while let Some(v) = queue.pop_front() {
        done += 1;
        let node = net.node(v);
        let supplied = (-node.load).max(0.0);
        let zeta = node.zeta.map(MassFraction::get).unwrap_or(0.0);
        let mut num = zeta * supplied;
        let mut den = supplied;
        let mut idle_source = None;
        for &e in net.incident(v) {
            if upstream[e] == v {
                continue;
            }
            let inflow = (net.incidence(v, e) as f64 * q[e]).max(0.0);
            num += eta_edge[e].get() * inflow;
            den += inflow;
            if q[e] == 0.0 && idle_source.is_none() {
                idle_source = Some(eta_edge[e]);
            }
        }
        eta[v] = if den > 0.0 {
            MassFraction::clamped(num / den)
        } else {
            let feeds = net.incident(v).iter().any(|&e| upstream[e] == v && q[e] != 0.0);
            if feeds {
                return Err(Error::ZeroThroughput(node.id.clone()));
            }
            idle_source.or(node.zeta).unwrap_or(MassFraction::ZERO)
        };
        for &e in net.incident(v) {
            if upstream[e] == v {
                eta_edge[e] = eta[v];
                let w = net.opposite(e, v);
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
    }
    if done != n {
        return Err(Error::InvalidInput("flow digraph contains a directed cycle".into()));
    }
    Ok((eta, eta_edge))
}

/// Pressure at every node by breadth-first propagation from the reference.
pub fn propagate_pressure(
    net: &Network,
    q: &[f64],
    eta_edge: &[MassFraction],
    model: &CompressibilityModel,
    reference: (usize, f64),
) -> Result<Vec<f64>> {
    let n = net.nodes().len();
    let mut p = vec![f64::NAN; n];
    let mut known = vec![false; n];
    let (r, pr) = reference;
    p[r] = pr;
    known[r] = true;
    let mut queue = VecDeque::from([r]);
    while let Some(u) = queue.pop_front() {
        for &e in net.incident(u) {
            let w = net.opposite(e, u);
            if known[w] {
                continue;
            }
            let edge = net.edge(e);
            let (f, _) = net.ends(e);
            let from_foot = f == u;
            let state = EdgeState::new(q[e], eta_edge[e]);
            let pw = match edge.kind {
                EdgeKind::Pipe(pipe) => {
                    let res = if from_foot {
                        downstream_pressure(model, &pipe, state, p[u])
                    } else {
                        upstream_pressure(model, &pipe, state, p[u])
                    };
                    res.map_err(|err| err.on_edge(&edge.id))?
                }
                EdgeKind::Compressor { gamma } => {
                    if q[e] < -COMPRESSOR_BACKFLOW_TOL {
                        return Err(Error::CompressorBackflow { edge: edge.id.clone(), q: q[e] });
                    }
                    if from_foot {
                        compressor_out(gamma, p[u])
                    } else {
                        compressor_in(gamma, p[u])
                    }
                }
                EdgeKind::Valve => p[u],
            };
            p[w] = pw;
            known[w] = true;
            queue.push_back(w);
        }
    }
    if known.iter().any(|k| !k) {
        return Err(Error::Validation(vec!["network is not connected".into()]));
    }
    Ok(p)
}
