//! Single-cycle networks: cut-edge selection, the admissible interval for the
//! cut flow, the composition fixed point and bisection on the pressure gap.

use serde::Serialize;

use crate::eos::CompressibilityModel;
use crate::error::{Error, Result};
use crate::gasprops::MassFraction;
use crate::network::{cut_network, find_cycle, flip_edge, CutNetwork, CycleInfo, Network};

use super::tree::{propagate_composition, propagate_pressure, solve_tree_flows};

/// Target for `|p_{v_r} − p_{v_l}|`, Pa.
pub const CUT_PRESSURE_TOL: f64 = 1e-3;
/// Relative width at which bisection stops.
pub const CUT_WIDTH_TOL: f64 = 1e-10;
/// Uniform points evaluated before bisection.
pub const SCAN_POINTS: usize = 17;
const BISECTION_CAP: usize = 200;

/// Start index `k*` (1-based) whose wrapped partial sums are all
/// non-negative: `k* = (m mod n) + 1` with `m` the last minimiser of the
/// prefix sums.
pub fn wrapped_partial_sums(y: &[f64]) -> Result<usize> {
    let n = y.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty sequence".into()));
    }
    let total: f64 = y.iter().sum();
    let scale: f64 = y.iter().map(|v| v.abs()).sum();
    if total.abs() > 1e-9 * scale.max(1.0) {
        return Err(Error::NotZeroSum(total));
    }
    let mut prefix = Vec::with_capacity(n);
    let mut s = 0.0;
    for &v in y {
        s += v;
        prefix.push(s);
    }
    let min = prefix.iter().copied().fold(f64::INFINITY, f64::min);
    let tie = 1e-12 * scale;
    // 1-based index of the last prefix sum at the minimum.
    let m = prefix.iter().rposition(|&v| v <= min + tie).expect("non-empty") + 1;
    Ok(m % n + 1)
}

/// Wrapped partial sums `T_i(k)`, `i = 1..n`, for a 1-based start `k`.
pub fn wrapped_sums_from(y: &[f64], k: usize) -> Vec<f64> {
    let n = y.len();
    let mut s = 0.0;
    (0..n)
        .map(|i| {
            s += y[(k - 1 + i) % n];
            s
        })
        .collect()
}

/// Load of each cycle node plus all loads in the tree hanging off it.
pub fn modified_loads(net: &Network, cycle: &CycleInfo) -> Vec<f64> {
    let n = net.nodes().len();
    let mut owner = vec![usize::MAX; n];
    let on_cycle_edge = |e: usize| cycle.edges.contains(&e);
    for (i, &start) in cycle.nodes.iter().enumerate() {
        owner[start] = i;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &e in net.incident(v) {
                if on_cycle_edge(e) {
                    continue;
                }
                let w = net.opposite(e, v);
                if owner[w] == usize::MAX {
                    owner[w] = i;
                    stack.push(w);
                }
            }
        }
    }
    let mut bp = vec![0.0; cycle.len()];
    for v in 0..n {
        bp[owner[v]] += net.node(v).load;
    }
    bp
}

/// Result of choosing the cut edge.
#[derive(Debug, Clone, PartialEq)]
pub struct CutChoice {
    /// Index of the cut edge in the original network.
    pub edge: usize,
    /// The edge must be reversed so that it runs from `v_{k*−1}` to `v_{k*}`.
    pub flip: bool,
    /// 1-based start index.
    pub k_star: usize,
}

/// Picks the cycle edge between `v_{k*−1}` and `v_{k*}`.
pub fn select_cut_edge(net: &Network, cycle: &CycleInfo, bp: &[f64]) -> Result<CutChoice> {
    let n = cycle.len();
    let k_star = wrapped_partial_sums(bp)?;
    let slot = (k_star + n - 2) % n;
    let edge = cycle.edges[slot];
    if net.edge(edge).is_compressor() {
        return Err(Error::CutThroughCompressor(net.edge(edge).id.clone()));
    }
    // e_slot joins nodes[slot] = v_{k*−1} and nodes[slot + 1] = v_{k*}.
    let flip = !cycle.forward[slot];
    Ok(CutChoice { edge, flip, k_star })
}

/// `(λ, g(λ))` on the pre-scan grid, `None` where the evaluation failed.
pub type ScanPoint = (f64, Option<f64>);

#[derive(Debug, Clone, Serialize)]
pub struct CutDecomposition {
    pub cut_edge: String,
    pub flipped: bool,
    pub k_star: usize,
    /// Cycle nodes renumbered so that `v_1` is the head of the cut edge.
    pub cycle_nodes: Vec<String>,
    /// `e_1 … e_n`; the last one is the cut edge.
    pub cycle_edges: Vec<String>,
    pub modified_loads: Vec<f64>,
    /// `β_{e_i}`; the cut edge carries 0.
    pub beta: Vec<f64>,
    pub interval: (f64, f64),
    pub lambda: f64,
    pub mu: f64,
    pub iterations: usize,
    /// `g` on the pre-scan grid, `(λ, g)`.
    pub scan: Vec<ScanPoint>,
}

/// The cut problem in post-cut numbering.
#[derive(Debug, Clone)]
pub struct CutSetup {
    /// Network with the cut edge oriented `v_n → v_1`.
    pub oriented: Network,
    pub cut: CutNetwork,
    pub choice: CutChoice,
    pub renumbered: CycleInfo,
    pub modified_loads: Vec<f64>,
    pub beta: Vec<f64>,
    pub interval: (f64, f64),
}

/// Cycle analysis shared by the solver and the `cut-info` report.
pub fn prepare_cut(net: &Network) -> Result<Option<CutSetup>> {
    let Some(cycle) = find_cycle(net)? else {
        return Ok(None);
    };
    let bp_orig = modified_loads(net, &cycle);
    let choice = select_cut_edge(net, &cycle, &bp_orig)?;
    let oriented = if choice.flip { flip_edge(net, &net.edge(choice.edge).id)? } else { net.clone() };
    let n = cycle.len();
    let shift = choice.k_star - 1;
    let nodes: Vec<usize> = (0..n).map(|i| cycle.nodes[(shift + i) % n]).collect();
    let edges: Vec<usize> = (0..n).map(|i| cycle.edges[(shift + i) % n]).collect();
    let forward = (0..n).map(|i| oriented.ends(edges[i]).0 == nodes[i]).collect();
    let renumbered = CycleInfo { nodes, edges, forward };
    let bp: Vec<f64> = (0..n).map(|i| bp_orig[(shift + i) % n]).collect();
    let mut beta = wrapped_sums_from(&bp_orig, choice.k_star);
    beta[n - 1] = 0.0;
    let hi = beta.iter().copied().fold(0.0, f64::max);
    let lo = beta.iter().copied().fold(0.0, f64::min);
    let cut = cut_network(&oriented, &net.edge(choice.edge).id)?;
    Ok(Some(CutSetup { oriented, cut, choice, renumbered, modified_loads: bp, beta, interval: (lo, hi) }))
}

/// Flows, compositions and pressures on the cut network for one `λ`.
#[derive(Debug, Clone)]
pub struct CutEvaluation {
    pub lambda: f64,
    pub mu: MassFraction,
    pub q: Vec<f64>,
    pub eta_node: Vec<MassFraction>,
    pub eta_edge: Vec<MassFraction>,
    pub p: Vec<f64>,
    /// `p_{v_r} − p_{v_l}`.
    pub gap: f64,
}

/// `μ_η(λ)`: the composition at `v_r` that reproduces itself at `v_l`.
///
/// Node compositions are affine in `μ` for fixed flows, so two evaluations
/// determine the fixed point.
pub fn mu_eta(cut: &mut CutNetwork, lambda: f64) -> Result<(MassFraction, Vec<f64>)> {
    cut.set_parameters(lambda, MassFraction::ZERO);
    let q = solve_tree_flows(&cut.net)?;
    let c0 = propagate_composition(&cut.net, &q)?.0[cut.v_l].get();
    cut.set_parameters(lambda, MassFraction::ONE);
    let c1 = propagate_composition(&cut.net, &q)?.0[cut.v_l].get();
    let slope = c1 - c0;
    let mu = if (1.0 - slope).abs() > 1e-12 { c0 / (1.0 - slope) } else { c0 };
    Ok((MassFraction::clamped(mu), q))
}

pub fn evaluate_cut(cut: &mut CutNetwork, model: &CompressibilityModel, reference: (usize, f64), lambda: f64) -> Result<CutEvaluation> {
    let (mu, q) = mu_eta(cut, lambda)?;
    cut.set_parameters(lambda, mu);
    let (eta_node, eta_edge) = propagate_composition(&cut.net, &q)?;
    let p = propagate_pressure(&cut.net, &q, &eta_edge, model, reference)?;
    let gap = p[cut.v_r] - p[cut.v_l];
    Ok(CutEvaluation { lambda, mu, q, eta_node, eta_edge, p, gap })
}

/// Root of the cut pressure gap over the admissible interval.
pub fn solve_cut(setup: &mut CutSetup, model: &CompressibilityModel, reference: (usize, f64)) -> Result<(CutEvaluation, usize, Vec<ScanPoint>)> {
    let (lo, hi) = setup.interval;
    let cut = &mut setup.cut;
    if hi <= lo {
        let ev = evaluate_cut(cut, model, reference, lo)?;
        return Ok((ev, 0, vec![(lo, None)]));
    }
    let mut scan = Vec::with_capacity(SCAN_POINTS);
    let mut evals: Vec<CutEvaluation> = Vec::new();
    let mut first_err = None;
    for i in 0..SCAN_POINTS {
        let lambda = if i + 1 == SCAN_POINTS { hi } else { lo + (hi - lo) * i as f64 / (SCAN_POINTS - 1) as f64 };
        match evaluate_cut(cut, model, reference, lambda) {
            Ok(ev) => {
                scan.push((lambda, Some(ev.gap)));
                evals.push(ev);
            }
            Err(e) => {
                scan.push((lambda, None));
                first_err.get_or_insert(e);
            }
        }
    }
    if evals.is_empty() {
        return Err(first_err.expect("at least one failure"));
    }
    if let Some(ev) = evals.iter().find(|ev| ev.gap.abs() <= CUT_PRESSURE_TOL) {
        return Ok((ev.clone(), 0, scan));
    }
    let bracket = evals.windows(2).find(|w| w[0].gap.signum() != w[1].gap.signum());
    let Some([left, right]) = bracket else {
        let (a, b) = (evals.first().unwrap(), evals.last().unwrap());
        return Err(Error::SignConditionFailed { lo: a.lambda, hi: b.lambda, g_lo: a.gap, g_hi: b.gap });
    };
    let (mut a, mut b) = (left.clone(), right.clone());
    let width_tol = CUT_WIDTH_TOL * hi.abs().max(1.0);
    let mut iterations = 0;
    while iterations < BISECTION_CAP {
        iterations += 1;
        let mid = evaluate_cut(cut, model, reference, 0.5 * (a.lambda + b.lambda))?;
        if mid.gap.abs() <= CUT_PRESSURE_TOL || (b.lambda - a.lambda) <= width_tol {
            return Ok((mid, iterations, scan));
        }
        if mid.gap.signum() == a.gap.signum() {
            a = mid;
        } else {
            b = mid;
        }
    }
    let best = if a.gap.abs() < b.gap.abs() { a } else { b };
    Ok((best, iterations, scan))
}
