//! Steady states: tree and single-cycle solves, mixed boundary conditions,
//! and the residual checks applied to every result.

pub mod cycle;
pub mod mixed;
pub mod tree;

use serde::Serialize;

use crate::eos::{CompressibilityModel, MomentumMode, PotentialPoint};
use crate::error::{Error, Result};
use crate::gasprops::MassFraction;
use crate::network::{validate, EdgeKind, Network, Topology};
use crate::pipeflow::{friction_rhs, EdgeState};

pub use cycle::{
    modified_loads, mu_eta, prepare_cut, select_cut_edge, wrapped_partial_sums, CutDecomposition, CutSetup,
};
pub use mixed::{solve_mixed_bc, MixedReport};
pub use tree::{propagate_composition, propagate_pressure, solve_tree_flows};

#[derive(Debug, Clone, Default, Serialize)]
pub struct Residuals {
    /// `max_v |(A q)_v − b_v|`.
    pub mass_balance: f64,
    /// Largest deviation of a node composition from the mixing rule.
    pub mixing: f64,
    /// Largest `|ΔF − S L| / max(|F_f|, |F_h|, 1)` over pipes.
    pub pipe_relative: f64,
    /// Largest `|ΔF − S L|` over pipes, Pa².
    pub pipe_absolute: f64,
    /// Largest `|p_h − γ p_f| / p_h` over compressors.
    pub compressor: f64,
    /// Smallest compressor flow (0 when there are none).
    pub compressor_min_flow: f64,
    pub cut_pressure: Option<f64>,
    pub cut_composition: Option<f64>,
    pub subsonic_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SteadyState {
    /// Per edge, kg/(m² s), in the orientation of the network.
    pub q: Vec<f64>,
    pub eta_edge: Vec<MassFraction>,
    /// Per node, Pa.
    pub p: Vec<f64>,
    pub eta_node: Vec<MassFraction>,
    /// Loads actually used, including the supply loads found in mixed mode.
    pub loads: Vec<f64>,
    pub residuals: Residuals,
    pub cut: Option<CutDecomposition>,
    pub outer_iterations: Option<usize>,
}

/// Mixing-rule defect at every node.
pub fn mixing_defects(net: &Network, q: &[f64], eta_node: &[MassFraction], eta_edge: &[MassFraction]) -> Vec<f64> {
    (0..net.nodes().len())
        .map(|v| {
            let node = net.node(v);
            let supplied = (-node.load).max(0.0);
            let mut num = node.zeta.map(MassFraction::get).unwrap_or(0.0) * supplied;
            let mut den = supplied;
            for &e in net.incident(v) {
                let inflow = (net.incidence(v, e) as f64 * q[e]).max(0.0);
                if inflow > 0.0 {
                    num += eta_edge[e].get() * inflow;
                    den += inflow;
                }
            }
            if den > 0.0 {
                (eta_node[v].get() - num / den).abs()
            } else {
                0.0
            }
        })
        .collect()
}

/// Evaluates the full steady-state equations at a candidate solution.
pub fn residuals(
    net: &Network,
    model: &CompressibilityModel,
    loads: &[f64],
    q: &[f64],
    p: &[f64],
    eta_node: &[MassFraction],
    eta_edge: &[MassFraction],
) -> Result<Residuals> {
    let mut r = Residuals { subsonic_ok: true, compressor_min_flow: f64::INFINITY, ..Default::default() };
    let net = net.with_loads(loads);
    for (v, &b) in loads.iter().enumerate() {
        let aq: f64 = net.incident(v).iter().map(|&e| net.incidence(v, e) as f64 * q[e]).sum();
        r.mass_balance = r.mass_balance.max((aq - b).abs());
    }
    r.mixing = mixing_defects(&net, q, eta_node, eta_edge).into_iter().fold(0.0, f64::max);
    for (e, edge) in net.edges().iter().enumerate() {
        let (f, h) = net.ends(e);
        // Edge composition must come from the upstream node.
        let up = if q[e] >= 0.0 { f } else { h };
        r.mixing = r.mixing.max((eta_edge[e].get() - eta_node[up].get()).abs());
        match edge.kind {
            EdgeKind::Pipe(pipe) => {
                let pt = |pp: f64| PotentialPoint::new(eta_edge[e], q[e], pp);
                let ff = model.potential(pt(p[f]), pipe.mode).map_err(|err| err.on_edge(&edge.id))?;
                let fh = model.potential(pt(p[h]), pipe.mode).map_err(|err| err.on_edge(&edge.id))?;
                let s = friction_rhs(model.pair(), &pipe, EdgeState::new(q[e], eta_edge[e])) * pipe.length;
                let abs = (fh - ff - s).abs();
                r.pipe_absolute = r.pipe_absolute.max(abs);
                r.pipe_relative = r.pipe_relative.max(abs / ff.abs().max(fh.abs()).max(1.0));
                if pipe.mode == MomentumMode::Full && q[e] != 0.0 && !(model.is_subsonic(pt(p[f])) && model.is_subsonic(pt(p[h]))) {
                    r.subsonic_ok = false;
                }
            }
            EdgeKind::Compressor { gamma } => {
                r.compressor = r.compressor.max((p[h] - gamma * p[f]).abs() / p[h]);
                r.compressor_min_flow = r.compressor_min_flow.min(q[e]);
            }
            EdgeKind::Valve => {
                r.pipe_absolute = r.pipe_absolute.max((p[h] - p[f]).abs());
            }
        }
    }
    if !r.compressor_min_flow.is_finite() {
        r.compressor_min_flow = 0.0;
    }
    Ok(r)
}

fn reference_of(net: &Network) -> Result<(usize, f64)> {
    let mut refs = net.nodes().iter().enumerate().filter_map(|(i, n)| n.pressure.map(|p| (i, p)));
    match (refs.next(), refs.next()) {
        (Some(r), None) => Ok(r),
        _ => Err(Error::Validation(vec![format!(
            "expected exactly one reference pressure, found {}",
            net.pressure_count()
        )])),
    }
}

/// Solves a tree with one reference pressure.
pub fn solve_tree(net: &Network, model: &CompressibilityModel) -> Result<SteadyState> {
    let reference = reference_of(net)?;
    let q = solve_tree_flows(net)?;
    let (eta_node, eta_edge) = propagate_composition(net, &q)?;
    let p = propagate_pressure(net, &q, &eta_edge, model, reference)?;
    let loads = net.loads();
    let residuals = residuals(net, model, &loads, &q, &p, &eta_node, &eta_edge)?;
    Ok(SteadyState { q, eta_edge, p, eta_node, loads, residuals, cut: None, outer_iterations: None })
}

/// Solves a single-cycle network with one reference pressure.
pub fn solve_cycle(net: &Network, model: &CompressibilityModel) -> Result<SteadyState> {
    let reference = reference_of(net)?;
    let mut setup = prepare_cut(net)?.ok_or_else(|| Error::InvalidInput("network has no cycle".into()))?;
    let (ev, iterations, scan) = cycle::solve_cut(&mut setup, model, reference)?;
    let cut = &setup.cut;
    let m = net.edges().len();
    let n = net.nodes().len();
    let cut_idx = setup.choice.edge;
    // Edges of the cut network keep the original order with the cut edge
    // removed, then e_l and e_r.
    let mut q = vec![0.0; m];
    let mut eta_edge = vec![MassFraction::ZERO; m];
    let mut j = 0;
    for k in 0..m {
        if k == cut_idx {
            let sign = if setup.choice.flip { -1.0 } else { 1.0 };
            q[k] = sign * ev.q[cut.e_l];
            eta_edge[k] = ev.eta_edge[cut.e_l];
        } else {
            q[k] = ev.q[j];
            eta_edge[k] = ev.eta_edge[j];
            j += 1;
        }
    }
    let p = ev.p[..n].to_vec();
    let eta_node = ev.eta_node[..n].to_vec();
    let loads = net.loads();
    let mut res = residuals(net, model, &loads, &q, &p, &eta_node, &eta_edge)?;
    res.cut_pressure = Some(ev.gap.abs());
    res.cut_composition = Some((ev.eta_node[cut.v_r].get() - ev.eta_node[cut.v_l].get()).abs());
    let decomposition = CutDecomposition {
        cut_edge: net.edge(cut_idx).id.clone(),
        flipped: setup.choice.flip,
        k_star: setup.choice.k_star,
        cycle_nodes: setup.renumbered.node_ids(net).into_iter().map(String::from).collect(),
        cycle_edges: setup.renumbered.edge_ids(net).into_iter().map(String::from).collect(),
        modified_loads: setup.modified_loads.clone(),
        beta: setup.beta.clone(),
        interval: setup.interval,
        lambda: ev.lambda,
        mu: ev.mu.get(),
        iterations,
        scan,
    };
    Ok(SteadyState { q, eta_edge, p, eta_node, loads, residuals: res, cut: Some(decomposition), outer_iterations: None })
}

/// Validates and dispatches on topology and boundary mode.
pub fn solve(net: &Network, model: &CompressibilityModel) -> Result<SteadyState> {
    let topology = validate(net).into_result()?;
    if net.is_mixed_bc() {
        return solve_mixed_bc(net, model).map(|(state, _)| state);
    }
    solve_single_reference(net, model, topology)
}

pub(crate) fn solve_single_reference(net: &Network, model: &CompressibilityModel, topology: Topology) -> Result<SteadyState> {
    match topology {
        Topology::Tree => solve_tree(net, model),
        Topology::OneCycle => solve_cycle(net, model),
        Topology::Invalid => Err(Error::Validation(validate(net).violations)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eos::MomentumMode;
    use crate::gasprops::GasPair;
    use crate::network::{flip_edge, Edge, Node};
    use crate::pipeflow::PipeParams;

    fn pipe(len: f64) -> EdgeKind {
        EdgeKind::Pipe(PipeParams::new(len, 0.5, 0.05, MomentumMode::Full).unwrap())
    }

    fn mf(x: f64) -> MassFraction {
        MassFraction::new(x).unwrap()
    }

    fn ring() -> Network {
        Network::new(
            vec![
                Node::supply("a", -150.0, mf(0.1)).with_pressure(60e5),
                Node::supply("b", -50.0, mf(0.8)),
                Node::demand("c", 120.0),
                Node::demand("d", 80.0),
            ],
            vec![
                Edge::new("ab", "a", "b", pipe(8e3)),
                Edge::new("bc", "b", "c", pipe(1.2e4)),
                Edge::new("cd", "c", "d", pipe(6e3)),
                Edge::new("da", "d", "a", pipe(1e4)),
            ],
        )
        .unwrap()
    }

    fn check(state: &SteadyState) {
        let r = &state.residuals;
        assert!(r.mass_balance <= 1e-9, "{r:?}");
        assert!(r.mixing <= 1e-9, "{r:?}");
        assert!(r.pipe_relative <= 1e-8, "{r:?}");
        assert!(r.subsonic_ok);
        if let Some(dp) = r.cut_pressure {
            assert!(dp <= 1e-3, "{r:?}");
            assert!(r.cut_composition.unwrap() <= 1e-9, "{r:?}");
        }
    }

    #[test]
    fn ring_solves_with_small_residuals() {
        for model in [
            CompressibilityModel::constant(GasPair::h2_ng_reference(), 1.0).unwrap(),
            CompressibilityModel::linear(GasPair::h2_ng_reference()).unwrap(),
            CompressibilityModel::papay(GasPair::h2_ng_reference()).unwrap(),
        ] {
            let state = solve(&ring(), &model).unwrap();
            check(&state);
            assert!(state.cut.as_ref().unwrap().interval.0 == 0.0);
        }
    }

    #[test]
    fn flipping_a_cycle_edge_is_equivalent() {
        let model = CompressibilityModel::papay(GasPair::h2_ng_reference()).unwrap();
        let base = solve(&ring(), &model).unwrap();
        for id in ["ab", "bc", "cd", "da"] {
            let flipped = flip_edge(&ring(), id).unwrap();
            let other = solve(&flipped, &model).unwrap();
            check(&other);
            let k = ring().edge_idx(id).unwrap();
            for e in 0..4 {
                let sign = if e == k { -1.0 } else { 1.0 };
                assert!((base.q[e] - sign * other.q[e]).abs() < 1e-6, "{id}: {:?} {:?}", base.q, other.q);
            }
            for v in 0..4 {
                assert!((base.p[v] - other.p[v]).abs() < 1e-2);
            }
        }
    }

    #[test]
    fn parallel_pipes_split_evenly() {
        let net = Network::new(
            vec![Node::supply("s", -100.0, mf(0.2)).with_pressure(60e5), Node::demand("d", 100.0)],
            vec![Edge::new("p1", "s", "d", pipe(1e4)), Edge::new("p2", "s", "d", pipe(1e4))],
        )
        .unwrap();
        let model = CompressibilityModel::linear(GasPair::h2_ng_reference()).unwrap();
        let state = solve(&net, &model).unwrap();
        check(&state);
        assert!((state.q[0] - state.q[1]).abs() < 1e-6, "{:?}", state.q);
        assert!((state.q[0] - 50.0).abs() < 1e-6);
    }

    #[test]
    fn deterministic() {
        let model = CompressibilityModel::linear(GasPair::h2_ng_reference()).unwrap();
        let a = solve(&ring(), &model).unwrap();
        let b = solve(&ring(), &model).unwrap();
        assert_eq!(a.p, b.p);
        assert_eq!(a.q, b.q);
    }
}
