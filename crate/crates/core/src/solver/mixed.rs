//! Pressures prescribed at every supply, loads at the demands.
//!
//! The supply with the smallest id anchors the pressure level and absorbs the
//! load balance. The remaining supply loads are found by a damped Broyden
//! iteration on the mismatch between computed and prescribed pressures.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::eos::CompressibilityModel;
use crate::error::{Error, Result};
use crate::network::{validate, Network, Topology};

use super::{solve_single_reference, SteadyState};

/// Convergence threshold on supply pressures, Pa.
pub const MIXED_PRESSURE_TOL: f64 = 10.0;
pub const MIXED_MAX_ITER: usize = 100;
const MAX_HALVINGS: usize = 30;

#[derive(Debug, Clone, Serialize)]
pub struct MixedReport {
    pub reference: String,
    pub free_supplies: Vec<String>,
    /// `−b` at every supply, in the order of `supplies`.
    pub supplies: Vec<String>,
    pub inflows: Vec<f64>,
    pub iterations: usize,
    pub max_pressure_error: f64,
}

struct Problem<'a> {
    net: &'a Network,
    model: &'a CompressibilityModel,
    topology: Topology,
    reference: usize,
    free: Vec<usize>,
    demand_total: f64,
}

impl Problem<'_> {
    fn loads(&self, x: &[f64]) -> Vec<f64> {
        let mut loads = self.net.loads();
        for (&v, &b) in self.free.iter().zip(x) {
            loads[v] = b;
        }
        loads[self.reference] = -(self.demand_total + x.iter().sum::<f64>());
        loads
    }

    fn inner(&self, x: &[f64]) -> Result<(SteadyState, DVector<f64>)> {
        let p_ref = self.net.node(self.reference).pressure.expect("reference pressure");
        let net = self.net.with_loads(&self.loads(x)).with_reference(self.reference, p_ref);
        let state = solve_single_reference(&net, self.model, self.topology)?;
        let r = DVector::from_iterator(
            self.free.len(),
            self.free.iter().map(|&v| state.p[v] - self.net.node(v).pressure.expect("supply pressure")),
        );
        Ok((state, r))
    }
}

fn initial_guess(net: &Network, free: &[usize], supplies: usize, demand_total: f64) -> Vec<f64> {
    let share = -demand_total / supplies as f64;
    free.iter()
        .map(|&v| {
            let b = net.node(v).load;
            if b < 0.0 {
                b
            } else {
                share
            }
        })
        .collect()
}

/// Outer solve for the free supply loads.
pub fn solve_mixed_bc(net: &Network, model: &CompressibilityModel) -> Result<(SteadyState, MixedReport)> {
    let topology = validate(net).into_result()?;
    let mut supplies: Vec<usize> = (0..net.nodes().len()).filter(|&v| net.node(v).is_supply()).collect();
    supplies.sort_by(|&a, &b| net.node(a).id.cmp(&net.node(b).id));
    let reference = supplies[0];
    let free: Vec<usize> = supplies[1..].to_vec();
    let demand_total: f64 = net.nodes().iter().filter(|n| !n.is_supply()).map(|n| n.load).sum();
    let problem = Problem { net, model, topology, reference, free: free.clone(), demand_total };

    let report = |state: &SteadyState, iterations: usize, err: f64| MixedReport {
        reference: net.node(reference).id.clone(),
        free_supplies: free.iter().map(|&v| net.node(v).id.clone()).collect(),
        supplies: supplies.iter().map(|&v| net.node(v).id.clone()).collect(),
        inflows: supplies.iter().map(|&v| -state.loads[v]).collect(),
        iterations,
        max_pressure_error: err,
    };

    let mut x = DVector::from_vec(initial_guess(net, &free, supplies.len(), demand_total));
    let (mut state, mut r) = problem.inner(x.as_slice())?;
    let k = free.len();
    if k == 0 {
        state.outer_iterations = Some(0);
        let rep = report(&state, 0, 0.0);
        return Ok((state, rep));
    }

    // Finite-difference Jacobian to start.
    let mut jac = DMatrix::zeros(k, k);
    for j in 0..k {
        let h = 1e-4 * x[j].abs().max(1.0);
        let mut xp = x.clone();
        xp[j] += h;
        let (_, rp) = problem.inner(xp.as_slice())?;
        jac.set_column(j, &((rp - &r) / h));
    }

    let mut best = r.amax();
    for it in 1..=MIXED_MAX_ITER {
        if r.amax() <= MIXED_PRESSURE_TOL {
            state.outer_iterations = Some(it - 1);
            let rep = report(&state, it - 1, r.amax());
            return Ok((state, rep));
        }
        let step = match jac.clone().lu().solve(&(-&r)) {
            Some(s) if s.iter().all(|v| v.is_finite()) => s,
            _ => return Err(Error::NoConvergence { iterations: it, best_residual: best }),
        };
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let dx = &step * t;
            let trial = &x + &dx;
            match problem.inner(trial.as_slice()) {
                Ok((st, rt)) if rt.amax() < r.amax() || t < 1e-6 => {
                    accepted = Some((dx, trial, st, rt));
                    break;
                }
                _ => t *= 0.5,
            }
        }
        let Some((dx, trial, st, rt)) = accepted else {
            return Err(Error::NoConvergence { iterations: it, best_residual: best });
        };
        // Broyden rank-one update.
        let dr = &rt - &r;
        let denom = dx.dot(&dx);
        if denom > 0.0 {
            let corr = (dr - &jac * &dx) / denom;
            jac += corr * dx.transpose();
        }
        x = trial;
        r = rt;
        state = st;
        best = best.min(r.amax());
    }
    if r.amax() <= MIXED_PRESSURE_TOL {
        state.outer_iterations = Some(MIXED_MAX_ITER);
        let rep = report(&state, MIXED_MAX_ITER, r.amax());
        return Ok((state, rep));
    }
    Err(Error::NoConvergence { iterations: MIXED_MAX_ITER, best_residual: best })
}
