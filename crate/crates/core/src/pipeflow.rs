//! Single-edge hydraulics.
//!
//! Along a pipe with constant flux `q` and composition `η` the pressure obeys
//! `F(η, q, p(x)) = F(η, q, p(0)) + S x` with
//! `S = −(λ / 2D) (RT / M(η)) q |q|`. Since `F` is strictly increasing in `p`
//! on the subsonic branch, the relation is inverted by a bracketed Newton
//! iteration.

use serde::{Deserialize, Serialize};

use crate::eos::{CompressibilityModel, MomentumMode, PotentialPoint};
use crate::error::{Error, Result};
use crate::gasprops::{GasPair, MassFraction};

pub const NEWTON_MAX_ITER: usize = 50;
pub const BISECTION_MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipeParams {
    /// m
    pub length: f64,
    /// m
    pub diameter: f64,
    /// Darcy friction factor.
    pub friction: f64,
    #[serde(default)]
    pub mode: MomentumMode,
}

impl PipeParams {
    pub fn new(length: f64, diameter: f64, friction: f64, mode: MomentumMode) -> Result<Self> {
        if !(length >= 0.0 && length.is_finite()) {
            return Err(Error::InvalidInput(format!("pipe length must be >= 0, got {length}")));
        }
        if !(diameter > 0.0 && diameter.is_finite()) {
            return Err(Error::InvalidInput(format!("pipe diameter must be > 0, got {diameter}")));
        }
        if !(friction >= 0.0 && friction.is_finite()) {
            return Err(Error::InvalidInput(format!("friction factor must be >= 0, got {friction}")));
        }
        Ok(Self { length, diameter, friction, mode })
    }

    /// Friction-free connection, used for valves.
    pub fn frictionless(mode: MomentumMode) -> Self {
        Self { length: 0.0, diameter: 1.0, friction: 0.0, mode }
    }

    pub fn is_frictionless(&self) -> bool {
        self.length == 0.0 || self.friction == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeState {
    /// kg/(m² s)
    pub q: f64,
    pub eta: MassFraction,
}

impl EdgeState {
    pub fn new(q: f64, eta: MassFraction) -> Self {
        Self { q, eta }
    }
}

/// Friction term per metre, `−(λ/2D)(RT/M) q|q|`, in Pa²/m.
pub fn friction_rhs(pair: &GasPair, pipe: &PipeParams, state: EdgeState) -> f64 {
    -(pipe.friction / (2.0 * pipe.diameter)) * pair.rt_over_m(state.eta) * state.q * state.q.abs()
}

/// Tolerance on the potential used by [`invert_potential`].
pub fn potential_tolerance(y: f64) -> f64 {
    (1e-9 * y.abs()).max(1e-4)
}

/// Finds `p` in `bracket` with `F(η, q, p) = y`.
///
/// The lower end of the bracket is raised to the sonic pressure in full
/// momentum mode, so the returned state is always subsonic. `hint` seeds the
/// Newton iteration.
pub fn invert_potential(
    model: &CompressibilityModel,
    mode: MomentumMode,
    eta: MassFraction,
    q: f64,
    y: f64,
    bracket: (f64, f64),
    hint: Option<f64>,
) -> Result<f64> {
    let f = |p: f64| model.potential(PotentialPoint::new(eta, q, p), mode);
    let (mut lo, mut hi) = bracket;
    if mode == MomentumMode::Full {
        let sonic = model.sonic_pressure(eta, q);
        lo = lo.max(sonic * (1.0 + 1e-9));
    }
    if !(lo < hi) {
        return Err(Error::NoBracket { target: y, lo, hi });
    }
    let f_lo = shrink_to_finite(&f, &mut lo, hi, true)?;
    let f_hi = shrink_to_finite(&f, &mut hi, lo, false)?;
    let tol = potential_tolerance(y);
    if y < f_lo - tol || y > f_hi + tol {
        return Err(Error::NoBracket { target: y, lo, hi });
    }
    if (f_lo - y).abs() <= tol {
        return Ok(lo);
    }
    if (f_hi - y).abs() <= tol {
        return Ok(hi);
    }

    let mut p = hint.filter(|h| *h > lo && *h < hi).unwrap_or(0.5 * (lo + hi));
    for _ in 0..NEWTON_MAX_ITER {
        let r = f(p)? - y;
        if r.abs() <= tol {
            return Ok(p);
        }
        if r < 0.0 {
            lo = p;
        } else {
            hi = p;
        }
        let d = model.potential_dp(PotentialPoint::new(eta, q, p), mode)?;
        let step = p - r / d;
        p = if d > 0.0 && step > lo && step < hi { step } else { 0.5 * (lo + hi) };
    }
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        let r = f(mid)? - y;
        if r.abs() <= tol || hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(mid);
        }
        if r < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NoBracket { target: y, lo, hi })
}

/// Moves `end` towards `other` geometrically until `F(end)` is finite.
fn shrink_to_finite(f: &dyn Fn(f64) -> Result<f64>, end: &mut f64, other: f64, lower: bool) -> Result<f64> {
    let mut last_err = None;
    for _ in 0..60 {
        match f(*end) {
            Ok(v) if v.is_finite() => return Ok(v),
            Ok(_) => {}
            Err(e) => last_err = Some(e),
        }
        *end = if lower { (*end * other).sqrt().max(*end * 1.5) } else { (*end * other).sqrt().min(*end / 1.5) };
        if (lower && *end >= other) || (!lower && *end <= other) {
            break;
        }
    }
    Err(last_err.unwrap_or(Error::NoBracket { target: f64::NAN, lo: *end, hi: other }))
}

fn check_subsonic(model: &CompressibilityModel, pipe: &PipeParams, state: EdgeState, p: f64) -> Result<()> {
    if pipe.mode == MomentumMode::Full && !model.is_subsonic(PotentialPoint::new(state.eta, state.q, p)) {
        return Err(Error::SubsonicViolation { p, q: state.q });
    }
    Ok(())
}

fn shifted_pressure(model: &CompressibilityModel, pipe: &PipeParams, state: EdgeState, p_known: f64, sign: f64) -> Result<f64> {
    if !(p_known > 0.0) {
        return Err(Error::InvalidInput(format!("pressure must be positive, got {p_known}")));
    }
    if state.q == 0.0 || pipe.is_frictionless() {
        model.z(state.eta, p_known)?;
        return Ok(p_known);
    }
    check_subsonic(model, pipe, state, p_known)?;
    let y0 = model.potential(PotentialPoint::new(state.eta, state.q, p_known), pipe.mode)?;
    let y = y0 + sign * friction_rhs(model.pair(), pipe, state) * pipe.length;
    invert_potential(model, pipe.mode, state.eta, state.q, y, model.p_range(), Some(p_known))
}

/// Head pressure from the foot pressure.
pub fn downstream_pressure(model: &CompressibilityModel, pipe: &PipeParams, state: EdgeState, p_start: f64) -> Result<f64> {
    shifted_pressure(model, pipe, state, p_start, 1.0)
}

/// Foot pressure from the head pressure.
pub fn upstream_pressure(model: &CompressibilityModel, pipe: &PipeParams, state: EdgeState, p_end: f64) -> Result<f64> {
    shifted_pressure(model, pipe, state, p_end, -1.0)
}

/// `n_samples` points `(x, p(x))` uniformly spaced on `[0, L]`.
pub fn pressure_profile(
    model: &CompressibilityModel,
    pipe: &PipeParams,
    state: EdgeState,
    p_start: f64,
    n_samples: usize,
) -> Result<Vec<(f64, f64)>> {
    if n_samples < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 samples, got {n_samples}")));
    }
    let dx = pipe.length / (n_samples - 1) as f64;
    let mut out = Vec::with_capacity(n_samples);
    let mut p = p_start;
    for i in 0..n_samples {
        let x = if i + 1 == n_samples { pipe.length } else { i as f64 * dx };
        let partial = PipeParams { length: x, ..*pipe };
        if i > 0 {
            p = downstream_pressure(model, &partial, state, p_start)?;
        } else {
            model.z(state.eta, p)?;
        }
        out.push((x, p));
    }
    Ok(out)
}

pub fn compressor_out(gamma: f64, p_in: f64) -> f64 {
    gamma * p_in
}

pub fn compressor_in(gamma: f64, p_out: f64) -> f64 {
    p_out / gamma
}
