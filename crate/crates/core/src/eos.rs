//! Compressibility factor models and the pressure potential.
//!
//! Every model exposes `Z(η, p)`, `∂Z/∂p`, the antiderivative
//! `A(η, p) = ∫ p / Z dp`, and from those the potential
//! `F(η, q, p) = A(η, p) + (R T q² / M(η)) ln(Z / p)` whose differences along
//! a pipe balance the friction term.

use std::cell::Cell;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gasprops::{GasComponent, GasPair, MassFraction};
use crate::quad;

/// Default pressure window in which models are validated and inverted, Pa.
pub const DEFAULT_P_RANGE: (f64, f64) = (1e4, 2e7);

/// Lower integration limit for numerically integrated antiderivatives, Pa.
pub const QUADRATURE_GAUGE: f64 = 1e5;

/// Which potential is used for the momentum balance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentumMode {
    /// `F = A + (RT/M) q² ln(Z/p)`.
    #[default]
    Full,
    /// Kinetic term dropped, `F = A`.
    Semilinear,
}

/// Mass flux and pressure at which a potential is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialPoint {
    pub eta: MassFraction,
    /// kg/(m² s)
    pub q: f64,
    /// Pa
    pub p: f64,
}

impl PotentialPoint {
    pub fn new(eta: MassFraction, q: f64, p: f64) -> Self {
        Self { eta, q, p }
    }
}

/// How pseudo-critical temperature and pressure of the blend are formed from
/// the component values in the Papay correlation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CriticalMixing {
    /// Weighted by molar fraction.
    Molar,
    /// Weighted by mass fraction.
    #[default]
    Mass,
}

/// User supplied compressibility law. Only `z` is mandatory; the derivative
/// falls back to central differences and the antiderivative to adaptive
/// quadrature.
pub trait CustomCompressibility: Send + Sync + fmt::Debug {
    fn z(&self, eta: MassFraction, p: f64) -> f64;

    fn z_dp(&self, _eta: MassFraction, _p: f64) -> Option<f64> {
        None
    }

    fn antiderivative(&self, _eta: MassFraction, _p: f64) -> Option<f64> {
        None
    }
}

/// `Z = 1 + Σ_k c_k(η) p^k` with coefficients blended linearly in the mass
/// fraction. Coefficient `k` (0-based) multiplies `p^(k+1)`; units are Pa⁻ᵏ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialZ {
    pub h2: Vec<f64>,
    pub ng: Vec<f64>,
}

impl PolynomialZ {
    fn coefficient(&self, k: usize, eta: f64) -> f64 {
        let h = self.h2.get(k).copied().unwrap_or(0.0);
        let n = self.ng.get(k).copied().unwrap_or(0.0);
        eta * h + (1.0 - eta) * n
    }

    fn degree(&self) -> usize {
        self.h2.len().max(self.ng.len())
    }
}

impl CustomCompressibility for PolynomialZ {
    fn z(&self, eta: MassFraction, p: f64) -> f64 {
        let e = eta.get();
        // Horner on 1 + p (c0 + p (c1 + ...)).
        let mut acc = 0.0;
        for k in (0..self.degree()).rev() {
            acc = acc * p + self.coefficient(k, e);
        }
        1.0 + acc * p
    }

    fn z_dp(&self, eta: MassFraction, p: f64) -> Option<f64> {
        let e = eta.get();
        let mut acc = 0.0;
        for k in (0..self.degree()).rev() {
            acc = acc * p + (k + 1) as f64 * self.coefficient(k, e);
        }
        Some(acc)
    }
}

#[derive(Debug, Clone)]
pub enum ModelKind {
    Constant(f64),
    Linear,
    Papay(CriticalMixing),
    Custom(Arc<dyn CustomCompressibility>),
}

impl ModelKind {
    pub fn label(&self) -> &'static str {
        match self {
            ModelKind::Constant(_) => "constant",
            ModelKind::Linear => "linear",
            ModelKind::Papay(_) => "papay",
            ModelKind::Custom(_) => "custom",
        }
    }
}

/// `α = 0.257 / p_c − 0.5333 T_c / (p_c T)` in 1/Pa.
pub fn alpha_coefficient(comp: &GasComponent, t: f64) -> f64 {
    0.257 / comp.p_crit - 0.5333 * comp.t_crit / (comp.p_crit * t)
}

#[derive(Debug, Clone)]
pub struct CompressibilityModel {
    kind: ModelKind,
    pair: GasPair,
    alpha_h2: f64,
    alpha_ng: f64,
    p_range: (f64, f64),
}

impl CompressibilityModel {
    pub fn new(kind: ModelKind, pair: GasPair) -> Result<Self> {
        Self::with_range(kind, pair, DEFAULT_P_RANGE)
    }

    /// Builds the model and checks `Z > 0` on a grid covering `p_range`.
    pub fn with_range(kind: ModelKind, pair: GasPair, p_range: (f64, f64)) -> Result<Self> {
        if let ModelKind::Constant(k) = kind {
            if !(k > 0.0 && k.is_finite()) {
                return Err(Error::InvalidInput(format!("constant compressibility must be positive, got {k}")));
            }
        }
        if !(p_range.0 > 0.0 && p_range.1 > p_range.0) {
            return Err(Error::InvalidInput(format!("invalid pressure range {p_range:?}")));
        }
        let alpha_h2 = alpha_coefficient(&pair.h2, pair.t);
        let alpha_ng = alpha_coefficient(&pair.ng, pair.t);
        let model = Self { kind, pair, alpha_h2, alpha_ng, p_range };
        for i in 0..=4 {
            let eta = MassFraction::clamped(i as f64 / 4.0);
            for j in 0..=40 {
                let p = p_range.0 + (p_range.1 - p_range.0) * j as f64 / 40.0;
                model.z(eta, p)?;
            }
        }
        Ok(model)
    }

    pub fn constant(pair: GasPair, k: f64) -> Result<Self> {
        Self::new(ModelKind::Constant(k), pair)
    }

    pub fn linear(pair: GasPair) -> Result<Self> {
        Self::new(ModelKind::Linear, pair)
    }

    pub fn papay(pair: GasPair) -> Result<Self> {
        Self::new(ModelKind::Papay(CriticalMixing::default()), pair)
    }

    pub fn custom(pair: GasPair, law: Arc<dyn CustomCompressibility>) -> Result<Self> {
        Self::new(ModelKind::Custom(law), pair)
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn pair(&self) -> &GasPair {
        &self.pair
    }

    pub fn p_range(&self) -> (f64, f64) {
        self.p_range
    }

    pub fn label(&self) -> &'static str {
        self.kind.label()
    }

    /// `α(η)` of the linear model.
    pub fn linear_slope(&self, eta: MassFraction) -> f64 {
        let e = eta.get();
        e * self.alpha_h2 + (1.0 - e) * self.alpha_ng
    }

    /// Coefficients `(a, b)` of `Z = 1 + a p + b p²` in the Papay correlation.
    pub fn papay_coefficients(&self, eta: MassFraction, mixing: CriticalMixing) -> (f64, f64) {
        let w = match mixing {
            CriticalMixing::Molar => self.pair.mass_to_molar(eta),
            CriticalMixing::Mass => eta.get(),
        };
        let tc = w * self.pair.h2.t_crit + (1.0 - w) * self.pair.ng.t_crit;
        let pc = w * self.pair.h2.p_crit + (1.0 - w) * self.pair.ng.p_crit;
        let tr = self.pair.t / tc;
        let a = -3.52 * (-2.26 * tr).exp() / pc;
        let b = 0.274 * (-1.878 * tr).exp() / (pc * pc);
        (a, b)
    }

    /// Polynomial coefficients `(a, b)` for the models that are quadratic
    /// (or simpler) in `p`.
    fn quadratic(&self, eta: MassFraction) -> Option<(f64, f64)> {
        match &self.kind {
            ModelKind::Constant(_) | ModelKind::Custom(_) => None,
            ModelKind::Linear => Some((self.linear_slope(eta), 0.0)),
            ModelKind::Papay(mix) => Some(self.papay_coefficients(eta, *mix)),
        }
    }

    fn z_raw(&self, eta: MassFraction, p: f64) -> f64 {
        match &self.kind {
            ModelKind::Constant(k) => *k,
            ModelKind::Custom(law) => law.z(eta, p),
            _ => {
                let (a, b) = self.quadratic(eta).expect("polynomial model");
                1.0 + p * (a + b * p)
            }
        }
    }

    /// Compressibility factor; errors if it is not positive.
    pub fn z(&self, eta: MassFraction, p: f64) -> Result<f64> {
        let z = self.z_raw(eta, p);
        if z > 0.0 && z.is_finite() {
            Ok(z)
        } else {
            Err(Error::NonPositiveZ { eta: eta.get(), p, z })
        }
    }

    /// `∂Z/∂p` in 1/Pa.
    pub fn z_dp(&self, eta: MassFraction, p: f64) -> f64 {
        match &self.kind {
            ModelKind::Constant(_) => 0.0,
            ModelKind::Custom(law) => law.z_dp(eta, p).unwrap_or_else(|| {
                let h = 1e-6 * p.max(1e5);
                (law.z(eta, p + h) - law.z(eta, p - h)) / (2.0 * h)
            }),
            _ => {
                let (a, b) = self.quadratic(eta).expect("polynomial model");
                a + 2.0 * b * p
            }
        }
    }

    /// `A(η, p) = ∫ p / Z dp`. Closed forms are gauged to `A(η, 0) = 0`,
    /// quadrature to `A(η, QUADRATURE_GAUGE) = 0`.
    pub fn antiderivative(&self, eta: MassFraction, p: f64) -> Result<f64> {
        match &self.kind {
            ModelKind::Constant(k) => Ok(p * p / (2.0 * k)),
            ModelKind::Custom(law) => match law.antiderivative(eta, p) {
                Some(v) => Ok(v),
                None => self.antiderivative_numeric(eta, p),
            },
            _ => {
                self.z(eta, p)?;
                let (a, b) = self.quadratic(eta).expect("polynomial model");
                Ok(quadratic_antiderivative(a, b, p))
            }
        }
    }

    /// Adaptive quadrature of `s / Z(η, s)` from the gauge point to `p`.
    pub fn antiderivative_numeric(&self, eta: MassFraction, p: f64) -> Result<f64> {
        let bad = Cell::new(None);
        let r = quad::integrate(
            |s| {
                let z = self.z_raw(eta, s);
                if !(z > 0.0) && bad.get().is_none() {
                    bad.set(Some((s, z)));
                }
                s / z
            },
            QUADRATURE_GAUGE,
            p,
            1.0,
            1e-10,
        );
        match bad.get() {
            Some((s, z)) => Err(Error::NonPositiveZ { eta: eta.get(), p: s, z }),
            None => Ok(r.value),
        }
    }

    /// Pressure potential `F(η, q, p)`.
    pub fn potential(&self, pt: PotentialPoint, mode: MomentumMode) -> Result<f64> {
        let a = self.antiderivative(pt.eta, pt.p)?;
        match mode {
            MomentumMode::Semilinear => Ok(a),
            MomentumMode::Full => {
                if pt.q == 0.0 {
                    return Ok(a);
                }
                let z = self.z(pt.eta, pt.p)?;
                let c = self.pair.rt_over_m(pt.eta);
                Ok(a + c * pt.q * pt.q * (z / pt.p).ln())
            }
        }
    }

    /// `∂F/∂p`.
    pub fn potential_dp(&self, pt: PotentialPoint, mode: MomentumMode) -> Result<f64> {
        let z = self.z(pt.eta, pt.p)?;
        match mode {
            MomentumMode::Semilinear => Ok(pt.p / z),
            MomentumMode::Full => Ok(self.subsonic_margin_with(pt, z) / (pt.p * z)),
        }
    }

    fn subsonic_margin_with(&self, pt: PotentialPoint, z: f64) -> f64 {
        let c = self.pair.rt_over_m(pt.eta);
        pt.p * pt.p - c * pt.q * pt.q * (z - pt.p * self.z_dp(pt.eta, pt.p))
    }

    /// `p² − (RT/M) q² (Z − p ∂Z/∂p)`, positive exactly on the subsonic domain.
    pub fn subsonic_margin(&self, pt: PotentialPoint) -> f64 {
        self.subsonic_margin_with(pt, self.z_raw(pt.eta, pt.p))
    }

    pub fn is_subsonic(&self, pt: PotentialPoint) -> bool {
        self.subsonic_margin(pt) > 0.0
    }

    /// Smallest pressure above which the state `(η, q, ·)` is subsonic.
    pub fn sonic_pressure(&self, eta: MassFraction, q: f64) -> f64 {
        if q == 0.0 {
            return 0.0;
        }
        let c = self.pair.rt_over_m(eta) * q * q;
        match &self.kind {
            ModelKind::Constant(k) => (c * k).sqrt(),
            ModelKind::Linear => c.sqrt(),
            ModelKind::Papay(mix) => {
                // Z − pZ' = 1 − b p².
                let (_, b) = self.papay_coefficients(eta, *mix);
                (c / (1.0 + c * b)).sqrt()
            }
            ModelKind::Custom(_) => {
                let margin = |p: f64| self.subsonic_margin(PotentialPoint::new(eta, q, p));
                let mut hi = self.p_range.1;
                if margin(hi) <= 0.0 {
                    return f64::INFINITY;
                }
                let mut lo = 1e-3;
                if margin(lo) > 0.0 {
                    return 0.0;
                }
                for _ in 0..200 {
                    let mid = (lo * hi).sqrt();
                    if margin(mid) > 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                    if hi - lo <= 1e-12 * hi {
                        break;
                    }
                }
                hi
            }
        }
    }
}

/// `∫₀ᵖ s / (1 + a s + b s²) ds`.
pub fn quadratic_antiderivative(a: f64, b: f64, p: f64) -> f64 {
    if p == 0.0 {
        return 0.0;
    }
    let scale = (a.abs() * p.abs()).max(b.abs().sqrt() * p.abs());
    if scale < 0.1 {
        return quadratic_series(a, b, p);
    }
    if b == 0.0 {
        // Linear law: p/a − ln(1 + a p)/a².
        return p / a - (a * p).ln_1p() / (a * a);
    }
    // A = ln(Z)/(2b) − (a/(2b)) ∫ ds / Z.
    let log_z = (p * (a + b * p)).ln_1p();
    let delta = 4.0 * b - a * a;
    let j = if delta > 0.0 {
        let r = delta.sqrt();
        2.0 / r * (p * r).atan2(2.0 + a * p)
    } else if delta < 0.0 {
        let s = (-delta).sqrt();
        (2.0 * s * p / (2.0 + (a - s) * p)).ln_1p() / s
    } else {
        2.0 * p / (2.0 + a * p)
    };
    log_z / (2.0 * b) - a / (2.0 * b) * j
}

/// Power series of the same integral, valid for `|a p|, |b| p² ≪ 1`.
fn quadratic_series(a: f64, b: f64, p: f64) -> f64 {
    // 1/Z = Σ c_n pⁿ with c_n = −a c_{n−1} − b c_{n−2}.
    let (mut c_prev, mut c) = (0.0, 1.0);
    let mut pn = p * p;
    let mut sum = 0.0;
    for n in 0..80 {
        let term = c * pn / (n as f64 + 2.0);
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() && n > 1 {
            break;
        }
        let next = -a * c - b * c_prev;
        c_prev = c;
        c = next;
        pn *= p;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pair() -> GasPair {
        GasPair::h2_ng_reference()
    }

    fn models() -> Vec<CompressibilityModel> {
        let law = PolynomialZ { h2: vec![1.2e-7], ng: vec![-2.0e-8, 1.0e-16] };
        vec![
            CompressibilityModel::constant(pair(), 1.0).unwrap(),
            CompressibilityModel::linear(pair()).unwrap(),
            CompressibilityModel::papay(pair()).unwrap(),
            CompressibilityModel::custom(pair(), Arc::new(law)).unwrap(),
        ]
    }

    #[test]
    fn alpha_examples() {
        let t = 283.15;
        assert_relative_eq!(alpha_coefficient(&GasComponent::hydrogen(), t), 1.479e-7, max_relative = 5e-4);
        assert_relative_eq!(alpha_coefficient(&GasComponent::natural_gas(), t), -2.790e-8, max_relative = 5e-4);
        let cold = GasComponent::new("x", 1.0, 10e5, 1e-300).unwrap();
        assert_relative_eq!(alpha_coefficient(&cold, t), 0.257 / 10e5, max_relative = 1e-12);
    }

    #[test]
    fn z_examples() {
        let m = models();
        assert_eq!(m[0].z(MassFraction::new(0.3).unwrap(), 4e6).unwrap(), 1.0);
        assert_eq!(m[2].z(MassFraction::new(0.3).unwrap(), 0.0).unwrap(), 1.0);
        // Pure component at its own critical point.
        let mut gas = pair();
        gas.t = gas.ng.t_crit;
        let papay = CompressibilityModel::with_range(ModelKind::Papay(CriticalMixing::Molar), gas, (1e4, 5e6)).unwrap();
        let z = papay.z(MassFraction::ZERO, papay.pair().ng.p_crit).unwrap();
        let expect = 1.0 - 3.52 * (-2.26f64).exp() + 0.274 * (-1.878f64).exp();
        assert_relative_eq!(z, expect, max_relative = 1e-12);
        assert!((z - 0.6747).abs() < 2e-4, "{z}");
    }

    #[test]
    fn linear_reduces_to_pure_components() {
        let lin = &models()[1];
        let (ah, an) = (alpha_coefficient(&GasComponent::hydrogen(), 283.15), alpha_coefficient(&GasComponent::natural_gas(), 283.15));
        for bar in 1..=70 {
            let p = bar as f64 * 1e5;
            assert_relative_eq!(lin.z(MassFraction::ZERO, p).unwrap(), 1.0 + an * p, max_relative = 1e-14);
            assert_relative_eq!(lin.z(MassFraction::ONE, p).unwrap(), 1.0 + ah * p, max_relative = 1e-14);
        }
    }

    #[test]
    fn z_dp_examples() {
        let m = models();
        let eta = MassFraction::new(0.4).unwrap();
        assert_eq!(m[0].z_dp(eta, 3e6), 0.0);
        assert_relative_eq!(m[1].z_dp(eta, 3e6), m[1].linear_slope(eta), max_relative = 1e-15);
        assert_relative_eq!(m[1].z_dp(eta, 7e6), m[1].linear_slope(eta), max_relative = 1e-15);
        let (a, _) = m[2].papay_coefficients(eta, CriticalMixing::default());
        assert_relative_eq!(m[2].z_dp(eta, 0.0), a, max_relative = 1e-15);
        let h = 10.0;
        let fd = (m[2].z(eta, h).unwrap() - m[2].z(eta, -h).unwrap()) / (2.0 * h);
        assert_relative_eq!(m[2].z_dp(eta, 0.0), fd, max_relative = 1e-6);
    }

    #[test]
    fn z_dp_matches_finite_differences() {
        for m in models() {
            for &e in &[0.0, 0.25, 0.5, 0.75, 1.0] {
                let eta = MassFraction::new(e).unwrap();
                for k in 1..=20 {
                    let p = k as f64 * 4.5e5;
                    // Central differences are exact on quadratics; a wide step
                    // keeps cancellation small.
                    let h = 0.1 * p;
                    let fd = (m.z(eta, p + h).unwrap() - m.z(eta, p - h).unwrap()) / (2.0 * h);
                    let an = m.z_dp(eta, p);
                    assert!((an - fd).abs() <= 1e-7 * an.abs().max(1e-12), "{} {e} {p}: {an} vs {fd}", m.label());
                }
            }
        }
    }

    #[test]
    fn constant_antiderivative_value() {
        let m = &models()[0];
        assert_relative_eq!(m.antiderivative(MassFraction::ZERO, 6e6).unwrap(), 1.8e13, max_relative = 1e-15);
    }

    #[test]
    fn closed_forms_match_quadrature() {
        for m in &models()[..3] {
            for &e in &[0.0, 0.25, 0.5, 0.75, 1.0] {
                let eta = MassFraction::new(e).unwrap();
                let a0 = m.antiderivative(eta, QUADRATURE_GAUGE).unwrap();
                for k in 0..50 {
                    let p = 1e5 + (8e6 - 1e5) * k as f64 / 49.0;
                    let closed = m.antiderivative(eta, p).unwrap() - a0;
                    let numeric = m.antiderivative_numeric(eta, p).unwrap();
                    assert!((closed - numeric).abs() <= 1e-8 * numeric.abs().max(1.0), "{} eta={e} p={p}: {closed} vs {numeric}", m.label());
                }
            }
        }
    }

    #[test]
    fn quadratic_branches_agree_with_series_near_threshold() {
        for &(a, b) in &[(-3e-8, 1e-15), (-3e-8, 1e-16), (2e-8, 5e-17), (-3e-8, 2.25e-16), (1e-8, 0.0), (-1e-8, 0.0)] {
            for &p in &[1e6, 3e6, 5e6, 1e7] {
                let closed = quadratic_antiderivative(a, b, p);
                let numeric = quad::integrate(|s| s / (1.0 + a * s + b * s * s), 0.0, p, 1e-6, 1e-13).value;
                assert_relative_eq!(closed, numeric, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn linear_antiderivative_derivative_oracle() {
        let m = &models()[1];
        let eta = MassFraction::new(0.5).unwrap();
        let (p, h) = (5e6, 50.0);
        let fd = (m.antiderivative(eta, p + h).unwrap() - m.antiderivative(eta, p - h).unwrap()) / (2.0 * h);
        let expect = p / m.z(eta, p).unwrap();
        assert_relative_eq!(fd, expect, max_relative = 1e-8);
    }

    #[test]
    fn potential_examples() {
        let m = models();
        let eta = MassFraction::new(0.5).unwrap();
        let pt = PotentialPoint::new(eta, 0.0, 3e6);
        assert_relative_eq!(m[0].potential(pt, MomentumMode::Full).unwrap(), 4.5e12, max_relative = 1e-15);
        for model in &m {
            assert_eq!(model.potential(pt, MomentumMode::Full).unwrap(), model.antiderivative(eta, 3e6).unwrap());
        }
        // Linear model against quadrature of dF/dp from the gauge point.
        let lin = &m[1];
        let q = 100.0;
        let at = |p: f64| lin.potential(PotentialPoint::new(eta, q, p), MomentumMode::Full).unwrap();
        let numeric = quad::integrate(
            |p| lin.potential_dp(PotentialPoint::new(eta, q, p), MomentumMode::Full).unwrap(),
            QUADRATURE_GAUGE,
            5e6,
            1e-3,
            1e-13,
        )
        .value;
        assert_relative_eq!(at(5e6) - at(QUADRATURE_GAUGE), numeric, max_relative = 1e-8);
    }

    #[test]
    fn dfdp_matches_finite_differences() {
        for m in models() {
            for mode in [MomentumMode::Full, MomentumMode::Semilinear] {
                let eta = MassFraction::new(0.3).unwrap();
                for k in 1..=20 {
                    let p = k as f64 * 4e5;
                    let pt = PotentialPoint::new(eta, 120.0, p);
                    if !m.is_subsonic(pt) {
                        continue;
                    }
                    let h = 1e-5 * p;
                    let f = |p| m.potential(PotentialPoint { p, ..pt }, mode).unwrap();
                    let fd = (f(p + h) - f(p - h)) / (2.0 * h);
                    let an = m.potential_dp(pt, mode).unwrap();
                    assert_relative_eq!(an, fd, max_relative = 1e-7);
                }
            }
        }
    }

    #[test]
    fn subsonic_examples() {
        let m = models();
        let eta = MassFraction::new(0.25).unwrap();
        assert!(m[2].is_subsonic(PotentialPoint::new(eta, 0.0, 1e5)));
        assert!(!m[2].is_subsonic(PotentialPoint::new(eta, 1e9, 1e5)));
        let c = m[0].pair().rt_over_m(eta);
        let p = 2e6;
        let q_sonic = p * (1.0 / c).sqrt();
        assert!(m[0].is_subsonic(PotentialPoint::new(eta, 0.999 * q_sonic, p)));
        assert!(!m[0].is_subsonic(PotentialPoint::new(eta, 1.001 * q_sonic, p)));
    }

    #[test]
    fn sonic_pressure_is_the_boundary() {
        for m in models() {
            let eta = MassFraction::new(0.6).unwrap();
            let q = 700.0;
            let ps = m.sonic_pressure(eta, q);
            assert!(!m.is_subsonic(PotentialPoint::new(eta, q, ps * (1.0 - 1e-6))), "{}", m.label());
            assert!(m.is_subsonic(PotentialPoint::new(eta, q, ps * (1.0 + 1e-6))), "{}", m.label());
        }
    }

    #[test]
    fn rejects_nonpositive_models() {
        assert!(CompressibilityModel::constant(pair(), 0.0).is_err());
        let law = PolynomialZ { h2: vec![-1e-6], ng: vec![-1e-6] };
        let err = CompressibilityModel::custom(pair(), Arc::new(law)).unwrap_err();
        assert!(matches!(err, Error::NonPositiveZ { .. }));
    }
}
