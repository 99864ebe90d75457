//! Two-constituent mixture rules.
//!
//! Constituent 1 is hydrogen and constituent 2 is natural gas, the latter
//! treated as a single pseudo-component. Compositions are carried as the mass
//! fraction of hydrogen; molar fractions are derived on demand.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Universal gas constant used throughout, J/(mol K).
pub const GAS_CONSTANT: f64 = 8.3145;

/// Molar mass of CH4, C2H6 and C3H8 in kg/mol.
const METHANE: f64 = 16.043e-3;
const ETHANE: f64 = 30.070e-3;
const PROPANE: f64 = 44.097e-3;

/// Natural gas as 90 % methane, 6 % ethane and 4 % propane by moles.
pub const NG_MOLAR_MASS: f64 = 0.90 * METHANE + 0.06 * ETHANE + 0.04 * PROPANE;

/// Molar mass of H2 in kg/mol.
pub const H2_MOLAR_MASS: f64 = 2.016e-3;

/// Hydrogen mass fraction, clamped to `[0, 1]` at construction.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MassFraction(f64);

impl MassFraction {
    pub const ZERO: MassFraction = MassFraction(0.0);
    pub const ONE: MassFraction = MassFraction(1.0);

    /// Checked constructor; rejects values outside `[0, 1]` and NaN.
    pub fn new(eta: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&eta) {
            Ok(Self(eta))
        } else {
            Err(Error::InvalidInput(format!("mass fraction {eta} outside [0, 1]")))
        }
    }

    /// Clamps round-off excursions such as `1 + 1e-16` back into range.
    pub fn clamped(eta: f64) -> Self {
        if eta.is_nan() {
            Self(0.0)
        } else {
            Self(eta.clamp(0.0, 1.0))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl From<MassFraction> for f64 {
    fn from(value: MassFraction) -> Self {
        value.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GasComponent {
    pub name: String,
    /// kg/mol
    pub molar_mass: f64,
    /// Pa
    pub p_crit: f64,
    /// K
    pub t_crit: f64,
}

impl GasComponent {
    pub fn new(name: impl Into<String>, molar_mass: f64, p_crit: f64, t_crit: f64) -> Result<Self> {
        let name = name.into();
        for (label, v) in [("molar_mass", molar_mass), ("p_crit", p_crit), ("T_crit", t_crit)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!("{name}: {label} must be positive, got {v}")));
            }
        }
        Ok(Self { name, molar_mass, p_crit, t_crit })
    }

    /// Hydrogen with critical point 13.15 bar / 33.19 K.
    pub fn hydrogen() -> Self {
        Self { name: "H2".into(), molar_mass: H2_MOLAR_MASS, p_crit: 13.15e5, t_crit: 33.19 }
    }

    /// Natural gas pseudo-component with critical point 46.01 bar / 204.62 K.
    pub fn natural_gas() -> Self {
        Self { name: "NG".into(), molar_mass: NG_MOLAR_MASS, p_crit: 46.01e5, t_crit: 204.62 }
    }
}

/// Hydrogen / natural gas pair together with the gas constant and the
/// (isothermal) temperature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GasPair {
    pub h2: GasComponent,
    pub ng: GasComponent,
    /// J/(mol K)
    pub r: f64,
    /// K
    pub t: f64,
}

impl GasPair {
    pub fn new(h2: GasComponent, ng: GasComponent, r: f64, t: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) || !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidInput(format!("R and T must be positive (R={r}, T={t})")));
        }
        if h2 == ng {
            return Err(Error::InvalidInput("the two gas components must differ".into()));
        }
        Ok(Self { h2, ng, r, t })
    }

    /// Hydrogen and natural gas at 283.15 K.
    pub fn h2_ng_reference() -> Self {
        Self {
            h2: GasComponent::hydrogen(),
            ng: GasComponent::natural_gas(),
            r: GAS_CONSTANT,
            t: 283.15,
        }
    }

    #[inline]
    pub fn rt(&self) -> f64 {
        self.r * self.t
    }

    /// Mixture molar mass, `1/M = η/M₁ + (1-η)/M₂`.
    pub fn molar_mass(&self, eta: MassFraction) -> f64 {
        let (m1, m2) = (self.h2.molar_mass, self.ng.molar_mass);
        let e = eta.get();
        m1 * m2 / (e * m2 + (1.0 - e) * m1)
    }

    /// Specific gas constant `R T / M(η)` in m²/s².
    pub fn rt_over_m(&self, eta: MassFraction) -> f64 {
        let e = eta.get();
        self.rt() * (e / self.h2.molar_mass + (1.0 - e) / self.ng.molar_mass)
    }

    pub fn mass_to_molar(&self, eta: MassFraction) -> f64 {
        let (m1, m2) = (self.h2.molar_mass, self.ng.molar_mass);
        let e = eta.get();
        let num = e * m2;
        let den = num + (1.0 - e) * m1;
        (num / den).clamp(0.0, 1.0)
    }

    pub fn molar_to_mass(&self, eta_mol: f64) -> MassFraction {
        let (m1, m2) = (self.h2.molar_mass, self.ng.molar_mass);
        let num = eta_mol * m1;
        MassFraction::clamped(num / (num + (1.0 - eta_mol) * m2))
    }
}
