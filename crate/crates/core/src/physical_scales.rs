//! Physical constants and the closed-form suppression quantities.
//!
//! Everything here is SI. Energies quoted in eV are converted once, in
//! [`ScaleParams::from_ev`].

use serde::Serialize;

use crate::error::{invalid, Result};

/// CODATA-2018 exact/recommended values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Speed of light, m/s.
    pub c: f64,
    /// Joules per electron-volt.
    pub electron_volt: f64,
}

pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    hbar: 1.054_571_817e-34,
    c: 2.997_924_58e8,
    electron_volt: 1.602_176_634e-19,
};

pub const HBAR: f64 = CONSTANTS.hbar;
pub const C_LIGHT: f64 = CONSTANTS.c;
pub const EV: f64 = CONSTANTS.electron_volt;

/// Linear amplitudes are only materialized below this |ln A|.
pub const MAX_LINEAR_LOG: f64 = 700.0;

/// Constituent mass, binding energy and body gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleParams {
    /// kg
    pub mass: f64,
    /// J
    pub binding_energy: f64,
    /// m
    pub separation: f64,
}

impl ScaleParams {
    pub fn new(mass: f64, binding_energy: f64, separation: f64) -> Result<Self> {
        let p = Self {
            mass,
            binding_energy,
            separation,
        };
        p.validate()?;
        Ok(p)
    }

    /// Binding energy given in eV.
    pub fn from_ev(mass: f64, binding_energy_ev: f64, separation: f64) -> Result<Self> {
        Self::new(mass, binding_energy_ev * EV, separation)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return Err(invalid("mass", format!("must be finite and > 0, got {}", self.mass)));
        }
        if !(self.binding_energy.is_finite() && self.binding_energy >= 0.0) {
            return Err(invalid(
                "binding_energy",
                format!("must be finite and >= 0, got {}", self.binding_energy),
            ));
        }
        if !(self.separation.is_finite() && self.separation >= 0.0) {
            return Err(invalid(
                "separation",
                format!("must be finite and >= 0, got {}", self.separation),
            ));
        }
        Ok(())
    }

    pub fn with_separation(self, separation: f64) -> Self {
        Self { separation, ..self }
    }

    /// E_b / (m c²).
    pub fn rest_energy_ratio(&self) -> f64 {
        self.binding_energy / (self.mass * C_LIGHT * C_LIGHT)
    }
}

/// A length scale that may be unbounded (no binding, no decay).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum DecayLength {
    Finite(f64),
    Infinite,
}

impl DecayLength {
    pub fn finite(self) -> Option<f64> {
        match self {
            DecayLength::Finite(l) => Some(l),
            DecayLength::Infinite => None,
        }
    }

    /// Infinite maps to `f64::INFINITY`.
    pub fn value(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuppressionEstimate {
    /// 1/m
    pub kappa: f64,
    pub ell: DecayLength,
    /// ln A = −κ d
    pub log_amplitude: f64,
}

impl SuppressionEstimate {
    /// `exp(log_amplitude)` when representable, otherwise `None`.
    pub fn linear_amplitude(&self) -> Option<f64> {
        linear_from_log(self.log_amplitude)
    }
}

pub fn linear_from_log(log_value: f64) -> Option<f64> {
    (log_value.abs() < MAX_LINEAR_LOG).then(|| log_value.exp())
}

/// κ = √(2 m E_b)/ħ.
pub fn evanescent_wavevector(params: &ScaleParams) -> Result<f64> {
    params.validate()?;
    Ok((2.0 * params.mass * params.binding_energy).sqrt() / HBAR)
}

/// ℓ = ħ/√(2 m E_b); unbounded when E_b = 0.
pub fn suppression_length(params: &ScaleParams) -> Result<DecayLength> {
    let kappa = evanescent_wavevector(params)?;
    if kappa == 0.0 {
        return Ok(DecayLength::Infinite);
    }
    Ok(DecayLength::Finite(
        HBAR / (2.0 * params.mass * params.binding_energy).sqrt(),
    ))
}

/// ln A = −d/ℓ = −κ d. Zero binding gives zero.
pub fn log_suppression(params: &ScaleParams) -> Result<f64> {
    let kappa = evanescent_wavevector(params)?;
    Ok(-(kappa * params.separation))
}

pub fn estimate(params: &ScaleParams) -> Result<SuppressionEstimate> {
    Ok(SuppressionEstimate {
        kappa: evanescent_wavevector(params)?,
        ell: suppression_length(params)?,
        log_amplitude: log_suppression(params)?,
    })
}

/// m' = m + E_b/c².
pub fn shifted_mass(params: &ScaleParams) -> Result<f64> {
    params.validate()?;
    Ok(params.mass + params.binding_energy / (C_LIGHT * C_LIGHT))
}

/// μ = √(m'² − m²) c/ħ, evaluated as κ √(1 + E_b/(2mc²)) so that the small
/// relativistic excess over κ survives rounding.
pub fn relativistic_decay_rate(params: &ScaleParams) -> Result<f64> {
    let kappa = evanescent_wavevector(params)?;
    Ok(kappa * (1.0 + 0.5 * params.rest_energy_ratio()).sqrt())
}

/// (μ − κ)/κ = √(1+x) − 1 with x = E_b/(2mc²), without cancellation.
pub fn relativistic_excess(params: &ScaleParams) -> Result<f64> {
    params.validate()?;
    let x = 0.5 * params.rest_energy_ratio();
    Ok(x / ((1.0 + x).sqrt() + 1.0))
}
