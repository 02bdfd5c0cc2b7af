//! Static matter correlator with the binding-shifted pole.
//!
//! Binding shifts the propagator mass to m' = m + E_b/c². Because the states
//! the propagator connects sit where the binding potential vanishes, the
//! exponentials no longer cancel and a residual `exp(−μ d)` with
//! `μ = √(m'² − m²) c/ħ` survives. At E_b = 0 the correlator is long-ranged.
//!
//! [`correlator_quadrature`] is an independent check of the 1D residue
//! result `∫ e^{ikd}/(k² + μ²) dk = (π/μ) e^{−μd}`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::physical_scales::{
    evanescent_wavevector, relativistic_decay_rate, relativistic_excess, ScaleParams, C_LIGHT, HBAR,
};
use crate::quadrature;

/// Reference length for the 3D `ln(d/d₀)` prefactor, m.
pub const REFERENCE_SCALE: f64 = 1.0;
/// Quadrature is only attempted where `μd` keeps the linear value representable.
pub const MAX_QUADRATURE_EXPONENT: f64 = 30.0;
/// Beyond this E_b/(mc²) the non-relativistic replacement μ → κ is flagged.
pub const NONREL_LIMIT: f64 = 1e-2;
const MIN_CUTOFF: f64 = 50.0;
const MAX_DOUBLINGS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Dimension {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "3")]
    Three,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PropagatorParams {
    pub mass: f64,
    pub binding_energy: f64,
    pub spatial_dimension: Dimension,
}

impl PropagatorParams {
    pub fn new(mass: f64, binding_energy: f64, spatial_dimension: Dimension) -> Result<Self> {
        ScaleParams::new(mass, binding_energy, 0.0)?;
        Ok(Self {
            mass,
            binding_energy,
            spatial_dimension,
        })
    }

    fn scale(&self, separation: f64) -> Result<ScaleParams> {
        ScaleParams::new(self.mass, self.binding_energy, separation)
    }

    pub fn decay_rate(&self) -> Result<f64> {
        relativistic_decay_rate(&self.scale(0.0)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelatorSample {
    pub separation: f64,
    pub log_value: f64,
    pub method: Method,
    /// Absolute error bound on `log_value` (quadrature only).
    pub error_estimate: Option<f64>,
    /// d₀ in the 3D `−ln(d/d₀)` term.
    pub reference_scale: Option<f64>,
}

/// k₀ = m'c/ħ.
pub fn pole_location(params: &PropagatorParams) -> Result<f64> {
    let p = params.scale(0.0)?;
    Ok(crate::physical_scales::shifted_mass(&p)? * C_LIGHT / HBAR)
}

/// ln of the static correlator: `−μd` in 1D, `−μd − ln(d/d₀)` in 3D.
pub fn static_correlator_log(params: &PropagatorParams, separation: f64) -> Result<CorrelatorSample> {
    let mu = relativistic_decay_rate(&params.scale(separation)?)?;
    let (log_value, reference_scale) = match params.spatial_dimension {
        Dimension::One => (-(mu * separation), None),
        Dimension::Three => {
            if separation == 0.0 {
                return Err(invalid("separation", "the 3D correlator is singular at d = 0"));
            }
            (
                -(mu * separation) - (separation / REFERENCE_SCALE).ln(),
                Some(REFERENCE_SCALE),
            )
        }
    };
    Ok(CorrelatorSample {
        separation,
        log_value,
        method: Method::Analytic,
        error_estimate: None,
        reference_scale,
    })
}

/// Full oracle output, including the imaginary part of the truncated integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureDetail {
    pub sample: CorrelatorSample,
    /// Re ∫, in units of 1/μ.
    pub real_part: f64,
    pub imag_part: f64,
    /// Final truncation K in units of μ.
    pub cutoff: f64,
    pub evaluations: usize,
}

/// Numerical `ln Re ∫_{−K}^{K} e^{ikd}/(k² + μ²) dk` in 1D.
pub fn correlator_quadrature(params: &PropagatorParams, separation: f64, tolerance: f64) -> Result<CorrelatorSample> {
    correlator_quadrature_detail(params, separation, tolerance).map(|d| d.sample)
}

pub fn correlator_quadrature_detail(
    params: &PropagatorParams,
    separation: f64,
    tolerance: f64,
) -> Result<QuadratureDetail> {
    if params.spatial_dimension != Dimension::One {
        return Err(invalid(
            "spatial_dimension",
            "the quadrature oracle covers the 1D integral only",
        ));
    }
    if !(tolerance > 0.0 && tolerance < 1.0) {
        return Err(invalid("tolerance", format!("must lie in (0, 1), got {tolerance}")));
    }
    if !(separation.is_finite() && separation > 0.0) {
        return Err(invalid("separation", format!("must be > 0, got {separation}")));
    }
    let mu = params.decay_rate()?;
    if mu == 0.0 {
        return Err(invalid("binding_energy", "μ = 0: 1/k² is not integrable at the origin"));
    }
    // Dimensionless: k → k/μ, d → μd.
    let x = mu * separation;
    if x > MAX_QUADRATURE_EXPONENT {
        return Err(invalid(
            "separation",
            format!("μd = {x} exceeds {MAX_QUADRATURE_EXPONENT}; the linear value is not meaningful"),
        ));
    }
    let integrand = |k: f64| Complex64::new((k * x).cos(), (k * x).sin()) / (k * k + 1.0);
    let period = std::f64::consts::PI / x;

    // Truncation at K = nπ/x where sin(Kx) = 0, so the leading tail term vanishes.
    let mut panels_per_side = (MIN_CUTOFF.max(20.0 / x) / period).ceil() as usize;
    // Coarse pass to set the absolute scale of the fine tolerance.
    let coarse = integrate_panels(&integrand, period, 0, panels_per_side, 1e-6 / panels_per_side as f64);
    let scale = coarse.value.re.abs().max(f64::MIN_POSITIVE);
    let budget = 0.05 * tolerance * scale;

    let mut total = integrate_panels(&integrand, period, 0, panels_per_side, budget / panels_per_side as f64);
    let mut evaluations = coarse.evaluations + total.evaluations;
    let mut previous = total.value.re;
    for _ in 0..MAX_DOUBLINGS {
        let extra = integrate_panels(
            &integrand,
            period,
            panels_per_side,
            2 * panels_per_side,
            budget / (2 * panels_per_side) as f64,
        );
        total.value += extra.value;
        total.error += extra.error;
        evaluations += extra.evaluations;
        panels_per_side *= 2;
        let current = total.value.re;
        if (current - previous).abs() <= tolerance * current.abs() {
            let log_value = current.ln() - mu.ln();
            // Remaining tail shrinks ×8 per doubling.
            let err = ((current - previous).abs() / 7.0 + total.error) / current.abs();
            return Ok(QuadratureDetail {
                sample: CorrelatorSample {
                    separation,
                    log_value,
                    method: Method::Quadrature,
                    error_estimate: Some(err),
                    reference_scale: None,
                },
                real_part: current,
                imag_part: total.value.im,
                cutoff: panels_per_side as f64 * period,
                evaluations,
            });
        }
        previous = current;
    }
    Err(Error::QuadratureNoConvergence {
        previous,
        last: total.value.re,
    })
}

/// Symmetric shells: panels `from..to` on each side of the origin.
fn integrate_panels<F: Fn(f64) -> Complex64>(
    f: &F,
    period: f64,
    from: usize,
    to: usize,
    panel_tol: f64,
) -> quadrature::Estimate {
    let mut acc = quadrature::Estimate {
        value: Complex64::new(0.0, 0.0),
        error: 0.0,
        evaluations: 0,
    };
    for j in from..to {
        let (a, b) = (j as f64 * period, (j + 1) as f64 * period);
        for (lo, hi) in [(a, b), (-b, -a)] {
            let e = quadrature::integrate(f, lo, hi, panel_tol, 30);
            acc.value += e.value;
            acc.error += e.error;
            acc.evaluations += e.evaluations;
        }
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonrelConsistency {
    /// (μ − κ)/κ from the closed form.
    pub relative_error: f64,
    /// E_b/(4mc²).
    pub first_order: f64,
    pub approximation_valid: bool,
}

pub fn nonrel_consistency(params: &PropagatorParams) -> Result<NonrelConsistency> {
    let p = params.scale(0.0)?;
    if p.binding_energy == 0.0 {
        return Err(invalid("binding_energy", "must be > 0 for a relative error"));
    }
    debug_assert!(evanescent_wavevector(&p)? > 0.0);
    let ratio = p.rest_energy_ratio();
    Ok(NonrelConsistency {
        relative_error: relativistic_excess(&p)?,
        first_order: 0.25 * ratio,
        approximation_valid: ratio <= NONREL_LIMIT,
    })
}
