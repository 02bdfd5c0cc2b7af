//! Flat `key = value` sweep configuration.
//!
//! One assignment per line, `#` starts a comment. Energies are given in eV and
//! lengths in meters; both are converted to SI once here.
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `scenario` | suppression, splitting, correlator, entangle, compare | from the subcommand |
//! | `mass` | particle mass, kg | 1e-27 |
//! | `binding_energy_ev` | E_b, eV | 1 |
//! | `separations` | comma list of d, m | scenario dependent |
//! | `separation_range` | `start, stop, count`, linear | |
//! | `separations_in_ell` | read separations in units of the decay length | false |
//! | `well_width` | double-well width, m | 4 ℓ |
//! | `outer_height_ev` | potential outside the wells, eV | E_b |
//! | `grid_points` | finite-difference nodes | 4001 |
//! | `dimension` | 1 or 3 | 1 |
//! | `quadrature_tolerance` | relative tolerance of the oscillatory integral | 1e-8 |
//! | `hopping_ev` | J₀ at zero separation, eV | 1e-3 |
//! | `max_phase` | probe phase at the smallest d | 1e-3 |
//! | `probe_time` | fixed probe time, s (excludes `max_phase`) | |
//! | `free_binding_energy_ev` | E_b of the free comparison case | 0 |
//! | `tolerance.<name>` | override a verdict tolerance | see [`Tolerances`] |
//! | `seed` | recorded for reproducibility | 0 |
//! | `workers` | thread count | all cores |

// `!(x > 0.0)` is deliberate: NaN must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::correlator::Dimension;
use crate::entanglement::MAX_PROBE_PHASE;
use crate::error::{Error, Result};
use crate::physical_scales::EV;
use crate::schrodinger::MIN_POINTS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Suppression,
    Splitting,
    Correlator,
    Entangle,
    Compare,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Suppression => "suppression",
            Scenario::Splitting => "splitting",
            Scenario::Correlator => "correlator",
            Scenario::Entangle => "entangle",
            Scenario::Compare => "compare",
        }
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "suppression" => Scenario::Suppression,
            "splitting" => Scenario::Splitting,
            "correlator" => Scenario::Correlator,
            "entangle" | "entanglement" => Scenario::Entangle,
            "compare" => Scenario::Compare,
            other => return Err(Error::Config(format!("unknown scenario '{other}'"))),
        })
    }
}

/// Verdict tolerances; every field can be overridden with `tolerance.<field>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Relative, fitted decay length vs the closed-form ℓ on noiseless data.
    pub fit_ell: f64,
    /// Relative, splitting decay length vs ℓ of the occupied level.
    pub decay_length: f64,
    /// Minimum r² of the splitting fit.
    pub r_squared: f64,
    /// Absolute, in ln C.
    pub quadrature: f64,
    /// Relative, (μ − κ)/κ vs E_b/(4mc²).
    pub nonrel: f64,
    pub entropy: f64,
    pub negativity: f64,
    /// Relative, entanglement-rate decay length vs ℓ/2.
    pub rate_decay: f64,
    /// Relative, exponent difference vs d/ℓ.
    pub exponent_difference: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            fit_ell: 1e-10,
            decay_length: 0.1,
            r_squared: 0.999,
            quadrature: 1e-6,
            nonrel: 1e-9,
            entropy: 1e-9,
            negativity: 1e-9,
            rate_decay: 1e-3,
            exponent_difference: 1e-12,
        }
    }
}

impl Tolerances {
    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "fit_ell" => &mut self.fit_ell,
            "decay_length" => &mut self.decay_length,
            "r_squared" => &mut self.r_squared,
            "quadrature" => &mut self.quadrature,
            "nonrel" => &mut self.nonrel,
            "entropy" => &mut self.entropy,
            "negativity" => &mut self.negativity,
            "rate_decay" => &mut self.rate_decay,
            "exponent_difference" => &mut self.exponent_difference,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub scenario: Option<Scenario>,
    /// kg
    pub mass: f64,
    /// J
    pub binding_energy: f64,
    /// m, or units of ℓ when `separations_in_ell`; `None` selects the scenario default.
    pub separations: Option<Vec<f64>>,
    pub separations_in_ell: bool,
    /// m
    pub well_width: Option<f64>,
    /// J
    pub outer_height: Option<f64>,
    pub grid_points: usize,
    pub dimension: Dimension,
    pub quadrature_tolerance: f64,
    /// J
    pub hopping: f64,
    pub max_phase: Option<f64>,
    /// s
    pub probe_time: Option<f64>,
    /// J
    pub free_binding_energy: f64,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub workers: Option<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            scenario: None,
            mass: 1e-27,
            binding_energy: EV,
            separations: None,
            separations_in_ell: false,
            well_width: None,
            outer_height: None,
            grid_points: 4001,
            dimension: Dimension::One,
            quadrature_tolerance: 1e-8,
            hopping: 1e-3 * EV,
            max_phase: None,
            probe_time: None,
            free_binding_energy: 0.0,
            tolerances: Tolerances::default(),
            seed: 0,
            workers: None,
        }
    }
}

fn number(key: &str, value: &str) -> Result<f64> {
    let x: f64 = value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: '{value}' is not a number")))?;
    if !x.is_finite() {
        return Err(Error::Config(format!("{key}: must be finite")));
    }
    Ok(x)
}

fn integer<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: '{value}' is not a non-negative integer")))
}

fn list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| number(key, s))
        .collect()
}

fn boolean(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected true or false, got '{value}'"))),
    }
}

fn linear_range(value: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    let [start, stop, count] = parts[..] else {
        return Err(Error::Config("separation_range: expected 'start, stop, count'".into()));
    };
    let (start, stop) = (number("separation_range", start)?, number("separation_range", stop)?);
    let count: usize = integer("separation_range", count)?;
    match count {
        0 => Err(Error::Config("separation_range: count must be >= 1".into())),
        1 => Ok(vec![start]),
        _ => Ok((0..count)
            .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
            .collect()),
    }
}

impl SweepConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut seen = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value'", lineno + 1)))?;
            let key = key.trim().to_string();
            if seen.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key '{key}'", lineno + 1)));
            }
        }

        let mut cfg = SweepConfig::default();
        if seen.contains_key("separations") && seen.contains_key("separation_range") {
            return Err(Error::Config(
                "give either separations or separation_range, not both".into(),
            ));
        }
        for (key, value) in &seen {
            let (k, v) = (key.as_str(), value.as_str());
            match k {
                "scenario" => cfg.scenario = Some(v.parse()?),
                "mass" => cfg.mass = number(k, v)?,
                "binding_energy_ev" => cfg.binding_energy = number(k, v)? * EV,
                "separations" => cfg.separations = Some(list(k, v)?),
                "separation_range" => cfg.separations = Some(linear_range(v)?),
                "separations_in_ell" => cfg.separations_in_ell = boolean(k, v)?,
                "well_width" => cfg.well_width = Some(number(k, v)?),
                "outer_height_ev" => cfg.outer_height = Some(number(k, v)? * EV),
                "grid_points" => cfg.grid_points = integer(k, v)?,
                "dimension" => {
                    cfg.dimension = match v {
                        "1" => Dimension::One,
                        "3" => Dimension::Three,
                        _ => return Err(Error::Config(format!("dimension: expected 1 or 3, got '{v}'"))),
                    }
                }
                "quadrature_tolerance" => cfg.quadrature_tolerance = number(k, v)?,
                "hopping_ev" => cfg.hopping = number(k, v)? * EV,
                "max_phase" => cfg.max_phase = Some(number(k, v)?),
                "probe_time" => cfg.probe_time = Some(number(k, v)?),
                "free_binding_energy_ev" => cfg.free_binding_energy = number(k, v)? * EV,
                "seed" => cfg.seed = integer(k, v)?,
                "workers" => cfg.workers = Some(integer(k, v)?),
                _ => match k.strip_prefix("tolerance.") {
                    Some(name) => {
                        let x = number(k, v)?;
                        *cfg.tolerances
                            .slot(name)
                            .ok_or_else(|| Error::Config(format!("unknown tolerance '{name}'")))? = x;
                    }
                    None => return Err(Error::Config(format!("unknown key '{k}'"))),
                },
            }
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Checks everything the chosen scenario needs before any computation.
    pub fn validate(&self, scenario: Scenario) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if let Some(s) = self.scenario {
            if s != scenario {
                return bad(format!(
                    "config is for '{}' but '{}' was requested",
                    s.name(),
                    scenario.name()
                ));
            }
        }
        if !(self.mass > 0.0) {
            return bad(format!("mass must be > 0, got {}", self.mass));
        }
        if !(self.binding_energy >= 0.0) {
            return bad("binding_energy_ev must be >= 0".into());
        }
        if let Some(seps) = &self.separations {
            if seps.is_empty() {
                return bad("separations must be nonempty".into());
            }
            if seps.iter().any(|d| !(*d >= 0.0)) {
                return bad("separations must be >= 0".into());
            }
            let mut sorted = seps.clone();
            sorted.sort_by(f64::total_cmp);
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return bad("separations must be distinct".into());
            }
        }
        if self.workers == Some(0) {
            return bad("workers must be >= 1".into());
        }
        let t = &self.tolerances;
        let all = [
            t.fit_ell,
            t.decay_length,
            t.quadrature,
            t.nonrel,
            t.entropy,
            t.negativity,
            t.rate_decay,
            t.exponent_difference,
        ];
        if all.iter().any(|x| !(*x > 0.0)) {
            return bad("tolerances must be > 0".into());
        }
        if !(t.r_squared > 0.0 && t.r_squared <= 1.0) {
            return bad("tolerance.r_squared must lie in (0, 1]".into());
        }
        let needs_binding = |what: &str| {
            if self.binding_energy > 0.0 {
                Ok(())
            } else {
                bad(format!("{what} needs binding_energy_ev > 0"))
            }
        };

        match scenario {
            Scenario::Suppression => {}
            Scenario::Splitting => {
                needs_binding("the splitting scenario")?;
                if self.grid_points < MIN_POINTS {
                    return bad(format!("grid_points must be >= {MIN_POINTS}"));
                }
                if let Some(w) = self.well_width {
                    if !(w > 0.0) {
                        return bad("well_width must be > 0".into());
                    }
                }
                if let Some(h) = self.outer_height {
                    if !(h >= 0.0) {
                        return bad("outer_height_ev must be >= 0".into());
                    }
                }
                if self.separations.as_ref().is_some_and(|s| s.len() < 4) {
                    return bad("the splitting fit needs at least 4 separations".into());
                }
            }
            Scenario::Correlator => {
                if !(self.quadrature_tolerance > 0.0 && self.quadrature_tolerance < 1.0) {
                    return bad("quadrature_tolerance must lie in (0, 1)".into());
                }
                if self.dimension == Dimension::Three && self.separations.as_ref().is_some_and(|s| s.contains(&0.0)) {
                    return bad("the 3D correlator needs separations > 0".into());
                }
            }
            Scenario::Entangle => {
                needs_binding("the entangle scenario")?;
                if !(self.hopping > 0.0) {
                    return bad("hopping_ev must be > 0".into());
                }
                if self.max_phase.is_some() && self.probe_time.is_some() {
                    return bad("give max_phase or probe_time, not both".into());
                }
                if let Some(p) = self.max_phase {
                    if !(p > 0.0 && p <= MAX_PROBE_PHASE) {
                        return bad(format!("max_phase must lie in (0, {MAX_PROBE_PHASE}]"));
                    }
                }
                if let Some(t) = self.probe_time {
                    if !(t > 0.0) {
                        return bad("probe_time must be > 0".into());
                    }
                }
            }
            Scenario::Compare => {
                if !(self.free_binding_energy >= 0.0) {
                    return bad("free_binding_energy_ev must be >= 0".into());
                }
            }
        }
        Ok(())
    }
}
