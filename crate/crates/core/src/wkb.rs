//! WKB action over the classically forbidden part of a 1D barrier.
//!
//! Two profile flavours are accepted. Piecewise-constant segments are
//! integrated exactly, segment by segment. Sampled profiles are read as the
//! piecewise-linear interpolant of their samples; on each linear panel
//! `∫√(V−E)` has a closed form, so the action of the interpolant is exact and
//! turning points fall out of the same interpolation.
//!
//! Outside the profile extent (and in gaps between segments) the potential is
//! taken to be zero. Prefactors of the WKB amplitude are not included.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::physical_scales::{EV, HBAR};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    /// m
    pub start: f64,
    /// m
    pub end: f64,
    /// J
    pub potential: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BarrierProfile {
    Segments {
        segments: Vec<Segment>,
        mass: f64,
    },
    /// `(x [m], V [J])` pairs.
    Samples {
        samples: Vec<(f64, f64)>,
        mass: f64,
    },
}

impl BarrierProfile {
    pub fn segments(segments: Vec<Segment>, mass: f64) -> Result<Self> {
        let p = BarrierProfile::Segments { segments, mass };
        p.validate()?;
        Ok(p)
    }

    pub fn samples(samples: Vec<(f64, f64)>, mass: f64) -> Result<Self> {
        let p = BarrierProfile::Samples { samples, mass };
        p.validate()?;
        Ok(p)
    }

    /// Single flat barrier of `height` over `[0, width]`.
    pub fn rectangular(height: f64, width: f64, mass: f64) -> Result<Self> {
        Self::segments(
            vec![Segment {
                start: 0.0,
                end: width,
                potential: height,
            }],
            mass,
        )
    }

    /// Parse the two-column text format: `x [m]  V [eV]`, `#` starts a comment.
    pub fn parse_samples_ev(text: &str, mass: f64) -> Result<Self> {
        let mut samples = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty());
            let parse = |s: Option<&str>| -> Result<f64> {
                s.ok_or_else(|| Error::InvalidProfile(format!("line {}: expected two columns", lineno + 1)))?
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidProfile(format!("line {}: {e}", lineno + 1)))
            };
            let x = parse(cols.next())?;
            let v = parse(cols.next())?;
            if cols.next().is_some() {
                return Err(Error::InvalidProfile(format!(
                    "line {}: more than two columns",
                    lineno + 1
                )));
            }
            samples.push((x, v * EV));
        }
        Self::samples(samples, mass)
    }

    pub fn mass(&self) -> f64 {
        match self {
            BarrierProfile::Segments { mass, .. } | BarrierProfile::Samples { mass, .. } => *mass,
        }
    }

    /// `(x_min, x_max)` of the profile.
    pub fn extent(&self) -> (f64, f64) {
        match self {
            BarrierProfile::Segments { segments, .. } => (segments[0].start, segments[segments.len() - 1].end),
            BarrierProfile::Samples { samples, .. } => (samples[0].0, samples[samples.len() - 1].0),
        }
    }

    pub fn max_potential(&self) -> f64 {
        match self {
            BarrierProfile::Segments { segments, .. } => segments.iter().map(|s| s.potential).fold(0.0, f64::max),
            BarrierProfile::Samples { samples, .. } => samples.iter().map(|s| s.1).fold(0.0, f64::max),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mass = self.mass();
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidProfile(format!("mass must be > 0, got {mass}")));
        }
        match self {
            BarrierProfile::Segments { segments, .. } => {
                if segments.is_empty() {
                    return Err(Error::InvalidProfile("no segments".into()));
                }
                for (i, s) in segments.iter().enumerate() {
                    if !(s.start.is_finite() && s.end.is_finite() && s.potential.is_finite()) {
                        return Err(Error::InvalidProfile(format!("segment {i} is not finite")));
                    }
                    if s.end <= s.start {
                        return Err(Error::InvalidProfile(format!("segment {i} has non-positive width")));
                    }
                }
                if let Some(i) = segments.windows(2).position(|w| w[1].start < w[0].end) {
                    return Err(Error::InvalidProfile(format!("segments {i} and {} overlap", i + 1)));
                }
            }
            BarrierProfile::Samples { samples, .. } => {
                if samples.len() < 2 {
                    return Err(Error::InvalidProfile("need at least two samples".into()));
                }
                if samples.iter().any(|(x, v)| !(x.is_finite() && v.is_finite())) {
                    return Err(Error::InvalidProfile("non-finite sample".into()));
                }
                if let Some(i) = samples.windows(2).position(|w| w[1].0 <= w[0].0) {
                    return Err(Error::InvalidProfile(format!(
                        "sample positions must be strictly increasing (index {})",
                        i + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Potential at `x`; zero outside the profile and in segment gaps.
    pub fn potential_at(&self, x: f64) -> f64 {
        match self {
            BarrierProfile::Segments { segments, .. } => segments
                .iter()
                .find(|s| x >= s.start && x < s.end)
                .map_or(0.0, |s| s.potential),
            BarrierProfile::Samples { samples, .. } => {
                let (x0, x1) = (samples[0].0, samples[samples.len() - 1].0);
                if x < x0 || x > x1 {
                    return 0.0;
                }
                let i = samples.partition_point(|s| s.0 <= x).clamp(1, samples.len() - 1);
                let (xa, va) = samples[i - 1];
                let (xb, vb) = samples[i];
                va + (vb - va) * (x - xa) / (xb - xa)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WkbResult {
    /// ∫ κ(x) dx over the forbidden region.
    pub action: f64,
    /// −action (amplitude convention).
    pub log_amplitude: f64,
    /// m
    pub turning_points: Vec<f64>,
}

pub fn wkb_action(profile: &BarrierProfile, energy: f64) -> Result<WkbResult> {
    profile.validate()?;
    if !energy.is_finite() {
        return Err(Error::InvalidProfile(format!("energy must be finite, got {energy}")));
    }
    let two_m = 2.0 * profile.mass();
    let (action, turning_points) = match profile {
        BarrierProfile::Segments { segments, .. } => segment_action(segments, two_m, energy),
        BarrierProfile::Samples { samples, .. } => sampled_action(samples, two_m, energy),
    };
    Ok(WkbResult {
        action,
        log_amplitude: -action,
        turning_points,
    })
}

/// ln T = −2·action.
pub fn wkb_log_transmission(profile: &BarrierProfile, energy: f64) -> Result<f64> {
    Ok(-2.0 * wkb_action(profile, energy)?.action)
}

fn segment_action(segments: &[Segment], two_m: f64, energy: f64) -> (f64, Vec<f64>) {
    let mut action = 0.0;
    let mut turning = Vec::new();
    // The region left of the profile is at V = 0.
    let mut forbidden = 0.0 > energy;
    let mut cursor = segments[0].start;
    for s in segments {
        if s.start > cursor {
            // gap at V = 0
            let gap_forbidden = 0.0 > energy;
            if gap_forbidden != forbidden {
                turning.push(cursor);
            }
            forbidden = gap_forbidden;
        }
        let seg_forbidden = s.potential > energy;
        if seg_forbidden != forbidden {
            turning.push(s.start);
        }
        forbidden = seg_forbidden;
        if seg_forbidden {
            action += (two_m * (s.potential - energy)).sqrt() / HBAR * (s.end - s.start);
        }
        cursor = s.end;
    }
    if forbidden != (0.0 > energy) {
        turning.push(cursor);
    }
    (action, turning)
}

/// ∫₀ᴸ √g(x) dx for g linear from `g0` to `g1` (both ≥ 0).
fn linear_panel(g0: f64, g1: f64, len: f64) -> f64 {
    let (a, b) = (g0.sqrt(), g1.sqrt());
    if a + b == 0.0 {
        return 0.0;
    }
    // (2/3) L (b³ − a³)/(b² − a²), written without the cancellation.
    2.0 / 3.0 * len * (a * a + a * b + b * b) / (a + b)
}

fn sampled_action(samples: &[(f64, f64)], two_m: f64, energy: f64) -> (f64, Vec<f64>) {
    let mut integral = 0.0;
    let mut turning = Vec::new();
    let outside_forbidden = 0.0 > energy;
    if (samples[0].1 > energy) != outside_forbidden {
        turning.push(samples[0].0);
    }
    for w in samples.windows(2) {
        let (x0, v0) = w[0];
        let (x1, v1) = w[1];
        let (g0, g1) = (v0 - energy, v1 - energy);
        let len = x1 - x0;
        match (g0 > 0.0, g1 > 0.0) {
            (true, true) => integral += linear_panel(g0, g1, len),
            (false, false) => {}
            (true, false) => {
                let xt = x0 + len * g0 / (g0 - g1);
                turning.push(xt);
                integral += linear_panel(g0, 0.0, xt - x0);
            }
            (false, true) => {
                let xt = if g0 == 0.0 { x0 } else { x0 + len * g0 / (g0 - g1) };
                turning.push(xt);
                integral += linear_panel(0.0, g1, x1 - xt);
            }
        }
    }
    let last = samples[samples.len() - 1];
    if (last.1 > energy) != outside_forbidden {
        turning.push(last.0);
    }
    (integral * two_m.sqrt() / HBAR, turning)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physical_scales::{log_suppression, ScaleParams};
    use approx::assert_relative_eq;

    const M: f64 = 1e-27;

    #[test]
    fn flat_barrier_matches_closed_form_exactly() {
        let eb = 0.7 * EV;
        let e = 0.2 * EV;
        let d = 3e-11;
        let p = BarrierProfile::rectangular(e + eb, d, M).unwrap();
        let r = wkb_action(&p, e).unwrap();
        let expected = -log_suppression(&ScaleParams::new(M, (e + eb) - e, d).unwrap()).unwrap();
        assert_eq!(r.action, expected);
        assert_eq!(r.log_amplitude, -r.action);
        assert_eq!(r.turning_points, vec![0.0, d]);
    }

    #[test]
    fn no_forbidden_region() {
        let p = BarrierProfile::rectangular(EV, 1e-11, M).unwrap();
        let r = wkb_action(&p, 2.0 * EV).unwrap();
        assert_eq!(r.action, 0.0);
        assert_eq!(r.log_amplitude, 0.0);
        assert!(r.turning_points.is_empty());
        assert_eq!(wkb_log_transmission(&p, 2.0 * EV).unwrap(), 0.0);
    }

    #[test]
    fn triangular_barrier_closed_form() {
        // (2/3)√(2 m V0) a/ħ for V0 = 1 eV, a = 10 pm (40-digit quadrature: 1.1316256291555076)
        let a = 1e-11;
        let samples = vec![(0.0, EV), (a, 0.0)];
        let p = BarrierProfile::samples(samples, M).unwrap();
        let r = wkb_action(&p, 0.0).unwrap();
        assert_relative_eq!(r.action, 1.131_625_629_155_507_6, max_relative = 1e-13);
        assert_eq!(r.turning_points.len(), 2);
        assert_relative_eq!(r.turning_points[1], a);
    }

    #[test]
    fn log_transmission_is_twice_action() {
        let p = BarrierProfile::rectangular(EV, 1e-11, M).unwrap();
        let kd = wkb_action(&p, 0.0).unwrap().action;
        assert_eq!(wkb_log_transmission(&p, 0.0).unwrap(), -2.0 * kd);
    }

    #[test]
    fn split_flat_barrier_is_additive() {
        let whole = BarrierProfile::rectangular(EV, 2e-11, M).unwrap();
        let split = BarrierProfile::segments(
            vec![
                Segment {
                    start: 0.0,
                    end: 7e-12,
                    potential: EV,
                },
                Segment {
                    start: 7e-12,
                    end: 2e-11,
                    potential: EV,
                },
            ],
            M,
        )
        .unwrap();
        let a = wkb_action(&whole, 0.1 * EV).unwrap().action;
        let b = wkb_action(&split, 0.1 * EV).unwrap().action;
        assert_relative_eq!(a, b, max_relative = 1e-14);
        assert_eq!(wkb_action(&split, 0.1 * EV).unwrap().turning_points.len(), 2);
    }

    #[test]
    fn turning_points_interpolated() {
        // V rises linearly 0 → 2 eV on [0, 1e-11]; E = 0.5 eV crosses at x = 2.5e-12.
        let p = BarrierProfile::samples(vec![(0.0, 0.0), (1e-11, 2.0 * EV), (2e-11, 0.0)], M).unwrap();
        let r = wkb_action(&p, 0.5 * EV).unwrap();
        assert_eq!(r.turning_points.len(), 2);
        assert_relative_eq!(r.turning_points[0], 2.5e-12, max_relative = 1e-12);
        assert_relative_eq!(r.turning_points[1], 1.75e-11, max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_profiles() {
        assert!(BarrierProfile::samples(vec![(0.0, 1.0)], M).is_err());
        assert!(BarrierProfile::samples(vec![(1.0, 1.0), (0.0, 1.0)], M).is_err());
        assert!(BarrierProfile::segments(vec![], M).is_err());
        assert!(BarrierProfile::segments(
            vec![
                Segment {
                    start: 0.0,
                    end: 2.0,
                    potential: 1.0
                },
                Segment {
                    start: 1.0,
                    end: 3.0,
                    potential: 1.0
                },
            ],
            M
        )
        .is_err());
        assert!(BarrierProfile::rectangular(1.0, 0.0, M).is_err());
        assert!(BarrierProfile::rectangular(1.0, 1.0, 0.0).is_err());
        let p = BarrierProfile::rectangular(EV, 1e-11, M).unwrap();
        assert!(wkb_action(&p, f64::NAN).is_err());
    }

    #[test]
    fn parses_two_column_ev_text() {
        let text = "# x[m] V[eV]\n0.0 0.0\n1e-11   2.0  # peak\n\n2e-11,0\n";
        let p = BarrierProfile::parse_samples_ev(text, M).unwrap();
        match &p {
            BarrierProfile::Samples { samples, .. } => {
                assert_eq!(samples.len(), 3);
                assert_relative_eq!(samples[1].1, 2.0 * EV);
            }
            _ => unreachable!(),
        }
        assert!(BarrierProfile::parse_samples_ev("0 1 2\n1 1", M).is_err());
        assert!(BarrierProfile::parse_samples_ev("0 x\n1 1", M).is_err());
    }
}
