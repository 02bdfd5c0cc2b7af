//! Transmission through 1D barriers, closed form and transfer matrices.
//!
//! The transfer matrix acts on `(ψ, ψ'/k)` with `k` the free wavenumber, so
//! all entries are real and dimensionless. Evanescent segments with
//! `κw > LOG_DOMAIN_ARGUMENT` factor out `e^{κw}` into a running log scale,
//! which keeps macroscopic barriers finite.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::physical_scales::HBAR;
use crate::wkb::BarrierProfile;

pub const LOG_DOMAIN_ARGUMENT: f64 = 350.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatteringResult {
    pub transmission: f64,
    pub reflection: f64,
    /// ln T, finite even when `transmission` underflows.
    pub log_transmission: f64,
    /// J
    pub energy: f64,
}

/// `ln(1 + eˣ)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `ln sinh(x)` for `x ≥ 0`.
fn ln_sinh(x: f64) -> f64 {
    if x > 20.0 {
        x + (-(-2.0 * x).exp()).ln_1p() - std::f64::consts::LN_2
    } else {
        x.sinh().ln()
    }
}

/// Exact T for a flat barrier of `height` and `width`, `0 < energy < height`.
pub fn transmission_rectangular(energy: f64, height: f64, width: f64, mass: f64) -> Result<ScatteringResult> {
    if !(energy > 0.0 && energy < height && height.is_finite()) {
        return Err(Error::OutsideTunnelingWindow { energy, height });
    }
    if !(width.is_finite() && width >= 0.0) {
        return Err(invalid("width", format!("must be finite and >= 0, got {width}")));
    }
    if !(mass.is_finite() && mass > 0.0) {
        return Err(invalid("mass", format!("must be > 0, got {mass}")));
    }
    let k2 = 2.0 * mass * energy / (HBAR * HBAR);
    let q2 = 2.0 * mass * (height - energy) / (HBAR * HBAR);
    let kappa = q2.sqrt();
    // L = ln[(k²+κ²)² sinh²(κa) / (4k²κ²)]
    let prefactor = ((k2 + q2) * (k2 + q2) / (4.0 * k2 * q2)).ln();
    let l = prefactor + 2.0 * ln_sinh(kappa * width);
    let log_t = -softplus(l);
    Ok(ScatteringResult {
        transmission: log_t.exp(),
        reflection: (-softplus(-l)).exp(),
        log_transmission: log_t,
        energy,
    })
}

/// 2×2 real matrix times `e^{scale}`.
#[derive(Debug, Clone, Copy)]
struct Scaled {
    m: [[f64; 2]; 2],
    scale: f64,
}

impl Scaled {
    fn identity() -> Self {
        Self {
            m: [[1.0, 0.0], [0.0, 1.0]],
            scale: 0.0,
        }
    }

    /// `other · self`
    fn then(self, other: Scaled) -> Self {
        let a = other.m;
        let b = self.m;
        let mut m = [[0.0; 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        let norm = m.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let mut scale = self.scale + other.scale;
        if norm > 0.0 && norm.is_finite() {
            m.iter_mut().flatten().for_each(|v| *v /= norm);
            scale += norm.ln();
        }
        Self { m, scale }
    }
}

/// Segment of width `w` with `q² = 2m(E − V)/ħ²`, in `(ψ, ψ'/k)` units.
fn segment_matrix(q2: f64, width: f64, k: f64) -> Scaled {
    if q2 > 0.0 {
        let q = q2.sqrt();
        let (s, c) = (q * width).sin_cos();
        Scaled {
            m: [[c, k * s / q], [-q * s / k, c]],
            scale: 0.0,
        }
    } else if q2 < 0.0 {
        let kappa = (-q2).sqrt();
        let x = kappa * width;
        if x > LOG_DOMAIN_ARGUMENT {
            let t = (-2.0 * x).exp();
            let c = 0.5 * (1.0 + t);
            let s = 0.5 * (1.0 - t);
            Scaled {
                m: [[c, k * s / kappa], [kappa * s / k, c]],
                scale: x,
            }
        } else {
            let (s, c) = (x.sinh(), x.cosh());
            Scaled {
                m: [[c, k * s / kappa], [kappa * s / k, c]],
                scale: 0.0,
            }
        }
    } else {
        Scaled {
            m: [[1.0, k * width], [0.0, 1.0]],
            scale: 0.0,
        }
    }
}

/// Piecewise-constant `(width, V)` pieces covering the profile extent.
/// Sampled profiles use the midpoint of each linear panel.
fn pieces(profile: &BarrierProfile) -> Vec<(f64, f64)> {
    match profile {
        BarrierProfile::Segments { segments, .. } => {
            let mut out = Vec::with_capacity(2 * segments.len());
            let mut cursor = segments[0].start;
            for s in segments {
                if s.start > cursor {
                    out.push((s.start - cursor, 0.0));
                }
                out.push((s.end - s.start, s.potential));
                cursor = s.end;
            }
            out
        }
        BarrierProfile::Samples { samples, .. } => samples
            .windows(2)
            .map(|w| (w[1].0 - w[0].0, 0.5 * (w[0].1 + w[1].1)))
            .collect(),
    }
}

/// Transfer-matrix T and R for a profile embedded in V = 0.
pub fn transmission_numeric(profile: &BarrierProfile, energy: f64) -> Result<ScatteringResult> {
    profile.validate()?;
    if !(energy.is_finite() && energy > 0.0) {
        return Err(invalid("energy", format!("must be finite and > 0, got {energy}")));
    }
    let mass = profile.mass();
    let inv = 2.0 * mass / (HBAR * HBAR);
    let k = (inv * energy).sqrt();
    let total = pieces(profile).into_iter().fold(Scaled::identity(), |acc, (w, v)| {
        acc.then(segment_matrix(inv * (energy - v), w, k))
    });
    let [[m11, m12], [m21, m22]] = total.m;
    let denom = (m12 - m21).powi(2) + (m11 + m22).powi(2);
    let log_t = 4.0f64.ln() - 2.0 * total.scale - denom.ln();
    let reflection = ((m22 - m11).powi(2) + (m12 + m21).powi(2)) / denom;
    Ok(ScatteringResult {
        transmission: log_t.exp(),
        reflection,
        log_transmission: log_t,
        energy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physical_scales::EV;
    use crate::wkb::Segment;
    use approx::assert_relative_eq;

    const M: f64 = 1e-27;

    #[test]
    fn single_segment_matches_closed_form() {
        for (e, a) in [(0.1, 5e-12), (0.5, 1e-11), (0.9, 3e-11), (0.3, 1e-13)] {
            let exact = transmission_rectangular(e * EV, EV, a, M).unwrap();
            let tm = transmission_numeric(&BarrierProfile::rectangular(EV, a, M).unwrap(), e * EV).unwrap();
            assert_relative_eq!(tm.transmission, exact.transmission, max_relative = 1e-9);
            assert!((tm.transmission + tm.reflection - 1.0).abs() < 1e-9);
            assert!((exact.transmission + exact.reflection - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn vanishing_barrier_transmits() {
        let r = transmission_rectangular(0.5 * EV, EV, 0.0, M).unwrap();
        assert_eq!(r.transmission, 1.0);
        assert_eq!(r.reflection, 0.0);
        let flat = BarrierProfile::rectangular(0.0, 1e-10, M).unwrap();
        let r = transmission_numeric(&flat, 0.3 * EV).unwrap();
        assert!((r.transmission - 1.0).abs() < 1e-14);
        assert!(r.reflection.abs() < 1e-14);
    }

    #[test]
    fn macroscopic_barrier_stays_in_log_domain() {
        let a = 1e-6;
        let exact = transmission_rectangular(0.1 * EV, EV, a, M).unwrap();
        let tm = transmission_numeric(&BarrierProfile::rectangular(EV, a, M).unwrap(), 0.1 * EV).unwrap();
        assert_eq!(exact.transmission, 0.0);
        assert!(exact.log_transmission.is_finite());
        assert_relative_eq!(tm.log_transmission, exact.log_transmission, max_relative = 1e-12);
        assert!((tm.reflection - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_above_barrier() {
        assert!(transmission_rectangular(EV, EV, 1e-11, M).is_err());
        assert!(transmission_rectangular(0.0, EV, 1e-11, M).is_err());
        let p = BarrierProfile::rectangular(EV, 1e-11, M).unwrap();
        assert!(transmission_numeric(&p, 0.0).is_err());
    }

    #[test]
    fn segment_gaps_are_free_propagation() {
        let joined = BarrierProfile::segments(
            vec![
                Segment {
                    start: 0.0,
                    end: 1e-11,
                    potential: EV,
                },
                Segment {
                    start: 1e-11,
                    end: 3e-11,
                    potential: 0.0,
                },
                Segment {
                    start: 3e-11,
                    end: 4e-11,
                    potential: EV,
                },
            ],
            M,
        )
        .unwrap();
        let gapped = BarrierProfile::segments(
            vec![
                Segment {
                    start: 0.0,
                    end: 1e-11,
                    potential: EV,
                },
                Segment {
                    start: 3e-11,
                    end: 4e-11,
                    potential: EV,
                },
            ],
            M,
        )
        .unwrap();
        let a = transmission_numeric(&joined, 0.4 * EV).unwrap();
        let b = transmission_numeric(&gapped, 0.4 * EV).unwrap();
        assert_relative_eq!(a.transmission, b.transmission, max_relative = 1e-12);
    }
}
