use serde::Serialize;

use crate::error::{invalid, Result};
use crate::physical_scales::HBAR;
use crate::wkb::{BarrierProfile, Segment};

use super::grid::Grid1D;

/// Padding beyond the outermost classical turning point, in decay lengths.
pub const PADDING_DECAY_LENGTHS: f64 = 8.0;

/// 1D potential landscapes. Energies in J, lengths in m.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialSpec {
    /// Two wells of floor 0 and width `well_width`, separated by a barrier of
    /// `barrier_height` and width `barrier_width`, centred on x = 0. Outside
    /// the wells the potential sits at `well_depth`.
    DoubleWell {
        well_width: f64,
        barrier_width: f64,
        barrier_height: f64,
        well_depth: f64,
    },
    /// Flat barrier on `[-barrier_width/2, barrier_width/2]`, zero elsewhere.
    RectangularBarrier { barrier_width: f64, barrier_height: f64 },
    /// Linear interpolation between `(x, V)` samples, held constant past the ends.
    CustomSamples { samples: Vec<(f64, f64)> },
}

impl PotentialSpec {
    pub fn double_well(well_width: f64, barrier_width: f64, barrier_height: f64, well_depth: f64) -> Result<Self> {
        let p = PotentialSpec::DoubleWell {
            well_width,
            barrier_width,
            barrier_height,
            well_depth,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn custom(samples: Vec<(f64, f64)>) -> Result<Self> {
        let p = PotentialSpec::CustomSamples { samples };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(invalid(name, format!("must be finite and > 0, got {v}")))
            }
        };
        match self {
            PotentialSpec::DoubleWell {
                well_width,
                barrier_width,
                barrier_height,
                well_depth,
            } => {
                positive("well_width", *well_width)?;
                positive("barrier_width", *barrier_width)?;
                positive("barrier_height", *barrier_height)?;
                positive("well_depth", *well_depth)
            }
            PotentialSpec::RectangularBarrier {
                barrier_width,
                barrier_height,
            } => {
                positive("barrier_width", *barrier_width)?;
                if barrier_height.is_finite() {
                    Ok(())
                } else {
                    Err(invalid("barrier_height", "must be finite"))
                }
            }
            PotentialSpec::CustomSamples { samples } => {
                if samples.len() < 2 {
                    return Err(invalid("samples", "need at least two samples"));
                }
                if samples.iter().any(|(x, v)| !(x.is_finite() && v.is_finite())) {
                    return Err(invalid("samples", "non-finite sample"));
                }
                if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(invalid("samples", "positions must be strictly increasing"));
                }
                Ok(())
            }
        }
    }

    /// Pointwise value V(x).
    pub fn value(&self, x: f64) -> f64 {
        match self {
            PotentialSpec::DoubleWell {
                well_width,
                barrier_width,
                barrier_height,
                well_depth,
            } => {
                let ax = x.abs();
                let inner = 0.5 * barrier_width;
                if ax < inner {
                    *barrier_height
                } else if ax <= inner + well_width {
                    0.0
                } else {
                    *well_depth
                }
            }
            PotentialSpec::RectangularBarrier {
                barrier_width,
                barrier_height,
            } => {
                if x.abs() < 0.5 * barrier_width {
                    *barrier_height
                } else {
                    0.0
                }
            }
            PotentialSpec::CustomSamples { samples } => {
                let n = samples.len();
                if x <= samples[0].0 {
                    return samples[0].1;
                }
                if x >= samples[n - 1].0 {
                    return samples[n - 1].1;
                }
                let i = samples.partition_point(|s| s.0 <= x);
                let (xa, va) = samples[i - 1];
                let (xb, vb) = samples[i];
                va + (vb - va) * (x - xa) / (xb - xa)
            }
        }
    }

    /// Piecewise-constant breakpoints as `(position, value to the right)`.
    fn steps(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            PotentialSpec::DoubleWell {
                well_width,
                barrier_width,
                barrier_height,
                well_depth,
            } => {
                let a = 0.5 * barrier_width;
                let b = a + well_width;
                Some(vec![
                    (f64::NEG_INFINITY, *well_depth),
                    (-b, 0.0),
                    (-a, *barrier_height),
                    (a, 0.0),
                    (b, *well_depth),
                ])
            }
            PotentialSpec::RectangularBarrier {
                barrier_width,
                barrier_height,
            } => {
                let a = 0.5 * barrier_width;
                Some(vec![(f64::NEG_INFINITY, 0.0), (-a, *barrier_height), (a, 0.0)])
            }
            PotentialSpec::CustomSamples { .. } => None,
        }
    }

    /// Values on the grid nodes. Piecewise-constant kinds are averaged over
    /// each node's cell `[x − h/2, x + h/2]`, so that a step moving between
    /// nodes changes the discrete operator continuously.
    pub fn sample(&self, grid: &Grid1D) -> Vec<f64> {
        let h = grid.spacing();
        match self.steps() {
            None => grid.nodes().map(|x| self.value(x)).collect(),
            Some(steps) => grid
                .nodes()
                .map(|x| {
                    let (lo, hi) = (x - 0.5 * h, x + 0.5 * h);
                    let mut acc = 0.0;
                    for (k, &(start, v)) in steps.iter().enumerate() {
                        let end = steps.get(k + 1).map_or(f64::INFINITY, |s| s.0);
                        let overlap = end.min(hi) - start.max(lo);
                        if overlap > 0.0 {
                            acc += v * overlap;
                        }
                    }
                    acc / h
                })
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        match self {
            PotentialSpec::DoubleWell {
                barrier_height,
                well_depth,
                ..
            } => barrier_height.abs().max(well_depth.abs()),
            PotentialSpec::RectangularBarrier { barrier_height, .. } => barrier_height.abs(),
            PotentialSpec::CustomSamples { samples } => samples.iter().map(|s| s.1.abs()).fold(0.0, f64::max),
        }
    }

    pub fn is_mirror_symmetric(&self) -> bool {
        match self {
            PotentialSpec::DoubleWell { .. } | PotentialSpec::RectangularBarrier { .. } => true,
            PotentialSpec::CustomSamples { samples } => {
                let n = samples.len();
                (0..n).all(|i| {
                    let (x, v) = samples[i];
                    let (xm, vm) = samples[n - 1 - i];
                    (x + xm).abs() <= 1e-12 * x.abs().max(1e-300) && (v - vm).abs() <= 1e-12 * v.abs().max(1e-300)
                })
            }
        }
    }

    /// Barrier top for the splitting regime check.
    pub fn barrier_height(&self) -> Option<f64> {
        match self {
            PotentialSpec::DoubleWell { barrier_height, .. }
            | PotentialSpec::RectangularBarrier { barrier_height, .. } => Some(*barrier_height),
            PotentialSpec::CustomSamples { .. } => None,
        }
    }

    /// Scattering profile for the transfer-matrix solver (V → 0 outside).
    pub fn to_profile(&self, mass: f64) -> Result<BarrierProfile> {
        match self {
            PotentialSpec::RectangularBarrier {
                barrier_width,
                barrier_height,
            } => BarrierProfile::segments(
                vec![Segment {
                    start: -0.5 * barrier_width,
                    end: 0.5 * barrier_width,
                    potential: *barrier_height,
                }],
                mass,
            ),
            PotentialSpec::CustomSamples { samples } => BarrierProfile::samples(samples.clone(), mass),
            PotentialSpec::DoubleWell { .. } => Err(invalid(
                "potential",
                "double well has no asymptotically free region; not a scattering profile",
            )),
        }
    }

    /// Grid covering the wells plus the Dirichlet padding.
    ///
    /// The outer decay length is estimated from the infinite-well ground level,
    /// an upper bound on the true level, so the padding errs long.
    pub fn default_grid(&self, mass: f64, n_points: usize) -> Result<Grid1D> {
        self.validate()?;
        match self {
            PotentialSpec::DoubleWell {
                well_width,
                barrier_width,
                well_depth,
                ..
            } => {
                let box_level = (std::f64::consts::PI * HBAR / well_width).powi(2) / (2.0 * mass);
                let level = box_level.min(0.9 * well_depth);
                let decay = HBAR / (2.0 * mass * (well_depth - level)).sqrt();
                let half = 0.5 * barrier_width + well_width + PADDING_DECAY_LENGTHS * decay;
                Grid1D::symmetric(half, n_points)
            }
            PotentialSpec::RectangularBarrier { barrier_width, .. } => Grid1D::symmetric(2.0 * barrier_width, n_points),
            PotentialSpec::CustomSamples { samples } => {
                Grid1D::new(samples[0].0, samples[samples.len() - 1].0, n_points)
            }
        }
    }
}
