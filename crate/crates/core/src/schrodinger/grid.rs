use serde::Serialize;

use crate::error::{invalid, Result};

pub const MIN_POINTS: usize = 16;

/// Uniform grid including both Dirichlet boundary nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(invalid(
                "grid",
                format!("need finite x_max > x_min, got [{x_min}, {x_max}]"),
            ));
        }
        if n_points < MIN_POINTS {
            return Err(invalid(
                "n_points",
                format!("need at least {MIN_POINTS}, got {n_points}"),
            ));
        }
        Ok(Self { x_min, x_max, n_points })
    }

    /// Symmetric grid `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, n_points: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n_points)
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.x_max
        } else {
            self.x_min + i as f64 * self.spacing()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.x(i))
    }

    /// Same extent with the spacing halved (`2n − 1` nodes, old nodes kept).
    pub fn refined(&self) -> Self {
        Self {
            n_points: 2 * self.n_points - 1,
            ..*self
        }
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }
}
