//! Finite-difference 1D quantum mechanics: spectra, double-well splittings,
//! wavepacket transfer and transfer-matrix scattering.

mod dynamics;
mod grid;
mod potential;
mod scattering;
pub mod tridiag;

use serde::Serialize;

pub use dynamics::{crank_nicolson_transfer, TransferCheck};
pub use grid::{Grid1D, MIN_POINTS};
pub use potential::{PotentialSpec, PADDING_DECAY_LENGTHS};
pub use scattering::{transmission_numeric, transmission_rectangular, ScatteringResult, LOG_DOMAIN_ARGUMENT};
pub use tridiag::{SymTridiagonal, EIGENVALUE_RTOL};

use crate::error::{invalid, Result};
use crate::physical_scales::HBAR;

/// Splittings below `RESOLUTION_FACTOR × EIGENVALUE_RTOL × |E₀|` are noise.
pub const RESOLUTION_FACTOR: f64 = 1e3;
/// The kinetic scale ħ²/(2mh²) must exceed this multiple of max|V|.
pub const KINETIC_DOMINANCE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverWarning {
    /// ħ²/(2mh²) < 10·max|V|.
    CoarseGrid,
}

/// Three-point Hamiltonian on the interior nodes of a Dirichlet grid.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    pub matrix: SymTridiagonal,
    pub grid: Grid1D,
    pub potential: Vec<f64>,
    pub mass: f64,
    pub warnings: Vec<SolverWarning>,
}

pub fn build_hamiltonian(grid: &Grid1D, potential: &PotentialSpec, mass: f64) -> Result<Hamiltonian> {
    potential.validate()?;
    if !(mass.is_finite() && mass > 0.0) {
        return Err(invalid("mass", format!("must be > 0, got {mass}")));
    }
    hamiltonian_from_values(grid, potential.sample(grid), mass)
}

/// Hamiltonian from potential values already sampled on every grid node.
pub fn hamiltonian_from_values(grid: &Grid1D, values: Vec<f64>, mass: f64) -> Result<Hamiltonian> {
    if values.len() != grid.n_points {
        return Err(crate::error::Error::DimensionMismatch {
            expected: grid.n_points,
            got: values.len(),
        });
    }
    let h = grid.spacing();
    let kinetic = HBAR * HBAR / (2.0 * mass * h * h);
    let interior = &values[1..grid.n_points - 1];
    let diagonal = interior.iter().map(|v| 2.0 * kinetic + v).collect();
    let off_diagonal = vec![-kinetic; interior.len() - 1];
    let max_v = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut warnings = Vec::new();
    if kinetic < KINETIC_DOMINANCE * max_v {
        warnings.push(SolverWarning::CoarseGrid);
    }
    Ok(Hamiltonian {
        matrix: SymTridiagonal::new(diagonal, off_diagonal)?,
        grid: *grid,
        potential: values,
        mass,
        warnings,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumResult {
    /// J, ascending.
    pub eigenvalues: Vec<f64>,
    /// Full-grid wavefunctions (boundary nodes are zero), `h Σ ψ² = 1`.
    pub eigenvectors: Vec<Vec<f64>>,
    pub grid: Grid1D,
    /// Final bisection bracket per eigenvalue, J.
    pub brackets: Vec<f64>,
    pub warnings: Vec<SolverWarning>,
}

impl SpectrumResult {
    /// Signed overlap `h Σ ψ(x) ψ(−x)` of eigenvector `i` with its mirror image.
    pub fn parity(&self, i: usize) -> f64 {
        let v = &self.eigenvectors[i];
        let h = self.grid.spacing();
        h * v.iter().zip(v.iter().rev()).map(|(a, b)| a * b).sum::<f64>()
    }
}

pub fn lowest_eigenpairs(hamiltonian: &Hamiltonian, k: usize) -> Result<SpectrumResult> {
    let dim = hamiltonian.matrix.dim();
    if k == 0 || k > dim {
        return Err(invalid("k", format!("need 1 <= k <= {dim}, got {k}")));
    }
    let h = hamiltonian.grid.spacing();
    let mut eigenvalues: Vec<f64> = Vec::with_capacity(k);
    let mut brackets = Vec::with_capacity(k);
    let mut unit_vectors: Vec<Vec<f64>> = Vec::with_capacity(k);
    for i in 0..k {
        let (lambda, width) = hamiltonian.matrix.eigenvalue(i)?;
        // Only near-degenerate partners need explicit orthogonalization.
        let cluster: Vec<Vec<f64>> = eigenvalues
            .iter()
            .zip(&unit_vectors)
            .filter(|(mu, _)| (lambda - **mu).abs() < 1e-3 * lambda.abs().max(f64::MIN_POSITIVE))
            .map(|(_, v)| v.clone())
            .collect();
        let mut v = hamiltonian.matrix.eigenvector(lambda, &cluster);
        // Sign convention: the first lobe reaching a tenth of the peak is positive.
        let peak = v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let lead = v.iter().copied().find(|x| x.abs() >= 0.1 * peak).unwrap_or(0.0);
        if lead < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        eigenvalues.push(lambda);
        brackets.push(width);
        unit_vectors.push(v);
    }
    let scale = 1.0 / h.sqrt();
    let eigenvectors = unit_vectors
        .into_iter()
        .map(|v| {
            let mut full = Vec::with_capacity(dim + 2);
            full.push(0.0);
            full.extend(v.into_iter().map(|x| x * scale));
            full.push(0.0);
            full
        })
        .collect();
    Ok(SpectrumResult {
        eigenvalues,
        eigenvectors,
        grid: hamiltonian.grid,
        brackets,
        warnings: hamiltonian.warnings.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SplittingFlag {
    /// E₁ lies above the barrier top.
    NotTunnelingRegime,
    /// ΔE is within the eigenvalue noise floor.
    BelowResolution,
    CoarseGrid,
}

impl SplittingFlag {
    pub fn label(&self) -> &'static str {
        match self {
            SplittingFlag::NotTunnelingRegime => "not_in_tunneling_regime",
            SplittingFlag::BelowResolution => "below_resolution",
            SplittingFlag::CoarseGrid => "coarse_grid",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SplittingResult {
    pub e0: f64,
    pub e1: f64,
    /// ΔE = E₁ − E₀, J.
    pub splitting: f64,
    pub flags: Vec<SplittingFlag>,
}

impl SplittingResult {
    /// True when the splitting is a trustworthy tunneling measurement.
    pub fn is_clean(&self) -> bool {
        !self
            .flags
            .iter()
            .any(|f| matches!(f, SplittingFlag::BelowResolution | SplittingFlag::NotTunnelingRegime))
    }
}

pub fn tunnel_splitting(potential: &PotentialSpec, mass: f64, grid: &Grid1D) -> Result<SplittingResult> {
    let ham = build_hamiltonian(grid, potential, mass)?;
    let spectrum = lowest_eigenpairs(&ham, 2)?;
    let (e0, e1) = (spectrum.eigenvalues[0], spectrum.eigenvalues[1]);
    let splitting = (e1 - e0).max(0.0);
    let mut flags = Vec::new();
    if let Some(top) = potential.barrier_height() {
        if e1 > top {
            flags.push(SplittingFlag::NotTunnelingRegime);
        }
    }
    if splitting <= RESOLUTION_FACTOR * EIGENVALUE_RTOL * e0.abs() {
        flags.push(SplittingFlag::BelowResolution);
    }
    if ham.warnings.contains(&SolverWarning::CoarseGrid) {
        flags.push(SplittingFlag::CoarseGrid);
    }
    Ok(SplittingResult {
        e0,
        e1,
        splitting,
        flags,
    })
}

/// Two-level hopping amplitude J = ΔE/2.
pub fn effective_hopping(splitting: f64) -> Result<f64> {
    if !(splitting.is_finite() && splitting >= 0.0) {
        return Err(invalid(
            "splitting",
            format!("must be finite and >= 0, got {splitting}"),
        ));
    }
    Ok(0.5 * splitting)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physical_scales::EV;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    const M: f64 = 1e-27;

    fn flat_box(n: usize, width: f64) -> (Grid1D, PotentialSpec) {
        let grid = Grid1D::new(0.0, width, n).unwrap();
        let pot = PotentialSpec::custom(vec![(0.0, 0.0), (width, 0.0)]).unwrap();
        (grid, pot)
    }

    #[test]
    fn particle_in_a_box() {
        let l = 1e-10;
        let (grid, pot) = flat_box(200, l);
        let ham = build_hamiltonian(&grid, &pot, M).unwrap();
        let s = lowest_eigenpairs(&ham, 1).unwrap();
        let exact = PI * PI * HBAR * HBAR / (2.0 * M * l * l);
        assert_relative_eq!(s.eigenvalues[0], exact, max_relative = 1e-2);
        let h = grid.spacing();
        let norm: f64 = s.eigenvectors[0].iter().map(|x| x * x).sum::<f64>() * h;
        assert!((norm - 1.0).abs() < 1e-10);
        assert_eq!(s.eigenvectors[0].len(), 200);
    }

    #[test]
    fn constant_shift_moves_every_level() {
        let l = 1e-10;
        let grid = Grid1D::new(0.0, l, 300).unwrap();
        let base = PotentialSpec::custom(vec![(0.0, 0.0), (0.5 * l, 0.3 * EV), (l, 0.0)]).unwrap();
        let c = 0.25 * EV;
        let shifted = PotentialSpec::custom(vec![(0.0, c), (0.5 * l, 0.3 * EV + c), (l, c)]).unwrap();
        let a = lowest_eigenpairs(&build_hamiltonian(&grid, &base, M).unwrap(), 3).unwrap();
        let b = lowest_eigenpairs(&build_hamiltonian(&grid, &shifted, M).unwrap(), 3).unwrap();
        for i in 0..3 {
            assert_relative_eq!(b.eigenvalues[i] - a.eigenvalues[i], c, max_relative = 1e-9);
            let diff = a.eigenvectors[i]
                .iter()
                .zip(&b.eigenvectors[i])
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            let peak = a.eigenvectors[i].iter().fold(0.0f64, |m, x| m.max(x.abs()));
            assert!(diff < 1e-6 * peak);
        }
    }

    #[test]
    fn parity_of_symmetric_double_well() {
        let pot = PotentialSpec::double_well(3e-11, 1e-11, EV, EV).unwrap();
        let grid = pot.default_grid(M, 801).unwrap();
        let s = lowest_eigenpairs(&build_hamiltonian(&grid, &pot, M).unwrap(), 4).unwrap();
        for i in 0..4 {
            let expected = if i % 2 == 0 { 1.0 } else { -1.0 };
            assert!((s.parity(i) - expected).abs() < 1e-8, "state {i}: {}", s.parity(i));
        }
        assert!(s.eigenvalues.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn harmonic_ladder() {
        let omega = 1e14;
        let x0 = (HBAR / (M * omega)).sqrt();
        let half = 12.0 * x0;
        let n = 2001;
        let samples: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let x = -half + 2.0 * half * i as f64 / (n - 1) as f64;
                (x, 0.5 * M * omega * omega * x * x)
            })
            .collect();
        let pot = PotentialSpec::custom(samples).unwrap();
        let grid = Grid1D::symmetric(half, n).unwrap();
        let s = lowest_eigenpairs(&build_hamiltonian(&grid, &pot, M).unwrap(), 4).unwrap();
        let quantum = HBAR * omega;
        for w in s.eigenvalues.windows(2) {
            assert_relative_eq!(w[1] - w[0], quantum, max_relative = 5e-3);
        }
    }

    #[test]
    fn single_eigenpair_is_normalized_ground_state() {
        let (grid, pot) = flat_box(64, 1e-10);
        let s = lowest_eigenpairs(&build_hamiltonian(&grid, &pot, M).unwrap(), 1).unwrap();
        assert_eq!(s.eigenvalues.len(), 1);
        assert!(s.eigenvectors[0].iter().all(|x| *x >= 0.0));
    }

    #[test]
    fn splitting_shrinks_with_barrier_width() {
        let mut last = f64::INFINITY;
        for d in [0.5e-11, 1e-11, 1.5e-11, 2e-11] {
            let pot = PotentialSpec::double_well(3e-11, d, EV, EV).unwrap();
            let grid = pot.default_grid(M, 2001).unwrap();
            let r = tunnel_splitting(&pot, M, &grid).unwrap();
            assert!(r.splitting < last);
            assert!(r.is_clean(), "{:?}", r.flags);
            last = r.splitting;
        }
    }

    #[test]
    fn merged_wells_split_like_a_single_well() {
        // Barrier at the well floor: one well of width 2w + d.
        let w = 3e-11;
        let d = 1e-12;
        let pot = PotentialSpec::custom(vec![
            (-0.5 * d - w - 1e-11, 50.0 * EV),
            (-0.5 * d - w, 50.0 * EV),
            (-0.5 * d - w + 1e-15, 0.0),
            (0.5 * d + w - 1e-15, 0.0),
            (0.5 * d + w, 50.0 * EV),
            (0.5 * d + w + 1e-11, 50.0 * EV),
        ])
        .unwrap();
        let grid = Grid1D::symmetric(0.5 * d + w + 1e-11, 3001).unwrap();
        let r = tunnel_splitting(&pot, M, &grid).unwrap();
        let width = 2.0 * w + d;
        let box_gap = 3.0 * PI * PI * HBAR * HBAR / (2.0 * M * width * width);
        assert_relative_eq!(r.splitting, box_gap, max_relative = 0.05);
    }

    #[test]
    fn flags_above_barrier_and_resolution() {
        // Low barrier: E₁ above it.
        let pot = PotentialSpec::double_well(3e-11, 1e-11, 0.01 * EV, EV).unwrap();
        let grid = pot.default_grid(M, 1001).unwrap();
        let r = tunnel_splitting(&pot, M, &grid).unwrap();
        assert!(r.flags.contains(&SplittingFlag::NotTunnelingRegime));
        // Huge barrier width: levels degenerate to the noise floor.
        let pot = PotentialSpec::double_well(3e-11, 6e-10, 1.0 * EV, EV).unwrap();
        let grid = pot.default_grid(M, 20001).unwrap();
        let r = tunnel_splitting(&pot, M, &grid).unwrap();
        assert!(r.flags.contains(&SplittingFlag::BelowResolution));
    }

    #[test]
    fn coarse_grid_is_flagged() {
        let pot = PotentialSpec::double_well(3e-11, 1e-11, 1e3 * EV, 1e3 * EV).unwrap();
        let grid = pot.default_grid(M, 64).unwrap();
        let ham = build_hamiltonian(&grid, &pot, M).unwrap();
        assert!(ham.warnings.contains(&SolverWarning::CoarseGrid));
    }

    #[test]
    fn hopping_two_level_reduction() {
        assert_eq!(effective_hopping(0.0).unwrap(), 0.0);
        let split = 3.7e-22;
        let j = effective_hopping(split).unwrap();
        let m = nalgebra::Matrix2::new(0.0, -j, -j, 0.0);
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_relative_eq!(ev[1] - ev[0], split, max_relative = 1e-14);
        assert!(effective_hopping(-1.0).is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(Grid1D::new(0.0, 1.0, 8).is_err());
        assert!(Grid1D::new(1.0, 0.0, 100).is_err());
        assert!(PotentialSpec::double_well(1.0, 0.0, 1.0, 1.0).is_err());
        assert!(PotentialSpec::double_well(1.0, 1.0, -1.0, 1.0).is_err());
        let (grid, pot) = flat_box(64, 1e-10);
        let ham = build_hamiltonian(&grid, &pot, M).unwrap();
        assert!(lowest_eigenpairs(&ham, 0).is_err());
        assert!(build_hamiltonian(&grid, &pot, 0.0).is_err());
    }
}
