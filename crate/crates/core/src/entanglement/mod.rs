//! Entanglement carried by a hopping-only (tunneling) channel.
//!
//! No term in any Hamiltonian here couples the bodies other than particle
//! hopping, yet a separable start becomes entangled across the spatial cut
//! and pre-existing local entanglement ends up shared between the bodies.

mod measures;
mod state;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

pub use measures::{entropy_bits, evolve, negativity, partial_trace, partial_transpose, von_neumann_entropy};
pub use state::{CMatrix, CVector, DensityMatrix, StateVector, MAX_DIMENSION};

use crate::error::{invalid, Result};
use crate::harness::fit::{fit_exponential, FitOutcome};
use crate::physical_scales::{suppression_length, ScaleParams, HBAR};

/// Which subsystems belong to each body.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bipartition {
    pub body_a: Vec<String>,
    pub body_b: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntanglementReport {
    /// Entanglement entropy across the body cut, bits.
    pub entropy: f64,
    pub negativity: f64,
    /// Probability that the mobile particle sits in body B.
    pub transfer_probability: f64,
    pub bipartition: Bipartition,
}

/// H = −J (|A⟩⟨B| + |B⟩⟨A|).
pub fn two_level_hopping(j_hop: f64) -> CMatrix {
    let z = Complex64::new(0.0, 0.0);
    let off = Complex64::new(-j_hop, 0.0);
    CMatrix::from_row_slice(2, 2, &[z, off, off, z])
}

fn check_hopping(j_hop: f64, time: f64) -> Result<()> {
    if !(j_hop.is_finite() && j_hop >= 0.0) {
        return Err(invalid("j_hop", format!("must be finite and >= 0, got {j_hop}")));
    }
    if !time.is_finite() {
        return Err(invalid("time", "must be finite"));
    }
    Ok(())
}

/// A single particle starting in body A, with the bodies' occupation modes
/// as the two subsystems.
pub fn mode_entanglement_demo(j_hop: f64, time: f64) -> Result<EntanglementReport> {
    check_hopping(j_hop, time)?;
    let start = StateVector::basis(0, vec![2])?;
    let psi = evolve(&two_level_hopping(j_hop), &start, time)?;
    let (ca, cb) = (psi.amplitudes()[0], psi.amplitudes()[1]);
    // Occupation basis |n_A n_B⟩: |A⟩ → |10⟩, |B⟩ → |01⟩.
    let zero = Complex64::new(0.0, 0.0);
    let modes = StateVector::new(DVector::from_vec(vec![zero, cb, ca, zero]), vec![2, 2])?;
    let rho = modes.density();
    let reduced = partial_trace(&rho, &[0])?;
    Ok(EntanglementReport {
        entropy: von_neumann_entropy(&reduced)?,
        negativity: negativity(&rho, &[1])?,
        transfer_probability: cb.norm_sqr(),
        bipartition: Bipartition {
            body_a: vec!["mode_a".into()],
            body_b: vec!["mode_b".into()],
        },
    })
}

/// The 8-dimensional spectator ⊗ internal ⊗ position state after hopping.
pub fn spectator_state(j_hop: f64, time: f64) -> Result<StateVector> {
    check_hopping(j_hop, time)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let bell = DVector::from_vec(
        vec![s, 0.0, 0.0, s]
            .into_iter()
            .map(|x| Complex64::new(x, 0.0))
            .collect(),
    );
    let at_a = DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    let start = StateVector::new(bell.kronecker(&at_a), vec![2, 2, 2])?;
    // Hopping acts on the position factor only.
    let h = CMatrix::identity(4, 4).kronecker(&two_level_hopping(j_hop));
    evolve(&h, &start, time)
}

/// Re-express the spectator state in body modes: spectator (2) ⊗ body-A slot
/// (3) ⊗ body-B slot (3), where a slot is empty or holds the particle with
/// internal state 0 or 1.
pub fn embed_in_body_modes(psi: &StateVector) -> Result<StateVector> {
    let mut out = DVector::from_element(18, Complex64::new(0.0, 0.0));
    for spectator in 0..2 {
        for internal in 0..2 {
            for position in 0..2 {
                let amp = psi.amplitudes()[spectator * 4 + internal * 2 + position];
                let (slot_a, slot_b) = if position == 0 {
                    (1 + internal, 0)
                } else {
                    (0, 1 + internal)
                };
                out[spectator * 9 + slot_a * 3 + slot_b] += amp;
            }
        }
    }
    StateVector::new(out, vec![2, 3, 3])
}

/// Dephase body B's particle number: the state an observer at B can access
/// without violating number superselection.
pub fn project_body_b_number(psi: &StateVector) -> Result<DensityMatrix> {
    let pure = psi.density();
    let m = pure.matrix();
    let n = m.nrows();
    let occupied = |i: usize| !i.is_multiple_of(3);
    let mut out = CMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            if occupied(r) == occupied(c) {
                out[(r, c)] = m[(r, c)];
            }
        }
    }
    DensityMatrix::new(out, vec![2, 3, 3])
}

/// A mobile particle whose internal qubit is maximally entangled with a
/// spectator fixed in body A hops to body B. Negativity is evaluated across
/// body A (spectator plus A slot) versus body B (B slot), after projecting
/// on body B's particle number.
pub fn spectator_transfer_demo(j_hop: f64, time: f64) -> Result<EntanglementReport> {
    let psi = spectator_state(j_hop, time)?;
    let transfer_probability = (0..8)
        .filter(|i| i % 2 == 1)
        .map(|i| psi.amplitudes()[i].norm_sqr())
        .sum();
    let modes = embed_in_body_modes(&psi)?;
    let rho = project_body_b_number(&modes)?;
    let body_b = partial_trace(&rho, &[2])?;
    Ok(EntanglementReport {
        entropy: von_neumann_entropy(&body_b)?,
        negativity: negativity(&rho, &[2])?,
        transfer_probability,
        bipartition: Bipartition {
            body_a: vec!["spectator".into(), "slot_a".into()],
            body_b: vec!["slot_b".into()],
        },
    })
}

/// How the probe time is chosen for [`rate_vs_separation`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "rule", content = "value", rename_all = "snake_case")]
pub enum ProbeTimeRule {
    /// Fixed t in seconds.
    FixedTime(f64),
    /// t chosen so the smallest separation reaches this phase J t/ħ.
    MaxPhase(f64),
}

/// Largest phase for which the small-angle sweep is considered perturbative.
pub const MAX_PROBE_PHASE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePoint {
    pub separation: f64,
    /// ln(J/1 J)
    pub log_hopping: f64,
    /// ln p, p = sin²(J t/ħ)
    pub log_probability: f64,
    /// Mode entropy, bits.
    pub entropy: f64,
    pub negativity: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RateSweep {
    pub points: Vec<RatePoint>,
    /// s
    pub probe_time: f64,
    pub fit: Option<FitOutcome>,
}

/// ln|sin θ| from ln θ without underflow.
fn log_sin_from_log(log_theta: f64) -> f64 {
    let theta = log_theta.exp();
    if log_theta < -10.0 {
        let t2 = theta * theta;
        log_theta + (-t2 / 6.0 + t2 * t2 / 120.0).ln_1p()
    } else {
        theta.sin().abs().ln()
    }
}

/// Short-time entanglement growth as the hopping is suppressed by the gap:
/// J(d) = J₀ e^{−d/ℓ}, all in log domain.
pub fn rate_vs_separation(base: &ScaleParams, j0: f64, separations: &[f64], rule: ProbeTimeRule) -> Result<RateSweep> {
    if !(j0.is_finite() && j0 > 0.0) {
        return Err(invalid("j0", format!("must be finite and > 0, got {j0}")));
    }
    if separations.is_empty() || separations.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
        return Err(invalid("separations", "need finite non-negative separations"));
    }
    let inv_ell = 1.0 / suppression_length(base)?.value();
    let log_j = |d: f64| j0.ln() - d * inv_ell;
    let log_time = match rule {
        ProbeTimeRule::FixedTime(t) => {
            if !(t.is_finite() && t > 0.0) {
                return Err(invalid("probe_time", format!("must be > 0, got {t}")));
            }
            t.ln()
        }
        ProbeTimeRule::MaxPhase(theta) => {
            if !(theta > 0.0 && theta <= MAX_PROBE_PHASE) {
                return Err(invalid(
                    "max_phase",
                    format!("must lie in (0, {MAX_PROBE_PHASE}], got {theta}"),
                ));
            }
            let d_min = separations.iter().copied().fold(f64::INFINITY, f64::min);
            theta.ln() + HBAR.ln() - log_j(d_min)
        }
    };
    let points: Vec<RatePoint> = separations
        .iter()
        .map(|&d| {
            let lj = log_j(d);
            let log_theta = lj + log_time - HBAR.ln();
            let log_p = 2.0 * log_sin_from_log(log_theta);
            let p = log_p.exp();
            let theta = log_theta.exp();
            RatePoint {
                separation: d,
                log_hopping: lj,
                log_probability: log_p,
                entropy: entropy_bits(&[p, 1.0 - p]),
                negativity: 0.5 * (2.0 * theta).sin().abs(),
            }
        })
        .collect();
    let samples: Vec<(f64, f64)> = points.iter().map(|p| (p.separation, p.log_probability)).collect();
    let fit = if samples.len() >= 4 {
        Some(fit_exponential(&samples)?)
    } else {
        None
    };
    Ok(RateSweep {
        points,
        probe_time: log_time.exp(),
        fit,
    })
}
