//! Scenario sweeps. Each point is computed independently on a worker pool and
//! the results are sorted by input before anything is emitted.

use rayon::prelude::*;
use serde_json::{json, Value};

use super::config::{Scenario, SweepConfig};
use super::fit::{fit_exponential, FitOutcome};
use super::report::{Flag, PointFailure, Report, Table, Verdict};
use crate::correlator::{
    correlator_quadrature, nonrel_consistency, static_correlator_log, Dimension, PropagatorParams,
    MAX_QUADRATURE_EXPONENT,
};
use crate::entanglement::{mode_entanglement_demo, rate_vs_separation, spectator_transfer_demo, ProbeTimeRule};
use crate::error::{Error, Result};
use crate::physical_scales::{
    evanescent_wavevector, log_suppression, suppression_length, DecayLength, ScaleParams, HBAR, MAX_LINEAR_LOG,
};
use crate::schrodinger::{tunnel_splitting, PotentialSpec};

/// Abort when more than this fraction of points fail.
pub const MAX_FAILURE_FRACTION: f64 = 0.2;
/// Picometer scale, m.
pub const PICOMETER_RANGE: (f64, f64) = (1e-13, 1e-10);
/// Illustrative macroscopic gap, m.
pub const MACROSCOPIC_SEPARATION: f64 = 1e-6;
/// The double-well reference solve that fixes the occupied level uses d = this × ℓ.
pub const REFERENCE_WIDTH_IN_ELL: f64 = 10.0;

pub const AH_LIMIT: &str = "ah_limit_no_suppression";

fn version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

fn module_versions() -> Value {
    let v = version();
    json!({
        "physical_scales": v, "wkb": v, "schrodinger": v,
        "correlator": v, "entanglement": v, "harness": v,
    })
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Run `f` on every separation, in parallel, and return the successes sorted
/// by separation together with the recorded failures.
type SweepOutcome<T> = (Vec<(f64, T)>, Vec<PointFailure>);

fn sweep<T, F>(separations: &[f64], workers: usize, f: F) -> Result<SweepOutcome<T>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync,
{
    let mut sorted = separations.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Scenario(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<(f64, Result<T>)> = pool.install(|| sorted.par_iter().map(|&d| (d, f(d))).collect());
    let mut ok = Vec::new();
    let mut failures = Vec::new();
    for (d, r) in outcomes {
        match r {
            Ok(t) => ok.push((d, t)),
            Err(e) => failures.push(PointFailure {
                separation: d,
                reason: e.to_string(),
            }),
        }
    }
    if failures.len() as f64 > MAX_FAILURE_FRACTION * sorted.len() as f64 {
        return Err(Error::Scenario(format!(
            "{} of {} points failed; first: {}",
            failures.len(),
            sorted.len(),
            failures[0].reason
        )));
    }
    Ok((ok, failures))
}

fn separations(cfg: &SweepConfig, default: &[f64], default_in_ell: bool, ell: Option<f64>) -> Result<Vec<f64>> {
    let (list, in_ell) = match &cfg.separations {
        Some(s) => (s.clone(), cfg.separations_in_ell),
        None => (default.to_vec(), default_in_ell),
    };
    if !in_ell {
        return Ok(list);
    }
    let ell = ell.ok_or_else(|| Error::Config("separations in units of ℓ need a finite ℓ (E_b > 0)".into()))?;
    Ok(list.into_iter().map(|x| x * ell).collect())
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn fit_json(fit: &Option<FitOutcome>) -> Value {
    serde_json::to_value(fit).unwrap_or(Value::Null)
}

pub fn run_scenario(scenario: Scenario, cfg: &SweepConfig, workers: usize) -> Result<Report> {
    cfg.validate(scenario)?;
    if workers == 0 {
        return Err(Error::Config("workers must be >= 1".into()));
    }
    let mut report = match scenario {
        Scenario::Suppression => suppression(cfg, cfg.binding_energy, workers)?,
        Scenario::Splitting => splitting(cfg, workers)?,
        Scenario::Correlator => correlator(cfg, workers)?,
        Scenario::Entangle => entangle(cfg)?,
        Scenario::Compare => {
            let free = suppression(cfg, cfg.free_binding_energy, workers)?;
            let bound = suppression(cfg, cfg.binding_energy, workers)?;
            compare_scenarios(&free, &bound, cfg.tolerances.exponent_difference)?
        }
    };
    if let Value::Object(map) = &mut report.inputs {
        map.insert("seed".into(), json!(cfg.seed));
        map.insert("module_versions".into(), module_versions());
    }
    Ok(report)
}

fn suppression(cfg: &SweepConfig, binding_energy: f64, workers: usize) -> Result<Report> {
    let base = ScaleParams::new(cfg.mass, binding_energy, 0.0)?;
    let kappa = evanescent_wavevector(&base)?;
    let ell = suppression_length(&base)?;
    let seps = separations(cfg, &[MACROSCOPIC_SEPARATION], false, ell.finite())?;
    let (points, failures) = sweep(&seps, workers, |d| log_suppression(&base.with_separation(d)))?;

    let mut table = Table::new(&["separation_m", "d_over_ell", "log_amplitude"]);
    for &(d, log_a) in &points {
        table.push(vec![Some(d), Some(d * kappa), Some(log_a)]);
    }

    let mut verdicts = Vec::new();
    let mut flags = Vec::new();
    let mut fit = None;
    match ell {
        DecayLength::Infinite => flags.push(Flag::new(AH_LIMIT, "AH limit: no suppression")),
        DecayLength::Finite(l) => {
            let (lo, hi) = PICOMETER_RANGE;
            verdicts.push(Verdict::new(
                "picometer_scale",
                "picometer scale",
                l,
                format!("{lo:e} <= ell_m <= {hi:e}"),
                (lo..=hi).contains(&l),
            ));
            if points.len() >= 4 {
                let samples: Vec<(f64, f64)> = points.to_vec();
                let outcome = fit_exponential(&samples)?;
                let fitted = outcome.decay().map(|f| f.decay_length).unwrap_or(f64::INFINITY);
                verdicts.push(Verdict::relative(
                    "fit_ell",
                    "fit recovers ell",
                    fitted,
                    l,
                    cfg.tolerances.fit_ell,
                ));
                fit = Some(outcome);
            }
        }
    }
    let headline: Vec<Value> = points
        .iter()
        .map(|&(d, log_a)| {
            json!({
                "separation_m": d,
                "log_amplitude": log_a,
                "amplitude": if -log_a <= MAX_LINEAR_LOG { Some(log_a.exp()) } else { None },
            })
        })
        .collect();
    Ok(Report {
        scenario: Scenario::Suppression.name().into(),
        version: version(),
        inputs: json!({
            "mass_kg": cfg.mass,
            "binding_energy_j": binding_energy,
            "separations_m": seps,
        }),
        results: json!({
            "kappa_per_m": kappa,
            "ell_m": ell.finite(),
            "points": headline,
        }),
        fits: json!({ "log_amplitude_vs_separation": fit_json(&fit) }),
        verdicts,
        point_failures: failures,
        flags,
        table,
    })
}

/// Double well with barrier height E_b above the well floor.
fn double_well(cfg: &SweepConfig, well_width: f64, barrier_width: f64) -> Result<PotentialSpec> {
    PotentialSpec::double_well(
        well_width,
        barrier_width,
        cfg.binding_energy,
        cfg.outer_height.unwrap_or(cfg.binding_energy),
    )
}

fn splitting(cfg: &SweepConfig, workers: usize) -> Result<Report> {
    let base = ScaleParams::new(cfg.mass, cfg.binding_energy, 0.0)?;
    let ell_bare = suppression_length(&base)?.value();
    let well_width = cfg.well_width.unwrap_or(4.0 * ell_bare);

    // The tunneling particle sits at the well level, so its effective binding
    // is the barrier top minus that level.
    let reference = double_well(cfg, well_width, REFERENCE_WIDTH_IN_ELL * ell_bare)?;
    let grid = reference.default_grid(cfg.mass, cfg.grid_points)?;
    let level = tunnel_splitting(&reference, cfg.mass, &grid)?;
    let occupied = 0.5 * (level.e0 + level.e1);
    let binding_eff = cfg.binding_energy - occupied;
    if binding_eff.is_nan() || binding_eff <= 0.0 {
        return Err(Error::Scenario(format!(
            "occupied level {occupied:e} J is not below the barrier top"
        )));
    }
    let ell_eff = HBAR / (2.0 * cfg.mass * binding_eff).sqrt();

    let seps = separations(cfg, &linspace(3.0, 10.0, 8), true, Some(ell_eff))?;
    let (points, failures) = sweep(&seps, workers, |d| {
        let pot = double_well(cfg, well_width, d)?;
        let grid = pot.default_grid(cfg.mass, cfg.grid_points)?;
        let s = tunnel_splitting(&pot, cfg.mass, &grid)?;
        if !s.is_clean() || s.splitting <= 0.0 {
            let labels: Vec<&str> = s.flags.iter().map(|f| f.label()).collect();
            return Err(Error::Scenario(format!("unusable splitting: {}", labels.join(", "))));
        }
        Ok(s)
    })?;

    let mut table = Table::new(&[
        "barrier_width_m",
        "d_over_ell_eff",
        "e0_j",
        "e1_j",
        "splitting_j",
        "log_splitting",
    ]);
    let mut flags = Vec::new();
    for (d, s) in &points {
        table.push(vec![
            Some(*d),
            Some(d / ell_eff),
            Some(s.e0),
            Some(s.e1),
            Some(s.splitting),
            Some(s.splitting.ln()),
        ]);
        for f in &s.flags {
            if !flags.iter().any(|x: &Flag| x.code == f.label()) {
                flags.push(Flag::new(f.label(), "reported by at least one point"));
            }
        }
    }
    let samples: Vec<(f64, f64)> = points.iter().map(|(d, s)| (*d, s.splitting.ln())).collect();
    let fit = fit_exponential(&samples)?;
    let t = &cfg.tolerances;
    let verdicts = match fit.decay() {
        Some(f) => vec![
            Verdict::relative(
                "decay_length",
                "splitting decay length",
                f.decay_length,
                ell_eff,
                t.decay_length,
            ),
            Verdict::new(
                "r_squared",
                "splitting fit quality",
                f.r_squared,
                format!("r_squared >= {}", t.r_squared),
                f.r_squared >= t.r_squared,
            ),
        ],
        None => vec![Verdict::new(
            "decay_length",
            "splitting decay length",
            f64::INFINITY,
            "a decaying fit".into(),
            false,
        )],
    };
    Ok(Report {
        scenario: Scenario::Splitting.name().into(),
        version: version(),
        inputs: json!({
            "mass_kg": cfg.mass,
            "barrier_height_j": cfg.binding_energy,
            "outer_height_j": cfg.outer_height.unwrap_or(cfg.binding_energy),
            "well_width_m": well_width,
            "grid_points": cfg.grid_points,
            "barrier_widths_m": seps,
        }),
        results: json!({
            "ell_bare_m": ell_bare,
            "occupied_level_j": occupied,
            "binding_energy_eff_j": binding_eff,
            "ell_eff_m": ell_eff,
        }),
        fits: json!({ "log_splitting_vs_width": fit_json(&Some(fit)) }),
        verdicts,
        point_failures: failures,
        flags,
        table,
    })
}

struct CorrelatorPoint {
    analytic: f64,
    quadrature: Option<(f64, f64)>,
}

fn correlator(cfg: &SweepConfig, workers: usize) -> Result<Report> {
    let params = PropagatorParams::new(cfg.mass, cfg.binding_energy, cfg.dimension)?;
    let mu = params.decay_rate()?;
    let ell = (mu > 0.0).then(|| 1.0 / mu);
    let seps = separations(cfg, &[0.5, 1.0, 2.0, 5.0, 10.0], true, ell)?;
    let use_quadrature = cfg.dimension == Dimension::One && mu > 0.0;
    let (points, failures) = sweep(&seps, workers, |d| {
        let analytic = static_correlator_log(&params, d)?.log_value;
        let quadrature = if use_quadrature && d > 0.0 && mu * d <= MAX_QUADRATURE_EXPONENT {
            let q = correlator_quadrature(&params, d, cfg.quadrature_tolerance)?;
            Some((q.log_value, q.error_estimate.unwrap_or(f64::NAN)))
        } else {
            None
        };
        Ok(CorrelatorPoint { analytic, quadrature })
    })?;

    // Residue value of the 1D integral: ln(π/μ) − μd.
    let offset = std::f64::consts::PI.ln();
    let mut table = Table::new(&[
        "separation_m",
        "mu_times_d",
        "log_correlator",
        "log_quadrature",
        "quadrature_abs_diff",
        "quadrature_error_estimate",
    ]);
    let mut worst = None::<f64>;
    for (d, p) in &points {
        let (q, diff, est) = match p.quadrature {
            Some((q, est)) => {
                let diff = (q - (offset - mu.ln() + p.analytic)).abs();
                worst = Some(worst.map_or(diff, |w| w.max(diff)));
                (Some(q), Some(diff), Some(est))
            }
            None => (None, None, None),
        };
        table.push(vec![Some(*d), Some(mu * d), Some(p.analytic), q, diff, est]);
    }

    let mut verdicts = Vec::new();
    let mut flags = Vec::new();
    let mut results = json!({ "mu_per_m": mu });
    if cfg.binding_energy == 0.0 {
        flags.push(Flag::new(AH_LIMIT, "AH limit: no suppression"));
    } else {
        let nr = nonrel_consistency(&params)?;
        results["nonrel"] = serde_json::to_value(nr)?;
        verdicts.push(Verdict::relative(
            "nonrel",
            "shifted-pole consistency",
            nr.relative_error,
            nr.first_order,
            cfg.tolerances.nonrel,
        ));
        if !nr.approximation_valid {
            flags.push(Flag::new(
                "nonrelativistic_approximation_invalid",
                "E_b is not small compared to mc²",
            ));
        }
    }
    if let Some(w) = worst {
        verdicts.push(Verdict::absolute(
            "quadrature",
            "quadrature vs residue",
            w,
            0.0,
            cfg.tolerances.quadrature,
        ));
    }
    let fit = if cfg.dimension == Dimension::One && points.len() >= 4 {
        let samples: Vec<(f64, f64)> = points.iter().map(|(d, p)| (*d, p.analytic)).collect();
        Some(fit_exponential(&samples)?)
    } else {
        None
    };
    Ok(Report {
        scenario: Scenario::Correlator.name().into(),
        version: version(),
        inputs: json!({
            "mass_kg": cfg.mass,
            "binding_energy_j": cfg.binding_energy,
            "dimension": cfg.dimension,
            "quadrature_tolerance": cfg.quadrature_tolerance,
            "separations_m": seps,
        }),
        results,
        fits: json!({ "log_correlator_vs_separation": fit_json(&fit) }),
        verdicts,
        point_failures: failures,
        flags,
        table,
    })
}

fn entangle(cfg: &SweepConfig) -> Result<Report> {
    let base = ScaleParams::new(cfg.mass, cfg.binding_energy, 0.0)?;
    let ell = suppression_length(&base)?.value();
    let seps = separations(cfg, &linspace(1.0, 5.0, 9), true, Some(ell))?;
    let rule = match (cfg.probe_time, cfg.max_phase) {
        (Some(t), _) => ProbeTimeRule::FixedTime(t),
        (None, Some(p)) => ProbeTimeRule::MaxPhase(p),
        (None, None) => ProbeTimeRule::MaxPhase(crate::entanglement::MAX_PROBE_PHASE),
    };
    let sweep = rate_vs_separation(&base, cfg.hopping, &seps, rule)?;

    let mut table = Table::new(&[
        "separation_m",
        "log_hopping",
        "log_transfer_probability",
        "mode_entropy_bits",
        "mode_negativity",
    ]);
    let mut points = sweep.points.clone();
    points.sort_by(|a, b| a.separation.total_cmp(&b.separation));
    for p in &points {
        table.push(vec![
            Some(p.separation),
            Some(p.log_hopping),
            Some(p.log_probability),
            Some(p.entropy),
            Some(p.negativity),
        ]);
    }

    let t = &cfg.tolerances;
    let quarter = std::f64::consts::FRAC_PI_4 * HBAR / cfg.hopping;
    let half = std::f64::consts::FRAC_PI_2 * HBAR / cfg.hopping;
    let mode = mode_entanglement_demo(cfg.hopping, quarter)?;
    let spectator = spectator_transfer_demo(cfg.hopping, half)?;
    let mut verdicts = vec![
        Verdict::absolute(
            "entropy",
            "mode entropy at Jt/hbar = pi/4",
            mode.entropy,
            1.0,
            t.entropy,
        ),
        Verdict::absolute(
            "negativity",
            "spectator negativity at full transfer",
            spectator.negativity,
            0.5,
            t.negativity,
        ),
    ];
    if let Some(fit) = sweep.fit.as_ref() {
        let fitted = fit.decay().map(|f| f.decay_length).unwrap_or(f64::INFINITY);
        verdicts.push(Verdict::relative(
            "rate_decay",
            "entanglement rate decay length",
            fitted,
            0.5 * ell,
            t.rate_decay,
        ));
    }
    Ok(Report {
        scenario: Scenario::Entangle.name().into(),
        version: version(),
        inputs: json!({
            "mass_kg": cfg.mass,
            "binding_energy_j": cfg.binding_energy,
            "hopping_j": cfg.hopping,
            "probe_rule": rule,
            "separations_m": seps,
        }),
        results: json!({
            "ell_m": ell,
            "probe_time_s": sweep.probe_time,
            "mode_demo": mode,
            "spectator_demo": spectator,
        }),
        fits: json!({ "log_probability_vs_separation": fit_json(&sweep.fit) }),
        verdicts,
        point_failures: Vec::new(),
        flags: Vec::new(),
        table,
    })
}

fn column(report: &Report, name: &str) -> Result<Vec<f64>> {
    report
        .table
        .column(name)
        .ok_or_else(|| Error::Scenario(format!("{} report has no '{name}' column", report.scenario)))?
        .into_iter()
        .map(|c| c.ok_or_else(|| Error::Scenario(format!("missing value in '{name}'"))))
        .collect()
}

/// Side-by-side log amplitudes of a free and a bound suppression report.
/// `exponent_difference` is ln A_free − ln A_bound.
pub fn compare_scenarios(free: &Report, bound: &Report, tolerance: f64) -> Result<Report> {
    let (df, db) = (column(free, "separation_m")?, column(bound, "separation_m")?);
    if df != db {
        return Err(Error::Scenario("reports were computed at different separations".into()));
    }
    let (lf, lb) = (column(free, "log_amplitude")?, column(bound, "log_amplitude")?);
    let kappa = |r: &Report| r.results["kappa_per_m"].as_f64().unwrap_or(f64::NAN);
    let expected_rate = kappa(bound) - kappa(free);

    let mut table = Table::new(&[
        "separation_m",
        "log_amplitude_free",
        "log_amplitude_bound",
        "exponent_difference",
        "exponent_ratio",
    ]);
    let mut worst = 0.0f64;
    for i in 0..df.len() {
        let diff = lf[i] - lb[i];
        let ratio = (lf[i] != 0.0).then(|| lb[i] / lf[i]);
        table.push(vec![Some(df[i]), Some(lf[i]), Some(lb[i]), Some(diff), ratio]);
        let expected = df[i] * expected_rate;
        let err = if expected != 0.0 {
            ((diff - expected) / expected).abs()
        } else {
            diff.abs()
        };
        worst = worst.max(err);
    }
    let mut flags = free.flags.clone();
    for f in &bound.flags {
        if !flags.contains(f) {
            flags.push(f.clone());
        }
    }
    let mut failures = free.point_failures.clone();
    failures.extend(bound.point_failures.iter().cloned());
    Ok(Report {
        scenario: Scenario::Compare.name().into(),
        version: version(),
        inputs: json!({ "free": free.inputs, "bound": bound.inputs }),
        results: json!({
            "kappa_free_per_m": kappa(free),
            "kappa_bound_per_m": kappa(bound),
            "separations_m": df,
            "exponent_difference": table.column("exponent_difference"),
        }),
        fits: Value::Null,
        verdicts: vec![Verdict::new(
            "exponent_difference",
            "exponent difference equals d times the kappa difference",
            worst,
            format!("max relative deviation <= {tolerance:e}"),
            worst <= tolerance,
        )],
        point_failures: failures,
        flags,
        table,
    })
}
