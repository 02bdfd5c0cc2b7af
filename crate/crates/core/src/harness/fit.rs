//! Ordinary least squares on `(d, ln A)`.

use serde::Serialize;

use crate::error::{Error, Result};

pub const MIN_FIT_POINTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    /// −1/slope, m.
    pub decay_length: f64,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
    /// Largest |residual| in ln A.
    pub residual_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum FitOutcome {
    Decay(FitResult),
    /// Slope ≥ 0: nothing to report as a decay length.
    NoDecay {
        slope: f64,
        intercept: f64,
        r_squared: f64,
        n_points: usize,
    },
}

impl FitOutcome {
    pub fn decay(&self) -> Option<&FitResult> {
        match self {
            FitOutcome::Decay(f) => Some(f),
            FitOutcome::NoDecay { .. } => None,
        }
    }
}

pub fn fit_exponential(samples: &[(f64, f64)]) -> Result<FitOutcome> {
    let n = samples.len();
    if n < MIN_FIT_POINTS {
        return Err(Error::Fit(format!("need at least {MIN_FIT_POINTS} points, got {n}")));
    }
    if samples.iter().any(|(x, y)| !(x.is_finite() && y.is_finite())) {
        return Err(Error::Fit("non-finite sample".into()));
    }
    let mut xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
    xs.sort_by(f64::total_cmp);
    if xs.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Fit("separations must be distinct".into()));
    }

    let nf = n as f64;
    let mean_x = samples.iter().map(|s| s.0).sum::<f64>() / nf;
    let mean_y = samples.iter().map(|s| s.1).sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in samples {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residuals = samples.iter().map(|&(x, y)| y - (intercept + slope * x));
    let (ss_res, residual_max) = residuals.fold((0.0, 0.0f64), |(s, m), r| (s + r * r, m.max(r.abs())));
    let r_squared = if syy > 0.0 {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else if ss_res == 0.0 {
        1.0
    } else {
        0.0
    };
    if slope >= 0.0 {
        return Ok(FitOutcome::NoDecay {
            slope,
            intercept,
            r_squared,
            n_points: n,
        });
    }
    Ok(FitOutcome::Decay(FitResult {
        decay_length: -1.0 / slope,
        slope,
        intercept,
        r_squared,
        n_points: n,
        residual_max,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn noiseless_line() {
        let ell = 5.891e-12;
        let s: Vec<(f64, f64)> = (0..10)
            .map(|i| (i as f64 * 1e-12, -(i as f64) * 1e-12 / ell + 0.3))
            .collect();
        let f = *fit_exponential(&s).unwrap().decay().unwrap();
        assert_relative_eq!(f.decay_length, ell, max_relative = 1e-12);
        assert_relative_eq!(f.intercept, 0.3, max_relative = 1e-12);
        assert!(f.r_squared > 1.0 - 1e-12);
    }

    #[test]
    fn noisy_recovery_over_seeds() {
        let ell = 2.0;
        let normal = Normal::new(0.0, 0.01).unwrap();
        for seed in 0..100 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s: Vec<(f64, f64)> = (0..20)
                .map(|i| {
                    let d = 5.0 * ell * i as f64 / 19.0;
                    (d, -d / ell + normal.sample(&mut rng))
                })
                .collect();
            let f = *fit_exponential(&s).unwrap().decay().unwrap();
            assert!(
                (f.decay_length / ell - 1.0).abs() < 0.02,
                "seed {seed}: {}",
                f.decay_length
            );
        }
    }

    #[test]
    fn constant_samples_have_no_decay() {
        let s: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, -3.0)).collect();
        match fit_exponential(&s).unwrap() {
            FitOutcome::NoDecay { slope, r_squared, .. } => {
                assert_eq!(slope, 0.0);
                assert_eq!(r_squared, 1.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_short_and_duplicate() {
        assert!(fit_exponential(&[(0.0, 0.0), (1.0, -1.0), (2.0, -2.0)]).is_err());
        assert!(fit_exponential(&[(0.0, 0.0), (1.0, -1.0), (1.0, -2.0), (3.0, -3.0)]).is_err());
        assert!(fit_exponential(&[(0.0, 0.0), (1.0, f64::NAN), (2.0, -2.0), (3.0, -3.0)]).is_err());
    }
}
