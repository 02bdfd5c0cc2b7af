use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::physical_scales::HBAR;

use super::state::{
    compose, digits, hermitian_eigenvalues, max_asymmetry, CMatrix, DensityMatrix, StateVector, HERMITIAN_TOL,
    POSITIVITY_FLOOR,
};

/// ψ(t) = exp(−iHt/ħ) ψ(0) by full diagonalization. `hamiltonian` in J, `time` in s.
pub fn evolve(hamiltonian: &CMatrix, initial: &StateVector, time: f64) -> Result<StateVector> {
    let n = initial.amplitudes().len();
    if hamiltonian.nrows() != n || hamiltonian.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: hamiltonian.nrows(),
        });
    }
    if !time.is_finite() {
        return Err(invalid("time", "must be finite"));
    }
    let scale = hamiltonian.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if scale == 0.0 || time == 0.0 {
        return Ok(initial.clone());
    }
    let unit = hamiltonian / Complex64::new(scale, 0.0);
    let asym = max_asymmetry(&unit);
    if asym > HERMITIAN_TOL {
        return Err(Error::NotHermitian(asym * scale));
    }
    let eig = unit.symmetric_eigen();
    let phase_rate = scale * time / HBAR;
    let coeffs = eig.eigenvectors.adjoint() * initial.amplitudes();
    let rotated = coeffs
        .iter()
        .zip(eig.eigenvalues.iter())
        .map(|(c, &lambda)| c * Complex64::from_polar(1.0, -lambda * phase_rate));
    let rotated = nalgebra::DVector::from_iterator(n, rotated);
    let out = &eig.eigenvectors * rotated;
    Ok(StateVector::from_parts(out, initial.dims().to_vec()))
}

fn check_subsystems(indices: &[usize], count: usize) -> Result<()> {
    if let Some(&bad) = indices.iter().find(|&&i| i >= count) {
        return Err(Error::SubsystemOutOfRange { index: bad, count });
    }
    Ok(())
}

/// Trace out every subsystem not in `keep`; kept subsystems stay in ascending order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let dims = rho.dims();
    check_subsystems(keep, dims.len())?;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() || kept.len() == dims.len() {
        return Err(invalid("keep", "must be a nonempty proper subset of the subsystems"));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !kept.contains(i)).collect();
    let kept_dims: Vec<usize> = kept.iter().map(|&i| dims[i]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let env_dim: usize = traced_dims.iter().product();

    let m = rho.matrix();
    let mut out = CMatrix::zeros(out_dim, out_dim);
    let mut full = vec![0; dims.len()];
    let mut kd = vec![0; kept.len()];
    let mut td = vec![0; traced.len()];
    let mut index_of = |k: usize, e: usize, full: &mut Vec<usize>| {
        digits(k, &kept_dims, &mut kd);
        digits(e, &traced_dims, &mut td);
        for (pos, &s) in kept.iter().enumerate() {
            full[s] = kd[pos];
        }
        for (pos, &s) in traced.iter().enumerate() {
            full[s] = td[pos];
        }
        compose(full, dims)
    };
    for i in 0..out_dim {
        for j in 0..out_dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for e in 0..env_dim {
                let r = index_of(i, e, &mut full);
                let c = index_of(j, e, &mut full);
                acc += m[(r, c)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(DensityMatrix::from_parts(out, kept_dims))
}

/// Transpose the indices of the listed subsystems.
pub fn partial_transpose(rho: &DensityMatrix, subsystems: &[usize]) -> Result<CMatrix> {
    let dims = rho.dims();
    check_subsystems(subsystems, dims.len())?;
    let n = rho.matrix().nrows();
    let m = rho.matrix();
    let mut out = CMatrix::zeros(n, n);
    let mut rd = vec![0; dims.len()];
    let mut cd = vec![0; dims.len()];
    for r in 0..n {
        for c in 0..n {
            digits(r, dims, &mut rd);
            digits(c, dims, &mut cd);
            for &s in subsystems {
                std::mem::swap(&mut rd[s], &mut cd[s]);
            }
            out[(compose(&rd, dims), compose(&cd, dims))] = m[(r, c)];
        }
    }
    Ok(out)
}

fn checked_spectrum(rho: &DensityMatrix) -> Result<Vec<f64>> {
    let ev = rho.eigenvalues();
    if let Some(&min) = ev.first() {
        if min < -POSITIVITY_FLOOR {
            return Err(Error::NotPositive(min));
        }
    }
    Ok(ev.into_iter().map(|l| l.clamp(0.0, 1.0)).collect())
}

/// S = −Σ λ log₂ λ, in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    Ok(entropy_bits(&checked_spectrum(rho)?))
}

pub fn entropy_bits(probabilities: &[f64]) -> f64 {
    probabilities
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum::<f64>()
        .max(0.0)
}

/// N = (‖ρ^{T_B}‖₁ − 1)/2 with `body_b` the transposed subsystems.
pub fn negativity(rho: &DensityMatrix, body_b: &[usize]) -> Result<f64> {
    let count = rho.dims().len();
    check_subsystems(body_b, count)?;
    if body_b.is_empty() || body_b.len() >= count {
        return Err(invalid("bipartition", "both sides must be nonempty"));
    }
    checked_spectrum(rho)?;
    let pt = partial_transpose(rho, body_b)?;
    let trace_norm: f64 = hermitian_eigenvalues(&pt).iter().map(|l| l.abs()).sum();
    Ok((0.5 * (trace_norm - 1.0)).max(0.0))
}
