use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

pub const NORM_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const POSITIVITY_FLOOR: f64 = 1e-10;
pub const MAX_DIMENSION: usize = 1 << 14;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

fn validate_dims(dims: &[usize], len: usize) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(invalid("dims", "need at least one subsystem, all of dimension >= 1"));
    }
    let product: usize = dims.iter().product();
    if product != len {
        return Err(Error::DimensionMismatch {
            expected: product,
            got: len,
        });
    }
    if len > MAX_DIMENSION {
        return Err(invalid(
            "dims",
            format!("total dimension {len} exceeds {MAX_DIMENSION}"),
        ));
    }
    Ok(())
}

/// Pure state on a tensor product; the first subsystem is the most significant index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
    dims: Vec<usize>,
}

impl StateVector {
    pub fn new(amplitudes: CVector, dims: Vec<usize>) -> Result<Self> {
        validate_dims(&dims, amplitudes.len())?;
        let norm = amplitudes.norm_squared();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amplitudes, dims })
    }

    pub fn basis(index: usize, dims: Vec<usize>) -> Result<Self> {
        let len: usize = dims.iter().product();
        if index >= len {
            return Err(invalid("index", format!("{index} out of range for dimension {len}")));
        }
        let mut v = CVector::zeros(len);
        v[index] = Complex64::new(1.0, 0.0);
        Self::new(v, dims)
    }

    /// Tensor product of normalized factors.
    pub fn product(factors: &[CVector]) -> Result<Self> {
        let mut amps = CVector::from_element(1, Complex64::new(1.0, 0.0));
        for f in factors {
            amps = amps.kronecker(f);
        }
        Self::new(amps, factors.iter().map(|f| f.len()).collect())
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
            dims: self.dims.clone(),
        }
    }

    /// Unchecked constructor for states produced by unitary evolution.
    pub(crate) fn from_parts(amplitudes: CVector, dims: Vec<usize>) -> Self {
        Self { amplitudes, dims }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix, dims: Vec<usize>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        validate_dims(&dims, matrix.nrows())?;
        let asym = max_asymmetry(&matrix);
        if asym > HERMITIAN_TOL {
            return Err(Error::NotHermitian(asym));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > NORM_TOL || trace.im.abs() > NORM_TOL {
            return Err(Error::NotNormalized(trace.re));
        }
        let rho = Self { matrix, dims };
        let min = rho.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < -POSITIVITY_FLOOR {
            return Err(Error::NotPositive(min));
        }
        Ok(rho)
    }

    pub(crate) fn from_parts(matrix: CMatrix, dims: Vec<usize>) -> Self {
        Self { matrix, dims }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Ascending real spectrum.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }
}

pub(crate) fn max_asymmetry(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub(crate) fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Row-major digits of `index` in the mixed radix `dims`.
pub(crate) fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for (k, &d) in dims.iter().enumerate().rev() {
        out[k] = index % d;
        index /= d;
    }
}

pub(crate) fn compose(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}
