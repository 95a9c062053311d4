use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::{ComplexMatrix, HERMITIAN_TOL, NORM_TOL};
use crate::{Error, Result};

/// Unit-norm state vector of one molecule.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Accepts amplitudes whose squared norm is 1 within `1e-10`.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidArgument("state must have positive dimension".into()));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("state"));
        }
        let norm_sqr: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales any nonzero finite vector to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("state"));
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm_sqr: norm * norm });
        }
        Self::new(amplitudes.into_iter().map(|z| z / norm).collect())
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dimension {dim}");
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    /// `(|0⟩ + |1⟩)/√2`.
    pub fn plus_x() -> Self {
        Self::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap()
    }

    pub fn minus_x() -> Self {
        Self::from_real(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]).unwrap()
    }

    /// `(|00⟩ + |11⟩)/√2`.
    pub fn bell_phi_plus() -> Self {
        Self::from_real(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]).unwrap()
    }

    /// `(|01⟩ + |10⟩)/√2`.
    pub fn bell_psi_plus() -> Self {
        Self::from_real(&[0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn kron(&self, other: &Self) -> Self {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Self { amplitudes }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    /// `⟨ψ|A|ψ⟩` as a complex number.
    pub fn sandwich(&self, a: &ComplexMatrix) -> Result<Complex64> {
        let av = a.apply(&self.amplitudes)?;
        if av.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: av.len(),
            });
        }
        Ok(self.amplitudes.iter().zip(&av).map(|(a, b)| a.conj() * b).sum())
    }

    /// Applies a square matrix without renormalizing; the caller guarantees
    /// norm preservation.
    pub(crate) fn map_unchecked(&self, u: &ComplexMatrix) -> Result<Self> {
        Ok(Self {
            amplitudes: u.apply(&self.amplitudes)?,
        })
    }

    /// Equality up to a global phase, entrywise within `tol`.
    pub fn eq_up_to_phase(&self, other: &Self, tol: f64) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let overlap = self.inner(other);
        let modulus = overlap.norm();
        if modulus == 0.0 {
            return false;
        }
        let phase = overlap / modulus;
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .all(|(a, b)| (a * phase - b).norm() <= tol)
    }
}

/// Hermitian `d×d` matrix acting on one molecule.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianObservable {
    matrix: ComplexMatrix,
}

impl HermitianObservable {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        matrix.dim()?;
        if matrix.entries().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("observable"));
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn squared(&self) -> ComplexMatrix {
        &self.matrix * &self.matrix
    }
}

impl From<HermitianObservable> for ComplexMatrix {
    fn from(o: HermitianObservable) -> Self {
        o.matrix
    }
}
