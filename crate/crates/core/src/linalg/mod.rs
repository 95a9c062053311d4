//! Dense complex linear algebra over small Hilbert spaces.
//!
//! Basis indices are big-endian: in a tensor product the leftmost factor is
//! subsystem (qubit) 0.

mod eigen;
mod matrix;
mod pauli;
mod state;

pub use eigen::{eigendecompose, EigenDecomposition};
pub use matrix::{partial_trace, tensor_product, ComplexMatrix};
pub use pauli::{pauli_expand, pauli_matrix, pauli_sum, Axis, Pauli, PauliString, Sign, SignedAxis, MAX_PAULI_QUBITS};
pub use state::{HermitianObservable, PureState};

use crate::{Error, Result};

/// Entrywise Hermiticity tolerance.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Tolerance on `Σ|a|² = 1`.
pub const NORM_TOL: f64 = 1e-10;
/// Eigenvalues closer than this are one eigenspace.
pub const EIGEN_MERGE_TOL: f64 = 1e-9;

/// Pure-state concurrence `2|ad − bc|` of a two-qubit state `(a, b, c, d)`.
pub fn concurrence(psi: &PureState) -> Result<f64> {
    if psi.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: psi.dim(),
        });
    }
    let [a, b, c, d] = [0, 1, 2, 3].map(|i| psi.amplitudes()[i]);
    Ok((2.0 * (a * d - b * c).norm()).min(1.0))
}
