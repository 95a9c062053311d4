use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting bad shapes and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::BadShape {
                rows,
                cols,
                len: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("matrix"));
        }
        Ok(Self { rows, cols, data })
    }

    /// Real-valued convenience constructor.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), diag.len(), |r, c| if r == c { Complex64::new(diag[r], 0.0) } else { ZERO })
    }

    /// Outer product `|a⟩⟨b|`.
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Self {
        Self::from_fn(a.len(), b.len(), |r, c| a[r] * b[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * k).collect(),
        }
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.scale(Complex64::new(k, 0.0))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                for c in 0..other.cols {
                    out[(r, c)] += a * other[(k, c)];
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| {
                self.data[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// Largest entrywise modulus of `self - other`; `INFINITY` on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev = 0.0f64;
        for r in 0..self.rows {
            for c in r..self.cols {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// Largest entrywise deviation of `U U†` from the identity.
    pub fn unitary_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let prod = self.matmul(&self.adjoint()).expect("square matrix times its adjoint");
        prod.max_abs_diff(&Self::identity(self.rows))
    }

    /// Kronecker product; `self` is the left (more significant) factor.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut data = Vec::with_capacity(rows * cols);
        for r1 in 0..self.rows {
            for r2 in 0..other.rows {
                for c1 in 0..self.cols {
                    let a = self[(r1, c1)];
                    for c2 in 0..other.cols {
                        data.push(a * other[(r2, c2)]);
                    }
                }
            }
        }
        Self { rows, cols, data }
    }

    /// Reduced matrix on the `keep` subsystems of a square matrix over
    /// subsystems of dimensions `dims` (subsystem 0 most significant).
    pub fn partial_trace(&self, dims: &[usize], keep: &[usize]) -> Result<Self> {
        let n = self.dim()?;
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidArgument("subsystem dimensions must be positive".into()));
        }
        let total: usize = dims.iter().product();
        if total != n {
            return Err(Error::DimensionMismatch {
                expected: total,
                got: n,
            });
        }
        let mut kept = vec![false; dims.len()];
        for &k in keep {
            if k >= dims.len() {
                return Err(Error::InvalidArgument(format!(
                    "subsystem index {k} out of range for {} subsystems",
                    dims.len()
                )));
            }
            if kept[k] {
                return Err(Error::InvalidArgument(format!("subsystem {k} listed twice")));
            }
            kept[k] = true;
        }
        if keep.is_empty() {
            return Err(Error::InvalidArgument("keep set must be nonempty".into()));
        }

        let kept_dims: Vec<usize> = (0..dims.len()).filter(|&i| kept[i]).map(|i| dims[i]).collect();
        let traced_dims: Vec<usize> = (0..dims.len()).filter(|&i| !kept[i]).map(|i| dims[i]).collect();
        let out_dim: usize = kept_dims.iter().product();
        let env_dim: usize = traced_dims.iter().product();

        // full index from (kept multi-index, traced multi-index), both flattened big-endian
        let compose = |k_flat: usize, t_flat: usize| -> usize {
            let mut k_digits = split_digits(k_flat, &kept_dims);
            let mut t_digits = split_digits(t_flat, &traced_dims);
            k_digits.reverse();
            t_digits.reverse();
            let mut idx = 0;
            for (i, &d) in dims.iter().enumerate() {
                let digit = if kept[i] {
                    k_digits.pop().unwrap()
                } else {
                    t_digits.pop().unwrap()
                };
                idx = idx * d + digit;
            }
            idx
        };

        let mut out = Self::zeros(out_dim, out_dim);
        for r in 0..out_dim {
            for c in 0..out_dim {
                let mut acc = ZERO;
                for e in 0..env_dim {
                    acc += self[(compose(r, e), compose(c, e))];
                }
                out[(r, c)] = acc;
            }
        }
        Ok(out)
    }
}

fn split_digits(mut flat: usize, dims: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; dims.len()];
    for (slot, &d) in digits.iter_mut().zip(dims).rev() {
        *slot = flat % d;
        flat /= d;
    }
    digits
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("shape mismatch")
    }
}

/// Kronecker product of two matrices; the left factor is qubit 0.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// Reduced density matrix over the `keep` subsystems.
pub fn partial_trace(rho: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    rho.partial_trace(dims, keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli_matrix, Axis};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn kron_of_sigma_z_and_identity() {
        let zi = tensor_product(&pauli_matrix(Axis::Z), &ComplexMatrix::identity(2));
        assert_eq!(zi[(0, 0)], c(1.0));
        assert_eq!(zi[(3, 3)], c(-1.0));
        assert_eq!(zi[(1, 1)], c(1.0));
        assert_eq!(zi[(2, 2)], c(-1.0));
    }

    #[test]
    fn kron_identity_and_diagonals() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(i2.kron(&i2), ComplexMatrix::identity(4));
        let z = pauli_matrix(Axis::Z);
        assert_eq!(z.kron(&z), ComplexMatrix::diagonal(&[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn kron_is_associative_exactly() {
        let x = pauli_matrix(Axis::X);
        let y = pauli_matrix(Axis::Y);
        let z = pauli_matrix(Axis::Z);
        assert_eq!(x.kron(&y).kron(&z), x.kron(&y.kron(&z)));
    }

    #[test]
    fn rejects_bad_shapes_and_nan() {
        assert!(matches!(ComplexMatrix::new(2, 2, vec![c(1.0); 3]), Err(Error::BadShape { .. })));
        assert!(matches!(ComplexMatrix::new(1, 1, vec![c(f64::NAN)]), Err(Error::NonFinite(_))));
    }

    #[test]
    fn partial_trace_dimension_errors() {
        let rho = ComplexMatrix::identity(4);
        assert!(matches!(rho.partial_trace(&[2, 3], &[0]), Err(Error::DimensionMismatch { .. })));
        assert!(rho.partial_trace(&[2, 2], &[]).is_err());
        assert!(rho.partial_trace(&[2, 2], &[2]).is_err());
        assert!(ComplexMatrix::zeros(2, 4).partial_trace(&[2, 2], &[0]).is_err());
    }

    #[test]
    fn tracing_everything_but_nothing_keeps_matrix() {
        let rho = ComplexMatrix::from_fn(4, 4, |r, c| Complex64::new((r * 4 + c) as f64, r as f64));
        assert_eq!(rho.partial_trace(&[2, 2], &[0, 1]).unwrap(), rho);
    }

    #[test]
    fn kept_order_follows_subsystem_order() {
        // keep is a set; output subsystems stay in ascending order
        let a = ComplexMatrix::diagonal(&[0.25, 0.75]);
        let b = ComplexMatrix::diagonal(&[0.5, 0.5]);
        let ab = a.kron(&b);
        assert!(ab.partial_trace(&[2, 2], &[1, 0]).unwrap().approx_eq(&ab, 0.0));
    }
}
