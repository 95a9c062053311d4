use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{ComplexMatrix, HermitianObservable, EIGEN_MERGE_TOL};
use crate::Result;

/// Spectral decomposition with degenerate eigenvalues merged into
/// eigenspace projectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    eigenvalues: Vec<f64>,
    projectors: Vec<ComplexMatrix>,
}

impl EigenDecomposition {
    /// Strictly increasing distinct eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &ComplexMatrix)> {
        self.eigenvalues.iter().copied().zip(&self.projectors)
    }

    /// `Σ λ_k Π_k`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let dim = self.projectors[0].rows();
        self.iter()
            .fold(ComplexMatrix::zeros(dim, dim), |acc, (l, p)| &acc + &p.scale_real(l))
    }
}

pub fn eigendecompose(omega: &HermitianObservable) -> Result<EigenDecomposition> {
    let m = omega.matrix();
    let dim = m.rows();
    // symmetrize so nalgebra sees an exactly Hermitian input
    let herm = DMatrix::from_fn(dim, dim, |r, c| 0.5 * (m[(r, c)] + m[(c, r)].conj()));
    let eig = herm.symmetric_eigen();

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut eigenvalues: Vec<f64> = Vec::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &k in &order {
        let lambda = eig.eigenvalues[k];
        match eigenvalues.last() {
            Some(&prev) if lambda - prev <= EIGEN_MERGE_TOL => groups.last_mut().unwrap().push(k),
            _ => {
                eigenvalues.push(lambda);
                groups.push(vec![k]);
            }
        }
    }

    let projectors = groups
        .iter()
        .map(|group| {
            ComplexMatrix::from_fn(dim, dim, |r, c| {
                group
                    .iter()
                    .map(|&k| eig.eigenvectors[(r, k)] * eig.eigenvectors[(c, k)].conj())
                    .sum::<Complex64>()
            })
        })
        .collect();

    // representative value of a merged cluster is its mean
    for (value, group) in eigenvalues.iter_mut().zip(&groups) {
        *value = group.iter().map(|&k| eig.eigenvalues[k]).sum::<f64>() / group.len() as f64;
    }

    Ok(EigenDecomposition {
        eigenvalues,
        projectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli_matrix, Axis};

    fn obs(m: ComplexMatrix) -> HermitianObservable {
        HermitianObservable::new(m).unwrap()
    }

    #[test]
    fn sigma_z_spectrum() {
        let e = eigendecompose(&obs(pauli_matrix(Axis::Z))).unwrap();
        assert_eq!(e.eigenvalues().len(), 2);
        assert!((e.eigenvalues()[0] + 1.0).abs() < 1e-12);
        assert!((e.eigenvalues()[1] - 1.0).abs() < 1e-12);
        assert!(e.projectors()[0].approx_eq(&ComplexMatrix::diagonal(&[0.0, 1.0]), 1e-12));
        assert!(e.projectors()[1].approx_eq(&ComplexMatrix::diagonal(&[1.0, 0.0]), 1e-12));
    }

    #[test]
    fn identity_merges_to_one_eigenspace() {
        let e = eigendecompose(&obs(ComplexMatrix::identity(4))).unwrap();
        assert_eq!(e.eigenvalues().len(), 1);
        assert!((e.eigenvalues()[0] - 1.0).abs() < 1e-12);
        assert!(e.projectors()[0].approx_eq(&ComplexMatrix::identity(4), 1e-12));
    }

    #[test]
    fn zz_has_two_rank_two_eigenspaces() {
        let z = pauli_matrix(Axis::Z);
        let e = eigendecompose(&obs(z.kron(&z))).unwrap();
        assert_eq!(e.eigenvalues().len(), 2);
        for p in e.projectors() {
            assert!((p.trace().re - 2.0).abs() < 1e-12);
        }
        assert!(e.projectors()[0].approx_eq(&ComplexMatrix::diagonal(&[0.0, 1.0, 1.0, 0.0]), 1e-12));
    }

    #[test]
    fn y_reconstructs() {
        let y = pauli_matrix(Axis::Y);
        let e = eigendecompose(&obs(y.clone())).unwrap();
        assert!(e.reconstruct().approx_eq(&y, 1e-12));
    }
}
