#![allow(dead_code)]

use esd_core::ensemble::EnsembleComposition;
use esd_core::linalg::{ComplexMatrix, HermitianObservable, PureState};
use esd_core::Complex64;
use proptest::prelude::*;

pub fn complex_vec(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), len)
        .prop_map(|v| v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
}

pub fn state(dim: usize) -> impl Strategy<Value = PureState> {
    complex_vec(dim)
        .prop_filter("not too short", |v| v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-2)
        .prop_map(|v| PureState::normalized(v).unwrap())
}

pub fn matrix(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    complex_vec(dim * dim).prop_map(move |v| ComplexMatrix::new(dim, dim, v).unwrap())
}

pub fn hermitian(dim: usize) -> impl Strategy<Value = HermitianObservable> {
    matrix(dim).prop_map(|a| HermitianObservable::new(&a + &a.adjoint()).unwrap())
}

/// One to three components with whole counts summing to at most `max_molecules`.
pub fn integral_composition(dim: usize, max_molecules: u32) -> impl Strategy<Value = EnsembleComposition> {
    prop::collection::vec((1..=max_molecules, state(dim)), 1..=3)
        .prop_filter("molecule cap", move |parts| parts.iter().map(|p| p.0).sum::<u32>() <= max_molecules)
        .prop_map(|parts| EnsembleComposition::new(parts.into_iter().map(|(k, s)| (f64::from(k), s))).unwrap())
}

/// Positive real counts.
pub fn real_composition(dim: usize) -> impl Strategy<Value = EnsembleComposition> {
    prop::collection::vec((0.1..50.0f64, state(dim)), 1..=4).prop_map(|parts| EnsembleComposition::new(parts).unwrap())
}

/// Independent partial trace: `ρ_A[i,j] = Σ_k ρ[(i,k),(j,k)]` for a bipartite
/// `dA × dB` system, keeping the first factor.
pub fn trace_out_second(rho: &ComplexMatrix, da: usize, db: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(da, da, |i, j| (0..db).map(|k| rho[(i * db + k, j * db + k)]).sum())
}

/// Keeping the second factor.
pub fn trace_out_first(rho: &ComplexMatrix, da: usize, db: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(db, db, |i, j| (0..da).map(|k| rho[(k * db + i, k * db + j)]).sum())
}
