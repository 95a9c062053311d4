//! Ensemble compositions and their collective statistics.
//!
//! A composition records how many molecules were prepared in each pure
//! state. Expectations of a collective observable `Σ_i Ω(i)` depend only on
//! the density matrix; its fluctuation depends on the composition.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::linalg::{concurrence, eigendecompose, ComplexMatrix, HermitianObservable, PureState};
use crate::{Error, Result};

/// Two states closer than this (entrywise, up to global phase) are one component.
pub const MERGE_TOL: f64 = 1e-10;
/// Radicands down to `-RADICAND_TOL` (relative to the variance scale) are roundoff.
pub const RADICAND_TOL: f64 = 1e-9;
/// Radicands within this of zero (relative to the variance scale) are
/// cancellation residue and yield an exactly zero fluctuation.
pub const RADICAND_ZERO: f64 = 1e-12;
/// Counts within this distance of an integer count as whole molecules.
pub const INTEGRAL_TOL: f64 = 1e-9;
/// Largest product-space dimension the oracle will build.
pub const ORACLE_DIM_CAP: usize = 1 << 20;
/// Concurrence above this marks a molecule as entangled.
pub const ENTANGLED_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub count: f64,
    pub state: PureState,
}

/// Preparation record: `count` molecules in each pure `state`.
///
/// Components are kept in input order. Empty components are dropped and
/// states equal up to a global phase are merged into the first occurrence,
/// so no two components share a state.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleComposition {
    dim: usize,
    components: Vec<Component>,
}

impl EnsembleComposition {
    pub fn new(components: impl IntoIterator<Item = (f64, PureState)>) -> Result<Self> {
        let mut merged: Vec<Component> = Vec::new();
        let mut dim = None;
        for (count, state) in components {
            if !count.is_finite() || count < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "molecule count must be finite and nonnegative, got {count}"
                )));
            }
            if count == 0.0 {
                continue;
            }
            match dim {
                None => dim = Some(state.dim()),
                Some(d) if d != state.dim() => {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        got: state.dim(),
                    })
                }
                _ => {}
            }
            match merged.iter_mut().find(|c| c.state.eq_up_to_phase(&state, MERGE_TOL)) {
                Some(existing) => existing.count += count,
                None => merged.push(Component { count, state }),
            }
        }
        let dim = dim.ok_or_else(|| Error::InvalidArgument("composition has no components".into()))?;
        let total: f64 = merged.iter().map(|c| c.count).sum();
        if total <= 0.0 || !total.is_finite() {
            return Err(Error::InvalidArgument(format!("total molecule count must be positive, got {total}")));
        }
        Ok(Self {
            dim,
            components: merged,
        })
    }

    /// All `n` molecules in one state.
    pub fn pure(n: f64, state: PureState) -> Result<Self> {
        Self::new([(n, state)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// Total molecule count `N`.
    pub fn total(&self) -> f64 {
        self.components.iter().map(|c| c.count).sum()
    }

    /// Same states with every count multiplied by `k > 0`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        Self::new(self.components.iter().map(|c| (c.count * k, c.state.clone())))
    }

    pub fn is_integral(&self) -> bool {
        self.integer_counts().is_ok()
    }

    /// Counts as whole molecules; fails on any non-integral count.
    pub fn integer_counts(&self) -> Result<Vec<u64>> {
        self.components
            .iter()
            .enumerate()
            .map(|(index, c)| {
                let rounded = c.count.round();
                if (c.count - rounded).abs() > INTEGRAL_TOL || rounded > u64::MAX as f64 {
                    Err(Error::NonIntegralCount { index, count: c.count })
                } else {
                    Ok(rounded as u64)
                }
            })
            .collect()
    }

    /// Whole-molecule composition with the same total, by largest-remainder
    /// apportionment. Ties go to the earlier component.
    pub fn apportioned(&self) -> Result<Self> {
        let total = self.total().round();
        let floors: Vec<f64> = self.components.iter().map(|c| c.count.floor()).collect();
        let mut remaining = (total - floors.iter().sum::<f64>()).max(0.0) as usize;
        let mut order: Vec<usize> = (0..self.components.len()).collect();
        order.sort_by(|&a, &b| {
            let ra = self.components[a].count - floors[a];
            let rb = self.components[b].count - floors[b];
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        let mut counts = floors;
        for &i in &order {
            if remaining == 0 {
                break;
            }
            counts[i] += 1.0;
            remaining -= 1;
        }
        Self::new(
            counts
                .into_iter()
                .zip(&self.components)
                .map(|(n, c)| (n, c.state.clone())),
        )
    }
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// `ρ = Σ (N_i/N) |ψ_i⟩⟨ψ_i|`.
pub fn density_matrix(comp: &EnsembleComposition) -> ComplexMatrix {
    let n = comp.total();
    let d = comp.dim();
    comp.components
        .iter()
        .fold(ComplexMatrix::zeros(d, d), |acc, c| &acc + &c.state.projector().scale_real(c.count / n))
}

/// `Tr(ρA)` for one average molecule.
pub fn molecule_expectation(rho: &ComplexMatrix, a: &HermitianObservable) -> Result<f64> {
    check_dim(rho.dim()?, a.dim())?;
    Ok(rho.matmul(a.matrix())?.trace().re)
}

/// `N·Tr(ρA)` for the whole ensemble.
pub fn ensemble_expectation(comp: &EnsembleComposition, a: &HermitianObservable) -> Result<f64> {
    check_dim(comp.dim(), a.dim())?;
    Ok(comp.total() * molecule_expectation(&density_matrix(comp), a)?)
}

/// Exact collective statistics of `Σ_i Ω(i)` over a composition.
#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationReport {
    /// `⟨Σ_i Ω(i)⟩ = N·Tr(ρΩ)`.
    pub expectation_ensemble: f64,
    /// `ΔΩ_E`, the standard deviation of the collective observable.
    pub fluctuation: f64,
    /// Each component's share `N_i·(⟨Ω²⟩_i − ⟨Ω⟩_i²)` of the collective variance.
    pub per_component_variance: Vec<f64>,
}

fn sqrt_radicand(radicand: f64, scale: f64) -> Result<f64> {
    if radicand.abs() <= RADICAND_ZERO * scale.max(1.0) {
        Ok(0.0)
    } else if radicand > 0.0 {
        Ok(radicand.sqrt())
    } else if radicand >= -RADICAND_TOL * scale.max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::NegativeRadicand { radicand })
    }
}

/// Fluctuation of a collective observable for molecules in definite pure
/// states: `ΔΩ_E = √(N·Tr(ρΩ²) − Σ_i N_i ⟨ψ_i|Ω|ψ_i⟩²)`.
pub fn fluctuation_proper(comp: &EnsembleComposition, omega: &HermitianObservable) -> Result<FluctuationReport> {
    check_dim(comp.dim(), omega.dim())?;
    let n = comp.total();
    let omega_sq = omega.squared();
    let rho = density_matrix(comp);
    let second_moment = n * rho.matmul(&omega_sq)?.trace().re;

    let mut composition_term = 0.0;
    let mut per_component_variance = Vec::with_capacity(comp.components.len());
    for c in &comp.components {
        let mean = c.state.sandwich(omega.matrix())?.re;
        let sq = c.state.sandwich(&omega_sq)?.re;
        composition_term += c.count * mean * mean;
        per_component_variance.push(c.count * (sq - mean * mean));
    }

    let radicand = second_moment - composition_term;
    Ok(FluctuationReport {
        expectation_ensemble: n * rho.matmul(omega.matrix())?.trace().re,
        fluctuation: sqrt_radicand(radicand, second_moment.abs())?,
        per_component_variance,
    })
}

/// `N` molecules each in the same (possibly mixed) state `ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdenticalMixedEnsemble {
    n_molecules: f64,
    rho: ComplexMatrix,
}

impl IdenticalMixedEnsemble {
    pub fn new(n_molecules: f64, rho: ComplexMatrix) -> Result<Self> {
        if !n_molecules.is_finite() || n_molecules <= 0.0 {
            return Err(Error::InvalidArgument(format!("molecule count must be positive, got {n_molecules}")));
        }
        validate_density_matrix(&rho)?;
        Ok(Self { n_molecules, rho })
    }

    pub fn n_molecules(&self) -> f64 {
        self.n_molecules
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }
}

/// Hermitian, unit trace and positive semidefinite (eigenvalues ≥ −1e-9).
pub fn validate_density_matrix(rho: &ComplexMatrix) -> Result<()> {
    rho.dim()?;
    let obs = HermitianObservable::new(rho.clone()).map_err(|e| Error::NotDensityMatrix(e.to_string()))?;
    let trace = rho.trace().re;
    if (trace - 1.0).abs() > 1e-10 {
        return Err(Error::NotDensityMatrix(format!("trace is {trace}")));
    }
    let min = eigendecompose(&obs)?.eigenvalues()[0];
    if min < -1e-9 {
        return Err(Error::NotDensityMatrix(format!("negative eigenvalue {min:e}")));
    }
    Ok(())
}

/// `ΔΩ_E = √(N·Tr(ρΩ²) − N·Tr(ρΩ)²)` when every molecule is in the mixed state `ρ`.
pub fn fluctuation_identical_mixed(ens: &IdenticalMixedEnsemble, omega: &HermitianObservable) -> Result<f64> {
    check_dim(ens.rho.rows(), omega.dim())?;
    let n = ens.n_molecules;
    let second = n * ens.rho.matmul(&omega.squared())?.trace().re;
    let mean = molecule_expectation(&ens.rho, omega)?;
    sqrt_radicand(second - n * mean * mean, second.abs())
}

/// Whether two compositions have entrywise-equal density matrices within `tol`.
pub fn same_density_matrix(a: &EnsembleComposition, b: &EnsembleComposition, tol: f64) -> Result<bool> {
    check_dim(a.dim(), b.dim())?;
    Ok(density_matrix(a).approx_eq(&density_matrix(b), tol))
}

fn product_dimension(comp: &EnsembleComposition) -> Result<(usize, u64)> {
    let counts = comp.integer_counts()?;
    let molecules: u64 = counts.iter().sum();
    let cap_err = Error::CapExceeded {
        dim: comp.dim(),
        molecules,
    };
    let exp = u32::try_from(molecules).map_err(|_| cap_err.clone())?;
    match comp.dim().checked_pow(exp) {
        Some(total) if total <= ORACLE_DIM_CAP => Ok((total, molecules)),
        _ => Err(cap_err),
    }
}

/// The state of the whole ensemble, `|ψ_1⟩^⊗N_1 ⊗ |ψ_2⟩^⊗N_2 ⊗ …`, with
/// components in composition order. Requires whole-molecule counts and at
/// most `2^20` amplitudes.
pub fn full_product_state(comp: &EnsembleComposition) -> Result<PureState> {
    let (total, _) = product_dimension(comp)?;
    let counts = comp.integer_counts()?;
    let mut amps = Vec::with_capacity(total);
    amps.push(Complex64::new(1.0, 0.0));
    for (c, &k) in comp.components.iter().zip(&counts) {
        for _ in 0..k {
            amps = amps
                .iter()
                .flat_map(|a| c.state.amplitudes().iter().map(move |b| a * b))
                .collect();
        }
    }
    PureState::normalized(amps)
}

/// Mean and standard deviation of `Σ_i Ω(i)` evaluated directly on the full
/// product state. `Ω` is applied slot by slot; the collective operator is
/// never materialized.
pub fn oracle_fluctuation(comp: &EnsembleComposition, omega: &HermitianObservable) -> Result<(f64, f64)> {
    check_dim(comp.dim(), omega.dim())?;
    let (total, molecules) = product_dimension(comp)?;
    let psi = full_product_state(comp)?;
    let amps = psi.amplitudes();
    let d = comp.dim();
    let m = omega.matrix();
    let slots = molecules as usize;
    let strides: Vec<usize> = (0..slots).map(|k| d.pow((slots - 1 - k) as u32)).collect();

    // (Σ_k Ω_k ψ)[idx], one entry per task; each entry sums slots in order
    let mut sigma_psi = vec![Complex64::new(0.0, 0.0); total];
    sigma_psi.par_iter_mut().enumerate().for_each(|(idx, out)| {
        let mut acc = Complex64::new(0.0, 0.0);
        for &stride in &strides {
            let digit = (idx / stride) % d;
            let base = idx - digit * stride;
            for j in 0..d {
                acc += m[(digit, j)] * amps[base + j * stride];
            }
        }
        *out = acc;
    });

    let mean: f64 = amps.iter().zip(&sigma_psi).map(|(a, s)| (a.conj() * s).re).sum();
    let second: f64 = sigma_psi.iter().map(|s| s.norm_sqr()).sum();
    let std = sqrt_radicand(second - mean * mean, second.abs())?;
    Ok((mean, std))
}

/// Maps every component state through `U`; counts are unchanged and equal
/// images are merged.
pub fn apply_unitary(comp: &EnsembleComposition, u: &ComplexMatrix) -> Result<EnsembleComposition> {
    check_dim(comp.dim(), u.dim()?)?;
    let deviation = u.unitary_deviation();
    if deviation > 1e-10 {
        return Err(Error::NotUnitary { deviation });
    }
    let mapped = comp
        .components
        .iter()
        .map(|c| {
            let image = c.state.map_unchecked(u)?;
            Ok((c.count, PureState::normalized(image.amplitudes().to_vec())?))
        })
        .collect::<Result<Vec<_>>>()?;
    EnsembleComposition::new(mapped)
}

/// Fraction of molecules whose two-qubit state is entangled.
pub fn entanglement_census(comp: &EnsembleComposition) -> Result<f64> {
    check_dim(4, comp.dim())?;
    let mut entangled = 0.0;
    for c in &comp.components {
        if concurrence(&c.state)? > ENTANGLED_TOL {
            entangled += c.count;
        }
    }
    Ok(entangled / comp.total())
}

/// Named compositions used by the scenario catalog.
pub mod catalog {
    use super::*;
    use crate::linalg::{Axis, Sign, SignedAxis};

    /// `N/2` molecules in `|0⟩` and `N/2` in `|1⟩`.
    pub fn z_basis_mixture(n: f64) -> EnsembleComposition {
        EnsembleComposition::new([(n / 2.0, PureState::basis(2, 0)), (n / 2.0, PureState::basis(2, 1))])
            .expect("valid composition")
    }

    /// `N/2` molecules in `|+x⟩` and `N/2` in `|−x⟩`.
    pub fn x_basis_mixture(n: f64) -> EnsembleComposition {
        EnsembleComposition::new([(n / 2.0, PureState::plus_x()), (n / 2.0, PureState::minus_x())])
            .expect("valid composition")
    }

    /// `N/4` molecules in each of `|±z⟩, |±x⟩`.
    pub fn four_state_mixture(n: f64) -> EnsembleComposition {
        EnsembleComposition::new(
            [
                SignedAxis::new(Axis::Z, Sign::Plus),
                SignedAxis::new(Axis::Z, Sign::Minus),
                SignedAxis::new(Axis::X, Sign::Plus),
                SignedAxis::new(Axis::X, Sign::Minus),
            ]
            .map(|a| (n / 4.0, a.state())),
        )
        .expect("valid composition")
    }
}
