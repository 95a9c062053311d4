//! Effective pure states, their separable product-state decomposition,
//! random-kick dephasing and the Gorter relaxation time.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::ensemble::{validate_density_matrix, EnsembleComposition};
use crate::linalg::{pauli_expand, Axis, ComplexMatrix, PauliString, PureState, SignedAxis};
use crate::{Error, Result};

/// Weights below `-WEIGHT_TOL` are a positivity violation; smaller
/// negatives are clamped to zero.
pub const WEIGHT_TOL: f64 = 1e-12;

/// `(1−ε)·I/d + ε·|target⟩⟨target|`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectivePureParams {
    epsilon: f64,
    target: PureState,
}

impl EffectivePureParams {
    pub fn new(epsilon: f64, target: PureState) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(Self { epsilon, target })
    }

    pub fn dim(&self) -> usize {
        self.target.dim()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn target(&self) -> &PureState {
        &self.target
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if (0.0..=1.0).contains(&epsilon) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("polarization must lie in [0, 1], got {epsilon}")))
    }
}

pub fn effective_pure_density(p: &EffectivePureParams) -> ComplexMatrix {
    let d = p.dim();
    &ComplexMatrix::identity(d).scale_real((1.0 - p.epsilon) / d as f64) + &p.target.projector().scale_real(p.epsilon)
}

/// `εN` molecules in `(|00⟩+|11⟩)/√2` and `(1−ε)N/4` in each computational
/// basis state. Counts are real; empty components are omitted.
pub fn effective_bell_composition(n: u64, epsilon: f64) -> Result<EnsembleComposition> {
    check_epsilon(epsilon)?;
    let n = n as f64;
    let rest = (1.0 - epsilon) * n / 4.0;
    EnsembleComposition::new(
        std::iter::once((epsilon * n, PureState::bell_phi_plus()))
            .chain((0..4).map(|k| (rest, PureState::basis(4, k)))),
    )
}

/// Sign pattern `d_a` of the canonical solution: `+1, −1, +1` for `x, y, z`.
fn axis_sign(axis: Axis) -> f64 {
    match axis {
        Axis::Y => -1.0,
        Axis::X | Axis::Z => 1.0,
    }
}

/// Weights `p_ij` over the 36 product projectors `P_i ⊗ P_j`, with
/// `p_ij = (1/9 + C_ij)/4`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductDecomposition {
    weights: BTreeMap<(SignedAxis, SignedAxis), f64>,
}

impl ProductDecomposition {
    fn from_raw(raw: impl IntoIterator<Item = ((SignedAxis, SignedAxis), f64)>, epsilon: f64) -> Result<Self> {
        let mut weights = BTreeMap::new();
        let mut min_weight = f64::INFINITY;
        for (key, w) in raw {
            min_weight = min_weight.min(w);
            weights.insert(key, if (-WEIGHT_TOL..0.0).contains(&w) { 0.0 } else { w });
        }
        if min_weight < -WEIGHT_TOL {
            return Err(Error::PositivityViolation { epsilon, min_weight });
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &BTreeMap<(SignedAxis, SignedAxis), f64> {
        &self.weights
    }

    pub fn weight(&self, first: SignedAxis, second: SignedAxis) -> f64 {
        self.weights[&(first, second)]
    }

    /// `C_ij = 4·p_ij − 1/9`.
    pub fn correlation(&self, first: SignedAxis, second: SignedAxis) -> f64 {
        4.0 * self.weight(first, second) - 1.0 / 9.0
    }

    pub fn min_weight(&self) -> f64 {
        self.weights.values().copied().fold(f64::INFINITY, f64::min)
    }

    /// `Σ p_ij P_i ⊗ P_j`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.weights
            .iter()
            .fold(ComplexMatrix::zeros(4, 4), |acc, (&(a, b), &w)| {
                &acc + &a.projector().kron(&b.projector()).scale_real(w)
            })
    }
}

/// Canonical symmetric product decomposition of the effective Bell state:
/// `p = (1 + 9ε·d_a·s·t·δ_ab)/36` for `P_(a,s) ⊗ P_(b,t)`.
///
/// All weights are nonnegative iff `ε ≤ 1/9`; beyond that a
/// [`Error::PositivityViolation`] carries the most negative weight.
pub fn braunstein_decomposition(epsilon: f64) -> Result<ProductDecomposition> {
    check_epsilon(epsilon)?;
    let raw = SignedAxis::ALL.iter().flat_map(|&a| {
        SignedAxis::ALL.iter().map(move |&b| {
            let corr = if a.axis == b.axis {
                9.0 * epsilon * axis_sign(a.axis) * a.sign.value() * b.sign.value()
            } else {
                0.0
            };
            ((a, b), (1.0 + corr) / 36.0)
        })
    });
    ProductDecomposition::from_raw(raw, epsilon)
}

/// Solves for the canonical-form weights that reproduce a two-qubit density
/// matrix from its Pauli expansion.
///
/// The canonical form spans `I/4 + Σ_a c_aa σ_a⊗σ_a`, so any other Pauli
/// component is rejected. Each `σ_a⊗σ_a` coefficient fixes the same-axis
/// correlations through `p = (1 + 36·c_aa·s·t)/36`.
pub fn product_weights_for(rho: &ComplexMatrix) -> Result<ProductDecomposition> {
    if rho.dim()? != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.rows(),
        });
    }
    let coeffs = pauli_expand(rho)?;
    let diag_key = |axis: Axis| -> PauliString {
        match axis {
            Axis::X => "XX",
            Axis::Y => "YY",
            Axis::Z => "ZZ",
        }
        .parse()
        .unwrap()
    };
    let identity: PauliString = "II".parse().unwrap();
    for (p, &c) in &coeffs {
        let allowed = *p == identity || Axis::ALL.iter().any(|&a| *p == diag_key(a));
        if !allowed && c.abs() > WEIGHT_TOL {
            return Err(Error::InvalidArgument(format!("{p} component {c:e} is outside the canonical product form")));
        }
    }
    if (coeffs[&identity] - 0.25).abs() > WEIGHT_TOL {
        return Err(Error::NotDensityMatrix(format!("trace is {}", 4.0 * coeffs[&identity])));
    }
    let raw = SignedAxis::ALL.iter().flat_map(|&a| {
        let coeffs = &coeffs;
        SignedAxis::ALL.iter().map(move |&b| {
            let corr = if a.axis == b.axis {
                36.0 * coeffs[&diag_key(a.axis)] * a.sign.value() * b.sign.value()
            } else {
                0.0
            };
            ((a, b), (1.0 + corr) / 36.0)
        })
    });
    // epsilon of the effective Bell state with the same ZZ coefficient
    ProductDecomposition::from_raw(raw, 4.0 * coeffs[&diag_key(Axis::Z)])
}

/// `n·p_ij` molecules in each product state `|i⟩ ⊗ |j⟩`, counts unrounded.
pub fn decomposition_to_composition(d: &ProductDecomposition, n: u64) -> Result<EnsembleComposition> {
    if n == 0 {
        return Err(Error::InvalidArgument("molecule count must be positive".into()));
    }
    EnsembleComposition::new(
        d.weights
            .iter()
            .map(|(&(a, b), &w)| (n as f64 * w, a.state().kron(&b.state()))),
    )
}

/// Distribution of the kick angle `θ` in `K = exp(iσ_zθ)` (`ħ = 1`).
#[derive(Debug, Clone, PartialEq)]
pub enum KickModel {
    /// `θ` uniform on `[low, high)`, averaged analytically.
    Uniform { low: f64, high: f64 },
    /// Discrete rule: `θ = nodes[k]` with probability `weights[k]`.
    Quadrature { nodes: Vec<f64>, weights: Vec<f64> },
}

impl KickModel {
    pub fn uniform(low: f64, high: f64) -> Result<Self> {
        if !(low.is_finite() && high.is_finite() && high > low) {
            return Err(Error::InvalidArgument(format!("bad kick range [{low}, {high})")));
        }
        Ok(Self::Uniform { low, high })
    }

    pub fn quadrature(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(Error::InvalidArgument("quadrature needs matching nonempty nodes and weights".into()));
        }
        if nodes.iter().chain(&weights).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("quadrature"));
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::InvalidArgument("quadrature weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("quadrature weights sum to {total}")));
        }
        Ok(Self::Quadrature { nodes, weights })
    }

    pub fn point_mass(theta: f64) -> Result<Self> {
        Self::quadrature(vec![theta], vec![1.0])
    }

    /// Equal-weight midpoint rule with `m` nodes on `[low, high)`.
    pub fn midpoint(low: f64, high: f64, m: usize) -> Result<Self> {
        Self::uniform(low, high)?;
        if m == 0 {
            return Err(Error::InvalidArgument("midpoint rule needs at least one node".into()));
        }
        let h = (high - low) / m as f64;
        let nodes = (0..m).map(|k| low + (k as f64 + 0.5) * h).collect();
        Self::quadrature(nodes, vec![1.0 / m as f64; m])
    }
}

/// `exp(iσ_zθ) = diag(e^{iθ}, e^{−iθ})`.
pub fn kick_operator(theta: f64) -> ComplexMatrix {
    let z = Complex64::new(0.0, 0.0);
    ComplexMatrix::new(
        2,
        2,
        vec![
            Complex64::from_polar(1.0, theta),
            z,
            z,
            Complex64::from_polar(1.0, -theta),
        ],
    )
    .unwrap()
}

/// `⟨K ρ K†⟩` over the kick distribution.
pub fn random_kick_average(rho: &ComplexMatrix, kick: &KickModel) -> Result<ComplexMatrix> {
    if rho.dim()? != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: rho.rows(),
        });
    }
    validate_density_matrix(rho)?;
    match kick {
        KickModel::Uniform { low, high } => {
            // ρ01 picks up e^{2iθ}; its mean vanishes over whole half-periods
            let periods = (high - low) / PI;
            let factor = if (periods - periods.round()).abs() < 1e-12 {
                Complex64::new(0.0, 0.0)
            } else {
                (Complex64::from_polar(1.0, 2.0 * high) - Complex64::from_polar(1.0, 2.0 * low))
                    / Complex64::new(0.0, 2.0 * (high - low))
            };
            let mut out = rho.clone();
            out[(0, 1)] = rho[(0, 1)] * factor;
            out[(1, 0)] = rho[(1, 0)] * factor.conj();
            Ok(out)
        }
        KickModel::Quadrature { nodes, weights } => {
            Ok(nodes
                .iter()
                .zip(weights)
                .fold(ComplexMatrix::zeros(2, 2), |acc, (&theta, &w)| {
                    let k = kick_operator(theta);
                    &acc + &(&(&k * rho) * &k.adjoint()).scale_real(w)
                }))
        }
    }
}

/// Proper ensemble of kicked molecules: `n·w_k` molecules in `K(θ_k)|ψ⟩`.
pub fn kicked_composition(state: &PureState, kick: &KickModel, n: u64) -> Result<EnsembleComposition> {
    let KickModel::Quadrature { nodes, weights } = kick else {
        return Err(Error::InvalidArgument("a kicked composition needs a discrete kick distribution".into()));
    };
    if state.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: state.dim(),
        });
    }
    let components = nodes
        .iter()
        .zip(weights)
        .map(|(&theta, &w)| {
            let image = kick_operator(theta).apply(state.amplitudes())?;
            Ok((n as f64 * w, PureState::normalized(image)?))
        })
        .collect::<Result<Vec<_>>>()?;
    EnsembleComposition::new(components)
}

/// Level energies `E_n` and transition rates `W`, keyed by `(from, to)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GorterInput {
    energies: Vec<f64>,
    rates: BTreeMap<(usize, usize), f64>,
}

impl GorterInput {
    pub fn new(energies: Vec<f64>, rates: BTreeMap<(usize, usize), f64>) -> Result<Self> {
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFinite("energies"));
        }
        if energies.iter().map(|e| e * e).sum::<f64>() <= 0.0 {
            return Err(Error::InvalidArgument("sum of squared energies must be positive".into()));
        }
        for (&(m, n), &w) in &rates {
            if m >= energies.len() || n >= energies.len() {
                return Err(Error::InvalidArgument(format!("rate ({m}, {n}) refers to a missing level")));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidArgument(format!("rate ({m}, {n}) = {w} is not a nonnegative number")));
            }
        }
        Ok(Self { energies, rates })
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn rates(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.rates
    }
}

/// `T₁` from `1/T₁ = ½ Σ_{n,m} W_{n,m}(E_m − E_n)² / Σ_n E_n²`.
pub fn gorter_t1(g: &GorterInput) -> Result<f64> {
    let numerator: f64 = g
        .rates
        .iter()
        .map(|(&(m, n), &w)| {
            let gap = g.energies[m] - g.energies[n];
            w * gap * gap
        })
        .sum();
    let denominator: f64 = g.energies.iter().map(|e| e * e).sum();
    let rate = 0.5 * numerator / denominator;
    if rate <= 0.0 {
        return Err(Error::NoRelaxation);
    }
    Ok(1.0 / rate)
}
