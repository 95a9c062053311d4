//! Born-rule measurement simulation and Monte Carlo estimates of ensemble
//! fluctuations.
//!
//! Every round prepares a fresh ensemble and measures each molecule once.
//! Randomness is counter-addressed: round `r` of seed `s` reads ChaCha8
//! stream `r` keyed by `s`, and molecule `k` of that round consumes the
//! `k`-th 64-bit word pair of the stream. Rounds can therefore run on any
//! number of threads and still reproduce bit-for-bit.

use std::fmt;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ensemble::{fluctuation_proper, EnsembleComposition, IdenticalMixedEnsemble, INTEGRAL_TOL};
use crate::linalg::{eigendecompose, ComplexMatrix, EigenDecomposition, HermitianObservable, PureState};
use crate::observables::CollectiveObservable;
use crate::{Error, Result};

/// Born probabilities must sum to 1 within this before sampling.
pub const PROBABILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleConfig {
    pub seed: u64,
    pub rounds: usize,
}

impl SampleConfig {
    pub fn new(seed: u64, rounds: usize) -> Result<Self> {
        if rounds == 0 {
            return Err(Error::InvalidArgument("rounds must be at least 1".into()));
        }
        Ok(Self { seed, rounds })
    }
}

/// Independent random stream `stream` of `seed`.
pub fn seeded_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Child seed number `index` of `seed`, for runs that sample several
/// ensembles from one user seed. Drawn from streams disjoint from the
/// round streams of small round indices.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    use rand::RngCore;
    seeded_stream(seed, (1 << 63) | index).next_u64()
}

/// Outcome distribution of one observable on one state.
#[derive(Debug, Clone)]
pub struct BornSampler {
    outcomes: Vec<f64>,
    cumulative: Vec<f64>,
}

impl BornSampler {
    pub fn new(state: &PureState, spectrum: &EigenDecomposition) -> Result<Self> {
        Ok(Self::from_probabilities(spectrum, born_probabilities(state, spectrum)?))
    }

    /// Sampler for a molecule in the mixed state `rho`: `P(λ_k) = Tr(ρΠ_k)`.
    pub fn from_density(rho: &ComplexMatrix, spectrum: &EigenDecomposition) -> Result<Self> {
        let mut probs = spectrum
            .projectors()
            .iter()
            .map(|p| Ok(rho.matmul(p)?.trace().re.max(0.0)))
            .collect::<Result<Vec<f64>>>()?;
        normalize(&mut probs)?;
        Ok(Self::from_probabilities(spectrum, probs))
    }

    fn from_probabilities(spectrum: &EigenDecomposition, probs: Vec<f64>) -> Self {
        let mut acc = 0.0;
        let cumulative = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Self {
            outcomes: spectrum.eigenvalues().to_vec(),
            cumulative,
        }
    }

    pub fn outcomes(&self) -> &[f64] {
        &self.outcomes
    }

    /// Draws one eigenvalue using exactly one `f64` from `rng`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen();
        let k = self
            .cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.outcomes.len() - 1);
        self.outcomes[k]
    }
}

/// `⟨ψ|Π_k|ψ⟩` for every eigenspace, renormalized to sum to 1.
pub fn born_probabilities(state: &PureState, spectrum: &EigenDecomposition) -> Result<Vec<f64>> {
    let dim = spectrum.projectors()[0].rows();
    if state.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: state.dim(),
        });
    }
    let mut probs = spectrum
        .projectors()
        .iter()
        .map(|p| Ok(state.sandwich(p)?.re.max(0.0)))
        .collect::<Result<Vec<f64>>>()?;
    normalize(&mut probs)?;
    Ok(probs)
}

fn normalize(probs: &mut [f64]) -> Result<()> {
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > PROBABILITY_TOL {
        return Err(Error::ProbabilityNormalization { total });
    }
    for p in probs {
        *p /= total;
    }
    Ok(())
}

/// Measures `omega` on `state` once.
pub fn born_sample<R: Rng + ?Sized>(state: &PureState, omega: &HermitianObservable, rng: &mut R) -> Result<f64> {
    let spectrum = eigendecompose(omega)?;
    Ok(BornSampler::new(state, &spectrum)?.sample(rng))
}

/// Per-component samplers for an integer-count composition.
struct PreparedEnsemble {
    parts: Vec<(u64, BornSampler)>,
}

impl PreparedEnsemble {
    fn new(comp: &EnsembleComposition, omega: &HermitianObservable) -> Result<Self> {
        if comp.dim() != omega.dim() {
            return Err(Error::DimensionMismatch {
                expected: comp.dim(),
                got: omega.dim(),
            });
        }
        let counts = comp.integer_counts()?;
        let spectrum = eigendecompose(omega)?;
        let parts = comp
            .components()
            .iter()
            .zip(counts)
            .map(|(c, n)| Ok((n, BornSampler::new(&c.state, &spectrum)?)))
            .collect::<Result<_>>()?;
        Ok(Self { parts })
    }

    fn round<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut total = 0.0;
        for (n, sampler) in &self.parts {
            for _ in 0..*n {
                total += sampler.sample(rng);
            }
        }
        total
    }
}

/// One fresh preparation of the ensemble: every molecule is measured once
/// with its own randomness and the outcomes are summed.
pub fn sample_collective_round<R: Rng + ?Sized>(
    comp: &EnsembleComposition,
    omega: &CollectiveObservable,
    rng: &mut R,
) -> Result<f64> {
    Ok(PreparedEnsemble::new(comp, &omega.per_molecule)?.round(rng))
}

/// Collective sums of `cfg.rounds` independent rounds, in round order.
pub fn round_sums(comp: &EnsembleComposition, omega: &CollectiveObservable, cfg: &SampleConfig) -> Result<Vec<f64>> {
    let prepared = PreparedEnsemble::new(comp, &omega.per_molecule)?;
    Ok((0..cfg.rounds)
        .into_par_iter()
        .map(|r| prepared.round(&mut seeded_stream(cfg.seed, r as u64)))
        .collect())
}

/// Per-round collective sums for `N` molecules all in the mixed state `ρ`.
pub fn identical_mixed_round_sums(
    ens: &IdenticalMixedEnsemble,
    omega: &CollectiveObservable,
    cfg: &SampleConfig,
) -> Result<Vec<f64>> {
    let n = ens.n_molecules();
    if (n - n.round()).abs() > INTEGRAL_TOL {
        return Err(Error::NonIntegralCount { index: 0, count: n });
    }
    let sampler = BornSampler::from_density(ens.rho(), &eigendecompose(&omega.per_molecule)?)?;
    let n = n.round() as u64;
    Ok((0..cfg.rounds)
        .into_par_iter()
        .map(|r| {
            let mut rng = seeded_stream(cfg.seed, r as u64);
            (0..n).map(|_| sampler.sample(&mut rng)).sum()
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub empirical_mean: f64,
    pub empirical_std: f64,
    /// Normal-approximation standard error `s/√(2(R−1))` of `empirical_std`.
    pub stderr_of_std: f64,
    pub rounds: usize,
    /// Exact `(mean, std)` of the collective observable, when known.
    pub exact_reference: Option<(f64, f64)>,
}

/// Sample mean and sample standard deviation (`R − 1` denominator).
pub fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let r = values.len() as f64;
    let mean = values.iter().sum::<f64>() / r;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (r - 1.0)).sqrt())
}

impl EstimateReport {
    pub fn from_samples(values: &[f64], exact_reference: Option<(f64, f64)>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidArgument("at least two rounds are needed".into()));
        }
        let (mean, std) = mean_and_std(values);
        Ok(Self {
            empirical_mean: mean,
            empirical_std: std,
            stderr_of_std: std / (2.0 * (values.len() - 1) as f64).sqrt(),
            rounds: values.len(),
            exact_reference,
        })
    }

    /// Whether the exact fluctuation lies within `k` standard errors.
    pub fn covers_exact_std(&self, k: f64) -> Option<bool> {
        self.exact_reference
            .map(|(_, std)| (self.empirical_std - std).abs() <= k * self.stderr_of_std)
    }
}

/// Monte Carlo estimate of the collective mean and fluctuation over
/// `cfg.rounds ≥ 2` fresh ensembles.
pub fn estimate_fluctuation(
    comp: &EnsembleComposition,
    omega: &CollectiveObservable,
    cfg: &SampleConfig,
) -> Result<EstimateReport> {
    if cfg.rounds < 2 {
        return Err(Error::InvalidArgument("at least two rounds are needed".into()));
    }
    let exact = fluctuation_proper(comp, &omega.per_molecule)?;
    let sums = round_sums(comp, omega, cfg)?;
    EstimateReport::from_samples(&sums, Some((exact.expectation_ensemble, exact.fluctuation)))
}

/// Exact probability law of the collective sum for an integer-count
/// composition, as `(value, probability)` sorted by value.
///
/// Convolves each molecule's Born distribution; sums closer than `1e-9`
/// share one support point.
pub fn collective_distribution(comp: &EnsembleComposition, omega: &HermitianObservable) -> Result<Vec<(f64, f64)>> {
    if comp.dim() != omega.dim() {
        return Err(Error::DimensionMismatch {
            expected: comp.dim(),
            got: omega.dim(),
        });
    }
    let counts = comp.integer_counts()?;
    let spectrum = eigendecompose(omega)?;
    let mut law = vec![(0.0, 1.0)];
    for (c, n) in comp.components().iter().zip(counts) {
        let probs = born_probabilities(&c.state, &spectrum)?;
        let single: Vec<(f64, f64)> = spectrum
            .eigenvalues()
            .iter()
            .copied()
            .zip(probs)
            .filter(|&(_, p)| p > 0.0)
            .collect();
        for _ in 0..n {
            let mut next: Vec<(f64, f64)> = law
                .iter()
                .flat_map(|&(v, p)| single.iter().map(move |&(w, q)| (v + w, p * q)))
                .collect();
            next.sort_by(|a, b| a.0.total_cmp(&b.0));
            law = Vec::with_capacity(next.len());
            for (v, p) in next {
                match law.last_mut() {
                    Some((lv, lp)) if (v - *lv).abs() <= 1e-9 => *lp += p,
                    _ => law.push((v, p)),
                }
            }
        }
    }
    Ok(law)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Z,
    X,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Z => "z",
            Basis::X => "x",
        })
    }
}

impl std::str::FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "z" | "Z" => Ok(Basis::Z),
            "x" | "X" => Ok(Basis::X),
            other => Err(Error::InvalidArgument(format!("unknown basis {other:?}"))),
        }
    }
}

impl Basis {
    /// Single-qubit projectors for outcome bits 0 and 1.
    fn projectors(self) -> [ComplexMatrix; 2] {
        match self {
            Basis::Z => [PureState::basis(2, 0).projector(), PureState::basis(2, 1).projector()],
            Basis::X => [PureState::plus_x().projector(), PureState::minus_x().projector()],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreskillResult {
    pub agreement_rate: f64,
    pub matches: u64,
    pub basis_used: Basis,
    pub pairs: u64,
}

/// Joint law of (Bob's bit, Alice's σ_z bit) on `(|00⟩+|11⟩)/√2` when Bob
/// (qubit 1) measures in `basis` first and Alice (qubit 0) then measures σ_z
/// on her collapsed qubit.
fn preskill_joint_law(basis: Basis) -> [[f64; 2]; 2] {
    let bell = PureState::bell_phi_plus();
    let id = ComplexMatrix::identity(2);
    let alice = Basis::Z.projectors();
    let mut law = [[0.0; 2]; 2];
    for (b, bob_proj) in basis.projectors().iter().enumerate() {
        let collapsed = id.kron(bob_proj).apply(bell.amplitudes()).expect("4-dim");
        let p_bob: f64 = collapsed.iter().map(|z| z.norm_sqr()).sum();
        if p_bob == 0.0 {
            continue;
        }
        let post = PureState::normalized(collapsed).expect("nonzero branch");
        for (a, alice_proj) in alice.iter().enumerate() {
            let p_alice = post.sandwich(&alice_proj.kron(&id)).expect("4-dim").re.max(0.0);
            law[b][a] = p_bob * p_alice;
        }
    }
    law
}

/// Simulates Bob measuring his halves of `pairs` Bell pairs in `bob_basis`
/// and Alice measuring her halves in σ_z; counts pairs whose outcome bits
/// agree (Bob's `|0⟩,|+x⟩ ↦ 0`, `|1⟩,|−x⟩ ↦ 1`).
pub fn preskill_protocol<R: Rng + ?Sized>(pairs: u64, bob_basis: Basis, rng: &mut R) -> Result<PreskillResult> {
    if pairs == 0 {
        return Err(Error::InvalidArgument("at least one pair is needed".into()));
    }
    let law = preskill_joint_law(bob_basis);
    let p_bob0 = law[0][0] + law[0][1];
    let mut matches = 0u64;
    for _ in 0..pairs {
        let bob = usize::from(rng.gen::<f64>() >= p_bob0);
        let row = law[bob];
        let p_alice0 = row[0] / (row[0] + row[1]);
        let alice = usize::from(rng.gen::<f64>() >= p_alice0);
        if alice == bob {
            matches += 1;
        }
    }
    Ok(PreskillResult {
        agreement_rate: matches as f64 / pairs as f64,
        matches,
        basis_used: bob_basis,
        pairs,
    })
}

/// Agreement counts of `cfg.rounds` independent protocol runs, in round order.
pub fn preskill_round_counts(pairs: u64, bob_basis: Basis, cfg: &SampleConfig) -> Result<Vec<f64>> {
    (0..cfg.rounds)
        .into_par_iter()
        .map(|r| Ok(preskill_protocol(pairs, bob_basis, &mut seeded_stream(cfg.seed, r as u64))?.matches as f64))
        .collect()
}

/// Exact mean and standard deviation of the number of agreeing pairs.
pub fn preskill_exact(pairs: u64, bob_basis: Basis) -> (f64, f64) {
    let law = preskill_joint_law(bob_basis);
    let p = law[0][0] + law[1][1];
    let n = pairs as f64;
    (n * p, (n * p * (1.0 - p)).max(0.0).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Choice {
    First,
    Second,
    Inconclusive,
}

impl fmt::Display for Choice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Choice::First => "first",
            Choice::Second => "second",
            Choice::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistinguishReport {
    pub observable_label: String,
    /// Combined z-score of the better-fitting hypothesis.
    pub z_statistic: f64,
    pub z_first: f64,
    pub z_second: f64,
    pub chosen: Choice,
    pub threshold: f64,
}

pub const DEFAULT_THRESHOLD: f64 = 3.0;

/// Distance of an observed value from a prediction in units of `spread`;
/// a zero spread tolerates only roundoff.
fn z_score(observed: f64, predicted: f64, spread: f64) -> f64 {
    let diff = (observed - predicted).abs();
    if spread > 1e-12 {
        diff / spread
    } else if diff <= 1e-9 * predicted.abs().max(1.0) {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Combined mean/std z-score of data against a predicted `(mean, std)`.
fn hypothesis_z(data: &[f64], mean: f64, std: f64) -> f64 {
    let r = data.len() as f64;
    let (m, s) = mean_and_std(data);
    let z_mean = z_score(m, mean, std / r.sqrt());
    if data.len() < 2 {
        return z_mean;
    }
    let z_std = z_score(s, std, std / (2.0 * (r - 1.0)).sqrt());
    (z_mean * z_mean + z_std * z_std).sqrt()
}

/// Decides which of two compositions produced `data` (per-round collective
/// sums of `omega`) by matching the first two moments.
///
/// The verdict is inconclusive when both hypotheses fit within `threshold`
/// or when they predict identical moments.
pub fn distinguish_compositions(
    a: &EnsembleComposition,
    b: &EnsembleComposition,
    omega: &CollectiveObservable,
    data: &[f64],
    threshold: f64,
) -> Result<DistinguishReport> {
    if data.is_empty() {
        return Err(Error::InvalidArgument("no data".into()));
    }
    if data.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("data"));
    }
    let fa = fluctuation_proper(a, &omega.per_molecule)?;
    let fb = fluctuation_proper(b, &omega.per_molecule)?;
    let z_first = hypothesis_z(data, fa.expectation_ensemble, fa.fluctuation);
    let z_second = hypothesis_z(data, fb.expectation_ensemble, fb.fluctuation);

    let scale = fa
        .expectation_ensemble
        .abs()
        .max(fb.expectation_ensemble.abs())
        .max(1.0);
    let degenerate = (fa.expectation_ensemble - fb.expectation_ensemble).abs() <= 1e-12 * scale
        && (fa.fluctuation - fb.fluctuation).abs() <= 1e-12 * scale;
    let chosen = if degenerate || (z_first <= threshold && z_second <= threshold) || z_first == z_second {
        Choice::Inconclusive
    } else if z_first < z_second {
        Choice::First
    } else {
        Choice::Second
    };
    Ok(DistinguishReport {
        observable_label: omega.label.clone(),
        z_statistic: z_first.min(z_second),
        z_first,
        z_second,
        chosen,
        threshold,
    })
}
