//! Self-check suite behind `esd verify`.
//!
//! The fluctuation formula under test is a parameter so a deliberately
//! corrupted formula can prove the suite notices.

use std::io::{self, Write};

use esd_core::decompositions::{
    braunstein_decomposition, decomposition_to_composition, effective_bell_composition, effective_pure_density,
    EffectivePureParams,
};
use esd_core::ensemble::catalog::{four_state_mixture, x_basis_mixture, z_basis_mixture};
use esd_core::ensemble::{
    ensemble_expectation, fluctuation_identical_mixed, fluctuation_proper, oracle_fluctuation, same_density_matrix,
    EnsembleComposition, IdenticalMixedEnsemble,
};
use esd_core::linalg::{ComplexMatrix, HermitianObservable, PureState};
use esd_core::observables::{sigma_z_single, sigma_zz_pair};
use esd_core::{Complex64, Error};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Collective fluctuation of `Ω` over a proper composition.
pub type FluctuationFormula = fn(&EnsembleComposition, &HermitianObservable) -> esd_core::Result<f64>;

pub fn standard_formula(comp: &EnsembleComposition, omega: &HermitianObservable) -> esd_core::Result<f64> {
    Ok(fluctuation_proper(comp, omega)?.fluctuation)
}

const SUITE_SEED: u64 = 0x5eed;
const ORACLE_CASES: usize = 60;
const ESD_OBSERVABLES: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn random_state<R: Rng>(rng: &mut R, dim: usize) -> PureState {
    loop {
        let amps: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        if let Ok(s) = PureState::normalized(amps) {
            return s;
        }
    }
}

fn random_hermitian<R: Rng>(rng: &mut R, dim: usize) -> HermitianObservable {
    let a = ComplexMatrix::from_fn(dim, dim, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    HermitianObservable::new(&a + &a.adjoint()).expect("A + A† is Hermitian")
}

/// Up to three components with whole counts totalling at most five molecules.
fn random_composition<R: Rng>(rng: &mut R, dim: usize) -> EnsembleComposition {
    let mut left = rng.gen_range(1..=5u32);
    let mut parts = Vec::new();
    while left > 0 && parts.len() < 3 {
        let k = rng.gen_range(1..=left);
        parts.push((f64::from(k), random_state(rng, dim)));
        left -= k;
    }
    EnsembleComposition::new(parts).expect("positive counts")
}

fn check<F: FnOnce() -> Result<String, String>>(name: &'static str, body: F) -> InvariantResult {
    match body() {
        Ok(detail) => InvariantResult {
            name,
            passed: true,
            detail,
        },
        Err(detail) => InvariantResult {
            name,
            passed: false,
            detail,
        },
    }
}

fn close(what: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{what}: got {got}, expected {want}"))
    }
}

fn lift<T>(r: esd_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn despagnat_values(formula: FluctuationFormula) -> Result<String, String> {
    let sz = sigma_z_single().per_molecule;
    for n in [2.0, 100.0, 1e6] {
        close(&format!("z-basis mixture, N={n}"), lift(formula(&z_basis_mixture(n), &sz))?, 0.0, 1e-10)?;
        close(&format!("x-basis mixture, N={n}"), lift(formula(&x_basis_mixture(n), &sz))?, n.sqrt(), 1e-10)?;
    }
    Ok("N in {2, 100, 1e6}".into())
}

fn oracle_equivalence(formula: FluctuationFormula) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED);
    let mut worst: f64 = 0.0;
    for case in 0..ORACLE_CASES {
        let dim = if case % 2 == 0 { 2 } else { 4 };
        let comp = random_composition(&mut rng, dim);
        let omega = random_hermitian(&mut rng, dim);
        let (_, oracle) = lift(oracle_fluctuation(&comp, &omega))?;
        let value = lift(formula(&comp, &omega))?;
        worst = worst.max((value - oracle).abs());
        close(&format!("case {case}"), value, oracle, 1e-8)?;
    }
    Ok(format!("{ORACLE_CASES} cases, max deviation {worst:.1e}"))
}

fn decomposition_reconstruction(formula: FluctuationFormula) -> Result<String, String> {
    for eps in [0.0, 0.05, 1.0 / 9.0] {
        let d = lift(braunstein_decomposition(eps))?;
        let target = effective_pure_density(&lift(EffectivePureParams::new(eps, PureState::bell_phi_plus()))?);
        let dev = d.reconstruct().max_abs_diff(&target);
        if dev > 1e-12 {
            return Err(format!("epsilon {eps}: reconstruction off by {dev:e}"));
        }
        close(&format!("epsilon {eps}: minimum weight"), d.min_weight(), (1.0 - 9.0 * eps) / 36.0, 1e-14)?;
    }
    match braunstein_decomposition(0.12) {
        Err(Error::PositivityViolation { .. }) => {}
        other => return Err(format!("epsilon 0.12 accepted: {other:?}")),
    }
    let zz = sigma_zz_pair().per_molecule;
    let bell = lift(effective_bell_composition(900, 0.1))?;
    let product = lift(decomposition_to_composition(&lift(braunstein_decomposition(0.1))?, 900))?;
    close("effective Bell sigma_zz", lift(formula(&bell, &zz))?, 0.0, 1e-9)?;
    close("product sigma_zz", lift(formula(&product, &zz))?, 800f64.sqrt(), 1e-9)?;
    Ok("epsilon in {0, 0.05, 1/9}; 0.12 rejected".into())
}

fn esd_expectation_invariance(formula: FluctuationFormula) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED ^ 1);
    let pairs = [
        (z_basis_mixture(100.0), x_basis_mixture(100.0)),
        (z_basis_mixture(100.0), four_state_mixture(100.0)),
        (
            lift(effective_bell_composition(900, 0.1))?,
            lift(decomposition_to_composition(&lift(braunstein_decomposition(0.1))?, 900))?,
        ),
    ];
    let mut max_gap: f64 = 0.0;
    for (idx, (a, b)) in pairs.iter().enumerate() {
        if !lift(same_density_matrix(a, b, 1e-12))? {
            return Err(format!("pair {idx}: density matrices differ"));
        }
        for _ in 0..ESD_OBSERVABLES {
            let omega = random_hermitian(&mut rng, a.dim());
            let (ea, eb) = (lift(ensemble_expectation(a, &omega))?, lift(ensemble_expectation(b, &omega))?);
            if (ea - eb).abs() > 1e-9 * ea.abs().max(eb.abs()).max(1.0) {
                return Err(format!("pair {idx}: expectations {ea} and {eb} differ"));
            }
            max_gap = max_gap.max((lift(formula(a, &omega))? - lift(formula(b, &omega))?).abs());
        }
    }
    let sz = sigma_z_single().per_molecule;
    let canonical = (lift(formula(&pairs[0].0, &sz))? - lift(formula(&pairs[0].1, &sz))?).abs();
    if canonical <= 1e-6 {
        return Err("z- and x-basis mixtures have equal sigma_z fluctuations".into());
    }
    Ok(format!(
        "{} pairs x {ESD_OBSERVABLES} observables; largest fluctuation gap {max_gap:.3}",
        pairs.len()
    ))
}

fn identical_mixed_contrast(formula: FluctuationFormula) -> Result<String, String> {
    let sz = sigma_z_single().per_molecule;
    let mixed = lift(IdenticalMixedEnsemble::new(100.0, ComplexMatrix::identity(2).scale_real(0.5)))?;
    close("identical mixed", lift(fluctuation_identical_mixed(&mixed, &sz))?, 10.0, 1e-10)?;
    close("z-basis mixture", lift(formula(&z_basis_mixture(100.0), &sz))?, 0.0, 1e-10)?;
    Ok("10 versus 0 at N = 100".into())
}

/// Every invariant, in a fixed order.
pub fn run_invariants(formula: FluctuationFormula) -> Vec<InvariantResult> {
    vec![
        check("despagnat_values", || despagnat_values(formula)),
        check("oracle_equivalence", || oracle_equivalence(formula)),
        check("decomposition_reconstruction", || decomposition_reconstruction(formula)),
        check("esd_expectation_invariance", || esd_expectation_invariance(formula)),
        check("identical_mixed_contrast", || identical_mixed_contrast(formula)),
    ]
}

/// Prints one line per invariant; `0` when all pass, `1` otherwise.
pub fn verify_with<W: Write>(formula: FluctuationFormula, mut out: W) -> io::Result<i32> {
    let results = run_invariants(formula);
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        writeln!(out, "{status} {} ({})", r.name, r.detail)?;
    }
    let passed = results.iter().filter(|r| r.passed).count();
    writeln!(out, "{passed}/{} invariants passed", results.len())?;
    Ok(if passed == results.len() {
        crate::EXIT_OK
    } else {
        crate::EXIT_VERIFY_FAILED
    })
}

pub fn verify<W: Write>(out: W) -> io::Result<i32> {
    verify_with(standard_formula, out)
}
