//! Acceptance gate: criteria 1 to 10, one PASS/FAIL line each.
//!
//! Lines go straight to the stderr handle so they show without
//! `--nocapture`; the test fails if any criterion fails.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::{Duration, Instant};

use esd_cli::{render, ScenarioConfig};
use esd_core::decompositions::{
    braunstein_decomposition, decomposition_to_composition, effective_bell_composition, effective_pure_density,
    gorter_t1, EffectivePureParams, GorterInput,
};
use esd_core::ensemble::catalog::{four_state_mixture, x_basis_mixture, z_basis_mixture};
use esd_core::ensemble::{
    density_matrix, ensemble_expectation, fluctuation_identical_mixed, fluctuation_proper, oracle_fluctuation,
    EnsembleComposition, IdenticalMixedEnsemble,
};
use esd_core::linalg::{eigendecompose, ComplexMatrix, HermitianObservable, PureState};
use esd_core::observables::{sigma_z_single, sigma_zz_pair};
use esd_core::sampling::{
    collective_distribution, estimate_fluctuation, preskill_protocol, seeded_stream, Basis, SampleConfig,
};
use esd_core::{Complex64, Error};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// Id, name, check, runtime budget.
type Criterion = (u32, &'static str, fn() -> Outcome, Duration);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ok<T>(r: esd_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> PureState {
    let amps = (0..dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    PureState::normalized(amps).unwrap()
}

fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> HermitianObservable {
    let a = ComplexMatrix::from_fn(dim, dim, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    HermitianObservable::new(&a + &a.adjoint()).unwrap()
}

fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    let h = random_hermitian(rng, dim);
    eigendecompose(&h)
        .unwrap()
        .iter()
        .fold(ComplexMatrix::zeros(dim, dim), |acc, (l, p)| &acc + &p.scale(Complex64::new(0.0, l).exp()))
}

/// Another preparation of the same density matrix: the unnormalized vectors
/// `√N_i ψ_i` are mixed by a random unitary, `φ_j = Σ_i U_ji √N_i ψ_i`,
/// giving `‖φ_j‖²` molecules in `φ_j/‖φ_j‖`.
fn remix(comp: &EnsembleComposition, rng: &mut ChaCha8Rng) -> EnsembleComposition {
    let k = comp.components().len();
    let u = random_unitary(rng, k);
    let dim = comp.dim();
    let parts = (0..k).filter_map(|j| {
        let mut phi = vec![Complex64::new(0.0, 0.0); dim];
        for (i, c) in comp.components().iter().enumerate() {
            for (p, a) in phi.iter_mut().zip(c.state.amplitudes()) {
                *p += u[(j, i)] * c.count.sqrt() * a;
            }
        }
        let weight: f64 = phi.iter().map(|z| z.norm_sqr()).sum();
        (weight > 1e-12).then(|| (weight, PureState::normalized(phi).unwrap()))
    });
    EnsembleComposition::new(parts.collect::<Vec<_>>()).unwrap()
}

fn criterion_1() -> Outcome {
    let sz = sigma_z_single().per_molecule;
    for n in [2.0, 100.0, 1e6] {
        let a = ok(fluctuation_proper(&z_basis_mixture(n), &sz))?.fluctuation;
        let b = ok(fluctuation_proper(&x_basis_mixture(n), &sz))?.fluctuation;
        ensure(a.abs() <= 1e-10, || format!("N={n}: z-basis fluctuation {a}"))?;
        ensure((b - n.sqrt()).abs() <= 1e-10, || format!("N={n}: x-basis fluctuation {b}"))?;
    }
    Ok("0 and sqrt(N) for N in {2, 100, 1e6}".into())
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let dim = if case % 2 == 0 { 2 } else { 4 };
        let mut left = rng.gen_range(1..=5u32);
        let mut parts = Vec::new();
        while left > 0 {
            let k = rng.gen_range(1..=left);
            parts.push((f64::from(k), random_state(&mut rng, dim)));
            left -= k;
        }
        let comp = ok(EnsembleComposition::new(parts))?;
        let omega = random_hermitian(&mut rng, dim);
        let exact = ok(fluctuation_proper(&comp, &omega))?.fluctuation;
        let (_, oracle) = ok(oracle_fluctuation(&comp, &omega))?;
        worst = worst.max((exact - oracle).abs());
    }
    ensure(worst <= 1e-8, || format!("max deviation {worst:e}"))?;
    Ok(format!("200 compositions, max deviation {worst:.1e}"))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let canonical = vec![
        (z_basis_mixture(100.0), x_basis_mixture(100.0)),
        (z_basis_mixture(100.0), four_state_mixture(100.0)),
        (
            ok(effective_bell_composition(900, 0.1))?,
            ok(decomposition_to_composition(&ok(braunstein_decomposition(0.1))?, 900))?,
        ),
    ];
    let canonical_count = canonical.len();
    let mut pairs = canonical;
    while pairs.len() < 50 {
        let dim = [2, 3, 4][pairs.len() % 3];
        let k = rng.gen_range(2..=4);
        let comp = ok(EnsembleComposition::new(
            (0..k)
                .map(|_| (rng.gen_range(1.0..40.0), random_state(&mut rng, dim)))
                .collect::<Vec<_>>(),
        ))?;
        let other = remix(&comp, &mut rng);
        pairs.push((comp, other));
    }
    let mut canonical_gap: f64 = 0.0;
    for (idx, (a, b)) in pairs.iter().enumerate() {
        let dev = density_matrix(a).max_abs_diff(&density_matrix(b));
        ensure(dev <= 1e-10 * a.total().max(1.0), || format!("pair {idx}: density matrices differ by {dev:e}"))?;
        for _ in 0..20 {
            let omega = random_hermitian(&mut rng, a.dim());
            let (ea, eb) = (ok(ensemble_expectation(a, &omega))?, ok(ensemble_expectation(b, &omega))?);
            let scale = ea.abs().max(eb.abs()).max(1.0);
            ensure((ea - eb).abs() <= 1e-9 * scale, || format!("pair {idx}: expectations {ea} vs {eb}"))?;
            if idx < canonical_count {
                let fa = ok(fluctuation_proper(a, &omega))?.fluctuation;
                let fb = ok(fluctuation_proper(b, &omega))?.fluctuation;
                canonical_gap = canonical_gap.max((fa - fb).abs());
            }
        }
    }
    ensure(canonical_gap > 1e-6, || "no canonical pair differs in fluctuation".into())?;
    Ok(format!("50 pairs x 20 observables; canonical fluctuation gap {canonical_gap:.3}"))
}

fn criterion_4() -> Outcome {
    for eps in [0.0, 0.05, 1.0 / 9.0] {
        let d = ok(braunstein_decomposition(eps))?;
        let target = effective_pure_density(&ok(EffectivePureParams::new(eps, PureState::bell_phi_plus()))?);
        let dev = d.reconstruct().max_abs_diff(&target);
        ensure(dev <= 1e-12, || format!("epsilon {eps}: reconstruction off by {dev:e}"))?;
        let gap = (d.min_weight() - (1.0 - 9.0 * eps) / 36.0).abs();
        ensure(gap <= 1e-14, || format!("epsilon {eps}: minimum weight off by {gap:e}"))?;
    }
    match braunstein_decomposition(0.12) {
        Err(Error::PositivityViolation { .. }) => {
            Ok("reconstructs for epsilon in {0, 0.05, 1/9}; 0.12 rejected".into())
        }
        other => Err(format!("epsilon 0.12 gave {other:?}")),
    }
}

fn distribution_moments(comp: &EnsembleComposition, omega: &HermitianObservable) -> Result<(f64, f64), String> {
    let law = ok(collective_distribution(comp, omega))?;
    let mean: f64 = law.iter().map(|(v, p)| v * p).sum();
    let var: f64 = law.iter().map(|(v, p)| (v - mean).powi(2) * p).sum();
    Ok((mean, var.max(0.0).sqrt()))
}

fn criterion_5() -> Outcome {
    let zz = sigma_zz_pair().per_molecule;
    // N = 16, epsilon = 1/4: 4 Bell pairs and 3 of each basis state.
    let bell16 = ok(effective_bell_composition(16, 0.25))?;
    ensure(bell16.is_integral(), || "N=16 Bell composition is not integral".into())?;
    let exact = ok(fluctuation_proper(&bell16, &zz))?.fluctuation;
    let (_, oracle) = distribution_moments(&bell16, &zz)?;
    ensure(exact.abs() <= 1e-10 && oracle.abs() <= 1e-10, || format!("Bell N=16: {exact} / {oracle}"))?;
    // The full-state oracle fits only up to 4^10 amplitudes.
    let bell8 = ok(effective_bell_composition(8, 0.5))?;
    let (_, full) = ok(oracle_fluctuation(&bell8, &zz))?;
    ensure(full.abs() <= 1e-10, || format!("Bell N=8 full-state oracle {full}"))?;

    // Product weights times N are whole at N = 36k for epsilon in {0, 1/9}.
    for (n, eps) in [(36, 0.0), (36, 1.0 / 9.0), (72, 1.0 / 9.0)] {
        let product = ok(decomposition_to_composition(&ok(braunstein_decomposition(eps))?, n))?;
        let product = ok(product.apportioned())?;
        let want = (8.0 * n as f64 / 9.0).sqrt();
        let exact = ok(fluctuation_proper(&product, &zz))?.fluctuation;
        let (_, oracle) = distribution_moments(&product, &zz)?;
        ensure((exact - want).abs() <= 1e-9 && (oracle - want).abs() <= 1e-9, || {
            format!("product N={n} eps={eps}: {exact} / {oracle}, want {want}")
        })?;
    }
    let exact900 = ok(fluctuation_proper(
        &ok(decomposition_to_composition(&ok(braunstein_decomposition(0.1))?, 900))?,
        &zz,
    ))?
    .fluctuation;
    ensure((exact900 - 800f64.sqrt()).abs() <= 1e-9, || format!("product N=900: {exact900}"))?;

    let mut cfg = ScenarioConfig::new("bell-braunstein", 900);
    cfg.epsilon = Some(0.1);
    let (_, notes) = render(&cfg).map_err(|e| e.to_string())?;
    ensure(notes.iter().filter(|n| n.contains("unconfirmed")).count() == 2, || format!("notes: {notes:?}"))?;
    Ok("0 and sqrt(8N/9) confirmed by exact-distribution and full-state oracles; claimed values flagged".into())
}

fn criterion_6() -> Outcome {
    let z = ok(preskill_protocol(100_000, Basis::Z, &mut seeded_stream(6, 0)))?;
    ensure(z.agreement_rate == 1.0, || format!("z agreement {}", z.agreement_rate))?;
    let x = ok(preskill_protocol(100_000, Basis::X, &mut seeded_stream(6, 1)))?;
    ensure((x.agreement_rate - 0.5).abs() <= 0.01, || format!("x agreement {}", x.agreement_rate))?;
    Ok(format!("z agreement 1, x agreement {:.4}", x.agreement_rate))
}

fn criterion_7() -> Outcome {
    let comp = x_basis_mixture(100.0);
    let sz = sigma_z_single();
    let mut covered = 0;
    for seed in 0..20 {
        let r = ok(estimate_fluctuation(&comp, &sz, &ok(SampleConfig::new(seed, 10_000))?))?;
        if (r.empirical_std - 10.0).abs() <= 4.0 * r.stderr_of_std {
            covered += 1;
        }
    }
    ensure(covered >= 19, || format!("{covered}/20 seeds within 4 stderr"))?;
    Ok(format!("{covered}/20 seeds within 4 stderr of 10"))
}

fn criterion_8() -> Outcome {
    let sz = sigma_z_single().per_molecule;
    let m2 = ComplexMatrix::identity(2).scale_real(0.5);
    let mixed = ok(fluctuation_identical_mixed(&ok(IdenticalMixedEnsemble::new(100.0, m2.clone()))?, &sz))?;
    let proper = ok(fluctuation_proper(&z_basis_mixture(100.0), &sz))?.fluctuation;
    ensure((mixed - 10.0).abs() <= 1e-10, || format!("identical mixed {mixed}"))?;
    ensure(proper.abs() <= 1e-10, || format!("proper {proper}"))?;
    ensure(density_matrix(&z_basis_mixture(100.0)).max_abs_diff(&m2) <= 1e-15, || "density differs".into())?;
    Ok("10 versus 0 on the same density matrix".into())
}

fn criterion_9() -> Outcome {
    for (w, e) in [(1.0, 0.5), (0.3, 2.0), (1e-3, 7.5), (250.0, 1e-3)] {
        let g = ok(GorterInput::new(vec![-e, e], BTreeMap::from([((0, 1), w), ((1, 0), w)])))?;
        let t1 = ok(gorter_t1(&g))?;
        let want = 1.0 / (2.0 * w);
        ensure(((t1 - want) / want).abs() <= 1e-12, || format!("W={w}: T1={t1}, want {want}"))?;
    }
    // E = (0, 1, 3), W01 = W10 = 2, W12 = W21 = 1, W02 = 0.5 one way only:
    // Σ W gap² = 2·1 + 2·1 + 1·4 + 1·4 + 0.5·9 = 16.5, Σ E² = 10,
    // 1/T1 = 16.5/20, T1 = 40/33.
    let g = ok(GorterInput::new(
        vec![0.0, 1.0, 3.0],
        BTreeMap::from([
            ((0, 1), 2.0),
            ((1, 0), 2.0),
            ((1, 2), 1.0),
            ((2, 1), 1.0),
            ((0, 2), 0.5),
        ]),
    ))?;
    let t1 = ok(gorter_t1(&g))?;
    let want = 40.0 / 33.0;
    ensure(((t1 - want) / want).abs() <= 1e-12, || format!("three-level T1={t1}, want {want}"))?;
    Ok("two-level 1/(2W) and three-level 40/33".into())
}

fn criterion_10() -> Outcome {
    let mut outputs = Vec::new();
    for (scenario, n) in [
        ("despagnat", 100),
        ("bb84", 40),
        ("kick", 48),
        ("preskill", 500),
        ("bell-braunstein", 360),
    ] {
        let mut cfg = ScenarioConfig::new(scenario, n);
        cfg.rounds = 400;
        cfg.seed = 1234;
        let first = render(&cfg).map_err(|e| e.to_string())?.0;
        let second = render(&cfg).map_err(|e| e.to_string())?.0;
        ensure(first == second, || format!("{scenario}: repeated runs differ"))?;
        for threads in [1, 7] {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            let again = pool.install(|| render(&cfg)).map_err(|e| e.to_string())?.0;
            ensure(again == first, || format!("{scenario}: {threads}-thread run differs"))?;
        }
        outputs.push(first);
    }
    let exe = env!("CARGO_BIN_EXE_esd");
    let args = [
        "run",
        "--scenario",
        "bb84",
        "--molecules",
        "40",
        "--rounds",
        "400",
        "--seed",
        "1234",
    ];
    let a = std::process::Command::new(exe)
        .args(args)
        .env("RAYON_NUM_THREADS", "1")
        .output()
        .unwrap();
    let b = std::process::Command::new(exe)
        .args(args)
        .env("RAYON_NUM_THREADS", "8")
        .output()
        .unwrap();
    ensure(a.stdout == b.stdout && a.stdout == outputs[1], || "binary output differs".into())?;
    Ok("byte-identical across repeats, 1/7-thread pools and processes".into())
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 10] = [
        (1, "d'Espagnat values", criterion_1, Duration::from_secs(1)),
        (2, "oracle equivalence", criterion_2, Duration::from_secs(30)),
        (3, "ESD expectation invariance", criterion_3, Duration::from_secs(10)),
        (4, "product decomposition", criterion_4, Duration::from_secs(1)),
        (5, "Bell-scenario distinguishability", criterion_5, Duration::from_secs(10)),
        (6, "Preskill protocol", criterion_6, Duration::from_secs(5)),
        (7, "Monte Carlo consistency", criterion_7, Duration::from_secs(60)),
        (8, "identical-mixed contrast", criterion_8, Duration::from_secs(60)),
        (9, "Gorter relaxation time", criterion_9, Duration::from_secs(60)),
        (10, "determinism", criterion_10, Duration::from_secs(60)),
    ];
    let mut failed = Vec::new();
    let mut err = std::io::stderr().lock();
    for (id, name, check, budget) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let (status, detail) = match outcome {
            Ok(d) if elapsed <= budget => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; over budget {budget:?}")),
            Err(d) => ("FAIL", d),
        };
        if status == "FAIL" {
            failed.push(id);
        }
        writeln!(err, "criterion {id:>2} {status} {name}: {detail} [{:.3}s]", elapsed.as_secs_f64()).unwrap();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
