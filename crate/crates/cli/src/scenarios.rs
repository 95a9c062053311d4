//! Named experiments. Each scenario builds its compositions, evaluates every
//! (composition, observable) pair exactly and, when rounds are requested,
//! by Monte Carlo.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use esd_core::decompositions::{
    braunstein_decomposition, decomposition_to_composition, effective_bell_composition, gorter_t1, kicked_composition,
    random_kick_average, GorterInput, KickModel,
};
use esd_core::ensemble::catalog::{four_state_mixture, x_basis_mixture, z_basis_mixture};
use esd_core::ensemble::{
    entanglement_census, fluctuation_identical_mixed, fluctuation_proper, molecule_expectation, EnsembleComposition,
    IdenticalMixedEnsemble,
};
use esd_core::linalg::{partial_trace, ComplexMatrix, PureState};
use esd_core::observables::{parse_observable, sigma_x_single, sigma_z_single, sigma_zz_pair, CollectiveObservable};
use esd_core::sampling::{
    derive_seed, identical_mixed_round_sums, preskill_exact, preskill_round_counts, round_sums, Basis, EstimateReport,
    SampleConfig,
};

use crate::config::ScenarioConfig;
use crate::report::{format_real, ReportRow};
use crate::UsageError;

/// Registry entry: name, what runs, and the governing formula.
#[derive(Debug, Clone, Copy)]
pub struct ScenarioInfo {
    pub name: &'static str,
    pub summary: &'static str,
    pub formula: &'static str,
}

pub const REGISTRY: [ScenarioInfo; 7] = [
    ScenarioInfo {
        name: "despagnat",
        summary: "N/2 |0>,N/2 |1> versus N/2 |+x>,N/2 |-x> measured with sigma_z",
        formula: "dS = sqrt(N Tr(rho W^2) - sum_i N_i <psi_i|W|psi_i>^2)",
    },
    ScenarioInfo {
        name: "bell-braunstein",
        summary: "effective Bell ensemble versus its 36-term product decomposition, sigma_zz, entanglement census",
        formula: "rho = (1-e) I/4 + e |Bell><Bell|; p_(a,s),(b,t) = (1 + 9e d_a s t [a=b])/36",
    },
    ScenarioInfo {
        name: "preskill",
        summary: "Bob measures Bell-pair halves in z or x, Alice in z; count of agreeing outcomes",
        formula: "agreement = 1 (Bob z), 1/2 (Bob x); binomial spread sqrt(N p (1-p))",
    },
    ScenarioInfo {
        name: "bb84",
        summary: "four-state |+-z>,|+-x> versus two-state |0>,|1> preparations of I/2 with sigma_x and sigma_z",
        formula: "dS = sqrt(N Tr(rho W^2) - sum_i N_i <psi_i|W|psi_i>^2)",
    },
    ScenarioInfo {
        name: "improper-pair",
        summary: "N copies of (|00>+|11>)/sqrt2 versus (|01>+|10>)/sqrt2 with ZI and ZZ; partial-trace check",
        formula: "Tr_B |psi><psi| = I/2 for both; <ZZ> = +N versus -N",
    },
    ScenarioInfo {
        name: "kick",
        summary: "|+x> dephased by K = exp(i sigma_z theta), theta uniform on [0, 2pi): 16-node proper ensemble versus N identical mixed molecules, sigma_x",
        formula: "<rho> = int P(theta) K rho K^dag dtheta; identical mixed: dS = sqrt(N Tr(rho W^2) - N Tr(rho W)^2)",
    },
    ScenarioInfo {
        name: "gorter",
        summary: "spin-lattice relaxation time of a symmetric two-level and a three-level example",
        formula: "1/T1 = 1/2 sum_(n,m) W_nm (E_m - E_n)^2 / sum_n E_n^2",
    },
];

pub fn lookup(name: &str) -> Option<&'static ScenarioInfo> {
    REGISTRY.iter().find(|s| s.name == name)
}

pub const BELL_DEFAULT_EPSILON: f64 = 0.1;
pub const KICK_NODES: usize = 16;

/// Rows plus human-readable remarks destined for stderr.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScenarioOutput {
    pub rows: Vec<ReportRow>,
    pub notes: Vec<String>,
}

fn core_err(e: esd_core::Error) -> UsageError {
    UsageError(e.to_string())
}

struct Runner<'a> {
    cfg: &'a ScenarioConfig,
    epsilon: Option<f64>,
    out: ScenarioOutput,
}

impl<'a> Runner<'a> {
    fn new(cfg: &'a ScenarioConfig) -> Self {
        Self {
            cfg,
            epsilon: None,
            out: ScenarioOutput::default(),
        }
    }

    /// Sampling settings for the next row; every row gets its own child seed.
    fn sample_config(&self) -> Option<SampleConfig> {
        (self.cfg.rounds > 0).then(|| SampleConfig {
            seed: derive_seed(self.cfg.seed, self.out.rows.len() as u64),
            rounds: self.cfg.rounds as usize,
        })
    }

    fn push(
        &mut self,
        composition: &str,
        observable: &str,
        exact: (f64, f64),
        mc: Option<&[f64]>,
        census: Option<f64>,
    ) -> Result<(), UsageError> {
        let estimate = mc
            .map(|s| EstimateReport::from_samples(s, None))
            .transpose()
            .map_err(core_err)?;
        self.out.rows.push(ReportRow {
            scenario: self.cfg.scenario.clone(),
            composition_label: composition.to_string(),
            observable_label: observable.to_string(),
            n: self.cfg.molecules,
            epsilon: self.epsilon,
            exact_expectation: exact.0,
            exact_fluctuation: exact.1,
            mc_mean: estimate.as_ref().map(|e| e.empirical_mean),
            mc_std: estimate.as_ref().map(|e| e.empirical_std),
            mc_stderr: estimate.as_ref().map(|e| e.stderr_of_std),
            rounds: estimate.as_ref().map_or(0, |e| e.rounds as u64),
            seed: self.cfg.seed,
            entanglement_census: census,
        });
        Ok(())
    }

    fn composition(
        &mut self,
        label: &str,
        comp: &EnsembleComposition,
        omega: &CollectiveObservable,
        census: bool,
    ) -> Result<(), UsageError> {
        check_dim(label, comp.dim(), omega)?;
        let exact = fluctuation_proper(comp, &omega.per_molecule).map_err(core_err)?;
        let census = census
            .then(|| entanglement_census(comp))
            .transpose()
            .map_err(core_err)?;
        let sums = match self.sample_config() {
            Some(sc) => {
                let whole = if comp.is_integral() {
                    comp.clone()
                } else {
                    comp.apportioned().map_err(core_err)?
                };
                Some(round_sums(&whole, omega, &sc).map_err(core_err)?)
            }
            None => None,
        };
        self.push(label, &omega.label, (exact.expectation_ensemble, exact.fluctuation), sums.as_deref(), census)
    }

    fn identical_mixed(
        &mut self,
        label: &str,
        ens: &IdenticalMixedEnsemble,
        omega: &CollectiveObservable,
    ) -> Result<(), UsageError> {
        check_dim(label, ens.rho().rows(), omega)?;
        let mean = ens.n_molecules() * molecule_expectation(ens.rho(), &omega.per_molecule).map_err(core_err)?;
        let std = fluctuation_identical_mixed(ens, &omega.per_molecule).map_err(core_err)?;
        let sums = match self.sample_config() {
            Some(sc) => Some(identical_mixed_round_sums(ens, omega, &sc).map_err(core_err)?),
            None => None,
        };
        self.push(label, &omega.label, (mean, std), sums.as_deref(), None)
    }

    /// Observables to evaluate: the user's override, else the defaults.
    fn observables(&self, defaults: Vec<CollectiveObservable>) -> Result<Vec<CollectiveObservable>, UsageError> {
        match &self.cfg.observable {
            Some(text) => Ok(vec![parse_observable(text).map_err(core_err)?]),
            None => Ok(defaults),
        }
    }

    fn note(&mut self, text: String) {
        self.out.notes.push(format!("note: {}: {text}", self.cfg.scenario));
    }
}

fn check_dim(label: &str, dim: usize, omega: &CollectiveObservable) -> Result<(), UsageError> {
    if dim != omega.dim() {
        return Err(UsageError(format!(
            "observable {} acts on dimension {} but {label} molecules have dimension {dim}",
            omega.label,
            omega.dim()
        )));
    }
    Ok(())
}

fn reject_observable(cfg: &ScenarioConfig) -> Result<(), UsageError> {
    if cfg.observable.is_some() {
        return Err(UsageError(format!("scenario {} takes no observable", cfg.scenario)));
    }
    Ok(())
}

/// Runs one registered scenario.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutput, UsageError> {
    cfg.validate()?;
    let mut r = Runner::new(cfg);
    let n = cfg.molecules;
    let nf = n as f64;
    match cfg.scenario.as_str() {
        "despagnat" => {
            let omegas = r.observables(vec![sigma_z_single()])?;
            for (label, comp) in [
                ("z_basis_mixture", z_basis_mixture(nf)),
                ("x_basis_mixture", x_basis_mixture(nf)),
            ] {
                for omega in &omegas {
                    r.composition(label, &comp, omega, false)?;
                }
            }
        }
        "bell-braunstein" => {
            let eps = cfg.epsilon.unwrap_or(BELL_DEFAULT_EPSILON);
            r.epsilon = Some(eps);
            let bell = effective_bell_composition(n, eps).map_err(core_err)?;
            let product =
                decomposition_to_composition(&braunstein_decomposition(eps).map_err(core_err)?, n).map_err(core_err)?;
            let omegas = r.observables(vec![sigma_zz_pair()])?;
            for (label, comp) in [("effective_bell", &bell), ("product_decomposition", &product)] {
                for omega in &omegas {
                    r.composition(label, comp, omega, true)?;
                }
            }
            if cfg.observable.is_none() {
                r.note(format!(
                    "effective_bell: claimed fluctuation e*sqrt(N) = {} is unconfirmed; every component is a sigma_zz eigenstate, so the composition formula gives 0",
                    format_real(eps * nf.sqrt())
                ));
                r.note(format!(
                    "product_decomposition: claimed fluctuation 2*sqrt(N)/3 = {} is unconfirmed; the composition formula gives sqrt(8N/9) = {}",
                    format_real(2.0 * nf.sqrt() / 3.0),
                    format_real((8.0 * nf / 9.0).sqrt())
                ));
            }
        }
        "preskill" => {
            reject_observable(cfg)?;
            for (label, basis) in [("bob_basis_z", Basis::Z), ("bob_basis_x", Basis::X)] {
                let counts = match r.sample_config() {
                    Some(sc) => Some(preskill_round_counts(n, basis, &sc).map_err(core_err)?),
                    None => None,
                };
                r.push(label, "agreement_count", preskill_exact(n, basis), counts.as_deref(), None)?;
            }
        }
        "bb84" => {
            let omegas = r.observables(vec![sigma_x_single(), sigma_z_single()])?;
            for (label, comp) in [
                ("four_state", four_state_mixture(nf)),
                ("two_state_z", z_basis_mixture(nf)),
            ] {
                for omega in &omegas {
                    r.composition(label, &comp, omega, false)?;
                }
            }
        }
        "improper-pair" => {
            let omegas = r.observables(vec![
                parse_observable("ZI").map_err(core_err)?,
                parse_observable("ZZ").map_err(core_err)?,
            ])?;
            let psi_plus =
                PureState::normalized([0.0, 1.0, 1.0, 0.0].map(|x| esd_core::Complex64::new(x, 0.0)).to_vec())
                    .map_err(core_err)?;
            let pairs = [("phi_plus", PureState::bell_phi_plus()), ("psi_plus", psi_plus)];
            let half = ComplexMatrix::identity(2).scale_real(0.5);
            for (label, state) in &pairs {
                let reduced = partial_trace(&state.projector(), &[2, 2], &[0]).map_err(core_err)?;
                r.note(format!(
                    "{label}: reduced state of qubit A deviates from I/2 by {}",
                    format_real(reduced.max_abs_diff(&half))
                ));
                let comp = EnsembleComposition::pure(nf, state.clone()).map_err(core_err)?;
                for omega in &omegas {
                    r.composition(label, &comp, omega, false)?;
                }
            }
            if cfg.observable.is_none() {
                r.note("both sigma_zz fluctuations are 0; the compositions differ in the collective sigma_zz expectation (+N versus -N)".into());
            }
        }
        "kick" => {
            let omegas = r.observables(vec![sigma_x_single()])?;
            let start = PureState::plus_x();
            let grid = KickModel::midpoint(0.0, 2.0 * PI, KICK_NODES).map_err(core_err)?;
            let kicked = kicked_composition(&start, &grid, n).map_err(core_err)?;
            let rho = random_kick_average(&start.projector(), &KickModel::uniform(0.0, 2.0 * PI).map_err(core_err)?)
                .map_err(core_err)?;
            let mixed = IdenticalMixedEnsemble::new(nf, rho).map_err(core_err)?;
            for omega in &omegas {
                r.composition("kicked_proper", &kicked, omega, false)?;
                r.identical_mixed("identical_mixed", &mixed, omega)?;
            }
        }
        "gorter" => {
            reject_observable(cfg)?;
            for (label, input) in gorter_examples() {
                let t1 = gorter_t1(&input).map_err(core_err)?;
                r.push(label, "T1", (t1, 0.0), None, None)?;
            }
        }
        other => unreachable!("validated scenario {other}"),
    }
    Ok(r.out)
}

/// Symmetric two-level system `E = ∓1/2, W = 1` (`T₁ = 1/2`) and a
/// three-level ladder `E = (−1, 0, 2)` with all six rates given (`T₁ = 1/1.05`).
pub fn gorter_examples() -> [(&'static str, GorterInput); 2] {
    let two = GorterInput::new(vec![-0.5, 0.5], BTreeMap::from([((0, 1), 1.0), ((1, 0), 1.0)])).expect("valid input");
    let three = GorterInput::new(
        vec![-1.0, 0.0, 2.0],
        BTreeMap::from([
            ((0, 1), 1.0),
            ((1, 0), 1.0),
            ((1, 2), 0.5),
            ((2, 1), 0.5),
            ((0, 2), 0.25),
            ((2, 0), 0.25),
        ]),
    )
    .expect("valid input");
    [("two_level", two), ("three_level", three)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(name: &str, n: u64, rounds: u64) -> ScenarioOutput {
        let mut cfg = ScenarioConfig::new(name, n);
        cfg.rounds = rounds;
        run_scenario(&cfg).unwrap()
    }

    fn fluct(out: &ScenarioOutput) -> Vec<f64> {
        out.rows.iter().map(|r| r.exact_fluctuation).collect()
    }

    #[test]
    fn registry_names_unique() {
        for (i, a) in REGISTRY.iter().enumerate() {
            assert!(REGISTRY[i + 1..].iter().all(|b| b.name != a.name));
        }
    }

    #[test]
    fn despagnat_rows() {
        let out = run("despagnat", 100, 0);
        let f = fluct(&out);
        assert_eq!(f[0], 0.0);
        assert!((f[1] - 10.0).abs() < 1e-12);
        assert!(out.rows.iter().all(|r| r.mc_mean.is_none() && r.rounds == 0));
    }

    #[test]
    fn bell_braunstein_rows() {
        let out = run("bell-braunstein", 900, 0);
        let f = fluct(&out);
        assert!(f[0].abs() < 1e-9);
        assert!((f[1] - 800f64.sqrt()).abs() < 1e-9);
        assert!((out.rows[0].entanglement_census.unwrap() - 0.1).abs() < 1e-12);
        assert_eq!(out.rows[1].entanglement_census, Some(0.0));
        assert_eq!(out.notes.len(), 2);
        assert!(out.notes.iter().all(|n| n.contains("unconfirmed")));
    }

    #[test]
    fn bell_braunstein_rejects_nonpositive_decomposition() {
        let mut cfg = ScenarioConfig::new("bell-braunstein", 100);
        cfg.epsilon = Some(0.12);
        assert!(run_scenario(&cfg).is_err());
    }

    #[test]
    fn preskill_rows() {
        let out = run("preskill", 400, 50);
        assert!((out.rows[0].exact_expectation - 400.0).abs() < 1e-9);
        assert_eq!(out.rows[0].mc_mean, Some(400.0));
        assert_eq!(out.rows[0].mc_std, Some(0.0));
        assert!((out.rows[1].exact_fluctuation - 10.0).abs() < 1e-9);
    }

    #[test]
    fn bb84_rows() {
        let out = run("bb84", 100, 0);
        let f = fluct(&out);
        assert!((f[0] - 50f64.sqrt()).abs() < 1e-9);
        assert!((f[1] - 50f64.sqrt()).abs() < 1e-9);
        assert!((f[2] - 10.0).abs() < 1e-9);
        assert!(f[3].abs() < 1e-9);
    }

    #[test]
    fn improper_pair_rows() {
        let out = run("improper-pair", 10, 5);
        let exp: Vec<f64> = out.rows.iter().map(|r| r.exact_expectation).collect();
        assert_eq!(exp.len(), 4);
        assert!(exp[0].abs() < 1e-12 && (exp[1] - 10.0).abs() < 1e-12);
        assert!(exp[2].abs() < 1e-12 && (exp[3] + 10.0).abs() < 1e-12);
        assert_eq!(out.rows[1].mc_std, Some(0.0));
        assert_eq!(out.rows[3].mc_mean, Some(-10.0));
    }

    #[test]
    fn kick_rows() {
        let out = run("kick", 32, 0);
        let f = fluct(&out);
        assert!((f[0] - 4.0).abs() < 1e-9, "{f:?}");
        assert!((f[1] - 32f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn gorter_rows() {
        let out = run("gorter", 1, 10);
        assert!((out.rows[0].exact_expectation - 0.5).abs() < 1e-15);
        assert!((out.rows[1].exact_expectation - 1.0 / 1.05).abs() < 1e-15);
        assert!(out.rows.iter().all(|r| r.rounds == 0 && r.mc_mean.is_none()));
    }

    #[test]
    fn mc_fields_follow_rounds() {
        let out = run("bb84", 20, 30);
        assert!(out
            .rows
            .iter()
            .all(|r| r.rounds == 30 && r.mc_std.is_some() && r.mc_stderr.is_some()));
    }

    #[test]
    fn observable_override() {
        let mut cfg = ScenarioConfig::new("despagnat", 4);
        cfg.observable = Some("X".into());
        let out = run_scenario(&cfg).unwrap();
        assert_eq!(out.rows[0].observable_label, "X");
        assert_eq!(fluct(&out), vec![2.0, 0.0]);
        cfg.observable = Some("ZZ".into());
        assert!(run_scenario(&cfg).is_err());
        cfg.scenario = "gorter".into();
        assert!(run_scenario(&cfg).is_err());
    }
}
