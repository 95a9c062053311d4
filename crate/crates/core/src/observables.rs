//! Per-molecule operators whose sums over the ensemble are the collective
//! observables `Σ_z`, `Σ_zz` and friends.

use std::collections::BTreeMap;
use std::fmt;

use crate::linalg::{pauli_matrix, pauli_sum, Axis, ComplexMatrix, HermitianObservable, PauliString};
use crate::{Error, Result};

/// `Σ_i Ω(i)`, represented by its per-molecule term `Ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveObservable {
    pub label: String,
    pub per_molecule: HermitianObservable,
}

impl CollectiveObservable {
    pub fn new(label: impl Into<String>, per_molecule: HermitianObservable) -> Self {
        Self {
            label: label.into(),
            per_molecule,
        }
    }

    pub fn dim(&self) -> usize {
        self.per_molecule.dim()
    }
}

impl AsRef<HermitianObservable> for CollectiveObservable {
    fn as_ref(&self) -> &HermitianObservable {
        &self.per_molecule
    }
}

impl fmt::Display for CollectiveObservable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

fn hermitian(m: ComplexMatrix) -> HermitianObservable {
    HermitianObservable::new(m).expect("Pauli combinations are Hermitian")
}

/// `Σ_z` on spin-1/2 molecules.
pub fn sigma_z_single() -> CollectiveObservable {
    CollectiveObservable::new("sigma_z", hermitian(pauli_matrix(Axis::Z)))
}

/// `Σ_x` on spin-1/2 molecules.
pub fn sigma_x_single() -> CollectiveObservable {
    CollectiveObservable::new("sigma_x", hermitian(pauli_matrix(Axis::X)))
}

/// `Σ_zz = Σ_i σ_{1z}(i) σ_{2z}(i)` on two-qubit molecules.
pub fn sigma_zz_pair() -> CollectiveObservable {
    let z = pauli_matrix(Axis::Z);
    CollectiveObservable::new("sigma_zz", hermitian(z.kron(&z)))
}

/// `Σ_{a<b} σ_{a,z} σ_{b,z}` within an `n`-qubit molecule, `2 ≤ n ≤ 10`.
pub fn pairwise_zz(n_qubits: usize) -> Result<CollectiveObservable> {
    if !(2..=10).contains(&n_qubits) {
        return Err(Error::InvalidArgument(format!("pairwise_zz needs 2..=10 qubits, got {n_qubits}")));
    }
    let diag: Vec<f64> = (0..1usize << n_qubits)
        .map(|basis| {
            let z = |q: usize| {
                if (basis >> (n_qubits - 1 - q)) & 1 == 0 {
                    1.0
                } else {
                    -1.0
                }
            };
            let mut sum = 0.0;
            for a in 0..n_qubits {
                for b in a + 1..n_qubits {
                    sum += z(a) * z(b);
                }
            }
            sum
        })
        .collect();
    Ok(CollectiveObservable::new(
        format!("pairwise_zz_{n_qubits}"),
        hermitian(ComplexMatrix::diagonal(&diag)),
    ))
}

/// `Σ c_P P` over real coefficients; every string must have `n_qubits` letters.
pub fn from_pauli_terms(n_qubits: usize, terms: &BTreeMap<PauliString, f64>) -> Result<CollectiveObservable> {
    if terms.is_empty() {
        return Err(Error::InvalidArgument("no Pauli terms".into()));
    }
    if let Some(p) = terms.keys().find(|p| p.n_qubits() != n_qubits) {
        return Err(Error::DimensionMismatch {
            expected: n_qubits,
            got: p.n_qubits(),
        });
    }
    let m = pauli_sum(terms)?;
    Ok(CollectiveObservable::new(format_terms(terms), HermitianObservable::new(m)?))
}

fn format_terms(terms: &BTreeMap<PauliString, f64>) -> String {
    if terms.len() == 1 {
        let (p, &c) = terms.iter().next().unwrap();
        if c == 1.0 {
            return p.to_string();
        }
    }
    terms
        .iter()
        .map(|(p, c)| format!("{c}*{p}"))
        .collect::<Vec<_>>()
        .join("+")
}

/// Parses an observable written as Pauli terms.
///
/// Accepted forms: `ZZ`, `0.5*XX + -0.5*YY`, `XX - YY + ZZ`. A missing
/// coefficient is 1 and repeated strings add up.
pub fn parse_pauli_terms(text: &str) -> Result<BTreeMap<PauliString, f64>> {
    let bad = |reason: &str| Error::InvalidArgument(format!("observable {:?}: {reason}", truncate(text)));
    let mut terms: BTreeMap<PauliString, f64> = BTreeMap::new();
    let mut n_qubits = None;
    let mut rest = text.trim_start();
    let mut first = true;

    loop {
        let mut sign = 1.0;
        if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        } else if let Some(r) = rest.strip_prefix('-') {
            sign = -1.0;
            rest = r;
        } else if !first {
            return Err(bad("expected '+' or '-' between terms"));
        }
        first = false;
        rest = rest.trim_start();

        let mut coef: f64 = 1.0;
        if rest.starts_with(|c: char| c.is_ascii_digit() || matches!(c, '.' | '+' | '-')) {
            let (number, after) = rest.split_once('*').ok_or_else(|| bad("coefficient without '*'"))?;
            coef = number.trim().parse().map_err(|_| bad("bad coefficient"))?;
            if !coef.is_finite() {
                return Err(bad("non-finite coefficient"));
            }
            rest = after.trim_start();
        }

        let end = rest.find(|c: char| !c.is_ascii_alphabetic()).unwrap_or(rest.len());
        let p: PauliString = rest[..end].parse()?;
        rest = rest[end..].trim_start();

        match n_qubits {
            None => n_qubits = Some(p.n_qubits()),
            Some(n) if n != p.n_qubits() => return Err(bad("terms differ in qubit count")),
            _ => {}
        }
        let total = terms.entry(p).or_insert(0.0);
        *total += sign * coef;
        if !total.is_finite() {
            return Err(bad("coefficients overflow"));
        }

        if rest.is_empty() {
            return Ok(terms);
        }
    }
}

/// Observable from its Pauli-term text, labelled by the text itself.
pub fn parse_observable(text: &str) -> Result<CollectiveObservable> {
    let terms = parse_pauli_terms(text)?;
    let n = terms.keys().next().unwrap().n_qubits();
    let mut obs = from_pauli_terms(n, &terms)?;
    obs.label = text.split_whitespace().collect::<Vec<_>>().join("");
    Ok(obs)
}

fn truncate(text: &str) -> String {
    text.chars().take(64).collect()
}
