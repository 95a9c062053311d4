//! Pauli matrices, signed-axis projectors and Pauli-string expansions.
//!
//! A Pauli string is written one character per qubit over `{I, X, Y, Z}`,
//! qubit 0 first, e.g. `"IXZ"`.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::{ComplexMatrix, PureState, HERMITIAN_TOL};
use crate::{Error, Result};

/// Largest qubit count accepted for Pauli strings and expansions.
pub const MAX_PAULI_QUBITS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// One of the six polarization directions `±x, ±y, ±z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignedAxis {
    pub axis: Axis,
    pub sign: Sign,
}

impl SignedAxis {
    pub const ALL: [SignedAxis; 6] = [
        SignedAxis::new(Axis::X, Sign::Plus),
        SignedAxis::new(Axis::X, Sign::Minus),
        SignedAxis::new(Axis::Y, Sign::Plus),
        SignedAxis::new(Axis::Y, Sign::Minus),
        SignedAxis::new(Axis::Z, Sign::Plus),
        SignedAxis::new(Axis::Z, Sign::Minus),
    ];

    pub const fn new(axis: Axis, sign: Sign) -> Self {
        Self { axis, sign }
    }

    /// `(I + sign·σ_axis)/2`.
    pub fn projector(self) -> ComplexMatrix {
        let sigma = pauli_matrix(self.axis);
        let half = Complex64::new(0.5, 0.0);
        (&ComplexMatrix::identity(2) + &sigma.scale_real(self.sign.value())).scale(half)
    }

    /// The unit vector spanning [`SignedAxis::projector`].
    pub fn state(self) -> PureState {
        let h = FRAC_1_SQRT_2;
        let s = self.sign.value();
        let amps = match self.axis {
            Axis::Z => match self.sign {
                Sign::Plus => return PureState::basis(2, 0),
                Sign::Minus => return PureState::basis(2, 1),
            },
            Axis::X => [Complex64::new(h, 0.0), Complex64::new(s * h, 0.0)],
            Axis::Y => [Complex64::new(h, 0.0), Complex64::new(0.0, s * h)],
        };
        PureState::new(amps.to_vec()).expect("unit vector")
    }
}

impl fmt::Display for SignedAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.sign {
            Sign::Plus => '+',
            Sign::Minus => '-',
        };
        write!(f, "{s}{}", self.axis)
    }
}

/// Standard 2×2 Pauli matrix.
pub fn pauli_matrix(axis: Axis) -> ComplexMatrix {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let data = match axis {
        Axis::X => vec![z, one, one, z],
        Axis::Y => vec![z, -i, i, z],
        Axis::Z => vec![one, z, z, -one],
    };
    ComplexMatrix::new(2, 2, data).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    /// Coefficient `c` in `P|b⟩ = c|b'⟩`.
    fn column_coefficient(self, bit: bool) -> Complex64 {
        match (self, bit) {
            (Pauli::I, _) | (Pauli::X, _) | (Pauli::Z, false) => Complex64::new(1.0, 0.0),
            (Pauli::Z, true) => Complex64::new(-1.0, 0.0),
            (Pauli::Y, false) => Complex64::new(0.0, 1.0),
            (Pauli::Y, true) => Complex64::new(0.0, -1.0),
        }
    }

    pub fn matrix(self) -> ComplexMatrix {
        match self {
            Pauli::I => ComplexMatrix::identity(2),
            Pauli::X => pauli_matrix(Axis::X),
            Pauli::Y => pauli_matrix(Axis::Y),
            Pauli::Z => pauli_matrix(Axis::Z),
        }
    }

    fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of single-qubit Paulis, qubit 0 first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn new(ops: Vec<Pauli>) -> Result<Self> {
        if ops.is_empty() || ops.len() > MAX_PAULI_QUBITS {
            return Err(Error::InvalidPauli {
                text: ops.iter().map(|p| p.as_char()).collect(),
                reason: format!("length must be 1..={MAX_PAULI_QUBITS}"),
            });
        }
        Ok(Self(ops))
    }

    pub fn identity(n_qubits: usize) -> Result<Self> {
        Self::new(vec![Pauli::I; n_qubits])
    }

    pub fn n_qubits(&self) -> usize {
        self.0.len()
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.0
    }

    /// All `4^n` strings in lexicographic `I < X < Y < Z` order.
    pub fn all(n_qubits: usize) -> Result<Vec<Self>> {
        Self::identity(n_qubits)?;
        let mut out = Vec::with_capacity(1 << (2 * n_qubits));
        for code in 0..(1usize << (2 * n_qubits)) {
            let ops = (0..n_qubits)
                .map(|q| Pauli::ALL[(code >> (2 * (n_qubits - 1 - q))) & 3])
                .collect();
            out.push(Self(ops));
        }
        Ok(out)
    }

    /// For basis column `j`, the row `j ⊕ flips` and coefficient of the single
    /// nonzero entry.
    fn column(&self, j: usize) -> (usize, Complex64) {
        let n = self.0.len();
        let mut row = j;
        let mut coef = Complex64::new(1.0, 0.0);
        for (q, p) in self.0.iter().enumerate() {
            let shift = n - 1 - q;
            let bit = (j >> shift) & 1 == 1;
            coef *= p.column_coefficient(bit);
            if p.flips() {
                row ^= 1 << shift;
            }
        }
        (row, coef)
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let dim = 1usize << self.0.len();
        let mut m = ComplexMatrix::zeros(dim, dim);
        for j in 0..dim {
            let (r, c) = self.column(j);
            m[(r, j)] = c;
        }
        m
    }

    /// `Tr(ρ P)` without forming `P`.
    pub(crate) fn trace_against(&self, rho: &ComplexMatrix) -> Complex64 {
        (0..rho.rows())
            .map(|j| {
                let (r, c) = self.column(j);
                rho[(j, r)] * c
            })
            .sum()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidPauli {
            text: text.chars().take(64).collect(),
            reason,
        };
        let ops = text
            .chars()
            .map(|ch| match ch {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(invalid(format!("unexpected character {other:?}"))),
            })
            .take(MAX_PAULI_QUBITS + 1)
            .collect::<Result<Vec<_>>>()?;
        if ops.is_empty() || ops.len() > MAX_PAULI_QUBITS {
            return Err(invalid(format!("length must be 1..={MAX_PAULI_QUBITS}")));
        }
        Ok(Self(ops))
    }
}

/// Coefficients `c_P = Tr(ρP)/2^n` of every Pauli string, so that
/// `ρ = Σ c_P P`.
pub fn pauli_expand(rho: &ComplexMatrix) -> Result<BTreeMap<PauliString, f64>> {
    let dim = rho.dim()?;
    if !dim.is_power_of_two() || dim < 2 {
        return Err(Error::InvalidArgument(format!("dimension {dim} is not 2^n with n >= 1")));
    }
    let n = dim.trailing_zeros() as usize;
    let deviation = rho.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let norm = dim as f64;
    Ok(PauliString::all(n)?
        .into_iter()
        .map(|p| {
            let c = p.trace_against(rho).re / norm;
            (p, c)
        })
        .collect())
}

/// `Σ c_P P` over the given terms; all strings must share one length.
pub fn pauli_sum(terms: &BTreeMap<PauliString, f64>) -> Result<ComplexMatrix> {
    let n = terms
        .keys()
        .next()
        .map(PauliString::n_qubits)
        .ok_or_else(|| Error::InvalidArgument("empty Pauli sum".into()))?;
    let dim = 1usize << n;
    let mut m = ComplexMatrix::zeros(dim, dim);
    for (p, &c) in terms {
        if p.n_qubits() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: p.n_qubits(),
            });
        }
        if !c.is_finite() {
            return Err(Error::NonFinite("Pauli coefficient"));
        }
        for j in 0..dim {
            let (r, coef) = p.column(j);
            m[(r, j)] += coef * c;
        }
    }
    Ok(m)
}
