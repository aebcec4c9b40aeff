use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kron_all, ComplexMatrix, C64, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> ComplexMatrix {
        let i = C64::new(0.0, 1.0);
        let rows = match self {
            Pauli::I => [[ONE, ZERO], [ZERO, ONE]],
            Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
            Pauli::Y => [[ZERO, -i], [i, ZERO]],
            Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
        };
        ComplexMatrix::from_rows(&rows.map(Vec::from)).expect("2x2 Pauli")
    }

    /// Unitary whose columns are the `+1` and `−1` eigenvectors. `I` uses
    /// the computational basis (its outcome is ignored anyway).
    pub(crate) fn eigenbasis(self) -> [[C64; 2]; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let r = C64::new(h, 0.0);
        let ih = C64::new(0.0, h);
        match self {
            Pauli::I | Pauli::Z => [[ONE, ZERO], [ZERO, ONE]],
            Pauli::X => [[r, r], [r, -r]],
            Pauli::Y => [[r, r], [ih, -ih]],
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_symbol(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Signed tensor product of single-qubit Paulis, e.g. `-YYX`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    negative: bool,
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(negative: bool, letters: Vec<Pauli>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::param("letters", "Pauli string must act on at least one qubit"));
        }
        Ok(PauliString { negative, letters })
    }

    pub fn positive(letters: Vec<Pauli>) -> Result<Self> {
        Self::new(false, letters)
    }

    pub fn negative(letters: Vec<Pauli>) -> Result<Self> {
        Self::new(true, letters)
    }

    /// `letter` on `qubit` (0-based), identity elsewhere.
    pub fn single(n: usize, qubit: usize, letter: Pauli) -> Result<Self> {
        if qubit >= n {
            return Err(Error::param("qubit", format!("{qubit} out of range for {n} qubits")));
        }
        let mut letters = vec![Pauli::I; n];
        letters[qubit] = letter;
        Self::positive(letters)
    }

    pub fn uniform(n: usize, letter: Pauli) -> Result<Self> {
        Self::positive(vec![letter; n])
    }

    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Dense `2^n` matrix `sign · ⊗_j letter_j`.
    pub fn matrix(&self) -> Result<ComplexMatrix> {
        let factors: Vec<ComplexMatrix> = self.letters.iter().map(|p| p.matrix()).collect();
        let m = kron_all(&factors)?;
        Ok(if self.negative { m.scale_re(-1.0) } else { m })
    }
}

/// Dense matrix realisation of a Pauli string.
pub fn pauli_matrix(p: &PauliString) -> Result<ComplexMatrix> {
    p.matrix()
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.negative { "-" } else { "+" })?;
        for p in &self.letters {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (negative, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let letters = body
            .chars()
            .map(|c| Pauli::from_symbol(c).ok_or_else(|| Error::param("pauli", format!("unknown letter `{c}` in `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        PauliString::new(negative, letters)
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
