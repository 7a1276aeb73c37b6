use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Single-qubit Pauli label. The derived order `I < X < Y < Z` is the
/// canonical order used for term sorting and tie-breaks.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn is_identity(self) -> bool {
        self == Pauli::I
    }

    /// Two single-qubit Paulis commute unless both are non-identity and different.
    pub fn commutes_with(self, other: Pauli) -> bool {
        self == Pauli::I || other == Pauli::I || self == other
    }

    /// Conjugation sign: `c p c† = sign * p`.
    pub fn conjugation_sign(self, conjugator: Pauli) -> f64 {
        if self.commutes_with(conjugator) {
            1.0
        } else {
            -1.0
        }
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// Index in the σ₀..σ₃ convention.
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Tensor product of one Pauli per qubit, qubit 0 first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    ops: Vec<Pauli>,
}

impl PauliString {
    pub fn new(ops: Vec<Pauli>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidTerm("Pauli string must act on at least one qubit".into()));
        }
        Ok(PauliString { ops })
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "qubit count must be positive");
        PauliString { ops: vec![Pauli::I; n] }
    }

    /// `p` on qubit `q`, identity elsewhere.
    pub fn single(n: usize, q: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n);
        s.ops[q] = p;
        s
    }

    /// `a` on qubit `qa` and `b` on qubit `qb`.
    pub fn pair(n: usize, (qa, a): (usize, Pauli), (qb, b): (usize, Pauli)) -> Self {
        let mut s = Self::identity(n);
        s.ops[qa] = a;
        s.ops[qb] = b;
        s
    }

    /// The same Pauli applied bitwise to every qubit in `sites`.
    pub fn uniform_on(n: usize, sites: &[usize], p: Pauli) -> Self {
        let mut s = Self::identity(n);
        for &q in sites {
            s.ops[q] = p;
        }
        s
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.ops
    }

    pub fn get(&self, q: usize) -> Pauli {
        self.ops[q]
    }

    pub fn weight(&self) -> usize {
        self.ops.iter().filter(|p| !p.is_identity()).count()
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    /// Qubits carrying a non-identity factor, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.ops
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_identity())
            .map(|(q, _)| q)
            .collect()
    }

    /// True when the strings commute, i.e. they anticommute on an even number of sites.
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        debug_assert_eq!(self.len(), other.len());
        self.ops
            .iter()
            .zip(&other.ops)
            .filter(|(a, b)| !a.commutes_with(**b))
            .count()
            % 2
            == 0
    }

    /// Sign picked up under conjugation by `conjugator`.
    pub fn conjugation_sign(&self, conjugator: &PauliString) -> f64 {
        if self.commutes_with(conjugator) {
            1.0
        } else {
            -1.0
        }
    }

    /// Group product of two Pauli strings with phases dropped (sitewise XOR).
    pub fn product_unsigned(&self, other: &PauliString) -> PauliString {
        debug_assert_eq!(self.len(), other.len());
        let ops = self
            .ops
            .iter()
            .zip(&other.ops)
            .map(|(&a, &b)| multiply_unsigned(a, b))
            .collect();
        PauliString { ops }
    }

    /// Restrict to the listed qubits, in the listed order.
    pub fn restrict(&self, sites: &[usize]) -> PauliString {
        PauliString {
            ops: sites.iter().map(|&q| self.ops[q]).collect(),
        }
    }

    /// Place this string on `sites` of an `n`-qubit register.
    pub fn embed(&self, n: usize, sites: &[usize]) -> PauliString {
        assert_eq!(sites.len(), self.len());
        let mut out = Self::identity(n);
        for (&q, &p) in sites.iter().zip(&self.ops) {
            out.ops[q] = p;
        }
        out
    }
}

fn multiply_unsigned(a: Pauli, b: Pauli) -> Pauli {
    use Pauli::*;
    match (a, b) {
        (I, p) | (p, I) => p,
        (p, q) if p == q => I,
        (X, Y) | (Y, X) => Z,
        (Y, Z) | (Z, Y) => X,
        (X, Z) | (Z, X) => Y,
        _ => unreachable!(),
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.ops {
            write!(f, "{}", p)?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let ops = s
            .chars()
            .map(|c| Pauli::from_char(c).ok_or_else(|| Error::InvalidTerm(format!("bad Pauli label '{c}' in \"{s}\""))))
            .collect::<Result<Vec<_>>>()?;
        PauliString::new(ops)
    }
}
