use std::collections::BTreeMap;
use std::fmt;

use super::string::{Pauli, PauliString};
use crate::error::{Error, Result};

/// Coefficients with magnitude at or below this are dropped on canonicalization.
pub const ZERO_TOLERANCE: f64 = 1e-12;

/// Real-coefficient Pauli expansion of a Hamiltonian, `H = Σ h_p p`.
///
/// Terms are kept in a `BTreeMap`, so iteration is always in canonical
/// (lexicographic, `I < X < Y < Z`) order and serialized forms are stable.
#[derive(Clone, Debug, PartialEq)]
pub struct HamExpansion {
    n: usize,
    terms: BTreeMap<PauliString, f64>,
}

impl HamExpansion {
    /// Build a canonical expansion: duplicates summed, negligible terms dropped.
    pub fn new<I>(n: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliString, f64)>,
    {
        if n == 0 {
            return Err(Error::InvalidTerm("qubit count must be positive".into()));
        }
        let mut terms = BTreeMap::new();
        for (p, c) in entries {
            if p.len() != n {
                return Err(Error::InvalidTerm(format!(
                    "string {p} has length {}, expected {n}",
                    p.len()
                )));
            }
            if !c.is_finite() {
                return Err(Error::InvalidTerm(format!("coefficient {c} of {p} is not finite")));
            }
            *terms.entry(p).or_insert(0.0) += c;
        }
        terms.retain(|_, c| c.abs() > ZERO_TOLERANCE);
        Ok(HamExpansion { n, terms })
    }

    /// Convenience constructor from `("XZ", 2.0)` style labels.
    pub fn from_labels(entries: &[(&str, f64)]) -> Result<Self> {
        let parsed = entries
            .iter()
            .map(|(s, c)| Ok((s.parse::<PauliString>()?, *c)))
            .collect::<Result<Vec<_>>>()?;
        let n = parsed
            .first()
            .map(|(p, _)| p.len())
            .ok_or_else(|| Error::InvalidTerm("cannot infer qubit count from no terms".into()))?;
        Self::new(n, parsed)
    }

    pub fn zero(n: usize) -> Self {
        assert!(n >= 1);
        HamExpansion { n, terms: BTreeMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, f64)> + '_ {
        self.terms.iter().map(|(p, &c)| (p, c))
    }

    pub fn coefficient(&self, p: &PauliString) -> f64 {
        self.terms.get(p).copied().unwrap_or(0.0)
    }

    pub fn identity_coefficient(&self) -> f64 {
        self.coefficient(&PauliString::identity(self.n))
    }

    pub fn max_weight(&self) -> usize {
        self.terms.keys().map(PauliString::weight).max().unwrap_or(0)
    }

    pub fn is_two_body(&self) -> bool {
        self.max_weight() <= 2
    }

    /// Error if any term acts on more than two qubits.
    pub fn require_two_body(&self) -> Result<()> {
        match self.terms.keys().find(|p| p.weight() > 2) {
            Some(p) => Err(Error::NotTwoBody(p.to_string())),
            None => Ok(()),
        }
    }

    fn check_n(&self, other_n: usize) -> Result<()> {
        if self.n != other_n {
            return Err(Error::InvalidTerm(format!(
                "qubit count mismatch: {} vs {other_n}",
                self.n
            )));
        }
        Ok(())
    }

    /// `c H c†` for a Pauli string `c`: each coefficient flips sign iff its
    /// string anticommutes with `c`. Exact.
    pub fn conjugate_by_pauli(&self, c: &PauliString) -> Result<Self> {
        self.check_n(c.len())?;
        let terms = self
            .terms
            .iter()
            .map(|(p, &h)| (p.clone(), h * p.conjugation_sign(c)))
            .collect();
        Ok(HamExpansion { n: self.n, terms })
    }

    /// Weighted sum `Σ w_i H_i` with non-negative weights.
    pub fn average<'a, I>(items: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, &'a HamExpansion)>,
    {
        let mut n = None;
        let mut acc: Vec<(PauliString, f64)> = Vec::new();
        for (w, h) in items {
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::InvalidTerm(format!("average weight {w} must be non-negative")));
            }
            match n {
                None => n = Some(h.n),
                Some(m) => h.check_n(m)?,
            }
            acc.extend(h.terms.iter().map(|(p, &c)| (p.clone(), w * c)));
        }
        let n = n.ok_or_else(|| Error::InvalidTerm("average of no expansions".into()))?;
        Self::new(n, acc)
    }

    /// Signed linear combination; unlike [`HamExpansion::average`] weights may be negative.
    pub fn linear_combination<'a, I>(n: usize, items: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, &'a HamExpansion)>,
    {
        let mut acc = Vec::new();
        for (w, h) in items {
            if h.n != n {
                return Err(Error::InvalidTerm(format!("qubit count mismatch: {} vs {n}", h.n)));
            }
            acc.extend(h.terms.iter().map(|(p, &c)| (p.clone(), w * c)));
        }
        Self::new(n, acc)
    }

    pub fn scaled(&self, s: f64) -> Self {
        let terms = self.terms.iter().map(|(p, &c)| (p.clone(), s * c));
        Self::new(self.n, terms).expect("scaling preserves shape")
    }

    pub fn add(&self, other: &HamExpansion) -> Result<Self> {
        Self::linear_combination(self.n, [(1.0, self), (1.0, other)])
    }

    pub fn sub(&self, other: &HamExpansion) -> Result<Self> {
        Self::linear_combination(self.n, [(1.0, self), (-1.0, other)])
    }

    /// Keep only the terms selected by `keep`.
    pub fn filter<F>(&self, mut keep: F) -> Self
    where
        F: FnMut(&PauliString, f64) -> bool,
    {
        let terms = self
            .terms
            .iter()
            .filter(|(p, &c)| keep(p, c))
            .map(|(p, &c)| (p.clone(), c))
            .collect();
        HamExpansion { n: self.n, terms }
    }

    pub fn without_identity(&self) -> Self {
        self.filter(|p, _| !p.is_identity())
    }

    /// Terms of weight exactly one.
    pub fn local_part(&self) -> Self {
        self.filter(|p, _| p.weight() == 1)
    }

    /// Terms of weight two or more.
    pub fn coupling_part(&self) -> Self {
        self.filter(|p, _| p.weight() >= 2)
    }

    /// True when every term is supported inside `sites`.
    pub fn supported_within(&self, sites: &[usize]) -> bool {
        self.terms
            .keys()
            .all(|p| p.support().iter().all(|q| sites.contains(q)))
    }

    /// Re-index onto a smaller register: qubit `sites[i]` becomes qubit `i`.
    pub fn reduce_to(&self, sites: &[usize]) -> Result<Self> {
        if !self.supported_within(sites) {
            return Err(Error::InvalidTerm(format!(
                "expansion has support outside qubits {sites:?}"
            )));
        }
        Self::new(sites.len(), self.terms.iter().map(|(p, &c)| (p.restrict(sites), c)))
    }

    /// Place onto `sites` of an `n`-qubit register.
    pub fn embed(&self, n: usize, sites: &[usize]) -> Result<Self> {
        if sites.len() != self.n {
            return Err(Error::InvalidTerm(format!(
                "{} sites given for a {}-qubit expansion",
                sites.len(),
                self.n
            )));
        }
        if sites.iter().any(|&q| q >= n) {
            return Err(Error::InvalidTerm(format!("site out of range for {n} qubits")));
        }
        Self::new(n, self.terms.iter().map(|(p, &c)| (p.embed(n, sites), c)))
    }

    /// Map every string through a signed single-site relabelling (Clifford conjugation).
    pub fn map_sites<F>(&self, mut image: F) -> Self
    where
        F: FnMut(usize, Pauli) -> (f64, Pauli),
    {
        let terms = self.terms.iter().map(|(p, &c)| {
            let mut sign = 1.0;
            let ops = p
                .ops()
                .iter()
                .enumerate()
                .map(|(q, &op)| {
                    let (s, img) = image(q, op);
                    sign *= s;
                    img
                })
                .collect();
            (PauliString::new(ops).expect("length preserved"), sign * c)
        });
        Self::new(self.n, terms).expect("relabelling preserves shape")
    }

    /// Σ |h_p| over non-identity terms: an upper bound on the traceless part's norm.
    pub fn one_norm(&self) -> f64 {
        self.terms
            .iter()
            .filter(|(p, _)| !p.is_identity())
            .map(|(_, c)| c.abs())
            .sum()
    }

    /// Largest |h_p| over non-identity terms.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms
            .iter()
            .filter(|(p, _)| !p.is_identity())
            .map(|(_, c)| c.abs())
            .fold(0.0, f64::max)
    }

    /// Coefficient-level equality within `tol`.
    pub fn approx_eq(&self, other: &HamExpansion, tol: f64) -> bool {
        self.n == other.n
            && self
                .terms
                .keys()
                .chain(other.terms.keys())
                .all(|p| (self.coefficient(p) - other.coefficient(p)).abs() <= tol)
    }
}

impl fmt::Display for HamExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (p, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}·{p}")?;
        }
        Ok(())
    }
}
