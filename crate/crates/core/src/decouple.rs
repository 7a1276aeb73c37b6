//! Reduce an n-qubit drift to a two-qubit principal system by averaging over
//! Pauli conjugation frames on the remainder.
//!
//! The first round conjugates by `σ_S` (σ applied bitwise to every qubit of
//! the remainder `S`), which removes every coupling between the principal
//! pair and `S` and every single-qubit term on `S`. Each later round halves
//! every block of `S` and conjugates by `σ` on the first half of all blocks
//! at once, which removes the couplings between the two halves of each block.
//! After `1 + ⌈log₂ |S|⌉` rounds only the terms supported on the pair survive.

use std::collections::BTreeMap;

use crate::bounds::{ErrorPlan, StepCount};
use crate::dense::DenseConfig;
use crate::error::{Error, Result};
use crate::pauli::{max_coupling, HamExpansion, Pauli, PauliString};
use crate::program::Program;
use crate::schedule::Schedule;
use crate::synth::Order;

/// Weighted Pauli conjugation frames on the full register.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameSet {
    frames: Vec<(f64, PauliString)>,
    rounds: usize,
    formula_rounds: usize,
}

impl FrameSet {
    /// The single identity frame.
    pub fn trivial(n: usize) -> Self {
        FrameSet { frames: vec![(1.0, PauliString::identity(n))], rounds: 0, formula_rounds: 0 }
    }

    /// Frames in canonical conjugator order (identity first).
    pub fn frames(&self) -> &[(f64, PauliString)] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.frames.len() == 1 && self.frames[0].1.is_identity()
    }

    /// Averaging rounds actually applied.
    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// `1 + ⌈log₂ |S|⌉` (zero when `S` is empty).
    pub fn formula_rounds(&self) -> usize {
        self.formula_rounds
    }

    pub fn weight_sum(&self) -> f64 {
        self.frames.iter().map(|f| f.0).sum()
    }

    /// `Σ w c H c†`. Pauli conjugation only flips signs, so each term is
    /// scaled by `Σ w · sign`; with dyadic weights that factor is exact.
    pub fn average(&self, h: &HamExpansion) -> Result<HamExpansion> {
        if let Some((_, c)) = self.frames.iter().find(|(_, c)| c.len() != h.n()) {
            return Err(Error::DimMismatch(c.len(), h.n()));
        }
        let terms = h.terms().map(|(p, coef)| {
            let factor: f64 = self.frames.iter().map(|(w, c)| w * p.conjugation_sign(c)).sum();
            (p.clone(), coef * factor)
        });
        HamExpansion::new(h.n(), terms)
    }

    /// Compose with one averaging round over `{I, X_set, Y_set, Z_set}`.
    fn with_round(&self, n: usize, set: &[usize]) -> FrameSet {
        let mut merged: BTreeMap<PauliString, f64> = BTreeMap::new();
        for (w, c) in &self.frames {
            for sigma in [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z] {
                let round = PauliString::uniform_on(n, set, sigma);
                *merged.entry(round.product_unsigned(c)).or_insert(0.0) += 0.25 * w;
            }
        }
        FrameSet {
            frames: merged.into_iter().map(|(c, w)| (w, c)).collect(),
            rounds: self.rounds + 1,
            formula_rounds: self.formula_rounds,
        }
    }
}

fn check_pair(h: &HamExpansion, (p, q): (usize, usize)) -> Result<Vec<usize>> {
    h.require_two_body()?;
    let n = h.n();
    if p == q || p >= n || q >= n {
        return Err(Error::InvalidTerm(format!("invalid principal pair ({p}, {q}) on {n} qubits")));
    }
    max_coupling(h, (p, q))?;
    Ok((0..n).filter(|&i| i != p && i != q).collect())
}

fn formula_rounds(remainder: usize) -> usize {
    match remainder {
        0 => 0,
        s => 1 + s.next_power_of_two().trailing_zeros() as usize,
    }
}

/// True when averaging over `σ_set` would change `h`.
fn round_acts(h: &HamExpansion, set: &[usize]) -> bool {
    let n = h.n();
    Pauli::NON_IDENTITY.iter().any(|&sigma| {
        let c = PauliString::uniform_on(n, set, sigma);
        h.terms().any(|(p, _)| !p.commutes_with(&c))
    })
}

/// One round: `H′ = ¼[H + X_S H X_S† + Y_S H Y_S† + Z_S H Z_S†]`.
pub fn decouple_ps(h: &HamExpansion, pair: (usize, usize)) -> Result<(HamExpansion, FrameSet)> {
    let remainder = check_pair(h, pair)?;
    let mut frames = FrameSet::trivial(h.n());
    frames.formula_rounds = formula_rounds(remainder.len());
    if !remainder.is_empty() {
        frames = frames.with_round(h.n(), &remainder);
    }
    let reduced = frames.average(h)?;
    Ok((reduced, frames))
}

/// Full reduction to the principal pair. Rounds that would leave the current
/// effective Hamiltonian unchanged are skipped.
pub fn recursive_decouple(h: &HamExpansion, pair: (usize, usize)) -> Result<(HamExpansion, FrameSet)> {
    let remainder = check_pair(h, pair)?;
    let n = h.n();
    let mut frames = FrameSet::trivial(n);
    frames.formula_rounds = formula_rounds(remainder.len());
    let mut current = h.clone();

    let apply = |set: &[usize], frames: &mut FrameSet, current: &mut HamExpansion| -> Result<()> {
        if !set.is_empty() && round_acts(current, set) {
            *frames = frames.with_round(n, set);
            *current = frames.average(h)?;
        }
        Ok(())
    };

    apply(&remainder, &mut frames, &mut current)?;
    let mut blocks = vec![remainder];
    while blocks.iter().any(|b| b.len() > 1) {
        let mut next = Vec::with_capacity(2 * blocks.len());
        let mut set = Vec::new();
        for b in &blocks {
            if b.len() > 1 {
                let (first, second) = b.split_at(b.len().div_ceil(2));
                set.extend_from_slice(first);
                next.push(first.to_vec());
                next.push(second.to_vec());
            } else {
                next.push(b.clone());
            }
        }
        apply(&set, &mut frames, &mut current)?;
        blocks = next;
    }

    let sites = [pair.0, pair.1];
    let on_pair = h.filter(|p, _| p.support().iter().all(|q| sites.contains(q)));
    if current != on_pair {
        return Err(Error::InvalidTerm(format!(
            "decoupling left {current}, expected {on_pair}"
        )));
    }
    Ok((on_pair, frames))
}

/// Compile `exp(-i (K_P ⊗ I_S) t)` on an n-qubit register with principal pair `pair`.
pub fn compile_n(
    h: &HamExpansion,
    pair: (usize, usize),
    k_pair: &HamExpansion,
    t: f64,
    steps: StepCount,
    order: Order,
    config: &DenseConfig,
) -> Result<(Schedule, ErrorPlan)> {
    Program::new(h, [pair.0, pair.1], k_pair, t, order)?.compile(steps, config)
}
