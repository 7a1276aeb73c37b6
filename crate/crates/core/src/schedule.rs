//! Compiled schedules: exact local layers interleaved with drift periods.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::local::LocalLayer;

/// Layers that deviate from identity by less than this are dropped when merged.
pub const IDENTITY_DROP_TOL: f64 = 1e-14;

#[derive(Copy, Clone, Debug, PartialEq)]
pub enum Instruction {
    /// Apply the layer with this index in [`Schedule::layers`].
    Local(usize),
    /// Evolve under the drift Hamiltonian for this (non-negative) duration.
    Drift(f64),
}

/// Instructions in time order (first executed first). The schedule implements
/// `exp(-i·global_phase) · I_last ⋯ I_first`.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    n: usize,
    layers: Vec<LocalLayer>,
    instructions: Vec<Instruction>,
    global_phase: f64,
    raw_drift_periods: usize,
}

impl Schedule {
    pub fn from_parts(
        n: usize,
        layers: Vec<LocalLayer>,
        instructions: Vec<Instruction>,
        global_phase: f64,
        raw_drift_periods: usize,
    ) -> Result<Self> {
        let s = Schedule { n, layers, instructions, global_phase, raw_drift_periods };
        s.validate()?;
        Ok(s)
    }

    pub fn empty(n: usize) -> Self {
        Schedule { n, layers: Vec::new(), instructions: Vec::new(), global_phase: 0.0, raw_drift_periods: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        for l in &self.layers {
            if l.n() != self.n {
                return Err(Error::InvalidStep(format!("layer acts on {} qubits, schedule on {}", l.n(), self.n)));
            }
            let defect = l.unitarity_defect();
            if !(defect <= 1e-10) {
                return Err(Error::InvalidStep(format!("layer is not unitary (defect {defect:e})")));
            }
        }
        for ins in &self.instructions {
            match *ins {
                Instruction::Local(id) if id >= self.layers.len() => {
                    return Err(Error::InvalidStep(format!("unknown layer id {id}")));
                }
                Instruction::Drift(tau) if !(tau >= 0.0) || !tau.is_finite() => {
                    return Err(Error::InvalidStep(format!("drift duration {tau} must be non-negative")));
                }
                _ => {}
            }
        }
        if !self.global_phase.is_finite() {
            return Err(Error::InvalidStep("global phase is not finite".into()));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn layers(&self) -> &[LocalLayer] {
        &self.layers
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn global_phase(&self) -> f64 {
        self.global_phase
    }

    /// Drift periods emitted before merging adjacent periods.
    pub fn raw_drift_periods(&self) -> usize {
        self.raw_drift_periods
    }

    /// Drift records actually present in the schedule.
    pub fn drift_periods(&self) -> usize {
        self.instructions.iter().filter(|i| matches!(i, Instruction::Drift(_))).count()
    }

    pub fn local_layer_count(&self) -> usize {
        self.instructions.iter().filter(|i| matches!(i, Instruction::Local(_))).count()
    }

    pub fn total_drift_time(&self) -> f64 {
        self.instructions
            .iter()
            .map(|i| match i {
                Instruction::Drift(t) => *t,
                Instruction::Local(_) => 0.0,
            })
            .sum()
    }

    pub fn drift_durations(&self) -> impl Iterator<Item = f64> + '_ {
        self.instructions.iter().filter_map(|i| match i {
            Instruction::Drift(t) => Some(*t),
            Instruction::Local(_) => None,
        })
    }
}

/// Incremental schedule construction with layer merging and interning.
///
/// Adjacent layers are multiplied together, adjacent drifts are summed, and
/// layers within [`IDENTITY_DROP_TOL`] of identity are dropped. Distinct
/// layers are stored once and referenced by index.
#[derive(Debug)]
pub struct ScheduleBuilder {
    n: usize,
    layers: Vec<LocalLayer>,
    index: HashMap<Vec<u64>, usize>,
    instructions: Vec<Instruction>,
    pending: Option<LocalLayer>,
    global_phase: f64,
    raw_drift_periods: usize,
}

impl ScheduleBuilder {
    pub fn new(n: usize) -> Self {
        ScheduleBuilder {
            n,
            layers: Vec::new(),
            index: HashMap::new(),
            instructions: Vec::new(),
            pending: None,
            global_phase: 0.0,
            raw_drift_periods: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn push_layer(&mut self, layer: &LocalLayer) {
        assert_eq!(layer.n(), self.n);
        let merged = match self.pending.take() {
            Some(p) => layer.after(&p),
            None => layer.clone(),
        };
        if !merged.is_identity(IDENTITY_DROP_TOL) {
            self.pending = Some(merged);
        }
    }

    fn flush_layer(&mut self) {
        if let Some(layer) = self.pending.take() {
            let key: Vec<u64> = layer
                .gates()
                .iter()
                .flat_map(|g| g.to_reals())
                .map(f64::to_bits)
                .collect();
            let next = self.layers.len();
            let id = *self.index.entry(key).or_insert(next);
            if id == next {
                self.layers.push(layer);
            }
            self.instructions.push(Instruction::Local(id));
        }
    }

    /// Add a drift period; zero durations are skipped.
    pub fn push_drift(&mut self, tau: f64) {
        assert!(tau >= 0.0 && tau.is_finite(), "drift duration must be non-negative");
        if tau == 0.0 {
            return;
        }
        self.raw_drift_periods += 1;
        self.push_drift_uncounted(tau);
    }

    fn push_drift_uncounted(&mut self, tau: f64) {
        self.flush_layer();
        if let Some(Instruction::Drift(prev)) = self.instructions.last_mut() {
            *prev += tau;
        } else {
            self.instructions.push(Instruction::Drift(tau));
        }
    }

    /// Accumulate a scalar phase `exp(-i·phase)`.
    pub fn add_phase(&mut self, phase: f64) {
        self.global_phase += phase;
    }

    /// Append another schedule on the same register.
    pub fn append(&mut self, other: &Schedule) {
        assert_eq!(other.n, self.n);
        for ins in &other.instructions {
            match *ins {
                Instruction::Local(id) => self.push_layer(&other.layers[id]),
                Instruction::Drift(tau) => self.push_drift_uncounted(tau),
            }
        }
        self.global_phase += other.global_phase;
        self.raw_drift_periods += other.raw_drift_periods;
    }

    pub fn finish(mut self) -> Schedule {
        self.flush_layer();
        Schedule {
            n: self.n,
            layers: self.layers,
            instructions: self.instructions,
            global_phase: self.global_phase,
            raw_drift_periods: self.raw_drift_periods,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::Gate1;
    use crate::pauli::Pauli;

    fn x_on(n: usize, q: usize) -> LocalLayer {
        let mut g = vec![Gate1::IDENTITY; n];
        g[q] = Gate1::pauli(Pauli::X);
        LocalLayer::new(g)
    }

    #[test]
    fn adjacent_layers_cancel() {
        let mut b = ScheduleBuilder::new(2);
        b.push_drift(0.5);
        b.push_layer(&x_on(2, 0));
        b.push_layer(&x_on(2, 0));
        b.push_drift(0.25);
        let s = b.finish();
        assert_eq!(s.instructions(), &[Instruction::Drift(0.75)]);
        assert_eq!(s.raw_drift_periods(), 2);
        assert_eq!(s.drift_periods(), 1);
    }

    #[test]
    fn layers_are_interned() {
        let mut b = ScheduleBuilder::new(2);
        for _ in 0..3 {
            b.push_layer(&x_on(2, 1));
            b.push_drift(0.1);
        }
        let s = b.finish();
        assert_eq!(s.layers().len(), 1);
        assert_eq!(s.local_layer_count(), 3);
        assert_eq!(s.drift_periods(), 3);
    }

    #[test]
    fn zero_drift_skipped() {
        let mut b = ScheduleBuilder::new(1);
        b.push_drift(0.0);
        assert_eq!(b.finish(), Schedule::empty(1));
    }

    #[test]
    fn validation_rejects_negative_drift() {
        let err = Schedule::from_parts(1, vec![], vec![Instruction::Drift(-1.0)], 0.0, 1).unwrap_err();
        assert!(matches!(err, Error::InvalidStep(_)));
        let err = Schedule::from_parts(1, vec![], vec![Instruction::Local(0)], 0.0, 0).unwrap_err();
        assert!(matches!(err, Error::InvalidStep(_)));
    }
}
