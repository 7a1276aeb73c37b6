//! A compiled simulation: the drift, the principal pair, the Trotter step as a
//! flat list of atoms, and everything needed to emit, bound and measure it.

use std::sync::OnceLock;

use crate::bounds::{fixed_plan, global_constants, plan_steps, ErrorPlan, GlobalConstants, NormEstimator, StepCount, StepModel};
use crate::decouple::{recursive_decouple, FrameSet};
use crate::dense::{dense_of_expansion, distance, evaluate_schedule, expm_hermitian, DenseConfig, DenseOp};
use crate::error::{Error, Result};
use crate::local::{CliffordLayer, LocalLayer};
use crate::pauli::{HamExpansion, PauliString};
use crate::schedule::{Schedule, ScheduleBuilder};
use crate::synth::{symmetric_or_forward, Order, Piece, StepPlan};

/// One exponential of the product formula, per unit of step time.
#[derive(Clone, Debug, PartialEq)]
pub enum Atom {
    /// Local Hamiltonian on the principal pair (two-qubit indices).
    Local(HamExpansion),
    /// `weight` units of drift conjugated by a full-register Clifford layer.
    Drift { weight: f64, conjugator: CliffordLayer },
}

#[derive(Clone, Debug)]
pub struct Program {
    drift: HamExpansion,
    pair: [usize; 2],
    pair_drift: HamExpansion,
    target: HamExpansion,
    step: StepPlan,
    frames: FrameSet,
    atoms: Vec<Atom>,
    t: f64,
    exact: OnceLock<DenseOp>,
}

impl Program {
    /// Simulate `exp(-i (K ⊗ I) t)` where the two-qubit `k` acts on `pair`.
    pub fn new(h: &HamExpansion, pair: [usize; 2], k: &HamExpansion, t: f64, order: Order) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidStep(format!("evolution time {t} must be positive")));
        }
        if k.n() != 2 {
            return Err(Error::InvalidTerm(format!("target must act on two qubits, got {}", k.n())));
        }
        let n = h.n();
        let (on_pair, frames) = recursive_decouple(h, (pair[0], pair[1]))?;
        let pair_drift = on_pair.reduce_to(&pair)?;
        let step = StepPlan::new(&pair_drift, k, order)?;

        let mut atoms = Vec::new();
        for piece in step.pieces() {
            match piece {
                Piece::Local(l) => atoms.push(Atom::Local(l.clone())),
                Piece::Drift { weight, conjugator } => {
                    let outer = conjugator.embed(n, &pair);
                    atoms.extend(frames.frames().iter().map(|(w, p)| Atom::Drift {
                        weight: weight * w,
                        conjugator: outer.compose(&CliffordLayer::from_pauli_string(p)),
                    }));
                }
            }
        }

        let program = Program {
            drift: h.clone(),
            pair,
            pair_drift,
            target: k.clone(),
            step,
            frames,
            atoms,
            t,
            exact: OnceLock::new(),
        };
        program.verify()?;
        Ok(program)
    }

    /// The atoms plus the phase rate must reproduce `K ⊗ I` exactly.
    fn verify(&self) -> Result<()> {
        let n = self.n();
        let effective = self.atom_hamiltonians()?;
        let identity = HamExpansion::new(n, [(PauliString::identity(n), self.step.phase_rate())])?;
        let total = HamExpansion::linear_combination(n, effective.iter().map(|e| (1.0, e)).chain([(1.0, &identity)]))?;
        let expected = self.full_target()?;
        if total.approx_eq(&expected, 1e-10) {
            Ok(())
        } else {
            Err(Error::InvalidTerm(format!("step atoms sum to {total}, expected {expected}")))
        }
    }

    pub fn n(&self) -> usize {
        self.drift.n()
    }

    pub fn drift(&self) -> &HamExpansion {
        &self.drift
    }

    pub fn pair(&self) -> [usize; 2] {
        self.pair
    }

    /// The drift terms on the principal pair, in two-qubit indices.
    pub fn pair_drift(&self) -> &HamExpansion {
        &self.pair_drift
    }

    pub fn target(&self) -> &HamExpansion {
        &self.target
    }

    pub fn step_plan(&self) -> &StepPlan {
        &self.step
    }

    pub fn frames(&self) -> &FrameSet {
        &self.frames
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn order(&self) -> Order {
        self.step.order()
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    /// `K ⊗ I` on the full register.
    pub fn full_target(&self) -> Result<HamExpansion> {
        self.target.embed(self.n(), &self.pair)
    }

    /// Effective full-register Hamiltonian of every atom, per unit step time.
    pub fn atom_hamiltonians(&self) -> Result<Vec<HamExpansion>> {
        self.atoms
            .iter()
            .map(|a| match a {
                Atom::Local(l) => l.embed(self.n(), &self.pair),
                Atom::Drift { weight, conjugator } => Ok(conjugator.conjugate(&self.drift).scaled(*weight)),
            })
            .collect()
    }

    fn emit_step(&self, b: &mut ScheduleBuilder, delta: f64) {
        let n = self.n();
        for (i, frac) in symmetric_or_forward(self.atoms.len(), self.order()) {
            match &self.atoms[i] {
                Atom::Local(l) => {
                    b.push_layer(&LocalLayer::from_local_hamiltonian(l, frac * delta).embed(n, &self.pair));
                }
                Atom::Drift { weight, conjugator } => {
                    let layer = conjugator.to_layer();
                    b.push_layer(&layer.adjoint());
                    b.push_drift(weight * frac * delta);
                    b.push_layer(&layer);
                }
            }
        }
        b.add_phase(self.step.phase_rate() * delta);
    }

    /// The `steps`-step schedule.
    pub fn schedule(&self, steps: usize) -> Schedule {
        assert!(steps > 0, "step count must be at least 1");
        let delta = self.t / steps as f64;
        let mut one = ScheduleBuilder::new(self.n());
        self.emit_step(&mut one, delta);
        let one = one.finish();
        let mut b = ScheduleBuilder::new(self.n());
        for _ in 0..steps {
            b.append(&one);
        }
        b.finish()
    }

    /// Dense `exp(-i (K ⊗ I) t)`.
    pub fn exact_target(&self, config: &DenseConfig) -> Result<&DenseOp> {
        config.check(self.n())?;
        if let Some(u) = self.exact.get() {
            return Ok(u);
        }
        let u = expm_hermitian(&dense_of_expansion(&self.full_target()?), self.t)?;
        Ok(self.exact.get_or_init(|| u))
    }

    /// Chained analytic bound for `steps` steps.
    pub fn chained_bound(&self, steps: usize, config: &DenseConfig) -> Result<f64> {
        let coef = self.per_step_coefficient(config)?;
        let delta = self.t / steps as f64;
        Ok(coef * steps as f64 * delta.powi(self.order().as_u8() as i32 + 1))
    }

    pub fn compile(&self, steps: StepCount, config: &DenseConfig) -> Result<(Schedule, ErrorPlan)> {
        let plan = match steps {
            StepCount::Fixed(n) => fixed_plan(n, self, config)?,
            StepCount::Accuracy { epsilon, bound } => plan_steps(bound, epsilon, self, config)?,
        };
        Ok((self.schedule(plan.steps), plan))
    }
}

impl StepModel for Program {
    fn order(&self) -> Order {
        self.step.order()
    }

    fn total_time(&self) -> f64 {
        self.t
    }

    fn per_step_coefficient(&self, config: &DenseConfig) -> Result<f64> {
        let atoms = self.atom_hamiltonians()?;
        NormEstimator::for_qubits(self.n(), config).coefficient(&atoms, self.order())
    }

    fn global_constants(&self, c: f64) -> Result<GlobalConstants> {
        global_constants(&self.pair_drift, &self.target, c)
    }

    fn measured_error(&self, steps: usize, config: &DenseConfig) -> Result<f64> {
        if steps == 0 {
            return Err(Error::InvalidStep("step count must be at least 1".into()));
        }
        let exact = self.exact_target(config)?;
        let got = evaluate_schedule(&self.schedule(steps), &self.drift, config)?;
        distance(exact, &got, true)
    }
}
