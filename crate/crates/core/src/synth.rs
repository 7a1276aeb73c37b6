//! Two-qubit synthesis: isolate the strongest coupling of the drift by frame
//! averaging, rotate it onto any `±σ_j ⊗ σ_k`, and assemble Trotter steps for
//! an arbitrary two-qubit target.

use std::f64::consts::FRAC_PI_4;

use crate::bounds::{ErrorPlan, StepCount};
use crate::dense::DenseConfig;
use crate::error::{Error, Result};
use crate::local::{anticommuting_pauli, clifford_mapping, Clifford1, CliffordLayer, LocalLayer};
use crate::pauli::{max_coupling, HamExpansion, Pauli, PauliString, ZERO_TOLERANCE};
use crate::program::Program;
use crate::schedule::{Schedule, ScheduleBuilder};

/// Product-formula order.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Order {
    /// `e^{-iΔA} e^{-iΔB}`
    First,
    /// `e^{-iΔA/2} e^{-iΔB} e^{-iΔA/2}`
    Second,
}

impl Order {
    pub fn as_u8(self) -> u8 {
        match self {
            Order::First => 1,
            Order::Second => 2,
        }
    }

    pub fn from_u8(v: u8) -> Result<Order> {
        match v {
            1 => Ok(Order::First),
            2 => Ok(Order::Second),
            _ => Err(Error::InvalidStep(format!("order must be 1 or 2, got {v}"))),
        }
    }
}

/// One conjugation frame: evolve `C H C†` for `weight` units of time.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub weight: f64,
    pub conjugator: CliffordLayer,
}

/// How to obtain one signed Pauli product from the drift:
/// `target = Σ w_f C_f H C_f† + local_correction + phase_correction · I`.
#[derive(Clone, Debug, PartialEq)]
pub struct TermRecipe {
    pub target: HamExpansion,
    pub frames: Vec<Frame>,
    pub local_correction: HamExpansion,
    pub phase_correction: f64,
}

impl TermRecipe {
    /// Right-hand side of the recipe identity, evaluated symbolically.
    pub fn reassemble(&self, h: &HamExpansion) -> Result<HamExpansion> {
        let conjugated: Vec<(f64, HamExpansion)> = self
            .frames
            .iter()
            .map(|f| (f.weight, f.conjugator.conjugate(h)))
            .collect();
        let identity = HamExpansion::new(h.n(), [(PauliString::identity(h.n()), self.phase_correction)])?;
        let mut items: Vec<(f64, &HamExpansion)> = conjugated.iter().map(|(w, e)| (*w, e)).collect();
        items.push((1.0, &self.local_correction));
        items.push((1.0, &identity));
        HamExpansion::linear_combination(h.n(), items)
    }

    fn verify(&self, h: &HamExpansion) -> Result<()> {
        let got = self.reassemble(h)?;
        if got.approx_eq(&self.target, ZERO_TOLERANCE) {
            Ok(())
        } else {
            Err(Error::InvalidTerm(format!(
                "recipe reassembles to {got}, expected {}",
                self.target
            )))
        }
    }

    /// Conjugate the whole identity by `outer`: frames become `outer · C_f`.
    fn wrapped(&self, outer: &CliffordLayer) -> TermRecipe {
        TermRecipe {
            target: outer.conjugate(&self.target),
            frames: self
                .frames
                .iter()
                .map(|f| Frame { weight: f.weight, conjugator: outer.compose(&f.conjugator) })
                .collect(),
            local_correction: outer.conjugate(&self.local_correction),
            phase_correction: self.phase_correction,
        }
    }
}

fn require_two_qubit(h: &HamExpansion) -> Result<()> {
    if h.n() != 2 {
        return Err(Error::InvalidTerm(format!("expected a two-qubit expansion, got {} qubits", h.n())));
    }
    h.require_two_body()
}

/// Recipe for `sgn(h_rs) σ_r ⊗ σ_s`, the strongest coupling of `h`, using the
/// four frames `σ_j ⊗ σ_k` with `j ∈ {0, r}`, `k ∈ {0, s}`.
pub fn synth_max_term(h: &HamExpansion) -> Result<TermRecipe> {
    require_two_qubit(h)?;
    let m = max_coupling(h, (0, 1))?;
    let mag = m.coefficient.abs();
    let mut frames = Vec::with_capacity(4);
    for j in [Pauli::I, m.r] {
        for k in [Pauli::I, m.s] {
            frames.push(Frame {
                weight: 1.0 / (4.0 * mag),
                conjugator: CliffordLayer::new(vec![Clifford1::pauli(j), Clifford1::pauli(k)]),
            });
        }
    }
    let local_correction = HamExpansion::new(
        2,
        [
            (PauliString::pair(2, (0, m.r), (1, Pauli::I)), -h.coefficient(&PauliString::pair(2, (0, m.r), (1, Pauli::I))) / mag),
            (PauliString::pair(2, (0, Pauli::I), (1, m.s)), -h.coefficient(&PauliString::pair(2, (0, Pauli::I), (1, m.s))) / mag),
        ],
    )?;
    let recipe = TermRecipe {
        target: HamExpansion::new(2, [(PauliString::pair(2, (0, m.r), (1, m.s)), m.sign())])?,
        frames,
        local_correction,
        phase_correction: -h.identity_coefficient() / mag,
    };
    recipe.verify(h)?;
    Ok(recipe)
}

/// Recipe for `sign · σ_j ⊗ σ_k`: the max-term recipe rotated by `U ⊗ V`
/// (`U σ_r U† = σ_j`, `V σ_s V† = σ_k`), with an extra Pauli on qubit 0
/// anticommuting with `σ_j` when the sign must flip.
pub fn synth_pauli_product(h: &HamExpansion, j: Pauli, k: Pauli, sign: f64) -> Result<TermRecipe> {
    if j.is_identity() || k.is_identity() {
        return Err(Error::InvalidTerm(format!("product {j}{k} is not a coupling")));
    }
    if sign != 1.0 && sign != -1.0 {
        return Err(Error::InvalidTerm(format!("sign must be ±1, got {sign}")));
    }
    let base = synth_max_term(h)?;
    let m = max_coupling(h, (0, 1))?;
    let mut outer = CliffordLayer::new(vec![clifford_mapping(m.r, j), clifford_mapping(m.s, k)]);
    if sign != m.sign() {
        let flip = CliffordLayer::new(vec![Clifford1::pauli(anticommuting_pauli(j)), Clifford1::identity()]);
        outer = flip.compose(&outer);
    }
    let recipe = if outer.is_identity() { base } else { base.wrapped(&outer) };
    let expected = HamExpansion::new(2, [(PauliString::pair(2, (0, j), (1, k)), sign)])?;
    if !recipe.target.approx_eq(&expected, 0.0) {
        return Err(Error::InvalidTerm(format!("rotated target {} is not {expected}", recipe.target)));
    }
    recipe.verify(h)?;
    Ok(recipe)
}

/// A two-qubit target split into coupling products, local terms and phase.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetDecomposition {
    /// `(k_ij, σ_i, σ_j)`, sorted by `|k_ij|` descending, then by `(i, j)`.
    pub couplings: Vec<(f64, Pauli, Pauli)>,
    pub local: HamExpansion,
    pub identity: f64,
}

impl TargetDecomposition {
    pub fn reassemble(&self) -> Result<HamExpansion> {
        let mut entries: Vec<(PauliString, f64)> = self
            .couplings
            .iter()
            .map(|&(c, a, b)| (PauliString::pair(2, (0, a), (1, b)), c))
            .collect();
        entries.extend(self.local.terms().map(|(p, c)| (p.clone(), c)));
        entries.push((PauliString::identity(2), self.identity));
        HamExpansion::new(2, entries)
    }

    /// `k ≡ max |k_ij|` over the non-identity terms.
    pub fn max_coefficient(&self) -> f64 {
        self.couplings
            .iter()
            .map(|c| c.0.abs())
            .chain(self.local.terms().map(|(_, c)| c.abs()))
            .fold(0.0, f64::max)
    }
}

pub fn decompose_target(k: &HamExpansion) -> Result<TargetDecomposition> {
    require_two_qubit(k)?;
    let mut couplings: Vec<(f64, Pauli, Pauli)> = k
        .coupling_part()
        .terms()
        .map(|(p, c)| (c, p.get(0), p.get(1)))
        .collect();
    couplings.sort_by(|a, b| {
        b.0.abs()
            .partial_cmp(&a.0.abs())
            .expect("finite coefficients")
            .then((a.1, a.2).cmp(&(b.1, b.2)))
    });
    Ok(TargetDecomposition {
        couplings,
        local: k.local_part(),
        identity: k.identity_coefficient(),
    })
}

/// One element of a Trotter step, expressed per unit of step time.
#[derive(Clone, Debug, PartialEq)]
pub enum Piece {
    /// Exact evolution under a purely local Hamiltonian.
    Local(HamExpansion),
    /// Drift evolution for `weight` units, conjugated by `conjugator`.
    Drift { weight: f64, conjugator: CliffordLayer },
}

/// The pieces of one step for a two-qubit drift and target. Their effective
/// Hamiltonians plus `phase_rate · I` sum exactly to the target.
#[derive(Clone, Debug, PartialEq)]
pub struct StepPlan {
    order: Order,
    pieces: Vec<Piece>,
    phase_rate: f64,
}

impl StepPlan {
    pub fn new(h: &HamExpansion, k: &HamExpansion, order: Order) -> Result<Self> {
        require_two_qubit(h)?;
        require_two_qubit(k)?;
        max_coupling(h, (0, 1))?;

        let plan = match drift_multiple(h, k) {
            Some(lambda) => {
                let rest = k.sub(&h.scaled(lambda))?;
                let mut pieces = Vec::new();
                if !rest.without_identity().is_empty() {
                    pieces.push(Piece::Local(rest.without_identity()));
                }
                pieces.push(Piece::Drift { weight: lambda, conjugator: CliffordLayer::identity(2) });
                StepPlan { order, pieces, phase_rate: rest.identity_coefficient() }
            }
            None => {
                let target = decompose_target(k)?;
                let mut local = target.local.clone();
                let mut phase_rate = target.identity;
                let mut drifts = Vec::new();
                for &(c, a, b) in &target.couplings {
                    let recipe = synth_pauli_product(h, a, b, c.signum())?;
                    let mag = c.abs();
                    local = HamExpansion::linear_combination(2, [(1.0, &local), (mag, &recipe.local_correction)])?;
                    phase_rate += mag * recipe.phase_correction;
                    drifts.extend(recipe.frames.into_iter().map(|f| Piece::Drift {
                        weight: mag * f.weight,
                        conjugator: f.conjugator,
                    }));
                }
                let mut pieces = Vec::new();
                if !local.is_empty() {
                    pieces.push(Piece::Local(local));
                }
                pieces.extend(drifts);
                StepPlan { order, pieces, phase_rate }
            }
        };
        plan.verify(h, k)?;
        Ok(plan)
    }

    fn verify(&self, h: &HamExpansion, k: &HamExpansion) -> Result<()> {
        let effective: Vec<HamExpansion> = (0..self.pieces.len()).map(|i| self.piece_hamiltonian(i, h)).collect();
        let identity = HamExpansion::new(2, [(PauliString::identity(2), self.phase_rate)])?;
        let total = HamExpansion::linear_combination(
            2,
            effective.iter().map(|e| (1.0, e)).chain([(1.0, &identity)]),
        )?;
        if total.approx_eq(k, 1e-10) {
            Ok(())
        } else {
            Err(Error::InvalidTerm(format!("step pieces sum to {total}, expected {k}")))
        }
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Identity coefficient carried as global phase per unit time.
    pub fn phase_rate(&self) -> f64 {
        self.phase_rate
    }

    /// Effective Hamiltonian of piece `i` per unit step time.
    pub fn piece_hamiltonian(&self, i: usize, h: &HamExpansion) -> HamExpansion {
        match &self.pieces[i] {
            Piece::Local(l) => l.clone(),
            Piece::Drift { weight, conjugator } => conjugator.conjugate(h).scaled(*weight),
        }
    }

    /// `(piece index, fraction of Δ)` in execution order. Second order runs the
    /// pieces forward at half time and back again, merging the middle piece.
    pub fn sequence(&self) -> Vec<(usize, f64)> {
        symmetric_or_forward(self.pieces.len(), self.order)
    }

    /// Drift periods emitted per step before any merging.
    pub fn raw_drift_periods_per_step(&self) -> usize {
        self.sequence()
            .iter()
            .filter(|(i, _)| matches!(self.pieces[*i], Piece::Drift { .. }))
            .count()
    }
}

pub(crate) fn symmetric_or_forward(m: usize, order: Order) -> Vec<(usize, f64)> {
    match order {
        Order::First => (0..m).map(|i| (i, 1.0)).collect(),
        Order::Second => {
            if m == 0 {
                return Vec::new();
            }
            let mut seq: Vec<(usize, f64)> = (0..m - 1).map(|i| (i, 0.5)).collect();
            seq.push((m - 1, 1.0));
            seq.extend((0..m - 1).rev().map(|i| (i, 0.5)));
            seq
        }
    }
}

/// `λ > 0` with `coupling(K) = λ · coupling(H)` term by term, if one exists.
fn drift_multiple(h: &HamExpansion, k: &HamExpansion) -> Option<f64> {
    let hc = h.coupling_part();
    let kc = k.coupling_part();
    if hc.len() != kc.len() || hc.is_empty() {
        return None;
    }
    let (p0, h0) = hc.terms().next()?;
    let lambda = kc.coefficient(p0) / h0;
    if !(lambda > 0.0) {
        return None;
    }
    let same = hc
        .terms()
        .all(|(p, c)| (kc.coefficient(p) - lambda * c).abs() <= ZERO_TOLERANCE * (1.0 + lambda * c.abs()));
    same.then_some(lambda)
}

/// One Trotter step of length `delta` as a schedule fragment.
pub fn compile_step(h: &HamExpansion, k: &HamExpansion, delta: f64, order: Order) -> Result<Schedule> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidStep(format!("step size {delta} must be positive")));
    }
    let program = Program::new(h, [0, 1], k, delta, order)?;
    Ok(program.schedule(1))
}

/// Compile `exp(-iKt)` for a two-qubit drift `h`.
pub fn compile(
    h: &HamExpansion,
    k: &HamExpansion,
    t: f64,
    steps: StepCount,
    order: Order,
    config: &DenseConfig,
) -> Result<(Schedule, ErrorPlan)> {
    require_two_qubit(h)?;
    Program::new(h, [0, 1], k, t, order)?.compile(steps, config)
}

/// Generator of the controlled-NOT: `exp(-i (π/4) (I⊗X + Z⊗I − Z⊗X)) = e^{-iπ/4} CNOT`.
pub fn cnot_generator() -> HamExpansion {
    HamExpansion::from_labels(&[("IX", 1.0), ("ZI", 1.0), ("ZX", -1.0)]).expect("static labels")
}

/// Compile a controlled-NOT with control `pair[0]` and target `pair[1]`.
///
/// Only `K = −Z⊗X` is simulated; the commuting local part `I⊗X + Z⊗I` and the
/// global phase are applied exactly afterwards.
pub fn compile_cnot_on(
    h: &HamExpansion,
    pair: [usize; 2],
    steps: StepCount,
    order: Order,
    config: &DenseConfig,
) -> Result<(Schedule, ErrorPlan)> {
    let k = HamExpansion::from_labels(&[("ZX", -1.0)])?;
    let program = Program::new(h, pair, &k, FRAC_PI_4, order)?;
    let (core, plan) = program.compile(steps, config)?;
    let mut b = ScheduleBuilder::new(h.n());
    b.append(&core);
    let locals = HamExpansion::from_labels(&[("IX", 1.0), ("ZI", 1.0)])?;
    b.push_layer(&LocalLayer::from_local_hamiltonian(&locals, FRAC_PI_4).embed(h.n(), &pair));
    b.add_phase(-FRAC_PI_4);
    Ok((b.finish(), plan))
}

/// [`compile_cnot_on`] for a two-qubit drift.
pub fn compile_cnot(h: &HamExpansion, steps: StepCount, order: Order, config: &DenseConfig) -> Result<(Schedule, ErrorPlan)> {
    require_two_qubit(h)?;
    compile_cnot_on(h, [0, 1], steps, order, config)
}
