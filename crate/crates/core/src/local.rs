//! Single-qubit gates, layers of simultaneous single-qubit gates, and the
//! Clifford layers used as conjugation frames.

use num_complex::Complex64;

use crate::pauli::{HamExpansion, Pauli, PauliString};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I_UNIT: C64 = C64::new(0.0, 1.0);

/// A 2×2 complex matrix, row-major.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Gate1(pub [[C64; 2]; 2]);

impl Gate1 {
    pub const IDENTITY: Gate1 = Gate1([[ONE, ZERO], [ZERO, ONE]]);

    pub fn pauli(p: Pauli) -> Gate1 {
        match p {
            Pauli::I => Self::IDENTITY,
            Pauli::X => Gate1([[ZERO, ONE], [ONE, ZERO]]),
            Pauli::Y => Gate1([[ZERO, -I_UNIT], [I_UNIT, ZERO]]),
            Pauli::Z => Gate1([[ONE, ZERO], [ZERO, -ONE]]),
        }
    }

    /// Hadamard gate.
    pub fn hadamard() -> Gate1 {
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Gate1([[s, s], [s, -s]])
    }

    /// Phase gate `diag(1, i)`.
    pub fn phase() -> Gate1 {
        Gate1([[ONE, ZERO], [ZERO, I_UNIT]])
    }

    /// `exp(-i t (a X + b Y + c Z))`, closed form.
    pub fn exp_pauli_vector(a: f64, b: f64, c: f64, t: f64) -> Gate1 {
        let norm = (a * a + b * b + c * c).sqrt();
        if norm == 0.0 {
            return Self::IDENTITY;
        }
        let theta = norm * t;
        let (sin, cos) = theta.sin_cos();
        let (nx, ny, nz) = (a / norm, b / norm, c / norm);
        // cos·I − i sin·(n·σ)
        Gate1([
            [C64::new(cos, -sin * nz), C64::new(-sin * ny, -sin * nx)],
            [C64::new(sin * ny, -sin * nx), C64::new(cos, sin * nz)],
        ])
    }

    /// `self · rhs`.
    pub fn mul(&self, rhs: &Gate1) -> Gate1 {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Gate1(out)
    }

    pub fn adjoint(&self) -> Gate1 {
        let a = &self.0;
        Gate1([[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]])
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_diff(&self, other: &Gate1) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                m = m.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        m
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.max_diff(&Self::IDENTITY) <= tol
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint().mul(self).max_diff(&Self::IDENTITY)
    }

    /// Half of `Tr(σ · self)`.
    fn pauli_component(&self, p: Pauli) -> C64 {
        let s = Self::pauli(p).mul(self);
        (s.0[0][0] + s.0[1][1]) * 0.5
    }

    /// Row-major re/im interleaved reals.
    pub fn to_reals(&self) -> [f64; 8] {
        let a = &self.0;
        [
            a[0][0].re, a[0][0].im, a[0][1].re, a[0][1].im,
            a[1][0].re, a[1][0].im, a[1][1].re, a[1][1].im,
        ]
    }

    pub fn from_reals(r: &[f64; 8]) -> Gate1 {
        Gate1([
            [C64::new(r[0], r[1]), C64::new(r[2], r[3])],
            [C64::new(r[4], r[5]), C64::new(r[6], r[7])],
        ])
    }
}

/// Simultaneous single-qubit gates, one per qubit, qubit 0 first.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalLayer {
    gates: Vec<Gate1>,
}

impl LocalLayer {
    pub fn new(gates: Vec<Gate1>) -> Self {
        LocalLayer { gates }
    }

    pub fn identity(n: usize) -> Self {
        LocalLayer { gates: vec![Gate1::IDENTITY; n] }
    }

    pub fn n(&self) -> usize {
        self.gates.len()
    }

    pub fn gates(&self) -> &[Gate1] {
        &self.gates
    }

    /// Layer applied after `earlier`: `self · earlier` qubit by qubit.
    pub fn after(&self, earlier: &LocalLayer) -> LocalLayer {
        let gates = self.gates.iter().zip(&earlier.gates).map(|(a, b)| a.mul(b)).collect();
        LocalLayer { gates }
    }

    pub fn adjoint(&self) -> LocalLayer {
        LocalLayer { gates: self.gates.iter().map(Gate1::adjoint).collect() }
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.gates.iter().all(|g| g.is_identity(tol))
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.gates.iter().map(Gate1::unitarity_defect).fold(0.0, f64::max)
    }

    /// Place onto `sites` of an `n`-qubit register (identity elsewhere).
    pub fn embed(&self, n: usize, sites: &[usize]) -> LocalLayer {
        let mut gates = vec![Gate1::IDENTITY; n];
        for (&q, g) in sites.iter().zip(&self.gates) {
            gates[q] = *g;
        }
        LocalLayer { gates }
    }

    /// Exact evolution `exp(-i t L)` under a Hamiltonian of weight-≤1 terms.
    /// Identity terms are ignored; the caller tracks them as global phase.
    pub fn from_local_hamiltonian(h: &HamExpansion, t: f64) -> LocalLayer {
        let n = h.n();
        let mut vec = vec![[0.0f64; 3]; n];
        for (p, c) in h.terms() {
            match p.support()[..] {
                [] => {}
                [q] => vec[q][p.get(q).index() - 1] += c,
                _ => panic!("from_local_hamiltonian called with coupling term {p}"),
            }
        }
        let gates = vec
            .iter()
            .map(|v| Gate1::exp_pauli_vector(v[0], v[1], v[2], t))
            .collect();
        LocalLayer { gates }
    }
}

/// A single-qubit Clifford together with its action on the Paulis.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Clifford1 {
    gate: Gate1,
    /// `U σ U† = sign · image` for σ = X, Y, Z.
    images: [(f64, Pauli); 3],
}

impl Clifford1 {
    /// Wrap a gate that must be Clifford; panics otherwise.
    pub fn from_gate(gate: Gate1) -> Clifford1 {
        let mut images = [(1.0, Pauli::I); 3];
        for (slot, &sigma) in images.iter_mut().zip(&Pauli::NON_IDENTITY) {
            let conj = gate.mul(&Gate1::pauli(sigma)).mul(&gate.adjoint());
            *slot = Pauli::NON_IDENTITY
                .iter()
                .find_map(|&tau| {
                    let c = conj.pauli_component(tau);
                    if (c.re.abs() - 1.0).abs() < 1e-9 && c.im.abs() < 1e-9 {
                        Some((c.re.signum(), tau))
                    } else {
                        None
                    }
                })
                .expect("gate is not a single-qubit Clifford");
        }
        Clifford1 { gate, images }
    }

    pub fn identity() -> Clifford1 {
        Self::from_gate(Gate1::IDENTITY)
    }

    pub fn pauli(p: Pauli) -> Clifford1 {
        Self::from_gate(Gate1::pauli(p))
    }

    pub fn gate(&self) -> &Gate1 {
        &self.gate
    }

    /// `(sign, τ)` with `U σ U† = sign · τ`.
    pub fn image(&self, sigma: Pauli) -> (f64, Pauli) {
        match sigma {
            Pauli::I => (1.0, Pauli::I),
            s => self.images[s.index() - 1],
        }
    }

    /// `self · inner`: conjugation by `inner` first, then by `self`.
    pub fn compose(&self, inner: &Clifford1) -> Clifford1 {
        Self::from_gate(self.gate.mul(&inner.gate))
    }

    pub fn is_identity(&self) -> bool {
        self.gate.is_identity(0.0)
    }
}

/// Fixed rotation `U` with `U from U† = +to`.
///
/// | from → to | gate      |
/// |-----------|-----------|
/// | σ → σ     | I         |
/// | X ↔ Z     | H         |
/// | X → Y     | S         |
/// | Y → X     | S†        |
/// | Z → Y     | S·H       |
/// | Y → Z     | H·S†      |
pub fn clifford_mapping(from: Pauli, to: Pauli) -> Clifford1 {
    use Pauli::*;
    let h = Gate1::hadamard();
    let s = Gate1::phase();
    let gate = match (from, to) {
        (a, b) if a == b => Gate1::IDENTITY,
        (X, Z) | (Z, X) => h,
        (X, Y) => s,
        (Y, X) => s.adjoint(),
        (Z, Y) => s.mul(&h),
        (Y, Z) => h.mul(&s.adjoint()),
        _ => panic!("no mapping between {from} and {to}"),
    };
    Clifford1::from_gate(gate)
}

/// Smallest Pauli (under `X < Y < Z`) anticommuting with `sigma`.
pub fn anticommuting_pauli(sigma: Pauli) -> Pauli {
    Pauli::NON_IDENTITY
        .into_iter()
        .find(|p| !p.commutes_with(sigma))
        .expect("sigma must be non-identity")
}

/// One Clifford per qubit: a conjugation frame with exact symbolic action.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordLayer {
    ops: Vec<Clifford1>,
}

impl CliffordLayer {
    pub fn identity(n: usize) -> Self {
        CliffordLayer { ops: vec![Clifford1::identity(); n] }
    }

    pub fn new(ops: Vec<Clifford1>) -> Self {
        CliffordLayer { ops }
    }

    pub fn from_pauli_string(p: &PauliString) -> Self {
        CliffordLayer { ops: p.ops().iter().map(|&q| Clifford1::pauli(q)).collect() }
    }

    pub fn n(&self) -> usize {
        self.ops.len()
    }

    pub fn ops(&self) -> &[Clifford1] {
        &self.ops
    }

    pub fn is_identity(&self) -> bool {
        self.ops.iter().all(Clifford1::is_identity)
    }

    /// `self · inner`, qubit by qubit.
    pub fn compose(&self, inner: &CliffordLayer) -> CliffordLayer {
        let ops = self.ops.iter().zip(&inner.ops).map(|(a, b)| a.compose(b)).collect();
        CliffordLayer { ops }
    }

    /// Symbolic `U H U†`: exact relabelling with signs.
    pub fn conjugate(&self, h: &HamExpansion) -> HamExpansion {
        assert_eq!(h.n(), self.n());
        h.map_sites(|q, p| self.ops[q].image(p))
    }

    pub fn to_layer(&self) -> LocalLayer {
        LocalLayer::new(self.ops.iter().map(|c| *c.gate()).collect())
    }

    /// Place onto `sites` of an `n`-qubit register (identity elsewhere).
    pub fn embed(&self, n: usize, sites: &[usize]) -> CliffordLayer {
        let mut ops = vec![Clifford1::identity(); n];
        for (&q, op) in sites.iter().zip(&self.ops) {
            ops[q] = *op;
        }
        CliffordLayer { ops }
    }
}
