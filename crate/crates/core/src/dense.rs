//! Dense `2ⁿ × 2ⁿ` verification back-end.
//!
//! Qubit 0 is the leftmost Kronecker factor, so it owns the most significant
//! bit of a basis-state index. Everything here is for checking compiled
//! schedules; compilation itself never touches dense matrices.

use std::collections::HashMap;

use nalgebra::DMatrix;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::local::{Gate1, LocalLayer, C64};
use crate::pauli::{HamExpansion, Pauli, PauliString};
use crate::schedule::{Instruction, Schedule};

/// Default largest register that dense verification will accept.
pub const DEFAULT_DENSE_CAP: usize = 10;

/// Row count at which the parallel kernels take over.
#[cfg(feature = "parallel")]
const PAR_MIN_DIM: usize = 64;

/// Limits for dense verification.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct DenseConfig {
    pub cap: usize,
}

impl Default for DenseConfig {
    fn default() -> Self {
        DenseConfig { cap: DEFAULT_DENSE_CAP }
    }
}

impl DenseConfig {
    pub fn check(&self, n: usize) -> Result<()> {
        if n > self.cap {
            Err(Error::TooLarge { qubits: n, cap: self.cap })
        } else {
            Ok(())
        }
    }
}

/// Square complex matrix, row-major, dimension a power of two.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOp {
    dim: usize,
    data: Vec<C64>,
}

impl DenseOp {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim.is_power_of_two(), "dimension {dim} is not a power of two");
        DenseOp { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), dim);
            m.data[i * dim..(i + 1) * dim].copy_from_slice(r);
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> C64>(dim: usize, mut f: F) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = f(i, j);
            }
        }
        m
    }

    pub fn from_gate(g: &Gate1) -> Self {
        Self::from_rows(&[g.0[0].to_vec(), g.0[1].to_vec()])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn scaled(&self, s: C64) -> Self {
        DenseOp { dim: self.dim, data: self.data.iter().map(|&v| v * s).collect() }
    }

    pub fn add(&self, other: &DenseOp) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &DenseOp) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with<F: Fn(C64, C64) -> C64>(&self, other: &DenseOp, f: F) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch(self.dim, other.dim));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(DenseOp { dim: self.dim, data })
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `self ⊗ other`.
    pub fn kron(&self, other: &DenseOp) -> Self {
        let (a, b) = (self.dim, other.dim);
        Self::from_fn(a * b, |i, j| self.get(i / b, j / b) * other.get(i % b, j % b))
    }

    /// `self · rhs`.
    pub fn matmul(&self, rhs: &DenseOp) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimMismatch(self.dim, rhs.dim));
        }
        #[cfg(feature = "parallel")]
        if self.dim >= PAR_MIN_DIM {
            return Ok(self.matmul_par(rhs));
        }
        Ok(self.matmul_seq(rhs))
    }

    /// Single-threaded product. Each entry sums over `k` in ascending order,
    /// the same order the parallel kernel uses, so results are bitwise equal.
    pub fn matmul_seq(&self, rhs: &DenseOp) -> Self {
        let dim = self.dim;
        let mut out = Self::zeros(dim);
        for (i, row) in out.data.chunks_mut(dim).enumerate() {
            mul_row(&self.data[i * dim..(i + 1) * dim], &rhs.data, row);
        }
        out
    }

    /// Row-parallel product.
    #[cfg(feature = "parallel")]
    pub fn matmul_par(&self, rhs: &DenseOp) -> Self {
        let dim = self.dim;
        let mut out = Self::zeros(dim);
        out.data.par_chunks_mut(dim).enumerate().for_each(|(i, row)| {
            mul_row(&self.data[i * dim..(i + 1) * dim], &rhs.data, row);
        });
        out
    }

    /// Left-multiply in place by `gate` acting on qubit `q`.
    pub fn apply_gate_left(&mut self, q: usize, gate: &Gate1) {
        let n = self.qubits();
        assert!(q < n);
        let dim = self.dim;
        let half = (1usize << (n - 1 - q)) * dim;
        let g = gate.0;
        let kernel = |block: &mut [C64]| {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = g[0][0] * x + g[0][1] * y;
                *b = g[1][0] * x + g[1][1] * y;
            }
        };
        #[cfg(feature = "parallel")]
        if dim >= PAR_MIN_DIM {
            self.data.par_chunks_mut(2 * half).for_each(kernel);
            return;
        }
        self.data.chunks_mut(2 * half).for_each(kernel);
    }

    /// Left-multiply in place by a layer of single-qubit gates.
    pub fn apply_layer_left(&mut self, layer: &LocalLayer) {
        assert_eq!(layer.n(), self.qubits());
        for (q, g) in layer.gates().iter().enumerate() {
            if !g.is_identity(0.0) {
                self.apply_gate_left(q, g);
            }
        }
    }

    /// Largest entry of `|A − A†|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                m = m.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        m
    }

    /// `‖U†U − I‖` in operator norm.
    pub fn unitarity_defect(&self) -> f64 {
        let g = self.adjoint().matmul(self).expect("square");
        operator_norm(&g.sub(&Self::identity(self.dim)).expect("same dim"))
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_defect() <= 1e-10
    }

    fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }

    fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), |i, j| m[(i, j)])
    }
}

fn mul_row(a_row: &[C64], b: &[C64], out_row: &mut [C64]) {
    let dim = out_row.len();
    for (k, &a) in a_row.iter().enumerate() {
        if a == C64::new(0.0, 0.0) {
            continue;
        }
        for (o, &bv) in out_row.iter_mut().zip(&b[k * dim..(k + 1) * dim]) {
            *o += a * bv;
        }
    }
}

/// Matrix of a Pauli string. Each row has a single non-zero entry.
pub fn dense_of_pauli(p: &PauliString) -> DenseOp {
    let n = p.len();
    let dim = 1usize << n;
    let mut flip = 0usize;
    for (q, op) in p.ops().iter().enumerate() {
        if matches!(op, Pauli::X | Pauli::Y) {
            flip |= 1 << (n - 1 - q);
        }
    }
    let mut m = DenseOp::zeros(dim);
    for i in 0..dim {
        let mut v = C64::new(1.0, 0.0);
        for (q, op) in p.ops().iter().enumerate() {
            let bit = (i >> (n - 1 - q)) & 1;
            v *= match (op, bit) {
                (Pauli::I, _) | (Pauli::X, _) | (Pauli::Z, 0) => C64::new(1.0, 0.0),
                (Pauli::Z, _) => C64::new(-1.0, 0.0),
                (Pauli::Y, 0) => C64::new(0.0, -1.0),
                (Pauli::Y, _) => C64::new(0.0, 1.0),
            };
        }
        m.set(i, i ^ flip, v);
    }
    m
}

/// `Σ h_p · dense(p)`.
pub fn dense_of_expansion(h: &HamExpansion) -> DenseOp {
    let dim = 1usize << h.n();
    let mut m = DenseOp::zeros(dim);
    for (p, c) in h.terms() {
        let pm = dense_of_pauli(p);
        for (acc, v) in m.data.iter_mut().zip(&pm.data) {
            *acc += v * c;
        }
    }
    m
}

/// Eigendecomposition `A = V diag(λ) V†` of a Hermitian matrix, reusable for
/// `exp(-iAt)` at many times.
#[derive(Clone, Debug)]
pub struct HermitianSpectrum {
    eigenvalues: Vec<f64>,
    vectors: DenseOp,
    vectors_adj: DenseOp,
}

impl HermitianSpectrum {
    pub fn new(a: &DenseOp) -> Result<Self> {
        let defect = a.hermitian_defect();
        if defect > 1e-10 {
            return Err(Error::NotHermitian(defect));
        }
        let eig = a.to_nalgebra().symmetric_eigen();
        let vectors = DenseOp::from_nalgebra(&eig.eigenvectors);
        let vectors_adj = vectors.adjoint();
        Ok(HermitianSpectrum { eigenvalues: eig.eigenvalues.iter().copied().collect(), vectors, vectors_adj })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `exp(-i A t)`.
    pub fn exp(&self, t: f64) -> DenseOp {
        let dim = self.vectors.dim;
        // V · diag(e^{-iλt}), then · V†
        let phases: Vec<C64> = self.eigenvalues.iter().map(|&l| C64::from_polar(1.0, -l * t)).collect();
        let scaled = DenseOp::from_fn(dim, |i, j| self.vectors.get(i, j) * phases[j]);
        scaled.matmul(&self.vectors_adj).expect("same dim")
    }
}

/// `exp(-i A t)` for Hermitian `A`.
pub fn expm_hermitian(a: &DenseOp, t: f64) -> Result<DenseOp> {
    Ok(HermitianSpectrum::new(a)?.exp(t))
}

/// Largest singular value.
pub fn operator_norm(a: &DenseOp) -> f64 {
    a.to_nalgebra().singular_values().iter().copied().fold(0.0, f64::max)
}

/// Operator-norm distance `‖W − W′‖`. With `phase_align`, `W′` is first
/// multiplied by the phase that makes `tr(W† W′)` real and non-negative.
pub fn distance(w: &DenseOp, w_prime: &DenseOp, phase_align: bool) -> Result<f64> {
    if w.dim != w_prime.dim {
        return Err(Error::DimMismatch(w.dim, w_prime.dim));
    }
    let aligned;
    let other = if phase_align {
        let overlap: C64 = w.data.iter().zip(&w_prime.data).map(|(a, b)| a.conj() * b).sum();
        let phase = if overlap.norm() > 0.0 { overlap.arg() } else { 0.0 };
        aligned = w_prime.scaled(C64::from_polar(1.0, -phase));
        &aligned
    } else {
        w_prime
    };
    Ok(operator_norm(&w.sub(other)?))
}

/// Unitary implemented by `schedule` with drift `h`.
pub fn evaluate_schedule(schedule: &Schedule, h: &HamExpansion, config: &DenseConfig) -> Result<DenseOp> {
    if schedule.n() != h.n() {
        return Err(Error::DimMismatch(schedule.n(), h.n()));
    }
    config.check(h.n())?;
    let dim = 1usize << h.n();
    let spectrum = HermitianSpectrum::new(&dense_of_expansion(h))?;
    let mut cache: HashMap<u64, DenseOp> = HashMap::new();
    let mut acc = DenseOp::identity(dim);
    for ins in schedule.instructions() {
        match *ins {
            Instruction::Local(id) => acc.apply_layer_left(&schedule.layers()[id]),
            Instruction::Drift(tau) => {
                let step = cache.entry(tau.to_bits()).or_insert_with(|| spectrum.exp(tau));
                acc = step.matmul(&acc)?;
            }
        }
    }
    Ok(acc.scaled(C64::from_polar(1.0, -schedule.global_phase())))
}
