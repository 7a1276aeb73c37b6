//! Independent dense oracles and random instance generators shared by the
//! integration tests. Nothing here calls the library's dense back-end.

#![allow(dead_code)]

use std::collections::HashMap;

use hamrc::pauli::{HamExpansion, Pauli, PauliString};
use hamrc::schedule::{Instruction, Schedule};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

pub type M = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli_2x2(p: Pauli) -> M {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let entries = match p {
        Pauli::I => [o, z, z, o],
        Pauli::X => [z, o, o, z],
        Pauli::Y => [z, -i, i, z],
        Pauli::Z => [o, z, z, -o],
    };
    M::from_row_slice(2, 2, &entries)
}

/// Kronecker product with qubit 0 leftmost.
pub fn pauli_matrix(p: &PauliString) -> M {
    p.ops()
        .iter()
        .fold(M::identity(1, 1), |acc, &q| acc.kronecker(&pauli_2x2(q)))
}

pub fn hamiltonian_matrix(h: &HamExpansion) -> M {
    let dim = 1usize << h.n();
    let mut m = M::zeros(dim, dim);
    for (p, coef) in h.terms() {
        m += pauli_matrix(p) * c(coef, 0.0);
    }
    m
}

/// `exp(-i t A)` by scaling and squaring of a Taylor series.
pub fn expm_i(a: &M, t: f64) -> M {
    let x = a * c(0.0, -t);
    let norm: f64 = x.iter().map(|v| v.norm()).sum::<f64>().max(1e-300);
    let squarings = (norm.log2().ceil().max(0.0) as i32) + 4;
    let scaled = &x * c(0.5f64.powi(squarings), 0.0);
    let dim = a.nrows();
    let mut term = M::identity(dim, dim);
    let mut sum = M::identity(dim, dim);
    for k in 1..30 {
        term = &term * &scaled * c(1.0 / k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

pub fn op_norm(a: &M) -> f64 {
    a.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// `‖W − W′‖`, optionally after removing the best global phase of `W′`.
pub fn dist(w: &M, w2: &M, phase_align: bool) -> f64 {
    let other = if phase_align {
        let overlap: Complex64 = w.iter().zip(w2.iter()).map(|(a, b)| a.conj() * b).sum();
        w2 * Complex64::from_polar(1.0, -overlap.arg())
    } else {
        w2.clone()
    };
    op_norm(&(w - other))
}

/// Evaluate a schedule instruction by instruction with oracle matrices.
pub fn evaluate(s: &Schedule, h: &HamExpansion) -> M {
    assert_eq!(s.n(), h.n());
    let dim = 1usize << s.n();
    let hm = hamiltonian_matrix(h);
    let layers: Vec<M> = s
        .layers()
        .iter()
        .map(|l| {
            l.gates().iter().fold(M::identity(1, 1), |acc, g| {
                let r = g.to_reals();
                let g = M::from_row_slice(2, 2, &[c(r[0], r[1]), c(r[2], r[3]), c(r[4], r[5]), c(r[6], r[7])]);
                acc.kronecker(&g)
            })
        })
        .collect();
    let mut drifts: HashMap<u64, M> = HashMap::new();
    let mut acc = M::identity(dim, dim);
    for ins in s.instructions() {
        match *ins {
            Instruction::Local(id) => acc = &layers[id] * acc,
            Instruction::Drift(tau) => {
                let u = drifts.entry(tau.to_bits()).or_insert_with(|| expm_i(&hm, tau));
                acc = &*u * acc;
            }
        }
    }
    acc * Complex64::from_polar(1.0, -s.global_phase())
}

/// The controlled-NOT with control `control` and target `target` on `n` qubits.
pub fn cnot_matrix(n: usize, control: usize, target: usize) -> M {
    let dim = 1usize << n;
    let mut m = M::zeros(dim, dim);
    for col in 0..dim {
        let cbit = (col >> (n - 1 - control)) & 1;
        let row = if cbit == 1 { col ^ (1 << (n - 1 - target)) } else { col };
        m[(row, col)] = c(1.0, 0.0);
    }
    m
}

pub fn random_pauli(rng: &mut impl Rng) -> Pauli {
    Pauli::NON_IDENTITY[rng.gen_range(0..3)]
}

/// Dense two-qubit Hamiltonian with every coefficient in `[-1, 1]` and a
/// guaranteed coupling.
pub fn random_two_qubit(rng: &mut impl Rng) -> HamExpansion {
    let mut entries = Vec::new();
    for a in [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z] {
        for b in [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z] {
            entries.push((PauliString::new(vec![a, b]).unwrap(), rng.gen_range(-1.0..1.0)));
        }
    }
    entries.push((PauliString::new(vec![random_pauli(rng), random_pauli(rng)]).unwrap(), 0.5));
    HamExpansion::new(2, entries).unwrap()
}

/// Random two-body Hamiltonian: each pair coupled with probability `p_edge`
/// by one to three random products, plus random single-qubit terms.
pub fn random_two_body(rng: &mut impl Rng, n: usize, p_edge: f64) -> HamExpansion {
    let mut entries = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            if rng.gen_bool(p_edge) {
                for _ in 0..rng.gen_range(1..=3) {
                    let coef = rng.gen_range(0.1..1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    entries.push((PauliString::pair(n, (a, random_pauli(rng)), (b, random_pauli(rng))), coef));
                }
            }
        }
        if rng.gen_bool(0.5) {
            entries.push((PauliString::single(n, a, random_pauli(rng)), rng.gen_range(-1.0..1.0)));
        }
    }
    if rng.gen_bool(0.3) {
        entries.push((PauliString::identity(n), rng.gen_range(-1.0..1.0)));
    }
    HamExpansion::new(n, entries).unwrap()
}

/// Open chain with `Z⊗Z` couplings and transverse `X` fields.
pub fn chain(n: usize, coupling: f64, field: f64) -> HamExpansion {
    let mut entries = Vec::new();
    for q in 0..n {
        if q + 1 < n {
            entries.push((PauliString::pair(n, (q, Pauli::Z), (q + 1, Pauli::Z)), coupling));
        }
        entries.push((PauliString::single(n, q, Pauli::X), field));
    }
    HamExpansion::new(n, entries).unwrap()
}

/// Random unitary from the QR factor of a complex Gaussian matrix.
pub fn random_unitary(rng: &mut impl Rng, dim: usize) -> M {
    let g = M::from_fn(dim, dim, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    g.qr().q()
}

pub fn random_matrix(rng: &mut impl Rng, dim: usize) -> M {
    M::from_fn(dim, dim, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
