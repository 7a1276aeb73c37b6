use std::collections::{BTreeMap, VecDeque};

use super::expansion::HamExpansion;
use super::string::Pauli;
use crate::error::{Error, Result};

type EdgeMap = BTreeMap<(usize, usize), Vec<(Pauli, Pauli, f64)>>;

/// Undirected graph of coupled qubit pairs. Edge keys are `(k, l)` with `k < l`;
/// each edge lists the `(σ_k, σ_l, h)` entries that couple the pair.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingGraph {
    n: usize,
    edges: EdgeMap,
}

impl CouplingGraph {
    pub fn new(h: &HamExpansion) -> Result<Self> {
        h.require_two_body()?;
        let mut edges = EdgeMap::new();
        for (p, c) in h.terms() {
            if let [k, l] = p.support()[..] {
                edges.entry((k, l)).or_default().push((p.get(k), p.get(l), c));
            }
        }
        Ok(CouplingGraph { n: h.n(), edges })
    }

    /// Graph with the given edges and no coefficient data; used by routing tests.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let edges = edges
            .iter()
            .map(|&(a, b)| ((a.min(b), a.max(b)), Vec::new()))
            .collect();
        CouplingGraph { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.keys().copied()
    }

    pub fn edge_terms(&self, k: usize, l: usize) -> Option<&[(Pauli, Pauli, f64)]> {
        self.edges.get(&(k.min(l), k.max(l))).map(Vec::as_slice)
    }

    pub fn is_coupled(&self, k: usize, l: usize) -> bool {
        self.edges.contains_key(&(k.min(l), k.max(l)))
    }

    /// Neighbours of `q` in ascending order.
    pub fn neighbors(&self, q: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .keys()
            .filter_map(|&(a, b)| match (a == q, b == q) {
                (true, _) => Some(b),
                (_, true) => Some(a),
                _ => None,
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for w in self.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// Entangling verdict plus the component partition that witnesses it.
#[derive(Clone, Debug, PartialEq)]
pub struct EntanglingVerdict {
    pub entangling: bool,
    pub components: Vec<Vec<usize>>,
}

/// A two-body Hamiltonian is entangling when every pair of qubits is connected.
pub fn is_entangling(h: &HamExpansion) -> Result<EntanglingVerdict> {
    let components = CouplingGraph::new(h)?.components();
    Ok(EntanglingVerdict {
        entangling: components.len() == 1,
        components,
    })
}

/// Largest-magnitude coupling `h_{r,s} σ_r ⊗ σ_s` on the ordered pair `(k, l)`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct MaxCoupling {
    /// Pauli acting on `k`.
    pub r: Pauli,
    /// Pauli acting on `l`.
    pub s: Pauli,
    pub coefficient: f64,
}

impl MaxCoupling {
    pub fn sign(&self) -> f64 {
        self.coefficient.signum()
    }
}

/// Pick the largest `|h_{r,s}|` on `(k, l)`; ties go to the smallest `(r, s)`
/// under `X < Y < Z`.
pub fn max_coupling(h: &HamExpansion, (k, l): (usize, usize)) -> Result<MaxCoupling> {
    h.require_two_body()?;
    let mut best: Option<MaxCoupling> = None;
    for (p, c) in h.terms() {
        if p.support() != [k.min(l), k.max(l)] {
            continue;
        }
        let cand = MaxCoupling { r: p.get(k), s: p.get(l), coefficient: c };
        best = match best {
            None => Some(cand),
            Some(b) => {
                let better = cand.coefficient.abs() > b.coefficient.abs()
                    || (cand.coefficient.abs() == b.coefficient.abs() && (cand.r, cand.s) < (b.r, b.s));
                Some(if better { cand } else { b })
            }
        };
    }
    best.ok_or(Error::NotCoupled(k, l))
}
