//! Interactions between uncoupled qubits: swap one end along a shortest path,
//! apply the interaction on the last hop, and swap back.

use std::collections::VecDeque;
use std::f64::consts::FRAC_PI_4;

use crate::bounds::{ErrorPlan, StepCount};
use crate::dense::DenseConfig;
use crate::error::{Error, Result};
use crate::pauli::{CouplingGraph, HamExpansion};
use crate::program::Program;
use crate::schedule::{Schedule, ScheduleBuilder};
use crate::synth::Order;

/// Shortest path from `k` to `k2` by breadth-first search, preferring the
/// smallest next vertex on ties (the lexicographically smallest shortest path).
pub fn route(g: &CouplingGraph, k: usize, k2: usize) -> Result<Vec<usize>> {
    let n = g.n();
    if k >= n || k2 >= n {
        return Err(Error::InvalidTerm(format!("qubit out of range for {n} qubits")));
    }
    // BFS from the destination gives distances; walking forward greedily with
    // the smallest neighbour one step closer yields the smallest path.
    let mut dist = vec![usize::MAX; n];
    dist[k2] = 0;
    let mut queue = VecDeque::from([k2]);
    while let Some(v) = queue.pop_front() {
        for w in g.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    if dist[k] == usize::MAX {
        return Err(Error::NotConnected(k, k2));
    }
    let mut path = vec![k];
    let mut v = k;
    while v != k2 {
        v = g
            .neighbors(v)
            .into_iter()
            .find(|&w| dist[w] + 1 == dist[v])
            .expect("a neighbour one step closer exists");
        path.push(v);
    }
    Ok(path)
}

/// Exchange Hamiltonian `XX + YY + ZZ`; `exp(-i (π/4) ·)` is `e^{-iπ/4}` SWAP.
pub fn swap_generator() -> HamExpansion {
    HamExpansion::from_labels(&[("XX", 1.0), ("YY", 1.0), ("ZZ", 1.0)]).expect("static labels")
}

/// SWAP of the two qubits of `pair`, with the global phase removed.
pub fn compile_swap(h: &HamExpansion, pair: [usize; 2], steps: StepCount, order: Order, config: &DenseConfig) -> Result<(Schedule, ErrorPlan)> {
    let (core, plan) = Program::new(h, pair, &swap_generator(), FRAC_PI_4, order)?.compile(steps, config)?;
    let mut b = ScheduleBuilder::new(h.n());
    b.append(&core);
    b.add_phase(-FRAC_PI_4);
    Ok((b.finish(), plan))
}

/// Role of one compiled segment of a routed schedule.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SegmentKind {
    Swap,
    Interaction,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub kind: SegmentKind,
    pub pair: [usize; 2],
    pub plan: ErrorPlan,
}

/// How a routed schedule was assembled.
#[derive(Clone, Debug, PartialEq)]
pub struct RemotePlan {
    pub path: Vec<usize>,
    pub segments: Vec<Segment>,
}

impl RemotePlan {
    pub fn swap_count(&self) -> usize {
        self.segments.iter().filter(|s| s.kind == SegmentKind::Swap).count()
    }

    /// Sum of the segments' predicted errors.
    pub fn predicted_error(&self) -> f64 {
        self.segments.iter().map(|s| s.plan.predicted_error).sum()
    }

    /// Sum of the segments' chained analytic bounds.
    pub fn chained_bound(&self) -> f64 {
        self.segments.iter().map(|s| s.plan.chained_bound).sum()
    }

    pub fn interaction(&self) -> &ErrorPlan {
        &self
            .segments
            .iter()
            .find(|s| s.kind == SegmentKind::Interaction)
            .expect("one interaction segment")
            .plan
    }
}

/// Split an accuracy target evenly over `segments`; fixed counts apply to each.
fn per_segment(steps: StepCount, segments: usize) -> StepCount {
    match steps {
        StepCount::Fixed(n) => StepCount::Fixed(n),
        StepCount::Accuracy { epsilon, bound } => StepCount::Accuracy { epsilon: epsilon / segments as f64, bound },
    }
}

/// Compile `exp(-i K t)` with `K`'s qubit 0 on `k` and qubit 1 on `k2`,
/// routing through SWAPs when the two are not directly coupled.
#[allow(clippy::too_many_arguments)]
pub fn compile_remote(
    h: &HamExpansion,
    k: usize,
    k2: usize,
    k_pair: &HamExpansion,
    t: f64,
    steps: StepCount,
    order: Order,
    config: &DenseConfig,
) -> Result<(Schedule, RemotePlan)> {
    if k == k2 {
        return Err(Error::InvalidTerm(format!("interaction endpoints coincide at qubit {k}")));
    }
    let g = CouplingGraph::new(h)?;
    let path = route(&g, k, k2)?;
    let hops = path.len() - 1;
    let seg_steps = per_segment(steps, 2 * (hops - 1) + 1);

    let mut swaps = Vec::with_capacity(hops - 1);
    for w in path.windows(2).take(hops - 1) {
        let pair = [w[0], w[1]];
        let (s, plan) = compile_swap(h, pair, seg_steps, order, config)?;
        swaps.push((pair, s, plan));
    }
    let last = [path[hops - 1], path[hops]];
    let (core, core_plan) = Program::new(h, last, k_pair, t, order)?.compile(seg_steps, config)?;

    let mut b = ScheduleBuilder::new(h.n());
    let mut segments = Vec::with_capacity(2 * swaps.len() + 1);
    for (pair, s, plan) in &swaps {
        b.append(s);
        segments.push(Segment { kind: SegmentKind::Swap, pair: *pair, plan: plan.clone() });
    }
    b.append(&core);
    segments.push(Segment { kind: SegmentKind::Interaction, pair: last, plan: core_plan });
    for (pair, s, plan) in swaps.iter().rev() {
        b.append(s);
        segments.push(Segment { kind: SegmentKind::Swap, pair: *pair, plan: plan.clone() });
    }
    Ok((b.finish(), RemotePlan { path, segments }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::BoundKind;
    use crate::dense::{dense_of_pauli, distance, evaluate_schedule, DenseOp};

    fn graph(n: usize, edges: &[(usize, usize)]) -> CouplingGraph {
        CouplingGraph::from_edges(n, edges)
    }

    /// Every simple path from `a` to `b`, for the brute-force oracle.
    fn all_paths(g: &CouplingGraph, a: usize, b: usize) -> Vec<Vec<usize>> {
        fn go(g: &CouplingGraph, path: &mut Vec<usize>, b: usize, out: &mut Vec<Vec<usize>>) {
            let v = *path.last().unwrap();
            if v == b {
                out.push(path.clone());
                return;
            }
            for w in g.neighbors(v) {
                if !path.contains(&w) {
                    path.push(w);
                    go(g, path, b, out);
                    path.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(g, &mut vec![a], b, &mut out);
        out
    }

    #[test]
    fn path_graph_and_trivial_route() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(route(&g, 0, 3).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(route(&g, 2, 2).unwrap(), vec![2]);
        assert_eq!(route(&g, 3, 1).unwrap(), vec![3, 2, 1]);
    }

    #[test]
    fn disconnected_is_error() {
        let g = graph(4, &[(0, 1), (2, 3)]);
        assert_eq!(route(&g, 0, 3), Err(Error::NotConnected(0, 3)));
    }

    #[test]
    fn tie_break_matches_exhaustive_oracle() {
        // all graphs on 5 vertices drawn from a fixed edge list, via bitmasks
        let candidates = [(0, 1), (0, 2), (1, 3), (2, 3), (3, 4), (1, 2), (0, 4), (2, 4)];
        for mask in 0u32..(1 << candidates.len()) {
            let edges: Vec<_> = candidates.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, e)| *e).collect();
            let g = graph(5, &edges);
            for a in 0..5 {
                for b in 0..5 {
                    let paths = all_paths(&g, a, b);
                    let expected = paths.iter().min_by(|x, y| x.len().cmp(&y.len()).then(x.cmp(y)));
                    match (expected, route(&g, a, b)) {
                        (Some(e), Ok(p)) => assert_eq!(&p, e, "mask {mask} {a}->{b}"),
                        (None, Err(Error::NotConnected(..))) => {}
                        (e, p) => panic!("mask {mask} {a}->{b}: expected {e:?}, got {p:?}"),
                    }
                }
            }
        }
    }

    fn chain(n: usize) -> HamExpansion {
        let mut labels = Vec::new();
        for q in 0..n - 1 {
            let mut s = vec!['I'; n];
            s[q] = 'Z';
            s[q + 1] = 'Z';
            labels.push((s.into_iter().collect::<String>(), 1.0));
            let mut s = vec!['I'; n];
            s[q] = 'X';
            labels.push((s.into_iter().collect::<String>(), 0.5));
        }
        let refs: Vec<(&str, f64)> = labels.iter().map(|(s, c)| (s.as_str(), *c)).collect();
        HamExpansion::from_labels(&refs).unwrap()
    }

    #[test]
    fn adjacent_endpoints_need_no_swaps() {
        let h = chain(3);
        let k = HamExpansion::from_labels(&[("XX", 1.0)]).unwrap();
        let cfg = DenseConfig::default();
        let (s, plan) = compile_remote(&h, 1, 2, &k, 0.4, StepCount::Fixed(3), Order::First, &cfg).unwrap();
        assert_eq!(plan.swap_count(), 0);
        let (direct, _) = Program::new(&h, [1, 2], &k, 0.4, Order::First).unwrap().compile(StepCount::Fixed(3), &cfg).unwrap();
        assert_eq!(s, direct);
    }

    #[test]
    fn swap_squared_is_identity() {
        let h = chain(3);
        let cfg = DenseConfig::default();
        let eps = 1e-2;
        let (s, _) = compile_swap(&h, [0, 1], StepCount::Accuracy { epsilon: eps, bound: BoundKind::Empirical }, Order::Second, &cfg).unwrap();
        let mut b = ScheduleBuilder::new(3);
        b.append(&s);
        b.append(&s);
        let u = evaluate_schedule(&b.finish(), &h, &cfg).unwrap();
        assert!(distance(&DenseOp::identity(8), &u, true).unwrap() <= 2.0 * eps);
    }

    #[test]
    fn routed_zz_on_three_qubits() {
        let h = chain(3);
        let cfg = DenseConfig::default();
        let k = HamExpansion::from_labels(&[("ZZ", 1.0)]).unwrap();
        let t = 0.5;
        let eps = 2e-2;
        let (s, plan) = compile_remote(&h, 0, 2, &k, t, StepCount::Accuracy { epsilon: eps, bound: BoundKind::Empirical }, Order::Second, &cfg).unwrap();
        assert_eq!(plan.path, vec![0, 1, 2]);
        assert_eq!(plan.swap_count(), 2);
        let u = evaluate_schedule(&s, &h, &cfg).unwrap();
        let zz = dense_of_pauli(&"ZIZ".parse().unwrap());
        let exact = crate::dense::expm_hermitian(&zz, t).unwrap();
        assert!(distance(&exact, &u, true).unwrap() <= eps);
    }
}
