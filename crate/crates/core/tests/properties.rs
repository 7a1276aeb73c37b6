mod common;

use common::*;
use hamrc::bounds::{plan_steps, BoundKind};
use hamrc::cli::format::{parse_schedule, write_schedule};
use hamrc::decouple::recursive_decouple;
use hamrc::dense::DenseConfig;
use hamrc::local::{Gate1, LocalLayer};
use hamrc::pauli::{CouplingGraph, HamExpansion, Pauli, PauliString};
use hamrc::program::Program;
use hamrc::route::route;
use hamrc::schedule::ScheduleBuilder;
use hamrc::synth::Order;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn pauli() -> impl Strategy<Value = Pauli> {
    prop_oneof![Just(Pauli::I), Just(Pauli::X), Just(Pauli::Y), Just(Pauli::Z)]
}

fn pauli_string(n: usize) -> impl Strategy<Value = PauliString> {
    prop::collection::vec(pauli(), n).prop_map(|ops| PauliString::new(ops).unwrap())
}

fn random_layer(rng: &mut impl Rng, n: usize) -> LocalLayer {
    LocalLayer::new(
        (0..n)
            .map(|_| {
                let (a, b, c) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                Gate1::exp_pauli_vector(a, b, c, rng.gen_range(0.0..3.0))
            })
            .collect(),
    )
}

/// Breadth-first distances, computed independently of the router.
fn distances(g: &CouplingGraph, from: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.n()];
    dist[from] = Some(0);
    let mut frontier = vec![from];
    let mut d = 0;
    while !frontier.is_empty() {
        d += 1;
        let mut next = Vec::new();
        for &v in &frontier {
            for (w, slot) in dist.iter_mut().enumerate() {
                if w != v && g.is_coupled(v, w) && slot.is_none() {
                    *slot = Some(d);
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    dist
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expansion_add_sub_roundtrip(seed in any::<u64>(), n in 2usize..6) {
        let mut r = rng(seed);
        let a = random_two_body(&mut r, n, 0.6);
        let b = random_two_body(&mut r, n, 0.6);
        let back = a.add(&b).unwrap().sub(&b).unwrap();
        prop_assert!(back.approx_eq(&a, 1e-12));
        prop_assert!(a.sub(&a).unwrap().is_empty());
    }

    #[test]
    fn pauli_conjugation_is_an_involution(seed in any::<u64>(), c in pauli_string(4)) {
        let h = random_two_body(&mut rng(seed), 4, 0.7);
        let once = h.conjugate_by_pauli(&c).unwrap();
        prop_assert_eq!(once.conjugate_by_pauli(&c).unwrap(), h.clone());
        prop_assert_eq!(once.one_norm(), h.one_norm());
    }

    #[test]
    fn pauli_conjugation_matches_matrices(seed in any::<u64>(), c in pauli_string(3)) {
        let h = random_two_body(&mut rng(seed), 3, 0.8);
        let cm = pauli_matrix(&c);
        let expect = &cm * hamiltonian_matrix(&h) * &cm;
        let got = hamiltonian_matrix(&h.conjugate_by_pauli(&c).unwrap());
        prop_assert!(op_norm(&(expect - got)) < 1e-12);
    }

    #[test]
    fn decoupling_keeps_exactly_the_pair_terms(seed in any::<u64>(), n in 3usize..7) {
        let mut r = rng(seed);
        let h = random_two_body(&mut r, n, 0.7);
        let g = CouplingGraph::new(&h).unwrap();
        let edges: Vec<_> = g.edges().collect();
        prop_assume!(!edges.is_empty());
        let pair = edges[r.gen_range(0..edges.len())];
        let (reduced, frames) = recursive_decouple(&h, pair).unwrap();
        prop_assert_eq!(frames.weight_sum(), 1.0);
        prop_assert!(reduced.supported_within(&[pair.0, pair.1]));
        prop_assert_eq!(frames.average(&h).unwrap(), reduced.clone());
        for (p, coef) in h.terms() {
            if p.support().iter().all(|&q| q == pair.0 || q == pair.1) {
                prop_assert_eq!(reduced.coefficient(p), coef);
            }
        }
    }

    #[test]
    fn schedule_text_roundtrip(seed in any::<u64>(), n in 1usize..4, len in 0usize..12) {
        let mut r = rng(seed);
        let mut b = ScheduleBuilder::new(n);
        for _ in 0..len {
            if r.gen_bool(0.5) {
                b.push_layer(&random_layer(&mut r, n));
            } else {
                b.push_drift(r.gen_range(0.0..2.0));
            }
        }
        b.add_phase(r.gen_range(-3.0..3.0));
        let s = b.finish();
        let text = write_schedule(&s);
        let parsed = parse_schedule(&text).unwrap();
        prop_assert_eq!(write_schedule(&parsed), text);
        prop_assert_eq!(parsed.instructions(), s.instructions());
    }

    #[test]
    fn builder_preserves_the_product(seed in any::<u64>(), len in 1usize..10) {
        let mut r = rng(seed);
        let h = random_two_qubit(&mut r);
        let hm = hamiltonian_matrix(&h);
        let mut b = ScheduleBuilder::new(2);
        let mut expect = M::identity(4, 4);
        for _ in 0..len {
            match r.gen_range(0..4) {
                0 => {
                    let l = random_layer(&mut r, 2);
                    b.push_layer(&l);
                    let mut one = ScheduleBuilder::new(2);
                    one.push_layer(&l);
                    expect = evaluate(&one.finish(), &h) * expect;
                }
                1 => b.push_layer(&LocalLayer::identity(2)),
                2 => b.push_drift(0.0),
                _ => {
                    let tau = r.gen_range(0.0..1.0);
                    b.push_drift(tau);
                    expect = expm_i(&hm, tau) * expect;
                }
            }
        }
        let s = b.finish();
        let merged = s.instructions().windows(2).all(|w| std::mem::discriminant(&w[0]) != std::mem::discriminant(&w[1]));
        prop_assert!(merged);
        prop_assert!(dist(&evaluate(&s, &h), &expect, false) < 1e-10);
    }

    #[test]
    fn routes_are_lexicographic_shortest_paths(seed in any::<u64>(), n in 2usize..8) {
        let mut r = rng(seed);
        let h = random_two_body(&mut r, n, 0.4);
        let g = CouplingGraph::new(&h).unwrap();
        let (a, b) = (r.gen_range(0..n), r.gen_range(0..n));
        prop_assume!(a != b);
        let d = distances(&g, b);
        match route(&g, a, b) {
            Ok(path) => {
                prop_assert_eq!(Some(path.len() - 1), d[a]);
                prop_assert_eq!(path[0], a);
                prop_assert_eq!(*path.last().unwrap(), b);
                for w in path.windows(2) {
                    prop_assert!(g.is_coupled(w[0], w[1]));
                    // No smaller neighbour is equally close to the destination.
                    for v in 0..w[1] {
                        prop_assert!(!(g.is_coupled(w[0], v) && d[v] == d[w[1]]));
                    }
                }
            }
            Err(_) => prop_assert!(d[a].is_none()),
        }
    }

    #[test]
    fn atoms_sum_to_the_target(seed in any::<u64>(), n in 2usize..6, second in any::<bool>()) {
        let mut r = rng(seed);
        let h = random_two_body(&mut r, n, 0.6);
        let g = CouplingGraph::new(&h).unwrap();
        let edges: Vec<_> = g.edges().collect();
        prop_assume!(!edges.is_empty());
        let (a, b) = edges[r.gen_range(0..edges.len())];
        let k = random_two_qubit(&mut r);
        let order = if second { Order::Second } else { Order::First };
        let prog = Program::new(&h, [a, b], &k, 0.3, order).unwrap();
        let total = HamExpansion::linear_combination(n, prog.atom_hamiltonians().unwrap().iter().map(|x| (1.0, x))).unwrap();
        let target = prog.full_target().unwrap();
        prop_assert!(total.without_identity().approx_eq(&target.without_identity(), 1e-10));
    }

    #[test]
    fn planned_steps_are_monotone_in_epsilon(seed in any::<u64>(), e1 in 1e-4f64..1e-1, e2 in 1e-4f64..1e-1, second in any::<bool>()) {
        let mut r = rng(seed);
        let h = random_two_qubit(&mut r);
        let k = random_two_qubit(&mut r);
        let order = if second { Order::Second } else { Order::First };
        let prog = Program::new(&h, [0, 1], &k, 0.5, order).unwrap();
        let cfg = DenseConfig::default();
        let (lo, hi) = (e1.min(e2), e1.max(e2));
        let tight = plan_steps(BoundKind::Chained, lo, &prog, &cfg).unwrap();
        let loose = plan_steps(BoundKind::Chained, hi, &prog, &cfg).unwrap();
        prop_assert!(tight.steps >= loose.steps);
        prop_assert!(tight.predicted_error <= lo && loose.predicted_error <= hi);
        prop_assert!(tight.steps == 1 || prog.chained_bound(tight.steps - 1, &cfg).unwrap() > lo);
    }
}

#[cfg(feature = "parallel")]
proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn parallel_matmul_matches_sequential(seed in any::<u64>(), q in 1usize..6) {
        use hamrc::dense::DenseOp;
        use hamrc::local::C64;
        let mut r = rng(seed);
        let dim = 1 << q;
        let a = DenseOp::from_fn(dim, |_, _| C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)));
        let b = DenseOp::from_fn(dim, |_, _| C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)));
        let (par, seq) = (a.matmul_par(&b), a.matmul_seq(&b));
        prop_assert_eq!(par.data(), seq.data());
    }
}
