use std::collections::BTreeSet;

use proptest::prelude::*;

use symkat::automata::{Determinised, SymbolicDfa, SymbolicNfa, TableDfa, TableNfa};
use symkat::bdd::{Assignment, Manager, NodeId, VarId};
use symkat::equiv::{dsf_equiv, is_bisimulation, naive_equiv, symb_equiv, witness_distinguishes, UnionFind, Verdict};

#[derive(Clone, Debug)]
struct Spec {
    num_vars: u32,
    outputs: Vec<u8>,
    // successor of each state under each letter mask
    succ: Vec<Vec<u32>>,
}

fn spec() -> impl Strategy<Value = Spec> {
    (1u32..=3, 1usize..=6).prop_flat_map(|(nv, n)| {
        let letters = 1usize << nv;
        (
            Just(nv),
            prop::collection::vec(0u8..2, n),
            prop::collection::vec(prop::collection::vec(0..n as u32, letters), n),
        )
            .prop_map(|(num_vars, outputs, succ)| Spec { num_vars, outputs, succ })
    })
}

fn from_table<B: Clone + Eq + std::hash::Hash>(m: &mut Manager<B>, n: u32, leaves: &[NodeId]) -> NodeId {
    fn go<B: Clone + Eq + std::hash::Hash>(m: &mut Manager<B>, v: u32, n: u32, leaves: &[NodeId], mask: usize) -> NodeId {
        if v == n {
            return leaves[mask];
        }
        let lo = go(m, v + 1, n, leaves, mask);
        let hi = go(m, v + 1, n, leaves, mask | (1 << v));
        m.mk_node(VarId(v), lo, hi).unwrap()
    }
    go(m, 0, n, leaves, 0)
}

fn build(s: &Spec) -> TableDfa<u8> {
    let mut m = TableDfa::new(s.num_vars);
    let states: Vec<u32> = s.outputs.iter().map(|&o| m.add_state(o)).collect();
    let leaves: Vec<NodeId> = states.iter().map(|&x| m.leaf(x)).collect();
    for (i, row) in s.succ.iter().enumerate() {
        let ls: Vec<NodeId> = row.iter().map(|&t| leaves[t as usize]).collect();
        let t = from_table(m.bdd_mut(), s.num_vars, &ls);
        m.set_transitions(states[i], t);
    }
    m
}

// Moore refinement: the length of a shortest distinguishing word, if any.
fn distance(s: &Spec, x: usize, y: usize) -> Option<usize> {
    let n = s.outputs.len();
    let mut class: Vec<usize> = s.outputs.iter().map(|&o| o as usize).collect();
    for round in 0..=n {
        if class[x] != class[y] {
            return Some(round);
        }
        let sig: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|i| (class[i], s.succ[i].iter().map(|&t| class[t as usize]).collect()))
            .collect();
        let distinct: BTreeSet<&(usize, Vec<usize>)> = sig.iter().collect();
        let distinct: Vec<_> = distinct.into_iter().collect();
        class = sig.iter().map(|k| distinct.iter().position(|d| *d == k).unwrap()).collect();
    }
    None
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn algorithms_agree_with_refinement(s in spec(), a in 0usize..6, b in 0usize..6) {
        let n = s.outputs.len();
        let (x, y) = ((a % n) as u32, (b % n) as u32);
        let expected = distance(&s, x as usize, y as usize);
        let mut m = build(&s);
        let naive = naive_equiv(&mut m, x, y).unwrap();
        let symb = symb_equiv(&mut m, x, y).unwrap();
        let dsf = dsf_equiv(&mut m, x, y).unwrap();
        for r in [&naive, &symb, &dsf] {
            prop_assert_eq!(r.verdict.holds(), expected.is_none());
        }
        for r in [&naive, &symb] {
            if let Verdict::NotEquivalent { witness, .. } = &r.verdict {
                // breadth-first exploration finds a shortest witness
                prop_assert_eq!(Some(witness.len()), expected);
            }
        }
        for r in [&naive, &symb, &dsf] {
            if let Verdict::NotEquivalent { witness, outputs } = &r.verdict {
                prop_assert!(witness_distinguishes(&mut m, x, y, witness).unwrap());
                prop_assert_ne!(outputs.0, outputs.1);
            }
        }
        if expected.is_none() {
            prop_assert!(is_bisimulation(&mut m, &symb.relation, false).unwrap());
            prop_assert!(is_bisimulation(&mut m, &naive.relation, false).unwrap());
            prop_assert!(is_bisimulation(&mut m, &dsf.relation, true).unwrap());
            prop_assert!(dsf.stats.output_tests <= symb.stats.output_tests);
        }
    }

    #[test]
    fn determinisation_matches_subset_simulation(
        nv in 1u32..=3,
        n in 1usize..=5,
        seed in prop::collection::vec(any::<u8>(), 5 * 8 + 5),
        word in prop::collection::vec(0u64..8, 0..6),
    ) {
        let letters = 1usize << nv;
        let mut nfa = TableNfa::new(nv);
        let states: Vec<u32> = (0..n).map(|i| nfa.add_state(seed[i] & 1 == 1)).collect();
        // successor sets, as bit masks over states
        let succ: Vec<Vec<u32>> = (0..n)
            .map(|i| (0..letters).map(|l| (seed[5 + i * 8 + l] as u32) & ((1 << n) - 1)).collect())
            .collect();
        for i in 0..n {
            let leaves: Vec<NodeId> = succ[i]
                .iter()
                .map(|&mask| {
                    let members: Vec<u32> = (0..n as u32).filter(|j| (mask >> j) & 1 == 1).collect();
                    let set = nfa.space_mut().intern(members);
                    nfa.space_mut().set_node(set)
                })
                .collect();
            let t = from_table(&mut nfa.space_mut().bdd, nv, &leaves);
            nfa.set_transitions(states[i], t);
        }
        let mut d = Determinised::new(nfa);
        let mut cur = d.start(vec![0]);
        let mut explicit: u32 = 1;
        for &l in &word {
            let l = l % letters as u64;
            cur = d.step(cur, &Assignment::from_mask(nv, l)).unwrap();
            explicit = (0..n).filter(|&i| (explicit >> i) & 1 == 1).fold(0, |acc, i| acc | succ[i][l as usize]);
            let members: Vec<u32> = d.members(cur).to_vec();
            let expect: Vec<u32> = (0..n as u32).filter(|j| (explicit >> j) & 1 == 1).collect();
            prop_assert_eq!(members, expect);
        }
        let accepting = (0..n).any(|i| (explicit >> i) & 1 == 1 && seed[i] & 1 == 1);
        prop_assert_eq!(d.output(cur).unwrap(), accepting);
    }

    #[test]
    fn union_find_matches_partition(n in 2usize..30, ops in prop::collection::vec((0usize..30, 0usize..30), 0..60)) {
        let mut uf = UnionFind::new();
        let mut label: Vec<usize> = (0..n).collect();
        for (a, b) in ops {
            let (a, b) = (a % n, b % n);
            let (ra, rb) = (uf.repr(a), uf.repr(b));
            if ra != rb {
                uf.link_by_size(ra, rb);
                let (la, lb) = (label[a], label[b]);
                for l in label.iter_mut() {
                    if *l == la {
                        *l = lb;
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                prop_assert_eq!(uf.same(a, b), label[a] == label[b]);
            }
            let r = uf.find(a);
            let size = label.iter().filter(|&&l| l == label[a]).count();
            prop_assert_eq!(uf.class_size(r) as usize, size);
        }
        // forest stays acyclic: every find terminates at an element without parent
        for (k, _) in uf.linked() {
            prop_assert!(uf.find(k) != k);
        }
    }
}

#[test]
fn union_by_size_keeps_trees_shallow() {
    let mut uf = UnionFind::new();
    for i in 0..1024u32 {
        let (a, b) = (uf.repr(i), uf.repr(i / 2));
        if a != b {
            uf.link_by_size(a, b);
        }
    }
    let depth = |uf: &UnionFind<u32>, mut x: u32| {
        let mut d = 0;
        while uf.find(x) != x {
            let parent = uf.linked().find(|&(k, _)| k == x).unwrap().1;
            x = parent;
            d += 1;
        }
        d
    };
    let deepest = (0..1024).map(|i| depth(&uf, i)).max().unwrap();
    assert!(deepest <= 10, "depth {deepest}");
}
