//! Small hand-built automata used throughout the tests and by the CLI's
//! self-check.

use crate::automata::TableDfa;
use crate::bdd::{Manager, NodeId, VarId};

const A: VarId = VarId(0);
const B: VarId = VarId(1);
const C: VarId = VarId(2);

/// Five states over `2^{a,b,c}`. `s1`, `s2` and `s3` share one transition
/// BDD, `s4` and `s5` share another:
///
/// ```text
///        abc: 000 001 010 011 100 101 110 111
/// s1,s2,s3:   s1  s2  s3  s3  s2  s2  s3  s3
///    s4,s5:   s4  s4  s5  s5  s4  s4  s5  s5
/// ```
///
/// Outputs are `0` for `s1`, `s2`, `s4` and `1` for `s3`, `s5`, so that
/// `s1` and `s4` are equivalent. Returned states are `[s1, .., s5]`.
pub fn five_states() -> (TableDfa<u32>, [u32; 5]) {
    let mut m = TableDfa::new(3);
    let s: Vec<u32> = [0, 0, 1, 0, 1].iter().map(|&o| m.add_state(o)).collect();
    let l: Vec<NodeId> = s.iter().map(|&x| m.leaf(x)).collect();
    let bdd = m.bdd_mut();
    let c_node = bdd.mk_node(C, l[0], l[1]).unwrap();
    let n_lo = bdd.mk_node(B, c_node, l[2]).unwrap();
    let n_hi = bdd.mk_node(B, l[1], l[2]).unwrap();
    let n = bdd.mk_node(A, n_lo, n_hi).unwrap();
    let mm = bdd.mk_node(B, l[3], l[4]).unwrap();
    for &x in &s[..3] {
        m.set_transitions(x, n);
    }
    for &x in &s[3..] {
        m.set_transitions(x, mm);
    }
    (m, [s[0], s[1], s[2], s[3], s[4]])
}

/// The two transition nodes `(n, m)` of [`five_states`], for `s1` and `s4`.
pub fn five_state_nodes(m: &mut TableDfa<u32>, s: [u32; 5]) -> (NodeId, NodeId) {
    use crate::automata::SymbolicDfa;
    (m.transitions(s[0]).unwrap(), m.transitions(s[3]).unwrap())
}

/// Five states over `2^{a,b,c}` where `s1` and `s2` differ only on words of
/// three letters all satisfying `a`: with `a`, `s_i` moves to `s_{i+1}`
/// (`s5` loops); without `a`, a state stays put on `b` and falls back to
/// `s1` otherwise. Only `s5` has output `1`.
pub fn chain_counterexample() -> (TableDfa<u32>, [u32; 5]) {
    let mut m = TableDfa::new(3);
    let s: Vec<u32> = [0, 0, 0, 0, 1].iter().map(|&o| m.add_state(o)).collect();
    let l: Vec<NodeId> = s.iter().map(|&x| m.leaf(x)).collect();
    for i in 0..5 {
        let next = l[(i + 1).min(4)];
        let bdd = m.bdd_mut();
        let stay = bdd.mk_node(B, l[0], l[i]).unwrap();
        let t = bdd.mk_node(A, stay, next).unwrap();
        m.set_transitions(s[i], t);
    }
    (m, [s[0], s[1], s[2], s[3], s[4]])
}

/// Two nodes over three leaves where exploring pairs naively meets
/// `(s1,s2)`, `(s2,s3)` and `(s1,s3)`, the last being implied by the first
/// two up to equivalence.
pub fn transitive_nodes() -> (Manager<u32>, NodeId, NodeId) {
    let mut bdd = Manager::new(2);
    let l: Vec<NodeId> = (0..3).map(|i| bdd.constant(i)).collect();
    let x_lo = bdd.mk_node(B, l[0], l[1]).unwrap();
    let y_lo = bdd.mk_node(B, l[1], l[2]).unwrap();
    let n1 = bdd.mk_node(A, x_lo, l[0]).unwrap();
    let m1 = bdd.mk_node(A, y_lo, l[2]).unwrap();
    (bdd, n1, m1)
}
