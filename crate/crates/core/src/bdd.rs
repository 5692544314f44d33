//! Hash-consed, reduced, ordered, multi-terminal binary decision diagrams.
//!
//! A [`Manager`] owns every node built over a fixed universe of variables.
//! Nodes are referred to by [`NodeId`]; two nodes of the same manager denote
//! the same function `2^A -> B` exactly when their identifiers are equal.
//!
//! Leaves carry arbitrary values of type `B`. Leaf values are interned too,
//! so that leaf equality is identifier equality, which lets automata put
//! states, state sets or expressions at the leaves.
//!
//! There are no complement edges and no garbage collection: a node, once
//! interned, keeps its identifier for the lifetime of the manager.

use std::fmt::{self, Write as _};
use std::hash::Hash;

use rustc_hash::FxHashMap;
use thiserror::Error;

/// A decision variable. Variables are ordered by their index; a branch on
/// variable `a` may only have children branching on variables `> a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Canonical identifier of a node inside one [`Manager`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// Identifies an operation for memoisation purposes.
///
/// Two calls sharing a tag must compute the same function of their operands;
/// `param` distinguishes instances of a parametrised operation (for example
/// "multiply every leaf by expression `param`").
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OpTag {
    pub op: u32,
    pub param: u32,
}

impl OpTag {
    pub const fn new(op: u32, param: u32) -> Self {
        OpTag { op, param }
    }
}

// Tags used by the manager itself live at the top of the range.
const TAG_OR: OpTag = OpTag::new(u32::MAX, 0);
const TAG_AND: OpTag = OpTag::new(u32::MAX - 1, 0);
const TAG_NOT: OpTag = OpTag::new(u32::MAX - 2, 0);
const TAG_XOR: OpTag = OpTag::new(u32::MAX - 3, 0);
const OP_GUARD: u32 = u32::MAX - 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Descr {
    Leaf(u32),
    Branch(VarId, NodeId, NodeId),
}

/// Public view of a node's descriptor.
#[derive(Debug, PartialEq, Eq)]
pub enum NodeDescr<'a, B> {
    Leaf(&'a B),
    Branch { var: VarId, lo: NodeId, hi: NodeId },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BddError {
    #[error("variable {var:?} is outside the declared universe of {num_vars} variables")]
    UnknownVariable { var: VarId, num_vars: u32 },
    #[error("cannot branch on {var:?} above a child branching on {child:?}")]
    Ordering { var: VarId, child: VarId },
}

/// A total valuation of the manager's variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Assignment {
    bits: Vec<bool>,
}

impl Assignment {
    pub fn new(bits: Vec<bool>) -> Self {
        Assignment { bits }
    }

    /// Builds the assignment whose variable `i` is bit `i` of `mask`.
    pub fn from_mask(num_vars: u32, mask: u64) -> Self {
        Assignment {
            bits: (0..num_vars).map(|i| (mask >> i) & 1 == 1).collect(),
        }
    }

    pub fn get(&self, var: VarId) -> bool {
        self.bits[var.index()]
    }

    pub fn set(&mut self, var: VarId, value: bool) {
        self.bits[var.index()] = value;
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Enumerates all `2^num_vars` assignments, in mask order.
    pub fn all(num_vars: u32) -> impl Iterator<Item = Assignment> {
        assert!(num_vars < 32, "refusing to enumerate 2^{num_vars} assignments");
        (0..1u64 << num_vars).map(move |m| Assignment::from_mask(num_vars, m))
    }
}

/// Node store, unique tables and memo tables for BDDs with leaves in `B`.
#[derive(Clone)]
pub struct Manager<B> {
    num_vars: u32,
    nodes: Vec<Descr>,
    leaves: Vec<B>,
    leaf_nodes: FxHashMap<B, NodeId>,
    branches: FxHashMap<(VarId, NodeId, NodeId), NodeId>,
    memo: FxHashMap<(OpTag, NodeId, NodeId), NodeId>,
}

impl<B: fmt::Debug> fmt::Debug for Manager<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Manager")
            .field("num_vars", &self.num_vars)
            .field("nodes", &self.nodes.len())
            .field("leaves", &self.leaves.len())
            .finish()
    }
}

impl<B: Clone + Eq + Hash> Manager<B> {
    pub fn new(num_vars: u32) -> Self {
        Manager {
            num_vars,
            nodes: Vec::new(),
            leaves: Vec::new(),
            leaf_nodes: FxHashMap::default(),
            branches: FxHashMap::default(),
            memo: FxHashMap::default(),
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    /// Number of interned nodes (leaves and branches).
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    pub fn clear_memo(&mut self) {
        self.memo.clear();
    }

    /// The leaf holding `value`, created on first use.
    pub fn constant(&mut self, value: B) -> NodeId {
        if let Some(&n) = self.leaf_nodes.get(&value) {
            return n;
        }
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(Descr::Leaf(self.leaves.len() as u32));
        self.leaves.push(value.clone());
        self.leaf_nodes.insert(value, id);
        id
    }

    /// Returns the leaf for `value` if it has already been interned.
    pub fn find_constant(&self, value: &B) -> Option<NodeId> {
        self.leaf_nodes.get(value).copied()
    }

    /// Checked node constructor: returns `lo` when both children coincide.
    pub fn mk_node(&mut self, var: VarId, lo: NodeId, hi: NodeId) -> Result<NodeId, BddError> {
        if var.0 >= self.num_vars {
            return Err(BddError::UnknownVariable {
                var,
                num_vars: self.num_vars,
            });
        }
        for child in [lo, hi] {
            if let Some(cv) = self.top_var(child) {
                if cv <= var {
                    return Err(BddError::Ordering { var, child: cv });
                }
            }
        }
        Ok(self.node(var, lo, hi))
    }

    /// The single-variable test `var ? hi : lo`.
    pub fn literal(&mut self, var: VarId, lo: B, hi: B) -> Result<NodeId, BddError> {
        let lo = self.constant(lo);
        let hi = self.constant(hi);
        self.mk_node(var, lo, hi)
    }

    // Unchecked constructor used by the recursive operations, whose
    // recursion pattern guarantees ordering.
    fn node(&mut self, var: VarId, lo: NodeId, hi: NodeId) -> NodeId {
        if lo == hi {
            return lo;
        }
        debug_assert!(self.top_var(lo).map_or(true, |v| v > var));
        debug_assert!(self.top_var(hi).map_or(true, |v| v > var));
        let key = (var, lo, hi);
        if let Some(&n) = self.branches.get(&key) {
            return n;
        }
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(Descr::Branch(var, lo, hi));
        self.branches.insert(key, id);
        id
    }

    pub fn descr(&self, n: NodeId) -> NodeDescr<'_, B> {
        match self.nodes[n.index()] {
            Descr::Leaf(i) => NodeDescr::Leaf(&self.leaves[i as usize]),
            Descr::Branch(var, lo, hi) => NodeDescr::Branch { var, lo, hi },
        }
    }

    pub fn is_leaf(&self, n: NodeId) -> bool {
        matches!(self.nodes[n.index()], Descr::Leaf(_))
    }

    pub fn leaf_value(&self, n: NodeId) -> Option<&B> {
        match self.nodes[n.index()] {
            Descr::Leaf(i) => Some(&self.leaves[i as usize]),
            Descr::Branch(..) => None,
        }
    }

    /// Decision variable at the root of `n`, `None` for leaves.
    pub fn top_var(&self, n: NodeId) -> Option<VarId> {
        match self.nodes[n.index()] {
            Descr::Leaf(_) => None,
            Descr::Branch(v, _, _) => Some(v),
        }
    }

    pub fn eval(&self, n: NodeId, alpha: &Assignment) -> &B {
        self.eval_with(n, |v| alpha.get(v))
    }

    pub fn eval_with(&self, mut n: NodeId, mut alpha: impl FnMut(VarId) -> bool) -> &B {
        loop {
            match self.nodes[n.index()] {
                Descr::Leaf(i) => return &self.leaves[i as usize],
                Descr::Branch(v, lo, hi) => n = if alpha(v) { hi } else { lo },
            }
        }
    }

    /// Leaf nodes reachable from `n`, in depth-first order without repeats.
    pub fn reachable_leaves(&self, n: NodeId) -> Vec<NodeId> {
        let mut seen = rustc_hash::FxHashSet::default();
        let mut out = Vec::new();
        let mut stack = vec![n];
        while let Some(m) = stack.pop() {
            if !seen.insert(m) {
                continue;
            }
            match self.nodes[m.index()] {
                Descr::Leaf(_) => out.push(m),
                Descr::Branch(_, lo, hi) => {
                    stack.push(hi);
                    stack.push(lo);
                }
            }
        }
        out
    }

    /// Number of distinct nodes reachable from `n` (including `n`).
    pub fn size(&self, n: NodeId) -> usize {
        let mut seen = rustc_hash::FxHashSet::default();
        let mut stack = vec![n];
        while let Some(m) = stack.pop() {
            if seen.insert(m) {
                if let Descr::Branch(_, lo, hi) = self.nodes[m.index()] {
                    stack.push(lo);
                    stack.push(hi);
                }
            }
        }
        seen.len()
    }

    /// A path from `n` to some leaf satisfying `pred`, as the list of
    /// literals met on the way. Variables not on the path are unconstrained.
    pub fn find_path(&self, n: NodeId, mut pred: impl FnMut(&B) -> bool) -> Option<Vec<(VarId, bool)>> {
        fn go<B>(
            m: &Manager<B>,
            n: NodeId,
            pred: &mut dyn FnMut(&B) -> bool,
            path: &mut Vec<(VarId, bool)>,
            dead: &mut rustc_hash::FxHashSet<NodeId>,
        ) -> bool {
            if dead.contains(&n) {
                return false;
            }
            let found = match m.nodes[n.index()] {
                Descr::Leaf(i) => pred(&m.leaves[i as usize]),
                Descr::Branch(v, lo, hi) => {
                    path.push((v, false));
                    if go(m, lo, pred, path, dead) {
                        return true;
                    }
                    path.pop();
                    path.push((v, true));
                    if go(m, hi, pred, path, dead) {
                        return true;
                    }
                    path.pop();
                    false
                }
            };
            if !found {
                dead.insert(n);
            }
            found
        }
        let mut path = Vec::new();
        let mut dead = rustc_hash::FxHashSet::default();
        go(self, n, &mut pred, &mut path, &mut dead).then_some(path)
    }

    /// Pointwise combination of two nodes of this manager:
    /// `eval(apply(f, x, y), a) = f(eval(x, a), eval(y, a))`.
    ///
    /// Results are memoised under `(tag, x, y)`.
    pub fn apply<F>(&mut self, tag: OpTag, x: NodeId, y: NodeId, f: &mut F) -> NodeId
    where
        F: FnMut(&B, &B) -> B,
    {
        if let Some(&r) = self.memo.get(&(tag, x, y)) {
            return r;
        }
        let r = match (self.nodes[x.index()], self.nodes[y.index()]) {
            (Descr::Leaf(i), Descr::Leaf(j)) => {
                let v = f(&self.leaves[i as usize], &self.leaves[j as usize]);
                self.constant(v)
            }
            (Descr::Branch(a, l, r), Descr::Leaf(_)) => {
                let l = self.apply(tag, l, y, f);
                let r = self.apply(tag, r, y, f);
                self.node(a, l, r)
            }
            (Descr::Leaf(_), Descr::Branch(a, l, r)) => {
                let l = self.apply(tag, x, l, f);
                let r = self.apply(tag, x, r, f);
                self.node(a, l, r)
            }
            (Descr::Branch(a, l, r), Descr::Branch(b, l2, r2)) => {
                if a == b {
                    let l = self.apply(tag, l, l2, f);
                    let r = self.apply(tag, r, r2, f);
                    self.node(a, l, r)
                } else if a < b {
                    let l = self.apply(tag, l, y, f);
                    let r = self.apply(tag, r, y, f);
                    self.node(a, l, r)
                } else {
                    let l = self.apply(tag, x, l2, f);
                    let r = self.apply(tag, x, r2, f);
                    self.node(b, l, r)
                }
            }
        };
        self.memo.insert((tag, x, y), r);
        r
    }

    /// Applies `g` to every leaf of `n`, staying in this manager.
    pub fn map_leaves<F>(&mut self, tag: OpTag, n: NodeId, g: &mut F) -> NodeId
    where
        F: FnMut(&B) -> B,
    {
        if let Some(&r) = self.memo.get(&(tag, n, n)) {
            return r;
        }
        let r = match self.nodes[n.index()] {
            Descr::Leaf(i) => {
                let v = g(&self.leaves[i as usize]);
                self.constant(v)
            }
            Descr::Branch(a, l, r) => {
                let l = self.map_leaves(tag, l, g);
                let r = self.map_leaves(tag, r, g);
                self.node(a, l, r)
            }
        };
        self.memo.insert((tag, n, n), r);
        r
    }

    /// Applies `g` to every leaf of `n`, building the result in `out`.
    /// The memo entry lives in `out`; `tag` must therefore also identify
    /// the source manager.
    pub fn map_leaves_into<C, F>(&self, out: &mut Manager<C>, tag: OpTag, n: NodeId, g: &mut F) -> NodeId
    where
        C: Clone + Eq + Hash,
        F: FnMut(&B) -> C,
    {
        if let Some(&r) = out.memo.get(&(tag, n, n)) {
            return r;
        }
        let r = match self.nodes[n.index()] {
            Descr::Leaf(i) => {
                let v = g(&self.leaves[i as usize]);
                out.constant(v)
            }
            Descr::Branch(a, l, r) => {
                let l = self.map_leaves_into(out, tag, l, g);
                let r = self.map_leaves_into(out, tag, r, g);
                out.node(a, l, r)
            }
        };
        out.memo.insert((tag, n, n), r);
        r
    }

    /// `guard(f, n, zero)` evaluates like `n` where the Boolean node `f`
    /// (from `tests`) holds, and like `zero` elsewhere.
    pub fn guard(&mut self, tests: &Manager<bool>, f: NodeId, n: NodeId, zero: NodeId) -> NodeId {
        match tests.nodes[f.index()] {
            Descr::Leaf(i) => {
                if tests.leaves[i as usize] {
                    n
                } else {
                    zero
                }
            }
            Descr::Branch(a, fl, fr) => {
                let tag = OpTag::new(OP_GUARD, zero.0);
                if let Some(&r) = self.memo.get(&(tag, f, n)) {
                    return r;
                }
                let r = match self.nodes[n.index()] {
                    Descr::Branch(b, nl, nr) if b == a => {
                        let l = self.guard(tests, fl, nl, zero);
                        let r = self.guard(tests, fr, nr, zero);
                        self.node(a, l, r)
                    }
                    Descr::Branch(b, nl, nr) if b < a => {
                        let l = self.guard(tests, f, nl, zero);
                        let r = self.guard(tests, f, nr, zero);
                        self.node(b, l, r)
                    }
                    _ => {
                        let l = self.guard(tests, fl, n, zero);
                        let r = self.guard(tests, fr, n, zero);
                        self.node(a, l, r)
                    }
                };
                self.memo.insert((tag, f, n), r);
                r
            }
        }
    }

    /// Walks the whole store and checks ordering, reducedness and the
    /// injectivity of the unique tables.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut leaf_count = 0;
        for (i, d) in self.nodes.iter().enumerate() {
            let id = NodeId(i as u32);
            match *d {
                Descr::Leaf(li) => {
                    leaf_count += 1;
                    let v = &self.leaves[li as usize];
                    if self.leaf_nodes.get(v) != Some(&id) {
                        return Err(format!("leaf {id} not registered under its value"));
                    }
                }
                Descr::Branch(var, lo, hi) => {
                    if var.0 >= self.num_vars {
                        return Err(format!("{id} branches on undeclared {var:?}"));
                    }
                    if lo == hi {
                        return Err(format!("{id} is redundant"));
                    }
                    for c in [lo, hi] {
                        if c.index() >= i {
                            return Err(format!("{id} refers forward to {c}"));
                        }
                        if let Some(cv) = self.top_var(c) {
                            if cv <= var {
                                return Err(format!("{id} on {var:?} has child on {cv:?}"));
                            }
                        }
                    }
                    if self.branches.get(&(var, lo, hi)) != Some(&id) {
                        return Err(format!("{id} is not the unique node for its descriptor"));
                    }
                }
            }
        }
        if leaf_count != self.leaf_nodes.len() || self.nodes.len() - leaf_count != self.branches.len() {
            return Err("unique tables out of sync with the node store".into());
        }
        Ok(())
    }

    /// Graphviz rendering of the nodes reachable from `roots`: square
    /// leaves, dashed edges to the low child and solid edges to the high one.
    pub fn to_dot(&self, roots: &[NodeId], mut var_name: impl FnMut(VarId) -> String, mut leaf_label: impl FnMut(&B) -> String) -> String {
        let mut out = String::from("digraph bdd {\n");
        let mut seen = rustc_hash::FxHashSet::default();
        let mut stack: Vec<NodeId> = roots.to_vec();
        while let Some(n) = stack.pop() {
            if !seen.insert(n) {
                continue;
            }
            match self.nodes[n.index()] {
                Descr::Leaf(i) => {
                    let label = leaf_label(&self.leaves[i as usize]).replace('"', "\\\"");
                    let _ = writeln!(out, "  {n} [shape=box,label=\"{label}\"];");
                }
                Descr::Branch(v, lo, hi) => {
                    let label = var_name(v).replace('"', "\\\"");
                    let _ = writeln!(out, "  {n} [shape=circle,label=\"{label}\"];");
                    let _ = writeln!(out, "  {n} -> {lo} [style=dashed];");
                    let _ = writeln!(out, "  {n} -> {hi};");
                    stack.push(hi);
                    stack.push(lo);
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Boolean BDDs.
impl Manager<bool> {
    pub fn ff(&mut self) -> NodeId {
        self.constant(false)
    }

    pub fn tt(&mut self) -> NodeId {
        self.constant(true)
    }

    pub fn is_false(&self, n: NodeId) -> bool {
        self.leaf_value(n) == Some(&false)
    }

    pub fn is_true(&self, n: NodeId) -> bool {
        self.leaf_value(n) == Some(&true)
    }

    /// The positive literal `var`.
    pub fn var(&mut self, var: VarId) -> Result<NodeId, BddError> {
        self.literal(var, false, true)
    }

    pub fn dsj(&mut self, x: NodeId, y: NodeId) -> NodeId {
        if x == y || self.is_false(y) || self.is_true(x) {
            return x;
        }
        if self.is_false(x) || self.is_true(y) {
            return y;
        }
        self.apply(TAG_OR, x, y, &mut |a, b| *a || *b)
    }

    pub fn cnj(&mut self, x: NodeId, y: NodeId) -> NodeId {
        if x == y || self.is_true(y) || self.is_false(x) {
            return x;
        }
        if self.is_true(x) || self.is_false(y) {
            return y;
        }
        self.apply(TAG_AND, x, y, &mut |a, b| *a && *b)
    }

    pub fn neg(&mut self, x: NodeId) -> NodeId {
        self.map_leaves(TAG_NOT, x, &mut |a| !*a)
    }

    pub fn xor(&mut self, x: NodeId, y: NodeId) -> NodeId {
        self.apply(TAG_XOR, x, y, &mut |a, b| *a != *b)
    }

    /// `x` implies `y` everywhere.
    pub fn implies(&mut self, x: NodeId, y: NodeId) -> bool {
        let ny = self.neg(y);
        let both = self.cnj(x, ny);
        self.is_false(both)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Two-variable example: b1 when a1 holds and a2 does not, b2 otherwise.
    fn example() -> (Manager<&'static str>, NodeId) {
        let mut m = Manager::new(2);
        let b1 = m.constant("b1");
        let b2 = m.constant("b2");
        let inner = m.mk_node(VarId(1), b1, b2).unwrap();
        let top = m.mk_node(VarId(0), b2, inner).unwrap();
        (m, top)
    }

    #[test]
    fn constants_are_interned() {
        let mut m = Manager::new(0);
        assert_eq!(m.constant(7), m.constant(7));
        assert_ne!(m.constant(0), m.constant(1));
    }

    #[test]
    fn mk_node_reduces_and_interns() {
        let mut m = Manager::new(2);
        let z = m.constant(0);
        let o = m.constant(1);
        assert_eq!(m.mk_node(VarId(0), o, o).unwrap(), o);
        let a = m.mk_node(VarId(0), z, o).unwrap();
        assert_eq!(m.mk_node(VarId(0), z, o).unwrap(), a);
        assert_eq!(m.len(), 3);
    }

    #[test]
    fn mk_node_rejects_misordered_children() {
        let mut m = Manager::new(3);
        let z = m.constant(0);
        let o = m.constant(1);
        let b = m.mk_node(VarId(1), z, o).unwrap();
        assert_eq!(
            m.mk_node(VarId(1), z, b),
            Err(BddError::Ordering { var: VarId(1), child: VarId(1) })
        );
        assert_eq!(
            m.mk_node(VarId(2), b, o),
            Err(BddError::Ordering { var: VarId(2), child: VarId(1) })
        );
        assert!(matches!(m.mk_node(VarId(3), z, o), Err(BddError::UnknownVariable { .. })));
        assert!(m.mk_node(VarId(0), z, b).is_ok());
    }

    #[test]
    fn eval_follows_the_assignment() {
        let (m, top) = example();
        let a = |a1, a2| Assignment::new(vec![a1, a2]);
        assert_eq!(*m.eval(top, &a(true, false)), "b1");
        assert_eq!(*m.eval(top, &a(true, true)), "b2");
        assert_eq!(*m.eval(top, &a(false, false)), "b2");
        assert_eq!(*m.eval(top, &a(false, true)), "b2");
    }

    #[test]
    fn eval_of_constant() {
        let mut m = Manager::new(4);
        let c = m.constant("b2");
        for alpha in Assignment::all(4) {
            assert_eq!(*m.eval(c, &alpha), "b2");
        }
    }

    #[test]
    fn disjunction_examples() {
        let mut m = Manager::<bool>::new(2);
        let t = m.tt();
        let a = m.var(VarId(0)).unwrap();
        let b = m.var(VarId(1)).unwrap();
        assert_eq!(m.dsj(t, a), t);
        assert_eq!(m.dsj(a, a), a);
        // a ∨ b = a ? 1 : b
        let expected = {
            let f = m.ff();
            let t = m.tt();
            let bb = m.mk_node(VarId(1), f, t).unwrap();
            m.mk_node(VarId(0), bb, t).unwrap()
        };
        let got = m.apply(OpTag::new(0, 0), a, b, &mut |x, y| *x || *y);
        assert_eq!(got, expected);
        assert_eq!(m.dsj(a, b), expected);
    }

    #[test]
    fn boolean_laws() {
        let mut m = Manager::<bool>::new(3);
        let a = m.var(VarId(0)).unwrap();
        let c = m.var(VarId(2)).unwrap();
        let phi = m.xor(a, c);
        let nphi = m.neg(phi);
        let t = m.tt();
        let f = m.ff();
        assert_eq!(m.dsj(phi, nphi), t);
        assert_eq!(m.cnj(f, phi), f);
        assert_eq!(m.neg(nphi), phi);
        assert!(m.implies(f, phi));
        assert!(!m.implies(phi, a));
    }

    #[test]
    fn guard_examples() {
        let mut tests = Manager::<bool>::new(1);
        let t = tests.tt();
        let f = tests.ff();
        let a = tests.var(VarId(0)).unwrap();
        let mut m = Manager::<&str>::new(1);
        let x = m.constant("x");
        let z = m.constant("zero");
        assert_eq!(m.guard(&tests, t, x, z), x);
        assert_eq!(m.guard(&tests, f, x, z), z);
        let g = m.guard(&tests, a, x, z);
        assert_eq!(m.descr(g), NodeDescr::Branch { var: VarId(0), lo: z, hi: x });
    }

    #[test]
    fn map_leaves_into_other_manager() {
        let (m, top) = example();
        let mut out = Manager::<usize>::new(2);
        let lens = m.map_leaves_into(&mut out, OpTag::new(0, 0), top, &mut |s| s.len());
        // both leaves have length 2, so the result collapses to a constant
        assert_eq!(out.leaf_value(lens), Some(&2));
        out.check_invariants().unwrap();
    }

    #[test]
    fn find_path_reaches_matching_leaf() {
        let (m, top) = example();
        let p = m.find_path(top, |v| *v == "b1").unwrap();
        assert_eq!(p, vec![(VarId(0), true), (VarId(1), false)]);
        assert!(m.find_path(top, |v| *v == "b3").is_none());
    }

    #[test]
    fn dot_uses_boxes_and_dashed_edges() {
        let (m, top) = example();
        let dot = m.to_dot(&[top], |v| format!("a{}", v.0 + 1), |b| b.to_string());
        assert!(dot.contains("shape=box,label=\"b1\""));
        assert!(dot.contains("style=dashed"));
        assert!(dot.contains("label=\"a2\""));
    }
}
