//! Symbolic automata: transition functions are BDDs over the alphabet
//! `2^A`, with states (or sets of states) at the leaves.
//!
//! [`SymbolicDfa`] is what the equivalence algorithms consume. Symbolic
//! NFAs are turned into DFAs lazily through [`Determinised`], which computes
//! the powerset transitions of a state set only when asked for them.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::hash::Hash;

use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

use crate::bdd::{Assignment, Manager, NodeId, OpTag};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("state limit of {cap} exceeded; the automaton is larger than expected (is normalisation strong enough?)")]
    StateCapExceeded { cap: usize },
}

/// A deterministic automaton with symbolic transitions and outputs in
/// `Self::Output`. Transition BDDs live in [`SymbolicDfa::bdd`] and have
/// states at their leaves.
pub trait SymbolicDfa {
    type State: Copy + Eq + Hash + fmt::Debug;
    type Output: Clone + Eq + fmt::Debug;

    fn bdd(&self) -> &Manager<Self::State>;
    fn transitions(&mut self, s: Self::State) -> Result<NodeId, AutomatonError>;
    fn output(&mut self, s: Self::State) -> Result<Self::Output, AutomatonError>;
    /// The BDD leaf standing for `s`.
    fn state_leaf(&mut self, s: Self::State) -> NodeId;

    fn num_vars(&self) -> u32 {
        self.bdd().num_vars()
    }

    /// Successor of `s` along the concrete letter `alpha`.
    fn step(&mut self, s: Self::State, alpha: &Assignment) -> Result<Self::State, AutomatonError> {
        let t = self.transitions(s)?;
        Ok(*self.bdd().eval(t, alpha))
    }
}

/// Bounded language of `x`: the output reached by every word of at most
/// `k` letters, letters being written as variable masks. Only usable for
/// small alphabets; meant as a test oracle.
pub fn dfa_language_upto<M: SymbolicDfa>(
    m: &mut M,
    x: M::State,
    k: usize,
) -> Result<BTreeMap<Vec<u64>, M::Output>, AutomatonError> {
    let nv = m.num_vars();
    let mut table = BTreeMap::new();
    let mut frontier = vec![(Vec::new(), x)];
    for depth in 0..=k {
        let mut next = Vec::new();
        for (w, s) in frontier {
            table.insert(w.clone(), m.output(s)?);
            if depth < k {
                for mask in 0..1u64 << nv {
                    let s2 = m.step(s, &Assignment::from_mask(nv, mask))?;
                    let mut w2 = w.clone();
                    w2.push(mask);
                    next.push((w2, s2));
                }
            }
        }
        frontier = next;
    }
    Ok(table)
}

/// States reachable from `start`, in breadth-first order.
pub fn reachable<M: SymbolicDfa>(m: &mut M, start: &[M::State]) -> Result<Vec<M::State>, AutomatonError> {
    let mut seen: FxHashSet<M::State> = start.iter().copied().collect();
    let mut order: Vec<M::State> = Vec::new();
    let mut queue: VecDeque<M::State> = start.iter().copied().collect();
    while let Some(s) = queue.pop_front() {
        order.push(s);
        let t = m.transitions(s)?;
        for leaf in m.bdd().reachable_leaves(t) {
            let s2 = *m.bdd().leaf_value(leaf).expect("leaf");
            if seen.insert(s2) {
                queue.push_back(s2);
            }
        }
    }
    Ok(order)
}

/// Graphviz dump of the fragment reachable from `start`: one shared
/// transition BDD, each state drawn as a leaf box with its output.
pub fn dfa_to_dot<M: SymbolicDfa>(
    m: &mut M,
    start: &[M::State],
    mut state_label: impl FnMut(M::State, &M::Output) -> String,
) -> Result<String, AutomatonError> {
    let states = reachable(m, start)?;
    let mut roots = Vec::new();
    let mut labels = FxHashMap::default();
    for &s in &states {
        roots.push(m.transitions(s)?);
        let o = m.output(s)?;
        labels.insert(s, state_label(s, &o));
    }
    Ok(m.bdd().to_dot(&roots, |v| format!("x{}", v.0), |s| {
        labels.get(s).cloned().unwrap_or_else(|| format!("{s:?}"))
    }))
}

/// A symbolic DFA given by an explicit list of states.
#[derive(Clone, Debug)]
pub struct TableDfa<O> {
    bdd: Manager<u32>,
    trans: Vec<Option<NodeId>>,
    outs: Vec<O>,
}

impl<O: Clone + Eq + fmt::Debug> TableDfa<O> {
    pub fn new(num_vars: u32) -> Self {
        TableDfa {
            bdd: Manager::new(num_vars),
            trans: Vec::new(),
            outs: Vec::new(),
        }
    }

    pub fn add_state(&mut self, output: O) -> u32 {
        self.outs.push(output);
        self.trans.push(None);
        (self.outs.len() - 1) as u32
    }

    pub fn num_states(&self) -> usize {
        self.outs.len()
    }

    /// The BDD leaf standing for state `s`.
    pub fn leaf(&mut self, s: u32) -> NodeId {
        self.bdd.constant(s)
    }

    pub fn bdd_mut(&mut self) -> &mut Manager<u32> {
        &mut self.bdd
    }

    pub fn set_transitions(&mut self, s: u32, t: NodeId) {
        self.trans[s as usize] = Some(t);
    }
}

impl<O: Clone + Eq + fmt::Debug> SymbolicDfa for TableDfa<O> {
    type State = u32;
    type Output = O;

    fn bdd(&self) -> &Manager<u32> {
        &self.bdd
    }

    fn transitions(&mut self, s: u32) -> Result<NodeId, AutomatonError> {
        Ok(self.trans[s as usize].expect("state without transitions"))
    }

    fn output(&mut self, s: u32) -> Result<O, AutomatonError> {
        Ok(self.outs[s as usize].clone())
    }

    fn state_leaf(&mut self, s: u32) -> NodeId {
        self.bdd.constant(s)
    }
}

/// Interned identifier of a finite set of states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetId(u32);

const TAG_UNION: OpTag = OpTag::new(1 << 20, 0);

/// Interned state sets together with the BDD manager whose leaves they are.
#[derive(Clone, Debug)]
pub struct SetSpace<S> {
    pub bdd: Manager<SetId>,
    sets: Vec<Box<[S]>>,
    index: FxHashMap<Box<[S]>, SetId>,
}

fn intern_set<S: Copy + Ord + Hash>(
    sets: &mut Vec<Box<[S]>>,
    index: &mut FxHashMap<Box<[S]>, SetId>,
    members: Box<[S]>,
) -> SetId {
    debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
    if let Some(&id) = index.get(&members) {
        return id;
    }
    let id = SetId(sets.len() as u32);
    sets.push(members.clone());
    index.insert(members, id);
    id
}

fn merge_sorted<S: Copy + Ord>(a: &[S], b: &[S]) -> Box<[S]> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out.into_boxed_slice()
}

impl<S: Copy + Ord + Hash> SetSpace<S> {
    pub fn new(num_vars: u32) -> Self {
        let mut sets = Vec::new();
        let mut index = FxHashMap::default();
        intern_set(&mut sets, &mut index, Box::new([]));
        SetSpace {
            bdd: Manager::new(num_vars),
            sets,
            index,
        }
    }

    pub fn empty(&self) -> SetId {
        SetId(0)
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn intern(&mut self, mut members: Vec<S>) -> SetId {
        members.sort_unstable();
        members.dedup();
        intern_set(&mut self.sets, &mut self.index, members.into_boxed_slice())
    }

    pub fn singleton(&mut self, s: S) -> SetId {
        intern_set(&mut self.sets, &mut self.index, Box::new([s]))
    }

    pub fn members(&self, id: SetId) -> &[S] {
        &self.sets[id.0 as usize]
    }

    pub fn union_sets(&mut self, a: SetId, b: SetId) -> SetId {
        if a == b || b == self.empty() {
            return a;
        }
        if a == self.empty() {
            return b;
        }
        let merged = merge_sorted(&self.sets[a.0 as usize], &self.sets[b.0 as usize]);
        intern_set(&mut self.sets, &mut self.index, merged)
    }

    /// Leaf holding the empty set.
    pub fn empty_node(&mut self) -> NodeId {
        self.bdd.constant(SetId(0))
    }

    pub fn set_node(&mut self, id: SetId) -> NodeId {
        self.bdd.constant(id)
    }

    /// Pointwise union of two set-valued BDDs.
    pub fn union(&mut self, n: NodeId, m: NodeId) -> NodeId {
        let empty = self.empty_node();
        if n == m || m == empty {
            return n;
        }
        if n == empty {
            return m;
        }
        let SetSpace { bdd, sets, index } = self;
        bdd.apply(TAG_UNION, n, m, &mut |a: &SetId, b: &SetId| {
            if a == b || b.0 == 0 {
                return *a;
            }
            if a.0 == 0 {
                return *b;
            }
            let merged = merge_sorted(&sets[a.0 as usize], &sets[b.0 as usize]);
            intern_set(sets, index, merged)
        })
    }

    /// Maps every member of every leaf set through `g`, re-interning the
    /// resulting sets. `tag` must identify `g`.
    pub fn map_members(&mut self, tag: OpTag, n: NodeId, g: &mut impl FnMut(S) -> S) -> NodeId {
        let SetSpace { bdd, sets, index } = self;
        bdd.map_leaves(tag, n, &mut |a: &SetId| {
            let mut v: Vec<S> = sets[a.0 as usize].iter().map(|&s| g(s)).collect();
            v.sort_unstable();
            v.dedup();
            intern_set(sets, index, v.into_boxed_slice())
        })
    }
}

/// A non-deterministic automaton whose transitions are set-valued BDDs.
/// Outputs must form a join semilattice.
pub trait SymbolicNfa {
    type State: Copy + Ord + Hash + fmt::Debug;
    type Output: Clone + Eq + fmt::Debug;

    fn space(&self) -> &SetSpace<Self::State>;
    fn space_mut(&mut self) -> &mut SetSpace<Self::State>;
    /// Set-valued transition BDD of `s`, in `space().bdd`.
    fn transitions(&mut self, s: Self::State) -> Result<NodeId, AutomatonError>;
    fn output(&mut self, s: Self::State) -> Result<Self::Output, AutomatonError>;
    fn join(&mut self, a: &Self::Output, b: &Self::Output) -> Self::Output;
    fn join_unit(&mut self) -> Self::Output;
}

/// On-the-fly powerset construction. States are interned sets of NFA
/// states; transitions and outputs are computed on demand and cached.
#[derive(Debug)]
pub struct Determinised<N: SymbolicNfa> {
    nfa: N,
    trans: FxHashMap<SetId, NodeId>,
    outs: FxHashMap<SetId, N::Output>,
    cap: Option<usize>,
}

impl<N: SymbolicNfa> Determinised<N> {
    pub fn new(nfa: N) -> Self {
        Determinised {
            nfa,
            trans: FxHashMap::default(),
            outs: FxHashMap::default(),
            cap: None,
        }
    }

    /// Fails once more than `cap` state sets have been expanded.
    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = Some(cap);
        self
    }

    pub fn nfa(&self) -> &N {
        &self.nfa
    }

    pub fn nfa_mut(&mut self) -> &mut N {
        &mut self.nfa
    }

    pub fn into_inner(self) -> N {
        self.nfa
    }

    pub fn start(&mut self, states: Vec<N::State>) -> SetId {
        self.nfa.space_mut().intern(states)
    }

    pub fn members(&self, s: SetId) -> &[N::State] {
        self.nfa.space().members(s)
    }

    /// Number of state sets whose transitions have been computed.
    pub fn expanded(&self) -> usize {
        self.trans.len()
    }
}

impl<N: SymbolicNfa> SymbolicDfa for Determinised<N> {
    type State = SetId;
    type Output = N::Output;

    fn bdd(&self) -> &Manager<SetId> {
        &self.nfa.space().bdd
    }

    fn transitions(&mut self, s: SetId) -> Result<NodeId, AutomatonError> {
        if let Some(&t) = self.trans.get(&s) {
            return Ok(t);
        }
        if let Some(cap) = self.cap {
            if self.trans.len() >= cap {
                return Err(AutomatonError::StateCapExceeded { cap });
            }
        }
        let members = self.nfa.space().members(s).to_vec();
        let mut acc = self.nfa.space_mut().empty_node();
        for x in members {
            let t = self.nfa.transitions(x)?;
            acc = self.nfa.space_mut().union(acc, t);
        }
        self.trans.insert(s, acc);
        Ok(acc)
    }

    fn output(&mut self, s: SetId) -> Result<N::Output, AutomatonError> {
        if let Some(o) = self.outs.get(&s) {
            return Ok(o.clone());
        }
        let members = self.nfa.space().members(s).to_vec();
        let mut acc = self.nfa.join_unit();
        for x in members {
            let o = self.nfa.output(x)?;
            acc = self.nfa.join(&acc, &o);
        }
        self.outs.insert(s, acc.clone());
        Ok(acc)
    }

    fn state_leaf(&mut self, s: SetId) -> NodeId {
        self.nfa.space_mut().set_node(s)
    }
}

/// A symbolic NFA with Boolean outputs, given by an explicit state list.
#[derive(Clone, Debug)]
pub struct TableNfa {
    space: SetSpace<u32>,
    trans: Vec<Option<NodeId>>,
    accepting: Vec<bool>,
}

impl TableNfa {
    pub fn new(num_vars: u32) -> Self {
        TableNfa {
            space: SetSpace::new(num_vars),
            trans: Vec::new(),
            accepting: Vec::new(),
        }
    }

    pub fn add_state(&mut self, accepting: bool) -> u32 {
        self.accepting.push(accepting);
        self.trans.push(None);
        (self.accepting.len() - 1) as u32
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn set_transitions(&mut self, s: u32, t: NodeId) {
        self.trans[s as usize] = Some(t);
    }

    pub fn is_accepting(&self, s: u32) -> bool {
        self.accepting[s as usize]
    }
}

impl SymbolicNfa for TableNfa {
    type State = u32;
    type Output = bool;

    fn space(&self) -> &SetSpace<u32> {
        &self.space
    }

    fn space_mut(&mut self) -> &mut SetSpace<u32> {
        &mut self.space
    }

    fn transitions(&mut self, s: u32) -> Result<NodeId, AutomatonError> {
        Ok(match self.trans[s as usize] {
            Some(t) => t,
            None => self.space.empty_node(),
        })
    }

    fn output(&mut self, s: u32) -> Result<bool, AutomatonError> {
        Ok(self.accepting[s as usize])
    }

    fn join(&mut self, a: &bool, b: &bool) -> bool {
        *a || *b
    }

    fn join_unit(&mut self) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bdd::VarId;
    use crate::fixtures::five_states;

    #[test]
    fn five_states_language_table() {
        let (mut m, s) = five_states();
        let table = dfa_language_upto(&mut m, s[0], 1).unwrap();
        assert_eq!(table[&vec![]], m.output(s[0]).unwrap());
        // letters are written a b c, a being bit 0 of the mask
        let letter = |a: u64, b: u64, c: u64| a | (b << 1) | (c << 2);
        assert_eq!(m.step(s[0], &Assignment::from_mask(3, letter(0, 1, 0))).unwrap(), s[2]);
        assert_eq!(m.step(s[3], &Assignment::from_mask(3, letter(0, 0, 1))).unwrap(), s[3]);
        assert_eq!(m.step(s[0], &Assignment::from_mask(3, letter(0, 0, 0))).unwrap(), s[0]);
        assert_eq!(m.step(s[1], &Assignment::from_mask(3, letter(1, 0, 1))).unwrap(), s[1]);
        assert_eq!(m.step(s[4], &Assignment::from_mask(3, letter(1, 1, 0))).unwrap(), s[4]);
    }

    #[test]
    fn union_laws() {
        let mut sp = SetSpace::<u32>::new(2);
        let x = sp.singleton(1);
        let y = sp.singleton(2);
        let xy = sp.intern(vec![2, 1, 2]);
        let nx = sp.set_node(x);
        let ny = sp.set_node(y);
        let e = sp.empty_node();
        assert_eq!(sp.union(nx, e), nx);
        assert_eq!(sp.union(nx, nx), nx);
        let u = sp.union(nx, ny);
        assert_eq!(sp.bdd.leaf_value(u), Some(&xy));
        assert_eq!(sp.members(xy), &[1, 2]);

        let branch = sp.bdd.mk_node(VarId(0), nx, ny).unwrap();
        let u = sp.union(branch, e);
        assert_eq!(u, branch);
    }

    #[test]
    fn determinised_basics() {
        let mut n = TableNfa::new(1);
        let a = n.add_state(true);
        let b = n.add_state(false);
        let sa = n.space_mut().singleton(a);
        let sb = n.space_mut().singleton(b);
        let la = n.space_mut().set_node(sa);
        let lb = n.space_mut().set_node(sb);
        let t = n.space_mut().bdd.mk_node(VarId(0), la, lb).unwrap();
        n.set_transitions(a, t);
        let mut d = Determinised::new(n);
        let empty = d.start(vec![]);
        let t_empty = d.transitions(empty).unwrap();
        assert_eq!(d.bdd().leaf_value(t_empty), Some(&empty));
        assert!(!d.output(empty).unwrap());
        let start = d.start(vec![a]);
        assert!(d.output(start).unwrap());
        let both = d.start(vec![a, b]);
        assert!(d.output(both).unwrap());
        assert_eq!(d.transitions(both).unwrap(), t);
        assert_eq!(d.expanded(), 2);
    }

    #[test]
    fn cap_is_enforced() {
        let n = TableNfa::new(0);
        let mut d = Determinised::new(n).with_cap(0);
        let s = d.start(vec![]);
        assert_eq!(d.transitions(s), Err(AutomatonError::StateCapExceeded { cap: 0 }));
    }

    #[test]
    fn dot_dump_lists_every_state() {
        let (mut m, s) = five_states();
        let dot = dfa_to_dot(&mut m, &[s[0], s[3]], |x, o| format!("s{} / {o}", x + 1)).unwrap();
        for i in 1..=5 {
            assert!(dot.contains(&format!("label=\"s{i} / ")), "{dot}");
        }
    }
}
