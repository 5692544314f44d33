//! Symbolic automata for KAT expressions.
//!
//! All three constructions work over the variables `A ⊎ Σ'` of the
//! expressions' [`Signature`]: reading a letter means reading an atom and
//! the binary code of a letter at once.
//!
//! * [`Brzozowski`]: a DFA whose states are expressions, via symbolic
//!   derivatives;
//! * [`Antimirov`]: an NFA whose states are expressions, via symbolic
//!   partial derivatives;
//! * [`IlieYu`]: an NFA obtained from a Thompson-like automaton with
//!   test-labelled epsilon transitions ([`EpsNfa`]), after star
//!   normalisation and epsilon elimination.
//!
//! Outputs are Boolean BDD nodes over the tests: the set of atoms `α` such
//! that the state accepts the guarded string `α`.

use std::collections::BTreeSet;

use rustc_hash::FxHashMap;

use crate::automata::{AutomatonError, Determinised, SetId, SetSpace, SymbolicDfa, SymbolicNfa};
use crate::bdd::{Manager, NodeId, OpTag};
use crate::kat::{ExprId, Kat, SExpr, Signature};

const TAG_PLUS: OpTag = OpTag::new(1, 0);
const OP_DOT: u32 = 2;

fn tag_dot(y: ExprId) -> OpTag {
    OpTag::new(OP_DOT, y.index() as u32)
}

/// The node mapping the code of letter `p` to `hit` and every other code,
/// used or not, to `miss`.
pub fn letter_node<B: Clone + Eq + std::hash::Hash>(
    bdd: &mut Manager<B>,
    sig: &Signature,
    p: u32,
    hit: NodeId,
    miss: NodeId,
) -> NodeId {
    let mut n = hit;
    for j in (0..sig.code_bits()).rev() {
        let v = sig.code_var(j);
        n = if (p >> j) & 1 == 1 {
            bdd.mk_node(v, miss, n)
        } else {
            bdd.mk_node(v, n, miss)
        }
        .expect("code variables come after tests and in order");
    }
    n
}

/// Which construction to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Brz,
    Ant,
    Iy,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Brz, Method::Ant, Method::Iy];

    pub fn name(self) -> &'static str {
        match self {
            Method::Brz => "brz",
            Method::Ant => "ant",
            Method::Iy => "iy",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "brz" => Ok(Method::Brz),
            "ant" => Ok(Method::Ant),
            "iy" => Ok(Method::Iy),
            _ => Err(format!("unknown construction `{s}` (expected brz, ant or iy)")),
        }
    }
}

/// Deterministic automaton of symbolic derivatives. The transition node of
/// `x` is `δ̂(x)`, whose leaves are expressions.
#[derive(Debug)]
pub struct Brzozowski {
    pub kat: Kat,
    bdd: Manager<ExprId>,
    delta: FxHashMap<ExprId, NodeId>,
    cap: Option<usize>,
    expanded: usize,
}

impl Brzozowski {
    pub fn new(kat: Kat) -> Self {
        let bdd = Manager::new(kat.signature().num_vars());
        Brzozowski {
            kat,
            bdd,
            delta: FxHashMap::default(),
            cap: None,
            expanded: 0,
        }
    }

    /// Fails once more than `cap` states have been expanded.
    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = Some(cap);
        self
    }

    /// States whose transitions have been computed by a caller.
    pub fn expanded(&self) -> usize {
        self.expanded
    }

    pub fn manager(&self) -> &Manager<ExprId> {
        &self.bdd
    }

    fn plus(&mut self, n: NodeId, m: NodeId) -> NodeId {
        let Brzozowski { kat, bdd, .. } = self;
        bdd.apply(TAG_PLUS, n, m, &mut |a, b| kat.sum(*a, *b))
    }

    fn dot(&mut self, n: NodeId, y: ExprId) -> NodeId {
        let Brzozowski { kat, bdd, .. } = self;
        bdd.map_leaves(tag_dot(y), n, &mut |e| kat.prod(*e, y))
    }

    /// `δ̂(x)`.
    pub fn derivative(&mut self, x: ExprId) -> NodeId {
        if let Some(&n) = self.delta.get(&x) {
            return n;
        }
        let zero = self.kat.zero();
        let n = match self.kat.get(x).clone() {
            SExpr::Test(_) => self.bdd.constant(zero),
            SExpr::Letter(p) => {
                let hit = self.bdd.constant(self.kat.one());
                let miss = self.bdd.constant(zero);
                letter_node(&mut self.bdd, self.kat.signature(), p, hit, miss)
            }
            SExpr::Sum(xs) => {
                let mut acc = self.bdd.constant(zero);
                for y in xs.iter() {
                    let d = self.derivative(*y);
                    acc = self.plus(acc, d);
                }
                acc
            }
            SExpr::Prod(a, b) => {
                let da = self.derivative(a);
                let left = self.dot(da, b);
                let ea = self.kat.eps_hat(a);
                if self.kat.tests.is_false(ea) {
                    left
                } else {
                    let db = self.derivative(b);
                    let z = self.bdd.constant(zero);
                    let right = self.bdd.guard(&self.kat.tests, ea, db, z);
                    self.plus(left, right)
                }
            }
            SExpr::Star(a) => {
                let da = self.derivative(a);
                self.dot(da, x)
            }
        };
        self.delta.insert(x, n);
        n
    }
}

impl SymbolicDfa for Brzozowski {
    type State = ExprId;
    type Output = NodeId;

    fn bdd(&self) -> &Manager<ExprId> {
        &self.bdd
    }

    fn transitions(&mut self, s: ExprId) -> Result<NodeId, AutomatonError> {
        if !self.delta.contains_key(&s) {
            if let Some(cap) = self.cap {
                if self.expanded >= cap {
                    return Err(AutomatonError::StateCapExceeded { cap });
                }
            }
            self.expanded += 1;
        }
        Ok(self.derivative(s))
    }

    fn output(&mut self, s: ExprId) -> Result<NodeId, AutomatonError> {
        Ok(self.kat.eps_hat(s))
    }

    fn state_leaf(&mut self, s: ExprId) -> NodeId {
        self.bdd.constant(s)
    }
}

/// Non-deterministic automaton of symbolic partial derivatives. The
/// transition node of `x` is `δ̂'(x)`, whose leaves are sets of expressions.
#[derive(Debug)]
pub struct Antimirov {
    pub kat: Kat,
    space: SetSpace<ExprId>,
    delta: FxHashMap<ExprId, NodeId>,
}

impl Antimirov {
    pub fn new(kat: Kat) -> Self {
        let space = SetSpace::new(kat.signature().num_vars());
        Antimirov {
            kat,
            space,
            delta: FxHashMap::default(),
        }
    }

    /// Determinised automaton, started from `{x}` and `{y}`.
    pub fn determinise(kat: Kat, x: ExprId, y: ExprId) -> (Determinised<Antimirov>, SetId, SetId) {
        let mut d = Determinised::new(Antimirov::new(kat));
        let sx = d.start(vec![x]);
        let sy = d.start(vec![y]);
        (d, sx, sy)
    }

    /// `δ̂'(x)`.
    pub fn partial_derivative(&mut self, x: ExprId) -> NodeId {
        if let Some(&n) = self.delta.get(&x) {
            return n;
        }
        let n = match self.kat.get(x).clone() {
            SExpr::Test(_) => self.space.empty_node(),
            SExpr::Letter(p) => {
                let one = self.space.singleton(self.kat.one());
                let hit = self.space.set_node(one);
                let miss = self.space.empty_node();
                letter_node(&mut self.space.bdd, self.kat.signature(), p, hit, miss)
            }
            SExpr::Sum(xs) => {
                let mut acc = self.space.empty_node();
                for y in xs.iter() {
                    let d = self.partial_derivative(*y);
                    acc = self.space.union(acc, d);
                }
                acc
            }
            SExpr::Prod(a, b) => {
                let da = self.partial_derivative(a);
                let left = self.dot(da, b);
                let ea = self.kat.eps_hat(a);
                if self.kat.tests.is_false(ea) {
                    left
                } else {
                    let db = self.partial_derivative(b);
                    let empty = self.space.empty_node();
                    let right = self.space.bdd.guard(&self.kat.tests, ea, db, empty);
                    self.space.union(left, right)
                }
            }
            SExpr::Star(a) => {
                let da = self.partial_derivative(a);
                self.dot(da, x)
            }
        };
        self.delta.insert(x, n);
        n
    }

    fn dot(&mut self, n: NodeId, y: ExprId) -> NodeId {
        let Antimirov { kat, space, .. } = self;
        space.map_members(tag_dot(y), n, &mut |e| kat.prod(e, y))
    }
}

impl SymbolicNfa for Antimirov {
    type State = ExprId;
    type Output = NodeId;

    fn space(&self) -> &SetSpace<ExprId> {
        &self.space
    }

    fn space_mut(&mut self) -> &mut SetSpace<ExprId> {
        &mut self.space
    }

    fn transitions(&mut self, s: ExprId) -> Result<NodeId, AutomatonError> {
        Ok(self.partial_derivative(s))
    }

    fn output(&mut self, s: ExprId) -> Result<NodeId, AutomatonError> {
        Ok(self.kat.eps_hat(s))
    }

    fn join(&mut self, a: &NodeId, b: &NodeId) -> NodeId {
        self.kat.tests.dsj(*a, *b)
    }

    fn join_unit(&mut self) -> NodeId {
        self.kat.tests.ff()
    }
}

/// A matricial automaton `⟨n, u, J, N, v⟩`: `J[i][j]` is the test guarding
/// the epsilon transition from `i` to `j`, `N[i][j]` the letters labelling
/// transitions from `i` to `j`.
#[derive(Clone, Debug)]
pub struct EpsNfa {
    pub n: usize,
    pub initial: Vec<bool>,
    pub eps: Vec<Vec<NodeId>>,
    pub letters: Vec<Vec<BTreeSet<u32>>>,
    pub accepting: Vec<bool>,
}

impl EpsNfa {
    fn with_states(n: usize, ff: NodeId) -> Self {
        EpsNfa {
            n,
            initial: vec![false; n],
            eps: vec![vec![ff; n]; n],
            letters: vec![vec![BTreeSet::new(); n]; n],
            accepting: vec![false; n],
        }
    }

    /// The Ilie–Yu automaton of `x`, after star normalisation. State `0` is
    /// the only initial state and state `1` the only accepting one.
    pub fn ilie_yu(kat: &mut Kat, x: ExprId) -> Self {
        let x = kat.star_normalise(x);
        let mut eps = FxHashMap::default();
        let mut letters: FxHashMap<(usize, usize), BTreeSet<u32>> = FxHashMap::default();
        let mut n = 2;
        build(kat, x, 0, 1, &mut n, &mut eps, &mut letters);
        let ff = kat.tests.ff();
        let mut a = EpsNfa::with_states(n, ff);
        a.initial[0] = true;
        a.accepting[1] = true;
        for ((i, j), phi) in eps {
            a.eps[i][j] = phi;
        }
        for ((i, j), ps) in letters {
            a.letters[i][j] = ps;
        }
        a
    }

    /// Places `other`'s states after `self`'s; returns the offset.
    pub fn disjoint_union(&self, other: &EpsNfa, ff: NodeId) -> (EpsNfa, usize) {
        let off = self.n;
        let mut a = EpsNfa::with_states(self.n + other.n, ff);
        for (src, base) in [(self, 0), (other, off)] {
            for i in 0..src.n {
                a.initial[base + i] = src.initial[i];
                a.accepting[base + i] = src.accepting[i];
                for j in 0..src.n {
                    a.eps[base + i][base + j] = src.eps[i][j];
                    a.letters[base + i][base + j] = src.letters[i][j].clone();
                }
            }
        }
        (a, off)
    }

    /// `J*`, the reflexive transitive closure of the epsilon matrix in the
    /// semiring of tests (where every element's star is `1`).
    pub fn eps_star(&self, tests: &mut Manager<bool>) -> Vec<Vec<NodeId>> {
        let mut m = self.eps.clone();
        for k in 0..self.n {
            for i in 0..self.n {
                if tests.is_false(m[i][k]) {
                    continue;
                }
                for j in 0..self.n {
                    if tests.is_false(m[k][j]) {
                        continue;
                    }
                    let via = tests.cnj(m[i][k], m[k][j]);
                    m[i][j] = tests.dsj(m[i][j], via);
                }
            }
        }
        let tt = tests.tt();
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = tt;
        }
        m
    }
}

fn build(
    kat: &mut Kat,
    x: ExprId,
    i: usize,
    f: usize,
    n: &mut usize,
    eps: &mut FxHashMap<(usize, usize), NodeId>,
    letters: &mut FxHashMap<(usize, usize), BTreeSet<u32>>,
) {
    let mut add_eps = |kat: &mut Kat, i: usize, j: usize, phi: NodeId| {
        let e = eps.entry((i, j)).or_insert(phi);
        *e = kat.tests.dsj(*e, phi);
    };
    match kat.get(x).clone() {
        SExpr::Test(phi) => add_eps(kat, i, f, phi),
        SExpr::Letter(p) => {
            letters.entry((i, f)).or_default().insert(p);
        }
        SExpr::Sum(xs) => {
            for y in xs.iter() {
                build(kat, *y, i, f, n, eps, letters);
            }
        }
        SExpr::Prod(a, b) => {
            let p = *n;
            *n += 1;
            build(kat, a, i, p, n, eps, letters);
            build(kat, b, p, f, n, eps, letters);
        }
        SExpr::Star(a) => {
            let p = *n;
            *n += 1;
            let tt = kat.tests.tt();
            add_eps(kat, i, p, tt);
            add_eps(kat, p, f, tt);
            build(kat, a, p, p, n, eps, letters);
        }
    }
}

/// The epsilon-free automaton `⟨n, u, 0, J*N, J*v⟩` of an [`EpsNfa`].
/// Transition nodes are computed on demand.
#[derive(Debug)]
pub struct IlieYu {
    pub kat: Kat,
    space: SetSpace<u32>,
    closure: Vec<Vec<NodeId>>,
    letters: Vec<Vec<BTreeSet<u32>>>,
    accepting: Vec<bool>,
    letter_nodes: FxHashMap<usize, NodeId>,
    trans: FxHashMap<u32, NodeId>,
    outs: FxHashMap<u32, NodeId>,
}

impl IlieYu {
    pub fn eliminate(mut kat: Kat, a: &EpsNfa) -> Self {
        let closure = a.eps_star(&mut kat.tests);
        let space = SetSpace::new(kat.signature().num_vars());
        IlieYu {
            kat,
            space,
            closure,
            letters: a.letters.clone(),
            accepting: a.accepting.clone(),
            letter_nodes: FxHashMap::default(),
            trans: FxHashMap::default(),
            outs: FxHashMap::default(),
        }
    }

    /// Builds both expressions' automata side by side and determinises the
    /// result, started from each initial state.
    pub fn determinise(mut kat: Kat, x: ExprId, y: ExprId) -> (Determinised<IlieYu>, SetId, SetId) {
        let ax = EpsNfa::ilie_yu(&mut kat, x);
        let ay = EpsNfa::ilie_yu(&mut kat, y);
        let ff = kat.tests.ff();
        let (a, off) = ax.disjoint_union(&ay, ff);
        let mut d = Determinised::new(IlieYu::eliminate(kat, &a));
        let sx = d.start(vec![0]);
        let sy = d.start(vec![off as u32]);
        (d, sx, sy)
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    // Letter transitions leaving `k`, before closing under epsilon.
    fn letter_node(&mut self, k: usize) -> NodeId {
        if let Some(&n) = self.letter_nodes.get(&k) {
            return n;
        }
        let mut targets: FxHashMap<u32, Vec<u32>> = FxHashMap::default();
        for (j, ps) in self.letters[k].iter().enumerate() {
            for &p in ps {
                targets.entry(p).or_default().push(j as u32);
            }
        }
        let mut targets: Vec<(u32, Vec<u32>)> = targets.into_iter().collect();
        targets.sort();
        let mut acc = self.space.empty_node();
        for (p, js) in targets {
            let set = self.space.intern(js);
            let hit = self.space.set_node(set);
            let miss = self.space.empty_node();
            let n = letter_node(&mut self.space.bdd, self.kat.signature(), p, hit, miss);
            acc = self.space.union(acc, n);
        }
        self.letter_nodes.insert(k, acc);
        acc
    }
}

impl SymbolicNfa for IlieYu {
    type State = u32;
    type Output = NodeId;

    fn space(&self) -> &SetSpace<u32> {
        &self.space
    }

    fn space_mut(&mut self) -> &mut SetSpace<u32> {
        &mut self.space
    }

    fn transitions(&mut self, s: u32) -> Result<NodeId, AutomatonError> {
        if let Some(&t) = self.trans.get(&s) {
            return Ok(t);
        }
        let i = s as usize;
        let mut acc = self.space.empty_node();
        for k in 0..self.num_states() {
            let phi = self.closure[i][k];
            if self.kat.tests.is_false(phi) {
                continue;
            }
            let n = self.letter_node(k);
            let empty = self.space.empty_node();
            let g = self.space.bdd.guard(&self.kat.tests, phi, n, empty);
            acc = self.space.union(acc, g);
        }
        self.trans.insert(s, acc);
        Ok(acc)
    }

    fn output(&mut self, s: u32) -> Result<NodeId, AutomatonError> {
        if let Some(&o) = self.outs.get(&s) {
            return Ok(o);
        }
        let i = s as usize;
        let mut acc = self.kat.tests.ff();
        for j in 0..self.num_states() {
            if self.accepting[j] {
                acc = self.kat.tests.dsj(acc, self.closure[i][j]);
            }
        }
        self.outs.insert(s, acc);
        Ok(acc)
    }

    fn join(&mut self, a: &NodeId, b: &NodeId) -> NodeId {
        self.kat.tests.dsj(*a, *b)
    }

    fn join_unit(&mut self) -> NodeId {
        self.kat.tests.ff()
    }
}

/// A symbolic DFA built from KAT expressions, whose outputs are tests.
pub trait KatAutomaton: SymbolicDfa<Output = NodeId> {
    fn kat(&self) -> &Kat;
    fn kat_mut(&mut self) -> &mut Kat;
    /// States expanded so far.
    fn expanded_states(&self) -> usize;
}

impl KatAutomaton for Brzozowski {
    fn kat(&self) -> &Kat {
        &self.kat
    }

    fn kat_mut(&mut self) -> &mut Kat {
        &mut self.kat
    }

    fn expanded_states(&self) -> usize {
        self.expanded
    }
}

impl KatAutomaton for Determinised<Antimirov> {
    fn kat(&self) -> &Kat {
        &self.nfa().kat
    }

    fn kat_mut(&mut self) -> &mut Kat {
        &mut self.nfa_mut().kat
    }

    fn expanded_states(&self) -> usize {
        self.expanded()
    }
}

impl KatAutomaton for Determinised<IlieYu> {
    fn kat(&self) -> &Kat {
        &self.nfa().kat
    }

    fn kat_mut(&mut self) -> &mut Kat {
        &mut self.nfa_mut().kat
    }

    fn expanded_states(&self) -> usize {
        self.expanded()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::SymbolicDfa;
    use crate::equiv::{symb_equiv, Verdict};
    use crate::kat::Atom;
    use crate::parse::parse;

    fn setup(x: &str, y: &str) -> (Kat, ExprId, ExprId) {
        let sig = Signature::new(["a", "b"], ["p", "q", "r"]);
        let mut kat = Kat::new(sig.clone()).unwrap();
        let x = kat.compile(&parse(&sig, x).unwrap()).unwrap();
        let y = kat.compile(&parse(&sig, y).unwrap()).unwrap();
        (kat, x, y)
    }

    #[test]
    fn letter_nodes_decode() {
        let sig = Signature::new(["a"], ["p", "q", "r"]);
        let mut m: Manager<u32> = Manager::new(sig.num_vars());
        let miss = m.constant(99);
        for p in 0..3 {
            let hit = m.constant(p);
            let n = letter_node(&mut m, &sig, p, hit, miss);
            for q in 0..4 {
                for a in 0..2 {
                    let mut asg = sig.letter_assignment(Atom(a), 0);
                    for j in 0..sig.code_bits() {
                        asg.set(sig.code_var(j), (q >> j) & 1 == 1);
                    }
                    let expect = if q == p { p } else { 99 };
                    assert_eq!(*m.eval(n, &asg), expect);
                }
            }
        }
    }

    #[test]
    fn brzozowski_derivative_of_guarded_letter() {
        let (kat, x, _) = setup("a;p", "p");
        let mut b = Brzozowski::new(kat);
        let d = b.transitions(x).unwrap();
        let sig = b.kat.signature().clone();
        let one = b.kat.one();
        let zero = b.kat.zero();
        for atom in sig.atoms() {
            for p in 0..3 {
                let s = b.step(x, &sig.letter_assignment(atom, p)).unwrap();
                assert_eq!(s, if atom.holds(0) && p == 0 { one } else { zero });
            }
        }
        // a, two code bits, and the leaves 1 and 0
        assert_eq!(b.bdd().size(d), 5);
    }

    #[test]
    fn ilie_yu_shape() {
        let (mut kat, x, _) = setup("p;(q+a;r)*", "p");
        let a = EpsNfa::ilie_yu(&mut kat, x);
        // two fixed states, one per product and one per star
        assert_eq!(a.n, 2 + 2 + 1);
        assert_eq!(a.initial.iter().filter(|&&b| b).count(), 1);
        assert_eq!(a.accepting.iter().filter(|&&b| b).count(), 1);
    }

    #[test]
    fn eps_closure_is_reflexive_and_transitive() {
        let (mut kat, x, _) = setup("(a;b)*;p", "p");
        let a = EpsNfa::ilie_yu(&mut kat, x);
        let m = a.eps_star(&mut kat.tests);
        for i in 0..a.n {
            assert!(kat.tests.is_true(m[i][i]));
            for k in 0..a.n {
                for j in 0..a.n {
                    let via = kat.tests.cnj(m[i][k], m[k][j]);
                    assert!(kat.tests.implies(via, m[i][j]));
                }
            }
        }
    }

    #[test]
    fn constructions_agree_on_simple_pairs() {
        for (x, y, eq) in [
            ("(p+q)*", "p*;(q;p*)*", true),
            ("a;(!a;p)*", "a", true),
            ("a;p", "a;q", false),
            ("(p;a)*", "p*", false),
            ("a;p + !a;p", "p", true),
        ] {
            let (kat, ex, ey) = setup(x, y);
            let mut b = Brzozowski::new(kat.clone());
            assert_eq!(symb_equiv(&mut b, ex, ey).unwrap().verdict.holds(), eq, "brz {x} {y}");
            let (mut d, sx, sy) = Antimirov::determinise(kat.clone(), ex, ey);
            assert_eq!(symb_equiv(&mut d, sx, sy).unwrap().verdict.holds(), eq, "ant {x} {y}");
            let (mut d, sx, sy) = IlieYu::determinise(kat, ex, ey);
            let r = symb_equiv(&mut d, sx, sy).unwrap();
            assert_eq!(r.verdict.holds(), eq, "iy {x} {y}");
            if let Verdict::NotEquivalent { outputs, .. } = r.verdict {
                assert_ne!(outputs.0, outputs.1);
            }
        }
    }

    #[test]
    fn brzozowski_cap() {
        let (kat, x, y) = setup("(p+q;r)*;(p;q + r)*", "(p+q+r)*");
        let mut b = Brzozowski::new(kat).with_cap(1);
        assert!(matches!(
            symb_equiv(&mut b, x, y),
            Err(AutomatonError::StateCapExceeded { cap: 1 })
        ));
    }
}
