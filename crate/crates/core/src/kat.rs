//! KAT expressions.
//!
//! Two representations coexist:
//!
//! * [`KatExpr`], a plain syntax tree with tests as [`TestExpr`]. It comes
//!   out of the parser and carries the reference semantics: guarded string
//!   languages ([`g_upto`]) and explicit per-atom derivatives
//!   ([`eps_alpha`], [`delta_alpha_p`]).
//! * Symbolic expressions, interned in a [`Kat`] context, whose tests are
//!   compiled to Boolean BDD nodes. Their smart constructors normalise
//!   modulo a few simple laws so that equality is identifier equality.

use std::cmp::Ordering;
use std::fmt;

use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

use crate::bdd::{Assignment, Manager, NodeDescr, NodeId, VarId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KatError {
    #[error("test index {0} is not declared")]
    UnknownTest(u32),
    #[error("letter index {0} is not declared")]
    UnknownLetter(u32),
    #[error("too many primitive tests ({0}); at most 24 are supported")]
    TooManyTests(usize),
}

/// Declared primitive tests `A` and letters `Σ`.
///
/// The BDD variable universe is `A ⊎ Σ'`: test `i` is variable `i`, and
/// letters are encoded in binary on `Σ'`, `code_bits()` further variables
/// placed after all the tests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub tests: Vec<String>,
    pub letters: Vec<String>,
}

impl Signature {
    pub fn new<S: Into<String>>(tests: impl IntoIterator<Item = S>, letters: impl IntoIterator<Item = S>) -> Self {
        Signature {
            tests: tests.into_iter().map(Into::into).collect(),
            letters: letters.into_iter().map(Into::into).collect(),
        }
    }

    /// `n` tests `a0..` and `m` letters `p0..`.
    pub fn numbered(n: usize, m: usize) -> Self {
        Signature::new((0..n).map(|i| format!("a{i}")), (0..m).map(|i| format!("p{i}")))
    }

    pub fn num_tests(&self) -> u32 {
        self.tests.len() as u32
    }

    pub fn num_letters(&self) -> u32 {
        self.letters.len() as u32
    }

    pub fn num_atoms(&self) -> u32 {
        1 << self.tests.len()
    }

    /// Bits needed to encode a letter.
    pub fn code_bits(&self) -> u32 {
        let n = self.letters.len() as u32;
        if n <= 1 {
            0
        } else {
            32 - (n - 1).leading_zeros()
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_tests() + self.code_bits()
    }

    pub fn test_var(&self, i: u32) -> VarId {
        VarId(i)
    }

    /// Variable carrying bit `j` of letter codes.
    pub fn code_var(&self, j: u32) -> VarId {
        VarId(self.num_tests() + j)
    }

    pub fn var_name(&self, v: VarId) -> String {
        if v.0 < self.num_tests() {
            self.tests[v.index()].clone()
        } else {
            format!("@{}", v.0 - self.num_tests())
        }
    }

    pub fn test_index(&self, name: &str) -> Option<u32> {
        self.tests.iter().position(|t| t == name).map(|i| i as u32)
    }

    pub fn letter_index(&self, name: &str) -> Option<u32> {
        self.letters.iter().position(|t| t == name).map(|i| i as u32)
    }

    /// The letter `αp` of the symbolic alphabet.
    pub fn letter_assignment(&self, atom: Atom, p: u32) -> Assignment {
        let mut bits = Vec::with_capacity(self.num_vars() as usize);
        bits.extend((0..self.num_tests()).map(|i| atom.holds(i)));
        bits.extend((0..self.code_bits()).map(|j| (p >> j) & 1 == 1));
        Assignment::new(bits)
    }

    /// Decodes the letter part of a full assignment, if it names a letter.
    pub fn decode_letter(&self, a: &Assignment) -> Option<u32> {
        let code = (0..self.code_bits()).fold(0u32, |acc, j| acc | ((a.get(self.code_var(j)) as u32) << j));
        (code < self.num_letters()).then_some(code)
    }

    pub fn decode_atom(&self, a: &Assignment) -> Atom {
        Atom((0..self.num_tests()).fold(0u32, |acc, i| acc | ((a.get(VarId(i)) as u32) << i)))
    }

    /// The atom as an assignment of the test variables (letter bits zero).
    pub fn atom_assignment(&self, atom: Atom) -> Assignment {
        self.letter_assignment(atom, 0)
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> {
        (0..self.num_atoms()).map(Atom)
    }

    pub fn render_atom(&self, atom: Atom) -> String {
        let lits: Vec<String> = (0..self.num_tests())
            .map(|i| format!("{}{}", if atom.holds(i) { "" } else { "!" }, self.tests[i as usize]))
            .collect();
        format!("<{}>", lits.join(","))
    }
}

/// Boolean test expressions over the declared primitive tests.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TestExpr {
    Var(u32),
    True,
    False,
    And(Box<TestExpr>, Box<TestExpr>),
    Or(Box<TestExpr>, Box<TestExpr>),
    Not(Box<TestExpr>),
}

impl TestExpr {
    pub fn and(a: TestExpr, b: TestExpr) -> TestExpr {
        TestExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: TestExpr, b: TestExpr) -> TestExpr {
        TestExpr::Or(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: TestExpr) -> TestExpr {
        TestExpr::Not(Box::new(a))
    }

    fn render(&self, sig: &Signature, out: &mut String, prec: u8) {
        // 0: |, 1: &, 2: !
        match self {
            TestExpr::Var(i) => out.push_str(&sig.tests[*i as usize]),
            TestExpr::True => out.push('1'),
            TestExpr::False => out.push('0'),
            TestExpr::Not(a) => {
                out.push('!');
                a.render(sig, out, 2);
            }
            TestExpr::And(a, b) | TestExpr::Or(a, b) => {
                let (p, op) = if matches!(self, TestExpr::And(..)) { (1, "&") } else { (0, "|") };
                if prec > p {
                    out.push('(');
                }
                a.render(sig, out, p + 1);
                out.push_str(op);
                b.render(sig, out, p);
                if prec > p {
                    out.push(')');
                }
            }
        }
    }
}

/// An atom: a valuation of the primitive tests, bit `i` giving test `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(pub u32);

impl Atom {
    pub fn holds(self, i: u32) -> bool {
        (self.0 >> i) & 1 == 1
    }
}

/// `α ⊨ φ`.
pub fn atom_sat(alpha: Atom, phi: &TestExpr) -> bool {
    match phi {
        TestExpr::Var(i) => alpha.holds(*i),
        TestExpr::True => true,
        TestExpr::False => false,
        TestExpr::And(a, b) => atom_sat(alpha, a) && atom_sat(alpha, b),
        TestExpr::Or(a, b) => atom_sat(alpha, a) || atom_sat(alpha, b),
        TestExpr::Not(a) => !atom_sat(alpha, a),
    }
}

/// KAT expressions: regular expressions over letters and tests.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KatExpr {
    Test(TestExpr),
    Letter(u32),
    Sum(Box<KatExpr>, Box<KatExpr>),
    Prod(Box<KatExpr>, Box<KatExpr>),
    Star(Box<KatExpr>),
}

impl KatExpr {
    pub fn zero() -> KatExpr {
        KatExpr::Test(TestExpr::False)
    }

    pub fn one() -> KatExpr {
        KatExpr::Test(TestExpr::True)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, KatExpr::Test(TestExpr::False))
    }

    pub fn is_one(&self) -> bool {
        matches!(self, KatExpr::Test(TestExpr::True))
    }

    /// Unnormalised constructors, as produced by the parser.
    pub fn raw_sum(a: KatExpr, b: KatExpr) -> KatExpr {
        KatExpr::Sum(Box::new(a), Box::new(b))
    }

    pub fn raw_prod(a: KatExpr, b: KatExpr) -> KatExpr {
        KatExpr::Prod(Box::new(a), Box::new(b))
    }

    pub fn raw_star(a: KatExpr) -> KatExpr {
        KatExpr::Star(Box::new(a))
    }

    fn summands(self, out: &mut Vec<KatExpr>) {
        match self {
            KatExpr::Sum(a, b) => {
                a.summands(out);
                b.summands(out);
            }
            e if e.is_zero() => {}
            e => out.push(e),
        }
    }

    /// Sum modulo associativity, commutativity, idempotence and `0` as unit.
    pub fn sum(a: KatExpr, b: KatExpr) -> KatExpr {
        let mut xs = Vec::new();
        a.summands(&mut xs);
        b.summands(&mut xs);
        xs.sort();
        xs.dedup();
        let mut it = xs.into_iter().rev();
        match it.next() {
            None => KatExpr::zero(),
            Some(last) => it.fold(last, |acc, x| KatExpr::raw_sum(x, acc)),
        }
    }

    /// Product, right-associated, with `1` as unit and `0` as annihilator.
    pub fn prod(a: KatExpr, b: KatExpr) -> KatExpr {
        if a.is_zero() || b.is_zero() {
            return KatExpr::zero();
        }
        if a.is_one() {
            return b;
        }
        if b.is_one() {
            return a;
        }
        match a {
            KatExpr::Prod(a1, a2) => KatExpr::prod(*a1, KatExpr::prod(*a2, b)),
            a => KatExpr::raw_prod(a, b),
        }
    }

    /// Star, with `(x*)* = x*` and `φ* = 1`.
    pub fn star(a: KatExpr) -> KatExpr {
        match a {
            KatExpr::Star(_) => a,
            KatExpr::Test(_) => KatExpr::one(),
            a => KatExpr::raw_star(a),
        }
    }

    /// Number of `+`, `·` and `*` nodes.
    pub fn connectives(&self) -> usize {
        match self {
            KatExpr::Test(_) | KatExpr::Letter(_) => 0,
            KatExpr::Sum(a, b) | KatExpr::Prod(a, b) => 1 + a.connectives() + b.connectives(),
            KatExpr::Star(a) => 1 + a.connectives(),
        }
    }

    /// Whether the constant `0` occurs syntactically.
    pub fn mentions_zero(&self) -> bool {
        fn test(t: &TestExpr) -> bool {
            match t {
                TestExpr::False => true,
                TestExpr::Var(_) | TestExpr::True => false,
                TestExpr::And(a, b) | TestExpr::Or(a, b) => test(a) || test(b),
                TestExpr::Not(a) => test(a),
            }
        }
        match self {
            KatExpr::Test(t) => test(t),
            KatExpr::Letter(_) => false,
            KatExpr::Sum(a, b) | KatExpr::Prod(a, b) => a.mentions_zero() || b.mentions_zero(),
            KatExpr::Star(a) => a.mentions_zero(),
        }
    }

    /// Pretty-prints in the concrete syntax accepted by the parser.
    pub fn render(&self, sig: &Signature) -> String {
        let mut s = String::new();
        self.render_into(sig, &mut s, 0);
        s
    }

    fn render_into(&self, sig: &Signature, out: &mut String, prec: u8) {
        // 0: +, 1: ;, 2: *
        match self {
            KatExpr::Test(t) => match t {
                TestExpr::Var(_) | TestExpr::True | TestExpr::False | TestExpr::Not(_) => t.render(sig, out, 2),
                _ => {
                    out.push('(');
                    t.render(sig, out, 0);
                    out.push(')');
                }
            },
            KatExpr::Letter(p) => out.push_str(&sig.letters[*p as usize]),
            KatExpr::Sum(a, b) | KatExpr::Prod(a, b) => {
                let (p, op) = if matches!(self, KatExpr::Sum(..)) { (0, " + ") } else { (1, ";") };
                if prec > p {
                    out.push('(');
                }
                a.render_into(sig, out, p + 1);
                out.push_str(op);
                b.render_into(sig, out, p);
                if prec > p {
                    out.push(')');
                }
            }
            KatExpr::Star(a) => {
                a.render_into(sig, out, 2);
                out.push('*');
            }
        }
    }
}

/// `ε_α(x)`: whether `x` accepts the guarded string made of `α` alone.
pub fn eps_alpha(alpha: Atom, x: &KatExpr) -> bool {
    match x {
        KatExpr::Sum(a, b) => eps_alpha(alpha, a) || eps_alpha(alpha, b),
        KatExpr::Prod(a, b) => eps_alpha(alpha, a) && eps_alpha(alpha, b),
        KatExpr::Star(_) => true,
        KatExpr::Letter(_) => false,
        KatExpr::Test(phi) => atom_sat(alpha, phi),
    }
}

/// `δ_αp(x)`: what remains of `x` after reading `α` then `p`.
pub fn delta_alpha_p(alpha: Atom, p: u32, x: &KatExpr) -> KatExpr {
    match x {
        KatExpr::Sum(a, b) => KatExpr::sum(delta_alpha_p(alpha, p, a), delta_alpha_p(alpha, p, b)),
        KatExpr::Prod(a, b) => {
            let left = KatExpr::prod(delta_alpha_p(alpha, p, a), (**b).clone());
            if eps_alpha(alpha, a) {
                KatExpr::sum(left, delta_alpha_p(alpha, p, b))
            } else {
                left
            }
        }
        KatExpr::Star(a) => KatExpr::prod(delta_alpha_p(alpha, p, a), x.clone()),
        KatExpr::Letter(q) => {
            if *q == p {
                KatExpr::one()
            } else {
                KatExpr::zero()
            }
        }
        KatExpr::Test(_) => KatExpr::zero(),
    }
}

/// `α1 p1 α2 … αn pn αn+1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GuardedString {
    pub atoms: Vec<Atom>,
    pub letters: Vec<u32>,
}

impl GuardedString {
    pub fn atom(a: Atom) -> Self {
        GuardedString {
            atoms: vec![a],
            letters: Vec::new(),
        }
    }

    pub fn new(atoms: Vec<Atom>, letters: Vec<u32>) -> Self {
        assert_eq!(atoms.len(), letters.len() + 1, "guarded strings alternate atoms and letters");
        GuardedString { atoms, letters }
    }

    pub fn first(&self) -> Atom {
        self.atoms[0]
    }

    pub fn last(&self) -> Atom {
        *self.atoms.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Fusion product: defined when the last atom of `self` is the first of
    /// `other`, which then appears once.
    pub fn concat(&self, other: &GuardedString) -> Option<GuardedString> {
        if self.last() != other.first() {
            return None;
        }
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms[1..]);
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Some(GuardedString { atoms, letters })
    }

    pub fn render(&self, sig: &Signature) -> String {
        let mut s = sig.render_atom(self.atoms[0]);
        for (p, a) in self.letters.iter().zip(&self.atoms[1..]) {
            s.push(' ');
            s.push_str(&sig.letters[*p as usize]);
            s.push(' ');
            s.push_str(&sig.render_atom(*a));
        }
        s
    }
}

pub type Language = FxHashSet<GuardedString>;

fn concat_upto(left: &Language, right: &Language, n: usize) -> Language {
    let mut by_first: FxHashMap<Atom, Vec<&GuardedString>> = FxHashMap::default();
    for v in right {
        by_first.entry(v.first()).or_default().push(v);
    }
    let mut out = Language::default();
    for u in left {
        if let Some(vs) = by_first.get(&u.last()) {
            for v in vs {
                if u.len() + v.len() <= n {
                    out.insert(u.concat(v).unwrap());
                }
            }
        }
    }
    out
}

/// All guarded strings of `G(x)` with at most `n` letters.
pub fn g_upto(sig: &Signature, x: &KatExpr, n: usize) -> Language {
    match x {
        KatExpr::Test(phi) => sig.atoms().filter(|&a| atom_sat(a, phi)).map(GuardedString::atom).collect(),
        KatExpr::Letter(p) => {
            let mut out = Language::default();
            if n >= 1 {
                for a in sig.atoms() {
                    for b in sig.atoms() {
                        out.insert(GuardedString::new(vec![a, b], vec![*p]));
                    }
                }
            }
            out
        }
        KatExpr::Sum(a, b) => {
            let mut out = g_upto(sig, a, n);
            out.extend(g_upto(sig, b, n));
            out
        }
        KatExpr::Prod(a, b) => concat_upto(&g_upto(sig, a, n), &g_upto(sig, b, n), n),
        KatExpr::Star(a) => {
            let inner = g_upto(sig, a, n);
            let mut acc: Language = sig.atoms().map(GuardedString::atom).collect();
            loop {
                let more = concat_upto(&acc, &inner, n);
                let before = acc.len();
                acc.extend(more);
                if acc.len() == before {
                    return acc;
                }
            }
        }
    }
}

/// `u ∈ G(x)`.
pub fn gs_member(sig: &Signature, x: &KatExpr, u: &GuardedString) -> bool {
    g_upto(sig, x, u.len()).contains(u)
}

/// Interned identifier of a symbolic expression.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExprId(u32);

impl ExprId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Symbolic expression nodes. Sums are flat and sorted by identifier;
/// products are right-associated.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SExpr {
    Test(NodeId),
    Letter(u32),
    Sum(Box<[ExprId]>),
    Prod(ExprId, ExprId),
    Star(ExprId),
}

/// Interning context for symbolic KAT expressions, together with the
/// Boolean BDD manager their tests live in.
#[derive(Clone, Debug)]
pub struct Kat {
    sig: Signature,
    pub tests: Manager<bool>,
    exprs: Vec<SExpr>,
    index: FxHashMap<SExpr, ExprId>,
    eps: FxHashMap<ExprId, NodeId>,
    zero: ExprId,
    one: ExprId,
}

impl Kat {
    pub fn new(sig: Signature) -> Result<Self, KatError> {
        if sig.tests.len() > 24 {
            return Err(KatError::TooManyTests(sig.tests.len()));
        }
        let mut tests = Manager::new(sig.num_vars());
        let ff = tests.ff();
        let tt = tests.tt();
        let mut kat = Kat {
            sig,
            tests,
            exprs: Vec::new(),
            index: FxHashMap::default(),
            eps: FxHashMap::default(),
            zero: ExprId(0),
            one: ExprId(0),
        };
        kat.zero = kat.intern(SExpr::Test(ff));
        kat.one = kat.intern(SExpr::Test(tt));
        Ok(kat)
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn len(&self) -> usize {
        self.exprs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exprs.is_empty()
    }

    fn intern(&mut self, e: SExpr) -> ExprId {
        if let Some(&id) = self.index.get(&e) {
            return id;
        }
        let id = ExprId(self.exprs.len() as u32);
        self.exprs.push(e.clone());
        self.index.insert(e, id);
        id
    }

    pub fn get(&self, x: ExprId) -> &SExpr {
        &self.exprs[x.index()]
    }

    pub fn zero(&self) -> ExprId {
        self.zero
    }

    pub fn one(&self) -> ExprId {
        self.one
    }

    pub fn test(&mut self, phi: NodeId) -> ExprId {
        self.intern(SExpr::Test(phi))
    }

    pub fn letter(&mut self, p: u32) -> Result<ExprId, KatError> {
        if p >= self.sig.num_letters() {
            return Err(KatError::UnknownLetter(p));
        }
        Ok(self.intern(SExpr::Letter(p)))
    }

    fn test_of(&self, x: ExprId) -> Option<NodeId> {
        match self.exprs[x.index()] {
            SExpr::Test(n) => Some(n),
            _ => None,
        }
    }

    pub fn sum(&mut self, a: ExprId, b: ExprId) -> ExprId {
        if a == b || b == self.zero {
            return a;
        }
        if a == self.zero {
            return b;
        }
        self.sum_all([a, b])
    }

    /// Normalising n-ary sum: flattened, tests merged into one disjunction,
    /// `0` dropped, sorted by identifier and deduplicated.
    pub fn sum_all(&mut self, xs: impl IntoIterator<Item = ExprId>) -> ExprId {
        let mut items = Vec::new();
        let mut test: Option<NodeId> = None;
        let mut push = |kat: &mut Kat, x: ExprId, items: &mut Vec<ExprId>| match kat.exprs[x.index()] {
            SExpr::Test(phi) => {
                test = Some(match test {
                    Some(t) => kat.tests.dsj(t, phi),
                    None => phi,
                });
            }
            _ => items.push(x),
        };
        for x in xs {
            if let SExpr::Sum(ys) = &self.exprs[x.index()] {
                for y in ys.clone().iter() {
                    push(self, *y, &mut items);
                }
            } else {
                push(self, x, &mut items);
            }
        }
        if let Some(t) = test {
            if !self.tests.is_false(t) {
                let t = self.test(t);
                items.push(t);
            }
        }
        items.sort_unstable();
        items.dedup();
        match items.len() {
            0 => self.zero,
            1 => items[0],
            _ => self.intern(SExpr::Sum(items.into_boxed_slice())),
        }
    }

    pub fn prod(&mut self, a: ExprId, b: ExprId) -> ExprId {
        if a == self.zero || b == self.zero {
            return self.zero;
        }
        if a == self.one {
            return b;
        }
        if b == self.one {
            return a;
        }
        match self.exprs[a.index()] {
            SExpr::Prod(a1, a2) => {
                let r = self.prod(a2, b);
                self.prod(a1, r)
            }
            SExpr::Test(phi) => match self.exprs[b.index()] {
                SExpr::Test(psi) => {
                    let t = self.tests.cnj(phi, psi);
                    self.test(t)
                }
                SExpr::Prod(b1, b2) if self.test_of(b1).is_some() => {
                    let t = self.tests.cnj(phi, self.test_of(b1).unwrap());
                    let t = self.test(t);
                    self.prod(t, b2)
                }
                _ => self.intern(SExpr::Prod(a, b)),
            },
            _ => self.intern(SExpr::Prod(a, b)),
        }
    }

    pub fn star(&mut self, a: ExprId) -> ExprId {
        match self.exprs[a.index()] {
            SExpr::Star(_) => a,
            SExpr::Test(_) => self.one,
            _ => self.intern(SExpr::Star(a)),
        }
    }

    pub fn compile_test(&mut self, t: &TestExpr) -> Result<NodeId, KatError> {
        Ok(match t {
            TestExpr::Var(i) => {
                if *i >= self.sig.num_tests() {
                    return Err(KatError::UnknownTest(*i));
                }
                self.tests.var(VarId(*i)).expect("declared variable")
            }
            TestExpr::True => self.tests.tt(),
            TestExpr::False => self.tests.ff(),
            TestExpr::And(a, b) => {
                let a = self.compile_test(a)?;
                let b = self.compile_test(b)?;
                self.tests.cnj(a, b)
            }
            TestExpr::Or(a, b) => {
                let a = self.compile_test(a)?;
                let b = self.compile_test(b)?;
                self.tests.dsj(a, b)
            }
            TestExpr::Not(a) => {
                let a = self.compile_test(a)?;
                self.tests.neg(a)
            }
        })
    }

    /// Symbolic version of an expression; tests become Boolean BDD nodes.
    pub fn compile(&mut self, x: &KatExpr) -> Result<ExprId, KatError> {
        Ok(match x {
            KatExpr::Test(t) => {
                let n = self.compile_test(t)?;
                self.test(n)
            }
            KatExpr::Letter(p) => self.letter(*p)?,
            KatExpr::Sum(a, b) => {
                let a = self.compile(a)?;
                let b = self.compile(b)?;
                self.sum(a, b)
            }
            KatExpr::Prod(a, b) => {
                let a = self.compile(a)?;
                let b = self.compile(b)?;
                self.prod(a, b)
            }
            KatExpr::Star(a) => {
                let a = self.compile(a)?;
                self.star(a)
            }
        })
    }

    /// `ε̂(x)`: the atoms accepted by `x` alone, as a Boolean BDD.
    pub fn eps_hat(&mut self, x: ExprId) -> NodeId {
        if let Some(&n) = self.eps.get(&x) {
            return n;
        }
        let n = match self.exprs[x.index()].clone() {
            SExpr::Test(phi) => phi,
            SExpr::Letter(_) => self.tests.ff(),
            SExpr::Star(_) => self.tests.tt(),
            SExpr::Sum(xs) => {
                let mut acc = self.tests.ff();
                for y in xs.iter() {
                    let e = self.eps_hat(*y);
                    acc = self.tests.dsj(acc, e);
                }
                acc
            }
            SExpr::Prod(a, b) => {
                let ea = self.eps_hat(a);
                let eb = self.eps_hat(b);
                self.tests.cnj(ea, eb)
            }
        };
        self.eps.insert(x, n);
        n
    }

    /// Rewrites starred subterms so that, where possible, the body of a
    /// star does not accept single atoms. Each rewrite preserves the
    /// guarded string language:
    ///
    /// * tests under a star are dropped, `(φ + x)* = x*`;
    /// * nested stars are flattened, `(x* + y)* = (x + y)*`;
    /// * a product of two factors that both contain `1` becomes a sum,
    ///   `((1 + x)(1 + y))* = (x + y)*`.
    ///
    /// Products whose factors only accept some atoms are left alone: a
    /// star body may still accept atoms after normalisation.
    pub fn star_normalise(&mut self, x: ExprId) -> ExprId {
        let mut memo = FxHashMap::default();
        self.star_norm(x, &mut memo)
    }

    fn star_norm(&mut self, x: ExprId, memo: &mut FxHashMap<ExprId, ExprId>) -> ExprId {
        if let Some(&r) = memo.get(&x) {
            return r;
        }
        let r = match self.exprs[x.index()].clone() {
            SExpr::Test(_) | SExpr::Letter(_) => x,
            SExpr::Sum(xs) => {
                let ys: Vec<ExprId> = xs.iter().map(|&y| self.star_norm(y, memo)).collect();
                self.sum_all(ys)
            }
            SExpr::Prod(a, b) => {
                let a = self.star_norm(a, memo);
                let b = self.star_norm(b, memo);
                self.prod(a, b)
            }
            SExpr::Star(a) => {
                let a = self.star_norm(a, memo);
                let body = self.drop_atoms(a);
                self.star(body)
            }
        };
        memo.insert(x, r);
        r
    }

    // Some `e'` with `e'* = e*`, removing what single atoms `e` accepts
    // where this is sound.
    fn drop_atoms(&mut self, e: ExprId) -> ExprId {
        match self.exprs[e.index()].clone() {
            SExpr::Test(_) => self.zero,
            SExpr::Letter(_) => e,
            SExpr::Star(a) => self.drop_atoms(a),
            SExpr::Sum(xs) => {
                let ys: Vec<ExprId> = xs.iter().map(|&y| self.drop_atoms(y)).collect();
                self.sum_all(ys)
            }
            SExpr::Prod(a, b) => {
                let (ea, eb) = (self.eps_hat(a), self.eps_hat(b));
                if self.tests.is_true(ea) && self.tests.is_true(eb) {
                    let a = self.drop_atoms(a);
                    let b = self.drop_atoms(b);
                    self.sum(a, b)
                } else {
                    e
                }
            }
        }
    }

    /// Subexpressions `e` occurring as `e*` inside `x`.
    pub fn starred_bodies(&self, x: ExprId) -> Vec<ExprId> {
        let mut out = Vec::new();
        let mut seen = FxHashSet::default();
        let mut stack = vec![x];
        while let Some(y) = stack.pop() {
            if !seen.insert(y) {
                continue;
            }
            match &self.exprs[y.index()] {
                SExpr::Test(_) | SExpr::Letter(_) => {}
                SExpr::Sum(xs) => stack.extend(xs.iter().copied()),
                SExpr::Prod(a, b) => {
                    stack.push(*a);
                    stack.push(*b);
                }
                SExpr::Star(a) => {
                    out.push(*a);
                    stack.push(*a);
                }
            }
        }
        out
    }

    /// Back to a plain syntax tree; tests are rendered as disjunctions of
    /// the BDD's paths to `true`.
    pub fn to_expr(&self, x: ExprId) -> KatExpr {
        match &self.exprs[x.index()] {
            SExpr::Test(phi) => KatExpr::Test(self.test_expr(*phi)),
            SExpr::Letter(p) => KatExpr::Letter(*p),
            SExpr::Sum(xs) => {
                let mut it = xs.iter().rev();
                let last = self.to_expr(*it.next().unwrap());
                it.fold(last, |acc, y| KatExpr::raw_sum(self.to_expr(*y), acc))
            }
            SExpr::Prod(a, b) => KatExpr::raw_prod(self.to_expr(*a), self.to_expr(*b)),
            SExpr::Star(a) => KatExpr::raw_star(self.to_expr(*a)),
        }
    }

    /// A test expression equivalent to a Boolean node.
    pub fn test_expr(&self, phi: NodeId) -> TestExpr {
        match self.tests.descr(phi) {
            NodeDescr::Leaf(true) => TestExpr::True,
            NodeDescr::Leaf(false) => TestExpr::False,
            NodeDescr::Branch { var, lo, hi } => {
                let v = TestExpr::Var(var.0);
                let lo = self.test_expr(lo);
                let hi = self.test_expr(hi);
                let pos = match hi {
                    TestExpr::True => v.clone(),
                    TestExpr::False => TestExpr::False,
                    h => TestExpr::and(v.clone(), h),
                };
                let neg = match lo {
                    TestExpr::True => TestExpr::not(v),
                    TestExpr::False => TestExpr::False,
                    l => TestExpr::and(TestExpr::not(v), l),
                };
                match (pos, neg) {
                    (TestExpr::False, n) => n,
                    (p, TestExpr::False) => p,
                    (p, n) => TestExpr::or(p, n),
                }
            }
        }
    }

    pub fn render(&self, x: ExprId) -> String {
        self.to_expr(x).render(&self.sig)
    }
}

impl fmt::Display for GuardedString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.atoms[0].0)?;
        for (p, a) in self.letters.iter().zip(&self.atoms[1..]) {
            write!(f, " p{} {}", p, a.0)?;
        }
        Ok(())
    }
}

/// Orders guarded strings by length first; handy for reporting the
/// shortest element of a difference.
pub fn shortest(lang: impl IntoIterator<Item = GuardedString>) -> Option<GuardedString> {
    lang.into_iter().min_by(|a, b| match a.len().cmp(&b.len()) {
        Ordering::Equal => a.cmp(b),
        o => o,
    })
}
