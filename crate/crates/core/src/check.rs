//! End-to-end checks: two KAT expressions, a construction, an algorithm.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::automata::AutomatonError;
use crate::bdd::{NodeId, VarId};
use crate::construct::{Antimirov, Brzozowski, IlieYu, KatAutomaton, Method};
use crate::equiv::{dsf_equiv, naive_equiv, naive_incl, symb_equiv, symb_incl, Report, Stats, SymbolicWord, Verdict};
use crate::kat::{Atom, GuardedString, Kat, KatError, KatExpr, Signature};
use crate::parse::{parse, valid_identifier, ParseError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algo {
    Naive,
    Symb,
    Dsf,
}

impl Algo {
    pub const ALL: [Algo; 3] = [Algo::Naive, Algo::Symb, Algo::Dsf];

    pub fn name(self) -> &'static str {
        match self {
            Algo::Naive => "naive",
            Algo::Symb => "symb",
            Algo::Dsf => "dsf",
        }
    }
}

impl FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "naive" => Ok(Algo::Naive),
            "symb" => Ok(Algo::Symb),
            "dsf" => Ok(Algo::Dsf),
            _ => Err(format!("unknown algorithm `{s}` (expected naive, symb or dsf)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Equiv,
    Incl,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "equiv" => Ok(Mode::Equiv),
            "incl" => Ok(Mode::Incl),
            _ => Err(format!("unknown mode `{s}` (expected equiv or incl)")),
        }
    }
}

pub const DEFAULT_NAIVE_CAP: u64 = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckConfig {
    pub method: Method,
    pub algo: Algo,
    pub mode: Mode,
    /// Largest alphabet `2^|A ⊎ Σ'|` the naive algorithm may enumerate.
    pub naive_cap: u64,
    /// Largest number of states a check may expand.
    pub state_cap: Option<usize>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            method: Method::Ant,
            algo: Algo::Dsf,
            mode: Mode::Equiv,
            naive_cap: DEFAULT_NAIVE_CAP,
            state_cap: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum CheckError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Kat(#[from] KatError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error("the naive algorithm would enumerate {letters} letters per pair, above the cap of {cap}")]
    NaiveTooLarge { letters: u64, cap: u64 },
    #[error("`{0}` cannot be used as a name: expected one letter followed by digits or underscores")]
    BadName(String),
    #[error("`{0}` is declared twice")]
    DuplicateName(String),
}

/// Validates declared names and builds the signature.
pub fn signature(tests: &[String], letters: &[String]) -> Result<Signature, CheckError> {
    let mut seen = std::collections::HashSet::new();
    for name in tests.iter().chain(letters) {
        if !valid_identifier(name) {
            return Err(CheckError::BadName(name.clone()));
        }
        if !seen.insert(name) {
            return Err(CheckError::DuplicateName(name.clone()));
        }
    }
    Ok(Signature::new(tests.iter().cloned(), letters.iter().cloned()))
}

/// A counter-example: a symbolic word, one guarded string it stands for,
/// and which side accepts that string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub word: SymbolicWord,
    pub guarded: GuardedString,
    pub left_accepts: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub holds: bool,
    pub witness: Option<Witness>,
    pub stats: Stats,
    /// States whose transitions were computed.
    pub states: usize,
}

pub fn check_text(cfg: &CheckConfig, sig: &Signature, e1: &str, e2: &str) -> Result<Outcome, CheckError> {
    let x = parse(sig, e1)?;
    let y = parse(sig, e2)?;
    check(cfg, sig, &x, &y)
}

pub fn check(cfg: &CheckConfig, sig: &Signature, e1: &KatExpr, e2: &KatExpr) -> Result<Outcome, CheckError> {
    let letters = 1u64.checked_shl(sig.num_vars()).unwrap_or(u64::MAX);
    if cfg.algo == Algo::Naive && letters > cfg.naive_cap {
        return Err(CheckError::NaiveTooLarge {
            letters,
            cap: cfg.naive_cap,
        });
    }
    // The forest only records equivalence, so inclusion goes through
    // `x ≤ y ⇔ x + y = y`.
    let e1 = if cfg.mode == Mode::Incl && cfg.algo == Algo::Dsf {
        KatExpr::raw_sum(e1.clone(), e2.clone())
    } else {
        e1.clone()
    };
    let mut kat = Kat::new(sig.clone())?;
    let x = kat.compile(&e1)?;
    let y = kat.compile(e2)?;
    match cfg.method {
        Method::Brz => {
            let mut m = Brzozowski::new(kat);
            if let Some(cap) = cfg.state_cap {
                m = m.with_cap(cap);
            }
            run(cfg, &mut m, x, y)
        }
        Method::Ant => {
            let (mut m, sx, sy) = Antimirov::determinise(kat, x, y);
            if let Some(cap) = cfg.state_cap {
                m = m.with_cap(cap);
            }
            run(cfg, &mut m, sx, sy)
        }
        Method::Iy => {
            let (mut m, sx, sy) = IlieYu::determinise(kat, x, y);
            if let Some(cap) = cfg.state_cap {
                m = m.with_cap(cap);
            }
            run(cfg, &mut m, sx, sy)
        }
    }
}

/// Runs the configured algorithm on an already built automaton.
pub fn report<M: KatAutomaton>(
    cfg: &CheckConfig,
    m: &mut M,
    x: M::State,
    y: M::State,
) -> Result<Report<M::State, NodeId>, CheckError> {
    let mut leq = |m: &mut M, a: &NodeId, b: &NodeId| m.kat_mut().tests.implies(*a, *b);
    Ok(match (cfg.algo, cfg.mode) {
        (Algo::Naive, Mode::Equiv) => naive_equiv(m, x, y)?,
        (Algo::Naive, Mode::Incl) => naive_incl(m, x, y, &mut leq)?,
        (Algo::Symb, Mode::Equiv) => symb_equiv(m, x, y)?,
        (Algo::Symb, Mode::Incl) => symb_incl(m, x, y, &mut leq)?,
        (Algo::Dsf, _) => dsf_equiv(m, x, y)?,
    })
}

fn run<M: KatAutomaton>(cfg: &CheckConfig, m: &mut M, x: M::State, y: M::State) -> Result<Outcome, CheckError> {
    let r = report(cfg, m, x, y)?;
    let witness = match r.verdict {
        Verdict::Equivalent => None,
        Verdict::NotEquivalent { witness, outputs } => {
            let (guarded, left_accepts) = concretise(m.kat_mut(), &witness, outputs, cfg.mode == Mode::Incl);
            Some(Witness {
                word: witness,
                guarded,
                left_accepts,
            })
        }
    };
    Ok(Outcome {
        holds: witness.is_none(),
        witness,
        stats: r.stats,
        states: m.expanded_states(),
    })
}

/// A guarded string standing for a symbolic counter-example: unconstrained
/// tests are taken false, unconstrained code bits are chosen to give the
/// smallest declared letter, and the final atom separates the outputs.
pub fn concretise(kat: &mut Kat, w: &SymbolicWord, outputs: (NodeId, NodeId), incl: bool) -> (GuardedString, bool) {
    let sig = kat.signature().clone();
    let atom_of = |lits: &dyn Fn(VarId) -> Option<bool>| {
        Atom((0..sig.num_tests()).fold(0, |acc, i| acc | ((lits(VarId(i)) == Some(true)) as u32) << i))
    };
    let mut atoms = Vec::new();
    let mut letters = Vec::new();
    for l in &w.0 {
        atoms.push(atom_of(&|v| l.constraint(v)));
        let p = (0..sig.num_letters().max(1))
            .find(|&p| (0..sig.code_bits()).all(|j| l.constraint(sig.code_var(j)).map_or(true, |b| b == ((p >> j) & 1 == 1))))
            .unwrap_or(0);
        letters.push(p);
    }
    let (ox, oy) = outputs;
    let diff = if incl {
        let noy = kat.tests.neg(oy);
        kat.tests.cnj(ox, noy)
    } else {
        kat.tests.xor(ox, oy)
    };
    let path = kat.tests.find_path(diff, |b| *b).unwrap_or_default();
    let last = atom_of(&|v| path.iter().find(|(u, _)| *u == v).map(|&(_, b)| b));
    atoms.push(last);
    let left = *kat.tests.eval(ox, &sig.atom_assignment(last));
    (GuardedString::new(atoms, letters), left)
}

impl Outcome {
    /// Human-readable summary of the counter-example, if any.
    pub fn describe(&self, sig: &Signature) -> Option<String> {
        self.witness.as_ref().map(|w| w.describe(sig))
    }
}

impl Witness {
    pub fn describe(&self, sig: &Signature) -> String {
        let side = if self.left_accepts { "first" } else { "second" };
        format!(
            "counter-example: {}\n  e.g. {} (accepted by the {} expression only)",
            self.word.render(|v| sig.var_name(v)),
            self.guarded.render(sig),
            side
        )
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Equiv => "equiv",
            Mode::Incl => "incl",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kat::gs_member;

    fn sig() -> Signature {
        Signature::new(["a", "b"], ["p", "q"])
    }

    fn all_configs(mode: Mode) -> Vec<CheckConfig> {
        let mut out = Vec::new();
        for method in Method::ALL {
            for algo in Algo::ALL {
                out.push(CheckConfig {
                    method,
                    algo,
                    mode,
                    ..CheckConfig::default()
                });
            }
        }
        out
    }

    #[test]
    fn reflexive() {
        for cfg in all_configs(Mode::Equiv) {
            let o = check_text(&cfg, &sig(), "(a;p+q)*;!b", "(a;p+q)*;!b").unwrap();
            assert!(o.holds, "{cfg:?}");
        }
    }

    #[test]
    fn guarded_letters_differ() {
        let s = sig();
        let (x, y) = (parse(&s, "a;p").unwrap(), parse(&s, "a;q").unwrap());
        for cfg in all_configs(Mode::Equiv) {
            let o = check(&cfg, &s, &x, &y).unwrap();
            assert!(!o.holds);
            let w = o.witness.unwrap();
            assert_eq!(w.word.len(), 1, "{cfg:?}");
            let letter = &w.word.0[0];
            assert_eq!(letter.constraint(VarId(0)), Some(true), "{cfg:?}");
            assert!(letter.constraint(s.code_var(0)).is_some(), "{cfg:?}");
            assert_ne!(gs_member(&s, &x, &w.guarded), gs_member(&s, &y, &w.guarded));
            assert_eq!(gs_member(&s, &x, &w.guarded), w.left_accepts);
        }
    }

    #[test]
    fn inclusion_both_ways() {
        let s = sig();
        for cfg in all_configs(Mode::Incl) {
            assert!(check_text(&cfg, &s, "a;p", "p + q").unwrap().holds, "{cfg:?}");
            let o = check_text(&cfg, &s, "p + q", "a;p").unwrap();
            assert!(!o.holds, "{cfg:?}");
            let w = o.witness.unwrap();
            assert!(w.left_accepts);
            assert!(gs_member(&s, &parse(&s, "p+q").unwrap(), &w.guarded));
            assert!(!gs_member(&s, &parse(&s, "a;p").unwrap(), &w.guarded));
        }
    }

    #[test]
    fn naive_cap() {
        let s = Signature::numbered(12, 2);
        let cfg = CheckConfig {
            algo: Algo::Naive,
            ..CheckConfig::default()
        };
        assert!(matches!(
            check_text(&cfg, &s, "p0", "p1"),
            Err(CheckError::NaiveTooLarge { letters: 8192, cap: 4096 })
        ));
    }

    #[test]
    fn names_are_validated() {
        assert!(matches!(
            signature(&["a".into(), "bc".into()], &[]),
            Err(CheckError::BadName(_))
        ));
        assert!(matches!(
            signature(&["a".into()], &["a".into()]),
            Err(CheckError::DuplicateName(_))
        ));
    }
}
