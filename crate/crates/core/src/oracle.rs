//! Reference equivalence check for small alphabets, independent of BDDs.
//!
//! Two procedures are run and cross-checked:
//!
//! * bounded guarded-string languages, enumerated by [`g_upto`];
//! * the naive letter-by-letter bisimulation check on the DFA of explicit
//!   derivatives, with one letter per atom and action.
//!
//! The second one decides equivalence; the first one validates it: equal
//! expressions must have equal bounded languages, and a counter-example
//! found by the second one must separate the two languages.

use std::collections::VecDeque;

use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

use crate::kat::{delta_alpha_p, eps_alpha, g_upto, gs_member, shortest, Atom, GuardedString, KatExpr, Signature};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("explicit derivative automaton exceeds {0} states")]
    StateCap(usize),
    #[error("reference procedures disagree: {0}")]
    Discrepancy(String),
    #[error("signature too large for the reference procedures")]
    TooLarge,
}

pub const DEFAULT_STATE_CAP: usize = 50_000;

/// Explicit automaton of derivatives, states numbered on demand.
#[derive(Debug, Default)]
pub struct ExplicitDfa {
    states: Vec<KatExpr>,
    index: FxHashMap<KatExpr, usize>,
    outs: Vec<u64>,
    succ: FxHashMap<(usize, Atom, u32), usize>,
}

impl ExplicitDfa {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&mut self, sig: &Signature, x: KatExpr) -> usize {
        if let Some(&i) = self.index.get(&x) {
            return i;
        }
        let i = self.states.len();
        let out = sig.atoms().fold(0u64, |acc, a| acc | ((eps_alpha(a, &x) as u64) << a.0));
        self.outs.push(out);
        self.states.push(x.clone());
        self.index.insert(x, i);
        i
    }

    pub fn expr(&self, s: usize) -> &KatExpr {
        &self.states[s]
    }

    /// Atoms accepted by state `s`, as a bit mask.
    pub fn output(&self, s: usize) -> u64 {
        self.outs[s]
    }

    pub fn step(&mut self, sig: &Signature, s: usize, a: Atom, p: u32) -> usize {
        if let Some(&t) = self.succ.get(&(s, a, p)) {
            return t;
        }
        let d = delta_alpha_p(a, p, &self.states[s]);
        let t = self.state(sig, d);
        self.succ.insert((s, a, p), t);
        t
    }
}

/// Naive bisimulation check on explicit derivatives. Returns `None` when
/// equivalent, or a shortest guarded string accepted by exactly one side
/// (or by `x` only, when `incl` is set and `x ≤ y` fails).
pub fn explicit_check(
    sig: &Signature,
    x: &KatExpr,
    y: &KatExpr,
    incl: bool,
    cap: usize,
) -> Result<Option<GuardedString>, OracleError> {
    if sig.num_tests() > 6 {
        return Err(OracleError::TooLarge);
    }
    let mut m = ExplicitDfa::new();
    let sx = m.state(sig, x.clone());
    let sy = m.state(sig, y.clone());
    let mut seen: FxHashSet<(usize, usize)> = FxHashSet::default();
    // each entry remembers how it was reached
    let mut trail: Vec<(usize, Atom, u32)> = Vec::new();
    let mut todo: VecDeque<(usize, usize, Option<usize>)> = VecDeque::new();
    todo.push_back((sx, sy, None));
    while let Some((s, t, via)) = todo.pop_front() {
        if !seen.insert((s, t)) {
            continue;
        }
        let (os, ot) = (m.output(s), m.output(t));
        let bad = if incl { os & !ot } else { os ^ ot };
        if bad != 0 {
            let last = Atom(bad.trailing_zeros());
            let mut atoms = vec![last];
            let mut letters = Vec::new();
            let mut cur = via;
            while let Some(k) = cur {
                let (prev, a, p) = trail[k];
                atoms.push(a);
                letters.push(p);
                cur = if prev == usize::MAX { None } else { Some(prev) };
            }
            atoms.reverse();
            letters.reverse();
            return Ok(Some(GuardedString::new(atoms, letters)));
        }
        for a in sig.atoms() {
            for p in 0..sig.num_letters() {
                let (s2, t2) = (m.step(sig, s, a, p), m.step(sig, t, a, p));
                if m.len() > cap {
                    return Err(OracleError::StateCap(cap));
                }
                if !seen.contains(&(s2, t2)) {
                    trail.push((via.unwrap_or(usize::MAX), a, p));
                    todo.push_back((s2, t2, Some(trail.len() - 1)));
                }
            }
        }
    }
    Ok(None)
}

/// Equivalence by both reference procedures; bounded languages are
/// compared for guarded strings of at most `bound` letters.
pub fn oracle_check(sig: &Signature, x: &KatExpr, y: &KatExpr, bound: usize) -> Result<bool, OracleError> {
    oracle_run(sig, x, y, bound, false)
}

/// `x ≤ y` by both reference procedures.
pub fn oracle_incl(sig: &Signature, x: &KatExpr, y: &KatExpr, bound: usize) -> Result<bool, OracleError> {
    oracle_run(sig, x, y, bound, true)
}

fn oracle_run(sig: &Signature, x: &KatExpr, y: &KatExpr, bound: usize, incl: bool) -> Result<bool, OracleError> {
    let gx = g_upto(sig, x, bound);
    let gy = g_upto(sig, y, bound);
    let bounded = if incl { gx.is_subset(&gy) } else { gx == gy };
    let explicit = explicit_check(sig, x, y, incl, DEFAULT_STATE_CAP)?;
    match explicit {
        None if !bounded => {
            let diff = shortest(gx.symmetric_difference(&gy).cloned());
            Err(OracleError::Discrepancy(format!(
                "derivatives say yes, bounded languages differ on {}",
                diff.map(|u| u.render(sig)).unwrap_or_default()
            )))
        }
        None => Ok(true),
        Some(w) => {
            let (inx, iny) = (gs_member(sig, x, &w), gs_member(sig, y, &w));
            let separates = if incl { inx && !iny } else { inx != iny };
            if !separates {
                return Err(OracleError::Discrepancy(format!(
                    "derivative counter-example {} does not separate the languages",
                    w.render(sig)
                )));
            }
            if w.len() <= bound && bounded {
                return Err(OracleError::Discrepancy(format!(
                    "bounded languages agree up to {bound} letters but {} separates them",
                    w.render(sig)
                )));
            }
            Ok(false)
        }
    }
}
