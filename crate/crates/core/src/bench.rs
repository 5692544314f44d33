//! Random saturated pairs, checked by every construction with the symbolic
//! and forest-based algorithms.

use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use crate::automata::AutomatonError;
use crate::check::{check, Algo, CheckConfig, CheckError, Mode};
use crate::construct::Method;
use crate::kat::{KatExpr, Signature};
use crate::random::{random_expr, rng, saturate, ExprConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BenchConfig {
    pub tests: u32,
    pub letters: u32,
    pub connectives: usize,
    pub pairs: usize,
    pub saturate: bool,
    pub seed: u64,
    /// Derivative automata may expand this many times as many states as
    /// the partial-derivative one on the same pair and algorithm.
    pub brz_cap_factor: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            tests: 7,
            letters: 7,
            connectives: 70,
            pairs: 100,
            saturate: true,
            seed: 0,
            brz_cap_factor: 10,
        }
    }
}

pub const ALGOS: [Algo; 2] = [Algo::Symb, Algo::Dsf];

/// One line of the CSV report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Row {
    pub method: &'static str,
    pub algo: &'static str,
    pub pair_id: usize,
    pub verdict: &'static str,
    pub output_tests: usize,
    pub pairs_pushed: usize,
    pub millis: u128,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub method: Method,
    pub algo: Algo,
    pub millis: u128,
    pub output_tests: usize,
    pub equivalent: usize,
    pub not_equivalent: usize,
    pub capped: usize,
}

#[derive(Clone, Debug, Default)]
pub struct BenchReport {
    pub rows: Vec<Row>,
    pub diagnostics: Vec<String>,
}

pub fn signature(cfg: &BenchConfig) -> Signature {
    Signature::numbered(cfg.tests as usize, cfg.letters as usize)
}

/// The pairs of a run, derived from the seed alone.
pub fn pairs(cfg: &BenchConfig) -> Vec<(KatExpr, KatExpr)> {
    let mut r = rng(cfg.seed);
    let ec = ExprConfig {
        tests: cfg.tests,
        letters: cfg.letters,
        connectives: cfg.connectives,
    };
    (0..cfg.pairs)
        .map(|_| {
            let x = random_expr(&mut r, &ec);
            let y = random_expr(&mut r, &ec);
            if cfg.saturate {
                (saturate(x, cfg.letters), saturate(y, cfg.letters))
            } else {
                (x, y)
            }
        })
        .collect()
}

pub fn bench(cfg: &BenchConfig) -> Result<BenchReport, CheckError> {
    let sig = signature(cfg);
    let mut report = BenchReport::default();
    for (id, (x, y)) in pairs(cfg).iter().enumerate() {
        for algo in ALGOS {
            let mut ant_states: Option<usize> = None;
            for method in [Method::Ant, Method::Iy, Method::Brz] {
                let state_cap = match (method, ant_states) {
                    (Method::Brz, Some(n)) => Some((n * cfg.brz_cap_factor).max(1)),
                    _ => None,
                };
                let cc = CheckConfig {
                    method,
                    algo,
                    mode: Mode::Equiv,
                    state_cap,
                    ..CheckConfig::default()
                };
                let start = Instant::now();
                let result = check(&cc, &sig, x, y);
                let millis = start.elapsed().as_millis();
                let (verdict, output_tests, pairs_pushed) = match result {
                    Ok(o) => {
                        if method == Method::Ant {
                            ant_states = Some(o.states);
                        }
                        let v = if o.holds { "equivalent" } else { "not-equivalent" };
                        (v, o.stats.output_tests, o.stats.pairs_pushed)
                    }
                    Err(CheckError::Automaton(AutomatonError::StateCapExceeded { cap })) => {
                        report.diagnostics.push(format!(
                            "pair {id}, {} {}: more than {cap} states ({}x the partial-derivative automaton), stopped",
                            method.name(),
                            algo.name(),
                            cfg.brz_cap_factor
                        ));
                        ("capped", 0, 0)
                    }
                    Err(e) => return Err(e),
                };
                report.rows.push(Row {
                    method: method.name(),
                    algo: algo.name(),
                    pair_id: id,
                    verdict,
                    output_tests,
                    pairs_pushed,
                    millis,
                });
            }
        }
    }
    report.rows.sort_by_key(|r| (method_rank(r.method), r.algo != "symb", r.pair_id));
    Ok(report)
}

fn method_rank(name: &str) -> usize {
    Method::ALL.iter().position(|m| m.name() == name).unwrap_or(usize::MAX)
}

impl BenchReport {
    /// Totals per construction and algorithm.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for method in Method::ALL {
            for algo in ALGOS {
                let rows = self.rows.iter().filter(|r| r.method == method.name() && r.algo == algo.name());
                let mut cell = Cell {
                    method,
                    algo,
                    millis: 0,
                    output_tests: 0,
                    equivalent: 0,
                    not_equivalent: 0,
                    capped: 0,
                };
                for r in rows {
                    cell.millis += r.millis;
                    cell.output_tests += r.output_tests;
                    match r.verdict {
                        "equivalent" => cell.equivalent += 1,
                        "not-equivalent" => cell.not_equivalent += 1,
                        _ => cell.capped += 1,
                    }
                }
                out.push(cell);
            }
        }
        out
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut out = csv::Writer::from_writer(w);
        for r in &self.rows {
            out.serialize(r)?;
        }
        out.flush()?;
        Ok(())
    }

    /// A table with one line per construction and one column group per
    /// algorithm: time in seconds and total output tests.
    pub fn table(&self) -> String {
        let cells = self.cells();
        let mut s = String::new();
        s.push_str(&format!("{:<8}", "method"));
        for algo in ALGOS {
            s.push_str(&format!("{:>12}{:>14}", format!("{} (s)", algo.name()), format!("{} tests", algo.name())));
        }
        s.push_str(&format!("{:>10}\n", "capped"));
        for method in Method::ALL {
            s.push_str(&format!("{:<8}", method.name()));
            let mut capped = 0;
            for algo in ALGOS {
                let c = cells.iter().find(|c| c.method == method && c.algo == algo).unwrap();
                s.push_str(&format!("{:>12.2}{:>14}", c.millis as f64 / 1000.0, c.output_tests));
                capped += c.capped;
            }
            s.push_str(&format!("{capped:>10}\n"));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_is_deterministic_and_equivalent() {
        let cfg = BenchConfig {
            tests: 2,
            letters: 2,
            connectives: 8,
            pairs: 5,
            seed: 3,
            ..BenchConfig::default()
        };
        let a = bench(&cfg).unwrap();
        let b = bench(&cfg).unwrap();
        assert_eq!(a.rows.len(), 5 * 6);
        assert!(a.rows.iter().all(|r| r.verdict == "equivalent"));
        let strip = |r: &BenchReport| r.rows.iter().map(|r| (r.method, r.algo, r.pair_id, r.verdict, r.output_tests)).collect::<Vec<_>>();
        assert_eq!(strip(&a), strip(&b));
        let mut csv = Vec::new();
        a.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("method,algo,pair_id,verdict,output_tests,pairs_pushed,millis\n"));
        assert_eq!(text.lines().count(), 31);
        assert!(a.table().contains("brz"));
    }
}
