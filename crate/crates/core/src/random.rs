//! Seeded random KAT expressions.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::kat::{KatExpr, TestExpr};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExprConfig {
    pub tests: u32,
    pub letters: u32,
    pub connectives: usize,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// An expression with exactly `cfg.connectives` occurrences of `+`, `·`
/// and `*`, each node's operator drawn uniformly. Leaves are tests or
/// letters with equal probability; a test leaf is a literal or the
/// conjunction of two literals on distinct tests. `0` never occurs.
pub fn random_expr<R: Rng>(rng: &mut R, cfg: &ExprConfig) -> KatExpr {
    assert!(cfg.tests > 0 || cfg.letters > 0, "nothing to build leaves from");
    gen(rng, cfg, cfg.connectives)
}

fn gen<R: Rng>(rng: &mut R, cfg: &ExprConfig, n: usize) -> KatExpr {
    if n == 0 {
        return leaf(rng, cfg);
    }
    match rng.gen_range(0..3) {
        0 => KatExpr::raw_star(gen(rng, cfg, n - 1)),
        op => {
            let k = rng.gen_range(0..n);
            let a = gen(rng, cfg, k);
            let b = gen(rng, cfg, n - 1 - k);
            if op == 1 {
                KatExpr::raw_sum(a, b)
            } else {
                KatExpr::raw_prod(a, b)
            }
        }
    }
}

fn literal<R: Rng>(rng: &mut R, i: u32) -> TestExpr {
    if rng.gen_bool(0.5) {
        TestExpr::Var(i)
    } else {
        TestExpr::not(TestExpr::Var(i))
    }
}

fn leaf<R: Rng>(rng: &mut R, cfg: &ExprConfig) -> KatExpr {
    let test = cfg.letters == 0 || (cfg.tests > 0 && rng.gen_bool(0.5));
    if !test {
        return KatExpr::Letter(rng.gen_range(0..cfg.letters));
    }
    let i = rng.gen_range(0..cfg.tests);
    if cfg.tests >= 2 && rng.gen_bool(0.5) {
        let mut j = rng.gen_range(0..cfg.tests - 1);
        if j >= i {
            j += 1;
        }
        KatExpr::Test(TestExpr::and(literal(rng, i), literal(rng, j)))
    } else {
        KatExpr::Test(literal(rng, i))
    }
}

/// `(p1 + … + pk)*` over all letters.
pub fn sigma_star(letters: u32) -> KatExpr {
    assert!(letters > 0);
    let sum = (1..letters).fold(KatExpr::Letter(0), |acc, p| KatExpr::raw_sum(acc, KatExpr::Letter(p)));
    KatExpr::raw_star(sum)
}

/// `x + Σ*`, equivalent to `Σ*` whatever `x`.
pub fn saturate(x: KatExpr, letters: u32) -> KatExpr {
    KatExpr::raw_sum(x, sigma_star(letters))
}

/// A pair of saturated random expressions, hence an equivalent pair.
pub fn saturated_pair<R: Rng>(rng: &mut R, cfg: &ExprConfig) -> (KatExpr, KatExpr) {
    let x = random_expr(rng, cfg);
    let y = random_expr(rng, cfg);
    (saturate(x, cfg.letters), saturate(y, cfg.letters))
}

/// Pairs of small expressions of mixed kinds: unrelated expressions, pairs
/// related by a law of KAT, and a random expression against a perturbed
/// copy of itself. Neither side has more than `max_connectives`
/// connectives.
pub fn mixed_pair<R: Rng>(rng: &mut R, tests: u32, letters: u32, max_connectives: usize) -> (KatExpr, KatExpr) {
    loop {
        let (x, y) = match rng.gen_range(0..4) {
            0 => {
                let a = sized(rng, tests, letters, max_connectives);
                let b = sized(rng, tests, letters, max_connectives);
                (a, b)
            }
            1 | 2 => {
                let x = sized(rng, tests, letters, max_connectives / 2);
                law_pair(rng, tests, letters, &x)
            }
            _ => {
                let x = sized(rng, tests, letters, max_connectives);
                let y = perturb(rng, tests, letters, &x);
                (x, y)
            }
        };
        if x.connectives() <= max_connectives && y.connectives() <= max_connectives {
            return if rng.gen_bool(0.5) { (x, y) } else { (y, x) };
        }
    }
}

fn sized<R: Rng>(rng: &mut R, tests: u32, letters: u32, max: usize) -> KatExpr {
    let connectives = rng.gen_range(0..=max);
    random_expr(rng, &ExprConfig { tests, letters, connectives })
}

// Two expressions equal in every KAT, built around `x`.
fn law_pair<R: Rng>(rng: &mut R, tests: u32, letters: u32, x: &KatExpr) -> (KatExpr, KatExpr) {
    use KatExpr as E;
    let small = |rng: &mut R| sized(rng, tests, letters, 2);
    match rng.gen_range(0..8) {
        0 => match x {
            E::Sum(a, b) => (x.clone(), E::raw_sum((**b).clone(), (**a).clone())),
            _ => (x.clone(), E::raw_sum(x.clone(), x.clone())),
        },
        // x* = 1 + xx*
        1 => (
            E::raw_star(x.clone()),
            E::raw_sum(E::raw_prod(x.clone(), E::raw_star(x.clone())), E::one()),
        ),
        // (x+y)* = x*(yx*)*
        2 => {
            let y = small(rng);
            let xs = E::raw_star(x.clone());
            (
                E::raw_star(E::raw_sum(x.clone(), y.clone())),
                E::raw_prod(xs.clone(), E::raw_star(E::raw_prod(y, xs))),
            )
        }
        // φx + ¬φx = x
        3 => {
            let phi = leaf_test(rng, tests);
            let y = E::raw_sum(
                E::raw_prod(E::Test(phi.clone()), x.clone()),
                E::raw_prod(E::Test(TestExpr::not(phi)), x.clone()),
            );
            (x.clone(), y)
        }
        // x(y + z) = xy + xz
        4 => {
            let (y, z) = (small(rng), small(rng));
            (
                E::raw_prod(x.clone(), E::raw_sum(y.clone(), z.clone())),
                E::raw_sum(E::raw_prod(x.clone(), y), E::raw_prod(x.clone(), z)),
            )
        }
        // (xy)*x = x(yx)*
        5 => {
            let y = small(rng);
            (
                E::raw_prod(E::raw_star(E::raw_prod(x.clone(), y.clone())), x.clone()),
                E::raw_prod(x.clone(), E::raw_star(E::raw_prod(y, x.clone()))),
            )
        }
        // φ(¬φy)*x + ¬φx = x
        6 => {
            let phi = leaf_test(rng, tests);
            let not_phi = E::Test(TestExpr::not(phi.clone()));
            let guarded = E::raw_star(E::raw_prod(not_phi.clone(), small(rng)));
            let y = E::raw_sum(
                E::raw_prod(E::raw_prod(E::Test(phi), guarded), x.clone()),
                E::raw_prod(not_phi, x.clone()),
            );
            (x.clone(), y)
        }
        // x** = x*
        _ => (E::raw_star(x.clone()), E::raw_star(E::raw_star(x.clone()))),
    }
}

fn leaf_test<R: Rng>(rng: &mut R, tests: u32) -> TestExpr {
    if tests == 0 {
        return TestExpr::True;
    }
    let i = rng.gen_range(0..tests);
    literal(rng, i)
}

// Replaces one leaf of `x` by a fresh one.
fn perturb<R: Rng>(rng: &mut R, tests: u32, letters: u32, x: &KatExpr) -> KatExpr {
    let leaves = count_leaves(x);
    let target = rng.gen_range(0..leaves);
    let cfg = ExprConfig { tests, letters, connectives: 0 };
    let fresh = leaf(rng, &cfg);
    replace_leaf(x, &mut { target }, &fresh)
}

fn count_leaves(x: &KatExpr) -> usize {
    match x {
        KatExpr::Test(_) | KatExpr::Letter(_) => 1,
        KatExpr::Sum(a, b) | KatExpr::Prod(a, b) => count_leaves(a) + count_leaves(b),
        KatExpr::Star(a) => count_leaves(a),
    }
}

fn replace_leaf(x: &KatExpr, k: &mut usize, fresh: &KatExpr) -> KatExpr {
    match x {
        KatExpr::Test(_) | KatExpr::Letter(_) => {
            let out = if *k == 0 { fresh.clone() } else { x.clone() };
            *k = k.wrapping_sub(1);
            out
        }
        KatExpr::Sum(a, b) => KatExpr::raw_sum(replace_leaf(a, k, fresh), replace_leaf(b, k, fresh)),
        KatExpr::Prod(a, b) => KatExpr::raw_prod(replace_leaf(a, k, fresh), replace_leaf(b, k, fresh)),
        KatExpr::Star(a) => KatExpr::raw_star(replace_leaf(a, k, fresh)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_connective_count_and_no_zero() {
        let mut r = rng(7);
        for n in 0..40 {
            let cfg = ExprConfig {
                tests: 3,
                letters: 2,
                connectives: n,
            };
            let e = random_expr(&mut r, &cfg);
            assert_eq!(e.connectives(), n);
            assert!(!e.mentions_zero());
        }
    }

    #[test]
    fn deterministic() {
        let cfg = ExprConfig {
            tests: 7,
            letters: 7,
            connectives: 70,
        };
        assert_eq!(random_expr(&mut rng(42), &cfg), random_expr(&mut rng(42), &cfg));
        assert_ne!(random_expr(&mut rng(42), &cfg), random_expr(&mut rng(43), &cfg));
    }

    #[test]
    fn mixed_pairs_respect_the_size_bound() {
        let mut r = rng(1);
        for _ in 0..300 {
            let (x, y) = mixed_pair(&mut r, 2, 2, 12);
            assert!(x.connectives() <= 12 && y.connectives() <= 12);
            assert!(!x.mentions_zero() && !y.mentions_zero());
        }
    }
}
