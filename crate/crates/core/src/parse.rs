//! Concrete syntax for KAT expressions.
//!
//! ```text
//! sum     ::= prod (('+' | '|') prod)*
//! prod    ::= postfix ((';' | '&')? postfix)*  juxtaposition is product
//! postfix ::= unary '*'*
//! unary   ::= ('!' | '~') unary | atom
//! atom    ::= ident | '1' | '0' | '(' sum ')'
//! ident   ::= [A-Za-z] [0-9_]*
//! ```
//!
//! An identifier is a single ASCII letter optionally followed by digits and
//! underscores, so `ap` reads as `a;p` and `a10p2` as `a10;p2`. It must be
//! declared either as a test or as a letter. Negation binds tighter than
//! star, which binds tighter than product, which binds tighter than sum.
//! `!`, `&` and `|` only accept tests; `+` and `;` over tests build tests.

use thiserror::Error;

use crate::kat::{KatExpr, Signature, TestExpr};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("undeclared identifier `{name}` at byte {pos}")]
    Undeclared { pos: usize, name: String },
    #[error("`{op}` at byte {pos} expects tests")]
    NotATest { pos: usize, op: char },
}

/// Checks that a declared name can be written in the concrete syntax.
pub fn valid_identifier(name: &str) -> bool {
    let mut cs = name.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic()) && cs.all(|c| c.is_ascii_digit() || c == '_')
}

pub fn parse(sig: &Signature, text: &str) -> Result<KatExpr, ParseError> {
    let mut p = Parser { sig, s: text.as_bytes(), pos: 0 };
    let e = p.sum()?;
    p.skip_ws();
    if p.pos < p.s.len() {
        return Err(p.err(format!("unexpected `{}`", p.s[p.pos] as char)));
    }
    Ok(e)
}

/// The test denoted by an expression built from tests only.
pub fn as_test(e: &KatExpr) -> Option<TestExpr> {
    match e {
        KatExpr::Test(t) => Some(t.clone()),
        KatExpr::Sum(a, b) => Some(TestExpr::or(as_test(a)?, as_test(b)?)),
        KatExpr::Prod(a, b) => Some(TestExpr::and(as_test(a)?, as_test(b)?)),
        KatExpr::Letter(_) | KatExpr::Star(_) => None,
    }
}

struct Parser<'a> {
    sig: &'a Signature,
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    // Both binary operators associate to the right, matching the shape
    // the smart constructors produce.
    fn sum(&mut self) -> Result<KatExpr, ParseError> {
        let lhs = self.prod()?;
        let Some(c @ (b'+' | b'|')) = self.peek() else {
            return Ok(lhs);
        };
        let at = self.pos;
        self.pos += 1;
        let rhs = self.sum()?;
        if c == b'|' {
            match (as_test(&lhs), as_test(&rhs)) {
                (Some(a), Some(b)) => Ok(KatExpr::Test(TestExpr::or(a, b))),
                _ => Err(ParseError::NotATest { pos: at, op: '|' }),
            }
        } else {
            Ok(KatExpr::raw_sum(lhs, rhs))
        }
    }

    fn prod(&mut self) -> Result<KatExpr, ParseError> {
        let lhs = self.postfix()?;
        let at = self.pos;
        let op = match self.peek() {
            Some(c @ (b';' | b'&')) => {
                self.pos += 1;
                c
            }
            Some(c) if starts_unary(c) => b';',
            _ => return Ok(lhs),
        };
        let rhs = self.prod()?;
        if op == b'&' {
            match (as_test(&lhs), as_test(&rhs)) {
                (Some(a), Some(b)) => Ok(KatExpr::Test(TestExpr::and(a, b))),
                _ => Err(ParseError::NotATest { pos: at, op: '&' }),
            }
        } else {
            Ok(KatExpr::raw_prod(lhs, rhs))
        }
    }

    fn unary(&mut self) -> Result<KatExpr, ParseError> {
        match self.peek() {
            Some(c @ (b'!' | b'~')) => {
                let at = self.pos;
                self.pos += 1;
                let e = self.unary()?;
                match as_test(&e) {
                    Some(t) => Ok(KatExpr::Test(TestExpr::not(t))),
                    None => Err(ParseError::NotATest { pos: at, op: c as char }),
                }
            }
            _ => self.atom(),
        }
    }

    fn postfix(&mut self) -> Result<KatExpr, ParseError> {
        let mut e = self.unary()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            e = KatExpr::raw_star(e);
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<KatExpr, ParseError> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.sum()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(KatExpr::one())
            }
            Some(b'0') => {
                self.pos += 1;
                Ok(KatExpr::zero())
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                self.pos += 1;
                while self.pos < self.s.len() && (self.s[self.pos].is_ascii_digit() || self.s[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
                if let Some(i) = self.sig.test_index(name) {
                    Ok(KatExpr::Test(TestExpr::Var(i)))
                } else if let Some(p) = self.sig.letter_index(name) {
                    Ok(KatExpr::Letter(p))
                } else {
                    Err(ParseError::Undeclared {
                        pos: start,
                        name: name.to_string(),
                    })
                }
            }
            Some(c) => Err(self.err(format!("unexpected `{}`", c as char))),
        }
    }
}

fn starts_unary(c: u8) -> bool {
    c.is_ascii_alphabetic() || matches!(c, b'(' | b'1' | b'0' | b'!' | b'~')
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new(["a", "b"], ["p", "q"])
    }

    fn t(i: u32) -> KatExpr {
        KatExpr::Test(TestExpr::Var(i))
    }

    #[test]
    fn guarded_choice() {
        let e = parse(&sig(), "a;p + !a;q").unwrap();
        let expected = KatExpr::raw_sum(
            KatExpr::raw_prod(t(0), KatExpr::Letter(0)),
            KatExpr::raw_prod(KatExpr::Test(TestExpr::not(TestExpr::Var(0))), KatExpr::Letter(1)),
        );
        assert_eq!(e, expected);
        assert_eq!(parse(&sig(), "ap+~aq").unwrap(), expected);
    }

    #[test]
    fn nested_star() {
        assert_eq!(
            parse(&sig(), "p**").unwrap(),
            KatExpr::raw_star(KatExpr::raw_star(KatExpr::Letter(0)))
        );
    }

    #[test]
    fn precedence() {
        // !a* is (!a)*, pq* is p(q*), p+qp is p+(qp)
        assert_eq!(
            parse(&sig(), "!a*").unwrap(),
            KatExpr::raw_star(KatExpr::Test(TestExpr::not(TestExpr::Var(0))))
        );
        assert_eq!(
            parse(&sig(), "pq*").unwrap(),
            KatExpr::raw_prod(KatExpr::Letter(0), KatExpr::raw_star(KatExpr::Letter(1)))
        );
        assert_eq!(
            parse(&sig(), "p;q;p").unwrap(),
            KatExpr::raw_prod(KatExpr::Letter(0), KatExpr::raw_prod(KatExpr::Letter(1), KatExpr::Letter(0)))
        );
        assert_eq!(
            parse(&sig(), "p+qp").unwrap(),
            KatExpr::raw_sum(KatExpr::Letter(0), KatExpr::raw_prod(KatExpr::Letter(1), KatExpr::Letter(0)))
        );
    }

    #[test]
    fn test_connectives() {
        assert_eq!(
            parse(&sig(), "a&b|!b").unwrap(),
            KatExpr::Test(TestExpr::or(
                TestExpr::and(TestExpr::Var(0), TestExpr::Var(1)),
                TestExpr::not(TestExpr::Var(1))
            ))
        );
        assert_eq!(
            parse(&sig(), "!(!a+!b)").unwrap(),
            KatExpr::Test(TestExpr::not(TestExpr::or(
                TestExpr::not(TestExpr::Var(0)),
                TestExpr::not(TestExpr::Var(1))
            )))
        );
        assert!(matches!(parse(&sig(), "!p"), Err(ParseError::NotATest { pos: 0, op: '!' })));
        assert!(matches!(parse(&sig(), "a&p"), Err(ParseError::NotATest { op: '&', .. })));
    }

    #[test]
    fn errors() {
        assert!(matches!(parse(&sig(), "("), Err(ParseError::Syntax { pos: 1, .. })));
        assert!(matches!(parse(&sig(), "p)"), Err(ParseError::Syntax { pos: 1, .. })));
        assert!(matches!(parse(&sig(), ""), Err(ParseError::Syntax { .. })));
        assert_eq!(
            parse(&sig(), "p + z"),
            Err(ParseError::Undeclared {
                pos: 4,
                name: "z".into()
            })
        );
        assert!(matches!(parse(&sig(), "p + $"), Err(ParseError::Syntax { pos: 4, .. })));
    }

    #[test]
    fn numbered_identifiers() {
        let s = Signature::numbered(2, 11);
        assert_eq!(
            parse(&s, "a1p10").unwrap(),
            KatExpr::raw_prod(t(1), KatExpr::Letter(10))
        );
        assert!(valid_identifier("p10"));
        assert!(!valid_identifier("pq"));
        assert!(!valid_identifier("1p"));
    }

    #[test]
    fn render_parses_back() {
        let s = sig();
        for text in ["a;p + !a;q", "(p+q)*;a", "!(a&b)*;p", "p;(q;p)* + 1", "a|b", "(p;q);p + (p+q)+a", "(a|b)&!(a&b)"] {
            let e = parse(&s, text).unwrap();
            assert_eq!(parse(&s, &e.render(&s)).unwrap(), e, "{text}");
        }
    }
}
