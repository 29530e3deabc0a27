//! Boolean term queries: `"ekonomi" AND ("prognos" OR "rapport")`.
//!
//! Precedence is NOT > AND > OR, parentheses override. Terms are quoted
//! strings or bare words; a multi-word term matches a contiguous run of
//! tokens. Matching is case-insensitive on whole tokens.

use std::collections::HashSet;
use std::fmt;

use super::MediaItem;
use crate::error::{Error, Result};
use crate::text::{tokenize, words};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BooleanQuery {
    /// Lowercased words of a term; one word for a plain term, several for a
    /// phrase.
    Term(Vec<String>),
    And(Vec<BooleanQuery>),
    Or(Vec<BooleanQuery>),
    Not(Box<BooleanQuery>),
}

impl BooleanQuery {
    pub fn term(text: &str) -> Self {
        BooleanQuery::Term(words(text))
    }

    pub fn matches(&self, item: &MediaItem) -> bool {
        self.matches_text(&item.full_text())
    }

    pub fn matches_text(&self, text: &str) -> bool {
        self.eval(&TokenSet::new(tokenize(text).into_inner()))
    }

    fn eval(&self, doc: &TokenSet) -> bool {
        match self {
            BooleanQuery::Term(phrase) => doc.contains_phrase(phrase),
            BooleanQuery::And(children) => children.iter().all(|c| c.eval(doc)),
            BooleanQuery::Or(children) => children.iter().any(|c| c.eval(doc)),
            BooleanQuery::Not(inner) => !inner.eval(doc),
        }
    }
}

impl fmt::Display for BooleanQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BooleanQuery::Term(w) => write!(f, "\"{}\"", w.join(" ")),
            BooleanQuery::Not(inner) => write!(f, "NOT {inner}"),
            BooleanQuery::And(c) | BooleanQuery::Or(c) => {
                let op = if matches!(self, BooleanQuery::And(_)) {
                    " AND "
                } else {
                    " OR "
                };
                f.write_str("(")?;
                for (i, child) in c.iter().enumerate() {
                    if i > 0 {
                        f.write_str(op)?;
                    }
                    write!(f, "{child}")?;
                }
                f.write_str(")")
            }
        }
    }
}

struct TokenSet {
    seq: Vec<String>,
    set: HashSet<String>,
}

impl TokenSet {
    fn new(seq: Vec<String>) -> Self {
        let set = seq.iter().cloned().collect();
        TokenSet { seq, set }
    }

    /// Words shorter than two characters never occur as tokens, so they are
    /// skipped in phrases and a term made only of them matches nothing.
    fn contains_phrase(&self, phrase: &[String]) -> bool {
        let phrase: Vec<String> = phrase
            .iter()
            .filter(|w| w.chars().nth(1).is_some())
            .cloned()
            .collect();
        match phrase.as_slice() {
            [] => false,
            [one] => self.set.contains(one),
            _ => {
                phrase.iter().all(|w| self.set.contains(w))
                    && self
                        .seq
                        .windows(phrase.len())
                        .any(|w| w == phrase.as_slice())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Term(String),
    And,
    Or,
    Not,
    Open,
    Close,
}

fn lex(input: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let mut chars = input.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '(' {
            chars.next();
            out.push((pos, Tok::Open));
        } else if c == ')' {
            chars.next();
            out.push((pos, Tok::Close));
        } else if c == '"' {
            chars.next();
            let mut term = String::new();
            let mut closed = false;
            for (_, ch) in chars.by_ref() {
                if ch == '"' {
                    closed = true;
                    break;
                }
                term.push(ch);
            }
            if !closed {
                return Err(Error::QuerySyntax {
                    position: pos,
                    message: "unterminated quoted term".into(),
                });
            }
            out.push((pos, Tok::Term(term)));
        } else {
            let mut word = String::new();
            while let Some(&(_, ch)) = chars.peek() {
                if ch.is_whitespace() || ch == '(' || ch == ')' || ch == '"' {
                    break;
                }
                word.push(ch);
                chars.next();
            }
            let tok = match word.as_str() {
                "AND" => Tok::And,
                "OR" => Tok::Or,
                "NOT" => Tok::Not,
                _ => Tok::Term(word),
            };
            out.push((pos, tok));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::QuerySyntax {
            position: self.here(),
            message: message.into(),
        })
    }

    fn or(&mut self) -> Result<BooleanQuery> {
        let mut parts = vec![self.and()?];
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            parts.push(self.and()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            BooleanQuery::Or(parts)
        })
    }

    fn and(&mut self) -> Result<BooleanQuery> {
        let mut parts = vec![self.not()?];
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            parts.push(self.not()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            BooleanQuery::And(parts)
        })
    }

    fn not(&mut self) -> Result<BooleanQuery> {
        if self.peek() == Some(&Tok::Not) {
            self.pos += 1;
            return Ok(BooleanQuery::Not(Box::new(self.not()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<BooleanQuery> {
        match self.peek().cloned() {
            Some(Tok::Term(text)) => {
                let w = words(&text);
                if w.is_empty() {
                    return self.error("empty term");
                }
                self.pos += 1;
                Ok(BooleanQuery::Term(w))
            }
            Some(Tok::Open) => {
                self.pos += 1;
                let inner = self.or()?;
                if self.peek() != Some(&Tok::Close) {
                    return self.error("expected `)`");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(Tok::Close) => self.error("unexpected `)`"),
            Some(Tok::And) | Some(Tok::Or) => self.error("operator without left operand"),
            Some(Tok::Not) => unreachable!("handled by not()"),
            None => self.error("expected a term"),
        }
    }
}

pub fn parse_query(text: &str) -> Result<BooleanQuery> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let q = p.or()?;
    match p.peek() {
        None => Ok(q),
        Some(Tok::Close) => p.error("unbalanced `)`"),
        Some(_) => p.error("expected AND, OR or end of query"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(w: &str) -> BooleanQuery {
        BooleanQuery::term(w)
    }

    #[test]
    fn parses_appendix_query() {
        let q = parse_query(r#""ekonomi" AND ("prognos" OR "rapport")"#).unwrap();
        assert_eq!(
            q,
            BooleanQuery::And(vec![
                t("ekonomi"),
                BooleanQuery::Or(vec![t("prognos"), t("rapport")])
            ])
        );
    }

    #[test]
    fn single_term_and_precedence() {
        assert_eq!(parse_query(r#""a""#).unwrap(), t("a"));
        assert_eq!(
            parse_query(r#"NOT "x" AND "y""#).unwrap(),
            BooleanQuery::And(vec![BooleanQuery::Not(Box::new(t("x"))), t("y")])
        );
        assert_eq!(
            parse_query(r#""a" OR "b" AND "c""#).unwrap(),
            BooleanQuery::Or(vec![t("a"), BooleanQuery::And(vec![t("b"), t("c")])])
        );
        assert_eq!(
            parse_query(r#"("a" OR "b") AND "c""#).unwrap(),
            BooleanQuery::And(vec![BooleanQuery::Or(vec![t("a"), t("b")]), t("c")])
        );
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let cases = [
            (r#"("a" OR "b""#, 11),
            (r#""a" AND"#, 7),
            (r#""a" )"#, 4),
            (r#"OR "a""#, 0),
            (r#""a" "b""#, 4),
            (r#""""#, 0),
            (r#""abc"#, 0),
        ];
        for (text, expected) in cases {
            match parse_query(text) {
                Err(Error::QuerySyntax { position, .. }) => {
                    assert_eq!(position, expected, "{text}")
                }
                other => panic!("{text}: expected syntax error, got {other:?}"),
            }
        }
    }

    #[test]
    fn evaluation() {
        let q = parse_query(r#""ekonomi" AND ("prognos" OR "rapport")"#).unwrap();
        assert!(q.matches_text("Ny rapport om svensk ekonomi"));
        assert!(!q.matches_text("Ekonomi i fokus"));
        let neg = parse_query(r#"NOT "kris""#).unwrap();
        assert!(!neg.matches_text("En KRIS i euroområdet"));
        assert!(neg.matches_text("krisen"));
    }

    #[test]
    fn phrases_match_contiguously() {
        let q = parse_query(r#""svensk ekonomi""#).unwrap();
        assert!(q.matches_text("Läget i svensk ekonomi"));
        assert!(!q.matches_text("ekonomi svensk"));
        assert!(!q.matches_text("svensk och ekonomi"));
    }

    proptest! {
        #[test]
        fn de_morgan(words in proptest::collection::vec("(aa|bb|cc|dd)", 0..8)) {
            let text = words.join(" ");
            let lhs = BooleanQuery::Not(Box::new(BooleanQuery::And(vec![t("aa"), t("bb")])));
            let rhs = BooleanQuery::Or(vec![
                BooleanQuery::Not(Box::new(t("aa"))),
                BooleanQuery::Not(Box::new(t("bb"))),
            ]);
            prop_assert_eq!(lhs.matches_text(&text), rhs.matches_text(&text));
        }

        #[test]
        fn display_reparses(words in proptest::collection::vec("(aa|bb|cc)", 1..4), neg in any::<bool>()) {
            let mut q = BooleanQuery::Or(words.iter().map(|w| t(w)).collect());
            if words.len() == 1 { q = t(&words[0]); }
            if neg { q = BooleanQuery::Not(Box::new(q)); }
            prop_assert_eq!(parse_query(&q.to_string()).unwrap(), q);
        }
    }
}
