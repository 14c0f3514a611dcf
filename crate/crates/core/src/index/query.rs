//! Boolean query trees over analyzed terms.
//!
//! The textual syntax mirrors the Lucene subset used for expanded queries:
//! `(youth OR adolescent OR "young people") AND unemployment`. Operators are
//! the upper-case words `AND` and `OR`; juxtaposed clauses are joined with a
//! caller-chosen default operator. One nesting level may not mix operators
//! without parentheses.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::AnalyzerConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Operator {
    And,
    #[default]
    Or,
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operator::And => "AND",
            Operator::Or => "OR",
        })
    }
}

impl FromStr for Operator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "AND" => Ok(Operator::And),
            "OR" => Ok(Operator::Or),
            _ => Err(Error::validation(format!(
                "unknown operator {s:?} (expected AND or OR)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BooleanQuery {
    Term(String),
    Phrase(Vec<String>),
    Group(Operator, Vec<BooleanQuery>),
}

impl BooleanQuery {
    pub fn term(t: impl Into<String>) -> Self {
        BooleanQuery::Term(t.into())
    }

    pub fn phrase<I, S>(terms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        BooleanQuery::Phrase(terms.into_iter().map(Into::into).collect())
    }

    pub fn and(children: Vec<BooleanQuery>) -> Self {
        BooleanQuery::Group(Operator::And, children)
    }

    pub fn or(children: Vec<BooleanQuery>) -> Self {
        BooleanQuery::Group(Operator::Or, children)
    }

    /// Leaf for an analyzed label: one term becomes `Term`, several become
    /// `Phrase`, none yields `None`.
    pub fn leaf(terms: Vec<String>) -> Option<Self> {
        match terms.len() {
            0 => None,
            1 => terms.into_iter().next().map(BooleanQuery::Term),
            _ => Some(BooleanQuery::Phrase(terms)),
        }
    }

    /// Distinct terms appearing in any `Term` or `Phrase` leaf.
    pub fn terms(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_terms(&mut out);
        out
    }

    fn collect_terms<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            BooleanQuery::Term(t) => {
                out.insert(t.as_str());
            }
            BooleanQuery::Phrase(ts) => out.extend(ts.iter().map(String::as_str)),
            BooleanQuery::Group(_, children) => {
                for c in children {
                    c.collect_terms(out);
                }
            }
        }
    }

    /// Checks structural invariants: groups have children, phrases have at
    /// least two terms, terms are non-empty. A query without any term is
    /// reported as [`Error::EmptyQuery`].
    pub fn validate(&self) -> Result<()> {
        if self.terms().is_empty() {
            return Err(Error::EmptyQuery);
        }
        self.validate_node()
    }

    fn validate_node(&self) -> Result<()> {
        match self {
            BooleanQuery::Term(t) if t.is_empty() => Err(Error::validation("empty term in query")),
            BooleanQuery::Term(_) => Ok(()),
            BooleanQuery::Phrase(ts) if ts.len() < 2 => {
                Err(Error::validation("phrase must contain at least two terms"))
            }
            BooleanQuery::Phrase(ts) if ts.iter().any(String::is_empty) => {
                Err(Error::validation("empty term in phrase"))
            }
            BooleanQuery::Phrase(_) => Ok(()),
            BooleanQuery::Group(_, children) if children.is_empty() => {
                Err(Error::validation("query group without clauses"))
            }
            BooleanQuery::Group(_, children) => children.iter().try_for_each(Self::validate_node),
        }
    }

    /// Parses the textual syntax, analyzing every bare word and quoted phrase
    /// with `analyzer`. Words that analyze to nothing are dropped; a bare word
    /// that analyzes to several terms becomes a phrase.
    pub fn parse(text: &str, analyzer: &AnalyzerConfig, default_op: Operator) -> Result<Self> {
        let tokens = lex(text)?;
        let mut parser = Parser {
            tokens,
            pos: 0,
            analyzer,
            default_op,
        };
        let query = parser.expr()?;
        if parser.pos != parser.tokens.len() {
            return Err(Error::validation("unbalanced ')' in query"));
        }
        query.ok_or(Error::EmptyQuery)
    }

    fn fmt_nested(&self, f: &mut fmt::Formatter<'_>, nested: bool) -> fmt::Result {
        match self {
            BooleanQuery::Term(t) => f.write_str(t),
            BooleanQuery::Phrase(ts) => write!(f, "\"{}\"", ts.join(" ")),
            BooleanQuery::Group(op, children) => {
                if nested {
                    f.write_str("(")?;
                }
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        write!(f, " {op} ")?;
                    }
                    c.fmt_nested(f, true)?;
                }
                if nested {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for BooleanQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_nested(f, false)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Open,
    Close,
    Op(Operator),
    Word(String),
    Quoted(String),
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' => {
                chars.next();
                tokens.push(Token::Open);
            }
            ')' => {
                chars.next();
                tokens.push(Token::Close);
            }
            '"' => {
                chars.next();
                let mut phrase = String::new();
                let mut closed = false;
                for (_, c) in chars.by_ref() {
                    if c == '"' {
                        closed = true;
                        break;
                    }
                    phrase.push(c);
                }
                if !closed {
                    return Err(Error::validation(format!(
                        "unterminated quote starting at byte {start}"
                    )));
                }
                tokens.push(Token::Quoted(phrase));
            }
            _ => {
                let mut end = text.len();
                while let Some(&(i, c)) = chars.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | '"') {
                        end = i;
                        break;
                    }
                    chars.next();
                }
                let word = &text[start..end];
                tokens.push(match word {
                    "AND" => Token::Op(Operator::And),
                    "OR" => Token::Op(Operator::Or),
                    _ => Token::Word(word.to_string()),
                });
            }
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    analyzer: &'a AnalyzerConfig,
    default_op: Operator,
}

impl Parser<'_> {
    // expr := primary ((op)? primary)*
    fn expr(&mut self) -> Result<Option<BooleanQuery>> {
        let mut children = Vec::new();
        let mut op: Option<Operator> = None;
        let mut expect_operand = true;
        while let Some(tok) = self.tokens.get(self.pos).cloned() {
            match tok {
                Token::Close => break,
                Token::Op(o) => {
                    if expect_operand {
                        return Err(Error::validation(format!("operator {o} without left operand")));
                    }
                    self.set_op(&mut op, o)?;
                    self.pos += 1;
                    expect_operand = true;
                    continue;
                }
                _ => {
                    if !expect_operand {
                        self.set_op(&mut op, self.default_op)?;
                    }
                }
            }
            if let Some(node) = self.primary()? {
                children.push(node);
            }
            expect_operand = false;
        }
        if expect_operand && op.is_some() {
            return Err(Error::validation("operator without right operand"));
        }
        Ok(match children.len() {
            0 => None,
            1 => children.pop(),
            _ => Some(BooleanQuery::Group(op.unwrap_or(self.default_op), children)),
        })
    }

    fn set_op(&self, current: &mut Option<Operator>, next: Operator) -> Result<()> {
        match current {
            Some(op) if *op != next => Err(Error::validation("mixed AND/OR at one level; add parentheses")),
            _ => {
                *current = Some(next);
                Ok(())
            }
        }
    }

    fn primary(&mut self) -> Result<Option<BooleanQuery>> {
        let tok = self.tokens[self.pos].clone();
        self.pos += 1;
        match tok {
            Token::Open => {
                let inner = self.expr()?;
                if self.tokens.get(self.pos) != Some(&Token::Close) {
                    return Err(Error::validation("missing ')' in query"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Token::Word(w) | Token::Quoted(w) => Ok(BooleanQuery::leaf(self.analyzer.terms(&w))),
            Token::Close | Token::Op(_) => unreachable!("handled by expr"),
        }
    }
}
