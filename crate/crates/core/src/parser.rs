//! Text format for programs, goals and answers.
//!
//! ```text
//! program := { clause NEWLINE }          % comments run to end of line
//! clause  := atom "<-" LIT "-" [ atom { "," atom } ]
//! goal    := [ atom "#" QVAR { "," atom "#" QVAR } [ "|" bound { "," bound } ] ]
//! bound   := QVAR ( ">=" | "<=" ) LIT
//! answer  := [ "{" ] [ VAR "=" term { "," VAR "=" term } ] [ "}" ]
//!            [ "|" [ "{" ] [ QVAR "=" LIT { "," QVAR "=" LIT } ] [ "}" ] ]
//! ```
//!
//! `>=` is the domain order `⊒`. Over `W`, where `⊒` is numeric `≤`, `<=`
//! is accepted as a synonym.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::constraints::QualSubstitution;
use crate::domain::{Domain, QualValue};
use crate::syntax::{sym, Atom, Clause, GoalItem, InitialGoal, Program, QVar, Term};
use crate::unify::Substitution;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    /// Line number of `src`'s first line.
    first_line: usize,
    /// Answers may mention renamed variables; programs and goals may not.
    allow_reserved: bool,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str, first_line: usize) -> Self {
        Cursor {
            src,
            pos: 0,
            first_line,
            allow_reserved: false,
        }
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> ParseError {
        let before = &self.src[..pos];
        let line = self.first_line + before.matches('\n').count();
        let column = match before.rfind('\n') {
            Some(nl) => before[nl + 1..].chars().count() + 1,
            None => before.chars().count() + 1,
        };
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.pos, message)
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.src.len()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), ParseError> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{token}`")))
        }
    }

    fn identifier(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = self.rest();
        let mut chars = rest.char_indices();
        match chars.next() {
            Some((_, c)) if c.is_ascii_alphabetic() || c == '_' => {}
            _ => return None,
        }
        let end = chars
            .find(|(_, c)| !(c.is_ascii_alphanumeric() || *c == '_'))
            .map_or(rest.len(), |(i, _)| i);
        self.pos += end;
        Some(&rest[..end])
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let start = self.pos;
        let name = self.identifier().ok_or_else(|| self.error("expected a term"))?;
        if is_variable(name) {
            if is_reserved(name) && !self.allow_reserved {
                return Err(self.error_at(start, format!("variable `{name}` uses a reserved prefix")));
            }
            return Ok(Term::Var(sym(name)));
        }
        let args = self.arguments()?;
        Ok(Term::App(sym(name), args))
    }

    fn arguments(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut args = Vec::new();
        self.skip_ws();
        if self.peek() != Some('(') {
            return Ok(args);
        }
        self.pos += 1;
        loop {
            args.push(self.term()?);
            if self.eat(")") {
                return Ok(args);
            }
            self.expect(",")?;
        }
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let name = self.identifier().ok_or_else(|| self.error("expected an atom"))?;
        if is_variable(name) {
            return Err(self.error_at(start, format!("predicate `{name}` must start with a lowercase letter")));
        }
        let args = self.arguments()?;
        Ok(Atom {
            predicate: sym(name),
            args,
        })
    }

    fn qvar(&mut self) -> Result<QVar, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.identifier() {
            Some(name) if is_reserved(name) && !self.allow_reserved => {
                Err(self.error_at(start, format!("variable `{name}` uses a reserved prefix")))
            }
            Some(name) if is_variable(name) => Ok(QVar::new(name)),
            _ => Err(self.error_at(start, "expected a qualification variable")),
        }
    }

    /// A value literal: runs up to the next `,`, `|`, `}` or `-` at
    /// parenthesis depth zero.
    fn literal(&mut self, domain: &Domain, stop_at_dash: bool) -> Result<QualValue, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let mut depth = 0usize;
        let mut end = self.src.len();
        for (i, c) in self.rest().char_indices() {
            match c {
                '(' => depth += 1,
                ')' if depth == 0 => {
                    end = start + i;
                    break;
                }
                ')' => depth -= 1,
                ',' | '|' | '}' | '\n' if depth == 0 => {
                    end = start + i;
                    break;
                }
                '-' if depth == 0 && stop_at_dash => {
                    end = start + i;
                    break;
                }
                _ => {}
            }
        }
        let text = self.src[start..end].trim();
        if text.is_empty() {
            return Err(self.error("expected a value literal"));
        }
        self.pos = end;
        domain
            .parse_value(text)
            .map_err(|e| self.error_at(start, e.to_string()))
    }
}

fn is_variable(name: &str) -> bool {
    name.starts_with(|c: char| c.is_ascii_uppercase() || c == '_')
}

// `_` followed by a capital names variables made up during renaming
fn is_reserved(name: &str) -> bool {
    name.strip_prefix('_').is_some_and(|r| r.starts_with(|c: char| c.is_ascii_uppercase()))
}

fn strip_comment(line: &str) -> &str {
    match line.find('%') {
        Some(i) => &line[..i],
        None => line,
    }
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut cur = Cursor::new(text, 1);
    cur.allow_reserved = true;
    let t = cur.term()?;
    if !cur.at_end() {
        return Err(cur.error("unexpected trailing input"));
    }
    Ok(t)
}

pub fn parse_atom(text: &str) -> Result<Atom, ParseError> {
    let mut cur = Cursor::new(text, 1);
    let a = cur.atom()?;
    if !cur.at_end() {
        return Err(cur.error("unexpected trailing input"));
    }
    Ok(a)
}

fn parse_clause(line: &str, line_no: usize, domain: &Domain) -> Result<Clause, ParseError> {
    let mut cur = Cursor::new(line, line_no);
    let head = cur.atom()?;
    cur.expect("<-")?;
    let lit_start = cur.pos;
    let attenuation = cur.literal(domain, true)?;
    if domain.is_bot(&attenuation) {
        return Err(cur.error_at(lit_start, format!("attenuation {attenuation} is the bottom element of {domain}")));
    }
    cur.expect("-")?;
    let mut body = Vec::new();
    if !cur.at_end() {
        loop {
            body.push(cur.atom()?);
            if cur.at_end() {
                break;
            }
            cur.expect(",")?;
        }
    }
    Ok(Clause {
        head,
        attenuation,
        body,
    })
}

/// Parses one clause per non-blank line; `%` starts a comment.
pub fn parse_program(text: &str, domain: &Domain) -> Result<Program, ParseError> {
    let mut clauses = Vec::new();
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.trim().is_empty() {
            continue;
        }
        clauses.push(parse_clause(line, i + 1, domain)?);
        lines.push(i + 1);
    }
    Program::new(domain.clone(), clauses.clone()).map_err(|e| {
        // report the first clause whose addition makes the program invalid
        let line = (1..=clauses.len())
            .find(|&n| Program::new(domain.clone(), clauses[..n].to_vec()).is_err())
            .map_or(0, |n| lines[n - 1]);
        ParseError {
            line,
            column: 1,
            message: e.to_string(),
        }
    })
}

pub fn parse_goal(text: &str, domain: &Domain) -> Result<InitialGoal, ParseError> {
    let mut cur = Cursor::new(text, 1);
    let mut pending: Vec<(Atom, QVar, usize)> = Vec::new();
    if !cur.at_end() && cur.peek() != Some('|') {
        loop {
            let atom = cur.atom()?;
            cur.expect("#")?;
            let at = cur.pos;
            let qvar = cur.qvar()?;
            if pending.iter().any(|(_, w, _)| *w == qvar) {
                return Err(cur.error_at(at, format!("duplicate qualification variable `{qvar}`")));
            }
            pending.push((atom, qvar, at));
            if !cur.eat(",") {
                break;
            }
        }
    }
    let mut bounds: BTreeMap<QVar, QualValue> = BTreeMap::new();
    if cur.eat("|") && !cur.at_end() {
        loop {
            let at = cur.pos;
            let qvar = cur.qvar()?;
            if !pending.iter().any(|(_, w, _)| *w == qvar) {
                return Err(cur.error_at(at, format!("`{qvar}` does not annotate any goal atom")));
            }
            if cur.eat(">=") {
            } else if cur.eat("<=") {
                if *domain != Domain::Weight {
                    return Err(cur.error("`<=` bounds are only meaningful over w"));
                }
            } else {
                return Err(cur.error("expected `>=` or `<=`"));
            }
            let lit_at = cur.pos;
            let value = cur.literal(domain, false)?;
            if domain.is_bot(&value) {
                return Err(cur.error_at(lit_at, format!("threshold {value} is the bottom element of {domain}")));
            }
            if bounds.insert(qvar.clone(), value).is_some() {
                return Err(cur.error_at(at, format!("second bound for `{qvar}`")));
            }
            if !cur.eat(",") {
                break;
            }
        }
    }
    if !cur.at_end() {
        return Err(cur.error("unexpected trailing input"));
    }
    let items = pending
        .into_iter()
        .map(|(atom, qvar, _)| GoalItem {
            threshold: bounds.remove(&qvar).unwrap_or_else(|| domain.top()),
            atom,
            qvar,
        })
        .collect();
    InitialGoal::new(domain.clone(), items).map_err(|e| cur.error_at(0, e.to_string()))
}

fn eat_binding_arrow(cur: &mut Cursor<'_>) -> Result<(), ParseError> {
    if cur.eat("->") || cur.eat("=") || cur.eat("↦") {
        Ok(())
    } else {
        Err(cur.error("expected `=` or `->`"))
    }
}

/// Parses `X = adam, Y = apple | W1 = 0.5, W2 = 0.75`. Braces and `->`
/// in place of `=` are also accepted.
pub fn parse_answer(text: &str, domain: &Domain) -> Result<(Substitution, QualSubstitution), ParseError> {
    let mut cur = Cursor::new(text, 1);
    cur.allow_reserved = true;
    let mut theta = Substitution::new();
    let braced = cur.eat("{");
    if !(cur.at_end() || cur.peek() == Some('|') || cur.peek() == Some('}')) {
        loop {
            cur.skip_ws();
            let at = cur.pos;
            let name = match cur.identifier() {
                Some(n) if is_variable(n) => n,
                _ => return Err(cur.error_at(at, "expected a variable")),
            };
            eat_binding_arrow(&mut cur)?;
            let term = cur.term()?;
            if !theta.insert(sym(name), term) {
                return Err(cur.error_at(at, format!("second binding for `{name}`")));
            }
            if !cur.eat(",") {
                break;
            }
        }
    }
    if braced {
        cur.expect("}")?;
    }
    let mut rho = QualSubstitution::new();
    if cur.eat("|") {
        let braced = cur.eat("{");
        if !(cur.at_end() || cur.peek() == Some('}')) {
            loop {
                let at = cur.pos;
                let qvar = cur.qvar()?;
                eat_binding_arrow(&mut cur)?;
                let value = cur.literal(domain, false)?;
                if rho.insert(qvar.clone(), value).is_some() {
                    return Err(cur.error_at(at, format!("second binding for `{qvar}`")));
                }
                if !cur.eat(",") {
                    break;
                }
            }
        }
        if braced {
            cur.expect("}")?;
        }
    }
    if !cur.at_end() {
        return Err(cur.error("unexpected trailing input"));
    }
    Ok((theta, rho))
}
