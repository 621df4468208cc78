//! Concrete syntax for deductive databases.
//!
//! One statement per line, each terminated by `.`:
//!
//! ```text
//! # lines starting anywhere with `#` are comments
//! vars p1, p2, p3.      # optional header fixing variable order
//! -> p1.                # a fact
//! p1 & p2 -> p3.        # a rule
//! ```
//!
//! Without a `vars` header, variables are declared implicitly in first-use
//! order. With a header, the header is authoritative: it fixes the index
//! order and any variable used but not listed is an error. Negated body
//! literals (`~p`) are rejected; the toolkit works on definite databases
//! only.

use std::fmt;

use thiserror::Error;

use crate::kb::{Database, Rule, RuleId, VarId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    NegativeLiteral(String),
    UndeclaredVariable(String),
    DuplicateDeclaration(String),
    MisplacedHeader,
}

/// A parse failure with its 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: ", self.line, self.col)?;
        match &self.kind {
            ParseErrorKind::Syntax(msg) => write!(f, "{msg}"),
            ParseErrorKind::NegativeLiteral(name) => write!(
                f,
                "negative literal `~{name}` is not allowed: only definite databases \
                 (positive body atoms) are supported"
            ),
            ParseErrorKind::UndeclaredVariable(name) => write!(
                f,
                "variable `{name}` is not declared in the vars header"
            ),
            ParseErrorKind::DuplicateDeclaration(name) => {
                write!(f, "variable `{name}` declared twice")
            }
            ParseErrorKind::MisplacedHeader => {
                write!(f, "the vars header must be the first statement")
            }
        }
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct VarTable {
    names: Vec<String>,
    fixed: bool,
}

impl VarTable {
    fn lookup(
        &mut self,
        name: &str,
        line: usize,
        col: usize,
    ) -> Result<VarId, ParseError> {
        if let Some(pos) = self.names.iter().position(|n| n == name) {
            return Ok(VarId(pos));
        }
        if self.fixed {
            return Err(ParseError {
                line,
                col,
                kind: ParseErrorKind::UndeclaredVariable(name.to_string()),
            });
        }
        self.names.push(name.to_string());
        Ok(VarId(self.names.len() - 1))
    }
}

/// Position (1-based column) of `needle`'s byte offset within `line`.
fn col_of(line: &str, offset: usize) -> usize {
    line[..offset].chars().count() + 1
}

/// Parses the KB text format into a database.
pub fn parse_kb(text: &str) -> Result<Database, ParseError> {
    let mut vars = VarTable {
        names: Vec::new(),
        fixed: false,
    };
    let mut rules: Vec<Rule> = Vec::new();
    let mut seen_statement = false;

    for (line_idx, raw_line) in text.lines().enumerate() {
        let line_no = line_idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        if line.trim().is_empty() {
            continue;
        }

        let trimmed_end = line.trim_end();
        let Some(stmt) = trimmed_end.strip_suffix('.') else {
            return Err(ParseError {
                line: line_no,
                col: col_of(line, trimmed_end.len()),
                kind: ParseErrorKind::Syntax("statement must end with `.`".into()),
            });
        };

        let stmt_trim = stmt.trim_start();
        let indent = stmt.len() - stmt_trim.len();
        if let Some(rest) = header_body(stmt_trim) {
            if seen_statement {
                return Err(ParseError {
                    line: line_no,
                    col: col_of(line, indent),
                    kind: ParseErrorKind::MisplacedHeader,
                });
            }
            seen_statement = true;
            parse_header(rest, line, line_no, &mut vars)?;
            vars.fixed = true;
            continue;
        }
        seen_statement = true;

        let rule = parse_rule(stmt, line, line_no, &mut vars, RuleId(rules.len()))?;
        rules.push(rule);
    }

    // The parser enforces every Database invariant, so this cannot fail.
    Ok(Database::new(vars.names, rules).expect("parser produced a valid database"))
}

/// Returns the text after the `vars` keyword when the statement is a header.
fn header_body(stmt: &str) -> Option<&str> {
    let rest = stmt.strip_prefix("vars")?;
    if rest.is_empty() || rest.starts_with(|c: char| c.is_whitespace()) {
        Some(rest)
    } else {
        None
    }
}

fn parse_header(
    rest: &str,
    line: &str,
    line_no: usize,
    vars: &mut VarTable,
) -> Result<(), ParseError> {
    for part in rest.split(',') {
        let name = part.trim();
        let col = col_of(line, offset_in(line, part));
        if name.is_empty() {
            return Err(ParseError {
                line: line_no,
                col,
                kind: ParseErrorKind::Syntax("empty name in vars header".into()),
            });
        }
        if !is_ident(name) {
            return Err(ParseError {
                line: line_no,
                col,
                kind: ParseErrorKind::Syntax(format!("`{name}` is not a valid identifier")),
            });
        }
        if vars.names.iter().any(|n| n == name) {
            return Err(ParseError {
                line: line_no,
                col,
                kind: ParseErrorKind::DuplicateDeclaration(name.to_string()),
            });
        }
        vars.names.push(name.to_string());
    }
    Ok(())
}

/// Byte offset of a sub-slice within its parent line.
fn offset_in(line: &str, part: &str) -> usize {
    let start = part.as_ptr() as usize - line.as_ptr() as usize;
    let skipped = part.len() - part.trim_start().len();
    start + skipped
}

fn parse_rule(
    stmt: &str,
    line: &str,
    line_no: usize,
    vars: &mut VarTable,
    id: RuleId,
) -> Result<Rule, ParseError> {
    let arrow = stmt.find("->").ok_or(ParseError {
        line: line_no,
        col: col_of(line, offset_in(line, stmt)),
        kind: ParseErrorKind::Syntax("expected `->` in rule".into()),
    })?;
    let (body_text, head_text) = stmt.split_at(arrow);
    let head_text = &head_text[2..];
    if head_text.contains("->") {
        let second = stmt[arrow + 2..].find("->").unwrap() + arrow + 2;
        return Err(ParseError {
            line: line_no,
            col: col_of(line, offset_in(line, &stmt[second..])),
            kind: ParseErrorKind::Syntax("more than one `->` in rule".into()),
        });
    }

    let mut body = Vec::new();
    if !body_text.trim().is_empty() {
        for part in body_text.split('&') {
            body.push(parse_atom(part, line, line_no, vars)?);
        }
    }
    let head = parse_atom(head_text, line, line_no, vars)?;
    Ok(Rule { id, body, head })
}

fn parse_atom(
    part: &str,
    line: &str,
    line_no: usize,
    vars: &mut VarTable,
) -> Result<VarId, ParseError> {
    let name = part.trim();
    let col = col_of(line, offset_in(line, part));
    if let Some(stripped) = name.strip_prefix('~') {
        return Err(ParseError {
            line: line_no,
            col,
            kind: ParseErrorKind::NegativeLiteral(stripped.trim().to_string()),
        });
    }
    if name.is_empty() {
        return Err(ParseError {
            line: line_no,
            col,
            kind: ParseErrorKind::Syntax("expected a variable name".into()),
        });
    }
    if !is_ident(name) {
        return Err(ParseError {
            line: line_no,
            col,
            kind: ParseErrorKind::Syntax(format!("`{name}` is not a valid identifier")),
        });
    }
    vars.lookup(name, line_no, col)
}

/// Canonical renderer: a `vars` header followed by one rule per line.
/// `parse_kb(render_kb(db)) == db` for every database.
pub fn render_kb(db: &Database) -> String {
    let mut out = String::new();
    if db.n() > 0 {
        out.push_str("vars ");
        out.push_str(&db.var_names().join(", "));
        out.push_str(".\n");
    }
    for rule in db.rules() {
        if rule.body.is_empty() {
            out.push_str(&format!("-> {}.\n", db.var_name(rule.head)));
        } else {
            let body: Vec<&str> = rule.body.iter().map(|v| db.var_name(*v)).collect();
            out.push_str(&format!(
                "{} -> {}.\n",
                body.join(" & "),
                db.var_name(rule.head)
            ));
        }
    }
    out
}
