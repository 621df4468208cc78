//! Propositional deductive databases and interpretations.
//!
//! A database is a finite set of definite rules `body -> head` over a fixed,
//! ordered set of variables. Facts are rules with an empty body. Bodies hold
//! positive atoms only; the occurrence count of a body is significant (it is
//! the spike budget of the corresponding rule neuron downstream), so
//! duplicates are preserved.
//!
//! An interpretation is a `{0,1}` vector over the variables, ordered by
//! variable index with index 1 leftmost in the printed form.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier of a propositional variable: a 0-based index into the
/// database's variable list. Printed forms are 1-based (`p_1..p_n`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VarId(pub usize);

/// Identifier of a rule: a 0-based index in source order. Printed forms are
/// 1-based (`R_1..R_k`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RuleId(pub usize);

/// A definite rule. The body is an ordered list of positive atoms (possibly
/// empty, possibly with duplicates); the head is a single atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub id: RuleId,
    pub body: Vec<VarId>,
    pub head: VarId,
}

impl Rule {
    /// Number of atom occurrences in the body.
    pub fn body_size(&self) -> usize {
        self.body.len()
    }
}

/// A propositional deductive database: named variables plus definite rules.
///
/// Values are immutable after construction and safe to share across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Database {
    names: Vec<String>,
    rules: Vec<Rule>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KbError {
    #[error("interpretation of length {left} paired with length {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("variable index {index} out of range for {n} variables")]
    UnknownVariable { index: usize, n: usize },
    #[error("rule index {index} out of range for {k} rules")]
    UnknownRule { index: usize, k: usize },
    #[error("duplicate variable name `{0}`")]
    DuplicateName(String),
    #[error("rule {rule}: references undeclared variable index {index}")]
    UndeclaredInRule { rule: usize, index: usize },
    #[error("rule ids must be contiguous in source order (found {found} at position {position})")]
    RuleIdOutOfOrder { found: usize, position: usize },
    #[error("bit string has a character other than 0/1 at position {position}")]
    BadBitString { position: usize },
}

impl Database {
    /// Builds a database, checking that names are distinct, every referenced
    /// variable is declared, and rule ids are contiguous in source order.
    pub fn new(names: Vec<String>, rules: Vec<Rule>) -> Result<Self, KbError> {
        let mut seen = BTreeSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(KbError::DuplicateName(name.clone()));
            }
        }
        let n = names.len();
        for (pos, rule) in rules.iter().enumerate() {
            if rule.id.0 != pos {
                return Err(KbError::RuleIdOutOfOrder {
                    found: rule.id.0,
                    position: pos,
                });
            }
            for atom in rule.body.iter().chain(std::iter::once(&rule.head)) {
                if atom.0 >= n {
                    return Err(KbError::UndeclaredInRule {
                        rule: pos,
                        index: atom.0,
                    });
                }
            }
        }
        Ok(Database { names, rules })
    }

    /// Number of variables.
    pub fn n(&self) -> usize {
        self.names.len()
    }

    /// Number of rules.
    pub fn k(&self) -> usize {
        self.rules.len()
    }

    pub fn variables(&self) -> impl Iterator<Item = VarId> {
        (0..self.n()).map(VarId)
    }

    pub fn var_name(&self, v: VarId) -> &str {
        &self.names[v.0]
    }

    pub fn var_names(&self) -> &[String] {
        &self.names
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.names.iter().position(|s| s == name).map(VarId)
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, id: RuleId) -> Result<&Rule, KbError> {
        self.rules.get(id.0).ok_or(KbError::UnknownRule {
            index: id.0,
            k: self.k(),
        })
    }

    /// Printed label of a rule, `R1..Rk`.
    pub fn rule_label(&self, id: RuleId) -> String {
        format!("R{}", id.0 + 1)
    }

    /// Number of rules with `v` in the head.
    pub fn head_count(&self, v: VarId) -> Result<usize, KbError> {
        self.check_var(v)?;
        Ok(self.rules.iter().filter(|r| r.head == v).count())
    }

    /// Occurrence count of the body of rule `id`.
    pub fn body_size(&self, id: RuleId) -> Result<usize, KbError> {
        Ok(self.rule(id)?.body_size())
    }

    pub fn rules_with_head(&self, v: VarId) -> impl Iterator<Item = &Rule> {
        self.rules.iter().filter(move |r| r.head == v)
    }

    pub fn check_var(&self, v: VarId) -> Result<(), KbError> {
        if v.0 >= self.n() {
            Err(KbError::UnknownVariable {
                index: v.0,
                n: self.n(),
            })
        } else {
            Ok(())
        }
    }

    /// Renders a set of variables as `{p4, p5, p6}`, sorted by index.
    pub fn format_var_set(&self, set: &BTreeSet<VarId>) -> String {
        let inner: Vec<&str> = set.iter().map(|v| self.var_name(*v)).collect();
        format!("{{{}}}", inner.join(", "))
    }
}

/// A truth assignment over the database's variables, stored as a bit vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interpretation {
    bits: Vec<bool>,
}

impl Interpretation {
    /// The all-false interpretation over `n` variables.
    pub fn bottom(n: usize) -> Self {
        Interpretation {
            bits: vec![false; n],
        }
    }

    /// The all-true interpretation over `n` variables.
    pub fn top(n: usize) -> Self {
        Interpretation {
            bits: vec![true; n],
        }
    }

    pub fn from_bools(bits: Vec<bool>) -> Self {
        Interpretation { bits }
    }

    /// Parses the external bit-string form, e.g. `"010110"`, index 1 leftmost.
    pub fn parse_bits(s: &str) -> Result<Self, KbError> {
        let mut bits = Vec::with_capacity(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return Err(KbError::BadBitString { position: i }),
            }
        }
        Ok(Interpretation { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Truth value of variable `v`. Panics if out of range; use [`get`] for a
    /// checked lookup.
    ///
    /// [`get`]: Interpretation::get
    pub fn bit(&self, v: VarId) -> bool {
        self.bits[v.0]
    }

    pub fn get(&self, v: VarId) -> Result<bool, KbError> {
        self.bits.get(v.0).copied().ok_or(KbError::UnknownVariable {
            index: v.0,
            n: self.len(),
        })
    }

    pub fn set(&mut self, v: VarId, value: bool) {
        self.bits[v.0] = value;
    }

    /// Variables mapped to 1, in index order.
    pub fn ones(&self) -> impl Iterator<Item = VarId> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(|(i, _)| VarId(i))
    }

    pub fn ones_set(&self) -> BTreeSet<VarId> {
        self.ones().collect()
    }

    fn check_len(&self, other: &Interpretation) -> Result<(), KbError> {
        if self.len() == other.len() {
            Ok(())
        } else {
            Err(KbError::LengthMismatch {
                left: self.len(),
                right: other.len(),
            })
        }
    }

    /// Componentwise implication: every 1 of `self` is a 1 of `other`.
    pub fn leq(&self, other: &Interpretation) -> Result<bool, KbError> {
        self.check_len(other)?;
        Ok(self
            .bits
            .iter()
            .zip(&other.bits)
            .all(|(a, b)| !*a || *b))
    }

    /// Componentwise max.
    pub fn union(&self, other: &Interpretation) -> Result<Interpretation, KbError> {
        self.check_len(other)?;
        Ok(Interpretation {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| *a || *b)
                .collect(),
        })
    }

    /// Componentwise min.
    pub fn intersect(&self, other: &Interpretation) -> Result<Interpretation, KbError> {
        self.check_len(other)?;
        Ok(Interpretation {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| *a && *b)
                .collect(),
        })
    }

    /// External serialized form: `0`/`1` characters, index 1 leftmost.
    pub fn to_bitstring(&self) -> String {
        self.bits.iter().map(|b| if *b { '1' } else { '0' }).collect()
    }

    /// Parenthesized vector rendering: `(0,0,1)`.
    pub fn to_vector_string(&self) -> String {
        let inner: Vec<&str> = self.bits.iter().map(|b| if *b { "1" } else { "0" }).collect();
        format!("({})", inner.join(","))
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bitstring())
    }
}

/// All `2^n` interpretations over `n` variables, in binary counting order
/// (variable 1 is the least significant position). Intended for small `n`.
pub fn enumerate_interpretations(n: usize) -> impl Iterator<Item = Interpretation> {
    assert!(n < usize::BITS as usize, "enumeration domain too large");
    (0..(1usize << n)).map(move |mask| {
        Interpretation::from_bools((0..n).map(|j| mask & (1 << j) != 0).collect())
    })
}

/// A positive or negated atom, as evaluated under an interpretation.
/// Rule bodies are positive by construction; negated literals occur only as
/// evaluation inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Literal {
    Pos(VarId),
    Neg(VarId),
}

pub fn eval_literal(i: &Interpretation, lit: Literal) -> Result<bool, KbError> {
    match lit {
        Literal::Pos(v) => i.get(v),
        Literal::Neg(v) => Ok(!i.get(v)?),
    }
}

/// Truth of a conjunction: the minimum of its literal values. The empty
/// conjunction evaluates to 1.
pub fn eval_conjunction(i: &Interpretation, lits: &[Literal]) -> Result<bool, KbError> {
    for lit in lits {
        if !eval_literal(i, *lit)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn eval_body(i: &Interpretation, body: &[VarId]) -> Result<bool, KbError> {
    for v in body {
        if !i.get(*v)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Truth of a rule: 0 exactly when the body holds and the head does not.
/// For a fact this reduces to the truth of the head.
pub fn eval_rule(i: &Interpretation, rule: &Rule) -> Result<bool, KbError> {
    let body = eval_body(i, &rule.body)?;
    let head = i.get(rule.head)?;
    Ok(!(body && !head))
}
