//! Declarative semantics: models, F-models, the failure operator and the
//! immediate-consequence operator, their fixpoint iterations, and the
//! inference sets they induce.
//!
//! The failure operator maps an interpretation `I` to the set of variables
//! all of whose defining rules contain an atom true under `I`; a variable
//! with no defining rules always fails, and a fact (empty body, maximum over
//! nothing is 0) never does. Iterating from the all-false interpretation
//! yields the least fixpoint (the finite-failure reading); iterating from
//! all-true yields the greatest fixpoint (the closed-world reading).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::kb::{Database, Interpretation, KbError, VarId};

/// Direction of a fixpoint iteration: `Down` starts from all-false, `Up`
/// from all-true.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Down,
    Up,
}

impl Direction {
    pub fn start(self, n: usize) -> Interpretation {
        match self {
            Direction::Down => Interpretation::bottom(n),
            Direction::Up => Interpretation::top(n),
        }
    }

    fn arrow(self) -> char {
        match self {
            Direction::Down => '\u{2193}',
            Direction::Up => '\u{2191}',
        }
    }
}

/// The iterates of the failure operator from one end of the lattice.
///
/// `steps[z]` holds the z-th iterate. The final entry is the first repeated
/// value: `steps.last() == steps[steps.len() - 2]`, which is the limit.
/// `iterations_to_fixpoint` counts the productive steps before that repeat.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixpointChain {
    pub direction: Direction,
    pub steps: Vec<Interpretation>,
    pub iterations_to_fixpoint: usize,
}

impl FixpointChain {
    pub fn limit(&self) -> &Interpretation {
        self.steps.last().expect("chain holds at least two entries")
    }

    /// One iterate per line, ending with the limit:
    ///
    /// ```text
    /// F↓0 = (0,0,0)
    /// F↓1 = (1,0,0)
    /// F↓ω = (1,1,1)
    /// ```
    pub fn render_text(&self) -> String {
        let arrow = self.direction.arrow();
        let mut out = String::new();
        for (z, step) in self.steps[..=self.iterations_to_fixpoint].iter().enumerate() {
            out.push_str(&format!("F{arrow}{z} = {}\n", step.to_vector_string()));
        }
        out.push_str(&format!(
            "F{arrow}\u{3c9} = {}\n",
            self.limit().to_vector_string()
        ));
        out
    }

    pub fn document(&self) -> ChainDocument {
        ChainDocument {
            direction: self.direction,
            steps: self.steps.iter().map(|s| s.to_bitstring()).collect(),
            limit: self.limit().to_bitstring(),
            iterations_to_fixpoint: self.iterations_to_fixpoint,
        }
    }
}

/// Machine-readable form of a [`FixpointChain`]; interpretations appear as
/// bit strings with index 1 leftmost.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainDocument {
    pub direction: Direction,
    pub steps: Vec<String>,
    pub limit: String,
    pub iterations_to_fixpoint: usize,
}

/// True when every rule evaluates to 1 under `i`.
pub fn is_model(db: &Database, i: &Interpretation) -> Result<bool, KbError> {
    check_len(db, i)?;
    for rule in db.rules() {
        if !crate::kb::eval_rule(i, rule)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True when every rule whose head is true under `i` has some true body atom.
pub fn is_f_model(db: &Database, i: &Interpretation) -> Result<bool, KbError> {
    check_len(db, i)?;
    for rule in db.rules() {
        if i.get(rule.head)? && !some_body_atom_true(i, &rule.body) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn some_body_atom_true(i: &Interpretation, body: &[VarId]) -> bool {
    body.iter().any(|v| i.bit(*v))
}

fn check_len(db: &Database, i: &Interpretation) -> Result<(), KbError> {
    if db.n() == i.len() {
        Ok(())
    } else {
        Err(KbError::LengthMismatch {
            left: db.n(),
            right: i.len(),
        })
    }
}

/// The failure operator: output bit `p` is 1 exactly when every rule with
/// head `p` has some body atom true under `i`. Variables with no defining
/// rule map to 1; heads of facts map to 0 (the maximum over an empty body
/// is 0).
pub fn failure_operator(db: &Database, i: &Interpretation) -> Result<Interpretation, KbError> {
    check_len(db, i)?;
    let mut out = Interpretation::top(db.n());
    for rule in db.rules() {
        if !some_body_atom_true(i, &rule.body) {
            out.set(rule.head, false);
        }
    }
    Ok(out)
}

/// The immediate-consequence operator: output bit `p` is 1 exactly when some
/// rule with head `p` has its whole body true under `i` (facts always fire).
pub fn immediate_consequence(db: &Database, i: &Interpretation) -> Result<Interpretation, KbError> {
    check_len(db, i)?;
    let mut out = Interpretation::bottom(db.n());
    for rule in db.rules() {
        if rule.body.iter().all(|v| i.bit(*v)) {
            out.set(rule.head, true);
        }
    }
    Ok(out)
}

/// Iterates the failure operator from the chosen end of the lattice until
/// the value repeats. Detection is by exact equality of consecutive
/// iterates; the lattice height bounds the productive steps by `n`.
pub fn iterate_failure(db: &Database, direction: Direction) -> FixpointChain {
    let mut steps = vec![direction.start(db.n())];
    loop {
        let next = failure_operator(db, steps.last().unwrap())
            .expect("iterates have the database's length");
        let fixed = next == *steps.last().unwrap();
        steps.push(next);
        if fixed {
            break;
        }
        assert!(
            steps.len() <= db.n() + 2,
            "monotone iteration exceeded the lattice height"
        );
    }
    FixpointChain {
        direction,
        iterations_to_fixpoint: steps.len() - 2,
        steps,
    }
}

/// The least model, computed by iterating the immediate-consequence operator
/// from all-false to its fixpoint.
pub fn least_model(db: &Database) -> Interpretation {
    let mut current = Interpretation::bottom(db.n());
    loop {
        let next = immediate_consequence(db, &current)
            .expect("iterates have the database's length");
        if next == current {
            return current;
        }
        current = next;
    }
}

/// Variables negated under the closed world assumption: those that are not
/// logical consequences of the database, i.e. the ones of the greatest
/// fixpoint of the failure operator.
pub fn cwa_set(db: &Database) -> BTreeSet<VarId> {
    iterate_failure(db, Direction::Up).limit().ones_set()
}

/// Variables negated by finite failure: the ones of the least fixpoint of
/// the failure operator.
pub fn naf_set(db: &Database) -> BTreeSet<VarId> {
    iterate_failure(db, Direction::Down).limit().ones_set()
}
