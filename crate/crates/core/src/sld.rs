//! Procedural semantics: goals, resolvents, and classification of single-atom
//! goals by exploring their SLD trees.
//!
//! The tree is explored under a fair FIFO selection rule: the goal is kept as
//! a deduplicated queue, the oldest atom is selected, and the body atoms of
//! the applied rule join the back of the queue. Fairness matters: an unfair
//! rule can spin on a looping atom and mask a failing sibling, which would
//! break the equivalence between finite failure and the least fixpoint of the
//! failure operator. Since goal states are finitely many, a state repeating
//! along a branch is a sound witness of an infinite derivation.

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::kb::{Database, KbError, Rule, RuleId, VarId};

/// A goal: an ordered sequence of atoms to refute. The empty sequence is the
/// empty clause. Sequences may carry duplicates; the exploration engine works
/// on deduplicated queue states instead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Goal {
    pub atoms: Vec<VarId>,
}

impl Goal {
    pub fn new(atoms: Vec<VarId>) -> Self {
        Goal { atoms }
    }

    pub fn single(atom: VarId) -> Self {
        Goal { atoms: vec![atom] }
    }

    pub fn empty() -> Self {
        Goal { atoms: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Display rendering: `p1,p2 ->`, or `□` for the empty clause.
    pub fn render(&self, db: &Database) -> String {
        if self.atoms.is_empty() {
            "\u{25a1}".to_string()
        } else {
            let names: Vec<&str> = self.atoms.iter().map(|v| db.var_name(*v)).collect();
            format!("{} ->", names.join(","))
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SldError {
    #[error(transparent)]
    Kb(#[from] KbError),
    #[error("budget must be positive")]
    InvalidBudget,
    #[error("node budget exhausted while classifying `{variable}`")]
    BudgetExhausted { variable: String },
    #[error("position {position} out of range for a goal of {len} atoms")]
    PositionOutOfRange { position: usize, len: usize },
    #[error(
        "rule {rule} has head variable {head} but the atom at position {position} is variable {selected}"
    )]
    HeadMismatch {
        rule: usize,
        head: usize,
        position: usize,
        selected: usize,
    },
}

/// Replaces the atom at `position` (1-based) by the rule's body atoms, in
/// place and order preserved. The goal length changes by exactly
/// `body_size - 1`.
pub fn resolvent(goal: &Goal, position: usize, rule: &Rule) -> Result<Goal, SldError> {
    if position == 0 || position > goal.atoms.len() {
        return Err(SldError::PositionOutOfRange {
            position,
            len: goal.atoms.len(),
        });
    }
    let selected = goal.atoms[position - 1];
    if selected != rule.head {
        return Err(SldError::HeadMismatch {
            rule: rule.id.0 + 1,
            head: rule.head.0 + 1,
            position,
            selected: selected.0 + 1,
        });
    }
    let mut atoms = Vec::with_capacity(goal.atoms.len() + rule.body.len() - 1);
    atoms.extend_from_slice(&goal.atoms[..position - 1]);
    atoms.extend_from_slice(&rule.body);
    atoms.extend_from_slice(&goal.atoms[position..]);
    Ok(Goal { atoms })
}

/// Status of a fully explored SLD tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivationStatus {
    Succeeds,
    FinitelyFails,
    Diverges,
}

/// A branch that returns to one of its own earlier goal states, proving an
/// infinite derivation. `states[0]` is the initial goal; applying `rules[i]`
/// to `states[i]` yields `states[i + 1]`, and the final state equals
/// `states[repeat_of]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivergentBranch {
    pub states: Vec<Vec<VarId>>,
    pub rules: Vec<RuleId>,
    pub repeat_of: usize,
}

/// Result of classifying a single-atom goal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DerivationOutcome {
    /// Some branch reaches the empty clause. The witness is a shortest
    /// refutation over set-contracted goals; replaying it (resolving the
    /// witness rule's head and contracting duplicates) reproduces the empty
    /// clause.
    Succeeds { witness: Vec<RuleId> },
    /// The whole tree is finite and no leaf is the empty clause.
    FinitelyFails { explored_states: usize },
    /// No branch reaches the empty clause and some branch repeats a state.
    Diverges { branch: DivergentBranch },
    /// The node budget ran out before the tree was decided.
    BudgetExceeded { explored_states: usize },
}

impl DerivationOutcome {
    pub fn status(&self) -> Option<DerivationStatus> {
        match self {
            DerivationOutcome::Succeeds { .. } => Some(DerivationStatus::Succeeds),
            DerivationOutcome::FinitelyFails { .. } => Some(DerivationStatus::FinitelyFails),
            DerivationOutcome::Diverges { .. } => Some(DerivationStatus::Diverges),
            DerivationOutcome::BudgetExceeded { .. } => None,
        }
    }
}

/// Default exploration budget: `2^n * (k + 1)` goal states.
pub fn default_budget(db: &Database) -> usize {
    let shift = db.n().min(usize::BITS as usize - 1);
    (1usize << shift).saturating_mul(db.k() + 1)
}

/// FIFO queue transition: pop the selected front atom, append the rule's body
/// atoms that are not already pending.
fn fifo_step(state: &[VarId], rule: &Rule) -> Vec<VarId> {
    let mut next: Vec<VarId> = state[1..].to_vec();
    for &atom in &rule.body {
        if !next.contains(&atom) {
            next.push(atom);
        }
    }
    next
}

/// Set-contracted transition used for witness search and replay.
fn set_step(state: &BTreeSet<VarId>, selected: VarId, rule: &Rule) -> BTreeSet<VarId> {
    let mut next = state.clone();
    next.remove(&selected);
    next.extend(rule.body.iter().copied());
    next
}

#[derive(Clone, Copy, PartialEq)]
enum Core {
    Succeeds,
    Fails,
    Diverges,
}

#[derive(Clone, Copy, PartialEq)]
enum Color {
    OnPath,
    Done(Core),
}

struct FifoExplorer<'a> {
    db: &'a Database,
    budget: usize,
    explored: usize,
    colors: HashMap<Vec<VarId>, Color>,
}

impl<'a> FifoExplorer<'a> {
    /// Memoized depth-first exploration. A state's status is path-independent:
    /// success means the empty clause is reachable, divergence means a cycle
    /// is reachable, so an edge back onto the current path is a sound cycle
    /// witness and finished states can be reused anywhere.
    fn explore(&mut self, state: Vec<VarId>) -> Result<Core, ()> {
        if state.is_empty() {
            if !self.colors.contains_key(&state) {
                self.count(&state)?;
                self.colors.insert(state, Color::Done(Core::Succeeds));
            }
            return Ok(Core::Succeeds);
        }
        match self.colors.get(&state) {
            Some(Color::OnPath) => return Ok(Core::Diverges),
            Some(Color::Done(core)) => return Ok(*core),
            None => {}
        }
        self.count(&state)?;
        self.colors.insert(state.clone(), Color::OnPath);

        let selected = state[0];
        let mut any_succeeds = false;
        let mut any_diverges = false;
        let mut any_rule = false;
        for rule in self.db.rules_with_head(selected) {
            any_rule = true;
            match self.explore(fifo_step(&state, rule))? {
                Core::Succeeds => any_succeeds = true,
                Core::Diverges => any_diverges = true,
                Core::Fails => {}
            }
        }
        let core = if !any_rule {
            Core::Fails
        } else if any_succeeds {
            Core::Succeeds
        } else if any_diverges {
            Core::Diverges
        } else {
            Core::Fails
        };
        self.colors.insert(state, Color::Done(core));
        Ok(core)
    }

    fn count(&mut self, _state: &[VarId]) -> Result<(), ()> {
        if self.explored >= self.budget {
            return Err(());
        }
        self.explored += 1;
        Ok(())
    }
}

/// Explores the SLD tree for the single-atom goal `atom ->` with the given
/// node budget and classifies it.
pub fn classify(db: &Database, atom: VarId, budget: usize) -> Result<DerivationOutcome, SldError> {
    db.check_var(atom)?;
    if budget == 0 {
        return Err(SldError::InvalidBudget);
    }
    let mut explorer = FifoExplorer {
        db,
        budget,
        explored: 0,
        colors: HashMap::new(),
    };
    let core = match explorer.explore(vec![atom]) {
        Ok(core) => core,
        Err(()) => {
            return Ok(DerivationOutcome::BudgetExceeded {
                explored_states: explorer.explored,
            })
        }
    };
    let explored_states = explorer.explored;
    match core {
        Core::Fails => Ok(DerivationOutcome::FinitelyFails { explored_states }),
        Core::Succeeds => match shortest_refutation(db, atom, budget) {
            Some(witness) => Ok(DerivationOutcome::Succeeds { witness }),
            None => Ok(DerivationOutcome::BudgetExceeded { explored_states }),
        },
        Core::Diverges => Ok(DerivationOutcome::Diverges {
            branch: find_divergent_branch(db, atom),
        }),
    }
}

/// Breadth-first search over set-contracted goals for a shortest refutation.
/// Atoms are tried in index order and rules in id order, so the witness is
/// deterministic.
fn shortest_refutation(db: &Database, atom: VarId, budget: usize) -> Option<Vec<RuleId>> {
    let start: BTreeSet<VarId> = std::iter::once(atom).collect();
    let mut parents: HashMap<BTreeSet<VarId>, (BTreeSet<VarId>, RuleId)> = HashMap::new();
    let mut queue: VecDeque<BTreeSet<VarId>> = VecDeque::new();
    let mut seen: BTreeSet<BTreeSet<VarId>> = std::iter::once(start.clone()).collect();
    queue.push_back(start);
    let mut visited = 0usize;

    while let Some(state) = queue.pop_front() {
        visited += 1;
        if visited > budget {
            return None;
        }
        for &selected in &state {
            for rule in db.rules_with_head(selected) {
                let next = set_step(&state, selected, rule);
                if seen.insert(next.clone()) {
                    parents.insert(next.clone(), (state.clone(), rule.id));
                    if next.is_empty() {
                        return Some(backtrack(&parents, next));
                    }
                    queue.push_back(next);
                }
            }
        }
    }
    unreachable!("refutation search only runs when success is established")
}

fn backtrack(
    parents: &HashMap<BTreeSet<VarId>, (BTreeSet<VarId>, RuleId)>,
    mut state: BTreeSet<VarId>,
) -> Vec<RuleId> {
    let mut rules = Vec::new();
    while let Some((prev, rule)) = parents.get(&state) {
        rules.push(*rule);
        state = prev.clone();
    }
    rules.reverse();
    rules
}

/// Depth-first hunt (rules in id order) for the first branch that returns to
/// one of its own states. Only called when divergence is established, so a
/// cycle is reachable.
fn find_divergent_branch(db: &Database, atom: VarId) -> DivergentBranch {
    let mut path: Vec<Vec<VarId>> = vec![vec![atom]];
    let mut rules: Vec<RuleId> = Vec::new();
    // States whose entire subtree is known cycle-free.
    let mut exhausted: BTreeSet<Vec<VarId>> = BTreeSet::new();
    if let Some(branch) = dfs_cycle(db, &mut path, &mut rules, &mut exhausted) {
        return branch;
    }
    unreachable!("divergent classification implies a reachable cycle")
}

fn dfs_cycle(
    db: &Database,
    path: &mut Vec<Vec<VarId>>,
    rules: &mut Vec<RuleId>,
    exhausted: &mut BTreeSet<Vec<VarId>>,
) -> Option<DivergentBranch> {
    let state = path.last().expect("path is never empty").clone();
    if state.is_empty() {
        return None;
    }
    let selected = state[0];
    for rule in db.rules_with_head(selected) {
        let next = fifo_step(&state, rule);
        if exhausted.contains(&next) {
            continue;
        }
        if let Some(pos) = path.iter().position(|s| *s == next) {
            path.push(next);
            rules.push(rule.id);
            return Some(DivergentBranch {
                states: path.clone(),
                rules: rules.clone(),
                repeat_of: pos,
            });
        }
        path.push(next);
        rules.push(rule.id);
        if let Some(branch) = dfs_cycle(db, path, rules, exhausted) {
            return Some(branch);
        }
        rules.pop();
        let finished = path.pop().expect("pushed above");
        exhausted.insert(finished);
    }
    None
}

/// The failure set: variables whose single-atom goals finitely fail.
pub fn failure_set(db: &Database, budget: usize) -> Result<BTreeSet<VarId>, SldError> {
    let mut set = BTreeSet::new();
    for v in db.variables() {
        match classify(db, v, budget)? {
            DerivationOutcome::FinitelyFails { .. } => {
                set.insert(v);
            }
            DerivationOutcome::BudgetExceeded { .. } => {
                return Err(SldError::BudgetExhausted {
                    variable: db.var_name(v).to_string(),
                });
            }
            _ => {}
        }
    }
    Ok(set)
}

/// Classification with the selection choice itself explored: success is
/// selection-independent reachability of the empty clause over set-contracted
/// goals, and finite failure asks for the existence of a finite failed tree
/// under some selection (the least set of goals closed under "some atom has
/// all its resolvents already failed"). Used to cross-check that the FIFO
/// rule's verdicts do not depend on the exploration strategy.
pub fn classify_full_exploration(
    db: &Database,
    atom: VarId,
    budget: usize,
) -> Result<DerivationStatus, SldError> {
    db.check_var(atom)?;
    if budget == 0 {
        return Err(SldError::InvalidBudget);
    }

    // Reachable set-goal states.
    let start: BTreeSet<VarId> = std::iter::once(atom).collect();
    let mut states: Vec<BTreeSet<VarId>> = vec![start.clone()];
    let mut index: HashMap<BTreeSet<VarId>, usize> = std::iter::once((start, 0)).collect();
    let mut frontier = 0usize;
    while frontier < states.len() {
        if states.len() > budget {
            return Err(SldError::BudgetExhausted {
                variable: db.var_name(atom).to_string(),
            });
        }
        let state = states[frontier].clone();
        frontier += 1;
        for &selected in &state {
            for rule in db.rules_with_head(selected) {
                let next = set_step(&state, selected, rule);
                if !index.contains_key(&next) {
                    index.insert(next.clone(), states.len());
                    states.push(next);
                }
            }
        }
    }

    if index.contains_key(&BTreeSet::new()) {
        return Ok(DerivationStatus::Succeeds);
    }

    // Least fixpoint of the finite-failure closure.
    let mut failed = vec![false; states.len()];
    loop {
        let mut changed = false;
        for (s, state) in states.iter().enumerate() {
            if failed[s] || state.is_empty() {
                continue;
            }
            let witnessed = state.iter().any(|&selected| {
                db.rules_with_head(selected).all(|rule| {
                    let next = set_step(state, selected, rule);
                    failed[index[&next]]
                })
            });
            if witnessed {
                failed[s] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    if failed[0] {
        Ok(DerivationStatus::FinitelyFails)
    } else {
        Ok(DerivationStatus::Diverges)
    }
}

/// Renders an outcome in the two-column "Rule used / Goals" layout.
pub fn render_outcome(db: &Database, atom: VarId, outcome: &DerivationOutcome) -> String {
    let mut rows: Vec<(String, String)> = vec![
        ("Rule used".to_string(), "Goals".to_string()),
        (String::new(), Goal::single(atom).render(db)),
    ];
    let mut note = None;
    match outcome {
        DerivationOutcome::Succeeds { witness } => {
            let mut state: BTreeSet<VarId> = std::iter::once(atom).collect();
            for rule_id in witness {
                let rule = db.rule(*rule_id).expect("witness rules are in range");
                state = set_step(&state, rule.head, rule);
                let atoms: Vec<VarId> = state.iter().copied().collect();
                rows.push((db.rule_label(*rule_id), Goal::new(atoms).render(db)));
            }
        }
        DerivationOutcome::Diverges { branch } => {
            for (rule_id, state) in branch.rules.iter().zip(&branch.states[1..]) {
                rows.push((
                    db.rule_label(*rule_id),
                    Goal::new(state.clone()).render(db),
                ));
            }
            rows.push(("...".to_string(), "...".to_string()));
        }
        DerivationOutcome::FinitelyFails { explored_states } => {
            note = Some(format!(
                "finitely fails: {explored_states} goal states explored, no branch reaches \u{25a1}"
            ));
        }
        DerivationOutcome::BudgetExceeded { explored_states } => {
            note = Some(format!(
                "budget exceeded after {explored_states} goal states"
            ));
        }
    }
    let width = rows.iter().map(|(l, _)| l.chars().count()).max().unwrap_or(0) + 2;
    let mut out = String::new();
    for (label, goal) in rows {
        let pad = width - label.chars().count();
        out.push_str(&label);
        out.extend(std::iter::repeat_n(' ', pad));
        out.push_str(&goal);
        out.push('\n');
    }
    if let Some(note) = note {
        out.push_str(&note);
        out.push('\n');
    }
    out
}
