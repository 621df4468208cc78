//! Translation of a deductive database into a spiking neural P system whose
//! computation carries out the failure operator, plus the drivers that read
//! fixpoint chains and inference sets off the compiled network.
//!
//! For a database with `n` variables and `k` rules the compiled system has
//! degree `2n + k + 2`:
//!
//! * one output neuron per variable (`a -> λ`), read at odd steps;
//! * one variable neuron per variable, holding `I(p_j) * h_j` spikes (or
//!   `I(p_j)` when `h_j = 0`) and firing `a^{h_j} -> a` exactly when all of
//!   its `h_j` defining rules have signalled failure;
//! * one rule neuron per rule with rules `a^l -> a` for `1 <= l <= b_j`,
//!   firing when any body atom was true in the previous reading;
//! * a two-neuron clock whose `T` side re-injects, every cycle, a spike into
//!   each variable neuron that has no defining rule.
//!
//! One application of the failure operator takes three steps; iterate `z`
//! times and the z-th iterate sits on the output neurons at step `2z + 1`.
//!
//! Variable neurons with `h_j >= 2` additionally carry forgetting rules
//! `a^l -> λ` for `l < h_j`. Without them, a sub-threshold remainder (some
//! but not all defining rules failed) would survive into the next cycle and
//! wreck the exact-match firing condition from then on; the clearing rules
//! keep variable neurons empty at every odd step, which the whole reading
//! discipline depends on. `CompileOptions::strict_paper` omits them to make
//! the divergence observable.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kb::{Database, Interpretation, KbError, RuleId, VarId};
use crate::semantics::{Direction, FixpointChain};
use crate::snp::{
    run_until, ChoicePolicy, Configuration, FiringRule, ForgettingRule, Neuron, SimError,
    SnpSystem, SpikeCondition, Trace,
};

/// The compiler's index map. Neuron indices are 0-based positions in the
/// system's neuron list; printed labels are `σ_1 .. σ_{2n+k}`, `σ_G`, `σ_T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NeuronLayout {
    n: usize,
    k: usize,
}

/// What a compiled neuron stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeuronRole {
    Output(VarId),
    Variable(VarId),
    RuleNeuron(RuleId),
    ClockG,
    ClockT,
}

impl NeuronLayout {
    pub fn new(db: &Database) -> Self {
        NeuronLayout {
            n: db.n(),
            k: db.k(),
        }
    }

    pub fn degree(&self) -> usize {
        2 * self.n + self.k + 2
    }

    pub fn output(&self, v: VarId) -> usize {
        v.0
    }

    pub fn variable(&self, v: VarId) -> usize {
        self.n + v.0
    }

    pub fn rule(&self, r: RuleId) -> usize {
        2 * self.n + r.0
    }

    pub fn clock_g(&self) -> usize {
        2 * self.n + self.k
    }

    pub fn clock_t(&self) -> usize {
        2 * self.n + self.k + 1
    }

    pub fn role(&self, index: usize) -> NeuronRole {
        if index < self.n {
            NeuronRole::Output(VarId(index))
        } else if index < 2 * self.n {
            NeuronRole::Variable(VarId(index - self.n))
        } else if index < 2 * self.n + self.k {
            NeuronRole::RuleNeuron(RuleId(index - 2 * self.n))
        } else if index == self.clock_g() {
            NeuronRole::ClockG
        } else {
            NeuronRole::ClockT
        }
    }

    pub fn label(&self, index: usize) -> String {
        match self.role(index) {
            NeuronRole::ClockG => "\u{3c3}_G".to_string(),
            NeuronRole::ClockT => "\u{3c3}_T".to_string(),
            _ => format!("\u{3c3}_{}", index + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CompileOptions {
    /// Omit the sub-threshold clearing rules in variable neurons.
    pub strict_paper: bool,
}

#[derive(Debug, Error)]
pub enum CompileError {
    #[error(transparent)]
    Kb(#[from] KbError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("no fixpoint within {cycles} cycles; the compiled system is misbehaving")]
    FixpointOverrun { cycles: usize },
}

/// Initial spike counts encoding the interpretation: variable neuron `j`
/// holds `I(p_j) * h_j` (or `I(p_j)` when `h_j = 0`), the `G` clock holds
/// one spike, and everything else is empty.
pub fn encode_interpretation(db: &Database, i: &Interpretation) -> Result<Vec<u64>, CompileError> {
    if i.len() != db.n() {
        return Err(KbError::LengthMismatch {
            left: db.n(),
            right: i.len(),
        }
        .into());
    }
    let layout = NeuronLayout::new(db);
    let mut counts = vec![0u64; layout.degree()];
    for v in db.variables() {
        let h = db.head_count(v)? as u64;
        let truth = u64::from(i.bit(v));
        counts[layout.variable(v)] = if h == 0 { truth } else { truth * h };
    }
    counts[layout.clock_g()] = 1;
    Ok(counts)
}

/// Builds the system for `db` with `i` as the initial encoding.
pub fn compile(
    db: &Database,
    i: &Interpretation,
) -> Result<(SnpSystem, NeuronLayout), CompileError> {
    compile_with(db, i, &CompileOptions::default())
}

pub fn compile_with(
    db: &Database,
    i: &Interpretation,
    options: &CompileOptions,
) -> Result<(SnpSystem, NeuronLayout), CompileError> {
    let layout = NeuronLayout::new(db);
    let initial = encode_interpretation(db, i)?;

    let fire = |count: u64| FiringRule {
        condition: SpikeCondition::exactly(count),
        consume: count,
        emit: 1,
    };

    let mut neurons = Vec::with_capacity(layout.degree());
    for (index, &spikes) in initial.iter().enumerate() {
        let mut neuron = Neuron::new(layout.label(index), spikes);
        match layout.role(index) {
            NeuronRole::Output(_) => {
                neuron.forgetting.push(ForgettingRule { threshold: 1 });
            }
            NeuronRole::Variable(v) => {
                let h = db.head_count(v)? as u64;
                neuron.firing.push(fire(h.max(1)));
                if !options.strict_paper {
                    for l in 1..h {
                        neuron.forgetting.push(ForgettingRule { threshold: l });
                    }
                }
            }
            NeuronRole::RuleNeuron(r) => {
                let b = db.body_size(r)? as u64;
                for l in 1..=b {
                    neuron.firing.push(fire(l));
                }
            }
            NeuronRole::ClockG | NeuronRole::ClockT => {
                neuron.firing.push(fire(1));
            }
        }
        neurons.push(neuron);
    }

    let mut synapses: BTreeSet<(usize, usize)> = BTreeSet::new();
    for v in db.variables() {
        synapses.insert((layout.variable(v), layout.output(v)));
        if db.head_count(v)? == 0 {
            synapses.insert((layout.clock_t(), layout.variable(v)));
        }
    }
    for rule in db.rules() {
        for &atom in &rule.body {
            synapses.insert((layout.variable(atom), layout.rule(rule.id)));
        }
        synapses.insert((layout.rule(rule.id), layout.variable(rule.head)));
    }
    synapses.insert((layout.clock_g(), layout.clock_t()));
    synapses.insert((layout.clock_t(), layout.clock_g()));

    Ok((SnpSystem { neurons, synapses }, layout))
}

fn projection_to_interpretation(
    config: &Configuration,
    n: usize,
) -> Result<Interpretation, SimError> {
    let counts = config.projection(n)?;
    Ok(Interpretation::from_bools(
        counts.into_iter().map(|c| c != 0).collect(),
    ))
}

/// One application of the failure operator on the compiled network: compile
/// with `i`, run three strict steps, read the output block of the third
/// configuration.
pub fn failure_via_snp(db: &Database, i: &Interpretation) -> Result<Interpretation, CompileError> {
    let (system, _) = compile(db, i)?;
    let trace = crate::snp::run(&system, &ChoicePolicy::Strict, 3)?;
    Ok(projection_to_interpretation(trace.last(), db.n())?)
}

/// A fixpoint iteration carried out on the compiled network.
#[derive(Debug, Clone)]
pub struct SnpRun {
    pub system: SnpSystem,
    pub layout: NeuronLayout,
    pub trace: Trace,
    pub chain: FixpointChain,
}

/// Iterates the failure operator on the network: the z-th iterate is the
/// output block at step `2z + 1`; the run stops when two consecutive odd-step
/// readings agree. At most `n + 1` cycles (2n + 3 steps) are ever needed; a
/// hard cap of `n + 2` cycles guards against compiler bugs.
pub fn iterate_via_snp(db: &Database, direction: Direction) -> Result<SnpRun, CompileError> {
    let start = direction.start(db.n());
    let (system, layout) = compile(db, &start)?;

    let mut steps: Vec<Interpretation> = Vec::new();
    let policy = ChoicePolicy::Strict;
    let cap_cycles = db.n() + 2;
    let mut trace = crate::snp::run(&system, &policy, 1)?;
    steps.push(projection_to_interpretation(trace.last(), db.n())?);
    loop {
        trace = extend_run(&system, trace, 2)?;
        steps.push(projection_to_interpretation(trace.last(), db.n())?);
        let len = steps.len();
        if steps[len - 1] == steps[len - 2] {
            break;
        }
        if len > cap_cycles {
            return Err(CompileError::FixpointOverrun { cycles: len });
        }
    }

    let chain = FixpointChain {
        direction,
        iterations_to_fixpoint: steps.len() - 2,
        steps,
    };
    Ok(SnpRun {
        system,
        layout,
        trace,
        chain,
    })
}

/// Continues a strict run for `extra` more steps.
fn extend_run(system: &SnpSystem, trace: Trace, extra: usize) -> Result<Trace, SimError> {
    let mut state = ChoicePolicy::Strict.state();
    let mut trace = trace;
    for _ in 0..extra {
        let result = crate::snp::step(system, trace.last(), &mut state)?;
        trace.configurations.push(result.next);
        trace.choices.push(result.fired);
    }
    Ok(trace)
}

/// Closed-world negation read off the network: ones of the limit of the
/// upward iteration.
pub fn cwa_via_snp(db: &Database) -> Result<BTreeSet<VarId>, CompileError> {
    Ok(iterate_via_snp(db, Direction::Up)?.chain.limit().ones_set())
}

/// Finite-failure negation read off the network: ones of the limit of the
/// downward iteration.
pub fn naf_via_snp(db: &Database) -> Result<BTreeSet<VarId>, CompileError> {
    Ok(iterate_via_snp(db, Direction::Down)?
        .chain
        .limit()
        .ones_set())
}

/// One row of a spike table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub label: String,
    pub neuron: usize,
    /// Output rows carry the semantic reading (at odd columns).
    pub semantic: bool,
    pub counts: Vec<u64>,
}

/// The full neuron-by-step spike table of an iteration run, rows ordered
/// `σ_1 .. σ_{2n+k}, σ_T, σ_G`. Columns run through the last productive
/// iterate; the confirming repeat cycle is not shown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceTable {
    pub direction: Direction,
    pub rows: Vec<TableRow>,
    pub columns: usize,
}

impl TraceTable {
    /// TSV rendering: header of `C_0..C_t`, then one labelled row per neuron.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for t in 0..self.columns {
            out.push_str(&format!("\tC_{t}"));
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.label);
            for count in &row.counts {
                out.push_str(&format!("\t{count}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn document(&self) -> TraceTableDocument {
        TraceTableDocument {
            direction: self.direction,
            columns: (0..self.columns).map(|t| format!("C_{t}")).collect(),
            semantic_columns: (0..self.columns).filter(|t| t % 2 == 1).collect(),
            rows: self
                .rows
                .iter()
                .map(|r| TableRowDocument {
                    label: r.label.clone(),
                    semantic: r.semantic,
                    counts: r.counts.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceTableDocument {
    pub direction: Direction,
    pub columns: Vec<String>,
    /// Columns at which the output rows carry an iterate of the failure
    /// operator; even-step output cells are bookkeeping only.
    pub semantic_columns: Vec<usize>,
    pub rows: Vec<TableRowDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRowDocument {
    pub label: String,
    pub semantic: bool,
    pub counts: Vec<u64>,
}

/// Row order used by the printed tables: everything in index order except
/// that `σ_T` is shown before `σ_G`.
fn table_row_order(layout: &NeuronLayout) -> Vec<usize> {
    let mut order: Vec<usize> = (0..2 * layout.n + layout.k).collect();
    order.push(layout.clock_t());
    order.push(layout.clock_g());
    order
}

/// Runs the iteration and lays the trace out as a spike table.
pub fn trace_table(db: &Database, direction: Direction) -> Result<TraceTable, CompileError> {
    let run = iterate_via_snp(db, direction)?;
    let columns = 2 * run.chain.iterations_to_fixpoint + 2;
    let layout = run.layout;
    let rows = table_row_order(&layout)
        .into_iter()
        .map(|neuron| TableRow {
            label: layout.label(neuron),
            neuron,
            semantic: matches!(layout.role(neuron), NeuronRole::Output(_)),
            counts: run.trace.configurations[..columns]
                .iter()
                .map(|c| c.0[neuron])
                .collect(),
        })
        .collect();
    Ok(TraceTable {
        direction,
        rows,
        columns,
    })
}

/// Checks the clock and parity-emptiness properties on every configuration
/// of a trace: `G` holds exactly one spike at even steps and `T` at odd
/// steps; rule and output neurons are empty at even steps; variable neurons
/// are empty at odd steps.
pub fn verify_trace_structure(layout: &NeuronLayout, trace: &Trace) -> Result<(), String> {
    for (t, config) in trace.configurations.iter().enumerate() {
        let even = t % 2 == 0;
        let (g, tt) = (config.0[layout.clock_g()], config.0[layout.clock_t()]);
        let (want_g, want_t) = if even { (1, 0) } else { (0, 1) };
        if (g, tt) != (want_g, want_t) {
            return Err(format!(
                "step {t}: clock holds (G={g}, T={tt}), expected (G={want_g}, T={want_t})"
            ));
        }
        for index in 0..layout.degree() {
            let count = config.0[index];
            let must_be_empty = match layout.role(index) {
                NeuronRole::Output(_) | NeuronRole::RuleNeuron(_) => even,
                NeuronRole::Variable(_) => !even,
                _ => false,
            };
            if must_be_empty && count != 0 {
                return Err(format!(
                    "step {t}: neuron {} holds {count} spikes but must be empty",
                    layout.label(index)
                ));
            }
        }
    }
    Ok(())
}

/// The exported index map: neuron, label, role, and source entity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutDocument {
    pub entries: Vec<LayoutEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutEntry {
    pub index: usize,
    pub label: String,
    pub role: String,
    pub source: Option<String>,
}

pub fn layout_document(db: &Database, layout: &NeuronLayout) -> LayoutDocument {
    let entries = (0..layout.degree())
        .map(|index| {
            let (role, source) = match layout.role(index) {
                NeuronRole::Output(v) => ("output", Some(db.var_name(v).to_string())),
                NeuronRole::Variable(v) => ("variable", Some(db.var_name(v).to_string())),
                NeuronRole::RuleNeuron(r) => ("rule", Some(db.rule_label(r))),
                NeuronRole::ClockG => ("clock_g", None),
                NeuronRole::ClockT => ("clock_t", None),
            };
            LayoutEntry {
                index: index + 1,
                label: layout.label(index),
                role: role.to_string(),
                source,
            }
        })
        .collect();
    LayoutDocument { entries }
}

/// Synapse digraph in DOT form with role-colored nodes.
pub fn layout_dot(db: &Database, system: &SnpSystem, layout: &NeuronLayout) -> String {
    let mut out = String::from("digraph snp {\n  rankdir=LR;\n  node [style=filled];\n");
    for index in 0..layout.degree() {
        let (color, shape) = match layout.role(index) {
            NeuronRole::Output(_) => ("lightblue", "circle"),
            NeuronRole::Variable(_) => ("palegreen", "circle"),
            NeuronRole::RuleNeuron(_) => ("lightyellow", "box"),
            NeuronRole::ClockG | NeuronRole::ClockT => ("lightcoral", "doublecircle"),
        };
        let source = match layout.role(index) {
            NeuronRole::Output(v) | NeuronRole::Variable(v) => {
                format!("\\n{}", db.var_name(v))
            }
            NeuronRole::RuleNeuron(r) => format!("\\n{}", db.rule_label(r)),
            _ => String::new(),
        };
        out.push_str(&format!(
            "  n{index} [label=\"{}{source}\", fillcolor={color}, shape={shape}];\n",
            layout.label(index)
        ));
    }
    for &(from, to) in &system.synapses {
        out.push_str(&format!("  n{from} -> n{to};\n"));
    }
    out.push_str("}\n");
    out
}

/// Convenience wrapper for callers that stop on a predicate over the trace.
pub fn run_compiled(
    system: &SnpSystem,
    max_steps: usize,
    stop: impl FnMut(&Trace) -> bool,
) -> Result<Trace, SimError> {
    run_until(system, &ChoicePolicy::Strict, max_steps, stop)
}
