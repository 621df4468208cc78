//! Synchronous simulator for spiking neural P systems.
//!
//! A system is a digraph of neurons exchanging indistinguishable spikes. At
//! every step each neuron with at least one applicable rule must apply
//! exactly one; firing removes `consume` spikes and delivers `emit` spikes
//! along every outgoing synapse, forgetting erases exactly its threshold.
//! Deliveries land in the next configuration; there are no delays.
//!
//! Rule guards are regular sets over a one-letter alphabet, represented
//! semantically as ultimately periodic sets of spike counts (every unary
//! regular language has this form).

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An ultimately periodic set of spike counts: a finite set of exact values
/// plus arithmetic progressions `{offset + t * period | t >= 0}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpikeCondition {
    pub exact: BTreeSet<u64>,
    pub progressions: BTreeSet<(u64, u64)>,
}

impl SpikeCondition {
    /// The singleton set `{count}`, the only shape the compiler emits.
    pub fn exactly(count: u64) -> Self {
        SpikeCondition {
            exact: std::iter::once(count).collect(),
            progressions: BTreeSet::new(),
        }
    }

    /// All counts `>= floor`.
    pub fn at_least(floor: u64) -> Self {
        SpikeCondition {
            exact: BTreeSet::new(),
            progressions: std::iter::once((floor, 1)).collect(),
        }
    }

    pub fn matches(&self, count: u64) -> bool {
        self.exact.contains(&count)
            || self
                .progressions
                .iter()
                .any(|&(offset, period)| count >= offset && (count - offset).is_multiple_of(period))
    }
}

/// `E / a^consume -> a^emit`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiringRule {
    pub condition: SpikeCondition,
    pub consume: u64,
    pub emit: u64,
}

/// `a^threshold -> λ`: erases all spikes when the count is exactly the
/// threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForgettingRule {
    pub threshold: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Neuron {
    pub label: String,
    pub initial_spikes: u64,
    pub firing: Vec<FiringRule>,
    pub forgetting: Vec<ForgettingRule>,
}

impl Neuron {
    pub fn new(label: impl Into<String>, initial_spikes: u64) -> Self {
        Neuron {
            label: label.into(),
            initial_spikes,
            firing: Vec::new(),
            forgetting: Vec::new(),
        }
    }
}

/// Reference to a rule inside a neuron, by kind and list position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleChoice {
    Firing(usize),
    Forgetting(usize),
}

/// A spiking neural P system: neurons indexed `0..m` and a self-loop-free
/// synapse relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnpSystem {
    pub neurons: Vec<Neuron>,
    pub synapses: BTreeSet<(usize, usize)>,
}

impl SnpSystem {
    pub fn degree(&self) -> usize {
        self.neurons.len()
    }

    pub fn successors(&self, from: usize) -> impl Iterator<Item = usize> + '_ {
        self.synapses
            .range((from, 0)..(from + 1, 0))
            .map(|&(_, to)| to)
    }

    pub fn labels(&self) -> Vec<String> {
        self.neurons.iter().map(|n| n.label.clone()).collect()
    }
}

/// Spike counts of every neuron at one instant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Configuration(pub Vec<u64>);

impl Configuration {
    /// The first `n` components.
    pub fn projection(&self, n: usize) -> Result<Vec<u64>, SimError> {
        if n > self.0.len() {
            return Err(SimError::ProjectionOutOfRange {
                n,
                size: self.0.len(),
            });
        }
        Ok(self.0[..n].to_vec())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("neuron {index} ({label}) has {count} applicable rules under the strict policy: {rules}")]
    StrictViolation {
        index: usize,
        label: String,
        count: usize,
        rules: String,
    },
    #[error("step {step}: configuration has {successors} distinct successors")]
    NondeterministicStep { step: usize, successors: usize },
    #[error("state cap of {cap} configurations exceeded")]
    StateCapExceeded { cap: usize },
    #[error("projection width {n} exceeds system degree {size}")]
    ProjectionOutOfRange { n: usize, size: usize },
    #[error("configuration length {len} does not match system degree {degree}")]
    ConfigurationMismatch { len: usize, degree: usize },
    #[error("replay step {step}: recorded choice is not applicable in neuron {neuron}")]
    InapplicableChoice { step: usize, neuron: usize },
    #[error("replay step {step}: recomputed configuration differs from the recorded one")]
    ReplayMismatch { step: usize },
}

/// Rules applicable at the given spike count: firing rules whose condition
/// matches with `count >= consume`, and forgetting rules whose threshold is
/// exactly `count`. Both kinds may co-occur; the policy picks one.
pub fn applicable_rules(neuron: &Neuron, count: u64) -> Vec<RuleChoice> {
    let mut out = Vec::new();
    for (i, rule) in neuron.firing.iter().enumerate() {
        if count >= rule.consume && rule.condition.matches(count) {
            out.push(RuleChoice::Firing(i));
        }
    }
    for (i, rule) in neuron.forgetting.iter().enumerate() {
        if count == rule.threshold {
            out.push(RuleChoice::Forgetting(i));
        }
    }
    out
}

fn describe_choices(neuron: &Neuron, choices: &[RuleChoice]) -> String {
    let parts: Vec<String> = choices
        .iter()
        .map(|c| match c {
            RuleChoice::Firing(i) => {
                let r = &neuron.firing[*i];
                format!("E/a^{} -> a^{}", r.consume, r.emit)
            }
            RuleChoice::Forgetting(i) => {
                format!("a^{} -> lambda", neuron.forgetting[*i].threshold)
            }
        })
        .collect();
    parts.join(", ")
}

/// How a step resolves a neuron with several applicable rules.
#[derive(Debug, Clone)]
pub enum ChoicePolicy {
    /// Error out when any neuron has more than one applicable rule.
    Strict,
    /// Draw uniformly from an explicit, seeded generator.
    SeededRandom(u64),
}

/// Per-run policy state; the random variant owns its generator.
pub enum PolicyState {
    Strict,
    Seeded(Box<ChaCha8Rng>),
}

impl ChoicePolicy {
    pub fn state(&self) -> PolicyState {
        match self {
            ChoicePolicy::Strict => PolicyState::Strict,
            ChoicePolicy::SeededRandom(seed) => {
                PolicyState::Seeded(Box::new(ChaCha8Rng::seed_from_u64(*seed)))
            }
        }
    }
}

/// One synchronous transition: the successor configuration and the rule each
/// fired neuron applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepResult {
    pub next: Configuration,
    pub fired: Vec<(usize, RuleChoice)>,
}

fn check_config(system: &SnpSystem, config: &Configuration) -> Result<(), SimError> {
    if config.0.len() != system.degree() {
        return Err(SimError::ConfigurationMismatch {
            len: config.0.len(),
            degree: system.degree(),
        });
    }
    Ok(())
}

/// Applies chosen rules: consumption and deliveries resolve simultaneously.
fn apply(system: &SnpSystem, config: &Configuration, fired: &[(usize, RuleChoice)]) -> Configuration {
    let mut next = config.0.clone();
    for &(index, choice) in fired {
        let neuron = &system.neurons[index];
        match choice {
            RuleChoice::Firing(i) => {
                let rule = &neuron.firing[i];
                next[index] -= rule.consume;
                for to in system.successors(index) {
                    next[to] += rule.emit;
                }
            }
            RuleChoice::Forgetting(i) => {
                next[index] -= neuron.forgetting[i].threshold;
            }
        }
    }
    Configuration(next)
}

/// One synchronous step under the given policy.
pub fn step(
    system: &SnpSystem,
    config: &Configuration,
    policy: &mut PolicyState,
) -> Result<StepResult, SimError> {
    check_config(system, config)?;
    let mut fired = Vec::new();
    for (index, neuron) in system.neurons.iter().enumerate() {
        let choices = applicable_rules(neuron, config.0[index]);
        match (choices.len(), &mut *policy) {
            (0, _) => {}
            (1, _) => fired.push((index, choices[0])),
            (_, PolicyState::Strict) => {
                return Err(SimError::StrictViolation {
                    index,
                    label: neuron.label.clone(),
                    count: choices.len(),
                    rules: describe_choices(neuron, &choices),
                })
            }
            (m, PolicyState::Seeded(rng)) => fired.push((index, choices[rng.gen_range(0..m)])),
        }
    }
    Ok(StepResult {
        next: apply(system, config, &fired),
        fired,
    })
}

/// Every successor of one step: the product of per-neuron choices,
/// deduplicated by resulting configuration, in choice order.
pub fn step_exhaustive(system: &SnpSystem, config: &Configuration) -> Result<Vec<StepResult>, SimError> {
    check_config(system, config)?;
    let per_neuron: Vec<(usize, Vec<RuleChoice>)> = system
        .neurons
        .iter()
        .enumerate()
        .map(|(index, neuron)| (index, applicable_rules(neuron, config.0[index])))
        .filter(|(_, choices)| !choices.is_empty())
        .collect();

    let mut results: Vec<StepResult> = Vec::new();
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut combo: Vec<usize> = vec![0; per_neuron.len()];
    loop {
        let fired: Vec<(usize, RuleChoice)> = per_neuron
            .iter()
            .zip(&combo)
            .map(|((index, choices), pick)| (*index, choices[*pick]))
            .collect();
        let next = apply(system, config, &fired);
        if seen.insert(next.0.clone()) {
            results.push(StepResult { next, fired });
        }
        // Odometer increment over the choice product.
        let mut pos = combo.len();
        loop {
            if pos == 0 {
                return Ok(results);
            }
            pos -= 1;
            combo[pos] += 1;
            if combo[pos] < per_neuron[pos].1.len() {
                break;
            }
            combo[pos] = 0;
        }
    }
}

/// A computation: every configuration from the initial one, plus the choices
/// that produced each transition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub configurations: Vec<Configuration>,
    pub choices: Vec<Vec<(usize, RuleChoice)>>,
}

impl Trace {
    pub fn steps(&self) -> usize {
        self.choices.len()
    }

    pub fn last(&self) -> &Configuration {
        self.configurations.last().expect("trace holds C_0")
    }

    /// Re-applies the recorded choices from the initial configuration and
    /// checks every recomputed configuration against the recorded one.
    pub fn replay(&self, system: &SnpSystem) -> Result<(), SimError> {
        let mut current = self.configurations[0].clone();
        for (step_index, fired) in self.choices.iter().enumerate() {
            for &(neuron, choice) in fired {
                let applicable = applicable_rules(&system.neurons[neuron], current.0[neuron]);
                if !applicable.contains(&choice) {
                    return Err(SimError::InapplicableChoice {
                        step: step_index + 1,
                        neuron,
                    });
                }
            }
            current = apply(system, &current, fired);
            if current != self.configurations[step_index + 1] {
                return Err(SimError::ReplayMismatch {
                    step: step_index + 1,
                });
            }
        }
        Ok(())
    }
}

pub fn initial_configuration(system: &SnpSystem) -> Configuration {
    Configuration(system.neurons.iter().map(|n| n.initial_spikes).collect())
}

/// Runs `steps` transitions from the initial configuration.
pub fn run(system: &SnpSystem, policy: &ChoicePolicy, steps: usize) -> Result<Trace, SimError> {
    run_until(system, policy, steps, |_| false)
}

/// Runs until `stop` holds on the trace or `max_steps` transitions elapsed.
pub fn run_until(
    system: &SnpSystem,
    policy: &ChoicePolicy,
    max_steps: usize,
    mut stop: impl FnMut(&Trace) -> bool,
) -> Result<Trace, SimError> {
    let mut state = policy.state();
    let mut trace = Trace {
        configurations: vec![initial_configuration(system)],
        choices: Vec::new(),
    };
    while trace.steps() < max_steps && !stop(&trace) {
        let result = step(system, trace.last(), &mut state)?;
        trace.configurations.push(result.next);
        trace.choices.push(result.fired);
    }
    Ok(trace)
}

/// Walks the exhaustive successor relation, requiring it to stay a single
/// path. The cap bounds the configurations visited; a branch point is an
/// error. This is the determinism check used on compiled systems.
pub fn run_exhaustive(system: &SnpSystem, max_steps: usize, state_cap: usize) -> Result<Trace, SimError> {
    let mut trace = Trace {
        configurations: vec![initial_configuration(system)],
        choices: Vec::new(),
    };
    while trace.steps() < max_steps {
        if trace.configurations.len() > state_cap {
            return Err(SimError::StateCapExceeded { cap: state_cap });
        }
        let mut successors = step_exhaustive(system, trace.last())?;
        if successors.len() != 1 {
            return Err(SimError::NondeterministicStep {
                step: trace.steps() + 1,
                successors: successors.len(),
            });
        }
        let result = successors.pop().expect("length checked");
        trace.configurations.push(result.next);
        trace.choices.push(result.fired);
    }
    Ok(trace)
}

/// A single structural defect found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    SelfLoop { neuron: usize },
    SynapseOutOfRange { from: usize, to: usize },
    ZeroConsume { neuron: usize, rule: usize },
    ZeroEmit { neuron: usize, rule: usize },
    ZeroThreshold { neuron: usize, rule: usize },
    ZeroPeriod { neuron: usize, rule: usize },
    ConditionBelowConsume { neuron: usize, rule: usize, count: u64 },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::SelfLoop { neuron } => write!(f, "self-loop synapse on neuron {neuron}"),
            Violation::SynapseOutOfRange { from, to } => {
                write!(f, "synapse ({from}, {to}) leaves the neuron range")
            }
            Violation::ZeroConsume { neuron, rule } => {
                write!(f, "neuron {neuron}, firing rule {rule}: consume must be >= 1")
            }
            Violation::ZeroEmit { neuron, rule } => {
                write!(f, "neuron {neuron}, firing rule {rule}: emit must be >= 1")
            }
            Violation::ZeroThreshold { neuron, rule } => {
                write!(f, "neuron {neuron}, forgetting rule {rule}: threshold must be >= 1")
            }
            Violation::ZeroPeriod { neuron, rule } => {
                write!(f, "neuron {neuron}, firing rule {rule}: progression period must be >= 1")
            }
            Violation::ConditionBelowConsume { neuron, rule, count } => write!(
                f,
                "neuron {neuron}, firing rule {rule}: condition admits count {count} below consume"
            ),
        }
    }
}

/// Checks the structural constraints: no self-loops, synapses in range,
/// positive consume/emit/threshold/periods, and no condition count below the
/// rule's consumption. An empty report means well-formed.
pub fn validate(system: &SnpSystem) -> Vec<Violation> {
    let mut report = Vec::new();
    let m = system.degree();
    for &(from, to) in &system.synapses {
        if from == to {
            report.push(Violation::SelfLoop { neuron: from });
        }
        if from >= m || to >= m {
            report.push(Violation::SynapseOutOfRange { from, to });
        }
    }
    for (ni, neuron) in system.neurons.iter().enumerate() {
        for (ri, rule) in neuron.firing.iter().enumerate() {
            if rule.consume == 0 {
                report.push(Violation::ZeroConsume { neuron: ni, rule: ri });
            }
            if rule.emit == 0 {
                report.push(Violation::ZeroEmit { neuron: ni, rule: ri });
            }
            for &count in &rule.condition.exact {
                if count < rule.consume {
                    report.push(Violation::ConditionBelowConsume {
                        neuron: ni,
                        rule: ri,
                        count,
                    });
                }
            }
            for &(offset, period) in &rule.condition.progressions {
                if period == 0 {
                    report.push(Violation::ZeroPeriod { neuron: ni, rule: ri });
                }
                if offset < rule.consume {
                    report.push(Violation::ConditionBelowConsume {
                        neuron: ni,
                        rule: ri,
                        count: offset,
                    });
                }
            }
        }
        for (ri, rule) in neuron.forgetting.iter().enumerate() {
            if rule.threshold == 0 {
                report.push(Violation::ZeroThreshold { neuron: ni, rule: ri });
            }
        }
    }
    report
}

/// Serialized form of a system; neuron indices are 1-based to match labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemDocument {
    pub degree: usize,
    pub neurons: Vec<NeuronDocument>,
    pub synapses: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeuronDocument {
    pub index: usize,
    pub label: String,
    pub initial_spikes: u64,
    pub firing: Vec<FiringRule>,
    pub forgetting: Vec<u64>,
}

pub fn system_document(system: &SnpSystem) -> SystemDocument {
    SystemDocument {
        degree: system.degree(),
        neurons: system
            .neurons
            .iter()
            .enumerate()
            .map(|(i, n)| NeuronDocument {
                index: i + 1,
                label: n.label.clone(),
                initial_spikes: n.initial_spikes,
                firing: n.firing.clone(),
                forgetting: n.forgetting.iter().map(|r| r.threshold).collect(),
            })
            .collect(),
        synapses: system.synapses.iter().map(|&(a, b)| (a + 1, b + 1)).collect(),
    }
}

impl SystemDocument {
    pub fn into_system(self) -> SnpSystem {
        SnpSystem {
            neurons: self
                .neurons
                .into_iter()
                .map(|d| Neuron {
                    label: d.label,
                    initial_spikes: d.initial_spikes,
                    firing: d.firing,
                    forgetting: d.forgetting.into_iter().map(|t| ForgettingRule { threshold: t }).collect(),
                })
                .collect(),
            synapses: self.synapses.into_iter().map(|(a, b)| (a - 1, b - 1)).collect(),
        }
    }
}

/// Serialized form of a trace, including the per-step choices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceDocument {
    pub labels: Vec<String>,
    pub configurations: Vec<Vec<u64>>,
    pub choices: Vec<Vec<(usize, RuleChoice)>>,
}

pub fn trace_document(system: &SnpSystem, trace: &Trace) -> TraceDocument {
    TraceDocument {
        labels: system.labels(),
        configurations: trace.configurations.iter().map(|c| c.0.clone()).collect(),
        choices: trace.choices.clone(),
    }
}

/// Trace as TSV: one row per neuron in index order, one column per
/// configuration.
pub fn trace_to_tsv(system: &SnpSystem, trace: &Trace) -> String {
    let mut out = String::new();
    for t in 0..trace.configurations.len() {
        out.push_str(&format!("\tC_{t}"));
    }
    out.push('\n');
    for (index, neuron) in system.neurons.iter().enumerate() {
        out.push_str(&neuron.label);
        for config in &trace.configurations {
            out.push_str(&format!("\t{}", config.0[index]));
        }
        out.push('\n');
    }
    out
}

/// Synapse digraph in DOT form.
pub fn to_dot(system: &SnpSystem) -> String {
    let mut out = String::from("digraph snp {\n  rankdir=LR;\n  node [shape=circle];\n");
    for (i, neuron) in system.neurons.iter().enumerate() {
        out.push_str(&format!("  n{} [label=\"{}\"];\n", i, neuron.label));
    }
    for &(from, to) in &system.synapses {
        out.push_str(&format!("  n{from} -> n{to};\n"));
    }
    out.push_str("}\n");
    out
}
