//! Circuit intermediate representation: typed lines, ordered gate instances,
//! explicit terminal classification, and the metrics engine.
//!
//! Line count is constant through a circuit; every line's terminal value is
//! classified exactly once as primary output, garbage, or state-next.
//! Garbage is explicit designer metadata set by the generators, never
//! inferred.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::gate::GateSpec;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetlistError {
    #[error("duplicate line name `{0}`")]
    DuplicateLineName(String),
    #[error("gate {gate} binds line {index}, but the netlist has {count} lines")]
    BindingOutOfRange { gate: usize, index: usize, count: usize },
    #[error("gate {gate} binds line `{name}` more than once")]
    DuplicateBinding { gate: usize, name: String },
    #[error("gate {gate} is {want} wide but binds {got} lines")]
    ArityMismatch { gate: usize, want: usize, got: usize },
    #[error("line `{0}` has no terminal classification")]
    UnclassifiedLine(String),
    #[error("{state_next} state-next outputs for {feedback} state-feedback lines")]
    StateCountMismatch { state_next: usize, feedback: usize },
    #[error("state-next output `{output}` feeds line `{target}`, which is not state feedback")]
    BadStateTarget { output: String, target: String },
    #[error("two state-next outputs feed line `{0}`")]
    DoubleStateTarget(String),
    #[error("assignment missing free line `{0}`")]
    MissingAssignment(String),
    #[error("assignment names `{0}`, which is not a free line")]
    ExtraAssignment(String),
    #[error("{free} free lines exceed the exhaustive check bound of {bound}")]
    ExhaustiveBoundExceeded { free: usize, bound: usize },
}

/// Role of a line at the circuit boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineRole {
    PrimaryInput,
    ConstantZero,
    ConstantOne,
    StateFeedback,
}

impl LineRole {
    pub fn is_free(self) -> bool {
        matches!(self, LineRole::PrimaryInput | LineRole::StateFeedback)
    }

    pub fn constant_value(self) -> Option<bool> {
        match self {
            LineRole::ConstantZero => Some(false),
            LineRole::ConstantOne => Some(true),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    pub name: String,
    pub role: LineRole,
}

/// Terminal classification of a line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OutputClass {
    Primary { name: String },
    Garbage,
    /// Latched into the state-feedback line `feeds` between clock phases.
    StateNext { feeds: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateInstance {
    pub gate: Arc<GateSpec>,
    /// Bound line indices, in gate line order (first binding = line A = MSB).
    pub bindings: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Netlist {
    pub name: String,
    lines: Vec<Line>,
    gates: Vec<GateInstance>,
    outputs: Vec<OutputClass>,
}

/// Delay metric granularity. `Primitive` is the model consistent with the
/// published tables (a 3×3 gate contributes its full primitive depth along a
/// path); `Unit` is the literal one-gate-one-tick reading, kept only for
/// comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DelayModel {
    #[default]
    Primitive,
    Unit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MetricsReport {
    pub gate_count: u64,
    pub quantum_cost: u64,
    pub delay: u64,
    pub garbage_count: u64,
    pub line_count: u64,
    pub constant_inputs: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReversibilityVerdict {
    Reversible,
    /// Two distinct free-input assignments that produced the same terminal
    /// vector (assignments packed little-endian over the free lines in line
    /// order).
    NotReversible { first: u64, second: u64 },
}

/// Result of one combinational evaluation: the terminal value of every line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalResult {
    values: Vec<bool>,
}

impl EvalResult {
    pub fn line_values(&self) -> &[bool] {
        &self.values
    }
}

impl Netlist {
    pub fn new(
        name: impl Into<String>,
        lines: Vec<Line>,
        gates: Vec<GateInstance>,
        outputs: Vec<OutputClass>,
    ) -> Result<Netlist, NetlistError> {
        let mut seen = HashSet::new();
        for line in &lines {
            if !seen.insert(line.name.clone()) {
                return Err(NetlistError::DuplicateLineName(line.name.clone()));
            }
        }
        for (g, inst) in gates.iter().enumerate() {
            if inst.bindings.len() != inst.gate.width {
                return Err(NetlistError::ArityMismatch {
                    gate: g,
                    want: inst.gate.width,
                    got: inst.bindings.len(),
                });
            }
            let mut bound = HashSet::new();
            for &b in &inst.bindings {
                if b >= lines.len() {
                    return Err(NetlistError::BindingOutOfRange {
                        gate: g,
                        index: b,
                        count: lines.len(),
                    });
                }
                if !bound.insert(b) {
                    return Err(NetlistError::DuplicateBinding {
                        gate: g,
                        name: lines[b].name.clone(),
                    });
                }
            }
        }
        if outputs.len() != lines.len() {
            let missing = outputs.len().min(lines.len());
            return Err(NetlistError::UnclassifiedLine(
                lines.get(missing).map(|l| l.name.clone()).unwrap_or_default(),
            ));
        }
        let feedback: Vec<usize> = (0..lines.len())
            .filter(|&i| lines[i].role == LineRole::StateFeedback)
            .collect();
        let mut fed = HashSet::new();
        let mut state_next = 0usize;
        for (i, class) in outputs.iter().enumerate() {
            if let OutputClass::StateNext { feeds } = class {
                state_next += 1;
                if !feedback.contains(feeds) {
                    return Err(NetlistError::BadStateTarget {
                        output: lines[i].name.clone(),
                        target: lines
                            .get(*feeds)
                            .map(|l| l.name.clone())
                            .unwrap_or_else(|| format!("#{feeds}")),
                    });
                }
                if !fed.insert(*feeds) {
                    return Err(NetlistError::DoubleStateTarget(lines[*feeds].name.clone()));
                }
            }
        }
        if state_next != feedback.len() {
            return Err(NetlistError::StateCountMismatch { state_next, feedback: feedback.len() });
        }
        Ok(Netlist { name: name.into(), lines, gates, outputs })
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn gates(&self) -> &[GateInstance] {
        &self.gates
    }

    pub fn outputs(&self) -> &[OutputClass] {
        &self.outputs
    }

    pub fn line_index(&self, name: &str) -> Option<usize> {
        self.lines.iter().position(|l| l.name == name)
    }

    /// Indices of primary-input and state-feedback lines, in line order.
    pub fn free_lines(&self) -> Vec<usize> {
        (0..self.lines.len()).filter(|&i| self.lines[i].role.is_free()).collect()
    }

    pub fn feedback_lines(&self) -> Vec<usize> {
        (0..self.lines.len())
            .filter(|&i| self.lines[i].role == LineRole::StateFeedback)
            .collect()
    }

    /// Combinational evaluation with free-line values given in line order.
    pub fn evaluate_indexed(&self, free_values: &[bool]) -> EvalResult {
        let free = self.free_lines();
        assert_eq!(free.len(), free_values.len(), "free assignment width");
        let mut values = vec![false; self.lines.len()];
        for (i, line) in self.lines.iter().enumerate() {
            if let Some(v) = line.role.constant_value() {
                values[i] = v;
            }
        }
        for (&idx, &v) in free.iter().zip(free_values) {
            values[idx] = v;
        }
        for inst in &self.gates {
            let input = inst
                .bindings
                .iter()
                .fold(0u32, |acc, &b| (acc << 1) | u32::from(values[b]));
            let out = inst.gate.apply_index(input);
            let w = inst.bindings.len();
            for (pos, &b) in inst.bindings.iter().enumerate() {
                values[b] = (out >> (w - 1 - pos)) & 1 == 1;
            }
        }
        EvalResult { values }
    }

    /// Named evaluation; the assignment must cover exactly the free lines.
    pub fn evaluate(&self, assignment: &BTreeMap<String, bool>) -> Result<EvalResult, NetlistError> {
        let free = self.free_lines();
        let names: HashSet<&str> = free.iter().map(|&i| self.lines[i].name.as_str()).collect();
        for key in assignment.keys() {
            if !names.contains(key.as_str()) {
                return Err(NetlistError::ExtraAssignment(key.clone()));
            }
        }
        let mut values = Vec::with_capacity(free.len());
        for &i in &free {
            match assignment.get(&self.lines[i].name) {
                Some(&v) => values.push(v),
                None => return Err(NetlistError::MissingAssignment(self.lines[i].name.clone())),
            }
        }
        Ok(self.evaluate_indexed(&values))
    }

    /// Primary outputs of an evaluation, by output name.
    pub fn primary_outputs(&self, result: &EvalResult) -> BTreeMap<String, bool> {
        let mut out = BTreeMap::new();
        for (i, class) in self.outputs.iter().enumerate() {
            if let OutputClass::Primary { name } = class {
                out.insert(name.clone(), result.values[i]);
            }
        }
        out
    }

    /// (feedback line index, next value) pairs from an evaluation.
    pub fn state_next(&self, result: &EvalResult) -> Vec<(usize, bool)> {
        self.outputs
            .iter()
            .enumerate()
            .filter_map(|(i, class)| match class {
                OutputClass::StateNext { feeds } => Some((*feeds, result.values[i])),
                _ => None,
            })
            .collect()
    }

    pub fn gate_count(&self) -> u64 {
        self.gates.len() as u64
    }

    pub fn quantum_cost(&self) -> u64 {
        self.gates.iter().map(|g| g.gate.quantum_cost).sum()
    }

    pub fn garbage_count(&self) -> u64 {
        self.outputs.iter().filter(|c| matches!(c, OutputClass::Garbage)).count() as u64
    }

    pub fn constant_inputs(&self) -> u64 {
        self.lines.iter().filter(|l| l.role.constant_value().is_some()).count() as u64
    }

    pub fn delay(&self) -> u64 {
        self.delay_with(DelayModel::Primitive)
    }

    /// Weighted longest path: a gate occupies all its bound lines for its
    /// delay and starts when every bound line is free.
    pub fn delay_with(&self, model: DelayModel) -> u64 {
        let mut free_at = vec![0u64; self.lines.len()];
        for inst in &self.gates {
            let weight = match model {
                DelayModel::Primitive => inst.gate.delay(),
                DelayModel::Unit => 1,
            };
            let start = inst.bindings.iter().map(|&b| free_at[b]).max().unwrap_or(0);
            for &b in &inst.bindings {
                free_at[b] = start + weight;
            }
        }
        free_at.into_iter().max().unwrap_or(0)
    }

    pub fn metrics(&self) -> MetricsReport {
        self.metrics_with(DelayModel::Primitive)
    }

    pub fn metrics_with(&self, model: DelayModel) -> MetricsReport {
        MetricsReport {
            gate_count: self.gate_count(),
            quantum_cost: self.quantum_cost(),
            delay: self.delay_with(model),
            garbage_count: self.garbage_count(),
            line_count: self.lines.len() as u64,
            constant_inputs: self.constant_inputs(),
        }
    }

    /// Exhaustively verifies that distinct free-input assignments produce
    /// distinct terminal vectors. Refuses above 22 free lines rather than
    /// sampling.
    pub fn check_reversibility(&self) -> Result<ReversibilityVerdict, NetlistError> {
        const BOUND: usize = 22;
        let free = self.free_lines();
        if free.len() > BOUND {
            return Err(NetlistError::ExhaustiveBoundExceeded { free: free.len(), bound: BOUND });
        }
        let mut seen: HashMap<Vec<u64>, u64> = HashMap::new();
        for assignment in 0u64..(1u64 << free.len()) {
            let bits: Vec<bool> = (0..free.len()).map(|i| assignment >> i & 1 == 1).collect();
            let result = self.evaluate_indexed(&bits);
            let mut packed = vec![0u64; (self.lines.len() + 63) / 64];
            for (i, &v) in result.values.iter().enumerate() {
                if v {
                    packed[i / 64] |= 1 << (i % 64);
                }
            }
            if let Some(&first) = seen.get(&packed) {
                return Ok(ReversibilityVerdict::NotReversible { first, second: assignment });
            }
            seen.insert(packed, assignment);
        }
        Ok(ReversibilityVerdict::Reversible)
    }
}

/// Incremental construction helper used by the generators and the parser.
#[derive(Debug, Default)]
pub struct NetlistBuilder {
    name: String,
    lines: Vec<Line>,
    gates: Vec<GateInstance>,
    outputs: Vec<Option<OutputClass>>,
}

impl NetlistBuilder {
    pub fn new(name: impl Into<String>) -> NetlistBuilder {
        NetlistBuilder { name: name.into(), ..Default::default() }
    }

    pub fn line(&mut self, name: impl Into<String>, role: LineRole) -> usize {
        self.lines.push(Line { name: name.into(), role });
        self.outputs.push(None);
        self.lines.len() - 1
    }

    pub fn gate(&mut self, gate: Arc<GateSpec>, bindings: Vec<usize>) {
        self.gates.push(GateInstance { gate, bindings });
    }

    pub fn primary(&mut self, line: usize, name: impl Into<String>) {
        self.outputs[line] = Some(OutputClass::Primary { name: name.into() });
    }

    pub fn garbage(&mut self, line: usize) {
        self.outputs[line] = Some(OutputClass::Garbage);
    }

    pub fn state_next(&mut self, line: usize, feeds: usize) {
        self.outputs[line] = Some(OutputClass::StateNext { feeds });
    }

    pub fn line_name(&self, line: usize) -> &str {
        &self.lines[line].name
    }

    pub fn finish(self) -> Result<Netlist, NetlistError> {
        let mut outputs = Vec::with_capacity(self.outputs.len());
        for (i, class) in self.outputs.into_iter().enumerate() {
            match class {
                Some(c) => outputs.push(c),
                None => return Err(NetlistError::UnclassifiedLine(self.lines[i].name.clone())),
            }
        }
        Netlist::new(self.name, self.lines, self.gates, outputs)
    }
}
