//! Clocked two-phase simulation of sequential netlists, an ideal RAM
//! reference oracle, and differential testing between them.
//!
//! Reversible netlists cannot contain combinational cycles, so feedback is
//! registered: each cycle evaluates the combinational netlist twice — CLK=1
//! (master transparent) then CLK=0 (slave transparent) — latching the
//! state-next outputs into the state-feedback lines after each phase. Data
//! inputs are held constant across a cycle. All storage initializes to 0.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::netlist::{EvalResult, LineRole, Netlist, NetlistError};
use crate::synth::{build_rram, RamConfig, SynthError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("address {addr} out of range for {rows} rows")]
    AddressOutOfRange { addr: u64, rows: u64 },
    #[error("word `{word}` has {got} bits, expected {want}")]
    WordWidth { word: String, got: usize, want: usize },
    #[error("script line {line}: {message}")]
    Script { line: usize, message: String },
}

/// A netlist plus its registered state, stepped one clock cycle at a time.
pub struct ClockedMachine {
    netlist: Netlist,
    feedback: Vec<usize>,
    clock_lines: Vec<usize>,
    state: Vec<bool>,
}

impl ClockedMachine {
    /// Primary-input lines whose name starts with `clk` are driven by the
    /// clock; every other free line is data or registered state.
    pub fn new(netlist: Netlist) -> ClockedMachine {
        let feedback = netlist.feedback_lines();
        let clock_lines = (0..netlist.lines().len())
            .filter(|&i| {
                netlist.lines()[i].role == LineRole::PrimaryInput
                    && netlist.lines()[i].name.starts_with("clk")
            })
            .collect();
        let state = vec![false; feedback.len()];
        ClockedMachine { netlist, feedback, clock_lines, state }
    }

    pub fn netlist(&self) -> &Netlist {
        &self.netlist
    }

    pub fn state_of(&self, line_name: &str) -> Option<bool> {
        let idx = self.netlist.line_index(line_name)?;
        let pos = self.feedback.iter().position(|&f| f == idx)?;
        Some(self.state[pos])
    }

    pub fn set_state(&mut self, line_name: &str, value: bool) -> bool {
        if let Some(idx) = self.netlist.line_index(line_name) {
            if let Some(pos) = self.feedback.iter().position(|&f| f == idx) {
                self.state[pos] = value;
                return true;
            }
        }
        false
    }

    fn phase(&self, clk: bool, inputs: &BTreeMap<String, bool>) -> Result<EvalResult, SimError> {
        let lines = self.netlist.lines();
        let mut values = Vec::new();
        for &i in &self.netlist.free_lines() {
            let v = if self.clock_lines.contains(&i) {
                clk
            } else if lines[i].role == LineRole::StateFeedback {
                let pos = self.feedback.iter().position(|&f| f == i).unwrap();
                self.state[pos]
            } else {
                match inputs.get(&lines[i].name) {
                    Some(&v) => v,
                    None => return Err(NetlistError::MissingAssignment(lines[i].name.clone()).into()),
                }
            };
            values.push(v);
        }
        Ok(self.netlist.evaluate_indexed(&values))
    }

    fn latch(&mut self, result: &EvalResult) {
        for (feeds, value) in self.netlist.state_next(result) {
            let pos = self.feedback.iter().position(|&f| f == feeds).unwrap();
            self.state[pos] = value;
        }
    }

    /// Evaluation with CLK=1 only, without latching; exposes the
    /// transparent-master view for edge-discipline checks.
    pub fn peek_high_phase(
        &self,
        inputs: &BTreeMap<String, bool>,
    ) -> Result<BTreeMap<String, bool>, SimError> {
        let result = self.phase(true, inputs)?;
        Ok(self.netlist.primary_outputs(&result))
    }

    /// One full clock cycle (CLK=1 then CLK=0); returns the post-cycle
    /// primary outputs.
    pub fn step_cycle(
        &mut self,
        inputs: &BTreeMap<String, bool>,
    ) -> Result<BTreeMap<String, bool>, SimError> {
        let high = self.phase(true, inputs)?;
        self.latch(&high);
        let low = self.phase(false, inputs)?;
        self.latch(&low);
        Ok(self.netlist.primary_outputs(&low))
    }
}

/// One RAM bus operation. Words are bit vectors with index j on data
/// column j; in text form the leftmost character is the highest column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RamOp {
    Write { addr: u64, word: Vec<bool> },
    Read { addr: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OpScript {
    pub ops: Vec<RamOp>,
}

pub fn word_to_string(word: &[bool]) -> String {
    word.iter().rev().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn word_from_string(text: &str, m: usize) -> Result<Vec<bool>, SimError> {
    if text.len() != m || text.chars().any(|c| c != '0' && c != '1') {
        return Err(SimError::WordWidth { word: text.to_string(), got: text.len(), want: m });
    }
    Ok(text.chars().rev().map(|c| c == '1').collect())
}

impl OpScript {
    /// Line-oriented script: `w <addr> <bits>` or `r <addr>`, `#` comments.
    pub fn parse(text: &str, config: &RamConfig) -> Result<OpScript, SimError> {
        let mut ops = Vec::new();
        for (ln0, raw) in text.lines().enumerate() {
            let ln = ln0 + 1;
            let body = raw.split('#').next().unwrap_or("");
            let toks: Vec<&str> = body.split_whitespace().collect();
            if toks.is_empty() {
                continue;
            }
            let addr_tok = toks.get(1).ok_or_else(|| SimError::Script {
                line: ln,
                message: "missing address".into(),
            })?;
            let addr: u64 = addr_tok.parse().map_err(|_| SimError::Script {
                line: ln,
                message: format!("`{addr_tok}` is not an address"),
            })?;
            let op = match toks[0] {
                "w" => {
                    let bits = toks.get(2).ok_or_else(|| SimError::Script {
                        line: ln,
                        message: "write needs a word".into(),
                    })?;
                    RamOp::Write { addr, word: word_from_string(bits, config.m as usize)? }
                }
                "r" => RamOp::Read { addr },
                other => {
                    return Err(SimError::Script {
                        line: ln,
                        message: format!("unknown op `{other}` (use w/r)"),
                    })
                }
            };
            if toks.len() > if matches!(op, RamOp::Write { .. }) { 3 } else { 2 } {
                return Err(SimError::Script { line: ln, message: "trailing tokens".into() });
            }
            ops.push(op);
        }
        let script = OpScript { ops };
        script.validate(config)?;
        Ok(script)
    }

    pub fn validate(&self, config: &RamConfig) -> Result<(), SimError> {
        let rows = config.rows() as u64;
        for op in &self.ops {
            let addr = match op {
                RamOp::Write { addr, word } => {
                    if word.len() != config.m as usize {
                        return Err(SimError::WordWidth {
                            word: word_to_string(word),
                            got: word.len(),
                            want: config.m as usize,
                        });
                    }
                    *addr
                }
                RamOp::Read { addr } => *addr,
            };
            if addr >= rows {
                return Err(SimError::AddressOutOfRange { addr, rows });
            }
        }
        Ok(())
    }
}

/// Ideal RAM: write(a, w) then read(a) = w, read is non-destructive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RamOracle {
    words: Vec<Vec<bool>>,
}

impl RamOracle {
    pub fn new(config: &RamConfig) -> RamOracle {
        RamOracle { words: vec![vec![false; config.m as usize]; config.rows()] }
    }

    pub fn write(&mut self, addr: u64, word: &[bool]) {
        self.words[addr as usize] = word.to_vec();
    }

    pub fn read(&self, addr: u64) -> Vec<bool> {
        self.words[addr as usize].clone()
    }

    pub fn words(&self) -> &[Vec<bool>] {
        &self.words
    }
}

/// The generated RAM netlist under clocked simulation.
pub struct RamMachine {
    machine: ClockedMachine,
    config: RamConfig,
}

impl RamMachine {
    pub fn new(config: RamConfig) -> Result<RamMachine, SimError> {
        let netlist = build_rram(config)?;
        Ok(RamMachine { machine: ClockedMachine::new(netlist), config })
    }

    pub fn config(&self) -> &RamConfig {
        &self.config
    }

    fn inputs_for(&self, write: bool, addr: u64, word: Option<&[bool]>) -> BTreeMap<String, bool> {
        let mut inputs = BTreeMap::new();
        for k in 0..self.config.n {
            inputs.insert(format!("s{k}"), addr >> k & 1 == 1);
        }
        inputs.insert("w".to_string(), write);
        for j in 0..self.config.m as usize {
            inputs.insert(format!("d{j}"), word.map_or(false, |w| w[j]));
        }
        inputs
    }

    /// Drives one operation for one clock cycle; returns the read bus for
    /// reads.
    pub fn cycle(&mut self, op: &RamOp) -> Result<Option<Vec<bool>>, SimError> {
        match op {
            RamOp::Write { addr, word } => {
                self.machine.step_cycle(&self.inputs_for(true, *addr, Some(word)))?;
                Ok(None)
            }
            RamOp::Read { addr } => {
                let outs = self.machine.step_cycle(&self.inputs_for(false, *addr, None))?;
                let word =
                    (0..self.config.m).map(|j| outs[&format!("q{j}")]).collect::<Vec<bool>>();
                Ok(Some(word))
            }
        }
    }

    /// Stored slave bit of every cell, indexed [row][column].
    pub fn stored_bits(&self) -> Vec<Vec<bool>> {
        (0..self.config.rows())
            .map(|i| {
                (0..self.config.m as usize)
                    .map(|j| self.machine.state_of(&format!("fbs{i}_{j}")).unwrap())
                    .collect()
            })
            .collect()
    }
}

/// Runs the script against the generated RAM, one clock cycle per
/// operation; returns the bus value after each read.
pub fn run_script(config: RamConfig, script: &OpScript) -> Result<Vec<Vec<bool>>, SimError> {
    script.validate(&config)?;
    let mut machine = RamMachine::new(config)?;
    let mut trace = Vec::new();
    for op in &script.ops {
        if let Some(word) = machine.cycle(op)? {
            trace.push(word);
        }
    }
    Ok(trace)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divergence {
    pub script: usize,
    pub op: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffReport {
    pub scripts_run: usize,
    pub ops_run: usize,
    pub divergence: Option<Divergence>,
}

/// Seeded differential test of the generated RAM against [`RamOracle`].
/// After every cycle the full stored state is compared word for word, which
/// covers both the refresh property (reads change nothing) and isolation of
/// non-selected rows on writes.
pub fn differential_test(
    config: RamConfig,
    script_count: usize,
    ops_per_script: usize,
    seed: u64,
) -> Result<DiffReport, SimError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = config.rows() as u64;
    let m = config.m as usize;
    let mut ops_run = 0;
    for script in 0..script_count {
        let mut machine = RamMachine::new(config)?;
        let mut oracle = RamOracle::new(&config);
        for op_index in 0..ops_per_script {
            let addr = rng.gen_range(0..rows);
            let op = if rng.gen_bool(0.5) {
                RamOp::Write { addr, word: (0..m).map(|_| rng.gen_bool(0.5)).collect() }
            } else {
                RamOp::Read { addr }
            };
            let bus = machine.cycle(&op)?;
            ops_run += 1;
            match &op {
                RamOp::Write { addr, word } => oracle.write(*addr, word),
                RamOp::Read { addr } => {
                    let expected = oracle.read(*addr);
                    if bus.as_deref() != Some(expected.as_slice()) {
                        return Ok(DiffReport {
                            scripts_run: script + 1,
                            ops_run,
                            divergence: Some(Divergence {
                                script,
                                op: op_index,
                                detail: format!(
                                    "read {addr}: bus {} != oracle {}",
                                    word_to_string(bus.as_deref().unwrap_or(&[])),
                                    word_to_string(&expected)
                                ),
                            }),
                        });
                    }
                }
            }
            if machine.stored_bits() != oracle.words() {
                return Ok(DiffReport {
                    scripts_run: script + 1,
                    ops_run,
                    divergence: Some(Divergence {
                        script,
                        op: op_index,
                        detail: "stored state deviates from oracle words".into(),
                    }),
                });
            }
        }
    }
    Ok(DiffReport { scripts_run: script_count, ops_run, divergence: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{build_msdff_we, RamVariant};

    fn msdff_inputs(w: bool, d: bool) -> BTreeMap<String, bool> {
        let mut inputs = BTreeMap::new();
        inputs.insert("w".to_string(), w);
        inputs.insert("d".to_string(), d);
        inputs
    }

    #[test]
    fn msdff_loads_when_write_high() {
        let mut machine = ClockedMachine::new(build_msdff_we(false));
        let outs = machine.step_cycle(&msdff_inputs(true, true)).unwrap();
        assert_eq!(outs["q"], true);
        assert_eq!(outs["qb"], false);
        assert_eq!(machine.state_of("fbs"), Some(true));
    }

    #[test]
    fn msdff_holds_when_write_low() {
        for initial in [false, true] {
            let mut machine = ClockedMachine::new(build_msdff_we(false));
            machine.set_state("fbs", initial);
            machine.set_state("fbm", initial);
            for d in [true, false, true] {
                let outs = machine.step_cycle(&msdff_inputs(false, d)).unwrap();
                assert_eq!(outs["q"], initial);
            }
        }
    }

    #[test]
    fn msdff_output_held_during_high_phase() {
        let machine = ClockedMachine::new(build_msdff_we(false));
        // stored 0, writing 1: the transparent-master view must still show 0
        let outs = machine.peek_high_phase(&msdff_inputs(true, true)).unwrap();
        assert_eq!(outs["q"], false);
    }

    #[test]
    fn functional_ram_write_then_read() {
        let config = RamConfig { n: 2, m: 3, variant: RamVariant::Functional };
        let script = OpScript {
            ops: vec![
                RamOp::Write { addr: 2, word: word_from_string("101", 3).unwrap() },
                RamOp::Read { addr: 2 },
            ],
        };
        let trace = run_script(config, &script).unwrap();
        assert_eq!(trace, vec![word_from_string("101", 3).unwrap()]);
    }

    #[test]
    fn fresh_ram_reads_zero() {
        let config = RamConfig { n: 2, m: 3, variant: RamVariant::Functional };
        let script = OpScript { ops: vec![RamOp::Read { addr: 0 }] };
        assert_eq!(run_script(config, &script).unwrap(), vec![vec![false; 3]]);
    }

    #[test]
    fn published_read_is_xor_of_rows() {
        // write 1 to both rows; the XOR read cascade returns 0 where the
        // oracle would return 1 — the documented structural read flaw
        let config = RamConfig { n: 1, m: 1, variant: RamVariant::Published };
        let script = OpScript {
            ops: vec![
                RamOp::Write { addr: 0, word: vec![true] },
                RamOp::Write { addr: 1, word: vec![true] },
                RamOp::Read { addr: 0 },
            ],
        };
        assert_eq!(run_script(config, &script).unwrap(), vec![vec![false]]);
    }

    #[test]
    fn differential_small_ram() {
        let config = RamConfig { n: 1, m: 2, variant: RamVariant::Functional };
        let report = differential_test(config, 20, 16, 7).unwrap();
        assert_eq!(report.divergence, None);
        assert_eq!(report.ops_run, 320);
    }

    #[test]
    fn differential_is_deterministic() {
        let config = RamConfig { n: 2, m: 2, variant: RamVariant::Functional };
        let a = differential_test(config, 5, 8, 42).unwrap();
        let b = differential_test(config, 5, 8, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn last_writer_wins() {
        let config = RamConfig { n: 1, m: 1, variant: RamVariant::Functional };
        let script = OpScript {
            ops: vec![
                RamOp::Write { addr: 0, word: vec![true] },
                RamOp::Write { addr: 0, word: vec![false] },
                RamOp::Write { addr: 0, word: vec![true] },
                RamOp::Read { addr: 0 },
            ],
        };
        assert_eq!(run_script(config, &script).unwrap(), vec![vec![true]]);
    }

    #[test]
    fn script_parser_diagnostics() {
        let config = RamConfig { n: 1, m: 2, variant: RamVariant::Functional };
        assert!(OpScript::parse("w 0 01\nr 0\n", &config).is_ok());
        assert!(matches!(
            OpScript::parse("x 0\n", &config),
            Err(SimError::Script { line: 1, .. })
        ));
        assert!(matches!(
            OpScript::parse("w 0 011\n", &config),
            Err(SimError::WordWidth { .. })
        ));
        assert!(matches!(
            OpScript::parse("r 2\n", &config),
            Err(SimError::AddressOutOfRange { addr: 2, rows: 2 })
        ));
    }
}
