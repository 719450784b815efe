use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use revsynth::compare::{render_text, report_improvements};
use revsynth::format;
use revsynth::gate::{builtin_gate, feynman_cascade, GateSpec, CATALOG};
use revsynth::netlist::{DelayModel, Netlist, ReversibilityVerdict};
use revsynth::quantum::{search_min_decomposition, verify_decomposition, Verdict};
use revsynth::sim::{differential_test, run_script, word_to_string, OpScript};
use revsynth::synth::{
    build_decoder, build_dff, build_msdff_we, build_rram, closed_form, Formula, RamConfig,
    RamVariant,
};

#[derive(Parser)]
#[command(name = "revsynth", version, about = "Reversible logic synthesis and verification")]
struct Cli {
    /// Output format for machine-readable commands.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect and verify catalog gates.
    Gate {
        #[command(subcommand)]
        command: GateCommand,
    },
    /// Optimal {NOT, CNOT, CV, CV†} decomposition search for a catalog gate.
    Search {
        /// Gate name (e.g. tg, pg, mfrg1).
        name: String,
        /// Longest sequence to try.
        #[arg(long, default_value_t = 6)]
        max_len: usize,
    },
    /// Generate a netlist and print it in the interchange format.
    Synth {
        #[command(subcommand)]
        command: SynthCommand,
    },
    /// Cost metrics of a netlist file.
    Metrics {
        file: PathBuf,
        /// Count every gate as one time unit instead of its primitive depth.
        #[arg(long)]
        unit_delay: bool,
    },
    /// Exhaustively check that a netlist file computes a bijection.
    Check { file: PathBuf },
    /// Evaluate a closed-form cost formula.
    Formula {
        /// decoder-gates | decoder-garbage | decoder-qc | ram-gates |
        /// ram-garbage | ram-qc
        name: String,
        #[arg(short)]
        n: u32,
        #[arg(short, default_value_t = 1)]
        m: u32,
    },
    /// Clocked simulation of generated memories.
    Sim {
        #[command(subcommand)]
        command: SimCommand,
    },
    /// Compare generated designs against previously published ones.
    Improvements,
}

#[derive(Subcommand)]
enum GateCommand {
    /// List the gate catalog with widths and costs.
    List,
    /// Truth table, cost, delay, and decomposition of one gate.
    Info { name: String },
    /// Check the stored decomposition against the gate's unitary.
    Verify { name: String },
}

#[derive(Args)]
struct RamArgs {
    /// Address bits.
    #[arg(short)]
    n: u32,
    /// Word width.
    #[arg(short, default_value_t = 1)]
    m: u32,
    /// Keep the published XOR read cascade instead of the corrected
    /// select-controlled read.
    #[arg(long)]
    published_read: bool,
}

impl RamArgs {
    fn config(&self) -> RamConfig {
        let variant =
            if self.published_read { RamVariant::Published } else { RamVariant::Functional };
        RamConfig { n: self.n, m: self.m, variant }
    }
}

#[derive(Subcommand)]
enum SynthCommand {
    /// n-to-2^n one-hot address decoder.
    Decoder {
        #[arg(short)]
        n: u32,
    },
    /// Gated D flip-flop.
    Dff,
    /// Write-enable master-slave D flip-flop.
    Msdff {
        /// Emit the in-memory cell form (single DFG output stage).
        #[arg(long)]
        cell: bool,
    },
    /// 2^n x m random access memory.
    Ram(RamArgs),
}

#[derive(Subcommand)]
enum SimCommand {
    /// Run a w/r operation script against a generated memory.
    Ram {
        #[command(flatten)]
        ram: RamArgs,
        /// Script file: `w <addr> <bits>` and `r <addr>` lines.
        script: PathBuf,
    },
    /// Seeded random differential test against an ideal memory.
    Fuzz {
        #[command(flatten)]
        ram: RamArgs,
        #[arg(long, default_value_t = 20)]
        scripts: usize,
        #[arg(long, default_value_t = 32)]
        ops: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn gate_by_name(name: &str) -> Result<GateSpec, String> {
    if let Some(w) = name.strip_prefix("fgc") {
        let width: usize = w.parse().map_err(|_| format!("bad cascade width in `{name}`"))?;
        return feynman_cascade(width).map_err(|e| e.to_string());
    }
    builtin_gate(name).map_err(|e| e.to_string())
}

fn emit(cli: &Cli, text: String) -> Result<(), String> {
    match &cli.out {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_netlist(path: &PathBuf) -> Result<Netlist, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    format::parse(&text).map_err(|e| e.to_string())
}

fn gate_info_text(spec: &GateSpec) -> String {
    let mut out = format!(
        "{} ({}), width {}, quantum cost {}, delay {}, {}\n",
        spec.name(),
        spec.mnemonic(),
        spec.width,
        spec.quantum_cost,
        spec.delay(),
        if spec.is_bijective() { "reversible" } else { "NOT reversible" },
    );
    for (i, &o) in spec.permutation.iter().enumerate() {
        out.push_str(&format!(
            "  {:0w$b} -> {:0w$b}\n",
            i,
            o,
            w = spec.width
        ));
    }
    match &spec.decomposition {
        Some(ops) => {
            let seq: Vec<String> = ops.iter().map(|op| op.to_string()).collect();
            out.push_str(&format!("decomposition: {}\n", seq.join(" ")));
        }
        None => out.push_str("decomposition: none stored\n"),
    }
    out
}

fn gate_json(spec: &GateSpec) -> serde_json::Value {
    json!({
        "name": spec.name(),
        "mnemonic": spec.mnemonic(),
        "width": spec.width,
        "quantum_cost": spec.quantum_cost,
        "delay": spec.delay(),
        "reversible": spec.is_bijective(),
        "permutation": spec.permutation,
        "decomposition": spec.decomposition.as_ref().map(|ops| {
            ops.iter().map(|op| op.to_string()).collect::<Vec<String>>()
        }),
    })
}

fn run(cli: &Cli) -> Result<(), String> {
    match &cli.command {
        Command::Gate { command } => match command {
            GateCommand::List => {
                let specs: Vec<GateSpec> =
                    CATALOG.iter().map(|n| builtin_gate(n).unwrap()).collect();
                let text = match cli.format {
                    Format::Json => {
                        let v: Vec<_> = specs.iter().map(gate_json).collect();
                        format!("{:#}\n", serde_json::Value::Array(v))
                    }
                    Format::Text => {
                        let mut out = String::new();
                        for s in &specs {
                            out.push_str(&format!(
                                "{:<6} {}x{}  cost {:>2}  delay {:>2}  {}\n",
                                s.mnemonic(),
                                s.width,
                                s.width,
                                s.quantum_cost,
                                s.delay(),
                                if s.is_bijective() { "reversible" } else { "NOT reversible" },
                            ));
                        }
                        out
                    }
                };
                emit(cli, text)
            }
            GateCommand::Info { name } => {
                let spec = gate_by_name(name)?;
                let text = match cli.format {
                    Format::Json => format!("{:#}\n", gate_json(&spec)),
                    Format::Text => gate_info_text(&spec),
                };
                emit(cli, text)
            }
            GateCommand::Verify { name } => {
                let spec = gate_by_name(name)?;
                let verdict = verify_decomposition(&spec);
                let word = match verdict {
                    Verdict::Verified => "verified",
                    Verdict::Mismatch => "MISMATCH",
                    Verdict::Absent => "no stored decomposition",
                };
                let text = match cli.format {
                    Format::Json => {
                        format!("{:#}\n", json!({ "gate": spec.name(), "verdict": word }))
                    }
                    Format::Text => format!("{}: {word}\n", spec.name()),
                };
                emit(cli, text)?;
                match verdict {
                    Verdict::Mismatch => Err(format!("{} decomposition mismatch", spec.name())),
                    _ => Ok(()),
                }
            }
        },
        Command::Search { name, max_len } => {
            let spec = gate_by_name(name)?;
            let found = search_min_decomposition(&spec, *max_len).map_err(|e| e.to_string())?;
            let text = match (&found, cli.format) {
                (Some(ops), Format::Text) => {
                    let seq: Vec<String> = ops.iter().map(|op| op.to_string()).collect();
                    format!("{}: length {}: {}\n", spec.name(), ops.len(), seq.join(" "))
                }
                (None, Format::Text) => {
                    format!("{}: no realization up to length {max_len}\n", spec.name())
                }
                (_, Format::Json) => format!(
                    "{:#}\n",
                    json!({
                        "gate": spec.name(),
                        "max_len": max_len,
                        "length": found.as_ref().map(|ops| ops.len()),
                        "sequence": found.as_ref().map(|ops| {
                            ops.iter().map(|op| op.to_string()).collect::<Vec<String>>()
                        }),
                    })
                ),
            };
            emit(cli, text)
        }
        Command::Synth { command } => {
            let netlist = match command {
                SynthCommand::Decoder { n } => build_decoder(*n).map_err(|e| e.to_string())?,
                SynthCommand::Dff => build_dff(),
                SynthCommand::Msdff { cell } => build_msdff_we(*cell),
                SynthCommand::Ram(args) => build_rram(args.config()).map_err(|e| e.to_string())?,
            };
            let text = match cli.format {
                Format::Text => format::serialize(&netlist),
                Format::Json => {
                    let m = netlist.metrics();
                    format!(
                        "{:#}\n",
                        json!({
                            "name": netlist.name,
                            "gates": m.gate_count,
                            "quantum_cost": m.quantum_cost,
                            "delay": m.delay,
                            "garbage": m.garbage_count,
                            "lines": m.line_count,
                            "constant_inputs": m.constant_inputs,
                        })
                    )
                }
            };
            emit(cli, text)
        }
        Command::Metrics { file, unit_delay } => {
            let netlist = load_netlist(file)?;
            let model = if *unit_delay { DelayModel::Unit } else { DelayModel::Primitive };
            let m = netlist.metrics_with(model);
            let text = match cli.format {
                Format::Json => {
                    format!("{:#}\n", serde_json::to_value(&m).map_err(|e| e.to_string())?)
                }
                Format::Text => format!(
                    "gates {}\nquantum cost {}\ndelay {}\ngarbage {}\nlines {}\nconstant inputs {}\n",
                    m.gate_count, m.quantum_cost, m.delay, m.garbage_count, m.line_count,
                    m.constant_inputs,
                ),
            };
            emit(cli, text)
        }
        Command::Check { file } => {
            let netlist = load_netlist(file)?;
            match netlist.check_reversibility().map_err(|e| e.to_string())? {
                ReversibilityVerdict::Reversible => emit(cli, "reversible\n".to_string()),
                ReversibilityVerdict::NotReversible { first, second } => {
                    emit(cli, format!("NOT reversible: inputs {first:b} and {second:b} collide\n"))?;
                    Err("netlist is not reversible".to_string())
                }
            }
        }
        Command::Formula { name, n, m } => {
            let which = Formula::parse(name).ok_or_else(|| format!("unknown formula `{name}`"))?;
            let value = closed_form(which, *n, *m);
            let text = match cli.format {
                Format::Json => {
                    format!("{:#}\n", json!({ "formula": name, "n": n, "m": m, "value": value }))
                }
                Format::Text => format!("{value}\n"),
            };
            emit(cli, text)
        }
        Command::Sim { command } => match command {
            SimCommand::Ram { ram, script } => {
                let config = ram.config();
                let text = fs::read_to_string(script)
                    .map_err(|e| format!("{}: {e}", script.display()))?;
                let script = OpScript::parse(&text, &config).map_err(|e| e.to_string())?;
                let trace = run_script(config, &script).map_err(|e| e.to_string())?;
                let text = match cli.format {
                    Format::Json => {
                        let words: Vec<String> =
                            trace.iter().map(|w| word_to_string(w)).collect();
                        format!("{:#}\n", json!({ "reads": words }))
                    }
                    Format::Text => {
                        trace.iter().map(|w| word_to_string(w) + "\n").collect::<String>()
                    }
                };
                emit(cli, text)
            }
            SimCommand::Fuzz { ram, scripts, ops, seed } => {
                let report = differential_test(ram.config(), *scripts, *ops, *seed)
                    .map_err(|e| e.to_string())?;
                let text = match cli.format {
                    Format::Json => format!(
                        "{:#}\n",
                        json!({
                            "scripts_run": report.scripts_run,
                            "ops_run": report.ops_run,
                            "divergence": report.divergence.as_ref().map(|d| {
                                json!({ "script": d.script, "op": d.op, "detail": d.detail })
                            }),
                        })
                    ),
                    Format::Text => match &report.divergence {
                        None => format!(
                            "ok: {} scripts, {} ops, no divergence\n",
                            report.scripts_run, report.ops_run
                        ),
                        Some(d) => format!(
                            "DIVERGENCE in script {} op {}: {}\n",
                            d.script, d.op, d.detail
                        ),
                    },
                };
                emit(cli, text)?;
                match report.divergence {
                    Some(_) => Err("memory diverged from the ideal model".to_string()),
                    None => Ok(()),
                }
            }
        },
        Command::Improvements => {
            let rows = report_improvements();
            let text = match cli.format {
                Format::Json => {
                    format!("{:#}\n", serde_json::to_value(&rows).map_err(|e| e.to_string())?)
                }
                Format::Text => render_text(&rows),
            };
            emit(cli, text)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
