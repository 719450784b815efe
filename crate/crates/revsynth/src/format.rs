//! RevLib-flavored text format for netlists.
//!
//! Header directives: `.version .name .numvars .variables .inputs .state
//! .constants .outputs .garbage .statenext`, body between `.begin` and
//! `.end`, one gate per line, `#` starts a comment.
//!
//! Extensions over plain RevLib, needed for sequential circuits:
//!   - `.state` lists state-feedback lines (a subset of `.variables`);
//!   - `.statenext` lists `output:feedback` pairs tying each latched
//!     terminal value to the feedback line it reloads;
//!   - `.outputs` names only the primary-output lines, in line order;
//!   - mnemonics: `not fg dfg t3 f3 p3 mf1 mf2 mf1p mf2p fgc<W>`.
//!
//! `parse(serialize(x))` is structurally the identity.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::gate::{builtin_gate, GateSpec};
use crate::netlist::{Line, LineRole, Netlist, NetlistBuilder, NetlistError, OutputClass};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, col {col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("line {line}, col {col}: unknown gate mnemonic `{mnemonic}`")]
    UnknownMnemonic { line: usize, col: usize, mnemonic: String },
    #[error("line {line}, col {col}: gate `{mnemonic}` takes {want} lines, got {got}")]
    Arity { line: usize, col: usize, mnemonic: String, want: usize, got: usize },
    #[error("line {line}, col {col}: unknown variable `{name}`")]
    UnknownVariable { line: usize, col: usize, name: String },
    #[error("line {line}, col {col}: duplicate {what} `{name}`")]
    Duplicate { line: usize, col: usize, what: &'static str, name: String },
    #[error("netlist invalid after parse: {0}")]
    Invalid(#[from] NetlistError),
}

pub fn serialize(netlist: &Netlist) -> String {
    let mut out = String::new();
    let lines = netlist.lines();
    let _ = writeln!(out, "# {} lines, {} gates", lines.len(), netlist.gates().len());
    let _ = writeln!(out, ".version 1.0");
    let _ = writeln!(out, ".name {}", netlist.name);
    let _ = writeln!(out, ".numvars {}", lines.len());
    let names: Vec<&str> = lines.iter().map(|l| l.name.as_str()).collect();
    let _ = writeln!(out, ".variables {}", names.join(" "));
    let inputs: Vec<&str> = lines
        .iter()
        .filter(|l| l.role == LineRole::PrimaryInput)
        .map(|l| l.name.as_str())
        .collect();
    let _ = writeln!(out, ".inputs {}", inputs.join(" "));
    let state: Vec<&str> = lines
        .iter()
        .filter(|l| l.role == LineRole::StateFeedback)
        .map(|l| l.name.as_str())
        .collect();
    if !state.is_empty() {
        let _ = writeln!(out, ".state {}", state.join(" "));
    }
    let constants: String = lines
        .iter()
        .map(|l| match l.role.constant_value() {
            Some(false) => '0',
            Some(true) => '1',
            None => '-',
        })
        .collect();
    let _ = writeln!(out, ".constants {constants}");
    let primaries: Vec<&str> = netlist
        .outputs()
        .iter()
        .filter_map(|c| match c {
            OutputClass::Primary { name } => Some(name.as_str()),
            _ => None,
        })
        .collect();
    let _ = writeln!(out, ".outputs {}", primaries.join(" "));
    let garbage: String = netlist
        .outputs()
        .iter()
        .map(|c| if matches!(c, OutputClass::Garbage) { '1' } else { '-' })
        .collect();
    let _ = writeln!(out, ".garbage {garbage}");
    let statenext: Vec<String> = netlist
        .outputs()
        .iter()
        .enumerate()
        .filter_map(|(i, c)| match c {
            OutputClass::StateNext { feeds } => {
                Some(format!("{}:{}", lines[i].name, lines[*feeds].name))
            }
            _ => None,
        })
        .collect();
    if !statenext.is_empty() {
        let _ = writeln!(out, ".statenext {}", statenext.join(" "));
    }
    let _ = writeln!(out, ".begin");
    for inst in netlist.gates() {
        let bound: Vec<&str> = inst.bindings.iter().map(|&b| lines[b].name.as_str()).collect();
        let _ = writeln!(out, "{} {}", inst.gate.mnemonic(), bound.join(" "));
    }
    let _ = writeln!(out, ".end");
    out
}

/// A token with its 1-based column.
struct Tok<'a> {
    text: &'a str,
    col: usize,
}

fn tokenize(line: &str) -> Vec<Tok<'_>> {
    let body = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut toks = Vec::new();
    let mut start = None;
    for (i, ch) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                toks.push(Tok { text: &body[s..i], col: s + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    toks
}

fn syntax(line: usize, col: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, col, message: message.into() }
}

pub fn parse(text: &str) -> Result<Netlist, ParseError> {
    let mut name = String::from("netlist");
    let mut variables: Vec<String> = Vec::new();
    let mut numvars: Option<usize> = None;
    let mut inputs: Vec<String> = Vec::new();
    let mut state: Vec<String> = Vec::new();
    let mut constants: Option<(usize, String)> = None;
    let mut output_names: Vec<String> = Vec::new();
    let mut garbage: Option<(usize, String)> = None;
    let mut statenext: Vec<(usize, String, String)> = Vec::new();
    let mut gates: Vec<(usize, Vec<Tok<'_>>)> = Vec::new();
    let mut in_body = false;
    let mut saw_end = false;

    for (ln0, raw) in text.lines().enumerate() {
        let ln = ln0 + 1;
        let toks = tokenize(raw);
        if toks.is_empty() {
            continue;
        }
        if saw_end {
            return Err(syntax(ln, toks[0].col, "content after .end"));
        }
        let head = toks[0].text;
        if !in_body {
            let rest = || toks[1..].iter().map(|t| t.text.to_string()).collect::<Vec<_>>();
            match head {
                ".version" => {}
                ".name" => {
                    name = toks
                        .get(1)
                        .ok_or_else(|| syntax(ln, toks[0].col, ".name needs a value"))?
                        .text
                        .to_string();
                }
                ".numvars" => {
                    let tok = toks
                        .get(1)
                        .ok_or_else(|| syntax(ln, toks[0].col, ".numvars needs a count"))?;
                    numvars = Some(tok.text.parse().map_err(|_| {
                        syntax(ln, tok.col, format!("`{}` is not a count", tok.text))
                    })?);
                }
                ".variables" => variables = rest(),
                ".inputs" => inputs = rest(),
                ".state" => state = rest(),
                ".constants" => {
                    let tok = toks
                        .get(1)
                        .ok_or_else(|| syntax(ln, toks[0].col, ".constants needs a mask"))?;
                    if tok.text.chars().any(|c| !"-01".contains(c)) {
                        return Err(syntax(ln, tok.col, "constants mask must be of - 0 1"));
                    }
                    constants = Some((ln, tok.text.to_string()));
                }
                ".outputs" => output_names = rest(),
                ".garbage" => {
                    let tok = toks
                        .get(1)
                        .ok_or_else(|| syntax(ln, toks[0].col, ".garbage needs a mask"))?;
                    if tok.text.chars().any(|c| !"-1".contains(c)) {
                        return Err(syntax(ln, tok.col, "garbage mask must be of - 1"));
                    }
                    garbage = Some((ln, tok.text.to_string()));
                }
                ".statenext" => {
                    for t in &toks[1..] {
                        let (a, b) = t.text.split_once(':').ok_or_else(|| {
                            syntax(ln, t.col, format!("`{}` is not output:feedback", t.text))
                        })?;
                        statenext.push((ln, a.to_string(), b.to_string()));
                    }
                }
                ".begin" => in_body = true,
                _ => {
                    return Err(syntax(
                        ln,
                        toks[0].col,
                        format!("unknown directive `{head}` (gates belong after .begin)"),
                    ))
                }
            }
        } else if head == ".end" {
            saw_end = true;
        } else {
            gates.push((ln, toks));
        }
    }
    if !saw_end {
        let last = text.lines().count().max(1);
        return Err(syntax(last, 1, if in_body { "missing .end" } else { "missing .begin" }));
    }

    if let Some(n) = numvars {
        if n != variables.len() {
            return Err(syntax(
                1,
                1,
                format!(".numvars says {n} but .variables lists {}", variables.len()),
            ));
        }
    }
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, v) in variables.iter().enumerate() {
        if index.insert(v.as_str(), i).is_some() {
            return Err(ParseError::Duplicate { line: 1, col: 1, what: "variable", name: v.clone() });
        }
    }
    let lookup = |ln: usize, tok: &Tok<'_>| -> Result<usize, ParseError> {
        index.get(tok.text).copied().ok_or_else(|| ParseError::UnknownVariable {
            line: ln,
            col: tok.col,
            name: tok.text.to_string(),
        })
    };

    // line roles
    let mut roles: Vec<LineRole> = vec![LineRole::PrimaryInput; variables.len()];
    if let Some((ln, mask)) = &constants {
        if mask.len() != variables.len() {
            return Err(syntax(*ln, 1, "constants mask length differs from .variables"));
        }
        for (i, ch) in mask.chars().enumerate() {
            match ch {
                '0' => roles[i] = LineRole::ConstantZero,
                '1' => roles[i] = LineRole::ConstantOne,
                _ => {}
            }
        }
    }
    for s in &state {
        match index.get(s.as_str()) {
            Some(&i) if roles[i] == LineRole::PrimaryInput => roles[i] = LineRole::StateFeedback,
            Some(_) => return Err(syntax(1, 1, format!("state line `{s}` is a constant"))),
            None => {
                return Err(ParseError::UnknownVariable { line: 1, col: 1, name: s.clone() })
            }
        }
    }
    let _ = inputs; // informational; roles derive from .constants and .state

    let lines: Vec<Line> = variables
        .iter()
        .zip(&roles)
        .map(|(n, &role)| Line { name: n.clone(), role })
        .collect();

    let mut builder = NetlistBuilder::new(name);
    let mut ids = Vec::with_capacity(lines.len());
    for line in &lines {
        ids.push(builder.line(line.name.clone(), line.role));
    }

    // gate body
    let mut spec_cache: HashMap<String, Arc<GateSpec>> = HashMap::new();
    for (ln, toks) in &gates {
        let mnemonic = toks[0].text;
        let spec = match spec_cache.get(mnemonic) {
            Some(s) => Arc::clone(s),
            None => {
                let s = Arc::new(builtin_gate(mnemonic).map_err(|_| {
                    ParseError::UnknownMnemonic {
                        line: *ln,
                        col: toks[0].col,
                        mnemonic: mnemonic.to_string(),
                    }
                })?);
                spec_cache.insert(mnemonic.to_string(), Arc::clone(&s));
                s
            }
        };
        let args = &toks[1..];
        if args.len() != spec.width {
            return Err(ParseError::Arity {
                line: *ln,
                col: toks[0].col,
                mnemonic: mnemonic.to_string(),
                want: spec.width,
                got: args.len(),
            });
        }
        let mut bindings = Vec::with_capacity(args.len());
        for t in args {
            let b = lookup(*ln, t)?;
            if bindings.contains(&b) {
                return Err(ParseError::Duplicate {
                    line: *ln,
                    col: t.col,
                    what: "binding",
                    name: t.text.to_string(),
                });
            }
            bindings.push(b);
        }
        builder.gate(spec, bindings);
    }

    // terminal classification
    let mut classes: Vec<Option<OutputClass>> = vec![None; lines.len()];
    if let Some((ln, mask)) = &garbage {
        if mask.len() != lines.len() {
            return Err(syntax(*ln, 1, "garbage mask length differs from .variables"));
        }
        for (i, ch) in mask.chars().enumerate() {
            if ch == '1' {
                classes[i] = Some(OutputClass::Garbage);
            }
        }
    }
    for (ln, out, fb) in &statenext {
        let i = *index
            .get(out.as_str())
            .ok_or_else(|| ParseError::UnknownVariable { line: *ln, col: 1, name: out.clone() })?;
        let feeds = *index
            .get(fb.as_str())
            .ok_or_else(|| ParseError::UnknownVariable { line: *ln, col: 1, name: fb.clone() })?;
        if classes[i].is_some() {
            return Err(ParseError::Duplicate { line: *ln, col: 1, what: "classification", name: out.clone() });
        }
        classes[i] = Some(OutputClass::StateNext { feeds });
    }
    let mut names = output_names.iter();
    for (i, slot) in classes.iter_mut().enumerate() {
        if slot.is_none() {
            let n = names.next().ok_or_else(|| {
                syntax(1, 1, format!("no .outputs name left for line `{}`", variables[i]))
            })?;
            *slot = Some(OutputClass::Primary { name: n.clone() });
        }
    }
    if let Some(extra) = names.next() {
        return Err(syntax(1, 1, format!("unused .outputs name `{extra}`")));
    }
    for (i, class) in classes.into_iter().enumerate() {
        match class.unwrap() {
            OutputClass::Primary { name } => builder.primary(ids[i], name),
            OutputClass::Garbage => builder.garbage(ids[i]),
            OutputClass::StateNext { feeds } => builder.state_next(ids[i], feeds),
        }
    }
    Ok(builder.finish()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_rejects_duplicate_binding() {
        let text = "\
.numvars 3
.variables a b c
.inputs a b c
.constants ---
.outputs p q r
.garbage ---
.begin
t3 a a b
.end
";
        match parse(text) {
            Err(ParseError::Duplicate { line: 8, what: "binding", .. }) => {}
            other => panic!("expected duplicate-binding error, got {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_unknown_mnemonic() {
        let text = ".numvars 1\n.variables a\n.constants -\n.outputs a\n.begin\nzz a\n.end\n";
        assert!(matches!(parse(text), Err(ParseError::UnknownMnemonic { line: 6, .. })));
    }

    #[test]
    fn parse_rejects_arity_mismatch() {
        let text = ".numvars 2\n.variables a b\n.constants --\n.outputs p q\n.begin\nt3 a b\n.end\n";
        assert!(matches!(
            parse(text),
            Err(ParseError::Arity { line: 6, want: 3, got: 2, .. })
        ));
    }

    #[test]
    fn parse_reports_malformed_header() {
        let text = ".numvars two\n.begin\n.end\n";
        assert!(matches!(parse(text), Err(ParseError::Syntax { line: 1, col: 10, .. })));
    }

    #[test]
    fn serialized_decoder_mentions_format_landmarks() {
        let nl = crate::synth::build_decoder(1).unwrap();
        let text = serialize(&nl);
        assert!(text.contains(".numvars 2"));
        assert!(text.contains(".constants"));
        assert!(text.contains("fg "));
        assert_eq!(parse(&text).unwrap(), nl);
    }
}
