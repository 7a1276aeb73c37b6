//! Text formats: Hamiltonian files, schedule files and key-value reports.
//!
//! Reals are written with 17 significant digits, which round-trips every
//! double exactly.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::local::{Gate1, LocalLayer};
use crate::pauli::{HamExpansion, Pauli, PauliString};
use crate::schedule::{Instruction, Schedule};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Non-empty, comment-stripped lines with their 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn parse_f64(tok: &str, line: usize, what: &str) -> Result<f64> {
    let v: f64 = tok.parse().map_err(|_| parse_err(line, format!("invalid {what} '{tok}'")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(parse_err(line, format!("{what} '{tok}' is not finite")))
    }
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize> {
    tok.parse().map_err(|_| parse_err(line, format!("invalid {what} '{tok}'")))
}

fn expect_key<'a>(line: &'a str, lineno: usize, key: &str) -> Result<&'a str> {
    match line.split_once(char::is_whitespace) {
        Some((k, rest)) if k == key => Ok(rest.trim()),
        _ => Err(parse_err(lineno, format!("expected '{key} <value>'"))),
    }
}

/// Parse a Hamiltonian file:
///
/// ```text
/// qubits 2
/// 1.0 0:Z
/// 2.0 0:X 1:Z   # coupling
/// 0.5 I
/// ```
pub fn parse_hamiltonian(text: &str) -> Result<HamExpansion> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing 'qubits <n>' header"))?;
    let n = parse_usize(expect_key(header, hline, "qubits")?, hline, "qubit count")?;
    if n == 0 {
        return Err(parse_err(hline, "qubit count must be positive"));
    }
    let mut entries = Vec::new();
    for (lineno, line) in lines {
        let mut toks = line.split_whitespace();
        let coef = parse_f64(toks.next().expect("non-empty line"), lineno, "coefficient")?;
        let rest: Vec<&str> = toks.collect();
        let mut ops = vec![Pauli::I; n];
        match rest[..] {
            [] => return Err(parse_err(lineno, "term has no operators (write 'I' for the identity)")),
            ["I"] => {}
            _ if rest.len() > 2 => return Err(parse_err(lineno, "three-body term: at most two site:op tokens per line")),
            _ => {
                for tok in &rest {
                    let (site, op) = tok
                        .split_once(':')
                        .ok_or_else(|| parse_err(lineno, format!("expected site:op, got '{tok}'")))?;
                    let q = parse_usize(site, lineno, "site")?;
                    if q >= n {
                        return Err(parse_err(lineno, format!("site {q} out of range for {n} qubits")));
                    }
                    let p = match op {
                        "X" => Pauli::X,
                        "Y" => Pauli::Y,
                        "Z" => Pauli::Z,
                        _ => return Err(parse_err(lineno, format!("operator '{op}' is not X, Y or Z"))),
                    };
                    if ops[q] != Pauli::I {
                        return Err(parse_err(lineno, format!("site {q} appears twice")));
                    }
                    ops[q] = p;
                }
            }
        }
        entries.push((PauliString::new(ops).map_err(|e| parse_err(lineno, e.to_string()))?, coef));
    }
    HamExpansion::new(n, entries).map_err(|e| parse_err(hline, e.to_string()))
}

pub fn write_hamiltonian(h: &HamExpansion) -> String {
    let mut out = format!("qubits {}\n", h.n());
    for (p, c) in h.terms() {
        let ops: Vec<String> = p.support().iter().map(|&q| format!("{q}:{}", p.get(q))).collect();
        let ops = if ops.is_empty() { "I".to_string() } else { ops.join(" ") };
        writeln!(out, "{} {ops}", real(c)).expect("write to string");
    }
    out
}

/// Serialize a schedule:
///
/// ```text
/// schedule 1
/// qubits <n>
/// global_phase <φ>
/// raw_drift_periods <count>
/// layers <L>
/// layer <id>
/// <8 reals per qubit: u00 u01 u10 u11 as re im pairs>
/// instructions <M>
/// LOCAL <id> | DRIFT <τ>
/// ```
pub fn write_schedule(s: &Schedule) -> String {
    let mut out = String::new();
    out.push_str("schedule 1\n");
    writeln!(out, "qubits {}", s.n()).unwrap();
    writeln!(out, "global_phase {}", real(s.global_phase())).unwrap();
    writeln!(out, "raw_drift_periods {}", s.raw_drift_periods()).unwrap();
    writeln!(out, "layers {}", s.layers().len()).unwrap();
    for (id, layer) in s.layers().iter().enumerate() {
        writeln!(out, "layer {id}").unwrap();
        for g in layer.gates() {
            let reals: Vec<String> = g.to_reals().iter().map(|&x| real(x)).collect();
            writeln!(out, "{}", reals.join(" ")).unwrap();
        }
    }
    writeln!(out, "instructions {}", s.instructions().len()).unwrap();
    for ins in s.instructions() {
        match *ins {
            Instruction::Local(id) => writeln!(out, "LOCAL {id}").unwrap(),
            Instruction::Drift(tau) => writeln!(out, "DRIFT {}", real(tau)).unwrap(),
        }
    }
    out
}

pub fn parse_schedule(text: &str) -> Result<Schedule> {
    let mut lines = content_lines(text);
    let mut next = |what: &str| lines.next().ok_or_else(|| parse_err(0, format!("unexpected end of file, expected {what}")));

    let (l, line) = next("header")?;
    if expect_key(line, l, "schedule")? != "1" {
        return Err(parse_err(l, "unsupported schedule version"));
    }
    let (l, line) = next("qubits")?;
    let n = parse_usize(expect_key(line, l, "qubits")?, l, "qubit count")?;
    let (l, line) = next("global_phase")?;
    let phase = parse_f64(expect_key(line, l, "global_phase")?, l, "global phase")?;
    let (l, line) = next("raw_drift_periods")?;
    let raw = parse_usize(expect_key(line, l, "raw_drift_periods")?, l, "period count")?;
    let (l, line) = next("layers")?;
    let count = parse_usize(expect_key(line, l, "layers")?, l, "layer count")?;

    let mut layers = Vec::with_capacity(count);
    for id in 0..count {
        let (l, line) = next("layer")?;
        if parse_usize(expect_key(line, l, "layer")?, l, "layer id")? != id {
            return Err(parse_err(l, format!("expected layer {id}")));
        }
        let mut gates = Vec::with_capacity(n);
        for _ in 0..n {
            let (l, line) = next("gate")?;
            let vals = line
                .split_whitespace()
                .map(|t| parse_f64(t, l, "gate entry"))
                .collect::<Result<Vec<f64>>>()?;
            let reals: [f64; 8] = vals
                .try_into()
                .map_err(|_| parse_err(l, "a gate needs exactly 8 reals"))?;
            gates.push(Gate1::from_reals(&reals));
        }
        layers.push(LocalLayer::new(gates));
    }

    let (l, line) = next("instructions")?;
    let m = parse_usize(expect_key(line, l, "instructions")?, l, "instruction count")?;
    let mut instructions = Vec::with_capacity(m);
    for _ in 0..m {
        let (l, line) = next("instruction")?;
        let ins = match line.split_once(char::is_whitespace) {
            Some(("LOCAL", v)) => Instruction::Local(parse_usize(v.trim(), l, "layer id")?),
            Some(("DRIFT", v)) => Instruction::Drift(parse_f64(v.trim(), l, "drift duration")?),
            _ => return Err(parse_err(l, format!("expected LOCAL or DRIFT, got '{line}'"))),
        };
        instructions.push(ins);
    }
    if let Some((l, _)) = lines.next() {
        return Err(parse_err(l, "trailing content after instructions"));
    }
    Schedule::from_parts(n, layers, instructions, phase, raw).map_err(|e| parse_err(0, e.to_string()))
}

/// Ordered `key: value` lines.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    pub fn real(&mut self, key: impl Into<String>, value: f64) -> &mut Self {
        self.push(key, format!("{value:e}"))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn parse(text: &str) -> Result<Report> {
        let mut r = Report::new();
        for (l, line) in content_lines(text) {
            let (k, v) = line.split_once(':').ok_or_else(|| parse_err(l, "expected 'key: value'"))?;
            r.push(k.trim(), v.trim());
        }
        Ok(r)
    }
}

impl std::fmt::Display for Report {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k}: {v}")?;
        }
        Ok(())
    }
}
