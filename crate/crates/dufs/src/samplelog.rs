//! Line-oriented sample log format, version 1.
//!
//! ```text
//! # dufs sample log v1
//! method dufs
//! scenario invisible
//! placement uniform
//! seed 7
//! budget 100
//! uniform_cost 1
//! per_walker_budget 10
//! jump_weight 1
//! walkers 9
//! ledger spent=100 placements=9 charged_jumps=4 free_jumps=0 charged_steps=55 free_steps=31 forced_jumps=0 step_limit_hit=0
//! attributes red,blue
//! I <node> <degree> <labels>
//! W <node> <bias> <labels> <S|J|F> <walker>
//! ```
//!
//! `node` is the internal node index. `labels` is `out/in/deg` followed by
//! `/a,b,...` attribute ids when the `attributes` line is present (`-` for a
//! node without attributes). Floats use the shortest representation that
//! parses back to the same value, so a replayed log is bit-identical.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use dufs_core::walk::{BudgetLedger, InitialSample, MoveKind, SampleLog, WalkSample};
use dufs_core::{NodeIndex, NodeRecord};

use crate::error::{CliError, Result};

pub const HEADER: &str = "# dufs sample log v1";

fn labels_token(r: &NodeRecord, with_attributes: bool) -> String {
    let mut s = format!("{}/{}/{}", r.out_degree, r.in_degree, r.degree);
    if with_attributes {
        s.push('/');
        if r.attributes.is_empty() {
            s.push('-');
        } else {
            let ids: Vec<String> = r.attributes.iter().map(u32::to_string).collect();
            s.push_str(&ids.join(","));
        }
    }
    s
}

pub fn write_log<W: Write>(log: &SampleLog, attribute_names: &[String], mut out: W) -> std::io::Result<()> {
    let l = &log.ledger;
    writeln!(out, "{HEADER}")?;
    writeln!(out, "method {}", log.method)?;
    writeln!(out, "scenario {}", log.scenario)?;
    writeln!(out, "placement {}", log.placement)?;
    writeln!(out, "seed {}", log.seed)?;
    writeln!(out, "budget {}", l.total)?;
    writeln!(out, "uniform_cost {}", l.uniform_cost)?;
    writeln!(out, "per_walker_budget {}", log.per_walker_budget)?;
    writeln!(out, "jump_weight {}", log.jump_weight)?;
    writeln!(out, "walkers {}", log.walker_count)?;
    writeln!(
        out,
        "ledger spent={} placements={} charged_jumps={} free_jumps={} charged_steps={} free_steps={} forced_jumps={} step_limit_hit={}",
        l.spent,
        l.placements,
        l.charged_jumps,
        l.free_jumps,
        l.charged_steps,
        l.free_steps,
        l.forced_jumps,
        u8::from(l.step_limit_hit)
    )?;
    if log.attributes_known {
        writeln!(out, "attributes {}", attribute_names.join(","))?;
    }
    let token = |v: NodeIndex| labels_token(&log.records[&v], log.attributes_known);
    for s in &log.initial {
        writeln!(out, "I {} {} {}", s.node, s.degree, token(s.node))?;
    }
    for s in &log.walk {
        writeln!(out, "W {} {} {} {} {}", s.node, s.bias, token(s.node), s.kind.code(), s.walker)?;
    }
    Ok(())
}

pub fn log_to_string(log: &SampleLog, attribute_names: &[String]) -> String {
    let mut buf = Vec::new();
    write_log(log, attribute_names, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("log is ASCII")
}

struct Parser {
    line: usize,
}

impl Parser {
    fn err(&self, what: impl std::fmt::Display) -> CliError {
        CliError::Data(format!("sample log line {}: {what}", self.line))
    }

    fn num<T: std::str::FromStr>(&self, field: Option<&str>, name: &str) -> Result<T> {
        let f = field.ok_or_else(|| self.err(format!("missing {name}")))?;
        f.parse().map_err(|_| self.err(format!("bad {name} '{f}'")))
    }

    fn record(&self, token: &str, with_attributes: bool) -> Result<NodeRecord> {
        let mut parts = token.split('/');
        let out_degree = self.num(parts.next(), "out-degree")?;
        let in_degree = self.num(parts.next(), "in-degree")?;
        let degree = self.num(parts.next(), "degree")?;
        let attributes = match (with_attributes, parts.next()) {
            (false, None) => Vec::new(),
            (true, Some("-")) => Vec::new(),
            (true, Some(list)) => list.split(',').map(|a| self.num(Some(a), "attribute id")).collect::<Result<_>>()?,
            _ => return Err(self.err(format!("label token '{token}' does not match the attributes header"))),
        };
        if parts.next().is_some() {
            return Err(self.err(format!("label token '{token}' has extra fields")));
        }
        Ok(NodeRecord { out_degree, in_degree, degree, attributes })
    }
}

/// Parses a log written by [`write_log`]; returns the log and the attribute
/// name table.
pub fn read_log<R: BufRead>(reader: R) -> Result<(SampleLog, Vec<String>)> {
    let mut p = Parser { line: 0 };
    let mut header: BTreeMap<String, String> = BTreeMap::new();
    let mut initial = Vec::new();
    let mut walk = Vec::new();
    let mut records: BTreeMap<NodeIndex, NodeRecord> = BTreeMap::new();
    let mut names: Option<Vec<String>> = None;
    let mut seen_header = false;

    for line in reader.lines() {
        p.line += 1;
        let line = line.map_err(|e| p.err(e))?;
        let line = line.trim_end();
        if p.line == 1 {
            if line != HEADER {
                return Err(p.err("not a v1 sample log"));
            }
            seen_header = true;
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
        match key {
            "I" | "W" => {
                let mut f = rest.split(' ');
                let node: NodeIndex = p.num(f.next(), "node")?;
                let weight = f.next();
                let token = f.next().ok_or_else(|| p.err("missing labels"))?;
                let record = p.record(token, names.is_some())?;
                match records.get(&node) {
                    Some(r) if *r != record => return Err(p.err(format!("node {node} has inconsistent labels"))),
                    Some(_) => {}
                    None => {
                        records.insert(node, record);
                    }
                }
                if key == "I" {
                    initial.push(InitialSample { node, degree: p.num(weight, "degree")? });
                } else {
                    let bias: f64 = p.num(weight, "bias")?;
                    let code = f.next().and_then(|c| c.chars().next()).ok_or_else(|| p.err("missing move kind"))?;
                    let kind = MoveKind::from_code(code).ok_or_else(|| p.err(format!("bad move kind '{code}'")))?;
                    let walker = p.num(f.next(), "walker")?;
                    walk.push(WalkSample { node, bias, walker, kind });
                }
                if f.next().is_some() {
                    return Err(p.err("trailing fields"));
                }
            }
            "attributes" => {
                names = Some(if rest.is_empty() { Vec::new() } else { rest.split(',').map(str::to_owned).collect() });
            }
            _ => {
                header.insert(key.to_owned(), rest.to_owned());
            }
        }
    }
    if !seen_header {
        return Err(CliError::Data("empty sample log".into()));
    }

    let get = |k: &str| header.get(k).map(String::as_str).ok_or_else(|| CliError::Data(format!("sample log lacks '{k}'")));
    let parse = |k: &str| -> Result<u64> { get(k)?.parse().map_err(|_| CliError::Data(format!("bad '{k}' in sample log"))) };
    let ledger_fields: BTreeMap<&str, u64> = get("ledger")?
        .split(' ')
        .filter_map(|kv| kv.split_once('='))
        .map(|(k, v)| v.parse().map(|v| (k, v)).map_err(|_| CliError::Data(format!("bad ledger field '{k}'"))))
        .collect::<Result<_>>()?;
    let field = |k: &str| ledger_fields.get(k).copied().ok_or_else(|| CliError::Data(format!("ledger lacks '{k}'")));
    let ledger = BudgetLedger {
        total: parse("budget")?,
        uniform_cost: parse("uniform_cost")?,
        spent: field("spent")?,
        placements: field("placements")?,
        charged_jumps: field("charged_jumps")?,
        free_jumps: field("free_jumps")?,
        charged_steps: field("charged_steps")?,
        free_steps: field("free_steps")?,
        forced_jumps: field("forced_jumps")?,
        step_limit_hit: field("step_limit_hit")? != 0,
    };
    let log = SampleLog {
        method: get("method")?.parse()?,
        scenario: get("scenario")?.parse()?,
        placement: get("placement")?.parse()?,
        seed: parse("seed")?,
        per_walker_budget: parse("per_walker_budget")?,
        jump_weight: get("jump_weight")?.parse().map_err(|_| CliError::Data("bad jump_weight in sample log".into()))?,
        walker_count: parse("walkers")? as usize,
        attributes_known: names.is_some(),
        initial,
        walk,
        records,
        ledger,
    };
    Ok((log, names.unwrap_or_default()))
}
