//! Rendering of command results as aligned text tables or JSON.

use std::collections::BTreeMap;
use std::fmt::Write;

use infocontrib::corpus::Example;
use infocontrib::decomposition::{verify_result, DecompositionResult};
use infocontrib::projection::SplitResult;
use infocontrib::{Base, ConstraintNode, Face, InputLattice, JointDistribution};
use serde::Serialize;

/// A finished command result in both output forms.
pub struct Report {
    table: String,
    json: String,
    passed: bool,
}

impl Report {
    fn new(table: String, value: &impl Serialize) -> Self {
        Self {
            table,
            json: serde_json::to_string_pretty(value).expect("report values serialize"),
            passed: true,
        }
    }

    pub fn to_table(&self) -> &str {
        &self.table
    }

    pub fn to_json(&self) -> &str {
        &self.json
    }

    pub fn passed(&self) -> bool {
        self.passed
    }
}

/// Eight decimals, without a sign on values that round to zero.
fn fixed(v: f64) -> String {
    let s = format!("{v:.8}");
    if s.trim_start_matches('-').bytes().all(|b| b == b'0' || b == b'.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

/// Aligned columns; the first is left-aligned, the rest right-aligned unless
/// `left_last` is set.
fn rows(header: &[&str], body: &[Vec<String>], left_last: bool) -> String {
    let last = header.len() - 1;
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in body {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let line = |cells: &mut dyn Iterator<Item = &str>, out: &mut String| {
        let text: Vec<String> = cells
            .zip(&widths)
            .enumerate()
            .map(|(k, (c, &w))| {
                if k == 0 || (left_last && k == last) {
                    format!("{c:<w$}")
                } else {
                    format!("{c:>w$}")
                }
            })
            .collect();
        writeln!(out, "{}", text.join("  ").trim_end()).unwrap();
    };
    line(&mut header.iter().copied(), &mut out);
    for row in body {
        line(&mut row.iter().map(String::as_str), &mut out);
    }
    out
}

#[derive(Serialize)]
struct ContributionJson {
    predictor: String,
    inputs: Vec<String>,
    value: f64,
    raw: f64,
}

#[derive(Serialize)]
struct NodeJson {
    complex: String,
    constraints: String,
    divergence: f64,
    sweeps: usize,
    final_gap: f64,
}

#[derive(Serialize)]
struct DiagnosticsJson {
    residual: f64,
    complete: bool,
    min_raw: f64,
    nonnegative: bool,
    max_sweeps: usize,
    max_final_gap: f64,
    nodes: Vec<NodeJson>,
}

#[derive(Serialize)]
struct DecompositionJson<'a> {
    source: &'a str,
    inputs: &'a [String],
    target: &'a str,
    unit: &'static str,
    total_mi: f64,
    contributions: Vec<ContributionJson>,
    diagnostics: DiagnosticsJson,
}

pub fn decomposition(source: &str, r: &DecompositionResult, lattice: &InputLattice) -> Report {
    let check = verify_result(r);
    let mut names = r.input_names.clone();
    names.push(r.target_name.clone());
    let contributions: Vec<ContributionJson> = r
        .contributions
        .iter()
        .map(|(&f, &value)| ContributionJson {
            predictor: r.label(f),
            inputs: f.indices().map(|i| r.input_names[i].clone()).collect(),
            value,
            raw: r.raw_contributions[&f],
        })
        .collect();
    let nodes: Vec<NodeJson> = r
        .nodes
        .iter()
        .enumerate()
        .map(|(i, e)| NodeJson {
            complex: e.node.display(&r.input_names),
            constraints: lattice.sigma(i).display(&names),
            divergence: e.divergence,
            sweeps: e.sweeps,
            final_gap: e.final_gap,
        })
        .collect();
    let json = DecompositionJson {
        source,
        inputs: &r.input_names,
        target: &r.target_name,
        unit: r.base.unit(),
        total_mi: r.total_mi,
        diagnostics: DiagnosticsJson {
            residual: r.residual,
            complete: check.completeness.passed,
            min_raw: check.nonnegativity.measured,
            nonnegative: check.nonnegativity.passed,
            max_sweeps: r.nodes.iter().map(|e| e.sweeps).max().unwrap_or(0),
            max_final_gap: r.nodes.iter().map(|e| e.final_gap).fold(0.0, f64::max),
            nodes,
        },
        contributions,
    };

    let mut body: Vec<Vec<String>> = json
        .contributions
        .iter()
        .map(|c| vec![c.predictor.clone(), fixed(c.value)])
        .collect();
    body.push(vec!["total".into(), fixed(r.total_mi)]);
    let mut table = format!("source: {source}\ntarget: {} ({})\n", r.target_name, r.base.unit());
    table.push_str(&rows(&["predictor", "contribution"], &body, false));
    writeln!(table, "residual: {:.2e}", r.residual).unwrap();
    if !check.passed() {
        table.push_str("warning: verification failed\n");
    }
    Report::new(table, &json)
}

#[derive(Serialize)]
struct ConstraintJson<'a> {
    source: &'a str,
    node: String,
    unit: &'static str,
    information: f64,
    sweeps: usize,
    final_gap: f64,
    variables: Vec<&'a str>,
    split: &'a [f64],
}

pub fn constraint_info(
    source: &str,
    p: &JointDistribution,
    node: &ConstraintNode,
    split: &SplitResult,
    information: f64,
    base: Base,
) -> Report {
    let names = p.names();
    let json = ConstraintJson {
        source,
        node: node.display(&names),
        unit: base.unit(),
        information,
        sweeps: split.sweeps_used,
        final_gap: split.final_gap,
        variables: names.clone(),
        split: split.distribution.table(),
    };
    let table = format!(
        "source: {source}\nnode: {}\ninformation: {} {}\nsweeps: {}\nfinal gap: {:.2e}\n",
        json.node,
        fixed(information),
        base.unit(),
        split.sweeps_used,
        split.final_gap
    );
    Report::new(table, &json)
}

#[derive(Serialize)]
struct OracleRow {
    predictor: String,
    chain: f64,
    shapley: f64,
    difference: f64,
}

#[derive(Serialize)]
struct OracleJson<'a> {
    source: &'a str,
    rows: Vec<OracleRow>,
    max_discrepancy: f64,
    tolerance: f64,
    passed: bool,
}

pub fn oracle(source: &str, chain: &DecompositionResult, shapley: &BTreeMap<Face, f64>, tolerance: f64) -> Report {
    let entries: Vec<OracleRow> = chain
        .raw_contributions
        .iter()
        .map(|(f, &c)| OracleRow {
            predictor: chain.label(*f),
            chain: c,
            shapley: shapley[f],
            difference: (c - shapley[f]).abs(),
        })
        .collect();
    let max_discrepancy = entries.iter().map(|r| r.difference).fold(0.0, f64::max);
    let passed = max_discrepancy <= tolerance;
    let body: Vec<Vec<String>> = entries
        .iter()
        .map(|r| vec![r.predictor.clone(), fixed(r.chain), fixed(r.shapley), format!("{:.2e}", r.difference)])
        .collect();
    let mut table = format!("source: {source}\n");
    table.push_str(&rows(&["predictor", "chain sum", "shapley", "difference"], &body, false));
    writeln!(table, "max discrepancy: {max_discrepancy:.2e}").unwrap();
    writeln!(table, "result: {} (tolerance {tolerance:.0e})", if passed { "pass" } else { "FAIL" }).unwrap();
    let json = OracleJson {
        source,
        rows: entries,
        max_discrepancy,
        tolerance,
        passed,
    };
    Report {
        passed,
        ..Report::new(table, &json)
    }
}

#[derive(Serialize)]
struct LatticeJson {
    inputs: usize,
    nodes: usize,
    nodes_by_size: BTreeMap<usize, usize>,
    edges: usize,
    maximal_chains: String,
}

pub fn lattice(lattice: &InputLattice) -> Report {
    let mut nodes_by_size = BTreeMap::new();
    for s in lattice.nodes() {
        // Count faces other than the empty one.
        *nodes_by_size.entry(s.len() - 1).or_insert(0) += 1;
    }
    let json = LatticeJson {
        inputs: lattice.num_inputs(),
        nodes: lattice.nodes().len(),
        nodes_by_size,
        edges: lattice.edges().len(),
        maximal_chains: lattice.total_chains().to_string(),
    };
    let table = format!(
        "inputs: {}\nnodes: {}\nhasse edges: {}\nmaximal chains: {}\n",
        json.inputs, json.nodes, json.edges, json.maximal_chains
    );
    Report::new(table, &json)
}

#[derive(Serialize)]
struct ExampleJson {
    name: &'static str,
    arity: usize,
    description: &'static str,
}

pub fn examples(list: &[Example]) -> Report {
    let entries: Vec<ExampleJson> = list
        .iter()
        .map(|e| ExampleJson {
            name: e.name(),
            arity: e.arity(),
            description: e.description(),
        })
        .collect();
    let body: Vec<Vec<String>> = entries
        .iter()
        .map(|e| vec![e.name.to_string(), e.arity.to_string(), e.description.to_string()])
        .collect();
    Report::new(rows(&["name", "inputs", "description"], &body, true), &entries)
}
