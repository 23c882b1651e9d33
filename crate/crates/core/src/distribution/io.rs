//! Text formats for joint distributions.
//!
//! TSV: the first non-comment line lists the variable names followed by the
//! literal `p`; every further line is one state and its probability. `#`
//! starts a comment. Alphabet sizes are inferred from the largest state seen
//! unless a header name carries an explicit `:k` suffix (`X1:3`).
//!
//! JSON: `{"variables": [{"name", "cardinality", "role"}], "states": [{"state": [..], "p": ..}]}`.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{check_state_space, JointDistribution, Role, VariableSpec, DEFAULT_MAX_STATES};
use crate::error::{Error, Result};

/// Tolerance on the total probability mass accepted in strict mode.
pub const STRICT_SUM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Tsv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tsv" => Ok(Format::Tsv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidOptions(format!("unknown format `{other}`"))),
        }
    }
}

/// Which variable becomes the target after parsing.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum TargetSelection {
    /// Roles declared in the file; for TSV, the last column.
    #[default]
    FromSource,
    Named(String),
    /// Every variable is an input.
    None,
}

#[derive(Debug, Clone)]
pub struct ParseOptions {
    pub format: Format,
    /// Reject totals outside `1 ± 1e-6` instead of renormalizing them.
    pub strict: bool,
    pub target: TargetSelection,
    pub max_states: usize,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self {
            format: Format::Tsv,
            strict: true,
            target: TargetSelection::FromSource,
            max_states: DEFAULT_MAX_STATES,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Parsed {
    pub distribution: JointDistribution,
    pub warnings: Vec<String>,
}

pub fn parse_distribution<R: Read>(mut source: R, options: &ParseOptions) -> Result<Parsed> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    let (mut variables, states) = match options.format {
        Format::Tsv => parse_tsv(&text)?,
        Format::Json => parse_json(&text)?,
    };
    match &options.target {
        TargetSelection::FromSource => {}
        TargetSelection::Named(name) => {
            let index = variables
                .iter()
                .position(|v| &v.name == name)
                .ok_or_else(|| Error::UnknownVariable(name.clone()))?;
            for (i, v) in variables.iter_mut().enumerate() {
                v.role = if i == index { Role::Target } else { Role::Input };
            }
        }
        TargetSelection::None => variables.iter_mut().for_each(|v| v.role = Role::Input),
    }
    let targets = variables.iter().filter(|v| v.role == Role::Target).count();
    if targets > 1 {
        return Err(Error::InvalidSystem(format!(
            "{targets} variables are marked as target"
        )));
    }

    let len = check_state_space(&variables, options.max_states)?;
    let mut table = vec![0.0; len];
    let mut seen = HashSet::new();
    let mut total = 0.0;
    for (state, p) in states {
        if !seen.insert(state.clone()) {
            return Err(Error::DuplicateState(state));
        }
        if !p.is_finite() || p < 0.0 {
            return Err(Error::NegativeProbability { state, value: p });
        }
        let index = super::state_index(&variables, &state)?;
        table[index] = p;
        total += p;
    }

    let mut warnings = Vec::new();
    if options.strict {
        if (total - 1.0).abs() > STRICT_SUM_TOLERANCE {
            return Err(Error::Normalization {
                sum: total,
                tolerance: STRICT_SUM_TOLERANCE,
            });
        }
    } else if total > 0.0 && (total - 1.0).abs() > super::RENORMALIZE_THRESHOLD {
        warnings.push(format!("probabilities summed to {total}; renormalized"));
    }
    let distribution = JointDistribution::build(variables, table, None, options.max_states)?;
    Ok(Parsed {
        distribution,
        warnings,
    })
}

type RawStates = Vec<(Vec<usize>, f64)>;

fn parse_tsv(text: &str) -> Result<(Vec<VariableSpec>, RawStates)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.split('#').next().unwrap_or("").trim()))
        .filter(|(_, line)| !line.is_empty());

    let (header_line, header) = lines.next().ok_or(Error::Syntax {
        line: 1,
        message: "missing header".into(),
    })?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() < 2 || *tokens.last().unwrap_or(&"") != "p" {
        return Err(Error::Syntax {
            line: header_line,
            message: "header must list variable names followed by `p`".into(),
        });
    }
    let mut names = Vec::new();
    let mut declared = Vec::new();
    for token in &tokens[..tokens.len() - 1] {
        let (name, card) = match token.split_once(':') {
            Some((name, card)) => {
                let k = card.parse::<usize>().map_err(|_| Error::Syntax {
                    line: header_line,
                    message: format!("bad cardinality in `{token}`"),
                })?;
                (name, Some(k))
            }
            None => (*token, None),
        };
        if name.is_empty() {
            return Err(Error::Syntax {
                line: header_line,
                message: "empty variable name".into(),
            });
        }
        names.push(name.to_string());
        declared.push(card);
    }
    let m = names.len();

    let mut states = Vec::new();
    let mut observed = vec![0usize; m];
    for (line_no, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != m + 1 {
            return Err(Error::Syntax {
                line: line_no,
                message: format!("expected {} fields, found {}", m + 1, fields.len()),
            });
        }
        let mut state = Vec::with_capacity(m);
        for (k, field) in fields[..m].iter().enumerate() {
            let s = field.parse::<usize>().map_err(|_| Error::Syntax {
                line: line_no,
                message: format!("`{field}` is not a non-negative integer state"),
            })?;
            observed[k] = observed[k].max(s + 1);
            state.push(s);
        }
        let p = parse_probability(fields[m]).ok_or_else(|| Error::Syntax {
            line: line_no,
            message: format!("`{}` is not a probability", fields[m]),
        })?;
        states.push((state, p));
    }

    let variables = names
        .into_iter()
        .enumerate()
        .map(|(k, name)| VariableSpec {
            name,
            cardinality: declared[k].unwrap_or(observed[k].max(1)),
            role: if k + 1 == m { Role::Target } else { Role::Input },
        })
        .collect();
    Ok((variables, states))
}

/// Accepts decimal numbers and simple fractions such as `1/4`.
fn parse_probability(field: &str) -> Option<f64> {
    match field.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.parse().ok()?;
            let den: f64 = den.parse().ok()?;
            (den != 0.0).then(|| num / den)
        }
        None => field.parse().ok(),
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonVariable {
    name: String,
    cardinality: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    role: Option<Role>,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonState {
    state: Vec<usize>,
    p: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonDistribution {
    variables: Vec<JsonVariable>,
    states: Vec<JsonState>,
}

fn parse_json(text: &str) -> Result<(Vec<VariableSpec>, RawStates)> {
    let raw: JsonDistribution = serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: e.line(),
        message: e.to_string(),
    })?;
    let any_role = raw.variables.iter().any(|v| v.role.is_some());
    let m = raw.variables.len();
    let variables = raw
        .variables
        .into_iter()
        .enumerate()
        .map(|(k, v)| VariableSpec {
            name: v.name,
            cardinality: v.cardinality,
            role: match v.role {
                Some(role) => role,
                None if !any_role && k + 1 == m => Role::Target,
                None => Role::Input,
            },
        })
        .collect();
    Ok((variables, raw.states.into_iter().map(|s| (s.state, s.p)).collect()))
}

impl JointDistribution {
    /// TSV with one row per state of positive probability. Probabilities use
    /// the shortest representation that parses back to the same `f64`.
    pub fn to_tsv(&self) -> String {
        let mut observed = vec![0usize; self.variables.len()];
        for (state, _) in self.support() {
            for (k, &s) in state.iter().enumerate() {
                observed[k] = observed[k].max(s + 1);
            }
        }
        let mut out = String::new();
        for (k, v) in self.variables.iter().enumerate() {
            if v.cardinality != observed[k].max(1) {
                let _ = write!(out, "{}:{}\t", v.name, v.cardinality);
            } else {
                let _ = write!(out, "{}\t", v.name);
            }
        }
        out.push_str("p\n");
        for (state, p) in self.support() {
            for s in state {
                let _ = write!(out, "{s}\t");
            }
            let _ = writeln!(out, "{p}");
        }
        out
    }

    pub fn to_json(&self) -> String {
        let doc = JsonDistribution {
            variables: self
                .variables
                .iter()
                .map(|v| JsonVariable {
                    name: v.name.clone(),
                    cardinality: v.cardinality,
                    role: Some(v.role),
                })
                .collect(),
            states: self
                .support()
                .map(|(state, p)| JsonState { state, p })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).unwrap_or_default()
    }
}
