//! Parsing facet notation: `(X1X2)(X1Y)` for constraint nodes over all
//! variables and `[X1][X2]` for complexes over the inputs.
//!
//! Inside a group, names are matched greedily (longest first) and may be
//! separated by commas or whitespace. Besides declared names, `Zk` refers to
//! the k-th variable (1-based) when no variable is literally called that.

use crate::distribution::VarSet;
use crate::error::{Error, Result};
use crate::lattice::{ConstraintNode, Face, SimplicialComplex};

fn notation_error(input: &str, message: impl Into<String>) -> Error {
    Error::Notation {
        input: input.to_string(),
        message: message.into(),
    }
}

/// Names with their indices, longest first, including positional aliases.
fn lexicon<S: AsRef<str>>(names: &[S]) -> Vec<(String, usize)> {
    let mut out: Vec<(String, usize)> = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_ref().to_string(), i))
        .collect();
    for i in 0..names.len() {
        let alias = format!("Z{}", i + 1);
        if !out.iter().any(|(n, _)| *n == alias) {
            out.push((alias, i));
        }
    }
    out.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.1.cmp(&b.1)));
    out
}

/// Splits `input` into bracketed groups and resolves the names in each.
fn groups<S: AsRef<str>>(input: &str, names: &[S], open: char, close: char) -> Result<Vec<u32>> {
    let words = lexicon(names);
    let mut out = Vec::new();
    let mut rest = input.trim();
    if rest.is_empty() {
        return Err(notation_error(input, "no groups"));
    }
    while !rest.is_empty() {
        let body = rest
            .strip_prefix(open)
            .ok_or_else(|| notation_error(input, format!("expected `{open}`")))?;
        let end = body
            .find(close)
            .ok_or_else(|| notation_error(input, format!("missing `{close}`")))?;
        let mut inner = &body[..end];
        let mut mask = 0u32;
        loop {
            inner = inner.trim_start_matches(|c: char| c == ',' || c.is_whitespace());
            if inner.is_empty() {
                break;
            }
            let (word, index) = words
                .iter()
                .find(|(w, _)| inner.starts_with(w.as_str()))
                .ok_or_else(|| notation_error(input, format!("unknown variable at `{inner}`")))?;
            mask |= 1 << index;
            inner = &inner[word.len()..];
        }
        out.push(mask);
        rest = body[end + close.len_utf8()..].trim_start();
    }
    Ok(out)
}

/// Parses `(Z1Z3)(Z2Z3)`-style notation over the given variable names.
pub fn parse_constraint_node<S: AsRef<str>>(input: &str, names: &[S]) -> Result<ConstraintNode> {
    let masks = groups(input, names, '(', ')')?;
    if masks.contains(&0) {
        return Err(notation_error(input, "empty group"));
    }
    let node = ConstraintNode::from_faces(masks.into_iter().map(VarSet));
    if !node.covers(names.len()) {
        return Err(Error::UncoveredNode(input.to_string()));
    }
    Ok(node)
}

/// Parses `[X1][X2]`-style notation over the input names; `[]` is `{∅}`.
pub fn parse_complex<S: AsRef<str>>(input: &str, names: &[S]) -> Result<SimplicialComplex> {
    let masks = groups(input, names, '[', ']')?;
    Ok(SimplicialComplex::from_facets(masks.into_iter().map(Face)))
}
