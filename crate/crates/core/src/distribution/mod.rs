//! Finite discrete joint distributions stored as dense row-major tables.
//!
//! Conventions used throughout the crate: `0 · log 0 = 0` and `0 / 0 = 0`.

mod io;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::{parse_distribution, Format, ParseOptions, Parsed, TargetSelection};

/// Default cap on the size of the full state space.
pub const DEFAULT_MAX_STATES: usize = 10_000_000;

/// Tolerance on the total mass accepted by [`JointDistribution::new`].
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Totals this close to one are left untouched, so that renormalizing an
/// already normalized table is the identity.
const RENORMALIZE_THRESHOLD: f64 = 1e-12;

/// Logarithm base for information quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Base {
    /// Bits.
    #[default]
    #[serde(rename = "2")]
    Two,
    /// Nats.
    #[serde(rename = "e")]
    E,
}

impl Base {
    #[inline]
    pub fn log(self, x: f64) -> f64 {
        match self {
            Base::Two => x.log2(),
            Base::E => x.ln(),
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Base::Two => "bits",
            Base::E => "nats",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Input,
    Target,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VariableSpec {
    pub name: String,
    pub cardinality: usize,
    pub role: Role,
}

impl VariableSpec {
    pub fn input(name: impl Into<String>, cardinality: usize) -> Self {
        Self {
            name: name.into(),
            cardinality,
            role: Role::Input,
        }
    }

    pub fn target(name: impl Into<String>, cardinality: usize) -> Self {
        Self {
            name: name.into(),
            cardinality,
            role: Role::Target,
        }
    }
}

/// A set of variable positions, as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct VarSet(pub u32);

impl VarSet {
    pub const EMPTY: VarSet = VarSet(0);

    pub fn full(m: usize) -> Self {
        debug_assert!(m <= 32);
        if m == 32 {
            VarSet(u32::MAX)
        } else {
            VarSet((1u32 << m) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        VarSet(1 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        VarSet(indices.into_iter().fold(0, |m, i| m | (1 << i)))
    }

    #[inline]
    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn union(self, other: VarSet) -> VarSet {
        VarSet(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: VarSet) -> VarSet {
        VarSet(self.0 & other.0)
    }

    #[inline]
    pub fn is_subset(self, other: VarSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.contains(i))
    }
}

/// Dense probability table over an ordered list of finite variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    variables: Vec<VariableSpec>,
    table: Vec<f64>,
}

impl JointDistribution {
    /// Builds a distribution from a table that already sums to one within
    /// [`NORMALIZATION_TOLERANCE`].
    pub fn new(variables: Vec<VariableSpec>, table: Vec<f64>) -> Result<Self> {
        Self::build(variables, table, Some(NORMALIZATION_TOLERANCE), DEFAULT_MAX_STATES)
    }

    /// Builds a distribution from arbitrary non-negative weights.
    pub fn from_weights(variables: Vec<VariableSpec>, weights: Vec<f64>) -> Result<Self> {
        Self::build(variables, weights, None, DEFAULT_MAX_STATES)
    }

    /// Builds a distribution from a list of `(state, weight)` pairs; all other
    /// states get probability zero.
    pub fn from_states<S: AsRef<[usize]>>(
        variables: Vec<VariableSpec>,
        states: impl IntoIterator<Item = (S, f64)>,
    ) -> Result<Self> {
        let len = check_state_space(&variables, DEFAULT_MAX_STATES)?;
        let mut table = vec![0.0; len];
        let mut seen = vec![false; len];
        for (state, weight) in states {
            let state = state.as_ref();
            let index = state_index(&variables, state)?;
            if seen[index] {
                return Err(Error::DuplicateState(state.to_vec()));
            }
            seen[index] = true;
            table[index] = weight;
        }
        Self::from_weights(variables, table)
    }

    pub(crate) fn build(
        variables: Vec<VariableSpec>,
        mut table: Vec<f64>,
        tolerance: Option<f64>,
        max_states: usize,
    ) -> Result<Self> {
        let expected = check_state_space(&variables, max_states)?;
        if table.len() != expected {
            return Err(Error::TableLength {
                expected,
                actual: table.len(),
            });
        }
        let mut total = 0.0;
        for (index, &value) in table.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::NegativeProbability {
                    state: state_of(&variables, index),
                    value,
                });
            }
            total += value;
        }
        let off = (total - 1.0).abs();
        if let Some(tolerance) = tolerance {
            if off > tolerance {
                return Err(Error::Normalization { sum: total, tolerance });
            }
        } else if total <= 0.0 {
            return Err(Error::Normalization {
                sum: total,
                tolerance: 0.0,
            });
        }
        if off > RENORMALIZE_THRESHOLD {
            table.iter_mut().for_each(|v| *v /= total);
        }
        Ok(Self { variables, table })
    }

    pub fn variables(&self) -> &[VariableSpec] {
        &self.variables
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.variables.iter().map(|v| v.cardinality).collect()
    }

    pub fn all(&self) -> VarSet {
        VarSet::full(self.variables.len())
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn names(&self) -> Vec<&str> {
        self.variables.iter().map(|v| v.name.as_str()).collect()
    }

    pub fn target_index(&self) -> Option<usize> {
        self.variables.iter().position(|v| v.role == Role::Target)
    }

    pub fn input_indices(&self) -> Vec<usize> {
        (0..self.variables.len())
            .filter(|&i| self.variables[i].role == Role::Input)
            .collect()
    }

    pub fn num_inputs(&self) -> usize {
        self.variables.iter().filter(|v| v.role == Role::Input).count()
    }

    pub fn index_of(&self, state: &[usize]) -> Result<usize> {
        state_index(&self.variables, state)
    }

    pub fn state_of(&self, index: usize) -> Vec<usize> {
        state_of(&self.variables, index)
    }

    pub fn probability(&self, state: &[usize]) -> Result<f64> {
        Ok(self.table[self.index_of(state)?])
    }

    /// Iterates over `(state, probability)` for states of positive mass.
    pub fn support(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        self.table
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, &p)| (self.state_of(i), p))
    }

    /// Returns a copy where `name` is the only target variable.
    pub fn with_target(&self, name: &str) -> Result<Self> {
        let index = self
            .variable_index(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        let mut out = self.clone();
        for (i, v) in out.variables.iter_mut().enumerate() {
            v.role = if i == index { Role::Target } else { Role::Input };
        }
        Ok(out)
    }

    /// Reorders variables; `order[k]` is the old position of the new `k`-th variable.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        let m = self.variables.len();
        let mut seen = vec![false; m];
        if order.len() != m || order.iter().any(|&i| i >= m || std::mem::replace(&mut seen[i], true)) {
            return Err(Error::InvalidOptions(format!(
                "{order:?} is not a permutation of {m} variables"
            )));
        }
        let variables: Vec<_> = order.iter().map(|&i| self.variables[i].clone()).collect();
        let mut table = vec![0.0; self.table.len()];
        let old_strides = strides(&self.cardinalities());
        // Walk the new table in row-major order, tracking the old index.
        let new_cards: Vec<usize> = variables.iter().map(|v| v.cardinality).collect();
        let mut state = vec![0usize; m];
        let mut old_index = 0usize;
        for slot in table.iter_mut() {
            *slot = self.table[old_index];
            for k in (0..m).rev() {
                let s = old_strides[order[k]];
                state[k] += 1;
                old_index += s;
                if state[k] < new_cards[k] {
                    break;
                }
                old_index -= s * state[k];
                state[k] = 0;
            }
        }
        Ok(Self { variables, table })
    }

    /// Inputs first (in their original order), target last.
    pub fn canonical_system(&self) -> Result<Self> {
        let targets = self
            .variables
            .iter()
            .filter(|v| v.role == Role::Target)
            .count();
        if targets != 1 {
            return Err(Error::InvalidSystem(format!(
                "expected exactly one target variable, found {targets}"
            )));
        }
        let target = self.target_index().unwrap_or_default();
        if target + 1 == self.variables.len() {
            return Ok(self.clone());
        }
        let mut order = self.input_indices();
        order.push(target);
        self.permute(&order)
    }

    /// Sums out every variable not in `keep`; variable order is preserved.
    pub fn marginal(&self, keep: VarSet) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::EmptyVarSet);
        }
        if !keep.is_subset(self.all()) {
            return Err(Error::InvalidOptions(format!(
                "variable set {:#b} exceeds {} variables",
                keep.0,
                self.variables.len()
            )));
        }
        if keep == self.all() {
            return Ok(self.clone());
        }
        let variables: Vec<_> = keep.iter().map(|i| self.variables[i].clone()).collect();
        let table = self.marginal_table(keep);
        Ok(Self { variables, table })
    }

    /// Marginal masses over `keep`, indexed row-major over the kept variables.
    pub(crate) fn marginal_table(&self, keep: VarSet) -> Vec<f64> {
        let projector = Projector::new(&self.cardinalities(), keep);
        let mut out = vec![0.0; projector.len];
        for (cell, &p) in projector.map.iter().zip(&self.table) {
            out[*cell] += p;
        }
        out
    }

    pub fn entropy(&self, base: Base) -> f64 {
        entropy_of(&self.table, base)
    }

    /// `D(self ‖ q)`. Fails if `self` puts mass where `q` has none.
    pub fn kl_divergence(&self, q: &JointDistribution, base: Base) -> Result<f64> {
        if !same_variables(&self.variables, &q.variables) {
            return Err(Error::VariableMismatch);
        }
        kl_of(&self.table, &q.table, base).map_err(|index| Error::AbsoluteContinuity {
            state: self.state_of(index),
            p: self.table[index],
            q: q.table[index],
        })
    }

    /// `I(a; b)` computed as `D(p(a,b) ‖ p(a) p(b))`.
    pub fn mutual_information(&self, a: VarSet, b: VarSet, base: Base) -> Result<f64> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::EmptyVarSet);
        }
        if !a.intersection(b).is_empty() {
            return Err(Error::OverlappingVarSets);
        }
        let cards = self.cardinalities();
        let joint = a.union(b);
        let pa = self.marginal_table(a);
        let pb = self.marginal_table(b);
        let pab = self.marginal_table(joint);
        // Index maps from the joint (a ∪ b) table to the a and b tables.
        let sub_cards: Vec<usize> = joint.iter().map(|i| cards[i]).collect();
        let rel = |s: VarSet| VarSet::from_indices(joint.iter().enumerate().filter(|(_, i)| s.contains(*i)).map(|(k, _)| k));
        let to_a = Projector::new(&sub_cards, rel(a));
        let to_b = Projector::new(&sub_cards, rel(b));
        let mut total = 0.0;
        for (k, &p) in pab.iter().enumerate() {
            if p > 0.0 {
                total += p * base.log(p / (pa[to_a.map[k]] * pb[to_b.map[k]]));
            }
        }
        Ok(total.max(0.0))
    }

    /// Independent product of two systems with equal input counts.
    ///
    /// Input `i` of the result is the pair of the two `i`-th inputs, encoded
    /// as `s1 * k2 + s2`; the target is paired the same way and placed last.
    pub fn product(d1: &Self, d2: &Self) -> Result<Self> {
        let c1 = d1.canonical_system()?;
        let c2 = d2.canonical_system()?;
        let m = c1.variables.len();
        if m != c2.variables.len() {
            return Err(Error::InputCountMismatch {
                left: m - 1,
                right: c2.variables.len() - 1,
            });
        }
        let variables: Vec<VariableSpec> = c1
            .variables
            .iter()
            .zip(&c2.variables)
            .map(|(a, b)| VariableSpec {
                name: if a.name == b.name {
                    a.name.clone()
                } else {
                    format!("{}.{}", a.name, b.name)
                },
                cardinality: a.cardinality * b.cardinality,
                role: a.role,
            })
            .collect();
        let len = check_state_space(&variables, DEFAULT_MAX_STATES)?;
        let mut table = vec![0.0; len];
        let s2: Vec<(Vec<usize>, f64)> = c2.support().collect();
        let cards2 = c2.cardinalities();
        for (x, px) in c1.support() {
            for (y, py) in &s2 {
                let state: Vec<usize> = (0..m).map(|k| x[k] * cards2[k] + y[k]).collect();
                table[state_index(&variables, &state)?] = px * py;
            }
        }
        Self::from_weights(variables, table)
    }

    /// Appends a target `Y` that is an exact copy of all inputs jointly.
    pub fn copy_target(&self) -> Result<Self> {
        if self.target_index().is_some() {
            return Err(Error::InvalidSystem(
                "copy_target expects a distribution without a target".into(),
            ));
        }
        let n = self.table.len();
        let mut name = String::from("Y");
        while self.variable_index(&name).is_some() {
            name.push('\'');
        }
        let mut variables = self.variables.clone();
        variables.push(VariableSpec::target(name, n));
        let len = check_state_space(&variables, DEFAULT_MAX_STATES)?;
        let mut table = vec![0.0; len];
        for (x, &p) in self.table.iter().enumerate() {
            table[x * n + x] = p;
        }
        Self::from_weights(variables, table)
    }
}

impl fmt::Display for JointDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_tsv())
    }
}

pub(crate) fn same_variables(a: &[VariableSpec], b: &[VariableSpec]) -> bool {
    a.len() == b.len()
        && a
            .iter()
            .zip(b)
            .all(|(x, y)| x.name == y.name && x.cardinality == y.cardinality)
}

pub(crate) fn entropy_of(table: &[f64], base: Base) -> f64 {
    let h: f64 = table
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * base.log(p))
        .sum();
    h.max(0.0)
}

/// `Σ p log(p/q)`; on an absolute-continuity violation returns the offending index.
///
/// Entries with `q < 1e-15` and `p > 1e-12` count as a violation: they only
/// arise from a projection that failed to converge.
pub(crate) fn kl_of(p: &[f64], q: &[f64], base: Base) -> std::result::Result<f64, usize> {
    let mut total = 0.0;
    for (i, (&pi, &qi)) in p.iter().zip(q).enumerate() {
        if pi <= 0.0 {
            continue;
        }
        if qi < 1e-15 {
            if pi > 1e-12 {
                return Err(i);
            }
            if qi <= 0.0 {
                continue;
            }
        }
        total += pi * base.log(pi / qi);
    }
    Ok(total.max(0.0))
}

pub(crate) fn check_state_space(variables: &[VariableSpec], cap: usize) -> Result<usize> {
    if variables.is_empty() {
        return Err(Error::InvalidSystem("no variables".into()));
    }
    if variables.len() > 32 {
        return Err(Error::InvalidSystem(format!(
            "{} variables exceed the supported 32",
            variables.len()
        )));
    }
    let mut names = std::collections::HashSet::new();
    let mut states: u128 = 1;
    for v in variables {
        if v.cardinality == 0 {
            return Err(Error::InvalidSystem(format!(
                "variable `{}` has an empty alphabet",
                v.name
            )));
        }
        if !names.insert(v.name.as_str()) {
            return Err(Error::DuplicateVariable(v.name.clone()));
        }
        states = states.saturating_mul(v.cardinality as u128);
    }
    if states > cap as u128 {
        return Err(Error::StateSpaceTooLarge { states, cap });
    }
    Ok(states as usize)
}

pub(crate) fn strides(cards: &[usize]) -> Vec<usize> {
    let mut out = vec![1; cards.len()];
    for k in (0..cards.len().saturating_sub(1)).rev() {
        out[k] = out[k + 1] * cards[k + 1];
    }
    out
}

fn state_index(variables: &[VariableSpec], state: &[usize]) -> Result<usize> {
    if state.len() != variables.len() {
        return Err(Error::Arity {
            expected: variables.len(),
            actual: state.len(),
        });
    }
    let mut index = 0;
    for (v, &s) in variables.iter().zip(state) {
        if s >= v.cardinality {
            return Err(Error::StateOutOfRange {
                state: state.to_vec(),
                variable: v.name.clone(),
                cardinality: v.cardinality,
            });
        }
        index = index * v.cardinality + s;
    }
    Ok(index)
}

fn state_of(variables: &[VariableSpec], mut index: usize) -> Vec<usize> {
    let mut state = vec![0; variables.len()];
    for (k, v) in variables.iter().enumerate().rev() {
        state[k] = index % v.cardinality;
        index /= v.cardinality;
    }
    state
}

/// Maps every cell of a row-major table to its cell in the marginal over `keep`.
#[derive(Debug, Clone)]
pub(crate) struct Projector {
    pub map: Vec<usize>,
    pub len: usize,
}

impl Projector {
    pub fn new(cards: &[usize], keep: VarSet) -> Self {
        let m = cards.len();
        let total: usize = cards.iter().product();
        // Stride of each variable inside the marginal table (0 when summed out).
        let mut kept_stride = vec![0usize; m];
        let mut len = 1usize;
        for k in (0..m).rev() {
            if keep.contains(k) {
                kept_stride[k] = len;
                len *= cards[k];
            }
        }
        let mut map = Vec::with_capacity(total);
        let mut state = vec![0usize; m];
        let mut cell = 0usize;
        for _ in 0..total {
            map.push(cell);
            for k in (0..m).rev() {
                state[k] += 1;
                cell += kept_stride[k];
                if state[k] < cards[k] {
                    break;
                }
                cell -= kept_stride[k] * state[k];
                state[k] = 0;
            }
        }
        Self { map, len }
    }
}
