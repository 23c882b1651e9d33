//! Split distributions: the maximum-entropy distribution that shares a given
//! family of marginals with the true distribution.
//!
//! The projection first finds the common support of all distributions with
//! those marginals (one or more small LPs), then runs iterative proportional
//! fitting from the uniform distribution on that support. Starting IPF on
//! the full table reaches the same limit, but only at a sublinear rate when
//! the maximizer has zeros that no single marginal forces.

mod cache;
mod simplex;

use serde::Serialize;

pub use cache::SplitCache;

use crate::distribution::{Base, JointDistribution, Projector, VarSet};
use crate::error::{Error, Result};
use crate::lattice::ConstraintNode;
use simplex::LpOutcome;

/// Cells whose LP value falls below this count as outside the support.
const SUPPORT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IpfOptions {
    /// Largest accepted L1 gap between a fitted facet marginal and its target.
    pub tolerance: f64,
    pub max_sweeps: usize,
    pub base: Base,
}

impl Default for IpfOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_sweeps: 100_000,
            base: Base::Two,
        }
    }
}

impl IpfOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidOptions(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_sweeps == 0 {
            return Err(Error::InvalidOptions("max_sweeps must be at least 1".into()));
        }
        Ok(())
    }
}

/// Facet marginals that a split distribution must reproduce.
#[derive(Debug, Clone)]
pub struct ConstraintSet {
    cards: Vec<usize>,
    facets: Vec<VarSet>,
    targets: Vec<Vec<f64>>,
    /// A table known to satisfy every constraint, when one is available.
    witness: Option<Vec<f64>>,
}

impl ConstraintSet {
    /// The marginals of `p` on the facets of `node`.
    pub fn from_distribution(p: &JointDistribution, node: &ConstraintNode) -> Result<Self> {
        let m = p.num_variables();
        check_node(node, m)?;
        let facets = node.facets().to_vec();
        let targets = facets.iter().map(|&f| p.marginal_table(f)).collect();
        Ok(Self {
            cards: p.cardinalities(),
            facets,
            targets,
            witness: Some(p.table().to_vec()),
        })
    }

    /// Arbitrary target marginals, each laid out row-major over the facet's
    /// variables in increasing index order. Consistency is checked when fitting.
    pub fn from_targets(cards: Vec<usize>, node: &ConstraintNode, targets: Vec<Vec<f64>>) -> Result<Self> {
        check_node(node, cards.len())?;
        let facets = node.facets().to_vec();
        if targets.len() != facets.len() {
            return Err(Error::Arity {
                expected: facets.len(),
                actual: targets.len(),
            });
        }
        for (&f, t) in facets.iter().zip(&targets) {
            let expected: usize = f.iter().map(|i| cards[i]).product();
            if t.len() != expected {
                return Err(Error::TableLength {
                    expected,
                    actual: t.len(),
                });
            }
            if let Some(&v) = t.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
                return Err(Error::InconsistentConstraints(format!("marginal entry {v}")));
            }
            let sum: f64 = t.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::Normalization { sum, tolerance: 1e-9 });
            }
        }
        Ok(Self {
            cards,
            facets,
            targets,
            witness: None,
        })
    }

    pub fn facets(&self) -> &[VarSet] {
        &self.facets
    }

    pub fn targets(&self) -> &[Vec<f64>] {
        &self.targets
    }
}

fn check_node(node: &ConstraintNode, m: usize) -> Result<()> {
    let outside = node.facets().iter().any(|f| !f.is_subset(VarSet::full(m)));
    if outside || !node.covers(m) {
        return Err(Error::UncoveredNode(format!("{:?}", node.facets())));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitResult {
    pub distribution: JointDistribution,
    pub sweeps_used: usize,
    pub final_gap: f64,
}

/// The split distribution `p_S` of `p` at `node`.
pub fn split_distribution(p: &JointDistribution, node: &ConstraintNode, opts: &IpfOptions) -> Result<SplitResult> {
    opts.validate()?;
    let set = ConstraintSet::from_distribution(p, node)?;
    let (table, sweeps_used, final_gap) = fit(&set, opts, || node.display(&p.names()))?;
    Ok(SplitResult {
        distribution: JointDistribution::from_weights(p.variables().to_vec(), table)?,
        sweeps_used,
        final_gap,
    })
}

/// Maximum-entropy table for an arbitrary constraint set: returns the table,
/// the sweeps used and the final gap.
pub fn fit_constraints(set: &ConstraintSet, opts: &IpfOptions) -> Result<(Vec<f64>, usize, f64)> {
    opts.validate()?;
    fit(set, opts, || format!("{:?}", set.facets))
}

fn fit(set: &ConstraintSet, opts: &IpfOptions, label: impl Fn() -> String) -> Result<(Vec<f64>, usize, f64)> {
    let projectors: Vec<Projector> = set.facets.iter().map(|&f| Projector::new(&set.cards, f)).collect();
    let support = support_of(set, &projectors)?;
    let count = support.iter().filter(|&&s| s).count();
    if count == 0 {
        return Err(Error::InconsistentConstraints("empty support".into()));
    }
    let mut q: Vec<f64> = support
        .iter()
        .map(|&s| if s { 1.0 / count as f64 } else { 0.0 })
        .collect();

    let mut current: Vec<Vec<f64>> = set.targets.iter().map(|t| vec![0.0; t.len()]).collect();
    let mut gap = max_gap(&q, &projectors, &set.targets, &mut current);
    let mut sweeps = 0;
    while gap > opts.tolerance {
        if sweeps == opts.max_sweeps {
            return Err(Error::NonConvergence {
                node: label(),
                sweeps,
                gap,
            });
        }
        for ((proj, target), cur) in projectors.iter().zip(&set.targets).zip(&mut current) {
            marginal_into(&q, proj, cur);
            for (cell, &to) in q.iter_mut().zip(&proj.map) {
                let c = cur[to];
                *cell = if c > 0.0 { *cell * (target[to] / c) } else { 0.0 };
            }
        }
        sweeps += 1;
        gap = max_gap(&q, &projectors, &set.targets, &mut current);
    }
    Ok((q, sweeps, gap))
}

fn marginal_into(q: &[f64], proj: &Projector, out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    for (&v, &to) in q.iter().zip(&proj.map) {
        out[to] += v;
    }
}

fn max_gap(q: &[f64], projectors: &[Projector], targets: &[Vec<f64>], scratch: &mut [Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for ((proj, target), cur) in projectors.iter().zip(targets).zip(scratch.iter_mut()) {
        marginal_into(q, proj, cur);
        let l1: f64 = cur.iter().zip(target).map(|(a, b)| (a - b).abs()).sum();
        worst = worst.max(l1);
    }
    worst
}

/// Cells that are positive for some distribution matching every target
/// marginal; that union is the support of the maximum-entropy solution.
fn support_of(set: &ConstraintSet, projectors: &[Projector]) -> Result<Vec<bool>> {
    let len = projectors[0].map.len();
    // A cell can only carry mass if every facet marginal it falls into does.
    let allowed: Vec<bool> = (0..len)
        .map(|z| {
            projectors
                .iter()
                .zip(&set.targets)
                .all(|(proj, t)| t[proj.map[z]] > 0.0)
        })
        .collect();
    let mut support: Vec<bool> = match &set.witness {
        Some(w) => w.iter().map(|&v| v > 0.0).collect(),
        None => vec![false; len],
    };
    let mut candidates: Vec<bool> = allowed.iter().zip(&support).map(|(&a, &s)| a && !s).collect();
    if set.witness.is_some() && !candidates.contains(&true) {
        return Ok(support);
    }

    // Equality rows over the allowed cells, one per positive marginal cell.
    let columns: Vec<usize> = (0..len).filter(|&z| allowed[z]).collect();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (proj, target) in projectors.iter().zip(&set.targets) {
        let mut row_of = vec![usize::MAX; target.len()];
        for (cell, &t) in target.iter().enumerate() {
            if t > 0.0 {
                row_of[cell] = a.len();
                a.push(vec![0.0; columns.len()]);
                b.push(t);
            }
        }
        for (k, &z) in columns.iter().enumerate() {
            a[row_of[proj.map[z]]][k] = 1.0;
        }
    }

    loop {
        let c: Vec<f64> = columns.iter().map(|&z| if candidates[z] { 1.0 } else { 0.0 }).collect();
        match simplex::maximize(&a, &b, &c) {
            LpOutcome::Optimal { x, value } => {
                let mut found = false;
                for (k, &z) in columns.iter().enumerate() {
                    if x[k] > SUPPORT_EPS {
                        support[z] = true;
                        if candidates[z] {
                            candidates[z] = false;
                            found = true;
                        }
                    }
                }
                if !found || value <= SUPPORT_EPS || !candidates.contains(&true) {
                    return Ok(support);
                }
            }
            LpOutcome::Infeasible { violation } => {
                return Err(Error::InconsistentConstraints(format!(
                    "no distribution has these marginals (violation {violation:e})"
                )))
            }
            LpOutcome::Unbounded => unreachable!("the feasible set is a bounded polytope"),
        }
    }
}

/// `I_S = D(p ‖ p_S)`.
pub fn constraint_information(p: &JointDistribution, node: &ConstraintNode, opts: &IpfOptions) -> Result<f64> {
    let split = split_distribution(p, node, opts)?;
    p.kl_divergence(&split.distribution, opts.base)
}

/// `I_S` at the pairwise node `(Z1Z2)(Z1Z3)(Z2Z3)` of a three-variable system.
pub fn triplewise_information(p: &JointDistribution, opts: &IpfOptions) -> Result<f64> {
    if p.num_variables() != 3 {
        return Err(Error::Arity {
            expected: 3,
            actual: p.num_variables(),
        });
    }
    let node = ConstraintNode::from_faces([VarSet(0b011), VarSet(0b101), VarSet(0b110)]);
    constraint_information(p, &node, opts)
}

#[cfg(test)]
mod tests;
