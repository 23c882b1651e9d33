//! Information contributions: for each predictor, the chain-count weighted
//! KL gain over every Hasse edge of the input lattice that adds it.

use std::collections::BTreeMap;

use crate::distribution::{Base, JointDistribution, VarSet};
use crate::error::{Error, Result};
use crate::lattice::{Face, InputLattice, SimplicialComplex};
use crate::projection::{IpfOptions, SplitCache};

/// Largest accepted `|Σ I_A − I(X;Y)|`.
pub const COMPLETENESS_TOLERANCE: f64 = 1e-7;
/// Contributions at or above `-NONNEGATIVITY_TOLERANCE` count as non-negative
/// and are clamped to zero for presentation.
pub const NONNEGATIVITY_TOLERANCE: f64 = 1e-9;
/// Largest accepted contribution of a non-singleton predictor for copy targets.
pub const SINGLETON_TOLERANCE: f64 = 1e-6;

/// Projection outcome for one lattice node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeEvaluation {
    pub node: SimplicialComplex,
    /// `D(p_node ‖ p_bottom)`.
    pub divergence: f64,
    pub sweeps: usize,
    pub final_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionResult {
    pub input_names: Vec<String>,
    pub target_name: String,
    pub base: Base,
    /// `I_A` per non-empty predictor, with float noise above
    /// `-NONNEGATIVITY_TOLERANCE` clamped to zero.
    pub contributions: BTreeMap<Face, f64>,
    /// Unclamped values.
    pub raw_contributions: BTreeMap<Face, f64>,
    /// `I(X1..Xn; Y)` computed directly from the true distribution.
    pub total_mi: f64,
    /// `total_mi − Σ raw_contributions`.
    pub residual: f64,
    /// One entry per lattice node, in canonical node order.
    pub nodes: Vec<NodeEvaluation>,
}

impl DecompositionResult {
    pub fn num_inputs(&self) -> usize {
        self.input_names.len()
    }

    pub fn contribution(&self, predictor: Face) -> Option<f64> {
        self.contributions.get(&predictor).copied()
    }

    /// `{X1,X2}` style label.
    pub fn label(&self, predictor: Face) -> String {
        predictor.display(&self.input_names)
    }

    pub fn node_divergence(&self, node: SimplicialComplex) -> Option<f64> {
        self.nodes.iter().find(|e| e.node == node).map(|e| e.divergence)
    }
}

/// Checks the system layout expected by the lattice: `n` inputs, target last.
fn check_system(p: &JointDistribution, n: usize) -> Result<()> {
    if p.target_index() != Some(n) || p.num_variables() != n + 1 {
        return Err(Error::InvalidSystem(format!(
            "expected {n} inputs followed by the target"
        )));
    }
    Ok(())
}

/// Projects every node and measures its divergence from the bottom split.
pub fn evaluate_nodes(cache: &SplitCache, lattice: &InputLattice, parallel: bool) -> Result<Vec<NodeEvaluation>> {
    let p = cache.distribution();
    let n = lattice.num_inputs();
    check_system(p, n)?;
    let constraints: Vec<_> = (0..lattice.nodes().len()).map(|i| lattice.sigma(i)).collect();
    cache.prefill(&constraints, parallel)?;
    let bottom = cache.get(&constraints[0])?;
    let base = cache.options().base;
    lattice
        .nodes()
        .iter()
        .zip(&constraints)
        .map(|(&node, constraint)| {
            let split = cache.get(constraint)?;
            let divergence = split.distribution.kl_divergence(&bottom.distribution, base)?;
            Ok(NodeEvaluation {
                node,
                divergence,
                sweeps: split.sweeps_used,
                final_gap: split.final_gap,
            })
        })
        .collect()
}

/// Decomposes `I(X1..Xn; Y)` of `p` into information contributions.
///
/// The target is moved behind the inputs first; predictor indices refer to
/// the inputs in their original relative order.
pub fn information_contribution(p: &JointDistribution, opts: &IpfOptions) -> Result<DecompositionResult> {
    let system = p.canonical_system()?;
    let lattice = InputLattice::enumerate(system.num_inputs())?;
    let cache = SplitCache::new(system, *opts)?;
    information_contribution_with_cache(&cache, &lattice, false)
}

/// As [`information_contribution`], reusing projections held in `cache`.
/// The cached distribution must list its inputs first and the target last.
pub fn information_contribution_with_cache(
    cache: &SplitCache,
    lattice: &InputLattice,
    parallel: bool,
) -> Result<DecompositionResult> {
    let nodes = evaluate_nodes(cache, lattice, parallel)?;
    let p = cache.distribution();
    let n = lattice.num_inputs();
    let base = cache.options().base;

    // Per-edge gains weighted by μ, summed per face in canonical edge order.
    let mut raw: BTreeMap<Face, f64> = lattice.predictors().into_iter().map(|f| (f, 0.0)).collect();
    for edge in lattice.edges() {
        let gain = nodes[edge.upper].divergence - nodes[edge.lower].divergence;
        let weight = lattice.edge_weight(edge).to_f64();
        *raw.get_mut(&edge.face).expect("every face is a predictor") += weight * gain;
    }
    let contributions = raw
        .iter()
        .map(|(&f, &v)| (f, clamp(v)))
        .collect();
    let total_mi = p.mutual_information(VarSet::full(n), VarSet::singleton(n), base)?;
    let residual = total_mi - raw.values().sum::<f64>();
    let names = p.names();
    Ok(DecompositionResult {
        input_names: names[..n].iter().map(|s| s.to_string()).collect(),
        target_name: names[n].to_string(),
        base,
        contributions,
        raw_contributions: raw,
        total_mi,
        residual,
        nodes,
    })
}

fn clamp(v: f64) -> f64 {
    if (-NONNEGATIVITY_TOLERANCE..0.0).contains(&v) {
        0.0
    } else {
        v
    }
}

/// KL gains along one chain of the input lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainDecomposition {
    pub chain: Vec<SimplicialComplex>,
    /// `terms[i] = D(p_chain[i+1] ‖ p_chain[i])`.
    pub terms: Vec<f64>,
}

impl ChainDecomposition {
    pub fn total(&self) -> f64 {
        self.terms.iter().sum()
    }
}

/// Splits the divergence between the ends of a strictly increasing chain
/// into per-step gains. Steps may skip lattice levels.
pub fn chain_decomposition(
    p: &JointDistribution,
    chain: &[SimplicialComplex],
    opts: &IpfOptions,
) -> Result<ChainDecomposition> {
    let system = p.canonical_system()?;
    let cache = SplitCache::new(system, *opts)?;
    chain_decomposition_with_cache(&cache, chain)
}

pub fn chain_decomposition_with_cache(cache: &SplitCache, chain: &[SimplicialComplex]) -> Result<ChainDecomposition> {
    let p = cache.distribution();
    let n = p.num_inputs();
    check_system(p, n)?;
    if chain.is_empty() {
        return Err(Error::NotAChain("empty chain".into()));
    }
    let names = p.names();
    let inputs = &names[..n];
    for &s in chain {
        let valid = s.contains(Face::EMPTY) && s.is_downward_closed() && s.is_subset(SimplicialComplex::top(n));
        if !valid {
            return Err(Error::NotAChain(format!("{:#x} is not a complex over {n} inputs", s.0)));
        }
    }
    for pair in chain.windows(2) {
        if !(pair[0].is_subset(pair[1]) && pair[0] != pair[1]) {
            return Err(Error::NotAChain(format!(
                "{} is not strictly below {}",
                pair[0].display(inputs),
                pair[1].display(inputs)
            )));
        }
    }
    let base = cache.options().base;
    let bottom = cache.get(&crate::lattice::sigma(SimplicialComplex::bottom(), n))?;
    let divergences = chain
        .iter()
        .map(|&s| {
            let split = cache.get(&crate::lattice::sigma(s, n))?;
            split.distribution.kl_divergence(&bottom.distribution, base)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ChainDecomposition {
        chain: chain.to_vec(),
        terms: divergences.windows(2).map(|w| w[1] - w[0]).collect(),
    })
}

/// Outcome of one property check with its measured slack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Check {
    pub passed: bool,
    /// The measured quantity: an absolute deviation or an extreme value.
    pub measured: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerificationReport {
    /// `|residual|` against [`COMPLETENESS_TOLERANCE`].
    pub completeness: Check,
    /// Smallest raw contribution against `-NONNEGATIVITY_TOLERANCE`.
    pub nonnegativity: Check,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.completeness.passed && self.nonnegativity.passed
    }
}

pub fn verify_result(r: &DecompositionResult) -> VerificationReport {
    let min = r.raw_contributions.values().copied().fold(f64::INFINITY, f64::min);
    VerificationReport {
        completeness: Check {
            passed: r.residual.abs() <= COMPLETENESS_TOLERANCE,
            measured: r.residual.abs(),
            tolerance: COMPLETENESS_TOLERANCE,
        },
        nonnegativity: Check {
            passed: min >= -NONNEGATIVITY_TOLERANCE,
            measured: min,
            tolerance: NONNEGATIVITY_TOLERANCE,
        },
    }
}

/// For systems whose target copies the inputs: the largest contribution of
/// any predictor with two or more inputs.
pub fn verify_singleton(r: &DecompositionResult) -> Check {
    let max = r
        .raw_contributions
        .iter()
        .filter(|(f, _)| f.len() > 1)
        .map(|(_, &v)| v)
        .fold(0.0, f64::max);
    Check {
        passed: max <= SINGLETON_TOLERANCE,
        measured: max,
        tolerance: SINGLETON_TOLERANCE,
    }
}
