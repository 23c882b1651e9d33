//! Shapley values under precedence constraints over the game whose players
//! are faces, whose coalitions are lattice nodes, and whose value is the KL
//! gain `v(S) = D(p_S ‖ p_bottom)`.
//!
//! Used to cross-check the chain-sum contributions: both consume the same
//! cached projections, so any disagreement points at the combinatorics.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::decomposition::evaluate_nodes;
use crate::distribution::JointDistribution;
use crate::error::{Error, Result};
use crate::lattice::{sigma, Face, InputLattice, SimplicialComplex};
use crate::poset::FacePoset;
use crate::projection::{IpfOptions, SplitCache};

/// Scalar type of game values: `f64` for information games, exact
/// rationals for combinatorial checks.
pub trait Payoff: Clone + Zero + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> {
    fn from_ratio(numerator: &BigUint, denominator: &BigUint) -> Self;
    fn one() -> Self;
}

impl Payoff for f64 {
    fn from_ratio(numerator: &BigUint, denominator: &BigUint) -> Self {
        ratio(numerator, denominator).to_f64().unwrap_or(f64::NAN)
    }

    fn one() -> Self {
        1.0
    }
}

impl Payoff for BigRational {
    fn from_ratio(numerator: &BigUint, denominator: &BigUint) -> Self {
        ratio(numerator, denominator)
    }

    fn one() -> Self {
        num_traits::One::one()
    }
}

fn ratio(numerator: &BigUint, denominator: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(numerator.clone()), BigInt::from(denominator.clone()))
}

/// Coalition values over the lattice nodes plus the empty coalition, whose
/// value is always zero.
#[derive(Debug, Clone, PartialEq)]
pub struct GameValueTable<V = f64> {
    n: usize,
    values: BTreeMap<SimplicialComplex, V>,
}

impl<V: Payoff> GameValueTable<V> {
    /// Evaluates `f` on every lattice node.
    pub fn from_fn(lattice: &InputLattice, mut f: impl FnMut(SimplicialComplex) -> V) -> Self {
        let mut values: BTreeMap<SimplicialComplex, V> = lattice.nodes().iter().map(|&s| (s, f(s))).collect();
        values.insert(SimplicialComplex::EMPTY_COALITION, V::zero());
        Self {
            n: lattice.num_inputs(),
            values,
        }
    }

    /// A table holding only the empty coalition; fill it with [`Self::set`].
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            values: BTreeMap::from([(SimplicialComplex::EMPTY_COALITION, V::zero())]),
        }
    }

    pub fn num_inputs(&self) -> usize {
        self.n
    }

    /// Sets `v(s)`. The empty coalition stays at zero.
    pub fn set(&mut self, s: SimplicialComplex, value: V) -> Result<()> {
        if s.is_empty() {
            return Err(Error::InvalidOptions("the empty coalition has value 0".into()));
        }
        self.values.insert(s, value);
        Ok(())
    }

    pub fn get(&self, s: SimplicialComplex) -> Result<&V> {
        self.values
            .get(&s)
            .ok_or_else(|| Error::MissingCoalitionValue(s.display(&default_names(self.n))))
    }

    pub fn iter(&self) -> impl Iterator<Item = (SimplicialComplex, &V)> {
        self.values.iter().map(|(&s, v)| (s, v))
    }

    /// `scale · self + other`, over the coalitions both tables define.
    pub fn scale_add(&self, scale: V, other: &Self) -> Result<Self> {
        let values = self
            .values
            .iter()
            .map(|(&s, v)| Ok((s, scale.clone() * v.clone() + other.get(s)?.clone())))
            .collect::<Result<_>>()?;
        Ok(Self { n: self.n, values })
    }
}

impl GameValueTable<f64> {
    /// `v(S) = D(p_σ(S) ‖ p_bottom)` for every node, using cached projections.
    pub fn from_cache(cache: &SplitCache, lattice: &InputLattice, parallel: bool) -> Result<Self> {
        let nodes = evaluate_nodes(cache, lattice, parallel)?;
        let mut table = Self::empty(lattice.num_inputs());
        for e in nodes {
            table.set(e.node, e.divergence)?;
        }
        Ok(table)
    }

    /// Largest decrease of `v` along any Hasse edge (zero for monotone games).
    pub fn monotonicity_violation(&self, lattice: &InputLattice) -> Result<f64> {
        let nodes = lattice.nodes();
        lattice.edges().iter().try_fold(0.0f64, |worst, e| {
            let drop = self.get(nodes[e.lower])? - self.get(nodes[e.upper])?;
            Ok(worst.max(drop))
        })
    }
}

fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("X{i}")).collect()
}

/// `D(p_σ(s) ‖ p_bottom)`; zero for the empty coalition and for `{∅}`.
pub fn coalition_value(p: &JointDistribution, s: SimplicialComplex, opts: &IpfOptions) -> Result<f64> {
    if s.is_empty() {
        return Ok(0.0);
    }
    let system = p.canonical_system()?;
    let n = system.num_inputs();
    if !(s.contains(Face::EMPTY) && s.is_downward_closed() && s.is_subset(SimplicialComplex::top(n))) {
        return Err(Error::InvalidOptions(format!("{:#x} is not a coalition over {n} inputs", s.0)));
    }
    let cache = SplitCache::new(system, *opts)?;
    let split = cache.get(&sigma(s, n))?;
    let bottom = cache.get(&sigma(SimplicialComplex::bottom(), n))?;
    split.distribution.kl_divergence(&bottom.distribution, opts.base)
}

fn check_face(face: Face, n: usize) -> Result<()> {
    if face.is_empty() {
        return Err(Error::EmptyFace);
    }
    if !face.is_subset(Face::full(n)) {
        return Err(Error::InvalidOptions(format!("face {:#b} is outside {n} inputs", face.0)));
    }
    Ok(())
}

/// `Φ_C(v) = Σ_{T: C maximal in T} |R(T∖C)|·|R(N∖T)| / |R(N)| · (v(T) − v(T∖C))`,
/// where `N` is the set of all faces and `R(·)` counts feasible rankings.
pub fn faigle_kern_value<V: Payoff>(game: &GameValueTable<V>, lattice: &InputLattice, c: Face) -> Result<V> {
    Ok(faigle_kern_values(game, lattice, &[c])?.remove(&c).expect("requested face"))
}

/// [`faigle_kern_value`] for several players, sharing ranking counts.
pub fn faigle_kern_values<V: Payoff>(
    game: &GameValueTable<V>,
    lattice: &InputLattice,
    players: &[Face],
) -> Result<BTreeMap<Face, V>> {
    let n = lattice.num_inputs();
    if game.num_inputs() != n {
        return Err(Error::InputCountMismatch {
            left: game.num_inputs(),
            right: n,
        });
    }
    let poset = FacePoset::inclusion(n);
    let mut counter = poset.counter();
    let everyone = SimplicialComplex::top(n);
    let total = counter.count(everyone);
    let mut out = BTreeMap::new();
    for &c in players {
        check_face(c, n)?;
        let mut phi = V::zero();
        for &t in lattice.nodes().iter().filter(|t| t.is_maximal(c)) {
            let rest = t.without(c);
            let weight = counter.count(rest) * counter.count(SimplicialComplex(everyone.0 & !t.0));
            let gain = game.get(t)?.clone() - game.get(rest)?.clone();
            phi = phi + V::from_ratio(&weight, &total) * gain;
        }
        out.insert(c, phi);
    }
    Ok(out)
}

/// Shapley values of every non-empty face for the information game of the
/// cached distribution.
pub fn oracle_contributions(cache: &SplitCache, lattice: &InputLattice, parallel: bool) -> Result<BTreeMap<Face, f64>> {
    let game = GameValueTable::from_cache(cache, lattice, parallel)?;
    faigle_kern_values(&game, lattice, &lattice.predictors())
}

/// Share of feasible rankings in which `player` comes after every other
/// member of `coalition`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierarchicalStrength {
    pub coalition: SimplicialComplex,
    pub player: Face,
    /// Exact, in `[0, 1]`; zero when `player` is not maximal in `coalition`.
    pub value: BigRational,
}

pub fn hierarchical_strength(lattice: &InputLattice, s: SimplicialComplex, c: Face) -> Result<HierarchicalStrength> {
    let n = lattice.num_inputs();
    let everyone = SimplicialComplex::top(n);
    if !s.contains(c) || !s.is_subset(everyone) {
        return Err(Error::NotInCoalition(format!(
            "{} in {}",
            c.display(&default_names(n)),
            s.display(&default_names(n))
        )));
    }
    let poset = FacePoset::inclusion(n);
    let total = poset.counter().count(everyone);
    let constrained = poset.with_precedence(s, c);
    let favourable = constrained.counter().count(everyone);
    Ok(HierarchicalStrength {
        coalition: s,
        player: c,
        value: ratio(&favourable, &total),
    })
}

/// `ζ_S(T) = 1` if `S ⊆ T`, else `0`.
pub fn inclusion_game<V: Payoff>(lattice: &InputLattice, s: SimplicialComplex) -> GameValueTable<V> {
    GameValueTable::from_fn(lattice, |t| if s.is_subset(t) { V::one() } else { V::zero() })
}
