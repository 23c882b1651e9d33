//! The input lattice: simplicial complexes over the input variables, ordered
//! by inclusion, with Hasse edges and exact maximal-chain counts.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::distribution::VarSet;
use crate::error::{Error, Result};

/// Complexes are stored as 64-bit face bitsets.
pub const MAX_SUPPORTED_INPUTS: usize = 6;

/// Default arity cap; the lattice over 5 inputs has 7580 nodes, over 6 it
/// has 7828353.
pub const DEFAULT_MAX_INPUTS: usize = 5;

/// A set of input indices (a predictor). May be empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Face(pub u32);

impl Face {
    pub const EMPTY: Face = Face(0);

    pub fn singleton(i: usize) -> Self {
        Face(1 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        Face(indices.into_iter().fold(0, |m, i| m | (1 << i)))
    }

    pub fn full(n: usize) -> Self {
        Face((1 << n) - 1)
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    #[inline]
    pub fn is_subset(self, other: Face) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.contains(i))
    }

    /// Faces obtained by removing one element.
    pub fn codim_one(self) -> impl Iterator<Item = Face> {
        self.indices().map(move |i| Face(self.0 & !(1 << i)))
    }

    /// Renders as `{X1,X2}` using the given input names.
    pub fn display<S: AsRef<str>>(self, names: &[S]) -> String {
        let inner: Vec<&str> = self.indices().map(|i| names[i].as_ref()).collect();
        format!("{{{}}}", inner.join(","))
    }
}

/// Ordered by size, then lexicographically by index list: `{0} < {1} < {0,1} < {0,2}`.
impl Ord for Face {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.indices().cmp(other.indices()))
    }
}

impl PartialOrd for Face {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for Face {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.indices())
    }
}

/// A downward-closed family of faces, as a membership bitset over face masks.
/// The all-zero bitset is the empty coalition, which is not a lattice node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SimplicialComplex(pub u64);

impl SimplicialComplex {
    pub const EMPTY_COALITION: SimplicialComplex = SimplicialComplex(0);

    /// `{∅}`, the bottom of the input lattice.
    pub fn bottom() -> Self {
        SimplicialComplex(1)
    }

    /// The full power set of `n` inputs.
    pub fn top(n: usize) -> Self {
        let faces = 1u32 << n;
        if faces == 64 {
            SimplicialComplex(u64::MAX)
        } else {
            SimplicialComplex((1u64 << faces) - 1)
        }
    }

    /// Downward closure of the given faces, always including `∅`.
    pub fn from_facets<I: IntoIterator<Item = Face>>(facets: I) -> Self {
        let mut bits = 1u64;
        for facet in facets {
            // Enumerate all submasks of the facet.
            let mut sub = facet.0;
            loop {
                bits |= 1 << sub;
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & facet.0;
            }
        }
        SimplicialComplex(bits)
    }

    #[inline]
    pub fn contains(self, face: Face) -> bool {
        self.0 >> face.0 & 1 == 1
    }

    #[inline]
    pub fn with(self, face: Face) -> Self {
        SimplicialComplex(self.0 | 1 << face.0)
    }

    #[inline]
    pub fn without(self, face: Face) -> Self {
        SimplicialComplex(self.0 & !(1 << face.0))
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Inclusion of face families.
    #[inline]
    pub fn is_subset(self, other: SimplicialComplex) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn faces(self) -> impl Iterator<Item = Face> {
        (0..64u32).filter(move |&f| self.0 >> f & 1 == 1).map(Face)
    }

    pub fn is_downward_closed(self) -> bool {
        self.faces().all(|f| f.codim_one().all(|g| self.contains(g)))
    }

    /// The maximal faces, in canonical face order.
    pub fn facets(self) -> Vec<Face> {
        let mut out: Vec<Face> = self
            .faces()
            .filter(|&f| !self.faces().any(|g| g != f && f.is_subset(g)))
            .collect();
        out.sort();
        out
    }

    /// True if `face` is a member with no strict superset in the complex.
    pub fn is_maximal(self, face: Face) -> bool {
        self.contains(face) && !self.faces().any(|g| g != face && face.is_subset(g))
    }

    /// The refinement order on face families: every face of `self` lies
    /// inside some face of `other`.
    pub fn refines(self, other: SimplicialComplex) -> bool {
        self.faces().all(|a| other.faces().any(|b| a.is_subset(b)))
    }

    /// Facet notation, e.g. `[X1][X2]`; `{∅}` renders as `[]` and the empty
    /// coalition as `{}`.
    pub fn display<S: AsRef<str>>(self, names: &[S]) -> String {
        if self.is_empty() {
            return "{}".into();
        }
        self.facets()
            .into_iter()
            .map(|f| {
                let inner: String = f.indices().map(|i| names[i].as_ref()).collect();
                format!("[{inner}]")
            })
            .collect()
    }
}

/// Canonical node order: by number of faces, then bitset value.
impl Ord for SimplicialComplex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then(self.0.cmp(&other.0))
    }
}

impl PartialOrd for SimplicialComplex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A simplicial complex over all variables, stored as its maximal faces.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConstraintNode {
    facets: Vec<VarSet>,
}

impl ConstraintNode {
    /// Reduces arbitrary faces to the antichain of maximal ones. Empty faces
    /// are dropped.
    pub fn from_faces<I: IntoIterator<Item = VarSet>>(faces: I) -> Self {
        let mut all: Vec<VarSet> = faces.into_iter().filter(|f| !f.is_empty()).collect();
        all.sort_by_key(|f| (f.len(), f.0));
        all.dedup();
        let facets: Vec<VarSet> = all
            .iter()
            .copied()
            .filter(|&f| !all.iter().any(|&g| g != f && f.is_subset(g)))
            .collect();
        Self { facets }
    }

    /// `(Z1…Zm)`.
    pub fn top(m: usize) -> Self {
        Self::from_faces([VarSet::full(m)])
    }

    /// `(Z1)(Z2)…(Zm)`.
    pub fn bottom(m: usize) -> Self {
        Self::from_faces((0..m).map(VarSet::singleton))
    }

    /// Maximal faces in canonical order (size, then mask).
    pub fn facets(&self) -> &[VarSet] {
        &self.facets
    }

    pub fn covers(&self, m: usize) -> bool {
        self.facets
            .iter()
            .fold(VarSet::EMPTY, |acc, &f| acc.union(f))
            == VarSet::full(m)
    }

    /// `self ≤ other` in the constraint lattice.
    pub fn le(&self, other: &ConstraintNode) -> bool {
        self.facets
            .iter()
            .all(|&a| other.facets.iter().any(|&b| a.is_subset(b)))
    }

    /// Facet notation, e.g. `(X1X2)(X1Y)(X2Y)`: larger facets first, then
    /// lexicographic by variable index.
    pub fn display<S: AsRef<str>>(&self, names: &[S]) -> String {
        let mut shown = self.facets.clone();
        shown.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.iter().cmp(b.iter())));
        shown
            .iter()
            .map(|f| {
                let inner: String = f.iter().map(|i| names[i].as_ref()).collect();
                format!("({inner})")
            })
            .collect()
    }
}

/// Embeds a complex over `n` inputs into the constraint lattice over the
/// inputs plus a target at position `n`: the closure of `{V} ∪ {A ∪ {Y} : A ∈ s}`.
pub fn sigma(s: SimplicialComplex, n: usize) -> ConstraintNode {
    let inputs = VarSet::full(n);
    let target = VarSet::singleton(n);
    ConstraintNode::from_faces(
        std::iter::once(inputs).chain(s.faces().map(|a| VarSet(a.0).union(target))),
    )
}

/// Exact weight `μ(S, S′) = n_(S,S′) / |Γ|` of a Hasse edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeWeight(pub BigRational);

impl EdgeWeight {
    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for EdgeWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HasseEdge {
    /// Index of the lower node.
    pub lower: usize,
    /// Index of the upper node.
    pub upper: usize,
    /// The face that `upper` adds to `lower`.
    pub face: Face,
}

#[derive(Debug, Clone)]
pub struct InputLattice {
    n: usize,
    nodes: Vec<SimplicialComplex>,
    index: HashMap<SimplicialComplex, usize>,
    edges: Vec<HasseEdge>,
    chains_from_bottom: Vec<BigUint>,
    chains_to_top: Vec<BigUint>,
}

impl InputLattice {
    /// Enumerates the lattice over `n` inputs with the default arity cap.
    pub fn enumerate(n: usize) -> Result<Self> {
        Self::enumerate_with_cap(n, DEFAULT_MAX_INPUTS)
    }

    /// Breadth-first over complexes: each step adds one face whose proper
    /// subfaces are all present.
    pub fn enumerate_with_cap(n: usize, cap: usize) -> Result<Self> {
        let cap = cap.min(MAX_SUPPORTED_INPUTS);
        if n == 0 {
            return Err(Error::InvalidSystem("the input lattice needs at least one input".into()));
        }
        if n > cap {
            return Err(Error::TooManyInputs { n, cap });
        }
        let faces: Vec<Face> = (1..1u32 << n).map(Face).collect();
        let bottom = SimplicialComplex::bottom();

        let mut seen: HashMap<SimplicialComplex, ()> = HashMap::new();
        seen.insert(bottom, ());
        let mut raw_edges = Vec::new();
        let mut frontier = vec![bottom];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &s in &frontier {
                for &face in &faces {
                    if !s.contains(face) && face.codim_one().all(|g| s.contains(g)) {
                        let t = s.with(face);
                        raw_edges.push((s, t, face));
                        if seen.insert(t, ()).is_none() {
                            next.push(t);
                        }
                    }
                }
            }
            frontier = next;
        }

        let mut nodes: Vec<SimplicialComplex> = seen.into_keys().collect();
        nodes.sort();
        let index: HashMap<SimplicialComplex, usize> =
            nodes.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut edges: Vec<HasseEdge> = raw_edges
            .into_iter()
            .map(|(s, t, face)| HasseEdge {
                lower: index[&s],
                upper: index[&t],
                face,
            })
            .collect();
        edges.sort_by_key(|e| (e.lower, e.upper));

        // Nodes are sorted by face count and every edge adds one face, so a
        // single pass in node order (resp. reverse) sees all predecessors.
        let count = nodes.len();
        let mut from_bottom = vec![BigUint::zero(); count];
        let mut to_top = vec![BigUint::zero(); count];
        from_bottom[0] = BigUint::one();
        to_top[count - 1] = BigUint::one();
        let mut by_upper = edges.clone();
        by_upper.sort_by_key(|e| e.upper);
        for e in &by_upper {
            let add = from_bottom[e.lower].clone();
            from_bottom[e.upper] += add;
        }
        for e in edges.iter().rev() {
            let add = to_top[e.upper].clone();
            to_top[e.lower] += add;
        }

        Ok(Self {
            n,
            nodes,
            index,
            edges,
            chains_from_bottom: from_bottom,
            chains_to_top: to_top,
        })
    }

    pub fn num_inputs(&self) -> usize {
        self.n
    }

    /// Nodes in canonical order; the bottom `{∅}` is first and the top last.
    pub fn nodes(&self) -> &[SimplicialComplex] {
        &self.nodes
    }

    pub fn node_index(&self, s: SimplicialComplex) -> Option<usize> {
        self.index.get(&s).copied()
    }

    pub fn bottom(&self) -> SimplicialComplex {
        self.nodes[0]
    }

    pub fn top(&self) -> SimplicialComplex {
        self.nodes[self.nodes.len() - 1]
    }

    /// Hasse edges sorted by (lower, upper) node index.
    pub fn edges(&self) -> &[HasseEdge] {
        &self.edges
    }

    pub fn chains_from_bottom(&self, node: usize) -> &BigUint {
        &self.chains_from_bottom[node]
    }

    pub fn chains_to_top(&self, node: usize) -> &BigUint {
        &self.chains_to_top[node]
    }

    /// `|Γ|`, the number of maximal chains.
    pub fn total_chains(&self) -> &BigUint {
        &self.chains_to_top[0]
    }

    /// Number of maximal chains through the edge.
    pub fn edge_chain_count(&self, e: &HasseEdge) -> BigUint {
        &self.chains_from_bottom[e.lower] * &self.chains_to_top[e.upper]
    }

    pub fn edge_weight(&self, e: &HasseEdge) -> EdgeWeight {
        EdgeWeight(BigRational::new(
            BigInt::from(self.edge_chain_count(e)),
            BigInt::from(self.total_chains().clone()),
        ))
    }

    /// The edges on which `face` is added.
    pub fn edges_adding(&self, face: Face) -> Result<Vec<HasseEdge>> {
        if face.is_empty() {
            return Err(Error::EmptyFace);
        }
        if !face.is_subset(Face::full(self.n)) {
            return Err(Error::InvalidOptions(format!(
                "face {:#b} is outside {} inputs",
                face.0, self.n
            )));
        }
        Ok(self.edges.iter().copied().filter(|e| e.face == face).collect())
    }

    /// All non-empty faces in canonical order.
    pub fn predictors(&self) -> Vec<Face> {
        let mut out: Vec<Face> = (1..1u32 << self.n).map(Face).collect();
        out.sort();
        out
    }

    pub fn sigma(&self, node: usize) -> ConstraintNode {
        sigma(self.nodes[node], self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("X{i}")).collect()
    }

    /// Brute-force count of bottom-to-top paths by depth-first search.
    fn count_paths(lat: &InputLattice) -> u64 {
        fn go(lat: &InputLattice, node: usize) -> u64 {
            if node == lat.nodes().len() - 1 {
                return 1;
            }
            lat.edges()
                .iter()
                .filter(|e| e.lower == node)
                .map(|e| go(lat, e.upper))
                .sum()
        }
        go(lat, 0)
    }

    #[test]
    fn two_inputs() {
        let lat = InputLattice::enumerate(2).unwrap();
        let shown: Vec<String> = lat.nodes().iter().map(|s| s.display(&names(2))).collect();
        assert_eq!(shown, vec!["[]", "[X1]", "[X2]", "[X1][X2]", "[X1X2]"]);
        assert_eq!(lat.total_chains(), &BigUint::from(2u32));
        assert_eq!(count_paths(&lat), 2);
    }

    #[test]
    fn one_input() {
        let lat = InputLattice::enumerate(1).unwrap();
        assert_eq!(lat.nodes().len(), 2);
        assert_eq!(lat.total_chains(), &BigUint::one());
        let edges = lat.edges_adding(Face::singleton(0)).unwrap();
        assert_eq!(edges.len(), 1);
        assert_eq!((edges[0].lower, edges[0].upper), (0, 1));
    }

    #[test]
    fn three_inputs_has_48_chains() {
        let lat = InputLattice::enumerate(3).unwrap();
        assert_eq!(lat.nodes().len(), 19);
        assert_eq!(lat.total_chains(), &BigUint::from(48u32));
        assert_eq!(count_paths(&lat), 48);
    }

    #[test]
    fn node_counts_follow_dedekind_numbers() {
        for (n, expected) in [(1, 2), (2, 5), (3, 19), (4, 167)] {
            assert_eq!(InputLattice::enumerate(n).unwrap().nodes().len(), expected);
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert_eq!(
            InputLattice::enumerate(6).unwrap_err(),
            Error::TooManyInputs { n: 6, cap: 5 }
        );
        assert!(InputLattice::enumerate(0).is_err());
        assert!(matches!(
            InputLattice::enumerate_with_cap(3, 2),
            Err(Error::TooManyInputs { .. })
        ));
    }

    #[test]
    fn joint_face_in_two_inputs_has_one_edge() {
        let lat = InputLattice::enumerate(2).unwrap();
        let edges = lat.edges_adding(Face(0b11)).unwrap();
        assert_eq!(edges.len(), 1);
        let e = edges[0];
        assert_eq!(lat.nodes()[e.lower].display(&names(2)), "[X1][X2]");
        assert_eq!(lat.nodes()[e.upper].display(&names(2)), "[X1X2]");
        assert_eq!(lat.edge_weight(&e).0, BigRational::one());
        assert_eq!(lat.edges_adding(Face::EMPTY), Err(Error::EmptyFace));
    }

    #[test]
    fn first_edge_weight_is_half() {
        let lat = InputLattice::enumerate(2).unwrap();
        let e = lat
            .edges()
            .iter()
            .find(|e| e.lower == 0 && e.face == Face::singleton(0))
            .unwrap();
        assert_eq!(
            lat.edge_weight(e).0,
            BigRational::new(BigInt::from(1), BigInt::from(2))
        );
    }

    #[test]
    fn weights_of_each_face_sum_to_one() {
        for n in 1..=4 {
            let lat = InputLattice::enumerate(n).unwrap();
            for face in lat.predictors() {
                let total = lat
                    .edges_adding(face)
                    .unwrap()
                    .iter()
                    .fold(BigRational::zero(), |acc, e| acc + lat.edge_weight(e).0);
                assert_eq!(total, BigRational::one(), "n={n} face={face:?}");
            }
        }
    }

    #[test]
    fn chain_counts_are_conserved() {
        for n in 1..=4 {
            let lat = InputLattice::enumerate(n).unwrap();
            let last = lat.nodes().len() - 1;
            assert_eq!(lat.chains_from_bottom(last), lat.total_chains());
            for node in 1..lat.nodes().len() {
                let sum: BigUint = lat
                    .edges()
                    .iter()
                    .filter(|e| e.upper == node)
                    .map(|e| lat.chains_from_bottom(e.lower).clone())
                    .sum();
                assert_eq!(&sum, lat.chains_from_bottom(node));
            }
            for node in 0..last {
                let sum: BigUint = lat
                    .edges()
                    .iter()
                    .filter(|e| e.lower == node)
                    .map(|e| lat.chains_to_top(e.upper).clone())
                    .sum();
                assert_eq!(&sum, lat.chains_to_top(node));
            }
        }
    }

    #[test]
    fn edges_add_faces_with_all_subfaces_present() {
        let lat = InputLattice::enumerate(4).unwrap();
        for e in lat.edges() {
            let lower = lat.nodes()[e.lower];
            let upper = lat.nodes()[e.upper];
            assert!(!lower.contains(e.face));
            assert_eq!(lower.with(e.face), upper);
            assert!(e.face.codim_one().all(|g| lower.contains(g)));
            assert!(upper.is_downward_closed());
        }
    }

    #[test]
    fn refinement_order_matches_inclusion() {
        for n in 1..=3 {
            let lat = InputLattice::enumerate(n).unwrap();
            for &a in lat.nodes() {
                for &b in lat.nodes() {
                    assert_eq!(a.refines(b), a.is_subset(b), "{a:?} {b:?}");
                }
            }
        }
    }

    #[test]
    fn sigma_examples() {
        let w = ["X1", "X2", "Y"];
        let s = SimplicialComplex::from_facets([Face::singleton(0), Face::singleton(1)]);
        assert_eq!(sigma(s, 2).display(&w), "(X1X2)(X1Y)(X2Y)");
        assert_eq!(sigma(SimplicialComplex::bottom(), 2).display(&w), "(X1X2)(Y)");
        assert_eq!(sigma(SimplicialComplex::top(2), 2).display(&w), "(X1X2Y)");
        let w3 = ["X1", "X2", "X3", "Y"];
        assert_eq!(sigma(SimplicialComplex::bottom(), 3).display(&w3), "(X1X2X3)(Y)");
    }

    #[test]
    fn sigma_is_injective_and_order_preserving() {
        for n in 1..=3 {
            let lat = InputLattice::enumerate(n).unwrap();
            let images: Vec<ConstraintNode> = (0..lat.nodes().len()).map(|i| lat.sigma(i)).collect();
            for (i, a) in images.iter().enumerate() {
                assert!(a.covers(n + 1));
                assert!(ConstraintNode::from_faces([VarSet::full(n), VarSet::singleton(n)]).le(a));
                for (j, b) in images.iter().enumerate() {
                    assert_eq!(i == j, a == b);
                    let s = lat.nodes()[i];
                    let t = lat.nodes()[j];
                    assert_eq!(s.is_subset(t), a.le(b), "n={n} {s:?} {t:?}");
                }
            }
        }
    }

    #[test]
    fn face_order_is_size_then_lexicographic() {
        let mut faces: Vec<Face> = (1..8).map(Face).collect();
        faces.sort();
        let shown: Vec<String> = faces.iter().map(|f| f.display(&names(3))).collect();
        assert_eq!(
            shown,
            vec!["{X1}", "{X2}", "{X3}", "{X1,X2}", "{X1,X3}", "{X2,X3}", "{X1,X2,X3}"]
        );
    }

    #[test]
    fn constraint_node_reduces_to_facets() {
        let node = ConstraintNode::from_faces([VarSet(0b011), VarSet(0b001), VarSet(0b110), VarSet(0)]);
        assert_eq!(node.facets(), &[VarSet(0b011), VarSet(0b110)]);
        assert!(node.covers(3));
        assert!(!node.covers(4));
        assert!(ConstraintNode::bottom(3).le(&node));
        assert!(node.le(&ConstraintNode::top(3)));
        assert!(!ConstraintNode::top(3).le(&node));
    }
}
