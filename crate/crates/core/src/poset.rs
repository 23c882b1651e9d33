//! Counting linear extensions (feasible rankings) of face posets.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::lattice::{Face, SimplicialComplex};

/// A precedence relation on the faces of `n` inputs: `preds[f]` is the set
/// of faces that must come before face `f`, as a bitset over face masks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacePoset {
    preds: Vec<u64>,
}

impl FacePoset {
    /// Inclusion order on all faces of `n` inputs (including the empty face).
    pub fn inclusion(n: usize) -> Self {
        let faces = 1usize << n;
        let preds = (0..faces as u32)
            .map(|f| {
                (0..faces as u32)
                    .filter(|&g| g != f && g & !f == 0)
                    .fold(0u64, |acc, g| acc | 1 << g)
            })
            .collect();
        Self { preds }
    }

    /// Adds the constraints `b < after` for every `b` in `before` (other than
    /// `after` itself) and closes the relation transitively.
    pub fn with_precedence(&self, before: SimplicialComplex, after: Face) -> Self {
        let mut preds = self.preds.clone();
        preds[after.0 as usize] |= before.without(after).0;
        loop {
            let mut changed = false;
            for f in 0..preds.len() {
                let mut closed = preds[f];
                for g in (0..preds.len()).filter(|&g| preds[f] >> g & 1 == 1) {
                    closed |= preds[g];
                }
                if closed != preds[f] {
                    preds[f] = closed;
                    changed = true;
                }
            }
            if !changed {
                return Self { preds };
            }
        }
    }

    /// A counter that memoizes over sub-posets of this relation.
    pub fn counter(&self) -> ExtensionCounter<'_> {
        ExtensionCounter {
            poset: self,
            memo: HashMap::new(),
        }
    }
}

/// Memoized `|R(P)|` for subsets `P` of a [`FacePoset`], with the order
/// restricted to `P`.
#[derive(Debug)]
pub struct ExtensionCounter<'a> {
    poset: &'a FacePoset,
    memo: HashMap<u64, BigUint>,
}

impl ExtensionCounter<'_> {
    /// `|R(∅)| = 1`; otherwise the sum over minimal elements `m` of `|R(P∖m)|`.
    /// Cyclic constraints give zero.
    pub fn count(&mut self, players: SimplicialComplex) -> BigUint {
        let set = players.0;
        if set == 0 {
            return BigUint::one();
        }
        if let Some(hit) = self.memo.get(&set) {
            return hit.clone();
        }
        let mut total = BigUint::zero();
        let mut rest = set;
        while rest != 0 {
            let f = rest.trailing_zeros();
            rest &= rest - 1;
            if self.poset.preds[f as usize] & set == 0 {
                total += self.count(SimplicialComplex(set & !(1 << f)));
            }
        }
        self.memo.insert(set, total.clone());
        total
    }
}

/// Number of linear extensions of the inclusion order on `players`.
pub fn count_linear_extensions(players: &[Face]) -> BigUint {
    let n = players
        .iter()
        .map(|f| 32 - f.0.leading_zeros() as usize)
        .max()
        .unwrap_or(0);
    let poset = FacePoset::inclusion(n);
    let set = players
        .iter()
        .fold(SimplicialComplex::EMPTY_COALITION, |acc, &f| acc.with(f));
    poset.counter().count(set)
}
