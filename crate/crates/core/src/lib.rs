//! Decomposes the mutual information between a set of inputs and a target
//! into non-negative contributions, one per non-empty set of inputs.
//!
//! Each contribution averages the KL gain of adding that predictor over all
//! maximal chains of the lattice of simplicial complexes on the inputs.
//! Nodes of the lattice are evaluated through maximum-entropy split
//! distributions. An independent Shapley-value computation over the same
//! game serves as a cross-check.
//!
//! ```
//! use infocontrib::{corpus::Example, decomposition::information_contribution, IpfOptions};
//!
//! let result = information_contribution(&Example::Xor.distribution(), &IpfOptions::default()).unwrap();
//! assert!((result.total_mi - 1.0).abs() < 1e-9);
//! ```

pub mod corpus;
pub mod decomposition;
pub mod distribution;
pub mod error;
pub mod lattice;
pub mod notation;
pub mod poset;
pub mod projection;
pub mod shapley;

pub use distribution::{Base, JointDistribution, VarSet, VariableSpec};
pub use error::{Error, Result};
pub use lattice::{ConstraintNode, Face, InputLattice, SimplicialComplex};
pub use projection::IpfOptions;
