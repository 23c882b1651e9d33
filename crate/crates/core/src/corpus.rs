//! Built-in example systems with two and three inputs.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::distribution::{JointDistribution, VariableSpec};
use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Example {
    Rdn,
    Xor,
    TwoBitCopy,
    And,
    SynRdn,
    Parity,
    XorMultiCoal,
    Rboj,
    ThreeWayAnd,
}

impl Example {
    pub const ALL: [Example; 9] = [
        Example::Rdn,
        Example::Xor,
        Example::TwoBitCopy,
        Example::And,
        Example::SynRdn,
        Example::Parity,
        Example::XorMultiCoal,
        Example::Rboj,
        Example::ThreeWayAnd,
    ];

    /// Examples in stable order, optionally restricted to an input count.
    pub fn list(arity: Option<usize>) -> Vec<Example> {
        Self::ALL
            .into_iter()
            .filter(|e| arity.is_none_or(|n| e.arity() == n))
            .collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            Example::Rdn => "rdn",
            Example::Xor => "xor",
            Example::TwoBitCopy => "2bitcopy",
            Example::And => "and",
            Example::SynRdn => "synrdn",
            Example::Parity => "parity",
            Example::XorMultiCoal => "xormulticoal",
            Example::Rboj => "rboj",
            Example::ThreeWayAnd => "threewayand",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Example::Rdn => "Y = X1 = X2, one shared bit",
            Example::Xor => "Y = X1 xor X2 with uniform inputs",
            Example::TwoBitCopy => "Y = (X1, X2) with independent uniform bits",
            Example::And => "Y = X1 and X2 with uniform inputs",
            Example::SynRdn => "independent product of Rdn and Xor",
            Example::Parity => "Y = X1 xor X2 xor X3 with uniform inputs",
            Example::XorMultiCoal => "Y recoverable from any pair of inputs but from no single input",
            Example::Rboj => "X3 = X1 xor X2, Y = (X1, X2)",
            Example::ThreeWayAnd => "Y = X1 and X2 and X3 with uniform inputs",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Example::Rdn | Example::Xor | Example::TwoBitCopy | Example::And | Example::SynRdn => 2,
            _ => 3,
        }
    }

    /// Support rows as `(state, weight)`; every row is equally likely.
    fn rows(self) -> Vec<Vec<usize>> {
        let bits2 = || (0..4usize).map(|i| (i >> 1, i & 1));
        let bits3 = || (0..8usize).map(|i| (i >> 2, (i >> 1) & 1, i & 1));
        match self {
            Example::Rdn => vec![vec![0, 0, 0], vec![1, 1, 1]],
            Example::Xor => bits2().map(|(a, b)| vec![a, b, a ^ b]).collect(),
            Example::TwoBitCopy => bits2().map(|(a, b)| vec![a, b, 2 * a + b]).collect(),
            Example::And => bits2().map(|(a, b)| vec![a, b, a & b]).collect(),
            Example::SynRdn => vec![
                vec![0, 0, 0],
                vec![0, 1, 1],
                vec![1, 0, 1],
                vec![1, 1, 0],
                vec![2, 2, 2],
                vec![2, 3, 3],
                vec![3, 2, 3],
                vec![3, 3, 2],
            ],
            Example::Parity => bits3().map(|(a, b, c)| vec![a, b, c, a ^ b ^ c]).collect(),
            Example::XorMultiCoal => vec![
                vec![4, 0, 4, 0],
                vec![0, 2, 2, 0],
                vec![1, 1, 0, 0],
                vec![5, 3, 6, 0],
                vec![5, 1, 4, 1],
                vec![1, 3, 2, 1],
                vec![0, 0, 0, 1],
                vec![4, 2, 6, 1],
            ],
            Example::Rboj => vec![
                vec![0, 0, 0, 0],
                vec![0, 1, 1, 1],
                vec![1, 0, 1, 2],
                vec![1, 1, 0, 3],
            ],
            Example::ThreeWayAnd => bits3().map(|(a, b, c)| vec![a, b, c, a & b & c]).collect(),
        }
    }

    /// The joint distribution, with inputs `X1..Xn` and target `Y` last.
    /// Alphabet sizes are the smallest that hold every listed state.
    pub fn distribution(self) -> JointDistribution {
        let rows = self.rows();
        let m = rows[0].len();
        let cards: Vec<usize> = (0..m)
            .map(|k| rows.iter().map(|r| r[k]).max().unwrap_or(0) + 1)
            .collect();
        let mut variables: Vec<VariableSpec> = (0..m - 1)
            .map(|k| VariableSpec::input(format!("X{}", k + 1), cards[k]))
            .collect();
        variables.push(VariableSpec::target("Y", cards[m - 1]));
        JointDistribution::from_states(variables, rows.iter().map(|r| (r.as_slice(), 1.0)))
            .expect("built-in example tables are valid")
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Example {
    type Err = Error;

    /// Case-insensitive; `-`, `_` and spaces are ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .flat_map(char::to_lowercase)
            .collect();
        let key = match key.as_str() {
            "twobitcopy" | "copy" => "2bitcopy",
            "3wayand" | "and3" => "threewayand",
            other => other,
        };
        Self::ALL
            .into_iter()
            .find(|e| e.name() == key)
            .ok_or_else(|| Error::InvalidOptions(format!("unknown example `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_examples_split_by_arity() {
        assert_eq!(Example::list(None).len(), 9);
        assert_eq!(Example::list(Some(2)).len(), 5);
        assert_eq!(Example::list(Some(3)).len(), 4);
        assert!(Example::list(Some(4)).is_empty());
    }

    #[test]
    fn names_round_trip() {
        for e in Example::ALL {
            assert_eq!(e.name().parse::<Example>().unwrap(), e);
        }
        assert_eq!("2-bit-copy".parse::<Example>().unwrap(), Example::TwoBitCopy);
        assert_eq!("Three_Way_And".parse::<Example>().unwrap(), Example::ThreeWayAnd);
        assert_eq!("RBOJ".parse::<Example>().unwrap(), Example::Rboj);
        assert!("nope".parse::<Example>().is_err());
    }

    #[test]
    fn tables_have_expected_shapes() {
        let shape = |e: Example| e.distribution().cardinalities();
        assert_eq!(shape(Example::Rdn), vec![2, 2, 2]);
        assert_eq!(shape(Example::TwoBitCopy), vec![2, 2, 4]);
        assert_eq!(shape(Example::SynRdn), vec![4, 4, 4]);
        assert_eq!(shape(Example::XorMultiCoal), vec![6, 4, 7, 2]);
        assert_eq!(shape(Example::Rboj), vec![2, 2, 2, 4]);
        assert_eq!(shape(Example::ThreeWayAnd), vec![2, 2, 2, 2]);
        for e in Example::ALL {
            let d = e.distribution();
            assert_eq!(d.num_inputs(), e.arity());
            assert_eq!(d.target_index(), Some(e.arity()));
            let support: Vec<f64> = d.support().map(|(_, p)| p).collect();
            assert_eq!(support.len(), e.rows().len());
            assert!(support.iter().all(|&p| p == support[0]));
        }
    }

    #[test]
    fn and_marginal_of_target() {
        let d = Example::And.distribution();
        let y = d.marginal(crate::distribution::VarSet::singleton(2)).unwrap();
        assert_eq!(y.table(), &[0.75, 0.25]);
    }
}
