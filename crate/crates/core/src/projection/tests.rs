use proptest::prelude::*;

use super::*;
use crate::corpus::Example;
use crate::distribution::VariableSpec;
use crate::lattice::{sigma, SimplicialComplex};

fn opts() -> IpfOptions {
    IpfOptions::default()
}

fn node(faces: &[u32]) -> ConstraintNode {
    ConstraintNode::from_faces(faces.iter().map(|&f| VarSet(f)))
}

fn three_bits(weights: Vec<f64>) -> JointDistribution {
    let vars = vec![
        VariableSpec::input("Z1", 2),
        VariableSpec::input("Z2", 2),
        VariableSpec::input("Z3", 2),
    ];
    JointDistribution::from_weights(vars, weights).unwrap()
}

fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn bottom_node_gives_product_of_inputs_and_target() {
    let p = Example::And.distribution();
    let split = split_distribution(&p, &sigma(SimplicialComplex::bottom(), 2), &opts()).unwrap();
    let x = p.marginal_table(VarSet(0b011));
    let y = p.marginal_table(VarSet(0b100));
    let expected: Vec<f64> = (0..8).map(|z| x[z >> 1] * y[z & 1]).collect();
    assert!(linf(split.distribution.table(), &expected) < 1e-12);
}

#[test]
fn top_node_returns_p() {
    let p = Example::Rboj.distribution();
    let split = split_distribution(&p, &ConstraintNode::top(4), &opts()).unwrap();
    assert!(linf(split.distribution.table(), p.table()) < 1e-15);
    assert!(split.sweeps_used <= 1);
}

#[test]
fn xor_pairwise_split_is_uniform() {
    let p = Example::Xor.distribution();
    let split = split_distribution(&p, &node(&[0b011, 0b101, 0b110]), &opts()).unwrap();
    assert!(split.distribution.table().iter().all(|&v| (v - 0.125).abs() < 1e-12));
    assert!((triplewise_information(&p, &opts()).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn and_pairwise_split_keeps_forced_zeros() {
    // The maximizer equals p itself; it has zeros that no marginal forces.
    let p = Example::And.distribution();
    let split = split_distribution(&p, &node(&[0b011, 0b101, 0b110]), &opts()).unwrap();
    assert!(linf(split.distribution.table(), p.table()) < 1e-12);
    assert!(split.sweeps_used <= 2, "took {} sweeps", split.sweeps_used);
    assert!(triplewise_information(&p, &opts()).unwrap().abs() < 1e-12);
}

#[test]
fn pair_node_gives_mutual_information() {
    let vars = vec![VariableSpec::input("A", 2), VariableSpec::input("B", 3)];
    let p = JointDistribution::from_weights(vars, vec![3.0, 1.0, 2.0, 1.0, 4.0, 1.0]).unwrap();
    let info = constraint_information(&p, &ConstraintNode::bottom(2), &opts()).unwrap();
    let mi = p.mutual_information(VarSet(1), VarSet(2), Base::Two).unwrap();
    assert!((info - mi).abs() < 1e-10);
}

#[test]
fn conditional_independence_node_gives_conditional_mutual_information() {
    let p = three_bits(vec![5.0, 1.0, 2.0, 3.0, 1.0, 4.0, 2.0, 6.0]);
    let info = constraint_information(&p, &node(&[0b101, 0b110]), &opts()).unwrap();
    let h = |s: u32| p.marginal(VarSet(s)).unwrap().entropy(Base::Two);
    let cmi = h(0b101) + h(0b110) - h(0b111) - h(0b100);
    assert!((info - cmi).abs() < 1e-9, "{info} vs {cmi}");
}

#[test]
fn constant_variable_has_no_triplewise_information() {
    let p = three_bits(vec![3.0, 0.0, 1.0, 0.0, 2.0, 0.0, 5.0, 0.0]);
    assert!(triplewise_information(&p, &opts()).unwrap().abs() < 1e-12);
}

#[test]
fn independent_triple_has_no_triplewise_information() {
    let (a, b, c) = ([0.3, 0.7], [0.6, 0.4], [0.1, 0.9]);
    let weights = (0..8).map(|z| a[z >> 2] * b[(z >> 1) & 1] * c[z & 1]).collect();
    assert!(triplewise_information(&three_bits(weights), &opts()).unwrap().abs() < 1e-12);
}

#[test]
fn triplewise_requires_three_variables() {
    let p = Example::Parity.distribution();
    assert_eq!(
        triplewise_information(&p, &opts()).unwrap_err(),
        Error::Arity { expected: 3, actual: 4 }
    );
}

#[test]
fn uncovered_node_is_rejected() {
    let p = Example::Xor.distribution();
    assert!(matches!(
        split_distribution(&p, &node(&[0b011]), &opts()),
        Err(Error::UncoveredNode(_))
    ));
    assert!(matches!(
        split_distribution(&p, &node(&[0b1111]), &opts()),
        Err(Error::UncoveredNode(_))
    ));
}

#[test]
fn non_convergence_reports_the_gap() {
    let p = three_bits(vec![5.0, 1.0, 2.0, 3.0, 1.0, 4.0, 2.0, 6.0]);
    let tight = IpfOptions {
        max_sweeps: 1,
        ..opts()
    };
    match split_distribution(&p, &node(&[0b011, 0b101, 0b110]), &tight) {
        Err(Error::NonConvergence { sweeps, gap, node }) => {
            assert_eq!(sweeps, 1);
            assert!(gap > tight.tolerance);
            assert_eq!(node, "(Z1Z2)(Z1Z3)(Z2Z3)");
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn invalid_options_are_rejected() {
    let p = Example::Xor.distribution();
    for bad in [
        IpfOptions { tolerance: 0.0, ..opts() },
        IpfOptions { tolerance: f64::NAN, ..opts() },
        IpfOptions { max_sweeps: 0, ..opts() },
    ] {
        assert!(matches!(
            split_distribution(&p, &ConstraintNode::top(3), &bad),
            Err(Error::InvalidOptions(_))
        ));
    }
}

#[test]
fn inconsistent_targets_are_detected() {
    // The last constraint set disagrees with itself on the Z2 marginal.
    let set = ConstraintSet::from_targets(
        vec![2, 2],
        &node(&[0b01, 0b10, 0b11]).clone(),
        vec![vec![0.25, 0.25, 0.25, 0.25]],
    )
    .unwrap();
    assert!(fit_constraints(&set, &opts()).is_ok());

    let set = ConstraintSet::from_targets(vec![2, 2], &node(&[0b01, 0b10]), vec![vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
    let (table, _, _) = fit_constraints(&set, &opts()).unwrap();
    assert!(linf(&table, &[0.5, 0.5, 0.0, 0.0]) < 1e-12);

    let pairs = node(&[0b011, 0b110]);
    let set = ConstraintSet::from_targets(
        vec![2, 2, 2],
        &pairs,
        vec![vec![0.5, 0.0, 0.0, 0.5], vec![0.0, 0.5, 0.5, 0.0]],
    )
    .unwrap();
    assert!(fit_constraints(&set, &opts()).is_ok());
    let set = ConstraintSet::from_targets(
        vec![2, 2, 2],
        &pairs,
        vec![vec![0.5, 0.0, 0.0, 0.5], vec![0.3, 0.3, 0.2, 0.2]],
    )
    .unwrap();
    assert!(matches!(
        fit_constraints(&set, &opts()),
        Err(Error::InconsistentConstraints(_))
    ));
}

#[test]
fn cache_projects_each_node_once() {
    let p = Example::XorMultiCoal.distribution();
    let cache = SplitCache::new(p.clone(), opts()).unwrap();
    let lattice = crate::lattice::InputLattice::enumerate(3).unwrap();
    let nodes: Vec<ConstraintNode> = (0..lattice.nodes().len()).map(|i| lattice.sigma(i)).collect();
    cache.prefill(&nodes, true).unwrap();
    assert_eq!(cache.len(), 19);
    let first = cache.get(&nodes[5]).unwrap();
    let again = cache.get(&nodes[5]).unwrap();
    assert!(std::sync::Arc::ptr_eq(&first, &again));
    let direct = split_distribution(&p, &nodes[5], &opts()).unwrap();
    assert_eq!(first.distribution.table(), direct.distribution.table());
}

fn three_var_system() -> impl Strategy<Value = JointDistribution> {
    (prop::collection::vec(1usize..=3, 3)).prop_flat_map(|cards| {
        let len: usize = cards.iter().product();
        prop::collection::vec(prop_oneof![1 => Just(0.0), 4 => 0.01f64..1.0], len).prop_filter_map(
            "all-zero table",
            move |w| {
                let vars = (0..3).map(|i| VariableSpec::input(format!("Z{}", i + 1), cards[i])).collect();
                JointDistribution::from_weights(vars, w).ok()
            },
        )
    })
}

fn all_nodes_over_three() -> Vec<ConstraintNode> {
    let faces: Vec<u32> = (1..8).collect();
    let mut out: Vec<ConstraintNode> = (1u32..1 << 7)
        .map(|pick| node(&faces.iter().copied().filter(|f| pick >> (f - 1) & 1 == 1).collect::<Vec<_>>()))
        .filter(|n| n.covers(3))
        .collect();
    out.sort();
    out.dedup();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn splits_match_marginals_and_maximize_entropy(p in three_var_system()) {
        for n in all_nodes_over_three() {
            let split = split_distribution(&p, &n, &opts()).unwrap();
            prop_assert!(split.final_gap <= opts().tolerance);
            for &f in n.facets() {
                let got = split.distribution.marginal_table(f);
                let want = p.marginal_table(f);
                let l1: f64 = got.iter().zip(&want).map(|(a, b)| (a - b).abs()).sum();
                prop_assert!(l1 <= 1e-9);
            }
            prop_assert!(split.distribution.entropy(Base::Two) >= p.entropy(Base::Two) - 1e-9);
            // Absolute continuity holds, so the divergence is finite.
            prop_assert!(p.kl_divergence(&split.distribution, Base::Two).is_ok());
        }
    }

    #[test]
    fn information_is_antitone(p in three_var_system()) {
        let nodes = all_nodes_over_three();
        let info: Vec<f64> = nodes.iter().map(|n| constraint_information(&p, n, &opts()).unwrap()).collect();
        for (i, a) in nodes.iter().enumerate() {
            prop_assert!(info[i] >= -1e-12);
            for (j, b) in nodes.iter().enumerate() {
                if a.le(b) {
                    prop_assert!(info[i] >= info[j] - 1e-9, "{:?} {:?}", a, b);
                }
            }
        }
    }
}
