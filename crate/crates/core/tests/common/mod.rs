//! Shared helpers for integration tests: seeded random systems and an
//! independent maximum-entropy solver used as a reference.

#![allow(dead_code)]

use infocontrib::{JointDistribution, VarSet, VariableSpec};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random weights with roughly `zero_rate` of the cells set to zero.
pub fn random_table(rng: &mut ChaCha8Rng, len: usize, zero_rate: f64) -> Vec<f64> {
    loop {
        let w: Vec<f64> = (0..len)
            .map(|_| {
                if rng.random_bool(zero_rate) {
                    0.0
                } else {
                    -(1.0 - rng.random::<f64>()).ln()
                }
            })
            .collect();
        if w.iter().any(|&v| v > 0.0) {
            return w;
        }
    }
}

/// `n` inputs `X1..Xn` and a target `Y`, alphabet sizes drawn from `2..=max_card`.
pub fn random_system(rng: &mut ChaCha8Rng, n: usize, max_card: usize, zero_rate: f64) -> JointDistribution {
    let mut vars: Vec<VariableSpec> = (0..n)
        .map(|i| VariableSpec::input(format!("X{}", i + 1), rng.random_range(2..=max_card)))
        .collect();
    vars.push(VariableSpec::target("Y", rng.random_range(2..=max_card)));
    let len = vars.iter().map(|v| v.cardinality).product();
    JointDistribution::from_weights(vars, random_table(rng, len, zero_rate)).unwrap()
}

/// Inputs only, for copy-target systems.
pub fn random_inputs(rng: &mut ChaCha8Rng, n: usize, max_card: usize) -> JointDistribution {
    let vars: Vec<VariableSpec> = (0..n)
        .map(|i| VariableSpec::input(format!("X{}", i + 1), rng.random_range(2..=max_card)))
        .collect();
    let len = vars.iter().map(|v| v.cardinality).product();
    JointDistribution::from_weights(vars, random_table(rng, len, 0.2)).unwrap()
}

/// Decodes a row-major index into a state.
pub fn decode(mut index: usize, cards: &[usize]) -> Vec<usize> {
    let mut state = vec![0; cards.len()];
    for k in (0..cards.len()).rev() {
        state[k] = index % cards[k];
        index /= cards[k];
    }
    state
}

/// Marginal constraints `A q = b` of `p` on the given facets.
fn constraints(p: &JointDistribution, facets: &[VarSet]) -> (DMatrix<f64>, DVector<f64>) {
    let cards = p.cardinalities();
    let len = p.table().len();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs = Vec::new();
    for &f in facets {
        let vars: Vec<usize> = f.iter().collect();
        let sub: Vec<usize> = vars.iter().map(|&i| cards[i]).collect();
        let cells: usize = sub.iter().product();
        for cell in 0..cells {
            let target = decode(cell, &sub);
            let row: Vec<f64> = (0..len)
                .map(|z| {
                    let s = decode(z, &cards);
                    let hit = vars.iter().zip(&target).all(|(&i, &t)| s[i] == t);
                    if hit {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect();
            rhs.push(row.iter().zip(p.table()).map(|(a, q)| a * q).sum());
            rows.push(row);
        }
    }
    let a = DMatrix::from_fn(rows.len(), len, |i, j| rows[i][j]);
    (a, DVector::from_vec(rhs))
}

fn rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    m.clone().svd(false, false).rank(1e-9)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Maximum-entropy distribution with the facet marginals of `p`, by brute
/// force: enumerate the vertices of the constraint polytope to find its
/// support and an interior point, then run damped Newton on the entropy
/// over the affine hull. Meant for at most a few dozen cells.
pub fn brute_force_maxent(p: &JointDistribution, facets: &[VarSet]) -> Vec<f64> {
    let (a, b) = constraints(p, facets);
    let len = a.ncols();
    let r = rank(&a);

    // Basic feasible solutions: r linearly independent columns.
    let mut vertices: Vec<DVector<f64>> = Vec::new();
    for cols in combinations(len, r) {
        let sub = a.select_columns(&cols);
        if rank(&sub) < r {
            continue;
        }
        let x = sub.clone().svd(true, true).solve(&b, 1e-12).unwrap();
        if (&sub * &x - &b).norm() > 1e-10 || x.iter().any(|&v| v < -1e-12) {
            continue;
        }
        let mut full = DVector::zeros(len);
        for (k, &c) in cols.iter().enumerate() {
            full[c] = x[k].max(0.0);
        }
        vertices.push(full);
    }
    assert!(!vertices.is_empty(), "the true distribution is feasible");
    let centre = vertices.iter().fold(DVector::zeros(len), |acc, v| acc + v) / vertices.len() as f64;
    let support: Vec<usize> = (0..len).filter(|&z| centre[z] > 1e-12).collect();

    // Directions that keep every constraint: the null space of A on the support.
    let a_s = a.select_columns(&support);
    let gram = a_s.transpose() * &a_s;
    let eig = gram.symmetric_eigen();
    let null: Vec<DVector<f64>> = (0..support.len())
        .filter(|&k| eig.eigenvalues[k].abs() <= 1e-9)
        .map(|k| eig.eigenvectors.column(k).into_owned())
        .collect();

    let mut q: DVector<f64> = DVector::from_iterator(support.len(), support.iter().map(|&z| centre[z]));
    if !null.is_empty() {
        let n_mat = DMatrix::from_columns(&null);
        let entropy = |q: &DVector<f64>| -> f64 { -q.iter().map(|&v| v * v.ln()).sum::<f64>() };
        for _ in 0..200 {
            let grad = n_mat.transpose() * q.map(|v| -v.ln() - 1.0);
            let hess = n_mat.transpose() * DMatrix::from_diagonal(&q.map(|v| 1.0 / v)) * &n_mat;
            let step = n_mat.clone() * hess.cholesky().expect("positive definite").solve(&grad);
            let mut t = 1.0;
            let base = entropy(&q);
            loop {
                let trial = &q + &step * t;
                if trial.iter().all(|&v| v > 0.0) && entropy(&trial) >= base - 1e-15 {
                    q = trial;
                    break;
                }
                t *= 0.5;
                if t < 1e-12 {
                    break;
                }
            }
            if step.norm() * t < 1e-15 {
                break;
            }
        }
    }
    let mut out = vec![0.0; len];
    for (k, &z) in support.iter().enumerate() {
        out[z] = q[k];
    }
    out
}

pub fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Every cover of `m` variables by non-empty faces, as facet lists.
pub fn all_covers(m: usize) -> Vec<Vec<VarSet>> {
    let faces: Vec<u32> = (1..1u32 << m).collect();
    let mut out: Vec<Vec<VarSet>> = Vec::new();
    for pick in 1u64..1 << faces.len() {
        let chosen: Vec<u32> = faces
            .iter()
            .enumerate()
            .filter(|(k, _)| pick >> k & 1 == 1)
            .map(|(_, &f)| f)
            .collect();
        // Keep antichains only, so each cover appears once.
        let antichain = chosen
            .iter()
            .all(|&f| !chosen.iter().any(|&g| g != f && f & g == f));
        let union = chosen.iter().fold(0, |acc, &f| acc | f);
        if antichain && union == (1 << m) - 1 {
            let mut facets: Vec<VarSet> = chosen.into_iter().map(VarSet).collect();
            facets.sort_by_key(|f| (f.len(), f.0));
            out.push(facets);
        }
    }
    out
}
