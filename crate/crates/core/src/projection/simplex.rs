//! A small dense two-phase simplex solver with Bland's rule, sized for the
//! support-detection LPs of the projection step (a few hundred columns).

const PIVOT_EPS: f64 = 1e-11;
const FEASIBILITY_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible { violation: f64 },
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    /// Reduced costs; a positive entry means the column improves the objective.
    cost: Vec<f64>,
    basis: Vec<usize>,
    /// Columns at or beyond this index may never enter the basis.
    enter_limit: usize,
}

impl Tableau {
    fn rhs(&self) -> usize {
        self.cost.len() - 1
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let inv = 1.0 / self.rows[r][j];
        self.rows[r].iter_mut().for_each(|v| *v *= inv);
        self.rows[r][j] = 1.0;
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = row[j];
            if factor != 0.0 {
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x -= factor * y;
                }
                row[j] = 0.0;
            }
        }
        let factor = self.cost[j];
        if factor != 0.0 {
            for (x, &y) in self.cost.iter_mut().zip(&pivot_row) {
                *x -= factor * y;
            }
            self.cost[j] = 0.0;
        }
        self.basis[r] = j;
    }

    /// Runs simplex iterations; false if the objective is unbounded.
    fn optimize(&mut self) -> bool {
        let rhs = self.rhs();
        loop {
            let Some(j) = (0..self.enter_limit).find(|&j| self.cost[j] > PIVOT_EPS) else {
                return true;
            };
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[j] > PIVOT_EPS {
                    let ratio = row[rhs] / row[j];
                    let better = match leave {
                        None => true,
                        Some((l, best)) => {
                            ratio < best - 1e-14 || (ratio <= best + 1e-14 && self.basis[i] < self.basis[l])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, j),
                None => return false,
            }
        }
    }
}

/// Maximizes `c·x` subject to `A x = b`, `x ≥ 0`.
pub(crate) fn maximize(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    let width = n + m + 1;
    let rhs = width - 1;

    // Phase 1: one artificial per row, minimize their sum.
    let mut rows = Vec::with_capacity(m);
    for (i, (row, &bi)) in a.iter().zip(b).enumerate() {
        let sign = if bi < 0.0 { -1.0 } else { 1.0 };
        let mut t = vec![0.0; width];
        for (k, &v) in row.iter().enumerate() {
            t[k] = sign * v;
        }
        t[n + i] = 1.0;
        t[rhs] = sign * bi;
        rows.push(t);
    }
    let mut cost = vec![0.0; width];
    for row in &rows {
        for k in 0..n {
            cost[k] += row[k];
        }
        cost[rhs] += row[rhs];
    }
    let mut tab = Tableau {
        rows,
        cost,
        basis: (n..n + m).collect(),
        enter_limit: n,
    };
    tab.optimize();
    let violation: f64 = tab
        .basis
        .iter()
        .zip(&tab.rows)
        .filter(|(&j, _)| j >= n)
        .map(|(_, row)| row[rhs])
        .sum();
    let scale = 1.0 + b.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if violation > FEASIBILITY_EPS * scale {
        return LpOutcome::Infeasible { violation };
    }

    // Drive remaining artificials out of the basis; rows where that is
    // impossible are linearly dependent and get dropped.
    let mut r = 0;
    while r < tab.rows.len() {
        if tab.basis[r] >= n {
            let entering = (0..n)
                .filter(|&j| tab.rows[r][j].abs() > PIVOT_EPS)
                .max_by(|&x, &y| tab.rows[r][x].abs().total_cmp(&tab.rows[r][y].abs()));
            match entering {
                Some(j) => tab.pivot(r, j),
                None => {
                    tab.rows.remove(r);
                    tab.basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }

    // Phase 2 with the real objective, artificials frozen out.
    let mut cost = vec![0.0; width];
    cost[..n].copy_from_slice(c);
    for (row, &j) in tab.rows.iter().zip(&tab.basis) {
        let cj = c[j];
        if cj != 0.0 {
            for k in 0..width {
                cost[k] -= cj * row[k];
            }
        }
    }
    tab.cost = cost;
    if !tab.optimize() {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![0.0; n];
    for (row, &j) in tab.rows.iter().zip(&tab.basis) {
        x[j] = row[rhs].max(0.0);
    }
    let value = x.iter().zip(c).map(|(xi, ci)| xi * ci).sum();
    LpOutcome::Optimal { x, value }
}
