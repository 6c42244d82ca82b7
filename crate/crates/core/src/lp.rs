//! Dense two-phase simplex for small equality-form linear programs.
//!
//! Solves `max c.x  s.t.  A x = b, x >= 0` with Bland's pivoting rule, which
//! makes the solver deterministic and cycle-free. Sized for the tiny systems
//! produced by CAR-admissibility checks; a hard cap rejects anything larger.

use crate::error::{Error, Result};

/// Hard cap on variables and on constraints.
pub const LP_SIZE_CAP: usize = 200;

const PIVOT_TOL: f64 = 1e-10;
/// Phase-1 optimum above this value certifies infeasibility.
pub const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal { objective: f64, solution: Vec<f64> },
    Infeasible { phase1_residual: f64 },
    Unbounded,
}

/// Maximizes `c.x` subject to `A x = b`, `x >= 0`.
pub fn solve_max(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<LpOutcome> {
    let m = a.len();
    let n = c.len();
    if m != b.len() || a.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidParameter(
            "inconsistent LP dimensions".into(),
        ));
    }
    if n > LP_SIZE_CAP || m > LP_SIZE_CAP {
        return Err(Error::ProblemTooLarge {
            vars: n,
            constraints: m,
            cap: LP_SIZE_CAP,
        });
    }

    // Tableau with artificial variables: columns [x (n) | artificial (m) | rhs].
    let width = n + m + 1;
    let mut t = vec![vec![0.0; width]; m];
    for i in 0..m {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = flip * a[i][j];
        }
        t[i][n + i] = 1.0;
        t[i][width - 1] = flip * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Phase 1: maximize -(sum of artificials). With the artificial basis the
    // reduced cost of each x-column is its column sum, artificial columns sit
    // at zero, and the value slot holds the current artificial total.
    let mut obj = vec![0.0; width];
    for (j, o) in obj.iter_mut().enumerate() {
        let mut v = if (n..n + m).contains(&j) { -1.0 } else { 0.0 };
        for row in t.iter() {
            v += row[j];
        }
        *o = v;
    }

    simplex_iterate(&mut t, &mut obj, &mut basis, n + m)?;
    let phase1 = obj[width - 1];
    if phase1 > FEAS_TOL {
        return Ok(LpOutcome::Infeasible {
            phase1_residual: phase1,
        });
    }

    // Drive remaining artificial variables out of the basis where possible.
    for i in 0..m {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| t[i][j].abs() > PIVOT_TOL) {
                pivot(&mut t, &mut obj, &mut basis, i, j);
            }
            // A row with no eligible column is redundant; its artificial
            // stays basic at value ~0, harmless for phase 2.
        }
    }

    // Phase 2: objective row for max c.x, artificial columns frozen.
    let mut obj2 = vec![0.0; width];
    for (j, &cj) in c.iter().enumerate() {
        obj2[j] = cj;
    }
    // Express the objective in terms of nonbasic variables.
    for (i, &bi) in basis.iter().enumerate() {
        if bi < n && obj2[bi].abs() > 0.0 {
            let coef = obj2[bi];
            for j in 0..width {
                obj2[j] -= coef * t[i][j];
            }
        }
    }
    // Artificials may not re-enter.
    for j in n..n + m {
        if !basis.contains(&j) {
            obj2[j] = f64::NEG_INFINITY;
        }
    }
    match simplex_iterate(&mut t, &mut obj2, &mut basis, n + m) {
        Ok(()) => {}
        Err(Error::InvalidParameter(msg)) if msg == "unbounded" => {
            return Ok(LpOutcome::Unbounded)
        }
        Err(e) => return Err(e),
    }

    let mut solution = vec![0.0; n];
    for (i, &bi) in basis.iter().enumerate() {
        if bi < n {
            solution[bi] = t[i][width - 1];
        }
    }
    let objective: f64 = c
        .iter()
        .zip(&solution)
        .map(|(&cj, &xj)| cj * xj)
        .sum();
    Ok(LpOutcome::Optimal {
        objective,
        solution,
    })
}

/// Runs Bland-rule pivots until no reduced cost is positive.
fn simplex_iterate(
    t: &mut [Vec<f64>],
    obj: &mut [f64],
    basis: &mut [usize],
    num_cols: usize,
) -> Result<()> {
    let width = obj.len();
    let max_iters = 10_000usize;
    for _ in 0..max_iters {
        // Bland: smallest index with positive reduced cost.
        let entering = (0..num_cols).find(|&j| obj[j] > PIVOT_TOL);
        let Some(e) = entering else {
            return Ok(());
        };
        // Ratio test; ties broken by smallest basis variable (Bland).
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for (i, row) in t.iter().enumerate() {
            if row[e] > PIVOT_TOL {
                let ratio = row[width - 1] / row[e];
                let better = match leave {
                    None => true,
                    Some(l) => {
                        ratio < best - 1e-12
                            || (ratio < best + 1e-12 && basis[i] < basis[l])
                    }
                };
                if better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(l) = leave else {
            return Err(Error::InvalidParameter("unbounded".into()));
        };
        pivot_full(t, obj, basis, l, e);
    }
    Err(Error::InvalidParameter(
        "simplex iteration cap exceeded".into(),
    ))
}

fn pivot(t: &mut [Vec<f64>], obj: &mut [f64], basis: &mut [usize], l: usize, e: usize) {
    pivot_full(t, obj, basis, l, e);
}

fn pivot_full(t: &mut [Vec<f64>], obj: &mut [f64], basis: &mut [usize], l: usize, e: usize) {
    let width = obj.len();
    let piv = t[l][e];
    for j in 0..width {
        t[l][j] /= piv;
    }
    for i in 0..t.len() {
        if i != l && t[i][e].abs() > 0.0 {
            let f = t[i][e];
            for j in 0..width {
                t[i][j] -= f * t[l][j];
            }
        }
    }
    if obj[e].is_finite() && obj[e].abs() > 0.0 {
        let f = obj[e];
        for j in 0..width {
            if obj[j].is_finite() {
                obj[j] -= f * t[l][j];
            }
        }
    }
    basis[l] = e;
}

/// Maximizes the minimum of the listed variables subject to the equality
/// system: introduces `t` with `x_i - t - s_i = 0` and maximizes `t`.
/// Returns the optimal `t` and the `x` assignment.
pub fn solve_maxmin(a_eq: &[Vec<f64>], b_eq: &[f64]) -> Result<LpOutcome> {
    let m = a_eq.len();
    let n = a_eq.first().map(|r| r.len()).unwrap_or(0);
    if n == 0 {
        return Err(Error::InvalidParameter("no variables".into()));
    }
    // Variables: x (n), t (1), slacks (n).
    let total = n + 1 + n;
    let mut a: Vec<Vec<f64>> = Vec::with_capacity(m + n);
    let mut b: Vec<f64> = Vec::with_capacity(m + n);
    for (row, &rhs) in a_eq.iter().zip(b_eq) {
        let mut r = vec![0.0; total];
        r[..n].copy_from_slice(row);
        a.push(r);
        b.push(rhs);
    }
    for i in 0..n {
        let mut r = vec![0.0; total];
        r[i] = 1.0;
        r[n] = -1.0;
        r[n + 1 + i] = -1.0;
        a.push(r);
        b.push(0.0);
    }
    let mut c = vec![0.0; total];
    c[n] = 1.0;
    match solve_max(&a, &b, &c)? {
        LpOutcome::Optimal {
            objective,
            mut solution,
        } => {
            solution.truncate(n);
            Ok(LpOutcome::Optimal {
                objective,
                solution,
            })
        }
        other => Ok(other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_variable_maxmin() {
        // alpha = 1, maximize min alpha: t* = 1.
        let out = solve_maxmin(&[vec![1.0]], &[1.0]).unwrap();
        match out {
            LpOutcome::Optimal {
                objective,
                solution,
            } => {
                assert!((objective - 1.0).abs() < 1e-9);
                assert!((solution[0] - 1.0).abs() < 1e-9);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn inconsistent_equalities_are_infeasible() {
        // x = 1 and x = 2.
        let out = solve_max(&[vec![1.0], vec![1.0]], &[1.0, 2.0], &[0.0]).unwrap();
        assert!(matches!(out, LpOutcome::Infeasible { .. }));
    }

    #[test]
    fn small_lp_against_vertex_enumeration() {
        // max 3x + 2y + z  s.t.  x + y + z = 4, x + 2y = 3.
        let a = vec![vec![1.0, 1.0, 1.0], vec![1.0, 2.0, 0.0]];
        let b = vec![4.0, 3.0];
        let c = vec![3.0, 2.0, 1.0];
        let out = solve_max(&a, &b, &c).unwrap();
        let LpOutcome::Optimal { objective, .. } = out else {
            panic!("expected optimal")
        };
        // Brute force over basic solutions (pairs of columns).
        let mut best = f64::NEG_INFINITY;
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    continue;
                }
                // Solve 2x2 for columns i, j.
                let det = a[0][i] * a[1][j] - a[0][j] * a[1][i];
                if det.abs() < 1e-12 {
                    continue;
                }
                let xi = (b[0] * a[1][j] - a[0][j] * b[1]) / det;
                let xj = (a[0][i] * b[1] - b[0] * a[1][i]) / det;
                if xi >= -1e-12 && xj >= -1e-12 {
                    best = best.max(c[i] * xi + c[j] * xj);
                }
            }
        }
        assert!((objective - best).abs() < 1e-9, "{objective} vs {best}");
    }

    #[test]
    fn determinism() {
        let a = vec![vec![1.0, 1.0, 0.0], vec![0.0, 1.0, 1.0]];
        let b = vec![1.0, 1.0];
        let r1 = format!("{:?}", solve_maxmin(&a, &b).unwrap());
        let r2 = format!("{:?}", solve_maxmin(&a, &b).unwrap());
        assert_eq!(r1, r2);
    }

    #[test]
    fn size_cap() {
        let n = LP_SIZE_CAP + 1;
        let a = vec![vec![0.0; n]];
        let b = vec![0.0];
        let c = vec![0.0; n];
        assert!(matches!(
            solve_max(&a, &b, &c),
            Err(Error::ProblemTooLarge { .. })
        ));
    }
}
