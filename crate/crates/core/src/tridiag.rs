//! Direct solvers for tridiagonal and cyclic tridiagonal systems.
//!
//! Row `i` reads `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`.
//! In the plain solver `lower[0]` and `upper[n-1]` are ignored; in the
//! cyclic solver they couple the first and last unknowns.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TridiagError {
    #[error("band lengths disagree: lower {lower}, diag {diag}, upper {upper}, rhs {rhs}")]
    Shape { lower: usize, diag: usize, upper: usize, rhs: usize },
    #[error("zero pivot at row {0}")]
    ZeroPivot(usize),
}

fn check(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<usize, TridiagError> {
    let n = diag.len();
    if lower.len() != n || upper.len() != n || rhs.len() != n {
        return Err(TridiagError::Shape { lower: lower.len(), diag: n, upper: upper.len(), rhs: rhs.len() });
    }
    Ok(n)
}

/// Thomas algorithm.
pub fn solve(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>, TridiagError> {
    let n = check(lower, diag, upper, rhs)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    if diag[0] == 0.0 {
        return Err(TridiagError::ZeroPivot(0));
    }
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i] * c[i - 1];
        if m == 0.0 {
            return Err(TridiagError::ZeroPivot(i));
        }
        c[i] = if i + 1 < n { upper[i] / m } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / m;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// Cyclic system via Sherman-Morrison. The corner entries are `lower[0]`
/// (row 0, column n-1) and `upper[n-1]` (row n-1, column 0).
pub fn solve_cyclic(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>, TridiagError> {
    let n = check(lower, diag, upper, rhs)?;
    match n {
        0 => return Ok(Vec::new()),
        1 => {
            let a = diag[0] + lower[0] + upper[0];
            if a == 0.0 {
                return Err(TridiagError::ZeroPivot(0));
            }
            return Ok(vec![rhs[0] / a]);
        }
        2 => {
            // Both off-diagonal couplings land on the same entry.
            let (a, b) = (diag[0], lower[0] + upper[0]);
            let (c, d) = (lower[1] + upper[1], diag[1]);
            let det = a * d - b * c;
            if det == 0.0 {
                return Err(TridiagError::ZeroPivot(0));
            }
            return Ok(vec![(rhs[0] * d - b * rhs[1]) / det, (a * rhs[1] - c * rhs[0]) / det]);
        }
        _ => {}
    }
    let alpha = upper[n - 1];
    let beta = lower[0];
    if alpha == 0.0 && beta == 0.0 {
        return solve(lower, diag, upper, rhs);
    }
    let gamma = -diag[0];
    let mut bb = diag.to_vec();
    bb[0] -= gamma;
    bb[n - 1] -= alpha * beta / gamma;
    let x = solve(lower, &bb, upper, rhs)?;
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = alpha;
    let z = solve(lower, &bb, upper, &u)?;
    let fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    Ok(x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn apply(lower: &[f64], diag: &[f64], upper: &[f64], x: &[f64], cyclic: bool) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|i| {
                let mut s = diag[i] * x[i];
                if i > 0 {
                    s += lower[i] * x[i - 1];
                } else if cyclic {
                    s += lower[0] * x[n - 1];
                }
                if i + 1 < n {
                    s += upper[i] * x[i + 1];
                } else if cyclic {
                    s += upper[n - 1] * x[0];
                }
                s
            })
            .collect()
    }

    #[test]
    fn solves_diagonally_dominant_system() {
        let n = 9;
        let lower: Vec<f64> = (0..n).map(|i| -1.0 - 0.1 * i as f64).collect();
        let upper: Vec<f64> = (0..n).map(|i| -0.5 + 0.05 * i as f64).collect();
        let diag: Vec<f64> = (0..n).map(|i| 4.0 + i as f64).collect();
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64).cos()).collect();
        for cyclic in [false, true] {
            let rhs = apply(&lower, &diag, &upper, &x_true, cyclic);
            let x = if cyclic {
                solve_cyclic(&lower, &diag, &upper, &rhs).unwrap()
            } else {
                solve(&lower, &diag, &upper, &rhs).unwrap()
            };
            for (a, b) in x.iter().zip(&x_true) {
                assert!((a - b).abs() < 1e-13, "cyclic={cyclic}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn small_cyclic_systems() {
        let x_true = [0.3, -1.2];
        let (lower, diag, upper) = ([-1.0, -0.5], [3.0, 4.0], [-0.25, -2.0]);
        let rhs = [
            diag[0] * x_true[0] + (lower[0] + upper[0]) * x_true[1],
            diag[1] * x_true[1] + (lower[1] + upper[1]) * x_true[0],
        ];
        let x = solve_cyclic(&lower, &diag, &upper, &rhs).unwrap();
        assert!((x[0] - x_true[0]).abs() < 1e-14 && (x[1] - x_true[1]).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(solve(&[0.0], &[1.0, 2.0], &[0.0, 0.0], &[1.0, 1.0]), Err(TridiagError::Shape { .. })));
        assert_eq!(solve(&[0.0, 1.0], &[0.0, 1.0], &[1.0, 0.0], &[1.0, 1.0]), Err(TridiagError::ZeroPivot(0)));
    }
}
