//! Tridiagonal direct solvers.
//!
//! `solve_spd_like` is the plain Thomas algorithm for strictly diagonally
//! dominant systems (the discrete Helmholtz operator with `λ > 0`).
//! `TridiagLu` is an LU factorization with partial pivoting for the Newton
//! Jacobian `A - diag(p φ^{p-1})`, which loses dominance near the solution.

/// Thomas algorithm. `lower[i]` couples row `i+1` to `i`, `upper[i]` couples
/// row `i` to `i+1`. No pivoting; caller guarantees dominance.
pub fn solve_spd_like(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    debug_assert_eq!(lower.len(), n - 1);
    debug_assert_eq!(upper.len(), n - 1);
    debug_assert_eq!(rhs.len(), n);
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i - 1] * c[i - 1];
        c[i] = if i < n - 1 { upper[i] / m } else { 0.0 };
        d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / m;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        let xi = x[i] - c[i] * x[i + 1];
        x[i] = xi;
    }
    x
}

/// LU factorization of a tridiagonal matrix with partial pivoting. Row swaps
/// introduce a second superdiagonal (standard `gtsv` layout).
pub struct TridiagLu {
    n: usize,
    du2: Vec<f64>,  // second superdiagonal after pivoting
    du: Vec<f64>,   // first superdiagonal
    d: Vec<f64>,    // diagonal
    dl: Vec<f64>,   // multipliers
    swap: Vec<bool>,
}

impl TridiagLu {
    /// Factor; returns `None` when a pivot vanishes exactly.
    pub fn factor(lower: &[f64], diag: &[f64], upper: &[f64]) -> Option<Self> {
        let n = diag.len();
        let mut d = diag.to_vec();
        let mut du = upper.to_vec();
        let mut dl = lower.to_vec();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swap = vec![false; n.saturating_sub(1)];
        for i in 0..n - 1 {
            if dl[i].abs() <= d[i].abs() {
                if d[i] == 0.0 {
                    return None;
                }
                let m = dl[i] / d[i];
                dl[i] = m;
                d[i + 1] -= m * du[i];
                // du2 untouched (stays 0 for this row)
            } else {
                // swap rows i, i+1
                swap[i] = true;
                let m = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = m;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - m * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -m;
                }
            }
        }
        if d[n - 1] == 0.0 {
            return None;
        }
        Some(Self { n, du2, du, d, dl, swap })
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = rhs.to_vec();
        for i in 0..n - 1 {
            if self.swap[i] {
                x.swap(i, i + 1);
            }
            let xi = x[i];
            x[i + 1] -= self.dl[i] * xi;
        }
        x[n - 1] /= self.d[n - 1];
        if n >= 2 {
            x[n - 2] = (x[n - 2] - self.du[n - 2] * x[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            let mut v = x[i] - self.du[i] * x[i + 1];
            if i + 2 < n {
                v -= self.du2[i] * x[i + 2];
            }
            x[i] = v / self.d[i];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn apply(lower: &[f64], diag: &[f64], upper: &[f64], x: &[f64]) -> Vec<f64> {
        let n = diag.len();
        let mut y = vec![0.0; n];
        for i in 0..n {
            y[i] = diag[i] * x[i];
            if i > 0 {
                y[i] += lower[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                y[i] += upper[i] * x[i + 1];
            }
        }
        y
    }

    #[test]
    fn thomas_roundtrip() {
        let n = 64;
        let diag: Vec<f64> = (0..n).map(|i| 4.0 + (i as f64 * 0.7).sin()).collect();
        let lower: Vec<f64> = (0..n - 1).map(|i| -1.0 + 0.2 * (i as f64).cos()).collect();
        let upper: Vec<f64> = (0..n - 1).map(|i| -1.0 - 0.1 * (i as f64).sin()).collect();
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).cos()).collect();
        let rhs = apply(&lower, &diag, &upper, &x_true);
        let x = solve_spd_like(&lower, &diag, &upper, &rhs);
        for (a, b) in x.iter().zip(&x_true) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn pivoted_lu_handles_indefinite_rows() {
        // small diagonal entries force row swaps
        let diag = vec![1e-14, -2.0, 0.5, 3.0, -1e-13, 2.0];
        let lower = vec![1.0, -1.5, 2.0, 0.8, -1.2];
        let upper = vec![2.0, 0.7, -1.1, 1.4, 0.9];
        let x_true = vec![1.0, -2.0, 3.0, 0.5, -1.0, 2.0];
        let rhs = apply(&lower, &diag, &upper, &x_true);
        let lu = TridiagLu::factor(&lower, &diag, &upper).unwrap();
        let x = lu.solve(&rhs);
        for (a, b) in x.iter().zip(&x_true) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }
}
