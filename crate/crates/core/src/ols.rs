//! Ordinary least squares by Householder QR with column pivoting.
//!
//! Numerical rank is the number of pivoted diagonal entries `|r_ii|` at or
//! above `RANK_TOLERANCE * max column norm`. A full-rank system is solved by
//! back substitution. A rank-deficient one is reduced further to a complete
//! orthogonal decomposition, which yields the minimum-norm least-squares
//! solution; the fit then carries `rank_warning`.

use crate::error::{Error, Result};

/// Relative tolerance on pivoted diagonal entries of `R`.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Condition estimates above this set `rank_warning`.
pub const CONDITION_THRESHOLD: f64 = 1.0 / RANK_TOLERANCE;

/// Row-major regressors. With `has_intercept` a column of ones is added
/// during fitting and prediction; it is not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    has_intercept: bool,
}

impl DesignMatrix {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>, has_intercept: bool) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::Dimension {
                expected: rows * cols,
                actual: values.len(),
                context: "design matrix values",
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("design matrix"));
        }
        Ok(Self {
            rows,
            cols,
            values,
            has_intercept,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], has_intercept: bool) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::Dimension {
                expected: cols,
                actual: bad.len(),
                context: "design matrix row",
            });
        }
        Self::new(rows.len(), cols, rows.concat(), has_intercept)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Regressor count, excluding the intercept.
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn has_intercept(&self) -> bool {
        self.has_intercept
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    fn total_cols(&self) -> usize {
        self.cols + usize::from(self.has_intercept)
    }

    /// Column-major copy with the intercept (if any) as column 0.
    fn to_column_major(&self) -> Vec<f64> {
        let n = self.rows;
        let mut a = vec![0.0; n * self.total_cols()];
        let offset = usize::from(self.has_intercept);
        if self.has_intercept {
            a[..n].fill(1.0);
        }
        for i in 0..n {
            for (j, &v) in self.row(i).iter().enumerate() {
                a[(j + offset) * n + i] = v;
            }
        }
        a
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub intercept: Option<f64>,
    pub coefficients: Vec<f64>,
    pub r_squared: f64,
    pub residual_norm: f64,
    /// `|r_11| / |r_kk|` of the pivoted factor; infinite for exact rank loss.
    pub condition_estimate: f64,
    pub rank: usize,
    pub rank_warning: bool,
}

/// Householder reflector `I - tau v v^T` with `v[0] = 1` stored implicitly.
struct Reflector {
    v: Vec<f64>,
    tau: f64,
}

impl Reflector {
    /// Reflector mapping `x` onto `beta e_1`. Returns it together with `beta`.
    fn new(x: &[f64]) -> (Self, f64) {
        let alpha = x[0];
        let tail_sq: f64 = x[1..].iter().map(|v| v * v).sum();
        let mut v = x.to_vec();
        v[0] = 1.0;
        if tail_sq == 0.0 {
            return (Self { v, tau: 0.0 }, alpha);
        }
        let norm = (alpha * alpha + tail_sq).sqrt();
        let beta = if alpha >= 0.0 { -norm } else { norm };
        let scale = 1.0 / (alpha - beta);
        for e in &mut v[1..] {
            *e *= scale;
        }
        (
            Self {
                v,
                tau: (beta - alpha) / beta,
            },
            beta,
        )
    }

    fn apply(&self, x: &mut [f64]) {
        if self.tau == 0.0 {
            return;
        }
        let dot: f64 = self.v.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
        let s = self.tau * dot;
        for (xi, vi) in x.iter_mut().zip(&self.v) {
            *xi -= s * vi;
        }
    }
}

fn norm(x: &[f64]) -> f64 {
    // Scaled to avoid overflow on large raw regressors.
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    scale * x.iter().map(|v| (v / scale).powi(2)).sum::<f64>().sqrt()
}

/// Least-squares fit of `y` on `x`.
pub fn fit(x: &DesignMatrix, y: &[f64]) -> Result<OlsFit> {
    let n = x.rows();
    let k = x.total_cols();
    if y.len() != n {
        return Err(Error::Dimension {
            expected: n,
            actual: y.len(),
            context: "target vector",
        });
    }
    if n < k || k == 0 {
        return Err(Error::Dimension {
            expected: k.max(1),
            actual: n,
            context: "fitting needs at least as many rows as columns",
        });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("target vector"));
    }
    let mean = y.iter().sum::<f64>() / n as f64;
    let sst: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    if sst <= 0.0 {
        return Err(Error::Config(
            "targets are constant; r_squared is undefined".into(),
        ));
    }

    let mut a = x.to_column_major();
    let mut qty = y.to_vec();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut diag = vec![0.0; k];

    for i in 0..k {
        // Pivot on the largest remaining column norm.
        let (best, _) =
            (i..k)
                .map(|j| (j, norm(&a[j * n + i..(j + 1) * n])))
                .fold(
                    (i, -1.0),
                    |acc, (j, v)| if v > acc.1 { (j, v) } else { acc },
                );
        if best != i {
            for r in 0..n {
                a.swap(i * n + r, best * n + r);
            }
            perm.swap(i, best);
        }
        let (h, beta) = Reflector::new(&a[i * n + i..(i + 1) * n]);
        a[i * n + i] = beta;
        for e in &mut a[i * n + i + 1..(i + 1) * n] {
            *e = 0.0;
        }
        for j in i + 1..k {
            h.apply(&mut a[j * n + i..(j + 1) * n]);
        }
        h.apply(&mut qty[i..]);
        diag[i] = beta.abs();
    }

    let r_at = |row: usize, col: usize| a[col * n + row];
    let max_diag = diag[0];
    let rank = if max_diag == 0.0 {
        0
    } else {
        diag.iter()
            .take_while(|&&d| d >= RANK_TOLERANCE * max_diag)
            .count()
    };
    let condition_estimate = if diag[k - 1] == 0.0 {
        f64::INFINITY
    } else {
        max_diag / diag[k - 1]
    };

    let mut solution = vec![0.0; k];
    if rank == k {
        for i in (0..k).rev() {
            let s: f64 = (i + 1..k).map(|j| r_at(i, j) * solution[j]).sum();
            solution[i] = (qty[i] - s) / r_at(i, i);
        }
    } else if rank > 0 {
        // [R11 R12]^T = Z [T; 0]; then w = Z [T^{-T} c; 0] is the
        // minimum-norm solution of [R11 R12] w = c.
        // m[i] is column i of M^T, i.e. row i of [R11 R12].
        let mut m: Vec<Vec<f64>> = (0..rank)
            .map(|i| {
                (0..k)
                    .map(|c| if c >= i { r_at(i, c) } else { 0.0 })
                    .collect()
            })
            .collect();
        let mut reflectors = Vec::with_capacity(rank);
        for i in 0..rank {
            let (h, beta) = Reflector::new(&m[i][i..]);
            m[i][i] = beta;
            for e in &mut m[i][i + 1..] {
                *e = 0.0;
            }
            for column in m.iter_mut().skip(i + 1) {
                h.apply(&mut column[i..]);
            }
            reflectors.push(h);
        }
        // T is upper triangular with T[r][c] = m[c][r]; solve T^T u = c.
        let mut u = vec![0.0; k];
        for i in 0..rank {
            let s: f64 = (0..i).map(|j| m[i][j] * u[j]).sum();
            u[i] = (qty[i] - s) / m[i][i];
        }
        for (i, h) in reflectors.iter().enumerate().rev() {
            h.apply(&mut u[i..]);
        }
        solution = u;
    }

    let mut beta = vec![0.0; k];
    for (pos, &col) in perm.iter().enumerate() {
        beta[col] = solution[pos];
    }
    let (intercept, coefficients) = if x.has_intercept() {
        (Some(beta[0]), beta[1..].to_vec())
    } else {
        (None, beta)
    };

    let mut out = OlsFit {
        intercept,
        coefficients,
        r_squared: 0.0,
        residual_norm: 0.0,
        condition_estimate,
        rank,
        rank_warning: rank < k || condition_estimate > CONDITION_THRESHOLD,
    };
    let fitted = predict(&out, x)?;
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let sse: f64 = residuals.iter().map(|r| r * r).sum();
    out.residual_norm = norm(&residuals);
    out.r_squared = 1.0 - sse / sst;
    Ok(out)
}

/// `X beta` plus the intercept, if the fit has one.
pub fn predict(fit: &OlsFit, x: &DesignMatrix) -> Result<Vec<f64>> {
    if x.cols() != fit.coefficients.len() {
        return Err(Error::Dimension {
            expected: fit.coefficients.len(),
            actual: x.cols(),
            context: "prediction design columns",
        });
    }
    if x.has_intercept() != fit.intercept.is_some() {
        return Err(Error::Config(
            "design intercept flag does not match the fitted model".into(),
        ));
    }
    let c = fit.intercept.unwrap_or(0.0);
    Ok((0..x.rows())
        .map(|i| {
            c + x
                .row(i)
                .iter()
                .zip(&fit.coefficients)
                .map(|(a, b)| a * b)
                .sum::<f64>()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use proptest::prelude::*;

    #[test]
    fn exact_line_through_origin() {
        let x = DesignMatrix::from_rows(&[vec![1.0], vec![2.0], vec![3.0]], false).unwrap();
        let f = fit(&x, &[2.0, 4.0, 6.0]).unwrap();
        assert!((f.coefficients[0] - 2.0).abs() < 1e-14);
        assert!((f.r_squared - 1.0).abs() < 1e-14);
        assert!(f.intercept.is_none());
        assert!(!f.rank_warning);
    }

    #[test]
    fn line_with_intercept() {
        // y = 0.25 + 2.142857... x, reference from the 7-point data set.
        let xs = [1., 2., 3., 4., 5., 6., 7.];
        let ys = [1., 3., 4., 5., 2., 3., 4.];
        let rows: Vec<Vec<f64>> = xs.iter().map(|&v| vec![v]).collect();
        let f = fit(&DesignMatrix::from_rows(&rows, true).unwrap(), &ys).unwrap();
        // Closed form: slope = Sxy / Sxx, intercept = ybar - slope xbar.
        let xbar = 4.0;
        let ybar = ys.iter().sum::<f64>() / 7.0;
        let sxy: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (x - xbar) * (y - ybar))
            .sum();
        let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
        let slope = sxy / sxx;
        assert!((f.coefficients[0] - slope).abs() < 1e-12);
        assert!((f.intercept.unwrap() - (ybar - slope * xbar)).abs() < 1e-12);
    }

    #[test]
    fn duplicated_column_warns_and_is_min_norm() {
        // y = 3 a; with columns (a, a) the minimum-norm split is (1.5, 1.5).
        let rows: Vec<Vec<f64>> = (1..=6).map(|i| vec![i as f64, i as f64]).collect();
        let y: Vec<f64> = (1..=6).map(|i| 3.0 * i as f64).collect();
        let f = fit(&DesignMatrix::from_rows(&rows, false).unwrap(), &y).unwrap();
        assert!(f.rank_warning);
        assert_eq!(f.rank, 1);
        assert!(f.condition_estimate > CONDITION_THRESHOLD);
        assert!((f.coefficients[0] - 1.5).abs() < 1e-12);
        assert!((f.coefficients[1] - 1.5).abs() < 1e-12);
        assert!(f.residual_norm < 1e-10);
    }

    #[test]
    fn zero_column_with_intercept() {
        // y = 2 + x, plus a zero column that must get coefficient 0.
        let rows: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64, 0.0]).collect();
        let y: Vec<f64> = (0..5).map(|i| 2.0 + i as f64).collect();
        let f = fit(&DesignMatrix::from_rows(&rows, true).unwrap(), &y).unwrap();
        assert!(f.rank_warning);
        assert!(f.condition_estimate.is_infinite());
        assert!((f.intercept.unwrap() - 2.0).abs() < 1e-12);
        assert!((f.coefficients[0] - 1.0).abs() < 1e-12);
        assert_eq!(f.coefficients[1], 0.0);
    }

    #[test]
    fn errors() {
        let x = DesignMatrix::from_rows(&[vec![1.0, 2.0]], true).unwrap();
        assert!(matches!(fit(&x, &[1.0]), Err(Error::Dimension { .. })));
        let x = DesignMatrix::from_rows(&[vec![1.0], vec![2.0]], false).unwrap();
        assert!(matches!(fit(&x, &[1.0]), Err(Error::Dimension { .. })));
        assert!(matches!(
            fit(&x, &[1.0, f64::NAN]),
            Err(Error::NonFinite(_))
        ));
        assert!(matches!(fit(&x, &[1.0, 1.0]), Err(Error::Config(_))));
        assert!(DesignMatrix::new(1, 1, vec![f64::INFINITY], false).is_err());
        assert!(DesignMatrix::from_rows(&[vec![1.0], vec![1.0, 2.0]], false).is_err());
    }

    #[test]
    fn predict_examples() {
        let f = OlsFit {
            intercept: Some(0.75),
            coefficients: vec![3.0, -1.0],
            r_squared: 1.0,
            residual_norm: 0.0,
            condition_estimate: 1.0,
            rank: 3,
            rank_warning: false,
        };
        let x = DesignMatrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 2.0]], true).unwrap();
        assert_eq!(predict(&f, &x).unwrap(), vec![0.75, 1.75]);
        let bad = DesignMatrix::from_rows(&[vec![0.0]], true).unwrap();
        assert!(matches!(predict(&f, &bad), Err(Error::Dimension { .. })));
    }

    #[test]
    fn residual_norm_matches_predictions() {
        let mut rng = SplitMix64::new(17);
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|_| vec![rng.next_f64(), rng.next_f64()])
            .collect();
        let y: Vec<f64> = (0..40).map(|_| rng.next_f64()).collect();
        let x = DesignMatrix::from_rows(&rows, true).unwrap();
        let f = fit(&x, &y).unwrap();
        let yhat = predict(&f, &x).unwrap();
        let rn: f64 = y
            .iter()
            .zip(&yhat)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!((rn - f.residual_norm).abs() < 1e-12);
    }

    fn random_problem(seed: u64, n: usize, k: usize) -> (DesignMatrix, Vec<f64>) {
        let mut rng = SplitMix64::new(seed);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..k).map(|_| rng.symmetric(1.0)).collect())
            .collect();
        let y = (0..n).map(|_| rng.symmetric(5.0)).collect();
        (DesignMatrix::from_rows(&rows, true).unwrap(), y)
    }

    proptest! {
        #[test]
        fn residual_is_orthogonal(seed in any::<u64>(), k in 1usize..6, extra in 5usize..40) {
            let (x, y) = random_problem(seed, k + 1 + extra, k);
            let f = fit(&x, &y).unwrap();
            let yhat = predict(&f, &x).unwrap();
            let resid: Vec<f64> = y.iter().zip(&yhat).map(|(a, b)| a - b).collect();
            let ynorm = norm(&y);
            let intercept_dot: f64 = resid.iter().sum();
            prop_assert!(intercept_dot.abs() <= 1e-6 * ynorm);
            for j in 0..k {
                let dot: f64 = (0..x.rows()).map(|i| x.row(i)[j] * resid[i]).sum();
                prop_assert!(dot.abs() <= 1e-6 * ynorm);
            }
        }

        #[test]
        fn column_space_targets_are_reproduced(seed in any::<u64>(), k in 1usize..6) {
            let (x, _) = random_problem(seed, 30, k);
            let mut rng = SplitMix64::new(seed ^ 0xABCD);
            let beta: Vec<f64> = (0..k).map(|_| rng.symmetric(3.0)).collect();
            let c = rng.symmetric(3.0);
            let y: Vec<f64> = (0..x.rows())
                .map(|i| c + x.row(i).iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>())
                .collect();
            prop_assume!(y.iter().any(|v| (v - y[0]).abs() > 1e-9));
            let f = fit(&x, &y).unwrap();
            prop_assert!(f.residual_norm <= 1e-8 * norm(&y));
        }

        #[test]
        fn r_squared_is_scale_invariant(seed in any::<u64>(), c in prop_oneof![-1e3..-1e-3f64, 1e-3..1e3f64]) {
            let (x, y) = random_problem(seed, 25, 3);
            let scaled: Vec<f64> = y.iter().map(|v| c * v).collect();
            let a = fit(&x, &y).unwrap();
            let b = fit(&x, &scaled).unwrap();
            prop_assert!((a.r_squared - b.r_squared).abs() < 1e-10);
        }
    }
}
