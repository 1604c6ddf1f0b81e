//! Sample statistics for the Monte Carlo runners.

use crate::error::{Error, Result};
use crate::special::regularized_upper_gamma;

/// Mean, unbiased variance and the standard error `sd/√N` of the mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
    /// Standard error of `variance`, from the spread of `(x - mean)²`.
    pub variance_std_error: f64,
}

pub fn summarize(xs: &[f64]) -> Summary {
    let n = xs.len();
    let nf = n as f64;
    let mean = xs.iter().sum::<f64>() / nf;
    let sq: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let variance = if n > 1 { sq.iter().sum::<f64>() / (nf - 1.0) } else { 0.0 };
    let sq_mean = sq.iter().sum::<f64>() / nf;
    let sq_var = if n > 1 {
        sq.iter().map(|s| (s - sq_mean) * (s - sq_mean)).sum::<f64>() / (nf - 1.0)
    } else {
        0.0
    };
    Summary {
        count: n,
        mean,
        variance,
        std_error: (variance / nf).sqrt(),
        variance_std_error: (sq_var / nf).sqrt(),
    }
}

/// Exact one-sample Kolmogorov–Smirnov statistic `sup |F_N - F|`.
pub fn ks_statistic(xs: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let nf = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / nf - f).max(f - i as f64 / nf);
    }
    d
}

/// Standard deviation of `√N · D` under the null (Kolmogorov distribution),
/// `sqrt(π²/12 - (π/2) ln² 2)`.
pub fn ks_null_sd() -> f64 {
    let pi = std::f64::consts::PI;
    (pi * pi / 12.0 - pi / 2.0 * std::f64::consts::LN_2.powi(2)).sqrt()
}

/// Sample covariance and the standard error from the spread of the
/// centered products.
pub fn covariance(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let nf = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let prods: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).collect();
    let c = prods.iter().sum::<f64>() / (nf - 1.0);
    let pm = prods.iter().sum::<f64>() / nf;
    let pv = prods.iter().map(|p| (p - pm) * (p - pm)).sum::<f64>() / (nf - 1.0);
    (c, (pv / nf).sqrt())
}

/// `Var(y)/Var(x)` and its delta-method standard error.
pub fn variance_ratio(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let sx = summarize(xs);
    let sy = summarize(ys);
    let r = sy.variance / sx.variance;
    let infl: Vec<f64> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let dx = (x - sx.mean).powi(2) - sx.variance;
            let dy = (y - sy.mean).powi(2) - sy.variance;
            dy / sx.variance - r * dx / sx.variance
        })
        .collect();
    (r, summarize(&infl).std_error)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness of fit; cells with expected count below 5 are pooled.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> Result<ChiSquare> {
    if observed.len() != probs.len() || observed.is_empty() {
        return Err(Error::InvalidArgument("chi-square needs matching nonempty cells".into()));
    }
    let total: u64 = observed.iter().sum();
    let tf = total as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut pool_o, mut pool_e) = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(probs) {
        let e = p * tf;
        if e < 5.0 {
            pool_o += o as f64;
            pool_e += e;
        } else {
            cells.push((o as f64, e));
        }
    }
    if pool_e >= 5.0 || (cells.is_empty() && pool_e > 0.0) {
        cells.push((pool_o, pool_e));
    } else if pool_e > 0.0 {
        // a pool that is still small joins the smallest regular cell
        let smallest = cells
            .iter_mut()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        smallest.0 += pool_o;
        smallest.1 += pool_e;
    }
    let statistic: f64 = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    finish(statistic, cells.len().saturating_sub(1))
}

/// Pearson homogeneity test between two count vectors over the same cells;
/// cells with fewer than 10 combined counts are pooled.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> Result<ChiSquare> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::InvalidArgument("two-sample chi-square needs matching nonempty cells".into()));
    }
    let na: f64 = a.iter().sum::<u64>() as f64;
    let nb: f64 = b.iter().sum::<u64>() as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut pa, mut pb) = (0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        if x + y < 10 {
            pa += x as f64;
            pb += y as f64;
        } else {
            cells.push((x as f64, y as f64));
        }
    }
    if pa + pb >= 10.0 || (cells.is_empty() && pa + pb > 0.0) {
        cells.push((pa, pb));
    } else if pa + pb > 0.0 {
        let smallest = cells
            .iter_mut()
            .min_by(|a, b| (a.0 + a.1).total_cmp(&(b.0 + b.1)))
            .expect("nonempty");
        smallest.0 += pa;
        smallest.1 += pb;
    }
    let tot = na + nb;
    let statistic: f64 = cells
        .iter()
        .map(|&(x, y)| {
            let col = x + y;
            let ea = col * na / tot;
            let eb = col * nb / tot;
            (x - ea).powi(2) / ea + (y - eb).powi(2) / eb
        })
        .sum();
    finish(statistic, cells.len().saturating_sub(1))
}

fn finish(statistic: f64, dof: usize) -> Result<ChiSquare> {
    let p_value = if dof == 0 {
        1.0
    } else {
        regularized_upper_gamma(dof as f64 / 2.0, statistic / 2.0)?
    };
    Ok(ChiSquare { statistic, dof, p_value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::normal_cdf;

    #[test]
    fn summary_values() {
        let s = summarize(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.variance - 5.0 / 3.0).abs() < 1e-15);
        assert!((s.std_error - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn ks_examples() {
        // single point at the median: D = 1/2
        assert!((ks_statistic(&[0.0], normal_cdf) - 0.5).abs() < 1e-15);
        let grid: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        assert!((ks_statistic(&grid, |x| x) - 0.0005).abs() < 1e-12);
        assert!((ks_null_sd() - 0.2603).abs() < 1e-4);
    }

    #[test]
    fn covariance_examples() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let (c, _) = covariance(&x, &x);
        assert!((c - summarize(&x).variance).abs() < 1e-15);
        let (c, _) = covariance(&x, &[4.0, 3.0, 2.0, 1.0]);
        assert!((c + 5.0 / 3.0).abs() < 1e-15);
        let (r, _) = variance_ratio(&x, &[2.0, 4.0, 6.0, 8.0]);
        assert!((r - 4.0).abs() < 1e-14);
    }

    #[test]
    fn chi_square_examples() {
        // perfect fit
        let c = chi_square_gof(&[50, 50], &[0.5, 0.5]).unwrap();
        assert_eq!(c.statistic, 0.0);
        assert_eq!(c.p_value, 1.0);
        // (60-50)^2/50 * 2 = 4 on 1 dof: p = 0.0455
        let c = chi_square_gof(&[60, 40], &[0.5, 0.5]).unwrap();
        assert!((c.statistic - 4.0).abs() < 1e-12);
        assert!((c.p_value - 0.045_500_263_896_358_4).abs() < 1e-9);
        // pooling of tiny cells
        let c = chi_square_gof(&[500, 499, 1], &[0.5, 0.4995, 0.0005]).unwrap();
        assert_eq!(c.dof, 1);
        let c = chi_square_two_sample(&[100, 200, 3], &[100, 200, 4]).unwrap();
        assert_eq!(c.dof, 1);
        assert!(c.p_value > 0.9);
        assert!(chi_square_two_sample(&[1], &[1, 2]).is_err());
    }
}
