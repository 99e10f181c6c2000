//! Partial correlation from a (pseudo-)correlation matrix and the Fisher-z
//! conditional-independence decision.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::graphs::MixedGraph;
use crate::{Error, Result};

/// Clamp applied to rho before the Fisher transform.
pub const RHO_CLAMP: f64 = 1.0 - 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CiDecision {
    pub independent: bool,
    /// sqrt(n - |S| - 3) * |z|
    pub statistic: f64,
    /// Phi^{-1}(1 - alpha/2)
    pub threshold: f64,
    pub rho: f64,
}

#[derive(Debug, Clone)]
pub struct CiContext {
    pub corr: DMatrix<f64>,
    pub n: usize,
    pub alpha: f64,
}

impl CiContext {
    pub fn new(corr: DMatrix<f64>, n: usize, alpha: f64) -> Result<CiContext> {
        if n < 1 {
            return Err(Error::Parameter("n must be >= 1".into()));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Parameter(format!("alpha {alpha} outside (0, 1)")));
        }
        if corr.nrows() != corr.ncols() {
            return Err(Error::Input("correlation matrix must be square".into()));
        }
        Ok(CiContext { corr, n, alpha })
    }
}

/// Quantile of the standard normal distribution.
pub fn inverse_normal_cdf(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Input(format!("quantile {q} outside (0, 1)")));
    }
    let normal = Normal::new(0.0, 1.0).unwrap();
    Ok(normal.inverse_cdf(q))
}

/// Partial correlation of i and j given S, by inverting the submatrix of
/// the correlation matrix over {i, j} union S.
pub fn partial_correlation(
    corr: &DMatrix<f64>,
    i: usize,
    j: usize,
    s: &[usize],
) -> Result<f64> {
    let p = corr.nrows();
    if i >= p || j >= p || s.iter().any(|&v| v >= p) {
        return Err(Error::Input("index out of range".into()));
    }
    if i == j || s.contains(&i) || s.contains(&j) {
        return Err(Error::Input("i, j and S must be disjoint".into()));
    }
    if s.is_empty() {
        return Ok(corr[(i, j)].clamp(-1.0, 1.0));
    }

    let mut idx = Vec::with_capacity(s.len() + 2);
    idx.push(i);
    idx.push(j);
    idx.extend_from_slice(s);
    let m = idx.len();
    let mut sub = DMatrix::zeros(m, m);
    for a in 0..m {
        for b in 0..m {
            sub[(a, b)] = corr[(idx[a], idx[b])];
        }
    }

    let rho_from_inverse = |inv: &DMatrix<f64>| -> Option<f64> {
        let denom = inv[(0, 0)] * inv[(1, 1)];
        if denom <= 0.0 || !denom.is_finite() {
            return None;
        }
        let rho = -inv[(0, 1)] / denom.sqrt();
        rho.is_finite().then_some(rho)
    };

    if let Some(inv) = sub.clone().try_inverse() {
        if let Some(rho) = rho_from_inverse(&inv) {
            return Ok(rho.clamp(-1.0, 1.0));
        }
    }
    // the pseudo-correlation matrix need not be strictly PD; retry with a
    // small ridge, then fall back to the maximally-dependent convention
    let mut ridged = sub;
    for a in 0..m {
        ridged[(a, a)] += 1e-10;
    }
    if let Some(inv) = ridged.try_inverse() {
        if let Some(rho) = rho_from_inverse(&inv) {
            return Ok(rho.clamp(-1.0, 1.0));
        }
    }
    Ok(RHO_CLAMP)
}

/// Fisher-z test for zero partial correlation: independent iff
/// sqrt(n - |S| - 3) * |z(rho)| <= Phi^{-1}(1 - alpha/2).
pub fn fisher_z_ci_test(
    ctx: &CiContext,
    u: usize,
    v: usize,
    s: &[usize],
) -> Result<CiDecision> {
    let threshold = inverse_normal_cdf(1.0 - ctx.alpha / 2.0)?;
    let df = ctx.n as i64 - s.len() as i64 - 3;
    let rho = partial_correlation(&ctx.corr, u, v, s)?;
    if df < 1 {
        eprintln!(
            "warning: n - |S| - 3 = {df} < 1 for ({u},{v}|{:?}); declaring independent",
            s
        );
        return Ok(CiDecision {
            independent: true,
            statistic: 0.0,
            threshold,
            rho,
        });
    }
    let r = rho.clamp(-RHO_CLAMP, RHO_CLAMP);
    let z = 0.5 * ((1.0 + r) / (1.0 - r)).ln();
    let statistic = (df as f64).sqrt() * z.abs();
    Ok(CiDecision {
        independent: statistic <= threshold,
        statistic,
        threshold,
        rho,
    })
}

/// Perfect CI oracle backed by d-separation on a DAG.
pub fn oracle_ci_test(
    dag: MixedGraph,
) -> impl Fn(usize, usize, &BTreeSet<usize>) -> Result<bool> {
    move |u, v, s| crate::graphs::d_separated(&dag, u, v, s)
}

/// Sample Pearson correlation matrix of real-valued columns.
pub fn pearson_correlation_matrix(columns: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let p = columns.len();
    if p == 0 {
        return Err(Error::Input("no columns".into()));
    }
    let n = columns[0].len();
    if n < 2 || columns.iter().any(|c| c.len() != n) {
        return Err(Error::Input("columns must share length >= 2".into()));
    }
    let means: Vec<f64> = columns.iter().map(|c| c.iter().sum::<f64>() / n as f64).collect();
    let sds: Vec<f64> = columns
        .iter()
        .zip(&means)
        .map(|(c, &m)| (c.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n as f64).sqrt())
        .collect();
    let mut corr = DMatrix::identity(p, p);
    for i in 0..p {
        for j in (i + 1)..p {
            let cov = columns[i]
                .iter()
                .zip(&columns[j])
                .map(|(a, b)| (a - means[i]) * (b - means[j]))
                .sum::<f64>()
                / n as f64;
            let r = if sds[i] > 0.0 && sds[j] > 0.0 {
                cov / (sds[i] * sds[j])
            } else {
                0.0
            };
            corr[(i, j)] = r;
            corr[(j, i)] = r;
        }
    }
    Ok(corr)
}
