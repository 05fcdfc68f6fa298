use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Collinearity cutoff: a Cholesky pivot below this fraction of its
/// diagonal entry means the column is (numerically) a combination of the
/// previous ones.
const PIVOT_TOLERANCE: f64 = 1e-10;
const COLLINEAR_CORRELATION: f64 = 1.0 - 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coefficient {
    pub name: String,
    pub beta: f64,
    pub std_error: f64,
    pub t: f64,
    pub p_value: f64,
}

impl Coefficient {
    pub fn stars(&self) -> &'static str {
        stars(self.p_value)
    }
}

pub fn stars(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.1 {
        "*"
    } else {
        ""
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionResult {
    pub outcome: String,
    pub intercept: Coefficient,
    pub coefficients: Vec<Coefficient>,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    /// `None` for a perfect fit (no residual variation).
    pub durbin_watson: Option<f64>,
    pub n: usize,
    pub standardized: bool,
    /// Regions used, in the order residuals were taken.
    pub regions: Vec<String>,
    pub residuals: Vec<f64>,
}

/// Sum of squared successive residual differences over the residual sum of
/// squares.
pub fn durbin_watson(residuals: &[f64]) -> Option<f64> {
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    if rss == 0.0 {
        return None;
    }
    Some(residuals.windows(2).map(|w| (w[1] - w[0]) * (w[1] - w[0])).sum::<f64>() / rss)
}

fn zscore(v: &[f64]) -> Option<Vec<f64>> {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let sd = (v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt();
    (sd > 0.0).then(|| v.iter().map(|x| (x - mean) / sd).collect())
}

fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma) * (x - ma)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb) * (y - mb)).sum();
    if va == 0.0 || vb == 0.0 {
        return 0.0;
    }
    cov / (va * vb).sqrt()
}

/// Lower-triangular Cholesky factor; `Err(j)` names the first column whose
/// pivot vanishes.
fn cholesky(a: &[Vec<f64>]) -> std::result::Result<Vec<Vec<f64>>, usize> {
    let p = a.len();
    let mut l = vec![vec![0.0; p]; p];
    for j in 0..p {
        let mut d = a[j][j];
        for k in 0..j {
            d -= l[j][k] * l[j][k];
        }
        if !(d > PIVOT_TOLERANCE * a[j][j].abs().max(f64::MIN_POSITIVE)) {
            return Err(j);
        }
        let djj = d.sqrt();
        l[j][j] = djj;
        for i in j + 1..p {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            l[i][j] = s / djj;
        }
    }
    Ok(l)
}

/// Inverse of `L L^T` from its factor.
fn cholesky_inverse(l: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let p = l.len();
    // Invert L (lower triangular) column by column.
    let mut linv = vec![vec![0.0; p]; p];
    for j in 0..p {
        linv[j][j] = 1.0 / l[j][j];
        for i in j + 1..p {
            let s: f64 = (j..i).map(|k| l[i][k] * linv[k][j]).sum();
            linv[i][j] = -s / l[i][i];
        }
    }
    let mut inv = vec![vec![0.0; p]; p];
    for i in 0..p {
        for j in 0..=i {
            let s: f64 = (i..p).map(|k| linv[k][i] * linv[k][j]).sum();
            inv[i][j] = s;
            inv[j][i] = s;
        }
    }
    inv
}

/// OLS with intercept over the regions present in every input, taken in
/// lexicographic order. With `standardize`, the outcome and predictors are
/// z-scored (sample SD) first and betas are standardized coefficients.
pub fn ols_regress(
    outcome_name: &str,
    outcome: &BTreeMap<String, f64>,
    predictors: &[(String, BTreeMap<String, f64>)],
    standardize: bool,
) -> Result<RegressionResult> {
    let regions: Vec<String> = outcome
        .keys()
        .filter(|r| predictors.iter().all(|(_, m)| m.contains_key(*r)))
        .cloned()
        .collect();
    let n = regions.len();
    let p = predictors.len();
    if n < p + 2 {
        return Err(Error::Invalid(format!(
            "regression of {outcome_name} needs at least {} regions with every value, have {n}",
            p + 2
        )));
    }
    let mut y: Vec<f64> = regions.iter().map(|r| outcome[r]).collect();
    let mut cols: Vec<Vec<f64>> = predictors.iter().map(|(_, m)| regions.iter().map(|r| m[r]).collect()).collect();
    if y.iter().chain(cols.iter().flatten()).any(|v| !v.is_finite()) {
        return Err(Error::Invalid("regression inputs must be finite".into()));
    }
    let names: Vec<String> = predictors.iter().map(|(n, _)| n.clone()).collect();
    let suspects = |j: usize, cols: &[Vec<f64>]| -> Vec<String> {
        let mut s = vec![names[j].clone()];
        for (k, c) in cols.iter().enumerate() {
            if k != j && correlation(&cols[j], c).abs() >= COLLINEAR_CORRELATION {
                s.push(names[k].clone());
            }
        }
        s
    };
    if standardize {
        y = zscore(&y).ok_or_else(|| Error::Invalid(format!("outcome {outcome_name} is constant")))?;
        for j in 0..p {
            cols[j] = match zscore(&cols[j]) {
                Some(z) => z,
                None => return Err(Error::Collinear(vec![names[j].clone()])),
            };
        }
    }
    // Design with the intercept first.
    let x: Vec<Vec<f64>> = (0..n).map(|i| std::iter::once(1.0).chain(cols.iter().map(|c| c[i])).collect()).collect();
    let q = p + 1;
    let mut xtx = vec![vec![0.0; q]; q];
    let mut xty = vec![0.0; q];
    for (row, &yi) in x.iter().zip(&y) {
        for a in 0..q {
            xty[a] += row[a] * yi;
            for b in 0..=a {
                xtx[a][b] += row[a] * row[b];
            }
        }
    }
    for a in 0..q {
        for b in 0..a {
            xtx[b][a] = xtx[a][b];
        }
    }
    let l = match cholesky(&xtx) {
        Ok(l) => l,
        Err(0) => return Err(Error::Invalid("regression design has no variation".into())),
        Err(j) => return Err(Error::Collinear(suspects(j - 1, &cols))),
    };
    let inv = cholesky_inverse(&l);
    let beta: Vec<f64> = (0..q).map(|a| (0..q).map(|b| inv[a][b] * xty[b]).sum()).collect();
    let residuals: Vec<f64> =
        x.iter().zip(&y).map(|(row, yi)| yi - row.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>()).collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let ybar = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - ybar) * (v - ybar)).sum();
    if tss == 0.0 {
        return Err(Error::Invalid(format!("outcome {outcome_name} is constant")));
    }
    let df = (n - p - 1) as f64;
    let sigma2 = rss / df;
    let r_squared = 1.0 - rss / tss;
    let adj_r_squared = 1.0 - (1.0 - r_squared) * (n as f64 - 1.0) / df;
    let t_dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::Invalid(e.to_string()))?;
    let coef = |a: usize, name: String| {
        let se = (sigma2 * inv[a][a]).max(0.0).sqrt();
        let t = if se > 0.0 { beta[a] / se } else if beta[a] == 0.0 { 0.0 } else { f64::INFINITY.copysign(beta[a]) };
        let p_value = if t.is_finite() { 2.0 * (1.0 - t_dist.cdf(t.abs())) } else { 0.0 };
        Coefficient { name, beta: beta[a], std_error: se, t, p_value: p_value.clamp(0.0, 1.0) }
    };
    let perfect = rss <= 1e-20 * tss;
    Ok(RegressionResult {
        outcome: outcome_name.to_string(),
        intercept: coef(0, "(intercept)".into()),
        coefficients: (0..p).map(|j| coef(j + 1, names[j].clone())).collect(),
        r_squared: if perfect { 1.0 } else { r_squared },
        adj_r_squared: if perfect { 1.0 } else { adj_r_squared },
        durbin_watson: if perfect { None } else { durbin_watson(&residuals) },
        n,
        standardized: standardize,
        regions,
        residuals,
    })
}

/// Table layout: one row per predictor (beta, SE, stars), then summary rows.
pub fn write_regression_csv<W: Write>(results: &[RegressionResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["outcome", "predictor", "beta", "se", "p_value", "stars"])?;
    for r in results {
        for c in std::iter::once(&r.intercept).chain(&r.coefficients) {
            w.write_record([
                r.outcome.as_str(),
                &c.name,
                &format!("{:.6}", c.beta),
                &format!("{:.6}", c.std_error),
                &format!("{:.6}", c.p_value),
                c.stars(),
            ])?;
        }
        let dw = r.durbin_watson.map(|d| format!("{d:.6}")).unwrap_or_default();
        w.write_record([r.outcome.as_str(), "adj_r2", &format!("{:.6}", r.adj_r_squared), "", "", ""])?;
        w.write_record([r.outcome.as_str(), "durbin_watson", &dw, "", "", ""])?;
        w.write_record([r.outcome.as_str(), "n", &r.n.to_string(), "", "", ""])?;
    }
    w.flush().map_err(|e| Error::io("regression csv", e))?;
    Ok(())
}
