//! Growth of `max{|A+A|, |AA|}` against `|A|`, fitted on a log-log scale.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::set::RatSet;

#[derive(Clone, Debug, Serialize)]
pub struct GrowthRow {
    pub size: usize,
    pub sumset_len: usize,
    pub productset_len: usize,
    pub max_len: usize,
    /// `ln max / ln |A|`, approximate.
    pub pointwise_exponent: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthFit {
    pub rows: Vec<GrowthRow>,
    /// Least-squares slope of `ln max` against `ln |A|`.
    pub exponent: f64,
    pub intercept: f64,
}

impl GrowthFit {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("size,sumset_len,productset_len,max_len,pointwise_exponent\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{:.6}\n",
                r.size, r.sumset_len, r.productset_len, r.max_len, r.pointwise_exponent
            ));
        }
        out
    }
}

/// Measures every set and fits `max ≈ e^b·|A|^slope`.
pub fn growth_fit(sets: &[RatSet]) -> Result<GrowthFit> {
    let mut rows = Vec::with_capacity(sets.len());
    for a in sets {
        if a.len() < 2 {
            return domain("growth fits need sets of size at least 2");
        }
        let sumset_len = a.sumset(a)?.len();
        let productset_len = a.productset(a)?.len();
        let max_len = sumset_len.max(productset_len);
        rows.push(GrowthRow {
            size: a.len(),
            sumset_len,
            productset_len,
            max_len,
            pointwise_exponent: (max_len as f64).ln() / (a.len() as f64).ln(),
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| (r.size as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| (r.max_len as f64).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if rows.len() < 2 || sxx == 0.0 {
        return domain("growth fits need at least two distinct sizes");
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let exponent = sxy / sxx;
    Ok(GrowthFit {
        rows,
        exponent,
        intercept: my - exponent * mx,
    })
}
