use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Values at or below this are treated as exact zeros and left out of fits.
pub const ZERO_THRESHOLD: f64 = 1e-14;

/// Minimal number of positive rows a fit needs.
pub const MIN_FIT_ROWS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quantity {
    #[serde(rename = "d_H")]
    HausdorffDistance,
    #[serde(rename = "norm_S")]
    DefectNorm,
    #[serde(rename = "resolvent_gap")]
    ResolventGap,
    #[serde(rename = "rb_gap")]
    TwistedResolventGap,
}

impl Quantity {
    pub fn name(&self) -> &'static str {
        match self {
            Quantity::HausdorffDistance => "d_H",
            Quantity::DefectNorm => "norm_S",
            Quantity::ResolventGap => "resolvent_gap",
            Quantity::TwistedResolventGap => "rb_gap",
        }
    }
}

/// Rows (b, value) of one swept quantity, b strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub quantity: Quantity,
    pub model_hash: String,
    rows: Vec<(f64, f64)>,
}

impl SweepTable {
    pub fn new(quantity: Quantity, model_hash: impl Into<String>) -> Self {
        SweepTable {
            quantity,
            model_hash: model_hash.into(),
            rows: Vec::new(),
        }
    }

    pub fn from_rows(
        quantity: Quantity,
        model_hash: impl Into<String>,
        rows: Vec<(f64, f64)>,
    ) -> Result<Self> {
        let mut t = SweepTable::new(quantity, model_hash);
        for (b, v) in rows {
            t.push(b, v)?;
        }
        Ok(t)
    }

    pub fn push(&mut self, b: f64, value: f64) -> Result<()> {
        if let Some(&(last, _)) = self.rows.last() {
            if !(b > last) {
                return Err(Error::InvalidArgument(format!(
                    "b = {b} does not increase past {last}"
                )));
            }
        }
        if !(value >= 0.0) || !value.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "sweep value {value} at b = {b} is not a finite nonnegative number"
            )));
        }
        self.rows.push((b, value));
        Ok(())
    }

    pub fn rows(&self) -> &[(f64, f64)] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Log-log power-law fit `value ≈ C b^β̂` plus the sup-ratio statistic
/// `max value / b^β_ref`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderFit {
    pub slope: f64,
    pub log_constant: f64,
    pub constant: f64,
    #[serde(rename = "r2")]
    pub r_squared: f64,
    pub sup_ratio: f64,
    pub beta_ref: f64,
    pub ratio_stable: bool,
    pub rows_used: usize,
}

/// Unweighted least squares of ln(value) against ln(b) over the rows with
/// value > 1e−14 and b > 0.
///
/// `ratio_stable` holds when the largest ratio value/b^β_ref over the
/// smallest third of the used b-values is at most twice the largest ratio
/// over the largest third.
pub fn fit_holder(table: &SweepTable, beta_ref: f64) -> Result<HolderFit> {
    let used: Vec<(f64, f64)> = table
        .rows()
        .iter()
        .copied()
        .filter(|&(b, v)| b > 0.0 && v > ZERO_THRESHOLD)
        .collect();
    if used.len() < MIN_FIT_ROWS {
        return Err(Error::TooFewRows(used.len()));
    }
    let m = used.len() as f64;
    let xs: Vec<f64> = used.iter().map(|r| r.0.ln()).collect();
    let ys: Vec<f64> = used.iter().map(|r| r.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument(
            "fit needs at least two distinct b values".into(),
        ));
    }
    let slope = sxy / sxx;
    let log_constant = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - log_constant - slope * x).powi(2))
        .sum();
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - sse / syy).clamp(0.0, 1.0)
    };

    let ratios: Vec<f64> = used.iter().map(|&(b, v)| v / b.powf(beta_ref)).collect();
    let sup_ratio = ratios.iter().copied().fold(0.0, f64::max);
    let third = used.len() / 3;
    let small = ratios[..third].iter().copied().fold(0.0, f64::max);
    let large = ratios[used.len() - third..]
        .iter()
        .copied()
        .fold(0.0, f64::max);
    Ok(HolderFit {
        slope,
        log_constant,
        constant: log_constant.exp(),
        r_squared,
        sup_ratio,
        beta_ref,
        ratio_stable: small <= 2.0 * large,
        rows_used: used.len(),
    })
}

/// `count` points from `lo` to `hi` equally spaced in log b, endpoints included.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) || count < 2 {
        return Err(Error::InvalidArgument(format!(
            "log grid needs 0 < lo < hi and two points, got [{lo}, {hi}] with {count}"
        )));
    }
    let (a, c) = (lo.ln(), hi.ln());
    let step = (c - a) / (count - 1) as f64;
    Ok((0..count)
        .map(|k| match k {
            0 => lo,
            _ if k == count - 1 => hi,
            _ => (a + step * k as f64).exp(),
        })
        .collect())
}
