//! Log-log power-law fits and empirical error exponents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 4;
/// Smallest `max L / min L` for which an error exponent is reported.
pub const MIN_KAPPA_SPAN: f64 = 8.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Least-squares slope of `log N` against `log L`.
    pub exponent: f64,
    pub exponent_se: f64,
    /// Exponent rounded to the nearest integer, used for the coefficient and
    /// the error analysis.
    pub integer_exponent: i32,
    /// Geometric mean of `N / L^h` at the integer exponent `h`.
    pub coefficient: f64,
    /// `log N - (intercept + slope log L)` per grid point.
    pub residuals: Vec<f64>,
    /// Decay exponent of `N / L^h - c`, from successive differences.
    pub kappa_hat: Option<f64>,
    pub kappa_se: Option<f64>,
}

struct Line {
    slope: f64,
    intercept: f64,
    slope_se: f64,
}

fn least_squares(x: &[f64], y: &[f64]) -> Line {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let slope_se = if x.len() > 2 {
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    Line {
        slope,
        intercept,
        slope_se,
    }
}

/// Fits `N(L) ~ c L^h` to `(L, N)` pairs with increasing `L`.
pub fn powerlaw_fit(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < MIN_POINTS {
        return Err(Error::Fit(format!(
            "need at least {MIN_POINTS} grid points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(l, n)| !(l > 0.0 && n > 0.0) || !l.is_finite() || !n.is_finite()) {
        return Err(Error::Fit("grid values and counts must be positive".into()));
    }
    if points.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::Fit("grid must be strictly increasing".into()));
    }
    if points.iter().all(|p| p.1 == points[0].1) {
        return Err(Error::Fit("constant counts".into()));
    }
    let x: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let line = least_squares(&x, &y);
    let residuals = x
        .iter()
        .zip(&y)
        .map(|(a, b)| b - line.intercept - line.slope * a)
        .collect();

    let h = line.slope.round();
    let r: Vec<f64> = points.iter().map(|&(l, n)| n / l.powf(h)).collect();
    let coefficient = (x.iter().zip(&y).map(|(a, b)| b - h * a).sum::<f64>() / x.len() as f64).exp();

    let span = points[points.len() - 1].0 / points[0].0;
    let (mut kappa_hat, mut kappa_se) = (None, None);
    if span >= MIN_KAPPA_SPAN {
        let scale = r.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let mut dx = Vec::new();
        let mut dy = Vec::new();
        for j in 0..r.len() - 1 {
            let d = (r[j + 1] - r[j]).abs();
            if d > 1e-12 * scale {
                dx.push(0.5 * (x[j] + x[j + 1]));
                dy.push(d.ln());
            }
        }
        if dx.len() >= 3 {
            let k = least_squares(&dx, &dy);
            kappa_hat = Some(-k.slope);
            kappa_se = Some(k.slope_se);
        }
    }

    Ok(FitResult {
        exponent: line.slope,
        exponent_se: line.slope_se,
        integer_exponent: h as i32,
        coefficient,
        residuals,
        kappa_hat,
        kappa_se,
    })
}

/// `n` points from `lo` to `hi` in geometric progression, rounded to
/// distinct integers.
pub fn geometric_grid(lo: u64, hi: u64, n: usize) -> Vec<u64> {
    if n <= 1 || lo >= hi {
        return vec![hi];
    }
    let ratio = (hi as f64 / lo as f64).powf(1.0 / (n - 1) as f64);
    let mut out: Vec<u64> = (0..n)
        .map(|i| (lo as f64 * ratio.powi(i as i32)).round() as u64)
        .collect();
    out[n - 1] = hi;
    out.dedup();
    out
}

/// Real-valued geometric grid.
pub fn geometric_grid_f64(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![hi];
    }
    let ratio = (hi / lo).powf(1.0 / (n - 1) as f64);
    (0..n).map(|i| lo * ratio.powi(i as i32)).collect()
}
