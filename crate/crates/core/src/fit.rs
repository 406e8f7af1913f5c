//! Least-squares power-law fits in log-log coordinates.

use alloc::vec::Vec;

use crate::{Error, Result};

/// How a fitted slope is compared against its prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// `|slope − predicted| ≤ tol`.
    TwoSided,
    /// Lower-bound estimate: `slope ≥ predicted − tol`.
    Lower,
    /// Upper-bound estimate: `slope ≤ predicted + tol`.
    Upper,
}

/// Outcome of one slope fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    /// Fitted exponent.
    pub slope: f64,
    /// Fitted `log C`.
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    /// Predicted exponent.
    pub predicted: f64,
    /// Allowed slack.
    pub tolerance: f64,
    /// Comparison mode.
    pub kind: BoundKind,
    /// Whether the slope satisfies the comparison.
    pub verdict: bool,
}

/// Ordinary least squares of `log y` against `log x`. Needs at least three
/// points, all strictly positive.
pub fn fit_power_law(x: &[f64], y: &[f64], predicted: f64, tolerance: f64, kind: BoundKind) -> Result<ScalingFit> {
    if x.len() != y.len() {
        return Err(Error::Domain("abscissa and ordinate lengths differ"));
    }
    if x.len() < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: x.len() });
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::Domain("log-log fit needs finite positive data"));
    }
    let lx: Vec<f64> = x.iter().map(|v| libm::log(*v)).collect();
    let ly: Vec<f64> = y.iter().map(|v| libm::log(*v)).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (a, b) in lx.iter().zip(&ly) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
    }
    if sxx == 0.0 {
        return Err(Error::Domain("all abscissae coincide"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(a, b)| {
            let e = b - intercept - slope * a;
            e * e
        })
        .sum();
    let verdict = match kind {
        BoundKind::TwoSided => (slope - predicted).abs() <= tolerance,
        BoundKind::Lower => slope >= predicted - tolerance,
        BoundKind::Upper => slope <= predicted + tolerance,
    };
    Ok(ScalingFit { slope, intercept, residual: libm::sqrt(ss / n), predicted, tolerance, kind, verdict })
}

/// `max / min` of a positive sequence; used for two-sided "bounded ratio" checks.
pub fn spread(values: &[f64]) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for v in values {
        lo = lo.min(*v);
        hi = hi.max(*v);
    }
    hi / lo
}

/// Whether every element of the last `tail` entries exceeds its predecessor.
pub fn strictly_increasing_tail(values: &[f64], tail: usize) -> bool {
    if values.len() < tail || tail < 2 {
        return false;
    }
    values[values.len() - tail..].windows(2).all(|w| w[1] > w[0])
}
