use crate::error::{Error, Result};

use super::Anchor;

/// Piecewise-linear interpolation of `(xs, ys)` at `queries`; values are held
/// constant outside `[xs[0], xs[last]]`. `xs` must be strictly increasing.
pub fn linear_interp(xs: &[f64], ys: &[f64], queries: &[f64]) -> Vec<f64> {
    debug_assert_eq!(xs.len(), ys.len());
    let last = xs.len() - 1;
    queries
        .iter()
        .map(|&q| {
            if q <= xs[0] {
                return ys[0];
            }
            if q >= xs[last] {
                return ys[last];
            }
            let j = xs.partition_point(|&x| x <= q);
            let (x0, x1) = (xs[j - 1], xs[j]);
            let w = (q - x0) / (x1 - x0);
            ys[j - 1] + w * (ys[j] - ys[j - 1])
        })
        .collect()
}

pub fn interp_amplitude_linear(anchors: &[Anchor], times: &[f64]) -> Result<Vec<f64>> {
    if anchors.is_empty() {
        return Err(Error::usage("amplitude interpolation needs at least one anchor"));
    }
    let xs: Vec<f64> = anchors.iter().map(|a| a.time).collect();
    let ys: Vec<f64> = anchors.iter().map(|a| a.amplitude).collect();
    Ok(linear_interp(&xs, &ys, times))
}

/// Natural cubic spline through the anchor frequencies. Fewer than two
/// anchors yields a constant; queries outside the anchor span hold the end
/// values.
pub fn interp_frequency_spline(anchors: &[Anchor], times: &[f64]) -> Result<Vec<f64>> {
    match anchors.len() {
        0 => Err(Error::usage("frequency interpolation needs at least one anchor")),
        1 => Ok(vec![anchors[0].frequency; times.len()]),
        _ => {
            let xs: Vec<f64> = anchors.iter().map(|a| a.time).collect();
            let ys: Vec<f64> = anchors.iter().map(|a| a.frequency).collect();
            let spline = NaturalSpline::new(xs, ys)?;
            Ok(times.iter().map(|&t| spline.eval(t)).collect())
        }
    }
}

/// Cubic spline with zero second derivative at both ends.
#[derive(Debug, Clone)]
pub struct NaturalSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    // second derivatives at the knots
    m: Vec<f64>,
}

impl NaturalSpline {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let n = xs.len();
        if n < 2 || ys.len() != n {
            return Err(Error::usage("spline needs at least two matching knots"));
        }
        if xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::usage("spline knots must be strictly increasing"));
        }
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the interior equations
            //   h[i-1] m[i-1] + 2 (h[i-1] + h[i]) m[i] + h[i] m[i+1] = rhs[i]
            let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            for i in 1..n - 1 {
                diag[i - 1] = 2.0 * (h[i - 1] + h[i]);
                rhs[i - 1] = 6.0 * ((ys[i + 1] - ys[i]) / h[i] - (ys[i] - ys[i - 1]) / h[i - 1]);
            }
            for j in 1..k {
                let sub = h[j];
                let w = sub / diag[j - 1];
                diag[j] -= w * h[j];
                rhs[j] -= w * rhs[j - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for j in (0..k - 1).rev() {
                m[j + 1] = (rhs[j] - h[j + 1] * m[j + 2]) / diag[j];
            }
        }
        Ok(Self { xs, ys, m })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let j = self.xs.partition_point(|&v| v <= x) - 1;
        let h = self.xs[j + 1] - self.xs[j];
        let a = (self.xs[j + 1] - x) / h;
        let b = (x - self.xs[j]) / h;
        a * self.ys[j]
            + b * self.ys[j + 1]
            + ((a * a * a - a) * self.m[j] + (b * b * b - b) * self.m[j + 1]) * h * h / 6.0
    }
}
