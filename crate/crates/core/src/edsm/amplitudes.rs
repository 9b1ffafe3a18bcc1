use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

/// Condition numbers above this are reported as ill-conditioned fits.
pub const CONDITION_WARNING: f64 = 1e10;

/// Least-squares complex amplitudes for a set of poles.
#[derive(Debug, Clone)]
pub struct AmplitudeFit {
    pub alphas: Vec<Complex<f64>>,
    /// 2-norm condition number of the column-normalized Vandermonde matrix.
    pub condition: f64,
}

/// `len x K` Vandermonde matrix with `V[n][k] = z_k^n`.
pub fn vandermonde(poles: &[Complex<f64>], len: usize) -> DMatrix<Complex<f64>> {
    let mut v = DMatrix::from_element(len, poles.len(), Complex::new(0.0, 0.0));
    for (k, z) in poles.iter().enumerate() {
        let mut p = Complex::new(1.0, 0.0);
        for n in 0..len {
            v[(n, k)] = p;
            p *= z;
        }
    }
    v
}

/// Solves `x = V alpha` in the least-squares sense through the
/// pseudo-inverse of the Vandermonde matrix `V`.
pub fn vandermonde_amplitudes(frame: &[f64], poles: &[Complex<f64>]) -> Result<AmplitudeFit> {
    if poles.is_empty() {
        return Ok(AmplitudeFit {
            alphas: Vec::new(),
            condition: 1.0,
        });
    }
    if poles.len() > frame.len() {
        return Err(Error::usage(format!(
            "{} poles cannot be fitted to {} samples",
            poles.len(),
            frame.len()
        )));
    }
    let mut v = vandermonde(poles, frame.len());
    // Column scaling keeps growing/decaying columns comparable.
    let norms: Vec<f64> = v.column_iter().map(|c| c.norm()).collect();
    for (k, &nrm) in norms.iter().enumerate() {
        if !(nrm.is_finite() && nrm > 0.0) {
            return Err(Error::analysis(format!("degenerate pole {}", poles[k])));
        }
        v.column_mut(k).unscale_mut(nrm);
    }
    let x = DVector::from_iterator(frame.len(), frame.iter().map(|&s| Complex::new(s, 0.0)));
    let svd = v.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition > CONDITION_WARNING {
        log::warn!("Vandermonde system ill-conditioned (condition number {condition:.3e}); poles nearly coincide");
    }
    let beta = svd
        .solve(&x, smax * f64::EPSILON * frame.len() as f64)
        .map_err(|e| Error::analysis(format!("Vandermonde solve failed: {e}")))?;
    let alphas = beta.iter().zip(&norms).map(|(b, n)| b / *n).collect();
    Ok(AmplitudeFit { alphas, condition })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vandermonde_matches_definition() {
        let z = [Complex::new(0.5, 0.5), Complex::new(2.0, 0.0)];
        let v = vandermonde(&z, 4);
        for n in 0..4 {
            for k in 0..2 {
                assert!((v[(n, k)] - z[k].powu(n as u32)).norm() < 1e-15);
            }
        }
        assert_eq!(v[(0, 0)], Complex::new(1.0, 0.0));
        assert_eq!(v[(3, 1)], Complex::new(8.0, 0.0));
    }

    #[test]
    fn dc_fit() {
        let fit = vandermonde_amplitudes(&[0.3; 12], &[Complex::new(1.0, 0.0)]).unwrap();
        assert!((fit.alphas[0] - Complex::new(0.3, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn real_cosine_conjugate_pair() {
        let (a, w, phi) = (0.8, 0.7, 0.4);
        let x: Vec<f64> = (0..30).map(|n| a * (w * n as f64 + phi).cos()).collect();
        let z = Complex::new(0.0, w).exp();
        let fit = vandermonde_amplitudes(&x, &[z, z.conj()]).unwrap();
        assert!((fit.alphas[0].norm() - a / 2.0).abs() < 1e-12);
        assert!((fit.alphas[0].arg() - phi).abs() < 1e-12);
        assert!((fit.alphas[1].arg() + phi).abs() < 1e-12);
    }

    #[test]
    fn coincident_poles_report_condition() {
        let z = Complex::new(0.0, 0.3).exp();
        let x: Vec<f64> = (0..30).map(|n| (0.3 * n as f64).cos()).collect();
        let fit = vandermonde_amplitudes(&x, &[z, z * Complex::new(1.0, 1e-13)]).unwrap();
        assert!(fit.condition > CONDITION_WARNING);
    }
}
