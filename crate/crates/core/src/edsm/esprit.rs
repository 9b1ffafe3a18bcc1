use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

use super::build_hankel;

/// Singular values below this fraction of the largest one are treated as
/// noise subspace.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Poles recovered from one frame, with the order actually used.
#[derive(Debug, Clone)]
pub struct EspritPoles {
    pub poles: Vec<Complex<f64>>,
    pub requested_order: usize,
    pub effective_order: usize,
    /// Singular values of the Hankel matrix, descending.
    pub singular_values: Vec<f64>,
}

/// Dominant right singular vectors of the Hankel matrix of one frame.
#[derive(Debug, Clone)]
pub struct SignalSubspace {
    /// `n_cols x rank`, columns ordered by decreasing singular value.
    basis: DMatrix<f64>,
    /// All singular values, descending.
    pub singular_values: Vec<f64>,
    /// Largest order the Hankel shape allows: `min(N, R) - 1`.
    pub max_order: usize,
}

impl SignalSubspace {
    /// Number of singular values above the relative tolerance.
    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    /// Eigenvalues of `Phi` solving `V1(without last row) Phi = V1(without
    /// first row)` in the least-squares sense, `V1` being the first `k`
    /// basis vectors.
    pub fn poles(&self, k: usize) -> Result<Vec<Complex<f64>>> {
        if k > self.rank() {
            return Err(Error::usage(format!("order {k} exceeds subspace rank {}", self.rank())));
        }
        if k == 0 {
            return Ok(Vec::new());
        }
        let n = self.basis.nrows();
        let v1 = self.basis.columns(0, k);
        let down = v1.rows(0, n - 1).into_owned();
        let up = v1.rows(1, n - 1).into_owned();
        let phi = down
            .svd(true, true)
            .solve(&up, f64::EPSILON)
            .map_err(|e| Error::analysis(format!("shift-invariance solve failed: {e}")))?;
        Ok(phi.complex_eigenvalues().iter().copied().collect())
    }
}

/// SVD of the `R x N` Hankel matrix of `frame`, keeping the right singular
/// vectors whose singular values exceed `tolerance` times the largest.
pub fn signal_subspace(frame: &[f64], n_cols: usize, tolerance: f64) -> Result<SignalSubspace> {
    let len = frame.len();
    if n_cols == 0 || n_cols > len {
        return Err(Error::usage(format!("Hankel column count {n_cols} outside 1..={len}")));
    }
    let rows = len - n_cols + 1;
    // N > K and R > K; with a single column/row no shift relation exists.
    let max_order = n_cols.min(rows).saturating_sub(1);
    let x = build_hankel(frame, n_cols)?;
    let svd = x.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");

    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let singular_values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();

    let largest = singular_values.first().copied().unwrap_or(0.0);
    let rank = if largest > 0.0 {
        singular_values.iter().take_while(|&&s| s > tolerance * largest).count()
    } else {
        0
    };
    let rank = rank.min(max_order);
    let basis = DMatrix::from_fn(n_cols, rank, |r, c| v_t[(order[c], r)]);
    Ok(SignalSubspace {
        basis,
        singular_values,
        max_order,
    })
}

/// ESPRIT: SVD of the Hankel matrix, keep the `k_exp` dominant right
/// singular vectors `V1`, solve the shift-invariance relation
/// `V1(without last row) Phi = V1(without first row)` in the least-squares
/// sense, and return the eigenvalues of `Phi`.
///
/// If the Hankel matrix has fewer than `k_exp` significant singular values
/// the order is reduced to its numerical rank.
pub fn esprit_poles(frame: &[f64], k_exp: usize, n_cols: usize) -> Result<EspritPoles> {
    esprit_poles_with_tolerance(frame, k_exp, n_cols, RANK_TOLERANCE)
}

/// [`esprit_poles`] with an explicit relative rank tolerance.
pub fn esprit_poles_with_tolerance(frame: &[f64], k_exp: usize, n_cols: usize, tolerance: f64) -> Result<EspritPoles> {
    let sub = signal_subspace(frame, n_cols, tolerance)?;
    if k_exp > sub.max_order {
        return Err(Error::usage(format!(
            "order {k_exp} needs more than {k_exp} rows and columns (have {} x {n_cols})",
            frame.len() + 1 - n_cols
        )));
    }
    let k = k_exp.min(sub.rank());
    if k < k_exp {
        log::debug!("ESPRIT order reduced from {k_exp} to numerical rank {k}");
    }
    Ok(EspritPoles {
        poles: sub.poles(k)?,
        requested_order: k_exp,
        effective_order: k,
        singular_values: sub.singular_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sort_poles(mut p: Vec<Complex<f64>>) -> Vec<Complex<f64>> {
        p.sort_by(|a, b| a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re)));
        p
    }

    #[test]
    fn damped_cosine_pole_pair() {
        let x: Vec<f64> = (0..64)
            .map(|n| (-0.01 * n as f64).exp() * (0.2 * std::f64::consts::PI * n as f64).cos())
            .collect();
        let est = esprit_poles(&x, 2, 32).unwrap();
        assert_eq!(est.effective_order, 2);
        let truth = Complex::new(-0.01, 0.2 * std::f64::consts::PI).exp();
        let p = sort_poles(est.poles);
        assert!((p[0] - truth.conj()).norm() < 1e-8);
        assert!((p[1] - truth).norm() < 1e-8);
    }

    #[test]
    fn constant_gives_unit_pole() {
        let est = esprit_poles(&[0.7; 20], 1, 10).unwrap();
        assert_eq!(est.poles.len(), 1);
        assert!((est.poles[0] - Complex::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn order_reduced_to_rank() {
        let x: Vec<f64> = (0..40).map(|n| (0.3 * n as f64).cos()).collect();
        let est = esprit_poles(&x, 6, 20).unwrap();
        assert_eq!(est.requested_order, 6);
        assert_eq!(est.effective_order, 2);
        let silent = esprit_poles(&[0.0; 40], 4, 20).unwrap();
        assert_eq!(silent.effective_order, 0);
        assert!(silent.poles.is_empty());
    }

    #[test]
    fn rejects_orders_beyond_hankel_shape() {
        assert!(esprit_poles(&[1.0; 10], 5, 5).is_err());
        assert!(esprit_poles(&[1.0; 10], 4, 5).is_ok());
    }
}
