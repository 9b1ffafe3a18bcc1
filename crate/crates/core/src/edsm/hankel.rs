use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Hankel matrix with `n_cols` columns: `X[r][c] = x[r + c]`, shape
/// `(L - n_cols + 1) x n_cols`.
pub fn build_hankel(x: &[f64], n_cols: usize) -> Result<DMatrix<f64>> {
    let len = x.len();
    if n_cols == 0 || n_cols > len {
        return Err(Error::usage(format!("Hankel column count {n_cols} outside 1..={len}")));
    }
    let rows = len - n_cols + 1;
    Ok(DMatrix::from_fn(rows, n_cols, |r, c| x[r + c]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn four_sample_case() {
        let h = build_hankel(&[1.0, 2.0, 3.0, 4.0], 2).unwrap();
        assert_eq!(h.shape(), (3, 2));
        assert_eq!(h, DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 3.0, 3.0, 4.0]));
    }

    #[test]
    fn full_width_is_single_row() {
        let h = build_hankel(&[1.0, 2.0, 3.0, 4.0], 4).unwrap();
        assert_eq!(h, DMatrix::from_row_slice(1, 4, &[1.0, 2.0, 3.0, 4.0]));
        assert!(build_hankel(&[1.0], 2).is_err());
        assert!(build_hankel(&[1.0], 0).is_err());
    }

    proptest! {
        #[test]
        fn anti_diagonals_are_constant(x in prop::collection::vec(-10.0..10.0f64, 2..40), frac in 0.0..1.0f64) {
            let n = 1 + ((x.len() - 1) as f64 * frac) as usize;
            let h = build_hankel(&x, n).unwrap();
            for r in 0..h.nrows() - 1 {
                for c in 1..h.ncols() {
                    prop_assert_eq!(h[(r, c)], h[(r + 1, c - 1)]);
                }
            }
            prop_assert_eq!(h[(h.nrows() - 1, h.ncols() - 1)], x[x.len() - 1]);
        }
    }
}
