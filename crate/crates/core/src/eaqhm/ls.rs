use std::f64::consts::TAU;

use nalgebra::{Cholesky, Complex, DMatrix, DVector};

use crate::error::{Error, Result};

/// Sampled basis `alpha_k(t_n) e^(j phi_k(t_n))` for components `k = 0..=K`
/// on a frame-centered time grid. Component 0 is the constant (DC) term;
/// negative-frequency components are the conjugates and are not stored.
#[derive(Debug, Clone)]
pub struct BasisFunctionSet {
    /// Seconds, zero at the frame center.
    pub times: Vec<f64>,
    pub amplitudes: Vec<Vec<f64>>,
    pub phases: Vec<Vec<f64>>,
}

impl BasisFunctionSet {
    /// DC term followed by the given `(amplitude, phase)` partials.
    pub fn new(times: Vec<f64>, partials: Vec<(Vec<f64>, Vec<f64>)>) -> Result<Self> {
        let n = times.len();
        let mut amplitudes = vec![vec![1.0; n]];
        let mut phases = vec![vec![0.0; n]];
        for (a, p) in partials {
            if a.len() != n || p.len() != n {
                return Err(Error::usage("basis function length differs from the time grid"));
            }
            if a.iter().any(|&v| !(v >= 0.0)) {
                return Err(Error::usage("basis amplitudes must be non-negative"));
            }
            amplitudes.push(a);
            phases.push(p);
        }
        Ok(Self {
            times,
            amplitudes,
            phases,
        })
    }

    /// Stationary basis: unit amplitudes and `phi_k(t) = 2 pi f_k t`.
    pub fn stationary(times: Vec<f64>, frequencies: &[f64]) -> Self {
        let partials = frequencies
            .iter()
            .map(|&f| (vec![1.0; times.len()], times.iter().map(|&t| TAU * f * t).collect()))
            .collect();
        Self::new(times, partials).expect("stationary basis is well formed")
    }

    /// Number of components including DC (`K + 1`).
    pub fn components(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Complex weighted least-squares system `W E [a; b] ~ W s`.
#[derive(Debug, Clone)]
pub struct LsSystem {
    /// `[E0 | E1]`, columns ordered `k = -K..=K` in each half.
    pub e: DMatrix<Complex<f64>>,
    /// Diagonal of `W`.
    pub w: DVector<f64>,
    pub s: DVector<Complex<f64>>,
}

impl LsSystem {
    /// Number of exponentials per half, `2K + 1`.
    pub fn exponentials(&self) -> usize {
        self.e.ncols() / 2
    }
}

/// Builds `E0[n][k] = alpha_k(t_n) e^(j phi_k(t_n))`, `E1[n][k] = t_n E0[n][k]`
/// for `k = -K..=K`, with `alpha_-k = alpha_k`, `phi_-k = -phi_k`.
pub fn build_ls_system(frame: &[f64], basis: &BasisFunctionSet, window: &[f64]) -> Result<LsSystem> {
    let n = basis.len();
    if frame.len() != n || window.len() != n {
        return Err(Error::usage(format!(
            "frame ({}), window ({}) and basis ({n}) lengths differ",
            frame.len(),
            window.len()
        )));
    }
    let k_max = basis.components() - 1;
    let m = 2 * k_max + 1;
    let mut e = DMatrix::from_element(n, 2 * m, Complex::new(0.0, 0.0));
    for col in 0..m {
        let k = col as isize - k_max as isize;
        let idx = k.unsigned_abs();
        let sign = if k < 0 { -1.0 } else { 1.0 };
        for row in 0..n {
            let v = Complex::from_polar(basis.amplitudes[idx][row], sign * basis.phases[idx][row]);
            e[(row, col)] = v;
            e[(row, m + col)] = v * basis.times[row];
        }
    }
    Ok(LsSystem {
        e,
        w: DVector::from_column_slice(window),
        s: DVector::from_iterator(n, frame.iter().map(|&v| Complex::new(v, 0.0))),
    })
}

/// `[a; b] = (E^H W^H W E)^-1 E^H W^H W s`, each vector indexed `k = -K..=K`.
///
/// The condition number is that of the normal matrix after symmetric
/// diagonal scaling to unit diagonal.
pub fn ls_solve(system: &LsSystem, max_condition: f64) -> Result<(DVector<Complex<f64>>, DVector<Complex<f64>>)> {
    let w2 = system.w.map(|v| v * v);
    let mut we = system.e.clone();
    for (r, mut row) in we.row_iter_mut().enumerate() {
        row *= Complex::new(w2[r], 0.0);
    }
    let normal = system.e.adjoint() * &we;
    let rhs = we.adjoint() * &system.s;

    let scale: Vec<f64> = (0..normal.nrows()).map(|i| normal[(i, i)].re.sqrt()).collect();
    if scale.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::IllConditioned {
            condition: f64::INFINITY,
        });
    }
    let scaled = DMatrix::from_fn(normal.nrows(), normal.ncols(), |i, j| {
        normal[(i, j)] / (scale[i] * scale[j])
    });
    let eig = scaled.clone().symmetric_eigenvalues();
    let (lo, hi) = eig
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(condition <= max_condition) {
        return Err(Error::IllConditioned { condition });
    }
    let chol = Cholesky::new(scaled).ok_or(Error::IllConditioned { condition })?;
    let scaled_rhs = DVector::from_fn(rhs.len(), |i, _| rhs[i] / scale[i]);
    let y = chol.solve(&scaled_rhs);
    let x = DVector::from_fn(y.len(), |i, _| y[i] / scale[i]);
    let m = system.exponentials();
    Ok((x.rows(0, m).into_owned(), x.rows(m, m).into_owned()))
}

/// Frequency mismatch in Hz between a component and its basis function,
/// `(Re a Im b - Im a Re b) / (2 pi |a|^2)`; zero for a dormant component.
pub fn freq_correction(a: Complex<f64>, b: Complex<f64>) -> f64 {
    let mag2 = a.norm_sqr();
    if mag2 == 0.0 {
        return 0.0;
    }
    (a.re * b.im - a.im * b.re) / (TAU * mag2)
}

/// Per-frame solution for components `k = 0..=K`.
#[derive(Debug, Clone, PartialEq)]
pub struct QhmFrameSolution {
    pub a: Vec<Complex<f64>>,
    pub b: Vec<Complex<f64>>,
    /// Hz.
    pub eta: Vec<f64>,
    pub condition: f64,
}

impl QhmFrameSolution {
    fn from_parts(a: Vec<Complex<f64>>, b: Vec<Complex<f64>>, condition: f64) -> Self {
        let eta = a.iter().zip(&b).map(|(&a, &b)| freq_correction(a, b)).collect();
        Self { a, b, eta, condition }
    }

    /// Solution through the literal complex system; keeps the `k >= 0` half.
    pub fn from_complex(frame: &[f64], basis: &BasisFunctionSet, window: &[f64], max_condition: f64) -> Result<Self> {
        let system = build_ls_system(frame, basis, window)?;
        let (a, b) = ls_solve(&system, max_condition)?;
        let k_max = basis.components() - 1;
        let a = a.iter().skip(k_max).copied().collect();
        let b = b.iter().skip(k_max).copied().collect();
        Ok(Self::from_parts(a, b, f64::NAN))
    }
}

/// Same least-squares problem as [`ls_solve`] in real arithmetic.
///
/// A real frame and a conjugate-closed basis make the complex optimum
/// conjugate symmetric, so it is enough to fit the real columns
/// `alpha cos phi`, `alpha sin phi` and their `t`-weighted versions, then
/// map back with `a_k = (p_k - j u_k) / 2`. With `with_slope` false only
/// the `a` half is fitted and `b` is returned as zero.
pub fn solve_real(
    frame: &[f64],
    basis: &BasisFunctionSet,
    window: &[f64],
    with_slope: bool,
    max_condition: f64,
) -> Result<QhmFrameSolution> {
    let n = basis.len();
    if frame.len() != n || window.len() != n {
        return Err(Error::usage("frame, window and basis lengths differ"));
    }
    let k_max = basis.components() - 1;
    let per = if with_slope { 2 } else { 1 };
    let cols = per * (1 + 2 * k_max);
    let mut e = DMatrix::<f64>::zeros(n, cols);
    let mut rhs_vec = DVector::<f64>::zeros(n);
    for row in 0..n {
        let w = window[row];
        let t = basis.times[row];
        rhs_vec[row] = w * frame[row];
        e[(row, 0)] = w;
        if with_slope {
            e[(row, 1)] = w * t;
        }
        for k in 1..=k_max {
            let (s, c) = basis.phases[k][row].sin_cos();
            let amp = w * basis.amplitudes[k][row];
            let base = per * (1 + 2 * (k - 1));
            e[(row, base)] = amp * c;
            e[(row, base + per)] = amp * s;
            if with_slope {
                e[(row, base + 1)] = amp * c * t;
                e[(row, base + per + 1)] = amp * s * t;
            }
        }
    }
    let normal = e.tr_mul(&e);
    let rhs = e.tr_mul(&rhs_vec);
    let (x, condition) = solve_spd(normal, rhs, max_condition)?;

    let mut a = vec![Complex::new(x[0], 0.0)];
    let mut b = vec![Complex::new(if with_slope { x[1] } else { 0.0 }, 0.0)];
    for k in 1..=k_max {
        let base = per * (1 + 2 * (k - 1));
        a.push(Complex::new(x[base], -x[base + per]) * 0.5);
        b.push(if with_slope {
            Complex::new(x[base + 1], -x[base + per + 1]) * 0.5
        } else {
            Complex::new(0.0, 0.0)
        });
    }
    Ok(QhmFrameSolution::from_parts(a, b, condition))
}

/// Solves a symmetric positive definite system after scaling it to unit
/// diagonal. The condition number is estimated from the Cholesky factor as
/// `(max L_ii / min L_ii)^2`, a lower bound on the exact value.
fn solve_spd(normal: DMatrix<f64>, rhs: DVector<f64>, max_condition: f64) -> Result<(DVector<f64>, f64)> {
    let n = normal.nrows();
    let scale: Vec<f64> = (0..n).map(|i| normal[(i, i)].sqrt()).collect();
    if scale.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::IllConditioned {
            condition: f64::INFINITY,
        });
    }
    let scaled = DMatrix::from_fn(n, n, |i, j| normal[(i, j)] / (scale[i] * scale[j]));
    let chol = Cholesky::new(scaled).ok_or(Error::IllConditioned {
        condition: f64::INFINITY,
    })?;
    let diag = chol.l_dirty().diagonal();
    let (lo, hi) = diag
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let condition = if lo > 0.0 { (hi / lo).powi(2) } else { f64::INFINITY };
    if !(condition <= max_condition) {
        return Err(Error::IllConditioned { condition });
    }
    let scaled_rhs = DVector::from_fn(n, |i, _| rhs[i] / scale[i]);
    let y = chol.solve(&scaled_rhs);
    Ok((DVector::from_fn(n, |i, _| y[i] / scale[i]), condition))
}
