use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;

use super::charpoly::lambda2_approx;
use super::matrices::CliqueSystem;
use super::SpectralError;

const SCHUR_EPS: f64 = 1e-14;
const SCHUR_MAX_ITER: usize = 100_000;

/// Eigen-analysis of one clique's linear schedule model.
#[derive(Debug, Clone)]
pub struct SpectralReport {
    /// Eigenvalues of the frame product, by decreasing modulus.
    pub eigenvalues: Vec<Complex64>,
    /// `‖Mv − λv‖` for a unit eigenvector estimate of each eigenvalue.
    pub residuals: Vec<f64>,
    /// Second-largest modulus of the frame product.
    pub lambda2_exact: f64,
    /// Per-update contraction factor `|λ₂|^{1/n}`.
    pub lambda2_per_update: f64,
    /// Eigenvalues of the one-update matrix, equal demands only.
    pub step_eigenvalues: Option<Vec<Complex64>>,
    /// Closed-form estimate, equal demands only.
    pub lambda2_approx: Option<f64>,
}

/// Eigenvalues of a real square matrix sorted by decreasing modulus.
pub fn eigenvalues_of(m: &DMatrix<f64>) -> Result<Vec<Complex64>, SpectralError> {
    let schur = Schur::try_new(m.clone(), SCHUR_EPS, SCHUR_MAX_ITER).ok_or(SpectralError::EigenNoConvergence)?;
    let mut ev: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then(b.im.total_cmp(&a.im)));
    Ok(ev)
}

/// Residual `‖Mv − λv‖` after a few steps of shifted inverse iteration.
pub fn eigen_residual(m: &DMatrix<f64>, lambda: Complex64) -> f64 {
    let k = m.nrows();
    let a = m.map(|x| Complex64::new(x, 0.0));
    let scale = 1.0 + lambda.norm();
    let sigma = lambda + Complex64::new(1e-11 * scale, 1e-11 * scale);
    let shifted = &a - DMatrix::<Complex64>::identity(k, k) * sigma;
    let lu = shifted.lu();
    let mut v = DVector::from_fn(k, |i, _| Complex64::new(1.0 + (i as f64).sin(), 0.5 * (i as f64).cos()));
    v /= Complex64::new(v.norm(), 0.0);
    for _ in 0..4 {
        match lu.solve(&v) {
            Some(w) if w.norm().is_finite() && w.norm() > 0.0 => {
                v = &w / Complex64::new(w.norm(), 0.0);
            }
            _ => break,
        }
    }
    (&a * &v - &v * lambda).norm()
}

fn second_modulus(ev: &[Complex64]) -> f64 {
    ev.get(1).map_or(0.0, |z| z.norm())
}

/// Eigenvalues, residuals and `λ₂` figures of a clique system.
pub fn analyse(sys: &CliqueSystem) -> Result<SpectralReport, SpectralError> {
    let eigenvalues = eigenvalues_of(&sys.round)?;
    let residuals = eigenvalues.iter().map(|&l| eigen_residual(&sys.round, l)).collect();
    let lambda2_exact = second_modulus(&eigenvalues);
    let (step_eigenvalues, lambda2_per_update, approx) = match sys.step_matrix() {
        Some(s) => {
            let ev = eigenvalues_of(&s)?;
            let l2 = second_modulus(&ev);
            let approx = lambda2_approx(sys.n, sys.beta, sys.demands[0], sys.delta);
            (Some(ev), l2, Some(approx))
        }
        None => (None, lambda2_exact.powf(1.0 / sys.n as f64), None),
    };
    Ok(SpectralReport {
        eigenvalues,
        residuals,
        lambda2_exact,
        lambda2_per_update,
        step_eigenvalues,
        lambda2_approx: approx,
    })
}
