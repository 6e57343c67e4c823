use nalgebra::{DMatrix, Matrix3};

use super::SpectralError;

/// Update block acting on `(Θ_i, Γ_i, Θ_suc)` when node `i` updates.
pub fn u_block(d: f64, delta: f64, beta: f64) -> Matrix3<f64> {
    let a = delta / (d + 2.0 * delta);
    let b = d / (d + 2.0 * delta);
    let keep = 1.0 - beta;
    Matrix3::new(
        keep + beta * a,
        beta * a,
        beta * a,
        beta * b,
        keep + beta * b,
        beta * b,
        beta * a,
        beta * a,
        keep + beta * a,
    )
}

/// Cyclic down-shift `J` with `J e_k = e_{k+1}`.
pub fn shift(m: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(m, m);
    for k in 0..m {
        j[((k + 1) % m, k)] = 1.0;
    }
    j
}

/// Linear model of one clique's schedule: per-node update matrices and the
/// per-frame product.
#[derive(Debug, Clone)]
pub struct CliqueSystem {
    pub n: usize,
    /// Demands in firing order.
    pub demands: Vec<f64>,
    pub delta: f64,
    pub beta: f64,
    pub u: Vec<Matrix3<f64>>,
    /// `per_node[k]` updates the node at firing position `k`.
    pub per_node: Vec<DMatrix<f64>>,
    /// Product over one frame, first-firing node applied first.
    pub round: DMatrix<f64>,
}

pub fn build_clique_system(demands: &[f64], delta: f64, beta: f64) -> Result<CliqueSystem, SpectralError> {
    let n = demands.len();
    if n < 2 {
        return Err(SpectralError::InvalidInput("a clique system needs at least two nodes".into()));
    }
    if !(delta > 0.0) || demands.iter().any(|d| !(*d > 0.0)) || !(0.0..=1.0).contains(&beta) {
        return Err(SpectralError::InvalidInput("demands and delta must be positive, beta in [0, 1]".into()));
    }
    let m = 2 * n;
    let u: Vec<Matrix3<f64>> = demands.iter().map(|&d| u_block(d, delta, beta)).collect();
    let per_node: Vec<DMatrix<f64>> = u
        .iter()
        .enumerate()
        .map(|(k, uk)| {
            let mut mk = DMatrix::identity(m, m);
            let idx = [2 * k, 2 * k + 1, (2 * k + 2) % m];
            for r in 0..3 {
                for c in 0..3 {
                    mk[(idx[r], idx[c])] = uk[(r, c)];
                }
            }
            mk
        })
        .collect();
    let mut round = DMatrix::identity(m, m);
    for mk in &per_node {
        round = mk * round;
    }
    Ok(CliqueSystem {
        n,
        demands: demands.to_vec(),
        delta,
        beta,
        u,
        per_node,
        round,
    })
}

impl CliqueSystem {
    /// One-update matrix `J^{-2}·blockdiag(U, I)` whose `n`-th power is the
    /// frame product. Defined only when all demands are equal.
    pub fn step_matrix(&self) -> Option<DMatrix<f64>> {
        let d0 = self.demands[0];
        if self.demands.iter().any(|&d| d != d0) {
            return None;
        }
        let jt = shift(2 * self.n).transpose();
        Some(&jt * &jt * &self.per_node[0])
    }
}

/// Column sums of a matrix.
pub fn column_sums(m: &DMatrix<f64>) -> Vec<f64> {
    m.column_iter().map(|c| c.sum()).collect()
}
