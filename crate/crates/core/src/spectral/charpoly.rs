use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// `μ = δ/(D+2δ)`.
pub fn mu(d: f64, delta: f64) -> f64 {
    delta / (d + 2.0 * delta)
}

/// Degree-`2n` characteristic polynomial of the equal-demand one-update
/// matrix, evaluated at `lambda`.
pub fn char_poly_eval(lambda: Complex64, n: usize, beta: f64, mu: f64) -> Complex64 {
    let n = n as u32;
    let one = Complex64::new(1.0, 0.0);
    let l = lambda;
    let ln = l.powu(n);
    let l2n = ln * ln;
    let ln1 = l.powu(n - 1);
    let ln_plus = ln * l;
    let l2n1 = l.powu(2 * n - 1);
    let b1 = (beta - 1.0) * (beta - 1.0);
    l2n - ln - (ln - one) * b1 + (ln * 2.0 - ln1 - l) * (beta * beta * mu)
        - (l2n1 + ln_plus - ln1 - l) * (beta * mu)
}

/// First-order perturbation of the unit-circle roots for index `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationRoot {
    pub k: usize,
    pub z_re: f64,
    pub z_im: f64,
    pub lambda_re: f64,
    pub lambda_im: f64,
}

impl PerturbationRoot {
    pub fn z(&self) -> Complex64 {
        Complex64::new(self.z_re, self.z_im)
    }

    pub fn lambda(&self) -> Complex64 {
        Complex64::new(self.lambda_re, self.lambda_im)
    }
}

/// `z*(k)` for `k = 1..n-1` and the reconstructed roots
/// `λ(k) = (1−ε) e^{j(2πk/n − ϑ)}` with `z = ε + jϑ`.
pub fn perturbation_roots(n: usize, beta: f64, mu: f64) -> Vec<PerturbationRoot> {
    let nf = n as f64;
    (1..n)
        .map(|k| {
            let th = 2.0 * PI * k as f64 / nf;
            let z = if mu == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                let num = Complex64::new((1.0 - th.cos()) / nf, 0.0);
                let den = Complex64::new(1.0, 0.0) - Complex64::from_polar(0.5, -th)
                    - Complex64::new(th.sin() / nf, 0.0)
                    + Complex64::new((1.0 - beta / 2.0 - mu * th.cos()) / (beta * mu), 0.0);
                num / den
            };
            let lambda = Complex64::from_polar(1.0 - z.re, th - z.im);
            PerturbationRoot {
                k,
                z_re: z.re,
                z_im: z.im,
                lambda_re: lambda.re,
                lambda_im: lambda.im,
            }
        })
        .collect()
}

/// Closed-form estimate `1 − 2βμπ²/n²` of the second-largest modulus.
pub fn lambda2_approx(n: usize, beta: f64, d: f64, delta: f64) -> f64 {
    1.0 - 2.0 * beta * mu(d, delta) * PI * PI / (n * n) as f64
}
