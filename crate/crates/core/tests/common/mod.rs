#![allow(dead_code)]

use nalgebra::{Complex, DMatrix, SymmetricEigen};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use srcnoise_core::gaussian::symplectic_form;
use srcnoise_core::CovarianceMatrix;

/// Random symplectic matrix: layers of phase rotations, single-mode
/// squeezers and beam splitters between neighbouring modes.
pub fn random_symplectic(n_modes: usize, max_squeeze: f64, rng: &mut StdRng) -> DMatrix<f64> {
    let dim = 2 * n_modes;
    let mut s = DMatrix::<f64>::identity(dim, dim);
    for _ in 0..3 {
        for k in 0..n_modes {
            s = local_rotation(n_modes, k, rng.gen_range(0.0..std::f64::consts::TAU)) * s;
            let r: f64 = rng.gen_range(-max_squeeze..max_squeeze);
            let mut sq = DMatrix::<f64>::identity(dim, dim);
            sq[(2 * k, 2 * k)] = r.exp();
            sq[(2 * k + 1, 2 * k + 1)] = (-r).exp();
            s = sq * s;
        }
        for k in 0..n_modes.saturating_sub(1) {
            let theta: f64 = rng.gen_range(0.0..std::f64::consts::PI);
            let (c, si) = (theta.cos(), theta.sin());
            let mut bs = DMatrix::<f64>::identity(dim, dim);
            for q in 0..2 {
                let (i, j) = (2 * k + q, 2 * (k + 1) + q);
                bs[(i, i)] = c;
                bs[(j, j)] = c;
                bs[(i, j)] = si;
                bs[(j, i)] = -si;
            }
            s = bs * s;
        }
    }
    s
}

pub fn local_rotation(n_modes: usize, mode: usize, phi: f64) -> DMatrix<f64> {
    let mut r = DMatrix::<f64>::identity(2 * n_modes, 2 * n_modes);
    let (c, s) = (phi.cos(), phi.sin());
    r[(2 * mode, 2 * mode)] = c;
    r[(2 * mode, 2 * mode + 1)] = s;
    r[(2 * mode + 1, 2 * mode)] = -s;
    r[(2 * mode + 1, 2 * mode + 1)] = c;
    r
}

/// Random physical state `S diag(nu) S^T` together with its symplectic
/// spectrum (descending).
pub fn random_physical(n_modes: usize, seed: u64) -> (CovarianceMatrix, Vec<f64>) {
    random_physical_with(n_modes, 0.8, seed)
}

pub fn random_physical_with(n_modes: usize, max_squeeze: f64, seed: u64) -> (CovarianceMatrix, Vec<f64>) {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut nus: Vec<f64> = (0..n_modes).map(|_| 1.0 + rng.gen_range(0.0..4.0)).collect();
    let mut d = DMatrix::<f64>::zeros(2 * n_modes, 2 * n_modes);
    for (k, nu) in nus.iter().enumerate() {
        d[(2 * k, 2 * k)] = *nu;
        d[(2 * k + 1, 2 * k + 1)] = *nu;
    }
    let s = random_symplectic(n_modes, max_squeeze, &mut rng);
    let g = &s * d * s.transpose();
    let g = (&g + g.transpose()) * 0.5;
    nus.sort_by(|a, b| b.total_cmp(a));
    (CovarianceMatrix::new(g).unwrap(), nus)
}

/// Smallest eigenvalue of the Hermitian matrix `gamma + i Omega`; the state is
/// physical iff it is nonnegative.
pub fn uncertainty_margin(gamma: &CovarianceMatrix) -> f64 {
    let omega = symplectic_form(gamma.n_modes());
    let h = DMatrix::from_fn(gamma.dim(), gamma.dim(), |i, j| {
        Complex::new(gamma[(i, j)], omega[(i, j)])
    });
    SymmetricEigen::new(h).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}
