//! Gaussian-state linear algebra on covariance matrices.
//!
//! Quadratures are ordered `(x1, p1, x2, p2, ...)` and the vacuum has the
//! identity as covariance matrix, so a coherent state has unit variance in
//! both quadratures and an EPR source of variance `V` has `V >= 1`.

use std::fmt;
use std::ops::Index;

use nalgebra::{DMatrix, DVector, Matrix2, Schur, SymmetricEigen};

use crate::error::{Error, Result};

/// Tolerance on the uncertainty relation: symplectic eigenvalues down to
/// `1 - PHYSICAL_TOL` are accepted as physical.
pub const PHYSICAL_TOL: f64 = 1e-9;

const SYMMETRY_TOL: f64 = 1e-12;
const PAIR_TOL: f64 = 1e-8;
const PINV_RCOND: f64 = 1e-10;
const G_DOMAIN_TOL: f64 = 1e-12;
const SCHUR_MAX_ITER: usize = 10_000;

/// Pauli-z, `diag(1, -1)`.
pub fn sigma_z() -> Matrix2<f64> {
    Matrix2::new(1.0, 0.0, 0.0, -1.0)
}

/// Real symmetric `2n x 2n` covariance matrix of an `n`-mode Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    n_modes: usize,
    data: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Validates shape and symmetry. Physicality is checked separately with
    /// [`is_physical`], since intermediate matrices in some models are not.
    pub fn new(data: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = data.shape();
        if rows != cols {
            return Err(Error::Dimension(format!("{rows}x{cols} matrix is not square")));
        }
        if rows == 0 || rows % 2 != 0 {
            return Err(Error::Dimension(format!("dimension {rows} is not a positive even number")));
        }
        for i in 0..rows {
            for j in (i + 1)..rows {
                let deviation = (data[(i, j)] - data[(j, i)]).abs();
                // Written so that NaN entries fail too.
                if !(deviation <= SYMMETRY_TOL) {
                    return Err(Error::NotSymmetric { row: i, col: j, deviation });
                }
            }
        }
        Ok(Self { n_modes: rows / 2, data })
    }

    /// Builds a matrix from its `2x2` mode blocks; `block(i, j)` must equal
    /// `block(j, i)^T`.
    pub fn from_mode_blocks<F>(n_modes: usize, block: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> Matrix2<f64>,
    {
        let mut data = DMatrix::zeros(2 * n_modes, 2 * n_modes);
        for i in 0..n_modes {
            for j in 0..n_modes {
                data.fixed_view_mut::<2, 2>(2 * i, 2 * j).copy_from(&block(i, j));
            }
        }
        Self::new(data)
    }

    pub fn identity(n_modes: usize) -> Self {
        Self { n_modes, data: DMatrix::identity(2 * n_modes, 2 * n_modes) }
    }

    /// Single-mode thermal state `v * I`.
    pub fn thermal(v: f64) -> Self {
        Self { n_modes: 1, data: DMatrix::identity(2, 2) * v }
    }

    /// Two-mode squeezed vacuum of variance `v`:
    /// `[[v I, sqrt(v^2 - 1) Z], [sqrt(v^2 - 1) Z, v I]]`.
    pub fn epr(v: f64) -> Result<Self> {
        if !(v >= 1.0) {
            return Err(Error::Parameter(format!("EPR variance V >= 1 (got V = {v})")));
        }
        let c = (v * v - 1.0).sqrt();
        Self::from_mode_blocks(2, |i, j| {
            if i == j {
                Matrix2::identity() * v
            } else {
                sigma_z() * c
            }
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn dim(&self) -> usize {
        2 * self.n_modes
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }

    pub fn mode_block(&self, i: usize, j: usize) -> Matrix2<f64> {
        self.data.fixed_view::<2, 2>(2 * i, 2 * j).into_owned()
    }

    /// Reduced state of the listed modes, in the listed order.
    pub fn reduced(&self, modes: &[usize]) -> Result<Self> {
        self.check_modes(modes)?;
        Ok(Self { n_modes: modes.len(), data: self.cross_block(modes, modes) })
    }

    /// Rows of `row_modes` against columns of `col_modes`.
    pub fn cross_block(&self, row_modes: &[usize], col_modes: &[usize]) -> DMatrix<f64> {
        let rows = quadrature_indices(row_modes);
        let cols = quadrature_indices(col_modes);
        DMatrix::from_fn(rows.len(), cols.len(), |r, c| self.data[(rows[r], cols[c])])
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.data.shape() != other.data.shape() {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn check_modes(&self, modes: &[usize]) -> Result<()> {
        if let Some(&m) = modes.iter().find(|&&m| m >= self.n_modes) {
            return Err(Error::Partition(format!(
                "mode {m} out of range for a {}-mode state",
                self.n_modes
            )));
        }
        Ok(())
    }

    /// Symmetrises a product that is symmetric up to rounding.
    fn from_symmetric_product(data: DMatrix<f64>) -> Self {
        let sym = (&data + data.transpose()) * 0.5;
        Self { n_modes: sym.nrows() / 2, data: sym }
    }
}

impl Index<(usize, usize)> for CovarianceMatrix {
    type Output = f64;

    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.data[idx]
    }
}

impl fmt::Display for CovarianceMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.data)
    }
}

/// First moments `d_i = Tr(rho r_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementVector {
    n_modes: usize,
    data: DVector<f64>,
}

impl DisplacementVector {
    pub fn new(data: DVector<f64>) -> Result<Self> {
        if data.is_empty() || data.len() % 2 != 0 {
            return Err(Error::Dimension(format!(
                "displacement length {} is not a positive even number",
                data.len()
            )));
        }
        Ok(Self { n_modes: data.len() / 2, data })
    }

    pub fn zeros(n_modes: usize) -> Self {
        Self { n_modes, data: DVector::zeros(2 * n_modes) }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.data
    }
}

/// Which modes stay and which are measured.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModePartition {
    kept: Vec<usize>,
    measured: Vec<usize>,
}

impl ModePartition {
    pub fn new(kept: Vec<usize>, measured: Vec<usize>) -> Result<Self> {
        if measured.is_empty() {
            return Err(Error::Partition("no measured modes".into()));
        }
        if kept.is_empty() {
            return Err(Error::Partition("no kept modes".into()));
        }
        let mut all: Vec<usize> = kept.iter().chain(&measured).copied().collect();
        all.sort_unstable();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Partition(format!(
                "kept {kept:?} and measured {measured:?} overlap or repeat"
            )));
        }
        Ok(Self { kept, measured })
    }

    /// Measure `measured`, keep every other mode of an `n_modes` state.
    pub fn measuring(n_modes: usize, measured: &[usize]) -> Result<Self> {
        let kept = (0..n_modes).filter(|m| !measured.contains(m)).collect();
        Self::new(kept, measured.to_vec())
    }

    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn measured(&self) -> &[usize] {
        &self.measured
    }

    fn check(&self, n_modes: usize) -> Result<()> {
        if let Some(&m) = self.kept.iter().chain(&self.measured).find(|&&m| m >= n_modes) {
            return Err(Error::Partition(format!(
                "mode {m} out of range for a {n_modes}-mode state"
            )));
        }
        Ok(())
    }
}

/// Quadrature read out by a homodyne detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    X,
    P,
}

fn quadrature_indices(modes: &[usize]) -> Vec<usize> {
    modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect()
}

/// Block-diagonal symplectic form with blocks `[[0, 1], [-1, 0]]`.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Symplectic eigenvalues, sorted descending.
///
/// The spectrum of `Omega * gamma` is `{+i nu_k, -i nu_k}`. For positive
/// definite `gamma = L L^T` it is shared by the antisymmetric `L^T Omega L`,
/// so `-(L^T Omega L)^2` is symmetric with every `nu_k^2` appearing twice;
/// consecutive sorted values are paired. Indefinite input (never physical)
/// falls back to a real Schur decomposition of `Omega * gamma`.
pub fn symplectic_eigenvalues(gamma: &CovarianceMatrix) -> Result<Vec<f64>> {
    let n = gamma.n_modes();
    let omega = symplectic_form(n);
    let mut moduli: Vec<f64> = match gamma.as_matrix().clone().cholesky() {
        Some(chol) => {
            let l = chol.l();
            let k = l.transpose() * &omega * &l;
            let sym = k.transpose() * &k;
            let sym = (&sym + sym.transpose()) * 0.5;
            SymmetricEigen::new(sym).eigenvalues.iter().map(|e| e.max(0.0).sqrt()).collect()
        }
        None => {
            let schur = Schur::try_new(omega * gamma.as_matrix(), f64::EPSILON, SCHUR_MAX_ITER)
                .ok_or(Error::NotPositiveDefinite)?;
            schur.complex_eigenvalues().iter().map(|z| z.norm()).collect()
        }
    };
    if moduli.iter().any(|m| !m.is_finite()) {
        return Err(Error::Internal("non-finite eigenvalue of Omega * gamma".into()));
    }
    moduli.sort_by(|a, b| b.total_cmp(a));

    let mut nus = Vec::with_capacity(n);
    for pair in moduli.chunks_exact(2) {
        let (hi, lo) = (pair[0], pair[1]);
        if hi - lo > PAIR_TOL * hi.max(1.0) {
            return Err(Error::Internal(format!(
                "unpaired eigenvalue moduli of Omega * gamma: {hi} vs {lo}"
            )));
        }
        nus.push(0.5 * (hi + lo));
    }
    Ok(nus)
}

/// `g(x) = (x + 1) log2(x + 1) - x log2(x)`, with `g(0) = 0`.
pub fn g_function(x: f64) -> Result<f64> {
    if x.is_nan() || x < -G_DOMAIN_TOL {
        return Err(Error::Domain(format!("g(x) requires x >= 0, got {x}")));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    Ok((x + 1.0) * (x + 1.0).log2() - x * x.log2())
}

/// Von Neumann entropy in bits, `sum_k g((nu_k - 1) / 2)`.
pub fn von_neumann_entropy(gamma: &CovarianceMatrix) -> Result<f64> {
    let nus = match symplectic_eigenvalues(gamma) {
        Err(Error::NotPositiveDefinite) => return Err(Error::Unphysical { min_nu: f64::NAN }),
        other => other?,
    };
    let min_nu = nus.last().copied().unwrap_or(1.0);
    if min_nu < 1.0 - PHYSICAL_TOL {
        return Err(Error::Unphysical { min_nu });
    }
    nus.iter().try_fold(0.0, |acc, &nu| Ok(acc + g_function((nu.max(1.0) - 1.0) / 2.0)?))
}

/// Uncertainty-relation gate: smallest symplectic eigenvalue `>= 1 - tol`.
pub fn is_physical(gamma: &CovarianceMatrix, tol: f64) -> bool {
    match symplectic_eigenvalues(gamma) {
        Ok(nus) => nus.iter().all(|&nu| nu >= 1.0 - tol),
        Err(_) => false,
    }
}

/// Covariance matrix of the kept modes after heterodyning the measured ones,
/// `gamma_kept - sigma (gamma_meas + I)^-1 sigma^T`.
pub fn condition_on_heterodyne(
    gamma: &CovarianceMatrix,
    partition: &ModePartition,
) -> Result<CovarianceMatrix> {
    partition.check(gamma.n_modes())?;
    let kept = partition.kept();
    let measured = partition.measured();
    let sigma = gamma.cross_block(kept, measured);
    let noisy = gamma.cross_block(measured, measured)
        + DMatrix::identity(2 * measured.len(), 2 * measured.len());
    let inverse = noisy
        .try_inverse()
        .ok_or_else(|| Error::Internal("gamma_meas + I is singular".into()))?;
    let update = &sigma * inverse * sigma.transpose();
    Ok(CovarianceMatrix::from_symmetric_product(gamma.cross_block(kept, kept) - update))
}

/// Mean of the kept modes after heterodyning the measured ones, for a state
/// with zero prior mean: `sigma (gamma_meas + I)^-1 r`.
///
/// `outcome` is the heterodyne record scaled so that its covariance is
/// `gamma_meas + I`; a detector that splits the mode on a balanced beam
/// splitter and reports `(X, P)` from the two arms corresponds to
/// `r = sqrt(2) (X, P)`.
pub fn heterodyne_conditional_mean(
    gamma: &CovarianceMatrix,
    partition: &ModePartition,
    outcome: &DisplacementVector,
) -> Result<DisplacementVector> {
    partition.check(gamma.n_modes())?;
    let measured = partition.measured();
    if outcome.n_modes() != measured.len() {
        return Err(Error::Dimension(format!(
            "outcome covers {} modes, {} are measured",
            outcome.n_modes(),
            measured.len()
        )));
    }
    let sigma = gamma.cross_block(partition.kept(), measured);
    let noisy = gamma.cross_block(measured, measured)
        + DMatrix::identity(2 * measured.len(), 2 * measured.len());
    let inverse = noisy
        .try_inverse()
        .ok_or_else(|| Error::Internal("gamma_meas + I is singular".into()))?;
    DisplacementVector::new(sigma * inverse * outcome.as_vector())
}

/// Covariance matrix of the kept modes after homodyning `quadrature` on every
/// measured mode, `gamma_kept - sigma (X gamma_meas X)^MP sigma^T`, where `X`
/// zeroes the unmeasured quadrature of each measured mode.
pub fn condition_on_homodyne(
    gamma: &CovarianceMatrix,
    partition: &ModePartition,
    quadrature: Quadrature,
) -> Result<CovarianceMatrix> {
    partition.check(gamma.n_modes())?;
    let kept = partition.kept();
    let measured = partition.measured();
    let sigma = gamma.cross_block(kept, measured);
    let projector = homodyne_projector(measured.len(), quadrature);
    let projected = &projector * gamma.cross_block(measured, measured) * &projector;
    let update = &sigma * symmetric_pseudo_inverse(&projected) * sigma.transpose();
    Ok(CovarianceMatrix::from_symmetric_product(gamma.cross_block(kept, kept) - update))
}

fn homodyne_projector(n_modes: usize, quadrature: Quadrature) -> DMatrix<f64> {
    let offset = match quadrature {
        Quadrature::X => 0,
        Quadrature::P => 1,
    };
    DMatrix::from_fn(2 * n_modes, 2 * n_modes, |i, j| {
        if i == j && i % 2 == offset {
            1.0
        } else {
            0.0
        }
    })
}

/// Moore-Penrose pseudoinverse of a symmetric matrix. Eigenvalues with
/// modulus below `1e-10` times the largest are treated as zero.
pub fn symmetric_pseudo_inverse(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let largest = eig.eigenvalues.iter().fold(0.0_f64, |acc, l| acc.max(l.abs()));
    let cutoff = PINV_RCOND * largest;
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda.abs() > cutoff {
            let v = eig.eigenvectors.column(k);
            out += (v * v.transpose()) / lambda;
        }
    }
    out
}
