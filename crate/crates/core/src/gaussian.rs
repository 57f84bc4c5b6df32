//! Gaussian (continuous-variable) pipeline at the covariance-matrix level:
//! symplectic spectra, partial transpose as momentum reversal on Alice's
//! modes, the single-mode function F, and the two-mode invariants with the
//! quartic characteristic equation.
//!
//! Operator ordering is xpxp interleaved; the symplectic form has 2x2 blocks
//! [[0, 1], [-1, 0]] and the vacuum variance is 1/2.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::{C64, CMat, RMat};

/// Symplectic form for n modes in xpxp ordering.
#[derive(Debug, Clone)]
pub struct SymplecticForm {
    n: usize,
    mat: RMat,
}

impl SymplecticForm {
    pub fn new(n: usize) -> Self {
        let mut mat = RMat::zeros(2 * n, 2 * n);
        for k in 0..n {
            mat[(2 * k, 2 * k + 1)] = 1.0;
            mat[(2 * k + 1, 2 * k)] = -1.0;
        }
        Self { n, mat }
    }

    pub fn matrix(&self) -> &RMat {
        &self.mat
    }

    /// sigma^-1 = -sigma, exactly.
    pub fn inverse(&self) -> RMat {
        -self.mat.clone()
    }

    pub fn modes(&self) -> usize {
        self.n
    }
}

/// Real symmetric covariance matrix with its mode partition.
#[derive(Debug, Clone, Serialize)]
pub struct CovarianceMatrix {
    gamma: Vec<Vec<f64>>,
    n_a: usize,
    n_b: usize,
}

impl CovarianceMatrix {
    pub fn new(gamma: RMat, n_a: usize, n_b: usize) -> Result<Self> {
        let n = n_a + n_b;
        if n == 0 {
            return Err(Error::DimMismatch("need at least one mode".to_string()));
        }
        if gamma.nrows() != 2 * n || gamma.ncols() != 2 * n {
            return Err(Error::DimMismatch(format!(
                "covariance matrix is {}x{}, expected {}x{} for {} modes",
                gamma.nrows(),
                gamma.ncols(),
                2 * n,
                2 * n,
                n
            )));
        }
        let scale = gamma.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
        let dev = (&gamma - gamma.transpose())
            .iter()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()));
        if dev > 1e-12 * scale {
            return Err(Error::InvalidState(format!(
                "covariance matrix is not symmetric (deviation {dev:.3e})"
            )));
        }
        let rows = (0..2 * n)
            .map(|r| (0..2 * n).map(|c| gamma[(r, c)]).collect())
            .collect();
        Ok(Self {
            gamma: rows,
            n_a,
            n_b,
        })
    }

    pub fn matrix(&self) -> RMat {
        let n = 2 * self.modes();
        RMat::from_fn(n, n, |r, c| self.gamma[r][c])
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    pub fn modes(&self) -> usize {
        self.n_a + self.n_b
    }

    /// Uncertainty check: gamma + (i/2) sigma is positive semidefinite
    /// within 1e-10.
    pub fn is_physical(&self) -> Result<bool> {
        let sigma = SymplecticForm::new(self.modes());
        let g = self.matrix();
        let n = g.nrows();
        let herm = CMat::from_fn(n, n, |r, c| {
            C64::new(g[(r, c)], 0.5 * sigma.matrix()[(r, c)])
        });
        let eigs = linalg::hermitian_eigenvalues(&herm)?;
        Ok(eigs.last().copied().unwrap_or(0.0) >= -1e-10)
    }
}

/// Symplectic spectrum: the moduli c_1 >= ... >= c_n of the (purely
/// imaginary, +-i c paired) eigenvalues of sigma^-1 gamma. The input must be
/// positive definite.
///
/// The eigenvalues are obtained from the similar hermitian matrix
/// i gamma^(1/2) sigma^-1 gamma^(1/2), whose real spectrum is {+-c_a}.
/// A general real eigensolver on sigma^-1 gamma itself is not usable here:
/// QR iteration without exceptional-shift handling fails to converge on
/// these Hamiltonian-structure matrices.
pub fn symplectic_spectrum(cov: &CovarianceMatrix) -> Result<Vec<f64>> {
    let g = cov.matrix();
    let n = g.nrows();
    let complex_g = CMat::from_fn(n, n, |r, c| C64::new(g[(r, c)], 0.0));
    let (vals, vecs) = linalg::hermitian_eigen(&complex_g)?;
    if vals.last().copied().unwrap_or(0.0) <= 0.0 {
        return Err(Error::Domain(format!(
            "covariance matrix is not positive definite (min eigenvalue {:e})",
            vals.last().unwrap()
        )));
    }
    let mut root = CMat::zeros(n, n);
    for (k, &v) in vals.iter().enumerate() {
        let col = vecs.column(k);
        root += (&col * col.adjoint()).scale(v.sqrt());
    }
    let sigma = SymplecticForm::new(cov.modes());
    let sigma_inv = CMat::from_fn(n, n, |r, c| C64::new(sigma.inverse()[(r, c)], 0.0));
    let k = &root * sigma_inv * &root;
    let herm = CMat::from_fn(n, n, |r, c| C64::new(0.0, 1.0) * k[(r, c)]);
    let eigs = linalg::hermitian_eigenvalues(&herm)?;
    let scale = eigs.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
    let modes = cov.modes();
    // The spectrum is symmetric around zero: verify the +-c pairing.
    for j in 0..modes {
        let plus = eigs[j];
        let minus = eigs[2 * modes - 1 - j];
        if (plus + minus).abs() > 1e-8 * scale || plus <= 0.0 {
            return Err(Error::NoConvergence(format!(
                "unpaired symplectic eigenvalue candidates {plus} and {minus}"
            )));
        }
    }
    Ok(eigs[..modes].to_vec())
}

/// Partial transpose at the covariance level: reverse Alice's momenta,
/// i.e. conjugate by diag(1, -1) on each of her (x, p) pairs.
pub fn gaussian_partial_transpose(cov: &CovarianceMatrix) -> CovarianceMatrix {
    let n = cov.modes();
    let g = cov.matrix();
    let sign = |idx: usize| -> f64 {
        if idx < 2 * cov.n_a() && idx % 2 == 1 {
            -1.0
        } else {
            1.0
        }
    };
    let flipped = RMat::from_fn(2 * n, 2 * n, |r, c| sign(r) * sign(c) * g[(r, c)]);
    CovarianceMatrix::new(flipped, cov.n_a(), cov.n_b()).expect("sign flips preserve symmetry")
}

/// Single-mode log-negativity contribution: 0 for 2c >= 1, else -log2(2c).
pub fn f_single_mode(c: f64) -> Result<f64> {
    if c <= 0.0 {
        return Err(Error::Domain(format!("symplectic eigenvalue {c} <= 0")));
    }
    if 2.0 * c >= 1.0 {
        Ok(0.0)
    } else {
        Ok(-(2.0 * c).log2())
    }
}

/// Logarithmic negativity of a physical Gaussian state: the sum of F over
/// the symplectic spectrum of the partially transposed covariance matrix.
pub fn gaussian_log_negativity(cov: &CovarianceMatrix) -> Result<f64> {
    if !cov.is_physical()? {
        return Err(Error::InvalidState(
            "covariance matrix violates the uncertainty relation".to_string(),
        ));
    }
    let pt = gaussian_partial_transpose(cov);
    let spectrum = symplectic_spectrum(&pt)?;
    let mut total = 0.0;
    for c in spectrum {
        total += f_single_mode(c)?;
    }
    Ok(total)
}

fn require_two_mode(cov: &CovarianceMatrix) -> Result<()> {
    if cov.n_a() != 1 || cov.n_b() != 1 {
        return Err(Error::DimMismatch(format!(
            "two-mode invariants need one mode per side, got {}+{}",
            cov.n_a(),
            cov.n_b()
        )));
    }
    Ok(())
}

fn det2(g: &RMat, r0: usize, c0: usize) -> f64 {
    g[(r0, c0)] * g[(r0 + 1, c0 + 1)] - g[(r0, c0 + 1)] * g[(r0 + 1, c0)]
}

/// The local-symplectic invariants (det A, det B, det C, det gamma) of a
/// 1+1 mode covariance matrix in block form [[A, C], [C^T, B]].
pub fn two_mode_invariants(cov: &CovarianceMatrix) -> Result<(f64, f64, f64, f64)> {
    require_two_mode(cov)?;
    let g = cov.matrix();
    Ok((
        det2(&g, 0, 0),
        det2(&g, 2, 2),
        det2(&g, 0, 2),
        g.determinant(),
    ))
}

/// Symplectic spectrum of the partial transpose through the quartic
/// characteristic equation: with the substitution xi = i c the roots obey
/// c^4 - (det A + det B - 2 det C) c^2 + det gamma = 0 (under partial
/// transposition only det C changes sign). Returns (c1, c2) nonincreasing.
pub fn two_mode_pt_spectrum_via_quartic(cov: &CovarianceMatrix) -> Result<(f64, f64)> {
    let (det_a, det_b, det_c, det_g) = two_mode_invariants(cov)?;
    let delta = det_a + det_b - 2.0 * det_c;
    let mut disc = delta * delta - 4.0 * det_g;
    if disc < 0.0 {
        if disc > -1e-9 * delta.abs().max(1.0) {
            disc = 0.0;
        } else {
            return Err(Error::Domain(format!(
                "quartic discriminant {disc:e} is negative; not a valid covariance matrix"
            )));
        }
    }
    let root = disc.sqrt();
    let big = 0.5 * (delta + root);
    let small = 0.5 * (delta - root);
    if big < 0.0 || small < 0.0 {
        return Err(Error::Domain(
            "quartic roots are not positive; not a valid covariance matrix".to_string(),
        ));
    }
    Ok((big.sqrt(), small.sqrt()))
}

/// Log-negativity of a two-mode pure state in normal form: for normal-form
/// parameter a >= 1/2 and c = sqrt(a^2 - 1/4) the partially transposed
/// spectrum is {a + c, a - c}, giving -log2(2(a - c)), equivalently
/// -2 log2(sqrt(a + 1/2) - sqrt(a - 1/2)).
pub fn two_mode_pure_log_negativity(a: f64) -> Result<f64> {
    if a < 0.5 {
        return Err(Error::Domain(format!(
            "normal-form parameter {a} below the vacuum value 1/2"
        )));
    }
    let c = (a * a - 0.25).sqrt();
    Ok(-(2.0 * (a - c)).log2())
}

/// Two-mode pure normal form with parameter a (c fixed by purity).
pub fn pure_normal_form(a: f64) -> Result<CovarianceMatrix> {
    if a < 0.5 {
        return Err(Error::Domain(format!(
            "normal-form parameter {a} below the vacuum value 1/2"
        )));
    }
    let c = (a * a - 0.25).sqrt();
    let mut g = RMat::zeros(4, 4);
    for i in 0..4 {
        g[(i, i)] = a;
    }
    g[(0, 2)] = c;
    g[(2, 0)] = c;
    g[(1, 3)] = -c;
    g[(3, 1)] = -c;
    CovarianceMatrix::new(g, 1, 1)
}

/// Two-mode squeezed vacuum with squeezing parameter r: the pure normal
/// form with a = cosh(2r)/2.
pub fn two_mode_squeezed(r: f64) -> Result<CovarianceMatrix> {
    pure_normal_form((2.0 * r).cosh() / 2.0)
}

/// Vacuum state of n_a + n_b modes: gamma = I/2.
pub fn vacuum(n_a: usize, n_b: usize) -> Result<CovarianceMatrix> {
    let n = n_a + n_b;
    CovarianceMatrix::new(RMat::identity(2 * n, 2 * n).scale(0.5), n_a, n_b)
}
