//! Construction, validation, and sampling of quantum states: density
//! matrices, pure states with Schmidt decomposition, canonical families
//! (maximally entangled, noisy singlet, OO-invariant), and exact twirl
//! projections.

use nalgebra::linalg::{SVD, QR};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg;
use crate::{C64, CMat, CVec};

/// Trace of a density matrix must be 1 within this tolerance.
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest eigenvalue of a density matrix must be above -PSD_TOL.
pub const PSD_TOL: f64 = 1e-10;

/// A validated density matrix with its subsystem dimension list.
///
/// Instances are immutable after construction; every constructor checks
/// hermiticity, unit trace, and positive semidefiniteness within tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMat,
    dims: Vec<usize>,
}

impl DensityMatrix {
    pub fn new(mat: CMat, dims: Vec<usize>) -> Result<Self> {
        linalg::require_hermitian(&mat)?;
        let total: usize = dims.iter().product();
        if dims.is_empty() || dims.iter().any(|&d| d == 0) || total != mat.nrows() {
            return Err(Error::DimMismatch(format!(
                "local dimensions {dims:?} do not match a {}x{} matrix",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "trace is {tr}, expected 1 within {TRACE_TOL:e}"
            )));
        }
        let eigs = linalg::hermitian_eigenvalues(&mat)?;
        let min = eigs.last().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "smallest eigenvalue {min:e} below -{PSD_TOL:e}, not positive semidefinite"
            )));
        }
        Ok(Self { mat, dims })
    }

    /// Projector onto a unit-norm pure state vector.
    pub fn from_pure(v: &CVec, dims: Vec<usize>) -> Result<Self> {
        let norm = v.norm();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidState(format!(
                "pure state vector has norm {norm}, expected 1 within 1e-8"
            )));
        }
        Self::new(v * v.adjoint(), dims)
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn party_count(&self) -> usize {
        self.dims.len()
    }

    /// Partial transpose over the given party, as a plain hermitian matrix.
    pub fn partial_transpose(&self, party: usize) -> Result<CMat> {
        linalg::partial_transpose(&self.mat, &self.dims, party)
    }

    /// Same state with the parties regrouped into two composite factors.
    /// `group_a` lists the party indices forming the new Alice side.
    pub fn regroup_bipartite(&self, group_a: &[usize]) -> Result<DensityMatrix> {
        let group_b: Vec<usize> = (0..self.dims.len())
            .filter(|p| !group_a.contains(p))
            .collect();
        if group_a.is_empty() || group_b.is_empty() {
            return Err(Error::DimMismatch(
                "bipartite regrouping needs both groups nonempty".to_string(),
            ));
        }
        let perm: Vec<usize> = group_a.iter().chain(group_b.iter()).copied().collect();
        let (permuted, new_dims) = linalg::permute_parties(&self.mat, &self.dims, &perm)?;
        let da: usize = new_dims[..group_a.len()].iter().product();
        let db: usize = new_dims[group_a.len()..].iter().product();
        DensityMatrix::new(permuted, vec![da, db])
    }
}

/// Schmidt decomposition of a bipartite pure state: nonincreasing positive
/// coefficients together with the two orthonormal local bases.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub coeffs: Vec<f64>,
    pub basis_a: Vec<CVec>,
    pub basis_b: Vec<CVec>,
}

impl SchmidtDecomposition {
    /// Rebuild the bipartite vector sum_a c_a e'_a (x) e''_a.
    pub fn reconstruct(&self) -> CVec {
        let da = self.basis_a[0].len();
        let db = self.basis_b[0].len();
        let mut v = CVec::zeros(da * db);
        for (k, &c) in self.coeffs.iter().enumerate() {
            for i in 0..da {
                for j in 0..db {
                    v[i * db + j] += C64::new(c, 0.0) * self.basis_a[k][i] * self.basis_b[k][j];
                }
            }
        }
        v
    }
}

/// Parameters (d, f, g) of a U(x)U (orthogonal) invariant state, with
/// f = d tr(rho P+) and g = tr(rho F).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OoStateParams {
    pub d: usize,
    pub f: f64,
    pub g: f64,
}

impl OoStateParams {
    pub fn new(d: usize, f: f64, g: f64) -> Result<Self> {
        let p = Self { d, f, g };
        p.validate()?;
        Ok(p)
    }

    /// Triangle constraints: 0 <= f <= d, -1 <= g <= 1, f <= d(1+g)/2.
    pub fn validate(&self) -> Result<()> {
        const SLACK: f64 = 1e-12;
        if self.d < 2 {
            return Err(Error::Domain(format!("local dimension {} < 2", self.d)));
        }
        let d = self.d as f64;
        if self.f < -SLACK
            || self.f > d + SLACK
            || self.g < -1.0 - SLACK
            || self.g > 1.0 + SLACK
            || self.f > d * (1.0 + self.g) / 2.0 + SLACK
        {
            return Err(Error::Domain(format!(
                "(f, g) = ({}, {}) outside the invariant-state triangle for d = {}",
                self.f, self.g, self.d
            )));
        }
        Ok(())
    }
}

/// The maximally entangled vector (1/sqrt(m)) sum_a |a a> on m(x)m.
pub fn maximally_entangled_vector(m: usize) -> Result<CVec> {
    if m < 2 {
        return Err(Error::Domain(format!("local dimension {m} < 2")));
    }
    let mut v = CVec::zeros(m * m);
    let amp = C64::new(1.0 / (m as f64).sqrt(), 0.0);
    for a in 0..m {
        v[a * m + a] = amp;
    }
    Ok(v)
}

/// Projector onto the maximally entangled state of an m(x)m system.
pub fn maximally_entangled(m: usize) -> Result<DensityMatrix> {
    let v = maximally_entangled_vector(m)?;
    DensityMatrix::from_pure(&v, vec![m, m])
}

/// The flip (swap) operator F |i j> = |j i> on d(x)d.
pub fn flip_operator(d: usize) -> CMat {
    let mut f = CMat::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            f[(j * d + i, i * d + j)] = C64::new(1.0, 0.0);
        }
    }
    f
}

/// Spectral projections of the OO-invariant family: the maximally entangled
/// projector, the antisymmetric projector, and the rest of the symmetric
/// subspace.
pub fn oo_projections(d: usize) -> Result<[CMat; 3]> {
    let v = maximally_entangled_vector(d)?;
    let p0 = &v * v.adjoint();
    let f = flip_operator(d);
    let eye = CMat::identity(d * d, d * d);
    let p1 = (&eye - &f).scale(0.5);
    let p2 = (&eye + &f).scale(0.5) - &p0;
    Ok([p0, p1, p2])
}

/// Noisy singlet p P+ + (1-p) I/m^2.
pub fn noisy_singlet(p: f64, m: usize) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("mixing weight {p} outside [0, 1]")));
    }
    let plus = maximally_entangled(m)?;
    let n = m * m;
    let mat = plus.mat().scale(p) + CMat::identity(n, n).scale((1.0 - p) / n as f64);
    DensityMatrix::new(mat, vec![m, m])
}

/// OO-invariant state with the given (d, f, g) moments, built from the
/// spectral projections: rho = sum_k w_k p_k / tr(p_k) with
/// w0 = f/d, w1 = (1-g)/2, w2 = (1 + g - 2f/d)/2.
pub fn oo_state(params: OoStateParams) -> Result<DensityMatrix> {
    params.validate()?;
    let d = params.d;
    let df = d as f64;
    let mut weights = [
        params.f / df,
        (1.0 - params.g) / 2.0,
        (1.0 + params.g - 2.0 * params.f / df) / 2.0,
    ];
    for w in &mut weights {
        if *w < 0.0 {
            // validate() already bounded the violation by rounding noise
            *w = 0.0;
        }
    }
    let projections = oo_projections(d)?;
    let traces = [
        1.0,
        df * (df - 1.0) / 2.0,
        df * (df + 1.0) / 2.0 - 1.0,
    ];
    let n = d * d;
    let mut mat = CMat::zeros(n, n);
    for k in 0..3 {
        if traces[k] > 0.0 {
            mat += projections[k].scale(weights[k] / traces[k]);
        }
    }
    DensityMatrix::new(mat, vec![d, d])
}

/// Moments (f, g) of a state on d(x)d with equal local dimensions.
pub fn oo_moments(rho: &DensityMatrix) -> Result<(f64, f64)> {
    let d = equal_local_dim(rho)?;
    let v = maximally_entangled_vector(d)?;
    let p0 = &v * v.adjoint();
    let f = (rho.mat() * p0).trace().re * d as f64;
    let g = (rho.mat() * flip_operator(d)).trace().re;
    Ok((f, g))
}

fn equal_local_dim(rho: &DensityMatrix) -> Result<usize> {
    match rho.dims() {
        [a, b] if a == b => Ok(*a),
        dims => Err(Error::DimMismatch(format!(
            "expected two equal local dimensions, got {dims:?}"
        ))),
    }
}

/// Schmidt decomposition of a unit-norm bipartite vector.
pub fn schmidt(v: &CVec, dims: &[usize]) -> Result<SchmidtDecomposition> {
    let [da, db] = match dims {
        [a, b] => [*a, *b],
        _ => {
            return Err(Error::DimMismatch(format!(
                "Schmidt decomposition needs exactly two parties, got {dims:?}"
            )))
        }
    };
    if da * db != v.len() {
        return Err(Error::DimMismatch(format!(
            "dimensions {dims:?} do not match vector of length {}",
            v.len()
        )));
    }
    if (v.norm() - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidState(format!(
            "vector norm {} is not 1 within 1e-8",
            v.norm()
        )));
    }
    let coeff = CMat::from_fn(da, db, |i, j| v[i * db + j]);
    let svd = SVD::new(coeff, true, true);
    let u = svd.u.expect("svd requested u");
    let v_t = svd.v_t.expect("svd requested v_t");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| {
        svd.singular_values[j]
            .partial_cmp(&svd.singular_values[i])
            .unwrap()
    });
    let mut coeffs = Vec::new();
    let mut basis_a = Vec::new();
    let mut basis_b = Vec::new();
    for &k in &order {
        let c = svd.singular_values[k];
        if c > 1e-12 {
            coeffs.push(c);
            basis_a.push(CVec::from_column_slice(u.column(k).as_slice()));
            basis_b.push(v_t.row(k).transpose());
        }
    }
    Ok(SchmidtDecomposition {
        coeffs,
        basis_a,
        basis_b,
    })
}

/// Exact isotropic twirl: the average over U(x)U* conjugations, which keeps
/// the fidelity moment tr(rho P+) and projects onto the noisy-singlet line
/// with p = (m^2 tr(rho P+) - 1)/(m^2 - 1). The weight p may be negative for
/// sub-uniform fidelity; the output is built directly and re-validated
/// instead of being clamped.
pub fn twirl_isotropic(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let m = equal_local_dim(rho)?;
    let v = maximally_entangled_vector(m)?;
    let p0 = &v * v.adjoint();
    let fidelity = (rho.mat() * &p0).trace().re;
    let n = (m * m) as f64;
    let p = (n * fidelity - 1.0) / (n - 1.0);
    let mat = p0.scale(p) + CMat::identity(m * m, m * m).scale((1.0 - p) / n);
    DensityMatrix::new(mat, vec![m, m])
}

/// Exact OO twirl: conditional expectation onto the algebra spanned by the
/// three spectral projections; preserves the moments f and g.
pub fn twirl_oo(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let d = equal_local_dim(rho)?;
    let projections = oo_projections(d)?;
    let n = d * d;
    let mut mat = CMat::zeros(n, n);
    for p in &projections {
        let w = (rho.mat() * p).trace().re;
        let tr = p.trace().re;
        if tr > 1e-12 {
            mat += p.scale(w / tr);
        }
    }
    DensityMatrix::new(mat, vec![d, d])
}

fn standard_normal(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn gaussian_complex(rng: &mut impl Rng) -> C64 {
    C64::new(standard_normal(rng), standard_normal(rng))
}

/// Unit vector with Gaussian entries: Haar-uniform on the sphere.
pub fn random_unit_vector(n: usize, rng: &mut impl Rng) -> CVec {
    loop {
        let v = CVec::from_fn(n, |_, _| gaussian_complex(rng));
        let norm = v.norm();
        if norm > 1e-6 {
            return v / C64::new(norm, 0.0);
        }
    }
}

/// Haar-random pure state vector on the given dimension profile.
pub fn random_pure(dims: &[usize], rng: &mut impl Rng) -> Result<CVec> {
    let total: usize = dims.iter().product();
    if total < 2 || dims.iter().any(|&d| d == 0) {
        return Err(Error::DimMismatch(format!("invalid dimensions {dims:?}")));
    }
    Ok(random_unit_vector(total, rng))
}

/// Random density matrix rho = G G^dag / tr(G G^dag) with G of the declared
/// rank (Hilbert-Schmidt-style ensemble).
pub fn random_density(dims: &[usize], rank: usize, rng: &mut impl Rng) -> Result<DensityMatrix> {
    let total: usize = dims.iter().product();
    if rank == 0 {
        return Err(Error::Domain("rank must be at least 1".to_string()));
    }
    let g = CMat::from_fn(total, rank.min(total), |_, _| gaussian_complex(rng));
    let gg = &g * g.adjoint();
    let tr = gg.trace().re;
    DensityMatrix::new(gg.scale(1.0 / tr), dims.to_vec())
}

/// Random separable state: a convex mixture of product projectors, so its
/// negativity is exactly zero up to round-off.
pub fn random_separable(
    dims: &[usize],
    terms: usize,
    rng: &mut impl Rng,
) -> Result<DensityMatrix> {
    let [da, db] = match dims {
        [a, b] => [*a, *b],
        _ => {
            return Err(Error::DimMismatch(format!(
                "separable sampling needs exactly two parties, got {dims:?}"
            )))
        }
    };
    if terms == 0 {
        return Err(Error::Domain("terms must be at least 1".to_string()));
    }
    let mut weights: Vec<f64> = (0..terms).map(|_| rng.gen_range(0.0..1.0) + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let mut mat = CMat::zeros(da * db, da * db);
    for w in weights {
        let ea = random_unit_vector(da, rng);
        let fb = random_unit_vector(db, rng);
        let prod = linalg::tensor_product(&(&ea * ea.adjoint()), &(&fb * fb.adjoint()));
        mat += prod.scale(w);
    }
    DensityMatrix::new(mat, vec![da, db])
}

/// Haar-random unitary via QR of a complex Gaussian matrix with the
/// sign-fixed diagonal correction.
pub fn haar_unitary(n: usize, rng: &mut impl Rng) -> CMat {
    let g = CMat::from_fn(n, n, |_, _| gaussian_complex(rng));
    let qr = QR::new(g);
    let q = qr.q();
    let r = qr.r();
    let mut u = q;
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 {
            d / C64::new(d.norm(), 0.0)
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..n {
            u[(i, k)] *= phase;
        }
    }
    u
}

/// GHZ state vector of n qubits: (|0...0> + |1...1>)/sqrt(2).
pub fn ghz_vector(n_qubits: usize) -> Result<CVec> {
    if n_qubits < 2 {
        return Err(Error::Domain(format!("GHZ needs at least 2 qubits, got {n_qubits}")));
    }
    let total = 1usize << n_qubits;
    let mut v = CVec::zeros(total);
    let amp = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    v[0] = amp;
    v[total - 1] = amp;
    Ok(v)
}

/// GHZ state of n qubits as a density matrix.
pub fn ghz(n_qubits: usize) -> Result<DensityMatrix> {
    let v = ghz_vector(n_qubits)?;
    DensityMatrix::from_pure(&v, vec![2; n_qubits])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn maximally_entangled_qubits() {
        let rho = maximally_entangled(2).unwrap();
        for &(r, c) in &[(0usize, 0usize), (0, 3), (3, 0), (3, 3)] {
            assert_relative_eq!(rho.mat()[(r, c)].re, 0.5, epsilon = 1e-15);
        }
        assert_relative_eq!(rho.mat().trace().re, 1.0, epsilon = 1e-15);
        for party in [0usize, 1] {
            let marginal = linalg::partial_trace(rho.mat(), rho.dims(), &[party]).unwrap();
            let expect = CMat::identity(2, 2).scale(0.5);
            assert!((marginal - expect).iter().all(|z| z.norm() < 1e-14));
        }
        assert!(maximally_entangled(1).is_err());
    }

    #[test]
    fn noisy_singlet_endpoints() {
        let pure = noisy_singlet(1.0, 3).unwrap();
        let plus = maximally_entangled(3).unwrap();
        assert!((pure.mat() - plus.mat()).iter().all(|z| z.norm() < 1e-14));
        let uniform = noisy_singlet(0.0, 3).unwrap();
        let expect = CMat::identity(9, 9).scale(1.0 / 9.0);
        assert!((uniform.mat() - expect).iter().all(|z| z.norm() < 1e-14));
        assert!(noisy_singlet(1.5, 2).is_err());
        assert!(noisy_singlet(-0.1, 2).is_err());
    }

    #[test]
    fn oo_state_antisymmetric_vertex() {
        // (d, f, g) = (3, 0, -1) is the normalized antisymmetric projector.
        let rho = oo_state(OoStateParams::new(3, 0.0, -1.0).unwrap()).unwrap();
        let f = flip_operator(3);
        let expect = (CMat::identity(9, 9) - f).scale(1.0 / 6.0);
        assert!((rho.mat() - expect).iter().all(|z| z.norm() < 1e-13));
    }

    #[test]
    fn oo_state_maximally_entangled_vertex() {
        let rho = oo_state(OoStateParams::new(3, 3.0, 1.0).unwrap()).unwrap();
        let plus = maximally_entangled(3).unwrap();
        assert!((rho.mat() - plus.mat()).iter().all(|z| z.norm() < 1e-13));
    }

    #[test]
    fn oo_state_reproduces_moments() {
        for d in [2usize, 3, 4] {
            let df = d as f64;
            for &(f, g) in &[
                (0.3, 0.1),
                (0.9, 0.9),
                (df * 0.7, 0.6),
                (0.0, -0.5),
                (df * 0.375, -0.25), // exactly on the slanted edge f = d(1+g)/2
            ] {
                let params = match OoStateParams::new(d, f, g) {
                    Ok(p) => p,
                    Err(_) => continue,
                };
                let rho = oo_state(params).unwrap();
                let (fm, gm) = oo_moments(&rho).unwrap();
                assert_relative_eq!(fm, f, epsilon = 1e-10);
                assert_relative_eq!(gm, g, epsilon = 1e-10);
            }
        }
        assert!(OoStateParams::new(3, 3.0, 0.0).is_err()); // violates f <= d(1+g)/2
        assert!(OoStateParams::new(3, -0.5, 0.0).is_err());
    }

    #[test]
    fn schmidt_of_basis_state() {
        let mut v = CVec::zeros(4);
        v[0] = C64::new(1.0, 0.0);
        let s = schmidt(&v, &[2, 2]).unwrap();
        assert_eq!(s.coeffs.len(), 1);
        assert_relative_eq!(s.coeffs[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn schmidt_of_bell_vector() {
        let v = maximally_entangled_vector(2).unwrap();
        let s = schmidt(&v, &[2, 2]).unwrap();
        assert_eq!(s.coeffs.len(), 2);
        for c in &s.coeffs {
            assert_relative_eq!(*c, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
        }
    }

    #[test]
    fn schmidt_of_skewed_superposition() {
        // sqrt(0.8)|00> + sqrt(0.2)|11>: the coefficient matrix is already
        // diagonal, so the singular values are the amplitudes themselves.
        let mut v = CVec::zeros(4);
        v[0] = C64::new(0.8f64.sqrt(), 0.0);
        v[3] = C64::new(0.2f64.sqrt(), 0.0);
        let s = schmidt(&v, &[2, 2]).unwrap();
        assert_relative_eq!(s.coeffs[0], 0.8f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(s.coeffs[1], 0.2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn schmidt_reconstructs_random_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for dims in [[2usize, 2], [2, 3], [3, 4]] {
            let v = random_pure(&dims, &mut rng).unwrap();
            let s = schmidt(&v, &dims).unwrap();
            let back = s.reconstruct();
            assert!((back - &v).norm() < 1e-9);
            let sq: f64 = s.coeffs.iter().map(|c| c * c).sum();
            assert_relative_eq!(sq, 1.0, epsilon = 1e-10);
            for w in s.coeffs.windows(2) {
                assert!(w[0] >= w[1]);
            }
            // Basis orthonormality.
            for basis in [&s.basis_a, &s.basis_b] {
                for i in 0..basis.len() {
                    for j in 0..basis.len() {
                        let ip = basis[i].dotc(&basis[j]);
                        let expect = if i == j { 1.0 } else { 0.0 };
                        assert!((ip - C64::new(expect, 0.0)).norm() < 1e-10);
                    }
                }
            }
        }
        let unnormalized = CVec::from_fn(4, |_, _| C64::new(1.0, 0.0));
        assert!(schmidt(&unnormalized, &[2, 2]).is_err());
    }

    #[test]
    fn twirl_isotropic_fixed_points() {
        let rho = noisy_singlet(0.35, 3).unwrap();
        let tw = twirl_isotropic(&rho).unwrap();
        assert!((tw.mat() - rho.mat()).iter().all(|z| z.norm() < 1e-13));
        let uniform = noisy_singlet(0.0, 2).unwrap();
        let tw = twirl_isotropic(&uniform).unwrap();
        assert!((tw.mat() - uniform.mat()).iter().all(|z| z.norm() < 1e-13));
    }

    #[test]
    fn twirls_are_idempotent_and_trace_preserving() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..20 {
            let rho = random_density(&[3, 3], 5, &mut rng).unwrap();
            for twirl in [twirl_isotropic, twirl_oo] {
                let once = twirl(&rho).unwrap();
                let twice = twirl(&once).unwrap();
                assert!((twice.mat() - once.mat()).iter().all(|z| z.norm() < 1e-12));
                assert_relative_eq!(once.mat().trace().re, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn twirl_isotropic_matches_sampled_haar_average() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let rho = random_density(&[3, 3], 4, &mut rng).unwrap();
        let exact = twirl_isotropic(&rho).unwrap();
        let mut avg = CMat::zeros(9, 9);
        let samples = 10_000;
        for _ in 0..samples {
            let u = haar_unitary(3, &mut rng);
            let w = linalg::tensor_product(&u, &u.conjugate());
            avg += &w * rho.mat() * w.adjoint();
        }
        avg /= C64::new(samples as f64, 0.0);
        let max_dev = (avg - exact.mat())
            .iter()
            .map(|z| z.norm())
            .fold(0.0_f64, f64::max);
        assert!(max_dev < 2e-2, "Monte-Carlo twirl deviates by {max_dev}");
    }

    #[test]
    fn twirl_oo_preserves_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..10 {
            let rho = random_density(&[3, 3], 6, &mut rng).unwrap();
            let (f0, g0) = oo_moments(&rho).unwrap();
            let tw = twirl_oo(&rho).unwrap();
            let (f1, g1) = oo_moments(&tw).unwrap();
            assert_relative_eq!(f0, f1, epsilon = 1e-12);
            assert_relative_eq!(g0, g1, epsilon = 1e-12);
            // Twirled moments satisfy the triangle constraints.
            OoStateParams::new(3, f1, g1).unwrap();
            let phi = maximally_entangled(3).unwrap();
            let tw_phi = twirl_oo(&phi).unwrap();
            assert!((tw_phi.mat() - phi.mat()).iter().all(|z| z.norm() < 1e-12));
        }
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for n in [2usize, 3, 5] {
            let u = haar_unitary(n, &mut rng);
            let prod = &u * u.adjoint();
            assert!((prod - CMat::identity(n, n)).iter().all(|z| z.norm() < 1e-12));
        }
    }

    #[test]
    fn seeded_sampling_is_deterministic() {
        let mut rng1 = ChaCha8Rng::seed_from_u64(77);
        let mut rng2 = ChaCha8Rng::seed_from_u64(77);
        let a = random_density(&[2, 3], 3, &mut rng1).unwrap();
        let b = random_density(&[2, 3], 3, &mut rng2).unwrap();
        assert_eq!(a.mat(), b.mat());
        let va = random_pure(&[2, 2], &mut rng1).unwrap();
        let vb = random_pure(&[2, 2], &mut rng2).unwrap();
        assert_eq!(va, vb);
    }

    #[test]
    fn rank_one_random_density_is_projector() {
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let rho = random_density(&[2, 2], 1, &mut rng).unwrap();
        // Idempotent within tolerance and unit trace.
        let sq = rho.mat() * rho.mat();
        assert!((sq - rho.mat()).iter().all(|z| z.norm() < 1e-10));
    }

    #[test]
    fn ghz_marginals() {
        let rho = ghz(3).unwrap();
        assert_eq!(rho.dims(), &[2, 2, 2]);
        let red = linalg::partial_trace(rho.mat(), rho.dims(), &[2]).unwrap();
        // (|00><00| + |11><11|)/2
        assert_relative_eq!(red[(0, 0)].re, 0.5, epsilon = 1e-14);
        assert_relative_eq!(red[(3, 3)].re, 0.5, epsilon = 1e-14);
        assert_relative_eq!(red[(0, 3)].norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn density_matrix_rejects_bad_input() {
        let not_unit_trace = CMat::identity(4, 4);
        assert!(DensityMatrix::new(not_unit_trace, vec![2, 2]).is_err());
        let mut not_psd = CMat::identity(2, 2);
        not_psd[(0, 0)] = C64::new(1.5, 0.0);
        not_psd[(1, 1)] = C64::new(-0.5, 0.0);
        assert!(DensityMatrix::new(not_psd, vec![2]).is_err());
        let bell = maximally_entangled(2).unwrap();
        assert!(DensityMatrix::new(bell.mat().clone(), vec![2, 3]).is_err());
    }
}
