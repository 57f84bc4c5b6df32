//! Dense complex-matrix kernel: hermitian eigendecomposition, trace norm,
//! and tensor/partial operations on multipartite index structures.
//!
//! Composite indices are row-major: the basis vector |i_A j_B> of an
//! m_A x m_B system sits at index `i * d_B + j`, and analogously for more
//! parties. All partial operations below commit to that convention so that
//! results are bit-reproducible.

use nalgebra::linalg::SymmetricEigen;

use crate::error::{Error, Result};
use crate::{C64, CMat};

/// Relative tolerance for accepting a matrix as hermitian. Inputs failing it
/// are rejected rather than symmetrized, so data bugs surface early.
pub const HERMITICITY_REL_TOL: f64 = 1e-12;

/// Largest deviation max_{jk} |A_jk - conj(A_kj)| scaled by max(1, max |A|).
pub fn hermiticity_deviation(a: &CMat) -> f64 {
    let scale = a.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
    let mut dev = 0.0_f64;
    for j in 0..a.nrows() {
        for k in j..a.ncols() {
            dev = dev.max((a[(j, k)] - a[(k, j)].conj()).norm());
        }
    }
    dev / scale
}

pub fn require_square(a: &CMat) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(())
}

/// Reject non-square or non-hermitian (beyond [`HERMITICITY_REL_TOL`]) input.
pub fn require_hermitian(a: &CMat) -> Result<()> {
    require_square(a)?;
    let dev = hermiticity_deviation(a);
    if dev > HERMITICITY_REL_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }
    Ok(())
}

fn check_dims(a: &CMat, dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.iter().any(|&d| d == 0) {
        return Err(Error::DimMismatch(format!(
            "invalid local dimensions {dims:?}"
        )));
    }
    let total: usize = dims.iter().product();
    if total != a.nrows() || total != a.ncols() {
        return Err(Error::DimMismatch(format!(
            "local dimensions {dims:?} give total {total}, matrix is {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(())
}

/// Eigenvalues of a hermitian matrix, sorted nonincreasing.
pub fn hermitian_eigenvalues(a: &CMat) -> Result<Vec<f64>> {
    require_hermitian(a)?;
    let eig = SymmetricEigen::new(a.clone());
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(vals)
}

/// Hermitian eigendecomposition; eigenpairs sorted by nonincreasing value.
pub fn hermitian_eigen(a: &CMat) -> Result<(Vec<f64>, CMat)> {
    require_hermitian(a)?;
    let eig = SymmetricEigen::new(a.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = CMat::zeros(a.nrows(), a.ncols());
    for (new, &old) in order.iter().enumerate() {
        vecs.set_column(new, &eig.eigenvectors.column(old));
    }
    Ok((vals, vecs))
}

/// Trace norm of a hermitian matrix: the sum of absolute eigenvalues.
pub fn trace_norm(a: &CMat) -> Result<f64> {
    Ok(hermitian_eigenvalues(a)?.iter().map(|l| l.abs()).sum())
}

/// Row-major strides for a list of local dimensions.
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

fn decompose(mut idx: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
}

fn compose(digits: &[usize], strides: &[usize]) -> usize {
    digits.iter().zip(strides).map(|(d, s)| d * s).sum()
}

/// Partial transpose with respect to one party.
///
/// For two parties and `party = 0` this realizes
/// `<i_A j_B| out |k_A l_B> = <k_A j_B| a |i_A l_B>`; the operation is an
/// involution and preserves hermiticity and trace.
pub fn partial_transpose(a: &CMat, dims: &[usize], party: usize) -> Result<CMat> {
    check_dims(a, dims)?;
    if party >= dims.len() {
        return Err(Error::DimMismatch(format!(
            "party index {party} out of range for {} parties",
            dims.len()
        )));
    }
    let n = a.nrows();
    let st = strides(dims);
    let mut out = CMat::zeros(n, n);
    let mut ri = vec![0usize; dims.len()];
    let mut ci = vec![0usize; dims.len()];
    for r in 0..n {
        decompose(r, dims, &mut ri);
        for c in 0..n {
            decompose(c, dims, &mut ci);
            let swap = (ri[party], ci[party]);
            ri[party] = swap.1;
            ci[party] = swap.0;
            out[(compose(&ri, &st), compose(&ci, &st))] = a[(r, c)];
            ri[party] = swap.0;
            ci[party] = swap.1;
        }
    }
    Ok(out)
}

/// Kronecker product with row-major composite indexing.
pub fn tensor_product(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Trace out the listed parties, keeping the rest in their original order.
pub fn partial_trace(a: &CMat, dims: &[usize], traced: &[usize]) -> Result<CMat> {
    check_dims(a, dims)?;
    if traced.iter().any(|&p| p >= dims.len()) {
        return Err(Error::DimMismatch(format!(
            "traced parties {traced:?} out of range for {} parties",
            dims.len()
        )));
    }
    let mut seen = vec![false; dims.len()];
    for &p in traced {
        if seen[p] {
            return Err(Error::DimMismatch(format!("party {p} traced twice")));
        }
        seen[p] = true;
    }
    let kept: Vec<usize> = (0..dims.len()).filter(|p| !seen[*p]).collect();
    if kept.is_empty() {
        return Err(Error::DimMismatch(
            "cannot trace out every party".to_string(),
        ));
    }
    let kept_dims: Vec<usize> = kept.iter().map(|&p| dims[p]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&p| dims[p]).collect();
    let n_out: usize = kept_dims.iter().product();
    let n_tr: usize = traced_dims.iter().product();

    let st = strides(dims);
    let mut out = CMat::zeros(n_out, n_out);
    let mut kr = vec![0usize; kept.len()];
    let mut kc = vec![0usize; kept.len()];
    let mut td = vec![0usize; traced.len().max(1)];
    let mut full_r = vec![0usize; dims.len()];
    let mut full_c = vec![0usize; dims.len()];
    for r in 0..n_out {
        decompose(r, &kept_dims, &mut kr);
        for c in 0..n_out {
            decompose(c, &kept_dims, &mut kc);
            let mut sum = C64::new(0.0, 0.0);
            for t in 0..n_tr {
                decompose(t, &traced_dims, &mut td[..traced.len()]);
                for (slot, &p) in kept.iter().enumerate() {
                    full_r[p] = kr[slot];
                    full_c[p] = kc[slot];
                }
                for (slot, &p) in traced.iter().enumerate() {
                    full_r[p] = td[slot];
                    full_c[p] = td[slot];
                }
                sum += a[(compose(&full_r, &st), compose(&full_c, &st))];
            }
            out[(r, c)] = sum;
        }
    }
    Ok(out)
}

/// Reorder parties: new party `q` is old party `perm[q]`. Returns the
/// permuted matrix together with the reordered dimension list.
pub fn permute_parties(a: &CMat, dims: &[usize], perm: &[usize]) -> Result<(CMat, Vec<usize>)> {
    check_dims(a, dims)?;
    check_perm(perm, dims.len())?;
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let st_old = strides(dims);
    let st_new = strides(&new_dims);
    let n = a.nrows();
    let mut out = CMat::zeros(n, n);
    let mut ri = vec![0usize; dims.len()];
    let mut ci = vec![0usize; dims.len()];
    let mut rn = vec![0usize; dims.len()];
    let mut cn = vec![0usize; dims.len()];
    for r in 0..n {
        decompose(r, dims, &mut ri);
        for c in 0..n {
            decompose(c, dims, &mut ci);
            for (q, &p) in perm.iter().enumerate() {
                rn[q] = ri[p];
                cn[q] = ci[p];
            }
            out[(compose(&rn, &st_new), compose(&cn, &st_new))] = a[(compose(&ri, &st_old), compose(&ci, &st_old))];
        }
    }
    Ok((out, new_dims))
}

/// Same reordering for a pure-state vector.
pub fn permute_vector_parties(
    v: &crate::CVec,
    dims: &[usize],
    perm: &[usize],
) -> Result<(crate::CVec, Vec<usize>)> {
    let total: usize = dims.iter().product();
    if total != v.len() {
        return Err(Error::DimMismatch(format!(
            "local dimensions {dims:?} give total {total}, vector has length {}",
            v.len()
        )));
    }
    check_perm(perm, dims.len())?;
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let st_new = strides(&new_dims);
    let mut out = crate::CVec::zeros(total);
    let mut digits = vec![0usize; dims.len()];
    let mut nd = vec![0usize; dims.len()];
    for i in 0..total {
        decompose(i, dims, &mut digits);
        for (q, &p) in perm.iter().enumerate() {
            nd[q] = digits[p];
        }
        out[compose(&nd, &st_new)] = v[i];
    }
    Ok((out, new_dims))
}

fn check_perm(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::DimMismatch(format!(
            "permutation {perm:?} has wrong length for {n} parties"
        )));
    }
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::DimMismatch(format!("invalid permutation {perm:?}")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Tensor product of two bipartite operators, regrouped so Alice's factors
/// come first: the result lives on (A1 A2)|(B1 B2) with composite local
/// dimensions `dA1*dA2` and `dB1*dB2`.
pub fn tensor_bipartite(
    a: &CMat,
    dims_a: (usize, usize),
    b: &CMat,
    dims_b: (usize, usize),
) -> Result<CMat> {
    check_dims(a, &[dims_a.0, dims_a.1])?;
    check_dims(b, &[dims_b.0, dims_b.1])?;
    let kron = tensor_product(a, b);
    let four = [dims_a.0, dims_a.1, dims_b.0, dims_b.1];
    let (regrouped, _) = permute_parties(&kron, &four, &[0, 2, 1, 3])?;
    Ok(regrouped)
}
