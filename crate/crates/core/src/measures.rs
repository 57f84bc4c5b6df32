//! Negativity and logarithmic negativity, plus their closed forms for pure
//! states and OO-invariant states, and the entropy-of-entanglement
//! comparison. Logarithms are base 2 throughout; results are in bits.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::states::{DensityMatrix, OoStateParams, SchmidtDecomposition};

/// Eigenvalues of the partial transpose above this (negative) threshold are
/// treated as zero, so separable states report exactly zero negativity
/// instead of accumulated round-off.
pub const NEG_EIG_THRESHOLD: f64 = -1e-12;

/// Everything the partial-transpose spectrum yields for one state.
#[derive(Debug, Clone, Serialize)]
pub struct MeasureReport {
    pub negativity: f64,
    pub log_negativity: f64,
    pub trace_norm_pt: f64,
    /// Raw negative eigenvalues of the partial transpose, for diagnostics.
    pub negative_eigvals: Vec<f64>,
}

fn require_bipartite(rho: &DensityMatrix, party: usize) -> Result<()> {
    if rho.party_count() != 2 {
        return Err(Error::DimMismatch(format!(
            "negativity needs a two-party state, got {} parties",
            rho.party_count()
        )));
    }
    if party > 1 {
        return Err(Error::DimMismatch(format!("invalid party index {party}")));
    }
    Ok(())
}

/// Negativity: the absolute sum of the negative eigenvalues of the partial
/// transpose. Zero for every PPT state.
pub fn negativity(rho: &DensityMatrix, party: usize) -> Result<f64> {
    require_bipartite(rho, party)?;
    let pt = rho.partial_transpose(party)?;
    let eigs = linalg::hermitian_eigenvalues(&pt)?;
    Ok(eigs
        .iter()
        .filter(|&&l| l < NEG_EIG_THRESHOLD)
        .sum::<f64>()
        .abs())
}

/// Logarithmic negativity log2(1 + 2 N), in bits. Zero exactly when the
/// state is PPT.
pub fn log_negativity(rho: &DensityMatrix, party: usize) -> Result<f64> {
    Ok((1.0 + 2.0 * negativity(rho, party)?).log2())
}

/// Full report: negativity, log-negativity, partial-transpose trace norm,
/// and the raw negative eigenvalue list.
pub fn measure_report(rho: &DensityMatrix, party: usize) -> Result<MeasureReport> {
    require_bipartite(rho, party)?;
    let pt = rho.partial_transpose(party)?;
    let eigs = linalg::hermitian_eigenvalues(&pt)?;
    let negative_eigvals: Vec<f64> = eigs.iter().copied().filter(|&l| l < 0.0).collect();
    let negativity = eigs
        .iter()
        .filter(|&&l| l < NEG_EIG_THRESHOLD)
        .sum::<f64>()
        .abs();
    let trace_norm_pt: f64 = eigs.iter().map(|l| l.abs()).sum();
    Ok(MeasureReport {
        negativity,
        log_negativity: (1.0 + 2.0 * negativity).log2(),
        trace_norm_pt,
        negative_eigvals,
    })
}

/// Closed form for pure states: ((sum_a c_a)^2 - 1)/2, half the robustness
/// of entanglement.
pub fn negativity_pure(s: &SchmidtDecomposition) -> f64 {
    let sum: f64 = s.coeffs.iter().sum();
    (sum * sum - 1.0) / 2.0
}

/// Closed form for OO-invariant states:
/// |1-f|/4 + |1+f-2g/d|/4 + |g/d|/2 - 1/2.
pub fn negativity_oo(params: OoStateParams) -> Result<f64> {
    params.validate()?;
    let d = params.d as f64;
    let (f, g) = (params.f, params.g);
    let value =
        0.25 * (1.0 - f).abs() + 0.25 * (1.0 + f - 2.0 * g / d).abs() + 0.5 * (g / d).abs() - 0.5;
    Ok(value.max(0.0))
}

/// Robustness of entanglement for OO-invariant states:
/// max(|2f-1|-1, |2g-1|-1, 0)/2.
pub fn robustness_oo(params: OoStateParams) -> Result<f64> {
    params.validate()?;
    let a = (2.0 * params.f - 1.0).abs() - 1.0;
    let b = (2.0 * params.g - 1.0).abs() - 1.0;
    Ok(0.5 * a.max(b).max(0.0))
}

/// Entropy of entanglement -sum_a c_a^2 log2 c_a^2, in bits. Bounded above
/// by the logarithmic negativity, with equality exactly when all nonzero
/// coefficients are equal.
pub fn entropy_of_entanglement(s: &SchmidtDecomposition) -> f64 {
    s.coeffs
        .iter()
        .map(|&c| {
            let p = c * c;
            if p > 0.0 {
                -p * p.log2()
            } else {
                0.0
            }
        })
        .sum()
}
