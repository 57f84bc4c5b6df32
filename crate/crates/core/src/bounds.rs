//! Operational bounds derived from the negativity: singlet-distance and
//! teleportation bounds for a single copy, the noisy-singlet closed forms
//! they are tight on, and the distillation-rate bound.
//!
//! Two printed signs in the source material are corrected here: the
//! teleportation-distance bound is 2(m - 1 - 2N)/(m + 1), which is what the
//! chain "distance = m/(m+1) times singlet distance" together with the
//! singlet bound forces (the plus variant would forbid perfect teleportation
//! with a maximally entangled state), and the channel-fidelity bound is
//! 2(N + 1)/(m + 1) via f = (F m + 1)/(m + 1).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures;
use crate::states::DensityMatrix;

/// All single-copy bounds for one state, with the raw (unclamped) values
/// kept alongside the physical ones so clamping is visible.
#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub m: usize,
    pub negativity: f64,
    pub singlet_distance_lb: f64,
    pub teleport_distance_lb: f64,
    pub singlet_fidelity_ub: f64,
    pub channel_fidelity_ub: f64,
    pub distillation_ub_bits: f64,
    pub raw_singlet_distance_lb: f64,
    pub raw_teleport_distance_lb: f64,
    pub raw_singlet_fidelity_ub: f64,
    pub raw_channel_fidelity_ub: f64,
}

fn equal_local_dim(rho: &DensityMatrix) -> Result<usize> {
    match rho.dims() {
        [a, b] if a == b => Ok(*a),
        dims => Err(Error::DimMismatch(format!(
            "bounds need two equal local dimensions, got {dims:?}"
        ))),
    }
}

/// Lower bound on the achievable trace distance to the maximally entangled
/// state: max(0, 2(1 - (1 + 2N)/m)).
pub fn singlet_distance_bound(rho: &DensityMatrix) -> Result<f64> {
    let m = equal_local_dim(rho)? as f64;
    let n = measures::negativity(rho, 0)?;
    Ok((2.0 * (1.0 - (1.0 + 2.0 * n) / m)).max(0.0))
}

fn check_noisy_args(p: f64, m: usize) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("mixing weight {p} outside [0, 1]")));
    }
    if m < 2 {
        return Err(Error::Domain(format!("local dimension {m} < 2")));
    }
    Ok(())
}

/// Exact distance of a noisy singlet to the maximally entangled state:
/// 2(1 - p)(m^2 - 1)/m^2.
pub fn noisy_singlet_distance(p: f64, m: usize) -> Result<f64> {
    check_noisy_args(p, m)?;
    let m2 = (m * m) as f64;
    Ok(2.0 * (1.0 - p) * (m2 - 1.0) / m2)
}

/// Closed form m p + (1 - p)/m for the trace norm of the partially
/// transposed noisy singlet. It describes the regime where the partial
/// transpose has a negative part, p >= 1/(m + 1); below that the state is
/// PPT and the numeric trace norm is 1.
pub fn noisy_singlet_pt_norm(p: f64, m: usize) -> Result<f64> {
    check_noisy_args(p, m)?;
    Ok(m as f64 * p + (1.0 - p) / m as f64)
}

/// Smallest mixing weight for which the noisy singlet is NPT and the closed
/// form above applies.
pub fn noisy_singlet_npt_threshold(m: usize) -> f64 {
    1.0 / (m as f64 + 1.0)
}

/// Teleportation distance of the depolarizing channel built from a noisy
/// singlet: 2(1 - p)(m - 1)/m.
pub fn depolarizing_channel_distance(p: f64, m: usize) -> Result<f64> {
    check_noisy_args(p, m)?;
    Ok(2.0 * (1.0 - p) * (m as f64 - 1.0) / m as f64)
}

/// The full single-copy report: singlet-distance and teleportation-distance
/// lower bounds, fidelity upper bounds, and the distillation bound.
pub fn teleportation_bounds(rho: &DensityMatrix) -> Result<BoundsReport> {
    let m_usize = equal_local_dim(rho)?;
    let m = m_usize as f64;
    let n = measures::negativity(rho, 0)?;
    let raw_singlet_distance_lb = 2.0 * (1.0 - (1.0 + 2.0 * n) / m);
    let raw_teleport_distance_lb = 2.0 * (m - 1.0 - 2.0 * n) / (m + 1.0);
    let raw_singlet_fidelity_ub = (1.0 + 2.0 * n) / m;
    let raw_channel_fidelity_ub = 2.0 * (n + 1.0) / (m + 1.0);
    Ok(BoundsReport {
        m: m_usize,
        negativity: n,
        singlet_distance_lb: raw_singlet_distance_lb.clamp(0.0, 2.0),
        teleport_distance_lb: raw_teleport_distance_lb.clamp(0.0, 2.0),
        singlet_fidelity_ub: raw_singlet_fidelity_ub.clamp(0.0, 1.0),
        channel_fidelity_ub: raw_channel_fidelity_ub.clamp(0.0, 1.0),
        distillation_ub_bits: (1.0 + 2.0 * n).log2(),
        raw_singlet_distance_lb,
        raw_teleport_distance_lb,
        raw_singlet_fidelity_ub,
        raw_channel_fidelity_ub,
    })
}

/// Slack of the one-shot distillation bound: E_N - log2(d) - log2(1 - Delta)
/// for a target of a d-dimensional maximally entangled state achieved with
/// error Delta. Negative slack means the combination is impossible.
pub fn one_shot_distill_bound(rho: &DensityMatrix, d: usize, delta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::Domain(format!(
            "achieved error {delta} outside [0, 1)"
        )));
    }
    if d < 2 {
        return Err(Error::Domain(format!("target dimension {d} < 2")));
    }
    let en = measures::log_negativity(rho, 0)?;
    Ok(en - (d as f64).log2() - (1.0 - delta).log2())
}

/// Upper bound on the asymptotic distillation rate at any error level
/// below one: the logarithmic negativity itself, in bits per copy.
pub fn distillation_rate_bound(rho: &DensityMatrix) -> Result<f64> {
    measures::log_negativity(rho, 0)
}
