//! Local measurement machinery used to exercise the monotonicity claims:
//! Kraus families acting on one side, the partial-transpose commutation
//! identity, and randomized monotonicity sweeps.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::measures;
use crate::states::{haar_unitary, random_density, DensityMatrix};
use crate::{C64, CMat};

/// Outcomes with probability below this are dropped; their possible
/// negativity contribution is bounded and folded into the trial's budget.
pub const PRUNE_PROB: f64 = 1e-14;

/// Which party the operators act on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// A local measurement: Kraus operators on one declared side with
/// sum_i M_i^dag M_i <= I within tolerance.
#[derive(Debug, Clone)]
pub struct KrausFamily {
    pub side: Side,
    pub operators: Vec<CMat>,
}

impl KrausFamily {
    pub fn new(side: Side, operators: Vec<CMat>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::InvalidState(
                "Kraus family needs at least one operator".to_string(),
            ));
        }
        let d = operators[0].nrows();
        for m in &operators {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::DimMismatch(
                    "Kraus operators must share one square shape".to_string(),
                ));
            }
        }
        let mut total = CMat::zeros(d, d);
        for m in &operators {
            total += m.adjoint() * m;
        }
        let slack = CMat::identity(d, d) - total;
        let eigs = linalg::hermitian_eigenvalues(&slack)?;
        if eigs.last().copied().unwrap_or(0.0) < -1e-10 {
            return Err(Error::InvalidState(format!(
                "Kraus completeness violated: sum M^dag M exceeds identity by {:e}",
                -eigs.last().unwrap()
            )));
        }
        Ok(Self { side, operators })
    }

    pub fn local_dim(&self) -> usize {
        self.operators[0].nrows()
    }

    /// Embed operator i into the full bipartite space.
    fn embedded(&self, i: usize, dims: &[usize]) -> CMat {
        match self.side {
            Side::A => linalg::tensor_product(&self.operators[i], &CMat::identity(dims[1], dims[1])),
            Side::B => linalg::tensor_product(&CMat::identity(dims[0], dims[0]), &self.operators[i]),
        }
    }

    fn check_shape(&self, dims: &[usize]) -> Result<()> {
        let expected = match self.side {
            Side::A => dims[0],
            Side::B => dims[1],
        };
        if self.local_dim() != expected {
            return Err(Error::DimMismatch(format!(
                "Kraus operators act on dimension {}, state side has {}",
                self.local_dim(),
                expected
            )));
        }
        Ok(())
    }
}

/// One branch of a local measurement.
#[derive(Debug, Clone)]
pub struct MeasurementOutcome {
    pub probability: f64,
    pub state: DensityMatrix,
}

fn require_two_parties(rho: &DensityMatrix) -> Result<()> {
    if rho.party_count() != 2 {
        return Err(Error::DimMismatch(format!(
            "local measurements need a two-party state, got {} parties",
            rho.party_count()
        )));
    }
    Ok(())
}

/// Apply a local Kraus measurement: outcome i occurs with probability
/// tr((I (x) M_i) rho (I (x) M_i)^dag) and leaves the normalized
/// conditional state. Outcomes below [`PRUNE_PROB`] are dropped.
pub fn apply_measurement(
    rho: &DensityMatrix,
    family: &KrausFamily,
) -> Result<Vec<MeasurementOutcome>> {
    require_two_parties(rho)?;
    family.check_shape(rho.dims())?;
    let mut outcomes = Vec::new();
    for i in 0..family.operators.len() {
        let e = family.embedded(i, rho.dims());
        let raw = &e * rho.mat() * e.adjoint();
        let p = raw.trace().re;
        if p < PRUNE_PROB {
            continue;
        }
        let state = DensityMatrix::new(raw.scale(1.0 / p), rho.dims().to_vec())?;
        outcomes.push(MeasurementOutcome {
            probability: p,
            state,
        });
    }
    Ok(outcomes)
}

/// Conjugate by a (possibly global, non-LOCC) unitary on the full space.
pub fn apply_global_unitary(rho: &DensityMatrix, u: &CMat) -> Result<DensityMatrix> {
    if u.nrows() != rho.total_dim() || u.ncols() != rho.total_dim() {
        return Err(Error::DimMismatch(format!(
            "unitary is {}x{}, state dimension is {}",
            u.nrows(),
            u.ncols(),
            rho.total_dim()
        )));
    }
    DensityMatrix::new(u * rho.mat() * u.adjoint(), rho.dims().to_vec())
}

/// Largest trace-norm residual of the commutation identity between local
/// measurement maps and partial transposition: for Bob's operations the maps
/// commute as they stand, for Alice's the operators on the transposed side
/// are complex-conjugated.
pub fn pt_commutation_residual(rho: &DensityMatrix, family: &KrausFamily) -> Result<f64> {
    require_two_parties(rho)?;
    family.check_shape(rho.dims())?;
    let dims = rho.dims();
    let pt = rho.partial_transpose(0)?;
    let mut max_residual = 0.0_f64;
    for i in 0..family.operators.len() {
        let e = family.embedded(i, dims);
        let lhs = linalg::partial_transpose(&(&e * rho.mat() * e.adjoint()), dims, 0)?;
        let e_t = match family.side {
            Side::B => e,
            Side::A => linalg::tensor_product(
                &family.operators[i].conjugate(),
                &CMat::identity(dims[1], dims[1]),
            ),
        };
        let rhs = &e_t * &pt * e_t.adjoint();
        max_residual = max_residual.max(linalg::trace_norm(&(lhs - rhs))?);
    }
    Ok(max_residual)
}

/// Run a protocol (a fixed sequence of local measurements applied to every
/// branch) and return (N before, expected N after).
///
/// Pruned branches contribute their worst-case negativity bound
/// p (d_min - 1)/2 to the "after" sum, so pruning can only overstate it.
pub fn monotonicity_trial(
    rho: &DensityMatrix,
    protocol: &[KrausFamily],
) -> Result<(f64, f64)> {
    require_two_parties(rho)?;
    let before = measures::negativity(rho, 0)?;
    let d_min = rho.dims().iter().copied().min().unwrap() as f64;
    let mut branches = vec![(1.0_f64, rho.clone())];
    let mut pruned_mass = 0.0_f64;
    for family in protocol {
        let mut next = Vec::new();
        for (p, state) in &branches {
            let mut kept = 0.0;
            for outcome in apply_measurement(state, family)? {
                kept += outcome.probability;
                next.push((p * outcome.probability, outcome.state));
            }
            // Everything a filter removed or pruning dropped.
            pruned_mass += p * (1.0 - kept).max(0.0);
        }
        branches = next;
    }
    let mut after = pruned_mass * (d_min - 1.0) / 2.0;
    for (p, state) in &branches {
        after += p * measures::negativity(state, 0)?;
    }
    Ok((before, after))
}

/// Haar-random exactly-complete Kraus family: a random isometry sliced into
/// blocks, so sum M^dag M = I holds to round-off.
pub fn random_kraus_family(
    local_dim: usize,
    n_ops: usize,
    side: Side,
    rng: &mut impl Rng,
) -> Result<KrausFamily> {
    if n_ops == 0 {
        return Err(Error::Domain("need at least one Kraus operator".to_string()));
    }
    let big = haar_unitary(local_dim * n_ops, rng);
    let mut operators = Vec::with_capacity(n_ops);
    for k in 0..n_ops {
        let mut m = CMat::zeros(local_dim, local_dim);
        for r in 0..local_dim {
            for c in 0..local_dim {
                m[(r, c)] = big[(k * local_dim + r, c)];
            }
        }
        operators.push(m);
    }
    KrausFamily::new(side, operators)
}

/// Summary of a randomized monotonicity sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub trials: usize,
    pub violations: usize,
    /// Largest observed increase `after - before`; negative when every trial
    /// strictly decreased.
    pub max_slack: f64,
}

/// Monotonicity tolerance for the sweep.
pub const MONOTONE_TOL: f64 = 1e-9;

/// Randomized sweep: random 2x2 and 2x3 states through random one- and
/// two-round protocols, counting violations of sum_i p_i N(rho_i') <= N(rho).
pub fn monotonicity_sweep(trials: usize, rng: &mut impl Rng) -> Result<SweepReport> {
    let mut violations = 0;
    let mut max_slack = f64::NEG_INFINITY;
    for trial in 0..trials {
        let dims: &[usize] = if trial % 2 == 0 { &[2, 2] } else { &[2, 3] };
        let rank = rng.gen_range(1..=4);
        let rho = random_density(dims, rank, rng)?;
        let rounds = rng.gen_range(1..=2);
        let mut protocol = Vec::with_capacity(rounds);
        for _ in 0..rounds {
            let side = if rng.gen_bool(0.5) { Side::A } else { Side::B };
            let local = match side {
                Side::A => dims[0],
                Side::B => dims[1],
            };
            let n_ops = rng.gen_range(2..=4);
            protocol.push(random_kraus_family(local, n_ops, side, rng)?);
        }
        let (before, after) = monotonicity_trial(&rho, &protocol)?;
        let slack = after - before;
        max_slack = max_slack.max(slack);
        if slack > MONOTONE_TOL {
            violations += 1;
        }
    }
    Ok(SweepReport {
        trials,
        violations,
        max_slack,
    })
}

/// CNOT on two qubits (control on the first factor): the non-LOCC control
/// used to prove the monotonicity harness can see increases.
pub fn cnot() -> CMat {
    let mut u = CMat::zeros(4, 4);
    u[(0, 0)] = C64::new(1.0, 0.0);
    u[(1, 1)] = C64::new(1.0, 0.0);
    u[(2, 3)] = C64::new(1.0, 0.0);
    u[(3, 2)] = C64::new(1.0, 0.0);
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{maximally_entangled, noisy_singlet, random_density, twirl_isotropic};
    use crate::CVec;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn projector_family(side: Side) -> KrausFamily {
        let mut p0 = CMat::zeros(2, 2);
        p0[(0, 0)] = C64::new(1.0, 0.0);
        let mut p1 = CMat::zeros(2, 2);
        p1[(1, 1)] = C64::new(1.0, 0.0);
        KrausFamily::new(side, vec![p0, p1]).unwrap()
    }

    #[test]
    fn identity_family_is_a_no_op() {
        let rho = maximally_entangled(2).unwrap();
        let family = KrausFamily::new(Side::B, vec![CMat::identity(2, 2)]).unwrap();
        let outcomes = apply_measurement(&rho, &family).unwrap();
        assert_eq!(outcomes.len(), 1);
        assert_relative_eq!(outcomes[0].probability, 1.0, epsilon = 1e-12);
        assert!((outcomes[0].state.mat() - rho.mat()).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn projective_measurement_of_bell_state() {
        let rho = maximally_entangled(2).unwrap();
        let outcomes = apply_measurement(&rho, &projector_family(Side::B)).unwrap();
        assert_eq!(outcomes.len(), 2);
        for (k, outcome) in outcomes.iter().enumerate() {
            assert_relative_eq!(outcome.probability, 0.5, epsilon = 1e-12);
            // Outcome k collapses to |kk><kk|.
            let idx = k * 2 + k;
            assert_relative_eq!(outcome.state.mat()[(idx, idx)].re, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn local_unitary_preserves_negativity() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let rho = random_density(&[2, 2], 3, &mut rng).unwrap();
        let u = haar_unitary(2, &mut rng);
        let family = KrausFamily::new(Side::B, vec![u]).unwrap();
        let outcomes = apply_measurement(&rho, &family).unwrap();
        assert_eq!(outcomes.len(), 1);
        assert_relative_eq!(outcomes[0].probability, 1.0, epsilon = 1e-12);
        let before = measures::negativity(&rho, 0).unwrap();
        let after = measures::negativity(&outcomes[0].state, 0).unwrap();
        assert_relative_eq!(before, after, epsilon = 1e-10);
    }

    #[test]
    fn kraus_normalization_is_enforced() {
        let too_big = CMat::identity(2, 2).scale(1.1);
        assert!(KrausFamily::new(Side::B, vec![too_big]).is_err());
        // A filter (strictly sub-normalized) is allowed.
        let half = CMat::identity(2, 2).scale(0.5);
        KrausFamily::new(Side::B, vec![half]).unwrap();
        assert!(KrausFamily::new(Side::B, vec![]).is_err());
    }

    #[test]
    fn pt_commutation_identity_family() {
        let rho = maximally_entangled(2).unwrap();
        let family = KrausFamily::new(Side::B, vec![CMat::identity(2, 2)]).unwrap();
        assert!(pt_commutation_residual(&rho, &family).unwrap() <= 1e-14);
    }

    #[test]
    fn pt_commutation_random_families_both_sides() {
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        for _ in 0..25 {
            let rho = random_density(&[2, 2], 3, &mut rng).unwrap();
            for side in [Side::A, Side::B] {
                let family = random_kraus_family(2, 2, side, &mut rng).unwrap();
                let residual = pt_commutation_residual(&rho, &family).unwrap();
                assert!(residual <= 1e-10, "residual {residual} for side {side:?}");
            }
        }
    }

    #[test]
    fn empty_protocol_changes_nothing() {
        let rho = maximally_entangled(2).unwrap();
        let (before, after) = monotonicity_trial(&rho, &[]).unwrap();
        assert_relative_eq!(before, after, epsilon = 1e-12);
        assert_relative_eq!(before, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn twirl_as_protocol_is_a_fixed_point_on_noisy_singlets() {
        // The exact twirl projection leaves a noisy singlet unchanged, so the
        // averaged negativity equals the input's.
        let rho = noisy_singlet(0.8, 2).unwrap();
        let tw = twirl_isotropic(&rho).unwrap();
        let n0 = measures::negativity(&rho, 0).unwrap();
        let n1 = measures::negativity(&tw, 0).unwrap();
        assert_relative_eq!(n0, n1, epsilon = 1e-12);
    }

    #[test]
    fn sweep_reports_no_violations() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let report = monotonicity_sweep(60, &mut rng).unwrap();
        assert_eq!(report.trials, 60);
        assert_eq!(report.violations, 0);
        assert!(report.max_slack <= MONOTONE_TOL);
    }

    #[test]
    fn global_entangling_unitary_increases_negativity() {
        // |+>|0> is a product state; CNOT turns it into a Bell state. The
        // harness must register the increase, otherwise the sweep is vacuous.
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = CVec::zeros(4);
        v[0] = C64::new(inv, 0.0);
        v[2] = C64::new(inv, 0.0);
        let rho = DensityMatrix::from_pure(&v, vec![2, 2]).unwrap();
        let before = measures::negativity(&rho, 0).unwrap();
        assert!(before <= 1e-12);
        let after_state = apply_global_unitary(&rho, &cnot()).unwrap();
        let after = measures::negativity(&after_state, 0).unwrap();
        assert!(after > 0.49, "CNOT should create a Bell pair, got N = {after}");
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let rho = maximally_entangled(2).unwrap();
        let family = KrausFamily::new(Side::B, vec![CMat::identity(3, 3)]).unwrap();
        assert!(apply_measurement(&rho, &family).is_err());
    }
}
