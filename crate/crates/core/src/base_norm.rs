//! Variational S-negativity programs: the smallest negative-part weight
//! N_S(A) = inf { a- : A = a+ rho+ - a- rho-, rho+- in S } for S the set of
//! all states or the set of PPT states, solved by bisection over the trace
//! budget with Dykstra alternating projections deciding feasibility of each
//! probe.
//!
//! Feasibility of a budget t is the question: does there exist N in the cone
//! generated by S with tr N = t and A + N in the same cone? The feasible
//! budgets form a ray [t*, inf), so bisection applies. A probe is accepted
//! only when the projection residual certifies a near-feasible witness; an
//! uncertified probe moves the lower bracket, so the returned value is always
//! backed by a witness.

use nalgebra::linalg::SymmetricEigen;

use crate::error::{Error, Result};
use crate::linalg;
use crate::CMat;

/// Maximum total dimension accepted by the solver.
pub const DIM_CAP: usize = 36;

/// Which convex base set S defines the program.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cone {
    /// All density matrices; Lemma-2 territory, N_S equals the absolute sum
    /// of negative eigenvalues of the input.
    AllStates,
    /// Density matrices with positive partial transpose.
    PptStates,
}

/// Cone choice plus the dimension profile it acts on.
#[derive(Debug, Clone)]
pub struct ConeSpec {
    pub cone: Cone,
    pub dims: Vec<usize>,
}

impl ConeSpec {
    pub fn new(cone: Cone, dims: Vec<usize>) -> Result<Self> {
        if cone == Cone::PptStates && dims.len() != 2 {
            return Err(Error::DimMismatch(format!(
                "the PPT cone needs exactly two parties, got {dims:?}"
            )));
        }
        Ok(Self { cone, dims })
    }

    fn total(&self) -> usize {
        self.dims.iter().product()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeasibilityStatus {
    /// A witness with residual below tolerance was found.
    Feasible,
    /// The residual stalled well above tolerance.
    Infeasible,
    /// The sweep budget ran out while the residual was still moving.
    Indeterminate,
}

/// Outcome of one feasibility probe.
#[derive(Debug, Clone)]
pub struct FeasibilityResult {
    pub status: FeasibilityStatus,
    /// (P, N) with A = P - N when feasible.
    pub witness: Option<(CMat, CMat)>,
    pub residual: f64,
    pub sweeps: usize,
}

impl FeasibilityResult {
    pub fn feasible(&self) -> bool {
        self.status == FeasibilityStatus::Feasible
    }
}

/// Solver knobs. The defaults are the contract the library is tested at.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Bisection tolerance on the trace budget t.
    pub bisection_tol: f64,
    /// Constraint-violation level that certifies a witness.
    pub residual_tol: f64,
    /// Dykstra sweep budget per probe.
    pub max_sweeps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            bisection_tol: 1e-4,
            residual_tol: 1e-7,
            max_sweeps: 5000,
        }
    }
}

/// Hermitian eigendecomposition without the public-API hermiticity gate;
/// solver iterates are hermitian by construction up to round-off.
fn eigh_sym(m: &CMat) -> (Vec<f64>, CMat) {
    let h = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(h);
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

fn min_eigenvalue(m: &CMat) -> f64 {
    eigh_sym(m).0.into_iter().fold(f64::INFINITY, f64::min)
}

/// Project onto the PSD cone by clipping negative eigenvalues.
fn project_psd(m: &CMat) -> CMat {
    let (vals, vecs) = eigh_sym(m);
    let mut out = CMat::zeros(m.nrows(), m.ncols());
    for (k, &v) in vals.iter().enumerate() {
        if v > 0.0 {
            let col = vecs.column(k);
            out += (&col * col.adjoint()).scale(v);
        }
    }
    out
}

/// How far m is from the cone: the magnitude of its most negative eigenvalue
/// (and of its partial transpose for the PPT cone).
fn cone_violation(m: &CMat, spec: &ConeSpec) -> f64 {
    let mut v = (-min_eigenvalue(m)).max(0.0);
    if spec.cone == Cone::PptStates {
        let pt = linalg::partial_transpose(m, &spec.dims, 0).expect("dims checked");
        v = v.max((-min_eigenvalue(&pt)).max(0.0));
    }
    v
}

enum Constraint {
    /// N >= 0
    PsdSelf,
    /// N^{T_A} >= 0
    PsdSelfPt,
    /// A + N >= 0
    PsdShifted,
    /// (A + N)^{T_A} >= 0
    PsdShiftedPt,
    /// tr N = t
    Trace,
}

impl Constraint {
    fn project(&self, n: &CMat, a: &CMat, dims: &[usize], t: f64) -> CMat {
        match self {
            Constraint::PsdSelf => project_psd(n),
            Constraint::PsdSelfPt => {
                let pt = linalg::partial_transpose(n, dims, 0).expect("dims checked");
                let proj = project_psd(&pt);
                linalg::partial_transpose(&proj, dims, 0).expect("dims checked")
            }
            Constraint::PsdShifted => project_psd(&(a + n)) - a,
            Constraint::PsdShiftedPt => {
                let pt = linalg::partial_transpose(&(a + n), dims, 0).expect("dims checked");
                let proj = project_psd(&pt);
                linalg::partial_transpose(&proj, dims, 0).expect("dims checked") - a
            }
            Constraint::Trace => {
                let dim = n.nrows() as f64;
                let shift = (n.trace().re - t) / dim;
                n - CMat::identity(n.nrows(), n.ncols()).scale(shift)
            }
        }
    }
}

fn violation(n: &CMat, a: &CMat, spec: &ConeSpec, t: f64) -> f64 {
    let shifted = a + n;
    cone_violation(n, spec)
        .max(cone_violation(&shifted, spec))
        .max((n.trace().re - t).abs())
}

fn validate_input(a: &CMat, spec: &ConeSpec) -> Result<()> {
    linalg::require_hermitian(a)?;
    let total = spec.total();
    if total != a.nrows() {
        return Err(Error::DimMismatch(format!(
            "dims {:?} do not match a {}x{} matrix",
            spec.dims,
            a.nrows(),
            a.ncols()
        )));
    }
    if total > DIM_CAP {
        return Err(Error::Domain(format!(
            "total dimension {total} exceeds the solver cap {DIM_CAP}"
        )));
    }
    Ok(())
}

/// Decide whether a trace budget t admits the decomposition A + N in cone,
/// N in cone, tr N = t, by Dykstra alternating projections started at
/// `start` (or t I/dim when absent).
pub fn feasibility_from(
    a: &CMat,
    spec: &ConeSpec,
    t: f64,
    opts: &SolverOptions,
    start: Option<CMat>,
) -> Result<FeasibilityResult> {
    validate_input(a, spec)?;
    if t < 0.0 {
        return Err(Error::Domain(format!("trace budget {t} is negative")));
    }
    let dim = a.nrows();

    // t = 0 forces N = 0; the question is whether A itself lies in the cone.
    if t == 0.0 {
        let v = cone_violation(a, spec);
        let feasible = v <= 1e-10;
        return Ok(FeasibilityResult {
            status: if feasible {
                FeasibilityStatus::Feasible
            } else {
                FeasibilityStatus::Infeasible
            },
            witness: feasible.then(|| (a.clone(), CMat::zeros(dim, dim))),
            residual: v,
            sweeps: 0,
        });
    }

    let constraints: Vec<Constraint> = match spec.cone {
        Cone::AllStates => vec![
            Constraint::PsdSelf,
            Constraint::PsdShifted,
            Constraint::Trace,
        ],
        Cone::PptStates => vec![
            Constraint::PsdSelf,
            Constraint::PsdSelfPt,
            Constraint::PsdShifted,
            Constraint::PsdShiftedPt,
            Constraint::Trace,
        ],
    };

    let mut x = start.unwrap_or_else(|| CMat::identity(dim, dim).scale(t / dim as f64));
    let mut corrections: Vec<CMat> = constraints
        .iter()
        .map(|_| CMat::zeros(dim, dim))
        .collect();

    const CHECK_EVERY: usize = 10;
    const STALL_WINDOW: usize = 30; // residual checks, i.e. 300 sweeps
    let mut history: Vec<f64> = Vec::new();
    let mut best = f64::INFINITY;

    for sweep in 1..=opts.max_sweeps {
        for (c, p) in constraints.iter().zip(corrections.iter_mut()) {
            let shifted = &x + &*p;
            let y = c.project(&shifted, a, &spec.dims, t);
            *p = shifted - &y;
            x = y;
        }
        if sweep % CHECK_EVERY == 0 || sweep == opts.max_sweeps {
            let r = violation(&x, a, spec, t);
            best = best.min(r);
            if r <= opts.residual_tol {
                let n = project_psd(&x);
                return Ok(FeasibilityResult {
                    status: FeasibilityStatus::Feasible,
                    witness: Some((a + &n, n)),
                    residual: r,
                    sweeps: sweep,
                });
            }
            history.push(r);
            if history.len() > STALL_WINDOW {
                let old = history[history.len() - 1 - STALL_WINDOW];
                let stalled = old - r < 1e-3 * r;
                if stalled && r > 10.0 * opts.residual_tol {
                    return Ok(FeasibilityResult {
                        status: FeasibilityStatus::Infeasible,
                        witness: None,
                        residual: r,
                        sweeps: sweep,
                    });
                }
            }
        }
    }
    Ok(FeasibilityResult {
        status: FeasibilityStatus::Indeterminate,
        witness: None,
        residual: best,
        sweeps: opts.max_sweeps,
    })
}

/// Feasibility probe started from the default interior point.
pub fn feasibility(
    a: &CMat,
    spec: &ConeSpec,
    t: f64,
    opts: &SolverOptions,
) -> Result<FeasibilityResult> {
    feasibility_from(a, spec, t, opts, None)
}

/// S-negativity of a hermitian unit-trace operator A: the smallest certified
/// trace budget, located by bisection. For the ALL_STATES cone the caller
/// passes the partial transpose of a state to recover its negativity; for
/// the PPT cone the state itself.
pub fn s_negativity(a: &CMat, spec: &ConeSpec, tol: f64) -> Result<f64> {
    let opts = SolverOptions {
        bisection_tol: tol,
        ..SolverOptions::default()
    };
    s_negativity_with(a, spec, &opts)
}

pub fn s_negativity_with(a: &CMat, spec: &ConeSpec, opts: &SolverOptions) -> Result<f64> {
    validate_input(a, spec)?;
    if opts.bisection_tol < 1e-6 {
        return Err(Error::Domain(format!(
            "bisection tolerance {:e} below the supported 1e-6",
            opts.bisection_tol
        )));
    }

    // Exact zero when A is already in the cone.
    if cone_violation(a, spec) <= 1e-10 {
        return Ok(0.0);
    }

    // The trace norm of the relevant partial transpose always bounds the
    // answer; doubling is a guard against an uncertifiable first probe.
    let pt = linalg::partial_transpose(a, &spec.dims, 0)?;
    let mut upper = linalg::trace_norm(a)?.max(linalg::trace_norm(&pt)?);
    let mut probe = feasibility(a, spec, upper, opts)?;
    let mut tries = 0;
    while !probe.feasible() && tries < 2 {
        upper *= 2.0;
        probe = feasibility(a, spec, upper, opts)?;
        tries += 1;
    }
    if !probe.feasible() {
        return Err(Error::NoConvergence(format!(
            "no feasible decomposition certified up to trace budget {upper:.6}"
        )));
    }

    let mut lo = 0.0;
    let mut hi = upper;
    let mut hi_witness = probe.witness.expect("feasible probe carries witness").1;
    while hi - lo > opts.bisection_tol {
        let mid = 0.5 * (lo + hi);
        // Warm start: shrink the certified witness onto the new budget.
        let tr = hi_witness.trace().re;
        let start = (tr > 0.0).then(|| hi_witness.scale(mid / tr));
        let result = feasibility_from(a, spec, mid, opts, start)?;
        if result.feasible() {
            hi = mid;
            hi_witness = result.witness.expect("feasible probe carries witness").1;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Negativity of a state through the base-norm route: the ALL_STATES program
/// run on the partial transpose, per the variational formula.
pub fn negativity_via_base_norm(
    rho: &crate::states::DensityMatrix,
    tol: f64,
) -> Result<f64> {
    if rho.party_count() != 2 {
        return Err(Error::DimMismatch(
            "base-norm negativity needs a two-party state".to_string(),
        ));
    }
    let pt = rho.partial_transpose(0)?;
    let spec = ConeSpec::new(Cone::AllStates, rho.dims().to_vec())?;
    s_negativity(&pt, &spec, tol)
}

/// N_ppts of a state: the PPT_STATES program on the state itself.
pub fn ppt_negativity(rho: &crate::states::DensityMatrix, tol: f64) -> Result<f64> {
    if rho.party_count() != 2 {
        return Err(Error::DimMismatch(
            "the PPT program needs a two-party state".to_string(),
        ));
    }
    let spec = ConeSpec::new(Cone::PptStates, rho.dims().to_vec())?;
    s_negativity(rho.mat(), &spec, tol)
}
