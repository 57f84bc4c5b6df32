//! Splitting negativities of multipartite states: negativity across every
//! bipartite splitting (optionally after discarding parties) and the
//! hierarchy inequalities that tracing out local systems can only decrease
//! the negativity.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures;
use crate::states::DensityMatrix;
use crate::linalg;

/// Largest party count handled (desk scale).
pub const MAX_PARTIES: usize = 4;

/// Tolerance for hierarchy comparisons.
pub const HIERARCHY_TOL: f64 = 1e-9;

/// A bipartite splitting of a (possibly reduced) multipartite state:
/// discarded parties are traced out, the kept ones are grouped into A and B.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Splitting {
    n_parties: usize,
    group_a: Vec<usize>,
    group_b: Vec<usize>,
}

impl Splitting {
    /// `kept` lists the surviving parties; `group_a` must be a nonempty
    /// proper subset of it. Everything outside `kept` is traced out.
    pub fn new(n_parties: usize, kept: &[usize], group_a: &[usize]) -> Result<Self> {
        let mut kept_sorted = kept.to_vec();
        kept_sorted.sort_unstable();
        kept_sorted.dedup();
        if kept_sorted.len() != kept.len() || kept_sorted.iter().any(|&p| p >= n_parties) {
            return Err(Error::DimMismatch(format!(
                "kept parties {kept:?} invalid for {n_parties} parties"
            )));
        }
        let mut a_sorted = group_a.to_vec();
        a_sorted.sort_unstable();
        a_sorted.dedup();
        if a_sorted.len() != group_a.len() || !a_sorted.iter().all(|p| kept_sorted.contains(p)) {
            return Err(Error::DimMismatch(format!(
                "group A {group_a:?} is not a subset of the kept parties {kept:?}"
            )));
        }
        let group_b: Vec<usize> = kept_sorted
            .iter()
            .copied()
            .filter(|p| !a_sorted.contains(p))
            .collect();
        if a_sorted.is_empty() || group_b.is_empty() {
            return Err(Error::DimMismatch(
                "both groups of a splitting must be nonempty".to_string(),
            ));
        }
        Ok(Self {
            n_parties,
            group_a: a_sorted,
            group_b,
        })
    }

    pub fn group_a(&self) -> &[usize] {
        &self.group_a
    }

    pub fn group_b(&self) -> &[usize] {
        &self.group_b
    }

    pub fn kept(&self) -> Vec<usize> {
        let mut k: Vec<usize> = self.group_a.iter().chain(&self.group_b).copied().collect();
        k.sort_unstable();
        k
    }

    pub fn discarded(&self) -> Vec<usize> {
        let kept = self.kept();
        (0..self.n_parties).filter(|p| !kept.contains(p)).collect()
    }

    /// Human-readable label, e.g. "A-BC;!D".
    pub fn label(&self) -> String {
        let letter = |p: usize| (b'A' + p as u8) as char;
        let mut s = String::new();
        for &p in &self.group_a {
            s.push(letter(p));
        }
        s.push('-');
        for &p in &self.group_b {
            s.push(letter(p));
        }
        let discarded = self.discarded();
        if !discarded.is_empty() {
            s.push(';');
            for p in discarded {
                s.push('!');
                s.push(letter(p));
            }
        }
        s
    }
}

/// Negativity across one splitting: trace out the discarded parties, regroup
/// the survivors into the two sides, and evaluate.
pub fn splitting_negativity(rho: &DensityMatrix, s: &Splitting) -> Result<f64> {
    let n = rho.party_count();
    if n != s.n_parties {
        return Err(Error::DimMismatch(format!(
            "splitting is for {} parties, state has {n}",
            s.n_parties
        )));
    }
    if n > MAX_PARTIES {
        return Err(Error::DimMismatch(format!(
            "party count {n} exceeds the supported {MAX_PARTIES}"
        )));
    }
    let discarded = s.discarded();
    let (reduced, kept) = if discarded.is_empty() {
        (rho.clone(), s.kept())
    } else {
        let mat = linalg::partial_trace(rho.mat(), rho.dims(), &discarded)?;
        let kept = s.kept();
        let dims: Vec<usize> = kept.iter().map(|&p| rho.dims()[p]).collect();
        (DensityMatrix::new(mat, dims)?, kept)
    };
    // Positions of group A within the reduced (renumbered) party list.
    let positions: Vec<usize> = kept
        .iter()
        .enumerate()
        .filter(|(_, p)| s.group_a.contains(p))
        .map(|(slot, _)| slot)
        .collect();
    let bipartite = reduced.regroup_bipartite(&positions)?;
    measures::negativity(&bipartite, 0)
}

/// Log-negativity across one splitting.
pub fn splitting_log_negativity(rho: &DensityMatrix, s: &Splitting) -> Result<f64> {
    Ok((1.0 + 2.0 * splitting_negativity(rho, s)?).log2())
}

/// Every inequivalent splitting of n parties, full and reduced, ordered by
/// the number of discarded parties. The A group always contains the smallest
/// kept party, which removes the A|B vs B|A double counting.
pub fn all_splittings(n: usize) -> Vec<Splitting> {
    let mut out = Vec::new();
    for n_discarded in 0..=n.saturating_sub(2) {
        for kept_mask in 0u32..(1 << n) {
            let kept: Vec<usize> = (0..n).filter(|p| kept_mask >> p & 1 == 1).collect();
            if kept.len() != n - n_discarded || kept.len() < 2 {
                continue;
            }
            let k = kept.len();
            // Enumerate subsets of `kept` containing its first element.
            for a_mask in 0u32..(1 << (k - 1)) {
                let mut group_a = vec![kept[0]];
                for (bit, &p) in kept.iter().skip(1).enumerate() {
                    if a_mask >> bit & 1 == 1 {
                        group_a.push(p);
                    }
                }
                if group_a.len() == k {
                    continue;
                }
                out.push(Splitting::new(n, &kept, &group_a).expect("enumeration is valid"));
            }
        }
    }
    out
}

/// One descending chain of the four-party hierarchy: the negativity across
/// a one-versus-rest cut, after discarding one party, after discarding two.
#[derive(Debug, Clone, Serialize)]
pub struct HierarchyChain {
    pub labels: [String; 3],
    pub values: [f64; 3],
    pub satisfied: bool,
}

/// Evaluate every chain N_{a-bcd} >= N_{a-bc;!d} >= N_{a-b;!c!d} of a
/// four-party state (24 chains: focus party, first discard, second discard).
pub fn hierarchy_report(rho: &DensityMatrix) -> Result<Vec<HierarchyChain>> {
    let n = rho.party_count();
    if n != 4 {
        return Err(Error::DimMismatch(format!(
            "hierarchy report needs exactly 4 parties, got {n}"
        )));
    }
    let all: Vec<usize> = (0..4).collect();
    let mut chains = Vec::new();
    for &focus in &all {
        for &d1 in all.iter().filter(|&&p| p != focus) {
            for &d2 in all.iter().filter(|&&p| p != focus && p != d1) {
                let full = Splitting::new(4, &all, &[focus])?;
                let kept1: Vec<usize> = all.iter().copied().filter(|&p| p != d1).collect();
                let mid = Splitting::new(4, &kept1, &[focus])?;
                let kept2: Vec<usize> =
                    kept1.iter().copied().filter(|&p| p != d2).collect();
                let last = Splitting::new(4, &kept2, &[focus])?;
                let values = [
                    splitting_negativity(rho, &full)?,
                    splitting_negativity(rho, &mid)?,
                    splitting_negativity(rho, &last)?,
                ];
                let satisfied = values[0] >= values[1] - HIERARCHY_TOL
                    && values[1] >= values[2] - HIERARCHY_TOL;
                chains.push(HierarchyChain {
                    labels: [full.label(), mid.label(), last.label()],
                    values,
                    satisfied,
                });
            }
        }
    }
    Ok(chains)
}
