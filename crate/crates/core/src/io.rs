//! JSON formats for density matrices, pure states, and Gaussian covariance
//! matrices. Parsers reject unknown keys and non-finite numbers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::CovarianceMatrix;
use crate::states::DensityMatrix;
use crate::{C64, CMat, CVec, RMat};

/// Density matrix file: {"dims": [dA, dB, ...], "re": [[...]], "im": [[...]]}.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityMatrixFile {
    pub dims: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

/// Pure state file: {"dims": [...], "vec_re": [...], "vec_im": [...]}.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PureStateFile {
    pub dims: Vec<usize>,
    pub vec_re: Vec<f64>,
    pub vec_im: Vec<f64>,
}

/// Gaussian file: {"nA": 1, "nB": 1, "ordering": "xpxp", "gamma": [[...]]}.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianFile {
    #[serde(rename = "nA")]
    pub n_a: usize,
    #[serde(rename = "nB")]
    pub n_b: usize,
    pub ordering: String,
    pub gamma: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum StateFile {
    Density(DensityMatrixFile),
    Pure(PureStateFile),
}

fn finite_matrix(rows: &[Vec<f64>], what: &str) -> Result<()> {
    let n = rows.len();
    for row in rows {
        if row.len() != n {
            return Err(Error::Parse(format!("{what} is not square")));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse(format!("{what} contains NaN or Inf")));
        }
    }
    Ok(())
}

/// Parse a density-matrix or pure-state JSON document into a validated
/// state. Pure-state documents become the corresponding projector.
pub fn state_from_json(text: &str) -> Result<DensityMatrix> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| {
        Error::Parse(format!("not a valid state document: {e}"))
    })?;
    match file {
        StateFile::Density(f) => {
            finite_matrix(&f.re, "re")?;
            finite_matrix(&f.im, "im")?;
            let n = f.re.len();
            if f.im.len() != n {
                return Err(Error::Parse(
                    "re and im blocks have different shapes".to_string(),
                ));
            }
            let mat = CMat::from_fn(n, n, |r, c| C64::new(f.re[r][c], f.im[r][c]));
            DensityMatrix::new(mat, f.dims)
        }
        StateFile::Pure(f) => {
            if f.vec_re.len() != f.vec_im.len() {
                return Err(Error::Parse(
                    "vec_re and vec_im have different lengths".to_string(),
                ));
            }
            if f.vec_re.iter().chain(&f.vec_im).any(|v| !v.is_finite()) {
                return Err(Error::Parse("state vector contains NaN or Inf".to_string()));
            }
            let v = CVec::from_fn(f.vec_re.len(), |i, _| C64::new(f.vec_re[i], f.vec_im[i]));
            DensityMatrix::from_pure(&v, f.dims)
        }
    }
}

/// Serialize a density matrix into the file format.
pub fn state_to_json(rho: &DensityMatrix) -> String {
    let n = rho.total_dim();
    let re = (0..n)
        .map(|r| (0..n).map(|c| rho.mat()[(r, c)].re).collect())
        .collect();
    let im = (0..n)
        .map(|r| (0..n).map(|c| rho.mat()[(r, c)].im).collect())
        .collect();
    let file = DensityMatrixFile {
        dims: rho.dims().to_vec(),
        re,
        im,
    };
    serde_json::to_string(&file).expect("density file serializes")
}

/// Parse a Gaussian covariance document. Only xpxp ordering is accepted.
pub fn gaussian_from_json(text: &str) -> Result<CovarianceMatrix> {
    let file: GaussianFile = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("not a valid gaussian document: {e}")))?;
    if file.ordering != "xpxp" {
        return Err(Error::Parse(format!(
            "unsupported ordering {:?}, only \"xpxp\" is accepted",
            file.ordering
        )));
    }
    finite_matrix(&file.gamma, "gamma")?;
    let n = file.gamma.len();
    let mat = RMat::from_fn(n, n, |r, c| file.gamma[r][c]);
    CovarianceMatrix::new(mat, file.n_a, file.n_b)
}

/// Serialize a covariance matrix into the file format.
pub fn gaussian_to_json(cov: &CovarianceMatrix) -> String {
    let g = cov.matrix();
    let gamma = (0..g.nrows())
        .map(|r| (0..g.ncols()).map(|c| g[(r, c)]).collect())
        .collect();
    let file = GaussianFile {
        n_a: cov.n_a(),
        n_b: cov.n_b(),
        ordering: "xpxp".to_string(),
        gamma,
    };
    serde_json::to_string(&file).expect("gaussian file serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::two_mode_squeezed;
    use crate::measures::negativity;
    use crate::states::maximally_entangled;
    use approx::assert_relative_eq;

    #[test]
    fn density_roundtrip() {
        let bell = maximally_entangled(2).unwrap();
        let text = state_to_json(&bell);
        let back = state_from_json(&text).unwrap();
        assert_eq!(back.dims(), bell.dims());
        assert!((back.mat() - bell.mat()).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn pure_state_document() {
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let text = format!(
            r#"{{"dims": [2, 2], "vec_re": [{inv}, 0.0, 0.0, {inv}], "vec_im": [0, 0, 0, 0]}}"#
        );
        let rho = state_from_json(&text).unwrap();
        assert_relative_eq!(negativity(&rho, 0).unwrap(), 0.5, epsilon = 1e-10);
    }

    #[test]
    fn rejects_malformed_documents() {
        assert!(matches!(state_from_json("{"), Err(Error::Parse(_))));
        assert!(matches!(
            state_from_json(r#"{"dims": [2], "re": [[1.0]], "im": [[0.0]], "extra": 1}"#),
            Err(Error::Parse(_))
        ));
        // Ragged matrix.
        assert!(matches!(
            state_from_json(r#"{"dims": [2], "re": [[1.0, 0.0], [0.0]], "im": [[0,0],[0,0]]}"#),
            Err(Error::Parse(_))
        ));
        // Non-finite entry (overflows f64).
        assert!(matches!(
            state_from_json(r#"{"dims": [1], "re": [[1e999]], "im": [[0.0]]}"#),
            Err(Error::Parse(_))
        ));
        // Structurally fine but not a state: caught by validation, not parse.
        assert!(matches!(
            state_from_json(r#"{"dims": [2], "re": [[2.0, 0.0], [0.0, -1.0]], "im": [[0,0],[0,0]]}"#),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn gaussian_roundtrip_and_ordering_guard() {
        let cov = two_mode_squeezed(0.5).unwrap();
        let text = gaussian_to_json(&cov);
        let back = gaussian_from_json(&text).unwrap();
        assert_eq!(back.matrix(), cov.matrix());
        let bad = text.replace("xpxp", "xxpp");
        assert!(matches!(gaussian_from_json(&bad), Err(Error::Parse(_))));
    }
}
