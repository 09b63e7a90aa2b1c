use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::qstate::{BasisDescriptor, DensityMatrix, InvariantReport, PureState};
use crate::{CMatrix, CVector, Complex64, Error, Result};

use super::toml_error;

/// On-disk state: a basis and either pure-state amplitudes or the full
/// matrix (row-major, each entry `[re, im]`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub basis: BasisDescriptor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<Complex64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<Complex64>>>,
    /// Written alongside reconstructed matrices; its presence relaxes the
    /// invariant checks on input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<InvariantReport>,
}

impl StateFile {
    pub fn into_density(self) -> Result<DensityMatrix> {
        self.basis.validate()?;
        let dim = self.basis.dim();
        match (self.amplitudes, self.matrix) {
            (Some(a), None) => {
                if a.len() != dim {
                    return Err(Error::Basis(format!("{} amplitudes for dimension {dim}", a.len())));
                }
                let psi = PureState::normalized(self.basis, CVector::from_vec(a))?;
                Ok(crate::qstate::density_from_pure(&psi))
            }
            (None, Some(rows)) => {
                if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                    return Err(Error::Basis(format!("matrix is not {dim}×{dim}")));
                }
                let m = CMatrix::from_fn(dim, dim, |r, c| rows[r][c]);
                // Emitted reconstructions carry their own report and may sit
                // just outside the strict invariants.
                if self.report.is_some() {
                    DensityMatrix::new_unchecked(self.basis, m)
                } else {
                    DensityMatrix::new(self.basis, m)
                }
            }
            _ => Err(Error::Config("state needs exactly one of `amplitudes` or `matrix`".into())),
        }
    }
}

/// Parses a TOML state file into a validated density matrix.
pub fn parse_state(text: &str) -> Result<DensityMatrix> {
    let file: StateFile = toml::from_str(text).map_err(|e| toml_error(text, e))?;
    file.into_density()
}

pub fn read_state(path: &Path) -> Result<DensityMatrix> {
    parse_state(&std::fs::read_to_string(path)?)
}

/// TOML for `rho` in matrix form with its invariant report.
pub fn render_density(rho: &DensityMatrix) -> Result<String> {
    let m = rho.matrix();
    let rows = (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect()).collect();
    let file = StateFile {
        basis: rho.basis().clone(),
        amplitudes: None,
        matrix: Some(rows),
        report: Some(rho.report()),
    };
    toml::to_string(&file).map_err(|e| Error::Config(e.to_string()))
}
