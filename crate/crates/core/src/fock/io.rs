//! JSON persistence for density operators.
//!
//! Matrices are written row-major as `[re, im]` pairs. Two-mode states list
//! only their stored blocks; block `(row, col)` couples total photon numbers
//! `row` and `col` and has shape `(row+1)×(col+1)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{FockCutoff, SingleModeState, TwoModeState};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockRecord {
    pub row: usize,
    pub col: usize,
    pub data: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoModeStateFile {
    pub schema_version: u32,
    pub kind: String,
    pub n_max: usize,
    pub blocks: Vec<BlockRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingleModeStateFile {
    pub schema_version: u32,
    pub kind: String,
    pub n_max: usize,
    pub data: Vec<Complex64>,
}

fn row_major(m: &CMatrix) -> Vec<Complex64> {
    m.transpose().iter().copied().collect()
}

fn from_row_major(rows: usize, cols: usize, data: &[Complex64]) -> Result<CMatrix> {
    if data.len() != rows * cols {
        return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
    }
    Ok(CMatrix::from_row_slice(rows, cols, data))
}

fn check_header(schema_version: u32, kind: &str, expected: &str) -> Result<()> {
    if schema_version != SCHEMA_VERSION {
        return Err(Error::Serialization(format!("unsupported schema_version {schema_version}")));
    }
    if kind != expected {
        return Err(Error::Serialization(format!("expected kind \"{expected}\", found \"{kind}\"")));
    }
    Ok(())
}

impl From<&TwoModeState> for TwoModeStateFile {
    fn from(state: &TwoModeState) -> Self {
        let nb = state.cutoff().num_blocks();
        let blocks = state
            .blocks()
            .iter()
            .enumerate()
            .filter_map(|(i, b)| b.as_ref().map(|b| BlockRecord { row: i / nb, col: i % nb, data: row_major(b) }))
            .collect();
        Self { schema_version: SCHEMA_VERSION, kind: "two_mode".into(), n_max: state.cutoff().n_max(), blocks }
    }
}

impl TryFrom<TwoModeStateFile> for TwoModeState {
    type Error = Error;

    fn try_from(file: TwoModeStateFile) -> Result<Self> {
        check_header(file.schema_version, &file.kind, "two_mode")?;
        let cutoff = FockCutoff::new(file.n_max);
        let nb = cutoff.num_blocks();
        let mut blocks: Vec<Option<CMatrix>> = vec![None; nb * nb];
        for record in file.blocks {
            if record.row >= nb || record.col >= nb {
                return Err(Error::Serialization(format!("block ({}, {}) outside n_max", record.row, record.col)));
            }
            let slot = &mut blocks[record.row * nb + record.col];
            if slot.is_some() {
                return Err(Error::Serialization(format!("duplicate block ({}, {})", record.row, record.col)));
            }
            *slot = Some(from_row_major(record.row + 1, record.col + 1, &record.data)?);
        }
        TwoModeState::from_blocks(cutoff, blocks)
    }
}

impl From<&SingleModeState> for SingleModeStateFile {
    fn from(state: &SingleModeState) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            kind: "single_mode".into(),
            n_max: state.n_max(),
            data: row_major(state.matrix()),
        }
    }
}

impl TryFrom<SingleModeStateFile> for SingleModeState {
    type Error = Error;

    fn try_from(file: SingleModeStateFile) -> Result<Self> {
        check_header(file.schema_version, &file.kind, "single_mode")?;
        let d = file.n_max + 1;
        SingleModeState::new(from_row_major(d, d, &file.data)?)
    }
}

impl TwoModeState {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(&TwoModeStateFile::from(self)).map_err(|e| Error::Serialization(e.to_string()))
    }

    /// Parses and validates a state written by [`TwoModeState::to_json`].
    pub fn from_json(text: &str) -> Result<Self> {
        let file: TwoModeStateFile = serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
        file.try_into()
    }
}

impl SingleModeState {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(&SingleModeStateFile::from(self)).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SingleModeStateFile = serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
        file.try_into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{mixture_state, CoherentMixture, Mode};

    #[test]
    fn two_mode_round_trip_is_exact() {
        let mix =
            CoherentMixture::from_pairs(&[(0.6, Complex64::new(1.0, 0.0)), (0.4, Complex64::new(0.0, -0.5))]).unwrap();
        let rho = mixture_state(&mix, FockCutoff::new(12), 1e-10).unwrap();
        let back = TwoModeState::from_json(&rho.to_json().unwrap()).unwrap();
        assert_eq!(rho, back);
        let m = rho.partial_trace(Mode::One);
        assert_eq!(SingleModeState::from_json(&m.to_json().unwrap()).unwrap(), m);
    }

    #[test]
    fn layout_is_row_major_pairs() {
        let rho = TwoModeState::from_json(
            r#"{"schema_version":1,"kind":"two_mode","n_max":1,
                "blocks":[{"row":0,"col":0,"data":[[0.5,0.0]]},
                          {"row":1,"col":1,"data":[[0.5,0.0],[0.0,0.0],[0.0,0.0],[0.0,0.0]]}]}"#,
        )
        .unwrap();
        assert!(rho.is_block_diagonal());
        let json: serde_json::Value = serde_json::from_str(&rho.to_json().unwrap()).unwrap();
        assert_eq!(json["blocks"][1]["data"][0], serde_json::json!([0.5, 0.0]));
    }

    #[test]
    fn rejects_bad_header() {
        let bad = r#"{"schema_version":2,"kind":"two_mode","n_max":0,"blocks":[{"row":0,"col":0,"data":[[1.0,0.0]]}]}"#;
        assert!(matches!(TwoModeState::from_json(bad), Err(Error::Serialization(_))));
        let unknown = r#"{"schema_version":1,"kind":"two_mode","n_max":0,"blocks":[],"extra":1}"#;
        assert!(TwoModeState::from_json(unknown).is_err());
    }
}
