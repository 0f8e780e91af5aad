//! JSON shapes for period matrices and reports. Complex numbers are
//! `{"re": …, "im": …}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chars::Characteristic;
use crate::error::{Error, Result};
use crate::linalg::CMat3;
use crate::theta::PeriodMatrix;
use crate::verify::{BitangencyReport, VerifySummary};
use crate::weber::ProjLine;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JsonComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for JsonComplex {
    fn from(c: Complex64) -> Self {
        JsonComplex { re: c.re, im: c.im }
    }
}

impl From<JsonComplex> for Complex64 {
    fn from(c: JsonComplex) -> Self {
        Complex64::new(c.re, c.im)
    }
}

pub fn complex_vec(v: &[Complex64]) -> Vec<JsonComplex> {
    v.iter().map(|&c| c.into()).collect()
}

pub fn complex_mat(m: &CMat3) -> Vec<Vec<JsonComplex>> {
    m.iter().map(|row| complex_vec(row)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauFile {
    pub tau: [[JsonComplex; 3]; 3],
}

impl TauFile {
    pub fn from_matrix(tau: &PeriodMatrix) -> Self {
        TauFile { tau: tau.entries().map(|row| row.map(JsonComplex::from)) }
    }

    pub fn raw(&self) -> [[Complex64; 3]; 3] {
        self.tau.map(|row| row.map(Complex64::from))
    }
}

/// Parses `{"tau": [[{re, im} ×3] ×3]}` and validates the matrix.
pub fn parse_tau(text: &str) -> Result<PeriodMatrix> {
    let file: TauFile = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    PeriodMatrix::new(file.raw())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BitangentJson {
    pub q: Characteristic,
    pub label: String,
    pub line: ProjLine,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineReportJson {
    pub q: Characteristic,
    pub is_bitangent: bool,
    pub residual: f64,
    pub contacts: Vec<Vec<JsonComplex>>,
}

impl LineReportJson {
    pub fn new(q: Characteristic, report: &BitangencyReport) -> Self {
        LineReportJson {
            q,
            is_bitangent: report.is_bitangent,
            residual: report.residual,
            contacts: report.contact_points.iter().map(|p| complex_vec(p)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyJson {
    pub lines: Vec<LineReportJson>,
    pub summary: VerifySummary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineJson {
    pub aronhold: Vec<Characteristic>,
    pub a: Vec<Vec<JsonComplex>>,
    pub bitangents: Vec<BitangentJson>,
    pub quartic: Vec<JsonComplex>,
    pub k: Vec<JsonComplex>,
    pub lambda: Vec<JsonComplex>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<VerifySummary>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_round_trip() {
        let tau = PeriodMatrix::i_identity();
        let text = serde_json::to_string(&TauFile::from_matrix(&tau)).unwrap();
        assert!(text.starts_with(r#"{"tau":[[{"re":0.0,"im":1.0}"#));
        assert_eq!(parse_tau(&text).unwrap(), tau);
    }

    #[test]
    fn malformed_input() {
        assert!(matches!(parse_tau("{\"tau\": 3}"), Err(Error::Json(_))));
        assert!(matches!(parse_tau("not json"), Err(Error::Json(_))));
        let neg = r#"{"tau":[[{"re":0,"im":1},{"re":0,"im":0},{"re":0,"im":0}],
                             [{"re":0,"im":0},{"re":0,"im":1},{"re":0,"im":0}],
                             [{"re":0,"im":0},{"re":0,"im":0},{"re":0,"im":-1}]]}"#;
        assert!(matches!(parse_tau(neg), Err(Error::NotPositiveDefinite(_))));
    }
}
