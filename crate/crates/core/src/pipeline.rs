//! End-to-end run: theta table, Aronhold frame, Riemann model, the 28 lines
//! and their bitangency reports.

use crate::chars::{enumerate_aronhold, AronholdSystem};
use crate::error::{Error, Result};
use crate::json::{complex_mat, complex_vec, BitangentJson, LineReportJson, PipelineJson, VerifyJson};
use crate::par::Exec;
use crate::poly::QuarticCurve;
use crate::theta::{PeriodMatrix, ThetaTable, TruncationPolicy};
use crate::verify::{check_all, summarize, BitangencyReport, VerifySummary, DEFAULT_BITANGENT_TOL};
use crate::weber::{bitangents_with_frame, riemann_quartic, weber_coefficients, AronholdFrame, LabelledLine, ProjLine};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub policy: TruncationPolicy,
    pub eps: [i8; 3],
    pub tol: f64,
    pub exec: Exec,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            policy: TruncationPolicy::default(),
            eps: [1, 1, 1],
            tol: DEFAULT_BITANGENT_TOL,
            exec: Exec::default(),
        }
    }
}

/// The Aronhold system at `index` in the canonical enumeration, or the
/// reference system when `index` is `None`.
pub fn select_system(index: Option<usize>) -> Result<AronholdSystem> {
    match index {
        None => Ok(AronholdSystem::reference()),
        Some(i) => {
            let all = enumerate_aronhold();
            all.get(i).copied().ok_or(Error::IndexOutOfRange { index: i, len: all.len() })
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub table: ThetaTable,
    pub frame: AronholdFrame,
    pub quartic: QuarticCurve,
    pub bitangents: Vec<LabelledLine>,
    pub reports: Vec<BitangencyReport>,
}

impl PipelineOutput {
    pub fn summary(&self) -> VerifySummary {
        summarize(&self.reports)
    }

    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.is_bitangent)
    }

    pub fn to_json(&self, with_summary: bool) -> PipelineJson {
        PipelineJson {
            aronhold: self.frame.system.forms().iter().map(|q| q.characteristic()).collect(),
            a: complex_mat(&self.frame.a),
            bitangents: self
                .bitangents
                .iter()
                .map(|b| BitangentJson { q: b.q.characteristic(), label: b.label.clone(), line: b.line })
                .collect(),
            quartic: complex_vec(&self.quartic.coeffs),
            k: complex_vec(&self.frame.k),
            lambda: complex_vec(&self.frame.lambda),
            summary: with_summary.then(|| self.summary()),
        }
    }

    pub fn verify_json(&self) -> VerifyJson {
        VerifyJson {
            lines: self
                .bitangents
                .iter()
                .zip(&self.reports)
                .map(|(b, r)| LineReportJson::new(b.q.characteristic(), r))
                .collect(),
            summary: self.summary(),
        }
    }
}

pub fn run(tau: &PeriodMatrix, sys: &AronholdSystem, config: &PipelineConfig) -> Result<PipelineOutput> {
    let table = ThetaTable::new_with(tau, &config.policy, config.exec)?;
    run_with_table(table, sys, config)
}

pub fn run_with_table(table: ThetaTable, sys: &AronholdSystem, config: &PipelineConfig) -> Result<PipelineOutput> {
    table.require_generic()?;
    let frame = weber_coefficients(sys, &table, config.eps)?;
    let quartic = riemann_quartic(&frame.xi)?;
    let bitangents = bitangents_with_frame(sys, &table, &frame.phi)?;
    let lines: Vec<ProjLine> = bitangents.iter().map(|b| b.line).collect();
    let reports = check_all(&quartic, &lines, config.tol, config.exec)?;
    Ok(PipelineOutput { table, frame, quartic, bitangents, reports })
}
