//! Bitangents of plane quartics from genus-3 period matrices.
//!
//! Starting from `τ` in the Siegel upper half-space, the crate evaluates
//! theta constants with characteristics, builds the Aronhold frame of an
//! Aronhold system of odd characteristics, reconstructs the quartic through
//! its Riemann model and certifies each of the 28 lines as a bitangent.
//!
//! ```
//! use theta_quartic::{pipeline, random, AronholdSystem, TruncationPolicy};
//!
//! let tau = random::random_tau(1, &TruncationPolicy::default()).unwrap();
//! let out = pipeline::run(&tau, &AronholdSystem::reference(), &Default::default()).unwrap();
//! assert_eq!(out.bitangents.len(), 28);
//! assert!(out.all_pass());
//! ```
// `!(x < limit)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod chars;
pub mod error;
pub mod json;
pub mod linalg;
pub mod par;
pub mod pipeline;
pub mod poly;
pub mod random;
pub mod selftest;
pub mod theta;
pub mod verify;
pub mod weber;

pub use num_complex::Complex64;

pub use chars::{AronholdSystem, Characteristic, F2Vector, QuadForm};
pub use error::{Error, Result};
pub use par::Exec;
pub use poly::QuarticCurve;
pub use theta::{PeriodMatrix, ThetaTable, TruncationPolicy};
pub use verify::BitangencyReport;
pub use weber::{AronholdFrame, ProjLine};
