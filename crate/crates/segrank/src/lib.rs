//! Survey segmentation and attribute-ranking toolkit for 7-point Likert data.
//!
//! The crate implements a step-wise analysis pipeline for attitudinal survey
//! datasets:
//!
//! 1. [`survey`] — load, validate, clean and describe Likert survey files;
//! 2. [`psych`] — reliability (Cronbach's alpha) and sampling-adequacy
//!    diagnostics (KMO, Bartlett's sphericity) that gate the factor analysis;
//! 3. [`efa`] — principal-axis factor extraction with promax rotation,
//!    iterative item pruning and regression factor scores;
//! 4. [`lcca`] — latent-class (Gaussian profile) clustering over factor
//!    scores with BIC model selection and passive covariate profiling;
//! 5. [`mcdm`] — per-class attribute ranking with MOORA, TOPSIS and VIKOR;
//! 6. [`rankagg`] — fusion of the method rankings into a single meta ranking
//!    by footrule/Kendall distance minimization;
//! 7. [`pipeline`] — config-driven orchestration of the whole flow, plus a
//!    synthetic survey generator ([`simulate`]) for end-to-end verification.
//!
//! Every stage is usable on its own; see the `examples/` directory for one
//! runnable program per capability. The `segrank` binary exposes the same
//! stages as subcommands for batch use.

pub mod demo;
pub mod efa;
pub mod lcca;
pub mod linalg;
pub mod mcdm;
pub mod pipeline;
pub mod psych;
pub mod rankagg;
pub mod report;
pub mod simulate;
pub mod survey;

pub use pipeline::{run_pipeline, PipelineConfig, PipelineError, RunReport};
pub use survey::{SurveyDataset, SurveySchema};
