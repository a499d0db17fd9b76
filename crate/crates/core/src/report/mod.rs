//! Per-domain analysis bundles and the CSV/JSON tables written from them.

mod analysis;
mod tables;

pub use analysis::{analyze_domain, DomainAnalysis, PairCount};
pub use tables::{analysis_tables, display_model, eval_tables, write_report, DomainEval, Significance, Table};
