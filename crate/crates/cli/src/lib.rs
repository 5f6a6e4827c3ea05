//! Library half of the `survcmp` command-line tool: CSV ingestion, report
//! assembly, rendering and argument dispatch. The binary only prints what
//! [`app::run`] returns and maps failures to exit codes.

pub mod analysis;
pub mod app;
pub mod ingest;
pub mod simulate;

pub use analysis::{analyze, render_text, AnalysisRequest, Report};
pub use ingest::{ingest_csv, read_csv, ColumnMapping, Dataset, IngestError};
