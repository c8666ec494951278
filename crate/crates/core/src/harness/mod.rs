//! Problem setup, convergence studies, and CSV output.

pub mod config;
pub mod report;
pub mod run;

pub use config::{Boundary, Geometry, Problem, RunConfig, Scheme};
pub use run::{convergence_ladder, fit_slope, longtime, prepare, run, ConvergenceReport, Prepared, RunRecord};
