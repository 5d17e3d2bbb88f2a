//! Experiment harness: seeded, reproducible measurements of the scaling
//! behaviour of the operators in this crate, with fitted exponents,
//! pass/fail rules, and serializable reports.

pub mod config;
pub mod cyclic;
pub mod experiments;
pub mod fit;
pub mod io;
pub mod report;
pub mod svg;

pub use config::{ExperimentConfig, ExperimentKind};
pub use cyclic::CyclicSystem;
pub use experiments::{evaluate, run};
pub use fit::{fit_scaling, linear_fit, FitSummary};
pub use report::{parse_points_csv, ExperimentReport, Series};
