//! Instance generation, suite configuration, and report emission for the
//! `ssfdet` command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod instance;
pub mod report;
pub mod rng;
pub mod suite;

pub use config::{presets, Batch, BatchKind, ConfigError, SuiteConfig, Tolerances, FORMAT_VERSION};
pub use instance::{gen_instance, Cluster, GenError, Generator, Instance, InstanceSpec, IntervalSpec, PhiMode, Target};
pub use report::{Cell, Format, Report};
pub use suite::{counterexample_pair, run_suite, RunOptions, SuiteOutcome, COLUMNS};
