//! Experiment harness: configuration, the agent loop, sweeps and the
//! metrics and plot writers behind the CLI.

pub mod agent;
pub mod config;
pub mod metrics;
pub mod plot;
pub mod sweep;

pub use agent::{run, RunOutput};
pub use config::{GcConfig, ProfileConfig, RunConfig};
pub use metrics::{emit_csv, parse_csv, MetricsRow};
pub use plot::{emit_plot, render_svg};
pub use sweep::{sweep, NamedProfile, SweepSummary};
