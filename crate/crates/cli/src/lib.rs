//! Pipeline orchestration: OCEL file I/O, the running-example fixture,
//! dataset statistics, graph/checkpoint/metrics serialization, and the
//! command implementations behind the `hoegkit` binary.

pub mod checkpoint;
pub mod commands;
pub mod config;
pub mod error;
pub mod fixture;
pub mod graphs;
pub mod metrics;
pub mod ocel;
pub mod pipeline;
pub mod stats;

pub use config::{Encoder, RunConfig};
pub use error::{CliError, Result};
pub use fixture::build_otc_fixture;
pub use ocel::{parse_ocel, serialize_log, ParseReport};
pub use pipeline::{build_dataset, Dataset};
pub use stats::{log_stats, LogStats};
