//! Batch driver for `dpgamma-core`: configuration, the subcommands of the
//! `dpgamma` binary and their JSON reports.
//!
//! Every command produces a [`Report`]. Targets are processed on separate
//! threads and collected in the canonical surface order, so a report only
//! depends on its [`RunConfig`].

pub mod commands;
pub mod config;
pub mod report;

use std::path::Path;

use dpgamma_core::gw::GwTable;

pub use commands::{run, Command, Target};
pub use config::RunConfig;
pub use report::{Report, Status, SCHEMA_VERSION};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

pub fn load_table(path: Option<&Path>) -> Result<GwTable, CliError> {
    match path {
        None => Ok(GwTable::bundled()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?;
            GwTable::parse(&text).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))
        }
    }
}

/// Map `f` over `items` on scoped threads, keeping the input order.
pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let f = &f;
    std::thread::scope(|s| {
        let handles: Vec<_> = items.iter().map(|x| s.spawn(move || f(x))).collect();
        handles.into_iter().map(|h| h.join().expect("worker thread panicked")).collect()
    })
}
