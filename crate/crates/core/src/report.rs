//! Throughput reporting in billions of cell updates per second.

use std::fmt;

use crate::error::{Error, Result};

/// `(|Q| * |D|) / (t * 10^9)` for query residues `|Q|`, database residues
/// `|D|` and search time `t` in seconds.
pub fn compute_gcups(query_residues: u64, db_residues: u64, seconds: f64) -> Result<f64> {
    if !seconds.is_finite() || seconds <= 0.0 {
        return Err(Error::argument(format!(
            "elapsed time must be positive, got {seconds}"
        )));
    }
    Ok((query_residues as f64 * db_residues as f64) / (seconds * 1e9))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GcupsReport {
    pub query_residues: u64,
    pub db_residues: u64,
    pub elapsed_seconds: f64,
    pub gcups: f64,
}

impl GcupsReport {
    pub fn new(query_residues: u64, db_residues: u64, elapsed_seconds: f64) -> Result<Self> {
        let gcups = compute_gcups(query_residues, db_residues, elapsed_seconds)?;
        Ok(GcupsReport {
            query_residues,
            db_residues,
            elapsed_seconds,
            gcups,
        })
    }
}

impl fmt::Display for GcupsReport {
    /// Values are printed in shortest round-trip form so the line can be
    /// re-checked exactly.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "query_residues={} db_residues={} seconds={} gcups={}",
            self.query_residues, self.db_residues, self.elapsed_seconds, self.gcups
        )
    }
}
