// Copyright 2026 qbo Contributors
// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use qbo_core::experiments::Dataset;

use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;

/// 17 significant digits: enough to round-trip every `f64`.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes the manifest, the dataset's provenance lines, the header and the
/// rows.
pub fn write_csv(ds: &Dataset, manifest: &RunManifest, w: &mut impl Write) -> std::io::Result<()> {
    for line in manifest.lines() {
        writeln!(w, "{line}")?;
    }
    writeln!(w, "# dataset: {}", ds.name)?;
    for (k, v) in &ds.meta {
        writeln!(w, "# meta {k}: {v}")?;
    }
    writeln!(w, "{}", ds.columns.join(","))?;
    for row in &ds.rows {
        let cells: Vec<String> = row.iter().map(|v| format_value(*v)).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

/// [`write_csv`] into a file; IO errors carry the path.
pub fn emit_csv(ds: &Dataset, manifest: &RunManifest, path: &Path) -> CliResult<()> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    write_csv(ds, manifest, &mut w).map_err(io)?;
    w.flush().map_err(io)
}
