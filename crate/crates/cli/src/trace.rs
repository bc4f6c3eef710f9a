//! CSV traces: `restart,sweep,stage,bias_re,bias_im`, one row per recorded
//! stage, followed by one summary row
//! `summary,<best restart>,best,<best bias>,0`.

use std::path::{Path, PathBuf};

use qxor_core::optimize::SeesawResult;
use qxor_core::{Error, Result};

pub const HEADER: [&str; 5] = ["restart", "sweep", "stage", "bias_re", "bias_im"];

pub fn write_trace(path: &Path, result: &SeesawResult<f64>) -> Result<()> {
    let io = |e: csv::Error| Error::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(HEADER).map_err(io)?;
    for trace in &result.traces {
        for r in &trace.records {
            w.write_record([
                r.restart.to_string(),
                r.sweep.to_string(),
                r.stage.name().to_string(),
                r.bias.re.to_string(),
                r.bias.im.to_string(),
            ])
            .map_err(io)?;
        }
    }
    w.write_record([
        "summary".to_string(),
        result.best_restart.to_string(),
        "best".to_string(),
        result.best_bias.to_string(),
        "0".to_string(),
    ])
    .map_err(io)?;
    w.flush().map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// `out.csv` with `d = 4` becomes `out.d4.csv`.
pub fn per_dimension_path(path: &Path, d: usize) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.d{d}.{}", ext.to_string_lossy()),
        None => format!("{stem}.d{d}"),
    };
    path.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn per_dimension_names() {
        assert_eq!(per_dimension_path(Path::new("a/out.csv"), 4), PathBuf::from("a/out.d4.csv"));
        assert_eq!(per_dimension_path(Path::new("trace"), 1), PathBuf::from("trace.d1"));
    }
}
