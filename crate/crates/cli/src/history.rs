//! History CSV reading and writing.

use std::io::Write;
use std::path::Path;

use amfem::adapt::IterationRecord;

pub const HEADER: &[&str] = &[
    "iter",
    "ndof",
    "error",
    "eta",
    "osc",
    "quantity_a",
    "eoc_e",
    "eoc_eta",
    "marked",
    "residual",
    "seconds",
];

#[derive(Debug, thiserror::Error)]
pub enum HistoryError {
    #[error("{path}: {message}")]
    Malformed { path: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// 17 significant digits, so values round-trip exactly.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

pub fn write_history<W: Write>(records: &[IterationRecord], out: W) -> Result<(), HistoryError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(HEADER)?;
    for r in records {
        w.write_record([
            r.k.to_string(),
            r.ndof.to_string(),
            opt(r.error),
            format_float(r.eta),
            format_float(r.osc),
            format_float(r.quantity_a),
            opt(r.eoc_e),
            opt(r.eoc_eta),
            r.marked.to_string(),
            format_float(r.residual),
            format_float(r.seconds),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes through a temporary file in the same directory and renames it into
/// place.
pub fn write_atomic(path: &Path, write: impl FnOnce(&mut std::fs::File) -> Result<(), HistoryError>) -> Result<(), HistoryError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    write(tmp.as_file_mut())?;
    tmp.as_file_mut().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn read_history(path: &Path) -> Result<Vec<IterationRecord>, HistoryError> {
    let name = path.display().to_string();
    let malformed = |message: String| HistoryError::Malformed {
        path: name.clone(),
        message,
    };
    let mut rdr = csv::Reader::from_path(path)?;
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != HEADER {
        return Err(malformed(format!("unexpected header `{}`", header.join(","))));
    }
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let field = |j: usize| -> Result<Option<f64>, HistoryError> {
            let s = row.get(j).unwrap_or("").trim();
            if s.is_empty() {
                return Ok(None);
            }
            s.parse()
                .map(Some)
                .map_err(|_| malformed(format!("line {line}: bad value `{s}` in column {}", HEADER[j])))
        };
        let required = |j: usize| -> Result<f64, HistoryError> {
            field(j)?.ok_or_else(|| malformed(format!("line {line}: missing {}", HEADER[j])))
        };
        let count = |j: usize| -> Result<usize, HistoryError> {
            let s = row.get(j).unwrap_or("").trim();
            s.parse()
                .map_err(|_| malformed(format!("line {line}: bad count `{s}` in column {}", HEADER[j])))
        };
        out.push(IterationRecord {
            k: count(0)?,
            ndof: count(1)?,
            error: field(2)?,
            eta: required(3)?,
            osc: required(4)?,
            quantity_a: required(5)?,
            eoc_e: field(6)?,
            eoc_eta: field(7)?,
            marked: count(8)?,
            residual: required(9)?,
            seconds: required(10)?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(k: usize) -> IterationRecord {
        IterationRecord {
            k,
            ndof: 8 * k,
            error: (k > 1).then_some(0.1 / k as f64),
            eta: 1.0 / 3.0,
            osc: 1e-300,
            quantity_a: 2.0f64.sqrt(),
            eoc_e: None,
            eoc_eta: Some(-0.5),
            marked: 3,
            residual: 1e-15,
            seconds: 0.25,
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h.csv");
        let recs = vec![record(1), record(2)];
        write_atomic(&path, |f| write_history(&recs, f)).unwrap();
        assert_eq!(read_history(&path).unwrap(), recs);
    }

    #[test]
    fn rejects_other_schemas() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h.csv");
        std::fs::write(&path, "a,b\n1,2\n").unwrap();
        assert!(matches!(read_history(&path), Err(HistoryError::Malformed { .. })));
        let mut text = HEADER.join(",");
        text.push_str("\n1,8,,x,1,1,,,0,0,0\n");
        std::fs::write(&path, text).unwrap();
        let err = read_history(&path).unwrap_err().to_string();
        assert!(err.contains("eta"), "{err}");
    }
}
