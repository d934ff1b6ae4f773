//! Plain-text matrices: a line with the dimension, then one line per row of
//! whitespace-separated `re:im` entries. Blank lines and `#` comments are
//! skipped.

use std::path::Path;

use moebius_core::{Complex64, ComplexMatrix};

use crate::error::{CliError, CliResult};

pub fn read(path: &Path) -> CliResult<ComplexMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse(&text).map_err(|(line, message)| CliError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    })
}

/// Errors carry the 1-based line number.
pub fn parse(text: &str) -> Result<ComplexMatrix, (usize, String)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (first, head) = lines.next().ok_or((1, "missing dimension line".to_string()))?;
    let dim: usize = head
        .parse()
        .ok()
        .filter(|&d| d > 0)
        .ok_or((first, format!("expected a positive dimension, found '{head}'")))?;

    let mut rows = Vec::with_capacity(dim);
    let mut last = first;
    for (line, content) in lines {
        last = line;
        if rows.len() == dim {
            return Err((line, format!("extra row beyond dimension {dim}")));
        }
        let row = content
            .split_whitespace()
            .map(|tok| entry(tok).map_err(|m| (line, m)))
            .collect::<Result<Vec<_>, _>>()?;
        if row.len() != dim {
            return Err((line, format!("expected {dim} entries, found {}", row.len())));
        }
        rows.push(row);
    }
    if rows.len() < dim {
        return Err((last, format!("expected {dim} rows, found {}", rows.len())));
    }
    ComplexMatrix::from_rows(&rows).map_err(|e| (first, e.to_string()))
}

fn entry(tok: &str) -> Result<Complex64, String> {
    let (re, im) = tok.split_once(':').ok_or_else(|| format!("entry '{tok}' is not re:im"))?;
    let parse = |s: &str| {
        s.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("entry '{tok}' has a bad number '{s}'"))
    };
    Ok(Complex64::new(parse(re)?, parse(im)?))
}
