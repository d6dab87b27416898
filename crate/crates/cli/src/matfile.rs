//! Plain-text matrix files.
//!
//! A matrix is a header line `rows cols` followed by `rows · cols` decimal
//! numbers in row-major order, separated by any whitespace. Blank lines and
//! lines whose first non-blank character is `#` are ignored. A file may hold
//! several matrices back to back.

use std::fmt::Write as _;

use gmf_core::matcore::Mat;
use sha2::{Digest, Sha256};

/// Parse failure with the 1-based line where it was detected.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

fn tokens(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim_start().starts_with('#'))
        .flat_map(|(i, line)| line.split_whitespace().map(move |tok| (i + 1, tok)))
}

/// Reads every matrix in `text`, in order.
pub fn parse_matrices(text: &str) -> Result<Vec<Mat>, ParseError> {
    let mut toks = tokens(text);
    let mut out = Vec::new();
    while let Some((line, tok)) = toks.next() {
        let rows = parse_dim(line, tok, "rows")?;
        let (line, tok) = toks.next().ok_or_else(|| ParseError {
            line,
            message: "header needs `rows cols`".into(),
        })?;
        let cols = parse_dim(line, tok, "cols")?;
        if cols == 0 {
            return Err(ParseError {
                line,
                message: "cols must be positive".into(),
            });
        }
        let len = rows.checked_mul(cols).ok_or_else(|| ParseError {
            line,
            message: format!("{rows}x{cols} is too large"),
        })?;
        let mut data = Vec::new();
        let mut last_line = line;
        for _ in 0..len {
            let (line, tok) = toks.next().ok_or_else(|| ParseError {
                line: last_line,
                message: format!(
                    "expected {len} entries for a {rows}x{cols} matrix, found {}",
                    data.len()
                ),
            })?;
            last_line = line;
            let value: f64 = tok.parse().map_err(|_| ParseError {
                line,
                message: format!("`{tok}` is not a decimal number"),
            })?;
            if !value.is_finite() {
                return Err(ParseError {
                    line,
                    message: format!("entry `{tok}` is not finite"),
                });
            }
            data.push(value);
        }
        out.push(Mat::from_row_slice(rows, cols, &data));
    }
    Ok(out)
}

/// Reads a file that holds exactly one matrix.
pub fn parse_matrix(text: &str) -> Result<Mat, ParseError> {
    let mut all = parse_matrices(text)?;
    match all.len() {
        1 => Ok(all.remove(0)),
        0 => Err(ParseError {
            line: 1,
            message: "no matrix found".into(),
        }),
        k => Err(ParseError {
            line: 1,
            message: format!("expected one matrix, found {k}"),
        }),
    }
}

fn parse_dim(line: usize, tok: &str, what: &str) -> Result<usize, ParseError> {
    tok.parse().map_err(|_| ParseError {
        line,
        message: format!("{what} `{tok}` is not a nonnegative integer"),
    })
}

/// Appends `m` in file format, preceded by an optional comment line.
/// Entries are written in shortest round-trip form.
pub fn write_matrix(out: &mut String, m: &Mat, comment: Option<&str>) {
    if let Some(c) = comment {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "{} {}", m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:e}", m[(i, j)])).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
}

/// SHA-256 of the dimensions and the little-endian bytes of the row-major
/// entries, so that equal matrices hash equally whatever their formatting.
pub fn digest(m: &Mat) -> String {
    let mut h = Sha256::new();
    h.update((m.nrows() as u64).to_le_bytes());
    h.update((m.ncols() as u64).to_le_bytes());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            h.update(m[(i, j)].to_le_bytes());
        }
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_free_layout() {
        let m = parse_matrix("# A\n\n2 3\n1 2\n3\n  # mid\n4 5 6e-1\n").unwrap();
        assert_eq!(
            m,
            Mat::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 0.6])
        );
    }

    #[test]
    fn empty_rows_are_allowed() {
        let m = parse_matrix("0 4\n").unwrap();
        assert_eq!(m.shape(), (0, 4));
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in [
            "",
            "2\n",
            "1 1\n",
            "1 2\n1 x\n",
            "1 1\nnan\n",
            "1 1\ninf\n",
            "1 0\n",
            "-1 2\n",
            "1 1\n1 2\n",
        ] {
            assert!(parse_matrix(bad).is_err(), "accepted {bad:?}");
        }
        let err = parse_matrix("1 2\n\n1 oops\n").unwrap_err();
        assert_eq!(err.line, 3);
    }

    #[test]
    fn write_then_read_is_exact() {
        let m = Mat::from_row_slice(2, 2, &[0.1, -1e-300, 1.0 / 3.0, 12345.678]);
        let mut s = String::new();
        write_matrix(&mut s, &m, Some("m"));
        write_matrix(&mut s, &Mat::zeros(0, 3), None);
        let back = parse_matrices(&s).unwrap();
        assert_eq!(back[0], m);
        assert_eq!(back[1].shape(), (0, 3));
    }

    #[test]
    fn digest_ignores_formatting() {
        let a = parse_matrix("1 2\n1 2\n").unwrap();
        let b = parse_matrix("# c\n1 2\n1.0\n2e0\n").unwrap();
        assert_eq!(digest(&a), digest(&b));
        assert_ne!(digest(&a), digest(&Mat::from_row_slice(2, 1, &[1.0, 2.0])));
    }
}
