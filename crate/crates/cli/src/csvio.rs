//! Deterministic CSV emission and parsing.
//!
//! Files are UTF-8, comma-separated, with `#`-prefixed comment lines above
//! a single header row. Numbers are serialized with 17 significant digits
//! so reruns are byte-identical; infinities appear as `inf`.

use std::path::Path;

use crate::error::{CliError, Result};

/// In-memory CSV table: comment lines (without the `# ` prefix), header
/// names, and stringified rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub comments: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(comments: Vec<String>, header: Vec<String>) -> Self {
        Table { comments, header, rows: Vec::new() }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render()).map_err(|e| CliError::io(path, e))
    }

    /// Column index by header name.
    pub fn column(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Config(format!("missing CSV column '{name}'")))
    }

    /// Parse a cell as f64 (accepting `inf`), reporting the data row number
    /// on failure.
    pub fn f64_at(&self, row: usize, col: usize) -> Result<f64> {
        parse_field(&self.rows[row][col]).map_err(|msg| {
            CliError::Config(format!("CSV row {}: column {}: {msg}", row + 1, self.header[col]))
        })
    }
}

/// 17-significant-digit serialization; `inf` sentinels for infinities.
pub fn fmt_f64(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{v:.16e}")
    }
}

pub fn fmt_bool(v: bool) -> String {
    if v { "1".to_string() } else { "0".to_string() }
}

fn parse_field(field: &str) -> std::result::Result<f64, String> {
    match field {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        other => other.trim().parse().map_err(|e| format!("{e}")),
    }
}

/// Read a CSV with optional comments and a header row.
pub fn read_table(path: &Path) -> Result<Table> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_table(&text, &path.display().to_string())
}

pub fn parse_table(text: &str, origin: &str) -> Result<Table> {
    let mut comments = Vec::new();
    let mut header: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            comments.push(comment.trim().to_string());
            continue;
        }
        let fields: Vec<String> = line.split(',').map(|f| f.trim().to_string()).collect();
        match &header {
            None => header = Some(fields),
            Some(h) => {
                if fields.len() != h.len() {
                    return Err(CliError::Config(format!(
                        "{origin}: line {line_no}: expected {} fields, found {}",
                        h.len(),
                        fields.len()
                    )));
                }
                rows.push(fields);
            }
        }
    }
    let header = header
        .ok_or_else(|| CliError::Config(format!("{origin}: no header row found")))?;
    Ok(Table { comments, header, rows })
}

/// Parse numeric calibration rows `(separation, f0, f1, f2)`, tolerating a
/// missing header when the first line is already numeric.
pub fn read_calibration(path: &Path) -> Result<(Vec<f64>, Vec<[f64; 3]>)> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut separations = Vec::new();
    let mut frequencies = Vec::new();
    let mut saw_header = false;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(|f| f.trim()).collect();
        if fields.len() != 4 {
            return Err(CliError::Config(format!(
                "{}: line {line_no}: expected 4 columns (separation, f0, f1, f2), found {}",
                path.display(),
                fields.len()
            )));
        }
        if !saw_header && fields[0].parse::<f64>().is_err() {
            saw_header = true;
            continue;
        }
        let mut values = [0.0; 4];
        for (i, field) in fields.iter().enumerate() {
            values[i] = field.parse().map_err(|e| {
                CliError::Config(format!(
                    "{}: line {line_no}: column {}: {e}",
                    path.display(),
                    i + 1
                ))
            })?;
        }
        separations.push(values[0]);
        frequencies.push([values[1], values[2], values[3]]);
    }
    Ok((separations, frequencies))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_and_parse_round_trip() {
        let mut t = Table::new(
            vec!["units: sigma".into()],
            vec!["s".into(), "v".into()],
        );
        t.push_row(vec![fmt_f64(0.0), fmt_f64(f64::INFINITY)]);
        t.push_row(vec![fmt_f64(0.5), fmt_f64(1.25e-4)]);
        let text = t.render();
        let back = parse_table(&text, "test").unwrap();
        assert_eq!(t, back);
        assert!(back.f64_at(0, 1).unwrap().is_infinite());
        assert_eq!(back.f64_at(1, 1).unwrap(), 1.25e-4);
    }

    #[test]
    fn seventeen_digit_format_is_exact() {
        for &v in &[0.1, 2.0e-4, 1.834779180989e-1, f64::MIN_POSITIVE] {
            let parsed: f64 = fmt_f64(v).parse().unwrap();
            assert_eq!(parsed.to_bits(), v.to_bits());
        }
    }

    #[test]
    fn calibration_reader_reports_line_numbers() {
        let dir = std::env::temp_dir().join("tfsr-csv-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.csv");
        std::fs::write(&path, "separation,f0,f1,f2\n0.0,1.0,0.0,0.0\n0.1,oops,0,0\n").unwrap();
        let err = read_calibration(&path).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        let path2 = dir.join("short.csv");
        std::fs::write(&path2, "0.0,1.0,0.0\n").unwrap();
        assert!(read_calibration(&path2).is_err());
    }
}
