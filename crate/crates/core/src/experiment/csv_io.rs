//! Dataset CSV files: a header `t_1,...,t_T` with an optional trailing
//! `label` column, then one curve per row.

use std::sync::Arc;

use crate::error::{FdError, Result};
use crate::functional::{FunctionalSample, Grid};

/// A parsed dataset, keeping the raw lines so outputs can echo them.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub sample: FunctionalSample,
    pub labels: Option<Vec<String>>,
    header: String,
    lines: Vec<String>,
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> FdError {
    FdError::Parse { line, column, message: message.into() }
}

impl Dataset {
    pub fn parse(text: &str) -> Result<Dataset> {
        let text = text.strip_prefix('\u{feff}').unwrap_or(text);
        let mut rows = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
            .filter(|(_, l)| !l.trim().is_empty());
        let (header_line, header) = rows.next().ok_or_else(|| parse_err(1, 1, "empty file: expected a header row"))?;
        let names: Vec<&str> = header.split(',').map(str::trim).collect();
        let has_label = names.last() == Some(&"label");
        let t = names.len() - usize::from(has_label);
        if t < 2 {
            return Err(parse_err(header_line, 1, format!("need at least 2 grid columns, found {t}")));
        }
        for (k, name) in names[..t].iter().enumerate() {
            if *name != format!("t_{}", k + 1) {
                return Err(parse_err(
                    header_line,
                    k + 1,
                    format!("expected column name 't_{}', found '{name}'", k + 1),
                ));
            }
        }
        let grid: Arc<Grid> = Grid::uniform(t)?;
        let mut values = Vec::new();
        let mut labels = Vec::new();
        let mut lines = Vec::new();
        for (line_no, line) in rows {
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != names.len() {
                return Err(parse_err(
                    line_no,
                    cells.len().min(names.len()) + 1,
                    format!("expected {} fields, found {}", names.len(), cells.len()),
                ));
            }
            let mut row = Vec::with_capacity(t);
            for (k, cell) in cells[..t].iter().enumerate() {
                let v: f64 = cell
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(line_no, k + 1, format!("'{}' is not a number", cell.trim())))?;
                if !v.is_finite() {
                    return Err(parse_err(line_no, k + 1, format!("non-finite value '{}'", cell.trim())));
                }
                row.push(v);
            }
            if has_label {
                labels.push(cells[t].trim().to_string());
            }
            values.push(row);
            lines.push(line.to_string());
        }
        if values.is_empty() {
            return Err(parse_err(header_line + 1, 1, "no data rows"));
        }
        Ok(Dataset {
            sample: FunctionalSample::from_rows(&grid, values)?,
            labels: has_label.then_some(labels),
            header: header.to_string(),
            lines,
        })
    }

    pub fn read(path: &std::path::Path) -> Result<Dataset> {
        Dataset::parse(&std::fs::read_to_string(path)?)
    }

    /// The input rows with extra columns appended.
    pub fn with_columns(&self, names: &[String], columns: &[Vec<f64>]) -> String {
        let mut out = self.header.clone();
        for n in names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for (i, line) in self.lines.iter().enumerate() {
            out.push_str(line);
            for c in columns {
                out.push_str(&format!(",{:?}", c[i]));
            }
            out.push('\n');
        }
        out
    }
}

/// Serialize a sample in the dataset format.
pub fn write_dataset(sample: &FunctionalSample, labels: Option<&[String]>) -> String {
    let t = sample.grid().len();
    let mut out: Vec<String> = (1..=t).map(|k| format!("t_{k}")).collect();
    if labels.is_some() {
        out.push("label".into());
    }
    let mut text = out.join(",");
    text.push('\n');
    for (i, c) in sample.curves().iter().enumerate() {
        let mut cells: Vec<String> = c.values().iter().map(|v| format!("{v:?}")).collect();
        if let Some(l) = labels {
            cells.push(l[i].clone());
        }
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_and_without_labels() {
        let d = Dataset::parse("t_1,t_2,t_3\n0,0,0\n1,1,1\n2,2,2\n").unwrap();
        assert_eq!(d.sample.len(), 3);
        assert!(d.labels.is_none());
        let d = Dataset::parse("t_1,t_2,label\r\n0.5,1e-3,a\r\n1,2,b\r\n").unwrap();
        assert_eq!(d.labels.as_deref(), Some(&["a".to_string(), "b".to_string()][..]));
        assert_eq!(d.sample.curve(0).values(), &[0.5, 1e-3]);
    }

    #[test]
    fn errors_report_row_and_column() {
        let cases = [
            ("t_1,t_2\n1,2\n3\n", 3, 2),
            ("t_1,t_2\n1,2\n3,x\n", 3, 2),
            ("t_1,t_2\nNaN,2\n", 2, 1),
            ("t_1,t_3\n1,2\n", 1, 2),
            ("t_1,t_2\n", 2, 1),
            ("t_1\n1\n", 1, 1),
            ("", 1, 1),
        ];
        for (text, line, column) in cases {
            match Dataset::parse(text) {
                Err(FdError::Parse { line: l, column: c, .. }) => assert_eq!((l, c), (line, column), "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn round_trip() {
        let d = Dataset::parse("t_1,t_2,t_3,label\n0.1,0.2,0.3,x\n-1,5,2.5,y\n").unwrap();
        let text = write_dataset(&d.sample, d.labels.as_deref());
        let e = Dataset::parse(&text).unwrap();
        assert_eq!(d.sample, e.sample);
        assert_eq!(d.labels, e.labels);
        assert_eq!(
            d.with_columns(&["depth".into()], &[vec![0.5, 0.25]]),
            "t_1,t_2,t_3,label,depth\n0.1,0.2,0.3,x,0.5\n-1,5,2.5,y,0.25\n"
        );
    }
}
