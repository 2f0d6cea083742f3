use std::fmt::Write as _;
use std::io::Write;

/// One aggregated cell: a statistic's Monte Carlo mean and standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub model: String,
    pub method: String,
    pub param: String,
    pub stat: String,
    pub mean: f64,
    pub sd: f64,
    pub replications: usize,
    pub seed: u64,
}

/// Rows in deterministic (model, method, parameter, statistic) order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

pub const CSV_HEADER: &str = "experiment,model,method,param,stat,mean,sd,replications,seed";

/// Mean and sample standard deviation (divisor `n - 1`; 0 for a single value),
/// summed in order.
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

impl ResultTable {
    pub fn push(&mut self, row: ResultRow) {
        self.rows.push(row);
    }

    /// Look up a row's mean by key; `param` may be empty for unswept experiments.
    pub fn find(&self, model: &str, method: &str, param: &str, stat: &str) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.model == model && r.method == method && r.param == param && r.stat == stat)
    }

    /// CSV with full round-trip precision for the numeric cells.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{:?},{:?},{},{}",
                r.experiment, r.model, r.method, r.param, r.stat, r.mean, r.sd, r.replications, r.seed
            )
            .expect("writing to a String cannot fail");
        }
        out
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(self.to_csv().as_bytes())
    }

    /// Human-readable rendering in the "mean (sd)" style of published tables.
    /// Location metrics are shown scaled by 10^3.
    pub fn render(&self) -> String {
        let scaled = |r: &ResultRow| matches!(r.stat.as_str(), "isb" | "ivar" | "mise");
        let cells: Vec<[String; 5]> = self
            .rows
            .iter()
            .map(|r| {
                let (factor, stat) = if scaled(r) { (1e3, format!("{}x1e3", r.stat)) } else { (1.0, r.stat.clone()) };
                [
                    r.model.clone(),
                    r.method.clone(),
                    r.param.clone(),
                    stat,
                    format!("{:.3} ({:.3})", r.mean * factor, r.sd * factor),
                ]
            })
            .collect();
        let headers = ["model", "method", "param", "stat", "mean (sd)"];
        let mut widths = headers.map(str::len);
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, items: &[&str]| {
            let parts: Vec<String> = items.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
            writeln!(out, "{}", parts.join("  ").trim_end()).expect("writing to a String cannot fail");
        };
        line(&mut out, &headers);
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        line(&mut out, &rule.iter().map(String::as_str).collect::<Vec<_>>());
        for row in &cells {
            line(&mut out, &row.iter().map(String::as_str).collect::<Vec<_>>());
        }
        out
    }
}
