//! Line-delimited JSON traces.
//!
//! One object per line:
//!
//! ```text
//! {"kind":"record","step":100,"portfolio":[...],"alpha_selected":2.0e0,
//!  "metrics":{"n":100,"mean":...,"variance":...,"sharpe":...,"sharpe_status":"finite",
//!             "growth":...,"log_wealth":...,"wealth":...,"utility":...},
//!  "optimal_utility":...,"ground_truth_gap":...}
//! ```
//!
//! `kind` is `"record"` for periodic records and `"summary"` for the final
//! line. Numbers carry 17 significant digits; non-finite values and
//! unavailable quantities are `null`.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::Result;
use crate::metrics::{MetricsReport, Sharpe};
use crate::types::Portfolio;

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord {
    pub summary: bool,
    pub step: usize,
    pub portfolio: Portfolio,
    pub alpha_selected: Option<f64>,
    pub metrics: MetricsReport,
    pub optimal_utility: Option<f64>,
    pub ground_truth_gap: Option<f64>,
}

/// JSON number with 17 significant digits, or `null`.
pub fn format_number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".to_owned()
    }
}

fn optional(v: Option<f64>) -> String {
    v.map_or_else(|| "null".to_owned(), format_number)
}

impl TraceRecord {
    pub fn to_json_line(&self) -> String {
        let m = &self.metrics;
        let weights: Vec<String> = self
            .portfolio
            .weights()
            .iter()
            .map(|w| format_number(*w))
            .collect();
        let (sharpe, status) = match m.sharpe {
            Sharpe::Finite(v) => (format_number(v), "finite"),
            Sharpe::Infinite => ("null".to_owned(), "infinite"),
            Sharpe::Unavailable => ("null".to_owned(), "unavailable"),
        };
        let mut s = String::with_capacity(256 + 24 * weights.len());
        let _ = write!(
            s,
            "{{\"kind\":\"{}\",\"step\":{},\"portfolio\":[{}],\"alpha_selected\":{},",
            if self.summary { "summary" } else { "record" },
            self.step,
            weights.join(","),
            optional(self.alpha_selected),
        );
        let _ = write!(
            s,
            "\"metrics\":{{\"n\":{},\"mean\":{},\"variance\":{},\"sharpe\":{},\"sharpe_status\":\"{}\",\"growth\":{},\"log_wealth\":{},\"wealth\":{},\"utility\":{}}},",
            m.n,
            format_number(m.mean),
            format_number(m.variance),
            sharpe,
            status,
            format_number(m.growth),
            format_number(m.log_wealth),
            format_number(m.wealth),
            format_number(m.utility),
        );
        let _ = write!(
            s,
            "\"optimal_utility\":{},\"ground_truth_gap\":{}}}",
            optional(self.optimal_utility),
            optional(self.ground_truth_gap),
        );
        s
    }
}

pub struct TraceWriter {
    out: BufWriter<File>,
    written: usize,
}

impl TraceWriter {
    pub fn create(path: &Path) -> Result<Self> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        Ok(Self {
            out: BufWriter::new(File::create(path)?),
            written: 0,
        })
    }

    pub fn write(&mut self, record: &TraceRecord) -> Result<()> {
        writeln!(self.out, "{}", record.to_json_line())?;
        self.written += 1;
        Ok(())
    }

    pub fn written(&self) -> usize {
        self.written
    }

    pub fn flush(&mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}
