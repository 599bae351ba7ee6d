//! Tabular verification results.

use std::fmt::{self, Write as _};

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        })
    }
}

/// One verified (or skipped) quantity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Row {
    pub r: u32,
    pub q: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<u32>,
    pub check: String,
    pub method: String,
    pub value: String,
    pub oracle: String,
    pub status: Status,
}

impl Row {
    pub fn new(r: u32, check: &str, method: impl Into<String>) -> Self {
        Row {
            r,
            q: 1u64 << r,
            h: None,
            check: check.to_string(),
            method: method.into(),
            value: String::new(),
            oracle: String::new(),
            status: Status::Skip,
        }
    }

    pub fn with_h(mut self, h: u32) -> Self {
        self.h = Some(h);
        self
    }

    /// Pass iff `value == oracle`.
    pub fn compare(mut self, value: impl fmt::Display, oracle: impl fmt::Display) -> Self {
        self.value = value.to_string();
        self.oracle = oracle.to_string();
        self.status = if self.value == self.oracle {
            Status::Pass
        } else {
            Status::Fail
        };
        self
    }

    pub fn pass(mut self, value: impl fmt::Display) -> Self {
        self.value = value.to_string();
        self.oracle = self.value.clone();
        self.status = Status::Pass;
        self
    }

    pub fn fail(mut self, reason: impl fmt::Display) -> Self {
        self.value = reason.to_string();
        self.status = Status::Fail;
        self
    }

    pub fn skip(mut self, reason: impl fmt::Display) -> Self {
        self.value = reason.to_string();
        self.status = Status::Skip;
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub rows: Vec<Row>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.status != Status::Fail)
    }

    pub fn count(&self, status: Status) -> usize {
        self.rows.iter().filter(|r| r.status == status).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| r.status == Status::Fail)
    }

    /// Fixed-width text table with a summary line.
    pub fn to_table(&self) -> String {
        let headers = [
            "r", "q", "h", "check", "method", "value", "oracle", "status",
        ];
        let cells: Vec<[String; 8]> = self
            .rows
            .iter()
            .map(|row| {
                [
                    row.r.to_string(),
                    row.q.to_string(),
                    row.h.map(|h| h.to_string()).unwrap_or_else(|| "-".into()),
                    row.check.clone(),
                    row.method.clone(),
                    clip(&row.value),
                    clip(&row.oracle),
                    row.status.to_string(),
                ]
            })
            .collect();
        let mut widths = headers.map(str::len);
        for line in &cells {
            for (w, c) in widths.iter_mut().zip(line) {
                *w = (*w).max(c.len());
            }
        }
        let mut out = String::new();
        let mut emit = |line: &[&str]| {
            let padded: Vec<String> = line
                .iter()
                .zip(widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            let _ = writeln!(out, "{}", padded.join("  ").trim_end());
        };
        emit(&headers);
        for line in &cells {
            emit(&line.each_ref().map(String::as_str));
        }
        let _ = writeln!(
            out,
            "{} passed, {} failed, {} skipped",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Skip)
        );
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,q,h,check,method,value,oracle,status\n");
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                row.r,
                row.q,
                row.h.map(|h| h.to_string()).unwrap_or_default(),
                row.check,
                csv_field(&row.method),
                csv_field(&row.value),
                csv_field(&row.oracle),
                row.status
            );
        }
        out
    }
}

fn clip(s: &str) -> String {
    const MAX: usize = 48;
    if s.chars().count() <= MAX {
        s.to_string()
    } else {
        let head: String = s.chars().take(MAX - 3).collect();
        format!("{head}...")
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
