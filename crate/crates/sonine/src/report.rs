use serde::{Deserialize, Serialize};

/// How `measured` is compared with `tolerance`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">")]
    Above,
    #[serde(rename = ">=")]
    AtLeast,
}

impl Comparison {
    pub fn holds(self, measured: f64, tolerance: f64) -> bool {
        match self {
            Comparison::AtMost => measured <= tolerance,
            Comparison::Above => measured > tolerance,
            Comparison::AtLeast => measured >= tolerance,
        }
    }
}

/// One check: a measured number against a threshold. A check whose
/// computation failed has no measurement and does not pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub tag: String,
    /// Acceptance criterion this record decides, if any.
    pub criterion: Option<u32>,
    pub lambda: f64,
    pub measured: Option<f64>,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
    pub detail: String,
}

/// What a check is, independent of its outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckId {
    pub name: String,
    pub tag: &'static str,
    pub criterion: Option<u32>,
    pub comparison: Comparison,
}

impl CheckId {
    pub fn new(
        name: impl Into<String>,
        tag: &'static str,
        criterion: Option<u32>,
        comparison: Comparison,
    ) -> Self {
        CheckId {
            name: name.into(),
            tag,
            criterion,
            comparison,
        }
    }
}

impl CheckRecord {
    pub fn measured(
        id: CheckId,
        lambda: f64,
        value: f64,
        tolerance: f64,
        detail: impl Into<String>,
    ) -> Self {
        CheckRecord {
            name: id.name,
            tag: id.tag.into(),
            criterion: id.criterion,
            lambda,
            // non-finite values have no JSON form; they count as missing
            measured: value.is_finite().then_some(value),
            tolerance,
            comparison: id.comparison,
            pass: value.is_finite() && id.comparison.holds(value, tolerance),
            detail: detail.into(),
        }
    }

    pub fn failed(id: CheckId, lambda: f64, tolerance: f64, error: impl std::fmt::Display) -> Self {
        CheckRecord {
            name: id.name,
            tag: id.tag.into(),
            criterion: id.criterion,
            lambda,
            measured: None,
            tolerance,
            comparison: id.comparison,
            pass: false,
            detail: format!("error: {error}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub lambda: f64,
    pub grid_n: usize,
    pub suites: Vec<String>,
    pub records: Vec<CheckRecord>,
    pub pass: bool,
}

impl VerifyReport {
    pub fn new(lambda: f64, grid_n: usize, suites: Vec<String>, records: Vec<CheckRecord>) -> Self {
        let pass = records.iter().all(|r| r.pass);
        VerifyReport {
            lambda,
            grid_n,
            suites,
            records,
            pass,
        }
    }

    pub fn criterion(&self, k: u32) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(move |r| r.criterion == Some(k))
    }
}
