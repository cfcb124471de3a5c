//! Outcomes of individual checks, shared by the library and the CLI.

use serde::Serialize;

use crate::series::{Lattice, Series, Watermark};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub check: String,
    pub status: Status,
    /// Order up to which the comparison was exact, e.g. `"5/2"` or `"inf"`.
    pub order: Option<String>,
    pub residual_sample: Vec<String>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl CheckOutcome {
    pub fn new(check: impl Into<String>, passed: bool) -> Self {
        CheckOutcome {
            check: check.into(),
            status: if passed { Status::Pass } else { Status::Fail },
            order: None,
            residual_sample: Vec::new(),
            detail: String::new(),
        }
    }

    pub fn skipped(check: impl Into<String>, why: impl Into<String>) -> Self {
        CheckOutcome { status: Status::Skip, detail: why.into(), ..Self::new(check, true) }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn with_order(mut self, lat: Lattice, w: Watermark) -> Self {
        self.order = Some(format_order(lat, w));
        self
    }

    pub fn with_residual(mut self, residual: &Series) -> Self {
        self.residual_sample = residual.sample(3);
        self
    }
}

pub fn format_order(lat: Lattice, w: Watermark) -> String {
    match w {
        Watermark::Finite(n) => {
            let r = lat.to_ratio(n);
            if r.is_integer() {
                r.numer().to_string()
            } else {
                format!("{}/{}", r.numer(), r.denom())
            }
        }
        Watermark::Infinite => "inf".to_string(),
    }
}

pub fn all_passed(outcomes: &[CheckOutcome]) -> bool {
    outcomes.iter().all(CheckOutcome::passed)
}
