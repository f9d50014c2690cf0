use lucas3::identities::IdentityTally;
use lucas3::period::PeriodSource;
use lucas3::predictor::ResidueDiff;
use lucas3::{
    Branch, DiscrepancyFlag, Histogram, LucasParams, OmegaSet, Prediction, SequenceKind,
    TheoremCase,
};
use serde::{Deserialize, Serialize};

/// Outcome label of a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Mismatch,
    /// No closed form covers `k < δ`; numbers come from brute force.
    UnsupportedClosedForm,
    /// Census stands in for a prediction that no closed form covers.
    Empirical,
}

/// One machine-readable result row. Optional fields are omitted when absent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub command: String,
    #[serde(rename = "P")]
    pub p: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<SequenceKind>,
    pub delta: u32,
    pub branch: Branch,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<TheoremCase>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period_source: Option<PeriodSource>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<i64>,
    /// Decimal string; exact values can exceed 64 bits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valuation: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valuation_oracle: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub histogram: Option<Histogram>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prediction: Option<PredictionPayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diffs: Option<Vec<ResidueDiff>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alternate_reading_mismatches: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<OmegaSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub differs_from_previous: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identities: Option<Vec<IdentityTally>>,
    pub discrepancy_flags: Vec<DiscrepancyFlag>,
}

/// A single-residue prediction or a full predicted histogram, serialized as
/// `{"residue": {...}}` or `{"histogram": {...}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictionPayload {
    Residue {
        residue: u64,
        #[serde(flatten)]
        prediction: Prediction,
    },
    Histogram(Histogram),
}

impl ReportRow {
    pub fn new(command: &str, params: LucasParams, status: Status) -> Self {
        let profile = lucas3::delta_of(params);
        ReportRow {
            command: command.to_string(),
            p: params.p(),
            k: None,
            kind: None,
            delta: profile.delta,
            branch: profile.branch,
            case: None,
            period: None,
            period_source: None,
            status,
            n: None,
            value: None,
            valuation: None,
            valuation_oracle: None,
            histogram: None,
            prediction: None,
            diffs: None,
            alternate_reading_mismatches: None,
            omega: None,
            differs_from_previous: None,
            identities: None,
            discrepancy_flags: Vec::new(),
        }
    }

    pub fn at(mut self, kind: SequenceKind, k: Option<u32>) -> Self {
        self.kind = Some(kind);
        self.k = k;
        self
    }
}

/// Top-level JSON document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub rows: Vec<ReportRow>,
}
