use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug, Serialize)]
pub struct Entry {
    pub check_id: String,
    /// The claim being checked, as a formula.
    pub paper_anchor: String,
    pub params: Value,
    pub verdict: Verdict,
    pub evidence: Value,
}

impl Entry {
    pub fn new(check_id: &str, anchor: &str, params: Value, pass: bool, evidence: Value) -> Self {
        Entry {
            check_id: check_id.into(),
            paper_anchor: anchor.into(),
            params,
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
            evidence,
        }
    }

    /// Turn an error into a verdict: precision limits are skips, anything
    /// else is a failure.
    pub fn from_error(check_id: &str, anchor: &str, params: Value, err: &qprism::Error) -> Self {
        let (verdict, key) =
            if err.is_precision_limit() { (Verdict::Skip, "insufficient precision") } else { (Verdict::Fail, "error") };
        Entry {
            check_id: check_id.into(),
            paper_anchor: anchor.into(),
            params,
            verdict,
            evidence: json!({ key: err.to_string() }),
        }
    }

    pub fn from_result(check_id: &str, anchor: &str, params: Value, r: qprism::Result<(bool, Value)>) -> Self {
        match r {
            Ok((pass, evidence)) => Entry::new(check_id, anchor, params, pass, evidence),
            Err(e) => Entry::from_error(check_id, anchor, params, &e),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub config: RunConfig,
    pub summary: Summary,
    pub entries: Vec<Entry>,
}

impl Report {
    pub fn new(config: RunConfig, mut entries: Vec<Entry>) -> Self {
        entries.sort_by(|a, b| a.check_id.cmp(&b.check_id));
        let count = |v| entries.iter().filter(|e| e.verdict == v).count();
        let summary = Summary { pass: count(Verdict::Pass), fail: count(Verdict::Fail), skip: count(Verdict::Skip) };
        Report { config, summary, entries }
    }

    pub fn passed(&self) -> bool {
        self.summary.fail == 0
    }
}
