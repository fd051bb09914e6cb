//! Machine-readable JSON report emitted by `infer`.
//!
//! Field names are stable; collections are ordered (no maps), so reruns with
//! the same seed are byte-identical.

use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct Report {
    pub config: ConfigEcho,
    pub input: InputSummary,
    pub preprocess: PreprocessSummary,
    pub screening: Option<ScreeningSummary>,
    pub network: NetworkSummary,
    pub centrality: CentralitySummary,
    pub outputs: Outputs,
}

#[derive(Debug, Serialize)]
pub struct ConfigEcho {
    pub input: String,
    pub min_total_count: u64,
    pub scale: bool,
    pub screen: String,
    pub estimator: String,
    pub alpha: f64,
    pub shuffles: usize,
    pub lag: u8,
    pub max_parents: Option<usize>,
    pub seed: u64,
}

#[derive(Debug, Serialize)]
pub struct InputSummary {
    pub variables: usize,
    pub samples: usize,
}

#[derive(Debug, Serialize)]
pub struct PreprocessSummary {
    /// Stage order applied to the input.
    pub order: Vec<String>,
    pub rows_in: usize,
    pub rows_kept: usize,
    pub dropped: Vec<String>,
    pub scaled: bool,
}

#[derive(Debug, Serialize)]
pub struct ScreeningSummary {
    pub method: String,
    pub alpha: f64,
    pub flagged: usize,
    pub records: Vec<ScreenRecord>,
}

#[derive(Debug, Serialize)]
pub struct ScreenRecord {
    pub label: String,
    pub statistic: f64,
    pub p_value: f64,
    pub params: FittedParams,
    pub flagged: bool,
}

#[derive(Debug, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FittedParams {
    Poisson { lambda: f64 },
    NegBinomial { r: f64, lambda: f64 },
}

#[derive(Debug, Serialize)]
pub struct NetworkSummary {
    pub nodes: usize,
    pub edges: usize,
    pub component_sizes: Vec<usize>,
    pub lwcc_size: usize,
}

#[derive(Debug, Serialize)]
pub struct CentralitySummary {
    pub out_degree_top: Vec<RankedNode>,
    pub betweenness_top: Vec<RankedNode>,
    /// Absent when the largest weakly connected component has no edges.
    pub eigenvector_top: Option<Vec<RankedNode>>,
}

#[derive(Debug, Serialize)]
pub struct RankedNode {
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Serialize)]
pub struct Outputs {
    pub edges_csv: String,
    pub report_json: String,
}
