//! Greedy information-flow network inference.
//!
//! Per target: forward selection repeatedly picks the candidate with the
//! largest conditional mutual information given the already-selected parents
//! and admits it if a permutation (shuffle) test deems it significant;
//! a single backward pass then re-tests every selected parent given the rest
//! and drops the insignificant ones. The CMI estimator is pluggable: the
//! Poisson approximation or the Gaussian log-det baseline.
//!
//! An optional one-step lag mode shifts all sources one step back relative
//! to the target and forces the target's own past into the condition set,
//! which turns the selected quantity into a transfer/causation entropy.
//!
//! Shuffle randomness is drawn from substreams keyed by (seed, phase,
//! unordered label pair), so results are independent of target evaluation
//! order, stable under parallel execution, and equivariant under variable
//! relabeling.

use crate::counts::CountMatrix;
use crate::entropy::{mutual_information_poisson, TruncationPolicy};
use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::rates::partial_correlation_rows;
use crate::sim::Adjacency;
use crate::stats::{fnv1a64, substream, SeededRng};
use rand::seq::SliceRandom;
use rayon::prelude::*;

const PHASE_FORWARD: u64 = 1;
const PHASE_BACKWARD: u64 = 2;

/// Which CMI estimator drives the selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorKind {
    Poisson,
    Gaussian,
}

impl std::fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EstimatorKind::Poisson => write!(f, "poisson"),
            EstimatorKind::Gaussian => write!(f, "gaussian"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InferenceConfig {
    pub estimator: EstimatorKind,
    pub alpha: f64,
    pub n_shuffles: usize,
    pub lag: u8,
    pub max_parents: Option<usize>,
    pub seed: u64,
    pub policy: TruncationPolicy,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        Self {
            estimator: EstimatorKind::Poisson,
            alpha: 0.05,
            n_shuffles: 200,
            lag: 0,
            max_parents: None,
            seed: 0,
            policy: TruncationPolicy::default(),
        }
    }
}

impl InferenceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha {} not in (0,1)",
                self.alpha
            )));
        }
        if self.n_shuffles < 20 {
            return Err(Error::InvalidArgument(format!(
                "need at least 20 shuffles, got {}",
                self.n_shuffles
            )));
        }
        if self.lag > 1 {
            return Err(Error::InvalidArgument(format!(
                "lag must be 0 or 1, got {}",
                self.lag
            )));
        }
        Ok(())
    }
}

/// One accepted edge `source -> target`.
///
/// `cmi` and `p_value` come from the final (backward) test of the parent
/// given the rest of the retained set; `order_added` is the 1-based position
/// in the forward acceptance sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRecord {
    pub source: usize,
    pub target: usize,
    pub cmi: f64,
    pub p_value: f64,
    pub order_added: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    ForwardAccept,
    ForwardReject,
    BackwardKeep,
    BackwardRemove,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub kind: StepKind,
    pub candidate: usize,
    pub cmi: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InferenceResult {
    /// Directed adjacency; entry (j, i) set means j is a parent of target i.
    pub adjacency: Adjacency,
    /// Accepted edges ordered by (target, order_added).
    pub edges: Vec<EdgeRecord>,
    /// Per-target forward/backward decision log.
    pub traces: Vec<Vec<TraceStep>>,
}

/// Row views and keying data shared by all per-target runs.
struct Engine<'a> {
    /// Source rows (shifted one step back in lag mode).
    sources: Vec<Vec<f64>>,
    /// Target rows (shifted one step forward in lag mode; aliases of the
    /// sources otherwise).
    targets: Vec<Vec<f64>>,
    label_hash: Vec<u64>,
    cfg: &'a InferenceConfig,
}

fn variance_is_zero(row: &[f64]) -> bool {
    row.iter().all(|&v| v == row[0])
}

fn sample_covariance(rows: &[&[f64]]) -> SquareMatrix {
    let k = rows.len();
    let t = rows[0].len() as f64;
    let means: Vec<f64> = rows.iter().map(|r| r.iter().sum::<f64>() / t).collect();
    SquareMatrix::from_fn(k, |a, b| {
        rows[a]
            .iter()
            .zip(rows[b])
            .map(|(&x, &y)| (x - means[a]) * (y - means[b]))
            .sum::<f64>()
            / t
    })
}

impl<'a> Engine<'a> {
    fn new(counts: &CountMatrix, cfg: &'a InferenceConfig) -> Result<Self> {
        cfg.validate()?;
        let n = counts.n_vars();
        let t = counts.n_samples();
        let min_t = if cfg.lag == 1 { 3 } else { 2 };
        if t < min_t {
            return Err(Error::TooFewSamples {
                needed: min_t,
                got: t,
            });
        }
        let full = counts.to_f64_rows();
        let (sources, targets) = if cfg.lag == 1 {
            let sources: Vec<Vec<f64>> = full.iter().map(|r| r[..t - 1].to_vec()).collect();
            let targets: Vec<Vec<f64>> = full.iter().map(|r| r[1..].to_vec()).collect();
            (sources, targets)
        } else {
            (full.clone(), full)
        };
        let label_hash = (0..n)
            .map(|i| fnv1a64(counts.label(i).as_bytes()))
            .collect();
        Ok(Self {
            sources,
            targets,
            label_hash,
            cfg,
        })
    }

    fn n(&self) -> usize {
        self.sources.len()
    }

    fn cmi(&self, x: &[f64], y: &[f64], cond: &[&[f64]]) -> Result<f64> {
        if variance_is_zero(x) || variance_is_zero(y) {
            return Ok(0.0);
        }
        match self.cfg.estimator {
            EstimatorKind::Poisson => {
                let coupling = partial_correlation_rows(x, y, cond).max(0.0);
                let base = 1.0 - coupling;
                mutual_information_poisson(base, base, coupling, &self.cfg.policy)
            }
            EstimatorKind::Gaussian => {
                let mut rows: Vec<&[f64]> = Vec::with_capacity(2 + cond.len());
                rows.push(x);
                rows.push(y);
                rows.extend_from_slice(cond);
                let cov = sample_covariance(&rows);
                let s: Vec<usize> = (2..rows.len()).collect();
                crate::entropy::gaussian_cmi(0, 1, &s, &cov)
            }
        }
    }

    /// Permutation test with a precomputed observed statistic: permute the
    /// source row, recompute the CMI, and count null values at or above the
    /// observed one. The +1 smoothing keeps the p-value strictly positive.
    fn shuffle_p_value(
        &self,
        observed: f64,
        x: &[f64],
        y: &[f64],
        cond: &[&[f64]],
        rng: &mut SeededRng,
    ) -> Result<f64> {
        let mut scratch = x.to_vec();
        let mut at_least = 0usize;
        for _ in 0..self.cfg.n_shuffles {
            scratch.shuffle(rng);
            if self.cmi(&scratch, y, cond)? >= observed {
                at_least += 1;
            }
        }
        Ok((1 + at_least) as f64 / (1 + self.cfg.n_shuffles) as f64)
    }

    fn pair_rng(&self, phase: u64, a: usize, b: usize) -> SeededRng {
        let (ha, hb) = (self.label_hash[a], self.label_hash[b]);
        substream(self.cfg.seed, &[phase, ha.min(hb), ha.max(hb)])
    }

    /// Gather condition rows: forced target history (lag mode) plus the
    /// currently selected parents.
    fn condition_rows<'b>(&'b self, target: usize, selected: &[usize]) -> Vec<&'b [f64]> {
        let mut cond: Vec<&[f64]> = Vec::with_capacity(selected.len() + 1);
        if self.cfg.lag == 1 {
            cond.push(&self.sources[target]);
        }
        cond.extend(selected.iter().map(|&s| self.sources[s].as_slice()));
        cond
    }

    fn forward(&self, target: usize) -> Result<(Vec<usize>, Vec<TraceStep>)> {
        let n = self.n();
        let y = &self.targets[target];
        let cap = self.cfg.max_parents.unwrap_or(n - 1).min(n - 1);
        let mut selected: Vec<usize> = Vec::new();
        let mut trace = Vec::new();
        while selected.len() < cap {
            let cond = self.condition_rows(target, &selected);
            let mut best: Option<(usize, f64)> = None;
            for j in 0..n {
                if j == target || selected.contains(&j) {
                    continue;
                }
                let value = self.cmi(&self.sources[j], y, &cond)?;
                // strict comparison: ties go to the lowest index
                if best.is_none_or(|(_, b)| value > b) {
                    best = Some((j, value));
                }
            }
            let Some((j_star, observed)) = best else {
                break;
            };
            let mut rng = self.pair_rng(PHASE_FORWARD, j_star, target);
            let p = self.shuffle_p_value(observed, &self.sources[j_star], y, &cond, &mut rng)?;
            if p <= self.cfg.alpha {
                trace.push(TraceStep {
                    kind: StepKind::ForwardAccept,
                    candidate: j_star,
                    cmi: observed,
                    p_value: p,
                });
                selected.push(j_star);
            } else {
                trace.push(TraceStep {
                    kind: StepKind::ForwardReject,
                    candidate: j_star,
                    cmi: observed,
                    p_value: p,
                });
                break;
            }
        }
        Ok((selected, trace))
    }

    /// Single elimination pass in ascending index order, conditioning each
    /// parent on the currently retained rest. Returns the kept parents, the
    /// decision trace, and the final (cmi, p) stats of the survivors.
    #[allow(clippy::type_complexity)]
    fn backward(
        &self,
        target: usize,
        selected: &[usize],
    ) -> Result<(Vec<usize>, Vec<TraceStep>, Vec<(f64, f64)>)> {
        let y = &self.targets[target];
        let mut kept: Vec<usize> = selected.to_vec();
        let mut trace = Vec::new();
        let mut stats: Vec<(usize, f64, f64)> = Vec::new();
        let mut order: Vec<usize> = selected.to_vec();
        order.sort_unstable();
        for j in order {
            let rest: Vec<usize> = kept.iter().copied().filter(|&k| k != j).collect();
            let cond = self.condition_rows(target, &rest);
            let observed = self.cmi(&self.sources[j], y, &cond)?;
            let mut rng = self.pair_rng(PHASE_BACKWARD, j, target);
            let p = self.shuffle_p_value(observed, &self.sources[j], y, &cond, &mut rng)?;
            if p <= self.cfg.alpha {
                trace.push(TraceStep {
                    kind: StepKind::BackwardKeep,
                    candidate: j,
                    cmi: observed,
                    p_value: p,
                });
                stats.push((j, observed, p));
            } else {
                trace.push(TraceStep {
                    kind: StepKind::BackwardRemove,
                    candidate: j,
                    cmi: observed,
                    p_value: p,
                });
                kept.retain(|&k| k != j);
            }
        }
        // report stats in forward acceptance order of the survivors
        let final_stats: Vec<(f64, f64)> = kept
            .iter()
            .map(|&j| {
                let (_, c, p) = *stats
                    .iter()
                    .find(|(k, _, _)| *k == j)
                    .expect("kept has stats");
                (c, p)
            })
            .collect();
        Ok((kept, trace, final_stats))
    }

    fn infer_target(&self, target: usize) -> Result<(Vec<EdgeRecord>, Vec<TraceStep>)> {
        let (selected, mut trace) = self.forward(target)?;
        let (kept, back_trace, stats) = self.backward(target, &selected)?;
        trace.extend(back_trace);
        let edges = kept
            .iter()
            .zip(stats)
            .map(|(&source, (cmi, p_value))| EdgeRecord {
                source,
                target,
                cmi,
                p_value,
                // position in the forward acceptance sequence
                order_added: selected
                    .iter()
                    .position(|&s| s == source)
                    .expect("selected")
                    + 1,
            })
            .collect();
        Ok((edges, trace))
    }
}

fn check_target(target: usize, n: usize) -> Result<()> {
    if target >= n {
        return Err(Error::VariableOutOfRange { index: target, n });
    }
    Ok(())
}

/// Forward selection for one target: the candidate parent set in acceptance
/// order, with the decision trace.
pub fn forward_select(
    target: usize,
    counts: &CountMatrix,
    config: &InferenceConfig,
) -> Result<(Vec<usize>, Vec<TraceStep>)> {
    check_target(target, counts.n_vars())?;
    Engine::new(counts, config)?.forward(target)
}

/// Backward elimination of a previously selected parent set; returns the
/// retained parents (in the order given).
pub fn backward_eliminate(
    target: usize,
    selected: &[usize],
    counts: &CountMatrix,
    config: &InferenceConfig,
) -> Result<Vec<usize>> {
    check_target(target, counts.n_vars())?;
    let engine = Engine::new(counts, config)?;
    let (kept, _, _) = engine.backward(target, selected)?;
    Ok(kept)
}

/// Shuffle significance test for `j -> target` given a condition set, using
/// the caller's generator: observed CMI, then a permutation null from
/// shuffling row j.
pub fn shuffle_test(
    j: usize,
    target: usize,
    condition: &[usize],
    counts: &CountMatrix,
    config: &InferenceConfig,
    rng: &mut SeededRng,
) -> Result<(f64, f64)> {
    let n = counts.n_vars();
    check_target(target, n)?;
    check_target(j, n)?;
    if j == target || condition.contains(&j) || condition.contains(&target) {
        return Err(Error::ConditionSetOverlap { x: j, y: target });
    }
    let engine = Engine::new(counts, config)?;
    let cond = engine.condition_rows(target, condition);
    let observed = engine.cmi(&engine.sources[j], &engine.targets[target], &cond)?;
    let p = engine.shuffle_p_value(
        observed,
        &engine.sources[j],
        &engine.targets[target],
        &cond,
        rng,
    )?;
    Ok((observed, p))
}

/// Run forward selection and backward elimination for every target.
///
/// Targets are independent and processed in parallel; the output is
/// identical to serial execution because all shuffle randomness comes from
/// per-pair substreams.
pub fn infer_network(counts: &CountMatrix, config: &InferenceConfig) -> Result<InferenceResult> {
    let engine = Engine::new(counts, config)?;
    let n = engine.n();
    let per_target: Vec<Result<(Vec<EdgeRecord>, Vec<TraceStep>)>> = (0..n)
        .into_par_iter()
        .map(|target| engine.infer_target(target))
        .collect();

    let mut adjacency = Adjacency::directed(n);
    let mut edges = Vec::new();
    let mut traces = Vec::with_capacity(n);
    for outcome in per_target {
        let (target_edges, trace) = outcome?;
        for e in &target_edges {
            adjacency.add_edge(e.source, e.target)?;
        }
        edges.extend(target_edges);
        traces.push(trace);
    }
    Ok(InferenceResult {
        adjacency,
        edges,
        traces,
    })
}
