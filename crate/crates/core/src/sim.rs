//! Ground-truth networks and multivariate Poisson count data simulated from
//! them.
//!
//! Counts follow the shared-latent construction `X = BY + E`: every variable
//! owns a private Poisson stream, every edge contributes one shared stream to
//! both endpoints, and noise is i.i.d. Poisson per node and sample. The
//! covariance is then base-plus-couplings on the diagonal (plus noise) and
//! the coupling rate on coupled off-diagonal entries.

use crate::counts::CountMatrix;
use crate::error::{Error, Result};
use crate::stats::{rng_from_seed, SeededRng};
use rand::Rng;
use rand_distr::{Distribution, Poisson};

/// Directed or undirected 0/1 adjacency with zero diagonal.
/// Entry (i, j) = 1 encodes the edge i -> j; undirected graphs keep the
/// matrix symmetric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjacency {
    n: usize,
    directed: bool,
    data: Vec<u8>,
}

impl Adjacency {
    pub fn undirected(n: usize) -> Self {
        Self {
            n,
            directed: false,
            data: vec![0; n * n],
        }
    }

    pub fn directed(n: usize) -> Self {
        Self {
            n,
            directed: true,
            data: vec![0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.data[from * self.n + to] == 1
    }

    /// Add an edge; undirected graphs set both orientations. Self-loops are
    /// rejected.
    pub fn add_edge(&mut self, from: usize, to: usize) -> Result<()> {
        if from == to {
            return Err(Error::InvalidArgument(format!("self-loop at node {from}")));
        }
        if from >= self.n || to >= self.n {
            return Err(Error::VariableOutOfRange {
                index: from.max(to),
                n: self.n,
            });
        }
        self.data[from * self.n + to] = 1;
        if !self.directed {
            self.data[to * self.n + from] = 1;
        }
        Ok(())
    }

    /// Directed edge list in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if self.has_edge(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Unordered pairs (i < j) connected in either direction.
    pub fn undirected_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.has_edge(i, j) || self.has_edge(j, i) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// Simulation parameters; defaults follow the high-signal benchmark setup
/// (unit coupling and base rates, Poisson(0.5) noise).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub t: usize,
    pub er_p: f64,
    pub lambda_edge: f64,
    pub lambda_base: f64,
    pub noise_rate: f64,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(n: usize, t: usize, er_p: f64, seed: u64) -> Result<Self> {
        let cfg = Self {
            n,
            t,
            er_p,
            lambda_edge: 1.0,
            lambda_base: 1.0,
            noise_rate: 0.5,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_rates(
        mut self,
        lambda_edge: f64,
        lambda_base: f64,
        noise_rate: f64,
    ) -> Result<Self> {
        self.lambda_edge = lambda_edge;
        self.lambda_base = lambda_base;
        self.noise_rate = noise_rate;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidArgument("need at least 2 nodes".into()));
        }
        if self.t < 1 {
            return Err(Error::InvalidArgument("need at least 1 sample".into()));
        }
        if !(0.0..=1.0).contains(&self.er_p) {
            return Err(Error::InvalidArgument(format!(
                "edge probability {} not in [0,1]",
                self.er_p
            )));
        }
        for r in [self.lambda_edge, self.lambda_base, self.noise_rate] {
            if !r.is_finite() || r < 0.0 {
                return Err(Error::InvalidRate(r));
            }
        }
        Ok(())
    }
}

/// The mixing matrix `B = [I_n ; pair columns]` with m = n + n(n-1)/2
/// columns. Pair columns are ordered (0,1), (0,2), ..., (n-2,n-1); the
/// column for pair (i, j) is `e_i + e_j` when the edge exists and zero
/// otherwise, so m stays fixed regardless of the edge set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixingMatrix {
    n: usize,
    m: usize,
    data: Vec<u8>,
}

impl MixingMatrix {
    pub fn n_rows(&self) -> usize {
        self.n
    }

    pub fn n_cols(&self) -> usize {
        self.m
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.data[row * self.m + col]
    }

    /// Pair order underlying columns n..m: (0,1), (0,2), ..., (n-2,n-1).
    pub fn pair_for_column(&self, col: usize) -> Option<(usize, usize)> {
        if col < self.n {
            return None;
        }
        let mut k = col - self.n;
        for i in 0..self.n {
            let row_pairs = self.n - i - 1;
            if k < row_pairs {
                return Some((i, i + 1 + k));
            }
            k -= row_pairs;
        }
        None
    }
}

/// Build the mixing matrix for an adjacency (symmetric, zero diagonal).
pub fn build_mixing(adj: &Adjacency) -> MixingMatrix {
    let n = adj.n();
    let m = n + n * (n - 1) / 2;
    let mut data = vec![0u8; n * m];
    for i in 0..n {
        data[i * m + i] = 1;
    }
    let mut col = n;
    for i in 0..n {
        for j in i + 1..n {
            if adj.has_edge(i, j) || adj.has_edge(j, i) {
                data[i * m + col] = 1;
                data[j * m + col] = 1;
            }
            col += 1;
        }
    }
    MixingMatrix { n, m, data }
}

/// Erdos-Renyi graph: each unordered pair is an edge independently with
/// probability p.
pub fn er_graph(n: usize, p: f64, rng: &mut SeededRng) -> Result<Adjacency> {
    if n < 2 {
        return Err(Error::InvalidArgument("need at least 2 nodes".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "edge probability {p} not in [0,1]"
        )));
    }
    let mut adj = Adjacency::undirected(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                adj.add_edge(i, j)?;
            }
        }
    }
    Ok(adj)
}

fn sample_count(rng: &mut SeededRng, dist: &Option<Poisson<f64>>) -> u64 {
    match dist {
        Some(d) => d.sample(rng) as u64,
        None => 0,
    }
}

fn poisson_or_none(rate: f64) -> Option<Poisson<f64>> {
    if rate > 0.0 {
        Some(Poisson::new(rate).expect("positive finite rate"))
    } else {
        None
    }
}

/// Simulate counts `X = BY + E` from an adjacency.
///
/// Private streams are Poisson(lambda_base), each edge's shared stream
/// Poisson(lambda_edge), and noise Poisson(noise_rate) per node and sample.
/// The draw order is fixed (per sample: bases, then edges in pair order,
/// then noise), so identical (config, adj, seed) reproduce identical counts.
pub fn simulate(config: &SimConfig, adj: &Adjacency) -> Result<CountMatrix> {
    config.validate()?;
    if adj.n() != config.n {
        return Err(Error::SizeMismatch(adj.n(), config.n));
    }
    let n = config.n;
    let t = config.t;
    let mut rng = rng_from_seed(config.seed);
    let base = poisson_or_none(config.lambda_base);
    let edge = poisson_or_none(config.lambda_edge);
    let noise = poisson_or_none(config.noise_rate);
    let pairs = adj.undirected_pairs();

    let mut rows = vec![vec![0u64; t]; n];
    for s in 0..t {
        for row in rows.iter_mut() {
            row[s] = sample_count(&mut rng, &base);
        }
        for &(i, j) in &pairs {
            let y = sample_count(&mut rng, &edge);
            rows[i][s] += y;
            rows[j][s] += y;
        }
        for row in rows.iter_mut() {
            row[s] += sample_count(&mut rng, &noise);
        }
    }
    let labels = (1..=n).map(|i| i.to_string()).collect();
    CountMatrix::from_rows(rows)?.with_labels(labels)
}
