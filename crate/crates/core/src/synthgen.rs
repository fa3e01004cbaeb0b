//! Synthetic benchmark: a chain of coupled two-channel delayed stochastic
//! equations with a known (tridiagonal) interaction graph.
//!
//! For vertex `i` the drift is
//!
//! ```text
//! B1 Y_i(t - h) + B2 Y_{i-1}(t - h) - B2 Y_{i+1}(t - h),
//! B1 = [[1, c], [c, 1]],  B2 = c I
//! ```
//!
//! with the missing neighbour term dropped at both ends of the chain. Paths are
//! integrated by Euler-Maruyama with `sqrt(dt)`-scaled Gaussian noise and a
//! constant pre-history `Y_i(t) = Y_i(0)` for `t < 0`.

use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Result};
use crate::rng::Substream;
use crate::scalar::Real;
use crate::timeseries::{MultivariatePath, TimeGrid};

pub const CHANNELS: usize = 2;

#[derive(Clone, Debug, PartialEq)]
pub struct SynthConfig<T> {
    pub n: usize,
    /// Coupling; must be non-zero.
    pub c: T,
    /// Noise standard deviation.
    pub sigma: T,
    /// Standard deviation of `Y_1(0)`.
    pub sigma_start: T,
    /// Delay, an integer multiple of `dt`.
    pub h: T,
    pub dt: T,
    /// Simulated interval is `[0, horizon]`.
    pub horizon: T,
    pub seed: u64,
}

impl<T: Real> Default for SynthConfig<T> {
    fn default() -> Self {
        Self {
            n: 5,
            c: T::from_f64_lossy(2.0),
            sigma: T::from_f64_lossy(0.05),
            sigma_start: T::one(),
            h: T::from_f64_lossy(0.05),
            dt: T::from_f64_lossy(0.01),
            horizon: T::one(),
            seed: 0,
        }
    }
}

fn integral_ratio<T: Real>(num: T, den: T, what: &str) -> Result<usize> {
    let q = num / den;
    let r = q.round();
    let slack = T::from_f64_lossy(1e-9) * T::one().max(q.abs());
    if (q - r).abs() > slack || r < T::zero() {
        return invalid(format!("{what} must be a non-negative integer multiple of dt"));
    }
    Ok(r.to_usize().expect("checked non-negative and integral"))
}

impl<T: Real> SynthConfig<T> {
    /// Returns `(steps, delay_steps)`.
    pub fn validate(&self) -> Result<(usize, usize)> {
        if self.n < 2 {
            return invalid(format!("need at least 2 vertices, got {}", self.n));
        }
        if self.c == T::zero() || !self.c.is_finite() {
            return invalid("coupling c must be a non-zero real (c ∈ ℝ*)");
        }
        if !(self.sigma >= T::zero()) || !(self.sigma_start >= T::zero()) {
            return invalid("sigma and sigma_start must be non-negative");
        }
        if !(self.dt > T::zero()) || !(self.horizon > T::zero()) {
            return invalid("dt and horizon must be positive");
        }
        if !(self.h >= T::zero()) {
            return invalid("delay h must be non-negative");
        }
        let steps = integral_ratio(self.horizon, self.dt, "horizon")?;
        let delay = integral_ratio(self.h, self.dt, "delay h")?;
        Ok((steps, delay))
    }

    pub fn grid(&self) -> Result<TimeGrid<T>> {
        let (steps, _) = self.validate()?;
        TimeGrid::uniform(T::zero(), self.horizon, steps)
    }
}

pub fn vertex_label(i: usize, n: usize) -> String {
    let width = n.to_string().len();
    format!("Y{:0width$}", i + 1)
}

/// Simulate with the `"generate"` substream of `cfg.seed`.
pub fn simulate_dataset<T: Real>(cfg: &SynthConfig<T>) -> Result<Vec<MultivariatePath<T>>> {
    simulate_with_stream(cfg, Substream::root(cfg.seed).named("generate"))
}

pub fn simulate_with_stream<T: Real>(cfg: &SynthConfig<T>, stream: Substream) -> Result<Vec<MultivariatePath<T>>> {
    let (steps, delay) = cfg.validate()?;
    let grid = TimeGrid::uniform(T::zero(), cfg.horizon, steps)?;
    let mut rng = stream.rng();
    let mut normal = || -> T { T::from_f64_lossy(StandardNormal.sample(&mut rng)) };

    let n = cfg.n;
    let c = cfg.c;
    let sqrt_dt = cfg.dt.sqrt();
    // state[i][s] = [x, y] of vertex i at step s
    let mut state = vec![vec![[T::zero(); CHANNELS]; steps + 1]; n];
    state[0][0] = [cfg.sigma_start * normal(), cfg.sigma_start * normal()];

    for s in 0..steps {
        let lagged = s.saturating_sub(delay);
        for i in 0..n {
            let own = state[i][lagged];
            let mut drift = [own[0] + c * own[1], c * own[0] + own[1]];
            if i > 0 {
                let prev = state[i - 1][lagged];
                drift[0] += c * prev[0];
                drift[1] += c * prev[1];
            }
            if i + 1 < n {
                let next = state[i + 1][lagged];
                drift[0] -= c * next[0];
                drift[1] -= c * next[1];
            }
            let cur = state[i][s];
            let noise = [cfg.sigma * sqrt_dt * normal(), cfg.sigma * sqrt_dt * normal()];
            state[i][s + 1] = [cur[0] + cfg.dt * drift[0] + noise[0], cur[1] + cfg.dt * drift[1] + noise[1]];
        }
    }

    state
        .into_iter()
        .enumerate()
        .map(|(i, rows)| {
            MultivariatePath::new(vertex_label(i, n), grid.clone(), rows.into_iter().flatten().collect(), CHANNELS)
        })
        .collect()
}

/// Two identical Brownian paths (vertices 0 and 1) followed by `noise`
/// independent Brownian paths, all two-channel on the grid of `cfg` with
/// per-step standard deviation `sigma * sqrt(dt)`. Only `dt`, `horizon` and
/// `sigma` of `cfg` are used.
pub fn planted_duplicate_dataset<T: Real>(
    cfg: &SynthConfig<T>,
    noise: usize,
    stream: Substream,
) -> Result<Vec<MultivariatePath<T>>> {
    let (steps, _) = cfg.validate()?;
    if !(cfg.sigma > T::zero()) {
        return invalid("planted duplicate data needs sigma > 0");
    }
    let grid = TimeGrid::uniform(T::zero(), cfg.horizon, steps)?;
    let mut rng = stream.rng();
    let scale = cfg.sigma * cfg.dt.sqrt();
    let n = noise + 2;
    let mut walk = |label: String| {
        let mut values = vec![T::zero(); (steps + 1) * CHANNELS];
        for s in 1..=steps {
            for ch in 0..CHANNELS {
                let z: f64 = StandardNormal.sample(&mut rng);
                values[s * CHANNELS + ch] = values[(s - 1) * CHANNELS + ch] + scale * T::from_f64_lossy(z);
            }
        }
        MultivariatePath::new(label, grid.clone(), values, CHANNELS)
    };
    let base = walk(vertex_label(0, n))?;
    let mut out = vec![base.clone(), base.with_label(vertex_label(1, n))];
    for i in 2..n {
        out.push(walk(vertex_label(i, n))?);
    }
    Ok(out)
}

/// Known interaction graph: off-diagonal 0/1 adjacency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundTruth {
    adjacency: Vec<Vec<u8>>,
}

impl GroundTruth {
    /// Build from an undirected edge list over `0..n`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![vec![0u8; n]; n];
        for &(i, j) in edges {
            if i >= n || j >= n {
                return invalid(format!("edge ({i}, {j}) out of range for n = {n}"));
            }
            if i == j {
                return invalid(format!("self-loop ({i}, {i}) not representable"));
            }
            adjacency[i][j] = 1;
            adjacency[j][i] = 1;
        }
        Ok(Self { adjacency })
    }

    /// From a dense matrix; must be square, symmetric 0/1. The diagonal is ignored.
    pub fn from_matrix(matrix: Vec<Vec<u8>>) -> Result<Self> {
        let n = matrix.len();
        if matrix.iter().any(|r| r.len() != n) {
            return invalid("adjacency matrix must be square");
        }
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if matrix[i][j] > 1 {
                    return invalid("adjacency entries must be 0 or 1");
                }
                if matrix[i][j] != matrix[j][i] {
                    return invalid(format!("adjacency not symmetric at ({i}, {j})"));
                }
                if i < j && matrix[i][j] == 1 {
                    edges.push((i, j));
                }
            }
        }
        Self::from_edges(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn adjacency(&self) -> &[Vec<u8>] {
        &self.adjacency
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i][j] == 1
    }

    /// Edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| self.has_edge(i, j)).collect()
    }
}

/// The chain `0 - 1 - ... - (n-1)`.
pub fn ground_truth_adjacency(n: usize) -> Result<GroundTruth> {
    if n < 2 {
        return invalid(format!("need at least 2 vertices, got {n}"));
    }
    let edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    GroundTruth::from_edges(n, &edges)
}
