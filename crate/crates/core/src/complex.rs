//! Simplicial complexes inferred from signature regressions.
//!
//! For every vertex `v_i` and every `k < K`, the flattened signature of
//! `v_i` is regressed (LASSO) on the flattened signatures of all joint paths
//! built from `k` other vertices. Subsets with a non-zero coefficient form the
//! `k`-link of `v_i` when the regression clears the R² gate, and each link
//! member joined with `v_i` is inserted into the complex with all its faces.
//!
//! Repeating the inference on random subsets of sampling times and averaging
//! the hyper-adjacency indicators gives per-hyperedge inclusion frequencies
//! ([`ProbabilityTensors`]), which [`threshold_complex`] turns back into a
//! single complex.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use itertools::Itertools;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::lasso::{lasso_fit, Design, LassoConfig, LassoFit, Penalty, R2Source};
use crate::rng::Substream;
use crate::scalar::Real;
use crate::signature::{joint_path, path_signature};
use crate::timeseries::{harmonize, Coherence, MultivariatePath, TimeGrid};

/// Sorted set of distinct vertex indices; `k + 1` vertices for a `k`-simplex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    pub fn new(mut vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return invalid("a simplex needs at least one vertex");
        }
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return invalid(format!("simplex vertices must be distinct: {vertices:?}"));
        }
        Ok(Self(vertices))
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All non-empty subsets, including the simplex itself.
    pub fn faces(&self) -> impl Iterator<Item = Simplex> + '_ {
        let m = self.0.len();
        (1u64..(1u64 << m)).map(move |mask| Simplex((0..m).filter(|b| mask >> b & 1 == 1).map(|b| self.0[b]).collect()))
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0.iter().map(|v| format!("v{}", v + 1)).join(" "))
    }
}

/// Downward-closed family of simplices over vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    n: usize,
    simplices: BTreeSet<Simplex>,
}

const MAX_SIMPLEX_LEN: usize = 24;

impl SimplicialComplex {
    /// The complex holding only the `n` vertices.
    pub fn new(n: usize) -> Self {
        Self { n, simplices: (0..n).map(|v| Simplex(vec![v])).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.simplices.contains(s)
    }

    pub fn simplices(&self) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter()
    }

    pub fn simplices_of_dim(&self, dim: usize) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter().filter(move |s| s.dim() == dim)
    }

    /// 1-simplices as sorted vertex pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.simplices_of_dim(1).map(|s| (s.0[0], s.0[1])).collect()
    }

    /// Insert `simplex` and every non-empty face of it.
    pub fn insert_with_closure(&mut self, simplex: &Simplex) -> Result<()> {
        if let Some(&v) = simplex.0.iter().find(|&&v| v >= self.n) {
            return invalid(format!("vertex {v} out of range for complex on {} vertices", self.n));
        }
        if simplex.len() > MAX_SIMPLEX_LEN {
            return invalid(format!("simplex with {} vertices exceeds supported size", simplex.len()));
        }
        if self.simplices.contains(simplex) {
            return Ok(());
        }
        for face in simplex.faces() {
            self.simplices.insert(face);
        }
        Ok(())
    }

    /// Exhaustive check that every face of every member is a member.
    pub fn is_downward_closed(&self) -> bool {
        (0..self.n).all(|v| self.simplices.contains(&Simplex(vec![v])))
            && self.simplices.iter().all(|s| s.faces().all(|f| self.simplices.contains(&f)))
    }

    /// Dense 0/1 adjacency matrix of the 1-skeleton.
    pub fn adjacency_matrix(&self) -> Vec<Vec<u8>> {
        let mut a = vec![vec![0u8; self.n]; self.n];
        for (i, j) in self.edges() {
            a[i][j] = 1;
            a[j][i] = 1;
        }
        a
    }
}

/// Order-`i` hyper-adjacency tensor: entry 1 at every permutation of the
/// vertex tuple of each `(i - 1)`-simplex. Stored on sorted tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperAdjacencyTensor {
    order: usize,
    n: usize,
    tuples: BTreeSet<Vec<usize>>,
}

impl HyperAdjacencyTensor {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Value at an arbitrary (unsorted) index tuple.
    pub fn get(&self, index: &[usize]) -> u8 {
        if index.len() != self.order {
            return 0;
        }
        let mut key = index.to_vec();
        key.sort_unstable();
        u8::from(self.tuples.contains(&key))
    }

    pub fn sorted_tuples(&self) -> impl Iterator<Item = &[usize]> {
        self.tuples.iter().map(Vec::as_slice)
    }

    /// Every index tuple holding a 1, permutations included.
    pub fn nonzero_entries(&self) -> Vec<Vec<usize>> {
        self.tuples.iter().flat_map(|t| t.iter().copied().permutations(t.len())).collect()
    }

    pub fn to_matrix(&self) -> Option<Vec<Vec<u8>>> {
        (self.order == 2).then(|| {
            let mut m = vec![vec![0u8; self.n]; self.n];
            for t in &self.tuples {
                m[t[0]][t[1]] = 1;
                m[t[1]][t[0]] = 1;
            }
            m
        })
    }
}

pub fn hyper_adjacency(complex: &SimplicialComplex, order: usize) -> Result<HyperAdjacencyTensor> {
    if order < 2 || order > complex.n {
        return invalid(format!("tensor order {order} outside 2..={}", complex.n));
    }
    let tuples = complex.simplices.iter().filter(|s| s.len() == order).map(|s| s.0.clone()).collect();
    Ok(HyperAdjacencyTensor { order, n: complex.n, tuples })
}

/// Hyper-parameters of the inference.
#[derive(Clone, Debug, PartialEq)]
pub struct InferenceConfig<T> {
    /// Signature truncation order.
    pub order: usize,
    /// Largest simplex size; links of dimension `1..K` are predicted.
    pub k_max: usize,
    pub penalty: Penalty<T>,
    /// Links are kept only when the regression R² is strictly above this.
    pub r2_threshold: T,
    pub coherence: Coherence,
    pub eps_nz: T,
    pub tol: T,
    pub max_iter: usize,
    pub r2_source: R2Source,
    /// Multiply signature level `k` by `k!` before regression.
    pub factorial_rescale: bool,
}

impl<T: Real> Default for InferenceConfig<T> {
    fn default() -> Self {
        let lasso = LassoConfig::<T>::default();
        Self {
            order: 3,
            k_max: 2,
            penalty: lasso.penalty,
            r2_threshold: T::from_f64_lossy(0.67),
            coherence: Coherence::Strict,
            eps_nz: lasso.eps_nz,
            tol: lasso.tol,
            max_iter: lasso.max_iter,
            r2_source: lasso.r2_source,
            factorial_rescale: false,
        }
    }
}

impl<T: Real> InferenceConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.order == 0 {
            return invalid("signature order must be at least 1");
        }
        if self.k_max < 2 {
            return invalid("K must be at least 2");
        }
        if !(self.r2_threshold > T::zero() && self.r2_threshold < T::one()) {
            return invalid("R² threshold must lie in (0, 1)");
        }
        Ok(())
    }

    fn lasso(&self) -> LassoConfig<T> {
        LassoConfig {
            penalty: self.penalty,
            tol: self.tol,
            max_iter: self.max_iter,
            eps_nz: self.eps_nz,
            r2_source: self.r2_source,
            record_objective: false,
        }
    }
}

/// Outcome of one link regression.
#[derive(Clone, Debug)]
pub struct LinkPrediction<T> {
    /// Link members, each a `(k - 1)`-simplex of other vertices.
    pub members: BTreeSet<Simplex>,
    /// Candidate subsets, in design-column order.
    pub candidates: Vec<Simplex>,
    pub fit: LassoFit<T>,
    pub gate_passed: bool,
}

/// Vertices prepared for regression plus memoised subset features.
struct Workspace<'a, T> {
    vertices: Vec<MultivariatePath<T>>,
    cfg: &'a InferenceConfig<T>,
    features: HashMap<Vec<usize>, Vec<T>>,
}

impl<'a, T: Real> Workspace<'a, T> {
    fn new(vertices: &[MultivariatePath<T>], cfg: &'a InferenceConfig<T>) -> Result<Self> {
        cfg.validate()?;
        if vertices.len() < 2 {
            return invalid(format!("need at least 2 vertices, got {}", vertices.len()));
        }
        let (a, b) = (vertices[0].grid().start(), vertices[0].grid().end());
        if let Some(v) = vertices.iter().find(|v| v.grid().start() != a || v.grid().end() != b) {
            return invalid(format!("vertex `{}` is not defined on [{a:?}, {b:?}]", v.label()));
        }
        Ok(Self { vertices: harmonize(vertices, cfg.coherence)?, cfg, features: HashMap::new() })
    }

    fn flatten(&self, path: &MultivariatePath<T>) -> Result<Vec<T>> {
        let sig = path_signature(path, self.cfg.order)?;
        Ok(if self.cfg.factorial_rescale { sig.flatten_factorial_scaled() } else { sig.flatten() })
    }

    fn subset_features(&mut self, subset: &[usize]) -> Result<&[T]> {
        if !self.features.contains_key(subset) {
            let members: Vec<&MultivariatePath<T>> = subset.iter().map(|&j| &self.vertices[j]).collect();
            let f = self.flatten(&joint_path(&members)?)?;
            self.features.insert(subset.to_vec(), f);
        }
        Ok(&self.features[subset])
    }

    fn response_features(&self, i: usize, k: usize) -> Result<Vec<T>> {
        let v = &self.vertices[i];
        self.flatten(&v.zero_pad_augment(k * v.dim())?)
    }

    fn predict(&mut self, i: usize, k: usize) -> Result<LinkPrediction<T>> {
        let n = self.vertices.len();
        if i >= n {
            return invalid(format!("vertex index {i} out of range for {n} vertices"));
        }
        if k == 0 || k >= n {
            return invalid(format!("link dimension k = {k} must satisfy 1 <= k <= n - 1 = {}", n - 1));
        }
        let response = self.response_features(i, k)?;
        let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        let mut candidates = Vec::new();
        let mut columns = Vec::new();
        for subset in others.into_iter().combinations(k) {
            columns.push(self.subset_features(&subset)?.to_vec());
            candidates.push(Simplex(subset));
        }
        let labels = candidates.iter().map(Simplex::to_string).collect();
        let design = Design::new(columns, response)?.with_labels(labels)?;
        let fit = lasso_fit(&design, &self.cfg.lasso())?;
        let gate_passed = !fit.degenerate && fit.r2 > self.cfg.r2_threshold;
        let members =
            if gate_passed { fit.support.iter().map(|&j| candidates[j].clone()).collect() } else { BTreeSet::new() };
        Ok(LinkPrediction { members, candidates, fit, gate_passed })
    }
}

/// Predict the `k`-dimensional link of vertex `i`.
pub fn predict_k_link<T: Real>(
    vertices: &[MultivariatePath<T>],
    i: usize,
    k: usize,
    cfg: &InferenceConfig<T>,
) -> Result<LinkPrediction<T>> {
    Workspace::new(vertices, cfg)?.predict(i, k)
}

/// Counters gathered while inferring a complex.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct InferenceStats {
    pub regressions: usize,
    pub gates_passed: usize,
    pub non_converged: usize,
}

/// Union over all vertices and all `k < K` of `{v_i} ∪ link member`.
pub fn infer_complex<T: Real>(vertices: &[MultivariatePath<T>], cfg: &InferenceConfig<T>) -> Result<SimplicialComplex> {
    infer_complex_with_stats(vertices, cfg).map(|(c, _)| c)
}

pub fn infer_complex_with_stats<T: Real>(
    vertices: &[MultivariatePath<T>],
    cfg: &InferenceConfig<T>,
) -> Result<(SimplicialComplex, InferenceStats)> {
    let mut ws = Workspace::new(vertices, cfg)?;
    let n = vertices.len();
    let mut complex = SimplicialComplex::new(n);
    let mut stats = InferenceStats::default();
    for i in 0..n {
        for k in 1..cfg.k_max.min(n) {
            let link = ws.predict(i, k)?;
            stats.regressions += 1;
            stats.gates_passed += usize::from(link.gate_passed);
            stats.non_converged += usize::from(!link.fit.converged);
            for member in &link.members {
                let mut vs = member.0.clone();
                vs.push(i);
                complex.insert_with_closure(&Simplex::new(vs)?)?;
            }
        }
    }
    debug_assert!(complex.is_downward_closed());
    Ok((complex, stats))
}

/// Per-hyperedge inclusion counts over randomized time-subset runs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbabilityTensors {
    n: usize,
    n_tries: usize,
    k_max: usize,
    /// order -> sorted tuple -> number of tries containing it
    counts: BTreeMap<usize, BTreeMap<Vec<usize>, usize>>,
}

impl ProbabilityTensors {
    pub fn empty(n: usize, n_tries: usize, k_max: usize) -> Self {
        let counts = (2..=k_max.min(n)).map(|o| (o, BTreeMap::new())).collect();
        Self { n, n_tries, k_max, counts }
    }

    /// Accumulate one complex's hyper-adjacency indicators.
    pub fn add(&mut self, complex: &SimplicialComplex) {
        for s in complex.simplices() {
            if let Some(map) = self.counts.get_mut(&s.len()) {
                *map.entry(s.0.clone()).or_insert(0) += 1;
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_tries(&self) -> usize {
        self.n_tries
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn orders(&self) -> impl Iterator<Item = usize> + '_ {
        self.counts.keys().copied()
    }

    pub fn count(&self, tuple: &[usize]) -> usize {
        let mut key = tuple.to_vec();
        key.sort_unstable();
        self.counts.get(&key.len()).and_then(|m| m.get(&key)).copied().unwrap_or(0)
    }

    pub fn frequency(&self, tuple: &[usize]) -> f64 {
        self.count(tuple) as f64 / self.n_tries as f64
    }

    /// Observed tuples of one order with their frequencies, in sorted order.
    pub fn records(&self, order: usize) -> Vec<(Vec<usize>, f64)> {
        self.counts
            .get(&order)
            .map(|m| m.iter().map(|(t, &c)| (t.clone(), c as f64 / self.n_tries as f64)).collect())
            .unwrap_or_default()
    }

    /// Symmetric matrix of pair frequencies with zero diagonal.
    pub fn pair_matrix(&self) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; self.n]; self.n];
        for (t, f) in self.records(2) {
            m[t[0]][t[1]] = f;
            m[t[1]][t[0]] = f;
        }
        m
    }

    /// Rebuild from explicit frequencies (e.g. a parsed document). Each
    /// frequency must be a multiple of `1 / n_tries`.
    pub fn from_frequencies(
        n: usize,
        n_tries: usize,
        k_max: usize,
        records: impl IntoIterator<Item = (Vec<usize>, f64)>,
    ) -> Result<Self> {
        if n_tries == 0 {
            return invalid("n_tries must be positive");
        }
        let mut out = Self::empty(n, n_tries, k_max);
        for (tuple, freq) in records {
            let s = Simplex::new(tuple)?;
            if s.0.iter().any(|&v| v >= n) {
                return invalid(format!("tuple {:?} out of range for n = {n}", s.0));
            }
            if !(0.0..=1.0).contains(&freq) {
                return invalid(format!("frequency {freq} outside [0, 1]"));
            }
            let count = (freq * n_tries as f64).round() as usize;
            if (count as f64 / n_tries as f64 - freq).abs() > 1e-6 {
                return invalid(format!("frequency {freq} is not a multiple of 1/{n_tries}"));
            }
            let map = out
                .counts
                .get_mut(&s.len())
                .ok_or_else(|| Error::InvalidArgument(format!("tuple order {} outside 2..={k_max}", s.len())))?;
            if count > 0 {
                map.insert(s.0, count);
            }
        }
        Ok(out)
    }
}

/// Default time-subset size: 60% of the grid, at least 4 points.
pub fn default_subset_len(grid_len: usize) -> usize {
    ((grid_len as f64 * 0.6).round() as usize).clamp(4.min(grid_len), grid_len)
}

/// Draw `l` distinct, sorted grid indices for one try.
pub fn draw_time_subset(stream: Substream, grid_len: usize, l: usize) -> Vec<usize> {
    let mut rng = stream.rng();
    let mut idx = rand::seq::index::sample(&mut rng, grid_len, l).into_vec();
    idx.sort_unstable();
    idx
}

/// Restrict (or, for paths on their own grids, interpolate) every vertex to
/// the selected times.
fn restrict_all<T: Real>(
    vertices: &[MultivariatePath<T>],
    grid: &TimeGrid<T>,
    indices: &[usize],
) -> Result<Vec<MultivariatePath<T>>> {
    let sub = grid.restrict(indices)?;
    vertices.iter().map(|v| if v.grid() == grid { v.restrict_to_indices(indices) } else { v.resample(&sub) }).collect()
}

/// Run the inference on `n_tries` random subsets of `l` grid times and count
/// how often each hyperedge of order `2..=K` appears. Try `j` draws from
/// `seed.index(j)`, so the result is independent of scheduling.
pub fn estimate_probability_tensors<T: Real>(
    vertices: &[MultivariatePath<T>],
    cfg: &InferenceConfig<T>,
    grid: &TimeGrid<T>,
    n_tries: usize,
    l: usize,
    seed: Substream,
) -> Result<ProbabilityTensors> {
    cfg.validate()?;
    if n_tries == 0 {
        return invalid("n_tries must be at least 1");
    }
    if l < 4 || l > grid.len() {
        return invalid(format!("subset size l = {l} must lie in 4..={}", grid.len()));
    }
    let complexes: Vec<Result<SimplicialComplex>> = (0..n_tries)
        .into_par_iter()
        .map(|j| {
            let indices = draw_time_subset(seed.index(j as u64), grid.len(), l);
            let restricted = restrict_all(vertices, grid, &indices)?;
            infer_complex(&restricted, cfg)
        })
        .collect();
    let mut prob = ProbabilityTensors::empty(vertices.len(), n_tries, cfg.k_max);
    for c in complexes {
        prob.add(&c?);
    }
    Ok(prob)
}

/// Complex of all hyperedges whose frequency is at least `tau`, with closure.
pub fn threshold_complex(prob: &ProbabilityTensors, tau: f64) -> Result<SimplicialComplex> {
    if !(tau > 0.0 && tau <= 1.0) {
        return invalid(format!("threshold tau = {tau} must lie in (0, 1]"));
    }
    let mut complex = SimplicialComplex::new(prob.n);
    for map in prob.counts.values() {
        for (tuple, &count) in map {
            if count as f64 / prob.n_tries as f64 >= tau {
                complex.insert_with_closure(&Simplex(tuple.clone()))?;
            }
        }
    }
    Ok(complex)
}
