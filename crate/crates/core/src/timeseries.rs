//! Sampled multivariate paths.
//!
//! A [`MultivariatePath`] is a finite sequence of samples on a [`TimeGrid`];
//! between samples the path is the linear interpolant. All operations are
//! pure and return new paths.

use std::collections::BTreeSet;

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Strictly increasing sampling times spanning `[first, last]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid<T> {
    times: Vec<T>,
}

impl<T: Scalar> TimeGrid<T> {
    pub fn new(times: Vec<T>) -> Result<Self> {
        if times.len() < 2 {
            return invalid(format!("time grid needs at least 2 points, got {}", times.len()));
        }
        if let Some(bad) = times.iter().position(|t| !t.is_finite_value()) {
            return invalid(format!("time grid entry {bad} is not finite"));
        }
        if let Some(i) = times.windows(2).position(|w| w[0] >= w[1]) {
            return invalid(format!("time grid not strictly increasing at index {}", i + 1));
        }
        Ok(Self { times })
    }

    /// `steps + 1` equally spaced points from `start` to `end`, with
    /// `t_i = start + (end - start) * i / steps`.
    pub fn uniform(start: T, end: T, steps: usize) -> Result<Self> {
        if steps == 0 {
            return invalid("uniform grid needs at least one step");
        }
        let span = end.clone() - start.clone();
        let denom = T::from_usize_exact(steps);
        let times =
            (0..=steps).map(|i| start.clone() + span.clone() * T::from_usize_exact(i) / denom.clone()).collect();
        Self::new(times)
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn start(&self) -> &T {
        &self.times[0]
    }

    pub fn end(&self) -> &T {
        &self.times[self.times.len() - 1]
    }

    /// Sorted union of several grids' points.
    pub fn union<'a>(grids: impl IntoIterator<Item = &'a TimeGrid<T>>) -> Result<Self> {
        let mut all: Vec<T> = grids.into_iter().flat_map(|g| g.times.iter().cloned()).collect();
        all.sort_by(|a, b| a.partial_cmp(b).expect("grid times are finite"));
        all.dedup();
        Self::new(all)
    }

    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        check_indices(indices, self.len())?;
        Self::new(indices.iter().map(|&i| self.times[i].clone()).collect())
    }
}

fn check_indices(indices: &[usize], len: usize) -> Result<()> {
    if indices.len() < 2 {
        return invalid(format!("need at least 2 indices, got {}", indices.len()));
    }
    if let Some(&bad) = indices.iter().find(|&&i| i >= len) {
        return invalid(format!("index {bad} out of range for grid of length {len}"));
    }
    if indices.windows(2).any(|w| w[0] >= w[1]) {
        return invalid("indices must be strictly increasing");
    }
    Ok(())
}

/// A `d`-channel path sampled on a time grid. Values are stored row-major,
/// one row of `d` entries per grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct MultivariatePath<T> {
    label: String,
    grid: TimeGrid<T>,
    values: Vec<T>,
    dim: usize,
}

impl<T: Scalar> MultivariatePath<T> {
    pub fn new(label: impl Into<String>, grid: TimeGrid<T>, values: Vec<T>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return invalid("path needs at least one channel");
        }
        if values.len() != grid.len() * dim {
            return invalid(format!(
                "expected {} x {} = {} values, got {}",
                grid.len(),
                dim,
                grid.len() * dim,
                values.len()
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite_value()) {
            return invalid(format!("non-finite value at row {}, channel {}", i / dim, i % dim));
        }
        Ok(Self { label: label.into(), grid, values, dim })
    }

    pub fn from_rows(label: impl Into<String>, grid: TimeGrid<T>, rows: Vec<Vec<T>>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return invalid("rows have differing lengths");
        }
        Self::new(label, grid, rows.into_iter().flatten().collect(), dim)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn grid(&self) -> &TimeGrid<T> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.values.chunks_exact(self.dim)
    }

    pub fn channel(&self, c: usize) -> Vec<T> {
        self.rows().map(|r| r[c].clone()).collect()
    }

    /// Keep only the samples at `indices` (strictly increasing).
    pub fn restrict_to_indices(&self, indices: &[usize]) -> Result<Self> {
        let grid = self.grid.restrict(indices)?;
        let values = indices.iter().flat_map(|&i| self.row(i).iter().cloned()).collect();
        Self::new(self.label.clone(), grid, values, self.dim)
    }

    /// Value of the piecewise-linear path at `t`; exact on grid points.
    pub fn interpolate_at(&self, t: &T) -> Result<Vec<T>> {
        let times = self.grid.times();
        if t < self.grid.start() || t > self.grid.end() || !t.is_finite_value() {
            return Err(Error::OutOfRange(format!(
                "t = {:?} outside [{:?}, {:?}]",
                t,
                self.grid.start(),
                self.grid.end()
            )));
        }
        // first index with times[i] > t
        let hi = times.partition_point(|s| s <= t);
        if hi > 0 && &times[hi - 1] == t {
            return Ok(self.row(hi - 1).to_vec());
        }
        let lo = hi - 1;
        let w = (t.clone() - times[lo].clone()) / (times[hi].clone() - times[lo].clone());
        Ok(self
            .row(lo)
            .iter()
            .zip(self.row(hi))
            .map(|(u, v)| u.clone() + w.clone() * (v.clone() - u.clone()))
            .collect())
    }

    /// Re-sample the path on `grid`, which must lie inside this path's interval.
    pub fn resample(&self, grid: &TimeGrid<T>) -> Result<Self> {
        if grid == &self.grid {
            return Ok(self.clone());
        }
        let mut values = Vec::with_capacity(grid.len() * self.dim);
        for t in grid.times() {
            values.extend(self.interpolate_at(t)?);
        }
        Self::new(self.label.clone(), grid.clone(), values, self.dim)
    }

    /// Keep the listed channels, in the listed order.
    pub fn project_channels(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return invalid("projection must keep at least one channel");
        }
        if let Some(&c) = keep.iter().find(|&&c| c >= self.dim) {
            return invalid(format!("channel {c} out of range for {}-channel path", self.dim));
        }
        if keep.iter().collect::<BTreeSet<_>>().len() != keep.len() {
            return invalid("projection channels must be distinct");
        }
        let values = self.rows().flat_map(|r| keep.iter().map(move |&c| r[c].clone())).collect();
        Self::new(self.label.clone(), self.grid.clone(), values, keep.len())
    }

    /// Append identically-zero channels up to `target_dim`.
    pub fn zero_pad_augment(&self, target_dim: usize) -> Result<Self> {
        if target_dim < self.dim {
            return invalid(format!("cannot pad {}-channel path down to {target_dim}", self.dim));
        }
        let extra = target_dim - self.dim;
        let values = self.rows().flat_map(|r| r.iter().cloned().chain(std::iter::repeat_n(T::zero(), extra))).collect();
        Self::new(self.label.clone(), self.grid.clone(), values, target_dim)
    }

    /// Discrete lead-lag transform: `2N - 1` points and `2d` channels (lead
    /// block first). Even steps hold `(x_j, x_j)`, odd steps `(x_{j+1}, x_j)`,
    /// placed at the midpoint of the original interval.
    pub fn lead_lag(&self) -> Result<Self> {
        let n = self.len();
        let two = T::from_usize_exact(2);
        let times = self.grid.times();
        let mut out_times = Vec::with_capacity(2 * n - 1);
        let mut values = Vec::with_capacity((2 * n - 1) * 2 * self.dim);
        for j in 0..n {
            out_times.push(times[j].clone());
            values.extend(self.row(j).iter().cloned());
            values.extend(self.row(j).iter().cloned());
            if j + 1 < n {
                out_times.push((times[j].clone() + times[j + 1].clone()) / two.clone());
                values.extend(self.row(j + 1).iter().cloned());
                values.extend(self.row(j).iter().cloned());
            }
        }
        Self::new(self.label.clone(), TimeGrid::new(out_times)?, values, 2 * self.dim)
    }

    /// Prepend a channel holding time rescaled affinely to `[0, 1]`.
    pub fn time_augment(&self) -> Self {
        let a = self.grid.start().clone();
        let span = self.grid.end().clone() - a.clone();
        let values = self
            .grid
            .times()
            .iter()
            .zip(self.rows())
            .flat_map(|(t, r)| std::iter::once((t.clone() - a.clone()) / span.clone()).chain(r.iter().cloned()))
            .collect();
        Self::new(self.label.clone(), self.grid.clone(), values, self.dim + 1)
            .expect("time augmentation preserves validity")
    }

    /// The path run backwards over the same interval (`t -> a + b - t`).
    pub fn reversed(&self) -> Self {
        let a = self.grid.start().clone();
        let b = self.grid.end().clone();
        let times = self.grid.times().iter().rev().map(|t| a.clone() + b.clone() - t.clone()).collect();
        let values = self.values.chunks_exact(self.dim).rev().flatten().cloned().collect();
        Self::new(self.label.clone(), TimeGrid::new(times).expect("reversal keeps order"), values, self.dim)
            .expect("reversal preserves validity")
    }

    /// Add `offset` to every sample.
    pub fn translated(&self, offset: &[T]) -> Result<Self> {
        if offset.len() != self.dim {
            return invalid("offset length must match channel count");
        }
        let values = self.rows().flat_map(|r| r.iter().zip(offset).map(|(v, o)| v.clone() + o.clone())).collect();
        Self::new(self.label.clone(), self.grid.clone(), values, self.dim)
    }
}

/// How to reconcile vertices carrying different channel counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Coherence {
    /// Dimensions must already agree.
    #[default]
    Strict,
    /// Keep only the leading channels shared by every vertex.
    Project,
    /// Pad every vertex with zero channels up to the largest dimension.
    ZeroPad,
    /// Add a time channel to every vertex, then zero-pad.
    Time,
}

impl std::str::FromStr for Coherence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" | "none" => Ok(Self::Strict),
            "project" => Ok(Self::Project),
            "zero-pad" | "zeropad" | "pad" => Ok(Self::ZeroPad),
            "time" => Ok(Self::Time),
            other => invalid(format!("unknown coherence mode `{other}` (project | zero-pad | time)")),
        }
    }
}

impl std::fmt::Display for Coherence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Strict => "strict",
            Self::Project => "project",
            Self::ZeroPad => "zero-pad",
            Self::Time => "time",
        })
    }
}

/// Bring every path to a common channel count according to `mode`.
pub fn harmonize<T: Scalar>(paths: &[MultivariatePath<T>], mode: Coherence) -> Result<Vec<MultivariatePath<T>>> {
    let Some(min_dim) = paths.iter().map(MultivariatePath::dim).min() else {
        return Ok(Vec::new());
    };
    let max_dim = paths.iter().map(MultivariatePath::dim).max().unwrap_or(min_dim);
    match mode {
        Coherence::Strict if min_dim != max_dim => {
            let dims: Vec<String> = paths.iter().map(|p| format!("{}={}", p.label(), p.dim())).collect();
            Err(Error::DimensionCoherence(format!("vertices have different channel counts ({})", dims.join(", "))))
        }
        Coherence::Strict => Ok(paths.to_vec()),
        Coherence::Project => {
            let keep: Vec<usize> = (0..min_dim).collect();
            paths.iter().map(|p| p.project_channels(&keep)).collect()
        }
        Coherence::ZeroPad => paths.iter().map(|p| p.zero_pad_augment(max_dim)).collect(),
        Coherence::Time => paths.iter().map(|p| p.time_augment().zero_pad_augment(max_dim + 1)).collect(),
    }
}
