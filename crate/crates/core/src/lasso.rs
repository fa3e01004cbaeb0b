//! L1-penalised least squares by cyclic coordinate descent.
//!
//! Columns are centred and scaled to unit (population) variance before the
//! fit, the response is centred, and the solver minimises
//!
//! ```text
//! (1 / 2L) ||y - X b||^2 + lambda ||b||_1
//! ```
//!
//! over the standardized coefficients. Coefficients are reported back on the
//! original column scale together with the implied intercept.

use crate::error::{invalid, Result};
use crate::scalar::Real;

/// Regression problem: `L` observations, `p` candidate columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Design<T> {
    columns: Vec<Vec<T>>,
    response: Vec<T>,
    labels: Vec<String>,
}

impl<T: Real> Design<T> {
    pub fn new(columns: Vec<Vec<T>>, response: Vec<T>) -> Result<Self> {
        let rows = response.len();
        if rows < 2 {
            return invalid(format!("design needs at least 2 observations, got {rows}"));
        }
        if columns.is_empty() {
            return invalid("design needs at least one column");
        }
        if let Some(j) = columns.iter().position(|c| c.len() != rows) {
            return invalid(format!("column {j} has {} rows, response has {rows}", columns[j].len()));
        }
        if response.iter().chain(columns.iter().flatten()).any(|v| !v.is_finite()) {
            return invalid("design contains NaN or infinite entries");
        }
        let labels = (0..columns.len()).map(|j| format!("x{j}")).collect();
        Ok(Self { columns, response, labels })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.columns.len() {
            return invalid("one label per column required");
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.response.len()
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[T] {
        &self.columns[j]
    }

    pub fn response(&self) -> &[T] {
        &self.response
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Fitted values for coefficients on the original scale.
    pub fn predict(&self, beta: &[T], intercept: T) -> Vec<T> {
        let mut yhat = vec![intercept; self.rows()];
        for (col, &b) in self.columns.iter().zip(beta) {
            if b != T::zero() {
                for (y, &x) in yhat.iter_mut().zip(col) {
                    *y += b * x;
                }
            }
        }
        yhat
    }
}

/// Centred/scaled copy of a design.
#[derive(Clone, Debug)]
pub struct Standardized<T> {
    pub columns: Vec<Vec<T>>,
    pub means: Vec<T>,
    pub scales: Vec<T>,
    /// Columns with (numerically) zero variance; zeroed and never selected.
    pub constant: Vec<bool>,
    pub response: Vec<T>,
    pub response_mean: T,
}

fn mean<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |a, &b| a + b) / T::from_usize_exact(v.len())
}

pub fn standardize<T: Real>(design: &Design<T>) -> Standardized<T> {
    let n = T::from_usize_exact(design.rows());
    let rel_floor = T::from_f64_lossy(1e-10);
    let mut columns = Vec::with_capacity(design.cols());
    let mut means = Vec::with_capacity(design.cols());
    let mut scales = Vec::with_capacity(design.cols());
    let mut constant = Vec::with_capacity(design.cols());
    for col in &design.columns {
        let m = mean(col);
        let var = col.iter().fold(T::zero(), |a, &x| a + (x - m) * (x - m)) / n;
        let sd = var.sqrt();
        let magnitude = col.iter().fold(T::zero(), |a, &x| a.max(x.abs()));
        let is_const = magnitude == T::zero() || sd <= rel_floor * magnitude;
        if is_const {
            columns.push(vec![T::zero(); col.len()]);
            scales.push(T::one());
        } else {
            columns.push(col.iter().map(|&x| (x - m) / sd).collect());
            scales.push(sd);
        }
        means.push(m);
        constant.push(is_const);
    }
    let response_mean = mean(&design.response);
    let response = design.response.iter().map(|&y| y - response_mean).collect();
    Standardized { columns, means, scales, constant, response, response_mean }
}

/// How the penalty is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Penalty<T> {
    /// `lambda = ratio * lambda_max`, with `lambda_max = max_j |x_j' y| / L`.
    RatioOfMax(T),
    Absolute(T),
}

/// Which fit the R² gate is computed from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum R2Source {
    #[default]
    PenalizedFit,
    /// Unpenalised least squares restricted to the selected support.
    RefitOls,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LassoConfig<T> {
    pub penalty: Penalty<T>,
    pub tol: T,
    pub max_iter: usize,
    /// Support threshold on standardized coefficients.
    pub eps_nz: T,
    pub r2_source: R2Source,
    /// Keep the penalised objective after every sweep.
    pub record_objective: bool,
}

impl<T: Real> Default for LassoConfig<T> {
    fn default() -> Self {
        Self {
            penalty: Penalty::RatioOfMax(T::from_f64_lossy(0.1)),
            tol: T::from_f64_lossy(1e-7),
            max_iter: 100_000,
            eps_nz: T::from_f64_lossy(1e-8),
            r2_source: R2Source::PenalizedFit,
            record_objective: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LassoFit<T> {
    /// Coefficients on the original column scale.
    pub beta: Vec<T>,
    pub intercept: T,
    pub beta_standardized: Vec<T>,
    /// Columns whose standardized coefficient exceeds `eps_nz` in magnitude.
    pub support: Vec<usize>,
    pub r2: T,
    /// Response had zero variance; `r2` is reported as 0.
    pub degenerate: bool,
    pub lambda: T,
    pub lambda_max: T,
    pub converged: bool,
    pub sweeps: usize,
    pub objective_trace: Vec<T>,
}

pub fn soft_threshold<T: Real>(z: T, gamma: T) -> T {
    if z > gamma {
        z - gamma
    } else if z < -gamma {
        z + gamma
    } else {
        T::zero()
    }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

fn objective<T: Real>(residual: &[T], beta: &[T], lambda: T) -> T {
    let n = T::from_usize_exact(residual.len());
    dot(residual, residual) / (n + n) + lambda * beta.iter().fold(T::zero(), |a, &b| a + b.abs())
}

/// Largest KKT violation of a standardized solution.
pub fn kkt_violation<T: Real>(std: &Standardized<T>, beta_std: &[T], lambda: T) -> T {
    let n = T::from_usize_exact(std.response.len());
    let mut residual = std.response.clone();
    for (col, &b) in std.columns.iter().zip(beta_std) {
        if b != T::zero() {
            for (r, &x) in residual.iter_mut().zip(col) {
                *r -= b * x;
            }
        }
    }
    let mut worst = T::zero();
    for (j, col) in std.columns.iter().enumerate() {
        if std.constant[j] {
            continue;
        }
        let g = dot(col, &residual) / n;
        let v = if beta_std[j] == T::zero() {
            (g.abs() - lambda).max(T::zero())
        } else {
            (g - lambda * beta_std[j].signum()).abs()
        };
        worst = worst.max(v);
    }
    worst
}

pub fn lasso_fit<T: Real>(design: &Design<T>, cfg: &LassoConfig<T>) -> Result<LassoFit<T>> {
    if !(cfg.tol > T::zero()) {
        return invalid("tolerance must be positive");
    }
    let std = standardize(design);
    let n = T::from_usize_exact(design.rows());
    let p = design.cols();

    let lambda_max = std.columns.iter().map(|c| dot(c, &std.response).abs() / n).fold(T::zero(), T::max);
    let lambda = match cfg.penalty {
        Penalty::RatioOfMax(r) if r >= T::zero() => r * lambda_max,
        Penalty::Absolute(l) if l >= T::zero() => l,
        _ => return invalid("penalty must be non-negative"),
    };

    let y_scale = std.response.iter().fold(T::one(), |a, &y| a.max(y.abs()));
    let kkt_tol = cfg.tol * y_scale;

    let mut beta = vec![T::zero(); p];
    let mut residual = std.response.clone();
    let mut trace = Vec::new();
    if cfg.record_objective {
        trace.push(objective(&residual, &beta, lambda));
    }
    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < cfg.max_iter {
        sweeps += 1;
        let mut max_change = T::zero();
        for j in 0..p {
            if std.constant[j] {
                continue;
            }
            let col = &std.columns[j];
            let rho = dot(col, &residual) / n + beta[j];
            let updated = soft_threshold(rho, lambda);
            let delta = updated - beta[j];
            if delta != T::zero() {
                for (r, &x) in residual.iter_mut().zip(col) {
                    *r -= delta * x;
                }
                beta[j] = updated;
                max_change = max_change.max(delta.abs());
            }
        }
        if cfg.record_objective {
            trace.push(objective(&residual, &beta, lambda));
        }
        if max_change < cfg.tol && kkt_violation(&std, &beta, lambda) <= kkt_tol {
            converged = true;
            break;
        }
    }

    let beta_orig: Vec<T> = beta.iter().zip(&std.scales).map(|(&b, &s)| b / s).collect();
    let intercept = std.response_mean - beta_orig.iter().zip(&std.means).fold(T::zero(), |a, (&b, &m)| a + b * m);
    let support: Vec<usize> = (0..p).filter(|&j| beta[j].abs() > cfg.eps_nz).collect();

    let mut fit = LassoFit {
        beta: beta_orig,
        intercept,
        beta_standardized: beta,
        support,
        r2: T::zero(),
        degenerate: false,
        lambda,
        lambda_max,
        converged,
        sweeps,
        objective_trace: trace,
    };
    let (r2, degenerate) = match cfg.r2_source {
        R2Source::PenalizedFit => r_squared(&fit, design),
        R2Source::RefitOls => refit_r_squared(&std, &fit.support),
    };
    fit.r2 = r2;
    fit.degenerate = degenerate;
    Ok(fit)
}

fn response_degenerate<T: Real>(ss_tot: T, y: &[T]) -> bool {
    let magnitude = y.iter().fold(T::zero(), |a, &v| a.max(v.abs()));
    let floor = T::epsilon() * T::from_f64_lossy(16.0) * magnitude;
    ss_tot <= floor * floor * T::from_usize_exact(y.len())
}

/// `1 - SS_res / SS_tot` of a fit on its design. A zero-variance response
/// gives `(0, true)`.
pub fn r_squared<T: Real>(fit: &LassoFit<T>, design: &Design<T>) -> (T, bool) {
    let y = design.response();
    let ybar = mean(y);
    let ss_tot = y.iter().fold(T::zero(), |a, &v| a + (v - ybar) * (v - ybar));
    if response_degenerate(ss_tot, y) {
        return (T::zero(), true);
    }
    let yhat = design.predict(&fit.beta, fit.intercept);
    let ss_res = y.iter().zip(&yhat).fold(T::zero(), |a, (&v, &h)| a + (v - h) * (v - h));
    (T::one() - ss_res / ss_tot, false)
}

fn refit_r_squared<T: Real>(std: &Standardized<T>, support: &[usize]) -> (T, bool) {
    let y = &std.response;
    let ss_tot = dot(y, y);
    if response_degenerate(ss_tot, y) {
        return (T::zero(), true);
    }
    if support.is_empty() {
        return (T::zero(), false);
    }
    let cols: Vec<&[T]> = support.iter().map(|&j| std.columns[j].as_slice()).collect();
    let gram: Vec<Vec<T>> = cols.iter().map(|a| cols.iter().map(|b| dot(a, b)).collect()).collect();
    let rhs: Vec<T> = cols.iter().map(|c| dot(c, y)).collect();
    let Some(coef) = solve_dense(gram, rhs) else {
        return (T::zero(), false);
    };
    let mut residual = y.clone();
    for (c, &b) in cols.iter().zip(&coef) {
        for (r, &x) in residual.iter_mut().zip(c.iter()) {
            *r -= b * x;
        }
    }
    (T::one() - dot(&residual, &residual) / ss_tot, false)
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_dense<T: Real>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let n = b.len();
    let scale = a.iter().flatten().fold(T::zero(), |m, &v| m.max(v.abs()));
    let tiny = scale * T::epsilon() * T::from_usize_exact(n.max(1)) * T::from_f64_lossy(100.0);
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| a[i][k].abs().partial_cmp(&a[j][k].abs()).unwrap())?;
        if a[piv][k].abs() <= tiny {
            return None;
        }
        a.swap(k, piv);
        b.swap(k, piv);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                let akj = a[k][j];
                a[i][j] -= f * akj;
            }
            b[i] = b[i] - f * b[k];
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let s = (i + 1..n).fold(b[i], |acc, j| acc - a[i][j] * x[j]);
        x[i] = s / a[i][i];
    }
    Some(x)
}
