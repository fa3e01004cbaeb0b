//! Truncated path signatures of piecewise-linear paths.
//!
//! Level `k` of a signature over `d` channels is a dense tensor with `d^k`
//! entries. Words `(i_1, ..., i_k)` are laid out lexicographically, so the
//! flat index is `i_1 d^{k-1} + ... + i_k`. Level 0 is always 1 and is not
//! stored.
//!
//! A linear segment with increment `x` has signature `exp(x)`, whose level
//! `k` is `x^{⊗k} / k!`. A piecewise-linear path is the Chen product of its
//! segments' exponentials.

use crate::error::{invalid, Result};
use crate::scalar::Scalar;
use crate::timeseries::{MultivariatePath, TimeGrid};

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSignature<T> {
    dim: usize,
    order: usize,
    levels: Vec<Vec<T>>,
}

impl<T: Scalar> TruncatedSignature<T> {
    /// Signature of the constant path: 1 followed by zeros.
    pub fn identity(dim: usize, order: usize) -> Result<Self> {
        check_shape(dim, order)?;
        let levels = (1..=order).map(|k| vec![T::zero(); dim.pow(k as u32)]).collect();
        Ok(Self { dim, order, levels })
    }

    /// Build from explicit level tensors (level 1 first).
    pub fn from_levels(dim: usize, levels: Vec<Vec<T>>) -> Result<Self> {
        let order = levels.len();
        check_shape(dim, order)?;
        for (k, level) in levels.iter().enumerate() {
            if level.len() != dim.pow(k as u32 + 1) {
                return invalid(format!("level {} must have {} entries", k + 1, dim.pow(k as u32 + 1)));
            }
            if level.iter().any(|v| !v.is_finite_value()) {
                return invalid(format!("level {} has non-finite entries", k + 1));
            }
        }
        Ok(Self { dim, order, levels })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Level `k` for `1 <= k <= order`.
    pub fn level(&self, k: usize) -> &[T] {
        &self.levels[k - 1]
    }

    /// Coefficient of a word; the empty word gives 1.
    pub fn coefficient(&self, word: &[usize]) -> T {
        if word.is_empty() {
            return T::one();
        }
        let idx = word.iter().fold(0, |acc, &i| acc * self.dim + i);
        self.levels[word.len() - 1][idx].clone()
    }

    /// Chen product `self ⊗ other`, truncated at the common order.
    pub fn chen_product(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim || self.order != other.order {
            return invalid(format!(
                "signature shapes differ: (d={}, m={}) vs (d={}, m={})",
                self.dim, self.order, other.dim, other.order
            ));
        }
        let mut levels = Vec::with_capacity(self.order);
        for k in 1..=self.order {
            let mut out: Vec<T> =
                self.level(k).iter().zip(other.level(k)).map(|(a, b)| a.clone() + b.clone()).collect();
            for j in 1..k {
                let left = self.level(j);
                let right = other.level(k - j);
                let width = right.len();
                for (li, l) in left.iter().enumerate() {
                    if l.is_zero() {
                        continue;
                    }
                    let base = li * width;
                    for (ri, r) in right.iter().enumerate() {
                        out[base + ri] += l.clone() * r.clone();
                    }
                }
            }
            levels.push(out);
        }
        Ok(Self { dim: self.dim, order: self.order, levels })
    }

    /// Right-multiply in place by the exponential of a segment increment.
    fn extend_by_segment(&mut self, increment: &[T]) {
        let seg = segment_levels(increment, self.order);
        // Level k of the product only reads levels < k of self, so update top-down.
        for k in (1..=self.order).rev() {
            let mut out = std::mem::take(&mut self.levels[k - 1]);
            for (o, s) in out.iter_mut().zip(&seg[k - 1]) {
                *o += s.clone();
            }
            for j in 1..k {
                let right = &seg[k - j - 1];
                let width = right.len();
                for (li, l) in self.levels[j - 1].iter().enumerate() {
                    if l.is_zero() {
                        continue;
                    }
                    let base = li * width;
                    for (ri, r) in right.iter().enumerate() {
                        out[base + ri] += l.clone() * r.clone();
                    }
                }
            }
            self.levels[k - 1] = out;
        }
    }

    /// Feature vector: levels `1..=order` concatenated in word order.
    pub fn flatten(&self) -> Vec<T> {
        self.levels.iter().flatten().cloned().collect()
    }

    /// Feature vector with level `k` multiplied by `k!`.
    pub fn flatten_factorial_scaled(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(feature_len(self.dim, self.order));
        let mut fact = T::one();
        for (k, level) in self.levels.iter().enumerate() {
            fact *= T::from_usize_exact(k + 1);
            out.extend(level.iter().map(|v| v.clone() * fact.clone()));
        }
        out
    }
}

fn check_shape(dim: usize, order: usize) -> Result<()> {
    if dim == 0 {
        return invalid("signature dimension must be positive");
    }
    if order == 0 {
        return invalid("truncation order must be at least 1");
    }
    Ok(())
}

fn segment_levels<T: Scalar>(increment: &[T], order: usize) -> Vec<Vec<T>> {
    let mut levels: Vec<Vec<T>> = Vec::with_capacity(order);
    levels.push(increment.to_vec());
    for k in 2..=order {
        let kk = T::from_usize_exact(k);
        let prev = &levels[k - 2];
        let mut next = Vec::with_capacity(prev.len() * increment.len());
        for p in prev {
            next.extend(increment.iter().map(|x| p.clone() * x.clone() / kk.clone()));
        }
        levels.push(next);
    }
    levels
}

/// Number of features for `d` channels truncated at order `m`: `d + d^2 + ... + d^m`.
pub fn feature_len(dim: usize, order: usize) -> usize {
    (1..=order).map(|k| dim.pow(k as u32)).sum()
}

/// Signature of a single linear segment: level `k` is `increment^{⊗k} / k!`.
pub fn segment_signature<T: Scalar>(increment: &[T], order: usize) -> Result<TruncatedSignature<T>> {
    check_shape(increment.len(), order)?;
    Ok(TruncatedSignature { dim: increment.len(), order, levels: segment_levels(increment, order) })
}

/// Signature of the piecewise-linear interpolant of `path`.
pub fn path_signature<T: Scalar>(path: &MultivariatePath<T>, order: usize) -> Result<TruncatedSignature<T>> {
    if path.len() < 2 {
        return invalid("signature needs at least 2 samples");
    }
    let mut sig = TruncatedSignature::identity(path.dim(), order)?;
    let mut prev = path.row(0);
    for row in path.rows().skip(1) {
        let inc: Vec<T> = row.iter().zip(prev).map(|(b, a)| b.clone() - a.clone()).collect();
        sig.extend_by_segment(&inc);
        prev = row;
    }
    Ok(sig)
}

/// Channel-stack several vertices into one path on the union of their grids.
/// Channel blocks follow input order.
pub fn joint_path<T: Scalar>(vertices: &[&MultivariatePath<T>]) -> Result<MultivariatePath<T>> {
    let Some(first) = vertices.first() else {
        return invalid("joint path needs at least one vertex");
    };
    if vertices.len() == 1 {
        return Ok((*first).clone());
    }
    let (a, b) = (first.grid().start(), first.grid().end());
    if let Some(v) = vertices.iter().find(|v| v.grid().start() != a || v.grid().end() != b) {
        return invalid(format!("vertex `{}` is not defined on the same interval as `{}`", v.label(), first.label()));
    }
    let same_grid = vertices.iter().all(|v| v.grid() == first.grid());
    let grid = if same_grid { first.grid().clone() } else { TimeGrid::union(vertices.iter().map(|v| v.grid()))? };
    let resampled: Vec<MultivariatePath<T>> = if same_grid {
        vertices.iter().map(|v| (*v).clone()).collect()
    } else {
        vertices.iter().map(|v| v.resample(&grid)).collect::<Result<_>>()?
    };
    let dim: usize = resampled.iter().map(MultivariatePath::dim).sum();
    let mut values = Vec::with_capacity(grid.len() * dim);
    for i in 0..grid.len() {
        for v in &resampled {
            values.extend(v.row(i).iter().cloned());
        }
    }
    let label = vertices.iter().map(|v| v.label()).collect::<Vec<_>>().join("+");
    MultivariatePath::new(label, grid, values, dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use num_rational::BigRational;

    fn grid(n: usize) -> TimeGrid<f64> {
        TimeGrid::uniform(0.0, 1.0, n - 1).unwrap()
    }

    #[test]
    fn segment_examples() {
        let z = segment_signature(&[0.0, 0.0], 3).unwrap();
        assert!(z.flatten().iter().all(|&v| v == 0.0));
        let s = segment_signature(&[rational(2, 1)], 3).unwrap();
        assert_eq!(s.flatten(), vec![rational(2, 1), rational(2, 1), rational(4, 3)]);
        let s2 = segment_signature(&[1.0, 1.0], 2).unwrap();
        assert_eq!(s2.level(2), &[0.5; 4]);
    }

    #[test]
    fn chen_identity_element() {
        let s = segment_signature(&[0.3, -1.2], 3).unwrap();
        let e = TruncatedSignature::identity(2, 3).unwrap();
        assert_eq!(s.chen_product(&e).unwrap(), s);
        assert_eq!(e.chen_product(&s).unwrap(), s);
    }

    #[test]
    fn chen_one_dimensional_exact() {
        let a = segment_signature(&[rational(3, 2)], 3).unwrap();
        let b = segment_signature(&[rational(-1, 3)], 3).unwrap();
        let ab = a.chen_product(&b).unwrap();
        let chord = segment_signature(&[rational(7, 6)], 3).unwrap();
        assert_eq!(ab, chord);
        assert_eq!(ab.level(2)[0], rational(49, 72));
    }

    #[test]
    fn chen_shape_mismatch() {
        let a = segment_signature(&[1.0, 2.0], 2).unwrap();
        assert!(a.chen_product(&segment_signature(&[1.0], 2).unwrap()).is_err());
        assert!(a.chen_product(&segment_signature(&[1.0, 2.0], 3).unwrap()).is_err());
    }

    #[test]
    fn axis_aligned_path_exact() {
        let g = TimeGrid::new(vec![rational(0, 1), rational(1, 2), rational(1, 1)]).unwrap();
        let z = rational(0, 1);
        let o = rational(1, 1);
        let p: MultivariatePath<BigRational> =
            MultivariatePath::new("L", g, vec![z.clone(), z.clone(), o.clone(), z.clone(), o.clone(), o.clone()], 2)
                .unwrap();
        let s = path_signature(&p, 2).unwrap();
        assert_eq!(s.level(1), &[o.clone(), o.clone()]);
        assert_eq!(s.coefficient(&[0, 1]), o);
        assert_eq!(s.coefficient(&[1, 0]), z);
        assert_eq!(s.coefficient(&[0, 0]), rational(1, 2));
        assert_eq!(s.coefficient(&[1, 1]), rational(1, 2));
        assert_eq!(s.coefficient(&[]), o);
    }

    #[test]
    fn out_and_back() {
        let p = MultivariatePath::new("x", grid(3), vec![0.0, 1.0, 0.0], 1).unwrap();
        let s = path_signature(&p, 3).unwrap();
        assert_eq!(s.level(1), &[0.0]);
        assert!(s.flatten().iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn single_sample_rejected() {
        // MultivariatePath cannot hold fewer than 2 samples; order 0 is the other error path.
        let p = MultivariatePath::new("x", grid(2), vec![0.0, 1.0], 1).unwrap();
        assert!(path_signature(&p, 0).is_err());
    }

    #[test]
    fn flatten_layout() {
        let s = segment_signature(&[2.0], 3).unwrap();
        assert_eq!(s.flatten(), vec![2.0, 2.0, 4.0 / 3.0]);
        let s = segment_signature(&[0.5, -1.5], 1).unwrap();
        assert_eq!(s.flatten(), vec![0.5, -1.5]);
        assert_eq!(segment_signature(&[1.0, 1.0], 3).unwrap().flatten().len(), 14);
        assert_eq!(feature_len(2, 3), 14);
        assert_eq!(feature_len(4, 3), 84);
        let scaled = segment_signature(&[2.0], 3).unwrap().flatten_factorial_scaled();
        assert_eq!(scaled, vec![2.0, 4.0, 8.0]);
    }

    #[test]
    fn word_order_is_lexicographic() {
        let s = segment_signature(&[1.0, 2.0, 3.0], 2).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = [1.0, 2.0, 3.0][i] * [1.0, 2.0, 3.0][j] / 2.0;
                assert_eq!(s.level(2)[i * 3 + j], expected);
                assert_eq!(s.coefficient(&[i, j]), expected);
            }
        }
    }

    #[test]
    fn joint_path_cases() {
        let a = MultivariatePath::new("a", grid(3), vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0], 2).unwrap();
        assert_eq!(joint_path(&[&a]).unwrap(), a);
        let b = MultivariatePath::new("b", grid(3), vec![10.0, 11.0, 12.0, 13.0, 14.0, 15.0], 2).unwrap();
        let j = joint_path(&[&a, &b]).unwrap();
        assert_eq!(j.dim(), 4);
        assert_eq!(j.row(1), &[2.0, 3.0, 12.0, 13.0]);

        let g2 = TimeGrid::new(vec![0.0, 0.25, 1.0]).unwrap();
        let c = MultivariatePath::new("c", g2, vec![0.0, 1.0, 4.0], 1).unwrap();
        let j = joint_path(&[&a, &c]).unwrap();
        assert_eq!(j.grid().times(), &[0.0, 0.25, 0.5, 1.0]);
        assert_eq!(j.row(1)[2], 1.0);
        assert_eq!(j.row(2)[0..2], [2.0, 3.0]);
        assert_eq!(j.row(2)[2], 2.0);

        let shifted = MultivariatePath::new("s", TimeGrid::new(vec![0.0, 2.0]).unwrap(), vec![0.0, 1.0], 1).unwrap();
        assert!(joint_path(&[&a, &shifted]).is_err());
        assert!(joint_path::<f64>(&[]).is_err());
    }

    #[test]
    fn zero_padded_channels_vanish() {
        let p = MultivariatePath::new("x", grid(4), vec![0.0, 1.5, -0.5, 2.0], 1).unwrap();
        let s = path_signature(&p.zero_pad_augment(3).unwrap(), 3).unwrap();
        for k in 1..=3 {
            for (idx, v) in s.level(k).iter().enumerate() {
                let touches_pad = (0..k).any(|pos| !(idx / 3usize.pow(pos as u32)).is_multiple_of(3));
                if touches_pad {
                    assert_eq!(*v, 0.0);
                }
            }
        }
    }
}
