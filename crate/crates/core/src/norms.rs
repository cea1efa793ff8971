//! Weighted lp norms with descending weights and their matched seminorms.

use crate::error::{QslError, Result};
use crate::scalar::{Exponent, Real, C};
use crate::vectorize::VectorizedOperator;

/// Relative threshold under which two moduli count as tied.
pub const TIE_THRESHOLD: f64 = 1e-10;

/// Nonnegative weights kept in descending order.
///
/// Weights are not rescaled on construction; `normalized` divides by the
/// leading entry when a unit first weight is wanted.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector<T> {
    entries: Vec<T>,
}

impl<T: Real> WeightVector<T> {
    pub fn new(mut entries: Vec<T>) -> Result<Self> {
        if entries.is_empty() {
            return Err(QslError::InvalidWeights("empty weight vector".into()));
        }
        if entries.iter().any(|w| !w.is_finite() || *w < T::zero()) {
            return Err(QslError::InvalidWeights(
                "weights must be finite and nonnegative".into(),
            ));
        }
        entries.sort_by(|a, b| b.partial_cmp(a).expect("finite weights"));
        if entries[0] <= T::zero() {
            return Err(QslError::InvalidWeights("at least one weight must be positive".into()));
        }
        Ok(Self { entries })
    }

    /// `1_j`: the first `j` entries are one, the rest zero (`1 <= j <= len`).
    pub fn indicator(len: usize, j: usize) -> Result<Self> {
        if j == 0 || j > len {
            return Err(QslError::InvalidWeights(format!(
                "indicator index {j} outside 1..={len}"
            )));
        }
        let entries = (0..len)
            .map(|k| if k < j { T::one() } else { T::zero() })
            .collect();
        Ok(Self { entries })
    }

    pub fn ones(len: usize) -> Self {
        Self::indicator(len, len).expect("len >= 1")
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn normalized(&self) -> Self {
        let lead = self.entries[0];
        Self {
            entries: self.entries.iter().map(|&w| w / lead).collect(),
        }
    }

    pub fn scaled(&self, lambda: T) -> Result<Self> {
        Self::new(self.entries.iter().map(|&w| w * lambda).collect())
    }

    /// `Some(j)` when this is exactly `1_j`.
    pub fn indicator_index(&self) -> Option<usize> {
        let j = self.entries.iter().take_while(|&&w| w == T::one()).count();
        let rest_zero = self.entries[j..].iter().all(|&w| w == T::zero());
        (j > 0 && rest_zero).then_some(j)
    }
}

/// The weight permutation that realizes the arrow norm of a given vector.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchedWeights<T> {
    /// `assignment[k]` is the coordinate receiving the `k`-th largest weight.
    pub assignment: Vec<usize>,
    /// Weight placed on each coordinate (the permuted vector `w-bar`).
    pub weights: Vec<T>,
    /// The arrow norm value.
    pub value: T,
    /// Set when tied moduli received distinct weights, so the matching is not unique.
    pub degenerate: bool,
    /// Rank ranges `[start, end)` of tie blocks whose weights are not all equal.
    pub tie_blocks: Vec<(usize, usize)>,
}

impl<T: Real> MatchedWeights<T> {
    /// Builds the matching for an explicit assignment (no tie analysis).
    pub fn from_assignment(assignment: Vec<usize>, w: &WeightVector<T>, value: T) -> Result<Self> {
        let n = assignment.len();
        if n != w.len() {
            return Err(QslError::LengthMismatch { left: n, right: w.len() });
        }
        let mut seen = vec![false; n];
        let mut weights = vec![T::zero(); n];
        for (k, &c) in assignment.iter().enumerate() {
            if c >= n || seen[c] {
                return Err(QslError::InvalidWeights("assignment is not a permutation".into()));
            }
            seen[c] = true;
            weights[c] = w.entries[k];
        }
        Ok(Self {
            assignment,
            weights,
            value,
            degenerate: false,
            tie_blocks: Vec::new(),
        })
    }

    /// All distinct permuted weight vectors reachable by reassigning weights
    /// inside tie blocks, or `None` if there are more than `limit`.
    pub fn tie_candidates(&self, limit: usize) -> Option<Vec<Vec<T>>> {
        let mut out = vec![self.weights.clone()];
        for &(start, end) in &self.tie_blocks {
            let coords = &self.assignment[start..end];
            let block_weights: Vec<T> = coords.iter().map(|&c| self.weights[c]).collect();
            let arrangements = distinct_arrangements(&block_weights, limit)?;
            if out.len().saturating_mul(arrangements.len()) > limit {
                return None;
            }
            let mut next = Vec::with_capacity(out.len() * arrangements.len());
            for base in &out {
                for arr in &arrangements {
                    let mut cand = base.clone();
                    for (&c, &w) in coords.iter().zip(arr) {
                        cand[c] = w;
                    }
                    next.push(cand);
                }
            }
            out = next;
        }
        Some(out)
    }
}

/// Distinct permutations of a multiset (input sorted descending), capped.
fn distinct_arrangements<T: Real>(items: &[T], limit: usize) -> Option<Vec<Vec<T>>> {
    let mut values: Vec<T> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for &x in items {
        match values.iter().position(|&v| v == x) {
            Some(i) => counts[i] += 1,
            None => {
                values.push(x);
                counts.push(1);
            }
        }
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(items.len());
    fn recurse<T: Real>(
        values: &[T],
        counts: &mut [usize],
        current: &mut Vec<T>,
        total: usize,
        out: &mut Vec<Vec<T>>,
        limit: usize,
    ) -> bool {
        if current.len() == total {
            out.push(current.clone());
            return out.len() <= limit;
        }
        for i in 0..values.len() {
            if counts[i] == 0 {
                continue;
            }
            counts[i] -= 1;
            current.push(values[i]);
            let ok = recurse(values, counts, current, total, out, limit);
            current.pop();
            counts[i] += 1;
            if !ok {
                return false;
            }
        }
        true
    }
    if recurse(&values, &mut counts, &mut current, items.len(), &mut out, limit) {
        Some(out)
    } else {
        None
    }
}

/// Indices ordered by descending modulus, ties kept in index order.
pub(crate) fn descending_order<T: Real>(moduli: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..moduli.len()).collect();
    order.sort_by(|&a, &b| {
        moduli[b]
            .partial_cmp(&moduli[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    order
}

/// `(sum_k w_k a_k^p)^(1/p)`, scaled by `scale` to keep the powers in range.
pub(crate) fn weighted_lp<T: Real>(pairs: impl Iterator<Item = (T, T)>, p: Exponent<T>, scale: T) -> T {
    match p {
        Exponent::Infinite => pairs
            .filter(|(w, _)| *w > T::zero())
            .fold(T::zero(), |m, (_, a)| m.max(a)),
        Exponent::Finite(p) => {
            if scale <= T::zero() {
                return T::zero();
            }
            let s: T = pairs
                .filter(|(w, _)| *w > T::zero())
                .map(|(w, a)| w * (a / scale).powf(p))
                .sum();
            scale * s.powf(p.recip())
        }
    }
}

/// The arrow norm of moduli `a` under weights `w`, plus its matching.
pub fn arrow_norm_of_moduli<T: Real>(a: &[T], w: &WeightVector<T>, p: Exponent<T>) -> Result<MatchedWeights<T>> {
    if a.len() != w.len() {
        return Err(QslError::LengthMismatch {
            left: a.len(),
            right: w.len(),
        });
    }
    let order = descending_order(a);
    let max = order.first().map(|&i| a[i]).unwrap_or_else(T::zero);
    let value = match p {
        // limit form: the largest modulus carried by the leading weight
        Exponent::Infinite => max,
        Exponent::Finite(_) => weighted_lp(
            order.iter().enumerate().map(|(k, &i)| (w.entries[k], a[i])),
            p,
            max,
        ),
    };

    let thr = max * T::lit(TIE_THRESHOLD);
    let mut tie_blocks = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && a[order[end - 1]] - a[order[end]] <= thr {
            end += 1;
        }
        let ws = &w.entries[start..end];
        if ws.iter().any(|&x| x != ws[0]) {
            tie_blocks.push((start, end));
        }
        start = end;
    }

    let mut matched = MatchedWeights::from_assignment(order, w, value)?;
    matched.degenerate = !tie_blocks.is_empty();
    matched.tie_blocks = tie_blocks;
    Ok(matched)
}

/// `||x||_{p, w}` with sorted weights paired against sorted moduli.
pub fn arrow_norm<T: Real>(x: &VectorizedOperator<T>, w: &WeightVector<T>, p: Exponent<T>) -> Result<MatchedWeights<T>> {
    arrow_norm_of_moduli(&x.moduli(), w, p)
}

/// `(sum_j wbar_j |x_j|^p)^(1/p)` with the weights held at their coordinates.
pub fn matched_seminorm<T: Real>(x: &VectorizedOperator<T>, wbar: &MatchedWeights<T>, p: Exponent<T>) -> Result<T> {
    seminorm_with_weights(x.entries(), &wbar.weights, p)
}

pub fn seminorm_with_weights<T: Real>(x: &[C<T>], weights: &[T], p: Exponent<T>) -> Result<T> {
    if x.len() != weights.len() {
        return Err(QslError::LengthMismatch {
            left: x.len(),
            right: weights.len(),
        });
    }
    let moduli: Vec<T> = x.iter().map(|z| z.norm()).collect();
    let scale = moduli
        .iter()
        .zip(weights)
        .filter(|(_, &w)| w > T::zero())
        .fold(T::zero(), |m, (&a, _)| m.max(a));
    Ok(weighted_lp(
        weights.iter().copied().zip(moduli.iter().copied()),
        p,
        scale,
    ))
}

/// `z / |z|`, with `sgn(0) = 0`.
pub fn complex_sign<T: Real>(z: C<T>) -> C<T> {
    let r = z.norm();
    if r == T::zero() {
        C::new(T::zero(), T::zero())
    } else {
        z / r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::creal;

    fn vec_of(xs: &[f64]) -> VectorizedOperator<f64> {
        VectorizedOperator::from_entries(xs.iter().map(|&x| creal(x)).collect(), "test").unwrap()
    }

    fn w(xs: &[f64]) -> WeightVector<f64> {
        WeightVector::new(xs.to_vec()).unwrap()
    }

    #[test]
    fn zero_vector_has_zero_norm() {
        for p in [1.0, 2.0, f64::INFINITY] {
            let m = arrow_norm(&vec_of(&[0.0; 4]), &w(&[1.0, 0.5, 0.5, 0.0]), Exponent::new(p).unwrap()).unwrap();
            assert_eq!(m.value, 0.0);
        }
    }

    #[test]
    fn sorted_pairing_example() {
        let m = arrow_norm(&vec_of(&[3.0, -1.0, 2.0, 0.0]), &w(&[1.0, 1.0, 0.0, 0.0]), Exponent::finite(2.0)).unwrap();
        assert!((m.value - 13f64.sqrt()).abs() < 1e-14);
        assert_eq!(m.assignment, vec![0, 2, 1, 3]);
        assert_eq!(m.weights, vec![1.0, 0.0, 1.0, 0.0]);
        assert!(!m.degenerate);
    }

    #[test]
    fn infinite_p_takes_largest_modulus() {
        let m = arrow_norm(&vec_of(&[0.5, -4.0, 2.0, 1.0]), &w(&[3.0, 1.0, 1.0, 0.0]), Exponent::Infinite).unwrap();
        assert_eq!(m.value, 4.0);
    }

    #[test]
    fn seminorm_keeps_weights_in_place() {
        let target = vec_of(&[2.0, 1.0, 0.0, 0.0]);
        let m = arrow_norm(&target, &WeightVector::indicator(4, 1).unwrap(), Exponent::finite(1.0)).unwrap();
        let x = vec_of(&[1.0, 5.0, 0.0, 0.0]);
        assert_eq!(matched_seminorm(&x, &m, Exponent::finite(1.0)).unwrap(), 1.0);
        assert_eq!(matched_seminorm(&x, &m, Exponent::Infinite).unwrap(), 1.0);
    }

    #[test]
    fn all_ones_seminorm_is_euclidean() {
        let x = vec_of(&[1.0, 2.0, 2.0, 4.0]);
        let m = arrow_norm(&x, &WeightVector::ones(4), Exponent::finite(2.0)).unwrap();
        assert!((matched_seminorm(&x, &m, Exponent::finite(2.0)).unwrap() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn ties_with_distinct_weights_are_flagged() {
        let m = arrow_norm(&vec_of(&[0.3, 0.1, 0.1, -0.3]), &WeightVector::indicator(4, 1).unwrap(), Exponent::finite(1.0)).unwrap();
        assert!(m.degenerate);
        assert_eq!(m.tie_blocks, vec![(0, 2)]);
        let cands = m.tie_candidates(64).unwrap();
        assert_eq!(cands.len(), 2);
        assert!(cands.contains(&vec![1.0, 0.0, 0.0, 0.0]));
        assert!(cands.contains(&vec![0.0, 0.0, 0.0, 1.0]));
    }

    #[test]
    fn ties_with_equal_weights_are_not_flagged() {
        let m = arrow_norm(&vec_of(&[0.3, 0.1, 0.1, -0.3]), &WeightVector::ones(4), Exponent::finite(1.0)).unwrap();
        assert!(!m.degenerate);
        assert_eq!(m.tie_candidates(64).unwrap().len(), 1);
    }

    #[test]
    fn candidate_enumeration_respects_limit() {
        // 9 tied coordinates with 1_4: C(9, 4) = 126 arrangements
        let m = arrow_norm(&vec_of(&[1.0; 9]), &WeightVector::indicator(9, 4).unwrap(), Exponent::finite(1.0)).unwrap();
        assert!(m.tie_candidates(64).is_none());
        assert_eq!(m.tie_candidates(200).unwrap().len(), 126);
    }

    #[test]
    fn weight_validation() {
        assert!(WeightVector::<f64>::new(vec![]).is_err());
        assert!(WeightVector::<f64>::new(vec![0.0, 0.0]).is_err());
        assert!(WeightVector::<f64>::new(vec![1.0, -0.1]).is_err());
        assert!(WeightVector::<f64>::indicator(4, 0).is_err());
        assert!(WeightVector::<f64>::indicator(4, 5).is_err());
        let v = w(&[0.2, 2.0, 1.0]);
        assert_eq!(v.entries(), &[2.0, 1.0, 0.2]);
        assert_eq!(v.normalized().entries(), &[1.0, 0.5, 0.1]);
        assert_eq!(WeightVector::<f64>::indicator(4, 3).unwrap().indicator_index(), Some(3));
        assert_eq!(v.indicator_index(), None);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        assert!(arrow_norm(&vec_of(&[1.0; 4]), &WeightVector::ones(9), Exponent::finite(1.0)).is_err());
    }

    #[test]
    fn sign_convention() {
        assert_eq!(complex_sign(C::new(0.0f64, 0.0)), C::new(0.0, 0.0));
        assert!((complex_sign(C::new(0.0f64, -2.0)) - C::new(0.0, -1.0)).norm() < 1e-15);
    }
}
