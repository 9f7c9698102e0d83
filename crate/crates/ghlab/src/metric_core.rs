//! Finite (pseudo)metric spaces, balls, Hausdorff distance and ε-inclusions.

use crate::error::{Error, Result, Violation};
use crate::scalar::{Ext, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strictness {
    Metric,
    Pseudometric,
}

/// Points with a validated distance matrix, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetricSpace<S> {
    labels: Vec<String>,
    n: usize,
    dist: Vec<S>,
    strictness: Strictness,
}

impl<S: Scalar> FiniteMetricSpace<S> {
    /// Builds a space without checking the axioms. Callers are responsible
    /// for validity; used by constructions that are valid by design and by
    /// negative tests.
    pub fn new_unchecked(labels: Vec<String>, matrix: Vec<Vec<S>>, strictness: Strictness) -> Self {
        let n = matrix.len();
        let dist = matrix.into_iter().flatten().collect::<Vec<_>>();
        assert_eq!(dist.len(), n * n, "matrix must be square");
        assert_eq!(labels.len(), n);
        FiniteMetricSpace { labels, n, dist, strictness }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn strictness(&self) -> Strictness {
        self.strictness
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> &S {
        &self.dist[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    pub fn matrix(&self) -> Vec<Vec<S>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn all(&self) -> PointSet {
        PointSet((0..self.n).collect())
    }

    pub fn diameter(&self) -> S {
        self.dist.iter().cloned().fold(S::zero(), S::max_of)
    }

    /// Largest distance from `center`.
    pub fn eccentricity(&self, center: usize) -> S {
        self.row(center).iter().cloned().fold(S::zero(), S::max_of)
    }

    /// Subspace on the given indices, in the given order.
    pub fn subspace(&self, idx: &[usize]) -> Self {
        let matrix = idx.iter().map(|&i| idx.iter().map(|&j| self.d(i, j).clone()).collect()).collect();
        let labels = idx.iter().map(|&i| self.labels[i].clone()).collect();
        FiniteMetricSpace::new_unchecked(labels, matrix, self.strictness)
    }

    /// `perm[i]` is the old index of new point `i`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        self.subspace(perm)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.n);
        self.labels = labels;
        self
    }

    /// Subspace of the real line.
    pub fn from_line(coords: &[S]) -> Self {
        let matrix = coords.iter().map(|a| coords.iter().map(|b| (a.clone() - b.clone()).abs()).collect()).collect();
        let labels = coords.iter().map(|c| c.to_string()).collect();
        let strict = if has_duplicates(coords) { Strictness::Pseudometric } else { Strictness::Metric };
        FiniteMetricSpace::new_unchecked(labels, matrix, strict)
    }

    /// Subspace of the plane with the max norm.
    pub fn from_plane_linf(pts: &[(S, S)]) -> Self {
        let matrix = pts
            .iter()
            .map(|(a, b)| pts.iter().map(|(c, e)| (a.clone() - c.clone()).abs().max_of((b.clone() - e.clone()).abs())).collect())
            .collect();
        let labels = pts.iter().map(|(a, b)| format!("({a},{b})")).collect();
        FiniteMetricSpace::new_unchecked(labels, matrix, Strictness::Pseudometric)
    }
}

fn has_duplicates<S: Scalar>(v: &[S]) -> bool {
    (0..v.len()).any(|i| (i + 1..v.len()).any(|j| v[i].approx_eq(&v[j])))
}

/// Checks every axiom and reports all violations.
pub fn validate_metric<S: Scalar>(matrix: Vec<Vec<S>>, strictness: Strictness) -> Result<FiniteMetricSpace<S>> {
    let labels = (0..matrix.len()).map(|i| i.to_string()).collect();
    validate_metric_labeled(labels, matrix, strictness)
}

pub fn validate_metric_labeled<S: Scalar>(
    labels: Vec<String>,
    matrix: Vec<Vec<S>>,
    strictness: Strictness,
) -> Result<FiniteMetricSpace<S>> {
    let n = matrix.len();
    if matrix.iter().any(|row| row.len() != n) || labels.len() != n {
        return Err(Error::NotSquare);
    }
    let v = axiom_violations(&matrix, strictness);
    if !v.is_empty() {
        return Err(Error::AxiomViolation(v));
    }
    Ok(FiniteMetricSpace::new_unchecked(labels, matrix, strictness))
}

pub fn axiom_violations<S: Scalar>(m: &[Vec<S>], strictness: Strictness) -> Vec<Violation> {
    let n = m.len();
    let zero = S::zero();
    let mut out = Vec::new();
    for i in 0..n {
        if !m[i][i].is_zero() {
            out.push(Violation::NonzeroDiagonal(i));
        }
        for j in 0..n {
            if m[i][j].less(&zero) {
                out.push(Violation::Negative(i, j));
            }
            if i < j {
                if !m[i][j].approx_eq(&m[j][i]) {
                    out.push(Violation::Asymmetric(i, j));
                }
                if strictness == Strictness::Metric && m[i][j].is_zero() {
                    out.push(Violation::ZeroOffDiagonal(i, j));
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i >= j {
                continue;
            }
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                if !m[i][j].leq(&(m[i][k].clone() + m[k][j].clone())) {
                    out.push(Violation::Triangle(i, j, k));
                }
            }
        }
    }
    out
}

/// A base point in a finite space.
#[derive(Clone, Debug, PartialEq)]
pub struct PointedSpace<S> {
    pub space: FiniteMetricSpace<S>,
    pub basepoint: usize,
}

impl<S: Scalar> PointedSpace<S> {
    pub fn new(space: FiniteMetricSpace<S>, basepoint: usize) -> Result<Self> {
        if basepoint >= space.len() {
            return Err(Error::BadIndex(basepoint));
        }
        Ok(PointedSpace { space, basepoint })
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn ball(&self, r: &S) -> PointSet {
        closed_ball(&self.space, self.basepoint, r)
    }

    /// Distance from the base point to the complement of `ball(r)`.
    pub fn escape(&self, r: &S) -> Ext<S> {
        let out = self.ball(r).complement(self.len());
        dist_to_set(&self.space, self.basepoint, &out)
    }

    /// Distances from the base point, sorted and deduplicated.
    pub fn radii(&self) -> Vec<S> {
        let mut v = self.space.row(self.basepoint).to_vec();
        crate::scalar::sort_dedup(&mut v);
        v
    }

    /// Reorders points; the base point follows its image.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let bp = perm.iter().position(|&p| p == self.basepoint).expect("permutation");
        PointedSpace { space: self.space.permuted(perm), basepoint: bp }
    }
}

/// Sorted, deduplicated indices into a host space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct PointSet(Vec<usize>);

impl PointSet {
    pub fn new(mut idx: Vec<usize>) -> Self {
        idx.sort_unstable();
        idx.dedup();
        PointSet(idx)
    }

    pub fn empty() -> Self {
        PointSet(Vec::new())
    }

    pub fn checked(idx: Vec<usize>, n: usize) -> Result<Self> {
        if let Some(&bad) = idx.iter().find(|&&i| i >= n) {
            return Err(Error::BadIndex(bad));
        }
        Ok(PointSet::new(idx))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn complement(&self, n: usize) -> PointSet {
        PointSet((0..n).filter(|&i| !self.contains(i)).collect())
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        PointSet::new(self.0.iter().chain(other.0.iter()).copied().collect())
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.0.iter().all(|&i| other.contains(i))
    }

    /// Image under an index map.
    pub fn map(&self, f: &[usize]) -> PointSet {
        PointSet::new(self.0.iter().map(|&i| f[i]).collect())
    }
}

impl FromIterator<usize> for PointSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        PointSet::new(iter.into_iter().collect())
    }
}

/// `{x : d(center, x) ≤ r}`; empty for negative `r`.
pub fn closed_ball<S: Scalar>(space: &FiniteMetricSpace<S>, center: usize, r: &S) -> PointSet {
    if r.less(&S::zero()) {
        return PointSet::empty();
    }
    PointSet((0..space.len()).filter(|&x| space.d(center, x).leq(r)).collect())
}

/// `min_{s∈S} d(x, s)`, or `+∞` when `S` is empty.
pub fn dist_to_set<S: Scalar>(space: &FiniteMetricSpace<S>, x: usize, set: &PointSet) -> Ext<S> {
    let row = space.row(x);
    let mut best: Option<&S> = None;
    for s in set.iter() {
        let d = &row[s];
        if best.is_none_or(|b| d < b) {
            best = Some(d);
        }
    }
    best.map_or(Ext::Inf, |b| Ext::Fin(b.clone()))
}

/// Largest distance from a point of `b` to `a` (`+∞` if `a` is empty and `b` is not).
pub fn one_sided<S: Scalar>(space: &FiniteMetricSpace<S>, b: &PointSet, a: &PointSet) -> Ext<S> {
    b.iter().map(|x| dist_to_set(space, x, a)).fold(Ext::Fin(S::zero()), Ext::max_of)
}

pub fn hausdorff<S: Scalar>(space: &FiniteMetricSpace<S>, a: &PointSet, b: &PointSet) -> Result<S> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(one_sided(space, a, b).max_of(one_sided(space, b, a)).unwrap_fin())
}

/// `B ⊆_ε A`: every point of `b` lies within `eps` of `a`.
pub fn eps_contained<S: Scalar>(space: &FiniteMetricSpace<S>, b: &PointSet, a: &PointSet, eps: &S) -> bool {
    b.iter().all(|x| dist_to_set(space, x, a).leq_fin(eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Q;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n, d)
    }

    fn ints(m: &[&[i64]]) -> Vec<Vec<Q>> {
        m.iter().map(|r| r.iter().map(|&x| Q::from_i64(x)).collect()).collect()
    }

    #[test]
    fn validate_examples() {
        assert!(validate_metric(ints(&[&[0]]), Strictness::Metric).is_ok());
        assert!(validate_metric(ints(&[&[0, 1], &[1, 0]]), Strictness::Metric).is_ok());
        let err = validate_metric(ints(&[&[0, 1, 3], &[1, 0, 1], &[3, 1, 0]]), Strictness::Metric).unwrap_err();
        assert_eq!(err, Error::AxiomViolation(vec![Violation::Triangle(0, 2, 1)]));
        assert_eq!(validate_metric(vec![vec![Q::zero(), Q::one()]], Strictness::Metric), Err(Error::NotSquare));
    }

    #[test]
    fn validate_reports_every_kind() {
        let m = ints(&[&[1, 0, -1], &[0, 0, 2], &[2, 2, 0]]);
        let Err(Error::AxiomViolation(v)) = validate_metric(m, Strictness::Metric) else { panic!() };
        assert!(v.contains(&Violation::NonzeroDiagonal(0)));
        assert!(v.contains(&Violation::Negative(0, 2)));
        assert!(v.contains(&Violation::Asymmetric(0, 2)));
        assert!(v.contains(&Violation::ZeroOffDiagonal(0, 1)));
        let ok = ints(&[&[0, 0], &[0, 0]]);
        assert!(validate_metric(ok, Strictness::Pseudometric).is_ok());
    }

    #[test]
    fn balls_in_example_intervals() {
        let i2 = FiniteMetricSpace::from_line(&[Q::zero(), q(7, 3)]);
        assert_eq!(closed_ball(&i2, 0, &Q::from_i64(2)), PointSet::new(vec![0]));
        let i = FiniteMetricSpace::from_line(&[Q::zero(), Q::from_i64(2)]);
        assert_eq!(closed_ball(&i, 0, &Q::from_i64(2)), PointSet::new(vec![0, 1]));
        assert_eq!(closed_ball(&i, 1, &Q::zero()), PointSet::new(vec![1]));
        assert!(closed_ball(&i, 0, &q(-1, 2)).is_empty());
    }

    #[test]
    fn hausdorff_examples() {
        let host = FiniteMetricSpace::from_line(&[Q::zero(), q(7, 3), Q::from_i64(2)]);
        let a = PointSet::new(vec![0, 1]);
        let b = PointSet::new(vec![0, 2]);
        assert_eq!(hausdorff(&host, &a, &b).unwrap(), q(1, 3));
        assert_eq!(hausdorff(&host, &a, &a).unwrap(), Q::zero());
        assert_eq!(hausdorff(&host, &PointSet::new(vec![0]), &b).unwrap(), Q::from_i64(2));
        assert_eq!(hausdorff(&host, &PointSet::empty(), &b), Err(Error::EmptySet));
    }

    #[test]
    fn eps_inclusion_examples() {
        let host = FiniteMetricSpace::from_line(&[Q::zero(), q(7, 3), Q::from_i64(2)]);
        let b = PointSet::new(vec![2]);
        let a = PointSet::new(vec![1]);
        assert!(eps_contained(&host, &b, &a, &q(1, 3)));
        assert!(!eps_contained(&host, &b, &a, &q(1, 4)));
        assert!(!eps_contained(&host, &b, &PointSet::empty(), &Q::from_i64(100)));
        assert!(eps_contained(&host, &PointSet::empty(), &PointSet::empty(), &Q::zero()));
    }

    #[test]
    fn dist_to_set_examples() {
        let host = FiniteMetricSpace::from_line(&[Q::zero(), q(7, 3), Q::from_i64(2)]);
        assert_eq!(dist_to_set(&host, 2, &PointSet::new(vec![0])), Ext::Fin(Q::from_i64(2)));
        assert_eq!(dist_to_set(&host, 2, &PointSet::new(vec![2])), Ext::Fin(Q::zero()));
        assert_eq!(dist_to_set(&host, 2, &PointSet::empty()), Ext::Inf);
    }

    #[test]
    fn escape_distance() {
        let x = PointedSpace::new(FiniteMetricSpace::from_line(&[Q::zero(), Q::one(), Q::from_i64(5)]), 0).unwrap();
        assert_eq!(x.escape(&Q::one()), Ext::Fin(Q::from_i64(5)));
        assert_eq!(x.escape(&Q::from_i64(5)), Ext::Inf);
    }
}
