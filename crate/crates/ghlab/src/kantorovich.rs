//! Probability measures, polyhedral seminorms and Monge–Kantorovich distances.

use crate::error::{Error, Result};
use crate::lp::{maximize_free, maximize_standard, LpOutcome};
use crate::metric_core::{dist_to_set, FiniteMetricSpace, PointSet};
use crate::scalar::{Ext, Scalar};

/// Nonnegative weights summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct Measure<S> {
    weights: Vec<S>,
}

impl<S: Scalar> Measure<S> {
    pub fn new(weights: Vec<S>) -> Result<Self> {
        if weights.iter().any(|w| w.less(&S::zero())) {
            return Err(Error::PreconditionFailed("negative weight".into()));
        }
        let total = weights.iter().cloned().fold(S::zero(), |a, b| a + b);
        if !total.approx_eq(&S::one()) {
            return Err(Error::PreconditionFailed(format!("weights sum to {total}")));
        }
        Ok(Measure { weights })
    }

    pub fn dirac(n: usize, i: usize) -> Self {
        let mut weights = vec![S::zero(); n];
        weights[i] = S::one();
        Measure { weights }
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `λ·self + (1−λ)·other`.
    pub fn mix(&self, other: &Measure<S>, lambda: &S) -> Self {
        let mu = S::one() - lambda.clone();
        Measure {
            weights: self.weights.iter().zip(&other.weights).map(|(a, b)| lambda.clone() * a.clone() + mu.clone() * b.clone()).collect(),
        }
    }

    pub fn support(&self) -> PointSet {
        (0..self.len()).filter(|&i| !self.weights[i].is_zero()).collect()
    }
}

/// `L(f) = max_i |⟨c_i, f⟩|`, with extra equality constraints `f(a) = f(b)`
/// (`L = ∞` when one fails).
#[derive(Clone, Debug, PartialEq)]
pub struct PolyhedralSeminorm<S> {
    pub dim: usize,
    pub functionals: Vec<Vec<S>>,
    pub equalities: Vec<(usize, usize)>,
    /// Present when this is the Lipschitz seminorm of a (pseudo)metric.
    pub metric: Option<FiniteMetricSpace<S>>,
}

impl<S: Scalar> PolyhedralSeminorm<S> {
    pub fn new(dim: usize, functionals: Vec<Vec<S>>, equalities: Vec<(usize, usize)>) -> Result<Self> {
        for c in &functionals {
            if c.len() != dim {
                return Err(Error::HostMismatch);
            }
            let s = c.iter().cloned().fold(S::zero(), |a, b| a + b);
            if !s.is_zero() {
                return Err(Error::PreconditionFailed("functional does not vanish on constants".into()));
            }
        }
        Ok(PolyhedralSeminorm { dim, functionals, equalities, metric: None })
    }

    pub fn eval(&self, f: &[S]) -> Ext<S> {
        assert_eq!(f.len(), self.dim);
        if self.equalities.iter().any(|&(a, b)| !f[a].approx_eq(&f[b])) {
            return Ext::Inf;
        }
        Ext::Fin(self.functionals.iter().map(|c| dot(c, f).abs()).fold(S::zero(), S::max_of))
    }
}

fn dot<S: Scalar>(c: &[S], f: &[S]) -> S {
    c.iter().zip(f).filter(|(a, _)| !a.is_zero()).fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
}

/// Functionals `(e_x − e_y)/d(x, y)` for `d > 0`; zero distances become
/// equality constraints.
pub fn lipschitz_seminorm_of<S: Scalar>(space: &FiniteMetricSpace<S>) -> PolyhedralSeminorm<S> {
    let n = space.len();
    let mut functionals = Vec::new();
    let mut equalities = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let d = space.d(i, j);
            if d.is_zero() {
                equalities.push((i, j));
                continue;
            }
            let mut c = vec![S::zero(); n];
            let inv = S::one() / d.clone();
            c[i] = inv.clone();
            c[j] = -inv;
            functionals.push(c);
        }
    }
    PolyhedralSeminorm { dim: n, functionals, equalities, metric: Some(space.clone()) }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum W1Method {
    Primal,
    Dual,
    Both,
}

/// Monge–Kantorovich distance; `+∞` when the seminorm does not control the
/// difference (e.g. disconnected supports).
pub fn w1<S: Scalar>(mu: &Measure<S>, nu: &Measure<S>, seminorm: &PolyhedralSeminorm<S>, method: W1Method) -> Result<Ext<S>> {
    if mu.len() != seminorm.dim || nu.len() != seminorm.dim {
        return Err(Error::HostMismatch);
    }
    match method {
        W1Method::Dual => w1_dual(mu, nu, seminorm),
        W1Method::Primal => {
            let space = seminorm.metric.as_ref().ok_or(Error::PrimalUnavailable)?;
            w1_primal(mu, nu, space).map(Ext::Fin)
        }
        W1Method::Both => {
            let dual = w1_dual(mu, nu, seminorm)?;
            let primal = w1(mu, nu, seminorm, W1Method::Primal)?;
            if !(dual.leq(&primal) && primal.leq(&dual)) {
                return Err(Error::Lp(format!("primal {primal} and dual {dual} disagree")));
            }
            Ok(dual)
        }
    }
}

/// `max ⟨μ−ν, f⟩` over `L(f) ≤ 1`.
pub fn w1_dual<S: Scalar>(mu: &Measure<S>, nu: &Measure<S>, seminorm: &PolyhedralSeminorm<S>) -> Result<Ext<S>> {
    let n = seminorm.dim;
    // merge equality classes, then pin the last class to 0
    let mut class: Vec<usize> = (0..n).collect();
    fn root(c: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while c[i] != i {
            c[i] = c[c[i]];
            i = c[i];
        }
        i
    }
    for &(a, b) in &seminorm.equalities {
        let (ra, rb) = (root(&mut class, a), root(&mut class, b));
        if ra != rb {
            class[ra.max(rb)] = ra.min(rb);
        }
    }
    let roots: Vec<usize> = (0..n).map(|i| root(&mut class, i)).collect();
    let mut reps: Vec<usize> = roots.clone();
    reps.sort_unstable();
    reps.dedup();
    if reps.is_empty() {
        return Ok(Ext::Fin(S::zero()));
    }
    let var_of = |i: usize| reps.binary_search(&roots[i]).unwrap();
    let nv = reps.len() - 1;
    let mut w = vec![S::zero(); reps.len()];
    for i in 0..n {
        let v = var_of(i);
        w[v] = w[v].clone() + mu.weights[i].clone() - nu.weights[i].clone();
    }
    let mut rows = Vec::new();
    for c in &seminorm.functionals {
        let mut row = vec![S::zero(); reps.len()];
        for i in 0..n {
            if !c[i].is_zero() {
                let v = var_of(i);
                row[v] = row[v].clone() + c[i].clone();
            }
        }
        row.truncate(nv);
        if row.iter().all(|v| v.is_zero()) {
            continue;
        }
        rows.push(row.iter().map(|v| -v.clone()).collect::<Vec<_>>());
        rows.push(row);
    }
    w.truncate(nv);
    if nv == 0 {
        return Ok(Ext::Fin(S::zero()));
    }
    let ones = vec![S::one(); rows.len()];
    match maximize_free(&w, &rows, &ones)? {
        LpOutcome::Optimal { value, .. } => Ok(Ext::Fin(value)),
        LpOutcome::Unbounded => Ok(Ext::Inf),
        LpOutcome::Infeasible => Err(Error::Lp("dual infeasible".into())),
    }
}

/// Minimal transport cost `Σ π_ij d(i, j)` with marginals `μ`, `ν`.
pub fn w1_primal<S: Scalar>(mu: &Measure<S>, nu: &Measure<S>, space: &FiniteMetricSpace<S>) -> Result<S> {
    let n = space.len();
    if mu.len() != n || nu.len() != n {
        return Err(Error::HostMismatch);
    }
    // only move mass from where μ exceeds ν to where ν exceeds μ
    let (mut src, mut dst) = (Vec::new(), Vec::new());
    for i in 0..n {
        let e = mu.weights[i].clone() - nu.weights[i].clone();
        if S::zero().less(&e) {
            src.push((i, e));
        } else if e.less(&S::zero()) {
            dst.push((i, -e));
        }
    }
    if src.is_empty() {
        return Ok(S::zero());
    }
    let (ns, nd) = (src.len(), dst.len());
    let mut c = Vec::with_capacity(ns * nd);
    for (i, _) in &src {
        for (j, _) in &dst {
            c.push(-space.d(*i, *j).clone());
        }
    }
    let mut a = Vec::with_capacity(ns + nd);
    let mut b = Vec::with_capacity(ns + nd);
    for (s, (_, e)) in src.iter().enumerate() {
        let mut row = vec![S::zero(); ns * nd];
        for t in 0..nd {
            row[s * nd + t] = S::one();
        }
        a.push(row);
        b.push(e.clone());
    }
    for (t, (_, e)) in dst.iter().enumerate() {
        let mut row = vec![S::zero(); ns * nd];
        for s in 0..ns {
            row[s * nd + t] = S::one();
        }
        a.push(row);
        b.push(e.clone());
    }
    match maximize_standard(&c, &a, &b)? {
        LpOutcome::Optimal { value, .. } => Ok(-value),
        other => Err(Error::Lp(format!("transport LP: {other:?}"))),
    }
}

/// `min_{ψ supported in S} W1(δ_z, ψ)`, which is `d(z, S)` by convexity.
pub fn dirac_to_pushforward_set<S: Scalar>(z: usize, set: &PointSet, space: &FiniteMetricSpace<S>) -> Ext<S> {
    dist_to_set(space, z, set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lipschitz::lip_constant;
    use crate::scalar::Q;

    fn z(n: i64) -> Q {
        Q::from_i64(n)
    }

    #[test]
    fn seminorm_examples() {
        let two = FiniteMetricSpace::from_line(&[z(0), z(1)]);
        let l = lipschitz_seminorm_of(&two);
        assert_eq!(l.functionals, vec![vec![z(1), z(-1)]]);
        let one = FiniteMetricSpace::from_line(&[z(3)]);
        let l1 = lipschitz_seminorm_of(&one);
        assert!(l1.functionals.is_empty());
        assert_eq!(l1.eval(&[z(7)]), Ext::Fin(z(0)));
        let s = FiniteMetricSpace::from_line(&[z(0), z(2), z(3)]);
        let f = vec![z(1), z(5), Q::new(1, 2)];
        assert_eq!(lipschitz_seminorm_of(&s).eval(&f), Ext::Fin(lip_constant(&s, &f).unwrap()));
    }

    #[test]
    fn w1_examples() {
        let two = FiniteMetricSpace::from_line(&[z(0), z(1)]);
        let l = lipschitz_seminorm_of(&two);
        let mu = Measure::new(vec![Q::new(1, 2), Q::new(1, 2)]).unwrap();
        let nu = Measure::dirac(2, 0);
        assert_eq!(w1(&mu, &nu, &l, W1Method::Both).unwrap(), Ext::Fin(Q::new(1, 2)));
        assert_eq!(w1(&nu, &nu, &l, W1Method::Both).unwrap(), Ext::Fin(z(0)));
        let s = FiniteMetricSpace::from_line(&[z(0), z(2), Q::new(7, 3), z(5)]);
        let ls = lipschitz_seminorm_of(&s);
        for i in 0..4 {
            for j in 0..4 {
                let v = w1(&Measure::dirac(4, i), &Measure::dirac(4, j), &ls, W1Method::Both).unwrap();
                assert_eq!(v, Ext::Fin(s.d(i, j).clone()));
            }
        }
    }

    #[test]
    fn w1_pseudometric_and_disconnected() {
        let p = FiniteMetricSpace::from_line(&[z(0), z(0), z(1)]);
        let l = lipschitz_seminorm_of(&p);
        let v = w1(&Measure::dirac(3, 0), &Measure::dirac(3, 1), &l, W1Method::Both).unwrap();
        assert_eq!(v, Ext::Fin(z(0)));
        let v = w1(&Measure::dirac(3, 1), &Measure::dirac(3, 2), &l, W1Method::Both).unwrap();
        assert_eq!(v, Ext::Fin(z(1)));
        let empty = PolyhedralSeminorm::<Q>::new(2, vec![], vec![]).unwrap();
        assert_eq!(w1(&Measure::dirac(2, 0), &Measure::dirac(2, 1), &empty, W1Method::Dual).unwrap(), Ext::Inf);
        assert_eq!(w1(&Measure::dirac(2, 0), &Measure::dirac(2, 1), &empty, W1Method::Primal), Err(Error::PrimalUnavailable));
    }

    #[test]
    fn measure_validation() {
        assert!(Measure::new(vec![Q::new(1, 2), Q::new(1, 3)]).is_err());
        assert!(Measure::new(vec![z(2), z(-1)]).is_err());
    }

    #[test]
    fn dirac_to_set() {
        let host = FiniteMetricSpace::from_line(&[z(0), Q::new(7, 3), z(2)]);
        let set = PointSet::new(vec![0, 1]);
        assert_eq!(dirac_to_pushforward_set(2, &set, &host), Ext::Fin(Q::new(1, 3)));
        assert_eq!(dirac_to_pushforward_set(1, &set, &host), Ext::Fin(z(0)));
        assert_eq!(dirac_to_pushforward_set(1, &PointSet::empty(), &host), Ext::Inf);
        // vertex measures of the set, through the LP
        let l = lipschitz_seminorm_of(&host);
        let best =
            set.iter().map(|s| w1(&Measure::dirac(3, 2), &Measure::dirac(3, s), &l, W1Method::Dual).unwrap()).fold(Ext::Inf, Ext::min_of);
        assert_eq!(best, Ext::Fin(Q::new(1, 3)));
    }
}
