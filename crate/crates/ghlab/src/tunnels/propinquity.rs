//! Local propinquity `Λ_r` over a searched family of passages, and the
//! propinquity built from it.

use std::cmp::Ordering;
use std::fmt;

use super::{existence_tunnel, extent_capped, ClassicalPPQMS, Passage};
use crate::error::Result;
use crate::gluing::{correspondence_distortion, correspondences_for, relation_cross, GluedSpace, Search};
use crate::local_gh::{big_delta_r, DeltaSearch};
use crate::metric_core::PointedSpace;
use crate::scalar::{Ext, Scalar};

/// Which passages the local propinquity searches.
#[derive(Clone, Debug, PartialEq)]
pub struct PropSearch {
    /// Enumerate every correspondence when `|X|·|Y|` is at most this.
    pub budget: usize,
    /// Otherwise sample this many correspondences from `seed`.
    pub seed: u64,
    pub samples: usize,
    /// Also try the tunnel of [`existence_tunnel`] at the requested radius.
    pub existence: bool,
    /// Also try the relation of an exact `Δ_r` search at the larger
    /// diameter, given this many search nodes (0 disables).
    pub refine_nodes: usize,
}

impl Default for PropSearch {
    fn default() -> Self {
        PropSearch { budget: 9, seed: 0, samples: 64, existence: true, refine_nodes: 200_000 }
    }
}

impl PropSearch {
    pub fn exhaustive_for(&self, nx: usize, ny: usize) -> bool {
        nx * ny <= self.budget
    }
}

/// Correspondence gluings at `η = dis/2` and `η = dis`, without duplicate
/// cross matrices, sorted by basepoint gap.
pub fn candidate_passages<S: Scalar>(x: &PointedSpace<S>, y: &PointedSpace<S>, search: &PropSearch) -> Result<Vec<Passage<S>>> {
    let mode = if search.exhaustive_for(x.len(), y.len()) {
        Search::Exact { budget: search.budget }
    } else {
        Search::Heuristic { seed: search.seed, samples: search.samples }
    };
    let mut rels = correspondences_for(x.len(), y.len(), &mode)?;
    if search.refine_nodes > 0 {
        let r = x.space.diameter().max_of(y.space.diameter()).max_of(S::one());
        if let Ok(d) = big_delta_r(x, y, &r, &DeltaSearch::Exact { nodes: search.refine_nodes }) {
            rels.push(d.relation);
        }
    }
    let mut seen: Vec<Vec<Vec<S>>> = Vec::new();
    let mut out = Vec::new();
    for rel in rels {
        let half = correspondence_distortion(&rel, &x.space, &y.space).half();
        for eta in [half.clone(), half.clone() + half.clone()] {
            let cross = relation_cross(x, y, &rel, &eta);
            if seen.contains(&cross) {
                continue;
            }
            out.push(Passage::metric(GluedSpace::from_cross_unchecked(x, y, &cross)));
            seen.push(cross);
        }
    }
    out.sort_by(|a, b| a.carrier.base_gap().cmp_total(b.carrier.base_gap()));
    Ok(out)
}

/// `Λ_r` over the searched family: an upper bound on the local propinquity.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalPropinquity<S> {
    pub value: Ext<S>,
    pub witness: Option<Passage<S>>,
    /// An admissible `ε` for the witness.
    pub witness_eps: Option<S>,
    pub candidates: usize,
    /// Whether every correspondence was enumerated.
    pub exhaustive: bool,
}

fn order_key<S: Scalar>(a: &PointedSpace<S>, b: &PointedSpace<S>) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        for i in 0..a.len() {
            for j in 0..a.len() {
                match a.space.d(i, j).cmp_total(b.space.d(i, j)) {
                    Ordering::Equal => {}
                    o => return o,
                }
            }
        }
        a.basepoint.cmp(&b.basepoint)
    })
}

fn best_of<S: Scalar>(cands: &[Passage<S>], r: &S) -> Result<(Ext<S>, Option<usize>, Option<S>)> {
    let mut best: Ext<S> = Ext::Inf;
    let mut who = None;
    let mut eps = None;
    for (i, p) in cands.iter().enumerate() {
        if let Ext::Fin(b) = &best {
            if !p.carrier.base_gap().less(b) {
                break;
            }
        }
        if let Some(e) = extent_capped(p, r, best.finite())? {
            if e.value.is_inf() {
                continue;
            }
            best = e.value;
            who = Some(i);
            eps = e.witness;
        }
    }
    Ok((best, who, eps))
}

/// `Λ_r(X, Y)`, searched in a fixed orientation so that swapping the
/// arguments returns the inverse witness and the same value.
pub fn local_propinquity<S: Scalar>(x: &PointedSpace<S>, y: &PointedSpace<S>, r: &S, search: &PropSearch) -> Result<LocalPropinquity<S>> {
    if order_key(x, y) == Ordering::Greater {
        let mut out = local_propinquity(y, x, r, search)?;
        out.witness = out.witness.map(|p| p.inverse());
        return Ok(out);
    }
    let mut cands = candidate_passages(x, y, search)?;
    if search.existence {
        if let (Ok(a), Ok(b)) = (ClassicalPPQMS::new(x.clone()), ClassicalPPQMS::new(y.clone())) {
            if let Ok(e) = existence_tunnel(&a, &b, r) {
                cands.push(e.passage);
                cands.sort_by(|a, b| a.carrier.base_gap().cmp_total(b.carrier.base_gap()));
            }
        }
    }
    let (value, who, eps) = best_of(&cands, r)?;
    Ok(LocalPropinquity {
        value,
        witness: who.map(|i| cands[i].clone()),
        witness_eps: eps,
        candidates: cands.len(),
        exhaustive: search.exhaustive_for(x.len(), y.len()),
    })
}

/// `a + b√2` with rational `a`, `b`, compared exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct Surd<S> {
    pub a: S,
    pub b: S,
}

impl<S: Scalar> Surd<S> {
    pub fn rational(a: S) -> Self {
        Surd { a, b: S::zero() }
    }

    /// `√2/4`.
    pub fn floor() -> Self {
        Surd { a: S::zero(), b: S::ratio(1, 4) }
    }

    pub fn add(&self, o: &Surd<S>) -> Self {
        Surd { a: self.a.clone() + o.a.clone(), b: self.b.clone() + o.b.clone() }
    }

    pub fn scale(&self, k: &S) -> Self {
        Surd { a: self.a.clone() * k.clone(), b: self.b.clone() * k.clone() }
    }

    /// `self ≤ other`, by the sign of `p + q√2`.
    pub fn leq(&self, o: &Surd<S>) -> bool {
        let p = self.a.clone() - o.a.clone();
        let q = self.b.clone() - o.b.clone();
        let zero = S::zero();
        let p2 = p.clone() * p.clone();
        let q2 = q.clone() * q.clone();
        let two_q2 = q2.clone() + q2;
        if q.is_zero() {
            p.leq(&zero)
        } else if zero.less(&q) {
            p.leq(&zero) && two_q2.leq(&p2)
        } else {
            p.leq(&zero) || p2.leq(&two_q2)
        }
    }

    pub fn max_of(self, o: Surd<S>) -> Self {
        if self.leq(&o) {
            o
        } else {
            self
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.a.to_f64() + self.b.to_f64() * std::f64::consts::SQRT_2
    }
}

impl<S: Scalar> fmt::Display for Surd<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}*sqrt(2)", self.b),
            _ => write!(f, "{} + {}*sqrt(2)", self.a, self.b),
        }
    }
}

/// Propinquity of a pair: the raw infimum of `{ε : Λ_{1/ε} < ε}` as a
/// bracket `[lo, hi]`, and `max(hi, √2/4)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Propinquity<S> {
    pub lo: S,
    /// Upper end of the bracket; `Inf` when no `ε` was found.
    pub raw: Ext<S>,
    pub truncated: Option<Surd<S>>,
    /// `Λ_r` is constant for `r` at least this (the larger diameter).
    pub saturation_radius: S,
    pub exhaustive: bool,
}

/// For `r` at least both diameters all balls stop changing and `Λ_r` is
/// constant; below `1/r_sat` the predicate reduces to `Λ_sat < ε`. Above, it
/// is bisected on dyadic points, the candidate passages being built once.
pub fn propinquity<S: Scalar>(x: &PointedSpace<S>, y: &PointedSpace<S>, search: &PropSearch, iters: usize) -> Result<Propinquity<S>> {
    if order_key(x, y) == Ordering::Greater {
        return propinquity(y, x, search, iters);
    }
    let cands = candidate_passages(x, y, search)?;
    let exhaustive = search.exhaustive_for(x.len(), y.len());
    let r_sat = x.space.diameter().max_of(y.space.diameter());
    let lambda = |r: &S| -> Result<Ext<S>> { Ok(best_of(&cands, r)?.0) };
    let sat = lambda(&if r_sat.is_zero() { S::one() } else { r_sat.clone() })?;
    let done = |lo: S, raw: Ext<S>| {
        let truncated = raw.finite().map(|v| Surd::rational(v.clone()).max_of(Surd::floor()));
        Ok(Propinquity { lo, raw, truncated, saturation_radius: r_sat.clone(), exhaustive })
    };
    if let Ext::Fin(s) = &sat {
        if s.is_zero() {
            return done(S::zero(), Ext::Fin(S::zero()));
        }
    }
    let holds = |e: &S| -> Result<bool> { Ok(lambda(&(S::one() / e.clone()))?.finite().is_some_and(|v| v.less(e))) };
    let mut lo = match (&sat, r_sat.is_zero()) {
        (_, true) => S::zero(),
        (Ext::Fin(s), false) => s.clone().min_of(S::one() / r_sat.clone()),
        (Ext::Inf, false) => S::one() / r_sat.clone(),
    };
    let mut hi = lo.clone().max_of(S::one()) + lo.clone();
    let mut found = false;
    for _ in 0..64 {
        if holds(&hi)? {
            found = true;
            break;
        }
        lo = hi.clone();
        hi = hi.clone() + hi.clone();
    }
    if !found {
        return done(lo, Ext::Inf);
    }
    for _ in 0..iters {
        let mid = (lo.clone() + hi.clone()).half();
        if holds(&mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    done(lo, Ext::Fin(hi))
}

/// `Λ(A,B) ≤ 2(Λ(A,D) + Λ(D,B))` on truncated values, read conservatively:
/// the upper end of the left bracket against the lower ends on the right.
pub fn propinquity_triangle<S: Scalar>(ab: &Propinquity<S>, ad: &Propinquity<S>, db: &Propinquity<S>) -> bool {
    let Some(left) = ab.truncated.clone() else { return ad.raw.is_inf() || db.raw.is_inf() };
    let lower = |p: &Propinquity<S>| Surd::rational(p.lo.clone()).max_of(Surd::floor());
    left.leq(&lower(ad).add(&lower(db)).scale(&S::from_i64(2)))
}
