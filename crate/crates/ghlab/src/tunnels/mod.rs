//! Passages between pointed finite spaces: admissibility, extent, lift and
//! target bounds, composition, the local propinquity and the propinquity.
//!
//! For `C₀(X)` with the Lipschitz seminorm every state condition reduces to
//! Dirac measures, so each clause becomes a statement about distances in the
//! carrier. A passage is a gluing; a composed passage is also stored as a
//! gluing, whose host is the path metric that induces the composed seminorm.

mod compose;
mod lift;
mod propinquity;

pub use compose::{compose, compose_contract, existence_tunnel, ComposeReport, Composition, Existence};
pub use lift::{check_inversion, is_target, lift_target_bounds, verify_fundamental, FundamentalReport, TargetBounds};
pub use propinquity::{
    candidate_passages, local_propinquity, propinquity, propinquity_triangle, LocalPropinquity, PropSearch, Propinquity, Surd,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gluing::GluedSpace;
use crate::metric_core::{dist_to_set, validate_metric, PointSet, PointedSpace, Strictness};
use crate::scalar::{sort_dedup, Ext, Scalar};

/// A pointed finite metric space read as `(C(X), Lip, C(X), x0)`. For finite
/// spaces every requirement on such a quadruple holds once the distance is a
/// metric, which is what the constructor checks.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalPPQMS<S> {
    pub pointed: PointedSpace<S>,
}

impl<S: Scalar> ClassicalPPQMS<S> {
    pub fn new(pointed: PointedSpace<S>) -> Result<Self> {
        validate_metric(pointed.space.matrix(), Strictness::Metric)?;
        Ok(ClassicalPPQMS { pointed })
    }
}

/// A passage from `carrier.x` to `carrier.y`.
#[derive(Clone, Debug, PartialEq)]
pub struct Passage<S> {
    pub carrier: GluedSpace<S>,
    /// Present for passages built by [`compose`].
    pub composition: Option<Box<Composition<S>>>,
}

impl<S: Scalar> Passage<S> {
    pub fn metric(carrier: GluedSpace<S>) -> Self {
        Passage { carrier, composition: None }
    }

    pub fn identity(x: &PointedSpace<S>) -> Self {
        Passage::metric(GluedSpace::identity(x))
    }

    pub fn domain(&self) -> &PointedSpace<S> {
        &self.carrier.x
    }

    pub fn codomain(&self) -> &PointedSpace<S> {
        &self.carrier.y
    }

    pub fn inverse(&self) -> Self {
        Passage { carrier: self.carrier.inverse(), composition: self.composition.as_ref().map(|c| Box::new(c.inverse())) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
    Base,
}

/// First violated clause: which side, at which `t`, which clause and the
/// carrier point witnessing it.
#[derive(Clone, Debug, PartialEq)]
pub struct ClauseFailure<S> {
    pub side: Side,
    pub t: S,
    pub clause: u8,
    pub point: usize,
}

impl<S: Scalar> ClauseFailure<S> {
    pub fn describe(&self) -> String {
        let side = match self.side {
            Side::Left => "left",
            Side::Right => "right",
            Side::Base => "basepoint",
        };
        format!("{side} clause {} fails at t={} (point {})", self.clause, self.t.to_f64(), self.point)
    }
}

/// `(ε, K)` checked at radius `r` on the left side only.
pub fn check_left_admissible<S: Scalar>(p: &Passage<S>, r: &S, eps: &S, k: &PointSet) -> Result<Option<ClauseFailure<S>>> {
    check_params(p, r, eps)?;
    if let Some(&i) = k.indices().iter().find(|&&i| i >= p.carrier.host.len()) {
        return Err(Error::PreconditionFailed(format!("K contains {i}, outside the carrier")));
    }
    Ok(left_clauses(&p.carrier, r, eps, k).map(|(clause, point)| ClauseFailure { side: Side::Left, t: r.clone(), clause, point }))
}

fn check_params<S: Scalar>(_p: &Passage<S>, r: &S, eps: &S) -> Result<()> {
    if !S::zero().less(r) {
        return Err(Error::PreconditionFailed("r must be positive".into()));
    }
    if !S::zero().less(eps) {
        return Err(Error::PreconditionFailed("eps must be positive".into()));
    }
    Ok(())
}

/// Clauses 1–3 at radius `t`; clauses 4 and 5 hold for every gluing.
fn left_clauses<S: Scalar>(g: &GluedSpace<S>, t: &S, eps: &S, k: &PointSet) -> Option<(u8, usize)> {
    let h = &g.host;
    if let Some(z) = g.ball_x(t).iter().find(|&z| !k.contains(z)) {
        return Some((1, z));
    }
    let far = t.clone() + four(eps);
    let target = g.ball_x(&far);
    if let Some(z) = k.iter().find(|&z| !dist_to_set(h, z, &target).leq_fin(eps)) {
        return Some((2, z));
    }
    let outside_y = g.y.ball(&far).complement(g.y.len()).map(&g.embed_y);
    let zero = k.complement(h.len()).union(&outside_y);
    let outside_x = g.x.ball(t).complement(g.x.len());
    for x in 0..g.x.len() {
        let escape = dist_to_set(&g.x.space, x, &outside_x);
        let reach = dist_to_set(h, g.embed_x[x], &zero);
        if !escape.leq(&reach) {
            return Some((3, g.embed_x[x]));
        }
    }
    None
}

pub(crate) fn four<S: Scalar>(e: &S) -> S {
    let two = e.clone() + e.clone();
    two.clone() + two
}

/// Families `t ↦ K_t` tried by [`check_admissible`].
#[derive(Clone, Debug, PartialEq)]
pub enum KFamily {
    /// `ι_X ball_X(t+2ε) ∪ ι_Y ball_Y(t+2ε)`.
    Canonical,
    /// Every carrier point within `ε` of both `ι_X ball_X(t+4ε)` and
    /// `ι_Y ball_Y(t+4ε)`. Clause 2 on both sides forces `K_t` inside this
    /// set, and enlarging `K` only helps clauses 1 and 3, so `ε` is
    /// admissible iff it is admissible with this family.
    Maximal,
    /// For composed passages: the maximal families of both factors, side by
    /// side, each at its own `ε`.
    Composite,
}

impl KFamily {
    pub fn k_at<S: Scalar>(&self, p: &Passage<S>, t: &S, eps: &S) -> PointSet {
        let g = &p.carrier;
        match self {
            KFamily::Canonical => {
                let s = t.clone() + eps.clone() + eps.clone();
                g.ball_x(&s).union(&g.ball_y(&s))
            }
            KFamily::Maximal => maximal_k(g, t, eps),
            KFamily::Composite => {
                let c = p.composition.as_ref().expect("composite family needs a composed passage");
                c.k_at(t)
            }
        }
    }
}

pub(crate) fn maximal_k<S: Scalar>(g: &GluedSpace<S>, t: &S, eps: &S) -> PointSet {
    let s = t.clone() + four(eps);
    let bx = g.ball_x(&s);
    let by = g.ball_y(&s);
    (0..g.host.len()).filter(|&z| dist_to_set(&g.host, z, &bx).leq_fin(eps) && dist_to_set(&g.host, z, &by).leq_fin(eps)).collect()
}

/// Result of checking a whole family on `(0, r]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Admissibility<S> {
    pub failure: Option<ClauseFailure<S>>,
    /// Values of `t` at which the clauses were evaluated.
    pub checked: Vec<S>,
}

impl<S> Admissibility<S> {
    pub fn holds(&self) -> bool {
        self.failure.is_none()
    }
}

/// Values of `t` covering `(0, r]`: every set in the clauses is a closed ball
/// in `t` (a right-continuous step function), so one check per step
/// suffices. The first step is represented by `t = 0`, where closed balls
/// equal their limit from the right.
fn t_grid<S: Scalar>(p: &Passage<S>, r: &S, eps: &S) -> Vec<S> {
    let mut radii: Vec<S> = p.domain().radii();
    radii.extend(p.codomain().radii());
    let mut shifts = vec![S::zero(), eps.clone() + eps.clone(), four(eps)];
    if let Some(c) = &p.composition {
        radii.extend(c.middle_radii());
        shifts.extend(c.shifts());
    }
    let mut ts = vec![S::zero(), r.clone()];
    for d in &radii {
        for s in &shifts {
            let t = d.clone() - s.clone();
            if S::zero().less(&t) && t.leq(r) {
                ts.push(t);
            }
        }
    }
    sort_dedup(&mut ts);
    ts
}

/// Checks `ε` at radius `r` with the given family: left and right clauses at
/// every `t` of the grid, plus the basepoint condition.
pub fn check_admissible<S: Scalar>(p: &Passage<S>, r: &S, eps: &S, family: &KFamily) -> Result<Admissibility<S>> {
    check_params(p, r, eps)?;
    if matches!(family, KFamily::Composite) && p.composition.is_none() {
        return Err(Error::PreconditionFailed("composite family needs a composed passage".into()));
    }
    let g = &p.carrier;
    let checked = t_grid(p, r, eps);
    if !g.base_gap().leq(eps) {
        let failure = ClauseFailure { side: Side::Base, t: r.clone(), clause: 0, point: g.x0() };
        return Ok(Admissibility { failure: Some(failure), checked: vec![] });
    }
    let inv = g.inverse();
    for t in &checked {
        let k = family.k_at(p, t, eps);
        for (side, carrier) in [(Side::Left, g), (Side::Right, &inv)] {
            if let Some((clause, point)) = left_clauses(carrier, t, eps, &k) {
                let failure = ClauseFailure { side, t: t.clone(), clause, point };
                return Ok(Admissibility { failure: Some(failure), checked });
            }
        }
    }
    Ok(Admissibility { failure: None, checked })
}

/// `inf Adm(τ|r)` together with an admissible `ε`.
#[derive(Clone, Debug, PartialEq)]
pub struct Extent<S> {
    pub value: Ext<S>,
    /// An admissible `ε`; equal to `value` when the infimum is attained.
    pub witness: Option<S>,
    /// Upper end of the interval `(value, end)` on which every `ε` is
    /// admissible, when the infimum is not attained.
    pub interval_end: Option<Ext<S>>,
}

impl<S: Scalar> Extent<S> {
    pub fn attained(&self) -> bool {
        match (&self.value, &self.witness) {
            (Ext::Fin(v), Some(w)) => v == w,
            _ => false,
        }
    }

    /// An admissible `ε` at most `slack` above the extent.
    pub fn admissible_within(&self, slack: &S) -> Option<S> {
        let v = self.value.finite()?.clone();
        if self.attained() {
            return Some(v);
        }
        let step = match &self.interval_end {
            Some(Ext::Fin(e)) => (e.clone() - v.clone()).half().min_of(slack.clone()),
            _ => slack.clone(),
        };
        Some(v + step)
    }
}

/// Values of `ε` at which admissibility can change.
///
/// Every comparison in the clauses is between carrier distances and `ε`, or
/// between a basepoint distance `d` and `t + kε` with `t` on the grid, i.e.
/// `t ∈ {0, r} ∪ {d' − jε}`, `j, k ∈ {0, 2, 4}`.
fn critical_eps<S: Scalar>(p: &Passage<S>, r: &S) -> Vec<S> {
    let g = &p.carrier;
    let h = &g.host;
    let mut radii: Vec<S> = p.domain().radii();
    radii.extend(p.codomain().radii());
    sort_dedup(&mut radii);
    let mut c = vec![S::zero(), g.base_gap().clone()];
    for i in 0..h.len() {
        for j in i + 1..h.len() {
            c.push(h.d(i, j).clone());
        }
    }
    let two = S::from_i64(2);
    let four = S::from_i64(4);
    for a in &radii {
        for den in [&two, &four] {
            c.push(a.clone() / den.clone());
            c.push((a.clone() - r.clone()) / den.clone());
            for b in &radii {
                c.push((a.clone() - b.clone()) / den.clone());
            }
        }
    }
    c.retain(|v| !v.less(g.base_gap()));
    sort_dedup(&mut c);
    c
}

/// Exact extent by scanning the critical values upward; on each open
/// interval between them admissibility is constant.
pub fn extent<S: Scalar>(p: &Passage<S>, r: &S) -> Result<Extent<S>> {
    Ok(extent_capped(p, r, None)?.unwrap_or(Extent { value: Ext::Inf, witness: None, interval_end: None }))
}

/// As [`extent`], giving up with `None` once no value below `cap` remains.
pub fn extent_capped<S: Scalar>(p: &Passage<S>, r: &S, cap: Option<&S>) -> Result<Option<Extent<S>>> {
    if !S::zero().less(r) {
        return Err(Error::NonPositiveRadius);
    }
    if p.composition.is_some() && !composed_ok(p) {
        return Err(Error::PreconditionFailed("composed passage is inconsistent".into()));
    }
    let c = critical_eps(p, r);
    let ok = |e: &S| -> Result<bool> { Ok(check_admissible(p, r, e, &KFamily::Maximal)?.holds()) };
    for (i, ci) in c.iter().enumerate() {
        if cap.is_some_and(|m| !ci.less(m)) {
            return Ok(None);
        }
        if S::zero().less(ci) && ok(ci)? {
            return Ok(Some(Extent { value: Ext::Fin(ci.clone()), witness: Some(ci.clone()), interval_end: None }));
        }
        let (mid, end) = match c.get(i + 1) {
            Some(n) => ((ci.clone() + n.clone()).half(), Ext::Fin(n.clone())),
            None => (ci.clone() + ci.clone() + S::one(), Ext::Inf),
        };
        if ok(&mid)? {
            return Ok(Some(Extent { value: Ext::Fin(ci.clone()), witness: Some(mid), interval_end: Some(end) }));
        }
    }
    Ok(cap.map_or(Some(Extent { value: Ext::Inf, witness: None, interval_end: None }), |_| None))
}

fn composed_ok<S: Scalar>(p: &Passage<S>) -> bool {
    p.composition.as_ref().is_some_and(|c| c.size() == p.carrier.host.len())
}

/// Smallest admissible value on a uniform grid `step, 2·step, …, steps·step`.
/// Oracle for [`extent`].
pub fn extent_grid<S: Scalar>(p: &Passage<S>, r: &S, step: &S, steps: usize) -> Result<Option<S>> {
    let mut e = step.clone();
    for _ in 0..steps {
        if check_admissible(p, r, &e, &KFamily::Maximal)?.holds() {
            return Ok(Some(e));
        }
        e = e + step.clone();
    }
    Ok(None)
}
