//! Lift and target bounds, and the checks built on them.

use super::{check_left_admissible, four, Passage};
use crate::error::{Error, Result};
use crate::gluing::GluedSpace;
use crate::lipschitz::{lip_constant, sup_norm};
use crate::metric_core::PointSet;
use crate::scalar::Scalar;

/// Pointwise envelope of the lift set over the carrier, and its restriction
/// to the codomain (the target bounds). The two envelopes are themselves
/// lifts whenever the set is feasible.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetBounds<S> {
    pub lo: Vec<S>,
    pub hi: Vec<S>,
    pub target_lo: Vec<S>,
    pub target_hi: Vec<S>,
    pub feasible: bool,
}

impl<S: Scalar> TargetBounds<S> {
    pub fn contains_target(&self, b: &[S]) -> bool {
        b.len() == self.target_lo.len() && b.iter().zip(&self.target_lo).zip(&self.target_hi).all(|((v, lo), hi)| lo.leq(v) && v.leq(hi))
    }

    /// `max_y (hi(y) − lo(y))` over the codomain.
    pub fn target_width(&self) -> S {
        self.target_lo.iter().zip(&self.target_hi).map(|(lo, hi)| hi.clone() - lo.clone()).fold(S::zero(), S::max_of)
    }
}

/// McShane envelopes through the anchors `(ι_X x, a(x))` and `(z, 0)` for
/// `z` in the zero set `(carrier ∖ K) ∪ ι_Y(Y ∖ ball_Y(r+4ε))`.
pub(crate) fn bounds_raw<S: Scalar>(g: &GluedSpace<S>, a: &[S], l: &S, r: &S, eps: &S, k: &PointSet) -> TargetBounds<S> {
    let h = &g.host;
    let zero = zero_set(g, r, eps, k);
    let anchors: Vec<(usize, S)> = g.embed_x.iter().cloned().zip(a.iter().cloned()).chain(zero.iter().map(|z| (z, S::zero()))).collect();
    let mut lo = Vec::with_capacity(h.len());
    let mut hi = Vec::with_capacity(h.len());
    for z in 0..h.len() {
        let mut up: Option<S> = None;
        let mut down: Option<S> = None;
        for (p, v) in &anchors {
            let d = l.clone() * h.d(*p, z).clone();
            let u = v.clone() + d.clone();
            let w = v.clone() - d;
            up = Some(up.map_or(u.clone(), |m| m.min_of(u)));
            down = Some(down.map_or(w.clone(), |m| m.max_of(w)));
        }
        lo.push(down.expect("anchors"));
        hi.push(up.expect("anchors"));
    }
    let feasible = lo.iter().zip(&hi).all(|(a, b)| a.leq(b));
    let target_lo = g.embed_y.iter().map(|&j| lo[j].clone()).collect();
    let target_hi = g.embed_y.iter().map(|&j| hi[j].clone()).collect();
    TargetBounds { lo, hi, target_lo, target_hi, feasible }
}

fn check_function<S: Scalar>(p: &Passage<S>, a: &[S], l: &S, r: &S) -> Result<()> {
    let x = p.domain();
    if a.len() != x.len() {
        return Err(Error::HostMismatch);
    }
    if !lip_constant(&x.space, a)?.leq(l) {
        return Err(Error::PreconditionFailed("Lipschitz constant exceeds l".into()));
    }
    let ball = x.ball(r);
    if let Some(i) = (0..a.len()).find(|&i| !a[i].is_zero() && !ball.contains(i)) {
        return Err(Error::SupportViolation(i));
    }
    Ok(())
}

/// Lift and target bounds of `a` at `(l, r, ε, K)`. Requires `lip(a) ≤ l`,
/// `supp a ⊆ ball_X(r)` and `(ε, K)` r-left admissible; an empty lift set
/// under these conditions is reported as `Infeasible`.
pub fn lift_target_bounds<S: Scalar>(p: &Passage<S>, a: &[S], l: &S, r: &S, eps: &S, k: &PointSet) -> Result<TargetBounds<S>> {
    check_function(p, a, l, r)?;
    if let Some(f) = check_left_admissible(p, r, eps, k)? {
        return Err(Error::PreconditionFailed(format!("(eps, K) not admissible: {}", f.describe())));
    }
    let b = bounds_raw(&p.carrier, a, l, r, eps, k);
    if !b.feasible {
        return Err(Error::Infeasible);
    }
    Ok(b)
}

/// Outcome of [`verify_fundamental`], one flag per inequality.
#[derive(Clone, Debug, PartialEq)]
pub struct FundamentalReport<S> {
    /// `‖b‖ ≤ ‖a‖ + lε` for the extreme lifts of `a` and of `a′`.
    pub norm_bound: bool,
    /// `b + t·b′` lies in the target bounds of `a + t·a′` at level `(1+|t|)l`.
    pub linearity: bool,
    /// Largest pointwise width of the target bounds of `a`.
    pub diameter: S,
    /// `diameter ≤ 2lε`.
    pub diameter_bound: bool,
    /// `b·b′` lies in the target bounds of `a·a′` at level `l(‖a‖+‖a′‖+2lε)`.
    pub jordan: bool,
    /// The bracket of commuting functions vanishes; nothing to compute.
    pub lie: bool,
}

impl<S> FundamentalReport<S> {
    pub fn all(&self) -> bool {
        self.norm_bound && self.linearity && self.diameter_bound && self.jordan && self.lie
    }
}

#[allow(clippy::too_many_arguments)]
pub fn verify_fundamental<S: Scalar>(
    p: &Passage<S>,
    a: &[S],
    a2: &[S],
    l: &S,
    r: &S,
    eps: &S,
    k: &PointSet,
    t: &S,
) -> Result<FundamentalReport<S>> {
    let g = &p.carrier;
    let b1 = lift_target_bounds(p, a, l, r, eps, k)?;
    let b2 = lift_target_bounds(p, a2, l, r, eps, k)?;
    let restrict = |f: &[S]| -> Vec<S> { g.embed_y.iter().map(|&j| f[j].clone()).collect() };
    let lifts1 = [restrict(&b1.lo), restrict(&b1.hi)];
    let lifts2 = [restrict(&b2.lo), restrict(&b2.hi)];
    let le = l.clone() * eps.clone();
    let (n1, n2) = (sup_norm(a), sup_norm(a2));
    let norm_bound = lifts1.iter().all(|b| sup_norm(b).leq(&(n1.clone() + le.clone())))
        && lifts2.iter().all(|b| sup_norm(b).leq(&(n2.clone() + le.clone())));

    let comb: Vec<S> = a.iter().zip(a2).map(|(u, v)| u.clone() + t.clone() * v.clone()).collect();
    let level = (S::one() + t.abs()) * l.clone();
    let bc = lift_target_bounds(p, &comb, &level, r, eps, k)?;
    let linearity = lifts1.iter().all(|b| {
        lifts2.iter().all(|b2| {
            let s: Vec<S> = b.iter().zip(b2).map(|(u, v)| u.clone() + t.clone() * v.clone()).collect();
            bc.contains_target(&s)
        })
    });

    let diameter = b1.target_width();
    let two_le = le.clone() + le.clone();
    let diameter_bound = diameter.leq(&two_le);

    let prod: Vec<S> = a.iter().zip(a2).map(|(u, v)| u.clone() * v.clone()).collect();
    let plevel = l.clone() * (n1 + n2 + two_le);
    let bp = lift_target_bounds(p, &prod, &plevel, r, eps, k)?;
    let jordan = lifts1.iter().all(|b| {
        lifts2.iter().all(|b2| {
            let s: Vec<S> = b.iter().zip(b2).map(|(u, v)| u.clone() * v.clone()).collect();
            bp.contains_target(&s)
        })
    });
    Ok(FundamentalReport { norm_bound, linearity, diameter, diameter_bound, jordan, lie: true })
}

/// Whether some `l`-Lipschitz function on the carrier takes the given values.
fn interpolable<S: Scalar>(g: &GluedSpace<S>, anchors: &[(usize, S)], l: &S) -> bool {
    anchors
        .iter()
        .enumerate()
        .all(|(i, (p, u))| anchors[i + 1..].iter().all(|(q, v)| (u.clone() - v.clone()).abs().leq(&(l.clone() * g.host.d(*p, *q).clone()))))
}

fn zero_set<S: Scalar>(g: &GluedSpace<S>, r: &S, eps: &S, k: &PointSet) -> PointSet {
    let far = r.clone() + four(eps);
    let outside_y = g.y.ball(&far).complement(g.y.len()).map(&g.embed_y);
    k.complement(g.host.len()).union(&outside_y)
}

/// Whether `b` is the codomain restriction of a lift of `a` at `(l, r, ε, K)`.
pub fn is_target<S: Scalar>(g: &GluedSpace<S>, a: &[S], b: &[S], l: &S, r: &S, eps: &S, k: &PointSet) -> bool {
    let anchors: Vec<(usize, S)> = g
        .embed_x
        .iter()
        .cloned()
        .zip(a.iter().cloned())
        .chain(g.embed_y.iter().cloned().zip(b.iter().cloned()))
        .chain(zero_set(g, r, eps, k).iter().map(|z| (z, S::zero())))
        .collect();
    interpolable(g, &anchors, l)
}

/// If `b` is a target of `a` under `τ` at `(l, r, ε, K)`, then `a` is a
/// target of `b` under `τ⁻¹` at `(l, r+4ε, ε, K)`. Returns `None` when the
/// premise fails.
pub fn check_inversion<S: Scalar>(p: &Passage<S>, a: &[S], b: &[S], l: &S, r: &S, eps: &S, k: &PointSet) -> Result<Option<bool>> {
    check_function(p, a, l, r)?;
    if b.len() != p.codomain().len() {
        return Err(Error::HostMismatch);
    }
    if !is_target(&p.carrier, a, b, l, r, eps, k) {
        return Ok(None);
    }
    let wide = r.clone() + four(eps);
    Ok(Some(is_target(&p.carrier.inverse(), b, a, l, &wide, eps, k)))
}

#[cfg(test)]
mod tests {
    use super::super::tests::two_points;
    use super::*;
    use crate::scalar::Q;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n, d)
    }

    #[test]
    fn zero_function_bounds() {
        let p = two_points(q(1, 10));
        let all = PointSet::new(vec![0, 1]);
        let b = lift_target_bounds(&p, &[q(0, 1)], &q(1, 1), &q(1, 1), &q(1, 10), &all).unwrap();
        assert!(b.feasible);
        assert!(b.contains_target(&[q(0, 1)]));
    }

    #[test]
    fn one_point_target_interval() {
        let p = two_points(q(1, 10));
        let all = PointSet::new(vec![0, 1]);
        let (c, l, eps) = (q(3, 1), q(2, 1), q(1, 10));
        let b = lift_target_bounds(&p, std::slice::from_ref(&c), &l, &q(1, 1), &eps, &all).unwrap();
        assert_eq!(b.target_lo, vec![c.clone() - q(1, 5)]);
        assert_eq!(b.target_hi, vec![c.clone() + q(1, 5)]);
        assert_eq!(b.target_width(), q(2, 1) * l.clone() * eps.clone());
        let rep = verify_fundamental(&p, std::slice::from_ref(&c), &[q(-1, 1)], &l, &q(1, 1), &eps, &all, &q(1, 2)).unwrap();
        assert!(rep.all());
        assert_eq!(rep.diameter, q(2, 5));
    }

    #[test]
    fn preconditions() {
        let p = two_points(q(1, 10));
        let all = PointSet::new(vec![0, 1]);
        let e = lift_target_bounds(&p, &[q(0, 1)], &q(1, 1), &q(1, 1), &q(1, 20), &all);
        assert!(matches!(e, Err(Error::PreconditionFailed(_))));
        assert_eq!(lift_target_bounds(&p, &[q(0, 1), q(1, 1)], &q(1, 1), &q(1, 1), &q(1, 10), &all), Err(Error::HostMismatch));
    }

    #[test]
    fn inversion_on_one_point_pair() {
        let p = two_points(q(1, 10));
        let all = PointSet::new(vec![0, 1]);
        let r = check_inversion(&p, &[q(1, 1)], &[q(11, 10)], &q(1, 1), &q(1, 1), &q(1, 10), &all).unwrap();
        assert_eq!(r, Some(true));
        let r = check_inversion(&p, &[q(1, 1)], &[q(2, 1)], &q(1, 1), &q(1, 1), &q(1, 10), &all).unwrap();
        assert_eq!(r, None);
    }
}
