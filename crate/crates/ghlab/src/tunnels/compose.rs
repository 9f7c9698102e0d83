//! Composition of passages and the existence of tunnels.

use super::{check_admissible, extent, four, maximal_k, Admissibility, ClassicalPPQMS, Extent, KFamily, Passage};
use crate::error::{Error, Result};
use crate::gluing::{correspondence_distortion, glue_from_correspondence, Correspondence, GluedSpace};
use crate::kantorovich::{lipschitz_seminorm_of, PolyhedralSeminorm};
use crate::metric_core::{dist_to_set, FiniteMetricSpace, PointSet, PointedSpace, Strictness};
use crate::scalar::{Ext, Scalar};

/// How a composed passage was assembled.
#[derive(Clone, Debug, PartialEq)]
pub struct Composition<S> {
    pub first: Passage<S>,
    pub second: Passage<S>,
    pub alpha: S,
    /// Admissible numbers of the two factors used by the composite family.
    pub eps1: S,
    pub eps2: S,
    /// `max{L₁, L₂, (1/α)·max_b |f(ι₁b) − f(ι₂b)|}` on the carrier points.
    pub seminorm: PolyhedralSeminorm<S>,
    /// Where the first and second carriers start inside the composed one.
    pub offsets: (usize, usize),
}

impl<S: Scalar> Composition<S> {
    pub fn inverse(&self) -> Self {
        Composition {
            first: self.second.inverse(),
            second: self.first.inverse(),
            alpha: self.alpha.clone(),
            eps1: self.eps2.clone(),
            eps2: self.eps1.clone(),
            seminorm: self.seminorm.clone(),
            offsets: (self.offsets.1, self.offsets.0),
        }
    }

    pub fn size(&self) -> usize {
        self.first.carrier.host.len() + self.second.carrier.host.len()
    }

    pub(crate) fn k_at(&self, t: &S) -> PointSet {
        let shift = |set: PointSet, off: usize| -> PointSet { set.iter().map(|i| i + off).collect() };
        shift(maximal_k(&self.first.carrier, t, &self.eps1), self.offsets.0)
            .union(&shift(maximal_k(&self.second.carrier, t, &self.eps2), self.offsets.1))
    }

    pub(crate) fn middle_radii(&self) -> Vec<S> {
        self.first.codomain().radii()
    }

    pub(crate) fn shifts(&self) -> Vec<S> {
        vec![four(&self.eps1), four(&self.eps2), four(&self.eps1) + four(&self.eps2)]
    }
}

fn same_pointed<S: Scalar>(a: &PointedSpace<S>, b: &PointedSpace<S>) -> bool {
    a.len() == b.len()
        && a.basepoint == b.basepoint
        && (0..a.len()).all(|i| (0..a.len()).all(|j| a.space.d(i, j).approx_eq(b.space.d(i, j))))
}

/// Passage from the domain of `p1` to the codomain of `p2` on the disjoint
/// union of both carriers. Its host is the largest metric agreeing with both
/// carriers and putting each middle point at distance `α` from its copy:
/// `ρ(z₁, z₂) = min_b d₁(z₁, ι₁b) + α + d₂(ι₂b, z₂)`. The Lipschitz seminorm
/// of `ρ` is the composed seminorm, kept alongside for cross-checks.
pub fn compose<S: Scalar>(p1: &Passage<S>, p2: &Passage<S>, alpha: &S, eps1: &S, eps2: &S) -> Result<Passage<S>> {
    if !same_pointed(p1.codomain(), p2.domain()) {
        return Err(Error::DomainMismatch);
    }
    if !S::zero().less(alpha) {
        return Err(Error::PreconditionFailed("alpha must be positive".into()));
    }
    let (g1, g2) = (&p1.carrier, &p2.carrier);
    let (n1, n2) = (g1.host.len(), g2.host.len());
    let n = n1 + n2;
    let mid1 = &g1.embed_y;
    let mid2 = &g2.embed_x;
    let mut m = vec![vec![S::zero(); n]; n];
    for i in 0..n1 {
        for j in 0..n1 {
            m[i][j] = g1.host.d(i, j).clone();
        }
    }
    for i in 0..n2 {
        for j in 0..n2 {
            m[n1 + i][n1 + j] = g2.host.d(i, j).clone();
        }
    }
    for i in 0..n1 {
        for j in 0..n2 {
            let v = mid1
                .iter()
                .zip(mid2)
                .map(|(&b1, &b2)| g1.host.d(i, b1).clone() + g2.host.d(b2, j).clone())
                .reduce(S::min_of)
                .expect("middle space is nonempty")
                + alpha.clone();
            m[i][n1 + j] = v.clone();
            m[n1 + j][i] = v;
        }
    }
    let labels = g1.host.labels().iter().map(|l| format!("1:{l}")).chain(g2.host.labels().iter().map(|l| format!("2:{l}"))).collect();
    let strict = if g1.host.strictness() == Strictness::Metric && g2.host.strictness() == Strictness::Metric {
        Strictness::Metric
    } else {
        Strictness::Pseudometric
    };
    let host = FiniteMetricSpace::new_unchecked(labels, m, strict);
    let embed_y = g2.embed_y.iter().map(|&j| n1 + j).collect();
    let carrier = GluedSpace::new(host, g1.x.clone(), g2.y.clone(), g1.embed_x.clone(), embed_y)?;
    let seminorm = composed_seminorm(g1, g2, alpha)?;
    Ok(Passage {
        carrier,
        composition: Some(Box::new(Composition {
            first: p1.clone(),
            second: p2.clone(),
            alpha: alpha.clone(),
            eps1: eps1.clone(),
            eps2: eps2.clone(),
            seminorm,
            offsets: (0, n1),
        })),
    })
}

fn composed_seminorm<S: Scalar>(g1: &GluedSpace<S>, g2: &GluedSpace<S>, alpha: &S) -> Result<PolyhedralSeminorm<S>> {
    let (n1, n2) = (g1.host.len(), g2.host.len());
    let n = n1 + n2;
    let pad = |c: &[S], off: usize| -> Vec<S> {
        let mut v = vec![S::zero(); n];
        for (i, x) in c.iter().enumerate() {
            v[off + i] = x.clone();
        }
        v
    };
    let l1 = lipschitz_seminorm_of(&g1.host);
    let l2 = lipschitz_seminorm_of(&g2.host);
    let mut functionals: Vec<Vec<S>> = l1.functionals.iter().map(|c| pad(c, 0)).collect();
    functionals.extend(l2.functionals.iter().map(|c| pad(c, n1)));
    let inv = S::one() / alpha.clone();
    for (&b1, &b2) in g1.embed_y.iter().zip(&g2.embed_x) {
        let mut c = vec![S::zero(); n];
        c[b1] = inv.clone();
        c[n1 + b2] = -inv.clone();
        functionals.push(c);
    }
    let mut equalities = l1.equalities.clone();
    equalities.extend(l2.equalities.iter().map(|&(a, b)| (a + n1, b + n1)));
    PolyhedralSeminorm::new(n, functionals, equalities)
}

/// Outcome of the composition contract at radius `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComposeReport<S> {
    pub passage: Passage<S>,
    pub eps1: S,
    pub eps2: S,
    /// `ε₁ + ε₂ + α`.
    pub bound: S,
    /// Admissibility of `bound` with the side-by-side family `K¹_t ⊔ K²_t`.
    pub composite: Admissibility<S>,
    /// Admissibility of `bound` with the maximal family of the composed carrier.
    pub maximal: Admissibility<S>,
    pub extent: Extent<S>,
}

/// Composes two `r`-tunnels and checks the composed passage at radius `t`
/// with `ε₁ + ε₂ + α`, where `ε_j` is admissible for `p_j` at radius `r`,
/// within `α` of its extent and with `t + 4·max(ε₁, ε₂) ≤ r`.
pub fn compose_contract<S: Scalar>(p1: &Passage<S>, p2: &Passage<S>, r: &S, t: &S, alpha: &S) -> Result<ComposeReport<S>> {
    if !same_pointed(p1.codomain(), p2.domain()) {
        return Err(Error::DomainMismatch);
    }
    let e1 = extent(p1, r)?;
    let e2 = extent(p2, r)?;
    let (Ext::Fin(x1), Ext::Fin(x2)) = (&e1.value, &e2.value) else {
        return Err(Error::RadiusConditionViolated("a factor has infinite extent".into()));
    };
    let room = r.clone() - t.clone() - four(&x1.clone().max_of(x2.clone()));
    if !S::zero().less(&room) || !S::zero().less(t) {
        return Err(Error::RadiusConditionViolated(format!(
            "t + 4·max extent = {} is not below r = {}",
            (t.clone() + four(&x1.clone().max_of(x2.clone()))).to_f64(),
            r.to_f64()
        )));
    }
    let slack = alpha.clone().min_of(room.half().half());
    let eps1 = e1.admissible_within(&slack).expect("finite extent");
    let eps2 = e2.admissible_within(&slack).expect("finite extent");
    let passage = compose(p1, p2, alpha, &eps1, &eps2)?;
    let bound = eps1.clone() + eps2.clone() + alpha.clone();
    let composite = check_admissible(&passage, t, &bound, &KFamily::Composite)?;
    let maximal = check_admissible(&passage, t, &bound, &KFamily::Maximal)?;
    let extent = extent(&passage, t)?;
    Ok(ComposeReport { passage, eps1, eps2, bound, composite, maximal, extent })
}

/// A tunnel guaranteed to exist at radius `r`, and the bound on its extent.
#[derive(Clone, Debug, PartialEq)]
pub struct Existence<S> {
    pub passage: Passage<S>,
    pub bound: S,
    /// 1 when `r` is at least both diameters, 2 when below both.
    pub case: u8,
}

/// Case 1: the total-relation gluing, whose extent is computed. Case 2: the
/// total-relation gluing at `η = max(D, dis/2)`, where `D` bounds the
/// distance from a point of a ball to the outside of the ball; every pair then
/// sits at distance `η` and `η` is admissible.
pub fn existence_tunnel<S: Scalar>(a: &ClassicalPPQMS<S>, b: &ClassicalPPQMS<S>, r: &S) -> Result<Existence<S>> {
    if !S::zero().less(r) {
        return Err(Error::NonPositiveRadius);
    }
    let (x, y) = (&a.pointed, &b.pointed);
    let (dx, dy) = (x.space.diameter(), y.space.diameter());
    let total = Correspondence::total(x.len(), y.len());
    let half_dis = correspondence_distortion(&total, &x.space, &y.space).half();
    if dx.clone().max_of(dy.clone()).leq(r) {
        let passage = Passage::metric(glue_from_correspondence(x, y, &total, &half_dis)?);
        let bound = extent(&passage, r)?.value.finite().expect("compact pairs have finite extent").clone();
        return Ok(Existence { passage, bound, case: 1 });
    }
    if r.less(&dx.min_of(dy)) {
        let mut d = S::zero();
        for s in [x, y] {
            let out = s.ball(r).complement(s.len());
            if out.is_empty() {
                return Err(Error::NoLocalBound);
            }
            for i in 0..s.len() {
                d = d.max_of(dist_to_set(&s.space, i, &out).unwrap_fin());
            }
        }
        let eta = d.max_of(half_dis);
        let passage = Passage::metric(glue_from_correspondence(x, y, &total, &eta)?);
        return Ok(Existence { passage, bound: eta, case: 2 });
    }
    Err(Error::RadiusGap)
}

#[cfg(test)]
mod tests {
    use super::super::tests::two_points;
    use super::*;
    use crate::lipschitz::lip_constant;
    use crate::scalar::Q;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n, d)
    }

    fn line(c: &[Q]) -> PointedSpace<Q> {
        PointedSpace::new(FiniteMetricSpace::from_line(c), 0).unwrap()
    }

    #[test]
    fn composed_host_is_the_path_metric_of_the_seminorm() {
        let x = line(&[q(0, 1), q(1, 1), q(3, 1)]);
        let y = line(&[q(0, 1), q(3, 2), q(3, 1)]);
        let rel = Correspondence::new(vec![(0, 0), (1, 1), (2, 2)]);
        let g = glue_from_correspondence(&x, &y, &rel, &q(1, 2)).unwrap();
        let p1 = Passage::metric(g);
        let p2 = p1.inverse();
        let c = compose(&p1, &p2, &q(1, 5), &q(1, 2), &q(1, 2)).unwrap();
        let comp = c.composition.as_ref().unwrap();
        let n = c.carrier.host.len();
        for s in 0..20i64 {
            let f: Vec<Q> = (0..n as i64).map(|i| q((i * 7 + s * 3) % 11 - 5, 1 + (i + s) % 3)).collect();
            assert_eq!(comp.seminorm.eval(&f), Ext::Fin(lip_constant(&c.carrier.host, &f).unwrap()));
        }
    }

    #[test]
    fn compose_identities_and_points() {
        let x = line(&[q(0, 1), q(1, 1), q(3, 1)]);
        let id = Passage::identity(&x);
        let rep = compose_contract(&id, &id, &q(4, 1), &q(1, 1), &q(1, 10)).unwrap();
        assert!(rep.composite.holds() && rep.maximal.holds());
        assert!(rep.extent.value.leq_fin(&q(1, 10)));

        let p = two_points(q(1, 10));
        let rep = compose_contract(&p, &p, &q(1, 1), &q(1, 10), &q(1, 100)).unwrap();
        assert_eq!(rep.bound, q(21, 100));
        assert!(rep.composite.holds());
        assert!(rep.extent.value.leq_fin(&q(21, 100)));
        assert!(rep.passage.carrier.base_gap().leq(&rep.bound));
    }

    #[test]
    fn compose_errors() {
        let x = line(&[q(0, 1), q(1, 1)]);
        let y = line(&[q(0, 1), q(2, 1)]);
        let (a, b) = (Passage::identity(&x), Passage::identity(&y));
        assert_eq!(compose(&a, &b, &q(1, 1), &q(1, 1), &q(1, 1)), Err(Error::DomainMismatch));
        let p = two_points(q(1, 10));
        assert!(matches!(compose_contract(&p, &p, &q(1, 2), &q(1, 5), &q(1, 10)), Err(Error::RadiusConditionViolated(_))));
    }

    #[test]
    fn existence_cases() {
        let a = ClassicalPPQMS::new(line(&[q(0, 1), q(1, 1)])).unwrap();
        let e = existence_tunnel(&a, &a, &q(2, 1)).unwrap();
        assert_eq!(e.case, 1);
        // the total relation has distortion 1, so the basepoint gap is 1/2
        assert_eq!(e.bound, q(1, 2));
        let b = ClassicalPPQMS::new(line(&[q(0, 1), q(3, 1)])).unwrap();
        let e = existence_tunnel(&a, &b, &q(1, 2)).unwrap();
        assert_eq!(e.case, 2);
        let ext = extent(&e.passage, &q(1, 2)).unwrap();
        assert!(ext.value.leq_fin(&e.bound), "{:?} vs {}", ext.value, e.bound);
        assert_eq!(existence_tunnel(&a, &b, &q(2, 1)), Err(Error::RadiusGap));
        // basepoint in the middle: the ball of radius 2 is everything
        let c = ClassicalPPQMS::new(PointedSpace::new(FiniteMetricSpace::from_line(&[q(-2, 1), q(0, 1), q(2, 1)]), 1).unwrap()).unwrap();
        let d = ClassicalPPQMS::new(PointedSpace::new(FiniteMetricSpace::from_line(&[q(-3, 1), q(0, 1), q(3, 1)]), 1).unwrap()).unwrap();
        assert_eq!(existence_tunnel(&c, &d, &q(2, 1)), Err(Error::NoLocalBound));
    }
}
