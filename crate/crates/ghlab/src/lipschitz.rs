//! Lipschitz constants, McShane extensions, clipping and support-controlled
//! extensions on finite spaces.

use crate::error::{Error, Result};
use crate::gluing::GluedSpace;
use crate::metric_core::{closed_ball, dist_to_set, FiniteMetricSpace, PointSet};
use crate::scalar::{Ext, Scalar};

/// Values aligned with the host's point order.
pub type RealFunction<S> = Vec<S>;

/// Best Lipschitz constant; errors if `f` separates a zero-distance pair.
pub fn lip_constant<S: Scalar>(space: &FiniteMetricSpace<S>, f: &[S]) -> Result<S> {
    assert_eq!(f.len(), space.len());
    let mut best = S::zero();
    for i in 0..f.len() {
        for j in i + 1..f.len() {
            let diff = (f[i].clone() - f[j].clone()).abs();
            let d = space.d(i, j);
            if d.is_zero() {
                if !diff.is_zero() {
                    return Err(Error::InfiniteLipschitz(i, j));
                }
                continue;
            }
            let q = diff / d.clone();
            if q > best {
                best = q;
            }
        }
    }
    Ok(best)
}

/// Lipschitz constant of `f` on the subspace `sub` of `host`.
pub fn lip_constant_on<S: Scalar>(host: &FiniteMetricSpace<S>, sub: &[usize], f: &[S]) -> Result<S> {
    lip_constant(&host.subspace(sub), f)
}

pub fn sup_norm<S: Scalar>(f: &[S]) -> S {
    f.iter().map(|v| v.abs()).fold(S::zero(), S::max_of)
}

/// `{i : f(i) ≠ 0}`.
pub fn support<S: Scalar>(f: &[S]) -> PointSet {
    (0..f.len()).filter(|&i| !f[i].is_zero()).collect()
}

fn check_extension_input<S: Scalar>(host: &FiniteMetricSpace<S>, sub: &[usize], f: &[S], l: &S) -> Result<()> {
    if sub.is_empty() {
        return Err(Error::EmptySubspace);
    }
    assert_eq!(sub.len(), f.len());
    let lip = lip_constant_on(host, sub, f)?;
    if !lip.leq(l) {
        return Err(Error::PreconditionFailed(format!("Lipschitz constant {lip} exceeds {l}")));
    }
    Ok(())
}

/// Largest `l`-Lipschitz extension: `g(z) = min_x f(x) + l·d(x, z)`.
pub fn mcshane_extend<S: Scalar>(host: &FiniteMetricSpace<S>, sub: &[usize], f: &[S], l: &S) -> Result<RealFunction<S>> {
    check_extension_input(host, sub, f, l)?;
    Ok(mcshane_raw(host, sub, f, l))
}

/// Smallest `l`-Lipschitz extension: `g(z) = max_x f(x) − l·d(x, z)`.
pub fn mcshane_extend_lower<S: Scalar>(host: &FiniteMetricSpace<S>, sub: &[usize], f: &[S], l: &S) -> Result<RealFunction<S>> {
    check_extension_input(host, sub, f, l)?;
    let neg: Vec<S> = f.iter().map(|v| -v.clone()).collect();
    Ok(mcshane_raw(host, sub, &neg, l).into_iter().map(|v| -v).collect())
}

pub(crate) fn mcshane_raw<S: Scalar>(host: &FiniteMetricSpace<S>, sub: &[usize], f: &[S], l: &S) -> RealFunction<S> {
    (0..host.len())
        .map(|z| {
            sub.iter().zip(f).map(|(&x, v)| v.clone() + l.clone() * host.d(x, z).clone()).reduce(S::min_of).expect("nonempty subspace")
        })
        .collect()
}

/// Pointwise `max(min(g, m), −m)`.
pub fn truncate_clip<S: Scalar>(g: &[S], m: &S) -> RealFunction<S> {
    g.iter().map(|v| clamp(v, m)).collect()
}

fn clamp<S: Scalar>(v: &S, m: &S) -> S {
    v.clone().min_of(m.clone()).max_of(-m.clone())
}

/// Extension of `f` (given on `sub ⊆ host`, with `x0` an index into `sub`)
/// that keeps the Lipschitz constant and the sup norm and vanishes far from
/// `x0`.
///
/// The cutoff is built at slope `λ = lip(f)` (1 for constant `f`), so the
/// support lies in `ball(x0, R + ‖f‖/λ)`; for `lip(f) ≥ 1` this is inside
/// `ball(x0, R + ‖f‖)`.
pub fn extend_compact_support<S: Scalar>(host: &FiniteMetricSpace<S>, sub: &[usize], x0: usize, f: &[S], r: &S) -> Result<RealFunction<S>> {
    if sub.is_empty() {
        return Err(Error::EmptySubspace);
    }
    let lip = lip_constant_on(host, sub, f)?;
    let lambda = if lip.is_zero() { S::one() } else { lip };
    cutoff_extension(host, sub, x0, f, r, &lambda)
}

/// Support radius guaranteed by [`extend_compact_support`].
pub fn compact_support_radius<S: Scalar>(host: &FiniteMetricSpace<S>, sub: &[usize], f: &[S], r: &S) -> Result<S> {
    let lip = lip_constant_on(host, sub, f)?;
    let lambda = if lip.is_zero() { S::one() } else { lip };
    Ok(r.clone() + sup_norm(f) / lambda)
}

/// McShane at slope `λ`, clip to `±M`, then squeeze by
/// `t₁ = M·d(z,C) / (d(z,C) + d(z, ball(x0,R)))` with `C` the complement of
/// `ball(x0, R + M/λ)`.
pub(crate) fn cutoff_extension<S: Scalar>(
    host: &FiniteMetricSpace<S>,
    sub: &[usize],
    x0: usize,
    f: &[S],
    r: &S,
    lambda: &S,
) -> Result<RealFunction<S>> {
    let center = sub[x0];
    for (i, &x) in sub.iter().enumerate() {
        if !f[i].is_zero() && !host.d(center, x).leq(r) {
            return Err(Error::SupportViolation(i));
        }
    }
    let m = sup_norm(f);
    if m.is_zero() {
        return Ok(vec![S::zero(); host.len()]);
    }
    let f1 = mcshane_raw(host, sub, f, lambda);
    let f2 = truncate_clip(&f1, &m);
    let inner = closed_ball(host, center, r);
    let outer = closed_ball(host, center, &(r.clone() + m.clone() / lambda.clone()));
    let c = outer.complement(host.len());
    Ok((0..host.len())
        .map(|z| {
            let t1 = match dist_to_set(host, z, &c) {
                Ext::Inf => m.clone(),
                Ext::Fin(u) => {
                    let v = dist_to_set(host, z, &inner).unwrap_fin();
                    let den = u.clone() + v;
                    if den.is_zero() {
                        S::zero()
                    } else {
                        m.clone() * u / den
                    }
                }
            };
            clamp(&f2[z], &t1)
        })
        .collect())
}

/// Output of [`band_lift`].
#[derive(Clone, Debug)]
pub struct BandLift<S> {
    /// Extension to the whole host.
    pub g: RealFunction<S>,
    /// Function on `Y` (indexed like `Y`).
    pub h: RealFunction<S>,
    /// `R = d(x0, X∖ball_X(x0, r))`.
    pub escape: Ext<S>,
}

/// Lifts a 1-Lipschitz `f` on `X` supported in `ball_X(x0, r)` to a
/// 1-Lipschitz `g` on the host and a nearby `h` on `Y` supported in
/// `ball_Y(y0, r + 2ε)`.
pub fn band_lift<S: Scalar>(f: &[S], glued: &GluedSpace<S>, r: &S, eps: &S) -> Result<BandLift<S>> {
    let host = &glued.host;
    let x = &glued.x;
    let y = &glued.y;
    let ex = &glued.embed_x;
    let ey = &glued.embed_y;
    if f.len() != x.len() {
        return Err(Error::HostMismatch);
    }
    let lip = lip_constant(&x.space, f)?;
    if !lip.leq(&S::one()) {
        return Err(Error::PreconditionFailed("f is not 1-Lipschitz".into()));
    }
    let escape = x.escape(r);
    if let Ext::Fin(big_r) = &escape {
        if !eps.less(&big_r.half()) {
            return Err(Error::PreconditionFailed("eps must be below R/2".into()));
        }
    }
    let x0 = glued.x0();
    let y0 = glued.y0();
    if !host.d(x0, y0).leq(eps) {
        return Err(Error::PreconditionFailed("base points farther than eps".into()));
    }
    let big_ball = match &escape {
        Ext::Fin(big_r) => y.ball(&(r.clone() + r.clone() + big_r.clone())),
        Ext::Inf => y.space.all(),
    };
    let x_img = PointSet::new(ex.clone());
    for j in big_ball.iter() {
        if !dist_to_set(host, ey[j], &x_img).leq_fin(eps) {
            return Err(Error::PreconditionFailed(format!("Y point {j} not within eps of X")));
        }
    }
    // support check happens inside the cutoff construction
    let g = cutoff_extension(host, ex, x.basepoint, f, r, &S::one())?;
    let g_y: Vec<S> = ey.iter().map(|&z| g[z].clone()).collect();
    let lo = r.clone() + eps.clone() + eps.clone();
    let band: PointSet = (0..y.len())
        .filter(|&j| {
            let d = y.space.d(y.basepoint, j);
            lo.leq(d)
                && match &escape {
                    Ext::Fin(big_r) => d.leq(&(r.clone() + r.clone() + big_r.clone())),
                    Ext::Inf => true,
                }
        })
        .collect();
    let h =
        if band.is_empty() { g_y } else { (0..y.len()).map(|j| clamp(&g_y[j], &dist_to_set(&y.space, j, &band).unwrap_fin())).collect() };
    Ok(BandLift { g, h, escape })
}

/// Which conclusions of the band lift hold for a computed lift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BandLiftReport {
    pub norm_bound: bool,
    pub restricts: bool,
    pub lipschitz: bool,
    pub norms: bool,
    pub close: bool,
    pub vanishes: bool,
}

impl BandLiftReport {
    pub fn all(&self) -> bool {
        self.norm_bound && self.restricts && self.lipschitz && self.norms && self.close && self.vanishes
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        for (ok, name) in [
            (self.norm_bound, "norm_bound"),
            (self.restricts, "restricts"),
            (self.lipschitz, "lipschitz"),
            (self.norms, "norms"),
            (self.close, "close"),
            (self.vanishes, "vanishes"),
        ] {
            if !ok {
                v.push(name);
            }
        }
        v
    }
}

/// Evaluates the six conclusions directly.
pub fn check_band_lift<S: Scalar>(f: &[S], glued: &GluedSpace<S>, r: &S, eps: &S, lift: &BandLift<S>) -> BandLiftReport {
    let host = &glued.host;
    let y = &glued.y;
    let m = sup_norm(f);
    let norm_bound = match &lift.escape {
        Ext::Fin(big_r) => m.leq(&(big_r.clone() + r.clone())),
        Ext::Inf => true,
    };
    let restricts = glued.embed_x.iter().zip(f).all(|(&z, v)| lift.g[z].approx_eq(v));
    let lipschitz =
        lip_constant(host, &lift.g).is_ok_and(|l| l.leq(&S::one())) && lip_constant(&y.space, &lift.h).is_ok_and(|l| l.leq(&S::one()));
    let g_y: Vec<S> = glued.embed_y.iter().map(|&z| lift.g[z].clone()).collect();
    let norms = sup_norm(&lift.g).leq(&m) && sup_norm(&lift.h).leq(&sup_norm(&g_y));
    let close = g_y.iter().zip(&lift.h).all(|(a, b)| (a.clone() - b.clone()).abs().leq(eps));
    let far = r.clone() + eps.clone() + eps.clone();
    let vanishes = (0..y.len()).all(|j| !far.leq(y.space.d(y.basepoint, j)) || lift.h[j].is_zero());
    BandLiftReport { norm_bound, restricts, lipschitz, norms, close, vanishes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric_core::{validate_metric, PointedSpace, Strictness};
    use crate::scalar::Q;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n, d)
    }
    fn z(n: i64) -> Q {
        Q::from_i64(n)
    }

    fn path3() -> FiniteMetricSpace<Q> {
        validate_metric(vec![vec![z(0), z(1), z(2)], vec![z(1), z(0), z(1)], vec![z(2), z(1), z(0)]], Strictness::Metric).unwrap()
    }

    #[test]
    fn lip_examples() {
        let s = path3();
        assert_eq!(lip_constant(&s, &[z(4), z(4), z(4)]).unwrap(), z(0));
        let two = FiniteMetricSpace::from_line(&[z(0), z(1)]);
        assert_eq!(lip_constant(&two, &[z(0), z(3)]).unwrap(), z(3));
        let dist0: Vec<Q> = s.row(0).to_vec();
        assert_eq!(lip_constant(&s, &dist0).unwrap(), z(1));
        let one = FiniteMetricSpace::from_line(&[z(5)]);
        assert_eq!(lip_constant(&one, &[z(9)]).unwrap(), z(0));
        let pseudo = FiniteMetricSpace::from_line(&[z(0), z(0)]);
        assert_eq!(lip_constant(&pseudo, &[z(0), z(1)]), Err(Error::InfiniteLipschitz(0, 1)));
        assert_eq!(lip_constant(&pseudo, &[z(1), z(1)]).unwrap(), z(0));
    }

    #[test]
    fn mcshane_examples() {
        let s = path3();
        assert_eq!(mcshane_extend(&s, &[0, 2], &[z(1), z(0)], &z(1)).unwrap(), vec![z(1), z(1), z(0)]);
        assert_eq!(mcshane_extend(&s, &[0], &[z(1)], &z(1)).unwrap(), vec![z(1), z(2), z(3)]);
        assert_eq!(mcshane_extend(&s, &[0, 1, 2], &[z(1), z(0), z(1)], &z(1)).unwrap(), vec![z(1), z(0), z(1)]);
        assert_eq!(mcshane_extend_lower(&s, &[0], &[z(1)], &z(1)).unwrap(), vec![z(1), z(0), z(-1)]);
        assert!(matches!(mcshane_extend(&s, &[0, 1], &[z(0), z(2)], &z(1)), Err(Error::PreconditionFailed(_))));
        assert_eq!(mcshane_extend(&s, &[], &[], &z(1)), Err(Error::EmptySubspace));
    }

    #[test]
    fn clip_examples() {
        assert_eq!(truncate_clip(&[z(1), z(2), z(3)], &z(1)), vec![z(1), z(1), z(1)]);
        assert_eq!(truncate_clip(&[z(-1), q(1, 2)], &z(1)), vec![z(-1), q(1, 2)]);
        assert_eq!(truncate_clip(&[z(-1), z(5)], &z(0)), vec![z(0), z(0)]);
    }

    #[test]
    fn compact_support_examples() {
        let host = FiniteMetricSpace::from_line(&[z(0), z(1), z(2), z(3)]);
        let g = extend_compact_support(&host, &[0, 1], 0, &[z(1), z(0)], &z(1)).unwrap();
        assert_eq!(&g[..2], &[z(1), z(0)]);
        assert_eq!(g[3], z(0));
        assert!(support(&g).is_subset(&closed_ball(&host, 0, &z(2))));
        assert_eq!(lip_constant(&host, &g).unwrap(), z(1));

        let zero = extend_compact_support(&host, &[0, 1], 0, &[z(0), z(0)], &z(1)).unwrap();
        assert_eq!(zero, vec![z(0); 4]);

        let bump = vec![z(1), z(0), z(0), z(0)];
        assert_eq!(extend_compact_support(&host, &[0, 1, 2, 3], 0, &bump, &z(1)).unwrap(), bump);

        assert_eq!(extend_compact_support(&host, &[0, 1, 2], 0, &[z(0), z(0), z(1)], &z(1)), Err(Error::SupportViolation(2)));
    }

    #[test]
    fn compact_support_small_slope() {
        // lip(f) = 1/2: support stays in ball(R + M/λ), Lipschitz constant is kept.
        let host =
            validate_metric(vec![vec![z(0), z(1), q(52, 100)], vec![z(1), z(0), z(1)], vec![q(52, 100), z(1), z(0)]], Strictness::Metric)
                .unwrap();
        let f = [q(1, 2), z(0)];
        let r = q(1, 100);
        let g = extend_compact_support(&host, &[0, 1], 0, &f, &r).unwrap();
        assert_eq!(lip_constant(&host, &g).unwrap(), q(1, 2));
        assert_eq!(sup_norm(&g), q(1, 2));
        assert_eq!(&g[..2], &f);
        assert_eq!(compact_support_radius(&host, &[0, 1], &f, &r).unwrap(), q(101, 100));
    }

    fn pointed(m: Vec<Vec<Q>>, bp: usize) -> PointedSpace<Q> {
        PointedSpace::new(validate_metric(m, Strictness::Metric).unwrap(), bp).unwrap()
    }

    #[test]
    fn band_lift_zero_and_identity() {
        let x = PointedSpace::new(FiniteMetricSpace::from_line(&[z(0), z(1), z(3)]), 0).unwrap();
        let glued = GluedSpace::identity(&x);
        let f = vec![z(1), z(0), z(0)];
        let lift = band_lift(&f, &glued, &z(1), &q(1, 4)).unwrap();
        assert_eq!(lift.h, f);
        assert!(check_band_lift(&f, &glued, &z(1), &q(1, 4), &lift).all());
        let zero = band_lift(&[z(0), z(0), z(0)], &glued, &z(1), &q(1, 4)).unwrap();
        assert!(zero.g.iter().chain(zero.h.iter()).all(|v| v.is_zero()));
    }

    #[test]
    fn band_lift_preconditions() {
        let x = PointedSpace::new(FiniteMetricSpace::from_line(&[z(0), z(1), z(3)]), 0).unwrap();
        let glued = GluedSpace::identity(&x);
        let steep = vec![z(2), z(0), z(0)];
        assert!(matches!(band_lift(&steep, &glued, &z(1), &q(1, 4)), Err(Error::PreconditionFailed(_))));
        let f = vec![z(1), z(0), z(0)];
        // R = 1 here, so eps must stay below 1/2
        assert!(matches!(band_lift(&f, &glued, &q(1, 2), &q(1, 2)), Err(Error::PreconditionFailed(_))));
    }

    /// The vanishing clause can fail for points of `Y` just beyond
    /// `2r + R` that are still within `r + ‖f‖` of `x0`.
    #[test]
    fn band_lift_vanishing_gap() {
        // host order: x0, xc, y0, y
        let m = vec![
            vec![z(0), z(1), q(3, 10), z(1)],
            vec![z(1), z(0), q(13, 10), z(1)],
            vec![q(3, 10), q(13, 10), z(0), q(13, 10)],
            vec![z(1), z(1), q(13, 10), z(0)],
        ];
        let host = validate_metric(m.clone(), Strictness::Metric).unwrap();
        let x = pointed(vec![vec![z(0), z(1)], vec![z(1), z(0)]], 0);
        let y = pointed(vec![vec![z(0), q(13, 10)], vec![q(13, 10), z(0)]], 0);
        let glued = GluedSpace::new(host, x, y, vec![0, 1], vec![2, 3]).unwrap();
        let f = vec![z(1), z(0)];
        let (r, eps) = (q(1, 10), q(3, 10));
        let lift = band_lift(&f, &glued, &r, &eps).unwrap();
        let report = check_band_lift(&f, &glued, &r, &eps, &lift);
        assert_eq!(lift.h[1], z(1));
        assert_eq!(report.failures(), vec!["vanishes"]);
    }
}
