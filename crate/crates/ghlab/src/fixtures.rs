//! Small named instances shared by tests, the verify harness and the CLI.

use crate::error::Result;
use crate::gluing::{Correspondence, GluedSpace};
use crate::metric_core::{hausdorff, FiniteMetricSpace, PointSet, PointedSpace};
use crate::scalar::Scalar;

/// Points of the real line, pointed at the first one.
pub fn line<S: Scalar>(coords: &[S]) -> PointedSpace<S> {
    PointedSpace::new(FiniteMetricSpace::from_line(coords), 0).expect("nonempty")
}

/// `I_n = {0, 2 + 1/(n+1)}` and its limit `I = {0, 2}`, pointed at 0.
pub fn interval_pair<S: Scalar>(n: i64) -> (PointedSpace<S>, PointedSpace<S>) {
    let two = S::from_i64(2);
    (line(&[S::zero(), two.clone() + S::ratio(1, n + 1)]), line(&[S::zero(), two]))
}

/// `I_n` and `I` as subsets of one line, sharing the point 0.
pub fn interval_gluing<S: Scalar>(n: i64) -> GluedSpace<S> {
    let two = S::from_i64(2);
    let host = FiniteMetricSpace::from_line(&[S::zero(), two.clone() + S::ratio(1, n + 1), S::zero(), two]);
    GluedSpace::from_host(host, vec![0, 1], vec![2, 3], 0, 0).expect("subsets of a line")
}

/// `I_n` and `I` glued along `0 ↔ 0`, `far ↔ far` at `η = 1/(n+1)`.
pub fn interval_tunnel<S: Scalar>(n: i64) -> GluedSpace<S> {
    let (x, y) = interval_pair::<S>(n);
    let rel = Correspondence::new(vec![(0, 0), (1, 1)]);
    crate::gluing::glue_from_correspondence(&x, &y, &rel, &S::ratio(1, n + 1)).expect("eta is half the distortion or more")
}

/// Finite cut of the sup-norm plane example: `X` a stretch of the real line
/// and `Y` two parallel rows at height 0 and 1, with `X` folded into the
/// plane so that it is isometric only on the ball of radius `big_r`.
#[derive(Clone, Debug)]
pub struct BallOnly<S> {
    pub x: PointedSpace<S>,
    pub y: PointedSpace<S>,
    /// Plane coordinates of the images, `X` first.
    pub plane: Vec<(S, S)>,
    pub embed_x: Vec<usize>,
    pub embed_y: Vec<usize>,
    pub big_r: S,
    pub eps: S,
}

/// Grid step 1/2, `R = 1`. Rows `Y` over `{-2, ..., 2}`; `X` holds the grid
/// on `[-2, 2]`, the kink, and the points that fold back onto the grid of
/// the upper row.
pub fn ball_only_example<S: Scalar>(eps: &S) -> BallOnly<S> {
    let h = S::ratio(1, 2);
    let big_r = S::one();
    let ys: Vec<S> = (-4..=4).map(|k| S::from_i64(k) * h.clone()).collect();
    let one = S::one();
    let left = -(big_r.clone() + one.clone());
    let kink = left.clone() - one.clone() + eps.clone() + eps.clone();
    let back = left.clone() + left.clone() - one.clone() + eps.clone() + eps.clone();
    let mut xs: Vec<S> = (-4..=4).map(|k| S::from_i64(k) * h.clone()).collect();
    xs.push(kink.clone());
    xs.extend((-2..=2).map(|k| back.clone() - S::from_i64(k) * h.clone()));
    xs.sort_by(S::cmp_total);
    let fold = |x: &S| -> (S, S) {
        if left.less(x) {
            (x.clone(), eps.clone())
        } else if kink.less(x) {
            (left.clone(), -x.clone() + left.clone() + eps.clone())
        } else {
            (left.clone() + left.clone() - one.clone() + eps.clone() + eps.clone() - x.clone(), one.clone() - eps.clone())
        }
    };
    let mut plane: Vec<(S, S)> = xs.iter().map(fold).collect();
    let rows: Vec<(S, S)> = ys.iter().map(|c| (c.clone(), S::zero())).chain(ys.iter().map(|c| (c.clone(), one.clone()))).collect();
    plane.extend(rows.iter().cloned());
    let nx = xs.len();
    let origin = |v: &[S]| v.iter().position(|c| c.is_zero()).expect("grid contains 0");
    let x = PointedSpace::new(FiniteMetricSpace::from_line(&xs), origin(&xs)).expect("nonempty");
    let y = PointedSpace::new(FiniteMetricSpace::from_plane_linf(&rows), origin(&ys)).expect("nonempty");
    BallOnly { x, y, embed_x: (0..nx).collect(), embed_y: (nx..plane.len()).collect(), plane, big_r, eps: eps.clone() }
}

impl<S: Scalar> BallOnly<S> {
    pub fn host(&self) -> FiniteMetricSpace<S> {
        FiniteMetricSpace::from_plane_linf(&self.plane)
    }

    /// The validating constructor, which rejects the folded map.
    pub fn glue(&self) -> Result<GluedSpace<S>> {
        GluedSpace::new(self.host(), self.x.clone(), self.y.clone(), self.embed_x.clone(), self.embed_y.clone())
    }

    /// Whether the folded map preserves distances on `ball_X(R)`.
    pub fn isometric_on_ball(&self) -> bool {
        let host = self.host();
        let ball = self.x.ball(&self.big_r).indices().to_vec();
        ball.iter().all(|&a| ball.iter().all(|&b| host.d(self.embed_x[a], self.embed_x[b]).approx_eq(self.x.space.d(a, b))))
    }

    /// The value obtained when only the balls are required to embed
    /// isometrically: basepoint gap and Hausdorff distance of the two balls
    /// measured in the host around the images of the basepoints.
    pub fn ball_only_value(&self) -> S {
        let host = self.host();
        let bx = self.embed_x[self.x.basepoint];
        let by = self.embed_y[self.y.basepoint];
        let ball = |center: usize, image: &[usize]| -> PointSet {
            image.iter().copied().filter(|&z| host.d(center, z).leq(&self.big_r)).collect()
        };
        let a = ball(bx, &self.embed_x);
        let b = ball(by, &self.embed_y);
        host.d(bx, by).clone().max_of(hausdorff(&host, &a, &b).expect("balls contain their centers"))
    }
}
