//! Gluings of two pointed spaces into a common (pseudo)metric host.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metric_core::{axiom_violations, FiniteMetricSpace, PointSet, PointedSpace, Strictness};
use crate::scalar::Scalar;

/// A host space with distance-preserving maps from `X` and `Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct GluedSpace<S> {
    pub host: FiniteMetricSpace<S>,
    pub x: PointedSpace<S>,
    pub y: PointedSpace<S>,
    pub embed_x: Vec<usize>,
    pub embed_y: Vec<usize>,
}

impl<S: Scalar> GluedSpace<S> {
    /// Validating constructor; see [`validate_gluing`].
    pub fn new(
        host: FiniteMetricSpace<S>,
        x: PointedSpace<S>,
        y: PointedSpace<S>,
        embed_x: Vec<usize>,
        embed_y: Vec<usize>,
    ) -> Result<Self> {
        validate_gluing(&host, &x, &y, &embed_x, &embed_y)?;
        Ok(GluedSpace { host, x, y, embed_x, embed_y })
    }

    /// Skips validation. Only for constructions that are valid by design and
    /// for reproducing what happens when the checks are bypassed.
    pub fn new_unchecked(
        host: FiniteMetricSpace<S>,
        x: PointedSpace<S>,
        y: PointedSpace<S>,
        embed_x: Vec<usize>,
        embed_y: Vec<usize>,
    ) -> Self {
        GluedSpace { host, x, y, embed_x, embed_y }
    }

    /// `X` and `Y` are read off the host; both embeddings are then
    /// isometric by construction.
    pub fn from_host(host: FiniteMetricSpace<S>, embed_x: Vec<usize>, embed_y: Vec<usize>, base_x: usize, base_y: usize) -> Result<Self> {
        for &i in embed_x.iter().chain(&embed_y) {
            if i >= host.len() {
                return Err(Error::BadIndex(i));
            }
        }
        let x = PointedSpace::new(sub_metric(&host, &embed_x)?, base_x)?;
        let y = PointedSpace::new(sub_metric(&host, &embed_y)?, base_y)?;
        GluedSpace::new(host, x, y, embed_x, embed_y)
    }

    /// `X` glued to itself along the identity.
    pub fn identity(x: &PointedSpace<S>) -> Self {
        let id: Vec<usize> = (0..x.len()).collect();
        GluedSpace { host: x.space.clone(), x: x.clone(), y: x.clone(), embed_x: id.clone(), embed_y: id }
    }

    /// Two-block host `X ⊔ Y` with the given cross distances.
    pub fn from_cross(x: &PointedSpace<S>, y: &PointedSpace<S>, cross: &[Vec<S>]) -> Result<Self> {
        let g = Self::from_cross_unchecked(x, y, cross);
        validate_gluing(&g.host, &g.x, &g.y, &g.embed_x, &g.embed_y)?;
        Ok(g)
    }

    pub(crate) fn from_cross_unchecked(x: &PointedSpace<S>, y: &PointedSpace<S>, cross: &[Vec<S>]) -> Self {
        let (nx, ny) = (x.len(), y.len());
        let mut m = vec![vec![S::zero(); nx + ny]; nx + ny];
        for i in 0..nx {
            for j in 0..nx {
                m[i][j] = x.space.d(i, j).clone();
            }
            for j in 0..ny {
                m[i][nx + j] = cross[i][j].clone();
                m[nx + j][i] = cross[i][j].clone();
            }
        }
        for i in 0..ny {
            for j in 0..ny {
                m[nx + i][nx + j] = y.space.d(i, j).clone();
            }
        }
        let labels = x.space.labels().iter().map(|l| format!("x:{l}")).chain(y.space.labels().iter().map(|l| format!("y:{l}"))).collect();
        GluedSpace {
            host: FiniteMetricSpace::new_unchecked(labels, m, Strictness::Pseudometric),
            x: x.clone(),
            y: y.clone(),
            embed_x: (0..nx).collect(),
            embed_y: (nx..nx + ny).collect(),
        }
    }

    /// Same host with the roles of `X` and `Y` exchanged.
    pub fn inverse(&self) -> Self {
        GluedSpace {
            host: self.host.clone(),
            x: self.y.clone(),
            y: self.x.clone(),
            embed_x: self.embed_y.clone(),
            embed_y: self.embed_x.clone(),
        }
    }

    pub fn x0(&self) -> usize {
        self.embed_x[self.x.basepoint]
    }

    pub fn y0(&self) -> usize {
        self.embed_y[self.y.basepoint]
    }

    pub fn base_gap(&self) -> &S {
        self.host.d(self.x0(), self.y0())
    }

    pub fn cross(&self, i: usize, j: usize) -> &S {
        self.host.d(self.embed_x[i], self.embed_y[j])
    }

    pub fn cross_matrix(&self) -> Vec<Vec<S>> {
        (0..self.x.len()).map(|i| (0..self.y.len()).map(|j| self.cross(i, j).clone()).collect()).collect()
    }

    pub fn image_x(&self) -> PointSet {
        PointSet::new(self.embed_x.clone())
    }

    pub fn image_y(&self) -> PointSet {
        PointSet::new(self.embed_y.clone())
    }

    /// Image of `ball_X(x0, r)` in the host.
    pub fn ball_x(&self, r: &S) -> PointSet {
        self.x.ball(r).map(&self.embed_x)
    }

    pub fn ball_y(&self, r: &S) -> PointSet {
        self.y.ball(r).map(&self.embed_y)
    }

    /// Restriction of the host to `ι_X(X) ∪ ι_Y(Y)`, as a two-block gluing.
    pub fn two_block(&self) -> Self {
        Self::from_cross_unchecked(&self.x, &self.y, &self.cross_matrix())
    }
}

fn sub_metric<S: Scalar>(host: &FiniteMetricSpace<S>, idx: &[usize]) -> Result<FiniteMetricSpace<S>> {
    let mut seen = idx.to_vec();
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::PreconditionFailed("embedding is not injective".into()));
    }
    Ok(host.subspace(idx))
}

/// Checks that both maps are injective and distance preserving and that the
/// host is a pseudometric.
pub fn validate_gluing<S: Scalar>(
    host: &FiniteMetricSpace<S>,
    x: &PointedSpace<S>,
    y: &PointedSpace<S>,
    embed_x: &[usize],
    embed_y: &[usize],
) -> Result<()> {
    if embed_x.len() != x.len() || embed_y.len() != y.len() {
        return Err(Error::HostMismatch);
    }
    for &i in embed_x.iter().chain(embed_y) {
        if i >= host.len() {
            return Err(Error::BadIndex(i));
        }
    }
    for (space, embed) in [(&x.space, embed_x), (&y.space, embed_y)] {
        sub_metric(host, embed)?;
        for a in 0..space.len() {
            for b in a + 1..space.len() {
                if !host.d(embed[a], embed[b]).approx_eq(space.d(a, b)) {
                    return Err(Error::NotDistancePreserving(a, b));
                }
            }
        }
    }
    let v = axiom_violations(&host.matrix(), Strictness::Pseudometric);
    if !v.is_empty() {
        return Err(Error::AxiomViolation(v));
    }
    Ok(())
}

/// A relation between the points of `X` and `Y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Correspondence {
    pub pairs: Vec<(usize, usize)>,
}

impl Correspondence {
    pub fn new(mut pairs: Vec<(usize, usize)>) -> Self {
        pairs.sort_unstable();
        pairs.dedup();
        Correspondence { pairs }
    }

    /// Pairs of the bitmask, bit `i·ny + j` standing for `(i, j)`.
    pub fn from_mask(mask: u64, nx: usize, ny: usize) -> Self {
        let pairs = (0..nx * ny).filter(|b| mask >> b & 1 == 1).map(|b| (b / ny, b % ny)).collect();
        Correspondence { pairs }
    }

    pub fn mask(&self, ny: usize) -> u64 {
        self.pairs.iter().fold(0, |m, &(i, j)| m | 1 << (i * ny + j))
    }

    pub fn total(nx: usize, ny: usize) -> Self {
        Correspondence::new((0..nx).flat_map(|i| (0..ny).map(move |j| (i, j))).collect())
    }

    /// Graph of a bijection `i ↦ perm[i]`.
    pub fn from_map(map: &[usize]) -> Self {
        Correspondence::new(map.iter().copied().enumerate().collect())
    }

    pub fn is_surjective(&self, nx: usize, ny: usize) -> bool {
        (0..nx).all(|i| self.pairs.iter().any(|p| p.0 == i)) && (0..ny).all(|j| self.pairs.iter().any(|p| p.1 == j))
    }

    pub fn transpose(&self) -> Self {
        Correspondence::new(self.pairs.iter().map(|&(i, j)| (j, i)).collect())
    }
}

/// `max |d_X(x, x') − d_Y(y, y')|` over pairs of related points.
pub fn correspondence_distortion<S: Scalar>(r: &Correspondence, x: &FiniteMetricSpace<S>, y: &FiniteMetricSpace<S>) -> S {
    let mut best = S::zero();
    for (a, &(i, j)) in r.pairs.iter().enumerate() {
        for &(k, l) in &r.pairs[a + 1..] {
            let d = (x.d(i, k).clone() - y.d(j, l).clone()).abs();
            if d > best {
                best = d;
            }
        }
    }
    best
}

/// Cross distances `min_{(x',y')∈R} d_X(x,x') + η + d_Y(y',y)`.
///
/// Any nonempty relation works as long as `η ≥ dis(R)/2`.
pub fn glue_from_correspondence<S: Scalar>(x: &PointedSpace<S>, y: &PointedSpace<S>, r: &Correspondence, eta: &S) -> Result<GluedSpace<S>> {
    if r.pairs.is_empty() {
        return Err(Error::PreconditionFailed("empty relation".into()));
    }
    if !correspondence_distortion(r, &x.space, &y.space).half().leq(eta) {
        return Err(Error::EtaTooSmall);
    }
    Ok(GluedSpace::from_cross_unchecked(x, y, &relation_cross(x, y, r, eta)))
}

pub(crate) fn relation_cross<S: Scalar>(x: &PointedSpace<S>, y: &PointedSpace<S>, r: &Correspondence, eta: &S) -> Vec<Vec<S>> {
    (0..x.len())
        .map(|i| {
            (0..y.len())
                .map(|j| {
                    r.pairs.iter().map(|&(a, b)| x.space.d(i, a).clone() + y.space.d(b, j).clone()).reduce(S::min_of).expect("nonempty")
                        + eta.clone()
                })
                .collect()
        })
        .collect()
}

/// Host `X ⊔ Z ⊔ Y`: blocks keep their distances, `X–Z` and `Y–Z` pairs get
/// `d_Z(ι·, ·) + ε`, and `X–Y` pairs get `d_Z(ι_X·, ι_Y·) + 2ε`.
pub fn glue_triple_w<S: Scalar>(
    x: &PointedSpace<S>,
    z: &FiniteMetricSpace<S>,
    y: &PointedSpace<S>,
    iota_x: &[usize],
    iota_y: &[usize],
    eps: &S,
) -> Result<GluedSpace<S>> {
    if eps.less(&S::zero()) {
        return Err(Error::PreconditionFailed("eps must be nonnegative".into()));
    }
    for (space, embed) in [(&x.space, iota_x), (&y.space, iota_y)] {
        if embed.len() != space.len() || embed.iter().any(|&i| i >= z.len()) {
            return Err(Error::PreconditionFailed("bad embedding".into()));
        }
        sub_metric(z, embed).map_err(|_| Error::PreconditionFailed("embedding not injective".into()))?;
        for a in 0..space.len() {
            for b in a + 1..space.len() {
                if !z.d(embed[a], embed[b]).approx_eq(space.d(a, b)) {
                    return Err(Error::PreconditionFailed(format!("embedding not isometric at ({a},{b})")));
                }
            }
        }
    }
    let (nx, nz, ny) = (x.len(), z.len(), y.len());
    let n = nx + nz + ny;
    #[derive(Clone, Copy)]
    enum Block {
        X(usize),
        Z(usize),
        Y(usize),
    }
    let block = |i: usize| {
        if i < nx {
            Block::X(i)
        } else if i < nx + nz {
            Block::Z(i - nx)
        } else {
            Block::Y(i - nx - nz)
        }
    };
    let two = eps.clone() + eps.clone();
    let mut m = vec![vec![S::zero(); n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = match (block(i), block(j)) {
                (Block::X(a), Block::X(b)) => x.space.d(a, b).clone(),
                (Block::Y(a), Block::Y(b)) => y.space.d(a, b).clone(),
                (Block::Z(a), Block::Z(b)) => z.d(a, b).clone(),
                (Block::X(a), Block::Z(b)) | (Block::Z(b), Block::X(a)) => z.d(iota_x[a], b).clone() + eps.clone(),
                (Block::Y(a), Block::Z(b)) | (Block::Z(b), Block::Y(a)) => z.d(iota_y[a], b).clone() + eps.clone(),
                (Block::X(a), Block::Y(b)) | (Block::Y(b), Block::X(a)) => z.d(iota_x[a], iota_y[b]).clone() + two.clone(),
            };
        }
    }
    let labels = x
        .space
        .labels()
        .iter()
        .map(|l| format!("x:{l}"))
        .chain(z.labels().iter().map(|l| format!("z:{l}")))
        .chain(y.space.labels().iter().map(|l| format!("y:{l}")))
        .collect();
    let strict = if eps.is_zero() || z.strictness() == Strictness::Pseudometric { Strictness::Pseudometric } else { Strictness::Metric };
    let host = FiniteMetricSpace::new_unchecked(labels, m, strict);
    let v = axiom_violations(&host.matrix(), strict);
    if !v.is_empty() {
        return Err(Error::AxiomViolation(v));
    }
    Ok(GluedSpace { host, x: x.clone(), y: y.clone(), embed_x: (0..nx).collect(), embed_y: (nx + nz..n).collect() })
}

/// How gluings are enumerated.
#[derive(Clone, Debug, PartialEq)]
pub enum Search {
    /// Every correspondence, provided `|X|·|Y| ≤ budget`.
    Exact { budget: usize },
    /// Seeded random correspondences.
    Heuristic { seed: u64, samples: usize },
}

impl Default for Search {
    fn default() -> Self {
        Search::Exact { budget: 12 }
    }
}

/// All correspondences between `nx` and `ny` points, by increasing mask.
pub fn all_correspondences(nx: usize, ny: usize) -> impl Iterator<Item = Correspondence> {
    assert!(nx * ny < 64);
    let full = if nx * ny == 0 { 0 } else { (1u64 << (nx * ny)) - 1 };
    // masks whose rows and columns are all nonempty
    let row_masks: Vec<u64> = (0..nx).map(|i| ((1u64 << ny) - 1) << (i * ny)).collect();
    let col_masks: Vec<u64> = (0..ny).map(|j| (0..nx).fold(0, |m, i| m | 1u64 << (i * ny + j))).collect();
    (1..=full)
        .filter(move |m| row_masks.iter().all(|r| m & r != 0) && col_masks.iter().all(|c| m & c != 0))
        .map(move |m| Correspondence::from_mask(m, nx, ny))
}

/// Random correspondence: every point picks one partner, plus a few extra pairs.
pub fn random_correspondence(nx: usize, ny: usize, rng: &mut impl Rng) -> Correspondence {
    let mut pairs = Vec::new();
    for i in 0..nx {
        pairs.push((i, rng.gen_range(0..ny)));
    }
    for j in 0..ny {
        pairs.push((rng.gen_range(0..nx), j));
    }
    let extra = rng.gen_range(0..=nx.min(ny));
    for _ in 0..extra {
        pairs.push((rng.gen_range(0..nx), rng.gen_range(0..ny)));
    }
    pairs.shuffle(rng);
    Correspondence::new(pairs)
}

/// Correspondence gluings at `η = dis(R)/2`, paired with their relation.
pub fn enumerate_gluings<S: Scalar>(
    x: &PointedSpace<S>,
    y: &PointedSpace<S>,
    search: &Search,
) -> Result<Vec<(Correspondence, GluedSpace<S>)>> {
    let rels = correspondences_for(x.len(), y.len(), search)?;
    Ok(rels
        .into_iter()
        .map(|r| {
            let eta = correspondence_distortion(&r, &x.space, &y.space).half();
            let g = GluedSpace::from_cross_unchecked(x, y, &relation_cross(x, y, &r, &eta));
            (r, g)
        })
        .collect())
}

pub fn correspondences_for(nx: usize, ny: usize, search: &Search) -> Result<Vec<Correspondence>> {
    match search {
        Search::Exact { budget } => {
            if nx * ny > *budget || nx * ny >= 64 {
                return Err(Error::BudgetExceeded(format!("{nx}x{ny} points exceeds budget {budget}")));
            }
            Ok(all_correspondences(nx, ny).collect())
        }
        Search::Heuristic { seed, samples } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut out: Vec<Correspondence> = (0..*samples).map(|_| random_correspondence(nx, ny, &mut rng)).collect();
            out.sort();
            out.dedup();
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric_core::{hausdorff, validate_metric};
    use crate::scalar::Q;

    fn z(n: i64) -> Q {
        Q::from_i64(n)
    }

    fn line(c: &[Q]) -> PointedSpace<Q> {
        PointedSpace::new(FiniteMetricSpace::from_line(c), 0).unwrap()
    }

    #[test]
    fn identity_gluing_is_valid() {
        let x = line(&[z(0), z(1), z(3)]);
        let g = GluedSpace::identity(&x);
        assert!(validate_gluing(&g.host, &g.x, &g.y, &g.embed_x, &g.embed_y).is_ok());
        assert_eq!(hausdorff(&g.host, &g.image_x(), &g.image_y()).unwrap(), z(0));
    }

    #[test]
    fn line_subspace_gluing() {
        let host = FiniteMetricSpace::from_line(&[z(0), Q::new(7, 3), z(2)]);
        let g = GluedSpace::from_host(host, vec![0, 1], vec![0, 2], 0, 0).unwrap();
        assert_eq!(g.cross(1, 1), &Q::new(1, 3));
        assert_eq!(g.base_gap(), &z(0));
    }

    #[test]
    fn perturbed_cross_entry_rejected() {
        let x = line(&[z(0), z(1)]);
        let y = line(&[z(0), z(1)]);
        let cross = vec![vec![z(0), z(5)], vec![z(1), z(0)]];
        assert!(matches!(GluedSpace::from_cross(&x, &y, &cross), Err(Error::AxiomViolation(_))));
        let ok = vec![vec![z(0), z(1)], vec![z(1), z(0)]];
        assert!(GluedSpace::from_cross(&x, &y, &ok).is_ok());
    }

    #[test]
    fn non_isometric_embedding_rejected() {
        let host = FiniteMetricSpace::from_line(&[z(0), z(1), z(2)]);
        let x = line(&[z(0), z(1)]);
        let res = validate_gluing(&host, &x, &x, &[0, 2], &[0, 1]);
        assert_eq!(res, Err(Error::NotDistancePreserving(0, 1)));
    }

    #[test]
    fn distortion_examples() {
        let x = line(&[z(0), z(1), z(3)]);
        let id = Correspondence::from_map(&[0, 1, 2]);
        assert_eq!(correspondence_distortion(&id, &x.space, &x.space), z(0));
        let one = line(&[z(0)]);
        let two = line(&[z(0), z(1)]);
        assert_eq!(correspondence_distortion(&Correspondence::total(1, 2), &one.space, &two.space), z(1));
        // total relation: max over all |d_X − d_Y| pairs
        let y = line(&[z(0), z(2)]);
        let mut best = z(0);
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..2 {
                    for d in 0..2 {
                        best = best.max_of((x.space.d(a, b).clone() - y.space.d(c, d).clone()).abs());
                    }
                }
            }
        }
        assert_eq!(correspondence_distortion(&Correspondence::total(3, 2), &x.space, &y.space), best);
    }

    #[test]
    fn correspondence_gluing_examples() {
        let x = line(&[z(0), z(1), z(3)]);
        let g = glue_from_correspondence(&x, &x, &Correspondence::from_map(&[0, 1, 2]), &z(0)).unwrap();
        assert_eq!(g.cross_matrix(), x.space.matrix());
        let p = line(&[z(0)]);
        let g = glue_from_correspondence(&p, &p, &Correspondence::total(1, 1), &z(1)).unwrap();
        assert_eq!(g.cross(0, 0), &z(1));
        let two = line(&[z(0), z(1)]);
        assert_eq!(glue_from_correspondence(&p, &two, &Correspondence::total(1, 2), &Q::new(1, 4)), Err(Error::EtaTooSmall));
    }

    #[test]
    fn every_correspondence_gluing_valid_3x3() {
        let x = PointedSpace::new(
            validate_metric(vec![vec![z(0), z(2), z(3)], vec![z(2), z(0), z(4)], vec![z(3), z(4), z(0)]], Strictness::Metric).unwrap(),
            0,
        )
        .unwrap();
        let y = line(&[z(0), z(1), z(5)]);
        let mut count = 0;
        for (r, g) in enumerate_gluings(&x, &y, &Search::Exact { budget: 9 }).unwrap() {
            assert!(r.is_surjective(3, 3));
            validate_gluing(&g.host, &g.x, &g.y, &g.embed_x, &g.embed_y).unwrap();
            count += 1;
        }
        assert_eq!(count, 265);
    }

    #[test]
    fn correspondence_count_2x2() {
        // independent count over all 16 subsets of the 2x2 grid
        let mut oracle = 0;
        for mask in 1u32..16 {
            let rows = [(mask & 0b0011) != 0, (mask & 0b1100) != 0];
            let cols = [(mask & 0b0101) != 0, (mask & 0b1010) != 0];
            if rows.iter().all(|&b| b) && cols.iter().all(|&b| b) {
                oracle += 1;
            }
        }
        assert_eq!(oracle, 7);
        assert_eq!(all_correspondences(2, 2).count(), oracle);
        assert_eq!(all_correspondences(1, 1).count(), 1);
    }

    #[test]
    fn heuristic_is_seeded() {
        let a = correspondences_for(4, 5, &Search::Heuristic { seed: 7, samples: 30 }).unwrap();
        let b = correspondences_for(4, 5, &Search::Heuristic { seed: 7, samples: 30 }).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|r| r.is_surjective(4, 5)));
        assert!(matches!(correspondences_for(4, 5, &Search::Exact { budget: 12 }), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn triple_w_table() {
        let p = line(&[z(0)]);
        let zsp = FiniteMetricSpace::from_line(&[z(0)]);
        let g = glue_triple_w(&p, &zsp, &p, &[0], &[0], &z(1)).unwrap();
        assert_eq!(g.host.matrix(), vec![vec![z(0), z(1), z(2)], vec![z(1), z(0), z(1)], vec![z(2), z(1), z(0)]]);
        assert_eq!(g.host.strictness(), Strictness::Metric);
    }

    #[test]
    fn triple_w_at_zero_is_pseudometric_quotient() {
        let x = line(&[z(0), z(2)]);
        let y = line(&[z(0), z(3)]);
        let zsp = FiniteMetricSpace::from_line(&[z(0), z(2), z(3)]);
        let g = glue_triple_w(&x, &zsp, &y, &[0, 1], &[0, 2], &z(0)).unwrap();
        assert_eq!(g.host.strictness(), Strictness::Pseudometric);
        // X–Y distances collapse to those of Z
        assert_eq!(g.cross(1, 1), &z(1));
        assert_eq!(g.cross(0, 0), &z(0));
        assert!(validate_gluing(&g.host, &g.x, &g.y, &g.embed_x, &g.embed_y).is_ok());
    }
}
