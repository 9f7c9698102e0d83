//! Local Gromov–Hausdorff quantities `δ_r`, `Δ_r` and the classical GH
//! inframetric.
//!
//! `Δ_r` is computed exactly through relations: a gluing in which every pair
//! of a relation `R ⊆ X × Y` sits at distance `≤ ε` exists iff
//! `dis(R) ≤ 2ε` (take the relation gluing with `η = ε`). Hence
//! `Δ_r = ½·min dis(R)` over relations containing the basepoint pair and
//! covering both closed balls of radius `r`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gluing::{correspondence_distortion, correspondences_for, glue_from_correspondence, Correspondence, GluedSpace, Search};
use crate::metric_core::{closed_ball, dist_to_set, hausdorff, PointSet, PointedSpace};
use crate::scalar::{sort_dedup, Ext, Scalar};

fn check_radius<S: Scalar>(r: &S) -> Result<()> {
    if r.leq(&S::zero()) {
        return Err(Error::NonPositiveRadius);
    }
    Ok(())
}

/// Breakpoints at which either feasibility predicate for `δ_r` can change.
fn delta_candidates<S: Scalar>(g: &GluedSpace<S>, r: &S) -> Vec<S> {
    let h = &g.host;
    let n = h.len();
    let mut c = vec![S::zero(), g.base_gap().clone()];
    for p in 0..n {
        for q in p + 1..n {
            c.push(h.d(p, q).clone());
        }
    }
    for center in [g.x0(), g.y0()] {
        for q in 0..n {
            let v = (h.d(center, q).clone() - r.clone()).half();
            if !v.less(&S::zero()) {
                c.push(v);
            }
        }
    }
    sort_dedup(&mut c);
    c
}

/// `d(x0,y0) ≤ ε`, `ball_X(r) ⊆_ε Y`, `ball_Y(r) ⊆_ε X`.
pub fn delta_r_feasible<S: Scalar>(g: &GluedSpace<S>, r: &S, eps: &S) -> bool {
    g.base_gap().leq(eps) && covered(g, &g.ball_x(r), &g.image_y(), eps) && covered(g, &g.ball_y(r), &g.image_x(), eps)
}

/// `d(x0,y0) ≤ ε`, `ball_X(r) ⊆_ε ball_Y(r+2ε)`, `ball_Y(r) ⊆_ε ball_X(r+2ε)`.
pub fn delta_r_alt_feasible<S: Scalar>(g: &GluedSpace<S>, r: &S, eps: &S) -> bool {
    let wide = r.clone() + eps.clone() + eps.clone();
    g.base_gap().leq(eps) && covered(g, &g.ball_x(r), &g.ball_y(&wide), eps) && covered(g, &g.ball_y(r), &g.ball_x(&wide), eps)
}

fn covered<S: Scalar>(g: &GluedSpace<S>, b: &PointSet, a: &PointSet, eps: &S) -> bool {
    b.iter().all(|p| dist_to_set(&g.host, p, a).leq_fin(eps))
}

fn smallest_feasible<S: Scalar>(g: &GluedSpace<S>, r: &S, pred: fn(&GluedSpace<S>, &S, &S) -> bool) -> S {
    delta_candidates(g, r).into_iter().find(|e| pred(g, r, e)).expect("the largest host distance is always feasible")
}

/// `δ_r` of a gluing, as the smallest feasible breakpoint.
pub fn delta_r<S: Scalar>(g: &GluedSpace<S>, r: &S) -> Result<S> {
    check_radius(r)?;
    Ok(smallest_feasible(g, r, delta_r_feasible))
}

/// `δ_r` through the form that only looks at balls of radius `r + 2ε`.
pub fn delta_r_alt<S: Scalar>(g: &GluedSpace<S>, r: &S) -> Result<S> {
    check_radius(r)?;
    Ok(smallest_feasible(g, r, delta_r_alt_feasible))
}

/// `max(d(x0,y0), max_{x∈ball_X(r)} d(x, Y), max_{y∈ball_Y(r)} d(y, X))`.
pub fn delta_r_closed_form<S: Scalar>(g: &GluedSpace<S>, r: &S) -> Result<S> {
    check_radius(r)?;
    let mut v = g.base_gap().clone();
    for (ball, other) in [(g.ball_x(r), g.image_y()), (g.ball_y(r), g.image_x())] {
        for p in ball.iter() {
            v = v.max_of(dist_to_set(&g.host, p, &other).unwrap_fin());
        }
    }
    Ok(v)
}

/// Truth values of the four equivalent assertions at a given `ε`, with the
/// sets `K ⊆ Y` and `Q ⊆ X` used for assertions 2–4.
#[derive(Clone, Debug, PartialEq)]
pub struct Equivalents {
    pub assertions: [bool; 4],
    /// `{y : d(y, ball_X(r)) ≤ ε}`, as indices of `Y`.
    pub k: PointSet,
    /// `{x : d(x, ball_Y(r)) ≤ ε}`, as indices of `X`.
    pub q: PointSet,
}

impl Equivalents {
    pub fn agree(&self) -> bool {
        self.assertions.iter().all(|&a| a == self.assertions[0])
    }
}

pub fn delta_r_equivalents<S: Scalar>(g: &GluedSpace<S>, r: &S, eps: &S) -> Result<Equivalents> {
    check_radius(r)?;
    let h = &g.host;
    let bx = g.ball_x(r);
    let by = g.ball_y(r);
    let k: PointSet = (0..g.y.len()).filter(|&j| dist_to_set(h, g.embed_y[j], &bx).leq_fin(eps)).collect();
    let q: PointSet = (0..g.x.len()).filter(|&i| dist_to_set(h, g.embed_x[i], &by).leq_fin(eps)).collect();
    let two = eps.clone() + eps.clone();
    let lo = r.clone() - two.clone();
    let hi = r.clone() + two;
    let base = g.base_gap().leq(eps);
    let haus_ok = |a: &PointSet, b: &PointSet| match hausdorff(h, a, b) {
        Ok(v) => v.leq(eps),
        Err(_) => false,
    };
    let haus = haus_ok(&bx, &k.map(&g.embed_y)) && haus_ok(&q.map(&g.embed_x), &by);
    let upper = k.is_subset(&g.y.ball(&hi)) && q.is_subset(&g.x.ball(&hi));
    let lower = closed_ball(&g.y.space, g.y.basepoint, &lo).is_subset(&k) && closed_ball(&g.x.space, g.x.basepoint, &lo).is_subset(&q);
    let a1 = delta_r(g, r)?.leq(eps);
    Ok(Equivalents { assertions: [a1, base && haus && upper && lower, base && haus && upper, base && haus], k, q })
}

/// How `Δ_r` is searched.
#[derive(Clone, Debug, PartialEq)]
pub enum DeltaSearch {
    /// Exact minimum over relations by branch and bound; fails with
    /// `BudgetExceeded` after `nodes` search nodes.
    Exact { nodes: usize },
    /// Correspondence gluings at `η = dis(R)/2`, refined by coordinate
    /// descent on the cross matrix. An upper bound.
    Correspondences(Search),
    /// Seeded greedy relations plus coordinate descent. An upper bound.
    Heuristic { seed: u64, samples: usize },
}

impl Default for DeltaSearch {
    fn default() -> Self {
        DeltaSearch::Exact { nodes: 2_000_000 }
    }
}

impl DeltaSearch {
    pub fn is_exact(&self) -> bool {
        matches!(self, DeltaSearch::Exact { .. })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaResult<S> {
    pub value: S,
    pub witness: GluedSpace<S>,
    /// Relation generating the witness before any refinement.
    pub relation: Correspondence,
    pub exact: bool,
}

/// `Δ_r(X, Y)`: the least `δ_r` over gluings of `X` and `Y`.
pub fn big_delta_r<S: Scalar>(x: &PointedSpace<S>, y: &PointedSpace<S>, r: &S, search: &DeltaSearch) -> Result<DeltaResult<S>> {
    check_radius(r)?;
    match search {
        DeltaSearch::Exact { nodes } => exact_delta(x, y, r, *nodes),
        DeltaSearch::Correspondences(s) => {
            let rels = correspondences_for(x.len(), y.len(), s)?;
            best_of_relations(x, y, r, rels)
        }
        DeltaSearch::Heuristic { seed, samples } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let rels = (0..(*samples).max(1)).map(|_| greedy_relation(x, y, r, &mut rng)).collect();
            best_of_relations(x, y, r, rels)
        }
    }
}

fn best_of_relations<S: Scalar>(x: &PointedSpace<S>, y: &PointedSpace<S>, r: &S, mut rels: Vec<Correspondence>) -> Result<DeltaResult<S>> {
    rels.sort();
    rels.dedup();
    let mut best: Option<DeltaResult<S>> = None;
    for rel in rels {
        let eta = correspondence_distortion(&rel, &x.space, &y.space).half();
        let g = glue_from_correspondence(x, y, &rel, &eta)?;
        let g = descend(g, r);
        let v = delta_r(&g, r)?;
        if best.as_ref().is_none_or(|b| v.less(&b.value)) {
            best = Some(DeltaResult { value: v, witness: g, relation: rel, exact: false });
        }
    }
    best.ok_or(Error::EmptySet)
}

/// Lowers the cross entries that realize `δ_r` to the smallest value the
/// triangle inequality allows, while `δ_r` keeps decreasing.
fn descend<S: Scalar>(g: GluedSpace<S>, r: &S) -> GluedSpace<S> {
    let (nx, ny) = (g.x.len(), g.y.len());
    let dx = &g.x.space;
    let dy = &g.y.space;
    let mut c = g.cross_matrix();
    let mut current = delta_from_cross(&g, &c, r);
    for _ in 0..4 * (nx + ny) {
        let mut active = vec![(g.x.basepoint, g.y.basepoint)];
        for i in g.x.ball(r).iter() {
            let j = (0..ny).min_by(|&a, &b| c[i][a].cmp_total(&c[i][b])).expect("Y nonempty");
            active.push((i, j));
        }
        for j in g.y.ball(r).iter() {
            let i = (0..nx).min_by(|&a, &b| c[a][j].cmp_total(&c[b][j])).expect("X nonempty");
            active.push((i, j));
        }
        let mut next = c.clone();
        for (i, j) in active {
            let mut lo = S::zero();
            for k in 0..nx {
                if k != i {
                    lo = lo.max_of((next[k][j].clone() - dx.d(i, k).clone()).max_of(dx.d(i, k).clone() - next[k][j].clone()));
                }
            }
            for l in 0..ny {
                if l != j {
                    lo = lo.max_of((next[i][l].clone() - dy.d(j, l).clone()).max_of(dy.d(j, l).clone() - next[i][l].clone()));
                }
            }
            if lo.less(&next[i][j]) {
                next[i][j] = lo;
            }
        }
        let v = delta_from_cross(&g, &next, r);
        if !v.less(&current) {
            break;
        }
        current = v;
        c = next;
    }
    GluedSpace::from_cross_unchecked(&g.x, &g.y, &c)
}

fn delta_from_cross<S: Scalar>(g: &GluedSpace<S>, c: &[Vec<S>], r: &S) -> S {
    let mut v = c[g.x.basepoint][g.y.basepoint].clone();
    for i in g.x.ball(r).iter() {
        v = v.max_of(c[i].iter().cloned().reduce(S::min_of).expect("Y nonempty"));
    }
    for j in g.y.ball(r).iter() {
        v = v.max_of(c.iter().map(|row| row[j].clone()).reduce(S::min_of).expect("X nonempty"));
    }
    v
}

/// Basepoint pair plus, for each ball point in random order, the partner that
/// keeps the distortion smallest (ties broken at random).
fn greedy_relation<S: Scalar>(x: &PointedSpace<S>, y: &PointedSpace<S>, r: &S, rng: &mut impl Rng) -> Correspondence {
    let mut pairs = vec![(x.basepoint, y.basepoint)];
    let mut todo: Vec<(bool, usize)> = x.ball(r).iter().map(|i| (true, i)).chain(y.ball(r).iter().map(|j| (false, j))).collect();
    todo.shuffle(rng);
    for (left, p) in todo {
        let cost = |a: usize, b: usize| {
            pairs.iter().map(|&(c, d)| (x.space.d(a, c).clone() - y.space.d(b, d).clone()).abs()).reduce(S::max_of).expect("nonempty")
        };
        let options: Vec<(usize, usize)> =
            if left { (0..y.len()).map(|b| (p, b)).collect() } else { (0..x.len()).map(|a| (a, p)).collect() };
        let costs: Vec<S> = options.iter().map(|&(a, b)| cost(a, b)).collect();
        let best = costs.iter().cloned().reduce(S::min_of).expect("nonempty");
        let ties: Vec<usize> = (0..options.len()).filter(|&k| costs[k].approx_eq(&best)).collect();
        pairs.push(options[ties[rng.gen_range(0..ties.len())]]);
    }
    Correspondence::new(pairs)
}

struct RelationSearch<'a, S> {
    x: &'a PointedSpace<S>,
    y: &'a PointedSpace<S>,
    bx: PointSet,
    by: PointSet,
    nodes: usize,
    budget: usize,
}

impl<S: Scalar> RelationSearch<'_, S> {
    /// A relation with distortion `≤ 2ε`, if one exists.
    fn feasible(&mut self, eps: &S) -> Result<Option<Correspondence>> {
        let two = eps.clone() + eps.clone();
        let (x0, y0) = (self.x.basepoint, self.y.basepoint);
        let ok =
            |a: (usize, usize), b: (usize, usize)| (self.x.space.d(a.0, b.0).clone() - self.y.space.d(a.1, b.1).clone()).abs().leq(&two);
        let pairs: Vec<(usize, usize)> = (0..self.x.len())
            .flat_map(|i| (0..self.y.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| self.bx.contains(i) || self.by.contains(j))
            .filter(|&p| ok(p, (x0, y0)))
            .collect();
        let words = pairs.len().div_ceil(64).max(1);
        let compat: Vec<Vec<u64>> = pairs
            .iter()
            .map(|&p| {
                let mut row = vec![0u64; words];
                for (k, &q) in pairs.iter().enumerate() {
                    if ok(p, q) {
                        row[k / 64] |= 1 << (k % 64);
                    }
                }
                row
            })
            .collect();
        let mut allowed = vec![0u64; words];
        for k in 0..pairs.len() {
            allowed[k / 64] |= 1 << (k % 64);
        }
        let mut chosen = vec![(x0, y0)];
        if self.dfs(&pairs, &compat, &allowed, &mut chosen)? {
            Ok(Some(Correspondence::new(chosen)))
        } else {
            Ok(None)
        }
    }

    fn dfs(&mut self, pairs: &[(usize, usize)], compat: &[Vec<u64>], allowed: &[u64], chosen: &mut Vec<(usize, usize)>) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded(format!("relation search exceeded {} nodes", self.budget)));
        }
        let has = |k: usize| allowed[k / 64] >> (k % 64) & 1 == 1;
        // the uncovered ball point with the fewest admissible partners
        let mut target: Option<Vec<usize>> = None;
        let uncovered_x = self.bx.iter().filter(|&i| !chosen.iter().any(|p| p.0 == i)).map(|i| (true, i));
        let uncovered_y = self.by.iter().filter(|&j| !chosen.iter().any(|p| p.1 == j)).map(|j| (false, j));
        for (left, p) in uncovered_x.chain(uncovered_y).collect::<Vec<_>>() {
            let options: Vec<usize> =
                (0..pairs.len()).filter(|&k| has(k) && if left { pairs[k].0 == p } else { pairs[k].1 == p }).collect();
            if options.is_empty() {
                return Ok(false);
            }
            if target.as_ref().is_none_or(|t| options.len() < t.len()) {
                target = Some(options);
            }
        }
        let Some(options) = target else { return Ok(true) };
        for k in options {
            let next: Vec<u64> = allowed.iter().zip(&compat[k]).map(|(a, b)| a & b).collect();
            chosen.push(pairs[k]);
            if self.dfs(pairs, compat, &next, chosen)? {
                return Ok(true);
            }
            chosen.pop();
        }
        Ok(false)
    }
}

fn exact_delta<S: Scalar>(x: &PointedSpace<S>, y: &PointedSpace<S>, r: &S, budget: usize) -> Result<DeltaResult<S>> {
    let mut cand = Vec::new();
    for a in 0..x.len() {
        for b in a..x.len() {
            for c in 0..y.len() {
                for d in c..y.len() {
                    cand.push((x.space.d(a, b).clone() - y.space.d(c, d).clone()).abs().half());
                }
            }
        }
    }
    sort_dedup(&mut cand);
    let mut search = RelationSearch { x, y, bx: x.ball(r), by: y.ball(r), nodes: 0, budget };
    // binary search for the first feasible candidate; the last one always is
    let (mut lo, mut hi) = (0usize, cand.len() - 1);
    let mut best = search.feasible(&cand[hi])?.expect("every relation is feasible at the largest gap");
    while lo < hi {
        let mid = (lo + hi) / 2;
        match search.feasible(&cand[mid])? {
            Some(rel) => {
                hi = mid;
                best = rel;
            }
            None => lo = mid + 1,
        }
    }
    let eta = correspondence_distortion(&best, &x.space, &y.space).half();
    let witness = glue_from_correspondence(x, y, &best, &eta)?;
    debug_assert!(delta_r(&witness, r).map(|v| v.approx_eq(&cand[hi])).unwrap_or(false));
    Ok(DeltaResult { value: cand[hi].clone(), witness, relation: best, exact: true })
}

/// Classical GH inframetric, truncated at 1/2, and the raw infimum.
#[derive(Clone, Debug, PartialEq)]
pub struct Inframetric<S> {
    pub truncated: S,
    pub untruncated: S,
    /// Whether every `Δ` evaluation was exact.
    pub exact: bool,
}

/// `max(inf{ρ > 0 : Δ_{1/ρ}(X,Y) < ρ}, 1/2)`.
///
/// `s ↦ Δ_s` only changes where a ball changes, so it is constant on the
/// intervals between consecutive basepoint distances. On each interval the
/// set of admissible `ρ` is an interval whose left end is read off directly;
/// no bisection is needed.
pub fn gh_inframetric<S: Scalar>(x: &PointedSpace<S>, y: &PointedSpace<S>, search: &DeltaSearch) -> Result<Inframetric<S>> {
    let mut radii: Vec<S> = x.radii().into_iter().chain(y.radii()).filter(|s| S::zero().less(s)).collect();
    sort_dedup(&mut radii);
    let half = S::ratio(1, 2);
    if radii.is_empty() {
        return Ok(Inframetric { truncated: half, untruncated: S::zero(), exact: true });
    }
    // pieces (a, b] in ρ with the value of Δ there; Ext::Inf marks b = ∞
    let mut pieces: Vec<(S, Ext<S>, S)> = Vec::new();
    let mut exact = true;
    let mut eval = |s: &S| -> Result<S> {
        let d = big_delta_r(x, y, s, search)?;
        exact &= d.exact;
        Ok(d.value)
    };
    let first = radii[0].clone();
    pieces.push((S::one() / first.clone(), Ext::Inf, eval(&first.half())?));
    for w in radii.windows(2) {
        pieces.push((S::one() / w[1].clone(), Ext::Fin(S::one() / w[0].clone()), eval(&w[0])?));
    }
    let last = radii.last().expect("nonempty").clone();
    pieces.push((S::zero(), Ext::Fin(S::one() / last.clone()), eval(&last)?));
    let mut inf: Option<S> = None;
    for (a, b, v) in pieces {
        let left = a.max_of(v);
        let open = match &b {
            Ext::Inf => true,
            Ext::Fin(b) => left.less(b),
        };
        if open && inf.as_ref().is_none_or(|m| left.less(m)) {
            inf = Some(left);
        }
    }
    let raw = inf.expect("the unbounded piece is always open");
    Ok(Inframetric { truncated: raw.clone().max_of(half), untruncated: raw, exact })
}

/// Bisection on `ρ ↦ [Δ_{1/ρ} < ρ]`, returning a bracket of the raw
/// infimum after `iters` halvings. Used to cross-check [`gh_inframetric`].
pub fn gh_inframetric_bisect<S: Scalar>(x: &PointedSpace<S>, y: &PointedSpace<S>, search: &DeltaSearch, iters: usize) -> Result<(S, S)> {
    let holds = |rho: &S| -> Result<bool> { Ok(big_delta_r(x, y, &(S::one() / rho.clone()), search)?.value.less(rho)) };
    let mut hi = S::one();
    while !holds(&hi)? {
        hi = hi.clone() + hi.clone();
    }
    let mut lo = S::zero();
    for _ in 0..iters {
        let mid = (lo.clone() + hi.clone()).half();
        if holds(&mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo, hi))
}
