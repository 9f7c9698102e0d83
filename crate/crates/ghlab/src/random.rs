//! Seeded generators for the verification suites. Every value is a small
//! rational, so both backends see the same instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gluing::{correspondence_distortion, glue_from_correspondence, random_correspondence, GluedSpace};
use crate::kantorovich::Measure;
use crate::metric_core::{FiniteMetricSpace, PointedSpace, Strictness};
use crate::scalar::Scalar;

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for case `i` of a suite, so that cases do not depend
/// on each other's consumption.
pub fn case_rng(seed: u64, suite: &str, i: usize) -> Rng64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in suite.bytes() {
        h = (h ^ b as u64).wrapping_mul(0x0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ h ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// `k/den` with `k` uniform in `lo..=hi`.
pub fn rational<S: Scalar>(rng: &mut impl Rng, lo: i64, hi: i64, den: i64) -> S {
    S::ratio(rng.gen_range(lo..=hi), den)
}

/// Shortest-path metric of a complete graph with random weights in
/// `[1/den, max/den]`; strict.
pub fn metric<S: Scalar>(rng: &mut impl Rng, n: usize, max: i64, den: i64) -> FiniteMetricSpace<S> {
    let mut m = vec![vec![S::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w: S = rational(rng, 1, max, den);
            m[i][j] = w.clone();
            m[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = m[i][k].clone() + m[k][j].clone();
                if via < m[i][j] {
                    m[i][j] = via;
                }
            }
        }
    }
    let labels = (0..n).map(|i| i.to_string()).collect();
    FiniteMetricSpace::new_unchecked(labels, m, Strictness::Metric)
}

pub fn pointed<S: Scalar>(rng: &mut impl Rng, n: usize) -> PointedSpace<S> {
    let space = metric(rng, n, 8, 2);
    let base = rng.gen_range(0..n);
    PointedSpace::new(space, base).expect("valid basepoint")
}

/// Subsets `X`, `Y` of a random host (possibly overlapping), read off with
/// [`GluedSpace::from_host`].
pub fn host_gluing<S: Scalar>(rng: &mut impl Rng, host_n: usize) -> GluedSpace<S> {
    let host = metric(rng, host_n, 8, 2);
    let pick = |rng: &mut dyn rand::RngCore| {
        let mut idx: Vec<usize> = (0..host_n).collect();
        idx.shuffle(rng);
        let k = rng.gen_range(1..=host_n);
        idx.truncate(k);
        idx
    };
    let ex = pick(rng);
    let ey = pick(rng);
    let (bx, by) = (rng.gen_range(0..ex.len()), rng.gen_range(0..ey.len()));
    GluedSpace::from_host(host, ex, ey, bx, by).expect("subsets of a metric space")
}

/// Correspondence gluing of two random spaces at `η = dis/2 + extra`.
pub fn correspondence_gluing<S: Scalar>(rng: &mut impl Rng, nx: usize, ny: usize) -> GluedSpace<S> {
    let x: PointedSpace<S> = pointed(rng, nx);
    let y: PointedSpace<S> = pointed(rng, ny);
    let rel = random_correspondence(nx, ny, rng);
    let extra: S = rational(rng, 0, 2, 4);
    let eta = correspondence_distortion(&rel, &x.space, &y.space).half() + extra;
    glue_from_correspondence(&x, &y, &rel, &eta).expect("eta above half the distortion")
}

pub fn function<S: Scalar>(rng: &mut impl Rng, n: usize, range: i64, den: i64) -> Vec<S> {
    (0..n).map(|_| rational(rng, -range, range, den)).collect()
}

/// Positive integer weights, normalized; a random subset may be zeroed.
pub fn measure<S: Scalar>(rng: &mut impl Rng, n: usize) -> Measure<S> {
    let mut w: Vec<i64> = (0..n).map(|_| if rng.gen_bool(0.3) { 0 } else { rng.gen_range(1..=6) }).collect();
    if w.iter().all(|&v| v == 0) {
        w[rng.gen_range(0..n)] = 1;
    }
    let total: i64 = w.iter().sum();
    Measure::new(w.into_iter().map(|v| S::ratio(v, total)).collect()).expect("normalized")
}

/// A random permutation of `0..n`.
pub fn permutation(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}
