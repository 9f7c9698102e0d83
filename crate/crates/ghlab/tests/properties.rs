use ghlab::gluing::{all_correspondences, correspondence_distortion, glue_from_correspondence, glue_triple_w, validate_gluing, GluedSpace};
use ghlab::kantorovich::{lipschitz_seminorm_of, w1, W1Method};
use ghlab::lipschitz::{lip_constant, mcshane_extend, mcshane_extend_lower, truncate_clip};
use ghlab::local_gh::{big_delta_r, delta_r, DeltaSearch};
use ghlab::metric_core::{closed_ball, eps_contained, hausdorff, FiniteMetricSpace, PointSet, PointedSpace};
use ghlab::random::{self, rng, Rng64};
use ghlab::tunnels::{extent, Passage};
use ghlab::{Ext, Scalar, Q};
use proptest::prelude::*;
use rand::Rng;

fn space(seed: u64, n: usize) -> FiniteMetricSpace<Q> {
    random::metric(&mut rng(seed), n, 8, 2)
}

fn subset(mask: u16, n: usize) -> PointSet {
    let v: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
    if v.is_empty() {
        PointSet::new(vec![0])
    } else {
        PointSet::new(v)
    }
}

fn gluing(r: &mut Rng64) -> GluedSpace<Q> {
    if r.gen_bool(0.5) {
        let n = r.gen_range(1..=8);
        random::host_gluing(r, n)
    } else {
        let (nx, ny) = (r.gen_range(1..=4), r.gen_range(1..=4));
        random::correspondence_gluing(r, nx, ny)
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, ..ProptestConfig::default() })]

    #[test]
    fn hausdorff_is_a_metric(seed: u64, n in 1usize..=10, a: u16, b: u16, c: u16) {
        let s = space(seed, n);
        let (a, b, c) = (subset(a, n), subset(b, n), subset(c, n));
        let ab = hausdorff(&s, &a, &b).unwrap();
        prop_assert_eq!(&ab, &hausdorff(&s, &b, &a).unwrap());
        prop_assert_eq!(ab.is_zero(), a == b);
        prop_assert!(ab <= hausdorff(&s, &a, &c).unwrap() + hausdorff(&s, &c, &b).unwrap());
    }

    #[test]
    fn hausdorff_threshold_is_two_inclusions(seed: u64, n in 1usize..=8, a: u16, b: u16, k in 0i64..=20) {
        let s = space(seed, n);
        let (a, b) = (subset(a, n), subset(b, n));
        let eps = Q::new(k, 4);
        let h = hausdorff(&s, &a, &b).unwrap();
        prop_assert_eq!(h <= eps, eps_contained(&s, &a, &b, &eps) && eps_contained(&s, &b, &a, &eps));
    }

    #[test]
    fn balls_grow_and_saturate(seed: u64, n in 1usize..=8, c in 0usize..8, k in 0i64..=16) {
        let s = space(seed, n);
        let c = c % n;
        let (r, r2) = (Q::new(k, 2), Q::new(k + 1, 2));
        prop_assert!(closed_ball(&s, c, &r).is_subset(&closed_ball(&s, c, &r2)));
        prop_assert_eq!(closed_ball(&s, c, &s.diameter()), s.all());
    }

    #[test]
    fn mcshane_extremes_on_a_grid(seed: u64, n in 2usize..=4, f0 in -4i64..=4, f1 in -8i64..=8) {
        // data on the first two points; every 1-Lipschitz extension with
        // half-integer values lies between the two extremes
        let s = space(seed, n);
        let d01 = s.d(0, 1).clone();
        let v1 = Q::new(f0, 2) + Q::new(f1, 2).max_of(-d01.clone()).min_of(d01);
        let sub = vec![0, 1];
        let f = vec![Q::new(f0, 2), v1];
        let up = mcshane_extend(&s, &sub, &f, &Q::one()).unwrap();
        let lo = mcshane_extend_lower(&s, &sub, &f, &Q::one()).unwrap();
        prop_assert!(lip_constant(&s, &up).unwrap() <= Q::one() && lip_constant(&s, &lo).unwrap() <= Q::one());
        let grid: Vec<Q> = (-24..=24).map(|k| Q::new(k, 2)).collect();
        let mut g = vec![f[0].clone(), f[1].clone(), Q::zero(), Q::zero()];
        g.truncate(n);
        let mut ok = true;
        walk(&s, &mut g, 2, &grid, &up, &lo, &mut ok);
        prop_assert!(ok);
    }

    #[test]
    fn clipping_keeps_lipschitz(seed: u64, n in 1usize..=8, vals in proptest::collection::vec(-8i64..=8, 8), m in 0i64..=8) {
        let s = space(seed, n);
        let g: Vec<Q> = vals[..n].iter().map(|&v| Q::new(v, 2)).collect();
        let c = truncate_clip(&g, &Q::new(m, 2));
        prop_assert!(lip_constant(&s, &c).unwrap() <= lip_constant(&s, &g).unwrap());
    }

    #[test]
    fn correspondence_gluings_validate(seed: u64, nx in 1usize..=3, ny in 1usize..=3) {
        let mut r = rng(seed);
        let x: PointedSpace<Q> = random::pointed(&mut r, nx);
        let y: PointedSpace<Q> = random::pointed(&mut r, ny);
        for rel in all_correspondences(nx, ny) {
            let eta = correspondence_distortion(&rel, &x.space, &y.space).half();
            if eta.is_zero() {
                continue;
            }
            let g = glue_from_correspondence(&x, &y, &rel, &eta).unwrap();
            prop_assert!(validate_gluing(&g.host, &g.x, &g.y, &g.embed_x, &g.embed_y).is_ok());
        }
    }

    #[test]
    fn triple_gluing_restricts(seed: u64, nz in 1usize..=7, a: u16, b: u16, k in 0i64..=4) {
        let z = space(seed, nz);
        let (ix, iy) = (subset(a, nz).indices().to_vec(), subset(b, nz).indices().to_vec());
        let x = PointedSpace::new(z.subspace(&ix), 0).unwrap();
        let y = PointedSpace::new(z.subspace(&iy), 0).unwrap();
        let g = glue_triple_w(&x, &z, &y, &ix, &iy, &Q::new(k, 2)).unwrap();
        for (sp, emb) in [(&x, &g.embed_x), (&y, &g.embed_y)] {
            for i in 0..sp.len() {
                for j in 0..sp.len() {
                    prop_assert_eq!(g.host.d(emb[i], emb[j]), sp.space.d(i, j));
                }
            }
        }
    }

    #[test]
    fn identity_gluing_has_zero_gap(seed: u64, n in 1usize..=8) {
        let x: PointedSpace<Q> = random::pointed(&mut rng(seed), n);
        let g = GluedSpace::identity(&x);
        prop_assert!(hausdorff(&g.host, &g.image_x(), &g.image_y()).unwrap().is_zero());
    }

    #[test]
    fn w1_primal_equals_dual(seed: u64, n in 1usize..=12) {
        let mut r = rng(seed);
        let s = random::metric::<Q>(&mut r, n, 8, 2);
        let (mu, nu) = (random::measure::<Q>(&mut r, n), random::measure::<Q>(&mut r, n));
        let sn = lipschitz_seminorm_of(&s);
        prop_assert_eq!(w1(&mu, &nu, &sn, W1Method::Primal).unwrap(), w1(&mu, &nu, &sn, W1Method::Dual).unwrap());
    }

    #[test]
    fn delta_r_monotone(seed: u64, k in 1i64..=16, step in 1i64..=8) {
        let g = gluing(&mut rng(seed));
        let (r, r2) = (Q::new(k, 2), Q::new(k + step, 2));
        prop_assert!(delta_r(&g, &r).unwrap() <= delta_r(&g, &r2).unwrap());
    }

    #[test]
    fn delta_r_against_grid_scan(seed: u64, k in 1i64..=16) {
        // float, step 1e-4: the least feasible grid point is within one step
        let gq = gluing(&mut rng(seed));
        let gf = gluing_f64(&mut rng(seed));
        let r = f64::from(k as i32) / 2.0;
        let v = delta_r(&gf, &r).unwrap();
        let exact = delta_r(&gq, &Q::new(k, 2)).unwrap().to_f64();
        prop_assert!((v - exact).abs() < 1e-9);
        let scan = (0..).map(|i| i as f64 * 1e-4).find(|e| ghlab::local_gh::delta_r_feasible(&gf, &r, e)).unwrap();
        prop_assert!(scan >= v - 1e-9 && scan - v <= 1e-4 + 1e-9, "scan {} value {}", scan, v);
    }

    #[test]
    fn searched_witness_is_a_valid_gluing(seed: u64, nx in 1usize..=5, ny in 1usize..=5, k in 1i64..=12) {
        let mut r = rng(seed);
        let x: PointedSpace<Q> = random::pointed(&mut r, nx);
        let y: PointedSpace<Q> = random::pointed(&mut r, ny);
        let rad = Q::new(k, 2);
        for search in [DeltaSearch::Heuristic { seed, samples: 8 }, DeltaSearch::default()] {
            let res = big_delta_r(&x, &y, &rad, &search).unwrap();
            let w = &res.witness;
            prop_assert!(validate_gluing(&w.host, &w.x, &w.y, &w.embed_x, &w.embed_y).is_ok());
            prop_assert_eq!(delta_r(w, &rad).unwrap(), res.value);
        }
    }

    #[test]
    fn extent_inverse_symmetric_and_monotone(seed: u64, nx in 1usize..=3, ny in 1usize..=3, k in 1i64..=8) {
        let g = random::correspondence_gluing::<Q>(&mut rng(seed), nx, ny);
        let p = Passage::metric(g);
        let (r, t) = (Q::new(k, 2), Q::new(k, 4));
        let e = extent(&p, &r).unwrap().value;
        prop_assert_eq!(&e, &extent(&p.inverse(), &r).unwrap().value);
        prop_assert!(extent(&p, &t).unwrap().value.leq(&e));
        prop_assert!(e != Ext::Inf);
    }
}

fn walk(s: &FiniteMetricSpace<Q>, g: &mut Vec<Q>, i: usize, grid: &[Q], up: &[Q], lo: &[Q], ok: &mut bool) {
    if i == g.len() {
        *ok &= g.iter().zip(up).all(|(v, u)| v <= u) && g.iter().zip(lo).all(|(v, w)| v >= w);
        return;
    }
    for v in grid {
        g[i] = v.clone();
        if (0..i).all(|j| (g[i].clone() - g[j].clone()).abs() <= *s.d(i, j)) {
            walk(s, g, i + 1, grid, up, lo, ok);
        }
    }
}

fn gluing_f64(r: &mut Rng64) -> GluedSpace<f64> {
    if r.gen_bool(0.5) {
        let n = r.gen_range(1..=8);
        random::host_gluing(r, n)
    } else {
        let (nx, ny) = (r.gen_range(1..=4), r.gen_range(1..=4));
        random::correspondence_gluing(r, nx, ny)
    }
}
