use minkbilliard::body::{gauge_norm, polar, width};
use minkbilliard::random::{case_rng, random_polygon};
use minkbilliard::{fit_scale, ConvexBody};
use proptest::prelude::*;

fn polygon(seed: u64) -> ConvexBody {
    random_polygon(&mut case_rng(seed, 0), 9)
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gauge_is_sublinear(seed in any::<u64>(), q in point(), r in point(), lambda in 0.0f64..10.0) {
        let t = polygon(seed);
        let g = |x: &[f64]| gauge_norm(x, &t).unwrap();
        let scaled: Vec<f64> = q.iter().map(|x| lambda * x).collect();
        prop_assert!((g(&scaled) - lambda * g(&q)).abs() <= 1e-12 * (1.0 + lambda * g(&q)));
        let sum: Vec<f64> = q.iter().zip(&r).map(|(a, b)| a + b).collect();
        prop_assert!(g(&sum) <= g(&q) + g(&r) + 1e-12);
    }

    #[test]
    fn unit_gauge_is_the_polar_boundary(seed in any::<u64>(), q in point()) {
        let t = polygon(seed);
        let g = gauge_norm(&q, &t).unwrap();
        prop_assume!(g > 1e-6);
        let x: Vec<f64> = q.iter().map(|v| v / g).collect();
        let tp = polar(&t);
        let poly = tp.as_polytope().unwrap();
        prop_assert!((gauge_norm(&x, &t).unwrap() - 1.0).abs() <= 1e-9);
        prop_assert!(!poly.facets_containing(&x).is_empty());
    }

    #[test]
    fn polar_is_an_involution(seed in any::<u64>()) {
        let k = polygon(seed);
        let back = polar(&polar(&k));
        let a = k.as_polytope().unwrap().vertices();
        let b = back.as_polytope().unwrap().vertices();
        prop_assert_eq!(a.len(), b.len());
        for v in a {
            prop_assert!(b.iter().any(|w| (v[0] - w[0]).abs() < 1e-9 && (v[1] - w[1]).abs() < 1e-9));
        }
    }

    #[test]
    fn fit_is_translation_invariant_and_scale_equivariant(
        seed in any::<u64>(),
        pts in prop::collection::vec(point(), 1..5),
        shift in point(),
        lambda in 0.25f64..4.0,
    ) {
        let k = polygon(seed);
        let a = fit_scale(&pts, &k).unwrap().alpha_star;
        let moved: Vec<Vec<f64>> = pts.iter().map(|p| vec![p[0] + shift[0], p[1] + shift[1]]).collect();
        prop_assert!((fit_scale(&moved, &k).unwrap().alpha_star - a).abs() < 1e-9);
        let s = fit_scale(&pts, &k.scaled(lambda)).unwrap().alpha_star;
        prop_assert!((s - a / lambda).abs() < 1e-9 * (1.0 + a));
    }

    #[test]
    fn fit_places_points_inside(seed in any::<u64>(), pts in prop::collection::vec(point(), 1..5)) {
        let k = polygon(seed);
        let fit = fit_scale(&pts, &k).unwrap();
        for p in &pts {
            let x = [p[0] + fit.translation[0], p[1] + fit.translation[1]];
            prop_assert!(k.gauge(&x) <= fit.alpha_star + 1e-9);
        }
    }
}

/// The breadth has a kink at its minimum, so a plain grid of `10^4`
/// directions is only first-order accurate; the best sample's bracket is
/// refined by ternary search.
#[test]
fn euclidean_width_matches_sampled_directions() {
    let ball = ConvexBody::ball(1.0, 2);
    let n = 10_000;
    let d = std::f64::consts::PI / n as f64;
    for seed in 0..10 {
        let k = polygon(seed);
        let (w, _) = width(&k, &ball).unwrap();
        let breadth = |a: f64| {
            let p = [a.cos(), a.sin()];
            k.h(&p) + k.h(&[-p[0], -p[1]])
        };
        let best = (0..n).min_by(|&i, &j| breadth(i as f64 * d).total_cmp(&breadth(j as f64 * d))).unwrap();
        let (mut lo, mut hi) = ((best as f64 - 1.0) * d, (best as f64 + 1.0) * d);
        for _ in 0..100 {
            let (m1, m2) = (lo + (hi - lo) / 3.0, hi - (hi - lo) / 3.0);
            if breadth(m1) < breadth(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        let sampled = breadth(0.5 * (lo + hi)).min(breadth(best as f64 * d));
        assert!(w <= sampled + 1e-12);
        assert!((sampled - w) / w <= 1e-6, "{w} vs {sampled}");
    }
}

#[test]
fn difference_body_doubles_the_euclidean_width() {
    let ball = ConvexBody::ball(1.0, 2);
    for seed in 100..110 {
        let k = polygon(seed);
        let d = minkbilliard::body::central_symmetrize(&k).unwrap();
        assert!(d.is_centrally_symmetric());
        let (wk, _) = width(&k, &ball).unwrap();
        let (wd, _) = width(&d, &ball).unwrap();
        assert!((wd - 2.0 * wk).abs() < 1e-12);
    }
}
