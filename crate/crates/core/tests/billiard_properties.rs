use minkbilliard::billiard::{random_start, simulate, PhasePoint};
use minkbilliard::body::polar;
use minkbilliard::hanner::{realize, HannerTree};
use minkbilliard::polytope::Polytope;
use minkbilliard::random::case_rng;
use minkbilliard::special::equilateral_config;
use minkbilliard::{xi, BilliardError, ConvexBody, XiOptions};
use num_rational::BigRational;

fn reversed_start<S: minkbilliard::scalar::Scalar>(
    rec: &minkbilliard::TrajectoryRecord<S>,
    k: &Polytope<S>,
    t_neg: &Polytope<S>,
) -> PhasePoint<S> {
    let p: Vec<S> = rec.bounces[1].p.iter().map(|x| -x.clone()).collect();
    PhasePoint::locate(rec.bounces[0].q.clone(), p, k, t_neg).unwrap()
}

#[test]
fn reversal_in_the_reflected_norm_body() {
    let cfg = equilateral_config(1.0).unwrap();
    let hex = cfg.hexagon.as_polytope().unwrap().clone();
    let t = polar(&cfg.k).as_polytope().unwrap().clone();
    let t_neg = t.negated();
    let mut rng = case_rng(5, 0);
    let mut checked = 0;
    while checked < 50 {
        let (start, _) = random_start(&hex, &t, &mut rng);
        let Ok(rec) = simulate(&start, &hex, &t, 16) else { continue };
        let back = simulate(&reversed_start(&rec, &hex, &t_neg), &hex, &t_neg, 16).unwrap();
        assert!(back.closed);
        assert_eq!(back.period, rec.period);
        assert!((back.length_t - rec.length_t).abs() < 1e-9);
        // Coordinates are visited in the opposite order.
        let n = rec.period;
        for i in 0..n {
            let a = &back.bounces[i].q;
            let b = &rec.bounces[(n - i) % n].q;
            assert!((a[0] - b[0]).abs() < 1e-9 && (a[1] - b[1]).abs() < 1e-9);
        }
        checked += 1;
    }
}

#[test]
fn exact_reversal_for_hanner_pairs() {
    for tree in [HannerTree::cube(2), HannerTree::sum1(HannerTree::Leaf, HannerTree::cube(2))] {
        let pair = realize::<BigRational>(&tree);
        let t_neg = pair.h_polar.negated();
        let mut rng = case_rng(6, tree.dim() as u64);
        let mut checked = 0;
        while checked < 20 {
            let (start, _) = random_start(&pair.h, &pair.h_polar, &mut rng);
            let rec = match simulate(&start, &pair.h, &pair.h_polar, 24) {
                Ok(r) => r,
                Err(BilliardError::NonClassical { .. }) => continue,
                Err(e) => panic!("{e}"),
            };
            let back = simulate(&reversed_start(&rec, &pair.h, &t_neg), &pair.h, &t_neg, 24).unwrap();
            assert_eq!((back.period, back.length_t.clone()), (rec.period, rec.length_t.clone()));
            assert!(back.lambdas.iter().chain(&back.mus).all(|x| *x > BigRational::from_integer(0.into())));
            checked += 1;
        }
    }
}

#[test]
fn closed_trajectories_are_no_shorter_than_xi() {
    let cfg = equilateral_config(1.0).unwrap();
    let t = polar(&cfg.k);
    let bound = xi(&cfg.hexagon, &t, &XiOptions::default()).unwrap().value;
    assert!((bound - 9.0).abs() < 1e-6);
    let hex = cfg.hexagon.as_polytope().unwrap().clone();
    let tp = t.as_polytope().unwrap().clone();
    let mut rng = case_rng(8, 0);
    for _ in 0..50 {
        let (start, _) = random_start(&hex, &tp, &mut rng);
        if let Ok(rec) = simulate(&start, &hex, &tp, 16) {
            assert!(rec.simple);
            assert!(rec.length_t >= bound - 1e-6);
        }
    }

    let square = ConvexBody::polygon(&[[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]]).unwrap();
    let diamond = polar(&square);
    let xi_sq = xi(&square, &diamond, &XiOptions::default()).unwrap().value;
    let pair = realize::<f64>(&HannerTree::cube(2));
    let mut rng = case_rng(8, 1);
    for _ in 0..50 {
        let (start, _) = random_start(&pair.h, &pair.h_polar, &mut rng);
        if let Ok(rec) = simulate(&start, &pair.h, &pair.h_polar, 16) {
            assert!(rec.length_t >= xi_sq - 1e-6, "{} < {xi_sq}", rec.length_t);
        }
    }
}
