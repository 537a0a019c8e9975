//! Seeded random planar bodies for the property batteries.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::body::ConvexBody;

/// Generator for case `case` of a battery run with seed `seed`. Every case
/// owns a ChaCha8 stream, so cases can be evaluated in any order.
pub fn case_rng(seed: u64, case: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case);
    rng
}

/// Convex polygon with 3 to `max_vertices` vertices, radii in `[0.5, 1.5]`,
/// angular gaps below π so the origin is interior.
pub fn random_polygon<R: Rng>(rng: &mut R, max_vertices: usize) -> ConvexBody {
    loop {
        let n = rng.gen_range(3..=max_vertices.max(3));
        let mut angles: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
        angles.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        let gaps_ok = (0..n).all(|i| {
            let next = if i + 1 < n { angles[i + 1] } else { angles[0] + 2.0 * PI };
            next - angles[i] < PI * 0.9
        });
        if !gaps_ok {
            continue;
        }
        let pts: Vec<Vec<f64>> = angles
            .iter()
            .map(|&a| {
                let r = rng.gen_range(0.5..1.5);
                vec![r * a.cos(), r * a.sin()]
            })
            .collect();
        if let Ok(body) = ConvexBody::from_vertices(&pts) {
            if body.as_polytope().map_or(0, |p| p.vertices().len()) >= 3 {
                return body;
            }
        }
    }
}

/// A pair `K ⊆ L`: `K` is the hull of a shrunken copy of `L` and a few
/// random points of `L`.
pub fn random_nested_pair<R: Rng>(rng: &mut R, max_vertices: usize) -> (ConvexBody, ConvexBody) {
    let l = random_polygon(rng, max_vertices);
    let lv = l.as_polytope().expect("polygon").vertices().to_vec();
    let shrink = rng.gen_range(0.3..0.8);
    let mut pts: Vec<Vec<f64>> = lv.iter().map(|v| vec![shrink * v[0], shrink * v[1]]).collect();
    for _ in 0..rng.gen_range(1..4) {
        let w: Vec<f64> = lv.iter().map(|_| rng.gen::<f64>().powi(4)).collect();
        let total: f64 = w.iter().sum();
        pts.push((0..2).map(|d| lv.iter().zip(&w).map(|(v, wi)| v[d] * wi / total).sum()).collect());
    }
    let k = ConvexBody::from_vertices(&pts).expect("origin stays interior");
    (k, l)
}
