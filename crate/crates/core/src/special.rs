//! Closed-form test bodies: the centred equilateral triangle, Reuleaux
//! polygons, and the excircle chain for short triangular orbits in bodies of
//! constant width.

use std::f64::consts::PI;

use crate::body::{central_symmetrize, polar, ConvexBody};
use crate::error::GeometryError;

/// Equilateral triangle with side `side`, horizontal bottom edge and centroid
/// at the origin. Vertices run counterclockwise from the bottom left.
pub fn equilateral_triangle(side: f64) -> ConvexBody {
    let r = side / 3f64.sqrt();
    let pts: Vec<[f64; 2]> = [210.0f64, 330.0, 90.0]
        .iter()
        .map(|d| [r * d.to_radians().cos(), r * d.to_radians().sin()])
        .collect();
    ConvexBody::polygon(&pts).expect("centred triangle")
}

#[derive(Clone, Debug)]
pub struct EquilateralConfig {
    pub k: ConvexBody,
    /// `K - K`, a regular hexagon with edge `scale`.
    pub hexagon: ConvexBody,
    /// `(3K)°`.
    pub t: ConvexBody,
}

pub fn equilateral_config(scale: f64) -> Result<EquilateralConfig, GeometryError> {
    if !(scale > 0.0) {
        return Err(GeometryError::Precondition(format!("scale {scale} must be positive")));
    }
    let k = equilateral_triangle(scale);
    let hexagon = central_symmetrize(&k)?;
    let t = polar(&k.scaled(3.0));
    Ok(EquilateralConfig { k, hexagon, t })
}

/// Width-1 Reuleaux `k`-gon, each arc replaced by `arc_segments` chords with
/// equal central angles. The chords lie inside the arcs, so the width is
/// `cos(π / (2 k · arc_segments))`, slightly below 1.
pub fn reuleaux(k: usize, arc_segments: usize) -> Result<ConvexBody, GeometryError> {
    if k < 3 || k % 2 == 0 {
        return Err(GeometryError::Precondition(format!("k = {k} must be odd and at least 3")));
    }
    if arc_segments < 8 {
        return Err(GeometryError::Precondition("need at least 8 segments per arc".into()));
    }
    let radius = 1.0 / (2.0 * (PI / (2.0 * k as f64)).cos());
    let corner = |j: usize| {
        let a = PI / 2.0 + 2.0 * PI * j as f64 / k as f64;
        [radius * a.cos(), radius * a.sin()]
    };
    let mut pts = Vec::with_capacity(k * arc_segments);
    for j in 0..k {
        // The arc from corner j to corner j+1 is centred at the opposite corner.
        let c = corner((j + (k + 1) / 2) % k);
        let (a, b) = (corner(j), corner((j + 1) % k));
        let start = (a[1] - c[1]).atan2(a[0] - c[0]);
        let mut end = (b[1] - c[1]).atan2(b[0] - c[0]);
        while end < start {
            end += 2.0 * PI;
        }
        for s in 0..arc_segments {
            let phi = start + (end - start) * s as f64 / arc_segments as f64;
            pts.push([c[0] + phi.cos(), c[1] + phi.sin()]);
        }
    }
    ConvexBody::polygon(&pts)
}

/// Width of `reuleaux(k, arc_segments)` from the chord geometry alone.
pub fn reuleaux_width(k: usize, arc_segments: usize) -> f64 {
    (PI / (2.0 * (k * arc_segments) as f64)).cos()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TriangleData {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Angles at `A`, `B`, `C`.
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Semiperimeter.
    pub p: f64,
    pub vertices: [[f64; 2]; 3],
    /// Unit segments from `A`, `B`, `C` along the interior bisectors.
    pub a1: [f64; 2],
    pub b1: [f64; 2],
    pub c1: [f64; 2],
    /// Excentre opposite `A` (tangent to `BC`).
    pub j_a: [f64; 2],
    /// Foot of the perpendicular from `J_A` to the line `AB`.
    pub t_a: [f64; 2],
}

fn unit_towards(from: [f64; 2], dir: [f64; 2]) -> [f64; 2] {
    let n = (dir[0] * dir[0] + dir[1] * dir[1]).sqrt();
    [from[0] + dir[0] / n, from[1] + dir[1] / n]
}

impl TriangleData {
    /// Coordinates `A = (0,0)`, `B = (c,0)`, `C` above the x-axis; `a = |BC|`,
    /// `b = |AC|`, `c = |AB|`.
    pub fn from_sides(a: f64, b: f64, c: f64) -> Result<Self, GeometryError> {
        let ok = a > 0.0 && b > 0.0 && c > 0.0 && a < b + c && b < a + c && c < a + b;
        if !ok {
            return Err(GeometryError::Precondition(format!("({a}, {b}, {c}) is not a triangle")));
        }
        let alpha = ((b * b + c * c - a * a) / (2.0 * b * c)).acos();
        let beta = ((a * a + c * c - b * b) / (2.0 * a * c)).acos();
        let gamma = PI - alpha - beta;
        let pa = [0.0, 0.0];
        let pb = [c, 0.0];
        let pc = [b * alpha.cos(), b * alpha.sin()];
        let bis = |p: [f64; 2], q: [f64; 2], r: [f64; 2]| {
            let u = [q[0] - p[0], q[1] - p[1]];
            let v = [r[0] - p[0], r[1] - p[1]];
            let (nu, nv) = ((u[0] * u[0] + u[1] * u[1]).sqrt(), (v[0] * v[0] + v[1] * v[1]).sqrt());
            unit_towards(p, [u[0] / nu + v[0] / nv, u[1] / nu + v[1] / nv])
        };
        let d = -a + b + c;
        let j_a = [(-a * pa[0] + b * pb[0] + c * pc[0]) / d, (-a * pa[1] + b * pb[1] + c * pc[1]) / d];
        Ok(TriangleData {
            a,
            b,
            c,
            alpha,
            beta,
            gamma,
            p: (a + b + c) / 2.0,
            vertices: [pa, pb, pc],
            a1: bis(pa, pb, pc),
            b1: bis(pb, pc, pa),
            c1: bis(pc, pa, pb),
            j_a,
            t_a: [j_a[0], 0.0],
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZaslavskyChain {
    /// `|A₁B₁|²` from the coordinates.
    pub lhs: f64,
    /// `(cos α/2 + cos β/2 - c)² + (sin α/2 - sin β/2)²`.
    pub lhs_projected: f64,
    /// `1 + (1-c)² + 2c(1 - cos α/2)(1 - cos β/2)`.
    pub bound: f64,
    /// `|A T_A| - p`.
    pub tangent_residual: f64,
    /// `c/p - (1 - tan α/2 · tan β/2)`.
    pub ratio_residual: f64,
}

impl ZaslavskyChain {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs >= self.bound - tol
            && self.bound > 1.0
            && (self.lhs - self.lhs_projected).abs() <= tol
            && self.tangent_residual.abs() <= tol
            && self.ratio_residual.abs() <= tol
    }
}

pub fn zaslavsky_chain(tri: &TriangleData) -> Result<ZaslavskyChain, GeometryError> {
    if tri.p > 1.0 + 1e-15 {
        return Err(GeometryError::Precondition(format!("semiperimeter {} exceeds 1", tri.p)));
    }
    let (ha, hb) = (tri.alpha / 2.0, tri.beta / 2.0);
    let c = tri.c;
    let dx = tri.b1[0] - tri.a1[0];
    let dy = tri.b1[1] - tri.a1[1];
    Ok(ZaslavskyChain {
        lhs: dx * dx + dy * dy,
        lhs_projected: (ha.cos() + hb.cos() - c).powi(2) + (ha.sin() - hb.sin()).powi(2),
        bound: 1.0 + (1.0 - c).powi(2) + 2.0 * c * (1.0 - ha.cos()) * (1.0 - hb.cos()),
        tangent_residual: tri.t_a[0].hypot(tri.t_a[1]) - tri.p,
        ratio_residual: c / tri.p - (1.0 - ha.tan() * hb.tan()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::width;

    #[test]
    fn triangle_orientation_and_hexagon() {
        let cfg = equilateral_config(1.0).unwrap();
        let v = cfg.k.as_polytope().unwrap().vertices();
        assert!((v[0][1] - v[1][1]).abs() < 1e-15, "bottom edge horizontal");
        let c: f64 = v.iter().map(|x| x[1]).sum();
        assert!(c.abs() < 1e-15);
        let hex = cfg.hexagon.as_polytope().unwrap();
        assert_eq!(hex.vertices().len(), 6);
        for w in 0..6 {
            let a = &hex.vertices()[w];
            let b = &hex.vertices()[(w + 1) % 6];
            assert!(((a[0] - b[0]).hypot(a[1] - b[1]) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn reuleaux_width_follows_the_chords() {
        for k in [3, 5] {
            let body = reuleaux(k, 64).unwrap();
            assert_eq!(body.as_polytope().unwrap().vertices().len(), 64 * k);
            let (w, _) = width(&body, &ConvexBody::ball(1.0, 2)).unwrap();
            assert!((w - reuleaux_width(k, 64)).abs() < 1e-12, "{w}");
            assert!(w <= 1.0);
        }
        assert!(reuleaux(4, 64).is_err());
    }

    #[test]
    fn equilateral_chain() {
        let t = TriangleData::from_sides(2.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0).unwrap();
        let z = zaslavsky_chain(&t).unwrap();
        let expected = 1.0 + 1.0 / 9.0 + 4.0 / 3.0 * (1.0 - 30f64.to_radians().cos()).powi(2);
        assert!((z.bound - expected).abs() < 1e-12);
        assert!((z.bound - 1.13505).abs() < 1e-5);
        assert!(z.holds(1e-12));
    }

    #[test]
    fn isosceles_and_scaled_chains() {
        for (a, b, c) in [(0.7, 0.7, 0.6), (0.63, 0.63, 0.54)] {
            let z = zaslavsky_chain(&TriangleData::from_sides(a, b, c).unwrap()).unwrap();
            assert!(z.holds(1e-12), "{z:?}");
        }
        let big = TriangleData::from_sides(0.8, 0.8, 0.8).unwrap();
        assert!(zaslavsky_chain(&big).is_err());
    }
}
