//! Convex bodies (polytopes or the Euclidean ball) and Minkowski-geometry
//! primitives: gauge norms, support functions, polarity, sums and width.

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;
use crate::polytope::{cross2, Polytope};
use crate::scalar::{dot, norm2, EPS};

#[derive(Clone, Debug, PartialEq)]
pub enum ConvexBody {
    Polytope(Polytope<f64>),
    /// Euclidean ball centred at the origin, treated analytically.
    Ball { radius: f64, dim: usize },
}

/// Maximizing face of a support query.
#[derive(Clone, Debug, PartialEq)]
pub enum SupportFace {
    /// Indices of the maximizing vertices (one vertex, an edge, or a facet).
    Vertices(Vec<usize>),
    /// The unique maximizing point of a ball.
    Point(Vec<f64>),
}

impl ConvexBody {
    pub fn polygon(vertices: &[[f64; 2]]) -> Result<Self, GeometryError> {
        let pts: Vec<Vec<f64>> = vertices.iter().map(|v| v.to_vec()).collect();
        Ok(ConvexBody::Polytope(Polytope::from_vertices(&pts)?))
    }

    pub fn from_vertices(points: &[Vec<f64>]) -> Result<Self, GeometryError> {
        Ok(ConvexBody::Polytope(Polytope::from_vertices(points)?))
    }

    pub fn ball(radius: f64, dim: usize) -> Self {
        assert!(radius > 0.0 && dim >= 1);
        ConvexBody::Ball { radius, dim }
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::Polytope(p) => p.dim(),
            ConvexBody::Ball { dim, .. } => *dim,
        }
    }

    pub fn as_polytope(&self) -> Option<&Polytope<f64>> {
        match self {
            ConvexBody::Polytope(p) => Some(p),
            ConvexBody::Ball { .. } => None,
        }
    }

    pub fn is_ball(&self) -> bool {
        matches!(self, ConvexBody::Ball { .. })
    }

    /// Support function `h(p) = max_{x in body} <p, x>`.
    pub fn h(&self, p: &[f64]) -> f64 {
        match self {
            ConvexBody::Polytope(poly) => poly.support(p).0,
            ConvexBody::Ball { radius, .. } => radius * norm2(p),
        }
    }

    /// Minkowski functional of the body.
    pub fn gauge(&self, x: &[f64]) -> f64 {
        match self {
            ConvexBody::Polytope(poly) => poly.gauge(x),
            ConvexBody::Ball { radius, .. } => norm2(x) / radius,
        }
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        match self {
            ConvexBody::Polytope(p) => ConvexBody::Polytope(p.scaled(&lambda)),
            ConvexBody::Ball { radius, dim } => ConvexBody::Ball {
                radius: radius * lambda,
                dim: *dim,
            },
        }
    }

    /// Euclidean diameter.
    pub fn diameter(&self) -> f64 {
        match self {
            ConvexBody::Ball { radius, .. } => 2.0 * radius,
            ConvexBody::Polytope(p) => {
                let v = p.vertices();
                let mut best = 0.0f64;
                for i in 0..v.len() {
                    for j in i + 1..v.len() {
                        best = best.max(norm2(&crate::scalar::sub(&v[i], &v[j])));
                    }
                }
                best
            }
        }
    }

    /// Planar perimeter (Euclidean).
    pub fn perimeter(&self) -> f64 {
        match self {
            ConvexBody::Ball { radius, .. } => 2.0 * std::f64::consts::PI * radius,
            ConvexBody::Polytope(p) => {
                let v = p.vertices();
                (0..v.len())
                    .map(|j| norm2(&crate::scalar::sub(&v[(j + 1) % v.len()], &v[j])))
                    .sum()
            }
        }
    }

    /// Point of the planar boundary at Euclidean arc length `s` (taken modulo
    /// the perimeter), starting from vertex 0, counterclockwise.
    pub fn boundary_point(&self, s: f64) -> Vec<f64> {
        match self {
            ConvexBody::Ball { radius, .. } => {
                let t = s / radius;
                vec![radius * t.cos(), radius * t.sin()]
            }
            ConvexBody::Polytope(p) => {
                let v = p.vertices();
                let per = self.perimeter();
                let mut s = s.rem_euclid(per);
                for j in 0..v.len() {
                    let a = &v[j];
                    let b = &v[(j + 1) % v.len()];
                    let len = norm2(&crate::scalar::sub(b, a));
                    if s <= len || j + 1 == v.len() {
                        let t = (s / len).min(1.0);
                        return vec![a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
                    }
                    s -= len;
                }
                unreachable!("polygon has at least three edges")
            }
        }
    }

    /// Vertex centroid symmetry test: `body - c = c - body` for the vertex mean `c`.
    pub fn is_centrally_symmetric(&self) -> bool {
        match self {
            ConvexBody::Ball { .. } => true,
            ConvexBody::Polytope(p) => {
                let v = p.vertices();
                let n = p.dim();
                let c: Vec<f64> = (0..n)
                    .map(|k| v.iter().map(|x| x[k]).sum::<f64>() / v.len() as f64)
                    .collect();
                v.iter().all(|x| {
                    let mirror: Vec<f64> = (0..n).map(|k| 2.0 * c[k] - x[k]).collect();
                    v.iter()
                        .any(|y| (0..n).all(|k| (y[k] - mirror[k]).abs() <= EPS))
                })
            }
        }
    }
}

fn check_dim(a: &[f64], body: &ConvexBody) -> Result<(), GeometryError> {
    if a.len() == body.dim() {
        Ok(())
    } else {
        Err(GeometryError::DimensionMismatch)
    }
}

/// `||q||_T = max_{p in T} <p, q>`; positively homogeneous, possibly asymmetric.
pub fn gauge_norm(q: &[f64], t: &ConvexBody) -> Result<f64, GeometryError> {
    check_dim(q, t)?;
    Ok(t.h(q))
}

pub fn support(p: &[f64], k: &ConvexBody) -> Result<(f64, SupportFace), GeometryError> {
    check_dim(p, k)?;
    Ok(match k {
        ConvexBody::Polytope(poly) => {
            let (v, face) = poly.support(p);
            (v, SupportFace::Vertices(face))
        }
        ConvexBody::Ball { radius, .. } => {
            let n = norm2(p);
            let point = if n == 0.0 {
                vec![0.0; p.len()]
            } else {
                p.iter().map(|x| radius * x / n).collect()
            };
            (radius * n, SupportFace::Point(point))
        }
    })
}

pub fn polar(p: &ConvexBody) -> ConvexBody {
    match p {
        ConvexBody::Polytope(poly) => ConvexBody::Polytope(poly.polar()),
        ConvexBody::Ball { radius, dim } => ConvexBody::Ball {
            radius: 1.0 / radius,
            dim: *dim,
        },
    }
}

/// `-K`.
pub fn reflect(k: &ConvexBody) -> ConvexBody {
    match k {
        ConvexBody::Polytope(poly) => ConvexBody::Polytope(poly.negated()),
        ball => ball.clone(),
    }
}

/// Vertex set of the Minkowski sum of two point sets' convex hulls. Planar
/// inputs are merged by edge angle; other dimensions sum all vertex pairs.
pub fn minkowski_sum_vertices(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let planar = a.first().map_or(false, |v| v.len() == 2);
    if planar && a.len() >= 3 && b.len() >= 3 {
        return merge_polygons(a, b);
    }
    let mut out = Vec::new();
    for x in a {
        for y in b {
            out.push(crate::scalar::add(x, y));
        }
    }
    out
}

/// Angular merge of two counterclockwise convex polygons.
fn merge_polygons(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let lowest = |p: &[Vec<f64>]| {
        (0..p.len())
            .min_by(|&i, &j| {
                (p[i][1], p[i][0])
                    .partial_cmp(&(p[j][1], p[j][0]))
                    .expect("finite")
            })
            .expect("nonempty")
    };
    let (ia, ib) = (lowest(a), lowest(b));
    let (na, nb) = (a.len(), b.len());
    let edge = |p: &[Vec<f64>], start: usize, k: usize| {
        let n = p.len();
        let u = &p[(start + k) % n];
        let v = &p[(start + k + 1) % n];
        vec![v[0] - u[0], v[1] - u[1]]
    };
    let mut cur = crate::scalar::add(&a[ia], &b[ib]);
    let mut out = Vec::with_capacity(na + nb);
    let (mut i, mut j) = (0, 0);
    while i < na || j < nb {
        out.push(cur.clone());
        let step = if i == na {
            j += 1;
            edge(b, ib, j - 1)
        } else if j == nb {
            i += 1;
            edge(a, ia, i - 1)
        } else {
            let ea = edge(a, ia, i);
            let eb = edge(b, ib, j);
            let c = cross2(&ea, &eb);
            if c > 0.0 {
                i += 1;
                ea
            } else if c < 0.0 {
                j += 1;
                eb
            } else {
                i += 1;
                j += 1;
                vec![ea[0] + eb[0], ea[1] + eb[1]]
            }
        };
        cur = crate::scalar::add(&cur, &step);
    }
    out
}

pub fn minkowski_sum(k: &ConvexBody, l: &ConvexBody) -> Result<ConvexBody, GeometryError> {
    if k.dim() != l.dim() {
        return Err(GeometryError::DimensionMismatch);
    }
    match (k, l) {
        (ConvexBody::Polytope(a), ConvexBody::Polytope(b)) => {
            let verts = minkowski_sum_vertices(a.vertices(), b.vertices());
            ConvexBody::from_vertices(&verts)
        }
        (ConvexBody::Ball { radius: r1, dim }, ConvexBody::Ball { radius: r2, .. }) => {
            Ok(ConvexBody::Ball {
                radius: r1 + r2,
                dim: *dim,
            })
        }
        _ => Err(GeometryError::Unsupported(
            "sum of a polytope and a ball is not a polytope".into(),
        )),
    }
}

/// `K - K = K + (-K)`.
pub fn central_symmetrize(k: &ConvexBody) -> Result<ConvexBody, GeometryError> {
    minkowski_sum(k, &reflect(k))
}

/// Width `w_T(K) = min_{p in ∂T} (h_K(p) + h_K(-p))` together with the
/// minimizing direction `p ∈ ∂T`. Planar polytope norms are handled exactly
/// via the breakpoints of the piecewise-linear breadth along ∂T.
pub fn width(k: &ConvexBody, t: &ConvexBody) -> Result<(f64, Vec<f64>), GeometryError> {
    if k.dim() != t.dim() {
        return Err(GeometryError::DimensionMismatch);
    }
    let breadth = |p: &[f64]| {
        let neg: Vec<f64> = p.iter().map(|x| -x).collect();
        k.h(p) + k.h(&neg)
    };
    match (k, t) {
        (_, ConvexBody::Ball { radius: rho, .. }) => {
            // Breadth along unit directions; for polygons the minimum sits at
            // an edge normal of K - K (rotating calipers).
            let (w, u) = match k {
                ConvexBody::Ball { radius, dim } => {
                    let mut u = vec![0.0; *dim];
                    u[0] = 1.0;
                    (2.0 * radius, u)
                }
                ConvexBody::Polytope(poly) => {
                    if poly.dim() != 2 {
                        return Err(GeometryError::Unsupported("width in dimension > 2".into()));
                    }
                    let sym = central_symmetrize(k)?;
                    let d = sym.as_polytope().expect("polytope");
                    d.facets()
                        .iter()
                        .map(|f| {
                            let n = norm2(&f.normal);
                            let u: Vec<f64> = f.normal.iter().map(|x| x / n).collect();
                            (breadth(&u), u)
                        })
                        .min_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"))
                        .expect("facets")
                }
            };
            Ok((w * rho, u.iter().map(|x| x * rho).collect()))
        }
        (_, ConvexBody::Polytope(tp)) => {
            if tp.dim() != 2 {
                return Err(GeometryError::Unsupported("width in dimension > 2".into()));
            }
            let mut candidates: Vec<Vec<f64>> = tp.vertices().to_vec();
            match k {
                // Breadth of a ball is radial, so only the feet of the
                // perpendiculars onto the facet lines of T matter.
                ConvexBody::Ball { .. } => {
                    for f in tp.facets() {
                        let n2 = dot(&f.normal, &f.normal);
                        candidates.push(f.normal.iter().map(|x| x / n2).collect());
                    }
                }
                // Breadth changes slope where ∂T crosses a normal ray of K - K.
                ConvexBody::Polytope(_) => {
                    let sym = central_symmetrize(k)?;
                    for f in sym.as_polytope().expect("polytope").facets() {
                        let g = tp.gauge(&f.normal);
                        candidates.push(f.normal.iter().map(|x| x / g).collect());
                    }
                }
            }
            let best = candidates
                .into_iter()
                .map(|p| (breadth(&p), p))
                .min_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"))
                .expect("candidates");
            Ok(best)
        }
    }
}

// ---------------------------------------------------------------------------
// JSON body format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct FacetJson {
    normal: Vec<f64>,
    offset: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum BodyJson {
    Polytope {
        vertices: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        facets: Option<Vec<FacetJson>>,
    },
    Ball {
        radius: f64,
        dim: usize,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum BodyParseError {
    #[error("malformed body JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid body: {0}")]
    Geometry(#[from] GeometryError),
}

impl ConvexBody {
    /// Parses `{"kind":"polytope","vertices":[...]}` or
    /// `{"kind":"ball","radius":r,"dim":n}`. A `facets` field, if present, is
    /// ignored and recomputed from the vertices.
    pub fn from_json(text: &str) -> Result<Self, BodyParseError> {
        match serde_json::from_str::<BodyJson>(text)? {
            BodyJson::Polytope { vertices, .. } => {
                if vertices.iter().flatten().any(|x| !x.is_finite()) {
                    return Err(GeometryError::Degenerate("non-finite coordinate".into()).into());
                }
                Ok(ConvexBody::from_vertices(&vertices)?)
            }
            BodyJson::Ball { radius, dim } => {
                if !(radius > 0.0) || dim == 0 {
                    return Err(GeometryError::Degenerate("ball needs radius > 0 and dim >= 1".into()).into());
                }
                Ok(ConvexBody::Ball { radius, dim })
            }
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let j = match self {
            ConvexBody::Polytope(p) => BodyJson::Polytope {
                vertices: p.vertices().to_vec(),
                facets: Some(
                    p.facets()
                        .iter()
                        .map(|f| FacetJson {
                            normal: f.normal.clone(),
                            offset: f.offset,
                        })
                        .collect(),
                ),
            },
            ConvexBody::Ball { radius, dim } => BodyJson::Ball {
                radius: *radius,
                dim: *dim,
            },
        };
        serde_json::to_value(j).expect("serializable")
    }

    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }
}
