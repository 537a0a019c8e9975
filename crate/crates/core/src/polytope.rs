//! Convex polytopes with synchronized vertex and facet representations.
//!
//! Every facet is stored normalized as `<normal, x> <= 1`, so `normal` is the
//! vertex of the polar body dual to that facet. This requires the origin to be
//! strictly interior, which all constructors check.

use num_rational::BigRational;

use crate::error::GeometryError;
use crate::scalar::{decimal_rational, dot, null_vector, rank, sub, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Facet<S> {
    /// Outward normal scaled so that the facet is `<normal, x> = offset`.
    pub normal: Vec<S>,
    pub offset: S,
    /// Indices of the vertices lying on the facet.
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Polytope<S> {
    dim: usize,
    vertices: Vec<Vec<S>>,
    facets: Vec<Facet<S>>,
}

impl<S: Scalar> Polytope<S> {
    /// Convex hull of `points`. Planar input is sorted counterclockwise and
    /// facet `j` is the edge from vertex `j` to vertex `j + 1`. Dimensions 3
    /// and 4 use facet enumeration over vertex subsets.
    pub fn from_vertices(points: &[Vec<S>]) -> Result<Self, GeometryError> {
        let dim = points.first().map(Vec::len).ok_or(GeometryError::Empty)?;
        if dim == 0 {
            return Err(GeometryError::Degenerate("zero-dimensional input".into()));
        }
        if points.iter().any(|p| p.len() != dim) {
            return Err(GeometryError::DimensionMismatch);
        }
        match dim {
            1 => Self::segment_hull(points),
            2 => Self::polygon_hull(points),
            3 | 4 => Self::enumerate_hull(points, dim),
            _ => Err(GeometryError::Unsupported(format!(
                "convex hull in dimension {dim}"
            ))),
        }
    }

    /// Builds a polytope from both representations, recomputing incidences.
    /// Facet normals are taken as already normalized to offset 1.
    pub fn from_parts(vertices: Vec<Vec<S>>, normals: Vec<Vec<S>>) -> Result<Self, GeometryError> {
        let dim = vertices.first().map(Vec::len).ok_or(GeometryError::Empty)?;
        if vertices.iter().chain(&normals).any(|v| v.len() != dim) {
            return Err(GeometryError::DimensionMismatch);
        }
        let facets = normals
            .into_iter()
            .map(|normal| {
                let on: Vec<usize> = (0..vertices.len())
                    .filter(|&i| (dot(&normal, &vertices[i]) - S::one()).is_zero_tol())
                    .collect();
                Facet {
                    normal,
                    offset: S::one(),
                    vertices: on,
                }
            })
            .collect();
        let p = Polytope {
            dim,
            vertices,
            facets,
        };
        p.validate()?;
        Ok(p)
    }

    fn segment_hull(points: &[Vec<S>]) -> Result<Self, GeometryError> {
        let cmp = |a: &&Vec<S>, b: &&Vec<S>| a[0].partial_cmp(&b[0]).expect("finite");
        let lo = points.iter().min_by(cmp).cloned().ok_or(GeometryError::Empty)?;
        let hi = points.iter().max_by(cmp).cloned().ok_or(GeometryError::Empty)?;
        if !lo[0].is_neg() || !hi[0].is_pos() {
            return Err(GeometryError::OriginNotInterior);
        }
        let normals = vec![vec![S::one() / hi[0].clone()], vec![S::one() / lo[0].clone()]];
        Self::from_parts(vec![hi, lo], normals)
    }

    fn polygon_hull(points: &[Vec<S>]) -> Result<Self, GeometryError> {
        let mut pts: Vec<Vec<S>> = points.to_vec();
        pts.sort_by(|a, b| {
            a[0].partial_cmp(&b[0])
                .expect("finite")
                .then(a[1].partial_cmp(&b[1]).expect("finite"))
        });
        pts.dedup_by(|a, b| a[0].approx_eq(&b[0]) && a[1].approx_eq(&b[1]));
        if pts.len() < 3 {
            return Err(GeometryError::Degenerate("fewer than three distinct points".into()));
        }
        let turn = |o: &[S], a: &[S], b: &[S]| cross2(&sub(a, o), &sub(b, o));
        let mut lower: Vec<Vec<S>> = Vec::new();
        for p in &pts {
            while lower.len() >= 2 && !turn(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_pos() {
                lower.pop();
            }
            lower.push(p.clone());
        }
        let mut upper: Vec<Vec<S>> = Vec::new();
        for p in pts.iter().rev() {
            while upper.len() >= 2 && !turn(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_pos() {
                upper.pop();
            }
            upper.push(p.clone());
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        let hull = lower;
        if hull.len() < 3 {
            return Err(GeometryError::Degenerate("collinear points".into()));
        }
        let k = hull.len();
        let mut facets = Vec::with_capacity(k);
        for j in 0..k {
            let a = &hull[j];
            let b = &hull[(j + 1) % k];
            let c = cross2(a, b);
            if !c.is_pos() {
                return Err(GeometryError::OriginNotInterior);
            }
            let normal = vec![(b[1].clone() - a[1].clone()) / c.clone(), (a[0].clone() - b[0].clone()) / c];
            facets.push(Facet {
                normal,
                offset: S::one(),
                vertices: vec![j, (j + 1) % k],
            });
        }
        Ok(Polytope {
            dim: 2,
            vertices: hull,
            facets,
        })
    }

    fn enumerate_hull(points: &[Vec<S>], dim: usize) -> Result<Self, GeometryError> {
        let mut pts: Vec<Vec<S>> = Vec::new();
        for p in points {
            if !pts.iter().any(|q| crate::scalar::vec_approx_eq(p, q)) {
                pts.push(p.clone());
            }
        }
        let diffs: Vec<Vec<S>> = pts.iter().skip(1).map(|p| sub(p, &pts[0])).collect();
        if rank(&diffs) < dim {
            return Err(GeometryError::Degenerate("points are not full-dimensional".into()));
        }
        let mut atoms: Vec<Vec<S>> = Vec::new();
        for subset in combinations(pts.len(), dim) {
            let base = &pts[subset[0]];
            let rows: Vec<Vec<S>> = subset[1..].iter().map(|&i| sub(&pts[i], base)).collect();
            let Some(mut normal) = null_vector(&rows, dim) else {
                continue;
            };
            let mut c = dot(&normal, base);
            let side = |n: &[S], c: &S| pts.iter().map(|p| dot(n, p) - c.clone()).collect::<Vec<S>>();
            let s = side(&normal, &c);
            if s.iter().any(Scalar::is_pos) {
                if s.iter().any(Scalar::is_neg) {
                    continue;
                }
                normal = normal.into_iter().map(|x| -x).collect();
                c = -c;
            }
            if !c.is_pos() {
                return Err(GeometryError::OriginNotInterior);
            }
            let atom: Vec<S> = normal.into_iter().map(|x| x / c.clone()).collect();
            if !atoms.iter().any(|a| crate::scalar::vec_approx_eq(a, &atom)) {
                atoms.push(atom);
            }
        }
        // A point is a vertex iff the normals of the facets through it span.
        let verts: Vec<Vec<S>> = pts
            .iter()
            .filter(|p| {
                let through: Vec<Vec<S>> = atoms
                    .iter()
                    .filter(|a| (dot(a, p) - S::one()).is_zero_tol())
                    .cloned()
                    .collect();
                rank(&through) == dim
            })
            .cloned()
            .collect();
        Self::from_parts(verts, atoms)
    }

    /// Checks the dual-representation invariants.
    pub fn validate(&self) -> Result<(), GeometryError> {
        if self.facets.len() < self.dim + 1 || self.vertices.len() < self.dim + 1 {
            return Err(GeometryError::Degenerate("too few vertices or facets".into()));
        }
        for f in &self.facets {
            if !f.offset.is_pos() {
                return Err(GeometryError::OriginNotInterior);
            }
            for v in &self.vertices {
                if (dot(&f.normal, v) - f.offset.clone()).is_pos() {
                    return Err(GeometryError::Inconsistent("vertex violates a facet".into()));
                }
            }
            if f.vertices.len() < self.dim {
                return Err(GeometryError::Inconsistent("facet spanned by too few vertices".into()));
            }
            let base = &self.vertices[f.vertices[0]];
            let diffs: Vec<Vec<S>> = f.vertices.iter().map(|&i| sub(&self.vertices[i], base)).collect();
            if rank(&diffs) + 1 < self.dim {
                return Err(GeometryError::Inconsistent("facet spanned by too few vertices".into()));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<S>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet<S>] {
        &self.facets
    }

    /// `max_{v} <p, v>` and the maximizing vertex indices.
    pub fn support(&self, p: &[S]) -> (S, Vec<usize>) {
        let vals: Vec<S> = self.vertices.iter().map(|v| dot(p, v)).collect();
        let mut best = vals[0].clone();
        for v in &vals[1..] {
            if *v > best {
                best = v.clone();
            }
        }
        let arg = (0..vals.len()).filter(|&i| vals[i].approx_eq(&best)).collect();
        (best, arg)
    }

    /// Minkowski functional: the smallest `s >= 0` with `x ∈ s·P`.
    pub fn gauge(&self, x: &[S]) -> S {
        let mut best = S::zero();
        for f in &self.facets {
            let v = dot(&f.normal, x);
            if v > best {
                best = v;
            }
        }
        best
    }

    /// Facets whose hyperplane contains `x`.
    pub fn facets_containing(&self, x: &[S]) -> Vec<usize> {
        (0..self.facets.len())
            .filter(|&j| (dot(&self.facets[j].normal, x) - S::one()).is_zero_tol())
            .collect()
    }

    pub fn contains(&self, x: &[S]) -> bool {
        self.facets
            .iter()
            .all(|f| !(dot(&f.normal, x) - S::one()).is_pos())
    }

    /// Polar body: facets become vertices and vice versa.
    pub fn polar(&self) -> Self {
        let vertices: Vec<Vec<S>> = self.facets.iter().map(|f| f.normal.clone()).collect();
        let facets = (0..self.vertices.len())
            .map(|i| Facet {
                normal: self.vertices[i].clone(),
                offset: S::one(),
                vertices: (0..self.facets.len())
                    .filter(|&j| self.facets[j].vertices.contains(&i))
                    .collect(),
            })
            .collect();
        Polytope {
            dim: self.dim,
            vertices,
            facets,
        }
    }

    pub fn scaled(&self, lambda: &S) -> Self {
        assert!(lambda.is_pos(), "scale factor must be positive");
        Polytope {
            dim: self.dim,
            vertices: self.vertices.iter().map(|v| crate::scalar::scale(v, lambda)).collect(),
            facets: self
                .facets
                .iter()
                .map(|f| Facet {
                    normal: f.normal.iter().map(|x| x.clone() / lambda.clone()).collect(),
                    offset: S::one(),
                    vertices: f.vertices.clone(),
                })
                .collect(),
        }
    }

    /// `-P`. Planar vertex order stays counterclockwise.
    pub fn negated(&self) -> Self {
        let neg = |v: &Vec<S>| v.iter().map(|x| -x.clone()).collect::<Vec<S>>();
        Polytope {
            dim: self.dim,
            vertices: self.vertices.iter().map(neg).collect(),
            facets: self
                .facets
                .iter()
                .map(|f| Facet {
                    normal: neg(&f.normal),
                    offset: S::one(),
                    vertices: f.vertices.clone(),
                })
                .collect(),
        }
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Polytope<T> {
        Polytope {
            dim: self.dim,
            vertices: self.vertices.iter().map(|v| v.iter().map(&f).collect()).collect(),
            facets: self
                .facets
                .iter()
                .map(|fa| Facet {
                    normal: fa.normal.iter().map(&f).collect(),
                    offset: f(&fa.offset),
                    vertices: fa.vertices.clone(),
                })
                .collect(),
        }
    }

    pub fn to_f64(&self) -> Polytope<f64> {
        self.map_scalar(Scalar::to_f64)
    }
}

impl Polytope<f64> {
    /// Exact copy built from the decimal forms of the vertices, or `None` if
    /// some coordinate needs more than 12 significant digits.
    pub fn to_rational(&self) -> Option<Polytope<BigRational>> {
        let verts: Option<Vec<Vec<BigRational>>> = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|&x| decimal_rational(x, 12)).collect())
            .collect();
        Polytope::from_vertices(&verts?).ok()
    }
}

pub(crate) fn cross2<S: Scalar>(a: &[S], b: &[S]) -> S {
    a[0].clone() * b[1].clone() - a[1].clone() * b[0].clone()
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn square() -> Polytope<f64> {
        Polytope::from_vertices(&[
            vec![1.0, 1.0],
            vec![-1.0, 1.0],
            vec![-1.0, -1.0],
            vec![1.0, -1.0],
            vec![0.0, 1.0],
        ])
        .unwrap()
    }

    #[test]
    fn polygon_hull_drops_collinear_points_and_is_ccw() {
        let sq = square();
        assert_eq!(sq.vertices().len(), 4);
        assert_eq!(sq.facets().len(), 4);
        for j in 0..4 {
            let a = &sq.vertices()[j];
            let b = &sq.vertices()[(j + 1) % 4];
            assert!(cross2(a, b) > 0.0);
        }
    }

    #[test]
    fn origin_outside_is_rejected() {
        let r = Polytope::from_vertices(&[vec![1.0, 1.0], vec![2.0, 1.0], vec![1.0, 2.0]]);
        assert_eq!(r.unwrap_err(), GeometryError::OriginNotInterior);
    }

    #[test]
    fn cube_by_enumeration() {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push((0..3).map(|b| if i >> b & 1 == 1 { 1.0 } else { -1.0 }).collect());
        }
        pts.push(vec![0.0, 0.0, 1.0]);
        let cube = Polytope::<f64>::from_vertices(&pts).unwrap();
        assert_eq!(cube.vertices().len(), 8);
        assert_eq!(cube.facets().len(), 6);
        assert!(cube.facets().iter().all(|f| f.vertices.len() == 4));
    }

    #[test]
    fn rational_cross_polytope() {
        let q = |n| BigRational::from_ratio(n, 1);
        let mut pts = Vec::new();
        for axis in 0..3 {
            for s in [1, -1] {
                let mut v = vec![q(0), q(0), q(0)];
                v[axis] = q(s);
                pts.push(v);
            }
        }
        let oct = Polytope::from_vertices(&pts).unwrap();
        assert_eq!(oct.facets().len(), 8);
        assert!(oct.facets().iter().all(|f| f.normal.iter().all(|x| x.abs() == q(1))));
    }

    #[test]
    fn combinations_are_lexicographic() {
        assert_eq!(
            combinations(4, 2),
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(combinations(3, 3).len(), 1);
    }
}
