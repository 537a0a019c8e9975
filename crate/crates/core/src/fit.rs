//! Smallest scaled translate `αK + t` containing a point set.
//!
//! For a polytope `K = {x : <a_j, x> <= 1}` the problem
//! `min α  s.t.  <a_j, q_i + t> <= α` is solved through its dual
//!
//! ```text
//! max Σ u_j β_j   s.t.  Σ u_j = 1,  Σ u_j a_j = 0,  u >= 0,   β_j = max_i <a_j, q_i>
//! ```
//!
//! with a two-phase Bland-rule simplex. The optimal dual vertex doubles as a
//! certificate: for any other point set `Q'` the same weights give the lower
//! bound `α*(Q') >= Σ u_j <a_j, q'_{i(j)}>`.

use crate::body::ConvexBody;
use crate::error::GeometryError;
use crate::polytope::Polytope;
use crate::scalar::{dot, norm2, solve, sub};

const LP_TOL: f64 = 1e-11;

#[derive(Clone, Debug, PartialEq)]
pub struct ActiveConstraint {
    pub point: usize,
    /// Facet index for polytopes; `None` for the ball.
    pub facet: Option<usize>,
}

/// One term `u · <atom, q_point>` of the dual certificate. Atoms lie on the
/// boundary of the polar body, weights sum to one and `Σ weight·atom = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct CertificateTerm {
    pub point: usize,
    pub atom: Vec<f64>,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub alpha_star: f64,
    pub translation: Vec<f64>,
    pub active_constraints: Vec<ActiveConstraint>,
    pub certificate: Vec<CertificateTerm>,
    /// More active constraints than a basis needs.
    pub degenerate: bool,
}

impl FitResult {
    /// Lower bound on `α*` of `points` implied by this certificate.
    pub fn certified_alpha(&self, points: &[Vec<f64>]) -> f64 {
        self.certificate
            .iter()
            .map(|c| c.weight * dot(&c.atom, &points[c.point]))
            .sum()
    }
}

pub fn fit_scale(points: &[Vec<f64>], k: &ConvexBody) -> Result<FitResult, GeometryError> {
    if points.is_empty() {
        return Err(GeometryError::Empty);
    }
    let n = k.dim();
    if points.iter().any(|p| p.len() != n) {
        return Err(GeometryError::DimensionMismatch);
    }
    match k {
        ConvexBody::Polytope(poly) => {
            let atoms: Vec<&[f64]> = poly.facets().iter().map(|f| f.normal.as_slice()).collect();
            Ok(fit_polytope(points, &atoms))
        }
        ConvexBody::Ball { radius, .. } => fit_ball(points, *radius),
    }
}

fn fit_polytope(points: &[Vec<f64>], atoms: &[&[f64]]) -> FitResult {
    let n = points[0].len();
    let f = atoms.len();
    let mut beta = vec![f64::NEG_INFINITY; f];
    let mut owner = vec![0usize; f];
    for (j, a) in atoms.iter().enumerate() {
        for (i, q) in points.iter().enumerate() {
            let v = dot(a, q);
            if v > beta[j] {
                beta[j] = v;
                owner[j] = i;
            }
        }
    }
    // Rows: Σu = 1 and Σ u a = 0.
    let mut a_mat = vec![vec![0.0; f]; n + 1];
    for j in 0..f {
        a_mat[0][j] = 1.0;
        for k in 0..n {
            a_mat[k + 1][j] = atoms[j][k];
        }
    }
    let mut b = vec![0.0; n + 1];
    b[0] = 1.0;
    let sol = simplex_max(&a_mat, &b, &beta).expect("origin interior makes the dual feasible");
    let w = &sol.duals[1..];
    let translation: Vec<f64> = w.iter().map(|x| -x).collect();

    let shifted: Vec<Vec<f64>> = points
        .iter()
        .map(|q| q.iter().zip(&translation).map(|(a, b)| a + b).collect())
        .collect();
    let mut alpha = 0.0f64;
    for q in &shifted {
        for a in atoms {
            alpha = alpha.max(dot(a, q));
        }
    }
    let scale = alpha.abs().max(1.0);
    let mut active = Vec::new();
    for (i, q) in shifted.iter().enumerate() {
        for (j, a) in atoms.iter().enumerate() {
            if dot(a, q) >= alpha - 1e-9 * scale {
                active.push(ActiveConstraint {
                    point: i,
                    facet: Some(j),
                });
            }
        }
    }
    let certificate = sol
        .basis
        .iter()
        .zip(&sol.values)
        .filter(|(&j, &u)| j < f && u > LP_TOL)
        .map(|(&j, &u)| CertificateTerm {
            point: owner[j],
            atom: atoms[j].to_vec(),
            weight: u,
        })
        .collect();
    FitResult {
        alpha_star: alpha,
        translation,
        degenerate: active.len() > n + 1,
        active_constraints: active,
        certificate,
    }
}

/// Smallest enclosing ball, by checking every pair and (planar) triple.
fn fit_ball(points: &[Vec<f64>], radius: f64) -> Result<FitResult, GeometryError> {
    let n = points[0].len();
    let m = points.len();
    // Every candidate centre is scored by its true covering radius, so the
    // minimum enclosing ball wins even when rounding blurs the ties.
    let reach = |c: &[f64]| points.iter().map(|q| norm2(&sub(q, c))).fold(0.0, f64::max);
    let mut best: Option<(Vec<f64>, f64, Vec<(usize, f64)>)> = None;
    let mut consider = |c: Vec<f64>, w: Vec<(usize, f64)>| {
        let r = reach(&c);
        if best.as_ref().map_or(true, |b| r < b.1) {
            best = Some((c, r, w));
        }
    };
    if m == 1 {
        consider(points[0].clone(), vec![]);
    }
    for i in 0..m {
        for j in i + 1..m {
            let c: Vec<f64> = points[i].iter().zip(&points[j]).map(|(a, b)| 0.5 * (a + b)).collect();
            consider(c, vec![(i, 0.5), (j, 0.5)]);
        }
    }
    if m >= 3 && n == 2 {
        for i in 0..m {
            for j in i + 1..m {
                for k in j + 1..m {
                    if let Some((c, _, w)) = circumcircle(&points[i], &points[j], &points[k]) {
                        if w.iter().all(|&x| x >= -1e-12) {
                            consider(c, vec![(i, w[0]), (j, w[1]), (k, w[2])]);
                        }
                    }
                }
            }
        }
    }
    let (center, r, weights) = best.expect("at least one candidate");
    if m >= 3 && n != 2 {
        let (i, j) = (weights[0].0, weights[1].0);
        if r > 0.5 * norm2(&sub(&points[i], &points[j])) * (1.0 + 1e-12) {
            return Err(GeometryError::Unsupported("ball fit of 3+ points outside the plane".into()));
        }
    }
    let alpha = r / radius;
    let active = (0..m)
        .filter(|&i| r > 0.0 && (norm2(&sub(&points[i], &center)) - r).abs() <= 1e-9 * r.max(1.0))
        .map(|i| ActiveConstraint { point: i, facet: None })
        .collect::<Vec<_>>();
    let certificate = if r > 0.0 {
        weights
            .into_iter()
            .filter(|&(_, w)| w > 0.0)
            .map(|(i, w)| CertificateTerm {
                point: i,
                atom: sub(&points[i], &center).iter().map(|x| x / (r * radius)).collect(),
                weight: w,
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(FitResult {
        alpha_star: alpha,
        translation: center.iter().map(|x| -x).collect(),
        degenerate: active.len() > n + 1,
        active_constraints: active,
        certificate,
    })
}

/// Circumcentre, circumradius and barycentric coordinates of the centre.
fn circumcircle(a: &[f64], b: &[f64], c: &[f64]) -> Option<(Vec<f64>, f64, [f64; 3])> {
    let (bx, by) = (b[0] - a[0], b[1] - a[1]);
    let (cx, cy) = (c[0] - a[0], c[1] - a[1]);
    let d = 2.0 * (bx * cy - by * cx);
    let scale = (bx * bx + by * by).max(cx * cx + cy * cy);
    if d.abs() <= 1e-14 * scale {
        return None;
    }
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (cy * b2 - by * c2) / d;
    let uy = (bx * c2 - cx * b2) / d;
    let center = vec![a[0] + ux, a[1] + uy];
    let r = (ux * ux + uy * uy).sqrt();
    // Barycentric coordinates of the centre.
    let area = |p: &[f64], q: &[f64], s: &[f64]| (q[0] - p[0]) * (s[1] - p[1]) - (q[1] - p[1]) * (s[0] - p[0]);
    let total = area(a, b, c);
    let w = [
        area(&center, b, c) / total,
        area(a, &center, c) / total,
        area(a, b, &center) / total,
    ];
    Some((center, r, w))
}

/// `α*` for planar polygons by maximizing the dual objective over the
/// precomputed vertices of `{u >= 0, Σu = 1, Σ u a = 0}`. Much cheaper than the
/// simplex when only the value is needed.
#[derive(Clone, Debug)]
pub struct PlanarFitter {
    normals: Vec<[f64; 2]>,
    duals: Vec<([usize; 3], [f64; 3])>,
}

impl PlanarFitter {
    /// `None` outside the plane, or when the facet count makes the `O(f³)`
    /// table larger than a simplex solve.
    pub fn new(poly: &Polytope<f64>) -> Option<Self> {
        if poly.dim() != 2 || poly.facets().len() > 40 {
            return None;
        }
        let normals: Vec<[f64; 2]> = poly.facets().iter().map(|f| [f.normal[0], f.normal[1]]).collect();
        let cross = |x: &[f64; 2], y: &[f64; 2]| x[0] * y[1] - x[1] * y[0];
        let f = normals.len();
        let mut duals = Vec::new();
        for a in 0..f {
            for b in a + 1..f {
                let (x, y) = (&normals[a], &normals[b]);
                let (nx, ny) = (x[0].hypot(x[1]), y[0].hypot(y[1]));
                if cross(x, y).abs() <= 1e-12 * nx * ny && x[0] * y[0] + x[1] * y[1] < 0.0 {
                    duals.push(([a, b, b], [ny / (nx + ny), nx / (nx + ny), 0.0]));
                }
                for c in b + 1..f {
                    let z = &normals[c];
                    let w = [cross(y, z), cross(z, x), cross(x, y)];
                    let sum: f64 = w.iter().sum();
                    if sum.abs() <= 1e-14 {
                        continue;
                    }
                    let w = [w[0] / sum, w[1] / sum, w[2] / sum];
                    if w.iter().all(|&v| v > 1e-12) {
                        duals.push(([a, b, c], w));
                    }
                }
            }
        }
        Some(PlanarFitter { normals, duals })
    }

    pub fn alpha_star(&self, points: &[Vec<f64>]) -> f64 {
        let beta: Vec<f64> = self
            .normals
            .iter()
            .map(|a| points.iter().map(|q| a[0] * q[0] + a[1] * q[1]).fold(f64::NEG_INFINITY, f64::max))
            .collect();
        self.duals
            .iter()
            .map(|(idx, w)| w[0] * beta[idx[0]] + w[1] * beta[idx[1]] + w[2] * beta[idx[2]])
            .fold(0.0, f64::max)
    }
}

struct SimplexSolution {
    basis: Vec<usize>,
    values: Vec<f64>,
    duals: Vec<f64>,
}

/// `max c·x  s.t.  A x = b, x >= 0` with `b >= 0`; two-phase simplex, Bland's rule.
fn simplex_max(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Option<SimplexSolution> {
    let m = a.len();
    let ncols = c.len();
    let width = ncols + m + 1;
    let rhs = width - 1;
    let mut t = vec![vec![0.0; width]; m];
    for i in 0..m {
        t[i][..ncols].copy_from_slice(&a[i]);
        t[i][ncols + i] = 1.0;
        t[i][rhs] = b[i];
    }
    let mut basis: Vec<usize> = (ncols..ncols + m).collect();

    // Phase 1: maximize -Σ artificials.
    let mut obj = vec![0.0; width];
    for i in 0..m {
        for j in 0..ncols {
            obj[j] += t[i][j];
        }
        obj[rhs] += t[i][rhs];
    }
    run_simplex(&mut t, &mut obj, &mut basis, ncols);
    if obj[rhs] > 1e-9 {
        return None;
    }
    for i in 0..m {
        if basis[i] >= ncols {
            if let Some(j) = (0..ncols).find(|&j| t[i][j].abs() > 1e-9) {
                pivot(&mut t, &mut obj, &mut basis, i, j);
            }
        }
    }

    // Phase 2.
    let mut obj = vec![0.0; width];
    obj[..ncols].copy_from_slice(c);
    for i in 0..m {
        let cb = if basis[i] < ncols { c[basis[i]] } else { 0.0 };
        if cb != 0.0 {
            for j in 0..width {
                obj[j] -= cb * t[i][j];
            }
        }
    }
    run_simplex(&mut t, &mut obj, &mut basis, ncols);

    let values: Vec<f64> = (0..m).map(|i| t[i][rhs]).collect();
    // Duals from B^T y = c_B using the original columns.
    let column = |j: usize, i: usize| if j < ncols { a[i][j] } else if j - ncols == i { 1.0 } else { 0.0 };
    let bt: Vec<Vec<f64>> = basis.iter().map(|&j| (0..m).map(|i| column(j, i)).collect()).collect();
    let cb: Vec<f64> = basis.iter().map(|&j| if j < ncols { c[j] } else { 0.0 }).collect();
    let duals = solve(bt, cb)?;
    Some(SimplexSolution { basis, values, duals })
}

fn run_simplex(t: &mut [Vec<f64>], obj: &mut [f64], basis: &mut [usize], ncols: usize) {
    let rhs = obj.len() - 1;
    loop {
        let Some(enter) = (0..ncols).find(|&j| obj[j] > LP_TOL) else {
            return;
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..t.len() {
            if t[i][enter] > LP_TOL {
                let ratio = t[i][rhs] / t[i][enter];
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((l, r)) => {
                        if ratio < r - 1e-14 || (ratio <= r + 1e-14 && basis[i] < basis[l]) {
                            Some((i, ratio))
                        } else {
                            Some((l, r))
                        }
                    }
                };
            }
        }
        // Unbounded cannot happen for the fitting dual (Σu = 1 bounds it).
        let Some((row, _)) = leave else {
            return;
        };
        pivot(t, obj, basis, row, enter);
    }
}

fn pivot(t: &mut [Vec<f64>], obj: &mut [f64], basis: &mut [usize], row: usize, col: usize) {
    let p = t[row][col];
    for v in t[row].iter_mut() {
        *v /= p;
    }
    let prow = t[row].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i != row && r[col] != 0.0 {
            let f = r[col];
            for (x, y) in r.iter_mut().zip(&prow) {
                *x -= f * y;
            }
        }
    }
    let f = obj[col];
    for (x, y) in obj.iter_mut().zip(&prow) {
        *x -= f * y;
    }
    basis[row] = col;
}
