//! Shortest closed polylines that do not fit into a translate of `int K`.
//!
//! `ξ_T(K)` is the minimum of `ℓ_T(Q)` over closed 2- and 3-gons `Q` with
//! `fit_scale(Q, K).α* >= 1`. Because both `ℓ_T` and `α*` are positively
//! homogeneous, this is also the minimum of the ratio `ℓ_T(Q) / α*(Q)`.
//!
//! The search runs a penalized pattern search over arc parameters on `∂K` and
//! then polishes each local result with a dual step: the fitting certificate
//! `Σ u_j <a_j, q_{i(j)}>` is a linear functional `Σ <g_i, q_i>` of the
//! points, and maximizing it under `ℓ_T(Q) <= 1` is again a fitting problem,
//! this time of the momenta `p_i = -(g_1 + … + g_i)` into `T`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::body::{width, ConvexBody};
use crate::error::GeometryError;
use crate::fit::{fit_scale, FitResult, PlanarFitter};
use crate::scalar::{add, sub, EPS};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolyLine {
    pub points: Vec<Vec<f64>>,
    pub length: f64,
}

impl PolyLine {
    pub fn new(points: Vec<Vec<f64>>, t: &ConvexBody) -> Self {
        let length = length_t(&points, t);
        PolyLine { points, length }
    }
}

/// `ℓ_T(q_1, …, q_m) = Σ ||q_{i+1} - q_i||_T`, indices cyclic.
pub fn length_t(points: &[Vec<f64>], t: &ConvexBody) -> f64 {
    let m = points.len();
    (0..m).map(|i| t.h(&sub(&points[(i + 1) % m], &points[i]))).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum XiMethod {
    Optimizer,
    Oracle,
    ClosedForm,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct XiResult {
    pub value: f64,
    pub minimizer: PolyLine,
    pub m: usize,
    pub alpha_at_min: f64,
    pub method: XiMethod,
    /// Budget exhausted, or the closed form and the optimizer disagree.
    pub flagged: bool,
    /// Optimizer value, kept when `method` is the closed form.
    pub cross_check: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct XiOptions {
    pub starts: usize,
    /// Initial pattern step as a fraction of the perimeter.
    pub step: f64,
    /// Penalty weight, in units of the `T`-diameter of `K`.
    pub penalty: f64,
    pub seed: u64,
    /// Objective evaluations allowed per start.
    pub max_evals: usize,
    pub polish: bool,
}

impl Default for XiOptions {
    fn default() -> Self {
        XiOptions {
            starts: 64,
            step: 1.0 / 16.0,
            penalty: 1e3,
            seed: 0,
            max_evals: 20_000,
            polish: true,
        }
    }
}

fn check_planar(k: &ConvexBody, t: &ConvexBody) -> Result<(), GeometryError> {
    if k.dim() != t.dim() {
        return Err(GeometryError::DimensionMismatch);
    }
    if k.dim() != 2 {
        return Err(GeometryError::Unsupported("ξ is computed in the plane only".into()));
    }
    Ok(())
}

fn alpha(points: &[Vec<f64>], k: &ConvexBody) -> FitResult {
    fit_scale(points, k).expect("planar points of matching dimension")
}

/// `ℓ_T(Q) / α*(Q)`, or infinity when `Q` is a single point in disguise.
fn ratio(points: &[Vec<f64>], k: &ConvexBody, t: &ConvexBody) -> f64 {
    let a = alpha(points, k).alpha_star;
    if a <= 1e-12 {
        f64::INFINITY
    } else {
        length_t(points, t) / a
    }
}

/// Translate and rescale so that `Q ⊂ K` with `α*(Q) = 1`.
fn normalize(points: &[Vec<f64>], k: &ConvexBody) -> Vec<Vec<f64>> {
    let fit = alpha(points, k);
    points
        .iter()
        .map(|q| add(q, &fit.translation).iter().map(|x| x / fit.alpha_star).collect())
        .collect()
}

/// One dual step. Returns a polyline whose ratio is at most that of `points`.
fn dual_step(points: &[Vec<f64>], k: &ConvexBody, t: &ConvexBody) -> Option<Vec<Vec<f64>>> {
    let m = points.len();
    let fit = alpha(points, k);
    if fit.alpha_star <= 1e-12 {
        return None;
    }
    let mut g = vec![vec![0.0; 2]; m];
    for c in &fit.certificate {
        for d in 0..2 {
            g[c.point][d] += c.weight * c.atom[d];
        }
    }
    let mut p = Vec::with_capacity(m);
    let mut acc = vec![0.0; 2];
    for gi in &g {
        acc = sub(&acc, gi);
        p.push(acc.clone());
    }
    let fit_t = fit_scale(&p, t).ok()?;
    if fit_t.alpha_star <= 1e-12 {
        return None;
    }
    let mut d = vec![vec![0.0; 2]; m];
    for c in &fit_t.certificate {
        for j in 0..2 {
            d[c.point][j] += c.weight * c.atom[j];
        }
    }
    let mut q = vec![vec![0.0; 2]];
    for di in d.iter().take(m - 1) {
        let next = add(q.last().expect("nonempty"), di);
        q.push(next);
    }
    Some(q)
}

fn polish(points: Vec<Vec<f64>>, k: &ConvexBody, t: &ConvexBody) -> (Vec<Vec<f64>>, f64) {
    let mut best = ratio(&points, k, t);
    let mut best_q = points;
    for _ in 0..64 {
        let Some(q) = dual_step(&best_q, k, t) else { break };
        let r = ratio(&q, k, t);
        if r < best * (1.0 - 1e-14) {
            best = r;
            best_q = q;
        } else {
            break;
        }
    }
    (best_q, best)
}

/// Arc-length parametrization of `∂K` with precomputed edge offsets.
struct Boundary<'a> {
    body: &'a ConvexBody,
    perimeter: f64,
    offsets: Vec<f64>,
}

impl<'a> Boundary<'a> {
    fn new(body: &'a ConvexBody) -> Self {
        let mut offsets = vec![0.0];
        if let ConvexBody::Polytope(p) = body {
            let v = p.vertices();
            for j in 0..v.len() {
                let next = offsets[j] + crate::scalar::norm2(&sub(&v[(j + 1) % v.len()], &v[j]));
                offsets.push(next);
            }
        }
        Boundary {
            body,
            perimeter: body.perimeter(),
            offsets,
        }
    }

    fn point(&self, s: f64) -> Vec<f64> {
        let s = s.rem_euclid(self.perimeter);
        match self.body {
            ConvexBody::Ball { .. } => self.body.boundary_point(s),
            ConvexBody::Polytope(p) => {
                let v = p.vertices();
                let j = match self.offsets.binary_search_by(|o| o.partial_cmp(&s).expect("finite")) {
                    Ok(j) => j.min(v.len() - 1),
                    Err(j) => j - 1,
                };
                let (a, b) = (&v[j], &v[(j + 1) % v.len()]);
                let len = self.offsets[j + 1] - self.offsets[j];
                let u = ((s - self.offsets[j]) / len).clamp(0.0, 1.0);
                vec![a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1])]
            }
        }
    }
}

/// Value-only `α*`, used inside the search loops.
enum ValueFitter<'a> {
    Polygon(PlanarFitter),
    Other(&'a ConvexBody),
}

impl<'a> ValueFitter<'a> {
    fn new(k: &'a ConvexBody) -> Self {
        match k.as_polytope().and_then(PlanarFitter::new) {
            Some(f) => ValueFitter::Polygon(f),
            None => ValueFitter::Other(k),
        }
    }

    fn alpha_star(&self, q: &[Vec<f64>]) -> f64 {
        match self {
            ValueFitter::Polygon(f) => f.alpha_star(q),
            ValueFitter::Other(k) => alpha(q, k).alpha_star,
        }
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Cranley–Patterson rotated Halton points in `[0,1)^m`.
fn halton_starts(count: usize, m: usize, seed: u64) -> Vec<Vec<f64>> {
    const BASES: [u64; 3] = [2, 3, 5];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..m).map(|_| rng.gen::<f64>()).collect();
    (1..=count as u64)
        .map(|i| (0..m).map(|d| (radical_inverse(i, BASES[d]) + shift[d]).fract()).collect())
        .collect()
}

fn diameter_t(k: &ConvexBody, t: &ConvexBody) -> f64 {
    let pts: Vec<Vec<f64>> = match k {
        ConvexBody::Polytope(p) => p.vertices().to_vec(),
        ConvexBody::Ball { .. } => {
            let per = k.perimeter();
            (0..64).map(|i| k.boundary_point(per * i as f64 / 64.0)).collect()
        }
    };
    let mut best = 0.0f64;
    for a in &pts {
        for b in &pts {
            best = best.max(t.h(&sub(a, b)));
        }
    }
    best
}

fn better(fy: f64, fx: f64) -> bool {
    // Demand a real decrease, or rounding noise drifts along plateaus forever.
    fy < fx - 1e-13 * fx.abs().max(1.0)
}

/// One coordinate sweep of size `step` around `x`.
fn explore(f: &dyn Fn(&[f64]) -> f64, mut x: Vec<f64>, mut fx: f64, step: f64, evals: &mut usize) -> (Vec<f64>, f64) {
    for i in 0..x.len() {
        for dir in [1.0, -1.0] {
            let mut y = x.clone();
            y[i] += dir * step;
            let fy = f(&y);
            *evals += 1;
            if better(fy, fx) {
                x = y;
                fx = fy;
                break;
            }
        }
    }
    (x, fx)
}

/// Hooke-Jeeves pattern search: coordinate sweeps, extrapolation along the
/// last successful displacement, halving the step when a sweep fails.
/// Returns the best point and whether the budget ran out while the step
/// was still coarser than `1000 · min_step`.
fn pattern_search(
    f: &dyn Fn(&[f64]) -> f64,
    mut x: Vec<f64>,
    step0: f64,
    min_step: f64,
    max_evals: usize,
) -> (Vec<f64>, f64, bool) {
    let mut fx = f(&x);
    let mut evals = 1;
    let mut step = step0;
    while step >= min_step {
        if evals >= max_evals {
            // The certificate polish finishes anything already this fine.
            return (x, fx, step > 1e3 * min_step);
        }
        let (mut y, mut fy) = explore(f, x.clone(), fx, step, &mut evals);
        if !better(fy, fx) {
            step *= 0.5;
            continue;
        }
        while better(fy, fx) && evals < max_evals {
            let z: Vec<f64> = y.iter().zip(&x).map(|(a, b)| 2.0 * a - b).collect();
            x = y;
            fx = fy;
            let fz = f(&z);
            evals += 1;
            (y, fy) = explore(f, z, fz, step, &mut evals);
        }
    }
    (x, fx, false)
}

/// Minimizes `ℓ_T` over closed `m`-gons that do not fit into `int K + t`.
pub fn shortest_nonfit(
    m: usize,
    k: &ConvexBody,
    t: &ConvexBody,
    opts: &XiOptions,
) -> Result<XiResult, GeometryError> {
    check_planar(k, t)?;
    if !(2..=3).contains(&m) {
        return Err(GeometryError::Unsupported(format!("m = {m}; only 2 and 3 are searched")));
    }
    let boundary = Boundary::new(k);
    let per = boundary.perimeter;
    let fitter = ValueFitter::new(k);
    let big_m = opts.penalty * diameter_t(k, t);
    let place = |s: &[f64]| -> Vec<Vec<f64>> { s.iter().map(|&si| boundary.point(si)).collect() };
    let objective = |s: &[f64]| {
        let q = place(s);
        let a = fitter.alpha_star(&q);
        length_t(&q, t) + big_m * (1.0 - a).max(0.0)
    };

    // The flag follows the winning start only; other starts may stall in the
    // penalty valley without affecting the result.
    let mut best: Option<(Vec<Vec<f64>>, f64, bool)> = None;
    for start in halton_starts(opts.starts.max(1), m, opts.seed ^ m as u64) {
        let x0: Vec<f64> = start.iter().map(|u| u * per).collect();
        let (x, _, exhausted) = pattern_search(&objective, x0, opts.step * per, 1e-9 * per, opts.max_evals);
        let q = place(&x);
        let (q, r) = if opts.polish { polish(q, k, t) } else { let r = ratio(&q, k, t); (q, r) };
        if r.is_finite() && best.as_ref().map_or(true, |b| r < b.1) {
            best = Some((q, r, exhausted));
        }
    }
    let Some((q, value, exhausted)) = best else {
        return Err(GeometryError::Degenerate("no start produced a non-fitting polyline".into()));
    };
    let q = normalize(&q, k);
    let alpha_at_min = alpha(&q, k).alpha_star;
    Ok(XiResult {
        value,
        minimizer: PolyLine::new(q, t),
        m,
        alpha_at_min,
        method: XiMethod::Optimizer,
        flagged: exhausted || (alpha_at_min - 1.0).abs() > 1e-6,
        cross_check: None,
    })
}

/// `ξ_T(K)` as the smaller of the 2- and 3-gon minima (2 on ties).
///
/// For `T` a ball and `K` centrally symmetric the reported value is
/// `2 w_B(K)`; the optimizer still runs and a disagreement sets `flagged`.
pub fn xi(k: &ConvexBody, t: &ConvexBody, opts: &XiOptions) -> Result<XiResult, GeometryError> {
    check_planar(k, t)?;
    let r2 = shortest_nonfit(2, k, t, opts)?;
    let r3 = shortest_nonfit(3, k, t, opts)?;
    let mut best = if r2.value <= r3.value + 1e-9 * r3.value.max(1.0) { r2 } else { r3 };
    if t.is_ball() && k.is_centrally_symmetric() {
        let closed = 2.0 * width(k, t)?.0;
        best.flagged |= (best.value - closed).abs() > 1e-6 * closed;
        best.cross_check = Some(best.value);
        best.value = closed;
        best.method = XiMethod::ClosedForm;
    }
    Ok(best)
}

/// Brute force over `grid` equispaced boundary samples: the shortest pair or
/// triple (either orientation) with `α* >= 1 - ε`.
pub fn xi_oracle(k: &ConvexBody, t: &ConvexBody, grid: usize) -> Result<f64, GeometryError> {
    check_planar(k, t)?;
    if !(3..=96).contains(&grid) {
        return Err(GeometryError::Unsupported(format!("grid {grid} outside 3..=96")));
    }
    let boundary = Boundary::new(k);
    let fitter = ValueFitter::new(k);
    let pts: Vec<Vec<f64>> = (0..grid)
        .map(|i| boundary.point(boundary.perimeter * i as f64 / grid as f64))
        .collect();
    let h = |a: usize, b: usize| t.h(&sub(&pts[b], &pts[a]));
    let fits = |idx: &[usize]| {
        let q: Vec<Vec<f64>> = idx.iter().map(|&i| pts[i].clone()).collect();
        fitter.alpha_star(&q) >= 1.0 - EPS
    };
    let mut best = f64::INFINITY;
    for i in 0..grid {
        for j in i + 1..grid {
            let l = h(i, j) + h(j, i);
            if l < best && fits(&[i, j]) {
                best = l;
            }
        }
    }
    for i in 0..grid {
        for j in i + 1..grid {
            for l in j + 1..grid {
                let fwd = h(i, j) + h(j, l) + h(l, i);
                let bwd = h(i, l) + h(l, j) + h(j, i);
                let len = fwd.min(bwd);
                if len < best && fits(&[i, j, l]) {
                    best = len;
                }
            }
        }
    }
    Ok(best)
}
