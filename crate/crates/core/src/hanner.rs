//! Hanner polytopes, their polars, and product trajectories.
//!
//! A tree of `⊕₁` and `⊕∞` sums over segments `[-1, 1]` is realized with both
//! representations written down directly:
//!
//! * `K ⊕₁ L` has vertices `(v_K, 0) ∪ (0, v_L)` and facet normals `(a_K, a_L)`;
//! * `K ⊕∞ L` has vertices `v_K × v_L` and facet normals `(a_K, 0) ∪ (0, a_L)`.
//!
//! The first `k` coordinates always belong to the left child.

use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::billiard::{default_max_bounces, random_start, simulate, PhasePoint, TrajectoryRecord};
use crate::error::{BilliardError, HannerError};
use crate::polytope::Polytope;
use crate::scalar::{add, axpy, dot, scale, sub, to_f64_vec, vec_approx_eq, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op")]
pub enum HannerTree {
    #[serde(rename = "leaf")]
    Leaf,
    #[serde(rename = "sum1")]
    Sum1 { l: Box<HannerTree>, r: Box<HannerTree> },
    #[serde(rename = "sumInf")]
    SumInf { l: Box<HannerTree>, r: Box<HannerTree> },
}

impl HannerTree {
    pub fn sum1(l: HannerTree, r: HannerTree) -> Self {
        HannerTree::Sum1 {
            l: Box::new(l),
            r: Box::new(r),
        }
    }

    pub fn sum_inf(l: HannerTree, r: HannerTree) -> Self {
        HannerTree::SumInf {
            l: Box::new(l),
            r: Box::new(r),
        }
    }

    /// `[-1, 1]^n` as a right comb of `⊕∞` sums.
    pub fn cube(n: usize) -> Self {
        assert!(n >= 1);
        (1..n).fold(HannerTree::Leaf, |acc, _| HannerTree::sum_inf(HannerTree::Leaf, acc))
    }

    /// The cross-polytope `conv{±e_i}`.
    pub fn cross_polytope(n: usize) -> Self {
        HannerTree::cube(n).swap()
    }

    pub fn dim(&self) -> usize {
        match self {
            HannerTree::Leaf => 1,
            HannerTree::Sum1 { l, r } | HannerTree::SumInf { l, r } => l.dim() + r.dim(),
        }
    }

    /// The tree of the polar body: every `⊕₁` becomes `⊕∞` and back.
    pub fn swap(&self) -> Self {
        match self {
            HannerTree::Leaf => HannerTree::Leaf,
            HannerTree::Sum1 { l, r } => HannerTree::sum_inf(l.swap(), r.swap()),
            HannerTree::SumInf { l, r } => HannerTree::sum1(l.swap(), r.swap()),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data")
    }
}

/// How a facet of a Hanner polytope decomposes over its two children.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FacetKind {
    /// One of the two endpoints of a segment.
    Leaf,
    /// `F_K × L`, a facet of a `⊕∞` sum.
    Left(usize),
    /// `K × F_L`, a facet of a `⊕∞` sum.
    Right(usize),
    /// `conv(F_K × 0 ∪ 0 × F_L)`, a facet of a `⊕₁` sum.
    Join(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FacetTag {
    pub kind: FacetKind,
    /// Dimensions `(k, l)` of the two children.
    pub split: (usize, usize),
}

#[derive(Clone, Debug)]
pub struct HannerPair<S> {
    pub h: Polytope<S>,
    pub h_polar: Polytope<S>,
    pub facet_tags: Vec<FacetTag>,
    pub polar_facet_tags: Vec<FacetTag>,
}

struct Raw<S> {
    vertices: Vec<Vec<S>>,
    normals: Vec<Vec<S>>,
    facet_kinds: Vec<FacetKind>,
    vertex_kinds: Vec<FacetKind>,
}

fn concat<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().chain(b).cloned().collect()
}

fn build<S: Scalar>(tree: &HannerTree) -> Raw<S> {
    match tree {
        HannerTree::Leaf => Raw {
            vertices: vec![vec![S::one()], vec![-S::one()]],
            normals: vec![vec![S::one()], vec![-S::one()]],
            facet_kinds: vec![FacetKind::Leaf; 2],
            vertex_kinds: vec![FacetKind::Leaf; 2],
        },
        HannerTree::Sum1 { l, r } | HannerTree::SumInf { l, r } => {
            let a = build::<S>(l);
            let b = build::<S>(r);
            let zk = vec![S::zero(); l.dim()];
            let zl = vec![S::zero(); r.dim()];
            // ⊕∞ data; ⊕₁ is obtained by exchanging the two representations.
            let prod_vertices: Vec<Vec<S>> = a.vertices.iter().flat_map(|u| b.vertices.iter().map(move |v| concat(u, v))).collect();
            let prod_vkinds: Vec<FacetKind> = (0..a.vertices.len())
                .flat_map(|i| (0..b.vertices.len()).map(move |j| FacetKind::Join(i, j)))
                .collect();
            let side_normals: Vec<Vec<S>> = a
                .normals
                .iter()
                .map(|n| concat(n, &zl))
                .chain(b.normals.iter().map(|n| concat(&zk, n)))
                .collect();
            let side_kinds: Vec<FacetKind> = (0..a.normals.len())
                .map(FacetKind::Left)
                .chain((0..b.normals.len()).map(FacetKind::Right))
                .collect();
            if matches!(tree, HannerTree::SumInf { .. }) {
                Raw {
                    vertices: prod_vertices,
                    normals: side_normals,
                    facet_kinds: side_kinds,
                    vertex_kinds: prod_vkinds,
                }
            } else {
                let join_normals: Vec<Vec<S>> = a.normals.iter().flat_map(|u| b.normals.iter().map(move |v| concat(u, v))).collect();
                let join_kinds: Vec<FacetKind> = (0..a.normals.len())
                    .flat_map(|i| (0..b.normals.len()).map(move |j| FacetKind::Join(i, j)))
                    .collect();
                let axis_vertices: Vec<Vec<S>> = a
                    .vertices
                    .iter()
                    .map(|v| concat(v, &zl))
                    .chain(b.vertices.iter().map(|v| concat(&zk, v)))
                    .collect();
                let axis_kinds: Vec<FacetKind> = (0..a.vertices.len())
                    .map(FacetKind::Left)
                    .chain((0..b.vertices.len()).map(FacetKind::Right))
                    .collect();
                Raw {
                    vertices: axis_vertices,
                    normals: join_normals,
                    facet_kinds: join_kinds,
                    vertex_kinds: axis_kinds,
                }
            }
        }
    }
}

fn split_of(tree: &HannerTree) -> (usize, usize) {
    match tree {
        HannerTree::Leaf => (1, 0),
        HannerTree::Sum1 { l, r } | HannerTree::SumInf { l, r } => (l.dim(), r.dim()),
    }
}

/// Builds `H` and `H°` together with the facet decomposition tags.
pub fn realize<S: Scalar>(tree: &HannerTree) -> HannerPair<S> {
    let raw = build::<S>(tree);
    let split = split_of(tree);
    let h = Polytope::from_parts(raw.vertices, raw.normals).expect("Hanner data is consistent");
    let h_polar = h.polar();
    let tag = |kind| FacetTag { kind, split };
    HannerPair {
        h,
        h_polar,
        facet_tags: raw.facet_kinds.into_iter().map(tag).collect(),
        polar_facet_tags: raw.vertex_kinds.into_iter().map(tag).collect(),
    }
}

fn polyline_lengths<S: Scalar>(nodes: &[Vec<S>], unit: &Polytope<S>) -> Vec<S> {
    let n = nodes.len();
    (0..n).map(|j| unit.gauge(&sub(&nodes[(j + 1) % n], &nodes[j]))).collect()
}

/// Composition parameters `β ∈ (0,1)` for which both momentum projections sit
/// at polyline nodes at the same moment.
///
/// The first projection starts on segment `p1[0] → p1[1]` at distance
/// `s₀ = (1-β)·ℓ₁₂` from `p1[0]`; the second starts at the node `p2[0]`. Lengths
/// are measured with the unit bodies `k_polar` and `l_polar`. `β` is forbidden
/// when `s₀ + τ ≡ σ` modulo the length of `p1` for a node time `τ ∈ (0, |p2|)`
/// of the second line and a node position `σ` of the first.
pub fn forbidden_betas<S: Scalar>(p1: &[Vec<S>], k_polar: &Polytope<S>, p2: &[Vec<S>], l_polar: &Polytope<S>) -> Vec<S> {
    let len1 = polyline_lengths(p1, k_polar);
    let len2 = polyline_lengths(p2, l_polar);
    let total1 = len1.iter().fold(S::zero(), |a, b| a + b.clone());
    let first = len1[0].clone();
    let mut sigma = vec![S::zero()];
    for l in &len1[..len1.len() - 1] {
        let next = sigma.last().expect("nonempty").clone() + l.clone();
        sigma.push(next);
    }
    let mut tau = Vec::new();
    let mut acc = S::zero();
    for l in &len2[..len2.len() - 1] {
        acc = acc + l.clone();
        tau.push(acc.clone());
    }
    let mut out: Vec<S> = Vec::new();
    for t in &tau {
        for s in &sigma {
            for z in -2i64..=2 {
                let shift = s.clone() - t.clone() + total1.clone() * S::from_ratio(z, 1);
                if shift.is_pos() && (first.clone() - shift.clone()).is_pos() {
                    out.push(S::one() - shift / first.clone());
                }
            }
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).expect("ordered"));
    out.dedup_by(|a, b| a.approx_eq(b));
    out
}

#[derive(Clone, Debug)]
pub struct CompositionInput<S> {
    pub q1: TrajectoryRecord<S>,
    pub q2: TrajectoryRecord<S>,
    pub alpha: S,
    pub beta: S,
}

/// What the post-checks found. A shift is the cyclic offset at which the
/// projection matches the scaled input polyline.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompositionCheck {
    pub first_shift: usize,
    pub first_translated: bool,
    pub second_shift: usize,
    pub second_translated: bool,
    pub first_type_momenta: usize,
    pub second_type_momenta: usize,
}

/// Removes cyclically adjacent duplicates.
fn contract<S: Scalar>(seq: &[Vec<S>]) -> Vec<Vec<S>> {
    let mut out: Vec<Vec<S>> = Vec::new();
    for x in seq {
        if out.last().map_or(true, |y| !vec_approx_eq(x, y)) {
            out.push(x.clone());
        }
    }
    while out.len() > 1 && vec_approx_eq(&out[0], out.last().expect("nonempty")) {
        out.pop();
    }
    out
}

/// `x` strictly inside the segment `[a, c]`.
fn strictly_between<S: Scalar>(a: &[S], x: &[S], c: &[S]) -> bool {
    let d = sub(c, a);
    let Some(i) = d.iter().position(|v| !v.is_zero_tol()) else {
        return false;
    };
    let t = (x[i].clone() - a[i].clone()) / d[i].clone();
    t.is_pos() && (S::one() - t.clone()).is_pos() && vec_approx_eq(&axpy(a, &t, &d), x)
}

/// Contracts duplicates and drops nodes lying inside the segment of their neighbours.
fn thin<S: Scalar>(seq: &[Vec<S>]) -> Vec<Vec<S>> {
    let mut cur = contract(seq);
    loop {
        let n = cur.len();
        if n < 3 {
            return cur;
        }
        let Some(i) = (0..n).find(|&i| strictly_between(&cur[(i + n - 1) % n], &cur[i], &cur[(i + 1) % n])) else {
            return cur;
        };
        cur.remove(i);
    }
}

/// Cyclic match `a[(s + i) % n] = b[i] + d`, preferring `d = 0`.
fn cyclic_match<S: Scalar>(a: &[Vec<S>], b: &[Vec<S>], allow_translation: bool) -> Option<(usize, bool)> {
    if a.len() != b.len() || a.is_empty() {
        return None;
    }
    let n = a.len();
    let mut translated = None;
    for s in 0..n {
        let d = sub(&a[s], &b[0]);
        let ok = (0..n).all(|i| vec_approx_eq(&sub(&a[(s + i) % n], &b[i]), &d));
        if ok {
            if d.iter().all(|x| x.is_zero_tol()) {
                return Some((s, false));
            }
            if allow_translation && translated.is_none() {
                translated = Some((s, true));
            }
        }
    }
    translated
}

fn open_interval<S: Scalar>(x: &S, what: &str) -> Result<(), HannerError> {
    if x.is_pos() && (S::one() - x.clone()).is_pos() {
        Ok(())
    } else {
        Err(HannerError::OutOfRange(format!("{what} = {} not in (0, 1)", x.to_f64())))
    }
}

/// Starts the product trajectory from `(α q¹, (1-α) q²)` with momentum
/// `(β p¹₁ + (1-β) p¹₂, p²₁)` in `K ⊕₁ L × K° ⊕∞ L°`, simulates it, and checks
/// the projections against the input trajectories.
pub fn compose_trajectory<S: Scalar>(
    inp: &CompositionInput<S>,
    tree: &HannerTree,
) -> Result<(TrajectoryRecord<S>, CompositionCheck), HannerError> {
    let HannerTree::Sum1 { l, r } = tree else {
        return Err(HannerError::NotSum1);
    };
    open_interval(&inp.alpha, "alpha")?;
    open_interval(&inp.beta, "beta")?;
    let (k, ldim) = (l.dim(), r.dim());
    let kp = realize::<S>(l);
    let lp = realize::<S>(r);
    let hp = realize::<S>(tree);
    let (t1, t2) = (&inp.q1, &inp.q2);
    if !t1.closed || !t2.closed || t1.bounces[0].q.len() != k || t2.bounces[0].q.len() != ldim {
        return Err(HannerError::OutOfRange("input trajectories must be closed and match the tree".into()));
    }
    let p1: Vec<Vec<S>> = t1.bounces[..t1.period].iter().map(|b| b.p.clone()).collect();
    let p2: Vec<Vec<S>> = t2.bounces[..t2.period].iter().map(|b| b.p.clone()).collect();
    if forbidden_betas(&p1, &kp.h_polar, &p2, &lp.h_polar)
        .iter()
        .any(|b| b.approx_eq(&inp.beta))
    {
        return Err(HannerError::ForbiddenBeta(inp.beta.to_f64()));
    }

    let alpha = inp.alpha.clone();
    let co_alpha = S::one() - alpha.clone();
    let q_start = concat(&scale(&t1.bounces[0].q, &alpha), &scale(&t2.bounces[0].q, &co_alpha));
    let mix = add(
        &scale(&p1[0], &inp.beta),
        &scale(&p1[1 % p1.len()], &(S::one() - inp.beta.clone())),
    );
    let p_start = concat(&mix, &p2[0]);
    let start = PhasePoint::locate(q_start, p_start, &hp.h, &hp.h_polar)?;
    let rec = simulate(&start, &hp.h, &hp.h_polar, default_max_bounces(k + ldim))?;
    let cyc = &rec.bounces[..rec.period];

    let mismatch = |m: String| HannerError::ProjectionMismatch(m);
    let proj_q1: Vec<Vec<S>> = cyc.iter().map(|b| b.q[..k].to_vec()).collect();
    let proj_q2: Vec<Vec<S>> = cyc.iter().map(|b| b.q[k..].to_vec()).collect();
    let want_q1: Vec<Vec<S>> = t1.bounces[..t1.period].iter().map(|b| scale(&b.q, &alpha)).collect();
    let want_q2: Vec<Vec<S>> = t2.bounces[..t2.period].iter().map(|b| scale(&b.q, &co_alpha)).collect();
    let (first_shift, first_translated) =
        cyclic_match(&contract(&proj_q1), &want_q1, true).ok_or_else(|| mismatch("first coordinate projection".into()))?;
    let (second_shift, second_translated) =
        cyclic_match(&contract(&proj_q2), &want_q2, true).ok_or_else(|| mismatch("second coordinate projection".into()))?;

    let proj_p1: Vec<Vec<S>> = cyc.iter().map(|b| b.p[..k].to_vec()).collect();
    let proj_p2: Vec<Vec<S>> = cyc.iter().map(|b| b.p[k..].to_vec()).collect();
    cyclic_match(&thin(&proj_p1), &thin(&p1), false).ok_or_else(|| mismatch("first momentum projection".into()))?;
    cyclic_match(&thin(&proj_p2), &thin(&p2), false).ok_or_else(|| mismatch("second momentum projection".into()))?;

    let all_p: Vec<Vec<S>> = cyc.iter().map(|b| b.p.clone()).collect();
    let sum = |v: Vec<S>| v.into_iter().fold(S::zero(), |a, b| a + b);
    let len_h = sum(polyline_lengths(&all_p, &hp.h_polar));
    let len_1 = sum(polyline_lengths(&proj_p1, &kp.h_polar));
    let len_2 = sum(polyline_lengths(&proj_p2, &lp.h_polar));
    if !len_h.approx_eq(&len_1) || !len_h.approx_eq(&len_2) {
        return Err(mismatch(format!(
            "momentum lengths {} / {} / {}",
            len_h.to_f64(),
            len_1.to_f64(),
            len_2.to_f64()
        )));
    }

    let first_type = cyc
        .iter()
        .filter(|b| matches!(hp.polar_facet_tags[b.p_facet].kind, FacetKind::Left(_)))
        .count();
    let check = CompositionCheck {
        first_shift,
        first_translated,
        second_shift,
        second_translated,
        first_type_momenta: first_type,
        second_type_momenta: rec.period - first_type,
    };
    if check.first_type_momenta != t1.period || check.second_type_momenta != t2.period {
        return Err(mismatch(format!(
            "momentum types {} + {}, expected {} + {}",
            check.first_type_momenta, check.second_type_momenta, t1.period, t2.period
        )));
    }
    Ok((rec, check))
}

fn negated<S: Scalar>(v: &[S]) -> Vec<S> {
    v.iter().map(|x| -x.clone()).collect()
}

/// The three conclusions for a closed simple trajectory in dimension `n`:
/// length 4, period `2n`, and `q_i = -q_{i+n}`, `p_i = -p_{i+n}`.
pub fn hanner_properties<S: Scalar>(rec: &TrajectoryRecord<S>, n: usize) -> (bool, bool, bool, bool) {
    let length4 = rec.length_t.approx_eq(&S::from_ratio(4, 1));
    let period = rec.period == 2 * n;
    let sym = |f: &dyn Fn(&PhasePoint<S>) -> &Vec<S>| {
        period && (0..n).all(|i| vec_approx_eq(f(&rec.bounces[i]), &negated(f(&rec.bounces[i + n]))))
    };
    let sym_q = sym(&|b| &b.q);
    let sym_p = sym(&|b| &b.p);
    (length4, period, sym_q, sym_p)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct HannerReport {
    pub dim: usize,
    pub samples: usize,
    pub accepted: usize,
    /// Starts whose trajectory hit a face of codimension two or more.
    pub resampled: usize,
    pub closed: usize,
    pub simple: usize,
    pub length4: usize,
    pub period_2n: usize,
    pub symmetric_q: usize,
    pub symmetric_p: usize,
    pub failures: usize,
}

impl HannerReport {
    /// Every accepted run satisfies every conclusion.
    pub fn all_pass(&self) -> bool {
        let a = self.accepted;
        a == self.samples
            && self.failures == 0
            && [self.closed, self.simple, self.length4, self.period_2n, self.symmetric_q, self.symmetric_p]
                .iter()
                .all(|&c| c == a)
    }
}

/// Random exact-rational starts in `H × H°`, one ChaCha stream per sample.
pub fn verify_hanner(tree: &HannerTree, samples: usize, seed: u64) -> HannerReport {
    verify_hanner_in::<BigRational>(tree, samples, seed)
}

/// [`verify_hanner`] in the arithmetic `S`; with `f64` the checks use the
/// `1e-9` tolerance.
pub fn verify_hanner_in<S: Scalar>(tree: &HannerTree, samples: usize, seed: u64) -> HannerReport {
    let n = tree.dim();
    let pair = realize::<S>(tree);
    let mut rep = HannerReport {
        dim: n,
        samples,
        ..Default::default()
    };
    for run in 0..samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(run as u64);
        for _attempt in 0..1000 {
            let (start, rejected) = random_start(&pair.h, &pair.h_polar, &mut rng);
            rep.resampled += rejected;
            match simulate(&start, &pair.h, &pair.h_polar, default_max_bounces(n)) {
                Err(BilliardError::NonClassical { .. }) => rep.resampled += 1,
                Err(_) => {
                    rep.accepted += 1;
                    rep.failures += 1;
                    break;
                }
                Ok(rec) => {
                    rep.accepted += 1;
                    rep.closed += rec.closed as usize;
                    rep.simple += rec.simple as usize;
                    let (l4, per, sq, sp) = hanner_properties(&rec, n);
                    rep.length4 += l4 as usize;
                    rep.period_2n += per as usize;
                    rep.symmetric_q += sq as usize;
                    rep.symmetric_p += sp as usize;
                    break;
                }
            }
        }
    }
    rep
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityReport {
    pub samples: usize,
    pub within: usize,
    pub max_distance: f64,
    pub radius: f64,
    pub retries: usize,
}

fn dist_point_segment(x: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let d = sub(b, a);
    let dd = dot(&d, &d);
    let t = if dd > 0.0 { (dot(&sub(x, a), &d) / dd).clamp(0.0, 1.0) } else { 0.0 };
    let y = axpy(a, &t, &d);
    crate::scalar::norm2(&sub(x, &y))
}

/// Euclidean distance in `V × V*` from `(q, p)` to the phase curve of a closed
/// trajectory: momentum jumps `{q_i} × [p_i, p_{i+1}]` and motions
/// `[q_i, q_{i+1}] × {p_{i+1}}`.
pub fn phase_distance(rec: &TrajectoryRecord<f64>, q: &[f64], p: &[f64]) -> f64 {
    let x = concat(q, p);
    let b = &rec.bounces;
    let mut best = f64::INFINITY;
    for i in 0..rec.period {
        let jump_a = concat(&b[i].q, &b[i].p);
        let jump_b = concat(&b[i].q, &b[i + 1].p);
        let move_b = concat(&b[i + 1].q, &b[i + 1].p);
        best = best.min(dist_point_segment(&x, &jump_a, &jump_b));
        best = best.min(dist_point_segment(&x, &jump_b, &move_b));
    }
    best
}

fn exit_point(x: &[BigRational], dir: &[BigRational], body: &Polytope<BigRational>) -> Vec<BigRational> {
    let mut best: Option<BigRational> = None;
    for f in body.facets() {
        let rate = dot(&f.normal, dir);
        if rate.is_pos() {
            let s = (BigRational::one() - dot(&f.normal, x)) / rate;
            if best.as_ref().map_or(true, |b| s < *b) {
                best = Some(s);
            }
        }
    }
    axpy(x, &best.expect("bounded body"), dir)
}

/// Sampled check that minimal trajectories pass near arbitrary boundary
/// points of `H × H°`.
///
/// If `p ∈ ∂H°`, the coordinate is pulled inside by the factor `1 - δ` and
/// pushed along the velocity `n_{H°}(p)` to `∂H`; the trajectory through that
/// phase point moves through `((1-δ) q, p)`. If instead `q ∈ ∂H` with `p`
/// inside, the momentum is pushed back along `n_H(q)` to `∂H°`, and the jump
/// at `q` runs through `(q, p)`.
pub fn density_check(tree: &HannerTree, samples: usize, seed: u64, radius: f64) -> DensityReport {
    use rand::Rng;
    let n = tree.dim();
    let pair = realize::<BigRational>(tree);
    let (h, hp) = (&pair.h, &pair.h_polar);
    let delta = BigRational::from_ratio(1, 1000);
    let mut rep = DensityReport {
        samples,
        within: 0,
        max_distance: 0.0,
        radius,
        retries: 0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let interior = |body: &Polytope<BigRational>, rng: &mut ChaCha8Rng| -> Vec<BigRational> {
        // A random convex combination of all vertices, shrunk towards the origin.
        let w: Vec<i64> = body.vertices().iter().map(|_| rng.gen_range(1..(1i64 << 16))).collect();
        let total: i64 = w.iter().sum::<i64>() * 2;
        body.vertices()
            .iter()
            .zip(&w)
            .fold(vec![BigRational::zero(); n], |acc, (v, &wi)| axpy(&acc, &BigRational::from_ratio(wi, total), v))
    };
    for _ in 0..samples {
        let mut best = f64::INFINITY;
        let on_momentum_side = rng.gen_bool(0.5);
        // The boundary point to approximate.
        let (ph, _) = random_start(h, hp, &mut rng);
        let (mut target_q, mut target_p) = if on_momentum_side {
            (interior(h, &mut rng), ph.p)
        } else {
            (ph.q, interior(hp, &mut rng))
        };
        for _attempt in 0..50 {
            let start = if on_momentum_side {
                let pf = unique(hp, &target_p);
                let v = hp.facets()[pf].normal.clone();
                let inner = scale(&target_q, &(BigRational::one() - delta.clone()));
                let q_exit = exit_point(&inner, &v, h);
                PhasePoint::locate(q_exit, target_p.clone(), h, hp)
            } else {
                let qf = unique(h, &target_q);
                let nrm = h.facets()[qf].normal.clone();
                let p_back = exit_point(&target_p, &nrm, hp);
                PhasePoint::locate(target_q.clone(), p_back, h, hp)
            };
            let rec = start.and_then(|s| simulate(&s, h, hp, default_max_bounces(n)));
            match rec {
                Ok(rec) => {
                    let f = rec.to_f64();
                    best = phase_distance(&f, &to_f64_vec(&target_q), &to_f64_vec(&target_p));
                    break;
                }
                Err(_) => {
                    // Nudge the free component and retry.
                    rep.retries += 1;
                    let jitter = interior(if on_momentum_side { h } else { hp }, &mut rng);
                    let eps = BigRational::from_ratio(1, 1 << 20);
                    if on_momentum_side {
                        target_q = axpy(&target_q, &eps, &jitter);
                    } else {
                        target_p = axpy(&target_p, &eps, &jitter);
                    }
                }
            }
        }
        rep.max_distance = rep.max_distance.max(best);
        if best <= radius {
            rep.within += 1;
        }
    }
    rep
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CompositionReport {
    pub samples: usize,
    pub passed: usize,
    /// `β` draws rejected for being forbidden.
    pub forbidden_rejected: usize,
    pub translated_matches: usize,
    pub failures: Vec<String>,
}

/// Simple closed trajectory in `K × K°` from a random exact start.
fn random_closed<R: rand::Rng>(tree: &HannerTree, rng: &mut R) -> TrajectoryRecord<BigRational> {
    let pair = realize::<BigRational>(tree);
    loop {
        let (start, _) = random_start(&pair.h, &pair.h_polar, rng);
        if let Ok(rec) = simulate(&start, &pair.h, &pair.h_polar, default_max_bounces(tree.dim())) {
            if rec.simple {
                return rec;
            }
        }
    }
}

/// Trees `K ⊕₁ L` used by `composition_battery`, cycled through by sample.
pub fn composition_trees() -> Vec<HannerTree> {
    use HannerTree as H;
    vec![
        H::sum1(H::Leaf, H::Leaf),
        H::sum1(H::cube(2), H::Leaf),
        H::sum1(H::Leaf, H::cross_polytope(2)),
        H::sum1(H::cube(2), H::cross_polytope(2)),
    ]
}

/// Composes random input trajectories with random `α` and unforbidden `β`,
/// all with denominator `2^16`, and runs the projection checks.
pub fn composition_battery(samples: usize, seed: u64) -> CompositionReport {
    use rand::Rng;
    let trees = composition_trees();
    let mut rep = CompositionReport {
        samples,
        ..Default::default()
    };
    let denom = 1i64 << 16;
    for run in 0..samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(run as u64);
        let tree = &trees[run % trees.len()];
        let HannerTree::Sum1 { l, r } = tree else { unreachable!() };
        let q1 = random_closed(l, &mut rng);
        let q2 = random_closed(r, &mut rng);
        let p1: Vec<Vec<BigRational>> = q1.bounces[..q1.period].iter().map(|b| b.p.clone()).collect();
        let p2: Vec<Vec<BigRational>> = q2.bounces[..q2.period].iter().map(|b| b.p.clone()).collect();
        let forbidden = forbidden_betas(&p1, &realize::<BigRational>(l).h_polar, &p2, &realize::<BigRational>(r).h_polar);
        let alpha = BigRational::from_ratio(rng.gen_range(1..denom), denom);
        let beta = loop {
            let b = BigRational::from_ratio(rng.gen_range(1..denom), denom);
            if forbidden.contains(&b) {
                rep.forbidden_rejected += 1;
            } else {
                break b;
            }
        };
        let inp = CompositionInput { q1, q2, alpha, beta };
        match compose_trajectory(&inp, tree) {
            Ok((rec, check)) => {
                let (l4, per, sq, sp) = hanner_properties(&rec, tree.dim());
                if rec.closed && rec.simple && l4 && per && sq && sp {
                    rep.passed += 1;
                    rep.translated_matches += (check.first_translated || check.second_translated) as usize;
                } else {
                    rep.failures.push(format!("run {run}: Hanner properties fail"));
                }
            }
            Err(e) => rep.failures.push(format!("run {run}: {e}")),
        }
    }
    rep
}

fn unique(body: &Polytope<BigRational>, x: &[BigRational]) -> usize {
    body.facets_containing(x)[0]
}


#[cfg(test)]
mod tests {
    use super::*;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    #[test]
    fn json_round_trip() {
        let t: HannerTree = HannerTree::from_json(r#"{"op":"sum1","l":{"op":"leaf"},"r":{"op":"sumInf","l":{"op":"leaf"},"r":{"op":"leaf"}}}"#).unwrap();
        assert_eq!(t.dim(), 3);
        assert_eq!(HannerTree::from_json(&t.to_json()).unwrap(), t);
    }

    #[test]
    fn square_and_diamond() {
        let p = realize::<Q>(&HannerTree::sum_inf(HannerTree::Leaf, HannerTree::Leaf));
        assert_eq!(p.h.vertices().len(), 4);
        assert_eq!(p.h.facets().len(), 4);
        assert!(p.h.contains(&[q(1, 1), q(1, 1)]));
        assert!(p.h_polar.contains(&[q(1, 1), q(0, 1)]));
        assert!(!p.h_polar.contains(&[q(1, 1), q(1, 100)]));
    }

    #[test]
    fn octahedron_polar_is_cube() {
        let t = HannerTree::sum1(HannerTree::Leaf, HannerTree::sum1(HannerTree::Leaf, HannerTree::Leaf));
        let p = realize::<Q>(&t);
        assert_eq!(p.h.vertices().len(), 6);
        assert_eq!(p.h.facets().len(), 8);
        assert_eq!(p.h_polar.vertices().len(), 8);
        let swapped = realize::<Q>(&t.swap());
        for v in swapped.h.vertices() {
            assert!(p.h_polar.vertices().contains(v));
        }
    }

    #[test]
    fn segment_betas_are_never_forbidden() {
        let seg = realize::<Q>(&HannerTree::Leaf);
        let line = vec![vec![q(1, 1)], vec![q(-1, 1)]];
        assert!(forbidden_betas(&line, &seg.h_polar, &line, &seg.h_polar).is_empty());
    }

    #[test]
    fn composition_of_two_segments() {
        let seg = realize::<Q>(&HannerTree::Leaf);
        let start = PhasePoint::locate(vec![q(1, 1)], vec![q(1, 1)], &seg.h, &seg.h_polar).unwrap();
        let rec = simulate(&start, &seg.h, &seg.h_polar, 12).unwrap();
        assert_eq!((rec.period, rec.length_t.clone()), (2, q(4, 1)));
        let tree = HannerTree::sum1(HannerTree::Leaf, HannerTree::Leaf);
        let inp = CompositionInput {
            q1: rec.clone(),
            q2: rec,
            alpha: q(1, 2),
            beta: q(1, 4),
        };
        let (out, check) = compose_trajectory(&inp, &tree).unwrap();
        assert_eq!(out.period, 4);
        assert_eq!(out.length_t, q(4, 1));
        assert_eq!((check.first_type_momenta, check.second_type_momenta), (2, 2));
        for b in &out.bounces {
            assert_eq!(b.q[0].clone().abs() + b.q[1].clone().abs(), q(1, 1));
        }
    }
}
