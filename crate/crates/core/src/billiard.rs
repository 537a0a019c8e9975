//! Classical billiard dynamics in `K × T` for polytopes `K ⊂ V`, `T ⊂ V*`.
//!
//! Phase point `i` is `(q_i, p_i)`: the bounce point on `∂K` and the momentum
//! with which it was reached. One bounce applies
//!
//! ```text
//! p_{i+1} = p_i - λ n_K(q_i),        λ > 0, p_{i+1} ∈ ∂T
//! q_{i+1} = q_i + μ n_T(p_{i+1}),    μ > 0, q_{i+1} ∈ ∂K
//! ```
//!
//! where `n_P(x)` is the normal of the unique facet containing `x`, scaled to
//! the polar boundary. Everything is generic over [`Scalar`], so the same code
//! runs exactly on rationals or with the `1e-9` tolerance on floats.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::BilliardError;
use crate::polytope::Polytope;
use crate::scalar::{axpy, dot, sub, to_f64_vec, vec_approx_eq, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint<S> {
    pub q: Vec<S>,
    pub p: Vec<S>,
    pub q_facet: usize,
    pub p_facet: usize,
}

impl<S: Scalar> PhasePoint<S> {
    /// Locates the facets of `q` and `p`; both must be classical points.
    pub fn locate(q: Vec<S>, p: Vec<S>, k: &Polytope<S>, t: &Polytope<S>) -> Result<Self, BilliardError> {
        let q_facet = unique_facet(&q, k)?;
        let p_facet = unique_facet(&p, t)?;
        Ok(PhasePoint { q, p, q_facet, p_facet })
    }

    /// Equal coordinates, momenta and facet ids (within tolerance on floats).
    pub fn same_as(&self, other: &Self) -> bool {
        self.q_facet == other.q_facet
            && self.p_facet == other.p_facet
            && vec_approx_eq(&self.q, &other.q)
            && vec_approx_eq(&self.p, &other.p)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRecord<S> {
    /// Phase points from the start; when closed the last one repeats the first.
    pub bounces: Vec<PhasePoint<S>>,
    pub closed: bool,
    pub period: usize,
    pub length_t: S,
    pub simple: bool,
    pub lambdas: Vec<S>,
    pub mus: Vec<S>,
}

fn unique_facet<S: Scalar>(x: &[S], body: &Polytope<S>) -> Result<usize, BilliardError> {
    if x.len() != body.dim() {
        return Err(crate::error::GeometryError::DimensionMismatch.into());
    }
    if !body.contains(x) {
        return Err(BilliardError::non_classical("point outside the body"));
    }
    match body.facets_containing(x).as_slice() {
        [j] => Ok(*j),
        [] => Err(BilliardError::non_classical("point in the interior")),
        many => Err(BilliardError::non_classical(format!(
            "point on a face of codimension {}",
            many.len()
        ))),
    }
}

/// Outward normal at `x` scaled onto the polar boundary.
pub fn normal_at<S: Scalar>(x: &[S], body: &Polytope<S>) -> Result<Vec<S>, BilliardError> {
    let j = unique_facet(x, body)?;
    Ok(body.facets()[j].normal.clone())
}

/// Exit of the ray `x + s·dir` (`s > 0`) from `body`, starting on facet `from`.
/// Returns the step and the unique exit facet.
fn exit_ray<S: Scalar>(x: &[S], dir: &[S], from: usize, body: &Polytope<S>) -> Result<(S, usize), BilliardError> {
    let rate_from = dot(&body.facets()[from].normal, dir);
    if rate_from.is_pos() {
        return Err(BilliardError::degenerate("direction points out of the starting facet"));
    }
    if rate_from.is_zero_tol() {
        return Err(BilliardError::degenerate("direction parallel to the starting facet"));
    }
    let mut best: Option<(S, usize)> = None;
    let mut tie = false;
    for (j, f) in body.facets().iter().enumerate() {
        if j == from {
            continue;
        }
        let rate = dot(&f.normal, dir);
        if !rate.is_pos() {
            continue;
        }
        let step = (S::one() - dot(&f.normal, x)) / rate;
        match &best {
            None => best = Some((step, j)),
            Some((s, _)) => {
                if step.approx_eq(s) {
                    tie = true;
                } else if step < *s {
                    best = Some((step, j));
                    tie = false;
                }
            }
        }
    }
    let (step, j) = best.ok_or_else(|| BilliardError::degenerate("ray never leaves the body"))?;
    if !step.is_pos() {
        return Err(BilliardError::degenerate("zero step"));
    }
    if tie {
        return Err(BilliardError::non_classical("exit through a face of codimension >= 2"));
    }
    Ok((step, j))
}

/// Momentum jump `p' = p - λ n_K(q)` with `p' ∈ ∂T`.
pub fn reflect_momentum<S: Scalar>(
    ph: &PhasePoint<S>,
    k: &Polytope<S>,
    t: &Polytope<S>,
) -> Result<(Vec<S>, usize, S), BilliardError> {
    let n = &k.facets()[ph.q_facet].normal;
    let minus_n: Vec<S> = n.iter().map(|x| -x.clone()).collect();
    let (lambda, facet) = exit_ray(&ph.p, &minus_n, ph.p_facet, t)?;
    let p_new = axpy(&ph.p, &lambda, &minus_n);
    Ok((p_new, facet, lambda))
}

/// Motion `q' = q + μ n_T(p')` with `q' ∈ ∂K`.
pub fn advance<S: Scalar>(
    q: &[S],
    q_facet: usize,
    p_new: &[S],
    p_facet: usize,
    k: &Polytope<S>,
    t: &Polytope<S>,
) -> Result<(Vec<S>, usize, S), BilliardError> {
    let v = &t.facets()[p_facet].normal;
    debug_assert_eq!(v.len(), p_new.len());
    let (mu, facet) = exit_ray(q, v, q_facet, k)?;
    Ok((axpy(q, &mu, v), facet, mu))
}

/// Arithmetic used by the simulator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Rational,
    Float,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown arithmetic mode `{0}` (expected `rational` or `float`)")]
pub struct UnknownMode(pub String);

impl std::str::FromStr for Mode {
    type Err = UnknownMode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rational" => Ok(Mode::Rational),
            "float" => Ok(Mode::Float),
            other => Err(UnknownMode(other.to_string())),
        }
    }
}

pub fn default_max_bounces(dim: usize) -> usize {
    4 * dim + 8
}

/// Runs the billiard until the start phase point recurs.
pub fn simulate<S: Scalar>(
    start: &PhasePoint<S>,
    k: &Polytope<S>,
    t: &Polytope<S>,
    max_bounces: usize,
) -> Result<TrajectoryRecord<S>, BilliardError> {
    let checked = PhasePoint::locate(start.q.clone(), start.p.clone(), k, t).map_err(|e| e.at(0))?;
    if checked.q_facet != start.q_facet || checked.p_facet != start.p_facet {
        return Err(BilliardError::non_classical("facet ids do not match the points"));
    }
    let mut bounces = vec![checked];
    let mut lambdas = Vec::new();
    let mut mus = Vec::new();
    let mut length = S::zero();
    for i in 0..max_bounces {
        let cur = bounces.last().expect("nonempty");
        let (p_new, pf, lambda) = reflect_momentum(cur, k, t).map_err(|e| e.at(i))?;
        let (q_new, qf, mu) = advance(&cur.q, cur.q_facet, &p_new, pf, k, t).map_err(|e| e.at(i))?;
        length = length + t.support(&sub(&q_new, &cur.q)).0;
        lambdas.push(lambda);
        mus.push(mu);
        let next = PhasePoint {
            q: q_new,
            p: p_new,
            q_facet: qf,
            p_facet: pf,
        };
        let closes = next.same_as(&bounces[0]);
        bounces.push(next);
        if closes {
            let period = i + 1;
            let simple = (0..period).all(|a| (a + 1..period).all(|b| !bounces[a].same_as(&bounces[b])));
            return Ok(TrajectoryRecord {
                bounces,
                closed: true,
                period,
                length_t: length,
                simple,
                lambdas,
                mus,
            });
        }
    }
    Err(BilliardError::NotClosed(max_bounces))
}

/// Uniform-ish rational point in the relative interior of facet `j`: positive
/// weights `n_i / 2^16` on the facet's vertices, normalized.
fn facet_point<S: Scalar, R: Rng>(body: &Polytope<S>, j: usize, rng: &mut R) -> Vec<S> {
    let verts = &body.facets()[j].vertices;
    let weights: Vec<i64> = verts.iter().map(|_| rng.gen_range(1..(1i64 << 16))).collect();
    let total: i64 = weights.iter().sum();
    let mut x = vec![S::zero(); body.dim()];
    for (&vi, &w) in verts.iter().zip(&weights) {
        x = axpy(&x, &S::from_ratio(w, total), &body.vertices()[vi]);
    }
    x
}

/// Random admissible classical start. Returns the start together with the
/// number of rejected draws.
pub fn random_start<S: Scalar, R: Rng>(
    k: &Polytope<S>,
    t: &Polytope<S>,
    rng: &mut R,
) -> (PhasePoint<S>, usize) {
    let mut rejected = 0;
    loop {
        let qf = rng.gen_range(0..k.facets().len());
        let pf = rng.gen_range(0..t.facets().len());
        let q = facet_point(k, qf, rng);
        let p = facet_point(t, pf, rng);
        let admissible = dot(&t.facets()[pf].normal, &k.facets()[qf].normal).is_pos();
        if admissible {
            if let Ok(ph) = PhasePoint::locate(q, p, k, t) {
                if ph.q_facet == qf && ph.p_facet == pf {
                    return (ph, rejected);
                }
            }
        }
        rejected += 1;
    }
}

#[derive(Serialize, Deserialize)]
struct PhaseJson {
    q: Vec<f64>,
    p: Vec<f64>,
    q_facet: usize,
    p_facet: usize,
}

#[derive(Serialize, Deserialize)]
struct TrajectoryJson {
    bounces: Vec<PhaseJson>,
    closed: bool,
    period: usize,
    length_t: f64,
    simple: bool,
    lambdas: Vec<f64>,
    mus: Vec<f64>,
    exact: bool,
}

impl<S: Scalar> TrajectoryRecord<S> {
    pub fn to_f64(&self) -> TrajectoryRecord<f64> {
        TrajectoryRecord {
            bounces: self
                .bounces
                .iter()
                .map(|b| PhasePoint {
                    q: to_f64_vec(&b.q),
                    p: to_f64_vec(&b.p),
                    q_facet: b.q_facet,
                    p_facet: b.p_facet,
                })
                .collect(),
            closed: self.closed,
            period: self.period,
            length_t: self.length_t.to_f64(),
            simple: self.simple,
            lambdas: to_f64_vec(&self.lambdas),
            mus: to_f64_vec(&self.mus),
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let f = self.to_f64();
        let j = TrajectoryJson {
            bounces: f
                .bounces
                .into_iter()
                .map(|b| PhaseJson {
                    q: b.q,
                    p: b.p,
                    q_facet: b.q_facet,
                    p_facet: b.p_facet,
                })
                .collect(),
            closed: f.closed,
            period: f.period,
            length_t: f.length_t,
            simple: f.simple,
            lambdas: f.lambdas,
            mus: f.mus,
            exact: S::EXACT,
        };
        serde_json::to_value(j).expect("plain data")
    }
}

impl TrajectoryRecord<f64> {
    pub fn from_json_value(v: serde_json::Value) -> Result<Self, serde_json::Error> {
        let j: TrajectoryJson = serde_json::from_value(v)?;
        Ok(TrajectoryRecord {
            bounces: j
                .bounces
                .into_iter()
                .map(|b| PhasePoint {
                    q: b.q,
                    p: b.p,
                    q_facet: b.q_facet,
                    p_facet: b.p_facet,
                })
                .collect(),
            closed: j.closed,
            period: j.period,
            length_t: j.length_t,
            simple: j.simple,
            lambdas: j.lambdas,
            mus: j.mus,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    fn square() -> Polytope<Q> {
        let v = [(1, 1), (-1, 1), (-1, -1), (1, -1)];
        Polytope::from_vertices(&v.iter().map(|&(a, b)| vec![q(a, 1), q(b, 1)]).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn normals_are_polar_vertices() {
        let sq = square();
        assert_eq!(normal_at(&[q(1, 1), q(3, 10)], &sq).unwrap(), vec![q(1, 1), q(0, 1)]);
        assert!(matches!(normal_at(&[q(1, 1), q(1, 1)], &sq), Err(BilliardError::NonClassical { .. })));
        let diamond = sq.polar();
        assert_eq!(normal_at(&[q(1, 2), q(1, 2)], &diamond).unwrap(), vec![q(1, 1), q(1, 1)]);
    }

    #[test]
    fn hand_stepped_square_orbit() {
        let k = square();
        let t = k.polar();
        let start = PhasePoint::locate(vec![q(1, 1), q(-1, 5)], vec![q(1, 2), q(1, 2)], &k, &t).unwrap();
        let (p1, pf, lambda) = reflect_momentum(&start, &k, &t).unwrap();
        assert_eq!((p1.clone(), lambda), (vec![q(-1, 2), q(1, 2)], q(1, 1)));
        let (q1, _, mu) = advance(&start.q, start.q_facet, &p1, pf, &k, &t).unwrap();
        assert_eq!((q1, mu), (vec![q(-1, 5), q(1, 1)], q(6, 5)));

        let rec = simulate(&start, &k, &t, default_max_bounces(2)).unwrap();
        assert!(rec.closed && rec.simple);
        assert_eq!(rec.period, 4);
        assert_eq!(rec.length_t, q(4, 1));
        for i in 0..2 {
            let neg: Vec<Q> = rec.bounces[i + 2].q.iter().map(|x| -x.clone()).collect();
            assert_eq!(rec.bounces[i].q, neg);
        }
    }

    #[test]
    fn inadmissible_start_is_degenerate_at_zero() {
        let k = square();
        let t = k.polar();
        let start = PhasePoint::locate(vec![q(1, 1), q(-1, 5)], vec![q(-1, 2), q(1, 2)], &k, &t).unwrap();
        assert!(matches!(
            simulate(&start, &k, &t, 16),
            Err(BilliardError::Degenerate { bounce: 0, .. })
        ));
    }
}
