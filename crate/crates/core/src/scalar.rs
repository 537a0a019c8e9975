//! Scalar abstraction shared by the floating and exact-rational code paths.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

/// Global predicate tolerance for floating-point polytope predicates.
pub const EPS: f64 = 1e-9;

/// Ordered field used by the polytope and billiard code.
///
/// Floating point compares with the absolute tolerance [`EPS`]; rationals
/// compare exactly.
pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;

    /// Sign with the predicate tolerance applied.
    fn sign(&self) -> Ordering;

    fn is_zero_tol(&self) -> bool {
        self.sign() == Ordering::Equal
    }
    fn is_pos(&self) -> bool {
        self.sign() == Ordering::Greater
    }
    fn is_neg(&self) -> bool {
        self.sign() == Ordering::Less
    }
    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_zero_tol()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sign(&self) -> Ordering {
        if *self > EPS {
            Ordering::Greater
        } else if *self < -EPS {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        BigRational::from_integer(BigInt::from(1))
    }
    /// Exact conversion of the binary value.
    fn from_f64(x: f64) -> Self {
        <BigRational as FromPrimitive>::from_f64(x).expect("finite coordinate")
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn sign(&self) -> Ordering {
        self.cmp(&<BigRational as Zero>::zero())
    }
}

/// The rational whose decimal expansion is the shortest round-trip form of
/// `x`, provided it has at most `max_digits` significant digits. `0.1` maps
/// to `1/10` rather than to its binary value.
pub fn decimal_rational(x: f64, max_digits: usize) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let text = format!("{x}");
    let (neg, body) = text.strip_prefix('-').map_or((false, text.as_str()), |b| (true, b));
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let digits = format!("{int}{frac}");
    let significant = digits.trim_start_matches('0').len();
    if significant > max_digits {
        return None;
    }
    let num: BigInt = digits.parse().ok()?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let r = BigRational::new(num, den);
    Some(if neg { -r } else { r })
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn sub<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn add<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn scale<S: Scalar>(a: &[S], s: &S) -> Vec<S> {
    a.iter().map(|x| x.clone() * s.clone()).collect()
}

/// `a + s * b`
pub fn axpy<S: Scalar>(a: &[S], s: &S, b: &[S]) -> Vec<S> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.clone() + s.clone() * y.clone())
        .collect()
}

pub fn vec_approx_eq<S: Scalar>(a: &[S], b: &[S]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.approx_eq(y))
}

pub fn to_f64_vec<S: Scalar>(a: &[S]) -> Vec<f64> {
    a.iter().map(Scalar::to_f64).collect()
}

pub fn from_f64_vec<S: Scalar>(a: &[f64]) -> Vec<S> {
    a.iter().map(|&x| S::from_f64(x)).collect()
}

pub fn norm2(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Gaussian elimination on a square system. Returns `None` when singular.
pub fn solve<S: Scalar>(mut a: Vec<Vec<S>>, mut b: Vec<S>) -> Option<Vec<S>> {
    let n = b.len();
    for col in 0..n {
        let pivot = pick_pivot(&a, col, col)?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            if a[row][col].is_zero_tol() && S::EXACT {
                continue;
            }
            let f = a[row][col].clone() / a[col][col].clone();
            for k in col..n {
                let v = a[col][k].clone();
                a[row][k] = a[row][k].clone() - f.clone() * v;
            }
            let v = b[col].clone();
            b[row] = b[row].clone() - f * v;
        }
    }
    let mut x = vec![S::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for k in row + 1..n {
            acc = acc - a[row][k].clone() * x[k].clone();
        }
        x[row] = acc / a[row][row].clone();
    }
    Some(x)
}

fn pick_pivot<S: Scalar>(a: &[Vec<S>], col: usize, from: usize) -> Option<usize> {
    if S::EXACT {
        (from..a.len()).find(|&r| !a[r][col].is_zero_tol())
    } else {
        let best = (from..a.len()).max_by(|&r, &s| {
            a[r][col]
                .abs()
                .partial_cmp(&a[s][col].abs())
                .unwrap_or(Ordering::Equal)
        })?;
        // Tighter than EPS: row entries here are differences of coordinates.
        if a[best][col].to_f64().abs() < 1e-13 {
            None
        } else {
            Some(best)
        }
    }
}

/// Row-reduces `rows` in place and returns the pivot columns.
fn rref<S: Scalar>(rows: &mut [Vec<S>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = pick_pivot(rows, col, r) else {
            continue;
        };
        rows.swap(r, p);
        let inv = S::one() / rows[r][col].clone();
        for k in 0..ncols {
            rows[r][k] = rows[r][k].clone() * inv.clone();
        }
        for i in 0..rows.len() {
            if i != r {
                let f = rows[i][col].clone();
                for k in 0..ncols {
                    let v = rows[r][k].clone();
                    rows[i][k] = rows[i][k].clone() - f.clone() * v;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

pub fn rank<S: Scalar>(rows: &[Vec<S>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// A nonzero vector orthogonal to every row, provided the rows have rank
/// exactly `ncols - 1`.
pub fn null_vector<S: Scalar>(rows: &[Vec<S>], ncols: usize) -> Option<Vec<S>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    if pivots.len() + 1 != ncols {
        return None;
    }
    let free = (0..ncols).find(|c| !pivots.contains(c))?;
    let mut x = vec![S::zero(); ncols];
    x[free] = S::one();
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = -m[r][free].clone();
    }
    Some(x)
}
