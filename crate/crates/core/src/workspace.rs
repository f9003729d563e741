//! Scalars and vectors over finite-dimensional and truncated sequence spaces.
//!
//! Two scalar types implement [`Scalar`]: `f64` and [`BigRational`]. Vectors
//! are either dense (coordinates `1..=d`) or sparse (a map from 1-based
//! coordinate index to a nonzero value). Dense and sparse vectors mix by
//! index alignment: dense coordinate `j` is sparse index `j`.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Arithmetic used for terms and sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalarMode {
    #[default]
    Float64,
    ExactRational,
}

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const MODE: ScalarMode;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn abs(&self) -> Self;
    fn as_f64(&self) -> f64;

    /// Exact conversion. Fails on non-finite input.
    fn from_f64(x: f64) -> Result<Self>;

    fn from_ratio(num: i64, den: u64) -> Self;

    /// Exact for rationals, correctly rounded for floats.
    fn from_rational(q: &BigRational) -> Self;

    /// `n^(-alpha)`. Exact scalars require a nonnegative integer `alpha`.
    fn reciprocal_power(n: u64, alpha: f64) -> Result<Self>;

    /// One step of compensated accumulation: adds `x` into `(sum, comp)`.
    /// Exact scalars simply add.
    fn compensated_add(sum: &mut Self, comp: &mut Self, x: Self) {
        let _ = comp;
        *sum = sum.clone() + x;
    }

    /// Value of a compensated accumulator.
    fn compensated_total(sum: &Self, comp: &Self) -> Self {
        sum.clone() + comp.clone()
    }

    fn signum(&self) -> i8;
}

impl Scalar for f64 {
    const MODE: ScalarMode = ScalarMode::Float64;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn as_f64(&self) -> f64 {
        *self
    }
    fn from_f64(x: f64) -> Result<Self> {
        if x.is_finite() {
            Ok(x)
        } else {
            Err(invalid(format!("non-finite scalar {x}")))
        }
    }
    fn from_ratio(num: i64, den: u64) -> Self {
        num as f64 / den as f64
    }
    fn from_rational(q: &BigRational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }
    fn reciprocal_power(n: u64, alpha: f64) -> Result<Self> {
        Ok((n as f64).powf(-alpha))
    }

    // Neumaier's variant of Kahan summation.
    fn compensated_add(sum: &mut Self, comp: &mut Self, x: Self) {
        let t = *sum + x;
        if sum.abs() >= x.abs() {
            *comp += (*sum - t) + x;
        } else {
            *comp += (x - t) + *sum;
        }
        *sum = t;
    }

    fn compensated_total(sum: &Self, comp: &Self) -> Self {
        sum + comp
    }

    fn signum(&self) -> i8 {
        if *self > 0.0 {
            1
        } else if *self < 0.0 {
            -1
        } else {
            0
        }
    }
}

impl Scalar for BigRational {
    const MODE: ScalarMode = ScalarMode::ExactRational;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn from_f64(x: f64) -> Result<Self> {
        BigRational::from_float(x).ok_or_else(|| invalid(format!("non-finite scalar {x}")))
    }
    fn from_ratio(num: i64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }
    fn reciprocal_power(n: u64, alpha: f64) -> Result<Self> {
        if alpha < 0.0 || alpha.fract() != 0.0 || alpha > u32::MAX as f64 {
            return Err(Error::IncompatibleMode(format!(
                "exponent {alpha} is not a nonnegative integer; n^-alpha is not rational"
            )));
        }
        let den = num_traits::pow(BigInt::from(n), alpha as usize);
        Ok(BigRational::new(BigInt::one(), den))
    }
    fn signum(&self) -> i8 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }
}

/// Parses a decimal (`-1.25`, `3e-4`) or fraction (`1/3`) literal exactly.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(BigRational::new(num, den));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = all_digits.parse().ok()?;
    if negative {
        num = -num;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Some(value)
}

/// Parses a scalar literal in the requested arithmetic.
pub fn parse_scalar<S: Scalar>(text: &str) -> Option<S> {
    match S::MODE {
        ScalarMode::Float64 if !text.contains('/') => S::from_f64(text.trim().parse().ok()?).ok(),
        _ => Some(S::from_rational(&parse_rational(text)?)),
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "lowercase")]
enum Repr<S> {
    Dense(Vec<S>),
    Sparse(BTreeMap<usize, S>),
}

/// A vector with 1-based coordinates.
///
/// Sparse vectors never store zeros. Equality compares nonzero entries by
/// index, plus the dimension when both sides are dense.
#[derive(Debug, Clone, Serialize)]
#[serde(transparent)]
pub struct Vector<S = f64> {
    repr: Repr<S>,
}

impl<S: Scalar> Vector<S> {
    /// The empty sparse vector.
    pub fn zero() -> Self {
        Vector {
            repr: Repr::Sparse(BTreeMap::new()),
        }
    }

    pub fn dense(coords: Vec<S>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Shape("dense vectors need dim >= 1".into()));
        }
        Ok(Vector {
            repr: Repr::Dense(coords),
        })
    }

    /// A one-dimensional vector holding `x`.
    pub fn scalar(x: S) -> Self {
        Vector {
            repr: Repr::Dense(vec![x]),
        }
    }

    /// Builds a sparse vector; zero values are dropped and repeated indices
    /// are summed.
    pub fn sparse<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, S)>,
    {
        let mut map: BTreeMap<usize, S> = BTreeMap::new();
        for (index, value) in entries {
            if index == 0 {
                return Err(Error::Shape("coordinate indices start at 1".into()));
            }
            let slot = map.entry(index).or_insert_with(S::zero);
            *slot = slot.clone() + value;
        }
        map.retain(|_, v| !v.is_zero());
        Ok(Vector {
            repr: Repr::Sparse(map),
        })
    }

    /// `scale * e_index`.
    pub fn basis(index: usize, scale: S) -> Self {
        assert!(index >= 1, "coordinate indices start at 1");
        let mut map = BTreeMap::new();
        if !scale.is_zero() {
            map.insert(index, scale);
        }
        Vector {
            repr: Repr::Sparse(map),
        }
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.repr, Repr::Dense(_))
    }

    /// Dense dimension, `None` for sparse vectors.
    pub fn dim(&self) -> Option<usize> {
        match &self.repr {
            Repr::Dense(c) => Some(c.len()),
            Repr::Sparse(_) => None,
        }
    }

    /// Coordinate `index` (1-based); zero outside the support.
    pub fn get(&self, index: usize) -> S {
        match &self.repr {
            Repr::Dense(c) => index
                .checked_sub(1)
                .and_then(|i| c.get(i))
                .cloned()
                .unwrap_or_else(S::zero),
            Repr::Sparse(m) => m.get(&index).cloned().unwrap_or_else(S::zero),
        }
    }

    /// Nonzero entries in increasing index order.
    pub fn entries(&self) -> Box<dyn Iterator<Item = (usize, &S)> + '_> {
        match &self.repr {
            Repr::Dense(c) => Box::new(
                c.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(i, v)| (i + 1, v)),
            ),
            Repr::Sparse(m) => Box::new(m.iter().map(|(i, v)| (*i, v))),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries().next().is_none()
    }

    /// Largest index carrying a nonzero value.
    pub fn max_index(&self) -> Option<usize> {
        self.entries().last().map(|(i, _)| i)
    }

    /// Number of nonzero entries.
    pub fn support_len(&self) -> usize {
        self.entries().count()
    }

    /// ℓ^p norm for `p` in `[1, ∞]`.
    ///
    /// For exact scalars, `p = 1` and `p = ∞` are computed exactly and
    /// rounded once; `p = 2` sums squares exactly before the square root.
    pub fn norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(invalid(format!("norm exponent p = {p} must be >= 1")));
        }
        if p == f64::INFINITY {
            return Ok(match S::MODE {
                ScalarMode::Float64 => self.entries().map(|(_, v)| v.as_f64().abs()).fold(0.0, f64::max),
                ScalarMode::ExactRational => self
                    .entries()
                    .map(|(_, v)| v.abs())
                    .fold(S::zero(), |m, a| if (a.clone() - m.clone()).signum() > 0 { a } else { m })
                    .as_f64(),
            });
        }
        if S::MODE == ScalarMode::ExactRational && (p == 1.0 || p == 2.0) {
            let mut acc = S::zero();
            for (_, v) in self.entries() {
                acc = acc + if p == 1.0 { v.abs() } else { v.clone() * v.clone() };
            }
            let total = acc.as_f64();
            return Ok(if p == 1.0 { total } else { total.sqrt() });
        }
        Ok(lp_norm_f64(self.entries().map(|(_, v)| v.as_f64()), p))
    }

    /// Inner product by index alignment.
    pub fn inner(&self, other: &Vector<S>) -> Result<S> {
        self.check_compatible(other)?;
        let (small, large) = if self.support_len() <= other.support_len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = S::zero();
        for (i, v) in small.entries() {
            let w = large.get(i);
            if !w.is_zero() {
                acc = acc + v.clone() * w;
            }
        }
        Ok(acc)
    }

    pub fn scale(&self, c: &S) -> Vector<S> {
        if c.is_zero() {
            return match &self.repr {
                Repr::Dense(v) => Vector {
                    repr: Repr::Dense(vec![S::zero(); v.len()]),
                },
                Repr::Sparse(_) => Vector::zero(),
            };
        }
        let repr = match &self.repr {
            Repr::Dense(v) => Repr::Dense(v.iter().map(|x| x.clone() * c.clone()).collect()),
            Repr::Sparse(m) => Repr::Sparse(
                m.iter()
                    .map(|(i, x)| (*i, x.clone() * c.clone()))
                    .filter(|(_, x)| !x.is_zero())
                    .collect(),
            ),
        };
        Vector { repr }
    }

    pub fn add(&self, other: &Vector<S>) -> Result<Vector<S>> {
        combine(&[(S::one(), self), (S::one(), other)])
    }

    pub fn sub(&self, other: &Vector<S>) -> Result<Vector<S>> {
        combine(&[(S::one(), self), (-S::one(), other)])
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Vector<T> {
        let repr = match &self.repr {
            Repr::Dense(v) => Repr::Dense(v.iter().map(&f).collect()),
            Repr::Sparse(m) => Repr::Sparse(
                m.iter()
                    .map(|(i, x)| (*i, f(x)))
                    .filter(|(_, x)| !x.is_zero())
                    .collect(),
            ),
        };
        Vector { repr }
    }

    pub fn to_f64(&self) -> Vector<f64> {
        self.map(|x| x.as_f64())
    }

    /// Dense coordinates `1..=dim`, padding with zeros.
    pub fn to_dense_vec(&self, dim: usize) -> Result<Vec<S>> {
        if let Some(max) = self.max_index() {
            if max > dim {
                return Err(Error::Shape(format!("index {max} exceeds dimension {dim}")));
            }
        }
        let mut out = vec![S::zero(); dim];
        for (i, v) in self.entries() {
            out[i - 1] = v.clone();
        }
        Ok(out)
    }

    fn check_compatible(&self, other: &Vector<S>) -> Result<()> {
        match (self.dim(), other.dim()) {
            (Some(a), Some(b)) if a != b => Err(Error::Shape(format!("dense dimensions {a} and {b} differ"))),
            (Some(d), None) | (None, Some(d)) => {
                let sparse = if self.is_dense() { other } else { self };
                match sparse.max_index() {
                    Some(max) if max > d => Err(Error::Shape(format!(
                        "sparse index {max} exceeds dense dimension {d}"
                    ))),
                    _ => Ok(()),
                }
            }
            _ => Ok(()),
        }
    }
}

pub(crate) fn lp_norm_f64(values: impl Iterator<Item = f64>, p: f64) -> f64 {
    if p == f64::INFINITY {
        return values.fold(0.0, |m, v| m.max(v.abs()));
    }
    // Scale by the largest magnitude to avoid overflow/underflow.
    let values: Vec<f64> = values.map(f64::abs).collect();
    let scale = values.iter().cloned().fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in &values {
        let r = v / scale;
        let term = if p == 1.0 {
            r
        } else if p == 2.0 {
            r * r
        } else {
            r.powf(p)
        };
        f64::compensated_add(&mut sum, &mut comp, term);
    }
    let total = sum + comp;
    scale
        * if p == 1.0 {
            total
        } else if p == 2.0 {
            total.sqrt()
        } else {
            total.powf(1.0 / p)
        }
}

impl<S: Scalar> PartialEq for Vector<S> {
    fn eq(&self, other: &Self) -> bool {
        if let (Some(a), Some(b)) = (self.dim(), other.dim()) {
            if a != b {
                return false;
            }
        }
        self.entries().eq(other.entries())
    }
}

/// `Σ c_i v_i`. Exact scalars never round. The result is dense when any
/// input is dense.
pub fn combine<S: Scalar>(ops: &[(S, &Vector<S>)]) -> Result<Vector<S>> {
    let mut dense_dim: Option<usize> = None;
    for (_, v) in ops {
        if let Some(d) = v.dim() {
            match dense_dim {
                Some(prev) if prev != d => {
                    return Err(Error::Shape(format!("dense dimensions {prev} and {d} differ")));
                }
                _ => dense_dim = Some(d),
            }
        }
    }
    match dense_dim {
        Some(d) => {
            let mut out = vec![S::zero(); d];
            for (c, v) in ops {
                for (i, x) in v.entries() {
                    if i > d {
                        return Err(Error::Shape(format!("sparse index {i} exceeds dense dimension {d}")));
                    }
                    out[i - 1] = out[i - 1].clone() + c.clone() * x.clone();
                }
            }
            Vector::dense(out)
        }
        None => Vector::sparse(
            ops.iter()
                .flat_map(|(c, v)| v.entries().map(move |(i, x)| (i, c.clone() * x.clone()))),
        ),
    }
}

/// Accumulates vectors coordinate-wise, with one compensated accumulator
/// per coordinate when `compensated` is set.
#[derive(Debug, Clone)]
pub struct VectorAccumulator<S: Scalar> {
    compensated: bool,
    dense_dim: Option<usize>,
    slots: BTreeMap<usize, (S, S)>,
}

impl<S: Scalar> VectorAccumulator<S> {
    pub fn new(compensated: bool) -> Self {
        VectorAccumulator {
            compensated,
            dense_dim: None,
            slots: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, v: &Vector<S>) -> Result<()> {
        self.add_scaled(None, v)
    }

    /// Adds `c * v` (or `v` when `c` is `None`).
    pub fn add_scaled(&mut self, c: Option<&S>, v: &Vector<S>) -> Result<()> {
        if let Some(d) = v.dim() {
            match self.dense_dim {
                Some(prev) if prev != d => {
                    return Err(Error::Shape(format!("dense dimensions {prev} and {d} differ")));
                }
                _ => self.dense_dim = Some(d),
            }
        }
        for (i, x) in v.entries() {
            let x = match c {
                Some(c) => c.clone() * x.clone(),
                None => x.clone(),
            };
            self.add_coordinate(i, x);
        }
        Ok(())
    }

    pub fn add_coordinate(&mut self, index: usize, x: S) {
        let slot = self.slots.entry(index).or_insert_with(|| (S::zero(), S::zero()));
        if self.compensated {
            S::compensated_add(&mut slot.0, &mut slot.1, x);
        } else {
            slot.0 = slot.0.clone() + x;
        }
    }

    /// ℓ² norm of the current total.
    pub fn current_norm2(&self) -> f64 {
        lp_norm_f64(
            self.slots.values().map(|(s, c)| S::compensated_total(s, c).as_f64()),
            2.0,
        )
    }

    /// Marks the result as dense of dimension `d` even if no term arrived.
    pub fn set_dense_dim(&mut self, d: usize) {
        self.dense_dim = Some(d);
    }

    pub fn finish(self) -> Result<Vector<S>> {
        let entries = self
            .slots
            .into_iter()
            .map(|(i, (s, c))| (i, S::compensated_total(&s, &c)));
        match self.dense_dim {
            Some(d) => {
                let mut out = vec![S::zero(); d];
                for (i, v) in entries {
                    if i > d {
                        return Err(Error::Shape(format!("index {i} exceeds dense dimension {d}")));
                    }
                    out[i - 1] = v;
                }
                Vector::dense(out)
            }
            None => Vector::sparse(entries),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: u64) -> BigRational {
        BigRational::from_ratio(n, d)
    }

    #[test]
    fn norm_examples() {
        assert_eq!(Vector::<f64>::zero().norm(2.0).unwrap(), 0.0);
        let v = Vector::dense(vec![3.0, 4.0]).unwrap();
        assert_eq!(v.norm(2.0).unwrap(), 5.0);
        assert_eq!(v.norm(f64::INFINITY).unwrap(), 4.0);
        assert_eq!(v.norm(1.0).unwrap(), 7.0);

        // 1 + 1/2 + 1/3 = 11/6
        let s = Vector::sparse([(1, q(1, 1)), (2, q(1, 2)), (3, q(1, 3))]).unwrap();
        assert_eq!(s.norm(1.0).unwrap(), 11.0 / 6.0);
        let sf = s.to_f64();
        assert!((sf.norm(1.0).unwrap() - 11.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn norm_rejects_small_p() {
        let v = Vector::scalar(1.0);
        assert!(matches!(v.norm(0.5), Err(Error::InvalidParameter(_))));
        assert!(matches!(v.norm(f64::NAN), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn inner_examples() {
        let e1 = Vector::basis(1, 1.0);
        let e2 = Vector::basis(2, 1.0);
        assert_eq!(e1.inner(&e2).unwrap(), 0.0);
        let a = Vector::dense(vec![1.0, 2.0]).unwrap();
        let b = Vector::dense(vec![3.0, 4.0]).unwrap();
        assert_eq!(a.inner(&b).unwrap(), 11.0);

        // Partial Basel sum, brute force: Σ_{n≤10} 1/n² = 1.5497677311665407
        let v = Vector::sparse((1..=10).map(|n| (n, q(1, n as u64)))).unwrap();
        let exact = v.inner(&v).unwrap();
        let oracle: BigRational = (1..=10u64).map(|n| q(1, n * n)).sum();
        assert_eq!(exact, oracle);
        assert!((exact.as_f64() - 1.549_767_731_166_540_7).abs() < 1e-15);
    }

    #[test]
    fn inner_mixed_and_mismatch() {
        let d = Vector::dense(vec![1.0, 2.0, 3.0]).unwrap();
        let s = Vector::sparse([(3, 2.0)]).unwrap();
        assert_eq!(d.inner(&s).unwrap(), 6.0);
        let e = Vector::dense(vec![1.0, 2.0]).unwrap();
        assert!(matches!(d.inner(&e), Err(Error::Shape(_))));
        let far = Vector::sparse([(7, 1.0)]).unwrap();
        assert!(matches!(d.inner(&far), Err(Error::Shape(_))));
    }

    #[test]
    fn combine_examples() {
        let v = Vector::dense(vec![1.0, -2.0]).unwrap();
        assert_eq!(combine(&[(1.0, &v)]).unwrap(), v);

        let e1 = Vector::basis(1, q(1, 1));
        let z = combine(&[(q(1, 1), &e1), (q(-1, 1), &e1)]).unwrap();
        assert!(z.is_zero());
        assert_eq!(z, Vector::zero());

        let a = Vector::dense(vec![2.0, 0.0]).unwrap();
        let b = Vector::dense(vec![0.0, 2.0]).unwrap();
        let c = combine(&[(0.5, &a), (0.5, &b)]).unwrap();
        assert_eq!(c, Vector::dense(vec![1.0, 1.0]).unwrap());
    }

    #[test]
    fn sparse_drops_zeros() {
        let v = Vector::sparse([(1, 0.0), (2, 1.0), (2, -1.0), (3, 5.0)]).unwrap();
        assert_eq!(v.support_len(), 1);
        assert_eq!(v.get(3), 5.0);
        assert!(Vector::<f64>::sparse([(0, 1.0)]).is_err());
        assert!(Vector::<f64>::dense(vec![]).is_err());
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("1/3"), Some(q(1, 3)));
        assert_eq!(parse_rational("-0.25"), Some(q(-1, 4)));
        assert_eq!(parse_rational("1.5e2"), Some(q(150, 1)));
        assert_eq!(parse_rational("3e-3"), Some(q(3, 1000)));
        assert_eq!(parse_rational(".5"), Some(q(1, 2)));
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_scalar::<f64>("1/4"), Some(0.25));
        assert_eq!(parse_scalar::<BigRational>("0.1"), Some(q(1, 10)));
    }

    #[test]
    fn rational_reciprocal_power_needs_integer_exponent() {
        assert_eq!(BigRational::reciprocal_power(3, 2.0).unwrap(), q(1, 9));
        assert!(matches!(
            BigRational::reciprocal_power(3, 1.5),
            Err(Error::IncompatibleMode(_))
        ));
    }

    #[test]
    fn compensated_accumulator_recovers_small_terms() {
        let mut acc = VectorAccumulator::<f64>::new(true);
        for x in [1e16, 1.0, -1e16, 1.0] {
            acc.add(&Vector::scalar(x)).unwrap();
        }
        assert_eq!(acc.finish().unwrap().get(1), 2.0);
    }

    #[test]
    fn exact_infinity_norm() {
        let v = Vector::sparse([(1, q(-7, 3)), (4, q(2, 1))]).unwrap();
        assert_eq!(v.norm(f64::INFINITY).unwrap(), 7.0 / 3.0);
    }
}
