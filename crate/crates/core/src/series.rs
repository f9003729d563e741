//! Term generators, permutations and partial sums.
//!
//! Partial sums can be evaluated with four strategies. `Naive` adds left to
//! right, `Compensated` keeps a Neumaier error term per coordinate,
//! `Pairwise` associates along a balanced binary tree, and `ExactRational`
//! adds big rationals with no rounding at all.
//!
//! [`partial_sum_parallel`] splits the identity order into chunks. Pairwise
//! and compensated chunk results are merged so that their error bounds carry
//! over; naive chunks are merged left to right, which changes the
//! association and therefore the rounding compared to a sequential naive sum.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::{seeded_sign, stream_rng};
use crate::workspace::{parse_rational, Scalar, ScalarMode, Vector, VectorAccumulator};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SignSource {
    /// Signs for `n = 1..=len`; later indices are out of range.
    Explicit { signs: Vec<i8> },
    /// Pseudorandom signs, random access by index.
    Seeded { seed: u64 },
    /// `(-1)^n`.
    Alternating,
}

impl SignSource {
    pub fn sign(&self, n: usize) -> Result<i8> {
        match self {
            SignSource::Explicit { signs } => match signs.get(n - 1) {
                Some(&s) if s == 1 || s == -1 => Ok(s),
                Some(&s) => Err(invalid(format!("sign {s} at index {n} is not ±1"))),
                None => Err(Error::ExhaustedStream {
                    index: n,
                    len: signs.len(),
                }),
            },
            SignSource::Seeded { seed } => Ok(seeded_sign(*seed, n as u64)),
            SignSource::Alternating => Ok(if n % 2 == 0 { 1 } else { -1 }),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            SignSource::Seeded { seed } => Some(*seed),
            _ => None,
        }
    }
}

/// Terms read from a file: one term per line, `index` followed by
/// `coordinate:value` pairs, or by a single bare value for a scalar series.
/// Blank lines and `#` comments are ignored. Values may be decimals or
/// fractions (`1/3`) and are kept exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct TermTable {
    pub path: Option<PathBuf>,
    scalar: bool,
    len: usize,
    terms: BTreeMap<usize, Vec<(usize, BigRational)>>,
}

impl TermTable {
    pub fn parse<R: Read>(reader: R) -> Result<Self> {
        let mut terms = BTreeMap::new();
        let mut scalar: Option<bool> = None;
        for (lineno, line) in BufReader::new(reader).lines().enumerate() {
            let line = line?;
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: lineno + 1,
                message,
            };
            let mut fields = line.split_whitespace();
            let index: usize = fields
                .next()
                .and_then(|f| f.parse().ok())
                .filter(|&i| i >= 1)
                .ok_or_else(|| parse_err("expected a positive term index".into()))?;
            let mut entries = Vec::new();
            let mut line_scalar = None;
            for field in fields {
                let is_pair = field.contains(':');
                if *line_scalar.get_or_insert(!is_pair) == is_pair {
                    return Err(parse_err("mixes bare values and coordinate pairs".into()));
                }
                if is_pair {
                    let (coord, value) = field.split_once(':').unwrap();
                    let coord: usize = coord
                        .parse()
                        .ok()
                        .filter(|&c| c >= 1)
                        .ok_or_else(|| parse_err(format!("bad coordinate in {field:?}")))?;
                    let value =
                        parse_rational(value).ok_or_else(|| parse_err(format!("bad value in {field:?}")))?;
                    entries.push((coord, value));
                } else {
                    if !entries.is_empty() {
                        return Err(parse_err("scalar terms take a single value".into()));
                    }
                    let value =
                        parse_rational(field).ok_or_else(|| parse_err(format!("bad value {field:?}")))?;
                    entries.push((1, value));
                }
            }
            let line_scalar = line_scalar.unwrap_or(false);
            if let Some(prev) = scalar {
                if prev != line_scalar && !entries.is_empty() {
                    return Err(parse_err("file mixes scalar and vector terms".into()));
                }
            } else if !entries.is_empty() {
                scalar = Some(line_scalar);
            }
            if terms.insert(index, entries).is_some() {
                return Err(parse_err(format!("duplicate term index {index}")));
            }
        }
        let len = terms.keys().next_back().copied().unwrap_or(0);
        Ok(TermTable {
            path: None,
            scalar: scalar.unwrap_or(true),
            len,
            terms,
        })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut table = Self::parse(File::open(path)?)?;
        table.path = Some(path.to_path_buf());
        Ok(table)
    }

    /// Largest index in the file; later terms are out of range.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_scalar(&self) -> bool {
        self.scalar
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SeriesFamily {
    /// `(-1)^n / n`.
    AlternatingHarmonic,
    /// `1 / n`.
    Harmonic,
    /// `n^{-alpha} e_n`.
    CoordinateDecay { alpha: f64 },
    /// `ε_n n^{-alpha} e_n`.
    SignedCoordinate { signs: SignSource, alpha: f64 },
    FromFile(Arc<TermTable>),
}

/// Single-term shapes; built-in families produce the first two.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Term<S: Scalar> {
    Scalar(S),
    Coordinate(usize, S),
    General(Vector<S>),
}

impl<S: Scalar> Term<S> {
    pub(crate) fn into_vector(self) -> Vector<S> {
        match self {
            Term::Scalar(x) => Vector::scalar(x),
            Term::Coordinate(i, x) => Vector::basis(i, x),
            Term::General(v) => v,
        }
    }

    pub(crate) fn norm2(&self) -> f64 {
        match self {
            Term::Scalar(x) | Term::Coordinate(_, x) => x.as_f64().abs(),
            Term::General(v) => v.norm(2.0).unwrap_or(f64::NAN),
        }
    }

    pub(crate) fn scaled(self, c: &S) -> Term<S> {
        match self {
            Term::Scalar(x) => Term::Scalar(x * c.clone()),
            Term::Coordinate(i, x) => Term::Coordinate(i, x * c.clone()),
            Term::General(v) => Term::General(v.scale(c)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSpec {
    pub family: SeriesFamily,
    pub scalar_mode: ScalarMode,
}

impl SeriesSpec {
    pub fn new(family: SeriesFamily) -> Self {
        SeriesSpec {
            family,
            scalar_mode: ScalarMode::Float64,
        }
    }

    pub fn alternating_harmonic() -> Self {
        Self::new(SeriesFamily::AlternatingHarmonic)
    }

    pub fn harmonic() -> Self {
        Self::new(SeriesFamily::Harmonic)
    }

    pub fn coordinate_decay(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid(format!("coordinate decay exponent {alpha} must be > 0")));
        }
        Ok(Self::new(SeriesFamily::CoordinateDecay { alpha }))
    }

    pub fn signed_coordinate(signs: SignSource, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid(format!("coordinate decay exponent {alpha} must be > 0")));
        }
        Ok(Self::new(SeriesFamily::SignedCoordinate { signs, alpha }))
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Ok(Self::new(SeriesFamily::FromFile(Arc::new(TermTable::from_path(path)?))))
    }

    pub fn from_table(table: TermTable) -> Self {
        Self::new(SeriesFamily::FromFile(Arc::new(table)))
    }

    pub fn with_mode(mut self, mode: ScalarMode) -> Self {
        self.scalar_mode = mode;
        self
    }

    pub fn exact(self) -> Self {
        self.with_mode(ScalarMode::ExactRational)
    }

    /// True when every term is a one-dimensional vector.
    pub fn is_scalar(&self) -> bool {
        match &self.family {
            SeriesFamily::AlternatingHarmonic | SeriesFamily::Harmonic => true,
            SeriesFamily::CoordinateDecay { .. } | SeriesFamily::SignedCoordinate { .. } => false,
            SeriesFamily::FromFile(t) => t.is_scalar(),
        }
    }

    /// True when term `n` is supported on coordinate `n` alone, so distinct
    /// terms are orthogonal.
    pub fn has_disjoint_coordinate_supports(&self) -> bool {
        matches!(
            self.family,
            SeriesFamily::CoordinateDecay { .. } | SeriesFamily::SignedCoordinate { .. }
        )
    }

    /// Number of available terms; `None` for unbounded generators.
    pub fn len(&self) -> Option<usize> {
        match &self.family {
            SeriesFamily::FromFile(t) => Some(t.len()),
            SeriesFamily::SignedCoordinate {
                signs: SignSource::Explicit { signs },
                ..
            } => Some(signs.len()),
            _ => None,
        }
    }

    /// Short family name used in reports.
    pub fn name(&self) -> String {
        match &self.family {
            SeriesFamily::AlternatingHarmonic => "alternating-harmonic".into(),
            SeriesFamily::Harmonic => "harmonic".into(),
            SeriesFamily::CoordinateDecay { alpha } => format!("coordinate-decay(alpha={alpha})"),
            SeriesFamily::SignedCoordinate { alpha, signs } => match signs {
                SignSource::Seeded { seed } => format!("signed-coordinate(alpha={alpha}, seed={seed})"),
                SignSource::Alternating => format!("signed-coordinate(alpha={alpha}, alternating)"),
                SignSource::Explicit { signs } => {
                    format!("signed-coordinate(alpha={alpha}, explicit[{}])", signs.len())
                }
            },
            SeriesFamily::FromFile(t) => match &t.path {
                Some(p) => format!("file({})", p.display()),
                None => "file".into(),
            },
        }
    }

    pub(crate) fn term_parts<S: Scalar>(&self, n: usize) -> Result<Term<S>> {
        if n == 0 {
            return Err(invalid("term indices start at 1"));
        }
        Ok(match &self.family {
            SeriesFamily::AlternatingHarmonic => {
                let sign = if n % 2 == 0 { 1 } else { -1 };
                Term::Scalar(S::from_ratio(sign, n as u64))
            }
            SeriesFamily::Harmonic => Term::Scalar(S::from_ratio(1, n as u64)),
            SeriesFamily::CoordinateDecay { alpha } => {
                Term::Coordinate(n, S::reciprocal_power(n as u64, *alpha)?)
            }
            SeriesFamily::SignedCoordinate { signs, alpha } => {
                let mag = S::reciprocal_power(n as u64, *alpha)?;
                let value = if signs.sign(n)? < 0 { -mag } else { mag };
                Term::Coordinate(n, value)
            }
            SeriesFamily::FromFile(t) => {
                if n > t.len {
                    return Err(Error::ExhaustedStream { index: n, len: t.len });
                }
                let entries = t.terms.get(&n).map(Vec::as_slice).unwrap_or(&[]);
                if t.scalar {
                    Term::Scalar(entries.first().map(|(_, v)| S::from_rational(v)).unwrap_or_else(S::zero))
                } else {
                    Term::General(Vector::sparse(
                        entries.iter().map(|(i, v)| (*i, S::from_rational(v))),
                    )?)
                }
            }
        })
    }

    /// Term `x_n` for `n >= 1`. Scalar families return one-dimensional
    /// dense vectors.
    pub fn term<S: Scalar>(&self, n: usize) -> Result<Vector<S>> {
        Ok(self.term_parts(n)?.into_vector())
    }

    /// Value of a scalar series' `n`-th term.
    pub fn scalar_term<S: Scalar>(&self, n: usize) -> Result<S> {
        match self.term_parts(n)? {
            Term::Scalar(x) => Ok(x),
            _ => Err(Error::Shape(format!("{} is not a scalar series", self.name()))),
        }
    }

    /// `‖x_n‖₂`.
    pub fn term_norm(&self, n: usize) -> Result<f64> {
        Ok(self.term_parts::<f64>(n)?.norm2())
    }
}

/// A finite injective prefix of a permutation of the positive integers:
/// position `k` (1-based) takes term `prefix[k-1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Permutation {
    prefix: Vec<usize>,
}

impl Permutation {
    pub fn new(prefix: Vec<usize>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(prefix.len());
        for &i in &prefix {
            if i == 0 {
                return Err(Error::InvalidPermutation("term indices start at 1".into()));
            }
            if !seen.insert(i) {
                return Err(Error::InvalidPermutation(format!("index {i} repeated")));
            }
        }
        Ok(Permutation { prefix })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            prefix: (1..=n).collect(),
        }
    }

    /// Uniformly random bijection of `{1..n}`.
    pub fn random(n: usize, seed: u64) -> Self {
        Self::random_in_stream(n, seed, 0)
    }

    pub(crate) fn random_in_stream(n: usize, seed: u64, stream: u64) -> Self {
        let mut prefix: Vec<usize> = (1..=n).collect();
        prefix.shuffle(&mut stream_rng(seed, stream));
        Permutation { prefix }
    }

    pub fn len(&self) -> usize {
        self.prefix.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prefix.is_empty()
    }

    /// Term index at 1-based position `k`.
    pub fn at(&self, k: usize) -> usize {
        self.prefix[k - 1]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.prefix
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.prefix
    }

    /// Whether the prefix is a bijection of `{1..len}`.
    pub fn is_complete(&self) -> bool {
        let n = self.prefix.len();
        self.prefix.iter().all(|&i| i <= n)
    }

    /// Smallest `N` such that the prefix extends to a bijection of `{1..N}`.
    pub fn completion_bound(&self) -> usize {
        self.prefix.iter().copied().max().unwrap_or(0)
    }
}

/// Summation order for partial sums.
#[derive(Debug, Clone, Copy)]
pub enum Order<'a> {
    Identity,
    Permuted(&'a Permutation),
}

impl Order<'_> {
    fn index_fn(&self, n: usize) -> Result<Box<dyn Fn(usize) -> usize + Sync + '_>> {
        match self {
            Order::Identity => Ok(Box::new(|k| k)),
            Order::Permuted(p) => {
                if p.len() < n {
                    return Err(Error::InvalidPermutation(format!(
                        "order covers {} positions, {n} requested",
                        p.len()
                    )));
                }
                Ok(Box::new(move |k| p.at(k)))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SummationStrategy {
    Naive,
    Compensated,
    Pairwise,
    ExactRational,
}

impl SummationStrategy {
    pub const FLOATING: [SummationStrategy; 3] = [
        SummationStrategy::Naive,
        SummationStrategy::Compensated,
        SummationStrategy::Pairwise,
    ];

    pub const ALL: [SummationStrategy; 4] = [
        SummationStrategy::Naive,
        SummationStrategy::Compensated,
        SummationStrategy::Pairwise,
        SummationStrategy::ExactRational,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SummationStrategy::Naive => "naive",
            SummationStrategy::Compensated => "compensated",
            SummationStrategy::Pairwise => "pairwise",
            SummationStrategy::ExactRational => "exact-rational",
        }
    }

    /// Rejects `ExactRational` unless both the scalar type and the declared
    /// mode are exact.
    pub fn check<S: Scalar>(self, declared: ScalarMode) -> Result<()> {
        if self == SummationStrategy::ExactRational
            && (S::MODE != ScalarMode::ExactRational || declared != ScalarMode::ExactRational)
        {
            return Err(Error::IncompatibleMode(
                "exact-rational summation requires exact-rational scalars".into(),
            ));
        }
        Ok(())
    }
}

const PAIRWISE_LEAF: usize = 8;

/// Sums `count` terms, the `k`-th (1-based) being `term(k)`.
pub(crate) fn sum_terms<S: Scalar>(
    scalar: bool,
    count: usize,
    strategy: SummationStrategy,
    term: &(dyn Fn(usize) -> Result<Term<S>> + Sync),
) -> Result<Vector<S>> {
    if scalar {
        return Ok(Vector::scalar(sum_scalar_terms(count, strategy, &|k| {
            match term(k)? {
                Term::Scalar(x) => Ok(x),
                other => Ok(other.into_vector().get(1)),
            }
        })?));
    }
    match strategy {
        SummationStrategy::Pairwise => pairwise_vector(1, count + 1, term),
        _ => {
            let mut acc = VectorAccumulator::new(strategy == SummationStrategy::Compensated);
            for k in 1..=count {
                match term(k)? {
                    Term::Scalar(x) => {
                        acc.set_dense_dim(1);
                        acc.add_coordinate(1, x)
                    }
                    Term::Coordinate(i, x) => acc.add_coordinate(i, x),
                    Term::General(v) => acc.add(&v)?,
                }
            }
            acc.finish()
        }
    }
}

pub(crate) fn sum_scalar_terms<S: Scalar>(
    count: usize,
    strategy: SummationStrategy,
    term: &(dyn Fn(usize) -> Result<S> + Sync),
) -> Result<S> {
    match strategy {
        SummationStrategy::Naive | SummationStrategy::ExactRational => {
            let mut s = S::zero();
            for k in 1..=count {
                s = s + term(k)?;
            }
            Ok(s)
        }
        SummationStrategy::Compensated => {
            let (mut s, mut c) = (S::zero(), S::zero());
            for k in 1..=count {
                S::compensated_add(&mut s, &mut c, term(k)?);
            }
            Ok(S::compensated_total(&s, &c))
        }
        SummationStrategy::Pairwise => pairwise_scalar(1, count + 1, term),
    }
}

fn pairwise_scalar<S: Scalar>(
    lo: usize,
    hi: usize,
    term: &(dyn Fn(usize) -> Result<S> + Sync),
) -> Result<S> {
    if hi - lo <= PAIRWISE_LEAF {
        let mut s = S::zero();
        for k in lo..hi {
            s = s + term(k)?;
        }
        return Ok(s);
    }
    let mid = lo + (hi - lo) / 2;
    Ok(pairwise_scalar(lo, mid, term)? + pairwise_scalar(mid, hi, term)?)
}

fn pairwise_vector<S: Scalar>(
    lo: usize,
    hi: usize,
    term: &(dyn Fn(usize) -> Result<Term<S>> + Sync),
) -> Result<Vector<S>> {
    if hi - lo <= PAIRWISE_LEAF {
        let mut acc = VectorAccumulator::new(false);
        for k in lo..hi {
            acc.add(&term(k)?.into_vector())?;
        }
        return acc.finish();
    }
    let mid = lo + (hi - lo) / 2;
    pairwise_vector(lo, mid, term)?.add(&pairwise_vector(mid, hi, term)?)
}

/// `Σ_{k=1}^{n} x_{order(k)}` under `strategy`.
pub fn partial_sum<S: Scalar>(
    spec: &SeriesSpec,
    order: Order<'_>,
    n: usize,
    strategy: SummationStrategy,
) -> Result<Vector<S>> {
    strategy.check::<S>(spec.scalar_mode)?;
    let index = order.index_fn(n)?;
    sum_terms(spec.is_scalar(), n, strategy, &|k| spec.term_parts(index(k)))
}

/// Partial sums at each requested count (increasing), identity order.
pub fn partial_sums_at<S: Scalar>(
    spec: &SeriesSpec,
    counts: &[usize],
    strategy: SummationStrategy,
) -> Result<Vec<Vector<S>>> {
    counts
        .iter()
        .map(|&n| partial_sum(spec, Order::Identity, n, strategy))
        .collect()
}

/// `Σ_{n∈F} x_n`, summed in increasing index order.
pub fn sum_over_set<S: Scalar>(
    spec: &SeriesSpec,
    set: &BTreeSet<usize>,
    strategy: SummationStrategy,
) -> Result<Vector<S>> {
    strategy.check::<S>(spec.scalar_mode)?;
    if set.contains(&0) {
        return Err(invalid("term indices start at 1"));
    }
    let indices: Vec<usize> = set.iter().copied().collect();
    sum_terms(spec.is_scalar(), indices.len(), strategy, &|k| spec.term_parts(indices[k - 1]))
}

/// Identity-order partial sum split into `chunks` ranges summed concurrently.
pub fn partial_sum_parallel<S: Scalar>(
    spec: &SeriesSpec,
    n: usize,
    chunks: usize,
    strategy: SummationStrategy,
) -> Result<Vector<S>> {
    strategy.check::<S>(spec.scalar_mode)?;
    let chunks = chunks.clamp(1, n.max(1));
    // Power-of-two aligned split keeps pairwise chunks on tree boundaries.
    let width = match strategy {
        SummationStrategy::Pairwise => n.div_ceil(chunks).next_power_of_two(),
        _ => n.div_ceil(chunks),
    }
    .max(1);
    let ranges: Vec<(usize, usize)> = (0..n.div_ceil(width))
        .map(|c| (c * width, ((c + 1) * width).min(n)))
        .collect();
    let scalar = spec.is_scalar();
    let parts: Vec<Vector<S>> = ranges
        .par_iter()
        .map(|&(lo, hi)| sum_terms(scalar, hi - lo, strategy, &|k| spec.term_parts(lo + k)))
        .collect::<Result<_>>()?;
    if parts.is_empty() {
        return sum_terms(scalar, 0, strategy, &|k| spec.term_parts(k));
    }
    let merge_strategy = match strategy {
        SummationStrategy::Naive => SummationStrategy::Naive,
        SummationStrategy::Pairwise => SummationStrategy::Pairwise,
        _ => SummationStrategy::Compensated,
    };
    sum_terms(scalar, parts.len(), merge_strategy, &|k| Ok(Term::General(parts[k - 1].clone())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact_q(n: i64, d: u64) -> BigRational {
        BigRational::from_ratio(n, d)
    }

    #[test]
    fn term_examples() {
        let ah = SeriesSpec::alternating_harmonic();
        assert_eq!(ah.term::<f64>(2).unwrap(), Vector::scalar(0.5));
        assert_eq!(ah.term::<f64>(1).unwrap(), Vector::scalar(-1.0));
        let cd = SeriesSpec::coordinate_decay(1.0).unwrap();
        assert_eq!(cd.term::<BigRational>(3).unwrap(), Vector::basis(3, exact_q(1, 3)));
        assert_eq!(SeriesSpec::harmonic().scalar_term::<f64>(7).unwrap(), 1.0 / 7.0);
        assert!(SeriesSpec::harmonic().term::<f64>(0).is_err());
        // deterministic
        let s = SeriesSpec::signed_coordinate(SignSource::Seeded { seed: 9 }, 1.0).unwrap();
        assert_eq!(s.term::<f64>(17).unwrap(), s.term::<f64>(17).unwrap());
    }

    #[test]
    fn alternating_harmonic_limit() {
        let ah = SeriesSpec::alternating_harmonic();
        let s = partial_sum::<f64>(&ah, Order::Identity, 1_000_000, SummationStrategy::Compensated)
            .unwrap()
            .get(1);
        // remainder of an alternating series is below the first omitted term
        assert!((s + std::f64::consts::LN_2).abs() <= 1.0 / (2.0 * 1e6));
        assert!((s - -0.693_146_680_560_195_3).abs() < 1e-13);
    }

    #[test]
    fn harmonic_million() {
        let s = partial_sum::<f64>(&SeriesSpec::harmonic(), Order::Identity, 1_000_000, SummationStrategy::Compensated)
            .unwrap()
            .get(1);
        assert!((s - 14.392_726_722_865_724).abs() < 1e-12);
    }

    #[test]
    fn empty_sum_is_zero() {
        for spec in [SeriesSpec::harmonic(), SeriesSpec::coordinate_decay(1.0).unwrap()] {
            for strategy in SummationStrategy::FLOATING {
                let v = partial_sum::<f64>(&spec, Order::Identity, 0, strategy).unwrap();
                assert!(v.is_zero());
            }
        }
    }

    #[test]
    fn sum_over_set_examples() {
        let cd = SeriesSpec::coordinate_decay(1.0).unwrap();
        let empty = sum_over_set::<f64>(&cd, &BTreeSet::new(), SummationStrategy::Naive).unwrap();
        assert!(empty.is_zero());
        let v = sum_over_set::<f64>(&cd, &BTreeSet::from([2, 5]), SummationStrategy::Naive).unwrap();
        assert_eq!(v, Vector::sparse([(2, 0.5), (5, 0.2)]).unwrap());

        // -1 + 1/2 - 1/3 + 1/4 = -7/12
        let ah = SeriesSpec::alternating_harmonic().exact();
        let s = sum_over_set::<BigRational>(&ah, &BTreeSet::from([1, 2, 3, 4]), SummationStrategy::ExactRational)
            .unwrap();
        assert_eq!(s.get(1), exact_q(-7, 12));
    }

    #[test]
    fn exact_strategy_requires_exact_mode() {
        let ah = SeriesSpec::alternating_harmonic();
        assert!(matches!(
            partial_sum::<f64>(&ah, Order::Identity, 3, SummationStrategy::ExactRational),
            Err(Error::IncompatibleMode(_))
        ));
        assert!(matches!(
            partial_sum::<BigRational>(&ah, Order::Identity, 3, SummationStrategy::ExactRational),
            Err(Error::IncompatibleMode(_))
        ));
        let ok = partial_sum::<BigRational>(&ah.exact(), Order::Identity, 4, SummationStrategy::ExactRational)
            .unwrap();
        assert_eq!(ok.get(1), exact_q(-7, 12));
    }

    #[test]
    fn short_order_is_rejected() {
        let p = Permutation::new(vec![2, 1]).unwrap();
        assert!(matches!(
            partial_sum::<f64>(&SeriesSpec::harmonic(), Order::Permuted(&p), 3, SummationStrategy::Naive),
            Err(Error::InvalidPermutation(_))
        ));
        assert!(Permutation::new(vec![1, 1]).is_err());
        assert!(Permutation::new(vec![0]).is_err());
        assert!(p.is_complete());
        assert!(!Permutation::new(vec![3, 1]).unwrap().is_complete());
    }

    #[test]
    fn exact_permutation_invariance() {
        let spec = SeriesSpec::alternating_harmonic().exact();
        let reference =
            partial_sum::<BigRational>(&spec, Order::Identity, 200, SummationStrategy::ExactRational).unwrap();
        for seed in 0..5 {
            let p = Permutation::random(200, seed);
            let s = partial_sum::<BigRational>(&spec, Order::Permuted(&p), 200, SummationStrategy::ExactRational)
                .unwrap();
            assert_eq!(s, reference);
        }
    }

    #[test]
    fn orthogonality_identity() {
        let spec = SeriesSpec::coordinate_decay(1.0).unwrap().exact();
        let s = partial_sum::<BigRational>(&spec, Order::Identity, 50, SummationStrategy::ExactRational).unwrap();
        let sq = s.inner(&s).unwrap();
        let oracle: BigRational = (1..=50u64).map(|n| exact_q(1, n * n)).sum();
        assert_eq!(sq, oracle);
    }

    #[test]
    fn parallel_matches_sequential() {
        let spec = SeriesSpec::alternating_harmonic();
        for strategy in SummationStrategy::FLOATING {
            let seq = partial_sum::<f64>(&spec, Order::Identity, 100_000, strategy).unwrap().get(1);
            let par = partial_sum_parallel::<f64>(&spec, 100_000, 7, strategy).unwrap().get(1);
            assert!((seq - par).abs() < 1e-12, "{strategy:?}");
        }
        let exact = spec.clone().exact();
        let seq = partial_sum::<BigRational>(&exact, Order::Identity, 300, SummationStrategy::ExactRational).unwrap();
        let par = partial_sum_parallel::<BigRational>(&exact, 300, 4, SummationStrategy::ExactRational).unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn file_terms_roundtrip() {
        let text = "# scalar series\n1 -1\n2 1/4\n4 -0.0625\n";
        let spec = SeriesSpec::from_table(TermTable::parse(text.as_bytes()).unwrap()).exact();
        assert!(spec.is_scalar());
        assert_eq!(spec.len(), Some(4));
        assert_eq!(spec.scalar_term::<BigRational>(3).unwrap(), exact_q(0, 1));
        assert!(matches!(
            spec.term::<f64>(5),
            Err(Error::ExhaustedStream { index: 5, len: 4 })
        ));
        let total = partial_sum::<BigRational>(&spec, Order::Identity, 4, SummationStrategy::ExactRational)
            .unwrap()
            .get(1);
        assert_eq!(total.as_f64(), -1.0 + 0.25 - 0.0625);

        let text = "1 1:0.5 3:-2\n2 2:1e-1\n";
        let spec = SeriesSpec::from_table(TermTable::parse(text.as_bytes()).unwrap());
        assert!(!spec.is_scalar());
        assert_eq!(spec.term::<f64>(1).unwrap(), Vector::sparse([(1, 0.5), (3, -2.0)]).unwrap());

        for bad in ["0 1", "1 1:2 3", "x 1", "1 1:abc", "1 2\n1 3"] {
            assert!(matches!(TermTable::parse(bad.as_bytes()), Err(Error::Parse { .. })), "{bad}");
        }
    }

    #[test]
    fn sign_sources() {
        let explicit = SignSource::Explicit { signs: vec![1, -1] };
        assert_eq!(explicit.sign(2).unwrap(), -1);
        assert!(matches!(explicit.sign(3), Err(Error::ExhaustedStream { .. })));
        assert_eq!(SignSource::Alternating.sign(3).unwrap(), -1);
        assert!(SignSource::Explicit { signs: vec![0] }.sign(1).is_err());
    }
}
