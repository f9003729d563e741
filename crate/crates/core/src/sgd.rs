//! Order sensitivity of accumulated gradient updates.
//!
//! The harness evaluates `Δw = -Σ_{i=1}^{N} η_i g_{σ(i)}` for gradients
//! precomputed at a fixed point. It does not simulate sequential training
//! dynamics. Floating strategies measure how far the result moves under
//! reordering; exact rational accumulation never moves.
//!
//! By default the `i`-th processed sample takes the `i`-th rate
//! ([`SchedulePairing::Position`]). [`SchedulePairing::Sample`] lets each
//! rate travel with its sample instead.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use num_rational::BigRational;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::stream_rng;
use crate::series::{sum_scalar_terms, Order, Permutation, SummationStrategy};
use crate::workspace::Scalar;

/// Least-squares problem `L(w) = ½ Σ (a_iᵀw - y_i)²`; sample `i`
/// contributes `A_i = a_i a_iᵀ` and `b_i = y_i a_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QuadraticProblem {
    pub features: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
    pub w0: Vec<f64>,
}

impl QuadraticProblem {
    /// `A = Σ A_i`.
    pub fn hessian(&self) -> Vec<Vec<f64>> {
        let d = self.w0.len();
        let mut h = vec![vec![0.0; d]; d];
        for a in &self.features {
            for (r, ar) in h.iter_mut().zip(a) {
                for (x, ac) in r.iter_mut().zip(a) {
                    *x += ar * ac;
                }
            }
        }
        h
    }

    /// `b = Σ b_i`.
    pub fn rhs(&self) -> Vec<f64> {
        let mut b = vec![0.0; self.w0.len()];
        for (a, y) in self.features.iter().zip(&self.targets) {
            for (x, ai) in b.iter_mut().zip(a) {
                *x += y * ai;
            }
        }
        b
    }

    /// Full-batch gradient `A w0 - b`.
    pub fn full_gradient(&self) -> Vec<f64> {
        let h = self.hessian();
        h.iter()
            .zip(self.rhs())
            .map(|(row, b)| row.iter().zip(&self.w0).map(|(x, w)| x * w).sum::<f64>() - b)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum StreamSource {
    Quadratic { seed: u64, problem: Box<QuadraticProblem> },
    IllConditioned { seed: u64, decades: f64 },
    HeavyTailed { seed: u64, tail_index: f64 },
    File { path: PathBuf },
    Explicit,
    Concat,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GradientStream {
    pub dim: usize,
    #[serde(skip)]
    pub gradients: Vec<Vec<f64>>,
    pub source: StreamSource,
}

impl GradientStream {
    pub fn new(gradients: Vec<Vec<f64>>) -> Result<Self> {
        let dim = gradients.first().map_or(0, |g| g.len());
        Self::with_source(dim, gradients, StreamSource::Explicit)
    }

    fn with_source(dim: usize, gradients: Vec<Vec<f64>>, source: StreamSource) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("gradient dimension must be >= 1"));
        }
        for (i, g) in gradients.iter().enumerate() {
            if g.len() != dim {
                return Err(Error::Shape(format!("gradient {} has {} coordinates, expected {dim}", i + 1, g.len())));
            }
            if g.iter().any(|x| !x.is_finite()) {
                return Err(invalid(format!("gradient {} has a non-finite coordinate", i + 1)));
            }
        }
        Ok(GradientStream { dim, gradients, source })
    }

    /// Per-sample gradients `g_i = a_i(a_iᵀw0 - y_i)` of a random
    /// least-squares problem; features, targets and `w0` are uniform on `[-1, 1]`.
    pub fn quadratic(dim: usize, samples: usize, seed: u64) -> Result<Self> {
        let mut rng = stream_rng(seed, 0);
        let mut uniform = || rng.random::<f64>() * 2.0 - 1.0;
        let w0: Vec<f64> = (0..dim).map(|_| uniform()).collect();
        let features: Vec<Vec<f64>> = (0..samples).map(|_| (0..dim).map(|_| uniform()).collect()).collect();
        let targets: Vec<f64> = (0..samples).map(|_| uniform()).collect();
        let gradients = features
            .iter()
            .zip(&targets)
            .map(|(a, y)| {
                let r = a.iter().zip(&w0).map(|(x, w)| x * w).sum::<f64>() - y;
                a.iter().map(|x| x * r).collect()
            })
            .collect();
        let problem = Box::new(QuadraticProblem { features, targets, w0 });
        Self::with_source(dim, gradients, StreamSource::Quadratic { seed, problem })
    }

    /// Random signs with magnitudes `10^u`, `u` uniform over `decades`
    /// orders of magnitude centred on 1.
    pub fn ill_conditioned(dim: usize, samples: usize, decades: f64, seed: u64) -> Result<Self> {
        if !(decades >= 0.0 && decades.is_finite()) {
            return Err(invalid("decades must be finite and >= 0"));
        }
        let mut rng = stream_rng(seed, 1);
        let gradients = (0..samples)
            .map(|_| {
                (0..dim)
                    .map(|_| {
                        let magnitude = 10f64.powf(decades * (rng.random::<f64>() - 0.5));
                        if rng.random::<bool>() {
                            magnitude
                        } else {
                            -magnitude
                        }
                    })
                    .collect()
            })
            .collect();
        Self::with_source(dim, gradients, StreamSource::IllConditioned { seed, decades })
    }

    /// Uniform random directions with Pareto(`tail_index`) lengths.
    pub fn heavy_tailed(dim: usize, samples: usize, tail_index: f64, seed: u64) -> Result<Self> {
        if !(tail_index > 0.0) {
            return Err(invalid("tail index must be > 0"));
        }
        let mut rng = stream_rng(seed, 2);
        let gradients = (0..samples)
            .map(|_| {
                let mut g: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
                let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
                let length = (1.0 - rng.random::<f64>()).powf(-1.0 / tail_index);
                g.iter_mut().for_each(|x| *x *= length / norm);
                g
            })
            .collect();
        Self::with_source(dim, gradients, StreamSource::HeavyTailed { seed, tail_index })
    }

    /// Header `d N`, then `N` rows of `d` decimals. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn parse<R: Read>(reader: R) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut gradients = Vec::new();
        for (i, line) in BufReader::new(reader).lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse { line: i + 1, message };
            let fields: Vec<&str> = line.split_whitespace().collect();
            match header {
                None => {
                    let [d, n] = fields[..] else {
                        return Err(parse_err("expected header `d N`".into()));
                    };
                    let d = d.parse().map_err(|_| parse_err(format!("bad dimension `{d}`")))?;
                    let n = n.parse().map_err(|_| parse_err(format!("bad sample count `{n}`")))?;
                    header = Some((d, n));
                }
                Some((d, _)) => {
                    if fields.len() != d {
                        return Err(parse_err(format!("expected {d} coordinates, found {}", fields.len())));
                    }
                    let row = fields
                        .iter()
                        .map(|f| f.parse::<f64>().map_err(|_| parse_err(format!("bad number `{f}`"))))
                        .collect::<Result<Vec<f64>>>()?;
                    gradients.push(row);
                }
            }
        }
        let (d, n) = header.ok_or_else(|| Error::Parse {
            line: 1,
            message: "missing header `d N`".into(),
        })?;
        if gradients.len() != n {
            return Err(Error::Parse {
                line: 1,
                message: format!("header declares {n} gradients, found {}", gradients.len()),
            });
        }
        Self::with_source(d, gradients, StreamSource::Explicit)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut stream = Self::parse(File::open(path)?)?;
        stream.source = StreamSource::File { path: path.to_path_buf() };
        Ok(stream)
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} {}", self.dim, self.len())?;
        for g in &self.gradients {
            let row: Vec<String> = g.iter().map(|x| format!("{x:e}")).collect();
            writeln!(out, "{}", row.join(" "))?;
        }
        Ok(())
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &GradientStream) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Shape(format!("dimensions {} and {} differ", self.dim, other.dim)));
        }
        let gradients = self.gradients.iter().chain(&other.gradients).cloned().collect();
        Self::with_source(self.dim, gradients, StreamSource::Concat)
    }

    pub fn len(&self) -> usize {
        self.gradients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gradients.is_empty()
    }

    pub fn gradient_norm(&self, i: usize) -> f64 {
        self.gradients[i - 1].iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum LrSchedule {
    Constant { eta: f64 },
    /// `η_i = η0 / sqrt(i)`.
    InverseSqrt { eta0: f64 },
    FromList { values: Vec<f64> },
}

impl LrSchedule {
    /// `η_i` for `i ≥ 1`.
    pub fn rate(&self, i: usize) -> Result<f64> {
        let eta = match self {
            LrSchedule::Constant { eta } => *eta,
            LrSchedule::InverseSqrt { eta0 } => eta0 / (i as f64).sqrt(),
            LrSchedule::FromList { values } => *values.get(i - 1).ok_or(Error::ExhaustedStream {
                index: i,
                len: values.len(),
            })?,
        };
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(invalid(format!("learning rate at step {i} must be positive, got {eta}")));
        }
        Ok(eta)
    }

    pub fn rates(&self, n: usize) -> Result<Vec<f64>> {
        (1..=n).map(|i| self.rate(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchedulePairing {
    /// `η_i g_{σ(i)}`.
    #[default]
    Position,
    /// `η_{σ(i)} g_{σ(i)}`.
    Sample,
}

fn resolve_order(stream: &GradientStream, order: Order<'_>) -> Result<Vec<usize>> {
    let n = stream.len();
    match order {
        Order::Identity => Ok((1..=n).collect()),
        Order::Permuted(p) => {
            if p.len() != n || !p.is_complete() {
                return Err(Error::InvalidPermutation(format!(
                    "order must be a complete permutation of 1..={n}, got {} positions reaching index {}",
                    p.len(),
                    p.completion_bound()
                )));
            }
            Ok(p.as_slice().to_vec())
        }
    }
}

/// Per-position `(multiplier·rate, sample)` pairs.
fn weighted_terms(
    stream: &GradientStream,
    sched: &LrSchedule,
    order: Order<'_>,
    pairing: SchedulePairing,
    lambdas: Option<&[f64]>,
) -> Result<(Vec<usize>, Vec<f64>, Vec<f64>)> {
    let sigma = resolve_order(stream, order)?;
    let rates = sched.rates(stream.len())?;
    let etas = sigma
        .iter()
        .enumerate()
        .map(|(pos, &s)| match pairing {
            SchedulePairing::Position => rates[pos],
            SchedulePairing::Sample => rates[s - 1],
        })
        .collect();
    let lambdas = match lambdas {
        Some(l) if l.len() != stream.len() => {
            return Err(invalid(format!("{} multipliers for {} samples", l.len(), stream.len())));
        }
        Some(l) => l.to_vec(),
        None => vec![1.0; stream.len()],
    };
    Ok((sigma, etas, lambdas))
}

fn accumulate_generic<S: Scalar>(
    stream: &GradientStream,
    sched: &LrSchedule,
    order: Order<'_>,
    strategy: SummationStrategy,
    pairing: SchedulePairing,
    lambdas: Option<&[f64]>,
) -> Result<Vec<S>> {
    let (sigma, etas, lambdas) = weighted_terms(stream, sched, order, pairing, lambdas)?;
    let weights: Vec<Option<S>> = etas
        .iter()
        .zip(&lambdas)
        .map(|(eta, lambda)| {
            if *lambda == 1.0 {
                S::from_f64(*eta).map(Some)
            } else if *lambda == 0.0 {
                Ok(None)
            } else {
                Ok(Some(S::from_f64(*lambda)? * S::from_f64(*eta)?))
            }
        })
        .collect::<Result<_>>()?;
    (0..stream.dim)
        .map(|j| {
            let total = sum_scalar_terms::<S>(stream.len(), strategy, &|k| match &weights[k - 1] {
                Some(w) => Ok(w.clone() * S::from_f64(stream.gradients[sigma[k - 1] - 1][j])?),
                None => Ok(S::zero()),
            })?;
            Ok(-total)
        })
        .collect()
}

/// `Δw = -Σ η_i g_{σ(i)}` in floating point. `ExactRational` accumulates
/// exactly and rounds once at the end.
pub fn accumulate(
    stream: &GradientStream,
    sched: &LrSchedule,
    order: Order<'_>,
    strategy: SummationStrategy,
) -> Result<Vec<f64>> {
    accumulate_paired(stream, sched, order, strategy, SchedulePairing::Position)
}

pub fn accumulate_paired(
    stream: &GradientStream,
    sched: &LrSchedule,
    order: Order<'_>,
    strategy: SummationStrategy,
    pairing: SchedulePairing,
) -> Result<Vec<f64>> {
    weighted_accumulate(stream, sched, order, strategy, pairing, None)
}

fn weighted_accumulate(
    stream: &GradientStream,
    sched: &LrSchedule,
    order: Order<'_>,
    strategy: SummationStrategy,
    pairing: SchedulePairing,
    lambdas: Option<&[f64]>,
) -> Result<Vec<f64>> {
    if strategy == SummationStrategy::ExactRational {
        let exact = accumulate_generic::<BigRational>(stream, sched, order, strategy, pairing, lambdas)?;
        return Ok(exact.iter().map(f64::from_rational).collect());
    }
    accumulate_generic::<f64>(stream, sched, order, strategy, pairing, lambdas)
}

/// Exact `Δw` over the binary values of the gradients and rates.
pub fn accumulate_exact(
    stream: &GradientStream,
    sched: &LrSchedule,
    order: Order<'_>,
    pairing: SchedulePairing,
) -> Result<Vec<BigRational>> {
    accumulate_generic(stream, sched, order, SummationStrategy::ExactRational, pairing, None)
}

fn linf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn linf_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StrategyDeviation {
    pub strategy: SummationStrategy,
    /// `max_{σ,σ'} ‖Δw_σ - Δw_σ'‖∞`.
    pub max_pairwise_deviation: f64,
    /// `max_σ ‖Δw_σ - Δw_exact‖∞`.
    pub reference_deviation: f64,
    /// Pairwise deviation over the naive one, when naive ran and moved.
    pub relative_to_naive: Option<f64>,
    /// Exact rational results were bitwise identical across orders.
    pub bitwise_identical: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SensitivityReport {
    pub num_perms: usize,
    pub seed: Option<u64>,
    pub pairing: SchedulePairing,
    pub samples: usize,
    pub dim: usize,
    /// `‖Δw_exact‖∞`.
    pub reference_norm: f64,
    pub strategies: Vec<StrategyDeviation>,
    /// Expected orderings between strategies that this stream broke; the
    /// stream is worth inspecting when this is nonempty.
    pub ordering_violations: Vec<String>,
}

impl SensitivityReport {
    pub fn get(&self, strategy: SummationStrategy) -> Option<&StrategyDeviation> {
        self.strategies.iter().find(|s| s.strategy == strategy)
    }
}

/// Accumulates under `num_perms` seeded random orders with each strategy.
pub fn permutation_sensitivity(
    stream: &GradientStream,
    sched: &LrSchedule,
    num_perms: usize,
    seed: u64,
    strategies: &[SummationStrategy],
    pairing: SchedulePairing,
) -> Result<SensitivityReport> {
    if num_perms < 2 {
        return Err(invalid("permutation sensitivity needs at least 2 permutations"));
    }
    let orders: Vec<Permutation> = (0..num_perms as u64)
        .map(|r| Permutation::random_in_stream(stream.len(), seed, r + 1))
        .collect();
    let mut report = sensitivity_over(stream, sched, &orders, strategies, pairing)?;
    report.seed = Some(seed);
    Ok(report)
}

/// As [`permutation_sensitivity`], over caller-supplied orders.
pub fn sensitivity_over(
    stream: &GradientStream,
    sched: &LrSchedule,
    orders: &[Permutation],
    strategies: &[SummationStrategy],
    pairing: SchedulePairing,
) -> Result<SensitivityReport> {
    if orders.len() < 2 {
        return Err(invalid("permutation sensitivity needs at least 2 orders"));
    }
    let exact = accumulate_exact(stream, sched, Order::Identity, pairing)?;
    let reference: Vec<f64> = exact.iter().map(f64::from_rational).collect();
    let mut out = Vec::new();
    for &strategy in strategies {
        let (results, identical) = if strategy == SummationStrategy::ExactRational {
            let exact_runs = orders
                .par_iter()
                .map(|p| accumulate_exact(stream, sched, Order::Permuted(p), pairing))
                .collect::<Result<Vec<_>>>()?;
            let identical = exact_runs.iter().all(|r| *r == exact);
            let rounded = exact_runs.iter().map(|r| r.iter().map(f64::from_rational).collect()).collect();
            (rounded, identical)
        } else {
            let runs: Vec<Vec<f64>> = orders
                .par_iter()
                .map(|p| accumulate_paired(stream, sched, Order::Permuted(p), strategy, pairing))
                .collect::<Result<_>>()?;
            let identical = runs.windows(2).all(|w| w[0].iter().zip(&w[1]).all(|(a, b)| a.to_bits() == b.to_bits()));
            (runs, identical)
        };
        let mut spread = 0.0f64;
        for j in 0..stream.dim {
            let (lo, hi) = results
                .iter()
                .map(|r: &Vec<f64>| r[j])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
            spread = spread.max(hi - lo);
        }
        let reference_deviation = results.iter().map(|r| linf_diff(r, &reference)).fold(0.0, f64::max);
        out.push(StrategyDeviation {
            strategy,
            max_pairwise_deviation: spread,
            reference_deviation,
            relative_to_naive: None,
            bitwise_identical: identical,
        });
    }
    let naive = out
        .iter()
        .find(|s| s.strategy == SummationStrategy::Naive)
        .map(|s| s.max_pairwise_deviation);
    let mut violations = Vec::new();
    if let Some(naive) = naive {
        for s in &mut out {
            if naive > 0.0 {
                s.relative_to_naive = Some(s.max_pairwise_deviation / naive);
            }
            if s.strategy != SummationStrategy::Naive && s.max_pairwise_deviation > naive {
                violations.push(format!(
                    "{} deviation {:e} exceeds naive deviation {:e}",
                    s.strategy.name(),
                    s.max_pairwise_deviation,
                    naive
                ));
            }
        }
    }
    Ok(SensitivityReport {
        num_perms: orders.len(),
        seed: None,
        pairing,
        samples: stream.len(),
        dim: stream.dim,
        reference_norm: linf(&reference),
        strategies: out,
        ordering_violations: violations,
    })
}

/// Multiplier sequence with a declared bound `sup |λ_i| ≤ bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundedSequence {
    pub values: Vec<f64>,
    pub bound: f64,
}

impl BoundedSequence {
    pub fn new(values: Vec<f64>, bound: f64) -> Result<Self> {
        if !(bound >= 0.0 && bound.is_finite()) {
            return Err(invalid(format!("multiplier bound must be finite and >= 0, got {bound}")));
        }
        if let Some(i) = values.iter().position(|v| !(v.abs() <= bound)) {
            return Err(invalid(format!(
                "multiplier {} at position {} exceeds declared bound {bound}",
                values[i],
                i + 1
            )));
        }
        Ok(BoundedSequence { values, bound })
    }

    pub fn constant(c: f64, n: usize) -> Result<Self> {
        Self::new(vec![c; n], c.abs())
    }
}

/// `λ_i = min(1, c / ‖g_{σ(i)}‖)`, by position.
pub fn clipping_multipliers(stream: &GradientStream, order: Order<'_>, c: f64) -> Result<BoundedSequence> {
    if !(c > 0.0) {
        return Err(invalid("clipping threshold must be > 0"));
    }
    let sigma = resolve_order(stream, order)?;
    let values = sigma
        .iter()
        .map(|&s| {
            let norm = stream.gradient_norm(s);
            if norm > c {
                c / norm
            } else {
                1.0
            }
        })
        .collect();
    BoundedSequence::new(values, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MultiplierOutcome {
    pub delta: Vec<f64>,
    pub norm: f64,
    /// `C · Σ η_i ‖g_{σ(i)}‖`.
    pub bound: f64,
}

/// `Δw = -Σ λ_i η_i g_{σ(i)}`, with `λ_i` paired by position.
pub fn multiplier_variant(
    stream: &GradientStream,
    sched: &LrSchedule,
    lambdas: &BoundedSequence,
    order: Order<'_>,
    strategy: SummationStrategy,
) -> Result<MultiplierOutcome> {
    let lambdas = BoundedSequence::new(lambdas.values.clone(), lambdas.bound)?;
    let delta = weighted_accumulate(
        stream,
        sched,
        order,
        strategy,
        SchedulePairing::Position,
        Some(&lambdas.values),
    )?;
    let sigma = resolve_order(stream, order)?;
    let rates = sched.rates(stream.len())?;
    let mass: f64 = sigma.iter().zip(&rates).map(|(&s, eta)| eta * stream.gradient_norm(s)).sum();
    let norm = delta.iter().map(|x| x * x).sum::<f64>().sqrt();
    let bound = lambdas.bound * mass;
    debug_assert!(norm <= bound * (1.0 + 1e-9) + f64::MIN_POSITIVE);
    Ok(MultiplierOutcome { delta, norm, bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant(eta: f64) -> LrSchedule {
        LrSchedule::Constant { eta }
    }

    #[test]
    fn single_sample() {
        let s = GradientStream::new(vec![vec![2.0, -4.0]]).unwrap();
        let p = Permutation::identity(1);
        let d = accumulate(&s, &constant(0.5), Order::Permuted(&p), SummationStrategy::Naive).unwrap();
        assert_eq!(d, vec![-1.0, 2.0]);
    }

    #[test]
    fn quadratic_gradients_sum_to_full_batch() {
        let s = GradientStream::quadratic(4, 200, 3).unwrap();
        let StreamSource::Quadratic { problem, .. } = &s.source else { panic!() };
        let full = problem.full_gradient();
        let total = accumulate(&s, &constant(1.0), Order::Identity, SummationStrategy::ExactRational).unwrap();
        for (a, b) in total.iter().zip(&full) {
            assert!((a + b).abs() < 1e-10 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn exact_mode_is_order_free() {
        let s = GradientStream::quadratic(5, 300, 11).unwrap();
        let sched = LrSchedule::InverseSqrt { eta0: 0.1 };
        let a = Permutation::random(300, 1);
        let b = Permutation::random(300, 2);
        // with the rate travelling with its sample the multiset of terms is fixed
        let ea = accumulate_exact(&s, &sched, Order::Permuted(&a), SchedulePairing::Sample).unwrap();
        let eb = accumulate_exact(&s, &sched, Order::Permuted(&b), SchedulePairing::Sample).unwrap();
        assert_eq!(ea, eb);
        let ea = accumulate_exact(&s, &constant(0.01), Order::Permuted(&a), SchedulePairing::Position).unwrap();
        let eb = accumulate_exact(&s, &constant(0.01), Order::Permuted(&b), SchedulePairing::Position).unwrap();
        assert_eq!(ea, eb);
    }

    #[test]
    fn order_must_be_complete() {
        let s = GradientStream::quadratic(2, 5, 0).unwrap();
        let short = Permutation::new(vec![1, 2, 3]).unwrap();
        let wide = Permutation::new(vec![1, 2, 3, 4, 6]).unwrap();
        for p in [&short, &wide] {
            assert!(matches!(
                accumulate(&s, &constant(0.1), Order::Permuted(p), SummationStrategy::Naive),
                Err(Error::InvalidPermutation(_))
            ));
        }
    }

    #[test]
    fn sensitivity_orderings() {
        let s = GradientStream::ill_conditioned(4, 2000, 10.0, 5).unwrap();
        let r = permutation_sensitivity(&s, &constant(0.01), 8, 9, &SummationStrategy::ALL, SchedulePairing::Position)
            .unwrap();
        let naive = r.get(SummationStrategy::Naive).unwrap();
        let comp = r.get(SummationStrategy::Compensated).unwrap();
        let exact = r.get(SummationStrategy::ExactRational).unwrap();
        assert_eq!(exact.max_pairwise_deviation, 0.0);
        assert!(exact.bitwise_identical);
        assert!(comp.max_pairwise_deviation < naive.max_pairwise_deviation);
        assert!(comp.max_pairwise_deviation * 1e3 <= naive.max_pairwise_deviation, "{r:#?}");
        assert!(r.ordering_violations.is_empty());
    }

    #[test]
    fn identical_orders_do_not_deviate() {
        let s = GradientStream::quadratic(3, 100, 1).unwrap();
        let p = Permutation::random(100, 4);
        let r = sensitivity_over(&s, &constant(0.01), &[p.clone(), p], &[SummationStrategy::Naive], SchedulePairing::Position)
            .unwrap();
        assert_eq!(r.strategies[0].max_pairwise_deviation, 0.0);
        assert!(permutation_sensitivity(&s, &constant(0.01), 1, 0, &[SummationStrategy::Naive], SchedulePairing::Position).is_err());
    }

    #[test]
    fn concatenation_is_linear() {
        let a = GradientStream::quadratic(3, 40, 1).unwrap();
        let b = GradientStream::quadratic(3, 60, 2).unwrap();
        let sched = constant(0.25);
        let ab = accumulate_exact(&a.concat(&b).unwrap(), &sched, Order::Identity, SchedulePairing::Position).unwrap();
        let ea = accumulate_exact(&a, &sched, Order::Identity, SchedulePairing::Position).unwrap();
        let eb = accumulate_exact(&b, &sched, Order::Identity, SchedulePairing::Position).unwrap();
        let sum: Vec<BigRational> = ea.iter().zip(&eb).map(|(x, y)| x + y).collect();
        assert_eq!(ab, sum);
    }

    #[test]
    fn multipliers() {
        let s = GradientStream::quadratic(3, 50, 8).unwrap();
        let sched = constant(0.1);
        let ones = BoundedSequence::constant(1.0, 50).unwrap();
        let zeros = BoundedSequence::constant(0.0, 50).unwrap();
        let plain = accumulate(&s, &sched, Order::Identity, SummationStrategy::Compensated).unwrap();
        let m = multiplier_variant(&s, &sched, &ones, Order::Identity, SummationStrategy::Compensated).unwrap();
        assert_eq!(m.delta, plain);
        assert!(m.norm <= m.bound);
        let z = multiplier_variant(&s, &sched, &zeros, Order::Identity, SummationStrategy::Naive).unwrap();
        assert!(z.delta.iter().all(|x| *x == 0.0));
        assert!(BoundedSequence::new(vec![0.5, 1.5], 1.0).is_err());
    }

    #[test]
    fn clipping_bounds_heavy_tails() {
        let s = GradientStream::heavy_tailed(4, 500, 1.2, 6).unwrap();
        let sched = LrSchedule::InverseSqrt { eta0: 0.05 };
        let c = 0.5;
        let p = Permutation::random(500, 2);
        let lambdas = clipping_multipliers(&s, Order::Permuted(&p), c).unwrap();
        let m = multiplier_variant(&s, &sched, &lambdas, Order::Permuted(&p), SummationStrategy::Compensated).unwrap();
        let budget: f64 = sched.rates(500).unwrap().iter().map(|eta| eta * c).sum();
        assert!(m.norm <= budget * (1.0 + 1e-12));
    }

    #[test]
    fn file_roundtrip() {
        let s = GradientStream::ill_conditioned(3, 7, 6.0, 2).unwrap();
        let mut buf = Vec::new();
        s.write(&mut buf).unwrap();
        let back = GradientStream::parse(buf.as_slice()).unwrap();
        assert_eq!(back.gradients, s.gradients);
        assert!(GradientStream::parse("2 2\n1 2\n".as_bytes()).is_err());
        assert!(matches!(
            GradientStream::parse("2 1\n1 x\n".as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(LrSchedule::Constant { eta: 0.0 }.rate(1).is_err());
    }
}
