use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::available;
use super::growth::{log_checkpoints, Checkpoint, GrowthRecord, DEFAULT_CHECKPOINTS};
use crate::error::{invalid, Error, Result};
use crate::rng::seeded_unit;
use crate::series::{SeriesSpec, Term};
use crate::workspace::{Scalar, VectorAccumulator};

/// Running compensated sum of `value(n)`, recorded at log-spaced checkpoints.
fn scalar_checkpoints(n: usize, mut value: impl FnMut(usize) -> Result<f64>) -> Result<GrowthRecord> {
    let mut out = Vec::new();
    let (mut s, mut c) = (0.0, 0.0);
    let mut k = 0;
    for cp in log_checkpoints(n, DEFAULT_CHECKPOINTS) {
        while k < cp {
            k += 1;
            f64::compensated_add(&mut s, &mut c, value(k)?);
        }
        out.push(Checkpoint { n: cp, value: s + c });
    }
    if out.is_empty() {
        out.push(Checkpoint { n: 0, value: 0.0 });
    }
    Ok(GrowthRecord::from_checkpoints(out))
}

/// Checkpoints of `Σ_{n≤N} ‖x_n‖`.
pub fn check_absolute(spec: &SeriesSpec, n: usize) -> Result<GrowthRecord> {
    if n == 0 {
        return Err(invalid("N must be >= 1"));
    }
    scalar_checkpoints(available(spec, n), |k| Ok(spec.term_parts::<f64>(k)?.norm2()))
}

/// Checkpoints of `Σ_{n≤N} ‖x_n‖²`.
pub fn check_orlicz(spec: &SeriesSpec, n: usize) -> Result<GrowthRecord> {
    if n == 0 {
        return Err(invalid("N must be >= 1"));
    }
    scalar_checkpoints(available(spec, n), |k| {
        let x = spec.term_parts::<f64>(k)?.norm2();
        Ok(x * x)
    })
}

/// Bounded scalar sequence `λ_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Multiplier {
    Constant { c: f64 },
    /// `1` on the keep-set, `0` elsewhere.
    ThresholdMask { keep: BTreeSet<usize> },
    /// `(-1)^n / ln(n+1)`.
    AlternatingLog,
    /// Independent uniform draws on `[-bound, bound]`.
    RandomBounded { bound: f64, seed: u64 },
    Explicit { values: Vec<f64>, bound: f64 },
}

impl Multiplier {
    pub fn bound(&self) -> f64 {
        match self {
            Multiplier::Constant { c } => c.abs(),
            Multiplier::ThresholdMask { .. } => 1.0,
            Multiplier::AlternatingLog => 1.0 / std::f64::consts::LN_2,
            Multiplier::RandomBounded { bound, .. } | Multiplier::Explicit { bound, .. } => *bound,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Multiplier::Constant { .. } => "constant",
            Multiplier::ThresholdMask { .. } => "threshold-mask",
            Multiplier::AlternatingLog => "alternating-log",
            Multiplier::RandomBounded { .. } => "random-bounded",
            Multiplier::Explicit { .. } => "explicit",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bound = self.bound();
        if !bound.is_finite() || bound < 0.0 {
            return Err(invalid(format!("multiplier bound must be finite and >= 0, got {bound}")));
        }
        match self {
            Multiplier::Constant { c } if !c.is_finite() => Err(invalid("constant multiplier must be finite")),
            Multiplier::ThresholdMask { keep } if keep.contains(&0) => Err(invalid("mask indices are 1-based")),
            Multiplier::Explicit { values, bound } => match values.iter().position(|v| !(v.abs() <= *bound)) {
                Some(i) => Err(invalid(format!(
                    "multiplier value {} at index {} exceeds declared bound {bound}",
                    values[i],
                    i + 1
                ))),
                None => Ok(()),
            },
            _ => Ok(()),
        }
    }

    /// `λ_n` for `n ≥ 1`.
    pub fn value(&self, n: usize) -> Result<f64> {
        Ok(match self {
            Multiplier::Constant { c } => *c,
            Multiplier::ThresholdMask { keep } => {
                if keep.contains(&n) {
                    1.0
                } else {
                    0.0
                }
            }
            Multiplier::AlternatingLog => {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                sign / ((n + 1) as f64).ln()
            }
            Multiplier::RandomBounded { bound, seed } => bound * (2.0 * seeded_unit(*seed, n as u64) - 1.0),
            Multiplier::Explicit { values, .. } => *values.get(n - 1).ok_or(Error::ExhaustedStream {
                index: n,
                len: values.len(),
            })?,
        })
    }
}

/// Checkpoints of `‖Σ_{n≤N} λ_n x_n‖`.
pub fn multiplier_stress(spec: &SeriesSpec, multiplier: &Multiplier, n: usize) -> Result<GrowthRecord> {
    multiplier.validate()?;
    let n = available(spec, n);
    let mut out = Vec::new();
    let (mut s, mut c) = (0.0, 0.0);
    let mut acc = VectorAccumulator::<f64>::new(true);
    let mut scalar = true;
    let mut k = 0;
    for cp in log_checkpoints(n, DEFAULT_CHECKPOINTS) {
        while k < cp {
            k += 1;
            let lambda = multiplier.value(k)?;
            if lambda == 0.0 {
                continue;
            }
            match spec.term_parts::<f64>(k)?.scaled(&lambda) {
                Term::Scalar(x) => f64::compensated_add(&mut s, &mut c, x),
                Term::Coordinate(i, x) => {
                    scalar = false;
                    acc.add_coordinate(i, x);
                }
                Term::General(v) => {
                    scalar = false;
                    acc.add(&v)?;
                }
            }
        }
        let value = if scalar { (s + c).abs() } else { acc.current_norm2() };
        out.push(Checkpoint { n: cp, value });
    }
    if out.is_empty() {
        out.push(Checkpoint { n: 0, value: 0.0 });
    }
    Ok(GrowthRecord::from_checkpoints(out))
}
