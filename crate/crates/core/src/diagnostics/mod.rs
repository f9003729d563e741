//! Finite-truncation evidence for the equivalent forms of unconditional
//! convergence.
//!
//! Each check looks at a finite stretch of a series and returns a statistic:
//!
//! | check | statistic |
//! |---|---|
//! | [`check_absolute`] | checkpoints of `Σ‖x_n‖` with a growth class |
//! | [`check_orlicz`] | checkpoints of `Σ‖x_n‖²` |
//! | [`net_cauchy_sup`] | `sup_F ‖Σ_{n∈F} x_n‖` over `F ⊆ (N, N+K]` |
//! | [`sign_stress`] | `max_ε ‖Σ_{n≤N} ε_n x_n‖` |
//! | [`multiplier_stress`] | checkpoints of `‖Σ λ_n x_n‖` for a bounded `λ` |
//! | [`weak_uniform_tail`] | `sup_{‖x*‖≤1} Σ_{n∈(N,N+K]} |⟨x_n, x*⟩|` |
//! | [`subseries_sample`] | tail oscillation of sampled subseries |
//!
//! [`classify`] combines them into a heuristic verdict. None of these is a
//! proof; a finite truncation cannot decide convergence, and the verdict
//! names say "evidence" accordingly.
//!
//! Norms are Euclidean throughout.

mod classify;
pub mod growth;
mod subsets;
mod sums;
mod tails;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::series::{SeriesSpec, Term};
use crate::workspace::Scalar;

pub use classify::{classify, classify_with, ClassifyConfig, Classification, DiagnosticReport, LadderEntry};
pub use growth::{Checkpoint, GrowthClass, GrowthFit, GrowthRecord};
pub use subsets::{max_state_norm, net_cauchy_sup, sign_stress, NetMethod, SignMode, SignStress};
pub use sums::{check_absolute, check_orlicz, multiplier_stress, Multiplier};
pub use tails::{
    subseries_sample, weak_uniform_tail, SampleKind, SubseriesReport, SubseriesSample, WeakMethod, WeakTailEstimate,
};

/// Finite window `(start, start + width]` of term indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailWindow {
    pub start: usize,
    pub width: usize,
}

impl TailWindow {
    pub fn new(start: usize, width: usize) -> Result<Self> {
        if width == 0 {
            return Err(invalid("window width must be >= 1"));
        }
        Ok(TailWindow { start, width })
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<usize> {
        self.start + 1..=self.start + self.width
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// One condition's statistic, the method that produced it and the verdict
/// drawn from it.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConditionEvidence {
    pub statistic: f64,
    pub method: String,
    pub samples: u64,
    pub verdict: Verdict,
    pub detail: String,
}

/// Terms of a finite index list laid out densely over the union of their
/// supports.
#[derive(Debug, Clone)]
pub(crate) struct TermBlock {
    /// `rows[i][j]`: coordinate `coords[j]` of the `i`-th term.
    pub rows: Vec<Vec<f64>>,
    pub coords: Vec<usize>,
    pub one_dim: bool,
    /// No coordinate is shared by two terms.
    pub disjoint: bool,
}

impl TermBlock {
    pub fn collect(spec: &SeriesSpec, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut terms: Vec<Vec<(usize, f64)>> = Vec::new();
        for n in indices {
            let entries = match spec.term_parts::<f64>(n)? {
                Term::Scalar(x) => vec![(1, x)],
                Term::Coordinate(i, x) => vec![(i, x)],
                Term::General(v) => v.entries().map(|(i, x)| (i, *x)).collect(),
            };
            terms.push(entries.into_iter().filter(|(_, x)| *x != 0.0).collect());
        }
        let mut position: HashMap<usize, usize> = HashMap::new();
        let mut coords = Vec::new();
        let mut disjoint = true;
        for entries in &terms {
            for &(i, _) in entries {
                if position.contains_key(&i) {
                    disjoint = false;
                } else {
                    position.insert(i, coords.len());
                    coords.push(i);
                }
            }
        }
        let rows = terms
            .iter()
            .map(|entries| {
                let mut row = vec![0.0; coords.len()];
                for &(i, x) in entries {
                    row[position[&i]] += x;
                }
                row
            })
            .collect();
        Ok(TermBlock {
            rows,
            one_dim: spec.is_scalar() || coords.len() <= 1,
            coords,
            disjoint,
        })
    }

    pub fn row_norms(&self) -> Vec<f64> {
        self.rows.iter().map(|r| norm2(r)).collect()
    }
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    crate::workspace::lp_norm_f64(v.iter().copied(), 2.0)
}

/// `sqrt(Σ a_i²)` with compensation.
pub(crate) fn root_sum_squares(values: impl Iterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0, 0.0);
    for v in values {
        f64::compensated_add(&mut s, &mut c, v * v);
    }
    (s + c).sqrt()
}

/// Effective truncation: never beyond the terms a finite series holds.
pub(crate) fn available(spec: &SeriesSpec, n: usize) -> usize {
    spec.len().map_or(n, |len| len.min(n))
}
