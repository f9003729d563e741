use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{available, root_sum_squares, TailWindow, TermBlock};
use crate::error::{invalid, Error, Result};
use crate::rng::stream_rng;
use crate::series::SeriesSpec;

pub const MAX_EXHAUSTIVE: usize = 24;
const GRAY_BITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NetMethod {
    /// All `2^K - 1` nonempty subsets.
    Exhaustive,
    /// Exact for one-dimensional and disjoint-support windows.
    GreedySignAlign,
    /// `(Σ ‖x_n‖²)^{1/2}`, valid for disjoint supports.
    ClosedFormCoordinate,
}

impl NetMethod {
    pub fn name(self) -> &'static str {
        match self {
            NetMethod::Exhaustive => "exhaustive",
            NetMethod::GreedySignAlign => "greedy-sign-align",
            NetMethod::ClosedFormCoordinate => "closed-form-coordinate",
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Extreme {
    norm_sq: f64,
    mask: u64,
}

impl Extreme {
    fn better_max(self, other: Extreme) -> Extreme {
        if other.norm_sq > self.norm_sq || (other.norm_sq == self.norm_sq && other.mask < self.mask) {
            other
        } else {
            self
        }
    }

    fn better_min(self, other: Extreme) -> Extreme {
        if other.norm_sq < self.norm_sq || (other.norm_sq == self.norm_sq && other.mask < self.mask) {
            other
        } else {
            self
        }
    }
}

/// Visits every state `start + Σ_{i∈S} rows[i]`, `S ⊆ {0..K}`, and returns
/// the states of largest and smallest norm. The top `K - gray_bits` bits
/// split the work into independent chunks; within a chunk the low bits
/// follow a Gray code so each step flips one row. Ties go to the smaller
/// mask, so the result does not depend on how chunks are scheduled.
fn extreme_states(start: &[f64], rows: &[Vec<f64>], gray_bits: usize) -> (Extreme, Extreme) {
    let k = rows.len();
    let low = gray_bits.min(k);
    let high = k - low;
    let chunk = |c: u64| {
        let mut cur = start.to_vec();
        for j in 0..high {
            if c >> j & 1 == 1 {
                for (x, r) in cur.iter_mut().zip(&rows[low + j]) {
                    *x += r;
                }
            }
        }
        let mut gray: u64 = 0;
        let state = |cur: &[f64], gray: u64| Extreme {
            norm_sq: cur.iter().map(|x| x * x).sum(),
            mask: (c << low) | gray,
        };
        let first = state(&cur, gray);
        let (mut best, mut worst) = (first, first);
        for i in 1u64..(1u64 << low) {
            let bit = i.trailing_zeros() as usize;
            gray ^= 1 << bit;
            let add = gray >> bit & 1 == 1;
            for (x, r) in cur.iter_mut().zip(&rows[bit]) {
                if add {
                    *x += r;
                } else {
                    *x -= r;
                }
            }
            let s = state(&cur, gray);
            best = best.better_max(s);
            worst = worst.better_min(s);
        }
        (best, worst)
    };
    (0..1u64 << high)
        .into_par_iter()
        .map(chunk)
        .reduce_with(|a, b| (a.0.better_max(b.0), a.1.better_min(b.1)))
        .expect("at least one chunk")
}

/// Largest `‖start + Σ_{i∈S} rows[i]‖` over all `S`, with the mask of the
/// maximising `S` (bit `i` for row `i`). `gray_bits` only changes how the
/// enumeration is split across workers.
pub fn max_state_norm(start: &[f64], rows: &[Vec<f64>], gray_bits: usize) -> (f64, u64) {
    let (best, _) = extreme_states(start, rows, gray_bits);
    (best.norm_sq.sqrt(), best.mask)
}

/// Estimate of `sup { ‖Σ_{n∈F} x_n‖ : F ⊆ (N, N+K] }`.
pub fn net_cauchy_sup(spec: &SeriesSpec, window: TailWindow, method: NetMethod) -> Result<f64> {
    if method == NetMethod::Exhaustive && window.width > MAX_EXHAUSTIVE {
        return Err(invalid(format!(
            "exhaustive enumeration needs K <= {MAX_EXHAUSTIVE}, got {}",
            window.width
        )));
    }
    let block = TermBlock::collect(spec, window.indices())?;
    net_sup_of_block(&block, method)
}

pub(crate) fn net_sup_of_block(block: &TermBlock, method: NetMethod) -> Result<f64> {
    match method {
        NetMethod::Exhaustive => {
            let start = vec![0.0; block.coords.len()];
            Ok(max_state_norm(&start, &block.rows, GRAY_BITS).0)
        }
        NetMethod::GreedySignAlign if block.one_dim => {
            let (mut pos, mut neg) = (0.0f64, 0.0f64);
            for row in &block.rows {
                let x = row.first().copied().unwrap_or(0.0);
                if x > 0.0 {
                    pos += x;
                } else {
                    neg -= x;
                }
            }
            Ok(pos.max(neg))
        }
        NetMethod::GreedySignAlign | NetMethod::ClosedFormCoordinate if block.disjoint => {
            Ok(root_sum_squares(block.row_norms().into_iter()))
        }
        _ => Err(Error::UnsupportedMethod(format!(
            "{} needs {} term supports",
            method.name(),
            if method == NetMethod::GreedySignAlign {
                "one-dimensional or disjoint"
            } else {
                "disjoint"
            }
        ))),
    }
}

/// Best exact method for a block: the closed forms where they apply,
/// enumeration otherwise.
pub(crate) fn exact_method_for(block: &TermBlock) -> NetMethod {
    if block.one_dim {
        NetMethod::GreedySignAlign
    } else if block.disjoint {
        NetMethod::ClosedFormCoordinate
    } else {
        NetMethod::Exhaustive
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum SignMode {
    Exhaustive,
    Sampled { count: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SignStress {
    pub n: usize,
    pub max: f64,
    pub min: f64,
    /// Sign pattern attaining `max`, normalised so the signed sum's first
    /// nonzero coordinate is positive.
    pub argmax: Vec<i8>,
    pub patterns: u64,
    pub seed: Option<u64>,
}

/// `max_ε ‖Σ_{n≤N} ε_n x_n‖` over sign patterns, exhaustively or sampled.
pub fn sign_stress(spec: &SeriesSpec, n: usize, mode: SignMode) -> Result<SignStress> {
    let n = available(spec, n);
    let block = TermBlock::collect(spec, 1..=n)?;
    let dim = block.coords.len();
    let signed_sum = |pattern: &[i8]| -> Vec<f64> {
        let mut v = vec![0.0; dim];
        for (row, &e) in block.rows.iter().zip(pattern) {
            for (x, r) in v.iter_mut().zip(row) {
                *x += f64::from(e) * r;
            }
        }
        v
    };
    let (max, min, mut argmax, patterns, seed) = match mode {
        SignMode::Exhaustive => {
            if n > MAX_EXHAUSTIVE {
                return Err(invalid(format!("exhaustive sign stress needs N <= {MAX_EXHAUSTIVE}, got {n}")));
            }
            // Σ ε x = 2 Σ_{ε=+1} x - Σ x
            let mut start = vec![0.0; dim];
            for row in &block.rows {
                for (x, r) in start.iter_mut().zip(row) {
                    *x -= r;
                }
            }
            let doubled: Vec<Vec<f64>> = block.rows.iter().map(|r| r.iter().map(|x| 2.0 * x).collect()).collect();
            let (best, worst) = extreme_states(&start, &doubled, GRAY_BITS);
            let pattern: Vec<i8> = (0..n).map(|i| if best.mask >> i & 1 == 1 { 1 } else { -1 }).collect();
            (best.norm_sq.sqrt(), worst.norm_sq.sqrt(), pattern, 1u64 << n, None)
        }
        SignMode::Sampled { count, seed } => {
            if count == 0 {
                return Err(invalid("sampled sign stress needs count >= 1"));
            }
            let results: Vec<(f64, Vec<i8>)> = (0..count)
                .into_par_iter()
                .map(|r| {
                    let mut rng = stream_rng(seed, r);
                    let pattern: Vec<i8> = (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
                    (super::norm2(&signed_sum(&pattern)), pattern)
                })
                .collect();
            let min = results.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
            let (max, pattern) = results
                .into_iter()
                .reduce(|a, b| if b.0 > a.0 { b } else { a })
                .expect("count >= 1");
            (max, min, pattern, count, Some(seed))
        }
    };
    let v = signed_sum(&argmax);
    if v.iter().find(|x| **x != 0.0).is_some_and(|x| *x < 0.0) {
        argmax.iter_mut().for_each(|e| *e = -*e);
    }
    Ok(SignStress {
        n,
        max,
        min,
        argmax,
        patterns,
        seed,
    })
}
