//! Constructive permutations: greedy Riemann rearrangement of a real series
//! to a target, block permutations that break the Cauchy property, and
//! subseries assembled from disjoint blocks.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::io::Write;

use num_rational::BigRational;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::series::{Permutation, SeriesSpec};
use crate::workspace::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockSign {
    Positive,
    Negative,
}

/// Running sum at the end of a completed sign block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TargetHit {
    pub step: usize,
    pub value: f64,
    pub block: BlockSign,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RearrangementTrace {
    pub target: f64,
    pub tol: f64,
    pub permutation_prefix: Permutation,
    pub term_values: Vec<f64>,
    pub partial_sums: Vec<f64>,
    pub targets_hit: Vec<TargetHit>,
    /// Terms generated from the series, including ones still queued.
    pub budget_used: usize,
    pub converged: bool,
}

/// One JSON-lines record of an exported trace.
#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct TraceLine {
    step: usize,
    term_index: usize,
    term_value: f64,
    running_sum: f64,
}

impl RearrangementTrace {
    pub fn steps(&self) -> usize {
        self.partial_sums.len()
    }

    pub fn final_sum(&self) -> f64 {
        self.partial_sums.last().copied().unwrap_or(0.0)
    }

    /// Writes `{step, termIndex, termValue, runningSum}` per line.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for (k, (&index, (&value, &sum))) in self
            .permutation_prefix
            .as_slice()
            .iter()
            .zip(self.term_values.iter().zip(&self.partial_sums))
            .enumerate()
        {
            let line = TraceLine {
                step: k + 1,
                term_index: index,
                term_value: value,
                running_sum: sum,
            };
            serde_json::to_writer(&mut out, &line)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Largest gap between the recorded running sums and exact rational
    /// prefix sums of the same terms. Cost grows with the denominators, so
    /// this is meant for short traces.
    pub fn max_exact_deviation(&self, spec: &SeriesSpec) -> Result<f64> {
        let mut exact = <BigRational as Scalar>::zero();
        let mut worst = 0.0f64;
        for (k, &index) in self.permutation_prefix.as_slice().iter().enumerate() {
            exact = exact + spec.scalar_term::<BigRational>(index)?;
            worst = worst.max((exact.as_f64() - self.partial_sums[k]).abs());
        }
        Ok(worst)
    }
}

/// Evidence gathered before steering a series.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PrecheckEvidence {
    pub scanned: usize,
    pub positive_mass: f64,
    pub negative_mass: f64,
    pub threshold: f64,
    pub head_max: f64,
    pub tail_max: f64,
}

/// The positive and negative parts must each exceed `|target| + 1`, and the
/// largest term magnitude in the second half of the scan must be at most half
/// of the largest in the first half.
pub fn precheck(spec: &SeriesSpec, target: f64, budget: usize) -> Result<PrecheckEvidence> {
    if !spec.is_scalar() {
        return Err(Error::NotConditionallyConvergentEvidence(format!(
            "{} is vector-valued; only real series can be steered",
            spec.name()
        )));
    }
    let limit = spec.len().map_or(budget, |len| len.min(budget));
    let threshold = target.abs() + 1.0;
    let mut positive = 0.0f64;
    let mut negative = 0.0f64;
    let mut next_check = 64;
    for n in 1..=limit {
        let x: f64 = spec.scalar_term(n)?;
        if x > 0.0 {
            positive += x;
        } else {
            negative -= x;
        }
        if n >= next_check && positive > threshold && negative > threshold {
            let (head_max, tail_max) = head_tail_max(spec, n)?;
            if tail_max <= 0.5 * head_max {
                return Ok(PrecheckEvidence {
                    scanned: n,
                    positive_mass: positive,
                    negative_mass: negative,
                    threshold,
                    head_max,
                    tail_max,
                });
            }
            next_check = 2 * n;
        }
    }
    Err(Error::NotConditionallyConvergentEvidence(format!(
        "within {limit} terms: positive part {positive:.6}, negative part {negative:.6}, need both > {threshold} with terms tending to 0"
    )))
}

fn head_tail_max(spec: &SeriesSpec, n: usize) -> Result<(f64, f64)> {
    let mut head = 0.0f64;
    let mut tail = 0.0f64;
    for m in 1..=n {
        let a = spec.scalar_term::<f64>(m)?.abs();
        if m <= n / 2 {
            head = head.max(a);
        } else {
            tail = tail.max(a);
        }
    }
    Ok((head, tail))
}

struct TermSource<'a> {
    spec: &'a SeriesSpec,
    next: usize,
    limit: usize,
    positive: VecDeque<(usize, f64)>,
    negative: VecDeque<(usize, f64)>,
}

impl TermSource<'_> {
    /// Next unused term of the given sign. Zero terms met along the way are
    /// handed to `on_zero`.
    fn take(&mut self, sign: BlockSign, on_zero: &mut impl FnMut(usize)) -> Result<Option<(usize, f64)>> {
        loop {
            let queue = match sign {
                BlockSign::Positive => &mut self.positive,
                BlockSign::Negative => &mut self.negative,
            };
            if let Some(t) = queue.pop_front() {
                return Ok(Some(t));
            }
            if self.next > self.limit {
                return Ok(None);
            }
            let n = self.next;
            self.next += 1;
            let x: f64 = self.spec.scalar_term(n)?;
            if x > 0.0 {
                self.positive.push_back((n, x));
            } else if x < 0.0 {
                self.negative.push_back((n, x));
            } else {
                on_zero(n);
            }
        }
    }
}

/// Greedily rearranges a real series toward `target`: unused positive terms
/// while the running sum is `<= target`, then unused negative terms while it
/// is `> target`, alternating. Stops after a completed block lands within
/// `tol`. Running sums use compensated accumulation.
///
/// On budget exhaustion the partial trace is returned inside
/// [`Error::BudgetExceeded`].
pub fn riemann_rearrange(spec: &SeriesSpec, target: f64, tol: f64, budget: usize) -> Result<RearrangementTrace> {
    if !target.is_finite() {
        return Err(invalid(format!("target {target} must be finite")));
    }
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance {tol} must be > 0")));
    }
    if budget == 0 {
        return Err(invalid("budget must be at least one term"));
    }
    precheck(spec, target, budget)?;

    let mut source = TermSource {
        spec,
        next: 1,
        limit: spec.len().map_or(budget, |len| len.min(budget)),
        positive: VecDeque::new(),
        negative: VecDeque::new(),
    };
    let mut prefix = Vec::new();
    let mut values = Vec::new();
    let mut sums = Vec::new();
    let mut hits = Vec::new();
    let (mut sum, mut comp) = (0.0f64, 0.0f64);

    let mut block = if target >= 0.0 {
        BlockSign::Positive
    } else {
        BlockSign::Negative
    };
    let converged = 'outer: loop {
        loop {
            let running = sum + comp;
            let done = match block {
                BlockSign::Positive => running > target,
                BlockSign::Negative => running <= target,
            };
            if done {
                break;
            }
            let mut zeros = Vec::new();
            let next = source.take(block, &mut |n| zeros.push(n))?;
            for n in zeros {
                prefix.push(n);
                values.push(0.0);
                sums.push(sum + comp);
            }
            let Some((n, x)) = next else {
                break 'outer false;
            };
            f64::compensated_add(&mut sum, &mut comp, x);
            prefix.push(n);
            values.push(x);
            sums.push(sum + comp);
        }
        let running = sum + comp;
        hits.push(TargetHit {
            step: sums.len(),
            value: running,
            block,
        });
        if (running - target).abs() <= tol {
            break true;
        }
        block = match block {
            BlockSign::Positive => BlockSign::Negative,
            BlockSign::Negative => BlockSign::Positive,
        };
    };

    let trace = RearrangementTrace {
        target,
        tol,
        permutation_prefix: Permutation::new(prefix)?,
        term_values: values,
        partial_sums: sums,
        targets_hit: hits,
        budget_used: source.next - 1,
        converged,
    };
    if converged {
        Ok(trace)
    } else {
        Err(Error::BudgetExceeded {
            budget,
            trace: Box::new(trace),
        })
    }
}

fn validate_blocks(blocks: &[BTreeSet<usize>], universe: Option<usize>) -> Result<HashSet<usize>> {
    let mut seen = HashSet::new();
    for (k, block) in blocks.iter().enumerate() {
        for &i in block {
            if i == 0 {
                return Err(Error::InvalidBlocks(format!("block {k} contains index 0")));
            }
            if let Some(u) = universe {
                if i > u {
                    return Err(Error::InvalidBlocks(format!(
                        "block {k} index {i} exceeds the universe {u}"
                    )));
                }
            }
            if !seen.insert(i) {
                return Err(Error::InvalidBlocks(format!("index {i} appears in two blocks")));
            }
        }
    }
    Ok(seen)
}

/// A bijection of `{1..universe}` in which every block occupies consecutive
/// positions.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BlockPermutation {
    pub permutation: Permutation,
    /// 1-based inclusive position range of each nonempty block.
    pub block_positions: Vec<(usize, usize)>,
}

/// Lists the unused off-block indices below each block's minimum, then the
/// block itself, block after block; leftover indices close the listing.
pub fn non_cauchy_block_permutation(blocks: &[BTreeSet<usize>], fill_universe: usize) -> Result<BlockPermutation> {
    let in_blocks = validate_blocks(blocks, Some(fill_universe))?;
    let mut order = Vec::with_capacity(fill_universe);
    let mut positions = Vec::new();
    let mut cursor = 1;
    let mut emit_gap_below = |limit: usize, order: &mut Vec<usize>| {
        while cursor < limit {
            if !in_blocks.contains(&cursor) {
                order.push(cursor);
            }
            cursor += 1;
        }
    };
    for block in blocks.iter().filter(|b| !b.is_empty()) {
        emit_gap_below(*block.first().unwrap(), &mut order);
        let start = order.len() + 1;
        order.extend(block.iter().copied());
        positions.push((start, order.len()));
    }
    emit_gap_below(fill_universe + 1, &mut order);
    Ok(BlockPermutation {
        permutation: Permutation::new(order)?,
        block_positions: positions,
    })
}

/// Increasing enumeration of the union of disjoint blocks.
pub fn subseries_from_blocks(blocks: &[BTreeSet<usize>]) -> Result<Vec<usize>> {
    let all = validate_blocks(blocks, None)?;
    let mut out: Vec<usize> = all.into_iter().collect();
    out.sort_unstable();
    Ok(out)
}
