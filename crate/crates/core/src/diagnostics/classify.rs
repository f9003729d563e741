use std::collections::BTreeMap;

use serde::Serialize;

use super::growth::{GrowthClass, GrowthRecord};
use super::subsets::{exact_method_for, net_sup_of_block};
use super::sums::{check_absolute, check_orlicz, multiplier_stress, Multiplier};
use super::tails::{subseries_sample, weak_uniform_tail, SubseriesReport, WeakMethod};
use super::{available, sign_stress, ConditionEvidence, SignMode, TailWindow, TermBlock, Verdict};
use crate::error::{invalid, Result};
use crate::series::SeriesSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyConfig {
    /// Largest term index any sub-diagnostic may touch.
    pub budget: usize,
    pub seed: u64,
    /// Window starts for the net-sup ladder.
    pub ladder: Vec<usize>,
    pub width: usize,
    pub subseries_count: u64,
    /// Truncations for exhaustive sign stress, smallest first.
    pub sign_ladder: [usize; 2],
}

impl ClassifyConfig {
    pub fn new(budget: usize, seed: u64) -> Self {
        ClassifyConfig {
            budget,
            seed,
            ladder: vec![100, 1_000, 10_000],
            width: 20,
            subseries_count: 8,
            sign_ladder: [10, 20],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Absolute,
    UnconditionalEvidence,
    ConditionalEvidence,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LadderEntry {
    pub n: usize,
    pub k: usize,
    pub statistic: f64,
    pub method: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DiagnosticReport {
    pub series: String,
    pub budget: usize,
    pub seed: u64,
    pub verdict: Classification,
    pub heuristic: bool,
    pub per_condition: BTreeMap<String, ConditionEvidence>,
    pub growth_fits: BTreeMap<String, GrowthRecord>,
    pub net_ladder: Vec<LadderEntry>,
}

impl DiagnosticReport {
    pub fn passes(&self, condition: &str) -> bool {
        self.per_condition.get(condition).is_some_and(|c| c.verdict == Verdict::Pass)
    }

    /// All checkpoint tables as `series,n,value` rows.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["series", "n", "value"])?;
        for (label, record) in &self.growth_fits {
            for c in &record.checkpoints {
                w.write_record([label.clone(), c.n.to_string(), format!("{:e}", c.value)])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

const TINY: f64 = 1e-12;
const SIGN_GROWTH: f64 = 0.1;

fn evidence(statistic: f64, method: &str, samples: u64, verdict: Verdict, detail: String) -> ConditionEvidence {
    ConditionEvidence {
        statistic,
        method: method.to_string(),
        samples,
        verdict,
        detail,
    }
}

fn growth_evidence(record: &GrowthRecord, method: &str) -> ConditionEvidence {
    let increasing = record.checkpoints.windows(2).all(|w| w[1].value >= w[0].value);
    let verdict = match record.class() {
        GrowthClass::Bounded => Verdict::Pass,
        GrowthClass::Logarithmic | GrowthClass::Polynomial => Verdict::Fail,
        // no clean template; steady growth still reads as unbounded
        GrowthClass::Other if increasing => Verdict::Fail,
        GrowthClass::Other => Verdict::Inconclusive,
    };
    evidence(
        record.last(),
        method,
        record.checkpoints.last().map_or(0, |c| c.n as u64),
        verdict,
        format!("growth class {:?}, dominance {:.3}", record.class(), record.fit.dominance).to_lowercase(),
    )
}

pub fn classify(spec: &SeriesSpec, budget: usize) -> Result<DiagnosticReport> {
    classify_with(spec, &ClassifyConfig::new(budget, 0))
}

/// Runs every sub-diagnostic within the budget and combines the outcomes.
/// The verdict is heuristic evidence from finite truncations.
pub fn classify_with(spec: &SeriesSpec, config: &ClassifyConfig) -> Result<DiagnosticReport> {
    if config.budget == 0 {
        return Err(invalid("budget must be >= 1"));
    }
    let budget = available(spec, config.budget);
    let ((absolute, orlicz), (multiplier, (sub_large, sub_small))) = rayon::join(
        || rayon::join(|| check_absolute(spec, budget), || check_orlicz(spec, budget)),
        || {
            rayon::join(
                || multiplier_stress(spec, &Multiplier::AlternatingLog, budget),
                || {
                    rayon::join(
                        || subseries_sample(spec, budget, config.subseries_count, config.seed),
                        || subseries_sample(spec, (budget / 100).max(2), config.subseries_count, config.seed),
                    )
                },
            )
        },
    );
    let (absolute, orlicz, multiplier) = (absolute?, orlicz?, multiplier?);
    let (sub_large, sub_small) = (sub_large?, sub_small?);

    let mut per_condition = BTreeMap::new();
    per_condition.insert("absolute".to_string(), growth_evidence(&absolute, "check-absolute"));
    per_condition.insert("orlicz".to_string(), growth_evidence(&orlicz, "check-orlicz"));
    per_condition.insert("bounded-multiplier".to_string(), growth_evidence(&multiplier, "multiplier-stress:alternating-log"));

    // net-sup ladder
    let mut net_ladder = Vec::new();
    let mut last_block = None;
    for &n in &config.ladder {
        if n + config.width > budget {
            continue;
        }
        let block = TermBlock::collect(spec, TailWindow::new(n, config.width)?.indices())?;
        let method = exact_method_for(&block);
        net_ladder.push(LadderEntry {
            n,
            k: config.width,
            statistic: net_sup_of_block(&block, method)?,
            method: method.name().to_string(),
        });
        last_block = Some(n);
    }
    let net = match (net_ladder.first(), net_ladder.last()) {
        (Some(first), Some(last)) if net_ladder.len() >= 2 => {
            let monotone = net_ladder.windows(2).all(|w| w[1].statistic <= w[0].statistic * (1.0 + 1e-12));
            let decays = last.statistic <= 0.5 * first.statistic || last.statistic <= TINY;
            let verdict = if monotone && decays { Verdict::Pass } else { Verdict::Fail };
            evidence(
                last.statistic,
                &last.method,
                net_ladder.len() as u64,
                verdict,
                format!("window sup {:e} at N={} vs {:e} at N={}", last.statistic, last.n, first.statistic, first.n),
            )
        }
        _ => evidence(
            f64::NAN,
            "net-cauchy-sup",
            net_ladder.len() as u64,
            Verdict::Inconclusive,
            "budget too small for two ladder windows".into(),
        ),
    };
    per_condition.insert("net-cauchy".to_string(), net);

    if let Some(n) = last_block {
        let window = TailWindow::new(n, config.width)?;
        let est = weak_uniform_tail(spec, window, WeakMethod::ClosedFormCoordinate).or_else(|_| {
            weak_uniform_tail(
                spec,
                window,
                WeakMethod::SphereSearch {
                    iterations: 200,
                    seed: config.seed,
                },
            )
        })?;
        let verdict = if net_ladder.len() >= 2 {
            per_condition["net-cauchy"].verdict
        } else {
            Verdict::Inconclusive
        };
        per_condition.insert(
            "weak-uniform-tail".to_string(),
            evidence(
                est.statistic,
                &est.method,
                1,
                verdict,
                format!("window ({n}, {}]; the tail beyond the window is not examined", n + config.width),
            ),
        );
    }

    // sign stress growth between the two truncations
    let [small_n, large_n] = config.sign_ladder;
    let sign = if large_n <= budget {
        let small = sign_stress(spec, small_n, SignMode::Exhaustive)?;
        let large = sign_stress(spec, large_n, SignMode::Exhaustive)?;
        let growth = if small.max > TINY { (large.max - small.max) / small.max } else { large.max };
        let verdict = if growth > SIGN_GROWTH { Verdict::Fail } else { Verdict::Pass };
        evidence(
            large.max,
            "sign-stress:exhaustive",
            small.patterns + large.patterns,
            verdict,
            format!("max signed sum grows by {:.3} from N={small_n} to N={large_n}", growth),
        )
    } else {
        evidence(f64::NAN, "sign-stress:exhaustive", 0, Verdict::Inconclusive, "budget too small".into())
    };
    per_condition.insert("signed-series".to_string(), sign);

    let (sub, identity) = subseries_evidence(&sub_large, &sub_small);
    per_condition.insert("subseries".to_string(), sub);
    per_condition.insert("identity-order".to_string(), identity);

    let pass = |k: &str| per_condition.get(k).is_some_and(|c| c.verdict == Verdict::Pass);
    let fail = |k: &str| per_condition.get(k).is_some_and(|c| c.verdict == Verdict::Fail);
    let unconditional = ["orlicz", "net-cauchy", "signed-series", "bounded-multiplier", "subseries", "identity-order"]
        .iter()
        .all(|k| pass(k));
    let verdict = if unconditional && pass("absolute") {
        Classification::Absolute
    } else if unconditional {
        Classification::UnconditionalEvidence
    } else if pass("identity-order") && (fail("signed-series") || fail("subseries") || fail("bounded-multiplier")) {
        Classification::ConditionalEvidence
    } else {
        Classification::Inconclusive
    };

    let mut growth_fits = BTreeMap::new();
    growth_fits.insert("absolute".to_string(), absolute);
    growth_fits.insert("orlicz".to_string(), orlicz);
    growth_fits.insert("multiplier-alternating-log".to_string(), multiplier);
    Ok(DiagnosticReport {
        series: spec.name(),
        budget,
        seed: config.seed,
        verdict,
        heuristic: true,
        per_condition,
        growth_fits,
        net_ladder,
    })
}

fn subseries_evidence(large: &SubseriesReport, small: &SubseriesReport) -> (ConditionEvidence, ConditionEvidence) {
    let samples = large.samples.len() as u64;
    let divergent = large.worst > TINY && large.worst >= 0.5 * small.worst;
    let sub = evidence(
        large.worst,
        "subseries-sample",
        samples,
        if divergent { Verdict::Fail } else { Verdict::Pass },
        format!(
            "worst tail oscillation {:e} at N={} vs {:e} at N={}",
            large.worst, large.n, small.worst, small.n
        ),
    );
    let (a, b) = (large.identity_oscillation, small.identity_oscillation);
    let converges = a <= TINY || a <= 0.5 * b;
    let identity = evidence(
        a,
        "identity-oscillation",
        1,
        if converges { Verdict::Pass } else { Verdict::Fail },
        format!("tail oscillation {a:e} at N={} vs {b:e} at N={}", large.n, small.n),
    );
    (sub, identity)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_series() {
        let budget = 100_000;
        let r = classify(&SeriesSpec::coordinate_decay(2.0).unwrap(), budget).unwrap();
        assert_eq!(r.verdict, Classification::Absolute, "{r:#?}");
        let r = classify(&SeriesSpec::coordinate_decay(1.0).unwrap(), budget).unwrap();
        assert_eq!(r.verdict, Classification::UnconditionalEvidence, "{r:#?}");
        assert!(!r.passes("absolute"));
        let r = classify(&SeriesSpec::alternating_harmonic(), budget).unwrap();
        assert_eq!(r.verdict, Classification::ConditionalEvidence, "{r:#?}");
        let r = classify(&SeriesSpec::harmonic(), budget).unwrap();
        assert_eq!(r.verdict, Classification::Inconclusive, "{r:#?}");
    }

    #[test]
    fn report_serializes() {
        let r = classify(&SeriesSpec::coordinate_decay(2.0).unwrap(), 20_000).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["verdict"], "absolute");
        assert!(json["perCondition"]["orlicz"]["method"].is_string());
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("series,n,value"));
    }

    #[test]
    fn tiny_budget_is_inconclusive_not_an_error() {
        let r = classify(&SeriesSpec::coordinate_decay(1.0).unwrap(), 50).unwrap();
        assert_eq!(r.verdict, Classification::Inconclusive);
        assert!(classify(&SeriesSpec::harmonic(), 0).is_err());
    }
}
