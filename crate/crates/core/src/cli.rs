//! The `uncond` command-line front end.
//!
//! Every run writes one JSON document (or one CSV table) carrying
//! `toolVersion`, `argv` and `seed`. Exit status: 0 success, 2 invalid
//! arguments, 3 budget exceeded, 4 evidence that a precondition fails.
//! `UNCOND_BUDGET` sets the default term budget.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::diagnostics::{
    classify_with, multiplier_stress, net_cauchy_sup, sign_stress, subseries_sample, weak_uniform_tail,
    ClassifyConfig, Multiplier, NetMethod, SignMode, TailWindow, WeakMethod,
};
use crate::error::{invalid, Error, Result};
use crate::frame::{analyze, reconstruct, Frame, ThresholdRule};
use crate::rearrangement::riemann_rearrange;
use crate::series::{SeriesSpec, SignSource, SummationStrategy};
use crate::sgd::{permutation_sensitivity, GradientStream, LrSchedule, SchedulePairing};
use crate::workspace::ScalarMode;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Debug, Parser)]
#[command(name = "uncond", version, about = "Finite-truncation diagnostics for unconditional convergence")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the document here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Seed for every sampled procedure.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every diagnostic and report a heuristic verdict.
    Classify {
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(long, env = "UNCOND_BUDGET", value_parser = parse_count)]
        budget: Option<usize>,
    },
    /// Steer a conditionally convergent real series to a target.
    Rearrange {
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(long, allow_negative_numbers = true)]
        target: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, env = "UNCOND_BUDGET", value_parser = parse_count)]
        budget: Option<usize>,
        /// JSON-lines trace of every step.
        #[arg(long, default_value = "rearrange-trace.jsonl")]
        trace: PathBuf,
    },
    /// Supremum of finite-subset sums over a tail window.
    NetSup {
        #[command(flatten)]
        series: SeriesArgs,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, value_enum, default_value_t = NetArg::Exhaustive)]
        method: NetArg,
    },
    /// Largest signed partial sum over sign patterns.
    SignStress {
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(long, value_parser = parse_count)]
        n: usize,
        /// Sample this many patterns instead of enumerating all of them.
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Partial sums of a multiplied series.
    MultiplierStress {
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(long, value_enum)]
        multiplier: MultiplierArg,
        /// Constant value, or the bound for random multipliers.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        c: f64,
        /// Kept indices for the mask multiplier, comma separated.
        #[arg(long, value_delimiter = ',')]
        keep: Vec<usize>,
        #[arg(long, value_parser = parse_count)]
        n: usize,
    },
    /// Weak supremum over unit functionals on a tail window.
    WeakTail {
        #[command(flatten)]
        series: SeriesArgs,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, value_enum, default_value_t = WeakArg::ClosedForm)]
        method: WeakArg,
        #[arg(long, default_value_t = 200)]
        iterations: usize,
    },
    /// Tail oscillation of random and sign-split subseries.
    Subseries {
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(long, value_parser = parse_count)]
        n: usize,
        #[arg(long, default_value_t = 16)]
        count: u64,
    },
    /// Order sensitivity of accumulated gradient updates.
    SgdSensitivity(SgdArgs),
    /// Threshold frame coefficients and reconstruct with the canonical dual.
    FrameThreshold(FrameArgs),
}

#[derive(Debug, Args)]
struct SeriesArgs {
    /// alternating-harmonic, harmonic, coordinate-decay, signed-coordinate or file.
    #[arg(long)]
    series: String,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Signs for signed-coordinate: `alternating` or `seeded` (uses --seed).
    #[arg(long, default_value = "seeded")]
    signs: String,
    /// Term table for `--series file`.
    #[arg(long)]
    terms: Option<PathBuf>,
    /// Generate terms as exact rationals.
    #[arg(long)]
    exact: bool,
}

#[derive(Debug, Args)]
struct WindowArgs {
    /// Window start N; the window is (N, N+K].
    #[arg(long, value_parser = parse_count_or_zero)]
    start: usize,
    #[arg(long, value_parser = parse_count)]
    width: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NetArg {
    Exhaustive,
    GreedySignAlign,
    ClosedFormCoordinate,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum WeakArg {
    ClosedForm,
    SphereSearch,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MultiplierArg {
    Constant,
    AlternatingLog,
    RandomBounded,
    Mask,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StreamArg {
    Quadratic,
    IllConditioned,
    HeavyTailed,
    File,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScheduleArg {
    Constant,
    InverseSqrt,
}

#[derive(Debug, Args)]
struct SgdArgs {
    #[arg(long, value_enum, default_value_t = StreamArg::Quadratic)]
    stream: StreamArg,
    /// Gradient file for `--stream file`.
    #[arg(long)]
    stream_file: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    dim: usize,
    #[arg(long, value_parser = parse_count, default_value = "1000")]
    samples: usize,
    /// Magnitude spread of the ill-conditioned stream, in decades.
    #[arg(long, default_value_t = 10.0)]
    decades: f64,
    #[arg(long, default_value_t = 1.5)]
    tail_index: f64,
    #[arg(long, value_enum, default_value_t = ScheduleArg::Constant)]
    schedule: ScheduleArg,
    #[arg(long, default_value_t = 0.01)]
    eta: f64,
    #[arg(long, default_value_t = 50)]
    perms: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = vec![StrategyArg::Naive, StrategyArg::Compensated, StrategyArg::Pairwise, StrategyArg::ExactRational])]
    strategies: Vec<StrategyArg>,
    /// Let each rate travel with its sample instead of its position.
    #[arg(long)]
    rate_follows_sample: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Naive,
    Compensated,
    Pairwise,
    ExactRational,
}

impl From<StrategyArg> for SummationStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Naive => SummationStrategy::Naive,
            StrategyArg::Compensated => SummationStrategy::Compensated,
            StrategyArg::Pairwise => SummationStrategy::Pairwise,
            StrategyArg::ExactRational => SummationStrategy::ExactRational,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FrameArg {
    Orthonormal,
    MercedesBenz,
    RotatedBases,
    RandomUnit,
    Haar,
    File,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RuleArg {
    Hard,
    Soft,
}

#[derive(Debug, Args)]
struct FrameArgs {
    #[arg(long, value_enum)]
    frame: FrameArg,
    #[arg(long)]
    frame_file: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Number of vectors (random-unit) or bases (rotated-bases).
    #[arg(long, default_value_t = 3)]
    count: usize,
    /// Haar resolution `k`, on `2^k` points.
    #[arg(long, default_value_t = 3)]
    level: u32,
    #[arg(long, value_enum, default_value_t = RuleArg::Hard)]
    rule: RuleArg,
    /// Thresholds, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    tau: Vec<f64>,
    /// Signal coordinates, comma separated; otherwise random signals (uses --seed).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    signal: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    signals: usize,
}

/// Accepts integers written as `1000000`, `1e6` or `2.5e3`.
fn parse_count_or_zero(s: &str) -> std::result::Result<usize, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !(x >= 0.0) || x.fract() != 0.0 || x > 1e15 {
        return Err(format!("`{s}` is not a nonnegative integer count"));
    }
    Ok(x as usize)
}

fn parse_count(s: &str) -> std::result::Result<usize, String> {
    match parse_count_or_zero(s)? {
        0 => Err(format!("`{s}` must be at least 1")),
        n => Ok(n),
    }
}

fn default_budget(budget: Option<usize>) -> usize {
    budget.unwrap_or(DEFAULT_BUDGET)
}

fn need_seed(seed: Option<u64>, what: &str) -> Result<u64> {
    seed.ok_or_else(|| invalid(format!("{what} is sampled; pass --seed")))
}

impl SeriesArgs {
    fn spec(&self, seed: Option<u64>) -> Result<SeriesSpec> {
        let spec = match self.series.as_str() {
            "alternating-harmonic" => SeriesSpec::alternating_harmonic(),
            "harmonic" => SeriesSpec::harmonic(),
            "coordinate-decay" => SeriesSpec::coordinate_decay(self.alpha)?,
            "signed-coordinate" => {
                let signs = match self.signs.as_str() {
                    "alternating" => SignSource::Alternating,
                    "seeded" => SignSource::Seeded {
                        seed: need_seed(seed, "signed-coordinate with seeded signs")?,
                    },
                    other => return Err(invalid(format!("unknown sign source `{other}`"))),
                };
                SeriesSpec::signed_coordinate(signs, self.alpha)?
            }
            "file" => {
                let path = self.terms.as_ref().ok_or_else(|| invalid("--series file needs --terms PATH"))?;
                SeriesSpec::from_file(path)?
            }
            other => {
                return Err(invalid(format!(
                    "unknown series family `{other}` (expected alternating-harmonic, harmonic, coordinate-decay, signed-coordinate or file)"
                )))
            }
        };
        Ok(if self.exact {
            spec.with_mode(ScalarMode::ExactRational)
        } else {
            spec
        })
    }
}

/// A CSV table: header and rows.
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

struct Outcome {
    result: Value,
    table: Table,
    seed: Option<u64>,
}

fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    Ok(serde_json::to_value(x)?)
}

fn window(args: &WindowArgs) -> Result<TailWindow> {
    TailWindow::new(args.start, args.width)
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let seed = cli.seed;
    match &cli.command {
        Command::Classify { series, budget } => {
            let spec = series.spec(seed)?;
            let seed = seed.unwrap_or(0);
            let report = classify_with(&spec, &ClassifyConfig::new(default_budget(*budget), seed))?;
            let mut rows = Vec::new();
            for (label, record) in &report.growth_fits {
                for c in &record.checkpoints {
                    rows.push(vec![label.clone(), c.n.to_string(), format!("{:e}", c.value)]);
                }
            }
            Ok(Outcome {
                result: to_value(&report)?,
                table: Table {
                    header: vec!["series", "n", "value"],
                    rows,
                },
                seed: Some(seed),
            })
        }
        Command::Rearrange {
            series,
            target,
            tol,
            budget,
            trace,
        } => {
            let spec = series.spec(seed)?;
            let budget = default_budget(*budget);
            let outcome = riemann_rearrange(&spec, *target, *tol, budget);
            // a partial trace is still written when the budget runs out
            match &outcome {
                Ok(t) => t.write_jsonl(BufWriter::new(File::create(trace)?))?,
                Err(Error::BudgetExceeded { trace: t, .. }) => t.write_jsonl(BufWriter::new(File::create(trace)?))?,
                Err(_) => {}
            }
            let t = outcome?;
            let rows = t
                .permutation_prefix
                .as_slice()
                .iter()
                .zip(t.term_values.iter().zip(&t.partial_sums))
                .enumerate()
                .map(|(k, (i, (v, s)))| vec![(k + 1).to_string(), i.to_string(), format!("{v:e}"), format!("{s:e}")])
                .collect();
            Ok(Outcome {
                result: json!({
                    "series": spec.name(),
                    "target": t.target,
                    "tol": t.tol,
                    "budget": budget,
                    "converged": t.converged,
                    "steps": t.steps(),
                    "finalSum": t.final_sum(),
                    "budgetUsed": t.budget_used,
                    "targetsHit": t.targets_hit.len(),
                    "traceFile": trace.display().to_string(),
                }),
                table: Table {
                    header: vec!["step", "termIndex", "termValue", "runningSum"],
                    rows,
                },
                seed,
            })
        }
        Command::NetSup {
            series,
            window: w,
            method,
        } => {
            let spec = series.spec(seed)?;
            let method = match method {
                NetArg::Exhaustive => NetMethod::Exhaustive,
                NetArg::GreedySignAlign => NetMethod::GreedySignAlign,
                NetArg::ClosedFormCoordinate => NetMethod::ClosedFormCoordinate,
            };
            let statistic = net_cauchy_sup(&spec, window(w)?, method)?;
            Ok(Outcome {
                result: json!({
                    "series": spec.name(),
                    "start": w.start,
                    "width": w.width,
                    "method": method.name(),
                    "statistic": statistic,
                }),
                table: Table {
                    header: vec!["start", "width", "method", "statistic"],
                    rows: vec![vec![
                        w.start.to_string(),
                        w.width.to_string(),
                        method.name().into(),
                        format!("{statistic:e}"),
                    ]],
                },
                seed,
            })
        }
        Command::SignStress { series, n, samples } => {
            let spec = series.spec(seed)?;
            let mode = match samples {
                Some(count) => SignMode::Sampled {
                    count: *count,
                    seed: need_seed(seed, "sampled sign stress")?,
                },
                None => SignMode::Exhaustive,
            };
            let s = sign_stress(&spec, *n, mode)?;
            let pattern: String = s.argmax.iter().map(|e| if *e > 0 { '+' } else { '-' }).collect();
            Ok(Outcome {
                table: Table {
                    header: vec!["n", "max", "min", "patterns", "argmax"],
                    rows: vec![vec![
                        s.n.to_string(),
                        format!("{:e}", s.max),
                        format!("{:e}", s.min),
                        s.patterns.to_string(),
                        pattern,
                    ]],
                },
                result: json!({ "series": spec.name(), "signStress": to_value(&s)? }),
                seed,
            })
        }
        Command::MultiplierStress {
            series,
            multiplier,
            c,
            keep,
            n,
        } => {
            let spec = series.spec(seed)?;
            let m = match multiplier {
                MultiplierArg::Constant => Multiplier::Constant { c: *c },
                MultiplierArg::AlternatingLog => Multiplier::AlternatingLog,
                MultiplierArg::RandomBounded => Multiplier::RandomBounded {
                    bound: *c,
                    seed: need_seed(seed, "random-bounded multiplier")?,
                },
                MultiplierArg::Mask => Multiplier::ThresholdMask {
                    keep: keep.iter().copied().collect(),
                },
            };
            let record = multiplier_stress(&spec, &m, *n)?;
            let rows = record
                .checkpoints
                .iter()
                .map(|c| vec![c.n.to_string(), format!("{:e}", c.value)])
                .collect();
            Ok(Outcome {
                result: json!({
                    "series": spec.name(),
                    "multiplier": to_value(&m)?,
                    "bound": m.bound(),
                    "record": to_value(&record)?,
                }),
                table: Table {
                    header: vec!["n", "value"],
                    rows,
                },
                seed,
            })
        }
        Command::WeakTail {
            series,
            window: w,
            method,
            iterations,
        } => {
            let spec = series.spec(seed)?;
            let method = match method {
                WeakArg::ClosedForm => WeakMethod::ClosedFormCoordinate,
                WeakArg::SphereSearch => WeakMethod::SphereSearch {
                    iterations: *iterations,
                    seed: need_seed(seed, "sphere search")?,
                },
            };
            let est = weak_uniform_tail(&spec, window(w)?, method)?;
            Ok(Outcome {
                table: Table {
                    header: vec!["start", "width", "method", "statistic", "lowerBound"],
                    rows: vec![vec![
                        w.start.to_string(),
                        w.width.to_string(),
                        est.method.clone(),
                        format!("{:e}", est.statistic),
                        est.lower_bound.to_string(),
                    ]],
                },
                result: json!({
                    "series": spec.name(),
                    "start": w.start,
                    "width": w.width,
                    "estimate": to_value(&est)?,
                    "note": "window truncation of the full tail; the gap beyond the window is not bounded",
                }),
                seed,
            })
        }
        Command::Subseries { series, n, count } => {
            let spec = series.spec(seed)?;
            let seed = need_seed(seed, "subseries sampling")?;
            let report = subseries_sample(&spec, *n, *count, seed)?;
            let rows = report
                .samples
                .iter()
                .map(|s| {
                    let (kind, index) = match s.kind {
                        crate::diagnostics::SampleKind::Random { index } => ("random", index.to_string()),
                        crate::diagnostics::SampleKind::PositiveTerms => ("positive-terms", String::new()),
                        crate::diagnostics::SampleKind::NegativeTerms => ("negative-terms", String::new()),
                    };
                    vec![kind.to_string(), index, s.kept.to_string(), format!("{:e}", s.oscillation)]
                })
                .collect();
            Ok(Outcome {
                result: json!({ "series": spec.name(), "report": to_value(&report)? }),
                table: Table {
                    header: vec!["kind", "index", "kept", "oscillation"],
                    rows,
                },
                seed: Some(seed),
            })
        }
        Command::SgdSensitivity(a) => sgd_command(a, seed),
        Command::FrameThreshold(a) => frame_command(a, seed),
    }
}

fn sgd_command(a: &SgdArgs, seed: Option<u64>) -> Result<Outcome> {
    let seed = need_seed(seed, "sgd sensitivity")?;
    let stream = match a.stream {
        StreamArg::Quadratic => GradientStream::quadratic(a.dim, a.samples, seed)?,
        StreamArg::IllConditioned => GradientStream::ill_conditioned(a.dim, a.samples, a.decades, seed)?,
        StreamArg::HeavyTailed => GradientStream::heavy_tailed(a.dim, a.samples, a.tail_index, seed)?,
        StreamArg::File => {
            let path = a.stream_file.as_ref().ok_or_else(|| invalid("--stream file needs --stream-file PATH"))?;
            GradientStream::from_path(path)?
        }
    };
    let sched = match a.schedule {
        ScheduleArg::Constant => LrSchedule::Constant { eta: a.eta },
        ScheduleArg::InverseSqrt => LrSchedule::InverseSqrt { eta0: a.eta },
    };
    let strategies: Vec<SummationStrategy> = a.strategies.iter().map(|s| (*s).into()).collect();
    let pairing = if a.rate_follows_sample {
        SchedulePairing::Sample
    } else {
        SchedulePairing::Position
    };
    let report = permutation_sensitivity(&stream, &sched, a.perms, seed, &strategies, pairing)?;
    let rows = report
        .strategies
        .iter()
        .map(|s| {
            vec![
                s.strategy.name().to_string(),
                report.num_perms.to_string(),
                format!("{:e}", s.max_pairwise_deviation),
                format!("{:e}", s.reference_deviation),
                s.relative_to_naive.map_or(String::new(), |r| format!("{r:e}")),
                s.bitwise_identical.to_string(),
            ]
        })
        .collect();
    Ok(Outcome {
        result: json!({
            "stream": to_value(&stream.source)?.get("kind").cloned().unwrap_or(Value::Null),
            "schedule": to_value(&sched)?,
            "report": to_value(&report)?,
        }),
        table: Table {
            header: vec![
                "strategy",
                "numPerms",
                "maxPairwiseDeviation",
                "referenceDeviation",
                "relativeToNaive",
                "bitwiseIdentical",
            ],
            rows,
        },
        seed: Some(seed),
    })
}

fn frame_command(a: &FrameArgs, seed: Option<u64>) -> Result<Outcome> {
    let frame = match a.frame {
        FrameArg::Orthonormal => Frame::orthonormal(a.dim)?,
        FrameArg::MercedesBenz => Frame::mercedes_benz()?,
        FrameArg::RotatedBases => Frame::rotated_bases(a.dim, a.count, need_seed(seed, "rotated bases")?)?,
        FrameArg::RandomUnit => Frame::random_unit(a.dim, a.count, need_seed(seed, "random frame")?)?,
        FrameArg::Haar => Frame::haar(a.level)?,
        FrameArg::File => {
            let path = a.frame_file.as_ref().ok_or_else(|| invalid("--frame file needs --frame-file PATH"))?;
            Frame::from_path(path)?
        }
    };
    let signals = if a.signal.is_empty() {
        let seed = need_seed(seed, "random signals")?;
        use rand::Rng;
        let mut rng = crate::rng::stream_rng(seed, 7);
        (0..a.signals)
            .map(|_| (0..frame.dim).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect())
            .collect()
    } else {
        vec![a.signal.clone()]
    };
    let mut rows = Vec::new();
    let mut results = Vec::new();
    for (i, f) in signals.iter().enumerate() {
        let c = analyze(&frame, f)?;
        for &tau in &a.tau {
            let rule = match a.rule {
                RuleArg::Hard => ThresholdRule::Hard { tau },
                RuleArg::Soft => ThresholdRule::Soft { tau },
            };
            let r = reconstruct(&frame, &c, &rule, Some(f))?;
            rows.push(vec![
                (i + 1).to_string(),
                format!("{tau:e}"),
                r.kept.to_string(),
                format!("{:e}", r.error_norm),
                format!("{:e}", r.synthesis_bound),
                format!("{:e}", r.coefficient_bound),
                r.bound_holds.to_string(),
            ]);
            results.push(json!({
                "signal": i + 1,
                "tau": tau,
                "coefficients": c,
                "reconstruction": to_value(&r)?,
            }));
        }
    }
    let (a_bound, b_bound) = frame.frame_bounds;
    Ok(Outcome {
        result: json!({
            "frame": frame.name,
            "dim": frame.dim,
            "vectors": frame.len(),
            "frameBounds": [a_bound, b_bound],
            "tight": frame.tight,
            "rule": match a.rule { RuleArg::Hard => "hard", RuleArg::Soft => "soft" },
            "results": results,
            "note": "finite frame: every mask bounded by 1 keeps the synthesis within (B/A)·‖f‖",
        }),
        table: Table {
            header: vec![
                "signal",
                "tau",
                "kept",
                "errorNorm",
                "synthesisBound",
                "coefficientBound",
                "boundHolds",
            ],
            rows,
        },
        seed,
    })
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded { .. } => 3,
        Error::NotConditionallyConvergentEvidence(_) | Error::NotAFrame(_) => 4,
        _ => 2,
    }
}

fn render(cli: &Cli, argv: &[String], outcome: &Outcome) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    match cli.format {
        Format::Json => {
            let doc = json!({
                "toolVersion": TOOL_VERSION,
                "argv": argv,
                "seed": outcome.seed,
                "result": outcome.result,
            });
            serde_json::to_writer_pretty(&mut buf, &doc)?;
            buf.push(b'\n');
        }
        Format::Csv => {
            writeln!(buf, "# toolVersion={TOOL_VERSION}")?;
            writeln!(buf, "# argv={}", serde_json::to_string(argv)?)?;
            match outcome.seed {
                Some(s) => writeln!(buf, "# seed={s}")?,
                None => writeln!(buf, "# seed=none")?,
            }
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(&outcome.table.header)?;
            for row in &outcome.table.rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
    }
    Ok(buf)
}

fn error_document(argv: &[String], seed: Option<u64>, kind: &str, message: &str) -> String {
    let doc = json!({
        "toolVersion": TOOL_VERSION,
        "argv": argv,
        "seed": seed,
        "error": { "kind": kind, "message": message },
    });
    serde_json::to_string_pretty(&doc).unwrap_or_default() + "\n"
}

/// Runs the command line `args` (program name first) and returns the exit
/// status. Documents and error objects go to `stdout` unless `--output`
/// names a file.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let argv: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let message = e.render().to_string();
            let _ = stdout.write_all(error_document(&argv, None, "invalid-arguments", message.trim()).as_bytes());
            return 2;
        }
    };
    let result = execute(&cli).and_then(|outcome| render(&cli, &argv, &outcome));
    match result {
        Ok(bytes) => {
            let written = match &cli.output {
                Some(path) => File::create(path).and_then(|mut f| f.write_all(&bytes)),
                None => stdout.write_all(&bytes),
            };
            match written {
                Ok(()) => 0,
                Err(e) => {
                    let _ = stdout.write_all(error_document(&argv, cli.seed, "io-error", &e.to_string()).as_bytes());
                    2
                }
            }
        }
        Err(e) => {
            let _ = stdout.write_all(error_document(&argv, cli.seed, e.kind(), &e.to_string()).as_bytes());
            exit_code(&e)
        }
    }
}
