//! Acceptance checks. Built without the libtest harness so each check
//! prints one PASS/FAIL line; the process fails if any check fails.

use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use uncond::diagnostics::{
    classify, max_state_norm, multiplier_stress, net_cauchy_sup, sign_stress, weak_uniform_tail, Classification,
    GrowthClass, Multiplier, NetMethod, SignMode, TailWindow, WeakMethod,
};
use uncond::frame::{analyze, frame_bounds, reconstruct, Frame, ThresholdRule};
use uncond::rearrangement::riemann_rearrange;
use uncond::series::partial_sum;
use uncond::sgd::{accumulate_exact, permutation_sensitivity, GradientStream, LrSchedule, SchedulePairing};
use uncond::{Order, Permutation, SeriesSpec, SummationStrategy, Vector};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("{what} took {t:?}, limit {limit:?}"))
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

/// (Σ_{n≤10} 1/n²)^{1/2}
const BASEL_10_ROOT: f64 = 1.244_896_674_895_768_5;
/// (Σ_{n=11}^{25} 1/n²)^{1/2}
const BASEL_11_25_ROOT: f64 = 0.236_549_513_684_683_29;

fn alternating_limit() -> Check {
    let start = Instant::now();
    let spec = SeriesSpec::alternating_harmonic();
    let s = partial_sum::<f64>(&spec, Order::Identity, 1_000_000, SummationStrategy::Compensated)
        .map_err(e)?
        .get(1);
    within(start, Duration::from_secs(1), "partial sum")?;
    let gap = (s + std::f64::consts::LN_2).abs();
    ensure(gap <= 5e-7, || format!("|S + ln 2| = {gap:e} > 5e-7"))?;
    Ok(format!("S_1e6 = {s:.10}, |S + ln 2| = {gap:.3e}"))
}

fn rearrangement_steering() -> Check {
    let start = Instant::now();
    let spec = SeriesSpec::alternating_harmonic();
    let mut finals = Vec::new();
    for target in [-2.0, -1.0, 0.0, 0.5, 1.0, 2.0, 5.0] {
        let trace = riemann_rearrange(&spec, target, 1e-6, 50_000_000).map_err(e)?;
        let s = trace.final_sum();
        ensure(trace.converged && (s - target).abs() <= 1e-6, || {
            format!("target {target}: final sum {s}")
        })?;
        Permutation::new(trace.permutation_prefix.as_slice().to_vec()).map_err(e)?;
        finals.push((target, s));
    }
    within(start, Duration::from_secs(10), "seven rearrangements")?;
    let at = |t: f64| finals.iter().find(|f| f.0 == t).unwrap().1;
    let spread = at(1.0) - at(-1.0);
    ensure(spread >= 1.9, || format!("targets 1 and -1 differ by {spread}"))?;
    Ok(format!("7 targets within 1e-6, injective prefixes, S(1) - S(-1) = {spread:.7}"))
}

fn hierarchy_witness() -> Check {
    let budget = 1_000_000;
    let r1 = classify(&SeriesSpec::coordinate_decay(1.0).map_err(e)?, budget).map_err(e)?;
    let abs = &r1.growth_fits["absolute"];
    let orlicz = &r1.growth_fits["orlicz"];
    ensure(r1.verdict == Classification::UnconditionalEvidence, || format!("e_n/n verdict {:?}", r1.verdict))?;
    ensure(!r1.passes("absolute"), || "e_n/n passed the absolute check".into())?;
    ensure((abs.last() - 14.3927).abs() < 1e-4, || format!("Σ1/n at 1e6 = {}", abs.last()))?;
    ensure(abs.class() == GrowthClass::Logarithmic, || format!("Σ1/n class {:?}", abs.class()))?;
    ensure(orlicz.last() <= 1.6450 && orlicz.class() == GrowthClass::Bounded, || {
        format!("Orlicz sum {} class {:?}", orlicz.last(), orlicz.class())
    })?;
    let ladder: Vec<f64> = r1.net_ladder.iter().map(|l| l.statistic).collect();
    ensure(ladder.len() == 3 && ladder.windows(2).all(|w| w[1] < w[0]), || format!("net ladder {ladder:?}"))?;
    let r2 = classify(&SeriesSpec::coordinate_decay(2.0).map_err(e)?, budget).map_err(e)?;
    ensure(r2.verdict == Classification::Absolute, || format!("e_n/n² verdict {:?}", r2.verdict))?;
    let r3 = classify(&SeriesSpec::alternating_harmonic(), budget).map_err(e)?;
    ensure(r3.verdict == Classification::ConditionalEvidence, || format!("alternating verdict {:?}", r3.verdict))?;
    Ok(format!(
        "e_n/n: Σ‖x‖ = {:.4} (logarithmic), Σ‖x‖² = {:.7}, ladder {:.2e} > {:.2e} > {:.2e}; e_n/n²: absolute; alternating: conditional-evidence",
        abs.last(),
        orlicz.last(),
        ladder[0],
        ladder[1],
        ladder[2]
    ))
}

fn oracle_equivalence() -> Check {
    let start = Instant::now();
    let spec = SeriesSpec::coordinate_decay(1.0).map_err(e)?;
    let w = TailWindow::new(10, 15).map_err(e)?;
    let ex = net_cauchy_sup(&spec, w, NetMethod::Exhaustive).map_err(e)?;
    let cf = net_cauchy_sup(&spec, w, NetMethod::ClosedFormCoordinate).map_err(e)?;
    let weak = weak_uniform_tail(&spec, w, WeakMethod::ClosedFormCoordinate).map_err(e)?.statistic;
    within(start, Duration::from_secs(5), "window statistics")?;
    for (name, v) in [("exhaustive", ex), ("closed form", cf), ("weak closed form", weak)] {
        ensure((v - BASEL_11_25_ROOT).abs() <= 1e-12, || format!("{name} = {v}, tail norm {BASEL_11_25_ROOT}"))?;
    }
    Ok(format!("all three = {ex:.15} at window (10, 25]"))
}

fn sign_invariance() -> Check {
    let spec = SeriesSpec::coordinate_decay(1.0).map_err(e)?;
    let s = sign_stress(&spec, 10, SignMode::Exhaustive).map_err(e)?;
    ensure((s.max - BASEL_10_ROOT).abs() <= 1e-12 && (s.min - BASEL_10_ROOT).abs() <= 1e-12, || {
        format!("max {} min {} expected {BASEL_10_ROOT}", s.max, s.min)
    })?;
    Ok(format!("max = min = {:.15} over {} patterns", s.max, s.patterns))
}

fn fragility() -> Check {
    let start = Instant::now();
    let r = multiplier_stress(&SeriesSpec::alternating_harmonic(), &Multiplier::AlternatingLog, 10_000_000).map_err(e)?;
    within(start, Duration::from_secs(30), "multiplier stress")?;
    let values: Vec<f64> = r.checkpoints.iter().map(|c| c.value).collect();
    ensure(values.windows(2).all(|w| w[1] > w[0]), || "checkpoint sums are not increasing".into())?;
    ensure(r.last() > 2.0, || format!("final checkpoint {}", r.last()))?;
    ensure(r.class() != GrowthClass::Bounded, || "fitted as bounded".into())?;
    Ok(format!(
        "Σ 1/(n ln(n+1)) at 1e7 = {:.6}, increasing, class {:?}",
        r.last(),
        r.class()
    ))
}

fn exact_permutation_invariance() -> Check {
    let start = Instant::now();
    let stream = GradientStream::quadratic(10, 1000, 20).map_err(e)?;
    let sched = LrSchedule::Constant { eta: 0.01 };
    let perms: Vec<Permutation> = (0..50).map(|s| Permutation::random(1000, s)).collect();
    let reference = accumulate_exact(&stream, &sched, Order::Identity, SchedulePairing::Position).map_err(e)?;
    let identical = perms
        .par_iter()
        .map(|p| accumulate_exact(&stream, &sched, Order::Permuted(p), SchedulePairing::Position).map(|d| d == reference))
        .collect::<Result<Vec<bool>, _>>()
        .map_err(e)?;
    ensure(identical.iter().all(|&b| b), || "exact accumulation changed under a permutation".into())?;
    let quad = permutation_sensitivity(
        &stream,
        &sched,
        50,
        3,
        &[SummationStrategy::Compensated],
        SchedulePairing::Position,
    )
    .map_err(e)?;
    let comp = quad.get(SummationStrategy::Compensated).unwrap();
    let rel = comp.max_pairwise_deviation / quad.reference_norm;
    ensure(rel <= 1e-12, || format!("compensated relative deviation {rel:e}"))?;
    let ill = GradientStream::ill_conditioned(10, 1000, 10.0, 21).map_err(e)?;
    let stress = permutation_sensitivity(
        &ill,
        &sched,
        50,
        4,
        &[SummationStrategy::Naive, SummationStrategy::Compensated],
        SchedulePairing::Position,
    )
    .map_err(e)?;
    let naive = stress.get(SummationStrategy::Naive).unwrap().max_pairwise_deviation;
    let compd = stress.get(SummationStrategy::Compensated).unwrap().max_pairwise_deviation;
    ensure(naive >= compd, || format!("naive {naive:e} < compensated {compd:e}"))?;
    within(start, Duration::from_secs(10), "gradient accumulation")?;
    Ok(format!(
        "exact identical over 50 orders; compensated relative {rel:.2e}; ill-conditioned naive {naive:.2e} >= compensated {compd:.2e}"
    ))
}

fn random_signal(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect()
}

fn frame_suite() -> Check {
    let mb = Frame::mercedes_benz().map_err(e)?;
    let (a, b) = frame_bounds(&mb.vectors).map_err(e)?;
    ensure((a - 1.5).abs() <= 1e-10 && (b - 1.5).abs() <= 1e-10, || format!("bounds ({a}, {b})"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let frames = [
        mb.clone(),
        Frame::random_unit(5, 12, 1).map_err(e)?,
        Frame::rotated_bases(4, 3, 2).map_err(e)?,
        Frame::haar(5).map_err(e)?,
    ];
    let mut worst = 0.0f64;
    for frame in &frames {
        for _ in 0..20 {
            let f = random_signal(&mut rng, frame.dim);
            let c = analyze(frame, &f).map_err(e)?;
            let ones = ThresholdRule::Mask { lambdas: vec![1.0; frame.len()] };
            worst = worst.max(reconstruct(frame, &c, &ones, Some(&f)).map_err(e)?.error_norm);
        }
    }
    ensure(worst <= 1e-10, || format!("all-ones reconstruction error {worst:e}"))?;

    // wavelet basis on 64 points
    let haar = Frame::haar(6).map_err(e)?;
    let taus: Vec<f64> = (0..20).map(|i| i as f64 * 0.05).collect();
    for s in 0..100 {
        let f = random_signal(&mut rng, haar.dim);
        let c = analyze(&haar, &f).map_err(e)?;
        let errs = taus
            .iter()
            .map(|&tau| reconstruct(&haar, &c, &ThresholdRule::Hard { tau }, Some(&f)).map(|r| r.error_norm))
            .collect::<Result<Vec<f64>, _>>()
            .map_err(e)?;
        ensure(errs.windows(2).all(|w| w[1] >= w[0] - 1e-12), || {
            format!("signal {s}: hard-threshold error not monotone {errs:?}")
        })?;
    }
    Ok(format!(
        "Mercedes-Benz bounds ({a:.12}, {b:.12}); all-ones error <= {worst:.1e}; Haar(64) error monotone over 20 thresholds x 100 signals"
    ))
}

fn run_property<S: Strategy>(name: &str, cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|err| format!("{name}: {err}"))
}

fn entries() -> impl Strategy<Value = Vec<(usize, f64)>> {
    proptest::collection::vec((1usize..40, -1e3f64..1e3), 0..12)
}

fn property_suites() -> Check {
    const CASES: u32 = 256;
    let norms = [1.0, 1.5, 2.0, 3.0, f64::INFINITY];
    run_property("triangle inequality", CASES, (entries(), entries(), 0usize..norms.len()), |(a, b, p)| {
        let (x, y) = (Vector::sparse(a).unwrap(), Vector::sparse(b).unwrap());
        let p = norms[p];
        let lhs = x.add(&y).unwrap().norm(p).unwrap();
        let rhs = x.norm(p).unwrap() + y.norm(p).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-12);
        Ok(())
    })?;
    run_property("homogeneity", CASES, (entries(), -1e3f64..1e3, 0usize..norms.len()), |(a, c, p)| {
        let x = Vector::sparse(a).unwrap();
        let p = norms[p];
        let lhs = x.scale(&c).norm(p).unwrap();
        let rhs = c.abs() * x.norm(p).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
        Ok(())
    })?;
    run_property("coordinate domination", CASES, (entries(), 0usize..norms.len()), |(a, p)| {
        let x = Vector::sparse(a).unwrap();
        let n = x.norm(norms[p]).unwrap();
        for (_, v) in x.entries() {
            prop_assert!(v.abs() <= n * (1.0 + 1e-12));
        }
        Ok(())
    })?;
    let frame = Frame::random_unit(4, 9, 5).map_err(e)?;
    run_property(
        "mask linearity",
        CASES,
        (proptest::collection::vec(-1.0f64..1.0, 4), proptest::collection::vec(0.0f64..=1.0, 9)),
        |(f, lambdas)| {
            let c = analyze(&frame, &f).unwrap();
            let comp: Vec<f64> = lambdas.iter().map(|l| 1.0 - l).collect();
            let r1 = reconstruct(&frame, &c, &ThresholdRule::Mask { lambdas }, None).unwrap();
            let r2 = reconstruct(&frame, &c, &ThresholdRule::Mask { lambdas: comp }, None).unwrap();
            let full = reconstruct(&frame, &c, &ThresholdRule::Mask { lambdas: vec![1.0; 9] }, None).unwrap();
            for ((x, y), z) in r1.signal.iter().zip(&r2.signal).zip(&full.signal) {
                prop_assert!((x + y - z).abs() <= 1e-12);
            }
            Ok(())
        },
    )?;
    run_property(
        "subset-max order-independent reduction",
        CASES,
        (proptest::collection::vec(proptest::collection::vec(-64i32..64, 3), 1..13), 0usize..13),
        |(rows, bits)| {
            // dyadic entries make every subset sum exact, so the maximum and
            // its mask cannot depend on how the enumeration is split
            let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|&x| x as f64 / 16.0).collect()).collect();
            let start = vec![0.0; 3];
            let whole = max_state_norm(&start, &rows, rows.len());
            prop_assert_eq!(max_state_norm(&start, &rows, bits), whole);
            let mut reversed = rows.clone();
            reversed.reverse();
            prop_assert_eq!(max_state_norm(&start, &reversed, bits).0, whole.0);
            Ok(())
        },
    )?;
    Ok(format!("5 suites x {CASES} cases: triangle, homogeneity, coordinate domination, mask linearity, subset-max reduction"))
}

fn main() {
    let checks: [(&str, fn() -> Check); 9] = [
        ("alternating harmonic limit", alternating_limit),
        ("rearrangement steering", rearrangement_steering),
        ("hierarchy witness", hierarchy_witness),
        ("oracle equivalence on a tail window", oracle_equivalence),
        ("sign invariance under orthogonality", sign_invariance),
        ("fragility under a vanishing multiplier", fragility),
        ("exact permutation invariance", exact_permutation_invariance),
        ("frame suite", frame_suite),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        match check() {
            Ok(detail) => println!("PASS [{}] {name} ({:.2?}): {detail}", i + 1, start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL [{}] {name} ({:.2?}): {why}", i + 1, start.elapsed());
            }
        }
    }
    println!("{} of {} acceptance checks passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
