// Heuristic classification of three reference series: one absolutely
// convergent, one unconditionally but not absolutely convergent, one
// conditionally convergent.
//
// ```bash
// cargo run --release --example classify
// ```

use uncond::diagnostics::classify;
use uncond::SeriesSpec;

pub fn run_example() -> uncond::Result<()> {
    let series = [
        SeriesSpec::coordinate_decay(2.0)?,
        SeriesSpec::coordinate_decay(1.0)?,
        SeriesSpec::alternating_harmonic(),
    ];
    for spec in &series {
        let report = classify(spec, 1_000_000)?;
        println!("{:<34} {:?}", report.series, report.verdict);
        for (name, ev) in &report.per_condition {
            println!("    {name:<20} {:<13} {:.6e}  {}", format!("{:?}", ev.verdict), ev.statistic, ev.detail);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> uncond::Result<()> {
    run_example()
}
