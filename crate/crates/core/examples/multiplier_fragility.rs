// Bounded multipliers: a vanishing multiplier sequence that makes the
// alternating harmonic series diverge, and random bounded multipliers that
// cannot break an orthogonal series.
//
// ```bash
// cargo run --release --example multiplier_fragility
// ```

use uncond::diagnostics::{multiplier_stress, subseries_sample, Multiplier};
use uncond::SeriesSpec;

pub fn run_example() -> uncond::Result<()> {
    let alt = SeriesSpec::alternating_harmonic();
    let record = multiplier_stress(&alt, &Multiplier::AlternatingLog, 10_000_000)?;
    println!("alternating harmonic, λ_n = (-1)^n / ln(n+1): class {:?}", record.class());
    for c in &record.checkpoints {
        println!("  N = {:>9}  {:.6}", c.n, c.value);
    }

    let orth = SeriesSpec::coordinate_decay(1.0)?;
    let random = multiplier_stress(&orth, &Multiplier::RandomBounded { bound: 1.0, seed: 3 }, 1_000_000)?;
    println!("e_n / n with random |λ_n| ≤ 1: final norm {:.6}, class {:?}", random.last(), random.class());

    let sub = subseries_sample(&alt, 100_000, 8, 11)?;
    for s in &sub.samples {
        println!("  subseries {:?}: tail oscillation {:.3e}", s.kind, s.oscillation);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> uncond::Result<()> {
    run_example()
}
