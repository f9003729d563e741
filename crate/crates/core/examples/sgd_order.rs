// How much an accumulated gradient update moves when the samples arrive in
// a different order.
//
// ```bash
// cargo run --release --example sgd_order
// ```

use uncond::sgd::{
    clipping_multipliers, multiplier_variant, permutation_sensitivity, GradientStream, LrSchedule, SchedulePairing,
};
use uncond::{Order, SummationStrategy};

pub fn run_example() -> uncond::Result<()> {
    let sched = LrSchedule::Constant { eta: 0.01 };
    let streams = [
        ("quadratic", GradientStream::quadratic(10, 1000, 1)?),
        ("ill-conditioned", GradientStream::ill_conditioned(10, 1000, 10.0, 2)?),
    ];
    for (name, stream) in &streams {
        let report = permutation_sensitivity(stream, &sched, 50, 5, &SummationStrategy::ALL, SchedulePairing::Position)?;
        println!("{name} stream, |Δw|∞ = {:.3e}", report.reference_norm);
        for s in &report.strategies {
            println!(
                "  {:<15} pairwise {:.3e}  vs exact {:.3e}  identical {}",
                s.strategy.name(),
                s.max_pairwise_deviation,
                s.reference_deviation,
                s.bitwise_identical
            );
        }
    }

    let heavy = GradientStream::heavy_tailed(10, 1000, 1.1, 3)?;
    let lambdas = clipping_multipliers(&heavy, Order::Identity, 1.0)?;
    let clipped = multiplier_variant(&heavy, &sched, &lambdas, Order::Identity, SummationStrategy::Compensated)?;
    println!("clipped heavy-tailed update: |Δw| = {:.4} ≤ {:.4}", clipped.norm, 0.01 * 1000.0);
    Ok(())
}

#[allow(dead_code)]
fn main() -> uncond::Result<()> {
    run_example()
}
