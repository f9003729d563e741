// Partial sums of the alternating harmonic series under each summation
// strategy, in floating point and exact rational arithmetic.
//
// ```bash
// cargo run --release --example partial_sums
// ```

use num_rational::BigRational;
use uncond::series::partial_sum;
use uncond::{Order, Permutation, Scalar, SeriesSpec, SummationStrategy};

pub fn run_example() -> uncond::Result<()> {
    let spec = SeriesSpec::alternating_harmonic();
    let n = 1_000_000;
    for strategy in SummationStrategy::FLOATING {
        let s = partial_sum::<f64>(&spec, Order::Identity, n, strategy)?.get(1);
        println!(
            "{:>12}  S_{n} = {s:.16}  |S + ln 2| = {:.3e}",
            strategy.name(),
            (s + std::f64::consts::LN_2).abs()
        );
    }

    // The first 200 terms summed exactly, in two different orders.
    let exact = spec.clone().exact();
    let shuffled = Permutation::random(200, 7);
    let a = partial_sum::<BigRational>(&exact, Order::Identity, 200, SummationStrategy::ExactRational)?.get(1);
    let b = partial_sum::<BigRational>(&exact, Order::Permuted(&shuffled), 200, SummationStrategy::ExactRational)?.get(1);
    assert_eq!(a, b);
    println!("exact S_200 = {:.16} (same in both orders)", a.as_f64());
    Ok(())
}

#[allow(dead_code)]
fn main() -> uncond::Result<()> {
    run_example()
}
