// Tail-window statistics on the orthogonal series `e_n / n`: subset sums,
// weak sums and sign patterns, each against its closed form.
//
// ```bash
// cargo run --release --example tail_windows
// ```

use uncond::diagnostics::{
    net_cauchy_sup, sign_stress, weak_uniform_tail, NetMethod, SignMode, TailWindow, WeakMethod,
};
use uncond::SeriesSpec;

pub fn run_example() -> uncond::Result<()> {
    let spec = SeriesSpec::coordinate_decay(1.0)?;
    let window = TailWindow::new(10, 15)?;
    let exhaustive = net_cauchy_sup(&spec, window, NetMethod::Exhaustive)?;
    let closed = net_cauchy_sup(&spec, window, NetMethod::ClosedFormCoordinate)?;
    let weak = weak_uniform_tail(&spec, window, WeakMethod::ClosedFormCoordinate)?;
    let sphere = weak_uniform_tail(&spec, window, WeakMethod::SphereSearch { iterations: 200, seed: 1 })?;
    println!("window (10, 25]");
    println!("  subset sup, 2^15 subsets  {exhaustive:.17}");
    println!("  subset sup, closed form   {closed:.17}");
    println!("  weak sup, closed form     {:.17}", weak.statistic);
    println!("  weak sup, sphere search   {:.17} (lower bound)", sphere.statistic);

    for n in [100, 1_000, 10_000] {
        let s = net_cauchy_sup(&spec, TailWindow::new(n, 20)?, NetMethod::Exhaustive)?;
        println!("  subset sup on ({n}, {}] = {s:.3e}", n + 20);
    }

    let signs = sign_stress(&spec, 10, SignMode::Exhaustive)?;
    println!("sign stress N=10: max {:.15} min {:.15} over {} patterns", signs.max, signs.min, signs.patterns);
    let alt = sign_stress(&SeriesSpec::alternating_harmonic(), 20, SignMode::Exhaustive)?;
    println!("alternating harmonic N=20: max {:.6}", alt.max);
    Ok(())
}

#[allow(dead_code)]
fn main() -> uncond::Result<()> {
    run_example()
}
