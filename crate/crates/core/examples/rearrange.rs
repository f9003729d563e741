// Greedy Riemann rearrangement of the alternating harmonic series, and a
// block permutation built from disjoint index blocks.
//
// ```bash
// cargo run --release --example rearrange
// ```

use std::collections::BTreeSet;

use uncond::rearrangement::{non_cauchy_block_permutation, riemann_rearrange};
use uncond::SeriesSpec;

pub fn run_example() -> uncond::Result<()> {
    let spec = SeriesSpec::alternating_harmonic();
    for target in [-2.0, -1.0, 0.0, 0.5, 1.0, 2.0, 5.0] {
        let trace = riemann_rearrange(&spec, target, 1e-6, 50_000_000)?;
        println!(
            "target {target:>5}: {:>9} steps, final sum {:.9}, {} block ends",
            trace.steps(),
            trace.final_sum(),
            trace.targets_hit.len()
        );
    }

    // Non-absolutely convergent series refuse to be steered.
    if let Err(e) = riemann_rearrange(&SeriesSpec::coordinate_decay(2.0)?, 5.0, 1e-6, 100_000) {
        println!("coordinate-decay(2): {e}");
    }

    let blocks: Vec<BTreeSet<usize>> = vec![[4, 6].into(), [9, 10, 12].into()];
    let bp = non_cauchy_block_permutation(&blocks, 14)?;
    println!("block permutation {:?}, blocks at {:?}", bp.permutation.as_slice(), bp.block_positions);
    Ok(())
}

#[allow(dead_code)]
fn main() -> uncond::Result<()> {
    run_example()
}
