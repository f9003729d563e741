// Frame bounds, canonical-dual reconstruction and thresholding, on the
// Mercedes-Benz frame and on Haar systems of increasing resolution.
//
// ```bash
// cargo run --release --example frames
// ```

use uncond::frame::{analyze, haar_resolution_report, reconstruct, Frame, ThresholdRule};

pub fn run_example() -> uncond::Result<()> {
    let mb = Frame::mercedes_benz()?;
    println!("{}: bounds {:?}, tight {}", mb.name, mb.frame_bounds, mb.tight);
    let f = [0.6, 0.8];
    let c = analyze(&mb, &f)?;
    println!("  coefficients {c:.4?}");
    for tau in [0.0, 0.2, 0.5, 0.9] {
        let r = reconstruct(&mb, &c, &ThresholdRule::Hard { tau }, Some(&f))?;
        println!(
            "  hard τ = {tau}: kept {}, error {:.4}, bound {:.4}",
            r.kept, r.error_norm, r.coefficient_bound
        );
    }

    let random = Frame::random_unit(4, 9, 2)?;
    println!("{}: bounds ({:.4}, {:.4})", random.name, random.frame_bounds.0, random.frame_bounds.1);

    let step = |x: f64| if x < 0.3 { 1.0 } else { -0.5 };
    println!("Haar expansions of a step signal, τ = 0.01");
    for level in haar_resolution_report(&step, &[2, 4, 6, 8, 10], 0.01)? {
        println!(
            "  2^{:<2} points: finest-level norm {:.3e}, kept {:>4}, error {:.3e}",
            level.k, level.tail_norm, level.kept, level.error_norm
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> uncond::Result<()> {
    run_example()
}
