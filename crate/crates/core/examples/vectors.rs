// Sparse and dense vectors with ℓ^p norms, in floating point and exact
// rational arithmetic.
//
// ```bash
// cargo run --release --example vectors
// ```

use num_rational::BigRational;
use uncond::workspace::{combine, parse_scalar};
use uncond::{Scalar, Vector};

pub fn run_example() -> uncond::Result<()> {
    let x = Vector::dense(vec![3.0, -4.0])?;
    println!("x = {x:?}: ℓ1 {}, ℓ2 {}, ℓ∞ {}", x.norm(1.0)?, x.norm(2.0)?, x.norm(f64::INFINITY)?);

    let third: BigRational = parse_scalar("1/3").expect("rational literal");
    let a = Vector::sparse([(1, third.clone()), (1_000_000, BigRational::from_ratio(-2, 5))])?;
    let b = Vector::basis(1, BigRational::from_ratio(2, 3));
    let sum = combine(&[(BigRational::one(), &a), (BigRational::one(), &b)])?;
    println!("exact: coordinate 1 = {}, support {}, ℓ1 = {}", sum.get(1), sum.support_len(), sum.norm(1.0)?);
    println!("⟨a, b⟩ = {}", a.inner(&b)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> uncond::Result<()> {
    run_example()
}
