// The command-line front end driven in-process.
//
// ```bash
// cargo run --release --example cli_run
// cargo run --release -- classify --series coordinate-decay --alpha 1 --budget 1e6
// ```

pub fn run_example() -> uncond::Result<()> {
    let mut out = Vec::new();
    let code = uncond::cli::run(
        ["uncond", "--format", "csv", "net-sup", "--series", "alternating-harmonic", "--start", "0", "--width", "4"],
        &mut out,
    );
    print!("{}", String::from_utf8_lossy(&out));
    println!("exit status {code}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> uncond::Result<()> {
    run_example()
}
