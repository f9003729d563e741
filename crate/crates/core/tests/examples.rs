mod partial_sums {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/partial_sums.rs"));
}

mod rearrange {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/rearrange.rs"));
}

mod classify {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/classify.rs"));
}

mod tail_windows {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/tail_windows.rs"));
}

mod multiplier_fragility {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/multiplier_fragility.rs"));
}

mod sgd_order {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/sgd_order.rs"));
}

mod frames {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/frames.rs"));
}

mod vectors {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/vectors.rs"));
}

mod cli_run {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/cli_run.rs"));
}

#[test]
fn partial_sums_example_runs() {
    partial_sums::run_example().expect("partial_sums example should run");
}

#[test]
fn rearrange_example_runs() {
    rearrange::run_example().expect("rearrange example should run");
}

#[test]
fn classify_example_runs() {
    classify::run_example().expect("classify example should run");
}

#[test]
fn tail_windows_example_runs() {
    tail_windows::run_example().expect("tail_windows example should run");
}

#[test]
fn multiplier_fragility_example_runs() {
    multiplier_fragility::run_example().expect("multiplier_fragility example should run");
}

#[test]
fn sgd_order_example_runs() {
    sgd_order::run_example().expect("sgd_order example should run");
}

#[test]
fn frames_example_runs() {
    frames::run_example().expect("frames example should run");
}

#[test]
fn vectors_example_runs() {
    vectors::run_example().expect("vectors example should run");
}

#[test]
fn cli_run_example_runs() {
    cli_run::run_example().expect("cli_run example should run");
}
