mod anytime_newton {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/anytime_newton.rs"
    ));
}
mod braking_calculations {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/braking_calculations.rs"
    ));
}
mod dimensioned_quantities {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/dimensioned_quantities.rs"
    ));
}
mod event_vs_time_triggered {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/event_vs_time_triggered.rs"
    ));
}
mod itom_consistency {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/itom_consistency.rs"
    ));
}
mod latency_chain {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/latency_chain.rs"
    ));
}
mod naive_vs_extrapolating {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/naive_vs_extrapolating.rs"
    ));
}
mod scenario_files {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/scenario_files.rs"
    ));
}
mod taylor_extrapolation {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/taylor_extrapolation.rs"
    ));
}
mod time_and_frames {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/time_and_frames.rs"
    ));
}
mod time_rate_pacing {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/time_rate_pacing.rs"
    ));
}
mod trace_output {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/trace_output.rs"
    ));
}

#[test]
fn anytime_newton_runs() {
    anytime_newton::run_example().expect("anytime_newton");
}

#[test]
fn braking_calculations_runs() {
    braking_calculations::run_example().expect("braking_calculations");
}

#[test]
fn dimensioned_quantities_runs() {
    dimensioned_quantities::run_example().expect("dimensioned_quantities");
}

#[test]
fn event_vs_time_triggered_runs() {
    event_vs_time_triggered::run_example().expect("event_vs_time_triggered");
}

#[test]
fn itom_consistency_runs() {
    itom_consistency::run_example().expect("itom_consistency");
}

#[test]
fn latency_chain_runs() {
    latency_chain::run_example().expect("latency_chain");
}

#[test]
fn naive_vs_extrapolating_runs() {
    naive_vs_extrapolating::run_example().expect("naive_vs_extrapolating");
}

#[test]
fn scenario_files_runs() {
    scenario_files::run_example().expect("scenario_files");
}

#[test]
fn taylor_extrapolation_runs() {
    taylor_extrapolation::run_example().expect("taylor_extrapolation");
}

#[test]
fn time_and_frames_runs() {
    time_and_frames::run_example().expect("time_and_frames");
}

#[test]
fn time_rate_pacing_runs() {
    time_rate_pacing::run_example().expect("time_rate_pacing");
}

#[test]
fn trace_output_runs() {
    trace_output::run_example().expect("trace_output");
}
