//! Bundled scenarios must reproduce the checked-in CSVs byte for byte.
//! Regenerate with `UPDATE_GOLDEN=1 cargo test --test golden`.

use std::fs;
use std::path::PathBuf;

use tt_cosim::bundled;
use tt_cosim::engine::run;
use tt_cosim::report::{emit_braking_curves, trace_csv};

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn compare(file: &str, actual: &str) {
    let path = golden_dir().join(file);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, actual).unwrap();
        return;
    }
    let expected = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    if expected != actual {
        let line = expected
            .lines()
            .zip(actual.lines())
            .position(|(a, b)| a != b)
            .map_or_else(|| "length".to_string(), |n| format!("line {}", n + 1));
        panic!("{file} differs from golden at {line}");
    }
}

#[test]
fn bundled_traces_match_golden() {
    for (name, _) in bundled::ALL {
        let trace = run(&bundled::load(name).unwrap()).unwrap();
        compare(&format!("{name}.csv"), &trace_csv(&trace));
    }
}

#[test]
fn braking_curves_match_golden() {
    let [blue, red, green] = ["braking_ideal", "braking_naive", "braking_extrapolating"]
        .map(|n| run(&bundled::load(n).unwrap()).unwrap());
    for (name, csv) in emit_braking_curves(&blue, &red, &green) {
        compare(&format!("{name}.csv"), &csv);
    }
}
