//! Drive the batch harness from library code: load a spec file, run the
//! full invariant suite over its grid, and print the report — the same path
//! the `psgeo check` subcommand takes.

use psgeo::report::{run_checks, Tolerances};
use psgeo::surfspec::load_spec;

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "crates/psgeo/specs/torus_2_1.surf".to_string());
    let (surface, grid) = load_spec(&path).unwrap();
    let report = run_checks(&surface, &grid, &Tolerances::default()).unwrap();
    print!("{}", report.render_text());
    std::process::exit(if report.passed() { 0 } else { 1 });
}
