//! In flat ambient space the curvature can be written entirely in nested
//! brackets of the embedding coordinates — no normals, no frames, no
//! Christoffel symbols. Evaluate those formulas and compare against the
//! classical route.

use psgeo::classical::{frame_at, golden};
use psgeo::znormals::{h_nested, k_nested, NestedVariant};

fn main() {
    let cases = [
        (golden::sphere(2.0), [1.0, 0.7]),
        (golden::torus(2.0, 1.0), [0.0, 0.7]),
        (golden::torus(2.0, 1.0), [std::f64::consts::PI, 0.7]),
        (golden::catenoid(), [0.4, 1.9]),
        (golden::clifford_torus(), [1.0, 2.0]),
    ];
    println!(
        "{:<16} {:>14} {:>22} {:>22} {:>22}",
        "surface", "u", "K_classical", "K_nested", "|H|_nested"
    );
    for (spec, u) in cases {
        let fp = frame_at(&spec, u).unwrap();
        let k = k_nested(&fp, NestedVariant::Statement).unwrap();
        let h = h_nested(&fp).unwrap();
        let hn = fp.gbar_dot(&h, &h).sqrt();
        println!(
            "{:<16} ({:5.2},{:5.2}) {:>22.15} {:>22.15} {:>22.15}",
            spec.label,
            u[0],
            u[1],
            fp.gaussian_curvature(),
            k,
            hn
        );
    }
}
