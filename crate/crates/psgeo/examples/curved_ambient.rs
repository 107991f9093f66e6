//! A horosphere in hyperbolic 3-space (upper half-space model, metric
//! delta/x3^2) is intrinsically flat: the ambient curvature term -1 cancels
//! the second-fundamental-form term +1 exactly.

use psgeo::classical::{frame_at, golden};
use psgeo::poissongeo;

fn main() {
    let spec = golden::horosphere();
    let fp = frame_at(&spec, [0.4, -0.3]).unwrap();

    let ambient = fp.ambient_term / fp.g;
    let det_term: f64 = fp.h.iter().map(|h| h.det()).sum::<f64>() / fp.g;
    println!("horosphere x3 = 1 in H^3");
    println!("ambient curvature term = {ambient:.12}   (expected -1)");
    println!("sum det(h)/g           = {det_term:.12}   (expected +1)");
    println!("K classical            = {:.12}", fp.gaussian_curvature());
    println!(
        "K poisson              = {:.12}",
        poissongeo::gaussian_curvature(&fp).unwrap()
    );
    // umbilic: the Weingarten map is +/- identity, so |H| = 1
    println!("|H|                    = {:.12}", fp.mean_curvature_norm());
}
