//! Gaussian and mean curvature of a radius-2 sphere computed twice: through
//! the classical Gauss/Weingarten pipeline and through the bracket maps
//! P and S_A, then compared.

use psgeo::classical::{frame_at, golden};
use psgeo::poissongeo;

fn main() {
    let spec = golden::sphere(2.0);
    let u = [std::f64::consts::FRAC_PI_3, 0.7];
    let fp = frame_at(&spec, u).unwrap();

    println!("sphere R=2 at u = ({:.4}, {:.4})", u[0], u[1]);
    println!("g = {:.12} (expected 12)", fp.g);

    let k_classical = fp.gaussian_curvature();
    let k_poisson = poissongeo::gaussian_curvature(&fp).unwrap();
    println!("K classical = {k_classical:.15}");
    println!("K poisson   = {k_poisson:.15}   (expected 1/R^2 = 0.25)");

    let h_classical = fp.mean_curvature_norm();
    let h = poissongeo::mean_curvature(&fp).unwrap();
    let h_poisson = fp.gbar_dot(&h, &h).sqrt();
    println!("|H| classical = {h_classical:.15}");
    println!("|H| poisson   = {h_poisson:.15}   (expected 1/R = 0.5)");

    // the trace identities behind the curvature formulas
    let p = poissongeo::p_map(&fp).unwrap();
    let p2 = p.compose(&p, &fp.gbar_inv);
    let (tr_p2, _) = poissongeo::traces(&p2, &fp).unwrap();
    println!("Tr P^2 = {tr_p2:.12} (expected -2g/rho^2 = -2)");

    let s = poissongeo::s_map(&fp, 0).unwrap();
    let s2 = s.compose(&s, &fp.gbar_inv);
    let (tr_s2, _) = poissongeo::traces(&s2, &fp).unwrap();
    let expected = -2.0 / (fp.rho.val * fp.rho.val) * fp.h[0].det();
    println!("Tr S^2 = {tr_s2:.12} (expected -(2/rho^2) det h = {expected:.12})");
}
