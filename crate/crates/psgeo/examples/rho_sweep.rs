//! The bracket {f,h} = (1/rho) eps^{ab} d_a f d_b h carries an arbitrary
//! non-vanishing density rho, but every geometric output must be independent
//! of the choice. Sweep three densities over a torus and watch the curvature
//! stay put.

use psgeo::classical::{frame_at, golden, Density};
use psgeo::expr::Expr;
use psgeo::poissongeo;

fn main() {
    let base = golden::torus(2.0, 1.0);
    let u = [1.1, 2.3];
    let densities = [
        ("sqrt_g", Density::SqrtG),
        ("one", Density::Unit),
        ("1+u1^2+u2^2", Density::Custom(Expr::parse("1+u1^2+u2^2").unwrap())),
    ];
    println!("torus (R=2, r=1) at u = ({:.2}, {:.2})", u[0], u[1]);
    println!("{:<14} {:>22} {:>22} {:>12}", "rho", "K_poisson", "|H|_poisson", "Tr P^2");
    for (name, density) in densities {
        let fp = frame_at(&base.with_density(density), u).unwrap();
        let k = poissongeo::gaussian_curvature(&fp).unwrap();
        let h = poissongeo::mean_curvature(&fp).unwrap();
        let hn = fp.gbar_dot(&h, &h).sqrt();
        let p = poissongeo::p_map(&fp).unwrap();
        let p2 = p.compose(&p, &fp.gbar_inv);
        // Tr P^2 = -2g/rho^2 does depend on rho; K and H do not
        println!(
            "{:<14} {:>22.16} {:>22.16} {:>12.4}",
            name,
            k,
            hn,
            p2.trace_full()
        );
    }
}
