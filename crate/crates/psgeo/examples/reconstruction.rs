//! Weingarten's formula and Gauss' formula rebuilt from the compound map
//! B_A = P S_A, checked against direct jet differentiation and the induced
//! Christoffel symbols.

use psgeo::classical::{frame_at, golden};
use psgeo::poissongeo::{gauss_formula_rewrite, weingarten_reconstruct};

fn main() {
    let fp = frame_at(&golden::clifford_torus(), [0.8, 0.45]).unwrap();
    println!("Clifford torus at u = (0.80, 0.45)\n");

    println!("Weingarten: nabla_X N_A from brackets vs jet differentiation");
    for a_idx in 0..fp.codim() {
        let x = fp.e_values(0);
        let rec = weingarten_reconstruct(&fp, a_idx, &x).unwrap();
        let oracle = fp.cov_deriv_normal_along(a_idx, [1.0, 0.0]);
        let mut dev = 0.0f64;
        for i in 0..4 {
            dev = dev.max((rec[i] - oracle[i]).abs());
        }
        println!("  A = {}: max component deviation {dev:.2e}", a_idx + 1);
    }

    println!("\nGauss: nabla_{{e_a}} e_b from brackets vs induced Christoffels");
    let gamma = fp.induced_christoffel();
    for a in 0..2 {
        for b in 0..2 {
            let mut xc = [0.0, 0.0];
            xc[a] = 1.0;
            let lhs = gauss_formula_rewrite(&fp, xc, b).unwrap();
            let mut dev = 0.0f64;
            for i in 0..4 {
                let mut expect = 0.0;
                for c in 0..2 {
                    expect += gamma[c][(a, b)] * fp.e_values(c)[i];
                }
                dev = dev.max((lhs[i] - expect).abs());
            }
            println!("  (a,b) = ({},{}): max component deviation {dev:.2e}", a + 1, b + 1);
        }
    }
}
