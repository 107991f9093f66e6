//! Build an orthonormal normal frame for the Clifford torus in R^4 without
//! ever differentiating normals: the Z-vectors come from brackets of the
//! embedding coordinates, their Gram matrix 𝒵 is idempotent with rank p,
//! and its unit-eigenvalue eigenvectors assemble the frame.

use psgeo::classical::{frame_at, golden};
use psgeo::znormals::z_frame;

fn main() {
    let fp = frame_at(&golden::clifford_torus(), [1.0, 2.2]).unwrap();
    let zf = z_frame(&fp).unwrap();

    println!("Clifford torus in R^4, codimension p = {}", fp.codim());
    println!("Z-matrix ({n}x{n}):", n = zf.zmatrix.rows());
    for i in 0..zf.zmatrix.rows() {
        let row: Vec<String> = (0..zf.zmatrix.cols())
            .map(|j| format!("{:7.4}", zf.zmatrix[(i, j)]))
            .collect();
        println!("  [{}]", row.join(", "));
    }
    let eig: Vec<String> = (0..zf.eigenvalues.dim())
        .map(|k| format!("{:.6}", zf.eigenvalues[k]))
        .collect();
    println!("eigenvalues: [{}]  (expected 1,1,0,0)", eig.join(", "));

    for (k, n) in zf.nhat.iter().enumerate() {
        let comps: Vec<String> = (0..4).map(|i| format!("{:8.5}", n[i])).collect();
        println!("N-hat_{} = [{}]", k + 1, comps.join(", "));
        // verify: unit length, orthogonal to both tangents
        println!(
            "  |N|^2 = {:.12}, g(N,e1) = {:.2e}, g(N,e2) = {:.2e}",
            fp.gbar_dot(n, n),
            fp.gbar_dot(n, &fp.e_values(0)),
            fp.gbar_dot(n, &fp.e_values(1))
        );
    }
}
