//! Surface geometry through the Poisson bracket {f,h} = (1/rho) eps^{ab} d_a f d_b h.
//!
//! Everything here consumes a classical [`FramePoint`] only for its jets (the
//! embedding, the normal frame, the ambient metric and Christoffels along the
//! surface); all geometric output is assembled from brackets and the maps
//! P, S_A and their compounds, and can be cross-checked against the classical
//! route.

use crate::classical::FramePoint;
use crate::jet::Jet2;
use crate::tensor::{gram_schmidt, DVec, Mat, TensorError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PoissonError {
    #[error("density vanishes (rho = {rho:.3e})")]
    VanishingDensity { rho: f64 },
    #[error("map image has normal component {dev:.3e}; restricted trace undefined")]
    NotTangentImage { dev: f64 },
    #[error("operation requires a euclidean ambient manifold")]
    NotEuclidean,
    #[error("projected normal frame produced {got} vectors, expected {expected}")]
    FrameCount { expected: usize, got: usize },
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// {f,h} = (1/rho)(d1 f d2 h - d2 f d1 h), from jet slots.
pub fn bracket(f: Jet2, h: Jet2, rho: Jet2) -> Result<f64, PoissonError> {
    if rho.val == 0.0 {
        return Err(PoissonError::VanishingDensity { rho: rho.val });
    }
    Ok((f.d1 * h.d2 - f.d2 * h.d1) / rho.val)
}

/// Bracket carrying its own first u-partials, for nested brackets.
///
/// The result's second-derivative slots are beyond jet order and stay zero.
pub fn bracket_jet1(f: Jet2, h: Jet2, rho: Jet2) -> Result<Jet2, PoissonError> {
    if rho.val == 0.0 {
        return Err(PoissonError::VanishingDensity { rho: rho.val });
    }
    let num = f.d1 * h.d2 - f.d2 * h.d1;
    let dnum1 = f.d11 * h.d2 + f.d1 * h.d12 - f.d12 * h.d1 - f.d2 * h.d11;
    let dnum2 = f.d12 * h.d2 + f.d1 * h.d22 - f.d22 * h.d1 - f.d2 * h.d12;
    let r = rho.val;
    Ok(Jet2 {
        val: num / r,
        d1: (dnum1 * r - num * rho.d1) / (r * r),
        d2: (dnum2 * r - num * rho.d2) / (r * r),
        d11: 0.0,
        d12: 0.0,
        d22: 0.0,
    })
}

/// A map TM -> TM stored as its contravariant table T^{ij} together with the
/// mixed form T^i_k = T^{ij} gbar_{jk} (second index lowered).
#[derive(Debug, Clone)]
pub struct TangentMap {
    pub contra: Mat<f64>,
    pub mixed: Mat<f64>,
}

impl TangentMap {
    pub fn from_contravariant(contra: Mat<f64>, gbar: &Mat<f64>) -> Self {
        let mixed = contra.matmul(gbar);
        TangentMap { contra, mixed }
    }

    pub fn from_mixed(mixed: Mat<f64>, gbar_inv: &Mat<f64>) -> Self {
        let contra = mixed.matmul(gbar_inv);
        TangentMap { contra, mixed }
    }

    pub fn apply(&self, x: &DVec<f64>) -> DVec<f64> {
        self.mixed.apply(x)
    }

    /// Composition as maps: (self . other)(X) = self(other(X)).
    pub fn compose(&self, other: &TangentMap, gbar_inv: &Mat<f64>) -> TangentMap {
        TangentMap::from_mixed(self.mixed.matmul(&other.mixed), gbar_inv)
    }

    pub fn scale(&self, s: f64) -> TangentMap {
        TangentMap {
            contra: self.contra.scale(s),
            mixed: self.mixed.scale(s),
        }
    }

    /// Transpose with respect to gbar: (T^t)(X)^j = gbar_{ik} T^{kj} X^i.
    pub fn transpose(&self, gbar: &Mat<f64>) -> TangentMap {
        TangentMap::from_contravariant(self.contra.transpose(), gbar)
    }

    /// Unrestricted trace T^i_i.
    pub fn trace_full(&self) -> f64 {
        self.mixed.trace()
    }

    /// Restricted trace T^a_a, computed by expanding T(e_b) in the e_a basis
    /// through the induced metric. Fails if the image leaves the tangent
    /// plane by more than 1e-7 relative to the map scale.
    pub fn trace_restricted(&self, fp: &FramePoint) -> Result<f64, PoissonError> {
        let mut scale = 0.0f64;
        for i in 0..self.mixed.rows() {
            for j in 0..self.mixed.cols() {
                scale = scale.max(self.mixed[(i, j)].abs());
            }
        }
        let mut tr = 0.0;
        for b in 0..2 {
            let image = self.apply(&fp.e_values(b));
            for a_idx in 0..fp.codim() {
                let dev = fp.gbar_dot(&image, &fp.normal_values(a_idx)).abs();
                if dev > 1e-7 * scale.max(1.0) {
                    return Err(PoissonError::NotTangentImage { dev });
                }
            }
            // components X^a = g^{ac} gbar(image, e_c)
            for a in 0..2 {
                let mut comp = 0.0;
                for c in 0..2 {
                    comp += fp.g_inv[(a, c)] * fp.gbar_dot(&image, &fp.e_values(c));
                }
                if a == b {
                    tr += comp;
                }
            }
        }
        Ok(tr)
    }
}

/// P^{ij} = {x^i, x^j}.
pub fn p_map(fp: &FramePoint) -> Result<TangentMap, PoissonError> {
    let m = fp.ambient_dim();
    let mut contra = Mat::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            contra[(i, j)] = bracket(fp.x_jets[i], fp.x_jets[j], fp.rho)?;
        }
    }
    Ok(TangentMap::from_contravariant(contra, &fp.gbar))
}

/// S_A^{ij} = {x^i, n_A^j} + {x^i, x^k} Gamma^j_{kl} n_A^l.
pub fn s_map(fp: &FramePoint, a_idx: usize) -> Result<TangentMap, PoissonError> {
    let m = fp.ambient_dim();
    let n = &fp.normals[a_idx];
    let mut contra = Mat::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let mut s = bracket(fp.x_jets[i], n[j], fp.rho)?;
            if !fp.euclidean {
                for k in 0..m {
                    for l in 0..m {
                        s += bracket(fp.x_jets[i], fp.x_jets[k], fp.rho)?
                            * fp.gamma_jets[j][(k, l)].val
                            * n[l].val;
                    }
                }
            }
            contra[(i, j)] = s;
        }
    }
    Ok(TangentMap::from_contravariant(contra, &fp.gbar))
}

/// The compound maps A_A = -P S_A^t and B_A = P S_A for every normal index.
pub fn compound_maps(fp: &FramePoint) -> Result<(Vec<TangentMap>, Vec<TangentMap>), PoissonError> {
    let p = p_map(fp)?;
    let mut a_maps = Vec::with_capacity(fp.codim());
    let mut b_maps = Vec::with_capacity(fp.codim());
    for a_idx in 0..fp.codim() {
        let s = s_map(fp, a_idx)?;
        let st = s.transpose(&fp.gbar);
        a_maps.push(p.compose(&st, &fp.gbar_inv).scale(-1.0));
        b_maps.push(p.compose(&s, &fp.gbar_inv));
    }
    Ok((a_maps, b_maps))
}

/// Both traces (Tr, tr) of a map whose image lies in the tangent plane.
pub fn traces(t: &TangentMap, fp: &FramePoint) -> Result<(f64, f64), PoissonError> {
    Ok((t.trace_full(), t.trace_restricted(fp)?))
}

/// Gaussian curvature from the bracket side:
/// K = ambient term / g - (rho^2 / 2g) sum_A Tr S_A^2.
pub fn gaussian_curvature(fp: &FramePoint) -> Result<f64, PoissonError> {
    let r2 = fp.rho.val * fp.rho.val;
    let mut sum = 0.0;
    for a_idx in 0..fp.codim() {
        let s = s_map(fp, a_idx)?;
        let s2 = s.compose(&s, &fp.gbar_inv);
        sum += s2.trace_full();
    }
    Ok(fp.ambient_term / fp.g - r2 / (2.0 * fp.g) * sum)
}

/// Flat-ambient specialization K = -(rho^2/2g) sum_A sum_ij {x^i,n_A^j}{x^j,n_A^i}.
pub fn gaussian_curvature_flat(fp: &FramePoint) -> Result<f64, PoissonError> {
    if !fp.euclidean {
        return Err(PoissonError::NotEuclidean);
    }
    let m = fp.ambient_dim();
    let r2 = fp.rho.val * fp.rho.val;
    let mut sum = 0.0;
    for a_idx in 0..fp.codim() {
        let n = &fp.normals[a_idx];
        for i in 0..m {
            for j in 0..m {
                sum += bracket(fp.x_jets[i], n[j], fp.rho)?
                    * bracket(fp.x_jets[j], n[i], fp.rho)?;
            }
        }
    }
    Ok(-r2 / (2.0 * fp.g) * sum)
}

/// Mean curvature vector H = (rho^2 / 2g) sum_A (Tr B_A) N_A.
pub fn mean_curvature(fp: &FramePoint) -> Result<DVec<f64>, PoissonError> {
    let (_, b_maps) = compound_maps(fp)?;
    let r2 = fp.rho.val * fp.rho.val;
    let m = fp.ambient_dim();
    let mut h = DVec::<f64>::zeros(m);
    for (a_idx, b) in b_maps.iter().enumerate() {
        let tr = b.trace_full();
        h = h.add(&fp.normal_values(a_idx).scale(r2 / (2.0 * fp.g) * tr));
    }
    Ok(h)
}

/// Normal-connection components (D_X)_{AB} = (rho^2/g) gbar(B_A(N_B), X)
/// for tangent X given in ambient components.
pub fn normal_connection(
    fp: &FramePoint,
    a_idx: usize,
    b_idx: usize,
    x: &DVec<f64>,
) -> Result<f64, PoissonError> {
    let (_, b_maps) = compound_maps(fp)?;
    let r2 = fp.rho.val * fp.rho.val;
    let image = b_maps[a_idx].apply(&fp.normal_values(b_idx));
    Ok(r2 / fp.g * fp.gbar_dot(&image, x))
}

/// Weingarten's formula assembled from B_A:
/// nabla_X N_A = (rho^2/g) [ -B_A(X) + sum_B gbar(B_A(N_B), X) N_B ].
pub fn weingarten_reconstruct(
    fp: &FramePoint,
    a_idx: usize,
    x: &DVec<f64>,
) -> Result<DVec<f64>, PoissonError> {
    let (_, b_maps) = compound_maps(fp)?;
    let r2 = fp.rho.val * fp.rho.val;
    let m = fp.ambient_dim();
    let mut out = b_maps[a_idx].apply(x).scale(-1.0);
    for b_idx in 0..fp.codim() {
        let coeff = fp.gbar_dot(&b_maps[a_idx].apply(&fp.normal_values(b_idx)), x);
        out = out.add(&fp.normal_values(b_idx).scale(coeff));
    }
    let _ = m;
    Ok(out.scale(r2 / fp.g))
}

/// Gauss' formula rewritten through B_A:
/// nabla_X Y = nabla-bar_X Y - (rho^2/g) sum_A gbar(B_A(X), Y) N_A,
/// with X given in the e_a basis and Y one of the coordinate tangent fields.
pub fn gauss_formula_rewrite(
    fp: &FramePoint,
    x_components: [f64; 2],
    y_index: usize,
) -> Result<DVec<f64>, PoissonError> {
    let (_, b_maps) = compound_maps(fp)?;
    let r2 = fp.rho.val * fp.rho.val;
    // ambient covariant derivative of the coordinate field e_y along X
    let d1 = fp.cov_deriv(&fp.e[y_index], 0);
    let d2 = fp.cov_deriv(&fp.e[y_index], 1);
    let mut out = d1.scale(x_components[0]).add(&d2.scale(x_components[1]));
    let x_ambient = fp
        .e_values(0)
        .scale(x_components[0])
        .add(&fp.e_values(1).scale(x_components[1]));
    let y_ambient = fp.e_values(y_index);
    for (a_idx, b) in b_maps.iter().enumerate() {
        let coeff = r2 / fp.g * fp.gbar_dot(&b.apply(&x_ambient), &y_ambient);
        out = out.sub(&fp.normal_values(a_idx).scale(coeff));
    }
    Ok(out)
}

/// J_M(X) = (rho/sqrt g) P(X) on ambient vectors.
pub fn complex_structure(fp: &FramePoint, x: &DVec<f64>) -> Result<DVec<f64>, PoissonError> {
    let p = p_map(fp)?;
    Ok(p.apply(x).scale(fp.rho.val / fp.g.sqrt()))
}

/// Projection of X onto the tangent plane: -J_M^2(X).
pub fn projection(fp: &FramePoint, x: &DVec<f64>) -> Result<DVec<f64>, PoissonError> {
    let jx = complex_structure(fp, x)?;
    Ok(complex_structure(fp, &jx)?.scale(-1.0))
}

/// Orthonormal normal frame built with no reference to classical normals:
/// project the coordinate frame onto the normal space via Y + J_M^2(Y), then
/// Gram-Schmidt under gbar.
pub fn projected_normal_frame(fp: &FramePoint) -> Result<Vec<DVec<f64>>, PoissonError> {
    let m = fp.ambient_dim();
    let mut seeds = Vec::with_capacity(m);
    for k in 0..m {
        let y = DVec::from_fn(m, |i| if i == k { 1.0 } else { 0.0 });
        let tang = projection(fp, &y)?;
        seeds.push(y.sub(&tang));
    }
    let out = gram_schmidt(&seeds, &fp.gbar, 1e-8)?;
    if out.len() != fp.codim() {
        return Err(PoissonError::FrameCount {
            expected: fp.codim(),
            got: out.len(),
        });
    }
    Ok(out)
}

/// Mixed-form normal-space projector sum_A N_A^i (N_A)_j from a list of
/// orthonormal normals. Used to compare frame spans.
pub fn normal_projector(fp: &FramePoint, normals: &[DVec<f64>]) -> Mat<f64> {
    let m = fp.ambient_dim();
    Mat::from_fn(m, m, |i, j| {
        let mut acc = 0.0;
        for n in normals {
            let mut lowered = 0.0;
            for k in 0..m {
                lowered += fp.gbar[(j, k)] * n[k];
            }
            acc += n[i] * lowered;
        }
        acc
    })
}

/// Flat-ambient mean curvature from brackets only:
/// H^k = (rho^2/2g) sum_A sum_ij {x^i,x^j}{x^j,n_A^i} n_A^k.
pub fn mean_curvature_flat(fp: &FramePoint) -> Result<DVec<f64>, PoissonError> {
    if !fp.euclidean {
        return Err(PoissonError::NotEuclidean);
    }
    let m = fp.ambient_dim();
    let r2 = fp.rho.val * fp.rho.val;
    let mut h = DVec::<f64>::zeros(m);
    for a_idx in 0..fp.codim() {
        let n = &fp.normals[a_idx];
        let mut sum = 0.0;
        for i in 0..m {
            for j in 0..m {
                sum += bracket(fp.x_jets[i], fp.x_jets[j], fp.rho)?
                    * bracket(fp.x_jets[j], n[i], fp.rho)?;
            }
        }
        h = h.add(&fp.normal_values(a_idx).scale(r2 / (2.0 * fp.g) * sum));
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{frame_at, golden, Density};
    use crate::expr::Expr;
    use crate::jet::{eval_jet, Scalar};
    use std::collections::HashMap;

    const U: [f64; 2] = [1.0471975511965976, 0.7]; // (pi/3, 0.7)

    #[test]
    fn coordinate_bracket() {
        let f = Jet2::seed_u1(0.3);
        let h = Jet2::seed_u2(0.9);
        let rho = Jet2::constant(1.0);
        assert_eq!(bracket(f, h, rho).unwrap(), 1.0);
        assert_eq!(bracket(f, f, rho).unwrap(), 0.0);
    }

    #[test]
    fn unit_sphere_embedding_brackets() {
        // with rho = sqrt(g): {x^1,x^2} = x^3 and cyclic
        let fp = frame_at(&golden::sphere(1.0), U).unwrap();
        let b12 = bracket(fp.x_jets[0], fp.x_jets[1], fp.rho).unwrap();
        let b23 = bracket(fp.x_jets[1], fp.x_jets[2], fp.rho).unwrap();
        let b31 = bracket(fp.x_jets[2], fp.x_jets[0], fp.rho).unwrap();
        assert!((b12 - fp.x[2]).abs() < 1e-12);
        assert!((b23 - fp.x[0]).abs() < 1e-12);
        assert!((b31 - fp.x[1]).abs() < 1e-12);
        // at u = (pi/3, 0): {x^1,x^2} = cos(pi/3) = 0.5
        let fp0 = frame_at(&golden::sphere(1.0), [U[0], 0.0]).unwrap();
        let b = bracket(fp0.x_jets[0], fp0.x_jets[1], fp0.rho).unwrap();
        assert!((b - 0.5).abs() < 1e-12);
    }

    #[test]
    fn plane_p_map_components() {
        let fp = frame_at(&golden::plane(), [0.4, -0.2]).unwrap();
        let p = p_map(&fp).unwrap();
        let inv_rho = 1.0 / fp.rho.val;
        assert!((p.contra[(0, 1)] - inv_rho).abs() < 1e-12);
        assert!((p.contra[(1, 0)] + inv_rho).abs() < 1e-12);
        for i in 0..3 {
            assert!(p.contra[(i, 2)].abs() < 1e-12);
            assert!(p.contra[(2, i)].abs() < 1e-12);
            assert!(p.contra[(i, i)].abs() < 1e-12);
        }
    }

    #[test]
    fn p_antisymmetric_and_images_tangent() {
        for spec in [
            golden::sphere(2.0),
            golden::torus(2.0, 1.0),
            golden::clifford_torus(),
            golden::horosphere(),
        ] {
            let fp = frame_at(&spec, U).unwrap();
            let p = p_map(&fp).unwrap();
            let m = fp.ambient_dim();
            for i in 0..m {
                for j in 0..m {
                    assert!((p.contra[(i, j)] + p.contra[(j, i)]).abs() < 1e-12);
                }
            }
            // P(X) and S_A(X) tangent for arbitrary ambient X
            let x = DVec::from_fn(m, |i| 0.3 + 0.7 * i as f64);
            for a_idx in 0..fp.codim() {
                let s = s_map(&fp, a_idx).unwrap();
                for img in [p.apply(&x), s.apply(&x)] {
                    for b_idx in 0..fp.codim() {
                        assert!(
                            fp.gbar_dot(&img, &fp.normal_values(b_idx)).abs() < 1e-9,
                            "{}: image not tangent",
                            spec.label
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn p_squared_is_scaled_tangent_projection() {
        for density in [
            Density::SqrtG,
            Density::Unit,
            Density::Custom(Expr::parse("1+u1^2+u2^2").unwrap()),
        ] {
            let spec = golden::torus(2.0, 1.0).with_density(density);
            let fp = frame_at(&spec, U).unwrap();
            let p = p_map(&fp).unwrap();
            let p2 = p.compose(&p, &fp.gbar_inv);
            let factor = -fp.g / (fp.rho.val * fp.rho.val);
            for y in [fp.e_values(0), fp.e_values(1)] {
                let img = p2.apply(&y);
                for i in 0..fp.ambient_dim() {
                    assert!((img[i] - factor * y[i]).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn s_map_restricted_components_match_h() {
        // (S_A)^a_b = -(1/rho) eps^{ac} h_{A,cb}
        let fp = frame_at(&golden::sphere(2.0), U).unwrap();
        let s = s_map(&fp, 0).unwrap();
        let inv_rho = 1.0 / fp.rho.val;
        let eps = [[0.0, 1.0], [-1.0, 0.0]];
        for b in 0..2 {
            let img = s.apply(&fp.e_values(b));
            // expand in e_a basis
            for a in 0..2 {
                let mut comp = 0.0;
                for c in 0..2 {
                    comp += fp.g_inv[(a, c)] * fp.gbar_dot(&img, &fp.e_values(c));
                }
                let mut expect = 0.0;
                for c in 0..2 {
                    expect += -inv_rho * eps[a][c] * fp.h[0][(c, b)];
                }
                assert!((comp - expect).abs() < 1e-9, "a={a} b={b}: {comp} vs {expect}");
            }
        }
    }

    #[test]
    fn trace_chain_proposition() {
        for spec in [
            golden::sphere(2.0),
            golden::clifford_torus(),
            golden::horosphere(),
        ] {
            let fp = frame_at(&spec, U).unwrap();
            let (a_maps, b_maps) = compound_maps(&fp).unwrap();
            let factor = fp.g / (fp.rho.val * fp.rho.val);
            for a_idx in 0..fp.codim() {
                let tr_w = fp.w[a_idx].trace();
                let tr_w2 = fp.w[a_idx].matmul(&fp.w[a_idx]).trace();
                for t in [&a_maps[a_idx], &b_maps[a_idx]] {
                    let (full, restr) = traces(t, &fp).unwrap();
                    assert!((full - factor * tr_w).abs() < 1e-9);
                    assert!((restr - factor * tr_w).abs() < 1e-9);
                    let t2 = t.compose(t, &fp.gbar_inv);
                    let (full2, restr2) = traces(&t2, &fp).unwrap();
                    let expect2 = factor * factor * tr_w2;
                    assert!((full2 - expect2).abs() < 1e-8 * (1.0 + expect2.abs()));
                    assert!((restr2 - expect2).abs() < 1e-8 * (1.0 + expect2.abs()));
                }
            }
        }
    }

    #[test]
    fn trace_squares_proposition() {
        for spec in [
            golden::sphere(2.0),
            golden::torus(2.0, 1.0),
            golden::clifford_torus(),
            golden::horosphere(),
        ] {
            let fp = frame_at(&spec, U).unwrap();
            let r2 = fp.rho.val * fp.rho.val;
            let p = p_map(&fp).unwrap();
            let p2 = p.compose(&p, &fp.gbar_inv);
            let (full, restr) = traces(&p2, &fp).unwrap();
            let expect = -2.0 * fp.g / r2;
            assert!((full - expect).abs() < 1e-9 * (1.0 + expect.abs()));
            assert!((restr - expect).abs() < 1e-9 * (1.0 + expect.abs()));
            let (tr_p_full, tr_p_restr) = traces(&p, &fp).unwrap();
            assert!(tr_p_full.abs() < 1e-12);
            assert!(tr_p_restr.abs() < 1e-10);
            for a_idx in 0..fp.codim() {
                let s = s_map(&fp, a_idx).unwrap();
                let s2 = s.compose(&s, &fp.gbar_inv);
                let (full, restr) = traces(&s2, &fp).unwrap();
                let expect = -2.0 / r2 * fp.h[a_idx].det();
                assert!((full - expect).abs() < 1e-9 * (1.0 + expect.abs()));
                assert!((restr - expect).abs() < 1e-9 * (1.0 + expect.abs()));
            }
        }
    }

    #[test]
    fn b_map_is_scaled_weingarten() {
        let fp = frame_at(&golden::sphere(1.0), U).unwrap();
        let (_, b_maps) = compound_maps(&fp).unwrap();
        // B(e_1) = W(e_1) with rho = sqrt g (factor g/rho^2 = 1)
        let img = b_maps[0].apply(&fp.e_values(0));
        // W(e_1) in ambient components: W^a_1 e_a
        let mut expect = DVec::<f64>::zeros(3);
        for a in 0..2 {
            expect = expect.add(&fp.e_values(a).scale(fp.w[0][(a, 0)]));
        }
        for i in 0..3 {
            assert!((img[i] - expect[i]).abs() < 1e-9, "{} vs {}", img[i], expect[i]);
        }
        // sphere radius 2: Tr B = tr W = -2/R with the outward-normal sign,
        // either sign consistent between the two sides
        let fp2 = frame_at(&golden::sphere(2.0), U).unwrap();
        let (_, b2) = compound_maps(&fp2).unwrap();
        let tr_b = b2[0].trace_full();
        let tr_w = fp2.w[0].trace();
        assert!((tr_b - tr_w).abs() < 1e-9);
        assert!((tr_w.abs() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn curvatures_match_classical_on_all_golden_surfaces() {
        for spec in [
            golden::plane(),
            golden::sphere(2.0),
            golden::torus(2.0, 1.0),
            golden::catenoid(),
            golden::clifford_torus(),
            golden::horosphere(),
        ] {
            for density in [
                Density::SqrtG,
                Density::Unit,
                Density::Custom(Expr::parse("1+u1^2+u2^2").unwrap()),
            ] {
                let s = spec.with_density(density);
                let fp = frame_at(&s, U).unwrap();
                let k_poisson = gaussian_curvature(&fp).unwrap();
                let k_classical = fp.gaussian_curvature();
                assert!(
                    (k_poisson - k_classical).abs() < 1e-9,
                    "{}: K {k_poisson} vs {k_classical}",
                    s.label
                );
                let h_poisson = mean_curvature(&fp).unwrap();
                let h_classical = fp.mean_curvature();
                for i in 0..fp.ambient_dim() {
                    assert!((h_poisson[i] - h_classical[i]).abs() < 1e-9);
                }
                if s.ambient.is_euclidean() {
                    let k_flat = gaussian_curvature_flat(&fp).unwrap();
                    assert!((k_flat - k_poisson).abs() < 1e-10);
                    let h_flat = mean_curvature_flat(&fp).unwrap();
                    for i in 0..fp.ambient_dim() {
                        assert!((h_flat[i] - h_poisson[i]).abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn normal_connection_antisymmetric_and_matches_jets() {
        let fp = frame_at(&golden::clifford_torus(), U).unwrap();
        let x = fp.e_values(0);
        for a_idx in 0..2 {
            for b_idx in 0..2 {
                let d_ab = normal_connection(&fp, a_idx, b_idx, &x).unwrap();
                let d_ba = normal_connection(&fp, b_idx, a_idx, &x).unwrap();
                assert!((d_ab + d_ba).abs() < 1e-9);
                // oracle: (D_X)_{AB} = gbar(N_B?, nabla_X N_A) -- component
                // convention (D_X)_{AB} = gbar(N_A, D_X N_B) = gbar(N_A, nabla_X N_B)
                let nabla = fp.cov_deriv_normal_along(b_idx, [1.0, 0.0]);
                let oracle = fp.gbar_dot(&fp.normal_values(a_idx), &nabla);
                assert!(
                    (d_ab - oracle).abs() < 1e-9,
                    "A={a_idx} B={b_idx}: {d_ab} vs {oracle}"
                );
            }
        }
        // codimension one: trivially zero
        let fp1 = frame_at(&golden::sphere(2.0), U).unwrap();
        let d_11 = normal_connection(&fp1, 0, 0, &fp1.e_values(1)).unwrap();
        assert!(d_11.abs() < 1e-9);
    }

    #[test]
    fn weingarten_reconstruction_matches_jets() {
        for spec in [
            golden::plane(),
            golden::sphere(1.0),
            golden::clifford_torus(),
            golden::horosphere(),
        ] {
            let fp = frame_at(&spec, [0.8, 0.45]).unwrap();
            for a_idx in 0..fp.codim() {
                for xc in [[1.0, 0.0], [0.0, 1.0], [0.6, -1.2]] {
                    let x = fp
                        .e_values(0)
                        .scale(xc[0])
                        .add(&fp.e_values(1).scale(xc[1]));
                    let rec = weingarten_reconstruct(&fp, a_idx, &x).unwrap();
                    let oracle = fp.cov_deriv_normal_along(a_idx, xc);
                    for i in 0..fp.ambient_dim() {
                        assert!(
                            (rec[i] - oracle[i]).abs() < 1e-8,
                            "{}: {} vs {}",
                            spec.label,
                            rec[i],
                            oracle[i]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn horosphere_weingarten_is_umbilic() {
        let fp = frame_at(&golden::horosphere(), [0.1, 0.9]).unwrap();
        let x = fp.e_values(0);
        let rec = weingarten_reconstruct(&fp, 0, &x).unwrap();
        // umbilic: nabla_X N proportional to X
        let ratio = rec[0] / x[0];
        for i in 0..3 {
            if x[i].abs() > 1e-12 {
                assert!((rec[i] / x[i] - ratio).abs() < 1e-8);
            }
        }
        assert!((ratio.abs() - 1.0).abs() < 1e-8, "|ratio| = {}", ratio.abs());
    }

    #[test]
    fn gauss_rewrite_matches_induced_christoffels() {
        for spec in [golden::sphere(1.0), golden::clifford_torus()] {
            let fp = frame_at(&spec, [0.8, 0.45]).unwrap();
            let gamma = fp.induced_christoffel();
            for a in 0..2 {
                for b in 0..2 {
                    let mut xc = [0.0, 0.0];
                    xc[a] = 1.0;
                    let lhs = gauss_formula_rewrite(&fp, xc, b).unwrap();
                    // oracle: Gamma^c_{ab} e_c
                    let mut expect = DVec::<f64>::zeros(fp.ambient_dim());
                    for c in 0..2 {
                        expect = expect.add(&fp.e_values(c).scale(gamma[c][(a, b)]));
                    }
                    for i in 0..fp.ambient_dim() {
                        assert!(
                            (lhs[i] - expect[i]).abs() < 1e-8,
                            "{}: component {i}: {} vs {}",
                            spec.label,
                            lhs[i],
                            expect[i]
                        );
                    }
                    // result tangent
                    for n_idx in 0..fp.codim() {
                        assert!(fp.gbar_dot(&lhs, &fp.normal_values(n_idx)).abs() < 1e-8);
                    }
                }
            }
        }
    }

    #[test]
    fn gauss_rewrite_density_invariant() {
        let base = golden::torus(2.0, 1.0);
        let fp_sqrt = frame_at(&base, U).unwrap();
        let fp_one = frame_at(&base.with_density(Density::Unit), U).unwrap();
        for a in 0..2 {
            let lhs = gauss_formula_rewrite(&fp_sqrt, [if a == 0 { 1.0 } else { 0.0 }, if a == 0 { 0.0 } else { 1.0 }], 0).unwrap();
            let rhs = gauss_formula_rewrite(&fp_one, [if a == 0 { 1.0 } else { 0.0 }, if a == 0 { 0.0 } else { 1.0 }], 0).unwrap();
            for i in 0..3 {
                assert!((lhs[i] - rhs[i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn projection_fixes_tangents_kills_normals() {
        for spec in [golden::sphere(2.0), golden::clifford_torus()] {
            let fp = frame_at(&spec, U).unwrap();
            let m = fp.ambient_dim();
            for a in 0..2 {
                let e = fp.e_values(a);
                let pe = projection(&fp, &e).unwrap();
                for i in 0..m {
                    assert!((pe[i] - e[i]).abs() < 1e-9);
                }
                // J^2 = -1 on tangents
                let je = complex_structure(&fp, &e).unwrap();
                let jje = complex_structure(&fp, &je).unwrap();
                for i in 0..m {
                    assert!((jje[i] + e[i]).abs() < 1e-9);
                }
            }
            for a_idx in 0..fp.codim() {
                let n = fp.normal_values(a_idx);
                let pn = projection(&fp, &n).unwrap();
                for i in 0..m {
                    assert!(pn[i].abs() < 1e-9);
                }
            }
            // general vector: gbar(proj X, e_a) = gbar(X, e_a)
            let x = DVec::from_fn(m, |i| (i as f64 + 1.0) * 0.37);
            let px = projection(&fp, &x).unwrap();
            for a in 0..2 {
                let d1 = fp.gbar_dot(&px, &fp.e_values(a));
                let d2 = fp.gbar_dot(&x, &fp.e_values(a));
                assert!((d1 - d2).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn complex_structure_agrees_with_classical_on_tangents() {
        let fp = frame_at(&golden::torus(2.0, 1.0), U).unwrap();
        let xc = [0.4, -0.9];
        let x = fp.e_values(0).scale(xc[0]).add(&fp.e_values(1).scale(xc[1]));
        let jm = complex_structure(&fp, &x).unwrap();
        let jc = fp.complex_structure(xc);
        let expect = fp.e_values(0).scale(jc[0]).add(&fp.e_values(1).scale(jc[1]));
        for i in 0..3 {
            assert!((jm[i] - expect[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn kahler_bracket_rescaling() {
        // bracket(f,h,rho) * (rho/sqrt g) = bracket(f,h,sqrt g)
        let spec = golden::sphere(2.0).with_density(Density::Custom(
            Expr::parse("1+u1^2+u2^2").unwrap(),
        ));
        let fp = frame_at(&spec, U).unwrap();
        let f = eval_jet(&Expr::parse("u1*sin(u2)").unwrap(), U, &HashMap::new()).unwrap();
        let h = eval_jet(&Expr::parse("u2+cos(u1)").unwrap(), U, &HashMap::new()).unwrap();
        let sqrt_g = fp.g_jet.sqrt();
        let lhs = bracket(f, h, fp.rho).unwrap() * fp.rho.val / fp.g.sqrt();
        let rhs = bracket(f, h, sqrt_g).unwrap();
        assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs.abs()));
    }

    #[test]
    fn projected_frame_spans_normal_space() {
        for spec in [golden::plane(), golden::sphere(2.0), golden::clifford_torus()] {
            let fp = frame_at(&spec, U).unwrap();
            let frame = projected_normal_frame(&fp).unwrap();
            assert_eq!(frame.len(), fp.codim());
            for (i, n) in frame.iter().enumerate() {
                for (j, n2) in frame.iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((fp.gbar_dot(n, n2) - expect).abs() < 1e-9);
                }
                for a in 0..2 {
                    assert!(fp.gbar_dot(n, &fp.e_values(a)).abs() < 1e-9);
                }
            }
            // projector comparison against the classical frame
            let classical: Vec<DVec<f64>> =
                (0..fp.codim()).map(|i| fp.normal_values(i)).collect();
            let p1 = normal_projector(&fp, &frame);
            let p2 = normal_projector(&fp, &classical);
            for i in 0..fp.ambient_dim() {
                for j in 0..fp.ambient_dim() {
                    assert!((p1[(i, j)] - p2[(i, j)]).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn jacobi_identity_random_polynomials() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for density in [
            Density::SqrtG,
            Density::Unit,
            Density::Custom(Expr::parse("1+u1^2+u2^2").unwrap()),
        ] {
            let spec = golden::torus(2.0, 1.0).with_density(density);
            let fp = frame_at(&spec, U).unwrap();
            for _ in 0..10 {
                let mut poly = || {
                    let c: [f64; 6] = core::array::from_fn(|_| rng.gen_range(-1.0..1.0));
                    let u1 = Jet2::seed_u1(U[0]);
                    let u2 = Jet2::seed_u2(U[1]);
                    Jet2::constant(c[0])
                        + u1 * Jet2::constant(c[1])
                        + u2 * Jet2::constant(c[2])
                        + u1 * u1 * Jet2::constant(c[3])
                        + u1 * u2 * Jet2::constant(c[4])
                        + u2 * u2 * Jet2::constant(c[5])
                };
                let (f, g, h) = (poly(), poly(), poly());
                let t1 = bracket(f, bracket_jet1(g, h, fp.rho).unwrap(), fp.rho).unwrap();
                let t2 = bracket(g, bracket_jet1(h, f, fp.rho).unwrap(), fp.rho).unwrap();
                let t3 = bracket(h, bracket_jet1(f, g, fp.rho).unwrap(), fp.rho).unwrap();
                assert!((t1 + t2 + t3).abs() < 1e-8, "jacobi residual {}", t1 + t2 + t3);
            }
        }
    }

    #[test]
    fn bracket_jet1_value_and_derivatives() {
        // value slot equals bracket(); derivative slots match finite differences
        let spec = golden::torus(2.0, 1.0);
        let u = [0.9, 1.7];
        let h_step = 1e-6;
        let fp = frame_at(&spec, u).unwrap();
        let b = bracket_jet1(fp.x_jets[0], fp.x_jets[1], fp.rho).unwrap();
        assert_eq!(b.val, bracket(fp.x_jets[0], fp.x_jets[1], fp.rho).unwrap());
        for dir in 0..2 {
            let mut up = u;
            let mut um = u;
            up[dir] += h_step;
            um[dir] -= h_step;
            let fpp = frame_at(&spec, up).unwrap();
            let fpm = frame_at(&spec, um).unwrap();
            let bp = bracket(fpp.x_jets[0], fpp.x_jets[1], fpp.rho).unwrap();
            let bm = bracket(fpm.x_jets[0], fpm.x_jets[1], fpm.rho).unwrap();
            let fd = (bp - bm) / (2.0 * h_step);
            let slot = if dir == 0 { b.d1 } else { b.d2 };
            assert!((fd - slot).abs() < 1e-6, "dir {dir}: fd {fd} vs jet {slot}");
        }
    }

    #[test]
    fn simplified_sqrt_g_path_agrees_with_general() {
        // with rho = sqrt g the prefactors rho^2/g collapse to 1
        let fp = frame_at(&golden::clifford_torus(), U).unwrap();
        let r2_over_g = fp.rho.val * fp.rho.val / fp.g;
        assert!((r2_over_g - 1.0).abs() < 1e-12);
        let (_, b_maps) = compound_maps(&fp).unwrap();
        // simplified H = 1/2 sum (Tr B_A) N_A
        let mut h_simpl = DVec::<f64>::zeros(4);
        for (a_idx, b) in b_maps.iter().enumerate() {
            h_simpl = h_simpl.add(&fp.normal_values(a_idx).scale(0.5 * b.trace_full()));
        }
        let h_general = mean_curvature(&fp).unwrap();
        for i in 0..4 {
            assert!((h_simpl[i] - h_general[i]).abs() < 1e-12);
        }
    }
}
