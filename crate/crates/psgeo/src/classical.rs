//! The classical oracle: frame, induced metric, normal frame, second
//! fundamental forms, Weingarten maps and curvatures of an embedded surface,
//! computed by textbook formulas. Everything is carried in jet arithmetic so
//! first u-derivatives of the frame are available downstream.

use std::collections::HashMap;

use crate::ambient::{AmbientError, AmbientManifold, Rank3};
use crate::expr::{EvalError, Expr};
use crate::jet::{eval_jet, Jet2, Scalar};
use crate::tensor::{gram_schmidt, metric_dot, DVec, Mat, TensorError};
use thiserror::Error;

/// Degeneracy threshold on sqrt(g).
pub const DEGENERACY_TOL: f64 = 1e-10;
/// Drop tolerance for the normal-frame Gram-Schmidt pass.
pub const FRAME_DROP_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("degenerate tangent plane: sqrt(g) = {sqrt_g:.3e} below {DEGENERACY_TOL:.0e}")]
    Degenerate { sqrt_g: f64 },
    #[error("normal frame construction produced {got} vectors, expected {expected}")]
    NormalCount { expected: usize, got: usize },
    #[error("density vanishes at evaluated point (rho = {rho:.3e})")]
    VanishingDensity { rho: f64 },
    #[error("embedding dimension {embedding} does not match ambient dimension {ambient}")]
    DimensionMismatch { embedding: usize, ambient: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Ambient(#[from] AmbientError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Choice of the bracket density rho.
#[derive(Debug, Clone)]
pub enum Density {
    /// rho = sqrt(det g_ab); the choice under which all prefactors collapse.
    SqrtG,
    /// rho = 1.
    Unit,
    /// An arbitrary non-vanishing expression in u1, u2.
    Custom(Expr),
}

/// An embedded surface: ambient manifold, embedding expressions, density.
#[derive(Debug, Clone)]
pub struct SurfaceSpec {
    pub ambient: AmbientManifold,
    pub embedding: Vec<Expr>,
    pub density: Density,
    pub label: String,
}

impl SurfaceSpec {
    pub fn new(
        ambient: AmbientManifold,
        embedding: Vec<Expr>,
        density: Density,
        label: impl Into<String>,
    ) -> Result<Self, GeomError> {
        if embedding.len() != ambient.dim() {
            return Err(GeomError::DimensionMismatch {
                embedding: embedding.len(),
                ambient: ambient.dim(),
            });
        }
        Ok(SurfaceSpec {
            ambient,
            embedding,
            density,
            label: label.into(),
        })
    }

    /// Codimension p = m - 2.
    pub fn codim(&self) -> usize {
        self.ambient.dim() - 2
    }

    pub fn with_density(&self, density: Density) -> SurfaceSpec {
        SurfaceSpec {
            density,
            ..self.clone()
        }
    }
}

/// All classically computed pointwise data at one parameter point.
///
/// Tangent vectors e_a, the normal frame N_A and the induced metric are jet
/// valued: their d1/d2 slots hold first u-derivatives. Second-derivative
/// slots of frame vectors are not populated (the tangent jets are built from
/// second derivatives of the embedding, which is where the jet order stops).
#[derive(Debug, Clone)]
pub struct FramePoint {
    pub u: [f64; 2],
    /// Embedding point.
    pub x: DVec<f64>,
    /// Embedding coordinates as full second-order jets.
    pub x_jets: Vec<Jet2>,
    /// Coordinate tangent vectors e_a = d_a x, with first u-derivatives.
    pub e: [DVec<Jet2>; 2],
    /// Ambient metric along the surface, jet valued, and its point values.
    pub gbar_jets: Mat<Jet2>,
    pub gbar: Mat<f64>,
    pub gbar_inv: Mat<f64>,
    /// Induced metric, its inverse and determinant.
    pub g_ab_jets: Mat<Jet2>,
    pub g_ab: Mat<f64>,
    pub g_inv: Mat<f64>,
    pub g_jet: Jet2,
    pub g: f64,
    /// Bracket density.
    pub rho: Jet2,
    /// Orthonormalized tangent frame (first two Gram-Schmidt outputs).
    pub tangent_frame: [DVec<Jet2>; 2],
    /// Orthonormal normal frame N_1..N_p with first u-derivatives.
    pub normals: Vec<DVec<Jet2>>,
    /// Second fundamental forms h_{A,ab}.
    pub h: Vec<Mat<f64>>,
    /// Weingarten maps W_A = g^{-1} h_A.
    pub w: Vec<Mat<f64>>,
    /// Ambient curvature pairing g(R(e1,e2)e2, e1).
    pub ambient_term: f64,
    /// Ambient Christoffel symbols along the surface, jet valued.
    pub gamma_jets: Rank3<Jet2>,
    /// Whether the ambient metric is the flat euclidean one.
    pub euclidean: bool,
}

fn jet_vec_values(v: &DVec<Jet2>) -> DVec<f64> {
    DVec::from_fn(v.dim(), |i| v[i].val)
}

impl FramePoint {
    pub fn ambient_dim(&self) -> usize {
        self.x.dim()
    }

    pub fn codim(&self) -> usize {
        self.normals.len()
    }

    /// Ambient inner product of plain component vectors at this point.
    pub fn gbar_dot(&self, a: &DVec<f64>, b: &DVec<f64>) -> f64 {
        metric_dot(&self.gbar, a, b)
    }

    /// Point values of e_a.
    pub fn e_values(&self, a: usize) -> DVec<f64> {
        jet_vec_values(&self.e[a])
    }

    /// Point values of N_A.
    pub fn normal_values(&self, idx: usize) -> DVec<f64> {
        jet_vec_values(&self.normals[idx])
    }

    /// Partial derivative d_b of a jet-valued ambient vector (component-wise).
    pub fn partial(v: &DVec<Jet2>, b: usize) -> DVec<f64> {
        DVec::from_fn(v.dim(), |i| if b == 0 { v[i].d1 } else { v[i].d2 })
    }

    /// Ambient covariant derivative along u^b of a jet-valued vector field:
    /// (nabla_b V)^i = d_b V^i + Gamma^i_{jk} e_b^j V^k.
    pub fn cov_deriv(&self, v: &DVec<Jet2>, b: usize) -> DVec<f64> {
        let m = self.ambient_dim();
        let dv = Self::partial(v, b);
        let eb = self.e_values(b);
        let vv = jet_vec_values(v);
        DVec::from_fn(m, |i| {
            let mut acc = dv[i];
            for j in 0..m {
                for k in 0..m {
                    acc += self.gamma_jets[i][(j, k)].val * eb[j] * vv[k];
                }
            }
            acc
        })
    }

    /// nabla_X N_A for tangent X given in the e_a basis.
    pub fn cov_deriv_normal_along(&self, a_idx: usize, x_components: [f64; 2]) -> DVec<f64> {
        let d1 = self.cov_deriv(&self.normals[a_idx], 0);
        let d2 = self.cov_deriv(&self.normals[a_idx], 1);
        d1.scale(x_components[0]).add(&d2.scale(x_components[1]))
    }

    /// Gaussian curvature by the Gauss equation:
    /// ambient term over g plus sum of det(h_A)/g.
    pub fn gaussian_curvature(&self) -> f64 {
        let mut k = self.ambient_term / self.g;
        for h_a in &self.h {
            k += h_a.det() / self.g;
        }
        k
    }

    /// Mean curvature vector H = (1/2) sum_A (tr W_A) N_A.
    pub fn mean_curvature(&self) -> DVec<f64> {
        let m = self.ambient_dim();
        let mut h = DVec::<f64>::zeros(m);
        for (a_idx, w_a) in self.w.iter().enumerate() {
            let tr = w_a.trace();
            h = h.add(&self.normal_values(a_idx).scale(0.5 * tr));
        }
        h
    }

    /// Norm of the mean curvature vector under the ambient metric.
    pub fn mean_curvature_norm(&self) -> f64 {
        let h = self.mean_curvature();
        self.gbar_dot(&h, &h).sqrt()
    }

    /// Complex structure on tangent components: J(X)^a = (1/sqrt g) eps^{ac} g_cb X^b.
    pub fn complex_structure(&self, x: [f64; 2]) -> [f64; 2] {
        let sq = self.g.sqrt();
        let lower = [
            self.g_ab[(0, 0)] * x[0] + self.g_ab[(0, 1)] * x[1],
            self.g_ab[(1, 0)] * x[0] + self.g_ab[(1, 1)] * x[1],
        ];
        // eps^{12} = +1
        [lower[1] / sq, -lower[0] / sq]
    }

    /// Christoffel symbols of the induced metric from the g_ab jets.
    pub fn induced_christoffel(&self) -> Rank3<f64> {
        let dg = |c: usize, a: usize, b: usize| -> f64 {
            let j = self.g_ab_jets[(a, b)];
            if c == 0 {
                j.d1
            } else {
                j.d2
            }
        };
        let mut gamma: Rank3<f64> = vec![Mat::zeros(2, 2); 2];
        for c in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    let mut acc = 0.0;
                    for d in 0..2 {
                        acc += 0.5
                            * self.g_inv[(c, d)]
                            * (dg(a, d, b) + dg(b, d, a) - dg(d, a, b));
                    }
                    gamma[c][(a, b)] = acc;
                }
            }
        }
        gamma
    }
}

/// Evaluate the full classical frame at a parameter point.
pub fn frame_at(spec: &SurfaceSpec, u: [f64; 2]) -> Result<FramePoint, GeomError> {
    let m = spec.ambient.dim();
    let p = spec.codim();
    let no_extra: HashMap<String, Jet2> = HashMap::new();

    let x_jets: Vec<Jet2> = spec
        .embedding
        .iter()
        .map(|e| eval_jet(e, u, &no_extra))
        .collect::<Result<_, _>>()?;
    let x = DVec::from_fn(m, |i| x_jets[i].val);

    // tangent jets: value and first u-derivatives from the embedding jets;
    // second-derivative slots are beyond jet order and stay zero
    let e1 = DVec::from_fn(m, |i| Jet2 {
        val: x_jets[i].d1,
        d1: x_jets[i].d11,
        d2: x_jets[i].d12,
        d11: 0.0,
        d12: 0.0,
        d22: 0.0,
    });
    let e2 = DVec::from_fn(m, |i| Jet2 {
        val: x_jets[i].d2,
        d1: x_jets[i].d12,
        d2: x_jets[i].d22,
        d11: 0.0,
        d12: 0.0,
        d22: 0.0,
    });

    let gbar_jets = spec.ambient.metric_jets(&x_jets)?;
    let gbar = gbar_jets.values();
    let gbar_inv = gbar.inverse()?;

    let e = [e1, e2];
    let g_ab_jets = Mat::from_fn(2, 2, |a, b| metric_dot(&gbar_jets, &e[a], &e[b]));
    let g_ab = g_ab_jets.values();
    let g_jet = g_ab_jets.det();
    let g = g_jet.val;
    if g < 0.0 || g.sqrt() < DEGENERACY_TOL {
        return Err(GeomError::Degenerate {
            sqrt_g: g.max(0.0).sqrt(),
        });
    }
    let g_inv = g_ab.inverse()?;

    let rho = match &spec.density {
        Density::SqrtG => g_jet.sqrt(),
        Density::Unit => Jet2::constant(1.0),
        Density::Custom(expr) => eval_jet(expr, u, &no_extra)?,
    };
    if rho.val.abs() < 1e-12 {
        return Err(GeomError::VanishingDensity { rho: rho.val });
    }

    // deterministic frame: Gram-Schmidt over jets on (e_1, e_2, d/dx^1, ..., d/dx^m)
    let mut seeds: Vec<DVec<Jet2>> = vec![e[0].clone(), e[1].clone()];
    for k in 0..m {
        seeds.push(DVec::from_fn(m, |i| {
            Jet2::constant(if i == k { 1.0 } else { 0.0 })
        }));
    }
    let frame = gram_schmidt(&seeds, &gbar_jets, FRAME_DROP_TOL)?;
    if frame.len() != m {
        return Err(GeomError::NormalCount {
            expected: p,
            got: frame.len().saturating_sub(2),
        });
    }
    let tangent_frame = [frame[0].clone(), frame[1].clone()];
    let normals: Vec<DVec<Jet2>> = frame[2..].to_vec();

    let gamma_jets = spec.ambient.christoffel_jets(&x_jets)?;

    let ambient_term =
        spec.ambient
            .riemann_term(&x, &jet_vec_values(&e[0]), &jet_vec_values(&e[1]))?;

    // assemble a partial FramePoint to reuse cov_deriv for h
    let mut fp = FramePoint {
        u,
        x,
        x_jets,
        e,
        gbar_jets,
        gbar,
        gbar_inv,
        g_ab_jets,
        g_ab,
        g_inv,
        g_jet,
        g,
        rho,
        tangent_frame,
        normals,
        h: Vec::new(),
        w: Vec::new(),
        ambient_term,
        gamma_jets,
        euclidean: spec.ambient.is_euclidean(),
    };

    // h_{A,ab} = -g(e_a, nabla_b N_A), W_A = g^{-1} h_A
    for a_idx in 0..p {
        let d = [
            fp.cov_deriv(&fp.normals[a_idx], 0),
            fp.cov_deriv(&fp.normals[a_idx], 1),
        ];
        let h_a = Mat::from_fn(2, 2, |a, b| -fp.gbar_dot(&fp.e_values(a), &d[b]));
        fp.h.push(h_a);
    }
    for h_a in &fp.h {
        fp.w.push(fp.g_inv.matmul(h_a));
    }
    Ok(fp)
}

/// Sampled surfaces used across the test suite.
pub mod golden {
    use super::*;

    fn embed(texts: &[&str]) -> Vec<Expr> {
        texts.iter().map(|t| Expr::parse(t).unwrap()).collect()
    }

    /// Flat plane x = (u1, u2, 0) in R^3.
    pub fn plane() -> SurfaceSpec {
        SurfaceSpec::new(
            AmbientManifold::euclidean(3),
            embed(&["u1", "u2", "0"]),
            Density::SqrtG,
            "plane",
        )
        .unwrap()
    }

    /// Round sphere of radius `r` in R^3 (polar angle u1, azimuth u2).
    pub fn sphere(r: f64) -> SurfaceSpec {
        SurfaceSpec::new(
            AmbientManifold::euclidean(3),
            embed(&[
                &format!("{r}*sin(u1)*cos(u2)"),
                &format!("{r}*sin(u1)*sin(u2)"),
                &format!("{r}*cos(u1)"),
            ]),
            Density::SqrtG,
            format!("sphere_r{r}"),
        )
        .unwrap()
    }

    /// Torus of revolution with radii (R, r), tube angle u1, axial angle u2.
    pub fn torus(big_r: f64, r: f64) -> SurfaceSpec {
        SurfaceSpec::new(
            AmbientManifold::euclidean(3),
            embed(&[
                &format!("({big_r}+{r}*cos(u1))*cos(u2)"),
                &format!("({big_r}+{r}*cos(u1))*sin(u2)"),
                &format!("{r}*sin(u1)"),
            ]),
            Density::SqrtG,
            format!("torus_{big_r}_{r}"),
        )
        .unwrap()
    }

    /// Catenoid, a minimal surface in R^3.
    pub fn catenoid() -> SurfaceSpec {
        SurfaceSpec::new(
            AmbientManifold::euclidean(3),
            embed(&["cosh(u1)*cos(u2)", "cosh(u1)*sin(u2)", "u1"]),
            Density::SqrtG,
            "catenoid",
        )
        .unwrap()
    }

    /// Clifford torus (cos u1, sin u1, cos u2, sin u2) in R^4, codimension 2.
    pub fn clifford_torus() -> SurfaceSpec {
        SurfaceSpec::new(
            AmbientManifold::euclidean(4),
            embed(&["cos(u1)", "sin(u1)", "cos(u2)", "sin(u2)"]),
            Density::SqrtG,
            "clifford_torus",
        )
        .unwrap()
    }

    /// Horosphere x3 = 1 in hyperbolic upper half-space H^3.
    pub fn horosphere() -> SurfaceSpec {
        SurfaceSpec::new(
            crate::ambient::hyperbolic_half_space(3),
            embed(&["u1", "u2", "1"]),
            Density::SqrtG,
            "horosphere",
        )
        .unwrap()
    }
}
