//! Normal frames built purely from brackets of the embedding coordinates:
//! the Z-vectors indexed by multi-indices, the idempotent multi-index matrix
//! 𝒵, its eigen frame, and the nested-bracket curvature formulas valid in
//! flat ambient space.

use crate::classical::FramePoint;
use crate::jet::Jet2;
use crate::poissongeo::{bracket, bracket_jet1, p_map, PoissonError};
use crate::tensor::{levi_civita, sym_eigen, DVec, Mat, TensorError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ZError {
    #[error("multi-index has length {got}, expected {expected}")]
    IndexLength { expected: usize, got: usize },
    #[error("eigenvalue {mu:.6} of the Z-matrix is neither 0 nor 1")]
    BadEigenvalue { mu: f64 },
    #[error("{got} eigenvalues above 0.5, expected p = {expected}")]
    FrameCount { expected: usize, got: usize },
    #[error("nested-bracket formulas require a euclidean ambient manifold")]
    NotEuclidean,
    #[error(transparent)]
    Poisson(#[from] PoissonError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// A multi-index of length p-1 with entries in 1..=m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiIndex(pub Vec<usize>);

/// All m^(p-1) multi-indices in lexicographic order.
pub fn multi_indices(m: usize, len: usize) -> Vec<MultiIndex> {
    let total = m.pow(len as u32);
    let mut out = Vec::with_capacity(total);
    for mut t in 0..total {
        let mut entries = vec![1usize; len];
        for slot in (0..len).rev() {
            entries[slot] = t % m + 1;
            t /= m;
        }
        out.push(MultiIndex(entries));
    }
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Number of distinct index sets {j,k,l} available to the epsilon contraction,
/// C(m,3); for m = p+2 this equals p(p+1)(p+2)/6.
pub fn z_index_set_count(m: usize) -> usize {
    m * (m - 1) * (m - 2) / 6
}

/// sqrt(det gbar), the density of the ambient volume form.
fn volume_density(fp: &FramePoint) -> f64 {
    det_f64(&fp.gbar).sqrt()
}

fn det_f64(a: &Mat<f64>) -> f64 {
    // LU with partial pivoting; Mat::det only covers dims <= 3
    let n = a.rows();
    let mut m = a.clone();
    let mut det = 1.0;
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if m[(r, col)].abs() > m[(piv, col)].abs() {
                piv = r;
            }
        }
        if m[(piv, col)] == 0.0 {
            return 0.0;
        }
        if piv != col {
            for c in 0..n {
                let tmp = m[(col, c)];
                m[(col, c)] = m[(piv, c)];
                m[(piv, c)] = tmp;
            }
            det = -det;
        }
        det *= m[(col, col)];
        for r in col + 1..n {
            let f = m[(r, col)] / m[(col, col)];
            for c in col..n {
                m[(r, c)] = m[(r, c)] - f * m[(col, c)];
            }
        }
    }
    det
}

/// Z_I = (rho / (2 sqrt(g (p-1)!))) gbar^{ij} eps_{jkl I} {x^k, x^l} d_i,
/// with eps the Levi-Civita tensor (symbol times sqrt(det gbar)).
pub fn z_vector(fp: &FramePoint, index: &MultiIndex) -> Result<DVec<f64>, ZError> {
    let m = fp.ambient_dim();
    let p = fp.codim();
    if index.0.len() != p - 1 {
        return Err(ZError::IndexLength {
            expected: p - 1,
            got: index.0.len(),
        });
    }
    let c = fp.rho.val / (2.0 * (fp.g * factorial(p - 1)).sqrt()) * volume_density(fp);
    let mut lower = DVec::<f64>::zeros(m); // the j slot before raising
    let mut idx = vec![0usize; m];
    idx[3..].copy_from_slice(&index.0);
    for j in 1..=m {
        idx[0] = j;
        let mut acc = 0.0;
        for k in 1..=m {
            for l in 1..=m {
                idx[1] = k;
                idx[2] = l;
                let sign = levi_civita(&idx, m)?;
                if sign != 0 {
                    acc += sign as f64
                        * bracket(fp.x_jets[k - 1], fp.x_jets[l - 1], fp.rho)?;
                }
            }
        }
        lower[j - 1] = c * acc;
    }
    Ok(fp.gbar_inv.apply(&lower))
}

/// The Z-vector table, the multi-index matrix 𝒵, its eigen decomposition and
/// the resulting orthonormal normal frame.
#[derive(Debug, Clone)]
pub struct ZFrame {
    pub indices: Vec<MultiIndex>,
    pub z_vectors: Vec<DVec<f64>>,
    /// 𝒵_I^J = gbar_ij Z_I^i Z^{Jj}.
    pub zmatrix: Mat<f64>,
    pub eigenvalues: DVec<f64>,
    /// Eigenvector components E_I^J stored as columns over the multi-index space.
    pub eigenvectors: Mat<f64>,
    /// The p nonzero orthonormal normals N-hat.
    pub nhat: Vec<DVec<f64>>,
}

/// Inner product on multi-index space: G_{IJ} = prod_a gbar_{I_a J_a}.
fn multi_index_metric(fp: &FramePoint, indices: &[MultiIndex]) -> Mat<f64> {
    let n = indices.len();
    Mat::from_fn(n, n, |a, b| {
        let mut prod = 1.0;
        for (ia, ib) in indices[a].0.iter().zip(indices[b].0.iter()) {
            prod *= fp.gbar[(ia - 1, ib - 1)];
        }
        prod
    })
}

fn mat_pow_half(g: &Mat<f64>, inverse: bool) -> Result<Mat<f64>, TensorError> {
    let (vals, vecs) = sym_eigen(g, 1e-12)?;
    let n = g.rows();
    Ok(Mat::from_fn(n, n, |i, j| {
        let mut acc = 0.0;
        for k in 0..n {
            let s = vals[k].max(0.0).sqrt();
            let s = if inverse { 1.0 / s } else { s };
            acc += vecs[(i, k)] * s * vecs[(j, k)];
        }
        acc
    }))
}

pub fn z_frame(fp: &FramePoint) -> Result<ZFrame, ZError> {
    let m = fp.ambient_dim();
    let p = fp.codim();
    let indices = multi_indices(m, p - 1);
    let n = indices.len();
    let z_vectors: Vec<DVec<f64>> = indices
        .iter()
        .map(|ix| z_vector(fp, ix))
        .collect::<Result<_, _>>()?;

    // lowered matrix B_IJ = gbar(Z_I, Z_J); mixed 𝒵_I^J = B_IL (G^{-1})^{LJ}
    let b = Mat::from_fn(n, n, |i, j| fp.gbar_dot(&z_vectors[i], &z_vectors[j]));
    let g_multi = multi_index_metric(fp, &indices);
    let g_inv = g_multi.inverse()?;
    let zmatrix = b.matmul(&g_inv);

    // symmetrize against G: eigen of C = G^{-1/2} B G^{-1/2}, then E = G^{-1/2} V
    let g_mhalf = mat_pow_half(&g_multi, true)?;
    let c = g_mhalf.matmul(&b).matmul(&g_mhalf);
    let (eigenvalues, v) = sym_eigen(&c, 1e-12)?;
    let eigenvectors = g_mhalf.matmul(&v);

    let mut nhat = Vec::new();
    for k in 0..n {
        let mu = eigenvalues[k];
        if (mu - 1.0).abs() > 1e-7 && mu.abs() > 1e-7 {
            return Err(ZError::BadEigenvalue { mu });
        }
        if mu > 0.5 {
            // N-hat_k = E_k^J Z_J
            let mut v = DVec::<f64>::zeros(m);
            for j_idx in 0..n {
                v = v.add(&z_vectors[j_idx].scale(eigenvectors[(j_idx, k)]));
            }
            nhat.push(v);
        }
    }
    if nhat.len() != p {
        return Err(ZError::FrameCount {
            expected: p,
            got: nhat.len(),
        });
    }

    // proof identity: Z^i_K Z^{jK} = gbar^{ij} + (rho^2/g)(P^2)^{ij}
    let pm = p_map(fp)?;
    let p2_contra = pm.mixed.matmul(&pm.contra); // (P^2)^{ij} = P^i_k P^{kj}
    let factor = fp.rho.val * fp.rho.val / fp.g;
    for i in 0..m {
        for j in 0..m {
            let mut lhs = 0.0;
            for k_idx in 0..n {
                for l_idx in 0..n {
                    lhs += z_vectors[k_idx][i] * g_inv[(k_idx, l_idx)] * z_vectors[l_idx][j];
                }
            }
            let rhs = fp.gbar_inv[(i, j)] + factor * p2_contra[(i, j)];
            debug_assert!(
                (lhs - rhs).abs() < 1e-9 * (1.0 + rhs.abs()),
                "Z-contraction identity violated at ({i},{j}): {lhs} vs {rhs}"
            );
            if (lhs - rhs).abs() > 1e-6 * (1.0 + rhs.abs()) {
                return Err(ZError::BadEigenvalue { mu: lhs - rhs });
            }
        }
    }

    Ok(ZFrame {
        indices,
        z_vectors,
        zmatrix,
        eigenvalues,
        eigenvectors,
        nhat,
    })
}

/// S-tilde^{ij}(X) = (1/rho) eps^{ab} (d_a x^i)(nabla-bar_b X)^j for an
/// arbitrary jet-valued ambient field X along the surface.
fn s_tilde(fp: &FramePoint, x_field: &DVec<Jet2>) -> Mat<f64> {
    let m = fp.ambient_dim();
    let cov = [fp.cov_deriv(x_field, 0), fp.cov_deriv(x_field, 1)];
    let eps = [[0.0, 1.0], [-1.0, 0.0]];
    let mut out = Mat::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let mut acc = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    if eps[a][b] != 0.0 {
                        acc += eps[a][b] * fp.e[a][i].val * cov[b][j];
                    }
                }
            }
            out[(i, j)] = acc / fp.rho.val;
        }
    }
    out
}

fn s_tilde_trace_product(fp: &FramePoint, s1: &Mat<f64>, s2: &Mat<f64>) -> f64 {
    // Tr S1 S2 = S1^i_j S2^j_i with the second index lowered by gbar
    s1.matmul(&fp.gbar).matmul(&s2.matmul(&fp.gbar)).trace()
}

/// Both sides of the scaling lemma Tr S(fN)S(hN') = f h Tr S(N)S(N'),
/// computed independently: the left through jets of the scaled fields, the
/// right through the bare fields times the scalar values.
pub fn lemma_scaling_check(
    fp: &FramePoint,
    n1: &DVec<Jet2>,
    n2: &DVec<Jet2>,
    f: Jet2,
    h: Jet2,
) -> (f64, f64) {
    let m = fp.ambient_dim();
    let fn1 = DVec::from_fn(m, |i| f * n1[i]);
    let hn2 = DVec::from_fn(m, |i| h * n2[i]);
    let lhs = s_tilde_trace_product(fp, &s_tilde(fp, &fn1), &s_tilde(fp, &hn2));
    let rhs = f.val * h.val * s_tilde_trace_product(fp, &s_tilde(fp, n1), &s_tilde(fp, n2));
    (lhs, rhs)
}

/// Which index arrangement of the nested-bracket K formula to evaluate.
///
/// `Statement` is the arrangement the formula's own prefactor is built for
/// and the one that reproduces classical curvature; `ProofLine` is an
/// alternative arrangement kept only to document that it differs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NestedVariant {
    /// eps_{jklI} eps_{imnI} {x^i,{x^k,x^l}} {x^j,{x^m,x^n}}
    Statement,
    /// eps_{jklI} eps_{imnI} {x^i,{x^j,x^k}} {x^j,{x^m,x^n}}
    ProofLine,
}

/// {x^i, {x^k, x^l}} for all index triples, inner brackets jet-valued.
fn nested_table(fp: &FramePoint) -> Result<Vec<Mat<f64>>, ZError> {
    let m = fp.ambient_dim();
    let mut inner = Mat::<Jet2>::zeros(m, m);
    for k in 0..m {
        for l in 0..m {
            inner[(k, l)] = bracket_jet1(fp.x_jets[k], fp.x_jets[l], fp.rho)?;
        }
    }
    let mut out = vec![Mat::<f64>::zeros(m, m); m];
    for i in 0..m {
        for k in 0..m {
            for l in 0..m {
                out[i][(k, l)] = bracket(fp.x_jets[i], inner[(k, l)], fp.rho)?;
            }
        }
    }
    Ok(out)
}

/// Gaussian curvature from nested brackets only (flat ambient):
/// K = -(rho^4 / (8 g^2 (p-1)!)) sum eps_{jklI} eps_{imnI}
///     {x^i,{x^k,x^l}} {x^j,{x^m,x^n}}.
pub fn k_nested(fp: &FramePoint, variant: NestedVariant) -> Result<f64, ZError> {
    if !fp.euclidean {
        return Err(ZError::NotEuclidean);
    }
    let m = fp.ambient_dim();
    let p = fp.codim();
    let nested = nested_table(fp)?;
    let indices = multi_indices(m, p - 1);
    let mut sum = 0.0;
    let mut idx1 = vec![0usize; m];
    let mut idx2 = vec![0usize; m];
    for mi in &indices {
        idx1[3..].copy_from_slice(&mi.0);
        idx2[3..].copy_from_slice(&mi.0);
        for j in 1..=m {
            for k in 1..=m {
                for l in 1..=m {
                    idx1[0] = j;
                    idx1[1] = k;
                    idx1[2] = l;
                    let s1 = levi_civita(&idx1, m)?;
                    if s1 == 0 {
                        continue;
                    }
                    for i in 1..=m {
                        for mm in 1..=m {
                            for nn in 1..=m {
                                idx2[0] = i;
                                idx2[1] = mm;
                                idx2[2] = nn;
                                let s2 = levi_civita(&idx2, m)?;
                                if s2 == 0 {
                                    continue;
                                }
                                let term = match variant {
                                    NestedVariant::Statement => {
                                        nested[i - 1][(k - 1, l - 1)]
                                            * nested[j - 1][(mm - 1, nn - 1)]
                                    }
                                    NestedVariant::ProofLine => {
                                        nested[i - 1][(j - 1, k - 1)]
                                            * nested[j - 1][(mm - 1, nn - 1)]
                                    }
                                };
                                sum += (s1 * s2) as f64 * term;
                            }
                        }
                    }
                }
            }
        }
    }
    let r2 = fp.rho.val * fp.rho.val;
    Ok(-r2 * r2 / (8.0 * fp.g * fp.g * factorial(p - 1)) * sum)
}

/// Mean curvature vector from nested brackets only (flat ambient):
/// H^{k'} = (rho^4 / (8 g^2 (p-1)!)) sum eps_{iklI} eps_{k'mnI}
///          {x^i,x^j} {x^j,{x^k,x^l}} {x^m,x^n}.
pub fn h_nested(fp: &FramePoint) -> Result<DVec<f64>, ZError> {
    if !fp.euclidean {
        return Err(ZError::NotEuclidean);
    }
    let m = fp.ambient_dim();
    let p = fp.codim();
    let nested = nested_table(fp)?;
    let mut pb = Mat::<f64>::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            pb[(i, j)] = bracket(fp.x_jets[i], fp.x_jets[j], fp.rho)?;
        }
    }
    // contract {x^i,x^j}{x^j,{x^k,x^l}} over j first
    let mut q = vec![Mat::<f64>::zeros(m, m); m]; // q[i][(k,l)]
    for i in 0..m {
        for k in 0..m {
            for l in 0..m {
                let mut acc = 0.0;
                for j in 0..m {
                    acc += pb[(i, j)] * nested[j][(k, l)];
                }
                q[i][(k, l)] = acc;
            }
        }
    }
    let indices = multi_indices(m, p - 1);
    let mut out = DVec::<f64>::zeros(m);
    let mut idx1 = vec![0usize; m];
    let mut idx2 = vec![0usize; m];
    for mi in &indices {
        idx1[3..].copy_from_slice(&mi.0);
        idx2[3..].copy_from_slice(&mi.0);
        for i in 1..=m {
            for k in 1..=m {
                for l in 1..=m {
                    idx1[0] = i;
                    idx1[1] = k;
                    idx1[2] = l;
                    let s1 = levi_civita(&idx1, m)?;
                    if s1 == 0 {
                        continue;
                    }
                    for kp in 1..=m {
                        for mm in 1..=m {
                            for nn in 1..=m {
                                idx2[0] = kp;
                                idx2[1] = mm;
                                idx2[2] = nn;
                                let s2 = levi_civita(&idx2, m)?;
                                if s2 == 0 {
                                    continue;
                                }
                                out[kp - 1] += (s1 * s2) as f64
                                    * q[i - 1][(k - 1, l - 1)]
                                    * pb[(mm - 1, nn - 1)];
                            }
                        }
                    }
                }
            }
        }
    }
    let r2 = fp.rho.val * fp.rho.val;
    Ok(out.scale(r2 * r2 / (8.0 * fp.g * fp.g * factorial(p - 1))))
}
