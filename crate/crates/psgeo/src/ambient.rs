//! Ambient Riemannian manifold: metric given by expressions in x1..xm,
//! Christoffel symbols and the curvature term obtained from precomputed
//! symbolic derivatives of the metric entries.

use crate::expr::{EvalError, Expr};
use crate::jet::{Jet2, Scalar};
use crate::tensor::{DVec, Mat, TensorError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AmbientError {
    #[error("metric evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error("metric not positive definite at evaluated point (pivot {pivot:.3e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("metric not symmetric at evaluated point: |g[{i}][{j}] - g[{j}][{i}]| = {dev:.3e}")]
    NotSymmetric { i: usize, j: usize, dev: f64 },
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Rank-3 table indexed as t[i][(j,k)].
pub type Rank3<T> = Vec<Mat<T>>;

#[derive(Debug, Clone)]
enum MetricKind {
    Euclidean,
    Expressions {
        /// m x m symmetric table of entries in x1..xm.
        entries: Vec<Vec<Expr>>,
        /// d1[k][i][j] = d entries[i][j] / d x_{k+1}
        d1: Vec<Vec<Vec<Expr>>>,
        /// d2[k][l][i][j]
        d2: Vec<Vec<Vec<Vec<Expr>>>>,
    },
}

/// The ambient manifold M with its metric and symbolic metric derivatives.
#[derive(Debug, Clone)]
pub struct AmbientManifold {
    dim: usize,
    kind: MetricKind,
}

fn xname(i: usize) -> String {
    format!("x{}", i + 1)
}

impl AmbientManifold {
    pub fn euclidean(m: usize) -> Self {
        AmbientManifold {
            dim: m,
            kind: MetricKind::Euclidean,
        }
    }

    /// Metric from an m x m expression table. The table must be symmetric;
    /// entries are compared as trees after constant folding.
    pub fn from_metric(m: usize, entries: Vec<Vec<Expr>>) -> Result<Self, AmbientError> {
        assert_eq!(entries.len(), m);
        for row in &entries {
            assert_eq!(row.len(), m);
        }
        let entries: Vec<Vec<Expr>> = entries
            .into_iter()
            .map(|row| row.into_iter().map(|e| e.fold()).collect())
            .collect();
        let d1: Vec<Vec<Vec<Expr>>> = (0..m)
            .map(|k| {
                entries
                    .iter()
                    .map(|row| row.iter().map(|e| e.differentiate(&xname(k))).collect())
                    .collect()
            })
            .collect();
        let d2: Vec<Vec<Vec<Vec<Expr>>>> = (0..m)
            .map(|k| {
                (0..m)
                    .map(|l| {
                        d1[l]
                            .iter()
                            .map(|row: &Vec<Expr>| {
                                row.iter().map(|e| e.differentiate(&xname(k))).collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(AmbientManifold {
            dim: m,
            kind: MetricKind::Expressions { entries, d1, d2 },
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self.kind, MetricKind::Euclidean)
    }

    fn lookup<T: Scalar>(x: &[T]) -> impl Fn(&str) -> Option<T> + '_ {
        move |name: &str| {
            let rest = name.strip_prefix('x')?;
            let idx: usize = rest.parse().ok()?;
            if idx >= 1 && idx <= x.len() {
                Some(x[idx - 1])
            } else {
                None
            }
        }
    }

    /// Evaluate the metric over any scalar bound to x1..xm.
    pub fn metric<T: Scalar>(&self, x: &[T]) -> Result<Mat<T>, AmbientError> {
        let m = self.dim;
        match &self.kind {
            MetricKind::Euclidean => Ok(Mat::identity(m)),
            MetricKind::Expressions { entries, .. } => {
                let lk = Self::lookup(x);
                let mut g = Mat::zeros(m, m);
                for i in 0..m {
                    for j in 0..m {
                        g[(i, j)] = entries[i][j].eval(&lk)?;
                    }
                }
                Ok(g)
            }
        }
    }

    /// First x-derivatives of the metric: result[k] is the matrix d g / d x_{k+1}.
    pub fn metric_d1<T: Scalar>(&self, x: &[T]) -> Result<Vec<Mat<T>>, AmbientError> {
        let m = self.dim;
        match &self.kind {
            MetricKind::Euclidean => Ok(vec![Mat::zeros(m, m); m]),
            MetricKind::Expressions { d1, .. } => {
                let lk = Self::lookup(x);
                let mut out = Vec::with_capacity(m);
                for dk in d1 {
                    let mut g = Mat::zeros(m, m);
                    for i in 0..m {
                        for j in 0..m {
                            g[(i, j)] = dk[i][j].eval(&lk)?;
                        }
                    }
                    out.push(g);
                }
                Ok(out)
            }
        }
    }

    fn metric_d2(&self, x: &[f64]) -> Result<Vec<Vec<Mat<f64>>>, AmbientError> {
        let m = self.dim;
        match &self.kind {
            MetricKind::Euclidean => Ok(vec![vec![Mat::zeros(m, m); m]; m]),
            MetricKind::Expressions { d2, .. } => {
                let lk = Self::lookup(x);
                let mut out = Vec::with_capacity(m);
                for dk in d2 {
                    let mut row = Vec::with_capacity(m);
                    for dkl in dk {
                        let mut g = Mat::zeros(m, m);
                        for i in 0..m {
                            for j in 0..m {
                                g[(i, j)] = dkl[i][j].eval(&lk)?;
                            }
                        }
                        row.push(g);
                    }
                    out.push(row);
                }
                Ok(out)
            }
        }
    }

    /// Metric and its inverse at a point, with symmetry and positive
    /// definiteness checks.
    pub fn metric_at(&self, x: &DVec<f64>) -> Result<(Mat<f64>, Mat<f64>), AmbientError> {
        let xs: Vec<f64> = x.iter().copied().collect();
        let g = self.metric(&xs)?;
        let m = self.dim;
        let mut scale = 0.0f64;
        for i in 0..m {
            for j in 0..m {
                scale = scale.max(g[(i, j)].abs());
            }
        }
        for i in 0..m {
            for j in i + 1..m {
                let dev = (g[(i, j)] - g[(j, i)]).abs();
                if dev > 1e-12 * scale.max(1.0) {
                    return Err(AmbientError::NotSymmetric { i, j, dev });
                }
            }
        }
        // LDL^T pivots must be positive
        let mut a = g.clone();
        for k in 0..m {
            let pivot = a[(k, k)];
            if pivot <= 1e-13 * scale.max(1.0) {
                return Err(AmbientError::NotPositiveDefinite { index: k, pivot });
            }
            for i in k + 1..m {
                let f = a[(i, k)] / pivot;
                for j in k..m {
                    a[(i, j)] = a[(i, j)] - f * a[(k, j)];
                }
            }
        }
        let ginv = g.inverse()?;
        Ok((g, ginv))
    }

    /// Christoffel symbols of the second kind at `x` over any scalar.
    pub fn christoffel<T: Scalar>(&self, x: &[T]) -> Result<Rank3<T>, AmbientError> {
        let m = self.dim;
        if self.is_euclidean() {
            return Ok(vec![Mat::zeros(m, m); m]);
        }
        let g = self.metric(x)?;
        let ginv = g.inverse()?;
        let dg = self.metric_d1(x)?;
        let half = T::from_f64(0.5);
        let mut gamma: Rank3<T> = vec![Mat::zeros(m, m); m];
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let mut acc = T::zero();
                    for l in 0..m {
                        acc = acc
                            + ginv[(i, l)]
                                * (dg[j][(l, k)] + dg[k][(l, j)] - dg[l][(j, k)]);
                    }
                    gamma[i][(j, k)] = half * acc;
                }
            }
        }
        Ok(gamma)
    }

    /// Same as [`AmbientManifold::christoffel`] at a plain real point.
    pub fn christoffel_at(&self, x: &DVec<f64>) -> Result<Rank3<f64>, AmbientError> {
        let xs: Vec<f64> = x.iter().copied().collect();
        self.christoffel(&xs)
    }

    /// Evaluate the metric along the surface: x-slots bound to embedding jets.
    pub fn metric_jets(&self, x: &[Jet2]) -> Result<Mat<Jet2>, AmbientError> {
        self.metric(x)
    }

    /// Christoffel symbols along the surface, carried in jets.
    pub fn christoffel_jets(&self, x: &[Jet2]) -> Result<Rank3<Jet2>, AmbientError> {
        self.christoffel(x)
    }

    /// The ambient curvature pairing g(R(e1,e2)e2, e1).
    ///
    /// Components R^i_{jkl} = d_k Gamma^i_{lj} - d_l Gamma^i_{kj}
    /// + Gamma^i_{km} Gamma^m_{lj} - Gamma^i_{lm} Gamma^m_{kj}.
    pub fn riemann_term(
        &self,
        x: &DVec<f64>,
        e1: &DVec<f64>,
        e2: &DVec<f64>,
    ) -> Result<f64, AmbientError> {
        if self.is_euclidean() {
            return Ok(0.0);
        }
        let m = self.dim;
        let xs: Vec<f64> = x.iter().copied().collect();
        let g = self.metric(&xs)?;
        let ginv = g.inverse()?;
        let dg = self.metric_d1(&xs)?;
        let ddg = self.metric_d2(&xs)?;
        let gamma = self.christoffel(&xs)?;

        // d_k ginv^{im} = -ginv^{ia} (d_k g_{ab}) ginv^{bm}
        let mut dginv: Vec<Mat<f64>> = Vec::with_capacity(m);
        for k in 0..m {
            let t = ginv.matmul(&dg[k]).matmul(&ginv);
            dginv.push(t.scale(-1.0));
        }
        // d_k Gamma^i_{jl}
        let dgamma = |k: usize, i: usize, j: usize, l: usize| -> f64 {
            let mut acc = 0.0;
            for mm in 0..m {
                acc += 0.5
                    * dginv[k][(i, mm)]
                    * (dg[j][(mm, l)] + dg[l][(mm, j)] - dg[mm][(j, l)]);
                acc += 0.5
                    * ginv[(i, mm)]
                    * (ddg[k][j][(mm, l)] + ddg[k][l][(mm, j)] - ddg[k][mm][(j, l)]);
            }
            acc
        };

        // (R(e1,e2)e2)^i = R^i_{jkl} e2^j e1^k e2^l
        let mut rz = DVec::<f64>::zeros(m);
        for i in 0..m {
            let mut acc = 0.0;
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        let mut r = dgamma(k, i, l, j) - dgamma(l, i, k, j);
                        for mm in 0..m {
                            r += gamma[i][(k, mm)] * gamma[mm][(l, j)]
                                - gamma[i][(l, mm)] * gamma[mm][(k, j)];
                        }
                        acc += r * e2[j] * e1[k] * e2[l];
                    }
                }
            }
            rz[i] = acc;
        }
        let mut out = 0.0;
        for i in 0..m {
            for j in 0..m {
                out += g[(i, j)] * rz[i] * e1[j];
            }
        }
        Ok(out)
    }
}

/// Hyperbolic upper half-space metric delta_ij / (x_m)^2 in m dimensions.
pub fn hyperbolic_half_space(m: usize) -> AmbientManifold {
    let entries: Vec<Vec<Expr>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    if i == j {
                        Expr::parse(&format!("1/x{m}^2")).unwrap()
                    } else {
                        Expr::Const(0.0)
                    }
                })
                .collect()
        })
        .collect();
    AmbientManifold::from_metric(m, entries).unwrap()
}
