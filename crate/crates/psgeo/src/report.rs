//! Grid-level harness: run every invariant at every sampled point, aggregate
//! the worst deviation per check, and render deterministic reports.

use crate::classical::{frame_at, Density, FramePoint, GeomError, SurfaceSpec};
use crate::expr::Expr;
use crate::jet::Jet2;
use crate::poissongeo::{
    self, compound_maps, gauss_formula_rewrite, normal_projector, p_map, s_map,
    weingarten_reconstruct,
};
use crate::surfspec::GridSpec;
use crate::tensor::DVec;
use crate::znormals::{self, z_frame, NestedVariant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("unknown tolerance `{name}`; known: {known}")]
    UnknownTolerance { name: String, known: String },
    #[error("at u = ({u1}, {u2}): {source}")]
    Point {
        u1: f64,
        u2: f64,
        source: GeomError,
    },
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Poisson(#[from] poissongeo::PoissonError),
    #[error(transparent)]
    Z(#[from] znormals::ZError),
}

/// Named tolerances with their defaults; every check pulls its threshold
/// from here so the CLI can override any of them by name.
#[derive(Debug, Clone)]
pub struct Tolerances(BTreeMap<&'static str, f64>);

const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("k_poisson_vs_classical", 1e-9),
    ("h_poisson_vs_classical", 1e-9),
    ("k_nested_vs_classical", 1e-8),
    ("h_nested_vs_classical", 1e-8),
    ("p_squared_projection", 1e-9),
    ("trace_full_vs_restricted", 1e-9),
    ("trace_chain_w", 1e-9),
    ("trace_p_squared", 1e-9),
    ("trace_s_squared", 1e-9),
    ("b_vs_weingarten", 1e-9),
    ("zmatrix_idempotent", 1e-9),
    ("zmatrix_trace", 1e-9),
    ("zmatrix_eigenvalues", 1e-7),
    ("z_projector_vs_classical", 1e-8),
    ("scaling_lemma", 1e-8),
    ("jacobi_identity", 1e-8),
    ("weingarten_reconstruction", 1e-8),
    ("gauss_rewrite", 1e-8),
    ("complex_structure", 1e-9),
    ("rho_independence", 1e-8),
];

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances(DEFAULT_TOLERANCES.iter().copied().collect())
    }
}

impl Tolerances {
    pub fn set(&mut self, name: &str, value: f64) -> Result<(), ReportError> {
        let Some(slot) = DEFAULT_TOLERANCES
            .iter()
            .map(|&(n, _)| n)
            .find(|&n| n == name)
        else {
            return Err(ReportError::UnknownTolerance {
                name: name.to_string(),
                known: DEFAULT_TOLERANCES
                    .iter()
                    .map(|&(n, _)| n)
                    .collect::<Vec<_>>()
                    .join(", "),
            });
        };
        self.0.insert(slot, value);
        Ok(())
    }

    pub fn get(&self, name: &str) -> f64 {
        self.0[name]
    }
}

#[derive(Debug, Clone)]
pub struct CheckRecord {
    pub name: &'static str,
    pub max_dev: f64,
    pub location: [f64; 2],
    pub tolerance: f64,
}

impl CheckRecord {
    pub fn passed(&self) -> bool {
        self.max_dev <= self.tolerance
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub label: String,
    pub rho_mode: String,
    pub grid: (usize, usize),
    pub skipped: Vec<[f64; 2]>,
    pub checks: Vec<CheckRecord>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed())
    }

    /// Human-readable table, stable across runs.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "spec: {}  rho: {}  grid: {}x{}  points: {}  skipped: {}",
            self.label,
            self.rho_mode,
            self.grid.0,
            self.grid.1,
            self.grid.0 * self.grid.1,
            self.skipped.len()
        );
        let _ = writeln!(
            out,
            "{:<28} {:>12} {:>24} {:>9}  {}",
            "check", "max_dev", "at(u1,u2)", "tol", "status"
        );
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{:<28} {:>12.3e} {:>24} {:>9.0e}  {}",
                c.name,
                c.max_dev,
                format!("({:.6},{:.6})", c.location[0], c.location[1]),
                c.tolerance,
                if c.passed() { "PASS" } else { "FAIL" }
            );
        }
        let _ = writeln!(out, "overall: {}", if self.passed() { "PASS" } else { "FAIL" });
        out
    }

    /// Machine-readable CSV with metadata comment lines.
    pub fn render_machine(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# spec={}", self.label);
        let _ = writeln!(out, "# rho={}", self.rho_mode);
        let _ = writeln!(out, "# grid={}x{}", self.grid.0, self.grid.1);
        let _ = writeln!(out, "# skipped={}", self.skipped.len());
        let _ = writeln!(out, "check,max_dev,u1,u2,tol,status");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                c.name,
                fmt17(c.max_dev),
                fmt17(c.location[0]),
                fmt17(c.location[1]),
                fmt17(c.tolerance),
                if c.passed() { "pass" } else { "fail" }
            );
        }
        out
    }
}

/// 17 significant digits, enough to round-trip an f64 exactly.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn vec_dev(a: &DVec<f64>, b: &DVec<f64>) -> f64 {
    let mut d = 0.0f64;
    for i in 0..a.dim() {
        d = d.max((a[i] - b[i]).abs());
    }
    d
}

struct Accum<'a> {
    tols: &'a Tolerances,
    map: BTreeMap<&'static str, (f64, [f64; 2])>,
}

impl<'a> Accum<'a> {
    fn new(tols: &'a Tolerances) -> Self {
        let map = DEFAULT_TOLERANCES
            .iter()
            .map(|&(n, _)| (n, (0.0, [f64::NAN, f64::NAN])))
            .collect();
        Accum { tols, map }
    }

    fn record(&mut self, name: &'static str, dev: f64, u: [f64; 2]) {
        let slot = self.map.get_mut(name).expect("unknown check name");
        if dev > slot.0 || slot.1[0].is_nan() {
            *slot = (dev, u);
        }
    }

    fn finish(self) -> Vec<CheckRecord> {
        self.map
            .into_iter()
            .map(|(name, (max_dev, location))| CheckRecord {
                name,
                max_dev,
                location,
                tolerance: self.tols.get(name),
            })
            .collect()
    }
}

fn random_poly(rng: &mut ChaCha8Rng, u: [f64; 2]) -> Jet2 {
    let c: [f64; 6] = core::array::from_fn(|_| rng.gen_range(-1.0..1.0));
    let u1 = Jet2::seed_u1(u[0]);
    let u2 = Jet2::seed_u2(u[1]);
    Jet2::constant(c[0])
        + u1 * Jet2::constant(c[1])
        + u2 * Jet2::constant(c[2])
        + u1 * u1 * Jet2::constant(c[3])
        + u1 * u2 * Jet2::constant(c[4])
        + u2 * u2 * Jet2::constant(c[5])
}

/// Run every invariant of the classical / bracket / Z-frame stack at every
/// grid point. Degenerate points are skipped and counted; any other
/// evaluation failure aborts with an error.
pub fn run_checks(
    surface: &SurfaceSpec,
    grid: &GridSpec,
    tols: &Tolerances,
) -> Result<Report, ReportError> {
    let mut acc = Accum::new(tols);
    let mut skipped = Vec::new();
    let sweep: [Density; 2] = [
        Density::Unit,
        Density::Custom(Expr::parse("1+u1^2+u2^2").unwrap()),
    ];
    for (point_idx, u) in grid.points().into_iter().enumerate() {
        let fp = match frame_at(surface, u) {
            Ok(fp) => fp,
            Err(GeomError::Degenerate { .. }) => {
                skipped.push(u);
                continue;
            }
            Err(source) => {
                return Err(ReportError::Point {
                    u1: u[0],
                    u2: u[1],
                    source,
                })
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ point_idx as u64);
        check_point(&fp, &mut acc, &mut rng, u)?;

        // rho-independence: curvatures, reconstructed normal derivatives and
        // the Z-frame span must not depend on the density choice
        let h_norm_base = fp.mean_curvature_norm();
        let k_base = fp.gaussian_curvature();
        let rec_base: Vec<DVec<f64>> = (0..fp.codim())
            .map(|a| weingarten_reconstruct(&fp, a, &fp.e_values(0)))
            .collect::<Result<_, _>>()?;
        let span_base = normal_projector(&fp, &z_frame(&fp)?.nhat);
        for density in &sweep {
            let alt = frame_at(&surface.with_density(density.clone()), u)?;
            let dev_k = (alt.gaussian_curvature() - k_base).abs();
            let dev_h = (alt.mean_curvature_norm() - h_norm_base).abs();
            let mut dev = dev_k.max(dev_h);
            let k_p = poissongeo::gaussian_curvature(&alt)?;
            dev = dev.max((k_p - k_base).abs());
            for a in 0..alt.codim() {
                let rec = weingarten_reconstruct(&alt, a, &alt.e_values(0))?;
                // the classical normals are density-independent, so the
                // reconstructed derivatives must agree vector by vector
                dev = dev.max(vec_dev(&rec, &rec_base[a]));
            }
            let span = normal_projector(&alt, &z_frame(&alt)?.nhat);
            for i in 0..alt.ambient_dim() {
                for j in 0..alt.ambient_dim() {
                    dev = dev.max((span[(i, j)] - span_base[(i, j)]).abs());
                }
            }
            acc.record("rho_independence", dev, u);
        }
    }
    Ok(Report {
        label: surface.label.clone(),
        rho_mode: density_name(&surface.density),
        grid: (grid.u1.count, grid.u2.count),
        skipped,
        checks: acc.finish(),
    })
}

pub fn density_name(d: &Density) -> String {
    match d {
        Density::SqrtG => "sqrt_g".to_string(),
        Density::Unit => "one".to_string(),
        Density::Custom(e) => format!("{e}"),
    }
}

fn check_point(
    fp: &FramePoint,
    acc: &mut Accum,
    rng: &mut ChaCha8Rng,
    u: [f64; 2],
) -> Result<(), ReportError> {
    let m = fp.ambient_dim();
    let r2 = fp.rho.val * fp.rho.val;
    let factor = fp.g / r2;

    // curvature agreement
    let k_classical = fp.gaussian_curvature();
    let k_poisson = poissongeo::gaussian_curvature(fp)?;
    acc.record(
        "k_poisson_vs_classical",
        (k_poisson - k_classical).abs() / (1.0 + k_classical.abs()),
        u,
    );
    let h_classical = fp.mean_curvature();
    let h_poisson = poissongeo::mean_curvature(fp)?;
    acc.record(
        "h_poisson_vs_classical",
        vec_dev(&h_poisson, &h_classical),
        u,
    );
    if fp.euclidean {
        let k_nested = znormals::k_nested(fp, NestedVariant::Statement)?;
        acc.record(
            "k_nested_vs_classical",
            (k_nested - k_classical).abs() / (1.0 + k_classical.abs()),
            u,
        );
        let h_nested = znormals::h_nested(fp)?;
        acc.record("h_nested_vs_classical", vec_dev(&h_nested, &h_classical), u);
    }

    // proposition suite
    let p = p_map(fp)?;
    let p2 = p.compose(&p, &fp.gbar_inv);
    for a in 0..2 {
        let y = fp.e_values(a);
        let dev = vec_dev(&p2.apply(&y), &y.scale(-factor));
        acc.record("p_squared_projection", dev / (1.0 + factor), u);
    }
    let (tr_p2_full, tr_p2_restr) = poissongeo::traces(&p2, fp)?;
    let expect = -2.0 * factor;
    acc.record(
        "trace_p_squared",
        (tr_p2_full - expect).abs() / (1.0 + expect.abs()),
        u,
    );
    acc.record(
        "trace_full_vs_restricted",
        (tr_p2_full - tr_p2_restr).abs() / (1.0 + expect.abs()),
        u,
    );
    let (a_maps, b_maps) = compound_maps(fp)?;
    for a_idx in 0..fp.codim() {
        let s = s_map(fp, a_idx)?;
        let s2 = s.compose(&s, &fp.gbar_inv);
        let expect = -2.0 / r2 * fp.h[a_idx].det();
        acc.record(
            "trace_s_squared",
            (s2.trace_full() - expect).abs() / (1.0 + expect.abs()),
            u,
        );
        let tr_w = fp.w[a_idx].trace();
        let tr_w2 = fp.w[a_idx].matmul(&fp.w[a_idx]).trace();
        for t in [&a_maps[a_idx], &b_maps[a_idx]] {
            let (full, restr) = poissongeo::traces(t, fp)?;
            let expect1 = factor * tr_w;
            acc.record(
                "trace_chain_w",
                (full - expect1).abs() / (1.0 + expect1.abs()),
                u,
            );
            acc.record(
                "trace_full_vs_restricted",
                (full - restr).abs() / (1.0 + expect1.abs()),
                u,
            );
            let t2 = t.compose(t, &fp.gbar_inv);
            let (full2, restr2) = poissongeo::traces(&t2, fp)?;
            let expect2 = factor * factor * tr_w2;
            acc.record(
                "trace_chain_w",
                (full2 - expect2).abs() / (1.0 + expect2.abs()),
                u,
            );
            acc.record(
                "trace_full_vs_restricted",
                (full2 - restr2).abs() / (1.0 + expect2.abs()),
                u,
            );
        }
        // B_A(e_b) = (g/rho^2) W_A(e_b)
        for b in 0..2 {
            let img = b_maps[a_idx].apply(&fp.e_values(b));
            let mut expect = DVec::<f64>::zeros(m);
            for c in 0..2 {
                expect = expect.add(&fp.e_values(c).scale(factor * fp.w[a_idx][(c, b)]));
            }
            acc.record("b_vs_weingarten", vec_dev(&img, &expect) / (1.0 + factor), u);
        }
    }

    // Z-frame invariants
    let zf = z_frame(fp)?;
    let n = zf.zmatrix.rows();
    let sq = zf.zmatrix.matmul(&zf.zmatrix);
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            dev = dev.max((sq[(i, j)] - zf.zmatrix[(i, j)]).abs());
        }
    }
    acc.record("zmatrix_idempotent", dev, u);
    acc.record(
        "zmatrix_trace",
        (zf.zmatrix.trace() - fp.codim() as f64).abs(),
        u,
    );
    let mut dev = 0.0f64;
    for k in 0..n {
        let mu = zf.eigenvalues[k];
        dev = dev.max(mu.abs().min((mu - 1.0).abs()));
    }
    acc.record("zmatrix_eigenvalues", dev, u);
    let classical: Vec<DVec<f64>> = (0..fp.codim()).map(|i| fp.normal_values(i)).collect();
    let pr1 = normal_projector(fp, &zf.nhat);
    let pr2 = normal_projector(fp, &classical);
    let mut dev = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            dev = dev.max((pr1[(i, j)] - pr2[(i, j)]).abs());
        }
    }
    acc.record("z_projector_vs_classical", dev, u);

    // scaling lemma, 10 random f,h pairs
    for _ in 0..10 {
        let f = random_poly(rng, u);
        let h = random_poly(rng, u);
        for a in 0..fp.codim() {
            for b in 0..fp.codim() {
                let (lhs, rhs) =
                    znormals::lemma_scaling_check(fp, &fp.normals[a], &fp.normals[b], f, h);
                acc.record("scaling_lemma", (lhs - rhs).abs() / (1.0 + rhs.abs()), u);
            }
        }
    }

    // Jacobi identity, random polynomial triples
    for _ in 0..10 {
        let (f, g, h) = (random_poly(rng, u), random_poly(rng, u), random_poly(rng, u));
        let t1 = poissongeo::bracket(f, poissongeo::bracket_jet1(g, h, fp.rho)?, fp.rho)?;
        let t2 = poissongeo::bracket(g, poissongeo::bracket_jet1(h, f, fp.rho)?, fp.rho)?;
        let t3 = poissongeo::bracket(h, poissongeo::bracket_jet1(f, g, fp.rho)?, fp.rho)?;
        acc.record("jacobi_identity", (t1 + t2 + t3).abs(), u);
    }

    // theorem reconstructions
    for a_idx in 0..fp.codim() {
        for xc in [[1.0, 0.0], [0.0, 1.0]] {
            let x = fp
                .e_values(0)
                .scale(xc[0])
                .add(&fp.e_values(1).scale(xc[1]));
            let rec = weingarten_reconstruct(fp, a_idx, &x)?;
            let oracle = fp.cov_deriv_normal_along(a_idx, xc);
            acc.record("weingarten_reconstruction", vec_dev(&rec, &oracle), u);
        }
    }
    let gamma = fp.induced_christoffel();
    for a in 0..2 {
        for b in 0..2 {
            let mut xc = [0.0, 0.0];
            xc[a] = 1.0;
            let lhs = gauss_formula_rewrite(fp, xc, b)?;
            let mut expect = DVec::<f64>::zeros(m);
            for c in 0..2 {
                expect = expect.add(&fp.e_values(c).scale(gamma[c][(a, b)]));
            }
            acc.record("gauss_rewrite", vec_dev(&lhs, &expect), u);
        }
    }

    // complex structure: fixes tangents (after J twice, sign flip), kills normals
    for a in 0..2 {
        let e = fp.e_values(a);
        let je = poissongeo::complex_structure(fp, &e)?;
        let jje = poissongeo::complex_structure(fp, &je)?;
        acc.record("complex_structure", vec_dev(&jje, &e.scale(-1.0)), u);
        let pe = poissongeo::projection(fp, &e)?;
        acc.record("complex_structure", vec_dev(&pe, &e), u);
    }
    for a_idx in 0..fp.codim() {
        let nvec = fp.normal_values(a_idx);
        let pn = poissongeo::projection(fp, &nvec)?;
        acc.record("complex_structure", vec_dev(&pn, &DVec::zeros(m)), u);
    }
    Ok(())
}

/// CSV table of curvature quantities over the grid, 17 significant digits.
///
/// Header: u1,u2,K_classical,K_poisson,K_nested,H_norm_classical,
/// H_norm_poisson,sqrt_g,rho. K_nested is empty for curved ambients.
/// Degenerate points are omitted.
pub fn write_table(surface: &SurfaceSpec, grid: &GridSpec) -> Result<String, ReportError> {
    let mut out = String::new();
    out.push_str("u1,u2,K_classical,K_poisson,K_nested,H_norm_classical,H_norm_poisson,sqrt_g,rho\n");
    for u in grid.points() {
        let fp = match frame_at(surface, u) {
            Ok(fp) => fp,
            Err(GeomError::Degenerate { .. }) => continue,
            Err(source) => {
                return Err(ReportError::Point {
                    u1: u[0],
                    u2: u[1],
                    source,
                })
            }
        };
        let k_classical = fp.gaussian_curvature();
        let k_poisson = poissongeo::gaussian_curvature(&fp)?;
        let k_nested = if fp.euclidean {
            fmt17(znormals::k_nested(&fp, NestedVariant::Statement)?)
        } else {
            String::new()
        };
        let h_classical = fp.mean_curvature_norm();
        let h_p = poissongeo::mean_curvature(&fp)?;
        let h_poisson = fp.gbar_dot(&h_p, &h_p).sqrt();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            fmt17(u[0]),
            fmt17(u[1]),
            fmt17(k_classical),
            fmt17(k_poisson),
            k_nested,
            fmt17(h_classical),
            fmt17(h_poisson),
            fmt17(fp.g.sqrt()),
            fmt17(fp.rho.val)
        );
    }
    Ok(out)
}

/// Full digest of a single point: frame data, curvature via every route,
/// trace identities and the Z-matrix spectrum.
pub fn point_digest(surface: &SurfaceSpec, u: [f64; 2]) -> Result<String, ReportError> {
    let fp = frame_at(surface, u).map_err(|source| ReportError::Point {
        u1: u[0],
        u2: u[1],
        source,
    })?;
    let m = fp.ambient_dim();
    let mut out = String::new();
    let _ = writeln!(out, "spec: {}  u = ({}, {})", surface.label, u[0], u[1]);
    let _ = writeln!(out, "rho mode: {}", density_name(&surface.density));
    let vec_str = |v: &DVec<f64>| {
        let comps: Vec<String> = (0..v.dim()).map(|i| format!("{:.12}", v[i])).collect();
        format!("[{}]", comps.join(", "))
    };
    let _ = writeln!(out, "x = {}", vec_str(&fp.x));
    let _ = writeln!(
        out,
        "g_ab = [[{:.12}, {:.12}], [{:.12}, {:.12}]]",
        fp.g_ab[(0, 0)],
        fp.g_ab[(0, 1)],
        fp.g_ab[(1, 0)],
        fp.g_ab[(1, 1)]
    );
    let _ = writeln!(out, "g = {:.12}  sqrt_g = {:.12}  rho = {:.12}", fp.g, fp.g.sqrt(), fp.rho.val);
    for a_idx in 0..fp.codim() {
        let _ = writeln!(out, "N_{} = {}", a_idx + 1, vec_str(&fp.normal_values(a_idx)));
        let h = &fp.h[a_idx];
        let _ = writeln!(
            out,
            "h_{} = [[{:.12}, {:.12}], [{:.12}, {:.12}]]",
            a_idx + 1,
            h[(0, 0)],
            h[(0, 1)],
            h[(1, 0)],
            h[(1, 1)]
        );
        let w = &fp.w[a_idx];
        let _ = writeln!(
            out,
            "W_{} = [[{:.12}, {:.12}], [{:.12}, {:.12}]]",
            a_idx + 1,
            w[(0, 0)],
            w[(0, 1)],
            w[(1, 0)],
            w[(1, 1)]
        );
    }
    let k_classical = fp.gaussian_curvature();
    let k_poisson = poissongeo::gaussian_curvature(&fp)?;
    let _ = writeln!(out, "K_classical = {}", fmt17(k_classical));
    let _ = writeln!(out, "K_poisson   = {}", fmt17(k_poisson));
    if fp.euclidean {
        let _ = writeln!(
            out,
            "K_nested    = {}",
            fmt17(znormals::k_nested(&fp, NestedVariant::Statement)?)
        );
    } else {
        let _ = writeln!(out, "K_nested    = (curved ambient, not available)");
    }
    let h_vec = fp.mean_curvature();
    let _ = writeln!(out, "H = {}  |H| = {}", vec_str(&h_vec), fmt17(fp.mean_curvature_norm()));
    let p = p_map(&fp)?;
    let p2 = p.compose(&p, &fp.gbar_inv);
    let (tr_full, tr_restr) = poissongeo::traces(&p2, &fp)?;
    let _ = writeln!(out, "Tr P^2 = {}  tr P^2 = {}", fmt17(tr_full), fmt17(tr_restr));
    let (_, b_maps) = compound_maps(&fp)?;
    for a_idx in 0..fp.codim() {
        let s = s_map(&fp, a_idx)?;
        let s2 = s.compose(&s, &fp.gbar_inv);
        let (sf, sr) = poissongeo::traces(&s2, &fp)?;
        let _ = writeln!(
            out,
            "Tr S_{a}^2 = {}  tr S_{a}^2 = {}",
            fmt17(sf),
            fmt17(sr),
            a = a_idx + 1
        );
        let b2 = b_maps[a_idx].compose(&b_maps[a_idx], &fp.gbar_inv);
        let (bf, br) = poissongeo::traces(&b2, &fp)?;
        let _ = writeln!(
            out,
            "Tr B_{a}^2 = {}  tr B_{a}^2 = {}",
            fmt17(bf),
            fmt17(br),
            a = a_idx + 1
        );
    }
    let zf = z_frame(&fp)?;
    let eigen: Vec<String> = (0..zf.eigenvalues.dim())
        .map(|k| format!("{:.12}", zf.eigenvalues[k]))
        .collect();
    let _ = writeln!(out, "Z-matrix ({n}x{n}) eigenvalues: [{}]", eigen.join(", "), n = m.pow((fp.codim() - 1) as u32));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::golden;
    use crate::surfspec::AxisSpec;

    fn small_grid() -> GridSpec {
        GridSpec {
            u1: AxisSpec {
                min: 0.4,
                max: 2.6,
                count: 4,
            },
            u2: AxisSpec {
                min: 0.1,
                max: 5.9,
                count: 4,
            },
        }
    }

    #[test]
    fn sphere_check_passes() {
        let report = run_checks(&golden::sphere(2.0), &small_grid(), &Tolerances::default()).unwrap();
        assert!(report.passed(), "{}", report.render_text());
        assert!(report.skipped.is_empty());
    }

    #[test]
    fn horosphere_check_passes_without_nested() {
        let grid = GridSpec {
            u1: AxisSpec { min: -1.0, max: 1.0, count: 3 },
            u2: AxisSpec { min: -1.0, max: 1.0, count: 3 },
        };
        let report = run_checks(&golden::horosphere(), &grid, &Tolerances::default()).unwrap();
        assert!(report.passed(), "{}", report.render_text());
        // nested checks never ran: location stays NaN
        let nested = report
            .checks
            .iter()
            .find(|c| c.name == "k_nested_vs_classical")
            .unwrap();
        assert!(nested.location[0].is_nan());
    }

    #[test]
    fn impossible_tolerance_fails() {
        let mut tols = Tolerances::default();
        tols.set("k_poisson_vs_classical", 1e-18).unwrap();
        let report = run_checks(&golden::sphere(2.0), &small_grid(), &tols).unwrap();
        assert!(!report.passed());
        let c = report
            .checks
            .iter()
            .find(|c| c.name == "k_poisson_vs_classical")
            .unwrap();
        assert!(!c.passed());
    }

    #[test]
    fn unknown_tolerance_rejected() {
        let mut tols = Tolerances::default();
        assert!(matches!(
            tols.set("no_such_check", 1.0),
            Err(ReportError::UnknownTolerance { .. })
        ));
    }

    #[test]
    fn degenerate_points_skipped_and_counted() {
        let grid = GridSpec {
            u1: AxisSpec { min: 0.0, max: 2.0, count: 3 }, // u1 = 0 is the sphere pole
            u2: AxisSpec { min: 0.0, max: 2.0, count: 3 },
        };
        let report = run_checks(&golden::sphere(2.0), &grid, &Tolerances::default()).unwrap();
        assert_eq!(report.skipped.len(), 3);
        assert!(report.passed());
    }

    #[test]
    fn reports_byte_identical_across_runs() {
        let r1 = run_checks(&golden::torus(2.0, 1.0), &small_grid(), &Tolerances::default()).unwrap();
        let r2 = run_checks(&golden::torus(2.0, 1.0), &small_grid(), &Tolerances::default()).unwrap();
        assert_eq!(r1.render_text(), r2.render_text());
        assert_eq!(r1.render_machine(), r2.render_machine());
        let t1 = write_table(&golden::torus(2.0, 1.0), &small_grid()).unwrap();
        let t2 = write_table(&golden::torus(2.0, 1.0), &small_grid()).unwrap();
        assert_eq!(t1, t2);
    }

    #[test]
    fn table_shape_and_values() {
        let grid = GridSpec {
            u1: AxisSpec { min: 0.3, max: 2.8, count: 5 },
            u2: AxisSpec { min: 0.0, max: 6.0, count: 5 },
        };
        let table = write_table(&golden::sphere(2.0), &grid).unwrap();
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 26);
        assert!(lines[0].starts_with("u1,u2,K_classical"));
        for row in &lines[1..] {
            let cols: Vec<&str> = row.split(',').collect();
            assert_eq!(cols.len(), 9);
            let k: f64 = cols[2].parse().unwrap();
            assert!((k - 0.25).abs() < 1e-9);
            let kn: f64 = cols[4].parse().unwrap();
            assert!((kn - 0.25).abs() < 1e-8);
        }
    }

    #[test]
    fn curved_table_has_empty_nested_column() {
        let grid = GridSpec {
            u1: AxisSpec { min: -1.0, max: 1.0, count: 2 },
            u2: AxisSpec { min: -1.0, max: 1.0, count: 2 },
        };
        let table = write_table(&golden::horosphere(), &grid).unwrap();
        for row in table.lines().skip(1) {
            let cols: Vec<&str> = row.split(',').collect();
            assert_eq!(cols.len(), 9);
            assert!(cols[4].is_empty());
            let k: f64 = cols[2].parse().unwrap();
            assert!(k.abs() < 1e-9);
        }
    }

    #[test]
    fn point_digest_contains_key_values() {
        let digest = point_digest(&golden::sphere(2.0), [1.0471975511965976, 0.7]).unwrap();
        assert!(digest.contains("g = 12.000000000000"), "{digest}");
        assert!(digest.contains("K_classical = 2.5"), "{digest}");
        let digest = point_digest(&golden::torus(2.0, 1.0), [0.0, 0.0]).unwrap();
        assert!(digest.contains("K_classical = 3.333333333333333"), "{digest}");
    }

    #[test]
    fn degenerate_point_digest_errors() {
        assert!(point_digest(&golden::sphere(2.0), [0.0, 0.0]).is_err());
    }
}
