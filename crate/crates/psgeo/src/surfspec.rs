//! Line-oriented surface spec files.
//!
//! ```text
//! label = sphere_r2
//!
//! [ambient]
//! dim = 3
//! metric = euclidean        # or explicit entries g.1.1 = "1/x3^2", ...
//!
//! [embedding]
//! x1 = "2*sin(u1)*cos(u2)"
//! x2 = "2*sin(u1)*sin(u2)"
//! x3 = "2*cos(u1)"
//!
//! [density]
//! rho = sqrt_g              # or one, or a quoted expression in u1,u2
//!
//! [grid]
//! u1.min = 0.3
//! u1.max = 2.8
//! u1.count = 20
//! u2.min = 0.0
//! u2.max = 6.0
//! u2.count = 20
//! ```
//!
//! Quoted values are expressions, bare values are numbers or keywords.
//! Metric entries are completed symmetrically; giving both g.i.j and g.j.i
//! with different expressions is an error. `#` starts a comment outside
//! quotes.

use crate::ambient::AmbientManifold;
use crate::classical::{Density, SurfaceSpec};
use crate::expr::Expr;
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("{msg}")]
    Invalid { msg: String },
}

fn err(line: usize, msg: impl Into<String>) -> SpecError {
    SpecError::Line {
        line,
        msg: msg.into(),
    }
}

/// One grid axis: closed interval, uniform, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn sample(&self, k: usize) -> f64 {
        self.min + (self.max - self.min) * k as f64 / (self.count - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub u1: AxisSpec,
    pub u2: AxisSpec,
}

impl GridSpec {
    /// Row-major sample points: u1 varies slowest.
    pub fn points(&self) -> Vec<[f64; 2]> {
        let mut out = Vec::with_capacity(self.u1.count * self.u2.count);
        for i in 0..self.u1.count {
            for j in 0..self.u2.count {
                out.push([self.u1.sample(i), self.u2.sample(j)]);
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.u1.count * self.u2.count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Parse a `--rho` style density override: `one`, `sqrt_g`, or an expression.
pub fn parse_density(s: &str) -> Result<Density, SpecError> {
    match s {
        "sqrt_g" => Ok(Density::SqrtG),
        "one" => Ok(Density::Unit),
        other => {
            let e = Expr::parse(other).map_err(|e| SpecError::Invalid {
                msg: format!("density expression: {e}"),
            })?;
            check_vars(&e, &["u1", "u2"]).map_err(|v| SpecError::Invalid {
                msg: format!("density expression uses unknown variable {v}"),
            })?;
            Ok(Density::Custom(e))
        }
    }
}

fn check_vars(e: &Expr, allowed: &[&str]) -> Result<(), String> {
    for v in e.variables() {
        if !allowed.contains(&v.as_str()) {
            return Err(v);
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Top,
    Ambient,
    Embedding,
    Density,
    Grid,
}

/// A raw `key = value` with the value classified by quoting.
enum Value {
    Quoted(String),
    Bare(String),
}

fn split_line(raw: &str, line: usize) -> Result<Option<(String, Value)>, SpecError> {
    // strip comments: '#' outside double quotes
    let mut in_quotes = false;
    let mut cut = raw.len();
    for (i, ch) in raw.char_indices() {
        match ch {
            '"' => in_quotes = !in_quotes,
            '#' if !in_quotes => {
                cut = i;
                break;
            }
            _ => {}
        }
    }
    let text = raw[..cut].trim();
    if text.is_empty() {
        return Ok(None);
    }
    let eq = text
        .find('=')
        .ok_or_else(|| err(line, "expected `key = value`"))?;
    let key = text[..eq].trim().to_string();
    let val = text[eq + 1..].trim();
    if key.is_empty() {
        return Err(err(line, "empty key"));
    }
    if val.is_empty() {
        return Err(err(line, format!("empty value for `{key}`")));
    }
    if val.starts_with('"') {
        if val.len() < 2 || !val.ends_with('"') {
            return Err(err(line, "unterminated quoted value"));
        }
        Ok(Some((key, Value::Quoted(val[1..val.len() - 1].to_string()))))
    } else {
        Ok(Some((key, Value::Bare(val.to_string()))))
    }
}

fn parse_number(v: &Value, key: &str, line: usize) -> Result<f64, SpecError> {
    let s = match v {
        Value::Bare(s) => s,
        Value::Quoted(_) => return Err(err(line, format!("`{key}` expects a bare number"))),
    };
    s.parse::<f64>()
        .map_err(|_| err(line, format!("`{key}`: `{s}` is not a number")))
}

/// Parse the text of a spec file into a surface and its sampling grid.
pub fn parse_spec(text: &str) -> Result<(SurfaceSpec, GridSpec), SpecError> {
    let mut section = Section::Top;
    let mut label: Option<String> = None;
    let mut dim: Option<(usize, usize)> = None; // (value, line)
    let mut euclidean: Option<usize> = None; // line of `metric = euclidean`
    let mut metric_entries: BTreeMap<(usize, usize), (String, usize)> = BTreeMap::new();
    let mut embedding: BTreeMap<usize, (Expr, usize)> = BTreeMap::new();
    let mut density: Option<Density> = None;
    let mut grid: BTreeMap<&'static str, (f64, usize)> = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.split('#').next().unwrap_or("").trim();
        if trimmed.starts_with('[') {
            section = match trimmed {
                "[ambient]" => Section::Ambient,
                "[embedding]" => Section::Embedding,
                "[density]" => Section::Density,
                "[grid]" => Section::Grid,
                other => return Err(err(line, format!("unknown section `{other}`"))),
            };
            continue;
        }
        let Some((key, value)) = split_line(raw, line)? else {
            continue;
        };
        match section {
            Section::Top => match key.as_str() {
                "label" => {
                    label = Some(match value {
                        Value::Quoted(s) | Value::Bare(s) => s,
                    })
                }
                other => return Err(err(line, format!("unknown key `{other}` before any section"))),
            },
            Section::Ambient => match key.as_str() {
                "dim" => {
                    let n = parse_number(&value, "dim", line)?;
                    if n.fract() != 0.0 || n < 3.0 || n > 16.0 {
                        return Err(err(line, "dim must be an integer in 3..=16"));
                    }
                    dim = Some((n as usize, line));
                }
                "metric" => match value {
                    Value::Bare(s) if s == "euclidean" => euclidean = Some(line),
                    _ => return Err(err(line, "metric only accepts the keyword `euclidean`")),
                },
                k if k.starts_with("g.") => {
                    let rest: Vec<&str> = k[2..].split('.').collect();
                    if rest.len() != 2 {
                        return Err(err(line, format!("bad metric key `{k}`, expected g.i.j")));
                    }
                    let i: usize = rest[0]
                        .parse()
                        .map_err(|_| err(line, format!("bad metric index `{}`", rest[0])))?;
                    let j: usize = rest[1]
                        .parse()
                        .map_err(|_| err(line, format!("bad metric index `{}`", rest[1])))?;
                    if i == 0 || j == 0 {
                        return Err(err(line, "metric indices are 1-based"));
                    }
                    let s = match value {
                        Value::Quoted(s) => s,
                        Value::Bare(s) => s, // bare numbers are valid expressions
                    };
                    if let Some((prev, prev_line)) = metric_entries.get(&(i, j)) {
                        if *prev != s {
                            return Err(err(
                                line,
                                format!("g.{i}.{j} conflicts with line {prev_line}"),
                            ));
                        }
                    }
                    metric_entries.insert((i, j), (s, line));
                }
                other => return Err(err(line, format!("unknown key `{other}` in [ambient]"))),
            },
            Section::Embedding => {
                if !key.starts_with('x') {
                    return Err(err(line, format!("unknown key `{key}` in [embedding]")));
                }
                let i: usize = key[1..]
                    .parse()
                    .map_err(|_| err(line, format!("unknown key `{key}` in [embedding]")))?;
                if i == 0 {
                    return Err(err(line, "embedding components are 1-based"));
                }
                let s = match value {
                    Value::Quoted(s) => s,
                    Value::Bare(s) => s,
                };
                let e = Expr::parse(&s).map_err(|e| err(line, format!("x{i}: {e}")))?;
                check_vars(&e, &["u1", "u2"])
                    .map_err(|v| err(line, format!("x{i} uses unknown variable `{v}`")))?;
                if embedding.contains_key(&i) {
                    return Err(err(line, format!("duplicate embedding component x{i}")));
                }
                embedding.insert(i, (e, line));
            }
            Section::Density => match key.as_str() {
                "rho" => {
                    let d = match value {
                        Value::Bare(s) if s == "sqrt_g" => Density::SqrtG,
                        Value::Bare(s) if s == "one" => Density::Unit,
                        Value::Quoted(s) | Value::Bare(s) => {
                            let e =
                                Expr::parse(&s).map_err(|e| err(line, format!("rho: {e}")))?;
                            check_vars(&e, &["u1", "u2"]).map_err(|v| {
                                err(line, format!("rho uses unknown variable `{v}`"))
                            })?;
                            Density::Custom(e)
                        }
                    };
                    density = Some(d);
                }
                other => return Err(err(line, format!("unknown key `{other}` in [density]"))),
            },
            Section::Grid => {
                let valid = [
                    "u1.min", "u1.max", "u1.count", "u2.min", "u2.max", "u2.count",
                ];
                let Some(&slot) = valid.iter().find(|&&v| v == key) else {
                    return Err(err(line, format!("unknown key `{key}` in [grid]")));
                };
                grid.insert(slot, (parse_number(&value, &key, line)?, line));
            }
        }
    }

    // assemble the ambient manifold
    let (m, _) = dim.ok_or_else(|| SpecError::Invalid {
        msg: "missing `dim` in [ambient]".into(),
    })?;
    let ambient = if let Some(line) = euclidean {
        if !metric_entries.is_empty() {
            return Err(err(line, "metric = euclidean conflicts with explicit g entries"));
        }
        AmbientManifold::euclidean(m)
    } else {
        if metric_entries.is_empty() {
            return Err(SpecError::Invalid {
                msg: "ambient needs `metric = euclidean` or explicit g.i.j entries".into(),
            });
        }
        let allowed: Vec<String> = (1..=m).map(|i| format!("x{i}")).collect();
        let allowed_refs: Vec<&str> = allowed.iter().map(|s| s.as_str()).collect();
        let mut rows = Vec::with_capacity(m);
        for i in 1..=m {
            let mut row = Vec::with_capacity(m);
            for j in 1..=m {
                let entry = metric_entries
                    .get(&(i, j))
                    .or_else(|| metric_entries.get(&(j, i)));
                let Some((s, line)) = entry else {
                    return Err(SpecError::Invalid {
                        msg: format!("missing metric entry g.{i}.{j}"),
                    });
                };
                if let (Some((a, al)), Some((b, _))) =
                    (metric_entries.get(&(i, j)), metric_entries.get(&(j, i)))
                {
                    if i != j && a != b {
                        return Err(err(*al, format!("g.{i}.{j} and g.{j}.{i} differ")));
                    }
                }
                let e = Expr::parse(s).map_err(|e| err(*line, format!("g.{i}.{j}: {e}")))?;
                check_vars(&e, &allowed_refs)
                    .map_err(|v| err(*line, format!("g.{i}.{j} uses unknown variable `{v}`")))?;
                row.push(e);
            }
            rows.push(row);
        }
        AmbientManifold::from_metric(m, rows).map_err(|e| SpecError::Invalid {
            msg: format!("ambient metric: {e}"),
        })?
    };
    for (&(i, j), &(_, line)) in &metric_entries {
        if i > m || j > m {
            return Err(err(line, format!("metric index g.{i}.{j} exceeds dim {m}")));
        }
    }

    // embedding components x1..xm, all present
    let mut components = Vec::with_capacity(m);
    for i in 1..=m {
        let Some((e, _)) = embedding.remove(&i) else {
            return Err(SpecError::Invalid {
                msg: format!("missing embedding component x{i} (ambient dim {m})"),
            });
        };
        components.push(e);
    }
    if let Some((&i, &(_, line))) = embedding.iter().next() {
        return Err(err(
            line,
            format!("embedding component x{i} exceeds ambient dim {m}"),
        ));
    }

    let surface = SurfaceSpec::new(
        ambient,
        components,
        density.unwrap_or(Density::SqrtG),
        label.unwrap_or_else(|| "unnamed".into()),
    )
    .map_err(|e| SpecError::Invalid { msg: e.to_string() })?;

    // grid
    let fetch = |key: &str| -> Result<f64, SpecError> {
        grid.get(key)
            .map(|&(v, _)| v)
            .ok_or_else(|| SpecError::Invalid {
                msg: format!("missing grid key `{key}`"),
            })
    };
    let axis = |name: &str| -> Result<AxisSpec, SpecError> {
        let min = fetch(&format!("{name}.min"))?;
        let max = fetch(&format!("{name}.max"))?;
        let count_f = fetch(&format!("{name}.count"))?;
        if count_f.fract() != 0.0 || !(2.0..=10000.0).contains(&count_f) {
            return Err(SpecError::Invalid {
                msg: format!("{name}.count must be an integer in 2..=10000"),
            });
        }
        if !(min < max) {
            return Err(SpecError::Invalid {
                msg: format!("{name}: min must be < max"),
            });
        }
        Ok(AxisSpec {
            min,
            max,
            count: count_f as usize,
        })
    };
    let gridspec = GridSpec {
        u1: axis("u1")?,
        u2: axis("u2")?,
    };
    Ok((surface, gridspec))
}

pub fn load_spec(path: impl AsRef<Path>) -> Result<(SurfaceSpec, GridSpec), SpecError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_spec(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPHERE: &str = r#"
label = sphere_r2

[ambient]
dim = 3
metric = euclidean

[embedding]
x1 = "2*sin(u1)*cos(u2)"
x2 = "2*sin(u1)*sin(u2)"
x3 = "2*cos(u1)"

[density]
rho = sqrt_g

[grid]
u1.min = 0.3
u1.max = 2.8
u1.count = 20
u2.min = 0.0
u2.max = 6.0
u2.count = 20
"#;

    #[test]
    fn sphere_spec_happy_path() {
        let (surface, grid) = parse_spec(SPHERE).unwrap();
        assert_eq!(surface.ambient.dim(), 3);
        assert_eq!(surface.codim(), 1);
        assert_eq!(surface.label, "sphere_r2");
        assert!(matches!(surface.density, Density::SqrtG));
        assert_eq!(grid.len(), 400);
        let pts = grid.points();
        assert_eq!(pts[0], [0.3, 0.0]);
        // row-major: u2 varies fastest
        assert!((pts[1][0] - 0.3).abs() < 1e-15);
        assert!(pts[1][1] > 0.0);
        assert_eq!(*pts.last().unwrap(), [2.8, 6.0]);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let text = SPHERE.replace("x3 = \"2*cos(u1)\"\n", "");
        let e = parse_spec(&text).unwrap_err();
        assert!(e.to_string().contains("x3"), "{e}");
    }

    #[test]
    fn curved_metric_with_symmetric_completion() {
        let text = r#"
[ambient]
dim = 3
g.1.1 = "1/x3^2"
g.2.2 = "1/x3^2"
g.3.3 = "1/x3^2"
g.1.2 = 0
g.1.3 = 0
g.2.3 = 0

[embedding]
x1 = "u1"
x2 = "u2"
x3 = 1

[grid]
u1.min = -1
u1.max = 1
u1.count = 5
u2.min = -1
u2.max = 1
u2.count = 5
"#;
        let (surface, _) = parse_spec(text).unwrap();
        assert!(!surface.ambient.is_euclidean());
        let fp = crate::classical::frame_at(&surface, [0.2, 0.4]).unwrap();
        assert!((fp.gaussian_curvature()).abs() < 1e-9);
    }

    #[test]
    fn conflicting_metric_entries_rejected() {
        let text = r#"
[ambient]
dim = 3
g.1.2 = "x1"
g.2.1 = "x2"
g.1.1 = 1
g.2.2 = 1
g.3.3 = 1
g.1.3 = 0
g.2.3 = 0

[embedding]
x1 = "u1"
x2 = "u2"
x3 = 0

[grid]
u1.min = 0
u1.max = 1
u1.count = 2
u2.min = 0
u2.max = 1
u2.count = 2
"#;
        let e = parse_spec(text).unwrap_err();
        assert!(e.to_string().contains("differ"), "{e}");
    }

    #[test]
    fn unknown_key_has_line_number() {
        let text = SPHERE.replace("rho = sqrt_g", "density_mode = foo");
        match parse_spec(&text).unwrap_err() {
            SpecError::Line { line, msg } => {
                assert!(msg.contains("density_mode"));
                assert!(line > 0);
            }
            other => panic!("expected line error, got {other}"),
        }
    }

    #[test]
    fn grid_validation() {
        let bad = SPHERE.replace("u1.count = 20", "u1.count = 1");
        assert!(parse_spec(&bad).is_err());
        let bad = SPHERE.replace("u1.max = 2.8", "u1.max = 0.1");
        assert!(parse_spec(&bad).is_err());
        let bad = SPHERE.replace("u1.count = 20", "u1.count = 2.5");
        assert!(parse_spec(&bad).is_err());
    }

    #[test]
    fn custom_density_expression() {
        let text = SPHERE.replace("rho = sqrt_g", "rho = \"1+u1^2+u2^2\"");
        let (surface, _) = parse_spec(&text).unwrap();
        assert!(matches!(surface.density, Density::Custom(_)));
        let bad = SPHERE.replace("rho = sqrt_g", "rho = \"1+z\"");
        assert!(parse_spec(&bad).is_err());
    }

    #[test]
    fn parse_density_override() {
        assert!(matches!(parse_density("one").unwrap(), Density::Unit));
        assert!(matches!(parse_density("sqrt_g").unwrap(), Density::SqrtG));
        assert!(matches!(
            parse_density("1+u1^2").unwrap(),
            Density::Custom(_)
        ));
        assert!(parse_density("sin(").is_err());
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let text = format!("# heading\n{SPHERE}\n# trailing");
        assert!(parse_spec(&text).is_ok());
    }
}
