//! JSON configuration. Complex matrices are written `[[[re, im], …], …]`.

use std::path::PathBuf;

use clap::ValueEnum;
use heatkernel::coefficients::{OperatorCoefficients, PointJet};
use heatkernel::torus::{ConstantCoefficients, MatrixField, TorusModel, VaryingCoefficients};
use heatkernel::MatrixN;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Integrals,
    A0,
    A1,
    ValidateTorus,
    Symbols,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Integrals => "integrals",
            Mode::A0 => "a0",
            Mode::A1 => "a1",
            Mode::ValidateTorus => "validate-torus",
            Mode::Symbols => "symbols",
        }
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            Mode::ValidateTorus => 2e-2,
            _ => 1e-8,
        }
    }
}

/// Relative tolerance for oracle comparisons.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Tolerance(f64);

impl Tolerance {
    pub fn new(x: f64) -> std::result::Result<Self, String> {
        if x > 0.0 && x.is_finite() {
            Ok(Tolerance(x))
        } else {
            Err(format!("tolerance must be positive and finite, got {x}"))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Tolerance {
    type Error = String;
    fn try_from(x: f64) -> std::result::Result<Self, String> {
        Tolerance::new(x)
    }
}

impl From<Tolerance> for f64 {
    fn from(t: Tolerance) -> f64 {
        t.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RealMatrix(pub Vec<Vec<f64>>);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ComplexMatrix(pub Vec<Vec<[f64; 2]>>);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<Tolerance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Compare against the independent oracles (default on).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrals: Option<IntegralsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<PointConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torus: Option<TorusConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbols: Option<SymbolsConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegralsConfig {
    pub d: u32,
    #[serde(default)]
    pub p: u32,
    pub k: usize,
    /// Explicit argument tuples of length `k + 1`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub args: Vec<Vec<f64>>,
    /// Every `(k + 1)`-tuple drawn from these values.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<RandomArgs>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature_order: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomArgs {
    pub count: usize,
    pub min: f64,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricConfig {
    pub g: RealMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dg: Option<Vec<RealMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ddg: Option<Vec<Vec<RealMatrix>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectorConfig {
    pub zeta: f64,
}

/// Data at a single point. Omitted metric means flat; omitted derivatives are zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointConfig {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<ComplexMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub du: Option<Vec<ComplexMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ddu: Option<Vec<Vec<ComplexMatrix>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<ComplexMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dv: Option<Vec<Vec<ComplexMatrix>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<ComplexMatrix>,
    /// `u^{μν} = g^{μν} + ζ X^{μν}` with the vector projector `X`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projector: Option<ProjectorConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub wave: Vec<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cos: Option<ComplexMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sin: Option<ComplexMatrix>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub constant: ComplexMatrix,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modes: Vec<ModeConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantConfig {
    pub u: ComplexMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<ComplexMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<ComplexMatrix>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VaryingConfig {
    pub u: FieldConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<FieldConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusConfig {
    pub dim: usize,
    pub side: f64,
    pub cutoff: usize,
    #[serde(default = "default_fit_order")]
    pub order: usize,
    /// Points per axis for integrating the engine densities.
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<ConstantConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub varying: Option<VaryingConfig>,
}

fn default_fit_order() -> usize {
    4
}

fn default_grid() -> usize {
    32
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolsConfig {
    pub order: usize,
}

impl Default for SymbolsConfig {
    fn default() -> Self {
        SymbolsConfig { order: 1 }
    }
}

/// Parses and checks the version; shape checks happen on conversion.
pub fn parse(text: &str) -> Result<Config> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: Config = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { "$".to_string() } else { format!("$.{path}") };
        CliError::schema(path, e.into_inner().to_string())
    })?;
    if config.version != SCHEMA_VERSION {
        return Err(CliError::schema(
            "$.version",
            format!("unsupported version {} (expected {SCHEMA_VERSION})", config.version),
        ));
    }
    Ok(config)
}

fn schema<T>(path: &str, message: impl Into<String>) -> Result<T> {
    Err(CliError::schema(path, message))
}

fn check_finite(path: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        schema(path, "entries must be finite")
    }
}

impl RealMatrix {
    pub fn to_matrix(&self, path: &str, n: Option<usize>) -> Result<DMatrix<f64>> {
        let rows = &self.0;
        let size = n.unwrap_or(rows.len());
        if rows.is_empty() || rows.len() != size {
            return schema(path, format!("expected {size} rows, got {}", rows.len()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != size {
                return schema(&format!("{path}[{i}]"), format!("expected {size} entries, got {}", row.len()));
            }
            for (j, &x) in row.iter().enumerate() {
                check_finite(&format!("{path}[{i}][{j}]"), x)?;
            }
        }
        Ok(DMatrix::from_fn(size, size, |i, j| rows[i][j]))
    }
}

impl ComplexMatrix {
    pub fn from_matrix(m: &MatrixN) -> Self {
        ComplexMatrix((0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect())
    }

    pub fn to_matrix(&self, path: &str, n: Option<usize>) -> Result<MatrixN> {
        let rows = &self.0;
        let size = n.unwrap_or(rows.len());
        if rows.is_empty() || rows.len() != size {
            return schema(path, format!("expected {size} rows, got {}", rows.len()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != size {
                return schema(&format!("{path}[{i}]"), format!("expected {size} entries, got {}", row.len()));
            }
            for (j, z) in row.iter().enumerate() {
                check_finite(&format!("{path}[{i}][{j}]"), z[0])?;
                check_finite(&format!("{path}[{i}][{j}]"), z[1])?;
            }
        }
        Ok(MatrixN::from_fn(size, size, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
    }
}

fn list(path: &str, items: &[ComplexMatrix], len: usize, n: usize) -> Result<Vec<MatrixN>> {
    if items.len() != len {
        return schema(path, format!("expected {len} matrices, got {}", items.len()));
    }
    items.iter().enumerate().map(|(i, m)| m.to_matrix(&format!("{path}[{i}]"), Some(n))).collect()
}

fn grid(path: &str, items: &[Vec<ComplexMatrix>], d: usize, n: usize) -> Result<Vec<Vec<MatrixN>>> {
    if items.len() != d {
        return schema(path, format!("expected {d} rows, got {}", items.len()));
    }
    items.iter().enumerate().map(|(i, row)| list(&format!("{path}[{i}]"), row, d, n)).collect()
}

fn symmetric(path: &str, m: &DMatrix<f64>) -> Result<()> {
    if (m - m.transpose()).abs().max() > 1e-12 * (1.0 + m.abs().max()) {
        return schema(path, "matrix must be symmetric");
    }
    Ok(())
}

impl PointConfig {
    pub fn jet(&self) -> Result<PointJet> {
        let d = self.dim;
        if d == 0 {
            return schema("$.point.dim", "dimension must be at least 1");
        }
        let Some(metric) = &self.metric else {
            return Ok(PointJet::flat(d));
        };
        let g = metric.g.to_matrix("$.point.metric.g", Some(d))?;
        symmetric("$.point.metric.g", &g)?;
        let dg = match &metric.dg {
            None => vec![DMatrix::zeros(d, d); d],
            Some(list) => {
                if list.len() != d {
                    return schema("$.point.metric.dg", format!("expected {d} matrices, got {}", list.len()));
                }
                let mut out = Vec::with_capacity(d);
                for (c, m) in list.iter().enumerate() {
                    let path = format!("$.point.metric.dg[{c}]");
                    let m = m.to_matrix(&path, Some(d))?;
                    symmetric(&path, &m)?;
                    out.push(m);
                }
                out
            }
        };
        let ddg = match &metric.ddg {
            None => vec![vec![DMatrix::zeros(d, d); d]; d],
            Some(rows) => {
                if rows.len() != d {
                    return schema("$.point.metric.ddg", format!("expected {d} rows, got {}", rows.len()));
                }
                let mut out = Vec::with_capacity(d);
                for (c, row) in rows.iter().enumerate() {
                    if row.len() != d {
                        return schema(
                            &format!("$.point.metric.ddg[{c}]"),
                            format!("expected {d} matrices, got {}", row.len()),
                        );
                    }
                    let mut r = Vec::with_capacity(d);
                    for (e, m) in row.iter().enumerate() {
                        let path = format!("$.point.metric.ddg[{c}][{e}]");
                        let m = m.to_matrix(&path, Some(d))?;
                        symmetric(&path, &m)?;
                        r.push(m);
                    }
                    out.push(r);
                }
                out
            }
        };
        Ok(PointJet { g, dg, ddg })
    }

    pub fn u(&self) -> Result<MatrixN> {
        match &self.u {
            Some(u) => u.to_matrix("$.point.u", None),
            None => schema("$.point.u", "missing field"),
        }
    }

    pub fn coefficients(&self) -> Result<OperatorCoefficients> {
        let d = self.dim;
        let u = self.u()?;
        let n = u.nrows();
        let zeros = || MatrixN::zeros(n, n);
        let du = match &self.du {
            Some(x) => list("$.point.du", x, d, n)?,
            None => vec![zeros(); d],
        };
        let ddu = match &self.ddu {
            Some(x) => grid("$.point.ddu", x, d, n)?,
            None => vec![vec![zeros(); d]; d],
        };
        let v = match &self.v {
            Some(x) => list("$.point.v", x, d, n)?,
            None => vec![zeros(); d],
        };
        let dv = match &self.dv {
            Some(x) => grid("$.point.dv", x, d, n)?,
            None => vec![vec![zeros(); d]; d],
        };
        let w = match &self.w {
            Some(x) => x.to_matrix("$.point.w", Some(n))?,
            None => zeros(),
        };
        Ok(OperatorCoefficients { u, du, ddu, v, dv, w })
    }
}

impl FieldConfig {
    fn to_field(&self, path: &str, d: usize, n: Option<usize>) -> Result<MatrixField> {
        let c = self.constant.to_matrix(&format!("{path}.constant"), n)?;
        let n = c.nrows();
        let mut f = MatrixField::constant(d, c);
        for (i, m) in self.modes.iter().enumerate() {
            let p = format!("{path}.modes[{i}]");
            if m.wave.len() != d {
                return schema(&format!("{p}.wave"), format!("expected {d} components, got {}", m.wave.len()));
            }
            if m.wave.iter().all(|&j| j == 0) {
                return schema(&format!("{p}.wave"), "use the constant part for the zero mode");
            }
            if let Some(a) = &m.cos {
                f = f.with_cos(&m.wave, a.to_matrix(&format!("{p}.cos"), Some(n))?);
            }
            if let Some(b) = &m.sin {
                f = f.with_sin(&m.wave, b.to_matrix(&format!("{p}.sin"), Some(n))?);
            }
        }
        Ok(f)
    }
}

impl TorusConfig {
    pub fn model(&self) -> Result<TorusModel> {
        let d = self.dim;
        if d == 0 {
            return schema("$.torus.dim", "dimension must be at least 1");
        }
        if !(self.side > 0.0 && self.side.is_finite()) {
            return schema("$.torus.side", "side must be positive");
        }
        if let Some(w) = &self.window {
            if let Some(i) = w.iter().position(|t| !(*t > 0.0 && t.is_finite())) {
                return schema(&format!("$.torus.window[{i}]"), "times must be positive");
            }
        }
        match (&self.constant, &self.varying) {
            (Some(c), None) => {
                let u = c.u.to_matrix("$.torus.constant.u", None)?;
                let n = u.nrows();
                let v = match &c.v {
                    Some(v) => list("$.torus.constant.v", v, d, n)?,
                    None => vec![MatrixN::zeros(n, n); d],
                };
                let w = match &c.w {
                    Some(w) => w.to_matrix("$.torus.constant.w", Some(n))?,
                    None => MatrixN::zeros(n, n),
                };
                Ok(TorusModel::constant(d, self.side, self.cutoff, ConstantCoefficients { u, v, w }))
            }
            (None, Some(v)) => {
                let u = v.u.to_field("$.torus.varying.u", d, None)?;
                let n = u.dim();
                let w = match &v.w {
                    Some(w) => w.to_field("$.torus.varying.w", d, Some(n))?,
                    None => MatrixField::zero(n),
                };
                Ok(TorusModel::varying(d, self.side, self.cutoff, VaryingCoefficients { u, w }))
            }
            _ => schema("$.torus", "exactly one of `constant` and `varying` is required"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_first_offending_path() {
        let bad = r#"{"version": 1, "mode": "a0", "point": {"dim": 2, "u": [[[1, 0], [0, 0]], [[0, 0]]]}}"#;
        let cfg = parse(bad).unwrap();
        match cfg.point.unwrap().u() {
            Err(CliError::Schema { path, .. }) => assert_eq!(path, "$.point.u[1]"),
            other => panic!("{other:?}"),
        }
        match parse(r#"{"version": 1, "point": {"dim": "x"}}"#) {
            Err(CliError::Schema { path, .. }) => assert_eq!(path, "$.point.dim"),
            other => panic!("{other:?}"),
        }
        match parse(r#"{"version": 3}"#) {
            Err(CliError::Schema { path, .. }) => assert_eq!(path, "$.version"),
            other => panic!("{other:?}"),
        }
        assert!(parse(r#"{"version": 1, "tolerance": -1}"#).is_err());
    }

    #[test]
    fn round_trips() {
        let text = r#"{"version":1,"mode":"a0","tolerance":1e-9,"point":{"dim":4,"u":[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[4.0,0.0]]]}}"#;
        let cfg = parse(text).unwrap();
        assert_eq!(serde_json::to_string(&cfg).unwrap(), text);
    }

    #[test]
    fn flat_metric_by_default() {
        let cfg = parse(r#"{"version":1,"point":{"dim":3}}"#).unwrap();
        assert_eq!(cfg.point.unwrap().jet().unwrap(), PointJet::flat(3));
    }
}
