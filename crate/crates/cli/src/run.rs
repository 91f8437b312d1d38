use heatkernel::coefficients::{
    a0_local, a0_projector_case, a1_local_pipeline, a1_local_raw, vector_projector_symbol, PointJet,
};
use heatkernel::linalg;
use heatkernel::moments::xi_integral_oracle;
use heatkernel::simplex::{self, IntegralSpec};
use heatkernel::symbolic::{count_required_operators, expand_volterra_order1, rewrite_all};
use heatkernel::torus::compare_with_engine;
use heatkernel::MatrixN;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Config, IntegralsConfig, Mode, PointConfig, SymbolsConfig, Tolerance, TorusConfig};
use crate::error::{CliError, Result};
use crate::report::{Check, Entry, Report, Value};

/// Largest number of tuples a `grid` may expand to.
const MAX_GRID_TUPLES: usize = 100_000;
const DEFAULT_QUADRATURE_ORDER: usize = 16;

/// Command-line settings that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub mode: Option<Mode>,
    pub tolerance: Option<Tolerance>,
    pub seed: Option<u64>,
}

struct Outcome {
    results: Vec<Entry>,
    checks: Vec<Check>,
    seed: Option<u64>,
}

pub fn run(config: &Config, overrides: &Overrides) -> Result<Report> {
    let mode = overrides
        .mode
        .or(config.mode)
        .ok_or_else(|| CliError::schema("$.mode", "no mode given in the file or on the command line"))?;
    let tol = overrides.tolerance.or(config.tolerance).map_or(mode.default_tolerance(), Tolerance::get);
    let seed = overrides.seed.or(config.seed);
    let oracle = config.oracle.unwrap_or(true);
    let out = match mode {
        Mode::Integrals => integrals(section(&config.integrals, "$.integrals")?, tol, oracle, seed)?,
        Mode::A0 => a0(section(&config.point, "$.point")?, tol, oracle)?,
        Mode::A1 => a1(section(&config.point, "$.point")?, tol, oracle)?,
        Mode::ValidateTorus => torus(section(&config.torus, "$.torus")?, tol)?,
        Mode::Symbols => symbols(&config.symbols.clone().unwrap_or_default())?,
    };
    let status = if out.checks.iter().all(|c| c.pass) { "pass" } else { "fail" };
    Ok(Report {
        mode: mode.name(),
        tolerance: tol,
        seed: out.seed,
        input: config.clone(),
        results: out.results,
        checks: out.checks,
        status,
    })
}

fn section<'a, T>(s: &'a Option<T>, path: &str) -> Result<&'a T> {
    s.as_ref().ok_or_else(|| CliError::schema(path, "missing section for the selected mode"))
}

fn entry(name: impl Into<String>, value: impl Into<Value>) -> Entry {
    Entry { name: name.into(), value: value.into() }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Real(x)
    }
}

fn tuple_name(r: &[f64]) -> String {
    let parts: Vec<String> = r.iter().map(|x| x.to_string()).collect();
    format!("I({})", parts.join(", "))
}

fn integral_tuples(cfg: &IntegralsConfig, seed: Option<u64>) -> Result<(Vec<Vec<f64>>, Option<u64>)> {
    let len = cfg.k + 1;
    let mut tuples = Vec::new();
    for (i, r) in cfg.args.iter().enumerate() {
        if r.len() != len {
            return Err(CliError::schema(format!("$.integrals.args[{i}]"), format!("expected {len} arguments")));
        }
        tuples.push(r.clone());
    }
    if !cfg.grid.is_empty() {
        let m = cfg.grid.len();
        let count = (0..len).try_fold(1usize, |acc, _| acc.checked_mul(m)).filter(|&c| c <= MAX_GRID_TUPLES);
        let Some(count) = count else {
            return Err(CliError::schema(
                "$.integrals.grid",
                format!("grid expands to more than {MAX_GRID_TUPLES} tuples"),
            ));
        };
        for mut idx in 0..count {
            let mut r = Vec::with_capacity(len);
            for _ in 0..len {
                r.push(cfg.grid[idx % m]);
                idx /= m;
            }
            tuples.push(r);
        }
    }
    let mut used_seed = None;
    if let Some(rand) = &cfg.random {
        if !(rand.min > 0.0 && rand.max > rand.min && rand.max.is_finite()) {
            return Err(CliError::schema("$.integrals.random", "need 0 < min < max"));
        }
        let s = seed.unwrap_or(0);
        used_seed = Some(s);
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let (lo, hi) = (rand.min.ln(), rand.max.ln());
        for _ in 0..rand.count {
            tuples.push((0..len).map(|_| rng.gen_range(lo..hi).exp()).collect());
        }
    }
    if tuples.is_empty() {
        return Err(CliError::schema("$.integrals", "give at least one of `args`, `grid`, `random`"));
    }
    Ok((tuples, used_seed))
}

fn integrals(cfg: &IntegralsConfig, tol: f64, oracle: bool, seed: Option<u64>) -> Result<Outcome> {
    let spec = IntegralSpec::new(cfg.d, cfg.p, cfg.k)?;
    let order = cfg.quadrature_order.unwrap_or(DEFAULT_QUADRATURE_ORDER);
    let (tuples, seed) = integral_tuples(cfg, seed)?;
    let mut results = vec![entry("alpha", spec.alpha())];
    let mut checks = Vec::new();
    for r in &tuples {
        let v = simplex::integral(spec, r)?;
        let name = tuple_name(r);
        if oracle {
            let q = simplex::integral_quadrature(spec.alpha(), r, order)?;
            checks.push(Check::relative(format!("{name} vs quadrature"), v, q, tol));
        }
        results.push(entry(name, v));
    }
    Ok(Outcome { results, checks, seed })
}

fn quad_form(g: &nalgebra::DMatrix<f64>, xi: &[f64]) -> f64 {
    let d = xi.len();
    (0..d).flat_map(|a| (0..d).map(move |b| (a, b))).map(|(a, b)| g[(a, b)] * xi[a] * xi[b]).sum()
}

/// `(2π)^{-d} ∫ tr e^{-h(ξ)} dξ` by Gauss–Hermite quadrature. The rule converges
/// like `((λ - s)/(λ + s))^order` for each eigenvalue `λ` of `h(ξ)/|ξ|²`, so `scale`
/// should sit at the geometric mean of the extremes.
fn xi_oracle(jet: &PointJet, scale: f64, h: impl Fn(&[f64]) -> MatrixN) -> Result<f64> {
    let order = match jet.dim() {
        1..=3 => 40,
        4 => 28,
        5 => 14,
        _ => 10,
    };
    let res = xi_integral_oracle(&jet.g, scale, order, |xi| {
        MatrixN::from_element(1, 1, linalg::trace(&linalg::exp_neg(&h(xi))))
    })?;
    Ok(res.value[(0, 0)].re)
}

fn a0(cfg: &PointConfig, tol: f64, oracle: bool) -> Result<Outcome> {
    let jet = cfg.jet()?;
    let mut results = Vec::new();
    let mut checks = Vec::new();
    if cfg.u.is_none() && cfg.projector.is_none() {
        return Err(CliError::schema("$.point.u", "a0 needs `u` or `projector`"));
    }
    if cfg.u.is_some() {
        let u = cfg.u()?;
        let a = a0_local(&jet, &u)?;
        results.push(entry("a0", a));
        if oracle {
            let (eig, _) = linalg::hermitian_eigen(&u);
            let q = xi_oracle(&jet, (eig[0] * eig[eig.len() - 1]).sqrt(), |xi| {
                &u * Complex64::new(quad_form(&jet.g, xi), 0.0)
            })?;
            checks.push(Check::relative("a0 vs xi quadrature", a, q, tol));
        }
    }
    if let Some(p) = &cfg.projector {
        let d = jet.dim();
        let x = vector_projector_symbol(&jet);
        let a = a0_projector_case(&jet, p.zeta, &x)?;
        results.push(entry(format!("a0 projector (zeta = {})", p.zeta), a));
        let law = jet.volume_factor() * (d as f64 + (1.0 + p.zeta).powf(-(d as f64) / 2.0) - 1.0);
        results.push(entry("a0 projector, d + (1+zeta)^(-d/2) - 1", law));
        if oracle {
            let q = xi_oracle(&jet, (1.0 + p.zeta).sqrt(), |xi| {
                let mut h = linalg::identity(d) * Complex64::new(quad_form(&jet.g, xi), 0.0);
                for mu in 0..d {
                    for nu in 0..d {
                        h += &x[mu][nu] * Complex64::new(p.zeta * xi[mu] * xi[nu], 0.0);
                    }
                }
                h
            })?;
            checks.push(Check::relative("a0 projector vs xi quadrature", a, q, tol));
        }
    }
    Ok(Outcome { results, checks, seed: None })
}

fn a1(cfg: &PointConfig, tol: f64, oracle: bool) -> Result<Outcome> {
    let jet = cfg.jet()?;
    let co = cfg.coefficients()?;
    let pipeline = a1_local_pipeline(&jet, &co)?;
    let mut results = vec![entry("a1", pipeline)];
    let mut checks = Vec::new();
    if jet.dim() == 4 {
        let raw = a1_local_raw(&jet, &co)?;
        results.push(entry("a1 closed formula", raw));
        if oracle {
            let scale = pipeline.norm().max(f64::MIN_POSITIVE);
            let mut re = Check::relative("a1 closed formula vs pipeline (re)", raw.re, pipeline.re, tol);
            let mut im = Check::relative("a1 closed formula vs pipeline (im)", raw.im, pipeline.im, tol);
            for (c, diff) in [(&mut re, raw.re - pipeline.re), (&mut im, raw.im - pipeline.im)] {
                c.error = diff.abs() / scale;
                c.pass = c.error <= tol;
            }
            checks.extend([re, im]);
        }
    }
    Ok(Outcome { results, checks, seed: None })
}

fn torus(cfg: &TorusConfig, tol: f64) -> Result<Outcome> {
    let model = cfg.model()?;
    let cmp = compare_with_engine(&model, cfg.window.as_deref(), cfg.order, cfg.grid)?;
    let c = &cmp.fit.coefficients;
    let samples = cmp
        .samples
        .iter()
        .map(|s| format!("t = {:.6e}  trace = {:.16e}  truncation <= {:.2e}", s.t, s.trace, s.truncation_bound))
        .collect();
    let results = vec![
        entry("samples", Value::Lines(samples)),
        entry("fit a0", c[0].value),
        entry("fit a0 uncertainty", c[0].uncertainty),
        entry("fit a1", c[1].value),
        entry("fit a1 uncertainty", c[1].uncertainty),
        entry("fit condition number", cmp.fit.condition_number),
        entry("engine a0", cmp.engine_a0),
        entry("engine a1", cmp.engine_a1),
    ];
    let checks = vec![
        Check::relative("fit a0 vs engine", c[0].value, cmp.engine_a0, tol),
        Check::relative("fit a1 vs engine", c[1].value, cmp.engine_a1, tol),
    ];
    Ok(Outcome { results, checks, seed: None })
}

/// Term count of the order-one expansion after derivatives are moved.
const ORDER_ONE_TERMS: usize = 14;

fn symbols(cfg: &SymbolsConfig) -> Result<Outcome> {
    if cfg.order != 1 {
        return Err(heatkernel::Error::InvalidArgument(format!(
            "symbolic expansion is implemented for order 1, got {}",
            cfg.order
        ))
        .into());
    }
    let mut results = Vec::new();
    let mut total = 0;
    for g in expand_volterra_order1() {
        let terms = rewrite_all(&g.terms)?;
        total += terms.len();
        results.push(entry(g.name, Value::Lines(terms.iter().map(|t| t.to_string()).collect())));
    }
    results.push(entry("terms", Value::Count(total)));
    let ops = count_required_operators(cfg.order).iter().map(|(k, p)| format!("k = {k}, p = {p}")).collect();
    results.push(entry("operators", Value::Lines(ops)));
    let checks = vec![Check::relative("term count", total as f64, ORDER_ONE_TERMS as f64, 0.0)];
    Ok(Outcome { results, checks, seed: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse;

    #[test]
    fn a0_diagonal_example() {
        let cfg = parse(r#"{"version":1,"mode":"a0","point":{"dim":4,"u":[[[1,0],[0,0]],[[0,0],[4,0]]]}}"#).unwrap();
        let report = run(&cfg, &Overrides::default()).unwrap();
        let expect = (1.0 + 1.0 / 16.0) / (16.0 * std::f64::consts::PI.powi(2));
        assert_eq!(
            report.results[0].value,
            Value::Real(a0_local(&PointJet::flat(4), &cfg.point.as_ref().unwrap().u().unwrap()).unwrap())
        );
        match report.results[0].value {
            Value::Real(x) => assert!((x - expect).abs() < 1e-15),
            ref v => panic!("{v:?}"),
        }
        assert_eq!(report.status, "pass");
    }

    #[test]
    fn symbols_lists_fourteen_terms() {
        let cfg = parse(r#"{"version":1,"mode":"symbols"}"#).unwrap();
        let report = run(&cfg, &Overrides::default()).unwrap();
        assert!(report.results.contains(&entry("terms", Value::Count(14))));
    }

    #[test]
    fn random_tuples_depend_on_seed() {
        let cfg = parse(
            r#"{"version":1,"mode":"integrals","integrals":{"d":3,"k":2,"random":{"count":3,"min":0.5,"max":4}}}"#,
        )
        .unwrap();
        let a = run(&cfg, &Overrides { seed: Some(1), ..Default::default() }).unwrap();
        let b = run(&cfg, &Overrides { seed: Some(1), ..Default::default() }).unwrap();
        let c = run(&cfg, &Overrides { seed: Some(2), ..Default::default() }).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_ne!(a.results, c.results);
        assert_eq!(a.seed, Some(1));
    }

    #[test]
    fn missing_section_is_a_schema_error() {
        let cfg = parse(r#"{"version":1,"mode":"a1"}"#).unwrap();
        match run(&cfg, &Overrides::default()) {
            Err(CliError::Schema { path, .. }) => assert_eq!(path, "$.point"),
            other => panic!("{other:?}"),
        }
    }
}
