//! Name-keyed registry of shape constructors.
//!
//! A shape spec reads `id` or `id:key=value,key=value`. Values never contain
//! commas; list-valued parameters separate items with `|`. Every entry also
//! accepts `jets=fd`, which re-ingests the shape through its coordinate
//! expressions with finite-difference jets.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::expr::{Expr, Scope};
use crate::immersion::{
    Circle, Domain, ExpressionImmersion, ExpressionShape, Immersion, JetSource, Line, LinearPlane,
    ProductTorus,
};

/// Parsed `id:key=value,...` shape spec.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeSpec {
    pub id: String,
    pub params: BTreeMap<String, String>,
}

impl FromStr for ShapeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (id, rest) = match s.split_once(':') {
            Some((id, rest)) => (id.trim(), Some(rest)),
            None => (s, None),
        };
        if id.is_empty() {
            return Err(Error::Invalid("empty shape id".into()));
        }
        let mut params = BTreeMap::new();
        for item in rest.into_iter().flat_map(|r| r.split(',')) {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Invalid(format!("shape parameter `{item}` is not key=value")))?;
            if params.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(Error::Invalid(format!("duplicate shape parameter `{}`", k.trim())));
            }
        }
        Ok(Self {
            id: id.to_string(),
            params,
        })
    }
}

impl fmt::Display for ShapeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id)?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            f.write_str(if i == 0 { ":" } else { "," })?;
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

impl ShapeSpec {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    /// Numeric parameter; expressions such as `2*pi` are accepted.
    pub fn number(&self, key: &str) -> Result<Option<f64>> {
        self.get(key).map(parse_number).transpose()
    }

    pub fn number_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.number(key)?.unwrap_or(default))
    }

    pub fn list(&self, key: &str) -> Option<Vec<String>> {
        self.get(key)
            .map(|v| v.split('|').map(|s| s.trim().to_string()).collect())
    }

    fn uses_fd_jets(&self) -> Result<bool> {
        match self.get("jets") {
            None | Some("analytic") => Ok(false),
            Some("fd") => Ok(true),
            Some(other) => Err(Error::Invalid(format!("unknown jets mode `{other}`"))),
        }
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for k in self.params.keys() {
            if k != "jets" && !allowed.contains(&k.as_str()) {
                return Err(Error::Invalid(format!(
                    "shape `{}` has no parameter `{k}` (expected one of {allowed:?})",
                    self.id
                )));
            }
        }
        Ok(())
    }

    /// Numeric parameters outside `reserved`, exposed to expressions.
    fn free_params(&self, reserved: &[&str]) -> Result<Vec<(String, f64)>> {
        self.params
            .iter()
            .filter(|(k, _)| k.as_str() != "jets" && !reserved.contains(&k.as_str()))
            .map(|(k, v)| Ok((k.clone(), parse_number(v)?)))
            .collect()
    }
}

fn parse_number(src: &str) -> Result<f64> {
    Ok(Expr::parse(src, &Scope::new())?.eval(&[])?)
}

fn parse_count(spec: &ShapeSpec, key: &str, default: usize) -> Result<usize> {
    match spec.get(key) {
        None => Ok(default),
        Some(v) => v
            .parse::<usize>()
            .ok()
            .filter(|&n| (1..=9).contains(&n))
            .ok_or_else(|| Error::Invalid(format!("`{key}` must be an integer in 1..=9, got `{v}`"))),
    }
}

/// Constructor for one family of shapes.
pub trait ShapeFactory: Send + Sync {
    fn id(&self) -> &'static str;

    /// One-line parameter summary.
    fn summary(&self) -> &'static str;

    /// A spec that builds a representative member.
    fn example(&self) -> &'static str;

    fn jet_source(&self) -> JetSource {
        JetSource::Analytic
    }

    fn build(&self, spec: &ShapeSpec, seed: u64) -> Result<Box<dyn Immersion>>;
}

type BuildFn = fn(&ShapeSpec, u64) -> Result<Box<dyn Immersion>>;

struct CatalogEntry {
    id: &'static str,
    summary: &'static str,
    example: &'static str,
    jets: JetSource,
    build: BuildFn,
}

impl ShapeFactory for CatalogEntry {
    fn id(&self) -> &'static str {
        self.id
    }

    fn summary(&self) -> &'static str {
        self.summary
    }

    fn example(&self) -> &'static str {
        self.example
    }

    fn jet_source(&self) -> JetSource {
        self.jets
    }

    fn build(&self, spec: &ShapeSpec, seed: u64) -> Result<Box<dyn Immersion>> {
        (self.build)(spec, seed)
    }
}

fn build_line(spec: &ShapeSpec, _seed: u64) -> Result<Box<dyn Immersion>> {
    spec.check_keys(&[])?;
    Ok(Box::new(Line::new()))
}

fn build_plane(spec: &ShapeSpec, _seed: u64) -> Result<Box<dyn Immersion>> {
    spec.check_keys(&["n", "phases", "periodic"])?;
    let phases: Vec<f64> = match spec.list("phases") {
        Some(items) => items.iter().map(|s| parse_number(s)).collect::<Result<_>>()?,
        None => vec![0.0; parse_count(spec, "n", 2)?],
    };
    if spec.get("n").is_some() && parse_count(spec, "n", 2)? != phases.len() {
        return Err(Error::Invalid("`n` disagrees with the number of phases".into()));
    }
    let domain = periodic_flag(spec, phases.len())?;
    Ok(Box::new(LinearPlane::with_phases(&phases, domain)?))
}

fn periodic_flag(spec: &ShapeSpec, n: usize) -> Result<Domain> {
    match spec.get("periodic") {
        None | Some("false") => Ok(Domain::unit_box(n)),
        Some("true") => Ok(Domain::torus(n)),
        Some(other) => Err(Error::Invalid(format!("`periodic` must be true or false, got `{other}`"))),
    }
}

fn build_su_plane(spec: &ShapeSpec, seed: u64) -> Result<Box<dyn Immersion>> {
    spec.check_keys(&["n", "seed"])?;
    let n = parse_count(spec, "n", 2)?;
    let seed = match spec.get("seed") {
        Some(s) => s
            .parse::<u64>()
            .map_err(|_| Error::Invalid(format!("`seed` must be a non-negative integer, got `{s}`")))?,
        None => seed,
    };
    Ok(Box::new(LinearPlane::special(n, seed)?))
}

fn build_circle(spec: &ShapeSpec, _seed: u64) -> Result<Box<dyn Immersion>> {
    spec.check_keys(&["r"])?;
    Ok(Box::new(Circle::new(spec.number_or("r", 1.0)?)?))
}

fn build_torus(spec: &ShapeSpec, _seed: u64) -> Result<Box<dyn Immersion>> {
    let keys: Vec<String> = (1..=9).map(|k| format!("r{k}")).collect();
    let allowed: Vec<&str> = keys.iter().map(String::as_str).collect();
    spec.check_keys(&allowed)?;
    let mut radii = Vec::new();
    for key in &keys {
        match spec.number(key)? {
            Some(r) => radii.push(r),
            None => break,
        }
    }
    if radii.len() != spec.params.keys().filter(|k| k.as_str() != "jets").count() {
        return Err(Error::Invalid("torus radii must be r1, r2, ... without gaps".into()));
    }
    if radii.is_empty() {
        radii = vec![1.0, 0.5];
    }
    Ok(Box::new(ProductTorus::new(radii)?))
}

fn domain_from_spec(spec: &ShapeSpec, n: usize) -> Result<Domain> {
    // a single entry applies to every axis
    let broadcast = |l: Vec<String>| if l.len() == 1 { vec![l[0].clone(); n] } else { l };
    let periods = spec.list("period").map(broadcast).unwrap_or_else(|| vec!["none".into(); n]);
    let lower = spec.list("lower").map(broadcast);
    let upper = spec.list("upper").map(broadcast);
    if periods.len() != n
        || lower.as_ref().is_some_and(|l| l.len() != n)
        || upper.as_ref().is_some_and(|u| u.len() != n)
    {
        return Err(Error::Invalid(format!("domain lists must have {n} entries")));
    }
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    let mut periodic = Vec::with_capacity(n);
    for a in 0..n {
        let given_lo = lower.as_ref().map(|l| parse_number(&l[a])).transpose()?;
        let given_hi = upper.as_ref().map(|u| parse_number(&u[a])).transpose()?;
        if periods[a] == "none" {
            lo.push(given_lo.unwrap_or(-1.0));
            hi.push(given_hi.unwrap_or(1.0));
            periodic.push(false);
        } else {
            let p = parse_number(&periods[a])?;
            let start = given_lo.unwrap_or(0.0);
            lo.push(start);
            hi.push(start + p);
            periodic.push(true);
        }
    }
    Domain::new(lo, hi, periodic)
}

fn build_expr(spec: &ShapeSpec, _seed: u64) -> Result<Box<dyn Immersion>> {
    let coords = spec
        .list("coords")
        .ok_or_else(|| Error::Invalid("expression shapes need `coords=e1|e2|...`".into()))?;
    if coords.len() % 2 != 0 {
        return Err(Error::Invalid(format!(
            "expression arity {} is not 2n",
            coords.len()
        )));
    }
    let n = coords.len() / 2;
    let domain = domain_from_spec(spec, n)?;
    let params = spec.free_params(&["coords", "period", "lower", "upper"])?;
    Ok(Box::new(ExpressionImmersion::new(ExpressionShape {
        coords,
        params,
        domain,
    })?))
}

fn build_gradient_graph(spec: &ShapeSpec, _seed: u64) -> Result<Box<dyn Immersion>> {
    let phi = spec
        .get("phi")
        .ok_or_else(|| Error::Invalid("gradient graphs need `phi=<expression>`".into()))?;
    let n = parse_count(spec, "n", 1)?;
    let domain = domain_from_spec(spec, n)?;
    let params = spec.free_params(&["phi", "n", "period", "lower", "upper"])?;
    Ok(Box::new(ExpressionImmersion::gradient_graph(phi, n, params, domain)?))
}

/// Registry of shape factories keyed by id.
pub struct ShapeRegistry {
    factories: BTreeMap<&'static str, Box<dyn ShapeFactory>>,
}

impl Default for ShapeRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl ShapeRegistry {
    pub fn empty() -> Self {
        Self {
            factories: BTreeMap::new(),
        }
    }

    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        let entries: [(&'static str, &'static str, &'static str, JetSource, BuildFn); 7] = [
            ("line", "real line in C (n = 1)", "line", JetSource::Analytic, build_line),
            (
                "plane",
                "plane diag(e^{i phases})·R^n; n=<1..9>, phases=a|b|..., periodic=true|false",
                "plane:n=2",
                JetSource::Analytic,
                build_plane,
            ),
            ("circle", "round circle in C; r>0", "circle:r=1", JetSource::Analytic, build_circle),
            (
                "product-torus",
                "product of circles in C^n; r1,...,rn > 0",
                "product-torus:r1=1,r2=0.5",
                JetSource::Analytic,
                build_torus,
            ),
            (
                "su-plane",
                "special Lagrangian flat torus M·R^n / 2πZ^n, M in SU(n) from seed; n, seed",
                "su-plane:n=2,seed=42",
                JetSource::Analytic,
                build_su_plane,
            ),
            (
                "gradient-graph",
                "graph of the gradient of phi(u1..un); phi=<expr>, n",
                "gradient-graph:phi=u1^2*u2+u2^3/3,n=2",
                JetSource::FiniteDifference,
                build_gradient_graph,
            ),
            (
                "expr",
                "coordinate expressions; coords=e1|...|e2n, period=p1|...|pn or none, lower, upper",
                "expr:coords=cos(u1)|sin(u1),period=2*pi",
                JetSource::FiniteDifference,
                build_expr,
            ),
        ];
        for (id, summary, example, jets, build) in entries {
            reg.register(Box::new(CatalogEntry {
                id,
                summary,
                example,
                jets,
                build,
            }));
        }
        reg
    }

    pub fn register(&mut self, factory: Box<dyn ShapeFactory>) {
        self.factories.insert(factory.id(), factory);
    }

    pub fn get(&self, id: &str) -> Option<&dyn ShapeFactory> {
        self.factories.get(id).map(|f| f.as_ref())
    }

    pub fn entries(&self) -> impl Iterator<Item = &dyn ShapeFactory> {
        self.factories.values().map(|f| f.as_ref())
    }

    pub fn build(&self, spec: &ShapeSpec, seed: u64) -> Result<Box<dyn Immersion>> {
        let factory = self
            .get(&spec.id)
            .ok_or_else(|| Error::Invalid(format!("unknown shape `{}`", spec.id)))?;
        let imm = factory.build(spec, seed)?;
        if spec.uses_fd_jets()? && imm.jet_source() == JetSource::Analytic {
            let form = imm
                .expression_form()
                .ok_or_else(|| Error::Invalid(format!("shape `{}` has no expression form", spec.id)))?;
            return Ok(Box::new(ExpressionImmersion::new(form)?));
        }
        Ok(imm)
    }

    pub fn build_str(&self, spec: &str, seed: u64) -> Result<Box<dyn Immersion>> {
        self.build(&spec.parse()?, seed)
    }
}
