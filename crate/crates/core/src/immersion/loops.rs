//! Closed loops in the parameter domain, `c: [0, 1] → domain`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::{Expr, Scope};
use crate::immersion::Domain;

type LoopFn = dyn Fn(f64) -> (Vec<f64>, Vec<f64>) + Send + Sync;

/// Tolerance on `c(1) − c(0)` modulo periods.
pub const CLOSURE_TOL: f64 = 1e-9;

/// A parametrized loop with its derivative `c'(t)`.
#[derive(Clone)]
pub struct LoopPath {
    name: String,
    eval: Arc<LoopFn>,
}

impl std::fmt::Debug for LoopPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LoopPath").field("name", &self.name).finish()
    }
}

impl LoopPath {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(f64) -> (Vec<f64>, Vec<f64>) + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
        }
    }

    /// `t ↦ base + t·P·e_axis` for the periodic `axis` (zero-based).
    pub fn generator(domain: &Domain, axis: usize) -> Result<Self> {
        if axis >= domain.dim() {
            return Err(Error::Invalid(format!(
                "generator axis {} out of range for a {}-dimensional domain",
                axis + 1,
                domain.dim()
            )));
        }
        let period = domain
            .period(axis)
            .ok_or_else(|| Error::Invalid(format!("axis {} is not periodic", axis + 1)))?;
        let base = domain.base_point();
        let n = domain.dim();
        Ok(Self::new(format!("gen:{}", axis + 1), move |t| {
            let mut c = base.clone();
            c[axis] += t * period;
            let mut dc = vec![0.0; n];
            dc[axis] = period;
            (c, dc)
        }))
    }

    /// The whole parameter circle of a curve.
    pub fn full(domain: &Domain) -> Result<Self> {
        if domain.dim() != 1 {
            return Err(Error::Invalid("`full` loops need a one-dimensional domain".into()));
        }
        let mut l = Self::generator(domain, 0)?;
        l.name = "full".into();
        Ok(l)
    }

    /// Loop given by one expression in `t` per parameter axis; the
    /// derivative is taken symbolically.
    pub fn from_expressions(name: impl Into<String>, sources: &[String], scope: &Scope) -> Result<Self> {
        let exprs: Vec<Expr> = sources
            .iter()
            .map(|s| Expr::parse(s, scope))
            .collect::<std::result::Result<_, _>>()?;
        let derivs: Vec<Expr> = exprs.iter().map(|e| e.derivative(0)).collect();
        // validate once so evaluation below cannot fail at t = 0, 1
        for e in exprs.iter().chain(&derivs) {
            e.eval(&[0.0])?;
            e.eval(&[1.0])?;
        }
        Ok(Self::new(name, move |t| {
            let vals = |es: &[Expr]| es.iter().map(|e| e.eval(&[t]).unwrap_or(f64::NAN)).collect();
            (vals(&exprs), vals(&derivs))
        }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        (self.eval)(t)
    }

    /// Same loop traversed backwards.
    pub fn reversed(&self) -> Self {
        let inner = Arc::clone(&self.eval);
        Self::new(format!("rev:{}", self.name), move |t| {
            let (c, dc) = inner(1.0 - t);
            (c, dc.into_iter().map(|x| -x).collect())
        })
    }

    /// Closure in the quotient by the domain periods.
    pub fn validate(&self, domain: &Domain) -> Result<()> {
        let (c0, _) = self.eval(0.0);
        let (c1, _) = self.eval(1.0);
        if c0.len() != domain.dim() || c1.len() != domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: domain.dim(),
                actual: c0.len(),
            });
        }
        for axis in 0..domain.dim() {
            let gap = c1[axis] - c0[axis];
            let defect = match domain.period(axis) {
                Some(p) => (gap - p * (gap / p).round()).abs(),
                None => gap.abs(),
            };
            if !(defect <= CLOSURE_TOL) {
                return Err(Error::OpenLoop { axis, defect });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_is_closed() {
        let d = Domain::torus(2);
        let g = LoopPath::generator(&d, 1).unwrap();
        g.validate(&d).unwrap();
        let (c, dc) = g.eval(0.5);
        assert_eq!(c, vec![0.0, std::f64::consts::PI]);
        assert_eq!(dc, vec![0.0, std::f64::consts::TAU]);
        assert_eq!(g.name(), "gen:2");
        assert!(LoopPath::generator(&Domain::unit_box(2), 0).is_err());
        assert!(LoopPath::generator(&d, 2).is_err());
    }

    #[test]
    fn expression_loop_and_reverse() {
        let d = Domain::unit_box(2);
        let srcs = vec!["0.5*cos(2*pi*t)".to_string(), "0.5*sin(2*pi*t)".to_string()];
        let l = LoopPath::from_expressions("circle", &srcs, &Scope::loop_parameter()).unwrap();
        l.validate(&d).unwrap();
        let (_, dc) = l.eval(0.0);
        assert!((dc[1] - std::f64::consts::PI).abs() < 1e-12);
        let r = l.reversed();
        let (c, dr) = r.eval(0.25);
        let (c2, d2) = l.eval(0.75);
        assert_eq!(c, c2);
        assert_eq!(dr[0], -d2[0]);
    }

    #[test]
    fn open_loop_is_rejected() {
        let d = Domain::unit_box(1);
        let l = LoopPath::from_expressions("open", &["t".to_string()], &Scope::loop_parameter()).unwrap();
        assert!(matches!(l.validate(&d), Err(Error::OpenLoop { axis: 0, .. })));
        // on a periodic axis a full period closes the loop
        let d = Domain::new(vec![0.0], vec![1.0], vec![true]).unwrap();
        l.validate(&d).unwrap();
    }
}
