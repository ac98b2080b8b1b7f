//! Index engines behind a common trait, selectable by name.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::grassmannian::LagrangianFrame;
use crate::immersion::{Immersion, LoopPath};

use super::{index_integral, index_winding};

pub trait IndexEngine: Send + Sync {
    fn name(&self) -> &'static str;

    /// Maslov index of the loop, possibly non-integral for quadrature
    /// engines.
    fn index(&self, imm: &dyn Immersion, lp: &LoopPath, samples: usize) -> Result<f64>;
}

/// Phase winding of `det²` relative to a fixed reference plane.
#[derive(Debug, Clone, Default)]
pub struct WindingEngine {
    reference: Option<LagrangianFrame>,
}

impl WindingEngine {
    pub fn with_reference(reference: LagrangianFrame) -> Self {
        Self {
            reference: Some(reference),
        }
    }
}

impl IndexEngine for WindingEngine {
    fn name(&self) -> &'static str {
        "winding"
    }

    fn index(&self, imm: &dyn Immersion, lp: &LoopPath, samples: usize) -> Result<f64> {
        let reference = match &self.reference {
            Some(r) if r.n() != imm.n() => {
                return Err(Error::DimensionMismatch {
                    expected: imm.n(),
                    actual: r.n(),
                })
            }
            Some(r) => r.clone(),
            None => LagrangianFrame::standard(imm.n()),
        };
        index_winding(imm, lp, samples, &reference).map(|w| w as f64)
    }
}

/// Trapezoid quadrature of `(1/π) ω(H, γ')`.
#[derive(Debug, Clone, Copy, Default)]
pub struct IntegralEngine;

impl IndexEngine for IntegralEngine {
    fn name(&self) -> &'static str {
        "integral"
    }

    fn index(&self, imm: &dyn Immersion, lp: &LoopPath, samples: usize) -> Result<f64> {
        index_integral(imm, lp, samples)
    }
}

#[derive(Default)]
pub struct EngineRegistry {
    engines: BTreeMap<&'static str, Box<dyn IndexEngine>>,
}

impl EngineRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(WindingEngine::default()));
        r.register(Box::new(IntegralEngine));
        r
    }

    pub fn register(&mut self, engine: Box<dyn IndexEngine>) {
        self.engines.insert(engine.name(), engine);
    }

    pub fn get(&self, name: &str) -> Result<&dyn IndexEngine> {
        self.engines.get(name).map(|e| e.as_ref()).ok_or_else(|| {
            Error::Invalid(format!(
                "unknown index engine `{name}` (known: {})",
                self.names().join(", ")
            ))
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.engines.keys().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::immersion::Circle;

    #[test]
    fn builtin_engines_agree_on_circle() {
        let reg = EngineRegistry::builtin();
        assert_eq!(reg.names(), vec!["integral", "winding"]);
        let c = Circle::new(1.0).unwrap();
        let lp = LoopPath::full(c.domain()).unwrap();
        let w = reg.get("winding").unwrap().index(&c, &lp, 64).unwrap();
        let i = reg.get("integral").unwrap().index(&c, &lp, 64).unwrap();
        assert_eq!(w, 2.0);
        assert!((i - 2.0).abs() < 1e-10);
        assert!(reg.get("simpson").is_err());
    }
}
