//! Catalog shapes with analytic jets, and expression-defined immersions
//! with finite-difference jets.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::expr::{Expr, Scope};
use crate::immersion::{Domain, Immersion, Jet, JetSource};
use crate::random;
use crate::symplectic::{from_complex, AmbientSpace, ComplexMatrix, ComplexVector, RealVector};

/// Coordinate expressions (variables `u1..un`) plus parameters and domain.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpressionShape {
    pub coords: Vec<String>,
    pub params: Vec<(String, f64)>,
    pub domain: Domain,
}

fn zero_second(n: usize) -> Vec<RealVector> {
    vec![RealVector::zeros(2 * n); n * n]
}

/// The real line `u ↦ (u, 0)` in `C`.
#[derive(Debug, Clone)]
pub struct Line {
    domain: Domain,
}

impl Line {
    pub fn new() -> Self {
        Self {
            domain: Domain::unit_box(1),
        }
    }
}

impl Default for Line {
    fn default() -> Self {
        Self::new()
    }
}

impl Immersion for Line {
    fn n(&self) -> usize {
        1
    }

    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn jet(&self, u: &[f64]) -> Result<Jet> {
        Ok(Jet {
            point: RealVector::from_column_slice(&[u[0], 0.0]),
            first: DMatrix::from_column_slice(2, 1, &[1.0, 0.0]),
            second: zero_second(1),
        })
    }

    fn expression_form(&self) -> Option<ExpressionShape> {
        Some(ExpressionShape {
            coords: vec!["u1".into(), "0".into()],
            params: vec![],
            domain: self.domain.clone(),
        })
    }
}

/// The Lagrangian plane `A·R^n` for unitary `A`, parametrized linearly.
#[derive(Debug, Clone)]
pub struct LinearPlane {
    a: ComplexMatrix,
    domain: Domain,
}

impl LinearPlane {
    pub fn new(a: ComplexMatrix, domain: Domain) -> Result<Self> {
        let n = a.nrows();
        if !a.is_square() || domain.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: domain.dim(),
            });
        }
        let defect = (a.adjoint() * &a - ComplexMatrix::identity(n, n))
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        if defect > 1e-10 {
            return Err(Error::Invariant {
                invariant: "unitary",
                residual: defect,
                tolerance: 1e-10,
            });
        }
        Ok(Self { a, domain })
    }

    /// Plane `diag(e^{iφ_k})·R^n`.
    pub fn with_phases(phases: &[f64], domain: Domain) -> Result<Self> {
        let n = phases.len();
        let a = ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex::from_polar(1.0, phases[i])
            } else {
                Complex::new(0.0, 0.0)
            }
        });
        Self::new(a, domain)
    }

    /// `M·R^n` for a seeded random `M ∈ SU(n)`, on the flat torus
    /// `[0, 2π)^n`: a special Lagrangian torus.
    pub fn special(n: usize, seed: u64) -> Result<Self> {
        let mut rng = random::rng(seed);
        Self::new(random::special_unitary(&mut rng, n), Domain::torus(n))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.a
    }
}

impl Immersion for LinearPlane {
    fn n(&self) -> usize {
        self.a.nrows()
    }

    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn jet(&self, u: &[f64]) -> Result<Jet> {
        let n = self.n();
        let uc = ComplexVector::from_fn(n, |k, _| Complex::new(u[k], 0.0));
        let columns: Vec<RealVector> = (0..n)
            .map(|a| from_complex(&self.a.column(a).into_owned()))
            .collect();
        Ok(Jet {
            point: from_complex(&(&self.a * uc)),
            first: DMatrix::from_columns(&columns),
            second: zero_second(n),
        })
    }

    /// Periodic parameter axes close up in the torus with lattice
    /// `2π·A e_k`, `2π·iA e_k`.
    fn ambient(&self) -> AmbientSpace {
        let n = self.n();
        if self.domain.periodic_axes().len() != n {
            return AmbientSpace::new(n).expect("positive dimension");
        }
        let mut periods = Vec::with_capacity(2 * n);
        for scale in [Complex::new(1.0, 0.0), Complex::new(0.0, 1.0)] {
            for k in 0..n {
                let p = self.domain.period(k).unwrap_or(std::f64::consts::TAU);
                let col = self.a.column(k).into_owned() * scale * Complex::new(p, 0.0);
                periods.push(from_complex(&col));
            }
        }
        AmbientSpace::torus(n, periods).expect("unitary columns are independent")
    }

    fn expression_form(&self) -> Option<ExpressionShape> {
        let n = self.n();
        let row = |k: usize, part: fn(&Complex<f64>) -> f64| {
            let terms: Vec<String> = (0..n)
                .map(|a| format!("({:?}) * u{}", part(&self.a[(k, a)]), a + 1))
                .collect();
            terms.join(" + ")
        };
        let mut coords: Vec<String> = (0..n).map(|k| row(k, |c| c.re)).collect();
        coords.extend((0..n).map(|k| row(k, |c| c.im)));
        Some(ExpressionShape {
            coords,
            params: vec![],
            domain: self.domain.clone(),
        })
    }
}

/// Round circle of radius `r` in `C`.
#[derive(Debug, Clone)]
pub struct Circle {
    r: f64,
    domain: Domain,
}

impl Circle {
    pub fn new(r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::Invalid(format!("circle radius must be positive, got {r}")));
        }
        Ok(Self {
            r,
            domain: Domain::torus(1),
        })
    }
}

impl Immersion for Circle {
    fn n(&self) -> usize {
        1
    }

    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn jet(&self, u: &[f64]) -> Result<Jet> {
        let (s, c) = u[0].sin_cos();
        let r = self.r;
        Ok(Jet {
            point: RealVector::from_column_slice(&[r * c, r * s]),
            first: DMatrix::from_column_slice(2, 1, &[-r * s, r * c]),
            second: vec![RealVector::from_column_slice(&[-r * c, -r * s])],
        })
    }

    fn expression_form(&self) -> Option<ExpressionShape> {
        Some(ExpressionShape {
            coords: vec!["r * cos(u1)".into(), "r * sin(u1)".into()],
            params: vec![("r".into(), self.r)],
            domain: self.domain.clone(),
        })
    }
}

/// Product of round circles `S¹(r_1) × ... × S¹(r_n) ⊂ C^n`.
#[derive(Debug, Clone)]
pub struct ProductTorus {
    radii: Vec<f64>,
    domain: Domain,
}

impl ProductTorus {
    pub fn new(radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::Invalid("product torus needs at least one radius".into()));
        }
        if let Some(r) = radii.iter().find(|r| !(**r > 0.0)) {
            return Err(Error::Invalid(format!("torus radii must be positive, got {r}")));
        }
        let n = radii.len();
        Ok(Self {
            radii,
            domain: Domain::torus(n),
        })
    }
}

impl Immersion for ProductTorus {
    fn n(&self) -> usize {
        self.radii.len()
    }

    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn jet(&self, u: &[f64]) -> Result<Jet> {
        let n = self.n();
        let mut point = RealVector::zeros(2 * n);
        let mut first = DMatrix::zeros(2 * n, n);
        let mut second = zero_second(n);
        for (k, &r) in self.radii.iter().enumerate() {
            let (s, c) = u[k].sin_cos();
            point[k] = r * c;
            point[n + k] = r * s;
            first[(k, k)] = -r * s;
            first[(n + k, k)] = r * c;
            second[k * n + k][k] = -r * c;
            second[k * n + k][n + k] = -r * s;
        }
        Ok(Jet {
            point,
            first,
            second,
        })
    }

    fn expression_form(&self) -> Option<ExpressionShape> {
        let n = self.n();
        let mut coords: Vec<String> = (1..=n).map(|k| format!("r{k} * cos(u{k})")).collect();
        coords.extend((1..=n).map(|k| format!("r{k} * sin(u{k})")));
        Some(ExpressionShape {
            coords,
            params: self
                .radii
                .iter()
                .enumerate()
                .map(|(k, &r)| (format!("r{}", k + 1), r))
                .collect(),
            domain: self.domain.clone(),
        })
    }
}

/// Central-difference step for first derivatives.
fn first_step(u: f64) -> f64 {
    1e-5 * u.abs().max(1.0)
}

/// Step for nested second differences.
fn second_step(u: f64) -> f64 {
    1e-4 * u.abs().max(1.0)
}

/// Immersion given by one expression per ambient coordinate, jets by
/// central differences.
#[derive(Debug, Clone)]
pub struct ExpressionImmersion {
    coords: Vec<Expr>,
    shape: ExpressionShape,
}

impl ExpressionImmersion {
    pub fn new(shape: ExpressionShape) -> Result<Self> {
        let n = shape.domain.dim();
        if n == 0 || shape.coords.len() != 2 * n {
            return Err(Error::Invalid(format!(
                "expected {} coordinate expressions for a {}-dimensional domain, got {}",
                2 * n,
                n,
                shape.coords.len()
            )));
        }
        let scope = shape
            .params
            .iter()
            .fold(Scope::coordinates(n), |s, (k, v)| s.with_param(k.clone(), *v));
        let coords = shape
            .coords
            .iter()
            .map(|src| Expr::parse(src, &scope))
            .collect::<std::result::Result<_, _>>()?;
        Ok(Self { coords, shape })
    }

    /// The graph `u ↦ (u, ∇φ(u))` of a gradient, Lagrangian for any `φ`.
    /// The gradient is taken symbolically; jets are still finite
    /// differences.
    pub fn gradient_graph(phi: &str, n: usize, params: Vec<(String, f64)>, domain: Domain) -> Result<Self> {
        if domain.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: domain.dim(),
            });
        }
        let scope = params
            .iter()
            .fold(Scope::coordinates(n), |s, (k, v)| s.with_param(k.clone(), *v));
        let potential = Expr::parse(phi, &scope)?;
        let mut coords: Vec<String> = (1..=n).map(|k| format!("u{k}")).collect();
        coords.extend((0..n).map(|k| potential.derivative(k).to_string()));
        Self::new(ExpressionShape {
            coords,
            params,
            domain,
        })
    }

    pub fn shape(&self) -> &ExpressionShape {
        &self.shape
    }

    fn position(&self, u: &[f64]) -> Result<RealVector> {
        let values = self
            .coords
            .iter()
            .map(|e| e.eval(u))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(RealVector::from_vec(values))
    }

    fn shifted(&self, u: &[f64], shifts: &[(usize, f64)]) -> Result<RealVector> {
        let mut v = u.to_vec();
        for &(axis, h) in shifts {
            v[axis] += h;
        }
        self.position(&v)
    }
}

impl Immersion for ExpressionImmersion {
    fn n(&self) -> usize {
        self.shape.domain.dim()
    }

    fn domain(&self) -> &Domain {
        &self.shape.domain
    }

    fn jet_source(&self) -> JetSource {
        JetSource::FiniteDifference
    }

    fn jet(&self, u: &[f64]) -> Result<Jet> {
        let n = self.n();
        let point = self.position(u)?;
        let mut first = DMatrix::zeros(2 * n, n);
        for a in 0..n {
            let h = first_step(u[a]);
            let d = (self.shifted(u, &[(a, h)])? - self.shifted(u, &[(a, -h)])?) / (2.0 * h);
            first.set_column(a, &d);
        }
        let mut second = zero_second(n);
        for a in 0..n {
            let ka = second_step(u[a]);
            let aa = (self.shifted(u, &[(a, ka)])? - &point * 2.0 + self.shifted(u, &[(a, -ka)])?)
                / (ka * ka);
            second[a * n + a] = aa;
            for b in a + 1..n {
                let kb = second_step(u[b]);
                let ab = (self.shifted(u, &[(a, ka), (b, kb)])?
                    - self.shifted(u, &[(a, ka), (b, -kb)])?
                    - self.shifted(u, &[(a, -ka), (b, kb)])?
                    + self.shifted(u, &[(a, -ka), (b, -kb)])?)
                    / (4.0 * ka * kb);
                second[a * n + b] = ab.clone();
                second[b * n + a] = ab;
            }
        }
        Ok(Jet {
            point,
            first,
            second,
        })
    }

    fn expression_form(&self) -> Option<ExpressionShape> {
        Some(self.shape.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::immersion::{check_lagrangian, checked_jet};

    #[test]
    fn circle_jets_match_expression_jets() {
        let c = Circle::new(1.5).unwrap();
        let e = ExpressionImmersion::new(c.expression_form().unwrap()).unwrap();
        for &t in &[0.0, 0.8, 3.0, 5.9] {
            let a = c.jet(&[t]).unwrap();
            let b = e.jet(&[t]).unwrap();
            assert!((&a.point - &b.point).amax() < 1e-14);
            assert!((&a.first - &b.first).amax() < 1e-9);
            assert!((a.dd(0, 0) - b.dd(0, 0)).amax() < 1e-6);
        }
    }

    #[test]
    fn torus_jets_match_expression_jets() {
        let t = ProductTorus::new(vec![1.0, 0.5, 2.0]).unwrap();
        let e = ExpressionImmersion::new(t.expression_form().unwrap()).unwrap();
        let u = [0.3, 2.0, 4.4];
        let a = t.jet(&u).unwrap();
        let b = e.jet(&u).unwrap();
        assert!((&a.first - &b.first).amax() < 1e-9);
        for (x, y) in a.second.iter().zip(&b.second) {
            assert!((x - y).amax() < 1e-6);
        }
    }

    #[test]
    fn plane_expression_form_reproduces_map() {
        let p = LinearPlane::special(2, 42).unwrap();
        let e = ExpressionImmersion::new(p.expression_form().unwrap()).unwrap();
        let u = [0.7, -1.1];
        let a = p.jet(&u).unwrap();
        let b = e.jet(&u).unwrap();
        assert!((&a.point - &b.point).amax() < 1e-14);
        assert!((&a.first - &b.first).amax() < 1e-9);
    }

    #[test]
    fn gradient_graph_is_lagrangian() {
        let g = ExpressionImmersion::gradient_graph(
            "u1^2 * u2 + sin(a * u2) + exp(u1) / 3",
            2,
            vec![("a".into(), 1.7)],
            Domain::unit_box(2),
        )
        .unwrap();
        let residual = check_lagrangian(&g, &g.domain().grid(6)).unwrap();
        assert!(residual <= 1e-5, "{residual:e}");
    }

    #[test]
    fn constructor_validation() {
        assert!(Circle::new(0.0).is_err());
        assert!(ProductTorus::new(vec![1.0, -2.0]).is_err());
        assert!(ProductTorus::new(vec![]).is_err());
        let not_unitary = ComplexMatrix::identity(2, 2) * Complex::new(2.0, 0.0);
        assert!(LinearPlane::new(not_unitary, Domain::unit_box(2)).is_err());
        let bad = ExpressionShape {
            coords: vec!["u1".into()],
            params: vec![],
            domain: Domain::unit_box(1),
        };
        assert!(ExpressionImmersion::new(bad).is_err());
    }

    #[test]
    fn rank_deficiency_is_reported_with_location() {
        // u ↦ (u², 0) is singular at the origin
        let shape = ExpressionShape {
            coords: vec!["u1^2".into(), "0".into()],
            params: vec![],
            domain: Domain::unit_box(1),
        };
        let e = ExpressionImmersion::new(shape).unwrap();
        match checked_jet(&e, &[0.0]) {
            Err(Error::RankDeficient { location, .. }) => assert_eq!(location, vec![0.0]),
            other => panic!("expected rank failure, got {other:?}"),
        }
    }

    #[test]
    fn special_plane_lives_on_a_torus() {
        let p = LinearPlane::special(2, 3).unwrap();
        let ambient = p.ambient();
        assert_eq!(ambient.periods().map(|p| p.len()), Some(4));
    }
}
