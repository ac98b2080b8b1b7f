//! Position-dependent Riemannian metrics on `R^{2n}` and their Christoffel
//! symbols.
//!
//! The flat ambient never needs these; they drive parallel transport of
//! Lagrangian planes under curved Kähler test metrics and the mean
//! curvature computed against auxiliary metrics `g_J`.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::symplectic::{ComplexMatrix, RealVector};

/// Central-difference step used for metric derivatives.
pub const CHRISTOFFEL_STEP: f64 = 1e-5;

pub trait MetricField: Send + Sync {
    /// Real dimension `2n` of the ambient.
    fn real_dim(&self) -> usize;

    /// Symmetric positive matrix of the metric at `x`.
    fn matrix_at(&self, x: &RealVector) -> DMatrix<f64>;

    /// Constant metric: Christoffel symbols vanish identically.
    fn is_flat(&self) -> bool {
        false
    }

    fn id(&self) -> String;
}

/// Metric sample at `x`, rejected unless symmetric positive definite.
pub fn checked_matrix(metric: &dyn MetricField, x: &RealVector) -> Result<DMatrix<f64>> {
    let m = metric.matrix_at(x);
    if m.nrows() != x.len() || m.ncols() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: m.nrows(),
        });
    }
    let asym = (&m - m.transpose()).amax();
    if !asym.is_finite() || asym > 1e-10 * m.amax().max(1.0) || m.clone().cholesky().is_none() {
        return Err(Error::MetricNotPositive {
            location: x.iter().copied().collect(),
        });
    }
    Ok(m)
}

/// Real `2n x 2n` form `u, v ↦ Re(z(u)^† H z(v))` of a Hermitian matrix.
/// The result commutes with `J`.
pub fn hermitian_to_real(h: &ComplexMatrix) -> DMatrix<f64> {
    let n = h.nrows();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let Complex { re: a, im: b } = h[(i, j)];
            m[(i, j)] = a;
            m[(n + i, n + j)] = a;
            m[(i, n + j)] = -b;
            m[(n + i, j)] = b;
        }
    }
    m
}

/// The standard flat metric, optionally scaled by a positive constant.
#[derive(Debug, Clone)]
pub struct Euclidean {
    dim: usize,
    scale: f64,
}

impl Euclidean {
    pub fn new(n: usize) -> Self {
        Self::scaled(n, 1.0)
    }

    pub fn scaled(n: usize, scale: f64) -> Self {
        Self { dim: 2 * n, scale }
    }
}

impl MetricField for Euclidean {
    fn real_dim(&self) -> usize {
        self.dim
    }

    fn matrix_at(&self, _x: &RealVector) -> DMatrix<f64> {
        DMatrix::identity(self.dim, self.dim) * self.scale
    }

    fn is_flat(&self) -> bool {
        true
    }

    fn id(&self) -> String {
        if self.scale == 1.0 {
            "flat".into()
        } else {
            format!("flat:scale={}", self.scale)
        }
    }
}

/// Fubini-Study metric on the affine chart `C^n ⊂ CP^n`, times `scale`:
/// `h_jk = scale·(δ_jk/(1+|z|²) − z_j z̄_k/(1+|z|²)²)`. Kähler for the
/// standard `J`. For `n = 1` it is the conformally flat round metric
/// `scale/(1+|z|²)²`.
#[derive(Debug, Clone)]
pub struct FubiniStudy {
    n: usize,
    scale: f64,
}

impl FubiniStudy {
    pub fn new(n: usize, scale: f64) -> Self {
        Self { n, scale }
    }
}

impl MetricField for FubiniStudy {
    fn real_dim(&self) -> usize {
        2 * self.n
    }

    fn matrix_at(&self, x: &RealVector) -> DMatrix<f64> {
        let n = self.n;
        let z: Vec<Complex<f64>> = (0..n).map(|k| Complex::new(x[k], x[n + k])).collect();
        let s: f64 = z.iter().map(|w| w.norm_sqr()).sum();
        let a = 1.0 + s;
        let h = ComplexMatrix::from_fn(n, n, |j, k| {
            let delta = if j == k { 1.0 / a } else { 0.0 };
            (Complex::new(delta, 0.0) - z[j] * z[k].conj() / (a * a)) * self.scale
        });
        hermitian_to_real(&h)
    }

    fn id(&self) -> String {
        format!("fubini-study:scale={}", self.scale)
    }
}

/// Diagonal perturbation of the flat metric: entries on `axes` become
/// `1 + eps·exp(−|x − center|²/(2 width²))`. Not `J`-invariant for
/// `eps ≠ 0`, so it induces a non-standard compatible structure.
#[derive(Debug, Clone)]
pub struct BumpMetric {
    dim: usize,
    eps: f64,
    axes: Vec<usize>,
    center: RealVector,
    width: f64,
}

impl BumpMetric {
    /// Bump on the `x_1` axis centred at `x_1 = 1` with width 0.5.
    pub fn new(n: usize, eps: f64) -> Self {
        let mut center = RealVector::zeros(2 * n);
        center[0] = 1.0;
        Self {
            dim: 2 * n,
            eps,
            axes: vec![0],
            center,
            width: 0.5,
        }
    }

    pub fn with_axes(mut self, axes: Vec<usize>) -> Self {
        self.axes = axes;
        self
    }

    pub fn with_center(mut self, center: RealVector, width: f64) -> Self {
        self.center = center;
        self.width = width;
        self
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
}

impl MetricField for BumpMetric {
    fn real_dim(&self) -> usize {
        self.dim
    }

    fn matrix_at(&self, x: &RealVector) -> DMatrix<f64> {
        let r2 = (x - &self.center).norm_squared();
        let bump = (-r2 / (2.0 * self.width * self.width)).exp();
        let mut m = DMatrix::identity(self.dim, self.dim);
        for &a in &self.axes {
            m[(a, a)] += self.eps * bump;
        }
        m
    }

    fn is_flat(&self) -> bool {
        self.eps == 0.0
    }

    fn id(&self) -> String {
        format!("bump:eps={}", self.eps)
    }
}

/// Metric given by a closure.
pub struct FnMetric<F> {
    dim: usize,
    id: String,
    f: F,
}

impl<F> FnMetric<F>
where
    F: Fn(&RealVector) -> DMatrix<f64> + Send + Sync,
{
    pub fn new(real_dim: usize, id: impl Into<String>, f: F) -> Self {
        Self {
            dim: real_dim,
            id: id.into(),
            f,
        }
    }
}

impl<F> MetricField for FnMetric<F>
where
    F: Fn(&RealVector) -> DMatrix<f64> + Send + Sync,
{
    fn real_dim(&self) -> usize {
        self.dim
    }

    fn matrix_at(&self, x: &RealVector) -> DMatrix<f64> {
        (self.f)(x)
    }

    fn id(&self) -> String {
        self.id.clone()
    }
}

/// Christoffel symbols of the Levi-Civita connection at one point.
#[derive(Debug, Clone)]
pub struct Christoffel {
    metric: DMatrix<f64>,
    /// `∂_l G` for each coordinate `l`; empty for flat metrics.
    derivatives: Vec<DMatrix<f64>>,
}

impl Christoffel {
    pub fn at(metric: &dyn MetricField, x: &RealVector) -> Result<Self> {
        Self::with_step(metric, x, CHRISTOFFEL_STEP)
    }

    pub fn with_step(metric: &dyn MetricField, x: &RealVector, step: f64) -> Result<Self> {
        let g = checked_matrix(metric, x)?;
        if metric.is_flat() {
            return Ok(Self {
                metric: g,
                derivatives: Vec::new(),
            });
        }
        let dim = x.len();
        let derivatives = (0..dim)
            .map(|l| {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[l] += step;
                xm[l] -= step;
                (metric.matrix_at(&xp) - metric.matrix_at(&xm)) / (2.0 * step)
            })
            .collect();
        Ok(Self {
            metric: g,
            derivatives,
        })
    }

    pub fn metric(&self) -> &DMatrix<f64> {
        &self.metric
    }

    /// `Γ(u, v)^k = Γ^k_ij u^i v^j`.
    pub fn contract(&self, u: &RealVector, v: &RealVector) -> RealVector {
        let dim = u.len();
        if self.derivatives.is_empty() {
            return RealVector::zeros(dim);
        }
        let directional = |w: &RealVector| {
            self.derivatives
                .iter()
                .zip(w.iter())
                .fold(DMatrix::zeros(dim, dim), |acc, (d, &c)| acc + d * c)
        };
        let du = directional(u);
        let dv = directional(v);
        let mut lowered = (&du * v + &dv * u) * 0.5;
        for l in 0..dim {
            lowered[l] -= 0.5 * u.dot(&(&self.derivatives[l] * v));
        }
        self.metric
            .clone()
            .cholesky()
            .map(|c| c.solve(&lowered))
            .unwrap_or(lowered)
    }
}
