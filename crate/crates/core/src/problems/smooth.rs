use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use super::Problem;
use crate::error::{MmxError, Result};
use crate::point::Point;

type GradFn = dyn Fn(&Point) -> Point + Send + Sync;
type ValueFn = dyn Fn(&Point) -> f64 + Send + Sync;
type HvpFn = dyn Fn(&Point, &Point) -> Point + Send + Sync;
type SaddleFn = dyn Fn(&Point) -> Point + Send + Sync;

/// A smooth convex-concave problem given by closed-form oracles.
///
/// ```
/// use mmx_core::problems::{Problem, SmoothCCProblem};
/// use mmx_core::Point;
///
/// // f(x, y) = x y on R x R
/// let p = SmoothCCProblem::new(1, 1, 1.0, |z: &Point| Point::scalar(z.y()[0], z.x()[0]))
///     .unwrap()
///     .with_value(|z: &Point| z.x()[0] * z.y()[0]);
/// assert_eq!(p.value(&Point::scalar(2.0, 3.0)).unwrap(), 6.0);
/// ```
#[derive(Clone)]
pub struct SmoothCCProblem {
    name: String,
    dims: (usize, usize),
    lipschitz: f64,
    mu: f64,
    grad: Arc<GradFn>,
    value: Option<Arc<ValueFn>>,
    hvp: Option<Arc<HvpFn>>,
    saddle: Option<Arc<SaddleFn>>,
}

impl SmoothCCProblem {
    pub fn new(
        dx: usize,
        dy: usize,
        lipschitz: f64,
        grad: impl Fn(&Point) -> Point + Send + Sync + 'static,
    ) -> Result<Self> {
        if dx == 0 || dy == 0 {
            return Err(MmxError::InvalidProblem("dimensions must be positive".into()));
        }
        if !(lipschitz > 0.0 && lipschitz.is_finite()) {
            return Err(MmxError::domain(format!("L must be positive, got {lipschitz}")));
        }
        Ok(Self {
            name: "smooth".into(),
            dims: (dx, dy),
            lipschitz,
            mu: 0.0,
            grad: Arc::new(grad),
            value: None,
            hvp: None,
            saddle: None,
        })
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_value(mut self, f: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Self {
        self.value = Some(Arc::new(f));
        self
    }

    pub fn with_hessian_vec(
        mut self,
        f: impl Fn(&Point, &Point) -> Point + Send + Sync + 'static,
    ) -> Self {
        self.hvp = Some(Arc::new(f));
        self
    }

    pub fn with_strong_convexity(mut self, mu: f64) -> Result<Self> {
        if !(0.0..=self.lipschitz).contains(&mu) {
            return Err(MmxError::domain(format!("mu must lie in [0, L], got {mu}")));
        }
        self.mu = mu;
        Ok(self)
    }

    /// A single known saddle point.
    pub fn with_saddle(mut self, saddle: Point) -> Result<Self> {
        if saddle.dims() != self.dims {
            return Err(MmxError::Dimension {
                expected: format!("{:?}", self.dims),
                got: format!("{:?}", saddle.dims()),
            });
        }
        self.saddle = Some(Arc::new(move |_| saddle.clone()));
        Ok(self)
    }

    /// A map sending a start point to the saddle its distance is measured to.
    pub fn with_saddle_map(mut self, f: impl Fn(&Point) -> Point + Send + Sync + 'static) -> Self {
        self.saddle = Some(Arc::new(f));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for SmoothCCProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothCCProblem")
            .field("name", &self.name)
            .field("dims", &self.dims)
            .field("lipschitz", &self.lipschitz)
            .field("mu", &self.mu)
            .field("has_value", &self.value.is_some())
            .field("has_hvp", &self.hvp.is_some())
            .finish()
    }
}

impl Problem for SmoothCCProblem {
    fn dims(&self) -> (usize, usize) {
        self.dims
    }

    fn eval_grad(&self, z: &Point) -> Point {
        (self.grad)(z)
    }

    fn eval_value(&self, z: &Point) -> Option<f64> {
        self.value.as_ref().map(|f| f(z))
    }

    fn eval_hessian_vec(&self, z: &Point, v: &Point) -> Option<Point> {
        self.hvp.as_ref().map(|f| f(z, v))
    }

    fn smoothness(&self) -> f64 {
        self.lipschitz
    }

    fn strong_convexity(&self) -> f64 {
        self.mu
    }

    fn saddle_for(&self, z0: &Point) -> Option<Point> {
        self.saddle.as_ref().map(|f| f(z0))
    }
}

fn huber(x: f64) -> f64 {
    if x.abs() <= 1.0 {
        0.5 * x * x
    } else {
        x.abs() - 0.5
    }
}

/// `f(x, y) = huber(x)` on `R x R` (`y` is inert). Convex-concave with
/// `L = 1`; every `(0, y)` is a saddle.
pub fn make_huber_coupling() -> SmoothCCProblem {
    SmoothCCProblem::new(1, 1, 1.0, |z: &Point| {
        Point::scalar(z.x()[0].clamp(-1.0, 1.0), 0.0)
    })
    .expect("valid constants")
    .named("huber")
    .with_value(|z: &Point| huber(z.x()[0]))
    .with_hessian_vec(|z: &Point, v: &Point| {
        let curv = if z.x()[0].abs() <= 1.0 { 1.0 } else { 0.0 };
        Point::scalar(curv * v.x()[0], 0.0)
    })
    .with_saddle_map(|z0: &Point| Point::scalar(0.0, z0.y()[0]))
}

fn log_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// `f(x, y) = log cosh(x)` on `R x R`, a nonlinear-gradient instance with
/// `L = 1` and saddles `(0, y)`.
pub fn make_log_cosh() -> SmoothCCProblem {
    SmoothCCProblem::new(1, 1, 1.0, |z: &Point| Point::scalar(z.x()[0].tanh(), 0.0))
        .expect("valid constants")
        .named("log_cosh")
        .with_value(|z: &Point| log_cosh(z.x()[0]))
        .with_hessian_vec(|z: &Point, v: &Point| {
            let t = z.x()[0].tanh();
            Point::scalar((1.0 - t * t) * v.x()[0], 0.0)
        })
        .with_saddle_map(|z0: &Point| {
            Point::from_parts(DVector::zeros(1), z0.y().clone())
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn huber_pieces() {
        let p = make_huber_coupling();
        assert_eq!(p.grad(&Point::scalar(0.5, 7.0)).unwrap().x()[0], 0.5);
        assert_eq!(p.grad(&Point::scalar(-3.0, 7.0)).unwrap().x()[0], -1.0);
        assert_eq!(p.value(&Point::scalar(3.0, 0.0)).unwrap(), 2.5);
        assert_eq!(p.saddle_for(&Point::scalar(3.0, 2.0)).unwrap().y()[0], 2.0);
    }

    #[test]
    fn log_cosh_is_stable_for_large_arguments() {
        let p = make_log_cosh();
        let v = p.value(&Point::scalar(800.0, 0.0)).unwrap();
        assert!((v - (800.0 - std::f64::consts::LN_2)).abs() < 1e-12);
        assert!((p.value(&Point::scalar(0.3, 0.0)).unwrap() - 0.3f64.cosh().ln()).abs() < 1e-15);
    }

    #[test]
    fn builder_validation() {
        assert!(SmoothCCProblem::new(0, 1, 1.0, |z: &Point| z.clone()).is_err());
        assert!(SmoothCCProblem::new(1, 1, -1.0, |z: &Point| z.clone()).is_err());
        let p = SmoothCCProblem::new(1, 1, 1.0, |z: &Point| z.clone()).unwrap();
        assert!(p.clone().with_strong_convexity(2.0).is_err());
        assert!(p.with_saddle(Point::zeros(2, 1)).is_err());
    }
}
