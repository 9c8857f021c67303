use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::{BilinearProblem, QuadraticProblem};
use crate::error::{MmxError, Result};
use crate::linalg::{spectral_norm, thin_svd};
use crate::rng::seeded_rng;

/// `B = U (Sigma + I) V^T` where `U Sigma V^T` is the SVD of a `d x d` matrix
/// with i.i.d. `U[0, 1]` entries. Nonzero squared singular values then lie in
/// `[1, M]` with `M = max(big_m, sigma_max^2)`; zero shifts.
pub fn random_bilinear(d: usize, big_m: f64, seed: u64) -> Result<BilinearProblem> {
    if d == 0 {
        return Err(MmxError::domain("dimension must be positive"));
    }
    let mut rng = seeded_rng(seed);
    let raw = DMatrix::from_fn(d, d, |_, _| rng.random::<f64>());
    let svd = thin_svd(&raw);
    let shifted = DVector::from_iterator(svd.s.len(), svd.s.iter().map(|s| s + 1.0));
    let b = &svd.u * DMatrix::from_diagonal(&shifted) * svd.v.transpose();
    let smax = shifted.max();
    BilinearProblem::new(b, DVector::zeros(d), DVector::zeros(d), 1.0, big_m.max(smax * smax))
}

/// `B = diag(diag)` with zero shifts and `[m, M]` taken from the entries.
pub fn diagonal_bilinear(diag: &[f64]) -> Result<BilinearProblem> {
    if diag.is_empty() || diag.iter().any(|v| !(v.is_finite() && *v != 0.0)) {
        return Err(MmxError::InvalidProblem("diagonal entries must be finite and nonzero".into()));
    }
    let sq: Vec<f64> = diag.iter().map(|v| v * v).collect();
    let m = sq.iter().cloned().fold(f64::INFINITY, f64::min);
    let big_m = sq.iter().cloned().fold(0.0, f64::max);
    let n = diag.len();
    BilinearProblem::new(
        DMatrix::from_diagonal(&DVector::from_column_slice(diag)),
        DVector::zeros(n),
        DVector::zeros(n),
        m,
        big_m,
    )
}

fn gaussian(rows: usize, cols: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Random convex-concave quadratic with `A = G G^T`, `C = K K^T` (rank about
/// half the dimension), Gaussian `B` and shifts, scaled so the spectral norm
/// of `H` equals `lipschitz`.
pub fn random_quadratic(dx: usize, dy: usize, lipschitz: f64, seed: u64) -> Result<QuadraticProblem> {
    if dx == 0 || dy == 0 {
        return Err(MmxError::domain("dimensions must be positive"));
    }
    if !(lipschitz > 0.0 && lipschitz.is_finite()) {
        return Err(MmxError::domain("L must be positive"));
    }
    let mut rng = seeded_rng(seed);
    let g = gaussian(dx, (dx / 2).max(1), &mut rng);
    let k = gaussian(dy, (dy / 2).max(1), &mut rng);
    let b = gaussian(dx, dy, &mut rng);
    let xs = DVector::from_fn(dx, |_, _| rng.sample(StandardNormal));
    let ys = DVector::from_fn(dy, |_, _| rng.sample(StandardNormal));
    let a = &g * g.transpose();
    let c = &k * k.transpose();
    let unscaled = QuadraticProblem::new(a.clone(), b.clone(), c.clone(), xs.clone(), ys.clone(), None)?;
    let s = lipschitz / unscaled.computed_lipschitz();
    // keep A and C exactly symmetric after scaling
    let sym = |m: DMatrix<f64>| (&m + m.transpose()) * 0.5;
    QuadraticProblem::new(sym(a * s), b * s, sym(c * s), xs, ys, None)
}

/// `mu`-strongly-convex-strongly-concave quadratic with `L = 1` (`mu = 0`
/// gives a bilinear problem):
/// `A = C = mu I`, Gaussian `B` rescaled so `mu^2 + sigma_max(B)^2 = 1`, and a
/// Gaussian saddle point.
pub fn random_scsc_quadratic(dx: usize, dy: usize, mu: f64, seed: u64) -> Result<QuadraticProblem> {
    if dx == 0 || dy == 0 {
        return Err(MmxError::domain("dimensions must be positive"));
    }
    if !(0.0..1.0).contains(&mu) {
        return Err(MmxError::domain(format!("mu must lie in [0, 1), got {mu}")));
    }
    let mut rng = seeded_rng(seed);
    let b = gaussian(dx, dy, &mut rng);
    let smax = spectral_norm(&b);
    let b = b * ((1.0 - mu * mu).sqrt() / smax);
    let xs = DVector::from_fn(dx, |_, _| rng.sample(StandardNormal));
    let ys = DVector::from_fn(dy, |_, _| rng.sample(StandardNormal));
    QuadraticProblem::new(
        DMatrix::identity(dx, dx) * mu,
        b,
        DMatrix::identity(dy, dy) * mu,
        xs,
        ys,
        Some(1.0),
    )
}
