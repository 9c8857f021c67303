//! Reference computations shared by the integration tests. They are written
//! independently of the library routines they check.
#![allow(dead_code)]

use mmx_core::Point;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// `1 / T_T((M+m)/(M-m))` through `T_n(x) = cosh(n acosh x)` for `x >= 1`.
pub fn rate_by_cosh(t: usize, m: f64, big_m: f64) -> f64 {
    if m == big_m {
        return 0.0;
    }
    let x = (big_m + m) / (big_m - m);
    1.0 / (t as f64 * x.acosh()).cosh()
}

/// Lebedev order by the doubling rule, written recursively.
pub fn lebedev_reference(t: usize) -> Vec<usize> {
    if t == 1 {
        return vec![0];
    }
    let half = lebedev_reference(t / 2);
    let mut out = Vec::with_capacity(t);
    for &i in &half {
        out.push(i);
        out.push(t - 1 - i);
    }
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f_7e57)
}

pub fn gaussian_point(dx: usize, dy: usize, rng: &mut impl Rng) -> Point {
    let x = DVector::from_fn(dx, |_, _| rng.sample(StandardNormal));
    let y = DVector::from_fn(dy, |_, _| rng.sample(StandardNormal));
    Point::new(x, y).unwrap()
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

/// Largest singular value from the eigenvalues of `B^T B`.
pub fn spectral_norm(b: &nalgebra::DMatrix<f64>) -> f64 {
    (b.transpose() * b).symmetric_eigen().eigenvalues.max().max(0.0).sqrt()
}
