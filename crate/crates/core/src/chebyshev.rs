//! Chebyshev polynomials, their roots on shifted intervals, the extremal
//! rates of the bilinear and quadratic polynomial problems, and the Lebedev
//! ordering of roots.

use std::f64::consts::PI;

use crate::error::{MmxError, Result};

/// `T_n(x)` by the three-term recurrence.
///
/// ```
/// use mmx_core::chebyshev::cheb_eval;
/// assert!((cheb_eval(3, 0.5) + 1.0).abs() < 1e-15);
/// assert_eq!(cheb_eval(0, 42.0), 1.0);
/// ```
pub fn cheb_eval(n: usize, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut prev, mut cur) = (1.0, x);
            for _ in 1..n {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Shifted Chebyshev polynomial `T_n^{[a,b]}(x) = T_n((2x - a - b)/(b - a))`.
pub fn cheb_eval_shifted(n: usize, a: f64, b: f64, x: f64) -> f64 {
    cheb_eval(n, (2.0 * x - a - b) / (b - a))
}

/// Roots `r_t = (a+b)/2 + (b-a)/2 cos((2t+1) pi / (2T))` for `t = 0..T`, in
/// that (strictly decreasing) canonical order.
pub fn cheb_roots_shifted(t: usize, a: f64, b: f64) -> Result<Vec<f64>> {
    if t == 0 {
        return Err(MmxError::domain("number of roots must be at least 1"));
    }
    if !(a <= b) || !a.is_finite() || !b.is_finite() {
        return Err(MmxError::domain(format!("need a <= b, got [{a}, {b}]")));
    }
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    Ok((0..t)
        .map(|i| mid + half * ((2 * i + 1) as f64 * PI / (2 * t) as f64).cos())
        .collect())
}

/// The `2T` nonzero roots `rho_t = L cos((2t+1) pi / (4T+2))` of
/// `T_{2T+1}^{[-L, L]}`, for `t` in `{0..=2T} \ {T}` in increasing `t`.
/// Entry `t` and entry `2T - 1 - t` are negatives of each other.
pub fn quadratic_roots(t: usize, l: f64) -> Result<Vec<f64>> {
    if t == 0 {
        return Err(MmxError::domain("T must be at least 1"));
    }
    if !(l > 0.0 && l.is_finite()) {
        return Err(MmxError::domain(format!("L must be positive, got {l}")));
    }
    let denom = (4 * t + 2) as f64;
    let half: Vec<f64> = (0..t)
        .map(|i| l * ((2 * i + 1) as f64 * PI / denom).cos())
        .collect();
    // rho_{2T-t} = -rho_t; build the negative half from the positive one so
    // the pairing is exact in floating point
    Ok(half.iter().cloned().chain(half.iter().rev().map(|r| -r)).collect())
}

fn check_spectrum(t: usize, m: f64, big_m: f64) -> Result<()> {
    if t == 0 {
        return Err(MmxError::domain("T must be at least 1"));
    }
    if !(m > 0.0) || !(m <= big_m) || !big_m.is_finite() {
        return Err(MmxError::domain(format!("need 0 < m <= M, got m = {m}, M = {big_m}")));
    }
    Ok(())
}

/// Optimal worst-case rate `R_T` over `[m, M]`,
/// `2 q^T / (1 + q^{2T})` with `q = (sqrt(kappa) - 1)/(sqrt(kappa) + 1)`.
///
/// ```
/// use mmx_core::chebyshev::extremal_rate_bilinear;
/// let kappa: f64 = 10.0;
/// let r1 = extremal_rate_bilinear(1, 1.0, kappa).unwrap();
/// assert!((r1 - (kappa - 1.0) / (kappa + 1.0)).abs() < 1e-15);
/// ```
pub fn extremal_rate_bilinear(t: usize, m: f64, big_m: f64) -> Result<f64> {
    check_spectrum(t, m, big_m)?;
    let s = (big_m / m).sqrt();
    let q = (s - 1.0) / (s + 1.0);
    if q == 0.0 {
        return Ok(0.0);
    }
    let qt = (t as f64 * q.ln()).exp();
    Ok(2.0 * qt / (1.0 + qt * qt))
}

/// `1 / |T_T^{[m,M]}(0)|` evaluated by the recurrence; an independent route
/// to [`extremal_rate_bilinear`]. Underflows to 0 once `T_T(0)` overflows.
pub fn extremal_rate_bilinear_via_chebyshev(t: usize, m: f64, big_m: f64) -> Result<f64> {
    check_spectrum(t, m, big_m)?;
    if m == big_m {
        return Ok(0.0);
    }
    Ok(1.0 / cheb_eval_shifted(t, m, big_m, 0.0).abs())
}

/// `L / (2T + 1)`.
pub fn extremal_rate_quadratic(t: usize, l: f64) -> Result<f64> {
    if t == 0 {
        return Err(MmxError::domain("T must be at least 1"));
    }
    if !(l > 0.0) {
        return Err(MmxError::domain(format!("L must be positive, got {l}")));
    }
    Ok(l / (2 * t + 1) as f64)
}

/// `lambda^k * prod_t (1 - lambda / r_t)` for a list of inverse roots `r_t`.
///
/// With `k = 0` this is the residual polynomial of a schedule and `p(0) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedPolynomial {
    pub inverse_roots: Vec<f64>,
    pub lambda_power: u32,
}

impl InducedPolynomial {
    pub fn new(inverse_roots: Vec<f64>) -> Self {
        Self { inverse_roots, lambda_power: 0 }
    }

    /// Multiplies by `lambda` (used for gradient-norm bounds).
    pub fn times_lambda(mut self) -> Self {
        self.lambda_power += 1;
        self
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        let base = self.inverse_roots.iter().fold(1.0, |acc, r| acc * (1.0 - lambda / r));
        base * lambda.powi(self.lambda_power as i32)
    }
}

/// Maximum of `|p|` on `[a, b]`: best point of a uniform grid (endpoints
/// included), then a golden-section refinement on the bracket around it.
/// Returns `(lambda*, |p(lambda*)|)`.
///
/// ```
/// use mmx_core::chebyshev::{induced_polynomial_max, InducedPolynomial};
/// let p = InducedPolynomial::new(vec![1.0]);
/// let (at, val) = induced_polynomial_max(&p, 2.0, 3.0, 101).unwrap();
/// assert_eq!((at, val), (3.0, 2.0));
/// ```
pub fn induced_polynomial_max(p: &InducedPolynomial, a: f64, b: f64, grid: usize) -> Result<(f64, f64)> {
    if grid < 2 {
        return Err(MmxError::domain("grid needs at least 2 points"));
    }
    if !(a <= b) {
        return Err(MmxError::domain(format!("need a <= b, got [{a}, {b}]")));
    }
    let step = (b - a) / (grid - 1) as f64;
    let at = |i: usize| if i == grid - 1 { b } else { a + step * i as f64 };
    let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
    for i in 0..grid {
        let v = p.eval(at(i)).abs();
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let mut best_x = at(best_i);
    let lo = at(best_i.saturating_sub(1));
    let hi = at((best_i + 1).min(grid - 1));
    let (x, v) = golden_max(|x| p.eval(x).abs(), lo, hi);
    if v > best {
        best = v;
        best_x = x;
    }
    Ok((best_x, best))
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..100 {
        if hi - lo <= 1e-15 * (lo.abs() + hi.abs()).max(1e-300) {
            break;
        }
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    if fc > fd { (c, fc) } else { (d, fd) }
}

/// Lebedev's fractal ordering of `T` root indices: `s^1 = [0]` and
/// `s^{2T} = interlace(s^T, 2T - 1 - s^T)`.
///
/// ```
/// use mmx_core::chebyshev::lebedev_order;
/// assert_eq!(lebedev_order(4).unwrap(), vec![0, 3, 1, 2]);
/// assert!(lebedev_order(6).is_err());
/// ```
pub fn lebedev_order(t: usize) -> Result<Vec<usize>> {
    if !t.is_power_of_two() {
        return Err(MmxError::domain(format!("Lebedev order needs a power of two, got {t}")));
    }
    let mut s = vec![0usize];
    while s.len() < t {
        let n = 2 * s.len();
        s = s.iter().flat_map(|&i| [i, n - 1 - i]).collect();
    }
    Ok(s)
}

/// Leja ordering of `points`: start at the point of largest magnitude, then
/// repeatedly take the point maximising the product of distances to those
/// already chosen. Works for any count, unlike [`lebedev_order`].
pub fn leja_order(points: &[f64]) -> Vec<usize> {
    let n = points.len();
    let mut order = Vec::with_capacity(n);
    if n == 0 {
        return order;
    }
    let first = (0..n).max_by(|&i, &j| points[i].abs().total_cmp(&points[j].abs())).unwrap();
    let mut used = vec![false; n];
    // running sum of log distances to the chosen points
    let mut score = vec![0.0f64; n];
    let mut pick = first;
    for _ in 0..n {
        used[pick] = true;
        order.push(pick);
        let chosen = points[pick];
        for (i, s) in score.iter_mut().enumerate() {
            if !used[i] {
                *s += (points[i] - chosen).abs().ln();
            }
        }
        match (0..n).filter(|&i| !used[i]).max_by(|&i, &j| score[i].total_cmp(&score[j])) {
            Some(next) => pick = next,
            None => break,
        }
    }
    order
}
