use crate::error::{MmxError, Result};
use crate::point::Point;
use crate::problems::Problem;

/// The two equally likely outcomes of one randomized convex-concave slingshot
/// pair started at `z0`.
///
/// The `minus` branch takes a descent step in both blocks, then an ascent
/// step in `y` only; the `plus` branch takes an ascent step in both blocks,
/// then a descent step in `x` only.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoStep {
    pub z1_minus: Point,
    pub z2_minus: Point,
    pub z1_plus: Point,
    pub z2_plus: Point,
}

impl TwoStep {
    /// `E[z_2]`.
    pub fn mean(&self) -> Point {
        &(&self.z2_minus + &self.z2_plus) * 0.5
    }
}

/// Both branches of a pair with magnitude `h`, for the unscaled problem.
pub fn two_step_trajectories(problem: &dyn Problem, z0: &Point, h: f64) -> Result<TwoStep> {
    let g0 = problem.grad(z0)?;
    Ok(branches(|z| problem.eval_grad(z), z0, &g0, h))
}

fn branches(grad: impl Fn(&Point) -> Point, z0: &Point, g0: &Point, h: f64) -> TwoStep {
    let z1_minus = Point::from_parts(z0.x() - g0.x() * h, z0.y() - g0.y() * h);
    let g1 = grad(&z1_minus);
    let z2_minus = Point::from_parts(z1_minus.x().clone(), z1_minus.y() + g1.y() * h);
    let z1_plus = Point::from_parts(z0.x() + g0.x() * h, z0.y() + g0.y() * h);
    let g1 = grad(&z1_plus);
    let z2_plus = Point::from_parts(z1_plus.x() - g1.x() * h, z1_plus.y().clone());
    TwoStep { z1_minus, z2_minus, z1_plus, z2_plus }
}

/// `c_{h,mu} = h^2 (1 + (4mu - 5)h + (6 - 9mu + 2mu^2)h^2) / (2 (1 + (mu - 2)h))`
/// in units where `L = 1`.
pub fn certificate_coefficient(h: f64, mu: f64) -> f64 {
    let num = h * h * (1.0 + (4.0 * mu - 5.0) * h + (6.0 - 9.0 * mu + 2.0 * mu * mu) * h * h);
    num / (2.0 * (1.0 + (mu - 2.0) * h))
}

/// Whether `mu -> c_{h,mu}` is nondecreasing on a uniform grid over `[0, 1]`.
pub fn coefficient_monotone_in_mu(h: f64, grid: usize) -> bool {
    let grid = grid.max(2);
    let vals: Vec<f64> = (0..grid)
        .map(|i| certificate_coefficient(h, i as f64 / (grid - 1) as f64))
        .collect();
    vals.windows(2).all(|w| w[1] >= w[0] - 1e-15 * w[0].abs())
}

/// Terms of the two-step certificate, in units where `L = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    /// `(1 - h mu)||z0 - z*||^2 - c_{h,mu}||grad f(z0)||^2 - E||z2 - z*||^2`.
    pub lhs: f64,
    /// Co-coercivity terms `Q_phi(x1+, x1-)`, `Q_phi(x*, x1+)`,
    /// `Q_phi*(x1-, x*)`, `Q_psi(y1-, y1+)`, `Q_psi(y*, y1-)`, `Q_psi*(y1+, y*)`.
    pub q_terms: [f64; 6],
    /// Half of the smoothness term `||z0 - z'||^2 - ||grad f(z0) - grad f(z')||^2`
    /// with `z' = (x1-, y1+)`.
    pub p_term: f64,
    /// The seven squared-norm terms.
    pub s_terms: [f64; 7],
    /// `|lhs - h (sum of all terms)|`.
    pub identity_residual: f64,
    pub min_term: f64,
    /// `1 + |lhs| + sum |terms|`.
    pub scale: f64,
    pub c_coefficient: f64,
    /// Stepsize and modulus after rescaling to `L = 1`.
    pub h_scaled: f64,
    pub mu_scaled: f64,
}

impl CertificateReport {
    /// Identity within `1e-8 scale` and every term at least `-1e-10 scale`.
    pub fn passes(&self) -> bool {
        self.identity_residual <= 1e-8 * self.scale && self.min_term >= -1e-10 * self.scale
    }

    pub fn terms(&self) -> impl Iterator<Item = f64> + '_ {
        self.q_terms.iter().chain(std::iter::once(&self.p_term)).chain(self.s_terms.iter()).copied()
    }
}

fn scaled_params(problem: &dyn Problem, h: f64) -> Result<(f64, f64, f64)> {
    let l = problem.smoothness();
    let hs = h * l;
    let mu = problem.strong_convexity() / l;
    if !(hs > 0.0 && hs <= 1.0 / 3.0 * (1.0 + 1e-12)) {
        return Err(MmxError::domain(format!("need 0 < hL <= 1/3, got hL = {hs}")));
    }
    if !(0.0..1.0).contains(&mu) {
        return Err(MmxError::domain(format!("need mu/L in [0, 1), got {mu}")));
    }
    Ok((l, hs, mu))
}

fn saddle_of(problem: &dyn Problem, z0: &Point) -> Result<Point> {
    problem
        .saddle_for(z0)
        .ok_or_else(|| MmxError::unsupported("certificate needs a known saddle point"))
}

fn xy(x: &nalgebra::DVector<f64>, y: &nalgebra::DVector<f64>) -> Point {
    Point::from_parts(x.clone(), y.clone())
}

/// Evaluates the two-step certificate at `z0` with stepsize `h`.
///
/// The problem is rescaled to `L = 1` (`f -> f/L`, `h -> hL`, `mu -> mu/L`)
/// before any term is formed.
pub fn verify_two_step_certificate(problem: &dyn Problem, z0: &Point, h: f64) -> Result<CertificateReport> {
    let (l, h, mu) = scaled_params(problem, h)?;
    let zs = saddle_of(problem, z0)?;
    problem.value(z0)?;
    let f = |z: &Point| problem.eval_value(z).expect("value oracle checked") / l;
    let g = |z: &Point| &problem.eval_grad(z) * (1.0 / l);

    let g0 = g(z0);
    let tr = branches(g, z0, &g0, h);
    let (x0, y0) = (z0.x(), z0.y());
    let (xs, ys) = (zs.x(), zs.y());
    let (x1m, y1m) = (tr.z1_minus.x(), tr.z1_minus.y());
    let (x1p, y1p) = (tr.z1_plus.x(), tr.z1_plus.y());

    let c = certificate_coefficient(h, mu);
    let lhs = (1.0 - h * mu) * z0.dist_sq(&zs)
        - c * g0.norm_sq()
        - 0.5 * (tr.z2_minus.dist_sq(&zs) + tr.z2_plus.dist_sq(&zs));

    let k = 1.0 / (2.0 * (1.0 - mu));
    // co-coercivity of g at (v, w), given values and gradients
    let q = |gv: f64, gw: f64, dv: &nalgebra::DVector<f64>, dw: &nalgebra::DVector<f64>, v: &nalgebra::DVector<f64>, w: &nalgebra::DVector<f64>| {
        let wv = w - v;
        gv - gw + k * (2.0 * (dw - dv * mu).dot(&wv) - (dv - dw).norm_squared() - mu * wv.norm_squared())
    };
    // phi(x) = f(x, y) for frozen y; psi(y) = -f(x, y) for frozen x
    let phi = |x: &nalgebra::DVector<f64>, yf: &nalgebra::DVector<f64>| {
        let z = xy(x, yf);
        (f(&z), g(&z).x().clone())
    };
    let psi = |y: &nalgebra::DVector<f64>, xf: &nalgebra::DVector<f64>| {
        let z = xy(xf, y);
        (-f(&z), -g(&z).y().clone())
    };
    let qphi = |v: &nalgebra::DVector<f64>, w: &nalgebra::DVector<f64>, yf: &nalgebra::DVector<f64>| {
        let (fv, dv) = phi(v, yf);
        let (fw, dw) = phi(w, yf);
        q(fv, fw, &dv, &dw, v, w)
    };
    let qpsi = |v: &nalgebra::DVector<f64>, w: &nalgebra::DVector<f64>, xf: &nalgebra::DVector<f64>| {
        let (fv, dv) = psi(v, xf);
        let (fw, dw) = psi(w, xf);
        q(fv, fw, &dv, &dw, v, w)
    };
    let q_terms = [
        qphi(x1p, x1m, y1p),
        qphi(xs, x1p, y1p),
        qphi(x1m, xs, ys),
        qpsi(y1m, y1p, x1m),
        qpsi(ys, y1m, x1m),
        qpsi(y1p, ys, xs),
    ];

    let zp = xy(x1m, y1p);
    let gzp = g(&zp);
    let p_term = 0.5 * (z0.dist_sq(&zp) - g0.dist_sq(&gzp));

    let g1p = g(&tr.z1_plus);
    let g1m = g(&tr.z1_minus);
    let gx_xs_y1p = g(&xy(xs, y1p));
    let gy_x1m_ys = g(&xy(x1m, ys));
    let (gx0, gy0) = (g0.x(), g0.y());
    let rho = 1.0 + h * mu - h;
    debug_assert!(rho > 0.0 && rho - h > 0.0, "rho = {rho}, h = {h}");
    let s_terms = [
        k * (gx0 * (h * mu) - g1p.x() + gx_xs_y1p.x() + x0 * mu - xs * mu).norm_squared(),
        k * (gy0 * (h * mu) - g1m.y() + gy_x1m_ys.y() - y0 * mu + ys * mu).norm_squared(),
        k * (gx0 * (h * mu) + gy_x1m_ys.x() - x0 * mu + xs * mu).norm_squared(),
        k * (gy0 * (h * mu) + gx_xs_y1p.y() + y0 * mu - ys * mu).norm_squared(),
        (g1p.x() * rho - gzp.x() - gx0 * (2.0 * h * mu)).norm_squared() / (2.0 * rho * (1.0 - mu)),
        (g1m.y() * rho - gzp.y() - gy0 * (2.0 * h * mu)).norm_squared() / (2.0 * rho * (1.0 - mu)),
        (&(&gzp * (rho - h)) - &(&g0 * (rho + 2.0 * h * (h - 1.0)))).norm_sq() / (2.0 * rho * (rho - h)),
    ];

    let sum: f64 = q_terms.iter().chain(s_terms.iter()).sum::<f64>() + p_term;
    let abs_sum: f64 = q_terms.iter().chain(s_terms.iter()).map(|v| v.abs()).sum::<f64>() + p_term.abs();
    let min_term = q_terms.iter().chain(s_terms.iter()).fold(p_term, |a, &b| a.min(b));
    Ok(CertificateReport {
        lhs,
        q_terms,
        p_term,
        s_terms,
        identity_residual: (lhs - h * sum).abs(),
        min_term,
        scale: 1.0 + lhs.abs() + abs_sum,
        c_coefficient: c,
        h_scaled: h,
        mu_scaled: mu,
    })
}

/// One-pair progress inequality in expectation over the two branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProgressReport {
    /// `(1 - h mu)||z0 - z*||^2 - h^2 (1 - 3Lh)/2 ||grad f(z0)||^2`.
    pub rhs: f64,
    /// `E||z2 - z*||^2`.
    pub lhs: f64,
    /// `rhs - lhs`.
    pub margin: f64,
    /// `1 + ||z0 - z*||^2 + h^2 ||grad f(z0)||^2`.
    pub scale: f64,
}

impl ProgressReport {
    pub fn passes(&self) -> bool {
        self.margin >= -1e-10 * self.scale
    }
}

pub fn check_two_step_progress(problem: &dyn Problem, z0: &Point, h: f64) -> Result<ProgressReport> {
    let l = problem.smoothness();
    let mu = problem.strong_convexity();
    if !(h > 0.0 && 3.0 * l * h <= 1.0 + 1e-12) {
        return Err(MmxError::domain(format!("need 0 < h <= 1/(3L), got h = {h}, L = {l}")));
    }
    let zs = saddle_of(problem, z0)?;
    let tr = two_step_trajectories(problem, z0, h)?;
    let gn = problem.eval_grad(z0).norm_sq();
    let d0 = z0.dist_sq(&zs);
    let rhs = (1.0 - h * mu) * d0 - h * h * (1.0 - 3.0 * l * h) / 2.0 * gn;
    let lhs = 0.5 * (tr.z2_minus.dist_sq(&zs) + tr.z2_plus.dist_sq(&zs));
    Ok(ProgressReport { rhs, lhs, margin: rhs - lhs, scale: 1.0 + d0 + h * h * gn })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{random_scsc_quadratic, BilinearProblem};
    use nalgebra::DMatrix;

    #[test]
    fn coefficient_at_zero_mu() {
        let h = 1.0 / 6.0;
        assert!((certificate_coefficient(h, 0.0) - 1.0 / 144.0).abs() < 1e-17);
        assert!((certificate_coefficient(h, 0.0) - h * h * (1.0 - 3.0 * h) / 2.0).abs() < 1e-17);
        assert!(coefficient_monotone_in_mu(0.2, 101));
    }

    #[test]
    fn identity_on_scsc_quadratic() {
        let p = random_scsc_quadratic(4, 3, 0.3, 11).unwrap();
        let z0 = Point::from_slices(&[0.3, -1.0, 2.0, 0.5], &[1.0, 0.1, -0.7]).unwrap();
        let rep = verify_two_step_certificate(&p, &z0, 1.0 / 6.0).unwrap();
        assert!(rep.passes(), "{rep:?}");
    }

    #[test]
    fn saddle_start_gives_zero_terms() {
        let p = random_scsc_quadratic(2, 2, 0.3, 4).unwrap();
        let zs = p.shift().clone();
        let rep = verify_two_step_certificate(&p, &zs, 0.2).unwrap();
        assert_eq!(rep.lhs, 0.0);
        assert!(rep.terms().all(|t| t == 0.0));
        assert_eq!(check_two_step_progress(&p, &zs, 0.2).unwrap().margin, 0.0);
    }

    #[test]
    fn progress_on_xy() {
        let p = BilinearProblem::from_matrix(DMatrix::from_element(1, 1, 1.0)).unwrap();
        let rep = check_two_step_progress(&p, &Point::scalar(1.0, 1.0), 1.0 / 6.0).unwrap();
        assert!(rep.margin >= 0.0, "{rep:?}");
    }

    #[test]
    fn rejects_large_steps() {
        let p = random_scsc_quadratic(2, 2, 0.3, 4).unwrap();
        let z0 = Point::zeros(2, 2);
        assert!(verify_two_step_certificate(&p, &z0, 0.4).is_err());
        assert!(check_two_step_progress(&p, &z0, 0.4).is_err());
    }
}
