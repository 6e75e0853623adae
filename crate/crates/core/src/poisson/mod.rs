//! Weighted Poisson problem on a symmetric neck and the induced angle perturbation.
//!
//! For a profile {w(y) x : x in S^{n-1}} with scalar w, the induced metric is
//! s^2 dy^2 + r^2 g_sphere (s = |w'|, r = |w|), so on functions of y
//! Delta u = (p u')' / q with p = r^{n-1} / s and q = s r^{n-1}.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::lawlor::{lawlor_profile, GridSpec, ProfileLagrangian};
use crate::numerics::fd;
use crate::numerics::linalg::{fit_line, observed_order, solve_tridiagonal};

/// Default decay rate of solutions.
pub const DEFAULT_RHO: f64 = -0.5;
/// Exponent of the difference-quotient seminorm.
pub const HOLDER_ALPHA: f64 = 0.5;
/// Fraction of the far grid used for decay fits: |y| >= RATE_WINDOW * Y.
pub const RATE_WINDOW: f64 = 0.1;
/// Relative slack on declared rhs rates before rejecting.
pub const RATE_SLACK: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedNorms {
    /// sup |u| (1 + r)^{-gamma}.
    pub c0: f64,
    /// sup |u'| (1 + r)^{1 - gamma}.
    pub c1: f64,
    /// sup |u''| (1 + r)^{2 - gamma}.
    pub c2: f64,
    /// Difference quotient of u'' over neighbouring samples, weighted by (1 + r)^{2 + alpha - gamma}.
    pub holder: f64,
}

/// Equivariant function u(y) on a neck, with its declared rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedFunction {
    pub gamma: f64,
    pub y: Vec<f64>,
    pub u: Vec<f64>,
    /// |x| at each sample.
    pub radius: Vec<f64>,
    pub norms: WeightedNorms,
}

impl WeightedFunction {
    pub fn new(y: Vec<f64>, u: Vec<f64>, radius: Vec<f64>, gamma: f64) -> Result<Self> {
        if y.len() != u.len() || y.len() != radius.len() || y.len() < 5 {
            return Err(LabError::Parameter("need >= 5 matching samples".into()));
        }
        let norms = weighted_norms(&y, &u, &radius, gamma);
        Ok(Self {
            gamma,
            y,
            u,
            radius,
            norms,
        })
    }

    /// Sample a closure of y on the grid of a neck.
    pub fn on_neck<F: Fn(f64) -> f64>(neck: &ProfileLagrangian, gamma: f64, f: F) -> Result<Self> {
        let radius = (0..neck.len()).map(|i| neck.radius(i)).collect();
        Self::new(neck.y.clone(), neck.y.iter().map(|&y| f(y)).collect(), radius, gamma)
    }

    pub fn recompute_norms(&self) -> WeightedNorms {
        weighted_norms(&self.y, &self.u, &self.radius, self.gamma)
    }

    /// Log-log slope of |u| against 1 + r on the [Pi_0, Pi_phi] end windows;
    /// None where u vanishes identically.
    pub fn fitted_rate(&self) -> [Option<f64>; 2] {
        let (lo, hi) = (self.y[0], self.y[self.y.len() - 1]);
        let scale = self.u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let fit = |keep: &dyn Fn(f64) -> bool| -> Option<f64> {
            let (lx, ly): (Vec<f64>, Vec<f64>) = self
                .y
                .iter()
                .zip(&self.u)
                .zip(&self.radius)
                .filter(|((y, u), _)| keep(**y) && u.abs() > 1e-14 * scale)
                .map(|((_, u), r)| ((1.0 + r).ln(), u.abs().ln()))
                .unzip();
            (lx.len() >= 3).then(|| fit_line(&lx, &ly).slope)
        };
        if scale == 0.0 {
            return [None, None];
        }
        [fit(&|y| y <= RATE_WINDOW * lo), fit(&|y| y >= RATE_WINDOW * hi)]
    }
}

fn weighted_norms(y: &[f64], u: &[f64], radius: &[f64], gamma: f64) -> WeightedNorms {
    let d1 = fd::derivative5(y, u);
    let d2 = fd::derivative5(y, &d1);
    let w = |i: usize, j: f64| (1.0 + radius[i]).powf(j - gamma);
    let sup = |d: &[f64], j: f64| (0..y.len()).map(|i| d[i].abs() * w(i, j)).fold(0.0, f64::max);
    let holder = (1..y.len())
        .map(|i| {
            let q = (d2[i] - d2[i - 1]).abs() / (y[i] - y[i - 1]).powf(HOLDER_ALPHA);
            q * w(i, 2.0 + HOLDER_ALPHA).max(w(i - 1, 2.0 + HOLDER_ALPHA))
        })
        .fold(0.0, f64::max);
    WeightedNorms {
        c0: sup(u, 0.0),
        c1: sup(&d1, 1.0),
        c2: sup(&d2, 2.0),
        holder,
    }
}

/// Scalar profile w(y) of a neck whose n components coincide.
fn scalar_profile(neck: &ProfileLagrangian) -> Result<Vec<Complex64>> {
    let scale = neck.z.iter().flatten().fold(0.0f64, |m, c| m.max(c.norm()));
    for (i, row) in neck.z.iter().enumerate() {
        if row.iter().any(|c| (c - row[0]).norm() > 1e-12 * scale) {
            return Err(LabError::Unsupported(format!(
                "equivariant reduction needs a symmetric neck; components differ at y = {}",
                neck.y[i]
            )));
        }
    }
    Ok(neck.z.iter().map(|row| row[0]).collect())
}

fn complex_derivative(y: &[f64], w: &[Complex64]) -> Vec<Complex64> {
    let re: Vec<f64> = w.iter().map(|c| c.re).collect();
    let im: Vec<f64> = w.iter().map(|c| c.im).collect();
    fd::derivative5(y, &re)
        .into_iter()
        .zip(fd::derivative5(y, &im))
        .map(|(a, b)| Complex64::new(a, b))
        .collect()
}

/// Laplace-Beltrami coefficients of a symmetric neck on its grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeckOperator {
    pub n: usize,
    pub y: Vec<f64>,
    /// |w|, which equals |x| on the neck.
    pub r: Vec<f64>,
    /// |w'|.
    pub s: Vec<f64>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl NeckOperator {
    pub fn new(neck: &ProfileLagrangian) -> Result<Self> {
        let w = scalar_profile(neck)?;
        let dw = complex_derivative(&neck.y, &w);
        let n = neck.n();
        let r: Vec<f64> = w.iter().map(|c| c.norm()).collect();
        let s: Vec<f64> = dw.iter().map(|c| c.norm()).collect();
        let p = r.iter().zip(&s).map(|(r, s)| r.powi(n as i32 - 1) / s).collect();
        let q = r.iter().zip(&s).map(|(r, s)| s * r.powi(n as i32 - 1)).collect();
        Ok(Self {
            n,
            y: neck.y.clone(),
            r,
            s,
            p,
            q,
        })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Conservative three-point Laplacian at interior nodes (ends set to 0).
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let m = self.len();
        let mut out = vec![0.0; m];
        for i in 1..m - 1 {
            let (a, b, c) = self.row(i);
            out[i] = a * u[i - 1] + b * u[i] + c * u[i + 1];
        }
        out
    }

    fn row(&self, i: usize) -> (f64, f64, f64) {
        let y = &self.y;
        let pm = 0.5 * (self.p[i - 1] + self.p[i]) / (y[i] - y[i - 1]);
        let pp = 0.5 * (self.p[i] + self.p[i + 1]) / (y[i + 1] - y[i]);
        let vol = self.q[i] * 0.5 * (y[i + 1] - y[i - 1]);
        (pm / vol, -(pm + pp) / vol, pp / vol)
    }

    /// (p u')' / q from exact derivatives of u and high-order derivatives of p.
    pub fn laplacian_of(&self, du: &[f64], d2u: &[f64]) -> Vec<f64> {
        let dp = fd::derivative5(&self.y, &self.p);
        (0..self.len())
            .map(|i| (dp[i] * du[i] + self.p[i] * d2u[i]) / self.q[i])
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonSolution {
    pub u: WeightedFunction,
    pub rho: f64,
    /// Robin data y u' - rho u at the two ends.
    pub robin: [f64; 2],
    /// Fitted rates of the rhs and of u at the [Pi_0, Pi_phi] ends.
    pub rhs_rate: [Option<f64>; 2],
    pub rate: [Option<f64>; 2],
    /// max |discrete Laplacian of u - rhs| at interior nodes.
    pub residual: f64,
    /// Weighted sup change of u on |y| <= Y/2 when the domain is halved.
    pub y_sensitivity: Option<f64>,
}

fn one_sided(y: &[f64], idx: [usize; 3], at: usize) -> [f64; 3] {
    let w = fd::fornberg_weights(y[at], &[y[idx[0]], y[idx[1]], y[idx[2]]], 1);
    [w[1][0], w[1][1], w[1][2]]
}

/// Solve Delta u = rhs with Robin data y u' - rho u = g at both ends.
fn solve_robin(op: &NeckOperator, rhs: &[f64], rho: f64, g: [f64; 2]) -> Result<Vec<f64>> {
    let m = op.len();
    if m < 5 {
        return Err(LabError::Parameter("grid too small".into()));
    }
    let (mut lo, mut di, mut up) = (vec![0.0; m], vec![0.0; m], vec![0.0; m]);
    let mut b = rhs.to_vec();
    for i in 1..m - 1 {
        let (a, d, c) = op.row(i);
        lo[i] = a;
        di[i] = d;
        up[i] = c;
    }
    // left end: y0 (c0 u0 + c1 u1 + c2 u2) - rho u0 = g0, u2 eliminated with row 1
    let y = &op.y;
    let w = one_sided(y, [0, 1, 2], 0);
    let mut row = [y[0] * w[0] - rho, y[0] * w[1], y[0] * w[2]];
    let k = row[2] / up[1];
    row[0] -= k * lo[1];
    row[1] -= k * di[1];
    di[0] = row[0];
    up[0] = row[1];
    b[0] = g[0] - k * b[1];
    let w = one_sided(y, [m - 3, m - 2, m - 1], m - 1);
    let e = y[m - 1];
    let mut row = [e * w[0], e * w[1], e * w[2] - rho];
    let k = row[0] / lo[m - 2];
    row[1] -= k * di[m - 2];
    row[2] -= k * up[m - 2];
    lo[m - 1] = row[1];
    di[m - 1] = row[2];
    b[m - 1] = g[1] - k * b[m - 2];
    solve_tridiagonal(&lo, &di, &up, &mut b);
    if b.iter().any(|v| !v.is_finite()) {
        return Err(LabError::Boundary("Robin system is singular".into()));
    }
    Ok(b)
}

fn check_problem(neck: &ProfileLagrangian, rhs: &WeightedFunction, rho: f64) -> Result<()> {
    let n = neck.n() as f64;
    if !(rho > 2.0 - n && rho < 0.0) {
        return Err(LabError::Parameter(format!("rho = {rho} outside (2 - n, 0) = ({}, 0)", 2.0 - n)));
    }
    if rhs.y != neck.y {
        return Err(LabError::Parameter("rhs must be sampled on the neck grid".into()));
    }
    Ok(())
}

/// Solve Delta u = rhs on a symmetric neck with decaying Robin ends.
pub fn solve_equivariant_poisson(neck: &ProfileLagrangian, rhs: &WeightedFunction, rho: f64) -> Result<PoissonSolution> {
    solve_equivariant_poisson_robin(neck, rhs, rho, [0.0, 0.0])
}

/// As `solve_equivariant_poisson` with inhomogeneous Robin data y u' - rho u = g.
pub fn solve_equivariant_poisson_robin(
    neck: &ProfileLagrangian,
    rhs: &WeightedFunction,
    rho: f64,
    g: [f64; 2],
) -> Result<PoissonSolution> {
    check_problem(neck, rhs, rho)?;
    let op = NeckOperator::new(neck)?;
    let declared = rho - 2.0;
    let rhs_rate = rhs.fitted_rate();
    for r in rhs_rate.iter().flatten() {
        if *r > declared + RATE_SLACK * declared.abs() {
            return Err(LabError::DecayRate {
                fitted: *r,
                declared,
            });
        }
    }
    let u = solve_robin(&op, &rhs.u, rho, g)?;
    let lap = op.apply(&u);
    let residual = (1..op.len() - 1).map(|i| (lap[i] - rhs.u[i]).abs()).fold(0.0, f64::max);
    let y_sensitivity = half_domain_sensitivity(&op, &rhs.u, rho, &u);
    let u = WeightedFunction::new(op.y.clone(), u, op.r.clone(), rho)?;
    let rate = u.fitted_rate();
    Ok(PoissonSolution {
        u,
        rho,
        robin: g,
        rhs_rate,
        rate,
        residual,
        y_sensitivity,
    })
}

fn half_domain_sensitivity(op: &NeckOperator, rhs: &[f64], rho: f64, u: &[f64]) -> Option<f64> {
    let y_max = op.y[op.len() - 1];
    let keep: Vec<usize> = (0..op.len()).filter(|&i| op.y[i].abs() <= 0.5 * y_max).collect();
    if keep.len() < 9 {
        return None;
    }
    let pick = |v: &[f64]| keep.iter().map(|&i| v[i]).collect::<Vec<f64>>();
    let sub = NeckOperator {
        n: op.n,
        y: pick(&op.y),
        r: pick(&op.r),
        s: pick(&op.s),
        p: pick(&op.p),
        q: pick(&op.q),
    };
    let v = solve_robin(&sub, &pick(rhs), rho, [0.0, 0.0]).ok()?;
    Some(
        keep.iter()
            .zip(&v)
            .map(|(&i, v)| (u[i] - v).abs() * (1.0 + op.r[i]).powf(-rho))
            .fold(0.0, f64::max),
    )
}

/// Symmetric Lawlor neck a = (a, .., a) in C^n on a sinh grid.
pub fn symmetric_neck(n: usize, a: f64, grid: &GridSpec) -> Result<ProfileLagrangian> {
    lawlor_profile(&vec![a; n], grid)
}

/// Smooth equivariant rhs c (1 + r^2)^{(rho - 2)/2} of rate rho - 2.
pub fn model_rhs(neck: &ProfileLagrangian, rho: f64, c: f64) -> Result<WeightedFunction> {
    let radius: Vec<f64> = (0..neck.len()).map(|i| neck.radius(i)).collect();
    let u = radius.iter().map(|r| c * (1.0 + r * r).powf(0.5 * (rho - 2.0))).collect();
    WeightedFunction::new(neck.y.clone(), u, radius, rho - 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub rho: f64,
    pub points: Vec<usize>,
    /// Largest computational-grid step, 2 / (points - 1).
    pub h: Vec<f64>,
    /// Weighted sup error against the manufactured solution.
    pub error: Vec<f64>,
    pub order: f64,
}

/// Manufactured solution u* = (1 + y^2)^{rho/2} on nested grids.
pub fn manufactured_convergence(n: usize, a: f64, rho: f64, y_max: f64, points: &[usize]) -> Result<ConvergenceTable> {
    let mut h = Vec::new();
    let mut error = Vec::new();
    for &m in points {
        let grid = GridSpec {
            y_max,
            points: m,
            stretch: None,
        };
        let neck = symmetric_neck(n, a, &grid)?;
        let op = NeckOperator::new(&neck)?;
        let exact: Vec<f64> = op.y.iter().map(|y| (1.0 + y * y).powf(0.5 * rho)).collect();
        let du: Vec<f64> = op.y.iter().map(|y| rho * y * (1.0 + y * y).powf(0.5 * rho - 1.0)).collect();
        let d2u: Vec<f64> = op
            .y
            .iter()
            .map(|y| {
                let b = 1.0 + y * y;
                rho * b.powf(0.5 * rho - 1.0) + rho * (rho - 2.0) * y * y * b.powf(0.5 * rho - 2.0)
            })
            .collect();
        let rhs = op.laplacian_of(&du, &d2u);
        let ends = [0, m - 1].map(|i| op.y[i] * du[i] - rho * exact[i]);
        let u = solve_robin(&op, &rhs, rho, ends)?;
        let err = (0..m)
            .map(|i| (u[i] - exact[i]).abs() * (1.0 + op.r[i]).powf(-rho))
            .fold(0.0, f64::max);
        h.push(2.0 / (m - 1) as f64);
        error.push(err);
    }
    Ok(ConvergenceTable {
        rho,
        points: points.to_vec(),
        order: observed_order(&h, &error),
        h,
        error,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleLevel {
    pub delta: f64,
    /// Weighted sup of theta_delta - delta a, weight (1 + r)^{2 - rho}.
    pub remainder: f64,
    /// remainder / delta^2.
    pub scaled: f64,
    /// Change of f(Y) - f(-Y) on the grid: int (f_delta' - f') dy.
    pub a_gap: f64,
    /// Index of the sample attaining the weighted remainder.
    pub argmax: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleReport {
    pub rho: f64,
    pub levels: Vec<AngleLevel>,
    /// remainder(delta_k) / remainder(delta_{k+1}).
    pub ratios: Vec<f64>,
    /// Weighted sup of the Richardson first-order slope minus Delta u.
    pub richardson_gap: f64,
    /// Weighted sup of the exact discrete first variation minus Delta u.
    pub first_order_gap: f64,
    /// sup |theta_delta| at the largest delta.
    pub theta_sup: f64,
    pub y_max: f64,
}

/// Profile of the normal graph of delta du: w + delta i w' u' / |w'|^2.
fn graph_profile(neck: &ProfileLagrangian, w: &[Complex64], dw: &[Complex64], u: &[f64], delta: f64) -> Result<Vec<Complex64>> {
    let du = fd::derivative5(&neck.y, u);
    let v: Vec<Complex64> = (0..w.len())
        .map(|i| Complex64::i() * dw[i] * du[i] / dw[i].norm_sqr())
        .collect();
    let out: Vec<Complex64> = w.iter().zip(&v).map(|(a, b)| a + delta * b).collect();
    let bad: Vec<f64> = (0..w.len())
        .filter(|&i| (delta * v[i]).norm() >= 0.5 * w[i].norm())
        .map(|i| neck.y[i])
        .collect();
    if let (Some(a), Some(b)) = (bad.first(), bad.last()) {
        return Err(LabError::NotGraphical(format!(
            "normal graph of delta du leaves the neighbourhood on y in [{a:.4}, {b:.4}]"
        )));
    }
    Ok(out)
}

fn angle_shift(y: &[f64], n: usize, w: &[Complex64], dw: &[Complex64], wd: &[Complex64]) -> Vec<f64> {
    let dwd = complex_derivative(y, wd);
    (0..w.len())
        .map(|i| (dwd[i] / dw[i]).arg() + (n as f64 - 1.0) * (wd[i] / w[i]).arg())
        .collect()
}

fn as_profile(neck: &ProfileLagrangian, w: &[Complex64]) -> Result<ProfileLagrangian> {
    let n = neck.n();
    ProfileLagrangian::from_samples(neck.y.clone(), w.iter().map(|c| vec![*c; n]).collect())
}

/// L_delta as a profile plus the delta-ladder report at delta, delta/2, delta/4.
pub fn perturb_neck(neck: &ProfileLagrangian, u: &WeightedFunction, delta: f64) -> Result<(ProfileLagrangian, AngleReport)> {
    if u.y != neck.y {
        return Err(LabError::Parameter("u must be sampled on the neck grid".into()));
    }
    if !(delta >= 0.0) {
        return Err(LabError::Parameter("delta must be non-negative".into()));
    }
    let op = NeckOperator::new(neck)?;
    let n = neck.n();
    let w = scalar_profile(neck)?;
    let dw = complex_derivative(&neck.y, &w);
    let rho = u.gamma;
    let weight: Vec<f64> = op.r.iter().map(|r| (1.0 + r).powf(2.0 - rho)).collect();
    let wsup = |v: &[f64]| v.iter().zip(&weight).map(|(a, b)| a.abs() * b).fold(0.0, f64::max);

    // exact first variation of the discrete angle: Im(Dv / Dw) + (n - 1) Im(v / w)
    let du = fd::derivative5(&neck.y, &u.u);
    let v: Vec<Complex64> = (0..w.len())
        .map(|i| Complex64::i() * dw[i] * du[i] / dw[i].norm_sqr())
        .collect();
    let dv = complex_derivative(&neck.y, &v);
    let first: Vec<f64> = (0..w.len())
        .map(|i| (dv[i] / dw[i]).im + (n as f64 - 1.0) * (v[i] / w[i]).im)
        .collect();
    let d2u = fd::derivative5(&neck.y, &du);
    let lap = op.laplacian_of(&du, &d2u);
    let first_order_gap = wsup(&first.iter().zip(&lap).map(|(a, b)| a - b).collect::<Vec<_>>());

    let density = |a: &[Complex64], da: &[Complex64]| -> Vec<f64> {
        a.iter().zip(da).map(|(a, b)| 0.5 * (a.conj() * b).im).collect()
    };
    let g0 = density(&w, &dw);
    let deltas = [delta, 0.5 * delta, 0.25 * delta];
    let mut levels = Vec::new();
    let mut shifts = Vec::new();
    let mut top = None;
    for &d in &deltas {
        let wd = graph_profile(neck, &w, &dw, &u.u, d)?;
        let theta = angle_shift(&neck.y, n, &w, &dw, &wd);
        let rem: Vec<f64> = theta.iter().zip(&first).map(|(t, f)| t - d * f).collect();
        let (argmax, remainder) = rem
            .iter()
            .zip(&weight)
            .map(|(a, b)| a.abs() * b)
            .enumerate()
            .fold((0, 0.0), |best, (i, v)| if v > best.1 { (i, v) } else { best });
        let pert = as_profile(neck, &wd)?;
        let gd = density(&wd, &complex_derivative(&neck.y, &wd));
        let diff: Vec<f64> = gd.iter().zip(&g0).map(|(a, b)| a - b).collect();
        let a_gap = fd::cumulative_cubic(&neck.y, &diff)[neck.len() - 1];
        levels.push(AngleLevel {
            delta: d,
            remainder,
            scaled: if d > 0.0 { remainder / (d * d) } else { 0.0 },
            a_gap,
            argmax,
        });
        if top.is_none() {
            top = Some(pert);
        }
        shifts.push(theta);
    }
    let ratios = levels.windows(2).map(|p| p[0].remainder / p[1].remainder).collect();
    let richardson_gap = if delta > 0.0 {
        let slope: Vec<f64> = (0..w.len())
            .map(|i| (4.0 * shifts[1][i] - shifts[0][i]) / delta - lap[i])
            .collect();
        wsup(&slope)
    } else {
        0.0
    };
    let theta_sup = shifts[0].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let report = AngleReport {
        rho,
        levels,
        ratios,
        richardson_gap,
        first_order_gap,
        theta_sup,
        y_max: neck.y[neck.len() - 1],
    };
    Ok((top.expect("three levels"), report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn neck(points: usize) -> ProfileLagrangian {
        symmetric_neck(
            3,
            1.0,
            &GridSpec {
                y_max: 100.0,
                points,
                stretch: None,
            },
        )
        .unwrap()
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let l = neck(401);
        let rhs = WeightedFunction::on_neck(&l, -2.5, |_| 0.0).unwrap();
        let s = solve_equivariant_poisson(&l, &rhs, -0.5).unwrap();
        assert!(s.u.u.iter().all(|v| *v == 0.0));
        assert_eq!(s.rate, [None, None]);
    }

    #[test]
    fn manufactured_order() {
        let t = manufactured_convergence(3, 1.0, -0.5, 100.0, &[201, 401, 801]).unwrap();
        assert!(t.order >= 1.8, "{t:?}");
    }

    #[test]
    fn radial_laplacian_matches_flat_space_far_out() {
        // far along the neck Delta |y|^rho ~ rho (rho + n - 2) |y|^{rho - 2}
        let l = neck(801);
        let op = NeckOperator::new(&l).unwrap();
        let u: Vec<f64> = op.y.iter().map(|y| y.abs().powf(-0.5)).collect();
        let lap = op.apply(&u);
        let i = op.len() - 3;
        let expect = -0.5 * 0.5 * op.y[i].powf(-2.5);
        assert!((lap[i] / expect - 1.0).abs() < 0.05);
    }

    #[test]
    fn slow_rhs_is_rejected() {
        let l = neck(401);
        let rhs = model_rhs(&l, -0.5, 1.0).unwrap();
        // declare rho = -0.9 while the data decays like rho = -0.5
        match solve_equivariant_poisson(&l, &rhs, -0.9) {
            Err(LabError::DecayRate { fitted, .. }) => assert!((fitted + 2.5).abs() < 0.1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn asymmetric_neck_is_unsupported() {
        let l = lawlor_profile(&[1.0, 2.0, 3.0], &GridSpec { y_max: 10.0, points: 101, stretch: None }).unwrap();
        assert!(matches!(NeckOperator::new(&l), Err(LabError::Unsupported(_))));
    }

    #[test]
    fn zero_delta_is_the_neck() {
        let l = neck(401);
        let rhs = model_rhs(&l, -0.5, 1.0).unwrap();
        let s = solve_equivariant_poisson(&l, &rhs, -0.5).unwrap();
        let (p, r) = perturb_neck(&l, &s.u, 0.0).unwrap();
        assert_eq!(p.z, l.z);
        assert_eq!(r.theta_sup, 0.0);
    }

    #[test]
    fn remainder_is_quadratic() {
        let l = neck(801);
        let rhs = model_rhs(&l, -0.5, 1.0).unwrap();
        let s = solve_equivariant_poisson(&l, &rhs, -0.5).unwrap();
        let (_, r) = perturb_neck(&l, &s.u, 0.1).unwrap();
        for q in &r.ratios {
            assert!(*q > 3.0 && *q < 5.0, "{r:?}");
        }
        assert!(r.first_order_gap < 1e-4);
        assert!(r.levels.iter().all(|v| v.a_gap.abs() < 0.1 * 100f64.powf(-0.5)));
    }

    #[test]
    fn oversized_delta_is_not_graphical() {
        let l = neck(401);
        let rhs = model_rhs(&l, -0.5, 1.0).unwrap();
        let s = solve_equivariant_poisson(&l, &rhs, -0.5).unwrap();
        assert!(matches!(perturb_neck(&l, &s.u, 50.0), Err(LabError::NotGraphical(_))));
    }
}
