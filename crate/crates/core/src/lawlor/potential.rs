use serde::{Deserialize, Serialize};

use super::ProfileLagrangian;
use crate::error::{LabError, Result};
use crate::numerics::fd;
use crate::numerics::linalg::{fit_line, LineFit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndLabel {
    /// y -> -infinity, asymptotic to Pi_0.
    Pi0,
    /// y -> +infinity, asymptotic to Pi_phi.
    PiPhi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeckPotential {
    /// f(y_i) with lim_{y -> -inf} f = 0.
    pub f: Vec<f64>,
    /// lim_{y -> +inf} f, the A(L) invariant.
    pub a_invariant: f64,
    /// Extrapolated tail contributions beyond the grid at each end.
    pub tail: [f64; 2],
    /// Fitted decay exponents of f' used for the tails.
    pub tail_exponent: [f64; 2],
}

/// Fraction of the far grid used for tail and decay fits: |y| >= FIT_FRACTION * Y.
pub const FIT_FRACTION: f64 = 0.1;

/// f'(y) = lambda(d/dy) averaged over the sphere: (1/2n) sum_k Im(conj z_k z_k').
fn potential_density(p: &ProfileLagrangian) -> Vec<f64> {
    let dz = p.derivative_high_order();
    let n = p.n() as f64;
    (0..p.len())
        .map(|i| {
            (0..p.n())
                .map(|k| (p.z[i][k].conj() * dz[i][k]).im)
                .sum::<f64>()
                / (2.0 * n)
        })
        .collect()
}

fn end_window(p: &ProfileLagrangian, end: EndLabel) -> Vec<usize> {
    let (lo, hi) = (p.y[0], p.y[p.len() - 1]);
    match end {
        EndLabel::Pi0 => (0..p.len()).filter(|&i| p.y[i] <= FIT_FRACTION * lo).collect(),
        EndLabel::PiPhi => (0..p.len()).filter(|&i| p.y[i] >= FIT_FRACTION * hi).collect(),
    }
}

/// Power-law fit |g| ~ C |y|^{-q} over an end window; None for zero signal.
fn power_fit(y: &[f64], g: &[f64]) -> Option<LineFit> {
    let pairs: Vec<(f64, f64)> = y
        .iter()
        .zip(g)
        .filter(|(_, v)| v.abs() > 0.0)
        .map(|(a, v)| (a.abs().ln(), v.abs().ln()))
        .collect();
    if pairs.len() < 3 {
        return None;
    }
    let (lx, ly): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    Some(fit_line(&lx, &ly))
}

/// Integrate df = lambda|_L along the profile, normalized to vanish on the
/// Pi_0 end, and return the limit on the Pi_phi end.
pub fn neck_potential(p: &ProfileLagrangian) -> Result<NeckPotential> {
    let g = potential_density(p);
    let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut tail = [0.0; 2];
    let mut tail_exponent = [f64::NAN; 2];
    for (slot, end) in [EndLabel::Pi0, EndLabel::PiPhi].into_iter().enumerate() {
        let idx = end_window(p, end);
        let ys: Vec<f64> = idx.iter().map(|&i| p.y[i]).collect();
        let gs: Vec<f64> = idx.iter().map(|&i| g[i]).collect();
        let edge = if slot == 0 { 0 } else { p.len() - 1 };
        if gs.iter().all(|v| v.abs() <= 1e-14 * scale.max(1e-300)) {
            tail_exponent[slot] = f64::INFINITY;
            continue;
        }
        let fit = power_fit(&ys, &gs).ok_or_else(|| LabError::Tail {
            what: "end window too small for a tail fit".into(),
            estimate: f64::INFINITY,
            tolerance: 0.0,
        })?;
        let q = -fit.slope;
        tail_exponent[slot] = q;
        if !(q > 1.0) {
            return Err(LabError::Tail {
                what: format!("potential density decays like |y|^-{q:.3}, end limit diverges"),
                estimate: f64::INFINITY,
                tolerance: 0.0,
            });
        }
        // int_{|Y|}^inf g(Y) (s/|Y|)^{-q} ds = g(Y) |Y| / (q - 1)
        let ye = p.y[edge].abs();
        tail[slot] = g[edge] * ye / (q - 1.0);
    }
    let body = fd::cumulative_cubic(&p.y, &g);
    let f: Vec<f64> = body.iter().map(|v| v + tail[0]).collect();
    let a_invariant = f[f.len() - 1] + tail[1];
    Ok(NeckPotential {
        f,
        a_invariant,
        tail,
        tail_exponent,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit {
    pub end: EndLabel,
    /// Slope of log|f - c_end| against log r; None for a degenerate (zero) signal.
    pub potential_exponent: Option<f64>,
    /// Slope of log|df| against log r.
    pub gradient_exponent: Option<f64>,
    /// RMS residuals of the two log-log fits.
    pub residual: [f64; 2],
    pub degenerate: bool,
    /// Radius range of the fit window.
    pub window: [f64; 2],
}

/// Fit the decay of the potential and its gradient on both far ends.
pub fn asymptotic_fit(p: &ProfileLagrangian) -> Result<[AsymptoticFit; 2]> {
    use std::f64::consts::FRAC_PI_4;
    let pot = neck_potential(p)?;
    let g = potential_density(p);
    let r: Vec<f64> = (0..p.len()).map(|i| p.radius(i)).collect();
    let dr = fd::derivative(&p.y, &r);
    let scale = pot.f.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(pot.a_invariant.abs());
    let last = p.len() - 1;
    let mut out = Vec::with_capacity(2);
    for end in [EndLabel::Pi0, EndLabel::PiPhi] {
        let idx = end_window(p, end);
        let (edge, c_end) = match end {
            EndLabel::Pi0 => (0, 0.0),
            EndLabel::PiPhi => (last, pot.a_invariant),
        };
        // graphical over the asymptotic plane: phases near their end values
        // and the radius monotone in |y|
        for &i in &idx {
            for k in 0..p.n() {
                if (p.psi[i][k] - p.psi[edge][k]).abs() >= FRAC_PI_4 {
                    return Err(LabError::NotGraphical(format!(
                        "phase {k} drifts by more than pi/4 in the {end:?} fit window"
                    )));
                }
            }
        }
        let monotone = idx.windows(2).all(|w| {
            let a = r[w[0]];
            let b = r[w[1]];
            match end {
                EndLabel::Pi0 => b < a,
                EndLabel::PiPhi => b > a,
            }
        });
        if !monotone {
            return Err(LabError::NotGraphical(format!(
                "radius not monotone in the {end:?} fit window"
            )));
        }
        let rs: Vec<f64> = idx.iter().map(|&i| r[i]).collect();
        let fs: Vec<f64> = idx.iter().map(|&i| pot.f[i] - c_end).collect();
        let gs: Vec<f64> = idx.iter().map(|&i| g[i] / dr[i]).collect();
        let window = [
            rs.iter().cloned().fold(f64::MAX, f64::min),
            rs.iter().cloned().fold(0.0, f64::max),
        ];
        let degenerate = fs.iter().all(|v| v.abs() <= 1e-13 * scale.max(1e-300));
        if degenerate {
            out.push(AsymptoticFit {
                end,
                potential_exponent: None,
                gradient_exponent: None,
                residual: [0.0, 0.0],
                degenerate: true,
                window,
            });
            continue;
        }
        let pf = power_fit(&rs, &fs);
        let gf = power_fit(&rs, &gs);
        out.push(AsymptoticFit {
            end,
            potential_exponent: pf.map(|f| f.slope),
            gradient_exponent: gf.map(|f| f.slope),
            residual: [
                pf.map(|f| f.residual).unwrap_or(f64::NAN),
                gf.map(|f| f.residual).unwrap_or(f64::NAN),
            ],
            degenerate: false,
            window,
        });
    }
    let b = out.pop().unwrap();
    let a = out.pop().unwrap();
    Ok([a, b])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lawlor::{lawlor_profile, GridSpec};
    use num_complex::Complex64;

    #[test]
    fn plane_union_profile_has_zero_potential() {
        let grid = GridSpec { y_max: 100.0, points: 801, stretch: None };
        let y = grid.nodes();
        let z: Vec<Vec<Complex64>> = y
            .iter()
            .map(|v| (0..3).map(|k| Complex64::new((1.0 / (k as f64 + 1.0) + v * v).sqrt(), 0.0)).collect())
            .collect();
        let p = ProfileLagrangian::from_samples(y, z).unwrap();
        let pot = neck_potential(&p).unwrap();
        assert_eq!(pot.a_invariant, 0.0);
        let fits = asymptotic_fit(&p).unwrap();
        assert!(fits.iter().all(|f| f.degenerate && f.potential_exponent.is_none()));
    }

    #[test]
    fn scaled_neck_scales_invariant_quadratically() {
        let grid = GridSpec { y_max: 1e3, points: 4001, stretch: None };
        let p = lawlor_profile(&[1.0, 2.0, 3.0], &grid).unwrap();
        let a1 = neck_potential(&p).unwrap().a_invariant;
        let a2 = neck_potential(&p.scaled(0.5)).unwrap().a_invariant;
        assert!((a2 - 0.25 * a1).abs() < 1e-12 * a1.abs().max(1.0));
    }
}
