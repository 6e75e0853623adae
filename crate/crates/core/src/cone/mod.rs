//! Special Lagrangian cones: plane unions, link spectra, homogeneous
//! harmonic modes and their drift eigenvalues.

mod annulus;
mod radial;
mod statics;

pub use annulus::{
    elliptic_admissible, three_annulus_elliptic, AnnulusMode, Clause, EllipticReport, Outcome,
};
pub use radial::{radial_drift_eigenvalue, RadialSolver};
pub use statics::{static_basis, StaticForm};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// One plane U R^n of a plane-union cone, with its grading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneComponent {
    /// Columns of a unitary matrix U; the plane is the real span.
    pub frame: Vec<Vec<Complex64>>,
    /// theta_W on this plane, a lift of arg det U.
    pub grading: f64,
    /// Decomposition label j; planes with equal labels belong to one W_j.
    pub label: usize,
}

impl PlaneComponent {
    /// The plane {(e^{i phi_1} x_1, .., e^{i phi_n} x_n)} graded by sum phi_k.
    pub fn diagonal(phases: &[f64], label: usize) -> Self {
        let n = phases.len();
        let frame = (0..n)
            .map(|k| {
                let mut col = vec![Complex64::new(0.0, 0.0); n];
                col[k] = Complex64::from_polar(1.0, phases[k]);
                col
            })
            .collect();
        Self {
            frame,
            grading: phases.iter().sum(),
            label,
        }
    }

    pub fn n(&self) -> usize {
        self.frame.len()
    }

    pub fn matrix(&self) -> DMatrix<Complex64> {
        let n = self.n();
        DMatrix::from_fn(n, n, |r, c| self.frame[c][r])
    }

    /// Image U x of intrinsic coordinates.
    pub fn embed(&self, x: &[f64]) -> Vec<Complex64> {
        let n = self.n();
        (0..n)
            .map(|r| (0..n).map(|c| self.frame[c][r] * x[c]).sum())
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n == 0 || self.frame.iter().any(|c| c.len() != n) {
            return Err(LabError::Parameter("plane frame must be n x n".into()));
        }
        let u = self.matrix();
        let gram = u.adjoint() * &u;
        let mut unitary: f64 = 0.0;
        let mut omega: f64 = 0.0;
        for r in 0..n {
            for c in 0..n {
                let target = if r == c { 1.0 } else { 0.0 };
                unitary = unitary.max((gram[(r, c)].re - target).abs());
                omega = omega.max(gram[(r, c)].im.abs());
            }
        }
        if omega > crate::geom::LAGRANGIAN_TOL {
            return Err(LabError::NonLagrangian {
                residual: omega,
                tolerance: crate::geom::LAGRANGIAN_TOL,
            });
        }
        if unitary > 1e-10 {
            return Err(LabError::Parameter(format!(
                "plane frame is not unitary (defect {unitary:.3e})"
            )));
        }
        let det = u.determinant();
        let d = crate::numerics::fd::nearest_branch(det.arg(), self.grading) - self.grading;
        if d.abs() > 1e-9 || !self.grading.is_finite() {
            return Err(LabError::Parameter(format!(
                "grading {} is not a lift of arg det U = {}",
                self.grading,
                det.arg()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneUnionCone {
    pub n: usize,
    pub components: Vec<PlaneComponent>,
}

impl PlaneUnionCone {
    pub fn new(components: Vec<PlaneComponent>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| LabError::Empty("cone has no components".into()))?;
        let n = first.n();
        for c in &components {
            if c.n() != n {
                return Err(LabError::Parameter("components of different dimension".into()));
            }
            c.validate()?;
        }
        Ok(Self { n, components })
    }

    /// The real plane R^n with grading 0.
    pub fn plane(n: usize) -> Self {
        Self {
            n,
            components: vec![PlaneComponent::diagonal(&vec![0.0; n], 0)],
        }
    }

    /// Union of diagonal planes, one label per plane.
    pub fn from_phases(phases: &[Vec<f64>]) -> Result<Self> {
        Self::new(
            phases
                .iter()
                .enumerate()
                .map(|(j, p)| PlaneComponent::diagonal(p, j))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn descriptor(&self) -> ConeDescriptor {
        if self.components.len() == 1 {
            ConeDescriptor::Plane { n: self.n }
        } else {
            ConeDescriptor::PlaneUnion {
                n: self.n,
                planes: self.components.len(),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    AnalyticPlane,
    LatticeTorus,
    Discretized,
}

/// Cone families with a computable link spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ConeDescriptor {
    /// A single n-plane; link S^{n-1}.
    Plane { n: usize },
    /// Disjoint union of `planes` n-planes meeting only at the origin.
    PlaneUnion { n: usize, planes: usize },
    /// Cone in C^3 over a flat torus R^2 / (Z b_1 + Z b_2).
    FlatTorus {
        basis: [[f64; 2]; 2],
        /// Dimension of the span of the coordinate functions on the cone.
        #[serde(default = "default_linear_span")]
        linear_span: usize,
        /// Dimension of the subgroup of SU(3) fixing the cone.
        #[serde(default = "default_torus_stabilizer")]
        stabilizer_dim: usize,
    },
    /// The T^2-cone, i.e. a flat torus with [`harvey_lawson_lattice`].
    HarveyLawson,
    /// User-supplied link eigenvalues known to within `resolution`.
    Discretized {
        n: usize,
        eigenvalues: Vec<f64>,
        resolution: f64,
        #[serde(default = "one")]
        components: usize,
        linear_span: usize,
        stabilizer_dim: usize,
    },
}

fn default_linear_span() -> usize {
    6
}
fn default_torus_stabilizer() -> usize {
    2
}
fn one() -> usize {
    1
}

pub const SUPPORTED_FAMILIES: [&str; 5] =
    ["plane", "plane-union", "flat-torus", "harvey-lawson", "discretized"];

impl ConeDescriptor {
    /// Parse a declarative descriptor, naming the supported families on failure.
    pub fn from_value(v: &serde_json::Value) -> Result<Self> {
        let family = v.get("family").and_then(|f| f.as_str()).unwrap_or("<missing>");
        if !SUPPORTED_FAMILIES.contains(&family) {
            return Err(LabError::Unsupported(format!(
                "cone family '{family}'; supported: {}",
                SUPPORTED_FAMILIES.join(", ")
            )));
        }
        serde_json::from_value(v.clone()).map_err(|e| LabError::Parameter(e.to_string()))
    }

    pub fn n(&self) -> usize {
        match self {
            Self::Plane { n } | Self::PlaneUnion { n, .. } | Self::Discretized { n, .. } => *n,
            Self::FlatTorus { .. } | Self::HarveyLawson => 3,
        }
    }
}

/// Lattice of the T^2 link of the Harvey–Lawson cone
/// {|z_1| = |z_2| = |z_3|, z_1 z_2 z_3 real positive} in S^5.
///
/// Parametrize the link by (e^{is}, e^{it}, e^{-i(s+t)})/sqrt 3 with
/// s, t in [0, 2 pi); the induced metric is (2 ds^2 + 2 ds dt + 2 dt^2)/3,
/// whose Gram matrix is realized by these two vectors.
pub fn harvey_lawson_lattice() -> [[f64; 2]; 2] {
    use std::f64::consts::PI;
    [
        [2.0 * PI * (2.0f64 / 3.0).sqrt(), 0.0],
        [2.0 * PI / 6f64.sqrt(), 2.0 * PI / 2f64.sqrt()],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumLevel {
    pub mu: f64,
    pub multiplicity: usize,
    pub degree: f64,
    /// Drift eigenvalue -degree/2.
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkSpectrum {
    pub n: usize,
    pub levels: Vec<SpectrumLevel>,
    pub provenance: Provenance,
    /// Eigenvalue uncertainty for discretized spectra.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<f64>,
    /// Largest eigenvalue requested; levels are complete up to here.
    pub mu_max: f64,
}

impl LinkSpectrum {
    fn build(n: usize, mut raw: Vec<(f64, usize)>, provenance: Provenance, mu_max: f64, tol: f64) -> Self {
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut levels: Vec<SpectrumLevel> = Vec::new();
        for (mu, m) in raw {
            if let Some(last) = levels.last_mut() {
                if (mu - last.mu).abs() <= tol * last.mu.abs().max(1.0) {
                    last.multiplicity += m;
                    continue;
                }
            }
            let d = degree_of(mu, n);
            levels.push(SpectrumLevel {
                mu,
                multiplicity: m,
                degree: d,
                lambda: -d / 2.0,
            });
        }
        Self {
            n,
            levels,
            provenance,
            resolution: None,
            mu_max,
        }
    }

    pub fn multiplicity_of(&self, mu: f64, tol: f64) -> usize {
        self.levels
            .iter()
            .filter(|l| (l.mu - mu).abs() <= tol)
            .map(|l| l.multiplicity)
            .sum()
    }
}

fn binomial(n: i64, k: i64) -> i64 {
    if k < 0 || n < k || n < 0 {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: i64 = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Dimension of degree-k spherical harmonics on S^{n-1}.
pub fn sphere_multiplicity(n: usize, k: usize) -> usize {
    let (n, k) = (n as i64, k as i64);
    if n == 1 {
        return if k == 0 { 2 } else { 0 };
    }
    (binomial(n + k - 1, k) - binomial(n + k - 3, k - 2)) as usize
}

/// Link spectrum up to `mu_max`, sorted with multiplicities.
pub fn link_spectrum(desc: &ConeDescriptor, mu_max: f64) -> Result<LinkSpectrum> {
    if !(mu_max >= 0.0) {
        return Err(LabError::Parameter("mu_max must be nonnegative".into()));
    }
    match desc {
        ConeDescriptor::Plane { n } | ConeDescriptor::PlaneUnion { n, .. } => {
            let planes = match desc {
                ConeDescriptor::PlaneUnion { planes, .. } => *planes,
                _ => 1,
            };
            if *n < 2 || planes == 0 {
                return Err(LabError::Parameter("planes need n >= 2 and at least one component".into()));
            }
            let mut raw = Vec::new();
            for k in 0.. {
                let mu = (k * (k + n - 2)) as f64;
                if mu > mu_max {
                    break;
                }
                raw.push((mu, planes * sphere_multiplicity(*n, k)));
            }
            Ok(LinkSpectrum::build(*n, raw, Provenance::AnalyticPlane, mu_max, 0.0))
        }
        ConeDescriptor::FlatTorus { basis, .. } => torus_spectrum(basis, mu_max),
        ConeDescriptor::HarveyLawson => torus_spectrum(&harvey_lawson_lattice(), mu_max),
        ConeDescriptor::Discretized {
            n,
            eigenvalues,
            resolution,
            ..
        } => {
            if eigenvalues.iter().any(|m| !(*m >= -resolution)) {
                return Err(LabError::Parameter("link eigenvalues must be nonnegative".into()));
            }
            let mut sorted: Vec<f64> = eigenvalues.iter().cloned().filter(|m| *m <= mu_max).collect();
            sorted.sort_by(|a, b| a.total_cmp(b));
            // single-linkage clusters at the stated resolution
            let mut raw: Vec<(f64, usize)> = Vec::new();
            let mut cluster: Vec<f64> = Vec::new();
            for m in sorted {
                if let Some(&last) = cluster.last() {
                    if m - last > *resolution {
                        let mean = cluster.iter().sum::<f64>() / cluster.len() as f64;
                        raw.push((mean.max(0.0), cluster.len()));
                        cluster.clear();
                    }
                }
                cluster.push(m);
            }
            if !cluster.is_empty() {
                let mean = cluster.iter().sum::<f64>() / cluster.len() as f64;
                raw.push((mean.max(0.0), cluster.len()));
            }
            let mut s = LinkSpectrum::build(*n, raw, Provenance::Discretized, mu_max, 0.0);
            s.resolution = Some(*resolution);
            Ok(s)
        }
    }
}

fn torus_spectrum(basis: &[[f64; 2]; 2], mu_max: f64) -> Result<LinkSpectrum> {
    use std::f64::consts::PI;
    let b = nalgebra::Matrix2::new(basis[0][0], basis[1][0], basis[0][1], basis[1][1]);
    let binv = b
        .try_inverse()
        .ok_or_else(|| LabError::Parameter("torus lattice basis is degenerate".into()))?;
    // dual lattice vectors are the rows of B^{-1}
    let dual = |k: i64, l: i64| -> f64 {
        let w0 = binv[(0, 0)] * k as f64 + binv[(1, 0)] * l as f64;
        let w1 = binv[(0, 1)] * k as f64 + binv[(1, 1)] * l as f64;
        4.0 * PI * PI * (w0 * w0 + w1 * w1)
    };
    // |w| >= sigma_min |(k,l)|, so |(k,l)| <= sqrt(mu_max) / (2 pi sigma_min)
    let sv = binv.transpose().singular_values();
    let sigma_min = sv.min();
    let reach = (mu_max.sqrt() / (2.0 * PI * sigma_min)).ceil() as i64 + 1;
    let mut raw = Vec::new();
    for k in -reach..=reach {
        for l in -reach..=reach {
            let mu = dual(k, l);
            if mu <= mu_max * (1.0 + 1e-12) {
                raw.push((mu, 1));
            }
        }
    }
    Ok(LinkSpectrum::build(3, raw, Provenance::LatticeTorus, mu_max, 1e-9))
}

/// Positive root of d (d + n - 2) = mu.
pub fn degree_of(mu: f64, n: usize) -> f64 {
    let b = n as f64 - 2.0;
    if mu <= 0.0 {
        return 0.0;
    }
    // (-b + sqrt(b^2 + 4 mu)) / 2 without cancellation
    2.0 * mu / (b + (b * b + 4.0 * mu).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicMode {
    pub degree: f64,
    pub n: usize,
    /// Link eigenvalue d (d + n - 2).
    pub mu: f64,
    /// Drift eigenvalue -d/2.
    pub lambda: f64,
    /// Rescaled-time growth exponent lambda + 1.
    pub growth: f64,
}

pub fn drift_mode(d: f64, n: usize) -> Result<HarmonicMode> {
    if !(d >= 0.0) || !d.is_finite() {
        return Err(LabError::Parameter(format!("degree must be >= 0, got {d}")));
    }
    let lambda = -d / 2.0;
    Ok(HarmonicMode {
        degree: d,
        n,
        mu: d * (d + n as f64 - 2.0),
        lambda,
        growth: lambda + 1.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeCount {
    pub degree: f64,
    pub found: usize,
    pub expected: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub is_stable: bool,
    /// Degrees in [0, 2] whose multiplicity differs from the expected count.
    pub offending: Vec<DegreeCount>,
    /// Every degree in [0, 2] with its accounting.
    pub accounting: Vec<DegreeCount>,
}

/// Compare multiplicities of harmonic degrees in [0, 2] with constants,
/// coordinate functions and quadratics induced by su(n).
pub fn stability_check(desc: &ConeDescriptor) -> Result<StabilityReport> {
    let n = desc.n();
    let (linear, stabilizer, components) = match desc {
        ConeDescriptor::Plane { n } => (*n, n * (n - 1) / 2, 1),
        ConeDescriptor::PlaneUnion { planes, .. } => (0, 0, *planes),
        ConeDescriptor::FlatTorus {
            linear_span,
            stabilizer_dim,
            ..
        } => (*linear_span, *stabilizer_dim, 1),
        ConeDescriptor::HarveyLawson => (6, 2, 1),
        ConeDescriptor::Discretized {
            linear_span,
            stabilizer_dim,
            components,
            ..
        } => (*linear_span, *stabilizer_dim, *components),
    };
    if components != 1 {
        return Err(LabError::Hypothesis(format!(
            "stability needs a connected link, this cone has {components} components"
        )));
    }
    let mu2 = 2.0 * n as f64;
    let spec = link_spectrum(desc, mu2 + 1.0)?;
    // degree 2 must be separable from its neighbours
    let tol = match spec.resolution {
        Some(res) => {
            let required = 0.5 * (mu2 - (n as f64 - 1.0));
            if res >= required {
                return Err(LabError::Resolution {
                    resolution: res,
                    required,
                });
            }
            res
        }
        None => 1e-9 * mu2,
    };
    let expected = |d: f64| -> Option<usize> {
        let close = |x: f64| (d - x).abs() <= tol;
        if close(0.0) {
            Some(1)
        } else if close(1.0) {
            Some(linear)
        } else if close(2.0) {
            Some(n * n - 1 - stabilizer)
        } else {
            None
        }
    };
    let mut accounting = Vec::new();
    let mut seen = [false; 3];
    for level in spec.levels.iter().filter(|l| l.mu <= mu2 + tol) {
        let e = expected(level.degree);
        if let Some(k) = [0.0, 1.0, 2.0].iter().position(|x| (level.degree - x).abs() <= tol) {
            seen[k] = true;
        }
        accounting.push(DegreeCount {
            degree: level.degree,
            found: level.multiplicity,
            expected: e.unwrap_or(0),
        });
    }
    for (k, s) in seen.iter().enumerate() {
        let d = k as f64;
        let e = expected(d).unwrap_or(0);
        if !s && e > 0 {
            accounting.push(DegreeCount {
                degree: d,
                found: 0,
                expected: e,
            });
        }
    }
    accounting.sort_by(|a, b| a.degree.total_cmp(&b.degree));
    let offending: Vec<DegreeCount> = accounting
        .iter()
        .filter(|c| c.found != c.expected)
        .cloned()
        .collect();
    Ok(StabilityReport {
        is_stable: offending.is_empty(),
        offending,
        accounting,
    })
}
