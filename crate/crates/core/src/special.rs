//! Scalar Gaussian probability kernels and a planar region-probability oracle.
//!
//! Everything downstream (wedge formulas, exact SPER assembly, coordinate
//! transforms) is validated against [`gaussian_region_prob`], a deterministic
//! quadrature of a bivariate Gaussian over a convex region. The scalar kernels
//! [`q1`] and [`q2`] are the one- and two-dimensional Gaussian tail functions
//! in their angular (Craig) form.

use std::sync::OnceLock;

use crate::{Error, Result};

pub(crate) const SQRT_2: f64 = std::f64::consts::SQRT_2;
const REL_TOL: f64 = 1e-12;
const ABS_FLOOR: f64 = 1e-15;
/// Truncation radius for region integrals, in whitened standard deviations.
/// The Gaussian mass beyond it is below 1e-22, far under every tolerance used
/// by the validation suites.
const SUPPORT_RADIUS: f64 = 10.0;

/// A bivariate Gaussian with arbitrary mean and covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSpec {
    pub mean: [f64; 2],
    pub covariance: [[f64; 2]; 2],
}

impl GaussianSpec {
    /// Isotropic Gaussian with the given per-axis variance.
    pub fn isotropic(mean: [f64; 2], variance: f64) -> Self {
        Self {
            mean,
            covariance: [[variance, 0.0], [0.0, variance]],
        }
    }

    pub fn standard() -> Self {
        Self::isotropic([0.0, 0.0], 1.0)
    }
}

/// Closed half-plane `{ z : normal . z >= offset }`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlane {
    pub normal: [f64; 2],
    pub offset: f64,
}

impl HalfPlane {
    pub fn new(normal: [f64; 2], offset: f64) -> Self {
        Self { normal, offset }
    }

    /// Half-plane containing every point at least as close to `a` as to `b`.
    pub fn closer_to(a: [f64; 2], b: [f64; 2]) -> Self {
        let normal = [a[0] - b[0], a[1] - b[1]];
        let offset = 0.5 * (a[0] * a[0] + a[1] * a[1] - b[0] * b[0] - b[1] * b[1]);
        Self { normal, offset }
    }

    /// Half-plane through `point` keeping the side `normal` points into.
    pub fn through(point: [f64; 2], normal: [f64; 2]) -> Self {
        Self {
            normal,
            offset: normal[0] * point[0] + normal[1] * point[1],
        }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        self.signed_excess(p) >= 0.0
    }

    /// `normal . p - offset`; positive inside, negative outside.
    pub fn signed_excess(&self, p: [f64; 2]) -> f64 {
        self.normal[0] * p[0] + self.normal[1] * p[1] - self.offset
    }
}

/// Intersection of up to a handful of closed half-planes, possibly unbounded.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvexRegion {
    pub half_planes: Vec<HalfPlane>,
}

impl ConvexRegion {
    pub fn new(half_planes: Vec<HalfPlane>) -> Self {
        Self { half_planes }
    }

    /// The whole plane.
    pub fn full_plane() -> Self {
        Self {
            half_planes: Vec::new(),
        }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        self.half_planes.iter().all(|h| h.contains(p))
    }
}

/// Probability mass of a Gaussian over a convex region, plus a flag marking
/// regions with no interior inside the truncated support window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionProb {
    pub value: f64,
    pub degenerate: bool,
}

// ---------------------------------------------------------------------------
// Adaptive quadrature
// ---------------------------------------------------------------------------

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let kf = k as f64;
        let p_next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = p_next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1], found by
/// Newton iteration on the Legendre polynomial roots.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(n);
    for i in 1..=n {
        let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let step = p / dp;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((x, w));
    }
    rule
}

fn gl15() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(15))
}

fn gl15_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut sum = 0.0;
    for &(x, w) in gl15() {
        sum += w * f(mid + half * x);
    }
    sum * half
}

fn integrate_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let mid = 0.5 * (a + b);
    let left = gl15_panel(f, a, mid);
    let right = gl15_panel(f, mid, b);
    let refined = left + right;
    let err = (refined - whole).abs();
    if err <= tol || depth >= 48 {
        return refined;
    }
    integrate_rec(f, a, mid, left, 0.5 * tol, depth + 1)
        + integrate_rec(f, mid, b, right, 0.5 * tol, depth + 1)
}

/// Adaptive Gauss-Legendre integration by nested panel refinement, relative
/// tolerance 1e-12 with an absolute floor of 1e-15.
pub(crate) fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let whole = gl15_panel(&f, a, b);
    let tol = ABS_FLOOR.max(REL_TOL * whole.abs());
    integrate_rec(&f, a, b, whole, tol, 0)
}

// ---------------------------------------------------------------------------
// Scalar kernels
// ---------------------------------------------------------------------------

/// Standard Gaussian tail `P(N(0,1) > x)`, unchecked.
pub(crate) fn normal_tail(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// Standard Gaussian CDF, unchecked.
pub(crate) fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Standard Gaussian density.
pub(crate) fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Craig-form partial tail integral
/// `(1/pi) * Integral_0^upper exp(-x^2 / (2 sin^2 psi)) dpsi` for `x >= 0`.
///
/// At `upper = pi/2` this equals the Gaussian tail `q1(x)`; smaller upper
/// limits give the two-dimensional kernel behind [`q2`] and the sector
/// probabilities used by the wedge decompositions.
pub(crate) fn craig(x: f64, upper: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if upper <= 0.0 {
        return 0.0;
    }
    if x == 0.0 {
        return upper / std::f64::consts::PI;
    }
    let half_x2 = 0.5 * x * x;
    integrate(
        |psi: f64| {
            let s = psi.sin();
            if s == 0.0 {
                0.0
            } else {
                (-half_x2 / (s * s)).exp()
            }
        },
        0.0,
        upper,
    ) / std::f64::consts::PI
}

/// One-dimensional Gaussian tail probability `Q1(x)`.
pub fn q1(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::InvalidArgument(format!("q1: non-finite input {x}")));
    }
    Ok(normal_tail(x))
}

/// Angular upper limit `arctan(sqrt((1+rho)/(1-rho)))` of the equal-argument
/// two-dimensional tail integral.
pub(crate) fn q2_upper_limit(rho: f64) -> f64 {
    ((1.0 + rho) / (1.0 - rho)).sqrt().atan()
}

/// Equal-argument two-dimensional Gaussian tail `Q2(x, x; rho)` in its
/// single-integral form `(1/pi) * Integral_0^arctan(sqrt((1+rho)/(1-rho)))
/// exp(-x^2/(2 sin^2 phi)) dphi`.
pub fn q2(x: f64, rho: f64) -> Result<f64> {
    if !x.is_finite() || !rho.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "q2: non-finite input x={x} rho={rho}"
        )));
    }
    if rho.abs() >= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "q2: correlation {rho} outside (-1, 1)"
        )));
    }
    if x < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "q2: negative argument {x}; negate at the call site"
        )));
    }
    Ok(craig(x, q2_upper_limit(rho)))
}

/// Upper-orthant probability `P(X > z1, Y > z2)` of a standard bivariate
/// Gaussian pair with correlation `rho`, via the smooth single integral
/// `Q(z1)Q(z2) + (1/2pi) * Integral_0^arcsin(rho)
/// exp(-(z1^2 + z2^2 - 2 z1 z2 sin t) / (2 cos^2 t)) dt`.
pub fn bvn_upper(z1: f64, z2: f64, rho: f64) -> Result<f64> {
    if !z1.is_finite() || !z2.is_finite() || !rho.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "bvn_upper: non-finite input ({z1}, {z2}, {rho})"
        )));
    }
    if rho.abs() >= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "bvn_upper: correlation {rho} outside (-1, 1)"
        )));
    }
    let base = normal_tail(z1) * normal_tail(z2);
    if rho == 0.0 {
        return Ok(base);
    }
    let correction = integrate(
        |t: f64| {
            let c = t.cos();
            (-(z1 * z1 + z2 * z2 - 2.0 * z1 * z2 * t.sin()) / (2.0 * c * c)).exp()
        },
        0.0,
        rho.asin(),
    ) / (2.0 * std::f64::consts::PI);
    Ok((base + correction).clamp(0.0, 1.0))
}

// ---------------------------------------------------------------------------
// Symmetric 2x2 eigendecomposition
// ---------------------------------------------------------------------------

/// Eigendecomposition of a symmetric 2x2 matrix.
///
/// Returns `(eigenvalues, q)` with eigenvalues in descending order and `q` a
/// rotation (determinant +1) whose rows are the matching unit eigenvectors,
/// so that `q * m * q^T = diag(eigenvalues)`.
pub fn eigen_2x2(m: [[f64; 2]; 2]) -> Result<([f64; 2], [[f64; 2]; 2])> {
    let scale = m
        .iter()
        .flatten()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(1.0);
    if m.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "eigen_2x2: non-finite entries".into(),
        ));
    }
    if (m[0][1] - m[1][0]).abs() > 1e-12 * scale {
        return Err(Error::InvalidArgument(format!(
            "eigen_2x2: matrix not symmetric ({} vs {})",
            m[0][1], m[1][0]
        )));
    }
    let (b11, b12, b22) = (m[0][0], 0.5 * (m[0][1] + m[1][0]), m[1][1]);
    let disc = (b11 * b11 + b22 * b22 + 4.0 * b12 * b12 - 2.0 * b11 * b22).max(0.0);
    let root = disc.sqrt();
    let l1 = 0.5 * (b11 + b22 + root);
    let l2 = 0.5 * (b11 + b22 - root);

    if root <= 1e-300 * scale.max(1.0) || b12 == 0.0 {
        // Diagonal (or isotropic) input: align axes, larger eigenvalue first.
        return if b11 >= b22 {
            Ok(([l1, l2], [[1.0, 0.0], [0.0, 1.0]]))
        } else {
            Ok(([l1, l2], [[0.0, 1.0], [-1.0, 0.0]]))
        };
    }

    // Eigenvector for l1 from the better-conditioned row of (m - l1 I).
    let cand_a = [b12, l1 - b11];
    let cand_b = [l1 - b22, b12];
    let v = if cand_a[0] * cand_a[0] + cand_a[1] * cand_a[1]
        >= cand_b[0] * cand_b[0] + cand_b[1] * cand_b[1]
    {
        cand_a
    } else {
        cand_b
    };
    let norm = (v[0] * v[0] + v[1] * v[1]).sqrt();
    let e1 = [v[0] / norm, v[1] / norm];
    // Rotation rows: second eigenvector chosen so det = +1.
    let e2 = [-e1[1], e1[0]];
    Ok(([l1, l2], [e1, e2]))
}

// ---------------------------------------------------------------------------
// Region probability oracle
// ---------------------------------------------------------------------------

fn clip_polygon(poly: &[[f64; 2]], plane: &HalfPlane) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(poly.len() + 2);
    let n = poly.len();
    for i in 0..n {
        let cur = poly[i];
        let next = poly[(i + 1) % n];
        let dc = plane.signed_excess(cur);
        let dn = plane.signed_excess(next);
        if dc >= 0.0 {
            out.push(cur);
        }
        if (dc > 0.0 && dn < 0.0) || (dc < 0.0 && dn > 0.0) {
            let t = dc / (dc - dn);
            out.push([
                cur[0] + t * (next[0] - cur[0]),
                cur[1] + t * (next[1] - cur[1]),
            ]);
        }
    }
    out
}

fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    let mut twice = 0.0;
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        twice += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * twice.abs()
}

/// Standard-Gaussian mass over a convex polygon, by slab decomposition:
/// between consecutive vertex abscissas the boundary is a single linear top
/// and bottom edge, so the mass is a smooth one-dimensional integral of
/// `pdf(x) * (Phi(top(x)) - Phi(bottom(x)))`.
fn polygon_standard_mass(poly: &[[f64; 2]]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut xs: Vec<f64> = poly.iter().map(|p| p[0]).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup_by(|a, b| (*a - *b).abs() < 1e-13);

    let n = poly.len();
    let mut total = 0.0;
    for w in xs.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        if x1 - x0 < 1e-13 {
            continue;
        }
        let xm = 0.5 * (x0 + x1);
        // Edges spanning the slab, evaluated at its midpoint; the extreme two
        // are the linear top and bottom boundaries over the whole slab.
        let mut top: Option<(f64, f64)> = None;
        let mut bot: Option<(f64, f64)> = None;
        for i in 0..n {
            let p = poly[i];
            let q = poly[(i + 1) % n];
            let (lo, hi) = if p[0] <= q[0] {
                (p[0], q[0])
            } else {
                (q[0], p[0])
            };
            if lo > xm || hi < xm || (hi - lo) < 1e-13 {
                continue;
            }
            let slope = (q[1] - p[1]) / (q[0] - p[0]);
            let intercept = p[1] - slope * p[0];
            let y = slope * xm + intercept;
            if top.is_none() || y > top.unwrap().0 * xm + top.unwrap().1 {
                top = Some((slope, intercept));
            }
            if bot.is_none() || y < bot.unwrap().0 * xm + bot.unwrap().1 {
                bot = Some((slope, intercept));
            }
        }
        let (Some((ts, ti)), Some((bs, bi))) = (top, bot) else {
            continue;
        };
        total += integrate(
            |x: f64| normal_pdf(x) * (normal_cdf(ts * x + ti) - normal_cdf(bs * x + bi)),
            x0,
            x1,
        );
    }
    total
}

/// Probability mass of `g` over `region`, by deterministic quadrature.
///
/// The plane is whitened so the Gaussian becomes standard, the region is
/// clipped to the 10-sigma support square, and the resulting convex polygon
/// is integrated slab by slab. Absolute accuracy is well under 1e-9. Regions
/// with no interior inside the support window come back as zero with the
/// degeneracy flag set.
pub fn gaussian_region_prob(g: &GaussianSpec, region: &ConvexRegion) -> Result<RegionProb> {
    let cov = g.covariance;
    let (eig, q) = eigen_2x2(cov)?;
    if eig[1] <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "gaussian_region_prob: covariance not positive definite (eigenvalues {:?})",
            eig
        )));
    }
    let s = [eig[0].sqrt(), eig[1].sqrt()];

    // Whitening map w = S^-1 Q (z - mean) sends g to the standard Gaussian.
    // A half-plane n.z >= c becomes m.w >= c' with m = S Q n and
    // c' = c - n.mean.
    let mut square = vec![
        [-SUPPORT_RADIUS, -SUPPORT_RADIUS],
        [SUPPORT_RADIUS, -SUPPORT_RADIUS],
        [SUPPORT_RADIUS, SUPPORT_RADIUS],
        [-SUPPORT_RADIUS, SUPPORT_RADIUS],
    ];
    for h in &region.half_planes {
        let n = h.normal;
        let rotated = [
            q[0][0] * n[0] + q[0][1] * n[1],
            q[1][0] * n[0] + q[1][1] * n[1],
        ];
        let m = [s[0] * rotated[0], s[1] * rotated[1]];
        let offset = h.offset - (n[0] * g.mean[0] + n[1] * g.mean[1]);
        square = clip_polygon(&square, &HalfPlane::new(m, offset));
        if square.is_empty() {
            return Ok(RegionProb {
                value: 0.0,
                degenerate: true,
            });
        }
    }
    if polygon_area(&square) < 1e-24 {
        return Ok(RegionProb {
            value: 0.0,
            degenerate: true,
        });
    }
    Ok(RegionProb {
        value: polygon_standard_mass(&square).clamp(0.0, 1.0),
        degenerate: false,
    })
}
