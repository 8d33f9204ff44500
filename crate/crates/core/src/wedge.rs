//! Exact probabilities of wedge- and chain-shaped decision regions under
//! isotropic Gaussian noise.
//!
//! The engine is a sector calculus: the probability that a Gaussian point
//! falls in an angular sector at an apex a known distance from the mean has
//! a one-dimensional integral form. Every decision cell produced by
//! [`crate::geometry`] is a wedge or a difference of two nested wedges, so
//! cell probabilities reduce to a handful of sector evaluations.
//!
//! On top of the engine sit the five published closed-form prototypes
//! (`p_w1`..`p_w5`). The first three are the printed formulas on their valid
//! domains. The two conditioning-point-inside forms are printed with damaged
//! normalization constants; the public functions use the geometry-faithful
//! forms, and [`variants`] keeps the printed ones so tests can report the
//! discrepancy instead of silently repairing it.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::geometry::{
    vcross, vdist, vdot, vnorm, vperp, vscale, vsub, vunit, CellShape, Point, WedgeRegion,
};
use crate::special::{craig, gaussian_region_prob, q1, q2, ConvexRegion, GaussianSpec};
use crate::{Error, Result};

fn rot(v: Point, ang: f64) -> Point {
    let (s, c) = ang.sin_cos();
    [c * v[0] - s * v[1], s * v[0] + c * v[1]]
}

fn unsigned_angle(u: Point, v: Point) -> f64 {
    vcross(u, v).abs().atan2(vdot(u, v))
}

fn signed_angle(u: Point, v: Point) -> f64 {
    vcross(u, v).atan2(vdot(u, v))
}

fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// Probability that a unit isotropic Gaussian point lands in the sector at
/// an apex `z` standard deviations from the mean, spanned counterclockwise
/// from the away ray (pointing from mean through apex) to the ray at angle
/// `phi`, for `phi` in [0, pi].
fn sector_base(z: f64, phi: f64) -> f64 {
    debug_assert!((0.0..=PI + 1e-12).contains(&phi));
    let phi = phi.clamp(0.0, PI);
    if z < 1e-14 {
        return phi / TAU;
    }
    let x = z * phi.sin();
    if phi <= FRAC_PI_2 {
        0.5 * craig(x, phi)
    } else {
        // Split at the perpendicular and reflect the remainder.
        normal_tail_prob(x) - 0.5 * craig(x, PI - phi)
    }
}

fn normal_tail_prob(x: f64) -> f64 {
    // q1 only rejects non-finite input, which cannot happen here.
    q1(x).expect("finite tail argument")
}

/// Cumulative sector probability from the away ray through angle `theta` in
/// [0, 2 pi], counterclockwise.
fn away_cdf(z: f64, theta: f64) -> f64 {
    if theta <= PI {
        sector_base(z, theta)
    } else {
        1.0 - sector_base(z, TAU - theta)
    }
}

fn pick_ray(along: Point, other_normal: Point) -> Option<Point> {
    let p = vperp(along);
    let s = vdot(other_normal, p);
    if s.abs() < 1e-12 {
        return None;
    }
    Some(if s >= 0.0 { p } else { vscale(-1.0, p) })
}

/// Boundary ray directions of a wedge, each along one normal's line and
/// pointing into the other half-plane.
fn ray_dirs(n1: Point, n2: Point) -> Option<[Point; 2]> {
    Some([pick_ray(n1, n2)?, pick_ray(n2, n1)?])
}

/// Probability of a wedge region under an isotropic Gaussian with the given
/// per-axis standard deviation.
pub fn wedge_region_prob(mean: Point, per_dim_std: f64, w: &WedgeRegion) -> Result<f64> {
    if !(per_dim_std.is_finite() && per_dim_std > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "noise standard deviation {per_dim_std} must be positive"
        )));
    }
    let n1 = vunit(w.n1);
    let n2 = vunit(w.n2);
    if !(n1[0].is_finite() && n2[0].is_finite()) {
        return Err(Error::InvalidArgument("wedge normal has zero length".into()));
    }
    if vcross(n1, n2).abs() < 1e-10 {
        if vdot(n1, n2) > 0.0 {
            // Coincident boundary lines: a single half-plane.
            let s = vdot(n1, vsub(w.apex, mean)) / per_dim_std;
            return q1(s);
        }
        // Opposing half-planes through one line: measure zero.
        return Ok(0.0);
    }
    let rel = vsub(w.apex, mean);
    let z = vnorm(rel) / per_dim_std;
    let e_away = if z > 1e-12 { vunit(rel) } else { [1.0, 0.0] };
    let rays = ray_dirs(n1, n2).expect("non-parallel normals have rays");
    let mut theta = rays.map(|d| {
        let a = signed_angle(e_away, d);
        if a < 0.0 {
            a + TAU
        } else {
            a
        }
    });
    // The wedge is the counterclockwise run between the rays whose interior
    // direction satisfies both half-planes.
    let score = |start: f64, width: f64| {
        let mid = rot(e_away, start + 0.5 * width);
        vdot(n1, mid).min(vdot(n2, mid))
    };
    let width_fwd = (theta[1] - theta[0]).rem_euclid(TAU);
    let fwd = score(theta[0], width_fwd);
    let rev = score(theta[1], TAU - width_fwd);
    if rev > fwd {
        theta.swap(0, 1);
    }
    let (a, b) = (theta[0], theta[1]);
    let p = if b >= a {
        away_cdf(z, b) - away_cdf(z, a)
    } else {
        1.0 - away_cdf(z, a) + away_cdf(z, b)
    };
    Ok(clamp01(p))
}

/// Probability of a cell shape (wedge, or outer wedge minus nested inner
/// wedge) under an isotropic Gaussian.
pub fn cell_shape_prob(mean: Point, per_dim_std: f64, shape: &CellShape) -> Result<f64> {
    match shape {
        CellShape::Wedge(w) => wedge_region_prob(mean, per_dim_std, w),
        CellShape::Chain { outer, inner } => {
            let po = wedge_region_prob(mean, per_dim_std, outer)?;
            let pi = wedge_region_prob(mean, per_dim_std, inner)?;
            Ok(clamp01(po - pi))
        }
    }
}

fn check_distance(d: f64, name: &str) -> Result<()> {
    if !d.is_finite() || d < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "normalized squared distance {name} = {d} must be nonnegative"
        )));
    }
    Ok(())
}

/// Wedge probability with the conditioning point outside and both side
/// angles on the same side of the apex line (both measured from the
/// extension of the point-to-apex line, in [0, pi/2]).
pub fn p_w1(d_ik: f64, phi1: f64, phi2: f64) -> Result<f64> {
    check_distance(d_ik, "d_ik")?;
    if !(phi1.is_finite() && phi2.is_finite()) {
        return Err(Error::InvalidArgument("non-finite angle".into()));
    }
    if phi1 * phi2 < 0.0 {
        return Err(Error::InvalidArgument(
            "opposite-sign angles form a straddling wedge; use p_w2".into(),
        ));
    }
    // Clockwise pairs mirror onto counterclockwise ones.
    let (a, b) = if phi1 <= 0.0 && phi2 <= 0.0 {
        (-phi1, -phi2)
    } else {
        (phi1, phi2)
    };
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    if hi > FRAC_PI_2 + 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "angle {hi} beyond a quarter turn; outside this prototype's domain"
        )));
    }
    let z = (2.0 * d_ik).sqrt();
    Ok(clamp01(sector_base(z, hi.min(FRAC_PI_2)) - sector_base(z, lo)))
}

/// Wedge probability with the conditioning point outside and the two side
/// angles straddling the apex line (opposite signs, each at most pi/2 in
/// magnitude).
pub fn p_w2(d_ik: f64, phi1: f64, phi2: f64) -> Result<f64> {
    check_distance(d_ik, "d_ik")?;
    if !(phi1.is_finite() && phi2.is_finite()) {
        return Err(Error::InvalidArgument("non-finite angle".into()));
    }
    if phi1 * phi2 >= 0.0 {
        return Err(Error::InvalidArgument(
            "same-sign angles form a one-sided wedge; use p_w1".into(),
        ));
    }
    let pos = phi1.max(phi2);
    let neg = phi1.min(phi2);
    if pos > FRAC_PI_2 + 1e-12 || -neg > FRAC_PI_2 + 1e-12 {
        return Err(Error::InvalidArgument(
            "straddling angles beyond a quarter turn are outside this prototype's domain".into(),
        ));
    }
    let z = (2.0 * d_ik).sqrt();
    Ok(clamp01(
        sector_base(z, pos.min(FRAC_PI_2)) + sector_base(z, (-neg).min(FRAC_PI_2)),
    ))
}

/// Difference of two wedge probabilities: the `m`-prototype at the vertex
/// carrying (`d_ij`, `phi1`, `phi2`) minus the `n`-prototype at the vertex
/// carrying (`d_ik`, `phi3`, `phi4`).
#[allow(clippy::too_many_arguments)]
pub fn p_w3(
    d_ij: f64,
    d_ik: f64,
    phi1: f64,
    phi2: f64,
    phi3: f64,
    phi4: f64,
    m: u8,
    n: u8,
) -> Result<f64> {
    let call = |proto: u8, d: f64, a: f64, b: f64| -> Result<f64> {
        match proto {
            1 => p_w1(d, a, b),
            2 => p_w2(d, a, b),
            other => Err(Error::InvalidArgument(format!(
                "sub-prototype selector {other} must be 1 or 2"
            ))),
        }
    };
    let first = call(m, d_ij, phi1, phi2)?;
    let second = call(n, d_ik, phi3, phi4)?;
    Ok(clamp01(first - second))
}

/// Probability that the received point stays inside a wedge containing the
/// conditioning point. `phi1` and `phi2` are the angles between the line
/// from the apex to the conditioning point and the two wedge sides, each in
/// (0, pi].
pub fn p_w4(d_ik: f64, phi1: f64, phi2: f64) -> Result<f64> {
    check_distance(d_ik, "d_ik")?;
    for (name, phi) in [("phi1", phi1), ("phi2", phi2)] {
        if !phi.is_finite() || phi <= 0.0 || phi > PI + 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "{name} = {phi} must lie in (0, pi]"
            )));
        }
    }
    let z = (2.0 * d_ik).sqrt();
    Ok(clamp01(
        1.0 - sector_base(z, (PI - phi1).max(0.0)) - sector_base(z, (PI - phi2).max(0.0)),
    ))
}

/// Probability that the received point stays inside a chain region bounded
/// by a segment between two corners and a ray from each corner, with the
/// conditioning point inside.
///
/// `d_ik`/`d_ij` are the normalized squared distances to the first and
/// second corner; `phi1`/`phi2` are the angles between each corner's ray and
/// the extension of the line from the conditioning point through that
/// corner; `phi3` is the angle at the conditioning point between the two
/// corner directions; `phi4`, the angle at the first corner between the
/// conditioning point and the second corner, is redundant and only checked.
pub fn p_w5(d_ik: f64, d_ij: f64, phi1: f64, phi2: f64, phi3: f64, phi4: f64) -> Result<f64> {
    check_distance(d_ik, "d_ik")?;
    check_distance(d_ij, "d_ij")?;
    for (name, phi) in [("phi1", phi1), ("phi2", phi2)] {
        if !phi.is_finite() || phi <= 0.0 || phi >= PI {
            return Err(Error::InvalidArgument(format!(
                "{name} = {phi} must lie strictly inside (0, pi)"
            )));
        }
    }
    if !(0.0..=PI).contains(&phi3) || !phi4.is_finite() || !(-1e-9..=PI + 1e-9).contains(&phi4) {
        return Err(Error::InvalidArgument(
            "corner angles must lie in [0, pi]".into(),
        ));
    }
    let zk = (2.0 * d_ik).sqrt();
    let zj = (2.0 * d_ij).sqrt();
    let mk: Point = [zk, 0.0];
    let mj: Point = [zj * phi3.cos(), zj * phi3.sin()];
    let seg = vdist(mk, mj);
    if seg <= 1e-9 * (1.0 + zk.max(zj)) {
        // Coincident corners collapse the chain to a single wedge.
        return p_w4(d_ik, PI - phi1, PI - phi2);
    }
    if zk <= 1e-12 || zj <= 1e-12 {
        return Err(Error::InvalidArgument(
            "conditioning point coincides with a distinct corner".into(),
        ));
    }
    let at_corner = unsigned_angle(vscale(-1.0, mk), vsub(mj, mk));
    if (at_corner - phi4).abs() > 1e-6 {
        return Err(Error::InvalidArgument(format!(
            "corner angle {phi4} inconsistent with the triangle (expected {at_corner})"
        )));
    }
    // Rays leave each corner on the side of its conditioning-point line
    // away from the other corner; the second corner sits at y >= 0.
    let dk = rot([-1.0, 0.0], PI - phi1);
    let tj = vunit(vscale(-1.0, mj));
    let dj = rot(tj, -(PI - phi2));
    let origin: Point = [0.0, 0.0];
    let orient = |line_dir: Point, through: Point| -> Point {
        let n = vperp(line_dir);
        let s = vdot(n, vsub(origin, through));
        if s >= 0.0 {
            n
        } else {
            vscale(-1.0, n)
        }
    };
    let n_a = orient(dk, mk);
    let n_s = orient(vsub(mj, mk), mk);
    let n_b = orient(dj, mj);
    let outer = WedgeRegion {
        apex: mk,
        n1: n_a,
        n2: n_s,
    };
    let inner = WedgeRegion {
        apex: mj,
        n1: n_s,
        n2: vscale(-1.0, n_b),
    };
    let po = wedge_region_prob(origin, 1.0, &outer)?;
    let pi = wedge_region_prob(origin, 1.0, &inner)?;
    Ok(clamp01(po - pi))
}

/// The five published prototype shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prototype {
    W1,
    W2,
    W3,
    W4,
    W5,
}

/// A fully instantiated prototype call: which formula, the normalized
/// squared corner distances, the angles, and (for the difference form) the
/// two sub-prototype selectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WedgeSpec {
    pub prototype: Prototype,
    pub d_ik: f64,
    pub d_ij: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
    pub phi4: f64,
    pub m: u8,
    pub n: u8,
}

impl WedgeSpec {
    pub fn w1(d_ik: f64, phi1: f64, phi2: f64) -> Self {
        Self {
            prototype: Prototype::W1,
            d_ik,
            d_ij: 0.0,
            phi1,
            phi2,
            phi3: 0.0,
            phi4: 0.0,
            m: 0,
            n: 0,
        }
    }

    pub fn w2(d_ik: f64, phi1: f64, phi2: f64) -> Self {
        Self {
            prototype: Prototype::W2,
            ..Self::w1(d_ik, phi1, phi2)
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn w3(
        d_ij: f64,
        d_ik: f64,
        phi1: f64,
        phi2: f64,
        phi3: f64,
        phi4: f64,
        m: u8,
        n: u8,
    ) -> Self {
        Self {
            prototype: Prototype::W3,
            d_ik,
            d_ij,
            phi1,
            phi2,
            phi3,
            phi4,
            m,
            n,
        }
    }

    pub fn w4(d_ik: f64, phi1: f64, phi2: f64) -> Self {
        Self {
            prototype: Prototype::W4,
            ..Self::w1(d_ik, phi1, phi2)
        }
    }

    pub fn w5(d_ik: f64, d_ij: f64, phi1: f64, phi2: f64, phi3: f64, phi4: f64) -> Self {
        Self {
            prototype: Prototype::W5,
            d_ik,
            d_ij,
            phi1,
            phi2,
            phi3,
            phi4,
            m: 0,
            n: 0,
        }
    }

    pub fn evaluate(&self) -> Result<f64> {
        match self.prototype {
            Prototype::W1 => p_w1(self.d_ik, self.phi1, self.phi2),
            Prototype::W2 => p_w2(self.d_ik, self.phi1, self.phi2),
            Prototype::W3 => p_w3(
                self.d_ij, self.d_ik, self.phi1, self.phi2, self.phi3, self.phi4, self.m, self.n,
            ),
            Prototype::W4 => p_w4(self.d_ik, self.phi1, self.phi2),
            Prototype::W5 => p_w5(
                self.d_ik, self.d_ij, self.phi1, self.phi2, self.phi3, self.phi4,
            ),
        }
    }
}

/// Classify one wedge relative to an outside mean: prototype selector plus
/// the two signed side angles, or `None` when an angle leaves the printed
/// formulas' quarter-turn domain.
fn classify_outside(
    apex: Point,
    n1: Point,
    n2: Point,
    mean: Point,
) -> Option<(u8, f64, f64, f64)> {
    let rel = vsub(apex, mean);
    let z = vnorm(rel);
    if z < 1e-12 {
        return None;
    }
    let e_away = vunit(rel);
    let rays = ray_dirs(n1, n2)?;
    let a1 = signed_angle(e_away, rays[0]);
    let a2 = signed_angle(e_away, rays[1]);
    if a1.abs() > FRAC_PI_2 || a2.abs() > FRAC_PI_2 {
        return None;
    }
    if a1 * a2 >= 0.0 {
        let (lo, hi) = if a1.abs() <= a2.abs() {
            (a1.abs(), a2.abs())
        } else {
            (a2.abs(), a1.abs())
        };
        Some((1, lo, hi, z))
    } else {
        Some((2, a1.max(a2), a1.min(a2), z))
    }
}

/// Express the probability that a Gaussian centered at `mean` falls in the
/// cell as one prototype call, extracting every distance and angle from the
/// cell's geometry. Returns `None` where the printed prototypes do not
/// apply (an angle beyond a quarter turn, or the mean inside only part of a
/// chain).
pub fn decompose_for_mean(
    shape: &CellShape,
    mean: Point,
    per_dim_std: f64,
) -> Option<WedgeSpec> {
    let dnorm = |p: Point, q: Point| {
        let d = vdist(p, q);
        d * d / (2.0 * per_dim_std * per_dim_std)
    };
    let strictly_inside = |w: &WedgeRegion| {
        vdot(w.n1, vsub(mean, w.apex)) > 0.0 && vdot(w.n2, vsub(mean, w.apex)) > 0.0
    };
    match shape {
        CellShape::Wedge(w) => {
            if strictly_inside(w) {
                let rays = ray_dirs(w.n1, w.n2)?;
                let toward = vunit(vsub(mean, w.apex));
                let t1 = unsigned_angle(toward, rays[0]);
                let t2 = unsigned_angle(toward, rays[1]);
                if t1 < 1e-9 || t2 < 1e-9 || t1 > PI - 1e-9 || t2 > PI - 1e-9 {
                    return None;
                }
                Some(WedgeSpec::w4(dnorm(mean, w.apex), t1, t2))
            } else {
                let (proto, a, b, z) = classify_outside(w.apex, w.n1, w.n2, mean)?;
                let d = z * z / (2.0 * per_dim_std * per_dim_std);
                Some(match proto {
                    1 => WedgeSpec::w1(d, a, b),
                    _ => WedgeSpec::w2(d, a, b),
                })
            }
        }
        CellShape::Chain { outer, inner } => {
            let in_outer = strictly_inside(outer);
            let in_inner = strictly_inside(inner);
            if in_outer && !in_inner {
                // Inside the cell: the segment-plus-two-rays form.
                let q1 = outer.apex;
                let q2 = inner.apex;
                let n_shared = outer.n2;
                let r1 = pick_ray(outer.n1, n_shared)?;
                let r2 = pick_ray(vscale(-1.0, inner.n2), n_shared)?;
                let t1 = unsigned_angle(vunit(vsub(mean, q1)), r1);
                let t2 = unsigned_angle(vunit(vsub(mean, q2)), r2);
                if !(1e-9..=PI - 1e-9).contains(&t1) || !(1e-9..=PI - 1e-9).contains(&t2) {
                    return None;
                }
                let phi3 = unsigned_angle(vsub(q1, mean), vsub(q2, mean));
                let phi4 = unsigned_angle(vsub(mean, q1), vsub(q2, q1));
                Some(WedgeSpec::w5(
                    dnorm(mean, q1),
                    dnorm(mean, q2),
                    PI - t1,
                    PI - t2,
                    phi3,
                    phi4,
                ))
            } else if !in_outer && !in_inner {
                // Outside both wedges: difference of two outside prototypes.
                let (m, a1, a2, zo) = classify_outside(outer.apex, outer.n1, outer.n2, mean)?;
                let (n, b1, b2, zi) = classify_outside(inner.apex, inner.n1, inner.n2, mean)?;
                let scale = 2.0 * per_dim_std * per_dim_std;
                Some(WedgeSpec::w3(
                    zo * zo / scale,
                    zi * zi / scale,
                    a1,
                    a2,
                    b1,
                    b2,
                    m,
                    n,
                ))
            } else {
                // Inside the cut-away wedge: no printed outside form applies.
                None
            }
        }
    }
}

/// Evaluate a cell's probability as a sum of prototype calls and verify it
/// against the direct region integral; disagreement beyond 1e-7 is an
/// internal consistency error.
pub fn cell_probability(
    g: &GaussianSpec,
    cell: &ConvexRegion,
    decomposition: &[WedgeSpec],
) -> Result<f64> {
    let v00 = g.covariance[0][0];
    let v11 = g.covariance[1][1];
    let v01 = g.covariance[0][1];
    if (v00 - v11).abs() > 1e-9 * v00.max(v11) || v01.abs() > 1e-12 * v00.max(v11) {
        return Err(Error::InvalidArgument(
            "prototype decompositions require isotropic noise".into(),
        ));
    }
    let mut total = 0.0;
    for spec in decomposition {
        total += spec.evaluate()?;
    }
    let oracle = gaussian_region_prob(g, cell)?;
    if (total - oracle.value).abs() > 1e-7 {
        return Err(Error::Inconsistent(format!(
            "prototype sum {total} disagrees with region integral {}",
            oracle.value
        )));
    }
    Ok(total)
}

/// Printed closed forms kept verbatim for comparison against the oracle.
///
/// These transcribe the tabulated formulas including their damaged
/// correlation subscripts and additive constants; tests report how far each
/// lands from the geometric value rather than asserting agreement.
pub mod variants {
    use super::*;

    fn rho_literal(num_phi: f64, den_phi: f64) -> f64 {
        let tn = num_phi.tan();
        let td = den_phi.tan();
        (tn * tn - 1.0) / (td * td + 1.0)
    }

    /// Straddling-wedge form as printed: mixed correlation subscripts and a
    /// difference of the two terms.
    pub fn p_w2_tabulated(d_ik: f64, phi1: f64, phi2: f64) -> Result<f64> {
        let z = (2.0 * d_ik).sqrt();
        let first = q2(z * phi1.sin(), rho_literal(phi1, phi2))?;
        let second = q2(z * (-phi2).sin(), rho_literal(phi2, phi1))?;
        Ok(0.5 * (first - second))
    }

    /// Inside-wedge form as printed: brace-scaled Q-terms plus the
    /// `(phi1 + phi2 + 2) / (2 pi)` constant.
    pub fn p_w4_tabulated(d_ik: f64, phi1: f64, phi2: f64) -> Result<f64> {
        let z = (2.0 * d_ik).sqrt();
        let mut acc = 0.0;
        for phi in [phi1, phi2] {
            let x = z * phi.sin();
            acc += q2(x, rho_literal(phi, phi))? - PI * q1(x)?;
        }
        Ok(acc / TAU + (phi1 + phi2 + 2.0) / TAU)
    }

    /// Inside-chain form as printed: three Q2 terms on one distance, two Q1
    /// terms, a compound-angle Q2 on the other distance, and the
    /// `phi1 + phi2 + phi4 + 3` constant, all inside one `1/(2 pi)` brace.
    pub fn p_w5_tabulated(
        d_ik: f64,
        d_ij: f64,
        phi1: f64,
        phi2: f64,
        phi3: f64,
        phi4: f64,
    ) -> Result<f64> {
        let zj = (2.0 * d_ij).sqrt();
        let zk = (2.0 * d_ik).sqrt();
        let mut brace = 0.0;
        for phi in [phi1, phi2, phi3] {
            brace += q2(zj * phi.sin(), rho_literal(phi, phi))?;
        }
        for phi in [phi1, phi2] {
            brace -= PI * q1(zj * phi.sin())?;
        }
        let compound = phi3 + phi4;
        brace -= q2(zk * compound.sin(), rho_literal(compound, compound))?;
        brace += phi1 + phi2 + phi4 + 3.0;
        Ok(brace / TAU)
    }
}
