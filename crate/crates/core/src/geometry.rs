//! Instantaneous constellation geometry for the relay and destination planes.
//!
//! The four noiseless receive points of a two-source BPSK superposition form
//! a parallelogram centered at the origin. This module builds that
//! parallelogram for the relay (complex source-relay gains) and for the
//! destination (magnitude source links on the X axis, relay level on the Y
//! axis), derives the maximum-likelihood decision cells, classifies the
//! geometry into the six shape cases the closed-form error analysis
//! distinguishes, and reduces every cell to a wedge or a two-corner chain
//! that the probability engine can evaluate exactly.

use num_complex::Complex64;

use crate::special::{ConvexRegion, HalfPlane};
use crate::{Error, Result};

pub type Point = [f64; 2];

// Small planar vector helpers shared with the probability modules.
pub(crate) fn vadd(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1]]
}

pub(crate) fn vsub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

pub(crate) fn vscale(s: f64, a: Point) -> Point {
    [s * a[0], s * a[1]]
}

pub(crate) fn vdot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub(crate) fn vcross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub(crate) fn vnorm(a: Point) -> f64 {
    vdot(a, a).sqrt()
}

pub(crate) fn vdist(a: Point, b: Point) -> f64 {
    vnorm(vsub(a, b))
}

pub(crate) fn vunit(a: Point) -> Point {
    let n = vnorm(a);
    [a[0] / n, a[1] / n]
}

/// Counterclockwise perpendicular.
pub(crate) fn vperp(a: Point) -> Point {
    [-a[1], a[0]]
}

/// One channel realization of the two-source relay network.
///
/// Source-relay gains stay complex; the source-destination and
/// relay-destination links are phase pre-equalized, so only their magnitudes
/// enter the model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRealization {
    pub h1r: Complex64,
    pub h2r: Complex64,
    pub h1d_mag: f64,
    pub h2d_mag: f64,
    pub hrd_mag: f64,
    pub e1: f64,
    pub e2: f64,
    pub sigma2: f64,
}

impl ChannelRealization {
    pub fn new(
        h1r: Complex64,
        h2r: Complex64,
        h1d_mag: f64,
        h2d_mag: f64,
        hrd_mag: f64,
        e1: f64,
        e2: f64,
        sigma2: f64,
    ) -> Result<Self> {
        let finite = h1r.re.is_finite()
            && h1r.im.is_finite()
            && h2r.re.is_finite()
            && h2r.im.is_finite()
            && [h1d_mag, h2d_mag, hrd_mag, e1, e2, sigma2]
                .iter()
                .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidArgument(
                "channel realization has non-finite entries".into(),
            ));
        }
        if h1d_mag < 0.0 || h2d_mag < 0.0 || hrd_mag < 0.0 {
            return Err(Error::InvalidArgument(
                "channel magnitudes must be nonnegative".into(),
            ));
        }
        if sigma2 <= 0.0 || e1 <= 0.0 || e2 <= 0.0 {
            return Err(Error::InvalidArgument(
                "noise variance and source energies must be positive".into(),
            ));
        }
        Ok(Self {
            h1r,
            h2r,
            h1d_mag,
            h2d_mag,
            hrd_mag,
            e1,
            e2,
            sigma2,
        })
    }

    /// Oriented area factor `Re(h1R) Im(h2R) - Re(h2R) Im(h1R)` of the two
    /// source-relay gains; zero exactly when they are collinear.
    pub fn beta(&self) -> f64 {
        self.h1r.re * self.h2r.im - self.h2r.re * self.h1r.im
    }
}

/// The four source symbol pairs, indexed by the sign pattern of (x1, x2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolPair {
    /// (+1, +1)
    T1,
    /// (-1, +1)
    T2,
    /// (+1, -1)
    T3,
    /// (-1, -1)
    T4,
}

impl SymbolPair {
    pub const ALL: [SymbolPair; 4] = [
        SymbolPair::T1,
        SymbolPair::T2,
        SymbolPair::T3,
        SymbolPair::T4,
    ];

    pub fn x1(self) -> f64 {
        match self {
            SymbolPair::T1 | SymbolPair::T3 => 1.0,
            SymbolPair::T2 | SymbolPair::T4 => -1.0,
        }
    }

    pub fn x2(self) -> f64 {
        match self {
            SymbolPair::T1 | SymbolPair::T2 => 1.0,
            SymbolPair::T3 | SymbolPair::T4 => -1.0,
        }
    }

    /// Vertex index of this pair's constellation point (0-based).
    pub fn index(self) -> usize {
        match self {
            SymbolPair::T1 => 0,
            SymbolPair::T2 => 1,
            SymbolPair::T3 => 2,
            SymbolPair::T4 => 3,
        }
    }

    pub fn from_symbols(x1: f64, x2: f64) -> Self {
        match (x1 > 0.0, x2 > 0.0) {
            (true, true) => SymbolPair::T1,
            (false, true) => SymbolPair::T2,
            (true, false) => SymbolPair::T3,
            (false, false) => SymbolPair::T4,
        }
    }
}

/// The four signed relay transmit levels, in the row order used by the
/// conditional level distributions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelayLevel {
    PlusA,
    PlusB,
    MinusB,
    MinusA,
}

impl RelayLevel {
    pub const ALL: [RelayLevel; 4] = [
        RelayLevel::PlusA,
        RelayLevel::PlusB,
        RelayLevel::MinusB,
        RelayLevel::MinusA,
    ];

    pub fn index(self) -> usize {
        match self {
            RelayLevel::PlusA => 0,
            RelayLevel::PlusB => 1,
            RelayLevel::MinusB => 2,
            RelayLevel::MinusA => 3,
        }
    }

    /// Level the relay forwards when it detects `pair`: the equal-sign pairs
    /// map to the +/-a diagonal, the mixed pairs to +/-b.
    pub fn correct_for(pair: SymbolPair) -> Self {
        match pair {
            SymbolPair::T1 => RelayLevel::PlusA,
            SymbolPair::T2 => RelayLevel::PlusB,
            SymbolPair::T3 => RelayLevel::MinusB,
            SymbolPair::T4 => RelayLevel::MinusA,
        }
    }

    /// Signed amplitude before power scaling.
    pub fn amplitude(self, a: f64, b: f64) -> f64 {
        match self {
            RelayLevel::PlusA => a,
            RelayLevel::PlusB => b,
            RelayLevel::MinusB => -b,
            RelayLevel::MinusA => -a,
        }
    }
}

/// Sign-combining network code `sign(|h1R| x1 + |h2R| x2)` with the zero tie
/// resolved to +1. Kept as a cross-check of the pair-to-level map; the
/// pipeline itself forwards by detected pair.
pub fn boxplus_sign(h1r_mag: f64, h2r_mag: f64, x1: f64, x2: f64) -> f64 {
    let v = h1r_mag * x1 + h2r_mag * x2;
    if v >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Relay amplitude pair with its power-scaling factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerPair {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub er_ave: f64,
}

impl PowerPair {
    pub fn new(a: f64, b: f64, alpha: f64, er_ave: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && alpha.is_finite() && er_ave.is_finite()) {
            return Err(Error::InvalidArgument(
                "power pair has non-finite entries".into(),
            ));
        }
        // b may be negative: the rectangle max-min optimum genuinely needs a
        // signed second level whenever the second direct link dominates, and
        // the destination knows the sign it hypothesizes.
        if a < 0.0 || er_ave <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "the first amplitude must be nonnegative and the budget positive (a={a}, ER={er_ave})"
            )));
        }
        if a * a + b * b > 2.0 * er_ave + 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "power budget exceeded: a^2+b^2 = {} > 2 ER = {}",
                a * a + b * b,
                2.0 * er_ave
            )));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidArgument(format!(
                "scaling factor {alpha} outside [0, 1]"
            )));
        }
        Ok(Self { a, b, alpha, er_ave })
    }

    /// Signed transmit amplitude of `level` after power scaling.
    pub fn scaled_level(&self, level: RelayLevel) -> f64 {
        self.alpha.sqrt() * level.amplitude(self.a, self.b)
    }

    /// Same levels under a different scaling factor.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.a, self.b, alpha, self.er_ave)
    }
}

/// The six shape cases of the constellation, split by the diagonal length
/// comparison, whether the bisector crossings fall inside the parallelogram,
/// and the side length comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseTag {
    Case1,
    Case2,
    Case3,
    Case4,
    Case5,
    Case6,
}

impl std::fmt::Display for CaseTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            CaseTag::Case1 => "case one",
            CaseTag::Case2 => "case two",
            CaseTag::Case3 => "case three",
            CaseTag::Case4 => "case four",
            CaseTag::Case5 => "case five",
            CaseTag::Case6 => "case six",
        };
        f.write_str(name)
    }
}

/// A wedge `{ z : n1 . (z - apex) >= 0  and  n2 . (z - apex) >= 0 }` with
/// both boundary lines through `apex`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WedgeRegion {
    pub apex: Point,
    pub n1: Point,
    pub n2: Point,
}

/// A decision cell reduced to a form the probability engine evaluates
/// exactly: either a single wedge, or the set difference `outer \ inner` of
/// two wedges with `inner` contained in `outer` (the two-corner chain cell
/// bounded by a ray, a segment between the bisector crossings, and a ray).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellShape {
    Wedge(WedgeRegion),
    Chain { outer: WedgeRegion, inner: WedgeRegion },
}

/// A four-point constellation, its decision geometry, and its shape case.
///
/// Vertices follow the sign pattern of the symbol pairs: `V1 = s1 + s2`,
/// `V2 = -s1 + s2`, `V3 = s1 - s2`, `V4 = -s1 - s2`, where `s1` and `s2` are
/// the per-source half-side vectors. `m1` is the crossing of the bisectors
/// of sides V1V2 and V1V3, `m2` of the bisectors of V2V4 and V3V4.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    pub vertices: [Point; 4],
    pub m12: Point,
    pub m13: Point,
    pub m24: Point,
    pub m34: Point,
    pub m1: Point,
    pub m2: Point,
    pub case_tag: CaseTag,
    pub m1_in_p: bool,
    pub m2_in_p: bool,
    pub s1: Point,
    pub s2: Point,
    /// Noise standard deviation per axis in this plane.
    pub sigma_per_dim: f64,
}

impl Constellation {
    fn from_half_sides(s1: Point, s2: Point, sigma_per_dim: f64, min_area: f64) -> Result<Self> {
        let det = vcross(s1, s2);
        if det.abs() <= min_area {
            return Err(Error::DegenerateGeometry(format!(
                "constellation collapsed: |s1 x s2| = {} <= {min_area}",
                det.abs()
            )));
        }
        let v1 = vadd(s1, s2);
        let v2 = vsub(s2, s1);
        let v3 = vsub(s1, s2);
        let v4 = vscale(-1.0, v1);
        let c = vdot(s1, s2);
        // Both bisector crossings solve s1 . z = s2 . z = +/-c.
        let m1 = vscale(c / det, [s2[1] - s1[1], s1[0] - s2[0]]);
        let m2 = vscale(-1.0, m1);

        let mut cons = Self {
            vertices: [v1, v2, v3, v4],
            m12: s2,
            m13: s1,
            m24: vscale(-1.0, s1),
            m34: vscale(-1.0, s2),
            m1,
            m2,
            case_tag: CaseTag::Case6,
            m1_in_p: false,
            m2_in_p: false,
            s1,
            s2,
            sigma_per_dim,
        };
        cons.m1_in_p = cons.in_parallelogram(m1);
        cons.m2_in_p = cons.in_parallelogram(m2);
        cons.case_tag = cons.classify();
        Ok(cons)
    }

    /// Coordinates (lambda, mu) of `p = lambda s1 + mu s2`.
    pub fn side_coordinates(&self, p: Point) -> (f64, f64) {
        let det = vcross(self.s1, self.s2);
        let lambda = (self.s2[1] * p[0] - self.s2[0] * p[1]) / det;
        let mu = (self.s1[0] * p[1] - self.s1[1] * p[0]) / det;
        (lambda, mu)
    }

    /// Inclusive membership in the closed parallelogram spanned by the
    /// vertices.
    pub fn in_parallelogram(&self, p: Point) -> bool {
        let (lambda, mu) = self.side_coordinates(p);
        lambda.abs() <= 1.0 + 1e-12 && mu.abs() <= 1.0 + 1e-12
    }

    fn classify(&self) -> CaseTag {
        let [v1, v2, v3, _] = self.vertices;
        let v4 = self.vertices[3];
        let diag14 = vdist(v1, v4);
        let diag23 = vdist(v2, v3);
        let side12 = vdist(v1, v2);
        let side13 = vdist(v1, v3);
        let m_inside = self.m1_in_p && self.m2_in_p;
        if diag14 > diag23 {
            if m_inside {
                CaseTag::Case3
            } else if side12 > side13 {
                CaseTag::Case1
            } else {
                CaseTag::Case2
            }
        } else if m_inside {
            CaseTag::Case6
        } else if side12 > side13 {
            CaseTag::Case4
        } else {
            CaseTag::Case5
        }
    }

    /// Geometric scale used for tolerance decisions.
    pub(crate) fn scale(&self) -> f64 {
        vnorm(self.s1).max(vnorm(self.s2))
    }

    /// Decision cell of vertex `i` as the set of points at least as close to
    /// it as to every other vertex.
    pub fn cell_region(&self, i: usize) -> ConvexRegion {
        let mut planes = Vec::with_capacity(3);
        for j in 0..4 {
            if j != i {
                planes.push(HalfPlane::closer_to(self.vertices[i], self.vertices[j]));
            }
        }
        ConvexRegion::new(planes)
    }

    /// Reduce the decision cell of vertex `i` to its wedge or chain form.
    pub fn cell_shape(&self, i: usize) -> Result<CellShape> {
        let scale = self.scale();
        let eps = 1e-9 * scale;
        // Unit-normal copies of the three bisector half-planes.
        let planes: Vec<HalfPlane> = (0..4)
            .filter(|&j| j != i)
            .map(|j| {
                let raw = HalfPlane::closer_to(self.vertices[i], self.vertices[j]);
                let n = vnorm(raw.normal);
                HalfPlane::new(vscale(1.0 / n, raw.normal), raw.offset / n)
            })
            .collect();

        let intersect = |a: &HalfPlane, b: &HalfPlane| -> Option<Point> {
            let det = vcross(a.normal, b.normal);
            if det.abs() < 1e-12 {
                return None;
            }
            Some([
                (a.offset * b.normal[1] - b.offset * a.normal[1]) / det,
                (b.offset * a.normal[0] - a.offset * b.normal[0]) / det,
            ])
        };

        // Corners: pairwise boundary intersections satisfying the remaining
        // constraint. The cells here are unbounded, so there are one or two.
        let mut corners: Vec<(usize, usize, Point)> = Vec::new();
        for a in 0..3 {
            for b in (a + 1)..3 {
                let other = 3 - a - b;
                if let Some(q) = intersect(&planes[a], &planes[b]) {
                    if planes[other].signed_excess(q) >= -eps {
                        corners.push((a, b, q));
                    }
                }
            }
        }
        // Merge coincident corners (all three lines through one point).
        let mut merged: Vec<(usize, usize, Point)> = Vec::new();
        for c in corners {
            if merged.iter().all(|m| vdist(m.2, c.2) > eps) {
                merged.push(c);
            }
        }

        match merged.len() {
            1 => {
                let (a, b, apex) = merged[0];
                // When all three bisectors run through the single corner the
                // first pair found may include a plane that still cuts the
                // wedge of the other two. Keep the planes whose boundary
                // rays satisfy every other constraint at the apex.
                let through: Vec<usize> = (0..3)
                    .filter(|&k| planes[k].signed_excess(apex).abs() <= eps)
                    .collect();
                if through.len() <= 2 {
                    return Ok(CellShape::Wedge(WedgeRegion {
                        apex,
                        n1: planes[a].normal,
                        n2: planes[b].normal,
                    }));
                }
                let mut owners: Vec<usize> = Vec::new();
                for &k in &through {
                    for d in [vperp(planes[k].normal), vscale(-1.0, vperp(planes[k].normal))] {
                        if through
                            .iter()
                            .all(|&j| j == k || vdot(planes[j].normal, d) >= -1e-9)
                        {
                            owners.push(k);
                        }
                    }
                }
                owners.sort_unstable();
                owners.dedup();
                if owners.len() != 2 {
                    return Err(Error::DegenerateGeometry(format!(
                        "cell of vertex {i} has an ambiguous corner"
                    )));
                }
                Ok(CellShape::Wedge(WedgeRegion {
                    apex,
                    n1: planes[owners[0]].normal,
                    n2: planes[owners[1]].normal,
                }))
            }
            2 => {
                let (a1, b1, q1) = merged[0];
                let (a2, b2, q2) = merged[1];
                // The plane shared by both corners carries the finite segment.
                let shared = if a1 == a2 || a1 == b2 { a1 } else { b1 };
                debug_assert!([a2, b2].contains(&shared));
                let ray1 = a1 + b1 - shared;
                let ray2 = a2 + b2 - shared;
                let outer = WedgeRegion {
                    apex: q1,
                    n1: planes[ray1].normal,
                    n2: planes[shared].normal,
                };
                // Points of the outer wedge cut away by the third bisector.
                let inner = WedgeRegion {
                    apex: q2,
                    n1: planes[shared].normal,
                    n2: vscale(-1.0, planes[ray2].normal),
                };
                Ok(CellShape::Chain { outer, inner })
            }
            n => Err(Error::DegenerateGeometry(format!(
                "cell of vertex {i} has {n} corners"
            ))),
        }
    }

    /// Multi-line human-readable description (for the geometry-dump command).
    pub fn describe(&self) -> String {
        let mut out = String::new();
        for (i, v) in self.vertices.iter().enumerate() {
            out.push_str(&format!("V{}: ({:+.6}, {:+.6})\n", i + 1, v[0], v[1]));
        }
        out.push_str(&format!(
            "M12: ({:+.6}, {:+.6})  M13: ({:+.6}, {:+.6})\n",
            self.m12[0], self.m12[1], self.m13[0], self.m13[1]
        ));
        out.push_str(&format!(
            "M24: ({:+.6}, {:+.6})  M34: ({:+.6}, {:+.6})\n",
            self.m24[0], self.m24[1], self.m34[0], self.m34[1]
        ));
        out.push_str(&format!(
            "M1:  ({:+.6}, {:+.6})  in parallelogram: {}\n",
            self.m1[0], self.m1[1], self.m1_in_p
        ));
        out.push_str(&format!(
            "M2:  ({:+.6}, {:+.6})  in parallelogram: {}\n",
            self.m2[0], self.m2[1], self.m2_in_p
        ));
        out.push_str(&format!("case: {}\n", self.case_tag));
        out
    }
}

/// Build the relay-plane constellation from the complex source-relay gains.
pub fn build_irc(ch: &ChannelRealization) -> Result<Constellation> {
    let s1 = vscale(ch.e1.sqrt(), [ch.h1r.re, ch.h1r.im]);
    let s2 = vscale(ch.e2.sqrt(), [ch.h2r.re, ch.h2r.im]);
    let min_area = 1e-9 * (ch.e1 * ch.e2).sqrt();
    Constellation::from_half_sides(s1, s2, (ch.sigma2 / 2.0).sqrt(), min_area)
}

/// Build the destination-plane constellation for the given relay powers.
/// The relay amplitudes enter scaled by the power-scaling factor.
pub fn build_idc(ch: &ChannelRealization, p: &PowerPair) -> Result<Constellation> {
    let root_alpha = p.alpha.sqrt();
    let a = root_alpha * p.a * ch.hrd_mag;
    let b = root_alpha * p.b * ch.hrd_mag;
    let u = ch.e1.sqrt() * ch.h1d_mag;
    let v = ch.e2.sqrt() * ch.h2d_mag;
    let s1 = [u, 0.5 * (a - b)];
    let s2 = [v, 0.5 * (a + b)];
    let min_area = 1e-9 * vnorm(s1) * vnorm(s2);
    Constellation::from_half_sides(s1, s2, ch.sigma2.sqrt(), min_area)
}

/// Destination-plane mean when the true pair is `true_pair` but the relay
/// forwarded `forwarded`: the source contribution of the true pair on the X
/// axis with the forwarded scaled level on the Y axis.
pub fn mislabeled_points(
    ch: &ChannelRealization,
    p: &PowerPair,
    true_pair: SymbolPair,
    forwarded: RelayLevel,
) -> Point {
    let x = true_pair.x1() * ch.e1.sqrt() * ch.h1d_mag + true_pair.x2() * ch.e2.sqrt() * ch.h2d_mag;
    let y = p.scaled_level(forwarded) * ch.hrd_mag;
    [x, y]
}

/// Shape case of a constellation (also stored in its `case_tag` field).
pub fn classify_case(c: &Constellation) -> CaseTag {
    c.classify()
}

/// Decision cell of vertex `i` (0-based) as an intersection of half-planes.
pub fn voronoi_cell(c: &Constellation, i: usize) -> Result<ConvexRegion> {
    if i >= 4 {
        return Err(Error::InvalidArgument(format!(
            "vertex index {i} out of range"
        )));
    }
    Ok(c.cell_region(i))
}
