//! Relay power scaling and forwarding-level selection.
//!
//! Two independent knobs: the scaling factor caps relay energy at what the
//! weakest source-relay arm supports, so forwarded errors stop dominating
//! the destination decision; the level pair (a, b) comes from the published
//! Max-min closed forms under the average budget a^2 + b^2 <= 2 E_R. The
//! rectangle form equalizes the two constellation edges and is the exact
//! maximizer of the smaller one. The parallelogram form equalizes the two
//! diagonals instead, which always leaves an edge as the binding distance;
//! [`grid_oracle`] measures that shortfall.

use rand::Rng;

use crate::error::Error;
use crate::geometry::{ChannelRealization, PowerPair};
use crate::special::q1;
use crate::Result;

/// Which relay-destination SNR the scaling factor divides by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnrMode {
    Instantaneous,
    Statistical,
}

/// Per-hop SNRs of the virtual source-relay-destination chain.
#[derive(Debug, Clone, Copy)]
pub struct LinkSnrs {
    /// Weakest of the three source-relay arms.
    pub gamma_sr: f64,
    /// Relay-destination SNR at the nominal relay budget.
    pub gamma_rd: f64,
    pub mode: SnrMode,
}

impl LinkSnrs {
    pub fn instantaneous(ch: &ChannelRealization, er_ave: f64) -> Result<Self> {
        check_budget_arg(er_ave)?;
        Ok(Self {
            gamma_sr: gamma_sr(ch),
            gamma_rd: er_ave * ch.hrd_mag * ch.hrd_mag,
            mode: SnrMode::Instantaneous,
        })
    }

    /// Replaces the instantaneous relay-destination gain with its channel
    /// mean, so the relay needs no feedback of that link.
    pub fn statistical(
        ch: &ChannelRealization,
        er_ave: f64,
        mean_rd_gain: f64,
    ) -> Result<Self> {
        check_budget_arg(er_ave)?;
        if !(mean_rd_gain >= 0.0 && mean_rd_gain.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "mean relay-destination gain must be nonnegative, got {mean_rd_gain}"
            )));
        }
        Ok(Self {
            gamma_sr: gamma_sr(ch),
            gamma_rd: er_ave * mean_rd_gain,
            mode: SnrMode::Statistical,
        })
    }
}

/// Weakest source-relay arm: each single-source arm and the coherent sum
/// arm, in energy units.
pub fn gamma_sr(ch: &ChannelRealization) -> f64 {
    let g1 = ch.e1 * ch.h1r.norm_sqr();
    let g2 = ch.e2 * ch.h2r.norm_sqr();
    let sum = ch.h1r * ch.e1.sqrt() + ch.h2r * ch.e2.sqrt();
    g1.min(g2).min(sum.norm_sqr())
}

/// Power scaling factor: full power when the source-relay hop is at least
/// as reliable as the relay-destination hop, proportionally muted
/// otherwise. A dead relay-destination link mutes the relay entirely.
pub fn scaling_factor(s: LinkSnrs) -> f64 {
    if s.gamma_rd <= 0.0 {
        log::warn!("relay-destination SNR is zero; muting the relay");
        return 0.0;
    }
    (s.gamma_sr / s.gamma_rd).min(1.0)
}

/// Error estimates for the two-source multiple-access phase at the relay.
#[derive(Debug, Clone, Copy)]
pub struct MacBound {
    /// Union bound: one tail term per arm distance.
    pub upper: f64,
    /// Single tail at the weakest arm; tight once the arms separate.
    pub approx: f64,
}

/// Union bound and min-SNR approximation for the relay's detection of the
/// network-coded symbol.
pub fn mac_upper_bound(ch: &ChannelRealization, sigma2: f64) -> Result<MacBound> {
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "noise variance must be positive, got {sigma2}"
        )));
    }
    let g1 = ch.e1 * ch.h1r.norm_sqr();
    let g2 = ch.e2 * ch.h2r.norm_sqr();
    let g3 = (ch.h1r * ch.e1.sqrt() + ch.h2r * ch.e2.sqrt()).norm_sqr();
    let tail = |g: f64| q1((2.0 * g / sigma2).sqrt());
    Ok(MacBound {
        upper: tail(g1)? + tail(g2)? + tail(g3)?,
        approx: tail(g1.min(g2).min(g3))?,
    })
}

/// Which squared-distance family the Max-min search scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerObjective {
    /// All four distinct pairwise distances of the destination parallelogram.
    ExactMinPair,
    /// The two rectangle edges only; a rectangle's diagonals cannot be
    /// shorter than its edges.
    CtMinEdge,
}

/// Squared destination distances at unit scaling factor: the two edges,
/// then the diagonal through the mixed pairs and the one through the
/// equal-sign pairs.
fn squared_distances(ch: &ChannelRealization, a: f64, b: f64) -> [f64; 4] {
    let u = ch.e1.sqrt() * ch.h1d_mag;
    let v = ch.e2.sqrt() * ch.h2d_mag;
    let h2 = ch.hrd_mag * ch.hrd_mag;
    [
        4.0 * u * u + h2 * (a - b) * (a - b),
        4.0 * v * v + h2 * (a + b) * (a + b),
        4.0 * (v - u) * (v - u) + 4.0 * h2 * b * b,
        4.0 * (u + v) * (u + v) + 4.0 * h2 * a * a,
    ]
}

/// Max-min score of a candidate level pair.
pub fn objective_value(
    ch: &ChannelRealization,
    objective: PowerObjective,
    a: f64,
    b: f64,
) -> f64 {
    let d = squared_distances(ch, a, b);
    match objective {
        PowerObjective::ExactMinPair => d[0].min(d[1]).min(d[2]).min(d[3]),
        PowerObjective::CtMinEdge => d[0].min(d[1]),
    }
}

/// A closed-form level choice with its boundary flags.
#[derive(Debug, Clone, Copy)]
pub struct OptimizedPowers {
    pub a: f64,
    pub b: f64,
    pub er_ave: f64,
    /// A radicand went negative and the pair was projected to the budget
    /// boundary.
    pub clamped: bool,
    /// No relay-destination link: levels are immaterial and default to the
    /// balanced pair.
    pub degenerate_link: bool,
}

impl OptimizedPowers {
    /// Attaches a scaling factor, yielding the pair the detectors consume.
    pub fn pair(&self, alpha: f64) -> Result<PowerPair> {
        PowerPair::new(self.a, self.b, alpha, self.er_ave)
    }
}

/// Published parallelogram Max-min pair: equalizes the two diagonal
/// distances on the budget circle, spending more of the budget on the
/// mixed-pair level. The equalized diagonals sit at 4(u^2 + v^2) + 4E h^2
/// (u, v the direct-link amplitudes, h the relay-destination gain) while
/// the first edge never exceeds 4u^2 + 2E h^2, so an edge is always the
/// binding distance at this point and the pair trails the true Max-min
/// argmax; `grid_oracle` measures the gap. A negative radicand projects to
/// the (0, sqrt(2E)) endpoint.
pub fn optimize_powers_exact(
    ch: &ChannelRealization,
    er_ave: f64,
) -> Result<OptimizedPowers> {
    check_budget_arg(er_ave)?;
    if ch.hrd_mag == 0.0 {
        return Ok(degenerate_pair(er_ave));
    }
    let u = ch.e1.sqrt() * ch.h1d_mag;
    let v = ch.e2.sqrt() * ch.h2d_mag;
    let h2 = ch.hrd_mag * ch.hrd_mag;
    let c1 = 4.0 * (v - u) * (v - u);
    let c2 = 4.0 * (u + v) * (u + v);
    let a_sq = er_ave + (c1 - c2) / (8.0 * h2);
    let b_sq = er_ave + (c2 - c1) / (8.0 * h2);
    // b's radicand is E + 2uv/h^2 and cannot go negative; only a clamps.
    if a_sq < 0.0 {
        return Ok(OptimizedPowers {
            a: 0.0,
            b: (2.0 * er_ave).sqrt(),
            er_ave,
            clamped: true,
            degenerate_link: false,
        });
    }
    Ok(OptimizedPowers {
        a: a_sq.sqrt(),
        b: b_sq.sqrt(),
        er_ave,
        clamped: false,
        degenerate_link: false,
    })
}

/// Rectangle Max-min pair: equalizes the two rectangle edges on the budget
/// circle, the exact maximizer of the smaller edge. The second level takes
/// the sign of E1|h1D|^2 - E2|h2D|^2; when one direct link dominates by
/// more than E h^2 the balance is unreachable and the pair clamps to the
/// equal-magnitude endpoint, which maximizes the binding edge alone.
pub fn optimize_powers_ct(
    ch: &ChannelRealization,
    er_ave: f64,
) -> Result<OptimizedPowers> {
    check_budget_arg(er_ave)?;
    if ch.hrd_mag == 0.0 {
        return Ok(degenerate_pair(er_ave));
    }
    let s = ch.e1 * ch.h1d_mag * ch.h1d_mag;
    let t = ch.e2 * ch.h2d_mag * ch.h2d_mag;
    let h2 = ch.hrd_mag * ch.hrd_mag;
    let p = er_ave * h2;
    let rad1 = 2.0 * (p + t - s) / h2;
    let rad2 = 2.0 * (p + s - t) / h2;
    let (r1, r2, clamped) = if rad1 < 0.0 {
        (0.0, 2.0 * er_ave.sqrt(), true)
    } else if rad2 < 0.0 {
        (2.0 * er_ave.sqrt(), 0.0, true)
    } else {
        (rad1.sqrt(), rad2.sqrt(), false)
    };
    Ok(OptimizedPowers {
        a: 0.5 * (r1 + r2),
        b: 0.5 * (r2 - r1),
        er_ave,
        clamped,
        degenerate_link: false,
    })
}

/// Argmax of a Max-min objective found by exhaustive search.
#[derive(Debug, Clone, Copy)]
pub struct OracleResult {
    pub a: f64,
    pub b: f64,
    pub value: f64,
}

/// Brute-force Max-min reference. Every distance grows along rays from the
/// origin, so the maximum lies on the budget circle: the circle is scanned
/// with progressive refinement, and an interior polar grid is kept as a
/// cross-check. Values within 1e-12 relative count as ties and break
/// toward larger `a`, then larger `b`; the edge objective is symmetric
/// under swapping the levels, so exact ties do occur.
pub fn grid_oracle(
    ch: &ChannelRealization,
    er_ave: f64,
    objective: PowerObjective,
    resolution: usize,
) -> Result<OracleResult> {
    check_budget_arg(er_ave)?;
    if resolution < 256 {
        return Err(Error::InvalidArgument(format!(
            "oracle resolution must be at least 256, got {resolution}"
        )));
    }
    let radius = (2.0 * er_ave).sqrt();
    let score = |a: f64, b: f64| OracleResult {
        a,
        b,
        value: objective_value(ch, objective, a, b),
    };
    let better = |c: &OracleResult, best: &OracleResult| {
        let band = 1e-12 * c.value.abs().max(best.value.abs());
        if c.value > best.value + band {
            return true;
        }
        if c.value + band < best.value {
            return false;
        }
        c.a > best.a || (c.a == best.a && c.b > best.b)
    };

    let mut best = score(0.0, 0.0);
    let mut best_angle = 0.0;
    let half = std::f64::consts::FRAC_PI_2;
    let (mut lo, mut hi) = (-half, half);
    for stage in 0..4 {
        let steps = if stage == 0 { 4 * resolution } else { resolution };
        for k in 0..=steps {
            let t = lo + (hi - lo) * k as f64 / steps as f64;
            let c = score(radius * t.cos(), radius * t.sin());
            if better(&c, &best) {
                best = c;
                best_angle = t;
            }
        }
        let spacing = (hi - lo) / steps as f64;
        lo = (best_angle - spacing).max(-half);
        hi = (best_angle + spacing).min(half);
    }
    for i in 0..resolution {
        let r = radius * i as f64 / resolution as f64;
        for k in 0..=resolution {
            let t = -half + std::f64::consts::PI * k as f64 / resolution as f64;
            let c = score(r * t.cos(), r * t.sin());
            if better(&c, &best) {
                best = c;
            }
        }
    }
    Ok(best)
}

/// Resampling cadence for the uniform baseline pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineMode {
    /// Fresh pair per channel realization.
    Random,
    /// One pair per run, reused across realizations.
    Fixed,
}

/// Baseline level pair: `a` uniform on [0, sqrt(2E)], `b` spending the
/// remaining budget, unit scaling factor. The cadence is the caller's
/// contract per [`BaselineMode`]; the draw itself is identical.
pub fn baseline_powers<R: Rng + ?Sized>(er_ave: f64, rng: &mut R) -> Result<PowerPair> {
    check_budget_arg(er_ave)?;
    let a = rng.gen::<f64>() * (2.0 * er_ave).sqrt();
    let b = (2.0 * er_ave - a * a).max(0.0).sqrt();
    PowerPair::new(a, b, 1.0, er_ave)
}

fn check_budget_arg(er_ave: f64) -> Result<()> {
    if er_ave > 0.0 && er_ave.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "average relay budget must be positive, got {er_ave}"
        )))
    }
}

fn degenerate_pair(er_ave: f64) -> OptimizedPowers {
    log::warn!("relay-destination gain is zero; power levels are immaterial");
    OptimizedPowers {
        a: er_ave.sqrt(),
        b: er_ave.sqrt(),
        er_ave,
        clamped: false,
        degenerate_link: true,
    }
}
