//! High-SNR approximations and diversity-order machinery.
//!
//! Channel-averaged Q-function coefficients, tabulated pairwise-error
//! expansions for the unscaled and XOR schemes, a Chernoff bound on the
//! virtual-channel pairwise error, and a least-squares diversity fit over
//! sweep results.

use crate::error::Error;
use crate::geometry::SymbolPair;
use crate::monte_carlo::{LinkGains, SchemeId, SweepResult};
use crate::Result;

/// Fitted diversity order of one scheme over an SNR window.
#[derive(Debug, Clone, Copy)]
pub struct DiversityFit {
    pub scheme: SchemeId,
    pub window_db: (f64, f64),
    /// Decades of SPER lost per decade of SNR.
    pub slope: f64,
    /// RMS residual of the fit in log10 units.
    pub residual: f64,
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "reference SNR must be positive, got {rho}"
        )))
    }
}

fn check_high_snr(rho: f64) -> Result<()> {
    check_rho(rho)?;
    if rho < 100.0 {
        return Err(Error::InvalidArgument(format!(
            "the tabulated expansions hold in the high-SNR regime (rho >= 100), got {rho}"
        )));
    }
    Ok(())
}

fn check_gammas(gammas: &[f64]) -> Result<()> {
    if gammas.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "mean gains must be positive, got {gammas:?}"
        )));
    }
    Ok(())
}

/// Leading coefficient of the channel-averaged tail of a sum of
/// independent exponential gains: E{Q1(sqrt(2 rho sum))} ~ c rho^-order.
pub fn q_average_coefficient(order: usize, gammas: &[f64]) -> Result<f64> {
    if !(1..=3).contains(&order) || gammas.len() != order {
        return Err(Error::InvalidArgument(format!(
            "supported orders are 1..=3 with one mean gain each, got order {order} with {} gains",
            gammas.len()
        )));
    }
    check_gammas(gammas)?;
    let product: f64 = gammas.iter().product();
    let front = match order {
        1 => 1.0 / 4.0,
        2 => 3.0 / 16.0,
        _ => 5.0 / 32.0,
    };
    Ok(front / product)
}

/// High-SNR value of the channel-averaged tail, coefficient times
/// rho^-order.
pub fn q_channel_average(order: usize, gammas: &[f64], rho: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok(q_average_coefficient(order, gammas)? * rho.powi(-(order as i32)))
}

/// Exact channel average of Q1(sqrt(2 rho sum of exponential gains)) via
/// the quarter-circle integral (1/pi) int prod (1 + rho g_i / sin^2)^-1.
pub fn q_sum_average_exact(gammas: &[f64], rho: f64) -> Result<f64> {
    check_rho(rho)?;
    if gammas.is_empty() {
        return Err(Error::InvalidArgument("at least one mean gain required".into()));
    }
    check_gammas(gammas)?;
    let integrand = |theta: f64| {
        let s2 = theta.sin().powi(2);
        if s2 == 0.0 {
            return 0.0;
        }
        gammas.iter().map(|g| 1.0 / (1.0 + rho * g / s2)).product::<f64>()
    };
    let n = 4096;
    let h = std::f64::consts::FRAC_PI_2 / n as f64;
    let mut acc = integrand(0.0) + integrand(std::f64::consts::FRAC_PI_2);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * integrand(k as f64 * h);
    }
    Ok(acc * h / 3.0 / std::f64::consts::PI)
}

/// Exact Rayleigh average of the one-dimensional tail:
/// E{Q1(sqrt(2 rho |h|^2))} = (1 - sqrt(c / (1 + c))) / 2 with c = rho g.
pub fn q1_rayleigh_average(gamma: f64, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    check_gammas(&[gamma])?;
    let c = rho * gamma;
    Ok(0.5 * (1.0 - (c / (1.0 + c)).sqrt()))
}

/// Tabulated high-SNR pairwise error of the unscaled adaptive scheme.
/// Only the published transitions are available: the double error out of
/// an equal-sign pair, and the first-source single error whose expansion
/// branches on the level ordering.
pub fn pep_panc_unscaled(
    from: SymbolPair,
    to: SymbolPair,
    gains: &LinkGains,
    a: f64,
    b: f64,
    rho: f64,
) -> Result<f64> {
    check_high_snr(rho)?;
    check_gammas(&[gains.g1r, gains.g2r, gains.g1d, gains.g2d, gains.grd])?;
    if !(a >= 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "levels must be finite with a nonnegative first entry (a={a}, b={b})"
        )));
    }
    let gsr = gains.g1r + gains.g2r;
    let gsum = gains.g1d + gains.g2d + gains.grd;
    match (from, to) {
        (SymbolPair::T1, SymbolPair::T4) | (SymbolPair::T4, SymbolPair::T1) => Ok(
            5.0 / (32.0 * gains.g1d * gains.g2d * gains.grd) * rho.powi(-3)
                + 5.0 / (128.0 * gains.g1d * gains.g2d * gains.grd * gains.g1r) * rho.powi(-4)
                + gains.grd / (4.0 * gains.g2r * gsum) * rho.powi(-1)
                + gains.grd / (4.0 * gsr * gsum) * rho.powi(-1),
        ),
        (SymbolPair::T1, SymbolPair::T2) | (SymbolPair::T4, SymbolPair::T3) => {
            let common = 3.0 / (16.0 * gains.g1d * gains.grd) * rho.powi(-2)
                + 1.0 / (4.0 * gains.g1r) * rho.powi(-1);
            let rest = if a > b.abs() {
                1.0 / (4.0 * gains.g2r) * rho.powi(-1) + 1.0 / (4.0 * gsr) * rho.powi(-1)
            } else if a < b.abs() {
                3.0 / (64.0 * gains.g1d * gains.grd * gains.g2r) * rho.powi(-3)
                    + 3.0 / (64.0 * gains.g1d * gains.grd * gsr) * rho.powi(-3)
            } else {
                1.0 / (16.0 * gains.g1d * gains.g2r) * rho.powi(-2)
                    + 1.0 / (16.0 * gains.g1d * gsr) * rho.powi(-2)
            };
            Ok(common + rest)
        }
        _ => Err(Error::InvalidArgument(format!(
            "no tabulated expansion for {from:?} -> {to:?}"
        ))),
    }
}

/// Tabulated high-SNR pairwise error of the XOR scheme: the dominant
/// published transition in each case. The published display collapses the
/// two source-destination gains into one; the first source's gain stands
/// in, which is exact on symmetric placements.
pub fn pep_cxnc(scaled: bool, gains: &LinkGains, rho: f64) -> Result<f64> {
    check_high_snr(rho)?;
    check_gammas(&[gains.g1r, gains.g2r, gains.g1d, gains.g2d, gains.grd])?;
    if scaled {
        return Ok(1.0 / (4.0 * gains.g1d) * rho.powi(-1));
    }
    let gsd = gains.g1d;
    Ok(
        5.0 / (32.0 * gsd * gains.grd * gains.g1r) * rho.powi(-3)
            + 5.0 / (32.0 * gsd * gains.grd * gains.g2r) * rho.powi(-3)
            + 1.0 / (4.0 * gsd) * rho.powi(-1),
    )
}

/// Chernoff bound on the averaged virtual-channel pairwise error for unit
/// BPSK differences: each independently faded error branch contributes a
/// factor (1 + rho g / 2)^-1, so the bound decays at the branch count.
pub fn chernoff_pep_bound(branch_gains: &[f64], rho: f64) -> Result<f64> {
    check_rho(rho)?;
    check_gammas(branch_gains)?;
    Ok(0.5
        * branch_gains
            .iter()
            .map(|g| 1.0 / (1.0 + rho * g / 2.0))
            .product::<f64>())
}

/// Mean of the exponential dominating the combined source-relay-destination
/// branch: the minimum of the three single-link exponentials.
pub fn gamma_srd_mean(g1r: f64, g2r: f64, grd: f64) -> f64 {
    g1r * g2r * grd / (g1r * g2r + g1r * grd + g2r * grd)
}

/// Kolmogorov distance between a sample and the exponential law with the
/// given mean.
pub fn ks_distance_to_exponential(samples: &mut [f64], mean: f64) -> Result<f64> {
    if samples.is_empty() || !(mean > 0.0 && mean.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need samples and a positive mean, got {} samples with mean {mean}",
            samples.len()
        )));
    }
    samples.sort_by(|a, b| a.partial_cmp(b).expect("non-finite sample"));
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in samples.iter().enumerate() {
        let f = 1.0 - (-x / mean).exp();
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(d)
}

/// Least-squares diversity order of one scheme's curve: the slope of
/// log10(SPER) against SNR decades, over grid points inside the window and
/// above ten times the Monte Carlo resolution floor.
pub fn diversity_slope(
    results: &[SweepResult],
    scheme: SchemeId,
    window_db: (f64, f64),
) -> Result<DiversityFit> {
    if !(window_db.1 - window_db.0 >= 10.0 - 1e-9) {
        return Err(Error::InvalidArgument(format!(
            "fit window must span at least 10 dB, got {window_db:?}"
        )));
    }
    let points: Vec<(f64, f64)> = results
        .iter()
        .filter(|r| {
            r.scheme == scheme
                && r.snr_db >= window_db.0
                && r.snr_db <= window_db.1
                && r.sper_mc > 10.0 / r.trials as f64
        })
        .map(|r| (r.snr_db / 10.0, r.sper_mc.log10()))
        .collect();
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} resolvable grid points for {} in {window_db:?}",
            points.len(),
            scheme.name()
        )));
    }
    let n = points.len() as f64;
    let xm = points.iter().map(|p| p.0).sum::<f64>() / n;
    let ym = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - xm) * (p.0 - xm)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - xm) * (p.1 - ym)).sum();
    let slope = -sxy / sxx;
    let residual = (points
        .iter()
        .map(|p| {
            let fit = ym - slope * (p.0 - xm);
            (p.1 - fit) * (p.1 - fit)
        })
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(DiversityFit {
        scheme,
        window_db,
        slope,
        residual,
    })
}
