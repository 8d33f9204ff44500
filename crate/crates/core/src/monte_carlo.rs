//! Seeded Monte Carlo simulation of the relaying schemes.
//!
//! Channel draws, detection noise, and baseline power draws each come from
//! their own counter-keyed stream, so every (SNR point, channel, scheme)
//! cell is reproducible in isolation: results are bit-identical for a given
//! seed regardless of worker count or which other schemes run alongside.
//! All schemes at one SNR point share the channel stream, giving common
//! random numbers for the ordering comparisons and the analytic overlays.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::Error;
use crate::geometry::{
    vdist, ChannelRealization, Point, PowerPair, RelayLevel, SymbolPair,
};
use crate::power::{
    baseline_powers, optimize_powers_ct, optimize_powers_exact, scaling_factor, LinkSnrs,
};
use crate::sper::{sper_exact, sper_genie};
use crate::transform::sper_ct;
use crate::Result;

/// Hypothesis order for every argmin detector: ascending lexicographic
/// (x1, x2), so strict improvement resolves ties toward the smallest pair.
const DETECT_ORDER: [SymbolPair; 4] = [
    SymbolPair::T4,
    SymbolPair::T2,
    SymbolPair::T3,
    SymbolPair::T1,
];

/// Simulated relaying scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeId {
    /// Adaptive levels from the parallelogram closed form, power scaling on.
    OriginOpt,
    /// Adaptive levels from the rectangle closed form, power scaling on.
    CtOpt,
    /// Uniform random levels per channel draw, power scaling on.
    Random,
    /// One uniform random level pair per run, power scaling on.
    Fixed,
    /// Relay forwards the true pair's level; destination noise only.
    Genie,
    /// XOR network coding at fixed relay amplitude, no power scaling.
    Cxnc,
    /// XOR network coding with power scaling.
    CxncAlpha,
    /// Parallelogram closed-form levels without power scaling.
    OriginUnscaled,
}

impl SchemeId {
    pub const ALL: [SchemeId; 8] = [
        SchemeId::OriginOpt,
        SchemeId::CtOpt,
        SchemeId::Random,
        SchemeId::Fixed,
        SchemeId::Genie,
        SchemeId::Cxnc,
        SchemeId::CxncAlpha,
        SchemeId::OriginUnscaled,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeId::OriginOpt => "origin_opt",
            SchemeId::CtOpt => "ct_opt",
            SchemeId::Random => "random",
            SchemeId::Fixed => "fixed",
            SchemeId::Genie => "genie",
            SchemeId::Cxnc => "cxnc",
            SchemeId::CxncAlpha => "cxnc_alpha",
            SchemeId::OriginUnscaled => "origin_unscaled",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown scheme '{name}'")))
    }

    /// Stable stream tag, independent of enum order and scheme subsets.
    fn stream_tag(self) -> u64 {
        match self {
            SchemeId::OriginOpt => 10,
            SchemeId::CtOpt => 11,
            SchemeId::Random => 12,
            SchemeId::Fixed => 13,
            SchemeId::Genie => 14,
            SchemeId::Cxnc => 15,
            SchemeId::CxncAlpha => 16,
            SchemeId::OriginUnscaled => 17,
        }
    }

    fn is_xor(self) -> bool {
        matches!(self, SchemeId::Cxnc | SchemeId::CxncAlpha)
    }

    fn scales_power(self) -> bool {
        !matches!(self, SchemeId::Cxnc | SchemeId::OriginUnscaled)
    }
}

/// Node placement of the two sources, relay, and destination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkGeometry {
    pub s1: Point,
    pub s2: Point,
    pub relay: Point,
    pub d: Point,
    pub pathloss_exponent: f64,
}

/// Mean channel power gain of each link under the path loss model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGains {
    pub g1r: f64,
    pub g2r: f64,
    pub g1d: f64,
    pub g2d: f64,
    pub grd: f64,
}

impl LinkGains {
    pub fn from_geometry(geom: &NetworkGeometry) -> Result<Self> {
        if !(geom.pathloss_exponent > 0.0 && geom.pathloss_exponent.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "path loss exponent must be positive, got {}",
                geom.pathloss_exponent
            )));
        }
        let gain = |from: Point, to: Point, link: &str| -> Result<f64> {
            let d = vdist(from, to);
            if d <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "{link} endpoints coincide at ({}, {})",
                    from[0], from[1]
                )));
            }
            Ok(d.powf(-geom.pathloss_exponent))
        };
        Ok(Self {
            g1r: gain(geom.s1, geom.relay, "source-1 to relay")?,
            g2r: gain(geom.s2, geom.relay, "source-2 to relay")?,
            g1d: gain(geom.s1, geom.d, "source-1 to destination")?,
            g2d: gain(geom.s2, geom.d, "source-2 to destination")?,
            grd: gain(geom.relay, geom.d, "relay to destination")?,
        })
    }
}

/// Rayleigh channel draw: every link is circularly symmetric complex
/// Gaussian with the link's mean power gain; source-destination and
/// relay-destination links are exposed as magnitudes (their phases are
/// equalized before detection). Draws whose relay-plane constellation
/// collapses are resampled.
pub fn sample_channels<R: Rng + ?Sized>(
    gains: &LinkGains,
    energy: f64,
    sigma2: f64,
    rng: &mut R,
) -> ChannelRealization {
    loop {
        let mut draw = |g: f64| {
            let s = (g / 2.0).sqrt();
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(s * re, s * im)
        };
        let h1r = draw(gains.g1r);
        let h2r = draw(gains.g2r);
        let h1d = draw(gains.g1d).norm();
        let h2d = draw(gains.g2d).norm();
        let hrd = draw(gains.grd).norm();
        let Ok(ch) =
            ChannelRealization::new(h1r, h2r, h1d, h2d, hrd, energy, energy, sigma2)
        else {
            continue;
        };
        if ch.beta().abs() > 1e-9 * energy && h1d > 0.0 && h2d > 0.0 && hrd > 0.0 {
            return ch;
        }
    }
}

/// ML detection of the source pair from the relay observation.
pub fn relay_detect(y_r: Complex64, ch: &ChannelRealization) -> SymbolPair {
    let arm1 = ch.h1r * ch.e1.sqrt();
    let arm2 = ch.h2r * ch.e2.sqrt();
    let mut decided = DETECT_ORDER[0];
    let mut best = f64::INFINITY;
    for pair in DETECT_ORDER {
        let d = (y_r - arm1 * pair.x1() - arm2 * pair.x2()).norm_sqr();
        if d < best {
            best = d;
            decided = pair;
        }
    }
    decided
}

/// Signed scaled level the relay transmits for a decided pair. An exact
/// gain tie on a mixed pair makes the combining sign vanish; it resolves
/// to +1 and is logged (the event has probability zero under fading).
pub fn panc_forward(pair: SymbolPair, ch: &ChannelRealization, p: &PowerPair) -> f64 {
    if pair.x1() != pair.x2() && ch.h1r.norm() == ch.h2r.norm() {
        log::warn!("combining sign hit an exact gain tie; resolving to +1");
        return p.scaled_level(RelayLevel::PlusB);
    }
    p.scaled_level(RelayLevel::correct_for(pair))
}

/// Joint ML detection of the source pair from the two destination-plane
/// coordinates: the equalized direct-phase sum on the first axis, the
/// relay-phase observation on the second.
pub fn dest_detect(
    y1: f64,
    y2: f64,
    ch: &ChannelRealization,
    p: &PowerPair,
    scheme: SchemeId,
) -> SymbolPair {
    let u = ch.e1.sqrt() * ch.h1d_mag;
    let v = ch.e2.sqrt() * ch.h2d_mag;
    let xor_amp = p.alpha.sqrt() * p.er_ave.sqrt();
    let mut decided = DETECT_ORDER[0];
    let mut best = f64::INFINITY;
    for pair in DETECT_ORDER {
        let m1 = u * pair.x1() + v * pair.x2();
        let m2 = ch.hrd_mag
            * if scheme.is_xor() {
                xor_amp * pair.x1() * pair.x2()
            } else {
                p.scaled_level(RelayLevel::correct_for(pair))
            };
        let d = (y1 - m1) * (y1 - m1) + (y2 - m2) * (y2 - m2);
        if d < best {
            best = d;
            decided = pair;
        }
    }
    decided
}

/// One simulated symbol-pair transmission.
#[derive(Debug, Clone, Copy)]
pub struct TrialOutcome {
    pub sent: SymbolPair,
    pub relay_decision: SymbolPair,
    /// Scaled signed amplitude the relay actually transmitted.
    pub forwarded_level: f64,
    pub decided: SymbolPair,
    pub pair_error: bool,
}

/// Simulates one transmission end to end. The relay sees complex noise of
/// variance sigma^2; each destination axis sees real noise of variance
/// sigma^2.
pub fn simulate_trial<R: Rng + ?Sized>(
    scheme: SchemeId,
    ch: &ChannelRealization,
    p: &PowerPair,
    rng: &mut R,
) -> TrialOutcome {
    let sent = SymbolPair::ALL[rng.gen_range(0..4)];
    let relay_spd = (ch.sigma2 / 2.0).sqrt();
    let nr_re: f64 = rng.sample(StandardNormal);
    let nr_im: f64 = rng.sample(StandardNormal);
    let y_r = ch.h1r * ch.e1.sqrt() * sent.x1()
        + ch.h2r * ch.e2.sqrt() * sent.x2()
        + Complex64::new(relay_spd * nr_re, relay_spd * nr_im);
    let relay_decision = if scheme == SchemeId::Genie {
        sent
    } else {
        relay_detect(y_r, ch)
    };
    let forwarded_level = if scheme.is_xor() {
        p.alpha.sqrt() * p.er_ave.sqrt() * relay_decision.x1() * relay_decision.x2()
    } else {
        panc_forward(relay_decision, ch, p)
    };

    let dest_spd = ch.sigma2.sqrt();
    let n1: f64 = rng.sample(StandardNormal);
    let n2: f64 = rng.sample(StandardNormal);
    let u = ch.e1.sqrt() * ch.h1d_mag;
    let v = ch.e2.sqrt() * ch.h2d_mag;
    let y1 = u * sent.x1() + v * sent.x2() + dest_spd * n1;
    let y2 = ch.hrd_mag * forwarded_level + dest_spd * n2;
    let decided = dest_detect(y1, y2, ch, p, scheme);
    TrialOutcome {
        sent,
        relay_decision,
        forwarded_level,
        decided,
        pair_error: decided != sent,
    }
}

/// Scheme estimate at one SNR grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepResult {
    pub snr_db: f64,
    pub scheme: SchemeId,
    pub trials: u64,
    pub sper_mc: f64,
    pub ci95_halfwidth: f64,
    pub sper_exact: Option<f64>,
    pub sper_ct: Option<f64>,
}

/// Runtime sweep parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub gains: LinkGains,
    pub snr_db: Vec<f64>,
    pub schemes: Vec<SchemeId>,
    pub channels: u64,
    pub symbols: u64,
    pub seed: u64,
    /// Per-source and relay average symbol energy; the SNR axis is
    /// 10 log10(energy / sigma^2).
    pub energy: f64,
    /// Attach channel-averaged analytic values over the same draws.
    pub analytic_overlays: bool,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.schemes.is_empty() {
            return Err(Error::InvalidConfig("no schemes selected".into()));
        }
        if self.channels == 0 || self.symbols == 0 {
            return Err(Error::InvalidConfig(format!(
                "trial counts must be positive ({} channels x {} symbols)",
                self.channels, self.symbols
            )));
        }
        if self.snr_db.is_empty() || self.snr_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidConfig("SNR grid must be finite and nonempty".into()));
        }
        if self.snr_db.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig("SNR grid must be strictly increasing".into()));
        }
        if !(self.energy > 0.0 && self.energy.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "symbol energy must be positive, got {}",
                self.energy
            )));
        }
        Ok(())
    }
}

const TAG_CHANNEL: u64 = 1;
const TAG_NOISE: u64 = 2;
const TAG_POWERS: u64 = 3;
const TAG_FIXED: u64 = 4;
const TAG_BLOCK: u64 = 5;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent deterministic generator for one (purpose, point, index) cell.
fn stream(seed: u64, purpose: u64, point: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let mut state = seed ^ 0x9e37_79b9_7f4a_7c15;
    for (i, word) in [seed, purpose, point, index].into_iter().enumerate() {
        state = mix(state.wrapping_add(word).wrapping_add(i as u64));
        key[i * 8..(i + 1) * 8].copy_from_slice(&state.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Level pair a scheme uses on one channel draw, before power scaling.
fn scheme_levels(
    scheme: SchemeId,
    ch: &ChannelRealization,
    er_ave: f64,
    fixed: &PowerPair,
    powers_rng: &mut ChaCha8Rng,
) -> Result<PowerPair> {
    match scheme {
        SchemeId::OriginOpt | SchemeId::Genie | SchemeId::OriginUnscaled => {
            optimize_powers_exact(ch, er_ave)?.pair(1.0)
        }
        SchemeId::CtOpt => optimize_powers_ct(ch, er_ave)?.pair(1.0),
        SchemeId::Random => baseline_powers(er_ave, powers_rng),
        SchemeId::Fixed => Ok(*fixed),
        SchemeId::Cxnc | SchemeId::CxncAlpha => {
            PowerPair::new(er_ave.sqrt(), er_ave.sqrt(), 1.0, er_ave)
        }
    }
}

struct ChannelTally {
    errors: u64,
    exact: Option<f64>,
    ct: Option<f64>,
}

fn channel_cell(
    cfg: &SweepConfig,
    scheme: SchemeId,
    snr_index: u64,
    channel_index: u64,
    sigma2: f64,
    fixed: &PowerPair,
) -> Result<ChannelTally> {
    let mut ch_rng = stream(cfg.seed, TAG_CHANNEL, snr_index, channel_index);
    let ch = sample_channels(&cfg.gains, cfg.energy, sigma2, &mut ch_rng);
    let mut powers_rng = stream(cfg.seed, TAG_POWERS, snr_index, channel_index);
    let levels = scheme_levels(scheme, &ch, cfg.energy, fixed, &mut powers_rng)?;
    let alpha = if scheme.scales_power() {
        scaling_factor(LinkSnrs::instantaneous(&ch, cfg.energy)?)
    } else {
        1.0
    };
    let p = levels.with_alpha(alpha)?;

    let mut noise_rng = stream(
        cfg.seed,
        TAG_NOISE.wrapping_add(scheme.stream_tag() << 8),
        snr_index,
        channel_index,
    );
    let mut errors = 0u64;
    for _ in 0..cfg.symbols {
        errors += u64::from(simulate_trial(scheme, &ch, &p, &mut noise_rng).pair_error);
    }

    // Overlay failures are skipped, not fatal: the closed forms degenerate
    // on rare draws (near-collapsed destination constellation at vanishing
    // scaling factor; transformed vertices sharing a decision cone), where
    // the approximation is simply undefined.
    let (exact, ct) = if cfg.analytic_overlays && !scheme.is_xor() {
        let exact = if scheme == SchemeId::Genie {
            sper_genie(&ch, &p)
        } else {
            sper_exact(&ch, &p).map(|b| b.total)
        };
        let exact = exact
            .inspect_err(|e| log::debug!("analytic overlay skipped a draw: {e}"))
            .ok();
        let ct = if scheme == SchemeId::Genie {
            None
        } else {
            sper_ct(&ch, &p)
                .inspect_err(|e| log::debug!("transform overlay skipped a draw: {e}"))
                .ok()
        };
        (exact, ct)
    } else {
        (None, None)
    };
    Ok(ChannelTally { errors, exact, ct })
}

/// Channel-averaged SPER sweep over the SNR grid, one row per grid point
/// and scheme, in grid-then-scheme order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepResult>> {
    cfg.validate()?;
    let mut fixed_rng = stream(cfg.seed, TAG_FIXED, 0, 0);
    let fixed = baseline_powers(cfg.energy, &mut fixed_rng)?;
    let mut out = Vec::with_capacity(cfg.snr_db.len() * cfg.schemes.len());
    for (si, &snr_db) in cfg.snr_db.iter().enumerate() {
        let sigma2 = cfg.energy / 10f64.powf(snr_db / 10.0);
        for &scheme in &cfg.schemes {
            let tallies: Vec<Result<ChannelTally>> = (0..cfg.channels)
                .into_par_iter()
                .map(|ci| channel_cell(cfg, scheme, si as u64, ci, sigma2, &fixed))
                .collect();
            let mut errors = 0u64;
            let mut exact_sum = 0.0;
            let mut ct_sum = 0.0;
            let mut exact_n = 0u64;
            let mut ct_n = 0u64;
            for t in tallies {
                let t = t?;
                errors += t.errors;
                if let Some(e) = t.exact {
                    exact_sum += e;
                    exact_n += 1;
                }
                if let Some(c) = t.ct {
                    ct_sum += c;
                    ct_n += 1;
                }
            }
            let trials = cfg.channels * cfg.symbols;
            let p_hat = errors as f64 / trials as f64;
            out.push(SweepResult {
                snr_db,
                scheme,
                trials,
                sper_mc: p_hat,
                ci95_halfwidth: 1.96 * (p_hat * (1.0 - p_hat) / trials as f64).sqrt(),
                sper_exact: (exact_n > 0).then(|| exact_sum / exact_n as f64),
                sper_ct: (ct_n > 0).then(|| ct_sum / ct_n as f64),
            });
        }
    }
    Ok(out)
}

/// SPER estimate at one fixed channel realization, parallelized over
/// deterministic blocks.
pub fn estimate_sper(
    scheme: SchemeId,
    ch: &ChannelRealization,
    p: &PowerPair,
    trials: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trial count must be positive".into()));
    }
    const BLOCK: u64 = 1 << 16;
    let blocks = trials.div_ceil(BLOCK);
    let errors: u64 = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(seed, TAG_BLOCK.wrapping_add(scheme.stream_tag() << 8), b, 0);
            let n = BLOCK.min(trials - b * BLOCK);
            let mut e = 0u64;
            for _ in 0..n {
                e += u64::from(simulate_trial(scheme, ch, p, &mut rng).pair_error);
            }
            e
        })
        .sum();
    let p_hat = errors as f64 / trials as f64;
    Ok((p_hat, 1.96 * (p_hat * (1.0 - p_hat) / trials as f64).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_idc, build_irc, voronoi_cell};
    use rand::rngs::StdRng;

    fn unit_gains() -> LinkGains {
        LinkGains {
            g1r: 1.0,
            g2r: 1.0,
            g1d: 1.0,
            g2d: 1.0,
            grd: 1.0,
        }
    }

    fn fixed_channel(sigma2: f64) -> ChannelRealization {
        ChannelRealization::new(
            Complex64::new(0.9, 0.3),
            Complex64::new(-0.2, 1.1),
            0.8,
            0.6,
            1.1,
            1.0,
            1.0,
            sigma2,
        )
        .unwrap()
    }

    fn small_config() -> SweepConfig {
        SweepConfig {
            gains: unit_gains(),
            snr_db: vec![10.0, 14.0],
            schemes: vec![SchemeId::OriginOpt, SchemeId::Genie],
            channels: 40,
            symbols: 50,
            seed: 7,
            energy: 1.0,
            analytic_overlays: true,
        }
    }

    #[test]
    fn streams_are_deterministic_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| stream(1, 2, 3, 4).gen::<u64>()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let base = stream(1, 2, 3, 4).gen::<u64>();
        assert_ne!(stream(2, 2, 3, 4).gen::<u64>(), base);
        assert_ne!(stream(1, 3, 3, 4).gen::<u64>(), base);
        assert_ne!(stream(1, 2, 4, 4).gen::<u64>(), base);
        assert_ne!(stream(1, 2, 3, 5).gen::<u64>(), base);
    }

    #[test]
    fn link_gains_follow_the_path_loss_model() {
        let geom = NetworkGeometry {
            s1: [0.0, 3f64.sqrt() / 3.0],
            s2: [0.0, -(3f64.sqrt()) / 3.0],
            relay: [0.0, 0.0],
            d: [1.0, 0.0],
            pathloss_exponent: 3.0,
        };
        let g = LinkGains::from_geometry(&geom).unwrap();
        let d1r = 3f64.sqrt() / 3.0;
        assert!((g.g1r - d1r.powf(-3.0)).abs() < 1e-12);
        assert!((g.grd - 1.0).abs() < 1e-12);
        let d1d = (1.0 + 1.0 / 3.0f64).sqrt();
        assert!((g.g1d - d1d.powf(-3.0)).abs() < 1e-12);

        let collapsed = NetworkGeometry {
            relay: [1.0, 0.0],
            ..geom
        };
        assert!(LinkGains::from_geometry(&collapsed).is_err());
        let flat = NetworkGeometry {
            pathloss_exponent: 0.0,
            ..geom
        };
        assert!(LinkGains::from_geometry(&flat).is_err());
    }

    #[test]
    fn sampled_channels_match_their_mean_gains() {
        let gains = LinkGains {
            g1r: 0.7,
            g2r: 1.9,
            g1d: 0.4,
            g2d: 1.1,
            grd: 2.3,
        };
        let mut rng = StdRng::seed_from_u64(11);
        let n = 1_000_000;
        let mut acc = [0.0f64; 5];
        for _ in 0..n {
            let ch = sample_channels(&gains, 1.0, 0.5, &mut rng);
            acc[0] += ch.h1r.norm_sqr();
            acc[1] += ch.h2r.norm_sqr();
            acc[2] += ch.h1d_mag * ch.h1d_mag;
            acc[3] += ch.h2d_mag * ch.h2d_mag;
            acc[4] += ch.hrd_mag * ch.hrd_mag;
        }
        let target = [gains.g1r, gains.g2r, gains.g1d, gains.g2d, gains.grd];
        for (sum, want) in acc.iter().zip(target) {
            let mean = sum / n as f64;
            assert!(
                (mean - want).abs() < 0.01 * want,
                "mean gain {mean} vs {want}"
            );
        }
    }

    #[test]
    fn relay_detect_recovers_noiseless_vertices_and_breaks_ties() {
        let ch = fixed_channel(0.4);
        for pair in SymbolPair::ALL {
            let y = ch.h1r * ch.e1.sqrt() * pair.x1() + ch.h2r * ch.e2.sqrt() * pair.x2();
            assert_eq!(relay_detect(y, &ch), pair);
        }
        // Orthogonal equal-power arms make the origin equidistant from all
        // four vertices; the smallest pair (-1, -1) wins.
        let square = ChannelRealization::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            1.0,
            1.0,
            1.0,
            1.0,
            1.0,
            1.0,
        )
        .unwrap();
        assert_eq!(relay_detect(Complex64::new(0.0, 0.0), &square), SymbolPair::T4);
    }

    #[test]
    fn relay_detect_agrees_with_the_voronoi_regions() {
        let ch = fixed_channel(0.8);
        let irc = build_irc(&ch).unwrap();
        let mut rng = StdRng::seed_from_u64(13);
        let mut disagreements = 0u32;
        for _ in 0..100_000 {
            let y = Complex64::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
            let detected = relay_detect(y, &ch);
            let cell = voronoi_cell(&irc, detected.index()).unwrap();
            if !cell.contains([y.re, y.im]) {
                disagreements += 1;
            }
        }
        assert_eq!(disagreements, 0);
    }

    #[test]
    fn panc_forward_maps_pairs_to_signed_scaled_levels() {
        let ch = fixed_channel(0.5);
        let p = PowerPair::new(1.2, 0.7, 0.64, 1.0).unwrap();
        let root = 0.8;
        assert!((panc_forward(SymbolPair::T1, &ch, &p) - root * 1.2).abs() < 1e-15);
        assert!((panc_forward(SymbolPair::T2, &ch, &p) - root * 0.7).abs() < 1e-15);
        assert!((panc_forward(SymbolPair::T3, &ch, &p) + root * 0.7).abs() < 1e-15);
        assert!((panc_forward(SymbolPair::T4, &ch, &p) + root * 1.2).abs() < 1e-15);

        // Exact gain tie on a mixed pair resolves the vanished sign to +1.
        let tie = ChannelRealization::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            1.0,
            1.0,
            1.0,
            1.0,
            1.0,
            1.0,
        )
        .unwrap();
        assert!((panc_forward(SymbolPair::T3, &tie, &p) - root * 0.7).abs() < 1e-15);
    }

    #[test]
    fn dest_detect_recovers_noiseless_transmissions() {
        let ch = fixed_channel(0.5);
        for p in [
            PowerPair::new(1.2, 0.7, 0.8, 1.0).unwrap(),
            PowerPair::new(1.0, -0.9, 0.6, 1.0).unwrap(),
        ] {
            for scheme in [SchemeId::OriginOpt, SchemeId::Cxnc] {
                for sent in SymbolPair::ALL {
                    let fwd = if scheme.is_xor() {
                        p.alpha.sqrt() * p.er_ave.sqrt() * sent.x1() * sent.x2()
                    } else {
                        panc_forward(sent, &ch, &p)
                    };
                    let u = ch.e1.sqrt() * ch.h1d_mag;
                    let v = ch.e2.sqrt() * ch.h2d_mag;
                    let y1 = u * sent.x1() + v * sent.x2();
                    let y2 = ch.hrd_mag * fwd;
                    assert_eq!(dest_detect(y1, y2, &ch, &p, scheme), sent);
                }
            }
        }
    }

    #[test]
    fn dest_detect_agrees_with_the_destination_voronoi_regions() {
        let ch = fixed_channel(0.7);
        let p = PowerPair::new(1.1, 0.5, 0.9, 1.0).unwrap();
        let idc = build_idc(&ch, &p).unwrap();
        let mut rng = StdRng::seed_from_u64(17);
        let mut disagreements = 0u32;
        for _ in 0..100_000 {
            let y1 = rng.gen_range(-4.0..4.0);
            let y2 = rng.gen_range(-4.0..4.0);
            let detected = dest_detect(y1, y2, &ch, &p, SchemeId::OriginOpt);
            let cell = voronoi_cell(&idc, detected.index()).unwrap();
            if !cell.contains([y1, y2]) {
                disagreements += 1;
            }
        }
        assert_eq!(disagreements, 0);
    }

    #[test]
    fn genie_with_vanishing_noise_never_errs() {
        let ch = fixed_channel(1e-8);
        let p = PowerPair::new(1.0, 0.6, 1.0, 1.0).unwrap();
        let mut rng = StdRng::seed_from_u64(19);
        for _ in 0..100_000 {
            let t = simulate_trial(SchemeId::Genie, &ch, &p, &mut rng);
            assert!(!t.pair_error);
            assert_eq!(t.relay_decision, t.sent);
        }
    }

    #[test]
    fn trial_outcomes_are_internally_consistent() {
        let ch = fixed_channel(0.9);
        let p = PowerPair::new(1.0, 0.6, 0.8, 1.0).unwrap();
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..20_000 {
            let t = simulate_trial(SchemeId::OriginOpt, &ch, &p, &mut rng);
            assert_eq!(t.pair_error, t.decided != t.sent);
            let expected = panc_forward(t.relay_decision, &ch, &p);
            assert_eq!(t.forwarded_level, expected);
        }
    }

    #[test]
    fn fixed_channel_estimate_matches_the_analytic_value() {
        let ch = fixed_channel(0.5);
        let p = PowerPair::new(1.1, 0.7, 0.85, 1.0).unwrap();
        let exact = sper_exact(&ch, &p).unwrap().total;
        let n = 400_000;
        let (mc, _) = estimate_sper(SchemeId::OriginOpt, &ch, &p, n, 99).unwrap();
        let sigma = (exact * (1.0 - exact) / n as f64).sqrt();
        assert!(
            (mc - exact).abs() <= 3.5 * sigma,
            "mc {mc} vs exact {exact} (sigma {sigma})"
        );
        assert!(estimate_sper(SchemeId::OriginOpt, &ch, &p, 0, 1).is_err());
    }

    #[test]
    fn sweeps_are_reproducible_and_subset_stable() {
        let cfg = small_config();
        let a = run_sweep(&cfg).unwrap();
        let b = run_sweep(&cfg).unwrap();
        assert_eq!(a, b);

        let solo = SweepConfig {
            schemes: vec![SchemeId::OriginOpt],
            ..cfg.clone()
        };
        let s = run_sweep(&solo).unwrap();
        let origin_rows: Vec<&SweepResult> = a
            .iter()
            .filter(|r| r.scheme == SchemeId::OriginOpt)
            .collect();
        assert_eq!(s.len(), origin_rows.len());
        for (lhs, rhs) in s.iter().zip(origin_rows) {
            assert_eq!(lhs, rhs);
        }

        let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let r1 = pool1.install(|| run_sweep(&cfg)).unwrap();
        let r4 = pool4.install(|| run_sweep(&cfg)).unwrap();
        assert_eq!(r1, r4);
    }

    #[test]
    fn sweep_rows_carry_consistent_statistics() {
        let cfg = small_config();
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), cfg.snr_db.len() * cfg.schemes.len());
        for r in &rows {
            assert_eq!(r.trials, cfg.channels * cfg.symbols);
            assert!(r.sper_mc >= 0.0 && r.sper_mc <= 1.0);
            let want = 1.96 * (r.sper_mc * (1.0 - r.sper_mc) / r.trials as f64).sqrt();
            assert!((r.ci95_halfwidth - want).abs() < 1e-15);
            assert!(r.sper_exact.is_some());
            let exact = r.sper_exact.unwrap();
            assert!((0.0..=1.0).contains(&exact));
            // Common random numbers tie the overlay to the same draws, so
            // the gap is pure binomial noise.
            let slack = 3.0 * (exact * (1.0 - exact) / r.trials as f64).sqrt() + 1e-3;
            assert!(
                (r.sper_mc - exact).abs() <= slack,
                "mc {} vs exact {exact} at {} dB",
                r.sper_mc,
                r.snr_db
            );
            match r.scheme {
                SchemeId::Genie => assert!(r.sper_ct.is_none()),
                SchemeId::OriginOpt => assert!(r.sper_ct.is_some()),
                _ => {}
            }
        }
    }

    #[test]
    fn fixed_scheme_reuses_one_pair_per_run() {
        let mut fixed_rng = stream(7, TAG_FIXED, 0, 0);
        let expected = baseline_powers(1.0, &mut fixed_rng).unwrap();
        let mut again = stream(7, TAG_FIXED, 0, 0);
        let repeat = baseline_powers(1.0, &mut again).unwrap();
        assert_eq!(expected.a, repeat.a);
        assert_eq!(expected.b, repeat.b);
    }

    #[test]
    fn configs_reject_invalid_grids_and_counts() {
        let base = small_config();
        let cases = [
            SweepConfig { schemes: vec![], ..base.clone() },
            SweepConfig { channels: 0, ..base.clone() },
            SweepConfig { symbols: 0, ..base.clone() },
            SweepConfig { snr_db: vec![], ..base.clone() },
            SweepConfig { snr_db: vec![10.0, 10.0], ..base.clone() },
            SweepConfig { snr_db: vec![14.0, 10.0], ..base.clone() },
            SweepConfig { energy: 0.0, ..base.clone() },
        ];
        for cfg in cases {
            assert!(run_sweep(&cfg).is_err());
        }
        assert!(SchemeId::from_name("origin_opt").is_ok());
        assert!(SchemeId::from_name("bogus").is_err());
        for s in SchemeId::ALL {
            assert_eq!(SchemeId::from_name(s.name()).unwrap(), s);
        }
    }

    #[test]
    fn genie_never_trails_its_own_scheme_at_high_snr() {
        let cfg = SweepConfig {
            gains: unit_gains(),
            snr_db: vec![18.0],
            schemes: vec![SchemeId::OriginOpt, SchemeId::Genie],
            channels: 400,
            symbols: 250,
            seed: 31,
            energy: 1.0,
            analytic_overlays: false,
        };
        let rows = run_sweep(&cfg).unwrap();
        let origin = rows.iter().find(|r| r.scheme == SchemeId::OriginOpt).unwrap();
        let genie = rows.iter().find(|r| r.scheme == SchemeId::Genie).unwrap();
        assert!(
            genie.sper_mc <= origin.sper_mc + genie.ci95_halfwidth + origin.ci95_halfwidth,
            "genie {} vs origin {}",
            genie.sper_mc,
            origin.sper_mc
        );
    }
}
