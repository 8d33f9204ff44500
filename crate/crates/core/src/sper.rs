//! Exact end-to-end symbol-pair error rate for one channel realization.
//!
//! The relay side gives the conditional distribution of the forwarded level
//! for each transmitted pair; the destination side gives the probability of
//! leaving the correct decision cell for each (true pair, forwarded level)
//! combination, including the wrong-forwarding cases where the received
//! mean is displaced off the constellation. The pair error rate averages
//! the two independent source pairs; the sign-flipped pairs contribute
//! identically by central symmetry.

use crate::geometry::{
    build_idc, build_irc, CaseTag, ChannelRealization, Constellation, PowerPair, RelayLevel,
    SymbolPair,
};
use crate::wedge::cell_shape_prob;
use crate::{Error, Result};

/// Conditional distribution of the forwarded signed level, one row per
/// conditioning pair (first row T1, second row T2), columns ordered
/// (+a, +b, -b, -a).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayLevelDistribution {
    pub rows: [[f64; 4]; 2],
}

/// Full accounting of one exact SPER evaluation.
#[derive(Debug, Clone)]
pub struct SperBreakdown {
    pub total: f64,
    /// P(error | T1) and P(error | T2).
    pub per_pair_error: [f64; 2],
    pub relay: RelayLevelDistribution,
    /// Destination conditional error per (conditioning pair, forwarded
    /// level), same layout as the relay rows.
    pub dest_errors: [[f64; 4]; 2],
    pub relay_case: CaseTag,
    pub dest_case: CaseTag,
}

/// Conditional distribution of the relay's forwarded level given the sent
/// pair: the probability mass of each decision cell around the sent vertex,
/// with the opposite pair's entry closed by total probability.
pub fn relay_row(irc: &Constellation, sent: SymbolPair) -> Result<[f64; 4]> {
    let mean = irc.vertices[sent.index()];
    let residual = 3 - sent.index();
    let mut row = [0.0; 4];
    let mut acc = 0.0;
    for k in 0..4 {
        if k == residual {
            continue;
        }
        let shape = irc.cell_shape(k)?;
        let p = cell_shape_prob(mean, irc.sigma_per_dim, &shape)?;
        row[k] = p;
        acc += p;
    }
    row[residual] = (1.0 - acc).clamp(0.0, 1.0);
    Ok(row)
}

/// Relay level distribution for the two conditioning pairs T1 and T2.
pub fn relay_level_probs(
    irc: &Constellation,
    case: CaseTag,
) -> Result<RelayLevelDistribution> {
    if case != irc.case_tag {
        return Err(Error::InvalidArgument(format!(
            "case tag {case} does not match the constellation's {}",
            irc.case_tag
        )));
    }
    Ok(RelayLevelDistribution {
        rows: [
            relay_row(irc, SymbolPair::T1)?,
            relay_row(irc, SymbolPair::T2)?,
        ],
    })
}

/// Destination-plane mean for a true pair and a forwarded level, read off
/// the destination constellation: the true pair's source sum on the X axis,
/// the forwarded scaled level on the Y axis.
pub fn displaced_mean(
    idc: &Constellation,
    true_pair: SymbolPair,
    forwarded: RelayLevel,
) -> [f64; 2] {
    let u = idc.s1[0];
    let v = idc.s2[0];
    let a_level = idc.s1[1] + idc.s2[1];
    let b_level = idc.s2[1] - idc.s1[1];
    let y = match forwarded {
        RelayLevel::PlusA => a_level,
        RelayLevel::PlusB => b_level,
        RelayLevel::MinusB => -b_level,
        RelayLevel::MinusA => -a_level,
    };
    [true_pair.x1() * u + true_pair.x2() * v, y]
}

/// Probability that joint detection at the destination misses the true
/// pair's cell when the relay forwarded the given level.
pub fn dest_conditional_error(
    idc: &Constellation,
    true_pair: SymbolPair,
    forwarded: RelayLevel,
) -> Result<f64> {
    let mean = displaced_mean(idc, true_pair, forwarded);
    let shape = idc.cell_shape(true_pair.index())?;
    let p = cell_shape_prob(mean, idc.sigma_per_dim, &shape)?;
    Ok((1.0 - p).clamp(0.0, 1.0))
}

/// Exact SPER for one channel realization and relay power pair, broken
/// down by conditioning pair, forwarded level, and shape case.
pub fn sper_exact(ch: &ChannelRealization, p: &PowerPair) -> Result<SperBreakdown> {
    let irc = build_irc(ch)?;
    let idc = build_idc(ch, p)?;
    let relay = relay_level_probs(&irc, irc.case_tag)?;
    let mut dest_errors = [[0.0; 4]; 2];
    let mut per_pair_error = [0.0; 2];
    for (i, pair) in [SymbolPair::T1, SymbolPair::T2].into_iter().enumerate() {
        for level in RelayLevel::ALL {
            let d = dest_conditional_error(&idc, pair, level)?;
            dest_errors[i][level.index()] = d;
            per_pair_error[i] += relay.rows[i][level.index()] * d;
        }
    }
    let total = 0.5 * (per_pair_error[0] + per_pair_error[1]);
    Ok(SperBreakdown {
        total,
        per_pair_error,
        relay,
        dest_errors,
        relay_case: irc.case_tag,
        dest_case: idc.case_tag,
    })
}

/// SPER under perfect relay detection: only the destination stage errs.
pub fn sper_genie(ch: &ChannelRealization, p: &PowerPair) -> Result<f64> {
    let idc = build_idc(ch, p)?;
    let e1 = dest_conditional_error(&idc, SymbolPair::T1, RelayLevel::PlusA)?;
    let e2 = dest_conditional_error(&idc, SymbolPair::T2, RelayLevel::PlusB)?;
    Ok(0.5 * (e1 + e2))
}
