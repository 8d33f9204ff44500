//! Experiment presets, configuration files, and sweep artifacts.
//!
//! Ties the pipeline together: the three published relay placements, a
//! TOML config that round-trips losslessly, CSV emission with one row per
//! (SNR, scheme, method), and a gnuplot script for the curves. Per-node
//! symbol energy is fixed at 1 so the SNR axis is 10 log10(1/sigma^2).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::{vdist, Point};
use crate::monte_carlo::{
    run_sweep, LinkGains, NetworkGeometry, SchemeId, SweepConfig, SweepResult,
};
use crate::Result;

pub const CSV_HEADER: &str = "snr_db,scheme,method,sper,ci95,trials,seed";

/// Full description of one placement experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub s1: Point,
    pub s2: Point,
    pub relay: Point,
    pub d: Point,
    pub pathloss_exponent: f64,
    pub snr_db: Vec<f64>,
    pub schemes: Vec<SchemeId>,
    /// Independent channel draws per grid point.
    pub channels: u64,
    /// Symbol pairs simulated per channel draw.
    pub symbols: u64,
    pub seed: u64,
    /// CSV destination; the plot script lands next to it.
    pub out: PathBuf,
    /// Emit channel-averaged exact SPER rows over the same draws.
    pub overlay_exact: bool,
    /// Emit channel-averaged transform-approximation rows likewise.
    pub overlay_ct: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        preset("symmetric").expect("built-in preset")
    }
}

/// The three published relay placements. Sources sit at (0, +-sqrt(3)/3)
/// and the destination at (1, 0); the relay moves between experiments.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let relay = match name {
        "strong_sr" => [0.0, 0.0],
        "symmetric" => [1.0 / 3.0, 0.0],
        "strong_rd" => [0.8, 0.0],
        _ => {
            return Err(Error::InvalidConfig(format!(
                "unknown preset '{name}' (expected strong_sr, symmetric, or strong_rd)"
            )))
        }
    };
    let third = 3f64.sqrt() / 3.0;
    Ok(ExperimentConfig {
        s1: [0.0, third],
        s2: [0.0, -third],
        relay,
        d: [1.0, 0.0],
        pathloss_exponent: 3.0,
        snr_db: (0..=15).map(|k| 2.0 * k as f64).collect(),
        schemes: vec![
            SchemeId::OriginOpt,
            SchemeId::CtOpt,
            SchemeId::Random,
            SchemeId::Fixed,
            SchemeId::Genie,
            SchemeId::Cxnc,
            SchemeId::CxncAlpha,
        ],
        channels: 2000,
        symbols: 500,
        seed: 1,
        out: PathBuf::from(format!("{name}.csv")),
        overlay_exact: true,
        overlay_ct: true,
    })
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let nodes = [
            ("s1", self.s1),
            ("s2", self.s2),
            ("relay", self.relay),
            ("d", self.d),
        ];
        for (i, (na, pa)) in nodes.iter().enumerate() {
            if !(pa[0].is_finite() && pa[1].is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "node {na} has a non-finite coordinate"
                )));
            }
            for (nb, pb) in &nodes[i + 1..] {
                if pa == pb {
                    return Err(Error::InvalidConfig(format!(
                        "nodes {na} and {nb} coincide at ({}, {})",
                        pa[0], pa[1]
                    )));
                }
            }
        }
        let mut seen = Vec::new();
        for s in &self.schemes {
            if seen.contains(s) {
                return Err(Error::InvalidConfig(format!(
                    "scheme {} listed twice",
                    s.name()
                )));
            }
            seen.push(*s);
        }
        if self.out.as_os_str().is_empty() {
            return Err(Error::InvalidConfig("empty output path".into()));
        }
        self.sweep_config_unchecked()?.validate()
    }

    pub fn geometry(&self) -> NetworkGeometry {
        NetworkGeometry {
            s1: self.s1,
            s2: self.s2,
            relay: self.relay,
            d: self.d,
            pathloss_exponent: self.pathloss_exponent,
        }
    }

    fn sweep_config_unchecked(&self) -> Result<SweepConfig> {
        Ok(SweepConfig {
            gains: LinkGains::from_geometry(&self.geometry())?,
            snr_db: self.snr_db.clone(),
            schemes: self.schemes.clone(),
            channels: self.channels,
            symbols: self.symbols,
            seed: self.seed,
            energy: 1.0,
            analytic_overlays: self.overlay_exact || self.overlay_ct,
        })
    }

    pub fn sweep_config(&self) -> Result<SweepConfig> {
        self.validate()?;
        self.sweep_config_unchecked()
    }

    /// CSV methods this config emits, in column order.
    pub fn methods(&self) -> Vec<&'static str> {
        let mut m = vec!["mc"];
        if self.overlay_exact {
            m.push("exact");
        }
        if self.overlay_ct {
            m.push("ct");
        }
        m
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::ConfigParse(format!("serialize: {e}")))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self =
            toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
            .map_err(|e| Error::ConfigParse(format!("{}: {e}", path.display())))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_text(path, &self.to_toml()?)
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn fmt_opt(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format!("{v}"),
        _ => "nan".into(),
    }
}

/// One CSV line per enabled method for every sweep row, grid-major.
/// Analytic rows carry `nan` where a scheme has no closed form (the XOR
/// schemes, and the transform approximation of the genie) and a `nan`
/// confidence column, which applies to the Monte Carlo estimate only.
pub fn csv_string(cfg: &ExperimentConfig, results: &[SweepResult]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in results {
        for method in cfg.methods() {
            let (sper, ci) = match method {
                "mc" => (fmt_opt(Some(r.sper_mc)), fmt_opt(Some(r.ci95_halfwidth))),
                "exact" => (fmt_opt(r.sper_exact), "nan".into()),
                _ => (fmt_opt(r.sper_ct), "nan".into()),
            };
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.snr_db,
                r.scheme.name(),
                method,
                sper,
                ci,
                r.trials,
                cfg.seed
            ));
        }
    }
    out
}

/// Self-contained gnuplot script drawing one log-scale curve per
/// (scheme, method), referencing the CSV by file name so the pair can be
/// moved together.
pub fn plot_script(cfg: &ExperimentConfig) -> String {
    let csv = cfg
        .out
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| cfg.out.to_string_lossy().into_owned());
    let mut s = String::new();
    s.push_str(&format!(
        "# SPER vs SNR curves for {csv}; run `gnuplot {stem}` from this directory.\n",
        stem = Path::new(&csv)
            .with_extension("gp")
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default()
    ));
    s.push_str("set datafile separator ','\n");
    s.push_str("set datafile missing 'nan'\n");
    s.push_str("set logscale y\n");
    s.push_str("set xlabel 'reference SNR (dB)'\n");
    s.push_str("set ylabel 'symbol-pair error rate'\n");
    s.push_str("set grid\n");
    s.push_str("set key outside right noenhanced\n");
    s.push_str("plot \\\n");
    let mut clauses = Vec::new();
    for scheme in &cfg.schemes {
        for method in cfg.methods() {
            clauses.push(format!(
                "  '{csv}' skip 1 using 1:(strcol(2) eq '{s}' && strcol(3) eq '{m}' ? column(4) : NaN) \
                 with linespoints title '{s} {m}'",
                s = scheme.name(),
                m = method
            ));
        }
    }
    s.push_str(&clauses.join(", \\\n"));
    s.push('\n');
    s
}

/// Output files produced by one experiment run.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub results: Vec<SweepResult>,
    pub csv_path: PathBuf,
    pub plot_path: PathBuf,
}

/// Runs the configured sweep and writes the CSV and plot script.
pub fn run(cfg: &ExperimentConfig) -> Result<RunArtifacts> {
    cfg.validate()?;
    let results = run_sweep(&cfg.sweep_config_unchecked()?)?;
    let csv_path = cfg.out.clone();
    write_text(&csv_path, &csv_string(cfg, &results))?;
    let plot_path = cfg.out.with_extension("gp");
    write_text(&plot_path, &plot_script(cfg))?;
    Ok(RunArtifacts {
        results,
        csv_path,
        plot_path,
    })
}

/// One parsed CSV record.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub snr_db: f64,
    pub scheme: String,
    pub method: String,
    pub sper: f64,
    pub ci95: f64,
    pub trials: u64,
    pub seed: u64,
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == CSV_HEADER => {}
        other => {
            return Err(Error::ConfigParse(format!(
                "expected CSV header '{CSV_HEADER}', got {:?}",
                other.map(|(_, h)| h)
            )))
        }
    }
    let mut rows = Vec::new();
    for (n, line) in lines {
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            return Err(Error::ConfigParse(format!(
                "csv line {}: expected 7 fields, got {}",
                n + 1,
                f.len()
            )));
        }
        let num = |s: &str, what: &str| -> Result<f64> {
            s.parse()
                .map_err(|e| Error::ConfigParse(format!("csv line {}: {what}: {e}", n + 1)))
        };
        let int = |s: &str, what: &str| -> Result<u64> {
            s.parse()
                .map_err(|e| Error::ConfigParse(format!("csv line {}: {what}: {e}", n + 1)))
        };
        rows.push(CsvRow {
            snr_db: num(f[0], "snr_db")?,
            scheme: f[1].to_string(),
            method: f[2].to_string(),
            sper: num(f[3], "sper")?,
            ci95: num(f[4], "ci95")?,
            trials: int(f[5], "trials")?,
            seed: int(f[6], "seed")?,
        });
    }
    Ok(rows)
}

/// Monte Carlo rows of a parsed CSV as sweep results, for slope fits.
pub fn mc_results(rows: &[CsvRow]) -> Result<Vec<SweepResult>> {
    rows.iter()
        .filter(|r| r.method == "mc")
        .map(|r| {
            Ok(SweepResult {
                snr_db: r.snr_db,
                scheme: SchemeId::from_name(&r.scheme)?,
                trials: r.trials,
                sper_mc: r.sper,
                ci95_halfwidth: r.ci95,
                sper_exact: None,
                sper_ct: None,
            })
        })
        .collect()
}

/// Human-readable placement summary: node coordinates, link distances,
/// and mean channel gains under the path loss model.
pub fn geometry_report(cfg: &ExperimentConfig) -> Result<String> {
    let gains = LinkGains::from_geometry(&cfg.geometry())?;
    let mut s = String::from("nodes:\n");
    for (name, p) in [
        ("s1", cfg.s1),
        ("s2", cfg.s2),
        ("relay", cfg.relay),
        ("d", cfg.d),
    ] {
        s.push_str(&format!("  {name:<5} ({:.6}, {:.6})\n", p[0], p[1]));
    }
    s.push_str(&format!(
        "links (path loss exponent {}):\n",
        cfg.pathloss_exponent
    ));
    for (name, a, b, g) in [
        ("s1-relay", cfg.s1, cfg.relay, gains.g1r),
        ("s2-relay", cfg.s2, cfg.relay, gains.g2r),
        ("s1-d", cfg.s1, cfg.d, gains.g1d),
        ("s2-d", cfg.s2, cfg.d, gains.g2d),
        ("relay-d", cfg.relay, cfg.d, gains.grd),
    ] {
        s.push_str(&format!(
            "  {name:<9} distance {:.6}  mean gain {:.6}\n",
            vdist(a, b),
            g
        ));
    }
    Ok(s)
}
