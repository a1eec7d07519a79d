//! Experiment configuration: a line-oriented `key = value` file plus
//! command-line overrides in the same `key=value` form.
//!
//! Blank lines and lines starting with `#` are ignored. Recognised keys:
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `users` | number of users `L` | 10 |
//! | `frames` | frames per campaign / channel realizations | 100 |
//! | `symbols` | symbols per packet | 500 |
//! | `mod_order` | square QAM order `M` | 16 |
//! | `scheme` | `proposed`, `consecutive`, `mirror` or `all` | `all` |
//! | `scenario` | `equal`, `unequal` or `variable` | `equal` |
//! | `refresh` | frames between gain redraws (variable) | 1 |
//! | `snr_db_start`, `snr_db_stop`, `snr_db_step` | SNR-per-bit grid in dB | 0, 30, 5 |
//! | `relay_mode` | `analysis-matched` or `joint-ml` | `analysis-matched` |
//! | `estimator` | analytic SER estimator, `high_snr` or `exact` | `high_snr` |
//! | `seed` | master seed | 1 |
//! | `draws` | independent gain draws for rate sweeps | 1 |
//! | `near_fraction` | fraction of users placed within 0.1 d0 | unset |
//! | `path_loss_exponent` | `nu` | 3 |
//! | `scale_variable` | power scaling for variable gains | false |
//! | `fairness` | `on` or `off` (power scaling for unequal gains) | `on` |
//! | `rotation` | equal-gain common user: `random` or `round-robin` | `random` |
//! | `out` | output directory | `$MWRN_OUT_DIR` or `mwrn-out` |
//! | `svg` | also write SVG plots | false |

use std::path::PathBuf;
use std::str::FromStr;

use crate::channel::{ScenarioKind, DEFAULT_PATH_LOSS_EXPONENT};
use crate::error::{Error, Result};
use crate::modem::{Constellation, RelayMode};
use crate::montecarlo::CampaignConfig;
use crate::pairing::{CommonRotation, FairnessPolicy, PairingScheme};
use crate::ser::Estimator;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "MWRN_OUT_DIR";

const KEYS: &[&str] = &[
    "users",
    "frames",
    "symbols",
    "mod_order",
    "scheme",
    "scenario",
    "refresh",
    "snr_db_start",
    "snr_db_stop",
    "snr_db_step",
    "relay_mode",
    "estimator",
    "seed",
    "draws",
    "near_fraction",
    "path_loss_exponent",
    "scale_variable",
    "fairness",
    "rotation",
    "out",
    "svg",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub users: usize,
    pub frames: usize,
    pub symbols: usize,
    pub mod_order: usize,
    pub schemes: Vec<PairingScheme>,
    pub scenario: ScenarioKind,
    pub snr_db: Vec<f64>,
    pub relay_mode: RelayMode,
    pub estimator: Estimator,
    pub seed: u64,
    pub draws: usize,
    pub near_fraction: Option<f64>,
    pub nu: f64,
    pub fairness: FairnessPolicy,
    pub out: PathBuf,
    pub emit_svg: bool,
}

impl ExperimentSpec {
    /// Campaign settings for one scheme.
    pub fn campaign(&self, scheme: PairingScheme) -> CampaignConfig {
        CampaignConfig {
            users: self.users,
            frames: self.frames,
            symbols: self.symbols,
            order: self.mod_order,
            scheme,
            scenario: self.scenario,
            snr_db: self.snr_db.clone(),
            relay_mode: self.relay_mode,
            seed: self.seed,
            fairness: self.fairness,
            nu: self.nu,
            near_fraction: self.near_fraction,
        }
    }

    pub fn constellation(&self) -> Result<Constellation> {
        Constellation::new(self.mod_order)
    }
}

/// Raw values before validation; `None` means "use the default".
#[derive(Debug, Default)]
struct Entries(Vec<(String, String, usize)>);

impl Entries {
    fn get(&self, key: &str) -> Option<(&str, usize)> {
        self.0.iter().rev().find(|(k, _, _)| k == key).map(|(_, v, line)| (v.as_str(), *line))
    }

    fn parse<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(default),
            Some((value, line)) => value.parse::<T>().map_err(|e| Error::Parse {
                line,
                key: key.to_string(),
                msg: format!("cannot parse '{value}': {e}"),
            }),
        }
    }

    fn with<T>(&self, key: &str, default: T, f: impl Fn(&str) -> std::result::Result<T, String>) -> Result<T> {
        match self.get(key) {
            None => Ok(default),
            Some((value, line)) => f(value).map_err(|msg| Error::Parse { line, key: key.to_string(), msg }),
        }
    }

    fn fail(&self, key: &str, msg: impl Into<String>) -> Error {
        Error::Parse { line: self.get(key).map_or(0, |(_, l)| l), key: key.to_string(), msg: msg.into() }
    }
}

fn split_entry(text: &str, line: usize) -> Result<(String, String)> {
    let (key, value) = text.split_once('=').ok_or_else(|| Error::Parse {
        line,
        key: text.trim().to_string(),
        msg: "expected key = value".into(),
    })?;
    let key = key.trim().to_string();
    if !KEYS.contains(&key.as_str()) {
        return Err(Error::Parse { line, key, msg: "unknown key".into() });
    }
    Ok((key, value.trim().to_string()))
}

fn parse_bool(v: &str) -> std::result::Result<bool, String> {
    match v {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => Err(format!("expected a boolean, got '{v}'")),
    }
}

/// Resolves a spec from config-file text and `key=value` overrides.
/// Overrides take precedence over the file.
pub fn parse_config(file: &str, overrides: &[String]) -> Result<ExperimentSpec> {
    let mut entries = Entries::default();
    for (n, raw) in file.lines().enumerate() {
        let text = raw.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let (k, v) = split_entry(text, n + 1)?;
        entries.0.push((k, v, n + 1));
    }
    for flag in overrides {
        let (k, v) = split_entry(flag, 0)?;
        entries.0.push((k, v, 0));
    }
    resolve(&entries)
}

fn resolve(e: &Entries) -> Result<ExperimentSpec> {
    let users: usize = e.parse("users", 10)?;
    if users < 3 {
        return Err(e.fail("users", format!("at least 3 users required, got {users}")));
    }
    let frames: usize = e.parse("frames", 100)?;
    let symbols: usize = e.parse("symbols", 500)?;
    if frames == 0 || symbols == 0 {
        let key = if frames == 0 { "frames" } else { "symbols" };
        return Err(e.fail(key, "must be positive"));
    }
    let mod_order: usize = e.parse("mod_order", 16)?;
    if Constellation::new(mod_order).is_err() {
        return Err(e.fail("mod_order", "mod_order must be a perfect square >= 4"));
    }
    let schemes = e.with("scheme", PairingScheme::ALL.to_vec(), |v| {
        if v == "all" { Ok(PairingScheme::ALL.to_vec()) } else { v.parse::<PairingScheme>().map(|s| vec![s]) }
    })?;
    let refresh: usize = e.parse("refresh", 1)?;
    let scenario = e.with("scenario", ScenarioKind::Equal, |v| match v {
        "equal" => Ok(ScenarioKind::Equal),
        "unequal" => Ok(ScenarioKind::Unequal),
        "variable" => Ok(ScenarioKind::Variable { refresh }),
        _ => Err(format!("unknown scenario '{v}' (expected equal, unequal or variable)")),
    })?;
    if matches!(scenario, ScenarioKind::Variable { .. }) && !(1..=frames).contains(&refresh) {
        return Err(e.fail("refresh", format!("must lie in [1, {frames}]")));
    }

    let start: f64 = e.parse("snr_db_start", 0.0)?;
    let stop: f64 = e.parse("snr_db_stop", 30.0)?;
    let step: f64 = e.parse("snr_db_step", 5.0)?;
    if !(step > 0.0) {
        return Err(e.fail("snr_db_step", "must be positive"));
    }
    if !(stop >= start) {
        return Err(e.fail("snr_db_stop", "must not be below snr_db_start"));
    }
    let points = ((stop - start) / step + 1e-9).floor() as usize + 1;
    let snr_db = (0..points).map(|k| start + k as f64 * step).collect();

    let relay_mode = e.with("relay_mode", RelayMode::AnalysisMatched, |v| v.parse())?;
    let estimator = e.with("estimator", Estimator::HighSnr, |v| match v {
        "high_snr" => Ok(Estimator::HighSnr),
        "exact" => Ok(Estimator::Exact),
        _ => Err(format!("unknown estimator '{v}' (expected high_snr or exact)")),
    })?;
    let seed: u64 = e.parse("seed", 1)?;
    let draws: usize = e.parse("draws", 1)?;
    if draws == 0 {
        return Err(e.fail("draws", "must be positive"));
    }
    let near_fraction = match e.get("near_fraction") {
        None => None,
        Some(_) => {
            let rho: f64 = e.parse("near_fraction", 0.0)?;
            if !(0.0..=1.0).contains(&rho) {
                return Err(e.fail("near_fraction", "must lie in [0, 1]"));
            }
            Some(rho)
        }
    };
    let nu: f64 = e.parse("path_loss_exponent", DEFAULT_PATH_LOSS_EXPONENT)?;
    if !(nu > 0.0) {
        return Err(e.fail("path_loss_exponent", "must be positive"));
    }
    let fairness = FairnessPolicy {
        scale_unequal: e.with("fairness", true, parse_bool)?,
        scale_variable: e.with("scale_variable", false, parse_bool)?,
        rotation: e.with("rotation", CommonRotation::Random, |v| match v {
            "random" => Ok(CommonRotation::Random),
            "round-robin" | "round_robin" => Ok(CommonRotation::RoundRobin),
            _ => Err(format!("unknown rotation '{v}' (expected random or round-robin)")),
        })?,
    };
    let default_out = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("mwrn-out"));
    let out = e.with("out", default_out, |v| Ok(PathBuf::from(v)))?;
    let emit_svg = e.with("svg", false, parse_bool)?;

    Ok(ExperimentSpec {
        users,
        frames,
        symbols,
        mod_order,
        schemes,
        scenario,
        snr_db,
        relay_mode,
        estimator,
        seed,
        draws,
        near_fraction,
        nu,
        fairness,
        out,
        emit_svg,
    })
}

/// Reads a config file and applies overrides.
pub fn load_config(path: Option<&std::path::Path>, overrides: &[String]) -> Result<ExperimentSpec> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p)?,
        None => String::new(),
    };
    parse_config(&text, overrides)
}
