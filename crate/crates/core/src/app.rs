//! Subcommand orchestration: runs sweeps and writes CSV/SVG artifacts.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;

use crate::channel::{build_scenario, ScenarioGains};
use crate::config::ExperimentSpec;
use crate::error::{Error, Result};
use crate::montecarlo::{run_on_plans, RoleStat, SimPoint};
use crate::network::FramePlan;
use crate::output::{render_svg, write_csv_file, CurveRow};
use crate::pairing::PairingScheme;
use crate::rates::{avg_rate_bounds, clamp_rate, frame_rates, n0_from_snr_db};
use crate::ser::{derive_coeff_tables, ensemble_ser, CoeffTables, SerSummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Rates,
    SerAnalytic,
    SerSim,
    Coeffs,
    Compare,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Rates => "rates",
            Command::SerAnalytic => "ser-analytic",
            Command::SerSim => "ser-sim",
            Command::Coeffs => "coeffs",
            Command::Compare => "compare",
        }
    }

    fn file_stem(&self) -> String {
        self.name().replace('-', "_")
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Command::Rates, Command::SerAnalytic, Command::SerSim, Command::Coeffs, Command::Compare]
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown command {s:?}")))
    }
}

/// What a run produced.
#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub rows: Vec<CurveRow>,
    /// Human-readable summary lines.
    pub notes: Vec<String>,
}

/// Runs `command` and writes its artifacts under `spec.out`.
pub fn run(command: Command, spec: &ExperimentSpec) -> Result<RunReport> {
    fs::create_dir_all(&spec.out)?;
    let mut report = RunReport::default();
    match command {
        Command::Coeffs => {
            let tables = derive_coeff_tables(spec.constellation()?.side())?;
            let a = spec.out.join("coeffs_a.csv");
            let b = spec.out.join("coeffs_b.csv");
            tables.write_a_csv(fs::File::create(&a)?)?;
            tables.write_b_csv(fs::File::create(&b)?)?;
            report.files.extend([a, b]);
            return Ok(report);
        }
        Command::Rates => report.rows = rate_sweep(spec)?,
        Command::SerAnalytic => report.rows = ser_analytic_rows(spec)?,
        Command::SerSim => report.rows = ser_sim_rows(spec)?,
        Command::Compare => {
            let cmp = compare(spec, 15.0)?;
            for (scheme, dev) in &cmp.max_deviation {
                report.notes.push(match dev {
                    Some(d) => format!("{scheme}: max relative deviation above 15 dB = {}", crate::output::format_sig(*d)),
                    None => format!("{scheme}: no reliable points above 15 dB"),
                });
            }
            report.rows = cmp.rows;
        }
    }
    let stem = command.file_stem();
    let csv = spec.out.join(format!("{stem}.csv"));
    write_csv_file(&csv, &report.rows)?;
    report.files.push(csv);
    if spec.emit_svg {
        let mut by_metric: BTreeMap<&str, Vec<CurveRow>> = BTreeMap::new();
        for r in &report.rows {
            by_metric.entry(&r.metric).or_default().push(r.clone());
        }
        for (metric, rows) in by_metric {
            let path = spec.out.join(format!("{stem}_{metric}.svg"));
            fs::write(&path, render_svg(&format!("{stem}: {metric}"), &rows, metric.starts_with("ser")))?;
            report.files.push(path);
        }
    }
    Ok(report)
}

fn plans_for(spec: &ExperimentSpec, scheme: PairingScheme, seed: u64) -> Result<(ScenarioGains, Vec<FramePlan>)> {
    let cfg = spec.campaign(scheme);
    let gains = build_scenario(&cfg.scenario_params(), seed)?;
    let plans = cfg.setup().plan_all(&gains, seed)?;
    Ok((gains, plans))
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Empirical mean common and sum rates with their Jensen bounds, for every
/// scheme. Draw `d` uses seed `spec.seed + d` for both gains and fading.
pub fn rate_sweep(spec: &ExperimentSpec) -> Result<Vec<CurveRow>> {
    let mut rows = Vec::new();
    for &scheme in &spec.schemes {
        let mut draws = Vec::with_capacity(spec.draws);
        for d in 0..spec.draws.max(1) {
            draws.push(plans_for(spec, scheme, spec.seed.wrapping_add(d as u64))?);
        }
        let scaled = spec.fairness.scales(spec.scenario);
        let setup = spec.campaign(scheme).setup();
        for &snr in &spec.snr_db {
            let n0 = n0_from_snr_db(snr);
            let mut common = Vec::new();
            let mut sum = Vec::new();
            let mut bound_common = Vec::new();
            let mut bound_sum = Vec::new();
            for (gains, plans) in &draws {
                let r: Vec<(f64, f64)> = plans
                    .par_iter()
                    .map(|p| {
                        let r = frame_rates(&p.channels, &p.schedule, setup.relay_power, n0);
                        (clamp_rate(r.common_rate), clamp_rate(r.sum_rate))
                    })
                    .collect();
                common.extend(r.iter().map(|x| x.0));
                sum.extend(r.iter().map(|x| x.1));
                for f in 0..gains.frames() {
                    let b = avg_rate_bounds(scheme, &gains.frame(f), setup.power, n0, scaled)?;
                    bound_common.push(clamp_rate(b.common_rate));
                    bound_sum.push(clamp_rate(b.sum_rate));
                }
            }
            let row = |metric: &str, xs: &[f64], with_err: bool| {
                let (mean, se) = mean_stderr(xs);
                let mut r = CurveRow::analytic(snr, scheme.name(), spec.scenario.name(), metric, "all", mean);
                if with_err {
                    r.stderr = Some(se);
                }
                r
            };
            rows.push(row("common_rate", &common, true));
            rows.push(row("sum_rate", &sum, true));
            rows.push(row("common_rate_bound", &bound_common, false));
            rows.push(row("sum_rate_bound", &bound_sum, false));
        }
    }
    Ok(rows)
}

fn summary_rows(snr: f64, scheme: &str, scenario: &str, metric: &str, s: &SerSummary) -> Vec<CurveRow> {
    let mut rows = Vec::new();
    if let Some(c) = s.common {
        rows.push(CurveRow::analytic(snr, scheme, scenario, metric, "common", c));
    }
    rows.push(CurveRow::analytic(snr, scheme, scenario, metric, "other", s.other_mean));
    rows.push(CurveRow::analytic(snr, scheme, scenario, metric, "end_user", s.end_user));
    rows
}

fn sim_rows(scheme: &str, scenario: &str, metric: &str, p: &SimPoint) -> Vec<CurveRow> {
    let row = |role: &str, s: &RoleStat| CurveRow {
        snr_db: p.snr_db,
        scheme: scheme.into(),
        scenario: scenario.into(),
        metric: metric.into(),
        user_role: role.into(),
        value: s.ser,
        stderr: Some(s.stderr),
        n_events: Some(s.n_events),
        unreliable: s.unreliable(),
    };
    let mut rows = Vec::new();
    if let Some(c) = &p.common {
        rows.push(row("common", c));
    }
    rows.push(row("other", &p.other));
    rows.push(row("end_user", &p.end_user));
    rows
}

fn tables_for(spec: &ExperimentSpec) -> Result<CoeffTables> {
    derive_coeff_tables(spec.constellation()?.side())
}

pub fn ser_analytic_rows(spec: &ExperimentSpec) -> Result<Vec<CurveRow>> {
    let c = spec.constellation()?;
    let tables = tables_for(spec)?;
    let mut rows = Vec::new();
    for &scheme in &spec.schemes {
        let (_, plans) = plans_for(spec, scheme, spec.seed)?;
        for &snr in &spec.snr_db {
            let s = ensemble_ser(&plans, snr, &c, &tables, spec.estimator)?;
            rows.extend(summary_rows(snr, scheme.name(), spec.scenario.name(), "ser", &s));
        }
    }
    Ok(rows)
}

pub fn ser_sim_rows(spec: &ExperimentSpec) -> Result<Vec<CurveRow>> {
    let c = spec.constellation()?;
    let mut rows = Vec::new();
    for &scheme in &spec.schemes {
        let cfg = spec.campaign(scheme);
        cfg.validate()?;
        let (_, plans) = plans_for(spec, scheme, spec.seed)?;
        for p in run_on_plans(&cfg, &plans, &c)?.points {
            rows.extend(sim_rows(scheme.name(), spec.scenario.name(), "ser", &p));
        }
    }
    Ok(rows)
}

/// Analytic and simulated SER on identical frame plans.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub rows: Vec<CurveRow>,
    /// Per scheme, the largest relative deviation over reliable points
    /// strictly above the threshold SNR; `None` if there were none. Common and
    /// other users are scored for the common-user scheme, the end user for
    /// chain schemes.
    pub max_deviation: Vec<(PairingScheme, Option<f64>)>,
}

/// Minimum number of simulated error events for a point to count towards
/// the reported deviation.
pub const COMPARE_MIN_EVENTS: u64 = 100;

pub fn compare(spec: &ExperimentSpec, above_db: f64) -> Result<Comparison> {
    let c = spec.constellation()?;
    let tables = tables_for(spec)?;
    let mut rows = Vec::new();
    let mut max_deviation = Vec::new();
    for &scheme in &spec.schemes {
        let cfg = spec.campaign(scheme);
        cfg.validate()?;
        let (_, plans) = plans_for(spec, scheme, spec.seed)?;
        let sim = run_on_plans(&cfg, &plans, &c)?;
        let mut worst: Option<f64> = None;
        for p in &sim.points {
            let ana = ensemble_ser(&plans, p.snr_db, &c, &tables, spec.estimator)?;
            rows.extend(summary_rows(p.snr_db, scheme.name(), spec.scenario.name(), "ser_analytic", &ana));
            rows.extend(sim_rows(scheme.name(), spec.scenario.name(), "ser_sim", p));
            if p.snr_db <= above_db {
                continue;
            }
            // the chain formula is exact only for the end user of the chain
            let pairs = match scheme {
                PairingScheme::Proposed => [(ana.common, p.common), (Some(ana.other_mean), Some(p.other))],
                _ => [(Some(ana.end_user), Some(p.end_user)), (None, None)],
            };
            for (a, s) in pairs {
                if let (Some(a), Some(s)) = (a, s) {
                    if s.n_events >= COMPARE_MIN_EVENTS && a > 0.0 {
                        let d = (s.ser - a).abs() / a;
                        worst = Some(worst.map_or(d, |w| w.max(d)));
                    }
                }
            }
        }
        max_deviation.push((scheme, worst));
    }
    Ok(Comparison { rows, max_deviation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn spec(extra: &[&str], dir: &std::path::Path) -> ExperimentSpec {
        let mut flags: Vec<String> = extra.iter().map(|s| s.to_string()).collect();
        flags.push(format!("out={}", dir.display()));
        parse_config("", &flags).unwrap()
    }

    #[test]
    fn command_names_round_trip() {
        for c in ["rates", "ser-analytic", "ser-sim", "coeffs", "compare"] {
            assert_eq!(c.parse::<Command>().unwrap().name(), c);
        }
        assert!("plot".parse::<Command>().is_err());
    }

    #[test]
    fn coeffs_writes_both_tables() {
        let dir = tempfile::tempdir().unwrap();
        let report = run(Command::Coeffs, &spec(&[], dir.path())).unwrap();
        assert_eq!(report.files.len(), 2);
        let a = fs::read_to_string(dir.path().join("coeffs_a.csv")).unwrap();
        assert!(a.starts_with("p,q,u,num,den"));
    }

    #[test]
    fn ser_sim_flags_sparse_points() {
        let dir = tempfile::tempdir().unwrap();
        let s = spec(&["users=4", "frames=4", "symbols=20", "snr_db_start=30", "snr_db_stop=30", "scheme=proposed"], dir.path());
        let rows = ser_sim_rows(&s).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.unreliable == (r.n_events.unwrap() < 20)));
    }

    #[test]
    fn svg_files_follow_metrics() {
        let dir = tempfile::tempdir().unwrap();
        let s = spec(&["users=4", "frames=5", "scheme=mirror", "svg=true"], dir.path());
        let report = run(Command::Rates, &s).unwrap();
        let svgs = report.files.iter().filter(|f| f.extension().is_some_and(|e| e == "svg")).count();
        assert_eq!(svgs, 4);
    }
}
