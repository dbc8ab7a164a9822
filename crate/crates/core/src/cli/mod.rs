//! Scenario runner: configuration, registry, CSV and JSON output.

pub mod config;
pub mod scenarios;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{OrbintError, Result};
pub use config::{IntRange, LevelSchedule, ScenarioConfig};
pub use scenarios::{Check, Outcome, Row, Scenario, REGISTRY};

pub const CSV_HEADER: [&str; 8] = [
    "scenario",
    "point_index",
    "level",
    "value_re",
    "value_im",
    "reference_re",
    "reference_im",
    "abs_error",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub result: String,
    /// Effective configuration after defaults and command-line overrides.
    pub config: ScenarioConfig,
    pub checks: Vec<Check>,
    pub reports: Map<String, Value>,
    pub rows: usize,
    /// Rows with a non-finite value or reference.
    pub non_finite_rows: usize,
    pub wall_time_s: f64,
    pub csv: PathBuf,
    pub json: PathBuf,
    pub plot_script: Option<PathBuf>,
    pub pass: bool,
}

impl ScenarioReport {
    /// 0 on success, 1 when a check fails, 3 on non-finite output.
    pub fn exit_code(&self) -> i32 {
        if self.non_finite_rows > 0 {
            3
        } else if self.pass {
            0
        } else {
            1
        }
    }
}

/// 2 for configuration problems, 3 for numerical failures.
pub fn error_exit_code(e: &OrbintError) -> i32 {
    match e {
        OrbintError::Config(_)
        | OrbintError::InvalidTruncation(_)
        | OrbintError::InvalidChain(_)
        | OrbintError::Output(_) => 2,
        _ => 3,
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub emit_plot_script: bool,
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path).map_err(|e| OrbintError::Config(format!("{}: {e}", path.display())))?;
    ScenarioConfig::parse(&text)
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> OrbintError + '_ {
    move |e| OrbintError::Output(format!("{}: {e}", path.display()))
}

/// Runs one scenario and writes its CSV, JSON summary and optional plot
/// script. Nothing is written when the configuration is rejected.
pub fn run_scenario(config: &ScenarioConfig, opts: &RunOptions) -> Result<ScenarioReport> {
    let scenario = scenarios::find(&config.scenario.name)
        .ok_or_else(|| OrbintError::Config(format!("unknown scenario {:?}", config.scenario.name)))?;
    let mut cfg = scenarios::effective_config(scenario, config);
    if let Some(seed) = opts.seed {
        cfg.scenario.seed = Some(seed);
    }
    if let Some(dir) = &opts.out_dir {
        cfg.output.dir = dir.display().to_string();
    }
    cfg.output.plot_script |= opts.emit_plot_script;
    cfg.validate()?;

    let start = Instant::now();
    let outcome = (scenario.run)(&cfg)?;
    let wall_time_s = start.elapsed().as_secs_f64();

    let dir = PathBuf::from(&cfg.output.dir);
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    let csv_path = dir.join(&cfg.output.csv);
    write_csv(&csv_path, scenario.name, &outcome.rows)?;
    let plot_script = if cfg.output.plot_script {
        let p = dir.join("plot.gp");
        fs::write(&p, plot_script(scenario.name, &cfg.output.csv)).map_err(io_err(&p))?;
        Some(p)
    } else {
        None
    };
    let non_finite_rows = outcome
        .rows
        .iter()
        .filter(|r| !(r.value.re.is_finite() && r.value.im.is_finite() && r.reference.re.is_finite() && r.reference.im.is_finite()))
        .count();
    let json_path = dir.join(&cfg.output.json);
    let report = ScenarioReport {
        scenario: scenario.name.to_string(),
        result: scenario.result.to_string(),
        pass: outcome.checks.iter().all(|c| c.pass),
        checks: outcome.checks,
        reports: outcome.reports,
        rows: outcome.rows.len(),
        non_finite_rows,
        wall_time_s,
        csv: csv_path,
        json: json_path.clone(),
        plot_script,
        config: cfg,
    };
    let text = serde_json::to_string_pretty(&report).map_err(|e| OrbintError::Output(e.to_string()))?;
    fs::write(&json_path, text + "\n").map_err(io_err(&json_path))?;
    Ok(report)
}

#[derive(Serialize)]
struct CsvRow<'a> {
    scenario: &'a str,
    point_index: usize,
    level: u64,
    value_re: f64,
    value_im: f64,
    reference_re: f64,
    reference_im: f64,
    abs_error: f64,
}

fn write_csv(path: &Path, scenario: &str, rows: &[Row]) -> Result<()> {
    let err = |e: csv::Error| OrbintError::Output(format!("{}: {e}", path.display()));
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(err)?;
    w.write_record(CSV_HEADER).map_err(err)?;
    for r in rows {
        w.serialize(CsvRow {
            scenario,
            point_index: r.point_index,
            level: r.level,
            value_re: r.value.re,
            value_im: r.value.im,
            reference_re: r.reference.re,
            reference_im: r.reference.im,
            abs_error: (r.value - r.reference).norm(),
        })
        .map_err(err)?;
    }
    w.flush().map_err(io_err(path))
}

fn plot_script(scenario: &str, csv: &str) -> String {
    format!(
        "# gnuplot script: absolute error against level\n\
         set datafile separator ','\n\
         set key off\n\
         set logscale y\n\
         set xlabel 'level'\n\
         set ylabel '|value - reference|'\n\
         set title '{scenario}'\n\
         plot '{csv}' every ::1 using 3:($8 > 0 ? $8 : 1e-17) with points pointtype 7 pointsize 0.3\n"
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioInfo {
    pub name: String,
    pub result: String,
    pub description: String,
    pub defaults: ScenarioConfig,
}

/// Registered scenarios in alphabetical order, optionally keeping names
/// that contain `filter`.
pub fn list_scenarios(filter: Option<&str>) -> Vec<ScenarioInfo> {
    let mut v: Vec<ScenarioInfo> = REGISTRY
        .iter()
        .filter(|s| filter.is_none_or(|f| s.name.contains(f)))
        .map(|s| ScenarioInfo {
            name: s.name.to_string(),
            result: s.result.to_string(),
            description: s.description.to_string(),
            defaults: (s.defaults)(),
        })
        .collect();
    v.sort_by(|a, b| a.name.cmp(&b.name));
    v
}

/// Fixed-width table, one row per scenario.
pub fn format_table(infos: &[ScenarioInfo]) -> String {
    let name_w = infos.iter().map(|i| i.name.len()).max().unwrap_or(4).max(4);
    let result_w = infos.iter().map(|i| i.result.len()).max().unwrap_or(6).max(6);
    let mut out = format!("{:name_w$}  {:result_w$}  defaults\n", "name", "result");
    for i in infos {
        let d = &i.defaults.scenario;
        let defaults = format!(
            "levels={} sample_size={} seed={}",
            d.levels.as_deref().unwrap_or("-"),
            d.sample_size.map_or("-".into(), |n| n.to_string()),
            d.seed.unwrap_or(0)
        );
        out.push_str(&format!("{:name_w$}  {:result_w$}  {defaults}\n", i.name, i.result));
    }
    out
}
