//! Scenarios for each figure, CSV emission and parsing, log-log and linear
//! SVG line plots, and the run manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::experiment::{random_baseline, run_experiment, CurvePoint, ExperimentConfig};
use crate::interventions::{InterventionPolicy, PERIOD_SWEEP, THRESHOLD_SWEEP};

pub const CSV_HEADER: &str = "episodes,mean_moves,stddev_moves,mean_expert_moves";
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScenarioKind {
    /// No help vs alternating turns, with both random baselines.
    Fig1,
    /// Turn-taking at periods 2, 3 and 4 against no help.
    Fig2,
    /// Ask-for-help threshold sweep against no help.
    Fig3,
    /// A single curve under `base.policy`.
    Custom,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Fig1 => "fig1",
            Self::Fig2 => "fig2",
            Self::Fig3 => "fig3",
            Self::Custom => "custom",
        }
    }

    pub fn axis_mode(self) -> AxisMode {
        match self {
            Self::Fig3 => AxisMode::Linear,
            _ => AxisMode::LogLog,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    /// Shared settings; each series overrides the policy.
    pub base: ExperimentConfig,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    /// File-name slug, e.g. `canonical_2`.
    pub name: String,
    /// Legend text.
    pub label: String,
    pub points: Vec<CurvePoint>,
    /// Drawn as a horizontal reference line.
    pub baseline: bool,
}

fn slug(policy: &InterventionPolicy) -> String {
    match policy {
        InterventionPolicy::NoHelp => "no_help".into(),
        InterventionPolicy::Canonical { period } => format!("canonical_{period}"),
        InterventionPolicy::AskForHelp { threshold } => format!("ask_{threshold}"),
    }
}

fn label(policy: &InterventionPolicy) -> String {
    match policy {
        InterventionPolicy::NoHelp => "agent, no help".into(),
        InterventionPolicy::Canonical { period } => format!("agent, expert every {period} turns"),
        InterventionPolicy::AskForHelp { threshold } => {
            format!("agent, asks for help below {threshold}")
        }
    }
}

impl Scenario {
    /// Configurations of the learning-curve series, in legend order.
    pub fn series_configs(&self) -> Vec<ExperimentConfig> {
        let with = |policy| ExperimentConfig {
            policy,
            ..self.base.clone()
        };
        match self.kind {
            ScenarioKind::Fig1 => vec![
                with(InterventionPolicy::NoHelp),
                with(InterventionPolicy::Canonical { period: 2 }),
            ],
            ScenarioKind::Fig2 => std::iter::once(InterventionPolicy::NoHelp)
                .chain(PERIOD_SWEEP.map(|period| InterventionPolicy::Canonical { period }))
                .map(with)
                .collect(),
            ScenarioKind::Fig3 => std::iter::once(with(InterventionPolicy::NoHelp))
                .chain(THRESHOLD_SWEEP.map(|threshold| ExperimentConfig {
                    // an agent that never learns from the help it asked for
                    // keeps asking forever
                    learn_from_expert: true,
                    ..with(InterventionPolicy::AskForHelp { threshold })
                }))
                .collect(),
            ScenarioKind::Custom => vec![self.base.clone()],
        }
    }

    /// Runs every series of the scenario. Pure computation, no I/O.
    pub fn run(&self) -> Result<Vec<Series>> {
        let mut out = Vec::new();
        for cfg in self.series_configs() {
            out.push(Series {
                name: slug(&cfg.policy),
                label: label(&cfg.policy),
                points: run_experiment(&cfg)?,
                baseline: false,
            });
        }
        if self.kind == ScenarioKind::Fig1 {
            for (with_help, name, label) in [
                (false, "random", "random policy"),
                (true, "random_help", "random policy, expert every 2 turns"),
            ] {
                let point =
                    random_baseline(with_help, self.base.repetitions, self.base.master_seed);
                out.push(Series {
                    name: name.into(),
                    label: label.into(),
                    points: vec![point],
                    baseline: true,
                });
            }
        }
        Ok(out)
    }

    /// One manifest line per learning-curve series.
    pub fn describe_series(&self) -> Vec<String> {
        self.series_configs()
            .iter()
            .map(|c| {
                format!(
                    "{}: {} learn_from_expert={}",
                    slug(&c.policy),
                    c.policy,
                    c.learn_from_expert
                )
            })
            .collect()
    }

    /// Output file for one series.
    pub fn csv_path(&self, dir: &Path, series: &Series) -> PathBuf {
        match self.kind {
            ScenarioKind::Custom => dir.join("custom.csv"),
            kind => dir.join(format!("{}_{}.csv", kind.name(), series.name)),
        }
    }

    pub fn svg_path(&self, dir: &Path) -> PathBuf {
        dir.join(format!("{}.svg", self.kind.name()))
    }
}

/// Fixed six-decimal CSV, one row per grid point.
pub fn format_csv(points: &[CurvePoint]) -> Result<String> {
    if points.is_empty() {
        return Err(Error::Csv("no curve points to write".into()));
    }
    let mut out = String::with_capacity(64 * (points.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in points {
        let _ = writeln!(
            out,
            "{},{:.6},{:.6},{:.6}",
            p.episodes_trained, p.mean_moves, p.stddev_moves, p.mean_expert_moves
        );
    }
    Ok(out)
}

pub fn write_csv(points: &[CurvePoint], path: &Path) -> Result<()> {
    let text = format_csv(points)?;
    write_file(path, &text)
}

/// A CSV row read back from disk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CsvRow {
    pub episodes: u64,
    pub mean_moves: f64,
    pub stddev_moves: f64,
    pub mean_expert_moves: f64,
}

impl From<&CurvePoint> for CsvRow {
    fn from(p: &CurvePoint) -> Self {
        Self {
            episodes: p.episodes_trained,
            mean_moves: p.mean_moves,
            stddev_moves: p.stddev_moves,
            mean_expert_moves: p.mean_expert_moves,
        }
    }
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(CSV_HEADER) => {}
        other => return Err(Error::Csv(format!("unexpected header {other:?}"))),
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let bad = || Error::Csv(format!("line {}: {line:?}", i + 2));
            let fields: Vec<&str> = line.split(',').collect();
            let [episodes, mean, sd, expert] = fields[..] else {
                return Err(bad());
            };
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
            Ok(CsvRow {
                episodes: episodes.parse().map_err(|_| bad())?,
                mean_moves: num(mean)?,
                stddev_moves: num(sd)?,
                mean_expert_moves: num(expert)?,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxisMode {
    LogLog,
    Linear,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 230.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 55.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#bcbd22", "#8c564b",
];

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
        if log {
            lo = 10f64.powf(lo.log10().floor());
            hi = 10f64.powf(hi.log10().ceil());
            if lo == hi {
                hi = lo * 10.0;
            }
        } else {
            lo = lo.min(0.0);
            hi = if hi <= lo { lo + 1.0 } else { hi * 1.05 };
        }
        Self { lo, hi, log }
    }

    /// Position in [0, 1].
    fn frac(&self, v: f64) -> f64 {
        if self.log {
            (v.log10() - self.lo.log10()) / (self.hi.log10() - self.lo.log10())
        } else {
            (v - self.lo) / (self.hi - self.lo)
        }
    }

    fn ticks(&self) -> Vec<f64> {
        if self.log {
            let (a, b) = (
                self.lo.log10().round() as i32,
                self.hi.log10().round() as i32,
            );
            (a..=b).map(|e| 10f64.powi(e)).collect()
        } else {
            let step = nice_step((self.hi - self.lo) / 6.0);
            let first = (self.lo / step).ceil() as i64;
            let last = (self.hi / step).floor() as i64;
            (first..=last).map(|i| i as f64 * step).collect()
        }
    }
}

fn nice_step(raw: f64) -> f64 {
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn tick_label(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Static multi-series line chart. Baseline series become horizontal lines
/// at their first point's mean.
pub fn render_plot(series: &[Series], mode: AxisMode, title: &str) -> Result<String> {
    if series.iter().all(|s| s.points.is_empty()) {
        return Err(Error::PlotDomain("nothing to plot".into()));
    }
    let log = mode == AxisMode::LogLog;
    if log {
        for s in series {
            for p in &s.points {
                if p.mean_moves <= 0.0 || (!s.baseline && p.episodes_trained == 0) {
                    return Err(Error::PlotDomain(format!(
                        "series {:?} has a non-positive value at episodes={} on a log axis",
                        s.name, p.episodes_trained
                    )));
                }
            }
        }
    }
    let curves = || series.iter().filter(|s| !s.baseline);
    let xs: Vec<f64> = curves()
        .flat_map(|s| s.points.iter().map(|p| p.episodes_trained as f64))
        .collect();
    if xs.is_empty() {
        return Err(Error::PlotDomain(
            "no learning curve to set the x range".into(),
        ));
    }
    let x_axis = Axis::new(xs.into_iter(), log);
    let y_axis = Axis::new(
        series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.mean_moves)),
        log,
    );

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let px = |x: f64| MARGIN_LEFT + x_axis.frac(x) * plot_w;
    let py = |y: f64| MARGIN_TOP + (1.0 - y_axis.frac(y)) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="18" text-anchor="middle" font-size="14">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        escape(title)
    );
    let _ = writeln!(
        svg,
        r##"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#333"/>"##
    );

    for t in x_axis.ticks() {
        let x = px(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.1}" y1="{MARGIN_TOP}" x2="{x:.1}" y2="{:.1}" stroke="#ddd"/><text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"##,
            MARGIN_TOP + plot_h,
            MARGIN_TOP + plot_h + 16.0,
            tick_label(t)
        );
    }
    for t in y_axis.ticks() {
        let y = py(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{MARGIN_LEFT}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"##,
            MARGIN_LEFT + plot_w,
            MARGIN_LEFT - 6.0,
            y + 4.0,
            tick_label(t)
        );
    }
    let scale = if log { " (log)" } else { "" };
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">training episodes{scale}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">moves to solve{scale}</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if s.baseline {
            let Some(p) = s.points.first() else { continue };
            let y = py(p.mean_moves);
            let _ = writeln!(
                svg,
                r#"<line class="baseline" x1="{MARGIN_LEFT}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{color}" stroke-width="2" stroke-dasharray="6 4"/>"#,
                MARGIN_LEFT + plot_w
            );
        } else {
            let coords: Vec<String> = s
                .points
                .iter()
                .map(|p| {
                    format!(
                        "{:.1},{:.1}",
                        px(p.episodes_trained as f64),
                        py(p.mean_moves)
                    )
                })
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline class="series" points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                coords.join(" ")
            );
            for c in &coords {
                let (x, y) = c.split_once(',').expect("formatted above");
                let _ = writeln!(svg, r#"<circle cx="{x}" cy="{y}" r="3" fill="{color}"/>"#);
            }
        }
        let ly = MARGIN_TOP + 12.0 + 20.0 * i as f64;
        let lx = WIDTH - MARGIN_RIGHT + 15.0;
        let dash = if s.baseline {
            r#" stroke-dasharray="6 4""#
        } else {
            ""
        };
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"{dash}/><text class="legend" x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 24.0,
            lx + 30.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn write_svg(svg: &str, path: &Path) -> Result<()> {
    write_file(path, svg)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

/// Provenance record written next to every scenario's outputs.
#[derive(Clone, Debug, PartialEq)]
pub struct RunManifest {
    pub scenario: String,
    pub config: ExperimentConfig,
    pub artifact_version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    /// `name: policy` lines for every series, with per-series overrides.
    pub series: Vec<String>,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn render(&self) -> String {
        let c = &self.config;
        let mut out = String::new();
        let _ = writeln!(out, "scenario = {}", self.scenario);
        let _ = writeln!(out, "artifact_version = {}", self.artifact_version);
        let _ = writeln!(out, "timestamp = {}", self.timestamp);
        let _ = writeln!(out, "alpha = {}", c.agent.alpha);
        let _ = writeln!(out, "gamma = {}", c.agent.gamma);
        let _ = writeln!(out, "epsilon = {}", c.agent.epsilon);
        let _ = writeln!(out, "policy = {}", c.policy);
        let grid: Vec<String> = c.episode_grid.iter().map(u64::to_string).collect();
        let _ = writeln!(out, "episode_grid = {}", grid.join(","));
        let _ = writeln!(out, "repetitions = {}", c.repetitions);
        let _ = writeln!(out, "master_seed = {}", c.master_seed);
        let _ = writeln!(out, "move_cap = {}", c.move_cap);
        let _ = writeln!(out, "learn_from_expert = {}", c.learn_from_expert);
        let _ = writeln!(out, "eval_epsilon_active = {}", c.eval_epsilon_active);
        let _ = writeln!(out, "eval_episodes_per_rep = {}", c.eval_episodes_per_rep);
        for line in &self.series {
            let _ = writeln!(out, "series = {line}");
        }
        for p in &self.outputs {
            let _ = writeln!(out, "output = {}", p.display());
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_file(path, &self.render())
    }
}
