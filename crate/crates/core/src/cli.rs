//! Command-line front end: `run`, `gradcheck` and `oracle`.
//!
//! Output files of `run`:
//!
//! * `traces.csv`: `scheme,seed,iteration,objective,min_rate_mbps,avg_rate_mbps,step,x,y,z,roll,pitch,yaw`
//! * `finals.csv`: `scheme,seed,start,iterations,converged,objective,min_rate_mbps,avg_rate_mbps,x,y,z,roll,pitch,yaw,wall_time_s`
//! * `summary.json`: mean curves, final means, gains and the per-seed table
//! * `manifest.json`: resolved config, version, seeds, wall times, file inventory
//!
//! Rows are sorted by scheme, seed and iteration. Numbers use Rust's
//! shortest round-trip formatting, so a CSV value parses back to the exact
//! `f64` that produced it.

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::channel::{assemble_channels, max_single_user_snr, PhaseConfig, Pose};
use crate::objective::{analytic_phase_gradient, fd_gradient, Block, DecisionPoint};
use crate::schemes::{
    compare_schemes, generate_scenario, initial_point, PhaseGradient, RisProblem, RunResult, RunSettings, Scenario,
    ScenarioConfig, SchemeKind, SchemeSettings, SchemeSpec, Summary,
};
use crate::solver::{psca_run, SolverParams};

pub const TRACE_HEADER: &str = "scheme,seed,iteration,objective,min_rate_mbps,avg_rate_mbps,step,x,y,z,roll,pitch,yaw";
pub const FINALS_HEADER: &str =
    "scheme,seed,start,iterations,converged,objective,min_rate_mbps,avg_rate_mbps,x,y,z,roll,pitch,yaw,wall_time_s";

/// Contents of the TOML config file. Every field has a default, so an
/// empty file reproduces the reference setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Seeds `1..=seeds` unless `seed_list` is given.
    pub seeds: u64,
    pub seed_list: Option<Vec<u64>>,
    pub schemes: Vec<SchemeKind>,
    pub scenario: ScenarioConfig,
    pub run: RunSettings,
    pub scheme_settings: SchemeSettings,
    pub oracle: OracleConfig,
    pub gradcheck: GradcheckConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seeds: 10,
            seed_list: None,
            schemes: SchemeKind::ALL.to_vec(),
            scenario: ScenarioConfig::default(),
            run: RunSettings::default(),
            scheme_settings: SchemeSettings::default(),
            oracle: OracleConfig::default(),
            gradcheck: GradcheckConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing {}", p.display()))
            }
        }
    }

    pub fn seed_values(&self) -> Vec<u64> {
        match &self.seed_list {
            Some(list) => list.clone(),
            None => (1..=self.seeds).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    /// Random single-user geometries for the alignment check.
    pub alignment_cases: u64,
    /// Required fraction of the closed-form SNR.
    pub alignment_ratio: f64,
    pub grid_seeds: u64,
    pub grid_step_deg: f64,
    /// Allowed relative shortfall against the grid best.
    pub grid_tolerance: f64,
    pub max_iters: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            alignment_cases: 5,
            alignment_ratio: 0.95,
            grid_seeds: 3,
            grid_step_deg: 1.0,
            grid_tolerance: 0.01,
            max_iters: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GradcheckConfig {
    pub points: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for GradcheckConfig {
    fn default() -> Self {
        Self {
            points: 20,
            tolerance: 1e-5,
            seed: 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "omniris", version, about = "RIS on an omnidirectional UAV: max-min rate experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the scheme comparison and write CSV/JSON artifacts.
    Run(RunArgs),
    /// Compare the analytic phase gradient with finite differences.
    Gradcheck(GradcheckArgs),
    /// Closed-form alignment and exhaustive-grid checks of the optimizer.
    Oracle(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML config; defaults apply to anything it omits.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Smoothing exponent p (negative).
    #[arg(long, allow_hyphen_values = true)]
    pub p_exponent: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeChoice {
    Plo,
    Pl,
    Po,
    All,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Use seeds 1..=N.
    #[arg(long, conflicts_with = "seed_list")]
    pub seeds: Option<u64>,
    /// Explicit comma-separated seeds.
    #[arg(long, value_delimiter = ',')]
    pub seed_list: Option<Vec<u64>>,
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeChoice>,
    /// Relative-change stopping tolerance.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Restarts per run.
    #[arg(long)]
    pub starts: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Largest accepted relative error.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

fn apply_common(cfg: &mut ExperimentConfig, args: &CommonArgs) {
    if let Some(n) = args.max_iters {
        cfg.run.solver.max_iters = n;
        cfg.oracle.max_iters = n;
    }
    if let Some(p) = args.p_exponent {
        cfg.run.smoothing.p = p;
    }
}

/// Entry point shared by the binary and the tests. Returns the exit code.
pub fn execute(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Run(args) => {
            let mut cfg = ExperimentConfig::load(args.common.config.as_deref())?;
            apply_common(&mut cfg, &args.common);
            if let Some(n) = args.seeds {
                cfg.seeds = n;
                cfg.seed_list = None;
            }
            if let Some(list) = args.seed_list {
                cfg.seed_list = Some(list);
            }
            match args.scheme {
                None => {}
                Some(SchemeChoice::All) => cfg.schemes = SchemeKind::ALL.to_vec(),
                Some(SchemeChoice::Plo) => cfg.schemes = vec![SchemeKind::Plo],
                Some(SchemeChoice::Pl) => cfg.schemes = vec![SchemeKind::Pl],
                Some(SchemeChoice::Po) => cfg.schemes = vec![SchemeKind::Po],
            }
            if let Some(t) = args.tolerance {
                cfg.run.solver.rel_tol = t;
            }
            if let Some(s) = args.starts {
                cfg.run.starts = s;
            }
            let report = cmd_run(&cfg, &args.out)?;
            println!("{report}");
            Ok(0)
        }
        Command::Gradcheck(args) => {
            let mut cfg = ExperimentConfig::load(args.common.config.as_deref())?;
            apply_common(&mut cfg, &args.common);
            if let Some(t) = args.tolerance {
                cfg.gradcheck.tolerance = t;
            }
            if let Some(n) = args.points {
                cfg.gradcheck.points = n;
            }
            let report = cmd_gradcheck(&cfg)?;
            println!("{report}");
            Ok(if report.passed { 0 } else { 1 })
        }
        Command::Oracle(args) => {
            let mut cfg = ExperimentConfig::load(args.config.as_deref())?;
            apply_common(&mut cfg, &args);
            let report = cmd_oracle(&cfg)?;
            println!("{report}");
            Ok(if report.passed() { 0 } else { 1 })
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub seeds: Vec<u64>,
    pub total_wall_time_s: f64,
    pub runs: Vec<ManifestRun>,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestRun {
    pub scheme: SchemeKind,
    pub seed: u64,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub out: PathBuf,
    pub summary: Summary,
    pub wall_time_s: f64,
}

impl std::fmt::Display for RunReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for s in &self.summary.schemes {
            writeln!(
                f,
                "{:>3}: mean final min rate {:.3} Mbit/s, avg rate {:.3} Mbit/s",
                s.scheme.name(),
                s.final_mean_min_rate / 1e6,
                s.final_mean_avg_rate / 1e6
            )?;
        }
        let g = &self.summary.gains;
        let pct = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{:+.1}%", 100.0 * v));
        writeln!(f, "PLO vs PL: min {} avg {}", pct(g.plo_vs_pl_min_rate), pct(g.plo_vs_pl_avg_rate))?;
        writeln!(f, "PLO vs PO: min {} avg {}", pct(g.plo_vs_po_min_rate), pct(g.plo_vs_po_avg_rate))?;
        write!(f, "wrote {} in {:.1} s", self.out.display(), self.wall_time_s)
    }
}

/// Run the comparison and write the four artifacts into `out`.
pub fn cmd_run(cfg: &ExperimentConfig, out: &Path) -> anyhow::Result<RunReport> {
    let seeds = cfg.seed_values();
    if seeds.is_empty() {
        bail!("no seeds selected");
    }
    if cfg.schemes.is_empty() {
        bail!("no schemes selected");
    }
    let clock = Instant::now();
    let specs: Vec<SchemeSpec> = cfg.schemes.iter().map(|k| SchemeSpec::new(*k, &cfg.scheme_settings)).collect();
    let comparison = compare_schemes(
        &cfg.scenario,
        &seeds,
        &specs,
        &cfg.run,
        cfg.scheme_settings.po_fallback_altitude,
    )?;
    let wall = clock.elapsed().as_secs_f64();

    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let files = ["traces.csv", "finals.csv", "summary.json", "manifest.json"];
    fs::write(out.join(files[0]), traces_csv(&comparison.runs))?;
    fs::write(out.join(files[1]), finals_csv(&comparison.runs))?;
    fs::write(out.join(files[2]), serde_json::to_string_pretty(&comparison.summary)? + "\n")?;
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: cfg.clone(),
        seeds,
        total_wall_time_s: wall,
        runs: comparison
            .runs
            .iter()
            .map(|r| ManifestRun {
                scheme: r.scheme,
                seed: r.seed,
                wall_time_s: r.wall_time_s,
            })
            .collect(),
        files: files.iter().map(|s| s.to_string()).collect(),
    };
    fs::write(out.join(files[3]), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(RunReport {
        out: out.to_path_buf(),
        summary: comparison.summary,
        wall_time_s: wall,
    })
}

fn pose_fields(p: &DecisionPoint) -> String {
    let o = p.orientation;
    format!(
        "{},{},{},{},{},{}",
        p.position.x, p.position.y, p.position.z, o.roll, o.pitch, o.yaw
    )
}

/// One row per (scheme, seed, iteration); runs must already be sorted.
pub fn traces_csv(runs: &[RunResult]) -> String {
    let mut s = String::from(TRACE_HEADER);
    s.push('\n');
    for r in runs {
        for (i, rec) in r.trace.records.iter().enumerate() {
            let p = DecisionPoint::from_blocks(&rec.point);
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                r.scheme.name(),
                r.seed,
                rec.iteration,
                rec.objective,
                r.min_rates[i] / 1e6,
                r.avg_rates[i] / 1e6,
                rec.step,
                pose_fields(&p)
            );
        }
    }
    s
}

pub fn finals_csv(runs: &[RunResult]) -> String {
    let mut s = String::from(FINALS_HEADER);
    s.push('\n');
    for r in runs {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            r.scheme.name(),
            r.seed,
            r.start,
            r.trace.records.len() - 1,
            r.trace.converged,
            r.trace.final_objective(),
            r.final_min_rate / 1e6,
            r.final_avg_rate / 1e6,
            pose_fields(&r.final_point),
            r.wall_time_s
        );
    }
    s
}

/// A parsed `traces.csv` row.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub scheme: SchemeKind,
    pub seed: u64,
    pub iteration: usize,
    pub objective: f64,
    pub min_rate_mbps: f64,
    pub avg_rate_mbps: f64,
    pub step: f64,
    pub position: [f64; 3],
    pub orientation: [f64; 3],
}

pub fn parse_trace_row(line: &str) -> anyhow::Result<TraceRow> {
    let f: Vec<&str> = line.split(',').collect();
    if f.len() != 13 {
        bail!("expected 13 fields, got {}", f.len());
    }
    let num = |i: usize| -> anyhow::Result<f64> { f[i].parse::<f64>().with_context(|| format!("field {i}")) };
    Ok(TraceRow {
        scheme: f[0].parse().map_err(anyhow::Error::msg)?,
        seed: f[1].parse()?,
        iteration: f[2].parse()?,
        objective: num(3)?,
        min_rate_mbps: num(4)?,
        avg_rate_mbps: num(5)?,
        step: num(6)?,
        position: [num(7)?, num(8)?, num(9)?],
        orientation: [num(10)?, num(11)?, num(12)?],
    })
}

#[derive(Debug, Clone)]
pub struct GradcheckReport {
    pub points: usize,
    pub tolerance: f64,
    pub worst_error: f64,
    pub worst_point: usize,
    pub passed: bool,
}

impl std::fmt::Display for GradcheckReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "gradcheck {}: {} points, worst relative error {:.3e} at point {} (tolerance {:.1e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.points,
            self.worst_error,
            self.worst_point,
            self.tolerance
        )
    }
}

/// `‖a − b‖ / max(‖a‖, ‖b‖)`, or 0 when both vanish.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(b.iter().map(|x| x * x).sum::<f64>().sqrt());
    if scale == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

/// Analytic vs finite-difference phase gradient at seeded random points.
pub fn cmd_gradcheck(cfg: &ExperimentConfig) -> anyhow::Result<GradcheckReport> {
    let gc = &cfg.gradcheck;
    if gc.points == 0 {
        bail!("gradcheck needs at least one point");
    }
    if !(gc.tolerance > 0.0) {
        bail!("tolerance must be positive");
    }
    let mut worst = (0.0_f64, 0usize);
    for i in 0..gc.points {
        let seed = gc.seed.wrapping_add(i as u64);
        let scenario = generate_scenario(seed, &cfg.scenario)?;
        let x = initial_point(seed, &scenario);
        let a = analytic_phase_gradient(&x, &scenario, &cfg.run.smoothing)?;
        let n = fd_gradient(&x, Block::Phase, &scenario, &cfg.run.smoothing)?;
        let e = relative_error(&a, &n);
        if e > worst.0 || i == 0 {
            worst = (e, i);
        }
    }
    Ok(GradcheckReport {
        points: gc.points,
        tolerance: gc.tolerance,
        worst_error: worst.0,
        worst_point: worst.1,
        passed: worst.0 <= gc.tolerance,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AlignmentCase {
    pub seed: u64,
    pub achieved_snr: f64,
    pub closed_form_snr: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridCase {
    pub seed: u64,
    pub optimizer_rate: f64,
    pub grid_rate: f64,
    pub shortfall: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub alignment: Vec<AlignmentCase>,
    pub alignment_ratio: f64,
    pub grid: Vec<GridCase>,
    pub grid_tolerance: f64,
}

impl OracleReport {
    pub fn alignment_passed(&self) -> bool {
        self.alignment.iter().all(|c| c.ratio >= self.alignment_ratio)
    }

    pub fn grid_passed(&self) -> bool {
        self.grid.iter().all(|c| c.shortfall <= self.grid_tolerance)
    }

    pub fn passed(&self) -> bool {
        self.alignment_passed() && self.grid_passed()
    }
}

impl std::fmt::Display for OracleReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.alignment {
            writeln!(
                f,
                "alignment seed {}: SNR {:.6e} of closed form {:.6e} (ratio {:.6})",
                c.seed, c.achieved_snr, c.closed_form_snr, c.ratio
            )?;
        }
        for c in &self.grid {
            writeln!(
                f,
                "grid seed {}: optimizer {:.6} Mbit/s, grid best {:.6} Mbit/s (shortfall {:.2e})",
                c.seed,
                c.optimizer_rate / 1e6,
                c.grid_rate / 1e6,
                c.shortfall
            )?;
        }
        let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
        writeln!(f, "alignment oracle {}", verdict(self.alignment_passed()))?;
        write!(f, "grid oracle {}", verdict(self.grid_passed()))
    }
}

/// Single-user scenario with one random user and a random pose.
fn single_user_case(seed: u64, base: &ScenarioConfig, horizontal: usize, vertical: usize) -> anyhow::Result<(Scenario, DecisionPoint)> {
    let cfg = ScenarioConfig {
        n_users: 1,
        users: None,
        ris_horizontal: horizontal,
        ris_vertical: vertical,
        ..base.clone()
    };
    let scenario = generate_scenario(seed, &cfg)?;
    Ok((scenario.clone(), initial_point(seed, &scenario)))
}

fn phase_only(settings: &RunSettings, max_iters: usize) -> SolverParams {
    SolverParams {
        max_iters,
        active: vec![true, false, false],
        ..settings.solver.clone()
    }
}

/// Θ-only optimization against the closed-form alignment bound and a brute-force grid.
pub fn cmd_oracle(cfg: &ExperimentConfig) -> anyhow::Result<OracleReport> {
    let oc = &cfg.oracle;
    if !(oc.grid_step_deg > 0.0 && oc.grid_step_deg <= 360.0) {
        bail!("grid step must lie in (0, 360] degrees");
    }
    let solver = phase_only(&cfg.run, oc.max_iters);

    let mut alignment = Vec::new();
    for seed in 1..=oc.alignment_cases {
        let (scenario, x0) = single_user_case(seed, &cfg.scenario, cfg.scenario.ris_horizontal, cfg.scenario.ris_vertical)?;
        let problem = RisProblem::new(&scenario, cfg.run.smoothing, PhaseGradient::Analytic);
        let trace = psca_run(&x0.blocks(), &problem, &solver)?;
        let x = DecisionPoint::from_blocks(trace.final_point());
        let ch = assemble_channels(&scenario, &x.pose())?;
        let achieved = ch.snr(&x.phases, 0, &scenario.radio);
        let bound = max_single_user_snr(&scenario.radio, scenario.ris.len(), scenario.bs.n_elements, ch.d_br, ch.d_rk[0]);
        alignment.push(AlignmentCase {
            seed,
            achieved_snr: achieved,
            closed_form_snr: bound,
            ratio: achieved / bound,
        });
    }

    let mut grid = Vec::new();
    for seed in 1..=oc.grid_seeds {
        let (scenario, x0) = single_user_case(seed, &cfg.scenario, 2, 1)?;
        let problem = RisProblem::new(&scenario, cfg.run.smoothing, PhaseGradient::Analytic);
        let trace = psca_run(&x0.blocks(), &problem, &solver)?;
        let x = DecisionPoint::from_blocks(trace.final_point());
        let pose = x.pose();
        let ch = assemble_channels(&scenario, &pose)?;
        let optimizer_rate = ch.rates(&x.phases, &scenario.radio)[0];
        let grid_rate = grid_best_rate(&scenario, &pose, oc.grid_step_deg)?;
        grid.push(GridCase {
            seed,
            optimizer_rate,
            grid_rate,
            shortfall: (grid_rate - optimizer_rate) / grid_rate,
        });
    }
    Ok(OracleReport {
        alignment,
        alignment_ratio: oc.alignment_ratio,
        grid,
        grid_tolerance: oc.grid_tolerance,
    })
}

/// Best single-user rate over an exhaustive grid of the two phases.
pub fn grid_best_rate(scenario: &Scenario, pose: &Pose, step_deg: f64) -> anyhow::Result<f64> {
    let ch = assemble_channels(scenario, pose)?;
    if ch.ris_user.len() != 1 || scenario.ris.len() != 2 {
        bail!("grid oracle needs K = 1 and M = 2");
    }
    let n = (360.0 / step_deg).round().max(1.0) as usize;
    let mut best = 0.0_f64;
    for i in 0..=n {
        for j in 0..=n {
            let angle = |t: usize| (t as f64 * step_deg).to_radians().min(std::f64::consts::TAU);
            let phases = PhaseConfig(vec![angle(i), angle(j)]);
            best = best.max(ch.rates(&phases, &scenario.radio)[0]);
        }
    }
    Ok(best)
}
