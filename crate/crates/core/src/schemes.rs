//! Scenario generation and the three deployment schemes:
//!
//! * `PLO` optimises phases, location and orientation (omnidirectional UAV),
//! * `PL` optimises phases and location with a fixed orientation,
//! * `PO` optimises phases and orientation with the UAV parked above the
//!   users' barycenter.
//!
//! Every seed drives two independent random streams, one for the user drop
//! and one for the solver's starting point, so schemes run on the same seed
//! see the same users and share the starting values of common blocks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use web_time::Instant;

use crate::channel::{db_to_linear, dbm_to_watts, RadioParams};
use crate::error::{Error, Result};
use crate::geometry::{barycenter, BsArrayGeometry, Orientation, Position3, RisArrayGeometry};
use crate::objective::{
    analytic_phase_gradient, compute_rates, fd_gradient, smoothed_objective, Block, BoxBounds,
    DecisionPoint, FeasibleSet, SmoothingParams,
};
use crate::solver::{psca_run, BlockObjective, GradientScaling, SolverParams, SolverTrace};

const USER_STREAM: u64 = 0;
const INIT_STREAM: u64 = 1;

/// Human-editable scenario description. Defaults reproduce the reference
/// deployment: 10 users on a 1 km square, a 10-element BS at 68 m and a
/// 5×4 RIS at 2.5 GHz-band half-wavelength spacing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub area_width: f64,
    pub area_height: f64,
    pub n_users: usize,
    /// Explicit user positions; replaces the random drop when set.
    pub users: Option<Vec<[f64; 3]>>,
    pub bs_height: f64,
    pub bs_elements: usize,
    /// BS horizontal offset and vertical spacing, in wavelengths.
    pub bs_width_wavelengths: f64,
    pub bs_spacing_wavelengths: f64,
    pub ris_horizontal: usize,
    pub ris_vertical: usize,
    pub ris_spacing_h_wavelengths: f64,
    pub ris_spacing_v_wavelengths: f64,
    pub wavelength: f64,
    pub tx_power_w: f64,
    pub antenna_gain_db: f64,
    pub ref_gain_db: f64,
    pub noise_dbm: f64,
    pub bandwidth_hz: f64,
    pub x_range: [f64; 2],
    pub y_range: [f64; 2],
    pub z_range: [f64; 2],
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            area_width: 1000.0,
            area_height: 1000.0,
            n_users: 10,
            users: None,
            bs_height: 68.0,
            bs_elements: 10,
            bs_width_wavelengths: 0.5,
            bs_spacing_wavelengths: 0.5,
            ris_horizontal: 5,
            ris_vertical: 4,
            ris_spacing_h_wavelengths: 0.5,
            ris_spacing_v_wavelengths: 0.5,
            wavelength: 0.15,
            tx_power_w: 1.0,
            antenna_gain_db: 8.0,
            ref_gain_db: -30.0,
            noise_dbm: -100.0,
            bandwidth_hz: 10e6,
            x_range: [0.0, 1000.0],
            y_range: [0.0, 1000.0],
            z_range: [150.0, 300.0],
        }
    }
}

/// Immutable description of one deployment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub bs: BsArrayGeometry,
    pub ris: RisArrayGeometry,
    pub radio: RadioParams,
    pub users: Vec<Position3>,
    pub position_box: BoxBounds,
    pub orientation_box: BoxBounds,
    pub area: [f64; 2],
}

impl Scenario {
    pub fn feasible_set(&self) -> FeasibleSet {
        FeasibleSet::new(self.ris.len(), self.position_box.clone(), self.orientation_box.clone())
    }

    pub fn altitude_range(&self) -> [f64; 2] {
        [self.position_box.lower[2], self.position_box.upper[2]]
    }
}

/// Draw users uniformly on the ground and apply the configuration.
pub fn generate_scenario(seed: u64, cfg: &ScenarioConfig) -> Result<Scenario> {
    for (name, r) in [("x_range", cfg.x_range), ("y_range", cfg.y_range), ("z_range", cfg.z_range)] {
        if !(r[0] <= r[1]) {
            return Err(Error::Config(format!("{name}: lower bound {} exceeds upper bound {}", r[0], r[1])));
        }
    }
    if !(cfg.area_width > 0.0 && cfg.area_height > 0.0) {
        return Err(Error::Config("area sides must be positive".into()));
    }
    let lambda = cfg.wavelength;
    let bs = BsArrayGeometry {
        n_elements: cfg.bs_elements,
        width: cfg.bs_width_wavelengths * lambda,
        spacing: cfg.bs_spacing_wavelengths * lambda,
        base: Position3::new(0.0, 0.0, cfg.bs_height),
    };
    bs.validate()?;
    let ris = RisArrayGeometry {
        n_horizontal: cfg.ris_horizontal,
        n_vertical: cfg.ris_vertical,
        spacing_h: cfg.ris_spacing_h_wavelengths * lambda,
        spacing_v: cfg.ris_spacing_v_wavelengths * lambda,
    };
    ris.validate()?;
    let radio = RadioParams {
        wavelength: lambda,
        ref_gain: db_to_linear(cfg.ref_gain_db),
        tx_power: cfg.tx_power_w,
        antenna_gain: db_to_linear(cfg.antenna_gain_db),
        noise_power: dbm_to_watts(cfg.noise_dbm),
        bandwidth: cfg.bandwidth_hz,
    };
    radio.validate()?;

    let users = match &cfg.users {
        Some(list) => list.iter().map(|p| Position3::from(*p)).collect::<Vec<_>>(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(USER_STREAM);
            (0..cfg.n_users)
                .map(|_| {
                    let x = rng.random_range(0.0..=cfg.area_width);
                    let y = rng.random_range(0.0..=cfg.area_height);
                    Position3::new(x, y, 0.0)
                })
                .collect()
        }
    };
    if users.is_empty() {
        return Err(Error::EmptyUsers);
    }

    Ok(Scenario {
        bs,
        ris,
        radio,
        users,
        position_box: BoxBounds::new(
            vec![cfg.x_range[0], cfg.y_range[0], cfg.z_range[0]],
            vec![cfg.x_range[1], cfg.y_range[1], cfg.z_range[1]],
        )?,
        orientation_box: FeasibleSet::default_orientation_box(),
        area: [cfg.area_width, cfg.area_height],
    })
}

/// Uniform starting point over the feasible box, from the seed's init stream.
pub fn initial_point(seed: u64, scenario: &Scenario) -> DecisionPoint {
    initial_point_for_start(seed, 0, scenario)
}

/// Starting point of restart `start`; each restart owns its own stream.
pub fn initial_point_for_start(seed: u64, start: usize, scenario: &Scenario) -> DecisionPoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(INIT_STREAM + start as u64);
    let fs = scenario.feasible_set();
    let mut draw = |b: &BoxBounds| -> Vec<f64> {
        b.lower
            .iter()
            .zip(&b.upper)
            .map(|(l, u)| if u > l { rng.random_range(*l..=*u) } else { *l })
            .collect()
    };
    let phases = draw(&fs.phase);
    let position = draw(&fs.position);
    let orientation = draw(&fs.orientation);
    DecisionPoint::from_blocks(&[phases, position, orientation])
}

/// Barycenter of the users, lifted to `altitude`.
pub fn po_position(users: &[Position3], altitude: f64, altitude_range: [f64; 2]) -> Result<Position3> {
    if !(altitude_range[0] <= altitude && altitude <= altitude_range[1]) {
        return Err(Error::Config(format!(
            "altitude {altitude} outside [{}, {}]",
            altitude_range[0], altitude_range[1]
        )));
    }
    let c = barycenter(users)?;
    Ok(Position3::new(c.x, c.y, altitude))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Plo,
    Pl,
    Po,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 3] = [SchemeKind::Plo, SchemeKind::Pl, SchemeKind::Po];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Plo => "PLO",
            SchemeKind::Pl => "PL",
            SchemeKind::Po => "PO",
        }
    }

    pub fn active_blocks(self) -> Vec<bool> {
        match self {
            SchemeKind::Plo => vec![true, true, true],
            SchemeKind::Pl => vec![true, true, false],
            SchemeKind::Po => vec![true, false, true],
        }
    }
}

impl std::str::FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "plo" => Ok(SchemeKind::Plo),
            "pl" => Ok(SchemeKind::Pl),
            "po" => Ok(SchemeKind::Po),
            other => Err(Error::Config(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Where the PO scheme takes its altitude from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AltitudeSource {
    /// Final altitude of the PLO run on the same seed.
    FromPlo,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SchemeSettings {
    /// Orientation held by the PL scheme.
    pub pl_orientation: [f64; 3],
    pub po_altitude: AltitudeSource,
    /// Used when `po_altitude` is `from-plo` but no PLO result is at hand.
    pub po_fallback_altitude: f64,
}

impl Default for SchemeSettings {
    fn default() -> Self {
        Self {
            pl_orientation: [0.0; 3],
            po_altitude: AltitudeSource::FromPlo,
            po_fallback_altitude: 150.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSpec {
    pub kind: SchemeKind,
    pub fixed_orientation: Orientation,
    pub po_altitude: AltitudeSource,
}

impl SchemeSpec {
    pub fn new(kind: SchemeKind, settings: &SchemeSettings) -> Self {
        Self {
            kind,
            fixed_orientation: Orientation::from_array(settings.pl_orientation),
            po_altitude: settings.po_altitude,
        }
    }
}

/// How the phase-block gradient is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseGradient {
    #[default]
    FiniteDifference,
    Analytic,
}

/// Everything the solver needs besides the scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunSettings {
    pub solver: SolverParams,
    pub smoothing: SmoothingParams,
    pub phase_gradient: PhaseGradient,
    /// Independent starting points per run; the best final objective wins.
    pub starts: usize,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            solver: default_solver(),
            smoothing: SmoothingParams::default(),
            phase_gradient: PhaseGradient::Analytic,
            starts: 3,
        }
    }
}

/// Solver settings used for the deployment problem.
///
/// With the phases frozen, the objective ripples with position on a scale of
/// tens of meters and with orientation on a fraction of a radian, so pose
/// moves are only informative once the phases have caught up. Each iteration
/// therefore ends with a few phase-only steps, and the pose blocks take
/// moderate proximal weights on top of a log-scaled objective.
pub fn default_solver() -> SolverParams {
    SolverParams {
        max_iters: 300,
        tau: vec![30.0, 3.0, 10.0],
        scaling: GradientScaling::Relative,
        refine_steps: vec![20, 0],
        ..SolverParams::default()
    }
}

/// The smoothed max-min problem in block form.
pub struct RisProblem<'a> {
    pub scenario: &'a Scenario,
    pub smoothing: SmoothingParams,
    pub phase_gradient: PhaseGradient,
    bounds: Vec<BoxBounds>,
}

impl<'a> RisProblem<'a> {
    pub fn new(scenario: &'a Scenario, smoothing: SmoothingParams, phase_gradient: PhaseGradient) -> Self {
        Self {
            scenario,
            smoothing,
            phase_gradient,
            bounds: scenario.feasible_set().all(),
        }
    }
}

impl BlockObjective for RisProblem<'_> {
    fn bounds(&self) -> &[BoxBounds] {
        &self.bounds
    }

    fn value(&self, blocks: &[Vec<f64>]) -> Result<f64> {
        smoothed_objective(&DecisionPoint::from_blocks(blocks), self.scenario, &self.smoothing)
    }

    fn gradient(&self, blocks: &[Vec<f64>], block: usize) -> Result<Vec<f64>> {
        let x = DecisionPoint::from_blocks(blocks);
        let b = Block::ALL[block];
        if b == Block::Phase && self.phase_gradient == PhaseGradient::Analytic {
            analytic_phase_gradient(&x, self.scenario, &self.smoothing)
        } else {
            fd_gradient(&x, b, self.scenario, &self.smoothing)
        }
    }

    /// Gradients in bit/s/Hz, so proximal weights do not depend on the bandwidth.
    fn gradient_scale(&self) -> f64 {
        1.0 / self.scenario.radio.bandwidth
    }

    /// Phase shifts live on the circle.
    fn periodic(&self, block: usize) -> bool {
        Block::ALL[block] == Block::Phase
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunResult {
    pub scheme: SchemeKind,
    pub seed: u64,
    /// Which restart produced this result.
    pub start: usize,
    pub trace: SolverTrace,
    /// Minimum and average user rate (bit/s) at every trace entry.
    pub min_rates: Vec<f64>,
    pub avg_rates: Vec<f64>,
    pub final_point: DecisionPoint,
    pub final_min_rate: f64,
    pub final_avg_rate: f64,
    pub wall_time_s: f64,
}

fn min_and_mean(rates: &[f64]) -> (f64, f64) {
    let min = rates.iter().copied().fold(f64::INFINITY, f64::min);
    (min, rates.iter().sum::<f64>() / rates.len() as f64)
}

/// Run one scheme on one scenario. `plo_altitude` feeds the PO scheme when
/// its altitude comes from a PLO run.
pub fn run_scheme(
    spec: &SchemeSpec,
    scenario: &Scenario,
    seed: u64,
    settings: &RunSettings,
    plo_altitude: Option<f64>,
) -> Result<RunResult> {
    if settings.starts == 0 {
        return Err(Error::Config("at least one start is required".into()));
    }
    let clock = Instant::now();
    let mut solver = settings.solver.clone();
    solver.active = spec.kind.active_blocks();
    let problem = RisProblem::new(scenario, settings.smoothing, settings.phase_gradient);
    let traces = (0..settings.starts)
        .into_par_iter()
        .map(|s| {
            let x0 = scheme_start(spec, scenario, seed, s, plo_altitude)?;
            psca_run(&x0.blocks(), &problem, &solver)
        })
        .collect::<Result<Vec<_>>>()?;
    let (start, trace) = traces
        .into_iter()
        .enumerate()
        .min_by(|a, b| a.1.final_objective().total_cmp(&b.1.final_objective()).then(a.0.cmp(&b.0)))
        .expect("at least one start");

    let mut min_rates = Vec::with_capacity(trace.records.len());
    let mut avg_rates = Vec::with_capacity(trace.records.len());
    for r in &trace.records {
        let rates = compute_rates(&DecisionPoint::from_blocks(&r.point), scenario)?;
        let (lo, avg) = min_and_mean(&rates);
        min_rates.push(lo);
        avg_rates.push(avg);
    }
    let final_point = DecisionPoint::from_blocks(trace.final_point());
    Ok(RunResult {
        scheme: spec.kind,
        seed,
        start,
        final_min_rate: *min_rates.last().expect("non-empty trace"),
        final_avg_rate: *avg_rates.last().expect("non-empty trace"),
        min_rates,
        avg_rates,
        final_point,
        trace,
        wall_time_s: clock.elapsed().as_secs_f64(),
    })
}

/// Starting point of one restart with the scheme's pinned blocks applied.
fn scheme_start(
    spec: &SchemeSpec,
    scenario: &Scenario,
    seed: u64,
    start: usize,
    plo_altitude: Option<f64>,
) -> Result<DecisionPoint> {
    let mut x0 = initial_point_for_start(seed, start, scenario);
    match spec.kind {
        SchemeKind::Plo => {}
        SchemeKind::Pl => x0.orientation = spec.fixed_orientation,
        SchemeKind::Po => {
            let altitude = match spec.po_altitude {
                AltitudeSource::Fixed(z) => z,
                AltitudeSource::FromPlo => plo_altitude.ok_or_else(|| {
                    Error::Config("PO altitude comes from PLO but no PLO altitude was supplied".into())
                })?,
            };
            x0.position = po_position(&scenario.users, altitude, scenario.altitude_range())?;
        }
    }
    Ok(x0)
}

/// Run the requested schemes on one seed. PLO runs first so PO can take
/// its altitude; it is computed even when not requested if PO needs it.
pub fn run_seed(
    scenario_cfg: &ScenarioConfig,
    seed: u64,
    specs: &[SchemeSpec],
    settings: &RunSettings,
    fallback_altitude: f64,
) -> Result<Vec<RunResult>> {
    let scenario = generate_scenario(seed, scenario_cfg)?;
    let wants = |k: SchemeKind| specs.iter().find(|s| s.kind == k);
    let needs_plo = wants(SchemeKind::Plo).is_some()
        || wants(SchemeKind::Po).is_some_and(|s| s.po_altitude == AltitudeSource::FromPlo);

    let mut out = Vec::new();
    let mut plo_altitude = None;
    if needs_plo {
        let spec = wants(SchemeKind::Plo)
            .cloned()
            .unwrap_or_else(|| SchemeSpec::new(SchemeKind::Plo, &SchemeSettings::default()));
        let run = run_scheme(&spec, &scenario, seed, settings, None)?;
        plo_altitude = Some(run.final_point.position.z);
        if wants(SchemeKind::Plo).is_some() {
            out.push(run);
        }
    }
    for spec in specs.iter().filter(|s| s.kind != SchemeKind::Plo) {
        let alt = plo_altitude.or(Some(fallback_altitude));
        out.push(run_scheme(spec, &scenario, seed, settings, alt)?);
    }
    out.sort_by_key(|r| r.scheme);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeSummary {
    pub scheme: SchemeKind,
    /// Mean over seeds, per iteration, in bit/s. Shorter traces hold their final value.
    pub mean_min_rate: Vec<f64>,
    pub mean_avg_rate: Vec<f64>,
    pub final_mean_min_rate: f64,
    pub final_mean_avg_rate: f64,
}

/// Relative gains `(PLO − other)/other` on the final seed-averaged rates.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Gains {
    pub plo_vs_pl_min_rate: Option<f64>,
    pub plo_vs_pl_avg_rate: Option<f64>,
    pub plo_vs_po_min_rate: Option<f64>,
    pub plo_vs_po_avg_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRow {
    pub seed: u64,
    /// Final min rate (bit/s) per scheme.
    pub final_min_rate: BTreeMap<SchemeKind, f64>,
    pub final_avg_rate: BTreeMap<SchemeKind, f64>,
    pub plo_beats_pl: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub seeds: Vec<u64>,
    pub schemes: Vec<SchemeSummary>,
    pub gains: Gains,
    pub per_seed: Vec<SeedRow>,
}

impl Summary {
    pub fn scheme(&self, kind: SchemeKind) -> Option<&SchemeSummary> {
        self.schemes.iter().find(|s| s.scheme == kind)
    }
}

fn mean_curve(curves: &[&[f64]]) -> Vec<f64> {
    let len = curves.iter().map(|c| c.len()).max().unwrap_or(0);
    (0..len)
        .map(|i| {
            curves
                .iter()
                .map(|c| c.get(i).or(c.last()).copied().unwrap_or(0.0))
                .sum::<f64>()
                / curves.len() as f64
        })
        .collect()
}

/// Aggregate finished runs. Runs are grouped by scheme; curves are averaged
/// across seeds.
pub fn summarize(runs: &[RunResult]) -> Summary {
    let mut seeds: Vec<u64> = runs.iter().map(|r| r.seed).collect();
    seeds.sort_unstable();
    seeds.dedup();

    let mut schemes = Vec::new();
    for kind in SchemeKind::ALL {
        let group: Vec<&RunResult> = runs.iter().filter(|r| r.scheme == kind).collect();
        if group.is_empty() {
            continue;
        }
        let mins: Vec<&[f64]> = group.iter().map(|r| r.min_rates.as_slice()).collect();
        let avgs: Vec<&[f64]> = group.iter().map(|r| r.avg_rates.as_slice()).collect();
        let n = group.len() as f64;
        schemes.push(SchemeSummary {
            scheme: kind,
            mean_min_rate: mean_curve(&mins),
            mean_avg_rate: mean_curve(&avgs),
            final_mean_min_rate: group.iter().map(|r| r.final_min_rate).sum::<f64>() / n,
            final_mean_avg_rate: group.iter().map(|r| r.final_avg_rate).sum::<f64>() / n,
        });
    }

    let finals = |k: SchemeKind| schemes.iter().find(|s| s.scheme == k);
    let gain = |a: Option<f64>, b: Option<f64>| match (a, b) {
        (Some(a), Some(b)) if b > 0.0 => Some((a - b) / b),
        _ => None,
    };
    let plo = finals(SchemeKind::Plo);
    let pl = finals(SchemeKind::Pl);
    let po = finals(SchemeKind::Po);
    let gains = Gains {
        plo_vs_pl_min_rate: gain(plo.map(|s| s.final_mean_min_rate), pl.map(|s| s.final_mean_min_rate)),
        plo_vs_pl_avg_rate: gain(plo.map(|s| s.final_mean_avg_rate), pl.map(|s| s.final_mean_avg_rate)),
        plo_vs_po_min_rate: gain(plo.map(|s| s.final_mean_min_rate), po.map(|s| s.final_mean_min_rate)),
        plo_vs_po_avg_rate: gain(plo.map(|s| s.final_mean_avg_rate), po.map(|s| s.final_mean_avg_rate)),
    };

    let per_seed = seeds
        .iter()
        .map(|&seed| {
            let mine: Vec<&RunResult> = runs.iter().filter(|r| r.seed == seed).collect();
            let final_min_rate: BTreeMap<_, _> = mine.iter().map(|r| (r.scheme, r.final_min_rate)).collect();
            let final_avg_rate = mine.iter().map(|r| (r.scheme, r.final_avg_rate)).collect();
            let plo_beats_pl = match (final_min_rate.get(&SchemeKind::Plo), final_min_rate.get(&SchemeKind::Pl)) {
                (Some(a), Some(b)) => Some(a >= b),
                _ => None,
            };
            SeedRow {
                seed,
                final_min_rate,
                final_avg_rate,
                plo_beats_pl,
            }
        })
        .collect();

    Summary {
        seeds,
        schemes,
        gains,
        per_seed,
    }
}

#[derive(Debug, Clone)]
pub struct Comparison {
    /// Sorted by (scheme, seed).
    pub runs: Vec<RunResult>,
    pub summary: Summary,
}

/// Run every scheme on every seed (seeds in parallel) and aggregate.
pub fn compare_schemes(
    scenario_cfg: &ScenarioConfig,
    seeds: &[u64],
    specs: &[SchemeSpec],
    settings: &RunSettings,
    fallback_altitude: f64,
) -> Result<Comparison> {
    if seeds.is_empty() {
        return Err(Error::Config("at least one seed is required".into()));
    }
    let per_seed: Vec<Vec<RunResult>> = seeds
        .par_iter()
        .map(|&s| run_seed(scenario_cfg, s, specs, settings, fallback_altitude))
        .collect::<Result<_>>()?;
    let mut runs: Vec<RunResult> = per_seed.into_iter().flatten().collect();
    runs.sort_by_key(|r| (r.scheme, r.seed));
    let summary = summarize(&runs);
    Ok(Comparison { runs, summary })
}
