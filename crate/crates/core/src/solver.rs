//! Parallel successive convex approximation over box-constrained blocks.
//!
//! Each iteration linearises the objective at the shared iterate, minimises
//! the per-block surrogate over its box (all blocks independently), and moves
//! toward the surrogate minimiser by a step `γ^l ∈ (0, 1]`. Because every
//! block set is a box, the convex combination stays feasible.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::BoxBounds;

/// A block-structured objective to minimise over a product of boxes.
pub trait BlockObjective: Sync {
    fn bounds(&self) -> &[BoxBounds];
    fn value(&self, blocks: &[Vec<f64>]) -> Result<f64>;
    /// Gradient with respect to one block, in native units.
    fn gradient(&self, blocks: &[Vec<f64>], block: usize) -> Result<Vec<f64>>;
    /// Factor applied to gradients so that one `τ` fits objectives in any unit.
    fn gradient_scale(&self) -> f64 {
        1.0
    }
    /// Whether the objective is periodic in every coordinate of `block` with
    /// the box width as period. Proximal updates of such blocks wrap around
    /// instead of stopping at the box faces.
    fn periodic(&self, _block: usize) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StepSchedule {
    /// `2/(l+2)`.
    Harmonic,
    Constant { gamma: f64 },
    /// `γ0·ρ^l`.
    Geometric { gamma: f64, ratio: f64 },
    /// `γ0/(1 + ε·γ0·l)`, the closed form of `γ ← γ(1 - εγ)`.
    Diminishing { gamma: f64, epsilon: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Surrogate {
    /// Linearisation plus `(τ/2)‖x - x^l‖²` in unit-cube coordinates.
    Proximal,
    /// Bare linearisation; minimiser is a box vertex.
    Linear,
}

/// How raw gradients are scaled before the surrogate solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GradientScaling {
    /// Multiply by [`BlockObjective::gradient_scale`].
    Problem,
    /// Divide by `|F(x^l)|`, i.e. follow the gradient of `log|F|`.
    Relative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverParams {
    pub max_iters: usize,
    pub schedule: StepSchedule,
    pub surrogate: Surrogate,
    /// Proximal weight per block; the last entry covers any further blocks.
    pub tau: Vec<f64>,
    pub rel_tol: f64,
    pub patience: usize,
    /// Which blocks move. Inactive blocks are copied through unchanged.
    pub active: Vec<bool>,
    pub scaling: GradientScaling,
    /// Extra full-step proximal updates of a single block after every
    /// iteration, per block (last entry repeats). Zero keeps plain PSCA.
    pub refine_steps: Vec<usize>,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            max_iters: 500,
            schedule: StepSchedule::Harmonic,
            surrogate: Surrogate::Proximal,
            tau: vec![1.0],
            rel_tol: 1e-6,
            patience: 10,
            active: vec![true; 3],
            scaling: GradientScaling::Problem,
            refine_steps: vec![0],
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        if self.tau.is_empty() || self.tau.iter().any(|t| !(*t > 0.0)) {
            return Err(Error::Config("proximal weights must be positive".into()));
        }
        let bad_gamma = |g: f64| !(g > 0.0 && g <= 1.0);
        match self.schedule {
            StepSchedule::Harmonic => {}
            StepSchedule::Constant { gamma } if bad_gamma(gamma) => {
                return Err(Error::Config("constant step must lie in (0, 1]".into()))
            }
            StepSchedule::Geometric { gamma, ratio } if bad_gamma(gamma) || !(ratio > 0.0 && ratio <= 1.0) => {
                return Err(Error::Config("geometric step needs γ0, ρ in (0, 1]".into()))
            }
            StepSchedule::Diminishing { gamma, epsilon } if bad_gamma(gamma) || !(epsilon > 0.0 && epsilon < 1.0 / gamma) => {
                return Err(Error::Config("diminishing step needs γ0 in (0, 1] and ε in (0, 1/γ0)".into()))
            }
            _ => {}
        }
        if !(self.rel_tol >= 0.0) {
            return Err(Error::Config("relative tolerance must be non-negative".into()));
        }
        Ok(())
    }

    pub fn tau_for(&self, block: usize) -> f64 {
        self.tau.get(block).or(self.tau.last()).copied().unwrap_or(1.0)
    }

    pub fn refine_for(&self, block: usize) -> usize {
        self.refine_steps.get(block).or(self.refine_steps.last()).copied().unwrap_or(0)
    }

    fn is_active(&self, block: usize) -> bool {
        self.active.get(block).copied().unwrap_or(false)
    }
}

/// Step size at iteration `l`, clamped to `(0, 1]`.
pub fn step_size(l: usize, schedule: &StepSchedule) -> f64 {
    let g = match *schedule {
        StepSchedule::Harmonic => 2.0 / (l as f64 + 2.0),
        StepSchedule::Constant { gamma } => gamma,
        StepSchedule::Geometric { gamma, ratio } => gamma * ratio.powi(l.min(i32::MAX as usize) as i32),
        StepSchedule::Diminishing { gamma, epsilon } => gamma / (1.0 + epsilon * gamma * l as f64),
    };
    g.clamp(f64::MIN_POSITIVE, 1.0)
}

/// Minimiser of the block surrogate over `bounds`, in whatever coordinates
/// `grad`, `x` and `bounds` share. The solver calls it in unit-cube coordinates.
pub fn solve_block_surrogate(
    grad: &[f64],
    x: &[f64],
    bounds: &BoxBounds,
    surrogate: Surrogate,
    tau: f64,
) -> Result<Vec<f64>> {
    if !bounds.contains(x) || grad.len() != x.len() {
        return Err(Error::Infeasible("block value outside its box".into()));
    }
    let mut out = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let (lo, hi) = (bounds.lower[i], bounds.upper[i]);
        let v = match surrogate {
            Surrogate::Proximal => (x[i] - grad[i] / tau).clamp(lo, hi),
            Surrogate::Linear => {
                if grad[i] > 0.0 {
                    lo
                } else if grad[i] < 0.0 {
                    hi
                } else {
                    x[i]
                }
            }
        };
        out.push(v);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub objective: f64,
    /// Step used to produce this iterate; 0 for the starting point.
    pub step: f64,
    /// `‖x^l − x^{l−1}‖₂` per block in unit-cube coordinates.
    pub update_norms: Vec<f64>,
    pub point: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverTrace {
    pub records: Vec<IterationRecord>,
    pub converged: bool,
}

impl SolverTrace {
    pub fn final_point(&self) -> &[Vec<f64>] {
        &self.records.last().expect("trace is never empty").point
    }

    pub fn final_objective(&self) -> f64 {
        self.records.last().expect("trace is never empty").objective
    }
}

fn check_feasible(x: &[Vec<f64>], bounds: &[BoxBounds]) -> Result<()> {
    if x.len() != bounds.len() {
        return Err(Error::Infeasible(format!("expected {} blocks, got {}", bounds.len(), x.len())));
    }
    for (i, (v, b)) in x.iter().zip(bounds).enumerate() {
        if !b.contains(v) {
            return Err(Error::Infeasible(format!("block {} outside its box", i + 1)));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepDiagnostics {
    pub step: f64,
    pub update_norms: Vec<f64>,
}

/// One iteration: `x^{l+1} = x^l + γ^l (x̂(x^l) − x^l)` on the active blocks.
///
/// `scale` multiplies every gradient before the surrogate solve.
pub fn psca_step<P: BlockObjective>(
    x: &[Vec<f64>],
    problem: &P,
    params: &SolverParams,
    l: usize,
    scale: f64,
) -> Result<(Vec<Vec<f64>>, StepDiagnostics)> {
    let bounds = problem.bounds();
    check_feasible(x, bounds)?;
    let gamma = step_size(l, &params.schedule);
    let wraps = |i: usize| params.surrogate == Surrogate::Proximal && problem.periodic(i);

    let targets: Vec<Option<Vec<f64>>> = (0..x.len())
        .into_par_iter()
        .map(|i| {
            if !params.is_active(i) {
                return Ok(None);
            }
            let b = &bounds[i];
            let grad: Vec<f64> = problem
                .gradient(x, i)?
                .into_iter()
                .zip(b.widths())
                .map(|(g, w)| g * w * scale)
                .collect();
            let unit = BoxBounds::uniform(b.dim(), 0.0, 1.0);
            let xu = b.to_unit(&x[i]);
            let hat = if wraps(i) {
                let tau = params.tau_for(i);
                xu.iter().zip(&grad).map(|(v, g)| v - g / tau).collect()
            } else {
                solve_block_surrogate(&grad, &xu, &unit, params.surrogate, params.tau_for(i))?
            };
            Ok(Some(b.from_unit(&hat)))
        })
        .collect::<Result<_>>()?;

    let mut next = Vec::with_capacity(x.len());
    let mut update_norms = Vec::with_capacity(x.len());
    for (i, target) in targets.into_iter().enumerate() {
        match target {
            None => {
                next.push(x[i].clone());
                update_norms.push(0.0);
            }
            Some(hat) => {
                let b = &bounds[i];
                let mut moved: Vec<f64> = x[i].iter().zip(&hat).map(|(xi, hi)| xi + gamma * (hi - xi)).collect();
                if wraps(i) {
                    for ((v, lo), w) in moved.iter_mut().zip(&b.lower).zip(b.widths()) {
                        if w > 0.0 {
                            *v = lo + (*v - lo).rem_euclid(w);
                        }
                    }
                }
                b.project(&mut moved);
                let norm = moved
                    .iter()
                    .zip(&x[i])
                    .zip(b.widths())
                    .map(|((a, c), w)| {
                        if w <= 0.0 {
                            return 0.0;
                        }
                        let d = (a - c).abs() / w;
                        // a wrapped coordinate moved along the shorter arc
                        let d = if wraps(i) { d.min(1.0 - d) } else { d };
                        d * d
                    })
                    .sum::<f64>()
                    .sqrt();
                next.push(moved);
                update_norms.push(norm);
            }
        }
    }
    Ok((next, StepDiagnostics { step: gamma, update_norms }))
}

/// Iterate until the relative objective change stays below `rel_tol` for
/// `patience` consecutive iterations, or `max_iters` is reached.
pub fn psca_run<P: BlockObjective>(x0: &[Vec<f64>], problem: &P, params: &SolverParams) -> Result<SolverTrace> {
    params.validate()?;
    check_feasible(x0, problem.bounds())?;

    let mut x = x0.to_vec();
    let mut f = problem.value(&x)?;
    let scale_at = |f: f64| match params.scaling {
        GradientScaling::Relative if f != 0.0 => 1.0 / f.abs(),
        GradientScaling::Relative => 1.0,
        GradientScaling::Problem => problem.gradient_scale(),
    };
    let mut records = vec![IterationRecord {
        iteration: 0,
        objective: f,
        step: 0.0,
        update_norms: vec![0.0; x.len()],
        point: x.clone(),
    }];

    // Single-block, full-step copies of the parameters for the refinement passes.
    let refiners: Vec<Option<SolverParams>> = (0..x.len())
        .map(|i| {
            (params.is_active(i) && params.refine_for(i) > 0).then(|| SolverParams {
                schedule: StepSchedule::Constant { gamma: 1.0 },
                active: (0..x.len()).map(|j| j == i).collect(),
                ..params.clone()
            })
        })
        .collect();
    let mut calm = 0;
    let mut converged = false;
    for l in 0..params.max_iters {
        let (mut next, diag) = psca_step(&x, problem, params, l, scale_at(f))?;
        let mut f_next = problem.value(&next)?;
        for (i, single) in refiners.iter().enumerate() {
            for _ in 0..params.refine_for(i) {
                let Some(single) = single else { break };
                next = psca_step(&next, problem, single, 0, scale_at(f_next))?.0;
                f_next = problem.value(&next)?;
            }
        }
        if (f_next - f).abs() <= params.rel_tol * f.abs() {
            calm += 1;
        } else {
            calm = 0;
        }
        x = next;
        f = f_next;
        records.push(IterationRecord {
            iteration: l + 1,
            objective: f,
            step: diag.step,
            update_norms: diag.update_norms,
            point: x.clone(),
        });
        if params.patience > 0 && calm >= params.patience {
            converged = true;
            break;
        }
    }
    Ok(SolverTrace { records, converged })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `Σ_b Σ_i a_bi (x_bi − c_bi)²` over boxes.
    struct Quadratic {
        bounds: Vec<BoxBounds>,
        curvature: Vec<Vec<f64>>,
        center: Vec<Vec<f64>>,
    }

    impl Quadratic {
        fn optimum(&self) -> Vec<Vec<f64>> {
            self.center
                .iter()
                .zip(&self.bounds)
                .map(|(c, b)| {
                    let mut v = c.clone();
                    b.project(&mut v);
                    v
                })
                .collect()
        }
    }

    impl BlockObjective for Quadratic {
        fn bounds(&self) -> &[BoxBounds] {
            &self.bounds
        }

        fn value(&self, x: &[Vec<f64>]) -> Result<f64> {
            let mut s = 0.0;
            for b in 0..x.len() {
                for i in 0..x[b].len() {
                    s += self.curvature[b][i] * (x[b][i] - self.center[b][i]).powi(2);
                }
            }
            Ok(s)
        }

        fn gradient(&self, x: &[Vec<f64>], b: usize) -> Result<Vec<f64>> {
            Ok((0..x[b].len())
                .map(|i| 2.0 * self.curvature[b][i] * (x[b][i] - self.center[b][i]))
                .collect())
        }
    }

    fn toy() -> Quadratic {
        Quadratic {
            bounds: vec![
                BoxBounds::uniform(2, -1.0, 1.0),
                BoxBounds::new(vec![0.0, 10.0], vec![100.0, 20.0]).unwrap(),
                BoxBounds::uniform(1, 0.0, 6.0),
            ],
            // unit-cube curvature 2 on every axis: a = 1/width²
            curvature: vec![vec![0.25, 0.25], vec![1e-4, 1e-2], vec![1.0 / 36.0]],
            center: vec![vec![0.3, 4.0], vec![42.0, 5.0], vec![2.5]],
        }
    }

    #[test]
    fn harmonic_steps() {
        assert_eq!(step_size(0, &StepSchedule::Harmonic), 1.0);
        assert_eq!(step_size(2, &StepSchedule::Harmonic), 0.5);
        assert_eq!(step_size(7, &StepSchedule::Constant { gamma: 0.3 }), 0.3);
        for l in [0, 1, 10, 10_000, 1 << 40] {
            for s in [
                StepSchedule::Harmonic,
                StepSchedule::Constant { gamma: 1.0 },
                StepSchedule::Geometric { gamma: 0.9, ratio: 0.5 },
            ] {
                let g = step_size(l, &s);
                assert!(g > 0.0 && g <= 1.0);
            }
        }
    }

    #[test]
    fn surrogate_examples() {
        let b = BoxBounds::uniform(1, -1.0, 1.0);
        let prox = Surrogate::Proximal;
        let lin = Surrogate::Linear;
        assert_eq!(solve_block_surrogate(&[0.0], &[0.3], &b, prox, 1.0).unwrap(), vec![0.3]);
        assert_eq!(solve_block_surrogate(&[1.0], &[0.5], &b, prox, 1.0).unwrap(), vec![-0.5]);
        assert_eq!(solve_block_surrogate(&[-3.0], &[0.0], &b, lin, 1.0).unwrap(), vec![1.0]);
        assert_eq!(solve_block_surrogate(&[3.0], &[0.0], &b, lin, 1.0).unwrap(), vec![-1.0]);
        assert_eq!(solve_block_surrogate(&[0.0], &[0.2], &b, lin, 1.0).unwrap(), vec![0.2]);
        assert!(matches!(
            solve_block_surrogate(&[0.0], &[2.0], &b, prox, 1.0),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn linear_mode_hits_vertices() {
        let b = BoxBounds::new(vec![0.0, -2.0, 5.0], vec![1.0, 2.0, 9.0]).unwrap();
        let hat = solve_block_surrogate(&[0.1, -4.0, 1e-9], &[0.5, 0.0, 6.0], &b, Surrogate::Linear, 1.0).unwrap();
        assert_eq!(hat, vec![0.0, 2.0, 5.0]);
    }

    #[test]
    fn one_step_reaches_quadratic_minimum() {
        // f = (x - 0.3)² on [-1, 1]: unit curvature in unit coordinates is 2·1·w² = 8
        let q = Quadratic {
            bounds: vec![BoxBounds::uniform(1, -1.0, 1.0)],
            curvature: vec![vec![1.0]],
            center: vec![vec![0.3]],
        };
        let params = SolverParams {
            schedule: StepSchedule::Constant { gamma: 1.0 },
            tau: vec![8.0],
            active: vec![true],
            ..SolverParams::default()
        };
        let (x1, _) = psca_step(&[vec![-0.9]], &q, &params, 0, 1.0).unwrap();
        assert!((x1[0][0] - 0.3).abs() < 1e-12);
    }

    #[test]
    fn tiny_step_barely_moves() {
        let q = toy();
        let params = SolverParams {
            schedule: StepSchedule::Constant { gamma: 1e-12 },
            ..SolverParams::default()
        };
        let x0 = vec![vec![0.9, -0.9], vec![1.0, 19.0], vec![5.0]];
        let (x1, _) = psca_step(&x0, &q, &params, 0, 1.0).unwrap();
        for (a, b) in x1.iter().flatten().zip(x0.iter().flatten()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn run_converges_on_box_quadratic() {
        let q = toy();
        let params = SolverParams {
            tau: vec![2.0],
            ..SolverParams::default()
        };
        let x0 = vec![vec![-0.9, -0.9], vec![90.0, 19.0], vec![5.5]];
        let trace = psca_run(&x0, &q, &params).unwrap();
        let opt = q.optimum();
        for (a, b) in trace.final_point().iter().flatten().zip(opt.iter().flatten()) {
            assert!((a - b).abs() < 1e-3, "{a} vs {b}");
        }
        assert!(trace.records.len() <= params.max_iters + 1);
        for r in &trace.records {
            for (v, b) in r.point.iter().zip(q.bounds()) {
                assert!(b.contains(v));
            }
        }
        assert!(trace.final_objective() < trace.records[0].objective - 0.1);
    }

    #[test]
    fn masked_blocks_are_untouched() {
        let q = toy();
        let params = SolverParams {
            active: vec![true, false, false],
            max_iters: 50,
            ..SolverParams::default()
        };
        let x0 = vec![vec![-0.9, -0.9], vec![90.0, 19.0], vec![5.5]];
        let trace = psca_run(&x0, &q, &params).unwrap();
        for r in &trace.records {
            assert_eq!(r.point[1], x0[1]);
            assert_eq!(r.point[2], x0[2]);
        }
        assert_ne!(trace.final_point()[0], x0[0]);
    }

    #[test]
    fn run_is_deterministic() {
        let q = toy();
        let params = SolverParams::default();
        let x0 = vec![vec![0.1, 0.2], vec![3.0, 11.0], vec![0.0]];
        assert_eq!(psca_run(&x0, &q, &params).unwrap(), psca_run(&x0, &q, &params).unwrap());
    }

    #[test]
    fn diminishing_schedule() {
        let s = StepSchedule::Diminishing { gamma: 0.5, epsilon: 0.1 };
        assert_eq!(step_size(0, &s), 0.5);
        assert!((step_size(20, &s) - 0.25).abs() < 1e-15);
        let bad = SolverParams {
            schedule: StepSchedule::Diminishing { gamma: 0.5, epsilon: 2.0 },
            ..SolverParams::default()
        };
        assert!(bad.validate().is_err());
    }

    /// The toy quadratic multiplied by a constant.
    struct Scaled(Quadratic, f64);

    impl BlockObjective for Scaled {
        fn bounds(&self) -> &[BoxBounds] {
            self.0.bounds()
        }
        fn value(&self, x: &[Vec<f64>]) -> Result<f64> {
            Ok(self.1 * self.0.value(x)?)
        }
        fn gradient(&self, x: &[Vec<f64>], b: usize) -> Result<Vec<f64>> {
            Ok(self.0.gradient(x, b)?.into_iter().map(|g| self.1 * g).collect())
        }
    }

    #[test]
    fn relative_scaling_ignores_objective_units() {
        let params = SolverParams {
            scaling: GradientScaling::Relative,
            max_iters: 30,
            ..SolverParams::default()
        };
        let x0 = vec![vec![-0.9, 0.9], vec![90.0, 19.0], vec![5.5]];
        let a = psca_run(&x0, &Scaled(toy(), 1.0), &params).unwrap();
        let b = psca_run(&x0, &Scaled(toy(), 1024.0), &params).unwrap();
        for (ra, rb) in a.records.iter().zip(&b.records) {
            assert_eq!(ra.point, rb.point);
        }
    }

    #[test]
    fn refinement_moves_only_its_block() {
        let q = toy();
        let x0 = vec![vec![-0.9, -0.9], vec![90.0, 19.0], vec![5.5]];
        let plain = SolverParams {
            max_iters: 3,
            active: vec![true, false, true],
            tau: vec![2.0],
            ..SolverParams::default()
        };
        let refined = SolverParams {
            refine_steps: vec![5, 0],
            ..plain.clone()
        };
        let a = psca_run(&x0, &q, &plain).unwrap();
        let b = psca_run(&x0, &q, &refined).unwrap();
        let opt = q.optimum();
        let dist = |x: &[f64]| x.iter().zip(&opt[0]).map(|(u, v)| (u - v).abs()).sum::<f64>();
        assert!(dist(&b.final_point()[0]) < dist(&a.final_point()[0]));
        assert_eq!(a.final_point()[2], b.final_point()[2]);
        for r in &b.records {
            assert_eq!(r.point[1], x0[1]);
        }
    }

    /// `-cos(x - 0.1)` on one period, optionally declared periodic.
    struct Circle(Vec<BoxBounds>, bool);

    impl BlockObjective for Circle {
        fn bounds(&self) -> &[BoxBounds] {
            &self.0
        }
        fn value(&self, x: &[Vec<f64>]) -> Result<f64> {
            Ok(-(x[0][0] - 0.1).cos())
        }
        fn gradient(&self, x: &[Vec<f64>], _: usize) -> Result<Vec<f64>> {
            Ok(vec![(x[0][0] - 0.1).sin()])
        }
        fn periodic(&self, _: usize) -> bool {
            self.1
        }
    }

    #[test]
    fn periodic_blocks_wrap_instead_of_sticking() {
        let bounds = vec![BoxBounds::uniform(1, 0.0, std::f64::consts::TAU)];
        let params = SolverParams {
            tau: vec![40.0],
            schedule: StepSchedule::Constant { gamma: 1.0 },
            max_iters: 200,
            active: vec![true],
            ..SolverParams::default()
        };
        let x0 = vec![vec![6.2]];
        let wrapped = psca_run(&x0, &Circle(bounds.clone(), true), &params).unwrap();
        assert!((wrapped.final_point()[0][0] - 0.1).abs() < 1e-6);
        for r in &wrapped.records {
            assert!(bounds[0].contains(&r.point[0]));
        }
        let clamped = psca_run(&x0, &Circle(bounds, false), &params).unwrap();
        assert_eq!(clamped.final_point()[0][0], std::f64::consts::TAU);
    }

    #[test]
    fn infeasible_start_is_rejected() {
        let q = toy();
        let x0 = vec![vec![2.0, 0.0], vec![3.0, 11.0], vec![0.0]];
        assert!(matches!(psca_run(&x0, &q, &SolverParams::default()), Err(Error::Infeasible(_))));
    }

    #[test]
    fn invalid_params_are_rejected() {
        let p = SolverParams {
            schedule: StepSchedule::Constant { gamma: 1.5 },
            ..SolverParams::default()
        };
        assert!(p.validate().is_err());
        let p = SolverParams {
            max_iters: 0,
            ..SolverParams::default()
        };
        assert!(p.validate().is_err());
    }
}
