//! The smoothed max-min objective and its gradients.
//!
//! `F(x) = -‖(R_1, …, R_K)‖_p` with `p < 0`, which lower-bounds `-min_k R_k`
//! tightly as `p → -∞`. Gradients are available by finite differences for
//! every block and in closed form for the phase block.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, LN_2, TAU};

use crate::channel::{assemble_channels, PhaseConfig, Pose};
use crate::error::{Error, Result};
use crate::geometry::{Orientation, Position3};
use crate::schemes::Scenario;

/// The three optimization blocks, in solver order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Block {
    Phase,
    Position,
    Orientation,
}

impl Block {
    pub const ALL: [Block; 3] = [Block::Phase, Block::Position, Block::Orientation];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Axis-aligned box `[lower, upper]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxBounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxBounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::Config("box bounds differ in length".into()));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l <= u) || !l.is_finite() || !u.is_finite()) {
            return Err(Error::Config("box lower bound exceeds upper bound".into()));
        }
        Ok(Self { lower, upper })
    }

    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Self {
        Self {
            lower: vec![lower; dim],
            upper: vec![upper; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| l <= v && v <= u)
    }

    pub fn project(&self, x: &mut [f64]) {
        for (v, (l, u)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*l, *u);
        }
    }

    pub fn widths(&self) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(l, u)| u - l).collect()
    }

    /// Affine map onto the unit cube. Degenerate axes map to 0.
    pub fn to_unit(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(v, (l, u))| if u > l { ((v - l) / (u - l)).clamp(0.0, 1.0) } else { 0.0 })
            .collect()
    }

    pub fn from_unit(&self, t: &[f64]) -> Vec<f64> {
        t.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(s, (l, u))| (l + s * (u - l)).clamp(*l, *u))
            .collect()
    }
}

/// One point of the decision space: phases, UAV position and orientation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionPoint {
    pub phases: PhaseConfig,
    pub position: Position3,
    pub orientation: Orientation,
}

impl DecisionPoint {
    pub fn pose(&self) -> Pose {
        Pose {
            position: self.position,
            orientation: self.orientation,
        }
    }

    pub fn block(&self, b: Block) -> Vec<f64> {
        match b {
            Block::Phase => self.phases.0.clone(),
            Block::Position => self.position.iter().copied().collect(),
            Block::Orientation => self.orientation.to_array().to_vec(),
        }
    }

    pub fn set_block(&mut self, b: Block, values: &[f64]) {
        match b {
            Block::Phase => self.phases.0.copy_from_slice(values),
            Block::Position => self.position = Position3::from_column_slice(values),
            Block::Orientation => {
                self.orientation = Orientation::new(values[0], values[1], values[2])
            }
        }
    }

    pub fn blocks(&self) -> Vec<Vec<f64>> {
        Block::ALL.iter().map(|b| self.block(*b)).collect()
    }

    pub fn from_blocks(blocks: &[Vec<f64>]) -> Self {
        Self {
            phases: PhaseConfig(blocks[0].clone()),
            position: Position3::from_column_slice(&blocks[1]),
            orientation: Orientation::new(blocks[2][0], blocks[2][1], blocks[2][2]),
        }
    }
}

/// The feasible set `X1 × X2 × X3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibleSet {
    pub phase: BoxBounds,
    pub position: BoxBounds,
    pub orientation: BoxBounds,
}

impl FeasibleSet {
    pub fn new(n_elements: usize, position: BoxBounds, orientation: BoxBounds) -> Self {
        Self {
            phase: BoxBounds::uniform(n_elements, 0.0, TAU),
            position,
            orientation,
        }
    }

    /// Orientation box `[0, π/2]² × [0, 2π]`.
    pub fn default_orientation_box() -> BoxBounds {
        BoxBounds {
            lower: vec![0.0; 3],
            upper: vec![FRAC_PI_2, FRAC_PI_2, TAU],
        }
    }

    pub fn bounds(&self, b: Block) -> &BoxBounds {
        match b {
            Block::Phase => &self.phase,
            Block::Position => &self.position,
            Block::Orientation => &self.orientation,
        }
    }

    pub fn all(&self) -> Vec<BoxBounds> {
        Block::ALL.iter().map(|b| self.bounds(*b).clone()).collect()
    }

    pub fn contains(&self, x: &DecisionPoint) -> bool {
        Block::ALL.iter().all(|b| self.bounds(*b).contains(&x.block(*b)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SmoothingParams {
    /// Norm exponent, strictly negative.
    pub p: f64,
    /// Finite-difference steps for phase (rad), position (m) and orientation (rad).
    pub fd_steps: [f64; 3],
}

impl Default for SmoothingParams {
    fn default() -> Self {
        Self {
            p: -8.0,
            fd_steps: [1e-4, 1e-2, 1e-4],
        }
    }
}

impl SmoothingParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.p < 0.0) || !self.p.is_finite() {
            return Err(Error::Config(format!("norm exponent must be negative, got {}", self.p)));
        }
        if self.fd_steps.iter().any(|h| !(*h > 0.0)) {
            return Err(Error::Config("finite-difference steps must be positive".into()));
        }
        Ok(())
    }

    pub fn step(&self, b: Block) -> f64 {
        self.fd_steps[b.index()]
    }
}

/// Per-user rates in bit/s at decision point `x`.
pub fn compute_rates(x: &DecisionPoint, scenario: &Scenario) -> Result<Vec<f64>> {
    let ch = assemble_channels(scenario, &x.pose())?;
    Ok(ch.rates(&x.phases, &scenario.radio))
}

/// `(Σ r_k^p)^{1/p}` for `p < 0`, evaluated as `r_min·(Σ (r_k/r_min)^p)^{1/p}`.
pub fn p_norm(rates: &[f64], p: f64) -> Result<f64> {
    let mut r_min = f64::INFINITY;
    for (user, &rate) in rates.iter().enumerate() {
        if !(rate > 0.0) {
            return Err(Error::NonPositiveRate { user, rate });
        }
        r_min = r_min.min(rate);
    }
    if rates.is_empty() {
        return Err(Error::EmptyUsers);
    }
    let s: f64 = rates.iter().map(|r| (r / r_min).powf(p)).sum();
    Ok(r_min * s.powf(1.0 / p))
}

/// Objective to minimise: `-‖R‖_p`.
pub fn smoothed_objective(x: &DecisionPoint, scenario: &Scenario, sp: &SmoothingParams) -> Result<f64> {
    let rates = compute_rates(x, scenario)?;
    Ok(-p_norm(&rates, sp.p)?)
}

/// Finite-difference gradient of `f` over a box.
///
/// Central differences in the interior. Where a probe would leave the box,
/// the second-order one-sided stencil is used instead, so quadratics are
/// differentiated exactly everywhere.
pub fn finite_difference<F>(mut f: F, x: &[f64], bounds: &BoxBounds, step: f64) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let mut probe = x.to_vec();
    let mut grad = vec![0.0; x.len()];
    let mut eval = |i: usize, v: f64| -> Result<f64> {
        probe[i] = v;
        let out = f(&probe);
        probe[i] = x[i];
        out
    };
    let mut f0 = None;
    for i in 0..x.len() {
        let (lo, hi, xi, h) = (bounds.lower[i], bounds.upper[i], x[i], step);
        grad[i] = if xi - h >= lo && xi + h <= hi {
            (eval(i, xi + h)? - eval(i, xi - h)?) / (2.0 * h)
        } else if xi + 2.0 * h <= hi || xi - 2.0 * h >= lo {
            let dir = if xi + 2.0 * h <= hi { 1.0 } else { -1.0 };
            let center = match f0 {
                Some(v) => v,
                // probing coordinate i at its own value evaluates f(x)
                None => *f0.insert(eval(i, xi)?),
            };
            let f1 = eval(i, xi + dir * h)?;
            let f2 = eval(i, xi + dir * 2.0 * h)?;
            dir * (-3.0 * center + 4.0 * f1 - f2) / (2.0 * h)
        } else {
            let (a, b) = ((xi - h).max(lo), (xi + h).min(hi));
            if b > a {
                (eval(i, b)? - eval(i, a)?) / (b - a)
            } else {
                0.0
            }
        };
    }
    Ok(grad)
}

/// Finite-difference gradient of the smoothed objective for one block.
pub fn fd_gradient(x: &DecisionPoint, block: Block, scenario: &Scenario, sp: &SmoothingParams) -> Result<Vec<f64>> {
    let bounds = scenario.feasible_set().bounds(block).clone();
    let mut point = x.clone();
    finite_difference(
        |v| {
            point.set_block(block, v);
            smoothed_objective(&point, scenario, sp)
        },
        &x.block(block),
        &bounds,
        sp.step(block),
    )
}

/// Exact `∂F/∂θ_m`.
///
/// With `c_k = Σ_m v_{k,m} e^{jθ_m}`:
/// `∂|c_k|²/∂θ_m = 2·Re(conj(c_k)·j·v_{k,m} e^{jθ_m}) = -2·Im(conj(c_k)·v_{k,m} e^{jθ_m})`,
/// `∂R_k/∂|c_k|² = B·a / ((1 + a|c_k|²)·ln 2)` where `a = P0·G_A/σ²`, and
/// `∂‖R‖_p/∂R_k = (R_k/‖R‖_p)^{p-1}`. `F` carries an extra minus sign.
pub fn analytic_phase_gradient(x: &DecisionPoint, scenario: &Scenario, sp: &SmoothingParams) -> Result<Vec<f64>> {
    let ch = assemble_channels(scenario, &x.pose())?;
    let radio = &scenario.radio;
    let a = radio.snr_scale();
    let rates = ch.rates(&x.phases, radio);
    let norm = p_norm(&rates, sp.p)?;
    let rot = x.phases.reflection();

    let mut grad = vec![0.0; x.phases.len()];
    for (k, &rate) in rates.iter().enumerate() {
        let terms = ch.cascade_terms(k);
        let c = ch.cascade(&x.phases, k);
        let weight = (rate / norm).powf(sp.p - 1.0);
        let drate = radio.bandwidth * a / ((1.0 + a * c.norm_sqr()) * LN_2);
        let scale = -weight * drate;
        for (m, g) in grad.iter_mut().enumerate() {
            let dmag = -2.0 * (c.conj() * terms[m] * rot[m]).im;
            *g += scale * dmag;
        }
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::{generate_scenario, ScenarioConfig};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn scenario() -> Scenario {
        generate_scenario(3, &ScenarioConfig::default()).unwrap()
    }

    fn random_point(sc: &Scenario, rng: &mut ChaCha8Rng) -> DecisionPoint {
        let fs = sc.feasible_set();
        let mut draw = |b: &BoxBounds| -> Vec<f64> {
            b.lower.iter().zip(&b.upper).map(|(l, u)| rng.random_range(*l..=*u)).collect()
        };
        DecisionPoint::from_blocks(&[draw(&fs.phase), draw(&fs.position), draw(&fs.orientation)])
    }

    #[test]
    fn equal_rates_norm() {
        let r = 3.0e7;
        let n = p_norm(&[r; 10], -8.0).unwrap();
        assert_abs_diff_eq!(n, 10f64.powf(-1.0 / 8.0) * r, epsilon = 1e-12 * r);
        assert_abs_diff_eq!(10f64.powf(-1.0 / 8.0), 0.74989, epsilon = 1e-5);
    }

    #[test]
    fn norm_is_homogeneous_and_sandwiched() {
        let rates = [4.1e7, 2.2e7, 9.0e6, 5.5e7];
        let n = p_norm(&rates, -8.0).unwrap();
        let min = 9.0e6;
        assert!(n <= min && n >= 4f64.powf(-1.0 / 8.0) * min);
        let scaled: Vec<f64> = rates.iter().map(|r| r * 3.5).collect();
        assert_abs_diff_eq!(p_norm(&scaled, -8.0).unwrap(), 3.5 * n, epsilon = 1e-9 * n);
    }

    #[test]
    fn norm_tightens_as_exponent_decreases() {
        let rates = [4.1e7, 2.2e7, 9.0e6, 9.5e6, 5.5e7];
        let mut prev = 0.0;
        for p in [-8.0, -32.0, -128.0] {
            let n = p_norm(&rates, p).unwrap();
            assert!(n > prev && n <= 9.0e6);
            prev = n;
        }
        assert!((9.0e6 - prev) / 9.0e6 < 1e-2);
    }

    #[test]
    fn norm_rejects_non_positive_rates() {
        assert!(matches!(
            p_norm(&[1.0, 0.0], -8.0),
            Err(Error::NonPositiveRate { user: 1, .. })
        ));
        assert!(p_norm(&[1.0, -2.0], -8.0).is_err());
        assert!(p_norm(&[], -8.0).is_err());
    }

    #[test]
    fn fd_quadratic_toy() {
        let b = BoxBounds::uniform(2, -10.0, 10.0);
        let g = finite_difference(|v| Ok(v[0] * v[0] + v[1] * v[1]), &[1.0, 2.0], &b, 1e-4).unwrap();
        assert_abs_diff_eq!(g[0], 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(g[1], 4.0, epsilon = 1e-10);
    }

    #[test]
    fn fd_exact_on_quadratics_at_boundaries() {
        let b = BoxBounds::new(vec![0.0, -1.0, 0.0], vec![1.0, 1.0, 2.0]).unwrap();
        let f = |v: &[f64]| Ok(3.0 * v[0] * v[0] - 2.0 * v[0] * v[1] + v[1] * v[1] + 0.5 * v[2] * v[2] - v[2] + 4.0);
        for x in [[0.0, -1.0, 2.0], [1.0, 1.0, 0.0], [0.5, 0.2, 1.0], [0.99999, -0.99999, 1.99995]] {
            let g = finite_difference(f, &x, &b, 1e-4).unwrap();
            let exact = [6.0 * x[0] - 2.0 * x[1], -2.0 * x[0] + 2.0 * x[1], x[2] - 1.0];
            for i in 0..3 {
                assert_abs_diff_eq!(g[i], exact[i], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn fd_constant_is_zero() {
        let b = BoxBounds::uniform(3, 0.0, 1.0);
        let g = finite_difference(|_| Ok(7.0), &[0.0, 0.5, 1.0], &b, 1e-3).unwrap();
        assert_eq!(g, vec![0.0; 3]);
    }

    #[test]
    fn fd_degenerate_axis() {
        let b = BoxBounds::new(vec![1.0], vec![1.0]).unwrap();
        let g = finite_difference(|v| Ok(v[0] * 5.0), &[1.0], &b, 1e-3).unwrap();
        assert_eq!(g, vec![0.0]);
    }

    #[test]
    fn single_element_phase_gradient_vanishes() {
        let cfg = ScenarioConfig {
            ris_horizontal: 1,
            ris_vertical: 1,
            ..ScenarioConfig::default()
        };
        let sc = generate_scenario(5, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random_point(&sc, &mut rng);
        let g = analytic_phase_gradient(&x, &sc, &SmoothingParams::default()).unwrap();
        let f = smoothed_objective(&x, &sc, &SmoothingParams::default()).unwrap();
        assert!(g[0].abs() <= 1e-12 * f.abs());
    }

    #[test]
    fn aligned_single_user_is_stationary() {
        let cfg = ScenarioConfig {
            n_users: 1,
            ..ScenarioConfig::default()
        };
        let sc = generate_scenario(11, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut x = random_point(&sc, &mut rng);
        let ch = assemble_channels(&sc, &x.pose()).unwrap();
        x.phases = ch.aligning_phases(0);
        let sp = SmoothingParams::default();
        let g = analytic_phase_gradient(&x, &sc, &sp).unwrap();
        let f = smoothed_objective(&x, &sc, &sp).unwrap();
        let rel = g.iter().map(|v| v * v).sum::<f64>().sqrt() / f.abs();
        assert!(rel <= 1e-6, "normalized gradient {rel}");
    }

    #[test]
    fn analytic_matches_finite_difference() {
        let sc = scenario();
        let sp = SmoothingParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let x = random_point(&sc, &mut rng);
            let a = analytic_phase_gradient(&x, &sc, &sp).unwrap();
            let n = fd_gradient(&x, Block::Phase, &sc, &sp).unwrap();
            let err = a.iter().zip(&n).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
            let scale = a.iter().map(|p| p * p).sum::<f64>().sqrt();
            assert!(err <= 1e-5 * scale, "relative error {}", err / scale);
        }
    }

    #[test]
    fn rates_follow_user_permutation() {
        let sc = scenario();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = random_point(&sc, &mut rng);
        let rates = compute_rates(&x, &sc).unwrap();
        assert_eq!(rates.len(), 10);
        assert!(rates.iter().all(|r| *r > 0.0));
        let mut rev = sc.clone();
        rev.users.reverse();
        let mut rates_rev = compute_rates(&x, &rev).unwrap();
        rates_rev.reverse();
        assert_eq!(rates, rates_rev);
        let ch = assemble_channels(&sc, &x.pose()).unwrap();
        for (k, r) in rates.iter().enumerate() {
            assert_eq!(*r, crate::channel::user_rate(&ch, &x.phases, k, &sc.radio));
        }
    }

    #[test]
    fn unit_cube_round_trip() {
        let b = BoxBounds::new(vec![0.0, 150.0], vec![1000.0, 300.0]).unwrap();
        let x = [250.0, 225.0];
        let t = b.to_unit(&x);
        assert_eq!(t, vec![0.25, 0.5]);
        assert_eq!(b.from_unit(&t), x.to_vec());
        assert!(BoxBounds::new(vec![2.0], vec![1.0]).is_err());
    }
}
