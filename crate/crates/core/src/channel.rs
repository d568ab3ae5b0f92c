//! Line-of-sight channel model: steering vectors, path coefficients, the
//! BS→RIS and RIS→user channels, MRT beamforming and per-user rates.

use nalgebra::{DMatrix, DVector, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::geometry::{link_angles, ris_global_offsets, LinkAngles, Orientation, Position3};
use crate::schemes::Scenario;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

/// Radio constants, all in linear units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    pub wavelength: f64,
    /// Path gain at 1 m.
    pub ref_gain: f64,
    pub tx_power: f64,
    pub antenna_gain: f64,
    pub noise_power: f64,
    pub bandwidth: f64,
}

impl RadioParams {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.wavelength,
            self.ref_gain,
            self.tx_power,
            self.antenna_gain,
            self.noise_power,
            self.bandwidth,
        ];
        if all.iter().all(|v| v.is_finite() && *v > 0.0) {
            Ok(())
        } else {
            Err(Error::Config("radio parameters must be finite and positive".into()))
        }
    }

    /// `P0·G_A/σ²`, the factor multiplying `|cascade|²` in the SNR.
    pub fn snr_scale(&self) -> f64 {
        self.tx_power * self.antenna_gain / self.noise_power
    }

    /// Shannon rate in bit/s for a given SNR.
    pub fn rate_from_snr(&self, snr: f64) -> f64 {
        self.bandwidth * snr.ln_1p() / std::f64::consts::LN_2
    }
}

/// RIS phase shifts, radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseConfig(pub Vec<f64>);

impl PhaseConfig {
    pub fn zeros(m: usize) -> Self {
        Self(vec![0.0; m])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_feasible(&self) -> bool {
        self.0.iter().all(|t| (0.0..=TAU).contains(t))
    }

    /// Diagonal of the reflection matrix, `e^{jθ_m}`.
    pub fn reflection(&self) -> Vec<Complex64> {
        self.0.iter().map(|&t| Complex64::cis(t)).collect()
    }
}

/// Wave vector `(2π/λ)·[cosθ cosξ, cosθ sinξ, sinθ]`, rad/m.
pub fn wave_vector(elevation: f64, azimuth: f64, wavelength: f64) -> Vector3<f64> {
    LinkAngles { elevation, azimuth }.direction() * (TAU / wavelength)
}

/// Steering vector with entries `exp(j s·p_i)`.
pub fn array_response(positions: &[Position3], angles: LinkAngles, wavelength: f64) -> DVector<Complex64> {
    let s = wave_vector(angles.elevation, angles.azimuth, wavelength);
    DVector::from_iterator(
        positions.len(),
        positions.iter().map(|p| Complex64::cis(s.dot(p))),
    )
}

/// Free-space coefficient `√β0/d · e^{-j2πd/λ}`.
pub fn path_coefficient(distance: f64, wavelength: f64, ref_gain: f64) -> Result<Complex64> {
    if !(distance > 0.0) {
        return Err(Error::NonPositiveDistance(distance));
    }
    Ok(Complex64::from_polar(
        ref_gain.sqrt() / distance,
        -TAU * distance / wavelength,
    ))
}

/// UAV decision state that the channel depends on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: Position3,
    pub orientation: Orientation,
}

/// Everything about the propagation environment at one pose. Rates need a
/// phase configuration and are computed on demand.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    pub d_br: f64,
    pub d_rk: Vec<f64>,
    /// Departure angles at the BS; also the arrival angles at the RIS.
    pub bs_ris: LinkAngles,
    pub ris_user: Vec<LinkAngles>,
    /// BS→RIS channel, `M × N`.
    pub h: DMatrix<Complex64>,
    /// RIS→user channels, one `M`-vector per user.
    pub g: Vec<DVector<Complex64>>,
    /// Unit-norm MRT beamformer.
    pub f: DVector<Complex64>,
    /// Per-user, per-element cascade terms `g_k[m]·(H f)[m]`.
    cascade_terms: Vec<DVector<Complex64>>,
}

pub fn assemble_channels(scenario: &Scenario, pose: &Pose) -> Result<ChannelRealization> {
    let lambda = scenario.radio.wavelength;
    let beta = scenario.radio.ref_gain;
    let p_b = scenario.bs.base;
    let p_r = pose.position;

    let bs_ris = link_angles(&p_b, &p_r).map_err(|_| Error::DegenerateLink("RIS at base station"))?;
    let d_br = (p_r - p_b).norm();
    let eta_br = path_coefficient(d_br, lambda, beta)?;

    let bs_positions = scenario.bs.element_positions();
    let offsets = ris_global_offsets(&scenario.ris, &pose.orientation);

    let a_tx_b = array_response(&bs_positions, bs_ris, lambda);
    let a_rx_r = array_response(&offsets, bs_ris, lambda);
    let h = (&a_rx_r * a_tx_b.adjoint()) * eta_br;
    let f = &a_tx_b / Complex64::from(a_tx_b.norm());
    let hf = &h * &f;

    let k = scenario.users.len();
    let mut d_rk = Vec::with_capacity(k);
    let mut ris_user = Vec::with_capacity(k);
    let mut g = Vec::with_capacity(k);
    let mut cascade_terms = Vec::with_capacity(k);
    for user in &scenario.users {
        let angles = link_angles(&p_r, user).map_err(|_| Error::DegenerateLink("RIS at user"))?;
        let d = (user - p_r).norm();
        let eta = path_coefficient(d, lambda, beta)?;
        let gk = array_response(&offsets, angles, lambda).map(|a| a.conj() * eta);
        cascade_terms.push(gk.component_mul(&hf));
        d_rk.push(d);
        ris_user.push(angles);
        g.push(gk);
    }

    Ok(ChannelRealization {
        d_br,
        d_rk,
        bs_ris,
        ris_user,
        h,
        g,
        f,
        cascade_terms,
    })
}

impl ChannelRealization {
    pub fn n_users(&self) -> usize {
        self.g.len()
    }

    /// Terms `v_{k,m}` such that the cascade scalar is `Σ_m v_{k,m} e^{jθ_m}`.
    pub fn cascade_terms(&self, k: usize) -> &DVector<Complex64> {
        &self.cascade_terms[k]
    }

    /// `g_kᵀ M_Θ H f`.
    pub fn cascade(&self, phases: &PhaseConfig, k: usize) -> Complex64 {
        self.cascade_terms[k]
            .iter()
            .zip(&phases.0)
            .map(|(v, &t)| v * Complex64::cis(t))
            .sum()
    }

    pub fn snr(&self, phases: &PhaseConfig, k: usize, radio: &RadioParams) -> f64 {
        radio.snr_scale() * self.cascade(phases, k).norm_sqr()
    }

    pub fn rates(&self, phases: &PhaseConfig, radio: &RadioParams) -> Vec<f64> {
        (0..self.n_users())
            .map(|k| user_rate(self, phases, k, radio))
            .collect()
    }

    /// Upper bound on `|cascade|` for user `k`, reached when all element
    /// terms are co-phased: `β0·M·√N/(d_BR·d_Rk)`.
    pub fn aligned_cascade_magnitude(&self, k: usize) -> f64 {
        self.cascade_terms[k].iter().map(|v| v.norm()).sum()
    }

    /// Phases that co-phase every element term of user `k`, wrapped to `[0, 2π)`.
    pub fn aligning_phases(&self, k: usize) -> PhaseConfig {
        PhaseConfig(
            self.cascade_terms[k]
                .iter()
                .map(|v| (-v.arg()).rem_euclid(TAU))
                .collect(),
        )
    }
}

/// Achievable rate of user `k` in bit/s.
pub fn user_rate(ch: &ChannelRealization, phases: &PhaseConfig, k: usize, radio: &RadioParams) -> f64 {
    radio.rate_from_snr(ch.snr(phases, k, radio))
}

/// Closed-form maximum single-user SNR, `P0·G_A·β0²·M²·N/(d_BR²·d_Rk²·σ²)`.
pub fn max_single_user_snr(radio: &RadioParams, m: usize, n: usize, d_br: f64, d_rk: f64) -> f64 {
    let num = radio.tx_power * radio.antenna_gain * radio.ref_gain.powi(2) * (m * m * n) as f64;
    num / (d_br.powi(2) * d_rk.powi(2) * radio.noise_power)
}
