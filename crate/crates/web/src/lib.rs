//! wasm-bindgen bindings for the browser demo in `www/`.
//!
//! Each export has a plain Rust counterpart returning a serializable struct,
//! so the logic is testable natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use omniris::channel::{assemble_channels, max_single_user_snr, Pose};
use omniris::geometry::{ris_global_offsets, Orientation, Position3};
use omniris::schemes::{
    generate_scenario, run_scheme, RunSettings, Scenario, ScenarioConfig, SchemeKind, SchemeSettings, SchemeSpec,
};

#[derive(Debug, Clone, Serialize)]
pub struct SceneView {
    pub area: [f64; 2],
    pub bs: [f64; 3],
    pub users: Vec<[f64; 3]>,
    pub z_range: [f64; 2],
}

/// Upper bound on the minimum user rate over a horizontal slice, row-major
/// with `ny` rows of `nx` cells.
#[derive(Debug, Clone, Serialize)]
pub struct RateMap {
    pub nx: usize,
    pub ny: usize,
    pub x_range: [f64; 2],
    pub y_range: [f64; 2],
    pub altitude: f64,
    pub mbps: Vec<f64>,
    pub best: [f64; 3],
    pub best_mbps: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizeView {
    pub scheme: String,
    pub min_rate_mbps: Vec<f64>,
    pub avg_rate_mbps: Vec<f64>,
    pub path: Vec<[f64; 3]>,
    pub orientation: [f64; 3],
}

#[derive(Debug, Clone, Serialize)]
pub struct RisLayout {
    pub elements: Vec<[f64; 3]>,
    pub normal: [f64; 3],
}

fn arr(p: &Position3) -> [f64; 3] {
    [p.x, p.y, p.z]
}

fn scenario_for(seed: u64) -> Result<Scenario, String> {
    generate_scenario(seed, &ScenarioConfig::default()).map_err(|e| e.to_string())
}

pub fn scene_view(seed: u64) -> Result<SceneView, String> {
    let sc = scenario_for(seed)?;
    Ok(SceneView {
        area: sc.area,
        bs: arr(&sc.bs.base),
        users: sc.users.iter().map(arr).collect(),
        z_range: sc.altitude_range(),
    })
}

pub fn rate_map_view(seed: u64, altitude: f64, resolution: usize) -> Result<RateMap, String> {
    let sc = scenario_for(seed)?;
    if !(2..=200).contains(&resolution) {
        return Err("resolution must lie in 2..=200".into());
    }
    let [z0, z1] = sc.altitude_range();
    if !(z0..=z1).contains(&altitude) {
        return Err(format!("altitude must lie in [{z0}, {z1}]"));
    }
    let (xr, yr) = ([sc.position_box.lower[0], sc.position_box.upper[0]], [sc.position_box.lower[1], sc.position_box.upper[1]]);
    let (m, n) = (sc.ris.len(), sc.bs.n_elements);
    let mut mbps = Vec::with_capacity(resolution * resolution);
    let (mut best, mut best_mbps) = ([0.0; 3], f64::NEG_INFINITY);
    for j in 0..resolution {
        let y = yr[0] + (yr[1] - yr[0]) * (j as f64 + 0.5) / resolution as f64;
        for i in 0..resolution {
            let x = xr[0] + (xr[1] - xr[0]) * (i as f64 + 0.5) / resolution as f64;
            let pose = Pose {
                position: Position3::new(x, y, altitude),
                orientation: Orientation::default(),
            };
            let ch = assemble_channels(&sc, &pose).map_err(|e| e.to_string())?;
            let worst = ch
                .d_rk
                .iter()
                .map(|&d| sc.radio.rate_from_snr(max_single_user_snr(&sc.radio, m, n, ch.d_br, d)))
                .fold(f64::INFINITY, f64::min)
                / 1e6;
            if worst > best_mbps {
                best_mbps = worst;
                best = [x, y, altitude];
            }
            mbps.push(worst);
        }
    }
    Ok(RateMap {
        nx: resolution,
        ny: resolution,
        x_range: xr,
        y_range: yr,
        altitude,
        mbps,
        best,
        best_mbps,
    })
}

pub fn optimize_view(seed: u64, scheme: &str, iterations: usize) -> Result<OptimizeView, String> {
    let kind: SchemeKind = scheme.parse().map_err(|e: omniris::Error| e.to_string())?;
    if iterations == 0 || iterations > 1000 {
        return Err("iterations must lie in 1..=1000".into());
    }
    let sc = scenario_for(seed)?;
    let mut settings = RunSettings::default();
    settings.solver.max_iters = iterations;
    settings.starts = 1;
    let spec = SchemeSpec::new(kind, &SchemeSettings::default());
    // PO hovers at a fixed altitude here instead of waiting for a PLO run
    let altitude = Some(SchemeSettings::default().po_fallback_altitude);
    let run = run_scheme(&spec, &sc, seed, &settings, altitude).map_err(|e| e.to_string())?;
    let path = run
        .trace
        .records
        .iter()
        .map(|r| [r.point[1][0], r.point[1][1], r.point[1][2]])
        .collect();
    Ok(OptimizeView {
        scheme: kind.name().into(),
        min_rate_mbps: run.min_rates.iter().map(|r| r / 1e6).collect(),
        avg_rate_mbps: run.avg_rates.iter().map(|r| r / 1e6).collect(),
        path,
        orientation: run.final_point.orientation.to_array(),
    })
}

pub fn ris_layout_view(roll: f64, pitch: f64, yaw: f64) -> RisLayout {
    let sc = ScenarioConfig::default();
    let g = omniris::geometry::RisArrayGeometry {
        n_horizontal: sc.ris_horizontal,
        n_vertical: sc.ris_vertical,
        spacing_h: sc.ris_spacing_h_wavelengths * sc.wavelength,
        spacing_v: sc.ris_spacing_v_wavelengths * sc.wavelength,
    };
    let o = Orientation::new(roll, pitch, yaw);
    let normal = omniris::geometry::rotation_matrix(&o) * Position3::new(0.0, 0.0, 1.0);
    RisLayout {
        elements: ris_global_offsets(&g, &o).iter().map(arr).collect(),
        normal: arr(&normal),
    }
}

fn to_js<T: Serialize>(v: Result<T, String>) -> Result<JsValue, JsError> {
    let v = v.map_err(|e| JsError::new(&e))?;
    serde_wasm_bindgen::to_value(&v).map_err(|e| JsError::new(&e.to_string()))
}

/// Base station and user positions for a seed.
#[wasm_bindgen]
pub fn scene(seed: u32) -> Result<JsValue, JsError> {
    to_js(scene_view(seed as u64))
}

/// Heatmap of the best achievable minimum rate at a given altitude.
#[wasm_bindgen(js_name = rateMap)]
pub fn rate_map(seed: u32, altitude: f64, resolution: usize) -> Result<JsValue, JsError> {
    to_js(rate_map_view(seed as u64, altitude, resolution))
}

/// Run one scheme and return its rate curve and flight path.
#[wasm_bindgen]
pub fn optimize(seed: u32, scheme: &str, iterations: usize) -> Result<JsValue, JsError> {
    to_js(optimize_view(seed as u64, scheme, iterations))
}

/// RIS element offsets from the UAV center for an orientation in radians.
#[wasm_bindgen(js_name = risLayout)]
pub fn ris_layout(roll: f64, pitch: f64, yaw: f64) -> Result<JsValue, JsError> {
    to_js(Ok(ris_layout_view(roll, pitch, yaw)))
}
