//! Coordinate-frame math for the base-station array and the UAV-mounted RIS.
//!
//! The global frame is centred at the base-station antenna. The body frame
//! moves with the UAV; RIS element positions are given in it and mapped to
//! the global frame through the Euler rotation of the vehicle.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, TAU};

use crate::error::{Error, Result};

/// A point or offset in metres.
pub type Position3 = Vector3<f64>;

/// Euler orientation of the vehicle (XYZ convention), radians.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Orientation {
    pub roll: f64,
    pub pitch: f64,
    pub yaw: f64,
}

impl Orientation {
    pub const fn new(roll: f64, pitch: f64, yaw: f64) -> Self {
        Self { roll, pitch, yaw }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.roll, self.pitch, self.yaw]
    }

    /// Roll and pitch in `[0, π/2]`, yaw in `[0, 2π]`.
    ///
    /// Yaw is treated as closed at `2π`; the endpoint is the same physical
    /// heading as zero.
    pub fn is_feasible(self) -> bool {
        (0.0..=FRAC_PI_2).contains(&self.roll)
            && (0.0..=FRAC_PI_2).contains(&self.pitch)
            && (0.0..=TAU).contains(&self.yaw)
    }
}

/// Vertical linear antenna array at the base station.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BsArrayGeometry {
    pub n_elements: usize,
    /// Horizontal offset of the array from the reference point (d_H0).
    pub width: f64,
    /// Vertical element spacing (d_V0).
    pub spacing: f64,
    /// Global position of the base-station reference point.
    pub base: Position3,
}

impl BsArrayGeometry {
    pub fn validate(&self) -> Result<()> {
        if self.n_elements == 0 {
            return Err(Error::Config("BS array needs at least one element".into()));
        }
        if !(self.spacing > 0.0) || !self.width.is_finite() {
            return Err(Error::Config("BS element spacing must be positive".into()));
        }
        Ok(())
    }

    /// All element positions, `n = 1..=N`.
    pub fn element_positions(&self) -> Vec<Position3> {
        (1..=self.n_elements)
            .map(|n| element_at(self, n))
            .collect()
    }
}

/// Uniform rectangular RIS array of `n_horizontal × n_vertical` elements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RisArrayGeometry {
    pub n_horizontal: usize,
    pub n_vertical: usize,
    pub spacing_h: f64,
    pub spacing_v: f64,
}

impl RisArrayGeometry {
    pub fn len(&self) -> usize {
        self.n_horizontal * self.n_vertical
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::Config("RIS needs at least one element".into()));
        }
        if !(self.spacing_h > 0.0 && self.spacing_v > 0.0) {
            return Err(Error::Config("RIS element spacings must be positive".into()));
        }
        Ok(())
    }

    /// Body-frame positions of all elements, `m = 1..=M`.
    pub fn body_positions(&self) -> Vec<Position3> {
        (1..=self.len()).map(|m| ris_body_at(self, m)).collect()
    }
}

/// Body-to-global rotation for the XYZ Euler convention.
pub fn rotation_matrix(o: &Orientation) -> Matrix3<f64> {
    let (sf, cf) = o.roll.sin_cos();
    let (st, ct) = o.pitch.sin_cos();
    let (sp, cp) = o.yaw.sin_cos();
    Matrix3::new(
        ct * cp,
        -ct * sp,
        st,
        cf * sp + cp * sf * st,
        cf * cp - sf * st * sp,
        -ct * sf,
        sf * sp - cf * cp * st,
        cp * sf + cf * st * sp,
        cf * ct,
    )
}

fn element_at(g: &BsArrayGeometry, n: usize) -> Position3 {
    Position3::new(g.width, 0.0, (n - 1) as f64 * g.spacing)
}

// The divisor uses the vertical count and the modulus the horizontal count.
// For the 5×4 layout this still yields 20 distinct positions.
fn ris_body_at(g: &RisArrayGeometry, m: usize) -> Position3 {
    let i = m - 1;
    Position3::new(
        (i / g.n_vertical) as f64 * g.spacing_v,
        (i % g.n_horizontal) as f64 * g.spacing_h,
        0.0,
    )
}

/// Position of base-station element `n` (1-based) relative to the array reference.
pub fn bs_element_position(n: usize, g: &BsArrayGeometry) -> Result<Position3> {
    if n == 0 || n > g.n_elements {
        return Err(Error::IndexOutOfRange {
            index: n,
            len: g.n_elements,
        });
    }
    Ok(element_at(g, n))
}

/// Body-frame position of RIS element `m` (1-based).
pub fn ris_element_body_position(m: usize, g: &RisArrayGeometry) -> Result<Position3> {
    if m == 0 || m > g.len() {
        return Err(Error::IndexOutOfRange {
            index: m,
            len: g.len(),
        });
    }
    Ok(ris_body_at(g, m))
}

/// Offsets of every RIS element from the first one, expressed in the global frame.
pub fn ris_global_offsets(g: &RisArrayGeometry, o: &Orientation) -> Vec<Position3> {
    let r = rotation_matrix(o);
    let body = g.body_positions();
    let first = body[0];
    body.iter().map(|p| r * (p - first)).collect()
}

/// Elevation/azimuth pair of a propagation direction, radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkAngles {
    pub elevation: f64,
    pub azimuth: f64,
}

impl LinkAngles {
    /// Unit vector `[cosθ cosξ, cosθ sinξ, sinθ]`.
    pub fn direction(&self) -> Vector3<f64> {
        let (se, ce) = self.elevation.sin_cos();
        let (sa, ca) = self.azimuth.sin_cos();
        Vector3::new(ce * ca, ce * sa, se)
    }
}

/// Angles of the unit vector pointing from `from` to `to`.
///
/// Vertical links have no defined azimuth; it is reported as 0.
pub fn link_angles(from: &Position3, to: &Position3) -> Result<LinkAngles> {
    let d = to - from;
    let horizontal = d.x.hypot(d.y);
    if horizontal == 0.0 && d.z == 0.0 {
        return Err(Error::DegenerateLink("endpoints coincide"));
    }
    // atan2 form of arcsin(dz/|d|); keeps full precision near the poles.
    let elevation = d.z.atan2(horizontal);
    let azimuth = if horizontal == 0.0 { 0.0 } else { d.y.atan2(d.x) };
    Ok(LinkAngles { elevation, azimuth })
}

/// Component-wise mean of a set of points.
pub fn barycenter(points: &[Position3]) -> Result<Position3> {
    if points.is_empty() {
        return Err(Error::EmptyUsers);
    }
    let sum = points.iter().fold(Position3::zeros(), |acc, p| acc + p);
    Ok(sum / points.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn reference_ris() -> RisArrayGeometry {
        RisArrayGeometry {
            n_horizontal: 5,
            n_vertical: 4,
            spacing_h: 0.075,
            spacing_v: 0.075,
        }
    }

    fn bs() -> BsArrayGeometry {
        BsArrayGeometry {
            n_elements: 10,
            width: 0.075,
            spacing: 0.075,
            base: Position3::new(0.0, 0.0, 68.0),
        }
    }

    #[test]
    fn zero_orientation_is_identity() {
        assert_eq!(rotation_matrix(&Orientation::default()), Matrix3::identity());
    }

    #[test]
    fn quarter_yaw_matrix() {
        let r = rotation_matrix(&Orientation::new(0.0, 0.0, FRAC_PI_2));
        let expected = Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0);
        assert_abs_diff_eq!(r, expected, epsilon = 1e-15);
    }

    #[test]
    fn bs_positions() {
        assert_eq!(
            bs_element_position(1, &bs()).unwrap(),
            Position3::new(0.075, 0.0, 0.0)
        );
        assert_abs_diff_eq!(bs_element_position(3, &bs()).unwrap().z, 0.15, epsilon = 1e-15);
        let all = bs().element_positions();
        for w in all.windows(2) {
            let d = w[1] - w[0];
            assert_eq!(d.x, 0.0);
            assert_eq!(d.y, 0.0);
            assert_abs_diff_eq!(d.z, 0.075, epsilon = 1e-15);
        }
        assert!(matches!(
            bs_element_position(11, &bs()),
            Err(Error::IndexOutOfRange { index: 11, len: 10 })
        ));
        assert!(bs_element_position(0, &bs()).is_err());
    }

    #[test]
    fn ris_body_positions() {
        let g = reference_ris();
        assert_eq!(ris_element_body_position(1, &g).unwrap(), Position3::zeros());
        assert_eq!(
            ris_element_body_position(2, &g).unwrap(),
            Position3::new(0.0, 0.075, 0.0)
        );
        assert_eq!(
            ris_element_body_position(6, &g).unwrap(),
            Position3::new(0.075, 0.0, 0.0)
        );
        assert!(ris_element_body_position(21, &g).is_err());
    }

    #[test]
    fn reference_layout_positions_are_distinct() {
        let pos = reference_ris().body_positions();
        assert_eq!(pos.len(), 20);
        for i in 0..pos.len() {
            for j in (i + 1)..pos.len() {
                assert!((pos[i] - pos[j]).norm() > 1e-9, "{i} and {j} collide");
            }
        }
    }

    #[test]
    fn bs_positions_are_distinct() {
        let pos = bs().element_positions();
        for i in 0..pos.len() {
            for j in (i + 1)..pos.len() {
                assert_ne!(pos[i], pos[j]);
            }
        }
    }

    #[test]
    fn offsets_under_identity_equal_body_positions() {
        let g = reference_ris();
        assert_eq!(ris_global_offsets(&g, &Orientation::default()), g.body_positions());
    }

    #[test]
    fn quarter_yaw_rotates_y_offset_onto_negative_x() {
        let g = reference_ris();
        let off = ris_global_offsets(&g, &Orientation::new(0.0, 0.0, FRAC_PI_2));
        // element 2 sits at [0, d, 0] in the body frame
        assert_abs_diff_eq!(off[1], Position3::new(-0.075, 0.0, 0.0), epsilon = 1e-15);
        assert_eq!(off[0], Position3::zeros());
    }

    #[test]
    fn link_angle_examples() {
        let o = Position3::zeros();
        let a = link_angles(&o, &Position3::new(1.0, 0.0, 0.0)).unwrap();
        assert_eq!((a.elevation, a.azimuth), (0.0, 0.0));

        let a = link_angles(&o, &Position3::new(0.0, 0.0, 1.0)).unwrap();
        assert_abs_diff_eq!(a.elevation, FRAC_PI_2, epsilon = 1e-15);
        assert_eq!(a.azimuth, 0.0);

        let a = link_angles(&o, &Position3::new(0.0, 0.0, -3.0)).unwrap();
        assert_abs_diff_eq!(a.elevation, -FRAC_PI_2, epsilon = 1e-15);
        assert_eq!(a.azimuth, 0.0);

        let a = link_angles(&o, &Position3::new(1.0, 1.0, 2f64.sqrt())).unwrap();
        assert_abs_diff_eq!(a.elevation, FRAC_PI_4, epsilon = 1e-15);
        assert_abs_diff_eq!(a.azimuth, FRAC_PI_4, epsilon = 1e-15);

        let a = link_angles(&o, &Position3::new(-1.0, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(a.azimuth, PI, epsilon = 1e-15);

        assert!(matches!(link_angles(&o, &o), Err(Error::DegenerateLink(_))));
    }

    #[test]
    fn barycenter_examples() {
        assert_eq!(barycenter(&[Position3::zeros()]).unwrap(), Position3::zeros());
        let pts = [Position3::zeros(), Position3::new(2.0, 4.0, 0.0)];
        assert_eq!(barycenter(&pts).unwrap(), Position3::new(1.0, 2.0, 0.0));
        let rev = [pts[1], pts[0]];
        assert_eq!(barycenter(&rev).unwrap(), barycenter(&pts).unwrap());
        assert!(matches!(barycenter(&[]), Err(Error::EmptyUsers)));
    }

    #[test]
    fn feasibility_box() {
        assert!(Orientation::new(0.0, FRAC_PI_2, TAU).is_feasible());
        assert!(!Orientation::new(-0.1, 0.0, 0.0).is_feasible());
        assert!(!Orientation::new(0.0, 1.6, 0.0).is_feasible());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn orientation() -> impl Strategy<Value = Orientation> {
            (0.0..=FRAC_PI_2, 0.0..=FRAC_PI_2, 0.0..TAU)
                .prop_map(|(r, p, y)| Orientation::new(r, p, y))
        }

        proptest! {
            #[test]
            fn rotation_is_proper_orthonormal(o in orientation()) {
                let r = rotation_matrix(&o);
                let err = (r.transpose() * r - Matrix3::identity()).abs().max();
                prop_assert!(err <= 1e-12);
                prop_assert!((r.determinant() - 1.0).abs() <= 1e-12);
            }

            #[test]
            fn offsets_preserve_distances(o in orientation()) {
                let g = reference_ris();
                let body = g.body_positions();
                let off = ris_global_offsets(&g, &o);
                for i in 0..body.len() {
                    for j in 0..body.len() {
                        let a = (body[i] - body[j]).norm();
                        let b = (off[i] - off[j]).norm();
                        prop_assert!((a - b).abs() <= 1e-12);
                    }
                }
            }

            #[test]
            fn angles_round_trip(
                from in prop::array::uniform3(-500.0..500.0f64),
                to in prop::array::uniform3(-500.0..500.0f64),
            ) {
                let f = Position3::from(from);
                let t = Position3::from(to);
                prop_assume!((t - f).norm() > 1e-6);
                let dir = link_angles(&f, &t).unwrap().direction();
                let expected = (t - f).normalize();
                prop_assert!((dir - expected).abs().max() <= 1e-12);
            }
        }
    }
}
