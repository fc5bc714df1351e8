use nalgebra::{Matrix3, Quaternion, UnitQuaternion, Vector3, Vector6};

use super::GeometryError;

/// Rigid transform in SE(3), stored as a unit quaternion plus translation.
///
/// Quaternions are kept in canonical form (scalar part >= 0) so that
/// residuals built from quaternion differences are sign-stable, and are
/// renormalized on every construction and composition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    rotation: UnitQuaternion<f64>,
    translation: Vector3<f64>,
}

impl Pose {
    pub fn identity() -> Self {
        Self {
            rotation: UnitQuaternion::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn new(rotation: UnitQuaternion<f64>, translation: Vector3<f64>) -> Self {
        Self {
            rotation: canonicalize(rotation),
            translation,
        }
    }

    /// Builds a pose from a raw quaternion (w, x, y, z); the quaternion is
    /// normalized before use.
    pub fn from_wxyz(w: f64, x: f64, y: f64, z: f64, translation: Vector3<f64>) -> Self {
        let q = UnitQuaternion::from_quaternion(Quaternion::new(w, x, y, z));
        Self::new(q, translation)
    }

    pub fn from_axis_angle(axis: &Vector3<f64>, angle: f64, translation: Vector3<f64>) -> Self {
        let q = UnitQuaternion::from_axis_angle(&nalgebra::Unit::new_normalize(*axis), angle);
        Self::new(q, translation)
    }

    pub fn rotation(&self) -> UnitQuaternion<f64> {
        self.rotation
    }

    pub fn rotation_matrix(&self) -> Matrix3<f64> {
        self.rotation.to_rotation_matrix().into_inner()
    }

    pub fn translation(&self) -> Vector3<f64> {
        self.translation
    }

    /// Applies the transform to a point: `R * p + t`.
    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    /// Rotates a vector without translating it.
    pub fn rotate_vector(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * v
    }

    pub fn compose(&self, other: &Pose) -> Pose {
        Pose::new(
            self.rotation * other.rotation,
            self.rotation * other.translation + self.translation,
        )
    }

    pub fn inverse(&self) -> Pose {
        let inv_rot = self.rotation.inverse();
        Pose::new(inv_rot, -(inv_rot * self.translation))
    }

    /// Rotation angle of `self^-1 * other` in radians.
    pub fn rotation_angle_to(&self, other: &Pose) -> f64 {
        self.rotation.angle_to(&other.rotation)
    }

    /// Translation distance to another pose in meters.
    pub fn translation_distance_to(&self, other: &Pose) -> f64 {
        (self.translation - other.translation).norm()
    }

    pub fn is_finite(&self) -> bool {
        self.translation.iter().all(|v| v.is_finite())
            && self.rotation.coords.iter().all(|v| v.is_finite())
    }
}

impl Default for Pose {
    fn default() -> Self {
        Self::identity()
    }
}

fn canonicalize(q: UnitQuaternion<f64>) -> UnitQuaternion<f64> {
    let q = UnitQuaternion::from_quaternion(q.into_inner());
    if q.w < 0.0 {
        UnitQuaternion::new_unchecked(-q.into_inner())
    } else {
        q
    }
}

/// Spherical linear interpolation between two unit quaternions.
///
/// Hemisphere-corrected: `q1` is negated when `dot(q0, q1) < 0` so the
/// interpolation follows the shortest great-circle arc. Falls back to
/// normalized linear interpolation when the quaternions are nearly equal.
pub fn slerp(q0: &UnitQuaternion<f64>, q1: &UnitQuaternion<f64>, s: f64) -> UnitQuaternion<f64> {
    let a = q0.into_inner();
    let mut b = q1.into_inner();
    let mut dot = a.dot(&b);
    if dot < 0.0 {
        b = -b;
        dot = -dot;
    }
    if dot > 1.0 - 1e-12 {
        let lerped = a * (1.0 - s) + b * s;
        return canonicalize(UnitQuaternion::from_quaternion(lerped));
    }
    let theta = dot.clamp(-1.0, 1.0).acos();
    let sin_theta = theta.sin();
    let w0 = ((1.0 - s) * theta).sin() / sin_theta;
    let w1 = (s * theta).sin() / sin_theta;
    canonicalize(UnitQuaternion::from_quaternion(a * w0 + b * w1))
}

/// Interpolates a pose at time `tk` between `(tl, pose_l)` and `(tr, pose_r)`
/// with ratio `s = (tk - tl) / (tr - tl)`: linear in translation, slerp in
/// rotation.
pub fn interpolate_pose(
    pose_l: &Pose,
    pose_r: &Pose,
    tl: f64,
    tr: f64,
    tk: f64,
) -> Result<Pose, GeometryError> {
    if tr - tl < 1e-9 {
        return Err(GeometryError::DegenerateInterval { tl, tr });
    }
    if tk < tl || tk > tr {
        return Err(GeometryError::OutOfRange { tk, tl, tr });
    }
    let s = (tk - tl) / (tr - tl);
    // Endpoints returned exactly so prior trajectories sampled at scan
    // times reproduce the scan poses bit-for-bit.
    if s == 0.0 {
        return Ok(*pose_l);
    }
    if s == 1.0 {
        return Ok(*pose_r);
    }
    let t = pose_l.translation() * (1.0 - s) + pose_r.translation() * s;
    let q = slerp(&pose_l.rotation(), &pose_r.rotation(), s);
    Ok(Pose::new(q, t))
}

/// Six-dimensional pose difference `[t_bar - t; 2 * vec(q^-1 * q_bar)]`.
///
/// The quaternion product is hemisphere-corrected (scalar part >= 0) before
/// taking its vector part, so the rotational slot is continuous around the
/// identity and approaches the rotation vector for small angles.
pub fn pose_error(pose: &Pose, pose_bar: &Pose) -> Vector6<f64> {
    let dt = pose_bar.translation() - pose.translation();
    let mut dq = (pose.rotation().inverse() * pose_bar.rotation()).into_inner();
    if dq.w < 0.0 {
        dq = -dq;
    }
    Vector6::new(dt.x, dt.y, dt.z, 2.0 * dq.i, 2.0 * dq.j, 2.0 * dq.k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_unit_quaternion(rng: &mut impl Rng) -> UnitQuaternion<f64> {
        let q = Quaternion::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        UnitQuaternion::from_quaternion(q)
    }

    fn random_pose(rng: &mut impl Rng) -> Pose {
        Pose::new(
            random_unit_quaternion(rng),
            Vector3::new(
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
            ),
        )
    }

    #[test]
    fn quaternion_normalized_after_construction() {
        let pose = Pose::from_wxyz(2.0, 1.0, -0.5, 0.25, Vector3::zeros());
        assert!((pose.rotation().norm() - 1.0).abs() < 1e-9);
        assert!(pose.rotation().w >= 0.0);
    }

    #[test]
    fn compose_with_inverse_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let pose = random_pose(&mut rng);
            let ident = pose.compose(&pose.inverse());
            assert!(ident.translation().norm() < 1e-9);
            assert!(ident.rotation().angle() < 1e-9);
        }
    }

    #[test]
    fn slerp_endpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let q0 = random_unit_quaternion(&mut rng);
        let q1 = random_unit_quaternion(&mut rng);
        assert!(slerp(&q0, &q1, 0.0).angle_to(&q0) < 1e-9);
        assert!(slerp(&q0, &q1, 1.0).angle_to(&q1) < 1e-9);
    }

    #[test]
    fn slerp_half_of_quarter_turn() {
        let q0 = UnitQuaternion::identity();
        let q1 = UnitQuaternion::from_axis_angle(&Vector3::z_axis(), std::f64::consts::FRAC_PI_2);
        let mid = slerp(&q0, &q1, 0.5);
        let (axis, angle) = mid.axis_angle().expect("non-identity rotation");
        assert_relative_eq!(angle, std::f64::consts::FRAC_PI_4, epsilon = 1e-12);
        assert_relative_eq!(axis.z, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn slerp_angle_is_proportional() {
        // Interpolated rotation angle from q0 must equal s times the total
        // angle along the shortest arc.
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..1000 {
            let q0 = random_unit_quaternion(&mut rng);
            let q1 = random_unit_quaternion(&mut rng);
            let s: f64 = rng.gen_range(0.0..1.0);
            let total = q0.angle_to(&q1);
            let partial = q0.angle_to(&slerp(&q0, &q1, s));
            assert!(
                (partial - s * total).abs() < 1e-9,
                "partial {partial} != {s} * {total}"
            );
        }
    }

    #[test]
    fn interpolate_endpoints_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let a = random_pose(&mut rng);
        let b = random_pose(&mut rng);
        let at_l = interpolate_pose(&a, &b, 1.0, 2.0, 1.0).unwrap();
        let at_r = interpolate_pose(&a, &b, 1.0, 2.0, 2.0).unwrap();
        assert_eq!(at_l, a);
        assert_eq!(at_r, b);
    }

    #[test]
    fn interpolate_midpoint_analytic() {
        let a = Pose::identity();
        let b = Pose::from_axis_angle(
            &Vector3::z(),
            60f64.to_radians(),
            Vector3::new(2.0, 0.0, 0.0),
        );
        let mid = interpolate_pose(&a, &b, 0.0, 1.0, 0.5).unwrap();
        assert_relative_eq!(mid.translation().x, 1.0, epsilon = 1e-12);
        assert_relative_eq!(mid.rotation().angle(), 30f64.to_radians(), epsilon = 1e-12);
    }

    #[test]
    fn interpolate_rejects_bad_intervals() {
        let a = Pose::identity();
        assert!(matches!(
            interpolate_pose(&a, &a, 0.0, 1.0, 1.5),
            Err(GeometryError::OutOfRange { .. })
        ));
        assert!(matches!(
            interpolate_pose(&a, &a, 1.0, 1.0, 1.0),
            Err(GeometryError::DegenerateInterval { .. })
        ));
    }

    #[test]
    fn pose_error_zero_at_equal_poses() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let pose = random_pose(&mut rng);
        assert!(pose_error(&pose, &pose).norm() < 1e-12);
    }

    #[test]
    fn pose_error_pure_translation() {
        let a = Pose::identity();
        let b = Pose::new(UnitQuaternion::identity(), Vector3::new(1.0, 2.0, 3.0));
        let e = pose_error(&a, &b);
        assert_relative_eq!(e[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(e[1], 2.0, epsilon = 1e-12);
        assert_relative_eq!(e[2], 3.0, epsilon = 1e-12);
        assert!(e.fixed_rows::<3>(3).norm() < 1e-12);
    }

    #[test]
    fn pose_error_pure_rotation_half_angle_vector() {
        // theta = 0.2 rad about x: rotational slot is 2*sin(theta/2) along x.
        let a = Pose::identity();
        let b = Pose::from_axis_angle(&Vector3::x(), 0.2, Vector3::zeros());
        let e = pose_error(&a, &b);
        assert!(e.fixed_rows::<3>(0).norm() < 1e-12);
        assert_relative_eq!(e[3], 2.0 * (0.1f64).sin(), epsilon = 1e-12);
        assert!(e[4].abs() < 1e-12 && e[5].abs() < 1e-12);
    }

    #[test]
    fn pose_error_is_locally_continuous() {
        // Finite-difference bound: perturbing the target pose by eps moves
        // the error norm by at most c * eps for small eps.
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let pose = random_pose(&mut rng);
            let base = pose_error(&pose, &pose).norm();
            let eps = 1e-6;
            let axis = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen(), rng.gen());
            let delta = Pose::from_axis_angle(&axis, eps, Vector3::new(eps, 0.0, 0.0));
            let perturbed = pose.compose(&delta);
            let moved = pose_error(&pose, &perturbed).norm();
            assert!((moved - base).abs() <= 4.0 * eps, "moved {moved}, base {base}");
        }
    }
}
