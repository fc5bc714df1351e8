use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use nalgebra::{Matrix3, Vector3};

use super::{GeometryError, Pose};

/// Default timestamp association tolerance: half of a 10 Hz frame period.
pub const DEFAULT_ASSOC_TOLERANCE: f64 = 0.02;

/// Time-ordered pose sequence with strictly increasing timestamps.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    entries: Vec<(f64, Pose)>,
}

impl Trajectory {
    pub fn new(entries: Vec<(f64, Pose)>) -> Result<Self, GeometryError> {
        let mut traj = Trajectory::default();
        for (t, pose) in entries {
            traj.push(t, pose)?;
        }
        Ok(traj)
    }

    pub fn push(&mut self, t: f64, pose: Pose) -> Result<(), GeometryError> {
        if let Some(&(last, _)) = self.entries.last() {
            if t <= last {
                return Err(GeometryError::NonIncreasingTimestamps {
                    index: self.entries.len(),
                    t,
                });
            }
        }
        self.entries.push((t, pose));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(f64, Pose)> {
        self.entries.iter()
    }

    pub fn get(&self, i: usize) -> Option<&(f64, Pose)> {
        self.entries.get(i)
    }

    pub fn timestamps(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|(t, _)| *t)
    }

    pub fn first_time(&self) -> Option<f64> {
        self.entries.first().map(|(t, _)| *t)
    }

    pub fn last_time(&self) -> Option<f64> {
        self.entries.last().map(|(t, _)| *t)
    }

    /// Interpolates a pose at time `t` between the bracketing entries.
    pub fn sample(&self, t: f64) -> Result<Pose, GeometryError> {
        let first = self.first_time().ok_or(GeometryError::NoAssociations)?;
        let last = self.last_time().unwrap();
        if t < first || t > last {
            return Err(GeometryError::OutOfRange {
                tk: t,
                tl: first,
                tr: last,
            });
        }
        let idx = self
            .entries
            .partition_point(|(ti, _)| *ti <= t)
            .saturating_sub(1);
        let (tl, pl) = self.entries[idx];
        if t == tl {
            return Ok(pl);
        }
        let (tr, pr) = self.entries[idx + 1];
        super::interpolate_pose(&pl, &pr, tl, tr, t)
    }

    /// Index of the entry whose timestamp is nearest to `t` within `tol`.
    pub fn nearest_within(&self, t: f64, tol: f64) -> Option<usize> {
        if self.entries.is_empty() {
            return None;
        }
        let idx = self.entries.partition_point(|(ti, _)| *ti < t);
        let mut best: Option<(usize, f64)> = None;
        for cand in [idx.wrapping_sub(1), idx] {
            if let Some(&(ti, _)) = self.entries.get(cand) {
                let dt = (ti - t).abs();
                if dt <= tol && best.map_or(true, |(_, b)| dt < b) {
                    best = Some((cand, dt));
                }
            }
        }
        best.map(|(i, _)| i)
    }

    /// Reads the TUM trajectory format: one `timestamp tx ty tz qx qy qz qw`
    /// line per pose, `#` comments allowed.
    pub fn read_tum<R: Read>(reader: R) -> Result<Self, GeometryError> {
        let mut traj = Trajectory::default();
        for (lineno, line) in BufReader::new(reader).lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<f64> = trimmed
                .split_whitespace()
                .map(|s| s.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| GeometryError::Parse {
                    line: lineno + 1,
                    msg: e.to_string(),
                })?;
            if fields.len() != 8 {
                return Err(GeometryError::Parse {
                    line: lineno + 1,
                    msg: format!("expected 8 fields, got {}", fields.len()),
                });
            }
            let pose = Pose::from_wxyz(
                fields[7],
                fields[4],
                fields[5],
                fields[6],
                Vector3::new(fields[1], fields[2], fields[3]),
            );
            traj.push(fields[0], pose)?;
        }
        Ok(traj)
    }

    pub fn write_tum<W: Write>(&self, mut writer: W) -> Result<(), GeometryError> {
        writeln!(writer, "# timestamp tx ty tz qx qy qz qw")?;
        for (t, pose) in &self.entries {
            let tr = pose.translation();
            let q = pose.rotation();
            writeln!(
                writer,
                "{t:.9} {:.9} {:.9} {:.9} {:.9} {:.9} {:.9} {:.9}",
                tr.x, tr.y, tr.z, q.i, q.j, q.k, q.w
            )?;
        }
        Ok(())
    }

    pub fn load_tum(path: &Path) -> Result<Self, GeometryError> {
        Self::read_tum(std::fs::File::open(path)?)
    }

    pub fn save_tum(&self, path: &Path) -> Result<(), GeometryError> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_tum(&mut file)
    }
}

/// Least-squares SE(3) alignment (no scale) mapping `est` positions onto
/// `ref` positions, associated by nearest timestamp.
///
/// SVD-based with determinant correction. Fails when fewer than three pairs
/// associate or the pair positions are collinear.
pub fn umeyama_se3(est: &Trajectory, reference: &Trajectory) -> Result<Pose, GeometryError> {
    let pairs = associate(est, reference, DEFAULT_ASSOC_TOLERANCE);
    let est_pts: Vec<Vector3<f64>> = pairs
        .iter()
        .map(|&(i, _)| est.entries[i].1.translation())
        .collect();
    let ref_pts: Vec<Vector3<f64>> = pairs
        .iter()
        .map(|&(_, j)| reference.entries[j].1.translation())
        .collect();
    umeyama_se3_points(&est_pts, &ref_pts)
}

/// Point-set flavor of [`umeyama_se3`] on pre-associated positions.
pub fn umeyama_se3_points(
    est: &[Vector3<f64>],
    reference: &[Vector3<f64>],
) -> Result<Pose, GeometryError> {
    if est.len() != reference.len() {
        return Err(GeometryError::Degenerate(format!(
            "position count mismatch: {} vs {}",
            est.len(),
            reference.len()
        )));
    }
    if est.len() < 3 {
        return Err(GeometryError::Degenerate(format!(
            "need at least 3 pairs, got {}",
            est.len()
        )));
    }
    let n = est.len() as f64;
    let mu_est: Vector3<f64> = est.iter().sum::<Vector3<f64>>() / n;
    let mu_ref: Vector3<f64> = reference.iter().sum::<Vector3<f64>>() / n;

    let mut cross = Matrix3::<f64>::zeros();
    for (pe, pr) in est.iter().zip(reference) {
        cross += (pr - mu_ref) * (pe - mu_est).transpose();
    }
    cross /= n;

    let svd = cross.svd(true, true);
    let u = svd.u.ok_or_else(|| GeometryError::Degenerate("svd failed".into()))?;
    let v_t = svd
        .v_t
        .ok_or_else(|| GeometryError::Degenerate("svd failed".into()))?;
    // Rotation is unrecoverable when the positions span less than a plane.
    if svd.singular_values[1] < 1e-12 * svd.singular_values[0].max(1e-300) {
        return Err(GeometryError::Degenerate(
            "rank-deficient cross-covariance (collinear positions)".into(),
        ));
    }
    let mut s = Matrix3::identity();
    if (u * v_t).determinant() < 0.0 {
        s[(2, 2)] = -1.0;
    }
    let rot = u * s * v_t;
    let q = nalgebra::UnitQuaternion::from_matrix(&rot);
    let t = mu_ref - rot * mu_est;
    Ok(Pose::new(q, t))
}

fn associate(est: &Trajectory, reference: &Trajectory, tol: f64) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for (i, (t, _)) in est.entries.iter().enumerate() {
        if let Some(j) = reference.nearest_within(*t, tol) {
            pairs.push((i, j));
        }
    }
    pairs
}

/// Trajectory error metrics after SE(3) alignment.
#[derive(Debug, Clone)]
pub struct TrajectoryMetrics {
    pub ape_trans_mean: f64,
    pub ape_trans_rmse: f64,
    pub ape_rot_mean_deg: f64,
    pub ape_rot_rmse_deg: f64,
    pub rpe_trans_mean: f64,
    /// Per-associated-frame series: (timestamp, APE translation m, APE rotation deg).
    pub per_frame: Vec<(f64, f64, f64)>,
}

/// Absolute and relative pose error of `est` against `reference`.
///
/// Trajectories are associated by nearest timestamp within `tol`, aligned
/// with [`umeyama_se3`], then compared frame by frame; RPE is computed over
/// consecutive associated frames (alignment cancels there).
pub fn ape_rpe(
    est: &Trajectory,
    reference: &Trajectory,
    tol: f64,
) -> Result<TrajectoryMetrics, GeometryError> {
    let pairs = associate(est, reference, tol);
    if pairs.is_empty() {
        return Err(GeometryError::NoAssociations);
    }
    let est_pts: Vec<Vector3<f64>> = pairs
        .iter()
        .map(|&(i, _)| est.entries[i].1.translation())
        .collect();
    let ref_pts: Vec<Vector3<f64>> = pairs
        .iter()
        .map(|&(_, j)| reference.entries[j].1.translation())
        .collect();
    let alignment = umeyama_se3_points(&est_pts, &ref_pts)?;

    let mut per_frame = Vec::with_capacity(pairs.len());
    let mut sum_t = 0.0;
    let mut sum_t2 = 0.0;
    let mut sum_r = 0.0;
    let mut sum_r2 = 0.0;
    let mut aligned = Vec::with_capacity(pairs.len());
    for &(i, j) in &pairs {
        let (t, est_pose) = est.entries[i];
        let ref_pose = reference.entries[j].1;
        let est_aligned = alignment.compose(&est_pose);
        let dt = (ref_pose.translation() - est_aligned.translation()).norm();
        let dr = ref_pose.rotation_angle_to(&est_aligned).to_degrees();
        sum_t += dt;
        sum_t2 += dt * dt;
        sum_r += dr;
        sum_r2 += dr * dr;
        per_frame.push((t, dt, dr));
        aligned.push((est_aligned, ref_pose));
    }
    let n = pairs.len() as f64;

    let mut rpe_sum = 0.0;
    let mut rpe_n = 0usize;
    for window in aligned.windows(2) {
        let (est_a, ref_a) = window[0];
        let (est_b, ref_b) = window[1];
        let d_ref = ref_a.inverse().compose(&ref_b);
        let d_est = est_a.inverse().compose(&est_b);
        rpe_sum += d_ref.inverse().compose(&d_est).translation().norm();
        rpe_n += 1;
    }

    Ok(TrajectoryMetrics {
        ape_trans_mean: sum_t / n,
        ape_trans_rmse: (sum_t2 / n).sqrt(),
        ape_rot_mean_deg: sum_r / n,
        ape_rot_rmse_deg: (sum_r2 / n).sqrt(),
        rpe_trans_mean: if rpe_n > 0 { rpe_sum / rpe_n as f64 } else { 0.0 },
        per_frame,
    })
}
