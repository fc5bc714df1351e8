//! Rigid-body math shared by every pipeline stage: poses, quaternion
//! interpolation, pinhole projection and trajectory evaluation.

mod camera;
mod pose;
mod trajectory;

pub use camera::Intrinsics;
pub use pose::{interpolate_pose, pose_error, slerp, Pose};
pub use trajectory::{
    ape_rpe, umeyama_se3, TrajectoryMetrics, Trajectory, DEFAULT_ASSOC_TOLERANCE,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("interpolation time {tk} outside [{tl}, {tr}]")]
    OutOfRange { tk: f64, tl: f64, tr: f64 },
    #[error("interpolation interval [{tl}, {tr}] is degenerate")]
    DegenerateInterval { tl: f64, tr: f64 },
    #[error("point behind camera (z = {z:.6} m)")]
    BehindCamera { z: f64 },
    #[error("degenerate alignment problem: {0}")]
    Degenerate(String),
    #[error("no timestamp associations between trajectories")]
    NoAssociations,
    #[error("trajectory timestamps must be strictly increasing (t[{index}] = {t})")]
    NonIncreasingTimestamps { index: usize, t: f64 },
    #[error("trajectory io: {0}")]
    Io(#[from] std::io::Error),
    #[error("trajectory parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
