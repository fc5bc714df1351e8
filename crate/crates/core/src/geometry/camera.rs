use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};

use super::{GeometryError, Pose};

/// Near-plane cutoff for projection, in meters.
pub const Z_MIN: f64 = 1e-3;

/// Pinhole camera intrinsics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Intrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
}

impl Intrinsics {
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64, width: u32, height: u32) -> Self {
        assert!(fx > 0.0 && fy > 0.0, "focal lengths must be positive");
        assert!(cx >= 0.0 && cx < width as f64, "cx out of image bounds");
        assert!(cy >= 0.0 && cy < height as f64, "cy out of image bounds");
        Self {
            fx,
            fy,
            cx,
            cy,
            width,
            height,
        }
    }

    /// Projects a world point through `pose` (camera-to-world): the point is
    /// first brought into the camera frame with `pose^-1` and then mapped by
    /// the pinhole model.
    pub fn project(&self, pose: &Pose, point: &Vector3<f64>) -> Result<Vector2<f64>, GeometryError> {
        let p_cam = pose.inverse().transform_point(point);
        self.project_camera_point(&p_cam)
    }

    /// Projects a point already expressed in the camera frame.
    pub fn project_camera_point(&self, p_cam: &Vector3<f64>) -> Result<Vector2<f64>, GeometryError> {
        if p_cam.z <= Z_MIN {
            return Err(GeometryError::BehindCamera { z: p_cam.z });
        }
        Ok(Vector2::new(
            self.fx * p_cam.x / p_cam.z + self.cx,
            self.fy * p_cam.y / p_cam.z + self.cy,
        ))
    }

    /// Back-projects a pixel at the given depth into the world frame.
    pub fn unproject(&self, pose: &Pose, pixel: &Vector2<f64>, depth: f64) -> Vector3<f64> {
        let ray = Vector3::new(
            (pixel.x - self.cx) / self.fx,
            (pixel.y - self.cy) / self.fy,
            1.0,
        );
        pose.transform_point(&(ray * depth))
    }

    /// Unit bearing vector in the camera frame for a pixel.
    pub fn bearing(&self, pixel: &Vector2<f64>) -> Vector3<f64> {
        Vector3::new(
            (pixel.x - self.cx) / self.fx,
            (pixel.y - self.cy) / self.fy,
            1.0,
        )
        .normalize()
    }

    pub fn contains(&self, pixel: &Vector2<f64>) -> bool {
        pixel.x >= 0.0
            && pixel.y >= 0.0
            && pixel.x < self.width as f64
            && pixel.y < self.height as f64
    }
}
