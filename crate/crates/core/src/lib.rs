//! Monocular localization on a LiDAR-fused visual prior map.
//!
//! The pipeline has two halves. Offline, LiDAR scans are registered with
//! two-stage GICP to produce pose priors and a voxelized structure map;
//! a geometry-aware bundle adjustment then fuses visual feature tracks
//! with structure and prior-pose constraints into a metrically scaled
//! feature map. Online, a camera stream is localized against the frozen
//! map by hierarchical relocalization plus lightweight per-frame tracking.
//!
//! Module layout mirrors the pipeline stages:
//! - [`geometry`]: rigid transforms, projection, trajectory metrics
//! - [`spatial`]: k-d tree nearest-neighbor index
//! - [`registration`]: point covariances, GICP, prior generation
//! - [`voxel`]: occupancy voxel map and DDA ray tracing
//! - [`features`]: feature extraction providers, matching, LK optical flow
//! - [`mapper`]: keyframes, triangulation, GABA, map serialization
//! - [`localizer`]: relocalization, frame tracking, pose-only refinement
//! - [`synth`]: deterministic synthetic worlds for verification
//! - [`config`]: run configuration file handling

pub mod config;
pub mod features;
pub mod geometry;
pub mod localizer;
pub mod mapper;
pub mod registration;
pub mod spatial;
pub mod synth;
pub mod voxel;
