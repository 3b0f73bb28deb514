//! Seeded spherical graph-cut segmentation of blob-like objects in 3D volumes.
//!
//! A single seed point inside the object is the center of a subdivided
//! icosahedron. Rays are cast through its vertices, nodes are sampled along
//! every ray, and a directed graph is built whose minimum-cost closed set
//! (found with an s-t minimum cut) selects exactly one boundary node per
//! ray. The boundary is then voxelized into a binary mask.
//!
//! The pipeline is split into modules that can be used on their own:
//!
//! - [`volume`]: scalar volumes and masks, NIfTI-1 / RVOL I/O, trilinear
//!   sampling, slice rendering.
//! - [`spheremesh`]: icosphere generation, ray adjacency, direction lookup.
//! - [`graphbuild`]: ray sampling, node costs, flow network assembly.
//! - [`maxflow`]: Boykov-Kolmogorov max-flow plus a brute-force oracle.
//! - [`segmenter`]: the end-to-end pipeline and voxelization.
//! - [`evalkit`]: Dice coefficient, volumes, phantoms, summary tables.
//!
//! ```no_run
//! use spherecut::evalkit::{make_phantom, PhantomSpec};
//! use spherecut::segmenter::segment;
//! use spherecut::graphbuild::SegmentationParams;
//!
//! let (vol, truth) = make_phantom(&PhantomSpec::sphere(20.0)).unwrap();
//! let result = segment(&vol, vol.center(), &SegmentationParams::default()).unwrap();
//! let dsc = spherecut::evalkit::dice(&result.mask, &truth).unwrap();
//! println!("DSC = {dsc:.4}");
//! ```

pub mod error;
pub mod evalkit;
pub mod geom;
pub mod graphbuild;
pub mod maxflow;
pub mod segmenter;
pub mod spheremesh;
pub mod volume;

pub use error::{Error, Result};
pub use geom::WorldPoint;
