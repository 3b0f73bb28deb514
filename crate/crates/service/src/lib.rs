//! Command-line tool and HTTP service for [`spherecut`] segmentation.

pub mod cli;
pub mod rle;
pub mod server;
