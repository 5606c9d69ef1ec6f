//! On-disk formats: `.npy` arrays, label files, model directories.

pub mod labels;
pub mod model;
pub mod npy;
