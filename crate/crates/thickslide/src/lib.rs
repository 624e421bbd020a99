//! System files, paving documents, SVG rendering and the command-line
//! tool built on `thickslide-core`.

pub mod check;
pub mod cli;
pub mod json;
pub mod parallel;
pub mod svg;
pub mod system;

pub use thickslide_core as core;
