//! Std companion to `cineloop-core`: file formats (.flo, PNG, GIF), the
//! frame-parallel rendering driver, the bundled synthetic scene, the ablation
//! harness, and the command-line interface.

pub mod cli;
pub mod eval;
pub mod flo;
pub mod gifio;
pub mod pngio;
pub mod render;
pub mod scene;
pub mod viz;
