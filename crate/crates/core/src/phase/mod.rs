//! Value types shared by every module: frames, grids, tomograms, metrics,
//! line integrals, tomogram families and file formats.

pub mod family;
pub mod frame;
pub mod grid;
pub mod io;
pub mod metrics;
pub mod radon;
pub mod tomogram;

pub use family::{characteristic, CharacteristicTable, NuSlices};
pub use frame::TomographyFrame;
pub use grid::{GridFunction2D, UniformGrid};
pub use metrics::tomogram_distance_l1;
pub use tomogram::{DeltaAtom, Tomogram};
