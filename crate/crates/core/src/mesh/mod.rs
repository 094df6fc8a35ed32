//! Uniform Cartesian grids for finite volumes and mapped curvilinear meshes
//! for the DGSEM.

mod cartesian;
mod curvilinear;

pub use cartesian::CartesianGrid;
pub use curvilinear::{warped_square, Boundary, CurvilinearMesh, Face};
