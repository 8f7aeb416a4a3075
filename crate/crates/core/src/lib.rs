//! Kinetic-energy geometry of the Möbius actions of the split unitary groups
//! `O₀(n,n)`, `SU(n,n)` and `Sp(n,n)` on `SOₙ`, `Uₙ` and `Spₙ`.

pub mod action;
pub mod error;
pub mod geodesic;
pub mod groups;
pub mod lowdim;
pub mod matrices;
pub mod metric;
pub mod scalars;

#[cfg(test)]
mod testing;

pub use action::MobiusElement;
pub use error::{Error, Result};
pub use geodesic::{ArcLength, Chart, KineticGeometry, Trajectory, TrajectoryPoint};
pub use groups::{Embedding, GroupId, Kind};
pub use lowdim::{DefectSpec, Diagram, DiagramReport, GeodesicDefect, SplitQuaternion};
pub use matrices::Mat;
pub use metric::{MetricValue, QuadratureMode, QuadratureSpec, SampleSet};
pub use scalars::{Field, Quat, Scalar};
