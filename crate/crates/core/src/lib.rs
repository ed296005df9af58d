//! Particle simulation of shear-thickening fluids.
//!
//! A double-density SPH fluid is coupled to a dynamic spring network whose
//! stiffness grows with a truncated fractional derivative of the relative
//! motion of the connected particles. Recent fast deformation therefore
//! stiffens the material, and the stiffening fades as that motion leaves the
//! memory window.

pub mod bench;
pub mod frackernel;
pub mod output;
pub mod probe;
pub mod scenario;
pub mod sph;
pub mod springs;
pub mod world;

/// Position/velocity vector of a `D`-dimensional simulation.
pub type Vector<const D: usize> = nalgebra::SVector<f64, D>;

/// Index of the vertical (gravity) axis.
pub const VERTICAL: usize = 1;

pub use bench::{bench, BenchRow};
pub use frackernel::{frac_deriv, gamma, weight_p0, FracWeights, KernelError, VelocityHistory};
pub use sph::{FluidParams, NeighborList, Particle, SpatialHash};
pub use springs::{Spring, SpringNetwork, SpringParams};
pub use world::{Container, RigidSphere, StepError, StepReport, Vibration, VibrationSource, World};
pub use output::{run, FrameRecord, MetricsRow, RunError, RunOptions};
pub use probe::{probe, ProbeConfig, ProbeTable, VelocityProgram};
pub use scenario::{parse_scenario, preset, Scenario, ScenarioError};
