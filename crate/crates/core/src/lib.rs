//! Numerical toolkit for surfaces that are minimal for the weighted area
//! `int e^phi dA`, where `phi` depends on the height only.
//!
//! Such surfaces satisfy `H = -phi'(mu) eta`, with `mu` the height and
//! `eta` the vertical component of the unit normal. The crate constructs
//! them by shooting (profiles) and Newton iteration (graphs), and audits
//! the differential identities, the stability operator and several
//! geometric estimates they satisfy.
//!
//! Everything is generic over the scalar type through [`Real`]; the `F64`
//! aliases at the crate root name the common double-precision instances.

pub mod error;
pub mod estimates;
pub mod ilmanen;
pub mod linalg;
pub mod potential;
pub mod scalar;
pub mod solvers;
pub mod stability;
pub mod surface;

pub use error::{Error, Result};
pub use scalar::Real;

pub type PotentialSpecF64 = potential::PotentialSpec<f64>;
pub type PotentialEvalF64 = potential::PotentialEval<f64>;
pub type ConditionReportF64 = potential::ConditionReport<f64>;
pub type FrameQuantitiesF64 = ilmanen::FrameQuantities<f64>;
pub type ProfileCurveF64 = surface::ProfileCurve<f64>;
pub type GraphPatchF64 = surface::GraphPatch<f64>;
pub type SurfaceF64 = surface::Surface<f64>;
pub type GeometryFieldF64 = surface::GeometryField<f64>;
pub type ResidualReportF64 = surface::ResidualReport<f64>;
pub type SolveResultF64 = solvers::SolveResult<f64>;
pub type SpectrumResultF64 = stability::SpectrumResult<f64>;
pub type StabilityAssemblyF64 = stability::StabilityAssembly<f64>;

pub type PotentialSpecF32 = potential::PotentialSpec<f32>;
pub type GeometryFieldF32 = surface::GeometryField<f32>;
