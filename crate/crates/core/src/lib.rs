//! Numerical laboratory for Hardy inequalities and Schrödinger perturbations
//! of symmetric transition densities.
//!
//! The building blocks are: adaptive quadrature over `(0,∞)` and radial
//! integrals on `ℝ^d` ([`quadrature`]), gamma-function constants ([`special`]),
//! transition-density evaluators ([`kernels`]), supermedian functions `h` and
//! Hardy weights `q` ([`supermedian`]), the discretized perturbation series
//! ([`perturbation`]), quadratic forms and the Hardy verification harness
//! ([`forms`]), and the weak-scaling toolkit ([`scaling`]).
//!
//! All numerics are generic over the scalar type via [`Real`]; `f64` is the
//! type every tolerance in this crate is calibrated for.

pub mod error;
pub mod forms;
pub mod kernels;
pub mod perturbation;
pub mod quadrature;
pub mod scaling;
pub mod special;
pub mod supermedian;

pub use error::{Error, Result};

use std::fmt::{Debug, Display};
use std::ops::{AddAssign, MulAssign, SubAssign};

/// Scalar type for all numerics: `f32` or `f64`.
///
/// Constants are stored as `f64` literals and converted on use, so `f32`
/// instantiations are well-defined but the default tolerances assume `f64`.
pub trait Real:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal converts to Real")
    }

    /// Lossy conversion to `f64`, for diagnostics and serialization.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("Real converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Concrete aliases for the common double-precision instantiation.
pub type QuadratureConfig64 = quadrature::QuadratureConfig<f64>;
pub type IntegralResult64 = quadrature::IntegralResult<f64>;
pub type Kernel64 = kernels::Kernel<f64>;
pub type TimeWeight64 = supermedian::TimeWeight<f64>;
pub type AtomicMeasure64 = supermedian::AtomicMeasure<f64>;
pub type SupermedianPair64 = supermedian::SupermedianPair<f64>;
pub type TestFunction64 = forms::TestFunction<f64>;
pub type HardyReport64 = forms::HardyReport;
pub type ScalingProfile64 = scaling::ScalingProfile<f64>;
pub type SpaceTimeGrid64 = perturbation::SpaceTimeGrid<f64>;
pub type PerturbationSeries64 = perturbation::PerturbationSeries<f64>;
