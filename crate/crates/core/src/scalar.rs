//! Scalar traits used by the sparse kernels, assembly and Krylov solvers.
//!
//! Sparse algebra (transpose, products, Galerkin triple products) only needs
//! field operations, so it is written against [`Scalar`] and also works with
//! exact rationals. Anything that takes norms or square roots needs [`Real`].

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, Num, NumAssign, ToPrimitive};

/// Field element usable in sparse matrix algebra.
pub trait Scalar: Copy + Num + NumAssign + Debug + Send + Sync + 'static {}

impl<T> Scalar for T where T: Copy + Num + NumAssign + Debug + Send + Sync + 'static {}

/// Floating-point scalar for assembly and iterative solvers.
pub trait Real: Scalar + Float + FromPrimitive + ToPrimitive + Sum + Display + LowerExp {
    /// Converts an `f64` coefficient, panicking only for non-representable values.
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 value not representable in target scalar")
    }

    /// Machine epsilon as `f64`, for tolerance arithmetic.
    #[inline]
    fn eps_f64() -> f64 {
        Self::epsilon().to_f64().unwrap_or(f64::EPSILON)
    }
}

impl Real for f32 {}
impl Real for f64 {}
