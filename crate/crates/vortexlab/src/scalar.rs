use num_traits::{Float, FloatConst, FromPrimitive};
use std::fmt::Debug;

/// Floating point type accepted by the generic parts of the crate.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Send + Sync + 'static {
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }
}

impl<T> Real for T where T: Float + FloatConst + FromPrimitive + Debug + Send + Sync + 'static {}
