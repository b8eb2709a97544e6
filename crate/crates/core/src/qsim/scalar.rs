use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar underlying state amplitudes.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Debug + Display + Send + Sync + 'static
{
    /// Slack allowed on algebraic identities (norms, traces, Hermiticity).
    fn identity_tolerance() -> Self;

    fn of(value: f64) -> Self {
        Self::from_f64(value).expect("scalar conversion")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar conversion")
    }
}

impl Real for f64 {
    fn identity_tolerance() -> Self {
        1e-10
    }
}

impl Real for f32 {
    fn identity_tolerance() -> Self {
        1e-4
    }
}
