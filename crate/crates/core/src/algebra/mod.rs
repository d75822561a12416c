//! Exact arithmetic on the polynomial quantum torus.

mod gauss;
mod matrix;
mod phase;
mod poly;
mod twist;

pub use gauss::{parse_rational, rational_to_string, GaussRational};
pub use matrix::PolyMatrix;
pub use phase::{PhaseCoeff, PhaseMonomial};
pub use poly::{numeric_slot_angles, Exponent, NumVec, TwistedPoly};
pub use twist::TwistMatrix;
