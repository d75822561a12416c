//! Factor systems `(ℋ, γ, ω)` of free toral actions: construction from
//! cleft isometries, the axioms, conjugacy, `β`-transforms and gauge
//! unitaries.

mod family;
mod morphism;
mod system;
mod verify;

pub use family::Family;
pub use morphism::{AlgebraMorphism, Morphism};
pub use system::{coefficient, frohlich, isotypic_mul, realize, FactorSystem, IsometryFamily};
pub use verify::{verify_axioms, verify_conjugacy, verify_gauge_unitary, GammaCache};
pub(crate) use verify::evaluation_failure;
