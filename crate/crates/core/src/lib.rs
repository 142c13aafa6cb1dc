//! Holonomy and transgression of gerbes over finite-model orbifold groupoids.

pub mod deligne;
pub mod form;
pub mod group;
pub mod groupoid;
pub mod loopspace;
pub mod random;
pub mod report;
pub mod scalar;
pub mod sectors;
pub mod snf;
pub mod suites;
pub mod transgression;

pub use scalar::Scalar;
