//! Radial pseudospectral solver for the focusing inhomogeneous biharmonic
//! Schrödinger equation and its Choquard variant.

// `!(x > 0.0)` is how NaN gets rejected along with the out-of-range values;
// small dense solves read better with explicit indices.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod diagnostics;
pub mod error;
pub mod evolution;
pub mod functionals;
pub mod ground_state;
pub mod problem;
pub mod radial;
pub mod special;

pub use error::{Error, Result};
pub use problem::{Family, ProblemSpec};
pub use radial::{Field, RadialPlan, Space};
