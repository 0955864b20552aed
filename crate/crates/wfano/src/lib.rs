//! Exact rational computations for quasi-smooth weighted hypersurfaces:
//! weighted projective spaces, standard weighted blowups, strict
//! transforms, two dimensional Okounkov bodies, flag moment integrals and
//! rule-traced lower bounds on stability thresholds.

#![allow(clippy::needless_range_loop)]

pub mod blowup;
pub mod certify;
pub mod convex;
pub mod error;
pub mod lemmas;
pub mod moments;
pub mod poly;
pub mod rat;
pub mod report;
pub mod snf;
pub mod upoly;
pub mod wps;

pub use error::{Error, Result};
pub use rat::Q;
