//! Warping functions: family specifications, validation, and tabulated profiles.

mod profile;
mod spec;

pub(crate) use profile::closed_h;
pub use profile::{ProfileRange, WarpProfile, DEFAULT_EXTENT_FACTOR, DEFAULT_RESOLUTION, MIN_RESOLUTION};
pub use spec::{
    ss_discriminant, ConstraintCheck, DomainEndpoints, Endpoint, Family, Fiber, ManifoldSpec, ValidatedSpec,
};
