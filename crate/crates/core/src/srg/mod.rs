//! Scaled relative graphs of complex matrices.
//!
//! For a unit vector `u` the SRG point of `M` is `Re(u^* M u) + j sqrt(|Mu|^2 -
//! Re(u^* M u)^2)`, i.e. gain `|Mu|` at the angle between `Mu` and `u`, together
//! with its conjugate. Clouds are sampled over directions modulo global phase
//! and over-approximated by disks, convex hulls or chord closures.

mod cloud;
mod region;
mod sampler;

pub use cloud::{srg_point, srg_points, SampleKind, SrgCloud, SrgSampler, ZERO_OUTPUT};
pub(crate) use cloud::fmt_f64;
pub use region::{
    boundary_cloud, chord_closure, densify_chords, disk_approx, disk_of_points, hull_approx, invert_cloud,
    invert_point, invert_region, negate_region, phase_boundary, scale_region, union_regions, Inverted, SrgRegion,
    DISK_INFLATION, ZERO_TOLERANCE,
};
pub use sampler::{adapted_directions, DirectionSet, SamplerConfig};
