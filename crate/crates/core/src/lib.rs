//! Density bounds for packings of congruent cylinders.
//!
//! The crate builds Dirichlet slices of cylinder packings, checks the
//! pointwise area floor that drives the bounds, verifies the extremal
//! computations behind that floor by optimization, and evaluates the
//! closed-form density bounds.

pub mod bounds;
pub mod error;
pub mod extremal;
pub mod geometry;
pub mod montecarlo;
pub mod packing;
pub mod quadrature;
pub mod slice;
pub mod verify;

pub use bounds::{
    capped_bound, conjectured_density, dominance_check, make_table, mixed_length_bound, rule_of_thumb,
    uncapped_bound, BoundParams, BoundResult, Shape, TableRow,
};
pub use error::{Error, Result};
pub use extremal::{min_total_area, piece_area, three_ball_min_radius};
pub use geometry::{
    parabola_segment_area, plane_frame, point_segment_distance, segment_segment_distance, PlaneFrame, Point3,
    Segment, Vec3,
};
pub use montecarlo::{mc_volume, Aabb, VolumeEstimate};
pub use packing::{
    density, gen_hexagonal_parallel, gen_laminated_perturbed, is_valid_packing, nest_capped, read_packing,
    restrict, write_packing, CylinderSpec, Packing,
};
pub use slice::{
    axis_measures, cell_volume_identity, certified_bound_for_packing, end_ball_axis_length,
    equidistant_angle_max, has_end_near, is_qualified, slice_area, slice_radius, truncate_rearrange,
    AxisMeasure, DirichletSlice, SliceConfig,
};
