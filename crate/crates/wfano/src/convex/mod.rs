//! Exact planar convex geometry: polygons, sliced bodies, barycenter
//! bounds, Zariski decompositions and the Okounkov bodies of a few
//! explicit surface flags.

pub mod gravity;
pub mod okounkov;
pub mod polygon;
pub mod sliced;
pub mod surface;
pub mod zariski;

pub use gravity::{gravity_bounds, GravityBounds, GravityInput};
pub use okounkov::{okounkov_body_surface, OkounkovBody, SurfaceCase};
pub use polygon::{Point, RationalPolygon};
pub use sliced::{AffinePiece, SlicedBody};
pub use surface::{delta_lower_gravity, delta_surface_bounds, SurfaceBounds, SurfaceLocalData};
pub use zariski::{zariski_decompose, CurveModel, ZariskiDecomposition};
