//! Developing-map engine: straight-line flow, visibility, saddle
//! connections, distances, geodesic checks and tightening.

pub(crate) mod visibility;
mod saddle;

pub use saddle::{enumerate_saddle_connections, enumerate_with_budget, SaddleCatalog, SaddleConnection, DEFAULT_WINDOW_BUDGET};
pub(crate) mod ray;

pub use ray::{develop_ray, RaySegment, Terminal, Trajectory};
mod geodesic;

pub use geodesic::{
    distance, distance_to_singularities, gromov_product, is_local_geodesic, junction_ok, side_angles, AngleCheck, GeodesicCheck, GeodesicPath, Leg,
    Waypoint,
};
pub(crate) use geodesic::{angle_tolerance, distances_from};
mod tighten;

pub use tighten::{tighten, tighten_closed, PiecewisePath, Tightened};
mod connector;

pub use connector::{
    chain_path, closed_chain_path, connector_in_catalog, connector_search, max_connector_excess, ConnectorReport,
    DEFAULT_NODE_BUDGET,
};
