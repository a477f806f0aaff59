//! Zero-curvature hyper-ideal metrics on triangulated closed pseudo
//! 3-manifolds via the extended combinatorial Ricci flow, together with
//! numerical checks of the scalar bounds that keep the flow in a compact
//! window.

pub mod bounds;
pub mod cli;
pub mod flow;
pub mod functional;
pub mod io;
pub mod metric;
pub mod tetra;
pub mod triangulation;

pub use metric::{Metric, MetricError};
pub use triangulation::{FaceGluing, Triangulation, TriangulationError};
