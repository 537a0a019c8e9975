//! Minkowski billiards in convex bodies: shortest generalized closed
//! polylines, billiard trajectories, Hanner polytopes.

pub mod billiard;
pub mod body;
pub mod error;
pub mod fit;
pub mod hanner;
pub mod polytope;
pub mod random;
pub mod scalar;
pub mod special;
pub mod verify;
pub mod xi;

pub use body::{ConvexBody, SupportFace};
pub use error::{BilliardError, GeometryError, HannerError};
pub use fit::{fit_scale, FitResult};
pub use polytope::Polytope;
pub use xi::{shortest_nonfit, xi, xi_oracle, PolyLine, XiMethod, XiOptions, XiResult};
pub use billiard::{simulate, PhasePoint, TrajectoryRecord};
pub use hanner::{HannerTree, HannerPair};
