//! Optimal worst-case error bounds for approximation and integration of
//! Lipschitz and Hölder functions on general bounded domains, together with
//! Laplacian eigenvalue checks of shape-independent Sobolev asymptotics.

pub mod bounds;
pub mod cli;
pub mod domains;
pub mod error;
pub mod geometry;
pub mod nearest;
pub mod points;
pub mod spectral;
pub mod pointopt;
pub mod wce;

pub use domains::{Domain, VolumeEstimate};
pub use error::{Error, Result};
pub use geometry::{Exponent, NormSpec};
pub use points::PointSet;
