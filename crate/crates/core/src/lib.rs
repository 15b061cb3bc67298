pub mod checks;
pub mod complex;
pub mod error;
pub mod extension;
pub mod generators;
pub mod io;
pub mod lp;
pub mod oracle;
pub mod path_metric;
pub mod probes;
pub mod sampling;
pub mod vertex_metrics;

pub use complex::{BarycentricPoint, Simplex, SimplicialComplex, VertexId};
pub use error::{Error, Result};
