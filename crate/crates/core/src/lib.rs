//! Intrinsic simplification of triangle-mesh metrics.
//!
//! The mesh model here is purely intrinsic: a triangulation plus one length
//! per edge. Simplification removes vertices whose Gaussian curvature is
//! below a threshold, using intrinsic edge flips to bring each candidate to
//! removable valence, and tracks every removed vertex as barycentric
//! coordinates in a surviving face so scalar data can follow the
//! simplification. A cotan-Laplacian Poisson solver evaluates how well the
//! simplified metric reproduces the original.

// Fixed-size side loops index several parallel arrays at once; iterators
// would obscure them.
#![allow(clippy::needless_range_loop)]

pub mod correspondence;
pub mod flip;
pub mod geom;
pub mod io;
pub mod mesh;
pub mod poisson;
pub mod simplify;
pub mod synthetic;
#[cfg(test)]
pub(crate) mod testutil;

pub use correspondence::{BarycentricMapping, BarycentricPoint};
pub use io::{
    itm_string, load_itm, load_mapping, load_obj, mapping_string, obj_string, parse_itm,
    parse_mapping, parse_obj, FaceNumbering, ObjData, ParseError, ReadError,
};
pub use mesh::{
    BuildError, DeltaComplex, EdgeId, EdgeLengths, FaceId, HalfedgeId, IntrinsicMesh, VertexId,
};
pub use poisson::{
    cotan_weights, extend_to_original, mse, poisson_solve, poisson_transfer_mse, restrict_rhs,
    value_at_tracked, PoissonError,
};
pub use simplify::{
    simplify, ProjectionFailurePolicy, RemovalFailure, SimplifyConfig, SimplifyError,
    SimplifyOutcome, SimplifyReport,
};
pub use synthetic::TriangleSoup;
