//! Moment graphs on alcoves, Braden-MacPherson sheaves and the periodic Hecke module.

pub mod error;
pub mod laurent;
pub mod alcoves;
pub mod rootdata;
pub mod hecke;
pub mod linalg;
pub mod moment_graph;
pub mod graded;
pub mod sheaf;
pub mod translation;
pub mod hom;
pub mod pullback;
pub mod cli;

pub use error::{Error, Result};
pub use laurent::Laurent;
pub use rootdata::{Affine, AffineCoweight, AffineRoot, AffineWeight, CartanType, RootDatum, Vector, MAXR};
pub use alcoves::Alcove;
pub use moment_graph::{Edge, MomentGraph};
pub use sheaf::{bm_build, AxiomReport, RingMode, Sheaf};
