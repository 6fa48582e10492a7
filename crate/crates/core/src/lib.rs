//! Conic projections and regularization methods for linear conic programs.

// `!(x <= tol)` is used on purpose so that NaN counts as failure.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod affine;
pub mod altschemes;
pub mod cones;
pub mod dualproj;
pub mod error;
pub mod io;
pub mod linalg;
pub mod polysos;
pub mod regsolver;
pub mod report;

pub use affine::{gram_factorize, project_affine, AffineMap, GramFactor, RowBuilder, SparseRow};
pub use cones::{
    project_cone, project_polar, project_psd, project_soc, Block, BlockPoint, ConeSpec,
};
pub use dualproj::{DualMethod, DualOptions, DualPoint, ProjectionProblem};
pub use error::{Error, Result};
pub use linalg::{eig_sym, SpectralDecomp, SymMatrix};
pub use polysos::{Graph, Polynomial};
pub use regsolver::{IterateTriple, LinearConicProblem, RegParams};
pub use report::{SolveReport, Status};
