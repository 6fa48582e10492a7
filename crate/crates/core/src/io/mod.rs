//! File formats: SDPA sparse, DIMACS, polynomial text, dense matrices and
//! JSON.

mod json;
mod sdpa;
mod text;

pub use json::{
    Dims, Iterations, JsonAffine, JsonReport, JsonRow, NativeProblem, REPORT_SCHEMA_VERSION,
};
pub use sdpa::{fmt_f64, parse_sdpa, write_sdpa, SdpaOptions};
pub use text::{
    parse_dense_matrix, parse_dimacs, parse_polynomial, write_dense_matrix, write_dimacs,
    write_polynomial,
};
