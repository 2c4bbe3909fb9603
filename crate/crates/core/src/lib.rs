//! Leading terms of complexes over the Iwasawa algebra, Bockstein maps,
//! characteristic elements and p-adic L-functions of Dirichlet characters.

pub mod error;
pub mod padic;
pub mod series;
pub mod laurent;
pub mod linalg;
pub mod complex;
pub mod parse;
pub mod equivariant;
pub mod kubota_leopoldt;
pub mod selftest;
pub mod stark;

pub use error::{Error, Result};
pub use padic::PadicNumber;
