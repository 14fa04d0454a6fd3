pub mod base_field;
pub mod config;
pub mod drinfeld;
pub mod error;
pub mod exec;
pub mod factor;
pub mod iwasawa;
pub mod field;
pub mod linalg;
pub mod local;
pub mod poly;
pub mod selmer_bound;
pub mod twisted;

pub use error::{Error, ErrorKind, Result};
