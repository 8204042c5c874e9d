//! Exact and numerical verification kit for the local and boundary computations attached to
//! Picard modular surfaces and the unitary similitude group GU(2,1).

pub mod analytic;
pub mod boundary;
pub mod cli;
pub mod hecke;
pub mod localzeta;
pub mod ntheory;
pub mod oracle;
pub mod quadfield;
pub mod suites;
pub mod symlaurent;
