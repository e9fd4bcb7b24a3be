pub mod cache;
pub mod cli;
pub mod diagrams;
pub mod laurent;
pub mod qseries;
pub mod strata;
