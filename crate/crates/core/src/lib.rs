//! Regularization and renormalization of the halting problem on a small,
//! fully inspectable register machine.

pub mod anytime;
pub mod cache;
pub mod cli;
pub mod hopf;
pub mod machine;
pub mod numberings;
pub mod series;
