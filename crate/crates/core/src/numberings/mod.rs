//! Explicit numberings, the universal evaluator built on `N_R`, and
//! desk-scale complexity tables with their Kolmogorov order.

mod complexity;
mod korder;
pub mod nr;
pub mod pairing;
mod universal;

use num_traits::ToPrimitive;
use thiserror::Error;

pub use complexity::{complexity_table, complexity_table_with, sweep_record, ComplexityEntry, ComplexityTable, SweepRecord};
pub use korder::{kolmogorov_order, KOrderTable};
pub use nr::{nr_compare, nr_element, nr_number, Certificate, NrTable, RSequence};
pub use pairing::{bin_number, bin_unnumber, cantor_pair, cantor_unpair, coprod_number, coprod_unnumber};
pub use universal::{universal_u, Universal};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumberingError {
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("arithmetic overflow")]
    Overflow,
    #[error("certificate violated: {0}")]
    CertificateViolation(String),
    #[error("no certified entries")]
    EmptyCertifiedSet,
    #[error("Kolmogorov order bound violated at {0}")]
    OrderBoundViolation(u64),
}

/// A bijection between the positive naturals and a constructive world.
pub trait Numbering {
    type Element;

    fn domain_tag(&self) -> &str;
    fn element(&self, n: u64) -> Result<Self::Element, NumberingError>;
    fn number(&self, e: &Self::Element) -> Result<u64, NumberingError>;
}

/// `m` disjoint copies of the positive naturals.
pub struct CoprodNumbering {
    pub m: u64,
}

impl Numbering for CoprodNumbering {
    type Element = (u64, u64);

    fn domain_tag(&self) -> &str {
        "coproduct"
    }

    fn element(&self, n: u64) -> Result<(u64, u64), NumberingError> {
        coprod_number(self.m, n)
    }

    fn number(&self, e: &(u64, u64)) -> Result<u64, NumberingError> {
        coprod_unnumber(self.m, e.0, e.1)
    }
}

/// Binary words.
pub struct BinNumbering;

impl Numbering for BinNumbering {
    type Element = String;

    fn domain_tag(&self) -> &str {
        "binary-words"
    }

    fn element(&self, n: u64) -> Result<String, NumberingError> {
        bin_number(n)
    }

    fn number(&self, e: &String) -> Result<u64, NumberingError> {
        bin_unnumber(e)
    }
}

pub struct CantorNumbering;

impl Numbering for CantorNumbering {
    type Element = (u64, u64);

    fn domain_tag(&self) -> &str {
        "pairs/cantor"
    }

    fn element(&self, n: u64) -> Result<(u64, u64), NumberingError> {
        cantor_unpair(n)
    }

    fn number(&self, e: &(u64, u64)) -> Result<u64, NumberingError> {
        cantor_pair(e.0, e.1)
    }
}

pub struct NrNumbering {
    pub r: RSequence,
}

impl Numbering for NrNumbering {
    type Element = (u64, u64);

    fn domain_tag(&self) -> &str {
        "pairs/nr"
    }

    fn element(&self, n: u64) -> Result<(u64, u64), NumberingError> {
        nr_element(&n.into(), &self.r)
    }

    fn number(&self, e: &(u64, u64)) -> Result<u64, NumberingError> {
        nr_number(e.0, e.1, &self.r)?.to_u64().ok_or(NumberingError::Overflow)
    }
}
