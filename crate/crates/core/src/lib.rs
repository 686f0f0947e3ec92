//! Cyclic codes over F_p with five dual zeros: finite field arithmetic,
//! quadratic-form character sums, exhaustive value-distribution scans and
//! weight distributions.

pub mod charsum;
pub mod code;
pub mod field;
pub mod quadform;
pub mod syscount;
pub mod wdist;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] field::FieldError),
    #[error(transparent)]
    Quad(#[from] quadform::QuadError),
    #[error(transparent)]
    CharSum(#[from] charsum::CharSumError),
    #[error(transparent)]
    SysCount(#[from] syscount::SysCountError),
    #[error(transparent)]
    Code(#[from] code::CodeError),
    #[error(transparent)]
    Wdist(#[from] wdist::WdistError),
}
