use thiserror::Error;

use crate::domain::{InvalidTask, Violation};
use crate::embedding::EmbedError;
use crate::eval::EvalError;
use crate::generate::GenError;
use crate::io::FileError;
use crate::nl::{DatasetError, ParseError};
use crate::select::SelectError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    InvalidTask(#[from] InvalidTask),
    #[error(transparent)]
    Violation(#[from] Violation),
    #[error(transparent)]
    Generate(#[from] GenError),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Select(#[from] SelectError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    File(#[from] FileError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
