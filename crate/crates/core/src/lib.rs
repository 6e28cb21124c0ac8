//! Finite Moufang loops of central class 2: coded vector spaces, code loops,
//! coded extensions, isotopes and a structure-analysis toolkit for Cayley
//! tables.

pub mod algebra;
pub mod code;
pub mod cvs;
mod cvs_validate;
pub mod error;
mod forms;
mod text;
pub mod table;
pub mod coded_loop;
pub mod analysis;
pub mod module;
pub mod word;
pub mod classify;

pub use algebra::{FpMatrix, FpVector, Residue};
pub use cvs::{iso_up_to_scalar, parse_cvs, random_cvs, Cvs, CvsIso, ValidationBudget};
pub use error::{Error, Result};
pub use code::BinaryCode;
pub use coded_loop::CodedLoop;
pub use module::CodedModule;
pub use table::{FiniteLoop, LoopTable};
