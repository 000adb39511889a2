pub mod cli;
pub mod error;
pub mod factorcount;
pub mod igusa;
pub mod linsolve;
pub mod modring;
pub mod multipoly;
pub mod oracle;
pub mod rootcount;
pub mod splitideal;
pub mod unipoly;

pub use error::{Error, Result};
