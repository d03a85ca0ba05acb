pub mod cesaro;
pub mod error;
pub mod hardy;
pub mod phi;
pub mod quadrature;
pub mod search;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
