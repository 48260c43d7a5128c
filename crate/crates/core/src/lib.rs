pub mod cli;
pub mod error;
pub mod hensel;
pub mod modring;
pub mod oracle;
pub mod padic;
pub mod verify;
pub mod welch;

pub use error::{Error, Result};
pub use modring::{PrimePowerModulus, Residue};
pub use welch::{SolutionPair, SolutionReport, WelchInstance};
