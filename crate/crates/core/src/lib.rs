//! Construction, encoding, minimum-weight analysis and list decoding of
//! polar codes and their precoded variants (CRC-polar, PAC, PS-PAC and
//! CCRC-polar).

pub mod construction;
pub mod error;
pub mod gf2;
pub mod precoding;
pub mod scl;
pub mod sim;
pub mod wmin;

pub use error::{Error, Result};
