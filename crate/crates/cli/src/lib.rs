//! Config-driven front end: `construct`, `wmin`, `simulate` and `codec`.

pub mod commands;
pub mod config;

pub use commands::{cmd_codec, cmd_construct, cmd_simulate, cmd_wmin, CodecInput};
pub use config::RunConfig;
