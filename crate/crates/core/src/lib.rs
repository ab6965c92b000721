//! Maximum matchings of finite trees, their uncovered sets, and the
//! determinantal processes that describe them.

pub mod caps;
pub mod cli;
pub mod determinantal;
pub mod error;
pub mod experiments;
pub mod law;
pub mod matching;
pub mod recursions;
pub mod spectral;
pub mod tree;

pub use caps::Caps;
pub use error::{Error, Result};
