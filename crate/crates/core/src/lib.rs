pub mod error;
pub mod exactlin;
pub mod segre;
pub mod wdcheck;
pub mod bounds;
pub mod contact;
pub mod planner;
pub mod certificate;
pub mod store;
pub mod cli;

pub use error::{Error, Result};
