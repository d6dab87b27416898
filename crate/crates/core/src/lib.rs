pub mod cones;
pub mod error;
pub mod extended;
pub mod gaugefn;
pub mod gmf;
pub mod matcore;
pub mod omega;
pub mod oracle;
pub mod points;
pub mod varcalc;
pub mod verify;

pub use error::{GmfError, Result};
pub use extended::ExtendedReal;
