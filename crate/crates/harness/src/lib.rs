//! File formats, seeded property checks and the command-line front end for
//! finite U-equivalence spaces.

pub mod checks;
pub mod dot;
pub mod gen;
pub mod instance;
pub mod oracle;

pub use checks::{run_checks, Caps, CheckReport, Status, UnknownCheckId, VerificationReport};
pub use dot::emit_dot;
pub use instance::{parse_instance, Instance, InstanceDoc, InstanceError};
