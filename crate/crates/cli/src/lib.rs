//! Library side of the `systole` command: census tables, verification
//! reports, the on-disk matrix cache and output rendering.

pub mod cache;
pub mod error;
pub mod output;
pub mod record;
pub mod verify;

pub use cache::{cached_matrix, MatrixCache};
pub use error::{exit_code, CliError};
pub use output::Format;
pub use record::{run_census, CensusOptions, CensusRecord};
pub use verify::{run_verify, VerifyKind, VerifyOptions, VerifyReport};
