//! Influence measures for liquid-democracy delegation graphs.
//!
//! * [`graph`]: delegation profiles, scoped overlays, ultimate sets and
//!   suspension.
//! * [`influence`]: potential weight, first-passage probabilities, expected
//!   weight, closed forms and stationary weight distributions.
//! * [`lottery`]: realized graphs, tallies and the exact-enumeration and
//!   Monte Carlo estimators of expected weight.
//! * [`io`]: graph documents, probability files and reports.
//!
//! ```
//! use liquid_influence::graph::{AgentId, DelegationProfile};
//! use liquid_influence::influence::{expected_weight, SuspendibleProfile};
//!
//! let profile = DelegationProfile::build(
//!     ["a", "b", "t"].map(AgentId::from),
//!     [("a", "b"), ("b", "t")].map(|(x, y)| (AgentId::from(x), AgentId::from(y))),
//! )?;
//! let sp = SuspendibleProfile::uniform(profile, 0.5)?;
//! assert_eq!(expected_weight(&sp, &"t".into())?, 1.75);
//! # Ok::<(), liquid_influence::Error>(())
//! ```

pub mod error;
pub mod exec;
pub mod fixtures;
pub mod graph;
pub mod influence;
pub mod io;
pub mod lottery;

pub use error::{Error, Result};
pub use exec::Execution;
