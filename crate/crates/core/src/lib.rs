//! Analysis library for a three-node MIMO full-duplex network in which the
//! uplink mobile can reach the downlink mobile over an out-of-band
//! side-channel.
//!
//! The crate covers four layers:
//!
//! * [`capacity`]: per-realization rate-region bounds (outer bound,
//!   bin-and-cancel inner bound, exact mutual-information region, no-CSIT
//!   region) built on the complex kernels in [`channel`].
//! * [`gdof`]: generalized degrees-of-freedom regions and the required
//!   side-channel bandwidth to remove interference.
//! * [`dmt`]: diversity–multiplexing tradeoff via linear programs over
//!   eigenvalue exponents ([`lp`]), plus the closed-form special cases used
//!   to cross-check them.
//! * [`outage`]: seeded, parallel Monte Carlo outage estimation.
//!
//! All rates are in bits per second per main-channel hertz; the main-channel
//! bandwidth is normalized to one and `w` is the side-channel bandwidth
//! relative to it.

pub mod capacity;
pub mod channel;
pub mod curve;
pub mod dmt;
pub mod error;
pub mod gdof;
pub mod lp;
pub mod model;
pub mod outage;

pub use capacity::{PowerSplit, RateBounds};
pub use channel::{ChannelRealization, SnrPoint};
pub use curve::{min_pl, ptp_dmt, PiecewiseLinear};
pub use error::{Error, Result};
pub use gdof::GdofRegion;
pub use lp::{LinearProgram, LpSolution, LpStatus};
pub use model::{derived_dims, f_spatial, f_spatial1, AntennaConfig, DerivedDims, LinkLevels, NetworkSpec};
pub use outage::{OutageConfig, OutageEstimate};

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
