//! Static hosting capacity (HC) and dynamic operating envelopes (DOE) for
//! single-phase DERs in radial unbalanced three-phase low-voltage feeders.
//!
//! The crate is organised around the pipeline that produces those numbers:
//!
//! - [`net`] — feeder and demand data model, file ingestion, and the two
//!   bundled benchmark feeder builders.
//! - [`powerflow`] — exact three-phase physics: backward/forward-sweep power
//!   flow with full 3×3 mutual coupling, plus constraint evaluation
//!   (voltage bounds, voltage unbalance factor, ampacity).
//! - [`lp`] — embedded bounded-variable revised simplex and best-bound
//!   branch-and-bound, so no external solver is required.
//! - [`lindist`] — the LinDist3Flow linearisation in squared voltage
//!   magnitudes, as an LP or (with phase-selection binaries) a MILP.
//! - [`slp`] — successive linear programming on the exact current–voltage
//!   formulation, certified against the power-flow oracle.
//! - [`scenarios`] — the five phase-selection scenarios and the HC / DOE
//!   pipelines that tie everything together.

pub mod lindist;
pub mod lp;
pub mod net;
pub mod powerflow;
pub mod scenarios;
pub mod slp;

pub use net::{
    Branch, DemandSnapshot, Direction, LoadProfile, NetworkModel, NodeId, OperatingLimits, Phase,
};
pub use scenarios::{DoeResult, HcResult, Scenario};
