//! Linear network coding over parallel optical paths.
//!
//! The crate models the end-to-end pipeline of a multipath WDM transmission
//! protected by generation-based linear network coding, and quantifies its
//! exposure to eavesdropping and jamming on attacked fiber edges:
//!
//! - [`gf`]: GF(2^m) arithmetic (default GF(2^8)).
//! - [`codec`]: round-robin lane striping, any-k-of-n encoding, and
//!   Gaussian-elimination decoding.
//! - [`netmodel`]: topology, candidate path table, attacked edge sets, and
//!   scenario config loading.
//! - [`analysis`]: exact closed-form exposure metrics by subset enumeration.
//! - [`sim`]: seeded Monte Carlo cross-validation of the closed forms.

pub mod analysis;
pub mod codec;
pub mod gf;
pub mod netmodel;
pub mod sim;

pub use analysis::{Analyzer, ExposureReport, PolicyKind, RndModel, SelectionPolicy};
pub use gf::{Field, FieldSpec};
pub use netmodel::{load_scenario, parse_scenario, save_scenario, EdgeId, Scenario};
pub use sim::{run_experiment, SimReport, TrialConfig};
