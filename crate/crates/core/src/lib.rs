//! The two-partner partnership game and its infinitely repeated version under
//! grim-trigger strategies.
//!
//! * [`model`]: stage-game parameters and payoffs.
//! * [`equilibrium`]: best responses, Nash equilibrium, joint optimum.
//! * [`trigger`]: critical discount factor and maximal sustainable effort.
//! * [`simulate`]: repeated-game engine and one-shot deviation scanner.
//! * [`numeric`]: golden-section, fixed-point and quadratic oracles.
//! * [`verify`]: randomised cross-checks of everything above.
//! * [`exec`]: parallel or sequential evaluation of independent work items.
// NaN-rejecting guards are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod equilibrium;
pub mod error;
pub mod exec;
pub mod model;
pub mod numeric;
pub mod simulate;
pub mod trigger;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Execution;
pub use model::{EffortProfile, GameParams, StagePayoffs};
