//! Institution-based semantics and consistency checking for communicating
//! state machines.
//!
//! The crate implements four institutions — environments, state machines over
//! an environment, protocol state machines, and their flat combination with
//! an interleaving product — together with static and dynamic consistency
//! checks over composite systems, a textual model language (`.ikm` files),
//! and randomized law suites for the satisfaction condition and functor laws.
//!
//! Start with the `examples/` directory (one runnable example per
//! capability), or the `instikit` binary: `check`, `simulate`, `product`,
//! `laws`, and `fmt` subcommands.

pub mod checks;
pub mod concrete;
pub mod dsl;
pub mod flat;
pub mod laws;
pub mod env;
pub mod psm;
pub mod system;
pub mod sm;
