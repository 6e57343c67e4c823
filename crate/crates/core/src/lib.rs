//! Pulse-coupled oscillator protocols on locally connected networks.
//!
//! The crate bundles an event-driven simulator for excitatory synchronization
//! with propagation delays ([`sync`]), a simulator for the two-timer
//! proportional-fair scheduling protocol ([`sched`]), closed-form and spectral
//! analysis of the scheduling dynamics ([`spectral`]) and a seeded Monte Carlo
//! harness ([`harness`]). Graph structure shared by all of them lives in
//! [`topology`].

pub mod harness;
pub mod ratio;
pub mod sched;
pub mod spectral;
pub mod sync;
pub mod topology;

pub use ratio::Q;
pub use topology::{CliqueCover, Topology};
