//! Exact certification, construction, and search of secure codes on the
//! one-hop relay network: a source sends one symbol of `Z_d` to a sink over
//! two edges into a relay (`e1`, `e2`) and two edges out of it (`e3`, `e4`),
//! while an eavesdropper reads one edge in each layer and may overwrite the
//! first-layer edge she reads.
//!
//! Everything is computed from exact joint distributions; security verdicts
//! never depend on a floating-point tolerance.

pub mod algebra;
pub mod antilatin;
pub mod metrics;
pub mod netmodel;
pub mod security;
