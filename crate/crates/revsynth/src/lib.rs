//! Synthesis and verification toolkit for reversible logic circuits.
//!
//! - [`gate`]: the catalog of reversible gates as exact permutations, with
//!   quantum cost and delay.
//! - [`quantum`]: exact unitary algebra over Gaussian dyadic rationals and
//!   minimal-decomposition search over {NOT, CNOT, CV, CV†}.
//! - [`netlist`]: line-based netlists with output classification, metrics,
//!   evaluation, and exhaustive reversibility checking.
//! - [`format`]: a textual netlist interchange format.
//! - [`synth`]: generators for decoders, flip-flops, and random access
//!   memories, plus their closed-form cost formulas.
//! - [`sim`]: clocked two-phase simulation and differential testing against
//!   an ideal memory.
//! - [`compare`]: cost comparison against previously published designs.

pub mod compare;
pub mod format;
pub mod gate;
pub mod netlist;
pub mod quantum;
pub mod sim;
pub mod synth;
