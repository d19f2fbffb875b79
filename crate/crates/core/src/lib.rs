//! Certified tracing of connected sets of parametric fixed points.
//!
//! For a continuous `f : [0,1] × [0,1]^n → [0,1]^n`, the fixed points
//! `{(t, x) : f(t, x) = x}` contain a connected set whose projection onto the
//! parameter axis is all of `[0, 1]`. This crate approximates that set from
//! outside with nested unions of dyadic boxes, certifies that some component
//! of each union spans the parameter interval, and, for a claimed fixed-point
//! set without such a component, builds the fixed-point-free map that makes
//! the contradiction concrete.
//!
//! Oracles are black boxes with a declared modulus of continuity; a box is
//! discarded only when the modulus proves it holds no fixed point.

pub mod artifacts;
pub mod components;
pub mod config;
pub mod error;
pub mod geometry;
pub mod index;
pub mod oracle;
pub mod peano;
pub mod refine;
pub mod sampling;
pub mod separator;
pub mod tracer;
pub mod witness;

pub use components::{label_components, spanning_components, ComponentInfo, ComponentLabeling, Face};
pub use config::RunConfig;
pub use error::{Error, Result};
pub use geometry::{
    dist_boxset_boxset, dist_inf, dist_point_boxset, hausdorff, BoxSet, Dyadic, DyadicBox, Point, MAX_LEVEL,
};
pub use index::BoxIndex;
pub use oracle::{lookup, Modulus, Oracle, TabulatedOracle};
pub use peano::{curve_eval, lift, pushforward, LiftedOracle, SpaceFillingCurve, TwoParamOracle};
pub use refine::{limit_estimate, trace, Outcome, TraceConfig, TraceResult};
pub use separator::{membership_o, split, Separation, Side};
pub use tracer::{build_level, classify_box, Verdict};
pub use witness::{f_eval, g_eval, verify_witness, SeparationWitness, WitnessReport, WitnessVerdict};
