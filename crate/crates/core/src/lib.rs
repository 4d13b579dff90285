//! Whitham modulation theory for the KdV equation `u_t + 6u u_x + ε² u_xxx = 0`:
//! travelling waves, the Whitham system and its hodograph solution, the
//! Painlevé II trailing-edge layer, and a direct spectral solver to check
//! them against.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gpstep;
pub mod hodograph;
pub mod hopf;
pub mod kdv;
pub mod painleve;
pub mod quad;
pub mod solve;
pub mod specfun;
pub mod wave;
pub mod whitham;

pub use error::{Error, Result};
pub use gpstep::StepProblem;
pub use hodograph::{EdgeLayerData, HodographField, ModulationState};
pub use hopf::{BreakPoint, Branch, InitialProfile};
pub use kdv::{GridSolution, SpectralGrid};
pub use painleve::HastingsMcLeod;
pub use wave::{RiemannTriple, WavePhase};
pub use whitham::SpeedVector;
