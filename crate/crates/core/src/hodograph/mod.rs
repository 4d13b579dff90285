//! Hodograph solution of the Whitham system for hump-shaped initial data.

pub mod edges;
pub mod epd;
pub mod field;
pub mod solve;

pub use edges::{phi, trailing_edge, EdgeLayerData, PhiValues};
pub use epd::{epd_gradient, epd_q, tsarev_w, EpdPotential, EpdValue, ModulationState};
pub use field::{dsw_solution, DswEvaluator, FieldSlice, HodographField, ZoneSolver};
pub use solve::{edges_near_breaking, solve_whitham, solve_with, state_modulus, whitham_zone, HodographSystem, ZoneTrace};
