//! Curves over finite fields, their differentials and the Cartier operator.

pub mod cartier;
pub mod local;
pub mod model;
pub mod nakajima;
pub mod ratfunc;
pub mod rosenlicht;
pub mod space;
pub mod trace;

pub use cartier::{cartier_apply, hasse_witt, pole_improvement_check, HasseWitt};
pub use local::{expand, residue_at};
pub use model::{CurveKind, CurveModel, FunctionElem, MeroDifferential, Place};
pub use nakajima::{nakajima_check, NakajimaReport};
pub use ratfunc::RatFunc;
pub use rosenlicht::{rosenlicht_sections_simple, CrossedUnion};
pub use space::{differentials_with_poles_basis, DifferentialSpace, DivisorData};
pub use trace::{pullback, trace_pushforward};
