//! Finitely generated nilpotent groups given by polycyclic presentations.

mod collect;
mod element;
mod hom;
mod layered;
pub mod library;
mod presentation;
mod series;
mod subgroup;
mod table;

pub use element::NilElement;
pub use hom::GroupHom;
pub use presentation::{PcPresentation, Relation, RelationKind};
pub use series::{quotient_cap_from_env, CentralSeries, TorsionData, DEFAULT_LOW_INDEX_CAP, DEFAULT_QUOTIENT_CAP};
pub use subgroup::{Quotient, Subgroup};
pub use table::{out_finite, FiniteGroupTable, OutFinite, PcTable, DEFAULT_AUT_CAP};
