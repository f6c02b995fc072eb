//! Mixed Whitehead problems: abelian and finite deciders, a budgeted nilpotent search, and orbit encodings.

mod abelian;
mod finite;
mod nilpotent;
mod orbit;
mod verdict;

pub use abelian::{verify_abelian_witness, whitehead_abelian, TORSION_CAP};
pub use finite::{verify_finite_witness, whitehead_finite, whitehead_finite_with_cap};
pub use nilpotent::{quotient_refutation, verify_nilpotent_witness, verify_refutation, whitehead_nilpotent, WhiteheadBudget};
pub use orbit::{
    intertwiner, orbit_encoding, orbit_encoding_finite, orbit_encoding_translation, orbit_witness, FiniteOrbitEncoding, OrbitEncoding,
    OrbitInstance,
};
pub use verdict::{BudgetReport, Refutation, TupleSystem, Verdict, Witness};
