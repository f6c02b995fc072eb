//! Graphs of groups with elementary vertex groups: isomorphism and extension-adjustment checks,
//! fundamental-group presentations, and the reduction of the isomorphism problem to vertex orbit problems.

mod decide;
mod file;
mod graph;
mod group;
mod iso;
mod presentation;

pub use decide::{decide_gog_iso, GogBudget, GogRefutation, GogReport, GogVerdict, WhiteOrbitLists};
pub use file::{parse_gog, EdgeSpec, GogDocument, GogFile, GroupSpec, VertexSpec};
pub use graph::{graph_isomorphisms, Color, Edge, Graph, GraphMap, GraphOfGroups};
pub use group::{
    abelianize, closure, find_isomorphism, invariant_mismatch, Elem, FiniteHandle, GroupHandle, GroupMap, IsoSearch, ELEMENT_CAP,
    ISO_SEARCH_CAP,
};
pub use iso::{
    assemble_isomorphism, verify_extension_adjustment, verify_gog_isomorphism, DiagramCheck, DiagramViolation, ExtensionAdjustment,
    GoGIsomorphism,
};
pub use presentation::{check_tree, fundamental_abelianization, fundamental_presentation, FinitePresentation, FundamentalPresentation, Word};
