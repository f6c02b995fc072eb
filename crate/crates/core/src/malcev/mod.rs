//! Exact rational unitriangular matrices: exp/log, matrix embeddings of
//! torsion-free nilpotent groups, and block-diagonal semidirect products.

mod embed;
mod lie;
mod qmatrix;
mod semidirect;
mod unitri;

pub use embed::{
    embed_full_translation,
    embed_by_translation, embed_matrix_group, Construction, Embedding, CERTIFIED_RADIUS, DEFAULT_CLASS_CAP,
};
pub use lie::{qlie_span, LieSpan};
pub use qmatrix::{q, q_frac, rational_from_str, rational_to_string, QMatrix};
pub use semidirect::{semidirect_act, semidirect_encode, semidirect_multiply, Point, SemidirectElement};
pub use unitri::{expm, logm, StrictUpper, UniTriangular};
