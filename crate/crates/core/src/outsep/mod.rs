//! Outer automorphisms of nilpotent groups: the `Hom*` calculus, elusive classes and torsion-separating congruences.

mod elusive;
mod goodenough;
mod homstar;
mod outer;
mod separate;

pub use elusive::{elusive_elements, elusive_report, phi_image, ElusiveClass, ElusiveReport, DEFAULT_COSET_CAP};
pub use goodenough::{good_enough_subgroup, quotient_preimage, verify_good_enough, GoodEnough, GOOD_ENOUGH_TRIES};
pub use homstar::{HomStar, HomStarSpace};
pub use outer::{
    outer_order, projection_p, restriction_r, survives, CenterMap, OuterAutoClass, SurvivalEvidence, OUTER_ORDER_BOUND,
    TABLE_CHECK_CAP,
};
pub use separate::{
    separate_torsion, verify_certificate, CertificateStatus, ChainStep, CongruenceCertificate, SeparateOptions,
    SurvivalRecord,
};
pub use crate::nilgroup::{out_finite, OutFinite};
