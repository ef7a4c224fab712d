//! Modules over Artinian group rings k[(Z/p^N)^q] and matrix idempotents over Z/p^m.

pub mod idempotent;
pub mod linalg;
pub mod module;

pub use idempotent::{ordinary_idempotent, IdempotentCertificate, MatrixModPM};
pub use module::{
    check_patching_level, random_balanced_module, random_relation, tor_dims_periodic, Coinvariants, Defect,
    GroupRingModule, PatchingLevel, PatchingReport, SquarePresentation, TorDims,
};
