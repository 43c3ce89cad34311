//! Entry laws and Wigner / deformed matrix sampling.

mod law;
mod matrix;

pub use law::{
    bump_mixture, truncate_law, validate_law, EntryLaw, LawSpec, PotentialName, RejectionSampler,
    Shape, TailClass,
    ValidationReport,
};
pub use matrix::{
    sample_deformed, sample_gue_standard, sample_wigner, Convention, WignerMatrix,
};
pub(crate) use matrix::sample_gue;
