//! Union-free generic sets and their families over an observed sample.

mod family;
mod membership;
mod sample;

pub use family::{
    cardinality_cap, enumerate_ufg_family, enumerate_ufg_family_exhaustive,
    enumerate_ufg_family_with, parse_rational, rational_string, sets_by_member, structural_bound,
    vc_dimension_obs, weight_of, FamilyOptions, UfgFamily, UfgSet, DEFAULT_VC_BUDGET,
};
pub(crate) use membership::is_ufg_pair;
pub use membership::{
    distinguishing_sets, is_ufg, is_ufg_oracle, ufg_witness, DistinguishingSets, UfgWitness,
};
pub use sample::PosetSample;
