//! Component model of the special fiber at level Np^r.

pub mod carrier;
pub mod checks;
pub mod components;
pub mod hecke;
pub mod tables;
pub mod teichmuller;

pub use carrier::{CarrierKind, CarrierSpec, IgusaCarrier};
pub use checks::{
    frobenius_splitting_check, ordinary_contraction_check, residue_sum_check, split_sequence_check, ContractionReport,
    ResidueReport, SplittingReport,
};
pub use components::{list_components, ComponentIndex};
pub use hecke::{
    gamma_map, pullback_i_star, up_apply, up_power_closed_form, upstar_apply, upstar_power_closed_form, MeroSection, Star,
};
pub use tables::{degeneracy_description, degeneracy_table, factorization_checks, inertia_composes, inertia_description, MapLabel, TableRow, Word};
pub use teichmuller::{teichmuller_decompose, TeichmullerDecomposition};
