//! Modular symbols for Γ₁(N), ordinary ranks and the supersingular and p-rank oracles.

pub mod atkin_lehner;
pub mod dimension;
pub mod manin;
pub mod oracles;
pub mod ordinary;
pub mod symbols;

pub use dimension::{dim_cusp_forms_gamma1, gamma1_invariants, genus_x1, Gamma1Invariants};
pub use symbols::{HeckeData, HeckeLabel, ModularSymbolSpace};
pub use oracles::{gamma_oracle, supersingular_count, GammaOracle, SupersingularCount};
pub use ordinary::{ordinary_rank, verify_d_identity, OrdinaryRank, OrdinaryRankTable};
pub use atkin_lehner::{atkin_lehner_check, intersection_gram, AtkinLehnerReport};
