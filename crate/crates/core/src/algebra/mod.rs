pub mod arith;
pub mod linalg;
pub mod matrix;
pub mod newton;
pub mod poly;
pub mod ring;
pub mod series;
pub mod sparse;

pub use linalg::RankKernelImage;
pub use matrix::Matrix;
pub use newton::{newton_unit_root_count, NewtonPolygonResult};
pub use poly::Poly;
pub use ring::{
    CoefficientRing, CyclotomicTrunc, ExtField, Field, FiniteField, LocalRing, PadicTrunc, PrimeField, Rationals,
    Ring,
};
pub use series::Series;
