//! Exact scalar, polynomial and linear-algebra kernels.

pub mod det;
pub mod gauss;
pub mod gf2;
pub mod matching;
pub mod matrix;
pub mod modp;
pub mod pfaffian;
pub mod poly;
pub mod series;

pub use det::{det, det_eval, det_field, det_symbolic, det_truncated, DetMode, DetValue, SYMBOLIC_DET_LIMIT};
pub use gauss::GaussRat;
pub use gf2::{gf2_rank, gf2_solve, gf2_solve_one, EchelonBasis, Gf2Solution, Gf2Vec};
pub use matching::{DEFAULT_MATCHING_CAP, matching_sign, permutation_sign, MatchingGraph};
pub use matrix::{SkewMat, SquareMat};
pub use pfaffian::{pfaffian, pfaffian_eval, pfaffian_f64, pfaffian_field, pfaffian_symbolic, PfMode};
pub use poly::{GPoly, Monomial, VarId};
pub use series::{exact_sqrt, series_sqrt};
