//! Exact solvers for box-constrained integer programs
//! `min cᵀx + g(Wx)` where `W` is a small integer matrix with few rows.
//!
//! The crate is organised bottom-up:
//!
//! * [`numeric`]: exact rationals, ε-polynomials and fraction-free linear
//!   algebra.
//! * [`model`]: instances, objectives, validation, column merging.
//! * [`oracle`]: the restricted problem on at most `m` free variables.
//! * [`dp`]: minimum-cost recovery of the tight variables for a fixed
//!   projection target, and the graded target ball.
//! * [`engine`]: the guess-and-recover solvers for non-negative and boxed
//!   variables.
//! * [`unknown_w`]: optimisation of `g(Wx)` over `{0,1}ⁿ` when `W` is only
//!   visible through function and gradient values.
//! * [`applications`]: builders for knapsack, equality-constrained ILP and
//!   compressed sensing.
//! * [`verify`]: brute-force ground truth and seeded instance generators.
//! * [`io`]: the JSON instance and result formats.

pub mod applications;
pub mod dp;
pub mod engine;
pub mod error;
pub mod io;
pub mod model;
pub mod numeric;
pub mod oracle;
pub mod unknown_w;
pub mod verify;

pub use error::{Error, Result, Violation};
pub use model::{Instance, ObjValue, Objective, Solution, Status};
pub use numeric::{IntMat, Rat};
