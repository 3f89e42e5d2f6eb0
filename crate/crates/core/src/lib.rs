//! Arithmetic invariants of Shimura curves X^D, X^D_0(N), X^D_1(N), the criterion deciding
//! when they are potential Hasse principle violations, and a p-adic local-points oracle for
//! the genus-one curve X^14 over quadratic fields.

pub mod arith;
pub mod criterion;
pub mod exec;
pub mod invariants;
pub mod localbounds;
pub mod localpoints;
pub mod rational;

pub use arith::{make_level, ArithError, ShimuraLevel, SquarefreeFactored};
pub use exec::Exec;
pub use rational::ExactRational;
