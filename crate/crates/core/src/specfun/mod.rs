//! Special functions: Bessel `J_n` and Wigner 3-j / 6-j symbols.

mod bessel;
mod halfint;
mod wigner;

pub use bessel::{bessel_j, bessel_j_ladder, MAX_ORDER};
pub use halfint::{HalfInt, ParseHalfIntError};
pub use wigner::{ln_factorial, wigner_3j, wigner_6j};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecFunError {
    #[error("Bessel order {order} outside supported range |n| <= {max}")]
    OrderOutOfRange { order: i32, max: i32 },
    #[error("non-finite argument {0}")]
    NonFiniteArgument(f64),
    #[error("angular momentum {0} is negative")]
    NegativeAngularMomentum(HalfInt),
    #[error("j = {j} and m = {m} differ by a half-integer")]
    ProjectionParity { j: HalfInt, m: HalfInt },
    #[error("|m| = {m} exceeds j = {j}")]
    ProjectionTooLarge { j: HalfInt, m: HalfInt },
    #[error("factorial argument {0} outside the log-factorial table")]
    FactorialOutOfRange(i64),
}
