//! Heegner points on X0(36), cube sums, and the explicit height identity
//! for the sextic twists y² = x³ + k.

pub mod arith;
pub mod cache;
pub mod eisenstein;
pub mod ellcurve;
pub mod error;
pub mod gz;
pub mod heegner;
pub mod local;
pub mod lseries;
pub mod numeric;
pub mod quadforms;
pub mod x36;

pub use error::{Error, Result};
pub use numeric::{BigRat, MPComplex};
