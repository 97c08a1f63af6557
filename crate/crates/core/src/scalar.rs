//! Integer score types.
//!
//! Every algorithm in this crate works on Borda totals and gaps, which are
//! exact signed integers. The code is generic over the integer width so the
//! same routines serve `i32` for compact batch runs and `i64`/`i128` for very
//! large electorates.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_traits::{NumCast, PrimInt, Signed};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// A signed primitive integer usable as a Borda score.
pub trait Score:
    PrimInt + Signed + Hash + Debug + Display + Default + Send + Sync + Serialize + DeserializeOwned + 'static
{
    /// Converts a count or position. Panics if the value does not fit, which
    /// only happens when the chosen width is too narrow for the election.
    #[inline]
    fn from_usize(v: usize) -> Self {
        <Self as NumCast>::from(v).unwrap_or_else(|| panic!("{v} does not fit in the score type"))
    }

    #[inline]
    fn to_i128(self) -> i128 {
        <i128 as NumCast>::from(self).expect("score fits in i128")
    }
}

impl<T> Score for T where
    T: PrimInt + Signed + Hash + Debug + Display + Default + Send + Sync + Serialize + DeserializeOwned + 'static
{
}
