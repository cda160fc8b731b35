//! The multiplicative group Z2 = {+1, -1}.

use std::fmt;
use std::ops::Mul;

/// A sign, the value group of every invariant in this crate.
///
/// The group is written multiplicatively, matching the Pfaffian-ratio
/// formulas: `Plus` is the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Z2 {
    Plus,
    Minus,
}

impl Z2 {
    /// +1 for even `n`, -1 for odd `n`.
    pub fn from_parity(n: i64) -> Self {
        if n.rem_euclid(2) == 0 {
            Z2::Plus
        } else {
            Z2::Minus
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Z2::Plus => 1.0,
            Z2::Minus => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Z2::Plus => 1,
            Z2::Minus => -1,
        }
    }
}

impl Mul for Z2 {
    type Output = Z2;
    fn mul(self, rhs: Z2) -> Z2 {
        if self == rhs {
            Z2::Plus
        } else {
            Z2::Minus
        }
    }
}

impl fmt::Display for Z2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Z2::Plus => write!(f, "+1"),
            Z2::Minus => write!(f, "-1"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_law() {
        assert_eq!(Z2::Plus * Z2::Plus, Z2::Plus);
        assert_eq!(Z2::Plus * Z2::Minus, Z2::Minus);
        assert_eq!(Z2::Minus * Z2::Minus, Z2::Plus);
        assert_eq!(Z2::from_parity(-3), Z2::Minus);
        assert_eq!(Z2::from_parity(0), Z2::Plus);
    }
}
