//! Edge-length monoids: `[0,∞)` under addition and its one-point
//! extension `[0,∞]` with `∞ + t = t + ∞ = ∞`.

use std::fmt;

use crate::numeric::encode_f64;

/// A commutative monoid of edge lengths used to label phylogenetic trees.
pub trait EdgeLength: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn combine(&self, other: &Self) -> Self;
    /// Canonical text form; equal values encode identically.
    fn encode(&self) -> String;
    /// `Err` with a description when the value lies outside the monoid.
    fn check(&self) -> Result<(), String>;
    /// Representative used in stored trees (e.g. `-0.0` becomes `0.0`).
    fn normalized(&self) -> Self;
    fn is_infinite(&self) -> bool {
        false
    }
}

impl EdgeLength for f64 {
    fn zero() -> Self {
        0.0
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn combine(&self, other: &Self) -> Self {
        self + other
    }

    fn encode(&self) -> String {
        encode_f64(*self)
    }

    fn check(&self) -> Result<(), String> {
        if self.is_finite() && *self >= 0.0 {
            Ok(())
        } else {
            Err(format!("length {self} is not in [0, ∞)"))
        }
    }

    fn normalized(&self) -> Self {
        if *self == 0.0 {
            0.0
        } else {
            *self
        }
    }
}

/// An element of `[0, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedLength {
    Finite(f64),
    Infinite,
}

impl ExtendedLength {
    pub fn finite(&self) -> Option<f64> {
        match self {
            ExtendedLength::Finite(x) => Some(*x),
            ExtendedLength::Infinite => None,
        }
    }

    /// `Infinite` maps to `f64::INFINITY`.
    pub fn to_f64(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    /// `f64::INFINITY` maps to `Infinite`; NaN and negatives are kept and
    /// rejected later by [`EdgeLength::check`].
    pub fn from_f64(x: f64) -> Self {
        if x == f64::INFINITY {
            ExtendedLength::Infinite
        } else {
            ExtendedLength::Finite(x)
        }
    }
}

impl From<f64> for ExtendedLength {
    fn from(x: f64) -> Self {
        ExtendedLength::from_f64(x)
    }
}

impl fmt::Display for ExtendedLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedLength::Finite(x) => write!(f, "{x}"),
            ExtendedLength::Infinite => write!(f, "inf"),
        }
    }
}

impl EdgeLength for ExtendedLength {
    fn zero() -> Self {
        ExtendedLength::Finite(0.0)
    }

    fn is_zero(&self) -> bool {
        matches!(self, ExtendedLength::Finite(x) if *x == 0.0)
    }

    fn combine(&self, other: &Self) -> Self {
        match (self, other) {
            (ExtendedLength::Finite(a), ExtendedLength::Finite(b)) => ExtendedLength::Finite(a + b),
            _ => ExtendedLength::Infinite,
        }
    }

    fn encode(&self) -> String {
        match self {
            ExtendedLength::Finite(x) => encode_f64(*x),
            ExtendedLength::Infinite => "inf".into(),
        }
    }

    fn check(&self) -> Result<(), String> {
        match self {
            ExtendedLength::Finite(x) => x.check(),
            ExtendedLength::Infinite => Ok(()),
        }
    }

    fn normalized(&self) -> Self {
        match self {
            ExtendedLength::Finite(x) => ExtendedLength::Finite(x.normalized()),
            ExtendedLength::Infinite => ExtendedLength::Infinite,
        }
    }

    fn is_infinite(&self) -> bool {
        matches!(self, ExtendedLength::Infinite)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_absorbs() {
        let inf = ExtendedLength::Infinite;
        let t = ExtendedLength::Finite(2.0);
        assert_eq!(inf.combine(&t), inf);
        assert_eq!(t.combine(&inf), inf);
        assert_eq!(t.combine(&t), ExtendedLength::Finite(4.0));
        assert!(ExtendedLength::zero().is_zero());
    }

    #[test]
    fn negative_zero_normalizes() {
        assert_eq!((-0.0f64).normalized().to_bits(), 0.0f64.to_bits());
        assert_eq!((-0.0f64).encode(), "0");
        assert!((-1.0f64).check().is_err());
        assert!(f64::NAN.check().is_err());
        assert!(f64::INFINITY.check().is_err());
        assert!(ExtendedLength::Infinite.check().is_ok());
    }
}
