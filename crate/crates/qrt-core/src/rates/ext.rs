use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// A non-negative rational or +∞.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExtRational {
    Finite(BigRational),
    Infinite,
}

impl ExtRational {
    pub fn zero() -> Self {
        ExtRational::Finite(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::ratio(1, 1)
    }

    pub fn ratio(num: u64, den: u64) -> Self {
        ExtRational::Finite(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtRational::Infinite)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtRational::Finite(r) if r.is_zero())
    }

    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            ExtRational::Finite(r) => Some(r),
            ExtRational::Infinite => None,
        }
    }

    /// Product with 0·∞ = 0.
    pub fn mul(&self, other: &Self) -> Self {
        match (self, other) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => ExtRational::Finite(a * b),
            (x, y) if x.is_zero() || y.is_zero() => Self::zero(),
            _ => ExtRational::Infinite,
        }
    }

    /// 1/x with 1/0 = ∞ and 1/∞ = 0.
    pub fn recip(&self) -> Self {
        match self {
            ExtRational::Infinite => Self::zero(),
            ExtRational::Finite(r) if r.is_zero() => ExtRational::Infinite,
            ExtRational::Finite(r) => ExtRational::Finite(r.recip()),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtRational::Infinite => f64::INFINITY,
            ExtRational::Finite(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }
}

impl PartialOrd for ExtRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtRational::Infinite, ExtRational::Infinite) => Ordering::Equal,
            (ExtRational::Infinite, _) => Ordering::Greater,
            (_, ExtRational::Infinite) => Ordering::Less,
            (ExtRational::Finite(a), ExtRational::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Infinite => f.write_str("inf"),
            ExtRational::Finite(r) if r.is_integer() => write!(f, "{}", r.numer()),
            ExtRational::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}
