//! Exact coordinates of the form `q + r·√2` with rational `q`, `r`.
//!
//! Lattice atoms are rational, so `r = 0` for every element a level
//! enumeration produces. A nonzero `r` is how an irrational translate is
//! carried through group arithmetic without losing the ability to decide
//! membership in rational sets.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

pub type Rational = Ratio<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExactReal {
    pub rational: Rational,
    pub sqrt2: Rational,
}

impl ExactReal {
    pub fn zero() -> Self {
        Self::from_rational(Rational::from_integer(0))
    }

    pub fn from_rational(q: Rational) -> Self {
        Self {
            rational: q,
            sqrt2: Rational::from_integer(0),
        }
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::from_rational(Rational::new(num, den))
    }

    pub fn with_sqrt2(q: Rational, r: Rational) -> Self {
        Self {
            rational: q,
            sqrt2: r,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.sqrt2 == Rational::from_integer(0)
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(self.rational) + ratio_to_f64(self.sqrt2) * std::f64::consts::SQRT_2
    }

    /// Largest integer not exceeding the value. Exact for rationals; for
    /// surds the floating approximation decides, which is safe because a
    /// surd with nonzero `r` is never an integer.
    pub fn floor(&self) -> i64 {
        if self.is_rational() {
            self.rational.floor().to_integer()
        } else {
            self.to_f64().floor() as i64
        }
    }

    /// Reduction into `[0, 1)`.
    pub fn fract(&self) -> Self {
        let k = self.floor();
        Self::with_sqrt2(self.rational - Rational::from_integer(k), self.sqrt2)
    }

    /// True when `self * scale` is an integer (and `self` is rational).
    pub fn is_multiple_of_inverse(&self, scale: i64) -> bool {
        self.is_rational() && (self.rational * Rational::from_integer(scale)).is_integer()
    }
}

pub(crate) fn ratio_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl Add for ExactReal {
    type Output = ExactReal;
    fn add(self, rhs: ExactReal) -> ExactReal {
        ExactReal::with_sqrt2(self.rational + rhs.rational, self.sqrt2 + rhs.sqrt2)
    }
}

impl Sub for ExactReal {
    type Output = ExactReal;
    fn sub(self, rhs: ExactReal) -> ExactReal {
        self + (-rhs)
    }
}

impl Neg for ExactReal {
    type Output = ExactReal;
    fn neg(self) -> ExactReal {
        ExactReal::with_sqrt2(-self.rational, -self.sqrt2)
    }
}

impl fmt::Display for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", self.rational)
        } else {
            write!(f, "{} + {}·√2", self.rational, self.sqrt2)
        }
    }
}
