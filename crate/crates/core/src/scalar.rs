//! Nonzero complex scalars with an exact representation for roots of unity.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Zero};

/// A value of ℂ×. `Phase(r)` is exactly `exp(2πi·r)` with `r` reduced to `[0,1)`;
/// any arithmetic that mixes in a `Num` falls back to doubles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scalar {
    Phase(Rational64),
    Num(Complex64),
}

/// Reduce a rational to the half-open unit interval.
pub fn frac(r: Rational64) -> Rational64 {
    let fl = r.numer().div_floor(r.denom());
    r - Rational64::from_integer(fl)
}

impl Scalar {
    pub fn one() -> Self {
        Scalar::Phase(Rational64::zero())
    }

    pub fn phase(r: Rational64) -> Self {
        Scalar::Phase(frac(r))
    }

    /// `exp(2πi·p/q)`.
    pub fn root(p: i64, q: i64) -> Self {
        Scalar::phase(Rational64::new(p, q))
    }

    pub fn num(z: Complex64) -> Self {
        Scalar::Num(z)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Phase(_))
    }

    pub fn to_c64(&self) -> Complex64 {
        match self {
            Scalar::Phase(r) => {
                let r = *r;
                // Hit the common roots exactly so promoted values stay clean.
                let q = *r.denom();
                let p = *r.numer();
                match q {
                    1 => Complex64::new(1.0, 0.0),
                    2 => Complex64::new(-1.0, 0.0),
                    4 if p == 1 => Complex64::new(0.0, 1.0),
                    4 => Complex64::new(0.0, -1.0),
                    _ => {
                        let a = TAU * (p as f64) / (q as f64);
                        Complex64::new(a.cos(), a.sin())
                    }
                }
            }
            Scalar::Num(z) => *z,
        }
    }

    pub fn mul(self, other: Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Phase(a), Scalar::Phase(b)) => Scalar::phase(a + b),
            (a, b) => Scalar::Num(a.to_c64() * b.to_c64()),
        }
    }

    pub fn inv(self) -> Scalar {
        match self {
            Scalar::Phase(a) => Scalar::phase(-a),
            Scalar::Num(z) => Scalar::Num(z.inv()),
        }
    }

    pub fn div(self, other: Scalar) -> Scalar {
        self.mul(other.inv())
    }

    /// Integer power; negative exponents invert.
    pub fn powi(self, n: i64) -> Scalar {
        match self {
            Scalar::Phase(a) => Scalar::phase(a * Rational64::from_integer(n)),
            Scalar::Num(z) => Scalar::Num(z.powi(n as i32)),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Phase(_) => false,
            Scalar::Num(z) => z.is_zero(),
        }
    }

    /// `|self − 1|`; exactly zero for the exact unit.
    pub fn distance_to_one(&self) -> f64 {
        match self {
            Scalar::Phase(a) if a.is_zero() => 0.0,
            _ => (self.to_c64() - Complex64::one()).norm(),
        }
    }

    /// `|self/other − 1|`, the scale-free mismatch used by all multiplicative checks.
    pub fn ratio_residual(&self, other: &Scalar) -> f64 {
        self.div(*other).distance_to_one()
    }
}

impl From<Complex64> for Scalar {
    fn from(z: Complex64) -> Self {
        Scalar::Num(z)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Phase(r) if r.is_zero() => write!(f, "1"),
            Scalar::Phase(r) => write!(f, "exp(2*pi*i*{})", r),
            Scalar::Num(z) => write!(f, "{}{:+}i", z.re, z.im),
        }
    }
}

/// Product of a list of scalars, kept exact when every factor is exact.
pub fn product<I: IntoIterator<Item = Scalar>>(it: I) -> Scalar {
    it.into_iter().fold(Scalar::one(), Scalar::mul)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phases_compose_exactly() {
        let a = Scalar::root(1, 3);
        let b = Scalar::root(2, 3);
        assert_eq!(a.mul(b), Scalar::one());
        assert_eq!(Scalar::root(1, 2).powi(2), Scalar::one());
        assert_eq!(Scalar::root(-1, 4), Scalar::root(3, 4));
    }

    #[test]
    fn sign_promotes_exactly() {
        assert_eq!(Scalar::root(1, 2).to_c64(), Complex64::new(-1.0, 0.0));
        assert_eq!(Scalar::root(3, 4).to_c64(), Complex64::new(0.0, -1.0));
    }

    #[test]
    fn mixed_arithmetic_promotes() {
        let z = Scalar::root(1, 2).mul(Scalar::Num(Complex64::new(2.0, 0.0)));
        assert_eq!(z, Scalar::Num(Complex64::new(-2.0, 0.0)));
    }

    #[test]
    fn unit_residual_is_exact_zero() {
        assert_eq!(Scalar::root(5, 5).distance_to_one(), 0.0);
        assert!(Scalar::root(1, 2).distance_to_one() > 1.9);
    }
}
