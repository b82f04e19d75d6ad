use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rational::Rational;

/// Coefficient field for truncated Laurent series.
///
/// Both implementations are exact. [`Rational`] is the reference field;
/// [`Mod61`] is its image modulo the Mersenne prime `2^61 - 1`, used when
/// rational heights make long evolutions impractical.
pub trait Field: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    /// Short tag written into exported reports.
    const NAME: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;

    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negated(&self) -> Self;
    /// Multiplicative inverse, `None` for zero.
    fn recip(&self) -> Option<Self>;

    /// Image of a rational number, `None` when its denominator is not
    /// invertible in the field.
    fn from_rational(r: &Rational) -> Option<Self>;

    /// `(numerator, denominator)` pair used by the JSON series format.
    fn to_fraction(&self) -> (BigInt, BigInt);

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&Rational::from_integer(v)).expect("integers embed in every field")
    }
}

/// `2^61 - 1`.
pub const MERSENNE_61: u64 = (1 << 61) - 1;

/// Element of the prime field `Z / (2^61 - 1)`, always reduced.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Mod61(u64);

impl Mod61 {
    pub fn new(v: u64) -> Self {
        Mod61(reduce128(v as u128))
    }

    pub fn residue(self) -> u64 {
        self.0
    }

    fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Mod61(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_raw(base);
            }
            base = base.mul_raw(base);
            e >>= 1;
        }
        acc
    }

    #[inline]
    fn mul_raw(self, rhs: Self) -> Self {
        Mod61(reduce128(self.0 as u128 * rhs.0 as u128))
    }
}

#[inline]
fn reduce128(x: u128) -> u64 {
    // 2^61 = 1 (mod p): fold the high bits twice.
    let p = MERSENNE_61 as u128;
    let folded = (x & p) + (x >> 61);
    let folded = (folded & p) + (folded >> 61);
    let r = folded as u64;
    if r >= MERSENNE_61 {
        r - MERSENNE_61
    } else {
        r
    }
}

fn bigint_mod61(v: &BigInt) -> u64 {
    let p = BigInt::from(MERSENNE_61);
    let r = v.abs() % &p;
    let r = r.to_u64().expect("residue fits in u64");
    if v.is_negative() && r != 0 {
        MERSENNE_61 - r
    } else {
        r
    }
}

impl fmt::Debug for Mod61 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}~", self.0)
    }
}

impl fmt::Display for Mod61 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Field for Mod61 {
    const NAME: &'static str = "mod-2^61-1";

    fn zero() -> Self {
        Mod61(0)
    }

    fn one() -> Self {
        Mod61(1)
    }

    fn is_zero(&self) -> bool {
        self.0 == 0
    }

    #[inline]
    fn plus(&self, rhs: &Self) -> Self {
        let s = self.0 + rhs.0;
        Mod61(if s >= MERSENNE_61 { s - MERSENNE_61 } else { s })
    }

    #[inline]
    fn minus(&self, rhs: &Self) -> Self {
        Mod61(if self.0 >= rhs.0 {
            self.0 - rhs.0
        } else {
            self.0 + MERSENNE_61 - rhs.0
        })
    }

    #[inline]
    fn times(&self, rhs: &Self) -> Self {
        self.mul_raw(*rhs)
    }

    fn negated(&self) -> Self {
        Mod61(if self.0 == 0 { 0 } else { MERSENNE_61 - self.0 })
    }

    fn recip(&self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            Some(self.pow(MERSENNE_61 - 2))
        }
    }

    fn from_rational(r: &Rational) -> Option<Self> {
        let num = Mod61(bigint_mod61(r.numer()));
        let den = Mod61(bigint_mod61(r.denom()));
        den.recip().map(|d| num.times(&d))
    }

    fn to_fraction(&self) -> (BigInt, BigInt) {
        (BigInt::from(self.0), BigInt::one())
    }
}

impl Field for Rational {
    const NAME: &'static str = "rational";

    fn zero() -> Self {
        Rational::from_integer(0)
    }

    fn one() -> Self {
        Rational::from_integer(1)
    }

    fn is_zero(&self) -> bool {
        self.inner().is_zero()
    }

    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn negated(&self) -> Self {
        -self
    }

    fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Rational::from_big(self.inner().recip()))
        }
    }

    fn from_rational(r: &Rational) -> Option<Self> {
        Some(r.clone())
    }

    fn to_fraction(&self) -> (BigInt, BigInt) {
        (self.numer().clone(), self.denom().clone())
    }
}
