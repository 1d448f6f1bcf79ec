//! Exact rational scalars with an extended-real wrapper.
//!
//! [`Rational`] keeps values that fit in `i64/i64` on a small, allocation-free
//! path and promotes to arbitrary precision on overflow. The representation is
//! canonical (a value is `Small` whenever it fits), so structural equality and
//! hashing agree with numeric equality.
//!
//! [`ExtRational`] adds `-inf` and `+inf`. Distances use `+inf` for
//! unreachable vertices; `-inf` only ever appears as an embedded point
//! coordinate.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

use crate::error::Error;

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    // Invariant: numerator != i64::MIN, so negation never overflows.
    Small(Ratio<i64>),
    Big(Box<BigRational>),
}

/// An exact rational number.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational(Repr);

impl Rational {
    pub fn zero() -> Self {
        Rational(Repr::Small(Ratio::from_integer(0)))
    }

    pub fn one() -> Self {
        Rational(Repr::Small(Ratio::from_integer(1)))
    }

    pub fn from_integer(v: i64) -> Self {
        Self::from_small(Ratio::from_integer(v))
    }

    /// `numer / denom`; panics on a zero denominator.
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Self::from_big(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    fn from_small(r: Ratio<i64>) -> Self {
        if *r.numer() == i64::MIN {
            Rational(Repr::Big(Box::new(to_big(&r))))
        } else {
            Rational(Repr::Small(r))
        }
    }

    pub fn from_big(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) if n != i64::MIN => Rational(Repr::Small(Ratio::new_raw(n, d))),
            _ => Rational(Repr::Big(Box::new(r))),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(r) => to_big(r),
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => r.is_zero(),
            Repr::Big(b) => b.is_zero(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => r.is_positive(),
            Repr::Big(b) => b.is_positive(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => r.is_negative(),
            Repr::Big(b) => b.is_negative(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => r.is_integer(),
            Repr::Big(b) => b.is_integer(),
        }
    }

    /// Lossy conversion, for reporting and sampling scales only.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(r) => *r.numer() as f64 / *r.denom() as f64,
            Repr::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    fn binop(
        &self,
        rhs: &Self,
        small: impl Fn(&Ratio<i64>, &Ratio<i64>) -> Option<Ratio<i64>>,
        big: impl Fn(BigRational, BigRational) -> BigRational,
    ) -> Self {
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &rhs.0) {
            if let Some(r) = small(a, b) {
                return Self::from_small(r);
            }
        }
        Self::from_big(big(self.to_big(), rhs.to_big()))
    }
}

fn to_big(r: &Ratio<i64>) -> BigRational {
    BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

impl Default for Rational {
    fn default() -> Self {
        Self::zero()
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add<&Rational> for &Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        self.binop(rhs, |a, b| a.checked_add(b), |a, b| a + b)
    }
}

impl Sub<&Rational> for &Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        self.binop(rhs, |a, b| a.checked_sub(b), |a, b| a - b)
    }
}

impl Mul<&Rational> for &Rational {
    type Output = Rational;
    fn mul(self, rhs: &Rational) -> Rational {
        self.binop(rhs, |a, b| a.checked_mul(b), |a, b| a * b)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match &self.0 {
            Repr::Small(r) => Rational::from_small(-*r),
            Repr::Big(b) => Rational::from_big(-(**b).clone()),
        }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| &acc + &x)
    }
}

impl<'a> std::iter::Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| &acc + x)
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::from_integer(v)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(r) if r.denom().is_one() => write!(f, "{}", r.numer()),
            Repr::Small(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Repr::Big(b) if b.denom().is_one() => write!(f, "{}", b.numer()),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Accepts integers (`-12`), decimals (`3.25`) and fractions (`7/3`).
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Literal(s.to_string());
        if let Some((num, den)) = s.split_once('/') {
            let num = parse_int(num).ok_or_else(bad)?;
            let den = parse_int(den).ok_or_else(bad)?;
            if den.is_zero() {
                return Err(bad());
            }
            return Ok(Rational::from_big(BigRational::new(num, den)));
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let negative = int.starts_with('-');
            let whole = parse_int(int).ok_or_else(bad)?;
            let scale = num_traits::pow(BigInt::from(10), frac.len());
            let frac: BigInt = frac.parse().map_err(|_| bad())?;
            let mag = whole.abs() * &scale + frac;
            let numer = if negative { -mag } else { mag };
            return Ok(Rational::from_big(BigRational::new(numer, scale)));
        }
        let v = parse_int(s).ok_or_else(bad)?;
        Ok(Rational::from_big(BigRational::from_integer(v)))
    }
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// A rational extended with `-inf` and `+inf`.
///
/// Variant order gives the total order: `-inf` < every finite value < `+inf`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtRational {
    NegInfinity,
    Finite(Rational),
    PosInfinity,
}

impl ExtRational {
    pub fn zero() -> Self {
        ExtRational::Finite(Rational::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtRational::Finite(_))
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtRational::Finite(r) => Some(r),
            _ => None,
        }
    }

    /// Sum, or an error for `+inf + -inf`.
    pub fn try_add(&self, rhs: &ExtRational) -> Result<ExtRational, Error> {
        use ExtRational::*;
        match (self, rhs) {
            (Finite(a), Finite(b)) => Ok(Finite(a + b)),
            (PosInfinity, NegInfinity) | (NegInfinity, PosInfinity) => {
                Err(Error::Arithmetic("inf - inf is undefined"))
            }
            (PosInfinity, _) | (_, PosInfinity) => Ok(PosInfinity),
            (NegInfinity, _) | (_, NegInfinity) => Ok(NegInfinity),
        }
    }

    /// Difference, or an error for `inf - inf` with matching signs.
    pub fn try_sub(&self, rhs: &ExtRational) -> Result<ExtRational, Error> {
        self.try_add(&-rhs)
    }
}

impl From<Rational> for ExtRational {
    fn from(r: Rational) -> Self {
        ExtRational::Finite(r)
    }
}

impl From<i64> for ExtRational {
    fn from(v: i64) -> Self {
        ExtRational::Finite(Rational::from_integer(v))
    }
}

impl Neg for &ExtRational {
    type Output = ExtRational;
    fn neg(self) -> ExtRational {
        match self {
            ExtRational::NegInfinity => ExtRational::PosInfinity,
            ExtRational::Finite(r) => ExtRational::Finite(-r),
            ExtRational::PosInfinity => ExtRational::NegInfinity,
        }
    }
}

/// Panics on `inf - inf`; use [`ExtRational::try_add`] where that can occur.
impl Add<&ExtRational> for &ExtRational {
    type Output = ExtRational;
    fn add(self, rhs: &ExtRational) -> ExtRational {
        self.try_add(rhs).expect("inf - inf")
    }
}

/// Panics on `inf - inf`; use [`ExtRational::try_sub`] where that can occur.
impl Sub<&ExtRational> for &ExtRational {
    type Output = ExtRational;
    fn sub(self, rhs: &ExtRational) -> ExtRational {
        self.try_sub(rhs).expect("inf - inf")
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::NegInfinity => f.write_str("-inf"),
            ExtRational::Finite(r) => fmt::Display::fmt(r, f),
            ExtRational::PosInfinity => f.write_str("inf"),
        }
    }
}

impl fmt::Debug for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn parses_literals_exactly() {
        assert_eq!(q("1/3"), Rational::new(1, 3));
        assert_eq!(q("0.25"), Rational::new(1, 4));
        assert_eq!(q("-2.5"), Rational::new(-5, 2));
        assert_eq!(q("-0.5"), Rational::new(-1, 2));
        assert_eq!(q("6/4"), Rational::new(3, 2));
        assert_eq!(q("17"), Rational::from_integer(17));
        assert_eq!(q("1/3").to_string(), "1/3");
        assert_eq!(q("4/2").to_string(), "2");
        for bad in ["", "x", "1/0", "1.", ".5", "1/2/3", "--1", "1e5", "1.-5"] {
            assert!(bad.parse::<Rational>().is_err(), "{bad:?} accepted");
        }
    }

    #[test]
    fn promotes_on_overflow_and_demotes_back() {
        let big = Rational::from_integer(i64::MAX);
        let sum = &big + &big;
        assert_eq!(sum.to_string(), "18446744073709551614");
        let back = &sum - &big;
        assert_eq!(back, big);
        assert!(matches!(back.0, Repr::Small(_)));
        let min = Rational::from_integer(i64::MIN);
        assert_eq!((-&min).to_string(), "9223372036854775808");
        assert!(min < Rational::zero());
        let tiny = Rational::new(1, i64::MAX);
        assert!((&tiny * &tiny).is_positive());
    }

    #[test]
    fn infinity_rules() {
        let inf = ExtRational::PosInfinity;
        let five = ExtRational::from(5);
        assert_eq!(&inf + &five, inf);
        assert_eq!(&inf + &inf, inf);
        assert!(inf.try_sub(&inf).is_err());
        assert!(ExtRational::NegInfinity.try_add(&inf).is_err());
        assert!(ExtRational::NegInfinity < ExtRational::from(i64::MIN));
        assert!(ExtRational::from(i64::MAX) < inf);
        assert_eq!(&ExtRational::NegInfinity - &five, ExtRational::NegInfinity);
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        prop_oneof![
            (-1000i64..1000, 1i64..50).prop_map(|(n, d)| Rational::new(n, d)),
            (any::<i64>(), 1i64..i64::MAX).prop_map(|(n, d)| Rational::new(n, d)),
        ]
    }

    proptest! {
        #[test]
        fn addition_is_associative(a in arb_rational(), b in arb_rational(), c in arb_rational()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        }

        #[test]
        fn add_then_sub_is_identity(a in arb_rational(), b in arb_rational()) {
            prop_assert_eq!(&(&a + &b) - &b, a);
        }

        #[test]
        fn order_matches_big_rationals(a in arb_rational(), b in arb_rational()) {
            prop_assert_eq!(a.cmp(&b), a.to_big().cmp(&b.to_big()));
        }

        #[test]
        fn display_round_trips(a in arb_rational()) {
            prop_assert_eq!(a.to_string().parse::<Rational>().unwrap(), a);
        }
    }
}
