//! Exact rationals with p-local structure.
//!
//! Every scalar in the crate is a [`Rational`]. Membership in the local ring
//! Z_(p) and its unit group is decided by [`vp`]; solver state for the
//! integrality-completion algorithm is a [`PadicBall`].

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational number in lowest terms.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("the p-adic ball is empty")]
    EmptyBall,
    #[error("malformed rational literal {0:?}")]
    Parse(String),
}

/// A validated prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self, ArithError> {
        if p < 2 {
            return Err(ArithError::NotPrime(p));
        }
        let mut d = 2u64;
        while d * d <= p {
            if p.is_multiple_of(d) {
                return Err(ArithError::NotPrime(p));
            }
            d += 1;
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn as_bigint(self) -> BigInt {
        BigInt::from(self.0)
    }

    /// p^k as a rational; k may be negative.
    pub fn power(self, k: i64) -> Rational {
        let base = BigInt::from(self.0).pow(k.unsigned_abs() as u32);
        if k >= 0 {
            Rational::from_integer(base)
        } else {
            Rational::new(BigInt::one(), base)
        }
    }

    /// p^k as an integer, k ≥ 0.
    pub fn int_power(self, k: u32) -> BigInt {
        BigInt::from(self.0).pow(k)
    }

    /// p^k as a machine integer, when it fits.
    pub fn small_power(self, k: u32) -> Option<u64> {
        self.0.checked_pow(k)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A p-adic valuation: an integer, or +∞ for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
            (Valuation::Infinite, _) => Ordering::Greater,
            (_, Valuation::Infinite) => Ordering::Less,
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "+inf"),
        }
    }
}

/// Exponent of p in a nonzero integer.
pub fn vp_integer(n: &BigInt, p: Prime) -> u64 {
    debug_assert!(!n.is_zero());
    if let Some(mut m) = n.abs().to_u64() {
        let mut v = 0;
        while m % p.0 == 0 {
            m /= p.0;
            v += 1;
        }
        return v;
    }
    if p.0 == 2 {
        return n.trailing_zeros().unwrap_or(0);
    }
    let pb = p.as_bigint();
    let mut m = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// The p-adic valuation of a rational.
pub fn vp(x: &Rational, p: Prime) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let num = vp_integer(x.numer(), p) as i64;
    let den = vp_integer(x.denom(), p) as i64;
    Valuation::Finite(num - den)
}

/// [`vp`] for an unvalidated prime.
pub fn vp_checked(x: &Rational, p: u64) -> Result<Valuation, ArithError> {
    Ok(vp(x, Prime::new(p)?))
}

/// Whether `x` lies in Z_(p). Only the denominator matters.
pub fn is_p_integral(x: &Rational, p: Prime) -> bool {
    x.denom().is_one() || !x.denom().is_multiple_of(&p.as_bigint())
}

/// Whether `x` is a unit of Z_(p).
pub fn is_p_unit(x: &Rational, p: Prime) -> bool {
    vp(x, p) == Valuation::Finite(0)
}

/// Reduction of a p-integral rational modulo p^k, as an integer in [0, p^k).
pub fn reduce_mod_power(x: &Rational, p: Prime, k: u32) -> Option<BigInt> {
    if !is_p_integral(x, p) {
        return None;
    }
    let modulus = p.int_power(k);
    if modulus.is_one() {
        return Some(BigInt::zero());
    }
    let inv = mod_inverse(x.denom(), &modulus)?;
    Some((x.numer().mod_floor(&modulus) * inv).mod_floor(&modulus))
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// Canonical text form: "num/den", den omitted when 1, sign on the numerator.
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses the canonical text form. Non-reduced input is accepted and reduced;
/// a zero, signed or missing denominator is rejected.
pub fn parse_rational(s: &str) -> Result<Rational, ArithError> {
    let bad = || ArithError::Parse(s.to_string());
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a, Some(b)),
        None => (t, None),
    };
    let num = BigInt::from_str(num).map_err(|_| bad())?;
    let den = match den {
        Some(d) => {
            if d.starts_with('-') || d.starts_with('+') {
                return Err(bad());
            }
            BigInt::from_str(d).map_err(|_| bad())?
        }
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Serde adapter storing a rational as its canonical string.
pub mod rational_string {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The closed p-adic ball {x : vp(x − center) ≥ radius}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicBall {
    center: Rational,
    radius: i64,
}

impl PadicBall {
    pub fn new(center: Rational, radius: i64) -> Self {
        PadicBall { center, radius }
    }

    /// The ball of solutions of vp(q·x + r) ≥ 0 for q ≠ 0.
    pub fn from_affine(q: &Rational, r: &Rational, p: Prime) -> Self {
        let vq = vp(q, p).finite().expect("nonzero slope");
        PadicBall::new(-(r / q), -vq)
    }

    pub fn center(&self) -> &Rational {
        &self.center
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn contains(&self, x: &Rational, p: Prime) -> bool {
        vp(&(x - &self.center), p) >= Valuation::Finite(self.radius)
    }

    pub fn contains_zero(&self, p: Prime) -> bool {
        vp(&self.center, p) >= Valuation::Finite(self.radius)
    }

    /// Set equality: same radius and mutually contained centers.
    pub fn same_set(&self, other: &PadicBall, p: Prime) -> bool {
        self.radius == other.radius && self.contains(&other.center, p)
    }
}

impl fmt::Display for PadicBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{x : v(x - {}) >= {}}}", format_rational(&self.center), self.radius)
    }
}

/// Intersection of finitely many balls; `None` when empty.
pub fn ball_intersect(balls: &[PadicBall], p: Prime) -> Option<PadicBall> {
    let mut iter = balls.iter();
    let mut acc = iter.next()?.clone();
    for b in iter {
        let (small, large) = if b.radius >= acc.radius { (b, &acc) } else { (&acc, b) };
        if !large.contains(&small.center, p) {
            return None;
        }
        acc = small.clone();
    }
    Some(acc)
}

/// The digits of the center strictly below the radius: the unique element
/// Σ_{v ≤ j < k} c_j p^j of the ball with c_j ∈ [0, p). Zero when 0 is in the ball.
pub fn canonical_pick(ball: &PadicBall, p: Prime) -> Rational {
    let k = ball.radius;
    let v = match vp(&ball.center, p) {
        Valuation::Infinite => return Rational::zero(),
        Valuation::Finite(v) if v >= k => return Rational::zero(),
        Valuation::Finite(v) => v,
    };
    let unit = &ball.center * p.power(-v);
    let digits = reduce_mod_power(&unit, p, (k - v) as u32).expect("unit part is integral");
    Rational::from_integer(digits) * p.power(v)
}

/// The `j`-th representative after the canonical one: canonical_pick + j·p^k.
pub fn alternative_pick(ball: &PadicBall, p: Prime, j: u32) -> Rational {
    canonical_pick(ball, p) + int(j as i64) * p.power(ball.radius)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two() -> Prime {
        Prime::new(2).unwrap()
    }

    #[test]
    fn valuations() {
        assert_eq!(vp(&int(12), two()), Valuation::Finite(2));
        assert_eq!(vp_checked(&int(0), 3).unwrap(), Valuation::Infinite);
        assert_eq!(vp(&ratio(3, 8), two()), Valuation::Finite(-3));
        assert_eq!(vp_checked(&int(4), 4), Err(ArithError::NotPrime(4)));
        let big = Rational::from_integer(BigInt::from(3).pow(90) * 7);
        assert_eq!(vp(&big, Prime::new(3).unwrap()), Valuation::Finite(90));
        let big2 = Rational::new(BigInt::one(), BigInt::from(2).pow(100));
        assert_eq!(vp(&big2, two()), Valuation::Finite(-100));
    }

    #[test]
    fn integrality() {
        assert!(!is_p_integral(&ratio(3, 8), two()));
        assert!(!is_p_unit(&ratio(3, 8), two()));
        assert!(is_p_unit(&ratio(3, 5), two()));
        assert!(is_p_integral(&ratio(3, 5), two()));
    }

    #[test]
    fn ball_examples() {
        let p = two();
        let a = PadicBall::new(int(0), 0);
        let b = PadicBall::new(int(2), 1);
        assert_eq!(ball_intersect(&[a.clone(), b.clone()], p), Some(b.clone()));
        let c = PadicBall::new(int(0), 1);
        let d = PadicBall::new(int(1), 1);
        assert_eq!(ball_intersect(&[c, d], p), None);
        assert_eq!(ball_intersect(std::slice::from_ref(&a), p), Some(a));
    }

    #[test]
    fn picks() {
        let p = two();
        assert_eq!(canonical_pick(&PadicBall::new(int(5), 3), p), int(5));
        assert_eq!(canonical_pick(&PadicBall::new(int(13), 3), p), int(5));
        assert_eq!(canonical_pick(&PadicBall::new(int(0), 1), p), int(0));
        assert_eq!(canonical_pick(&PadicBall::new(ratio(3, 2), 0), p), ratio(1, 2));
        let q = Prime::new(3).unwrap();
        let ball = PadicBall::new(ratio(-7, 9), 1);
        let pick = canonical_pick(&ball, q);
        assert!(ball.contains(&pick, q));
        assert_eq!(alternative_pick(&ball, q, 2), pick + int(6));
    }

    #[test]
    fn text_round_trip() {
        for s in ["0", "-3/4", "7", "12345678901234567890123/2"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
        assert_eq!(parse_rational("4/6").unwrap(), ratio(2, 3));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1/-2").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn reductions() {
        let p = Prime::new(3).unwrap();
        assert_eq!(reduce_mod_power(&ratio(1, 2), p, 1), Some(BigInt::from(2)));
        assert_eq!(reduce_mod_power(&ratio(1, 3), p, 1), None);
    }
}
