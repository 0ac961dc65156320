//! Exact numbers of the form `(a + b·√3) / c`.
//!
//! Values whose canonical parts fit in `i64` are kept inline and combined in
//! `i128`; anything larger spills into `BigInt`. The representation is
//! canonical (reduced, positive denominator, inline whenever possible), so the
//! derived `Eq` and `Hash` are value equality.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

const SQRT3_F64: f64 = 1.732_050_807_568_877_2;

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small(i64, i64, i64),
    Big(Box<(BigInt, BigInt, BigInt)>),
}

/// An element of the field Q(√3).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Coord(Repr);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid number `{0}`")]
pub struct CoordParseError(pub String);

fn fits(v: i128) -> Option<i64> {
    i64::try_from(v).ok()
}

impl Coord {
    pub fn zero() -> Coord {
        Coord(Repr::Small(0, 0, 1))
    }

    pub fn one() -> Coord {
        Coord(Repr::Small(1, 0, 1))
    }

    pub fn int(v: i64) -> Coord {
        Coord(Repr::Small(v, 0, 1))
    }

    /// `p / q`; panics when `q == 0`.
    pub fn ratio(p: i64, q: i64) -> Coord {
        Coord::from_i128(p as i128, 0, q as i128)
    }

    pub fn sqrt3() -> Coord {
        Coord(Repr::Small(0, 1, 1))
    }

    /// `(a + b√3) / c`; panics when `c == 0`.
    pub fn new(a: BigInt, b: BigInt, c: BigInt) -> Coord {
        Coord::from_big(a, b, c)
    }

    fn from_i128(a: i128, b: i128, c: i128) -> Coord {
        assert!(c != 0, "zero denominator");
        if a == i128::MIN || b == i128::MIN || c == i128::MIN {
            return Coord::from_big(a.into(), b.into(), c.into());
        }
        let (mut a, mut b, mut c) = if c < 0 { (-a, -b, -c) } else { (a, b, c) };
        if b == 0 {
            if a == 0 {
                return Coord::zero();
            }
            let g = a.gcd(&c);
            if g > 1 {
                a /= g;
                c /= g;
            }
        } else {
            let g = a.gcd(&b).gcd(&c);
            if g > 1 {
                a /= g;
                b /= g;
                c /= g;
            }
        }
        match (fits(a), fits(b), fits(c)) {
            (Some(a), Some(b), Some(c)) => Coord(Repr::Small(a, b, c)),
            _ => Coord(Repr::Big(Box::new((a.into(), b.into(), c.into())))),
        }
    }

    fn from_big(a: BigInt, b: BigInt, c: BigInt) -> Coord {
        assert!(!c.is_zero(), "zero denominator");
        let (mut a, mut b, mut c) = if c.is_negative() { (-a, -b, -c) } else { (a, b, c) };
        if a.is_zero() && b.is_zero() {
            return Coord::zero();
        }
        let g = a.gcd(&b).gcd(&c);
        if !g.is_one() {
            a /= &g;
            b /= &g;
            c /= &g;
        }
        match (a.to_i64(), b.to_i64(), c.to_i64()) {
            (Some(a), Some(b), Some(c)) => Coord(Repr::Small(a, b, c)),
            _ => Coord(Repr::Big(Box::new((a, b, c)))),
        }
    }

    /// The canonical parts `(a, b, c)`.
    pub fn parts(&self) -> (BigInt, BigInt, BigInt) {
        match &self.0 {
            Repr::Small(a, b, c) => ((*a).into(), (*b).into(), (*c).into()),
            Repr::Big(p) => (p.0.clone(), p.1.clone(), p.2.clone()),
        }
    }

    pub fn is_rational(&self) -> bool {
        match &self.0 {
            Repr::Small(_, b, _) => *b == 0,
            Repr::Big(p) => p.1.is_zero(),
        }
    }

    /// Numerator and denominator when the value is rational and fits `i64`.
    pub fn as_small_ratio(&self) -> Option<(i64, i64)> {
        match &self.0 {
            Repr::Small(a, 0, c) => Some((*a, *c)),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, 0, _))
    }

    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Small(a, b, _) => sign_small(*a, *b),
            Repr::Big(p) => sign_big(&p.0, &p.1),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Coord {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Coord {
        match &self.0 {
            Repr::Small(a, b, c) => {
                assert!(*a != 0 || *b != 0, "division by zero");
                let (a, b, c) = (*a as i128, *b as i128, *c as i128);
                if b == 0 {
                    return Coord::from_i128(c, 0, a);
                }
                match (b * b).checked_mul(3).and_then(|t| (a * a).checked_sub(t)) {
                    Some(den) => Coord::from_i128(c * a, -c * b, den),
                    None => self.recip_big(),
                }
            }
            Repr::Big(_) => self.recip_big(),
        }
    }

    fn recip_big(&self) -> Coord {
        let (a, b, c) = self.parts();
        assert!(!(a.is_zero() && b.is_zero()), "division by zero");
        let den = &a * &a - BigInt::from(3) * &b * &b;
        Coord::from_big(&c * &a, -(&c * &b), den)
    }

    pub fn pow(&self, e: u32) -> Coord {
        let mut out = Coord::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(a, b, c) => (*a as f64 + *b as f64 * SQRT3_F64) / *c as f64,
            Repr::Big(p) => {
                let c = p.2.to_f64().unwrap_or(f64::INFINITY);
                (p.0.to_f64().unwrap_or(f64::NAN) + p.1.to_f64().unwrap_or(f64::NAN) * SQRT3_F64) / c
            }
        }
    }

    pub fn min(self, other: Coord) -> Coord {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Coord) -> Coord {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Largest integer not above a rational value; `None` for irrational values.
    pub fn floor_rational(&self) -> Option<BigInt> {
        let (a, b, c) = self.parts();
        if !b.is_zero() {
            return None;
        }
        Some(a.div_floor(&c))
    }
}

fn sign_small(a: i64, b: i64) -> i32 {
    let (sa, sb) = (a.signum() as i32, b.signum() as i32);
    if sb == 0 || sa == sb {
        return if sa == 0 { sb } else { sa };
    }
    if sa == 0 {
        return sb;
    }
    let a2 = (a.unsigned_abs() as u128) * (a.unsigned_abs() as u128);
    let b2 = 3 * (b.unsigned_abs() as u128) * (b.unsigned_abs() as u128);
    if a2 > b2 {
        sa
    } else {
        sb
    }
}

fn sign_big(a: &BigInt, b: &BigInt) -> i32 {
    let sa = if a.is_zero() { 0 } else if a.is_positive() { 1 } else { -1 };
    let sb = if b.is_zero() { 0 } else if b.is_positive() { 1 } else { -1 };
    if sb == 0 || sa == sb {
        return if sa == 0 { sb } else { sa };
    }
    if sa == 0 {
        return sb;
    }
    if a * a > BigInt::from(3) * b * b {
        sa
    } else {
        sb
    }
}

fn add_coords(x: &Coord, y: &Coord, negate_y: bool) -> Coord {
    if let (Repr::Small(a1, b1, c1), Repr::Small(a2, b2, c2)) = (&x.0, &y.0) {
        let (a1, b1, c1) = (*a1 as i128, *b1 as i128, *c1 as i128);
        let (mut a2, mut b2, c2) = (*a2 as i128, *b2 as i128, *c2 as i128);
        if negate_y {
            a2 = -a2;
            b2 = -b2;
        }
        if c1 == c2 {
            return Coord::from_i128(a1 + a2, b1 + b2, c1);
        }
        return Coord::from_i128(a1 * c2 + a2 * c1, b1 * c2 + b2 * c1, c1 * c2);
    }
    let (a1, b1, c1) = x.parts();
    let (mut a2, mut b2, c2) = y.parts();
    if negate_y {
        a2 = -a2;
        b2 = -b2;
    }
    Coord::from_big(&a1 * &c2 + &a2 * &c1, &b1 * &c2 + &b2 * &c1, &c1 * &c2)
}

fn mul_coords(x: &Coord, y: &Coord) -> Coord {
    if let (Repr::Small(a1, b1, c1), Repr::Small(a2, b2, c2)) = (&x.0, &y.0) {
        let (a1, b1, c1) = (*a1 as i128, *b1 as i128, *c1 as i128);
        let (a2, b2, c2) = (*a2 as i128, *b2 as i128, *c2 as i128);
        if b1 == 0 && b2 == 0 {
            return Coord::from_i128(a1 * a2, 0, c1 * c2);
        }
        let rational = (b1 * b2).checked_mul(3).and_then(|t| t.checked_add(a1 * a2));
        if let Some(a) = rational {
            return Coord::from_i128(a, a1 * b2 + a2 * b1, c1 * c2);
        }
    }
    let (a1, b1, c1) = x.parts();
    let (a2, b2, c2) = y.parts();
    Coord::from_big(
        &a1 * &a2 + BigInt::from(3) * &b1 * &b2,
        &a1 * &b2 + &a2 * &b1,
        &c1 * &c2,
    )
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&Coord> for &Coord {
            type Output = Coord;
            fn $method(self, rhs: &Coord) -> Coord {
                $body(self, rhs)
            }
        }
        impl $tr<Coord> for Coord {
            type Output = Coord;
            fn $method(self, rhs: Coord) -> Coord {
                $body(&self, &rhs)
            }
        }
        impl $tr<&Coord> for Coord {
            type Output = Coord;
            fn $method(self, rhs: &Coord) -> Coord {
                $body(&self, rhs)
            }
        }
        impl $tr<Coord> for &Coord {
            type Output = Coord;
            fn $method(self, rhs: Coord) -> Coord {
                $body(self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, |x, y| add_coords(x, y, false));
forward_binop!(Sub, sub, |x, y| add_coords(x, y, true));
forward_binop!(Mul, mul, mul_coords);
forward_binop!(Div, div, |x: &Coord, y: &Coord| mul_coords(x, &y.recip()));

impl AddAssign<&Coord> for Coord {
    fn add_assign(&mut self, rhs: &Coord) {
        *self = add_coords(self, rhs, false);
    }
}

impl SubAssign<&Coord> for Coord {
    fn sub_assign(&mut self, rhs: &Coord) {
        *self = add_coords(self, rhs, true);
    }
}

impl MulAssign<&Coord> for Coord {
    fn mul_assign(&mut self, rhs: &Coord) {
        *self = mul_coords(self, rhs);
    }
}

impl Neg for &Coord {
    type Output = Coord;
    fn neg(self) -> Coord {
        match &self.0 {
            Repr::Small(a, b, c) if *a != i64::MIN && *b != i64::MIN => Coord(Repr::Small(-a, -b, *c)),
            _ => {
                let (a, b, c) = self.parts();
                Coord::from_big(-a, -b, c)
            }
        }
    }
}

impl Neg for Coord {
    type Output = Coord;
    fn neg(self) -> Coord {
        -&self
    }
}

impl Sum for Coord {
    fn sum<I: Iterator<Item = Coord>>(iter: I) -> Coord {
        iter.fold(Coord::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Coord> for Coord {
    fn sum<I: Iterator<Item = &'a Coord>>(iter: I) -> Coord {
        iter.fold(Coord::zero(), |acc, x| acc + x)
    }
}

impl From<i64> for Coord {
    fn from(v: i64) -> Coord {
        Coord::int(v)
    }
}

impl PartialOrd for Coord {
    fn partial_cmp(&self, other: &Coord) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Coord {
    fn cmp(&self, other: &Coord) -> Ordering {
        if let (Repr::Small(a1, 0, c1), Repr::Small(a2, 0, c2)) = (&self.0, &other.0) {
            return (*a1 as i128 * *c2 as i128).cmp(&(*a2 as i128 * *c1 as i128));
        }
        (self - other).signum().cmp(&0)
    }
}

fn fmt_ratio(f: &mut fmt::Formatter<'_>, p: &BigInt, q: &BigInt) -> fmt::Result {
    let g = p.gcd(q);
    let (p, q) = (p / &g, q / &g);
    if q.is_one() {
        write!(f, "{p}")
    } else {
        write!(f, "{p}/{q}")
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b, c) = self.parts();
        if b.is_zero() {
            return fmt_ratio(f, &a, &c);
        }
        if !a.is_zero() {
            fmt_ratio(f, &a, &c)?;
            if b.is_positive() {
                write!(f, "+")?;
            }
        }
        let g = b.gcd(&c);
        let (p, q) = (&b / &g, &c / &g);
        if p.is_one() && q.is_one() {
            write!(f, "sqrt3")
        } else if p == BigInt::from(-1) && q.is_one() {
            write!(f, "-sqrt3")
        } else {
            fmt_ratio(f, &p, &q)?;
            write!(f, "*sqrt3")
        }
    }
}

impl fmt::Debug for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_rational(s: &str) -> Option<Coord> {
    if s.is_empty() {
        return None;
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.parse().ok()?;
        let q: BigInt = q.parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Coord::from_big(p, BigInt::zero(), q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int.starts_with('-');
        let int: BigInt = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            int.parse().ok()?
        };
        let scale = BigInt::from(10).pow(frac.len() as u32);
        let frac: BigInt = frac.parse().ok()?;
        let num = if negative { int * &scale - frac } else { int * &scale + frac };
        return Some(Coord::from_big(num, BigInt::zero(), scale));
    }
    let p: BigInt = s.parse().ok()?;
    Some(Coord::from_big(p, BigInt::zero(), BigInt::one()))
}

fn parse_term(term: &str) -> Option<Coord> {
    let (negative, body) = match term.as_bytes().first()? {
        b'-' => (true, &term[1..]),
        b'+' => (false, &term[1..]),
        _ => (false, term),
    };
    let value = if body == "sqrt3" {
        Coord::sqrt3()
    } else if let Some(coef) = body.strip_suffix("*sqrt3") {
        &parse_rational(coef)? * &Coord::sqrt3()
    } else {
        parse_rational(body)?
    };
    Some(if negative { -value } else { value })
}

impl FromStr for Coord {
    type Err = CoordParseError;

    fn from_str(s: &str) -> Result<Coord, CoordParseError> {
        let err = || CoordParseError(s.to_string());
        let s_trim: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s_trim.is_empty() {
            return Err(err());
        }
        let bytes = s_trim.as_bytes();
        let mut terms = Vec::new();
        let mut start = 0;
        for i in 1..bytes.len() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'/' && bytes[i - 1] != b'*' {
                terms.push(&s_trim[start..i]);
                start = i;
            }
        }
        terms.push(&s_trim[start..]);
        if terms.len() > 2 {
            return Err(err());
        }
        let mut total = Coord::zero();
        for t in terms {
            total += &parse_term(t).ok_or_else(err)?;
        }
        Ok(total)
    }
}

impl Serialize for Coord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Coord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Coord, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Int(v) => Ok(Coord::int(v)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> Coord {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_form() {
        assert_eq!(Coord::ratio(2, 4), Coord::ratio(-1, -2));
        assert_eq!(Coord::ratio(2, 4).to_string(), "1/2");
        assert_eq!(Coord::ratio(0, 7), Coord::zero());
    }

    #[test]
    fn sqrt3_squares_to_three() {
        let s = Coord::sqrt3();
        assert_eq!(&s * &s, Coord::int(3));
        assert_eq!((&s / &s), Coord::one());
    }

    #[test]
    fn comparisons_with_surds() {
        assert!(Coord::sqrt3() > Coord::ratio(173, 100));
        assert!(Coord::sqrt3() < Coord::ratio(174, 100));
        assert!(c("2-sqrt3") > Coord::zero());
        assert!(c("-2+sqrt3") < Coord::zero());
        assert!(c("7/4-sqrt3") > Coord::zero());
    }

    #[test]
    fn parse_and_print_round_trip() {
        for s in ["0", "-3", "5/7", "sqrt3", "-sqrt3", "1/2+3/4*sqrt3", "-1/3*sqrt3", "2-5/3*sqrt3"] {
            assert_eq!(c(s).to_string(), s);
        }
        assert_eq!(c("0.25"), Coord::ratio(1, 4));
        assert_eq!(c("-1.5"), Coord::ratio(-3, 2));
        assert!("1/0".parse::<Coord>().is_err());
        assert!("x".parse::<Coord>().is_err());
    }

    #[test]
    fn overflow_spills_to_big() {
        let big = Coord::int(i64::MAX);
        let sq = &big * &big;
        let back = &sq / &big;
        assert_eq!(back, big);
        assert!(sq > big);
        let tiny = Coord::ratio(1, i64::MAX);
        let t2 = &tiny * &tiny;
        assert_eq!(&t2 * &(&big * &big), Coord::one());
    }

    #[test]
    fn reciprocal_of_surd() {
        let x = c("2+sqrt3");
        assert_eq!(&x * &x.recip(), Coord::one());
        assert_eq!(x.recip(), c("2-sqrt3"));
    }
}
