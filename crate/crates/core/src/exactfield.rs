//! Exact scalars over the rationals and prime fields.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Rationals,
    PrimeField,
}

/// The ground field: Q or GF(p) with p prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rationals,
    PrimeField(u64),
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    // deterministic Miller-Rabin for 64-bit inputs
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

pub fn make_field(kind: FieldKind, modulus: Option<u64>) -> Result<FieldSpec> {
    match (kind, modulus) {
        (FieldKind::Rationals, _) => Ok(FieldSpec::Rationals),
        (FieldKind::PrimeField, None) => Err(Error::MissingModulus),
        (FieldKind::PrimeField, Some(p)) => FieldSpec::prime(p),
    }
}

impl FieldSpec {
    pub fn prime(p: u64) -> Result<FieldSpec> {
        if is_prime(p) {
            Ok(FieldSpec::PrimeField(p))
        } else {
            Err(Error::NonPrimeModulus(p))
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::PrimeField(p) => *p,
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rat(BigRational::zero()),
            FieldSpec::PrimeField(p) => Scalar::Mod(0, *p),
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rat(BigRational::from_integer(BigInt::from(v))),
            FieldSpec::PrimeField(p) => Scalar::Mod(v.rem_euclid(*p as i64) as u64, *p),
        }
    }

    pub fn from_ratio(&self, num: i64, den: i64) -> Result<Scalar> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        let n = self.from_i64(num);
        let d = self.from_i64(den);
        Ok(&n * &d.inverse()?)
    }

    /// Parses `[-]int` or `[-]a/b`. Fractions are refused over GF(p).
    pub fn parse_scalar(&self, text: &str) -> Result<Scalar> {
        let t = text.trim();
        let bad = || Error::Parse(format!("bad scalar '{}'", t));
        match self {
            FieldSpec::Rationals => {
                if let Some((a, b)) = t.split_once('/') {
                    let a: BigInt = a.trim().parse().map_err(|_| bad())?;
                    let b: BigInt = b.trim().parse().map_err(|_| bad())?;
                    if !b.is_positive() {
                        return Err(bad());
                    }
                    Ok(Scalar::Rat(BigRational::new(a, b)))
                } else {
                    let a: BigInt = t.parse().map_err(|_| bad())?;
                    Ok(Scalar::Rat(BigRational::from_integer(a)))
                }
            }
            FieldSpec::PrimeField(p) => {
                if t.contains('/') {
                    return Err(bad());
                }
                let a: BigInt = t.parse().map_err(|_| bad())?;
                let r = ((a % BigInt::from(*p)) + BigInt::from(*p)) % BigInt::from(*p);
                Ok(Scalar::Mod(r.to_u64().unwrap(), *p))
            }
        }
    }

    /// All field elements, in residue order. Only for prime fields.
    pub fn elements(&self) -> Vec<Scalar> {
        match self {
            FieldSpec::Rationals => panic!("Q is infinite"),
            FieldSpec::PrimeField(p) => (0..*p).map(|v| Scalar::Mod(v, *p)).collect(),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::PrimeField(p) => write!(f, "GF({})", p),
        }
    }
}

/// An exact field element. Residues carry their modulus.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(BigRational),
    Mod(u64, u64),
}

impl Scalar {
    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Rat(_) => FieldSpec::Rationals,
            Scalar::Mod(_, p) => FieldSpec::PrimeField(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Mod(v, _) => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_one(),
            Scalar::Mod(v, _) => *v == 1,
        }
    }

    pub fn inverse(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            Scalar::Rat(r) => Scalar::Rat(r.recip()),
            Scalar::Mod(v, p) => Scalar::Mod(pow_mod(*v, p - 2, *p), *p),
        })
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        Ok(self * &other.inverse()?)
    }

    pub fn pow(&self, mut e: u64) -> Scalar {
        let mut base = self.clone();
        let mut r = self.field().one();
        while e > 0 {
            if e & 1 == 1 {
                r = &r * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        r
    }

    /// Integer view of a rational with denominator 1, or the residue.
    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Scalar::Rat(r) if r.is_integer() => r.to_integer().to_i64(),
            Scalar::Rat(_) => None,
            Scalar::Mod(v, _) => Some(*v as i64),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rat(r) => Some(r),
            Scalar::Mod(..) => None,
        }
    }

    pub fn residue(&self) -> Option<u64> {
        match self {
            Scalar::Mod(v, _) => Some(*v),
            Scalar::Rat(_) => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Mod(v, _) => write!(f, "{}", v),
        }
    }
}

fn mismatch() -> ! {
    panic!("arithmetic between scalars of different fields")
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            (Scalar::Mod(a, p), Scalar::Mod(b, q)) if p == q => Scalar::Mod((a + b) % p, *p),
            _ => mismatch(),
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a - b),
            (Scalar::Mod(a, p), Scalar::Mod(b, q)) if p == q => Scalar::Mod((a + p - b) % p, *p),
            _ => mismatch(),
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Mod(a, p), Scalar::Mod(b, q)) if p == q => Scalar::Mod(mul_mod(*a, *b, *p), *p),
            _ => mismatch(),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rat(a) => Scalar::Rat(-a),
            Scalar::Mod(a, p) => Scalar::Mod((p - a) % p, *p),
        }
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        &self + &o
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        &self - &o
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        &self * &o
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order used only for canonical sorting: rationals by value, residues by representative.
impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => a.cmp(b),
            (Scalar::Mod(a, p), Scalar::Mod(b, q)) => (p, a).cmp(&(q, b)),
            (Scalar::Rat(_), Scalar::Mod(..)) => std::cmp::Ordering::Less,
            (Scalar::Mod(..), Scalar::Rat(_)) => std::cmp::Ordering::Greater,
        }
    }
}

pub fn inverse(s: &Scalar, field: FieldSpec) -> Result<Scalar> {
    if s.field() != field {
        return Err(Error::FieldMismatch);
    }
    s.inverse()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn make_field_cases() {
        let f = make_field(FieldKind::PrimeField, Some(7)).unwrap();
        assert_eq!(f.characteristic(), 7);
        assert_eq!(make_field(FieldKind::Rationals, None).unwrap().characteristic(), 0);
        assert_eq!(make_field(FieldKind::PrimeField, Some(6)), Err(Error::NonPrimeModulus(6)));
        assert_eq!(make_field(FieldKind::PrimeField, None), Err(Error::MissingModulus));
    }

    #[test]
    fn inverse_cases() {
        let f7 = FieldSpec::prime(7).unwrap();
        assert_eq!(inverse(&f7.from_i64(3), f7).unwrap(), f7.from_i64(5));
        let q = FieldSpec::Rationals;
        assert_eq!(q.from_ratio(2, 3).unwrap().inverse().unwrap(), q.from_ratio(3, 2).unwrap());
        let f5 = FieldSpec::prime(5).unwrap();
        assert_eq!(f5.zero().inverse(), Err(Error::DivisionByZero));
    }

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(is_prime(18446744073709551557));
        assert!(!is_prime(3215031751));
    }

    #[test]
    fn parse_forms() {
        let q = FieldSpec::Rationals;
        assert_eq!(q.parse_scalar("-4/6").unwrap(), q.from_ratio(-2, 3).unwrap());
        assert!(q.parse_scalar("1/0").is_err());
        assert!(q.parse_scalar("1/-2").is_err());
        let f5 = FieldSpec::prime(5).unwrap();
        assert_eq!(f5.parse_scalar("-1").unwrap(), f5.from_i64(4));
        assert_eq!(f5.parse_scalar("17").unwrap(), f5.from_i64(2));
        assert!(f5.parse_scalar("1/2").is_err());
        assert_eq!(q.from_ratio(6, -4).unwrap().to_string(), "-3/2");
    }

    #[test]
    fn characteristic_is_additive_order() {
        for p in [2u64, 3, 5, 7, 13] {
            let f = FieldSpec::prime(p).unwrap();
            let mut acc = f.zero();
            for k in 1..=p {
                acc = &acc + &f.one();
                assert_eq!(acc.is_zero(), k == p);
            }
        }
    }

    fn field_and_triples() -> impl Strategy<Value = (FieldSpec, [(i64, i64); 3])> {
        let f = prop_oneof![
            Just(FieldSpec::Rationals),
            Just(FieldSpec::PrimeField(2)),
            Just(FieldSpec::PrimeField(5)),
            Just(FieldSpec::PrimeField(101)),
        ];
        let pair = (-50i64..50, 1i64..20);
        (f, [pair.clone(), pair.clone(), pair])
    }

    fn mk(f: FieldSpec, (n, d): (i64, i64)) -> Scalar {
        match f {
            FieldSpec::Rationals => f.from_ratio(n, d).unwrap(),
            _ => f.from_i64(n * d),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn field_axioms((f, t) in field_and_triples()) {
            let (a, b, c) = (mk(f, t[0]), mk(f, t[1]), mk(f, t[2]));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert!((&a - &a).is_zero());
            if !a.is_zero() {
                prop_assert!((&a * &a.inverse().unwrap()).is_one());
                prop_assert_eq!(a.inverse().unwrap().inverse().unwrap(), a.clone());
            }
        }
    }
}
