//! Univariate polynomials over Q and GF(p).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::densemat::ExactMatrix;
use crate::error::{Error, Result};
use crate::exactfield::{FieldSpec, Scalar};

/// Coefficients in ascending order with no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UniPoly {
    field: FieldSpec,
    coeffs: Vec<Scalar>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityClass {
    EvenPower,
    OddPower,
    Neither,
}

/// Monic irreducible factors with multiplicities, sorted by (degree, coefficients).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorList {
    pub unit: Scalar,
    pub factors: Vec<(UniPoly, usize)>,
    /// False over Q when some listed factor of degree > 1 was not split further.
    pub complete: bool,
    pub seed: u64,
}

impl FactorList {
    pub fn product(&self) -> UniPoly {
        let mut p = UniPoly::constant(self.unit.field(), self.unit.clone());
        for (q, e) in &self.factors {
            p = &p * &q.pow(*e as u32);
        }
        p
    }

    pub fn require_complete(self) -> Result<FactorList> {
        if self.complete {
            Ok(self)
        } else {
            let rest: Vec<String> = self.factors.iter().filter(|(q, _)| q.degree() > Some(1)).map(|(q, _)| q.to_string()).collect();
            Err(Error::NotFullyFactored(rest.join(", ")))
        }
    }
}

impl UniPoly {
    pub fn new(field: FieldSpec, mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { field, coeffs }
    }

    pub fn from_i64(field: FieldSpec, c: &[i64]) -> Self {
        Self::new(field, c.iter().map(|&v| field.from_i64(v)).collect())
    }

    pub fn zero(field: FieldSpec) -> Self {
        UniPoly { field, coeffs: vec![] }
    }

    pub fn one(field: FieldSpec) -> Self {
        Self::constant(field, field.one())
    }

    pub fn constant(field: FieldSpec, c: Scalar) -> Self {
        Self::new(field, vec![c])
    }

    pub fn x(field: FieldSpec) -> Self {
        Self::monomial(field, field.one(), 1)
    }

    pub fn monomial(field: FieldSpec, c: Scalar, k: usize) -> Self {
        let mut v = vec![field.zero(); k + 1];
        v[k] = c;
        Self::new(field, v)
    }

    /// x − λ
    pub fn linear(field: FieldSpec, lambda: &Scalar) -> Self {
        Self::new(field, vec![-lambda, field.one()])
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Scalar {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn lead(&self) -> Scalar {
        self.coeffs.last().cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    /// Divides through by the leading coefficient; the zero polynomial is left alone.
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.lead().inverse().unwrap();
        self.scale(&inv)
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        Self::new(self.field, self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn eval(&self, s: &Scalar) -> Scalar {
        let mut r = self.field.zero();
        for c in self.coeffs.iter().rev() {
            r = &(&r * s) + c;
        }
        r
    }

    pub fn eval_matrix(&self, a: &ExactMatrix) -> ExactMatrix {
        let n = a.rows();
        let mut r = ExactMatrix::zeros(self.field, n, n);
        for c in self.coeffs.iter().rev() {
            r = &(&r * a) + &ExactMatrix::scalar(self.field, n, c);
        }
        r
    }

    /// p(x + c)
    pub fn shift(&self, c: &Scalar) -> Self {
        let lin = Self::new(self.field, vec![c.clone(), self.field.one()]);
        let mut r = Self::zero(self.field);
        for k in self.coeffs.iter().rev() {
            r = &(&r * &lin) + &Self::constant(self.field, k.clone());
        }
        r
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.field,
            self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * &self.field.from_i64(i as i64)).collect(),
        )
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Self::one(self.field);
        for _ in 0..e {
            r = &r * self;
        }
        r
    }

    pub fn div_rem(&self, d: &UniPoly) -> Result<(UniPoly, UniPoly)> {
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let inv = d.lead().inverse()?;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Self::zero(self.field), self.clone()));
        }
        let mut q = vec![self.field.zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = &r[i + dd] * &inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[i + j] = &r[i + j] - &(&c * dc);
            }
            q[i] = c;
        }
        r.truncate(dd);
        Ok((Self::new(self.field, q), Self::new(self.field, r)))
    }

    pub fn rem(&self, d: &UniPoly) -> UniPoly {
        self.div_rem(d).unwrap().1
    }

    /// Exact quotient; panics when the division leaves a remainder.
    pub fn exact_div(&self, d: &UniPoly) -> UniPoly {
        let (q, r) = self.div_rem(d).unwrap();
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn divides(&self, other: &UniPoly) -> bool {
        other.div_rem(self).map(|(_, r)| r.is_zero()).unwrap_or(other.is_zero())
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn parity_class(&self) -> ParityClass {
        let odd_zero = self.coeffs.iter().skip(1).step_by(2).all(|c| c.is_zero());
        let even_zero = self.coeffs.iter().step_by(2).all(|c| c.is_zero());
        if odd_zero {
            ParityClass::EvenPower
        } else if even_zero {
            ParityClass::OddPower
        } else {
            ParityClass::Neither
        }
    }

    pub fn is_even_or_odd(&self) -> bool {
        self.parity_class() != ParityClass::Neither
    }

    /// (−1)ⁿ p(−x)
    pub fn star(&self) -> Result<UniPoly> {
        if !self.is_monic() {
            return Err(Error::NotMonic);
        }
        let n = self.deg();
        Ok(Self::new(
            self.field,
            self.coeffs.iter().enumerate().map(|(i, c)| if (n - i) % 2 == 1 { -c } else { c.clone() }).collect(),
        ))
    }

    /// Ones on the subdiagonal, −a_0..−a_{n−1} in the last column.
    pub fn companion(&self) -> Result<ExactMatrix> {
        if !self.is_monic() {
            return Err(Error::NotMonic);
        }
        let n = self.deg();
        if n == 0 {
            return Err(Error::ConstantPolynomial);
        }
        let mut c = ExactMatrix::zeros(self.field, n, n);
        for i in 1..n {
            c[(i, i - 1)] = self.field.one();
        }
        for i in 0..n {
            c[(i, n - 1)] = -&self.coeffs[i];
        }
        Ok(c)
    }

    pub fn to_ascending_text(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
    }

    pub fn parse_ascending(field: FieldSpec, text: &str) -> Result<UniPoly> {
        let c: Vec<Scalar> = text.split_whitespace().map(|t| field.parse_scalar(t)).collect::<Result<_>>()?;
        Ok(Self::new(field, c))
    }

    pub fn mul_mod(&self, other: &UniPoly, m: &UniPoly) -> UniPoly {
        (self * other).rem(m)
    }

    pub fn pow_mod(&self, e: &BigUint, m: &UniPoly) -> UniPoly {
        let mut r = Self::one(self.field).rem(m);
        let base = self.rem(m);
        for i in (0..e.bits()).rev() {
            r = r.mul_mod(&r, m);
            if e.bit(i) {
                r = r.mul_mod(&base, m);
            }
        }
        r
    }

    /// Factorization. Over GF(p) complete; over Q only squarefree parts and rational roots are split.
    pub fn factor(&self, seed: u64) -> Result<FactorList> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let unit = self.lead();
        let f = self.monic();
        let mut out: Vec<(UniPoly, usize)> = Vec::new();
        let mut complete = true;
        match self.field {
            FieldSpec::PrimeField(_) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for (g, e) in squarefree_fp(&f) {
                    for (h, d) in distinct_degree(&g) {
                        for q in equal_degree(&h, d, &mut rng) {
                            out.push((q, e));
                        }
                    }
                }
            }
            FieldSpec::Rationals => {
                for (g, e) in squarefree_q(&f) {
                    let (roots, rest) = rational_roots(&g);
                    for r in roots {
                        out.push((Self::linear(self.field, &r), e));
                    }
                    if !rest.is_constant() {
                        if rest.deg() > 1 {
                            complete = false;
                        }
                        out.push((rest, e));
                    }
                }
            }
        }
        // merge equal factors (possible only across squarefree layers over Q when incomplete)
        out.sort_by(|a, b| poly_key(&a.0).cmp(&poly_key(&b.0)).then(a.1.cmp(&b.1)));
        let mut merged: Vec<(UniPoly, usize)> = Vec::new();
        for (q, e) in out {
            match merged.last_mut() {
                Some((p, m)) if *p == q => *m += e,
                _ => merged.push((q, e)),
            }
        }
        Ok(FactorList { unit, factors: merged, complete, seed })
    }

    /// Rabin irreducibility test over GF(p).
    pub fn is_irreducible_fp(&self) -> bool {
        let FieldSpec::PrimeField(p) = self.field else { panic!("GF(p) only") };
        let n = self.deg();
        if n == 0 {
            return false;
        }
        let f = self.monic();
        let x = Self::x(self.field);
        let frob = |k: usize| x.pow_mod(&BigUint::from(p).pow(k as u32), &f);
        if !(&frob(n) - &x).rem(&f).is_zero() {
            return false;
        }
        let mut m = n;
        let mut q = 2;
        let mut primes = Vec::new();
        while m > 1 {
            if m % q == 0 {
                primes.push(q);
                while m % q == 0 {
                    m /= q;
                }
            }
            q += 1;
        }
        primes.iter().all(|&q| (&frob(n / q) - &x).gcd(&f).is_one())
    }
}

pub fn poly_key(p: &UniPoly) -> (usize, Vec<Scalar>) {
    (p.coeffs.len(), p.coeffs.clone())
}

fn squarefree_fp(f: &UniPoly) -> Vec<(UniPoly, usize)> {
    let FieldSpec::PrimeField(p) = f.field else { unreachable!() };
    let mut out = Vec::new();
    if f.is_constant() {
        return out;
    }
    let c = f.gcd(&f.derivative());
    let mut w = f.exact_div(&c);
    let mut c = c;
    let mut i = 1;
    while !w.is_one() {
        let y = w.gcd(&c);
        let fac = w.exact_div(&y);
        if !fac.is_one() {
            out.push((fac, i));
        }
        w = y;
        c = c.exact_div(&w);
        i += 1;
    }
    if !c.is_one() {
        // c is a polynomial in x^p; its p-th root has the same coefficients spaced out
        let root = UniPoly::new(f.field, c.coeffs.iter().step_by(p as usize).cloned().collect());
        for (g, e) in squarefree_fp(&root) {
            out.push((g, e * p as usize));
        }
    }
    out
}

fn squarefree_q(f: &UniPoly) -> Vec<(UniPoly, usize)> {
    let mut out = Vec::new();
    if f.is_constant() {
        return out;
    }
    let mut c = f.gcd(&f.derivative());
    let mut w = f.exact_div(&c);
    let mut i = 1;
    while !w.is_one() {
        let y = w.gcd(&c);
        let fac = w.exact_div(&y);
        if !fac.is_one() {
            out.push((fac, i));
        }
        w = y;
        c = c.exact_div(&w);
        i += 1;
    }
    out
}

fn distinct_degree(f: &UniPoly) -> Vec<(UniPoly, usize)> {
    let FieldSpec::PrimeField(p) = f.field else { unreachable!() };
    let x = UniPoly::x(f.field);
    let pe = BigUint::from(p);
    let mut out = Vec::new();
    let mut f = f.clone();
    let mut h = x.rem(&f);
    let mut d = 1;
    while f.deg() >= 2 * d {
        h = h.pow_mod(&pe, &f);
        let g = (&h - &x).gcd(&f);
        if !g.is_one() {
            f = f.exact_div(&g);
            h = h.rem(&f);
            out.push((g, d));
        }
        d += 1;
    }
    if !f.is_constant() {
        let d = f.deg();
        out.push((f, d));
    }
    out
}

fn equal_degree(f: &UniPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<UniPoly> {
    let FieldSpec::PrimeField(p) = f.field else { unreachable!() };
    let n = f.deg();
    if n == d {
        return vec![f.clone()];
    }
    let field = f.field;
    loop {
        let a = UniPoly::new(field, (0..n).map(|_| Scalar::Mod(rng.gen_range(0..p), p)).collect());
        if a.is_constant() {
            continue;
        }
        let g = if p == 2 {
            // trace map a + a^2 + ... + a^(2^(d-1))
            let mut t = a.rem(f);
            let mut s = t.clone();
            for _ in 1..d {
                t = t.mul_mod(&t, f);
                s = &s + &t;
            }
            s.gcd(f)
        } else {
            let e = (BigUint::from(p).pow(d as u32) - BigUint::one()) / BigUint::from(2u32);
            let b = &a.pow_mod(&e, f) - &UniPoly::one(field);
            b.gcd(f)
        };
        if !g.is_constant() && g.deg() < n {
            let mut out = equal_degree(&g, d, rng);
            out.extend(equal_degree(&f.exact_div(&g), d, rng));
            return out;
        }
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            small.push(d.clone());
            let q = &n / &d;
            if q != d {
                large.push(q);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// Rational roots of a monic squarefree polynomial and the cofactor.
fn rational_roots(f: &UniPoly) -> (Vec<Scalar>, UniPoly) {
    let field = f.field;
    let mut rest = f.clone();
    let mut roots = Vec::new();
    if rest.coeff(0).is_zero() {
        roots.push(field.zero());
        rest = rest.exact_div(&UniPoly::x(field));
    }
    if rest.is_constant() {
        return (roots, rest);
    }
    // clear denominators
    let mut l = BigInt::one();
    for c in &rest.coeffs {
        l = l.lcm(c.as_rational().unwrap().denom());
    }
    let ints: Vec<BigInt> = rest.coeffs.iter().map(|c| (c.as_rational().unwrap() * &l).to_integer()).collect();
    let a0 = ints[0].clone();
    let an = ints.last().unwrap().clone();
    let mut cands = Vec::new();
    for p in divisors(&a0) {
        for q in divisors(&an) {
            let r = num_rational::BigRational::new(p.clone(), q.clone());
            cands.push(Scalar::Rat(r.clone()));
            cands.push(Scalar::Rat(-r));
        }
    }
    cands.sort();
    cands.dedup();
    for c in cands {
        if rest.is_constant() {
            break;
        }
        if rest.eval(&c).is_zero() {
            rest = rest.exact_div(&UniPoly::linear(field, &c));
            roots.push(c);
        }
    }
    (roots, rest)
}

/// Roots of `p` lying in the ground field, without multiplicity, sorted.
pub fn roots_in_field(p: &UniPoly) -> Vec<Scalar> {
    if p.is_constant() {
        return vec![];
    }
    match p.field {
        FieldSpec::PrimeField(_) => p.field.elements().into_iter().filter(|s| p.eval(s).is_zero()).collect(),
        FieldSpec::Rationals => {
            let mut out = Vec::new();
            for (g, _) in squarefree_q(&p.monic()) {
                out.extend(rational_roots(&g).0);
            }
            out.sort();
            out.dedup();
            out
        }
    }
}

impl<'a> Add<&'a UniPoly> for &'a UniPoly {
    type Output = UniPoly;
    fn add(self, o: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        UniPoly::new(self.field, (0..n).map(|i| &self.coeff(i) + &o.coeff(i)).collect())
    }
}

impl<'a> Sub<&'a UniPoly> for &'a UniPoly {
    type Output = UniPoly;
    fn sub(self, o: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        UniPoly::new(self.field, (0..n).map(|i| &self.coeff(i) - &o.coeff(i)).collect())
    }
}

impl<'a> Mul<&'a UniPoly> for &'a UniPoly {
    type Output = UniPoly;
    fn mul(self, o: &UniPoly) -> UniPoly {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero(self.field);
        }
        let mut c = vec![self.field.zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] = &c[i + j] + &(a * b);
            }
        }
        UniPoly::new(self.field, c)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly::new(self.field, self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let (neg, mag) = match c {
                Scalar::Rat(r) if r.is_negative() => (true, Scalar::Rat(-r)),
                _ => (false, c.clone()),
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let ms = mag.to_string();
            let coef = if i > 0 && mag.is_one() {
                String::new()
            } else if i > 0 && ms.contains('/') {
                format!("({})", ms)
            } else {
                ms
            };
            match i {
                0 => write!(f, "{}", coef)?,
                1 => write!(f, "{}x", coef)?,
                _ => write!(f, "{}x^{}", coef, i)?,
            }
        }
        Ok(())
    }
}
