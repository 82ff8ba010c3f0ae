//! Brute-force ground truth over GF(2) and GF(3), and certificate checking.
//!
//! Arithmetic here is done on raw residues so it shares nothing with the
//! exact machinery it is used to check.

use std::collections::HashSet;
use std::fmt;

use crate::certificate::{Certificate, Combine, Role};
use crate::densemat::ExactMatrix;
use crate::error::{Error, Result};
use crate::exactfield::FieldSpec;

const GUARD: u64 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Filter {
    All,
    SquareZero,
    Nilpotent,
    Singular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumSpec {
    pub field: FieldSpec,
    pub n: usize,
    pub filter: Filter,
}

/// A matrix over Z/p as residues, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Tiny {
    p: u8,
    n: usize,
    e: Vec<u8>,
}

impl Tiny {
    fn from_code(p: u8, n: usize, mut code: u64) -> Tiny {
        let mut e = vec![0u8; n * n];
        for slot in e.iter_mut().rev() {
            *slot = (code % p as u64) as u8;
            code /= p as u64;
        }
        Tiny { p, n, e }
    }

    fn code(&self) -> u64 {
        self.e.iter().fold(0u64, |acc, &x| acc * self.p as u64 + x as u64)
    }

    fn add(&self, o: &Tiny) -> Tiny {
        let e = self.e.iter().zip(&o.e).map(|(a, b)| (a + b) % self.p).collect();
        Tiny { p: self.p, n: self.n, e }
    }

    fn mul(&self, o: &Tiny) -> Tiny {
        let n = self.n;
        let p = self.p as u32;
        let mut e = vec![0u8; n * n];
        for i in 0..n {
            for j in 0..n {
                let s: u32 = (0..n).map(|k| self.e[i * n + k] as u32 * o.e[k * n + j] as u32).sum();
                e[i * n + j] = (s % p) as u8;
            }
        }
        Tiny { p: self.p, n, e }
    }

    fn is_zero(&self) -> bool {
        self.e.iter().all(|&x| x == 0)
    }

    fn is_square_zero(&self) -> bool {
        self.mul(self).is_zero()
    }

    fn is_nilpotent(&self) -> bool {
        let mut acc = self.clone();
        for _ in 1..self.n.max(1) {
            acc = acc.mul(self);
        }
        acc.is_zero()
    }

    fn rank(&self) -> usize {
        let n = self.n;
        let p = self.p as u32;
        let mut m: Vec<u32> = self.e.iter().map(|&x| x as u32).collect();
        let mut r = 0;
        for c in 0..n {
            let Some(piv) = (r..n).find(|&i| m[i * n + c] != 0) else { continue };
            for k in 0..n {
                m.swap(r * n + k, piv * n + k);
            }
            // inverse by search; p is tiny
            let inv = (1..p).find(|x| x * m[r * n + c] % p == 1).unwrap();
            for k in 0..n {
                m[r * n + k] = m[r * n + k] * inv % p;
            }
            for i in 0..n {
                if i != r && m[i * n + c] != 0 {
                    let f = m[i * n + c];
                    for k in 0..n {
                        m[i * n + k] = (m[i * n + k] + p * p - f * m[r * n + k] % p) % p;
                    }
                }
            }
            r += 1;
        }
        r
    }

    fn to_exact(&self, f: FieldSpec) -> ExactMatrix {
        let n = self.n;
        ExactMatrix::from_rows(f, (0..n).map(|i| (0..n).map(|j| f.from_i64(self.e[i * n + j] as i64)).collect()).collect())
    }

    fn from_exact(a: &ExactMatrix) -> Result<Tiny> {
        let p = small_prime(a.field())?;
        if !a.is_square() {
            return Err(Error::NonSquare);
        }
        let n = a.rows();
        let mut e = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                e.push(a[(i, j)].residue().ok_or(Error::FieldMismatch)? as u8);
            }
        }
        Ok(Tiny { p, n, e })
    }
}

fn small_prime(f: FieldSpec) -> Result<u8> {
    match f {
        FieldSpec::PrimeField(p) if p <= 7 => Ok(p as u8),
        _ => Err(Error::TooLarge),
    }
}

fn count_for(p: u8, n: usize) -> Result<u64> {
    (p as u64).checked_pow((n * n) as u32).filter(|&c| c <= GUARD).ok_or(Error::TooLarge)
}

fn matches(t: &Tiny, filter: Filter) -> bool {
    match filter {
        Filter::All => true,
        Filter::SquareZero => t.is_square_zero(),
        Filter::Nilpotent => t.is_nilpotent(),
        Filter::Singular => t.rank() < t.n,
    }
}

/// Every matrix matching the filter, in lexicographic entry order.
pub fn enumerate(spec: EnumSpec) -> Result<impl Iterator<Item = ExactMatrix>> {
    let p = small_prime(spec.field)?;
    let total = count_for(p, spec.n)?;
    let (n, filter, f) = (spec.n, spec.filter, spec.field);
    Ok((0..total).map(move |c| Tiny::from_code(p, n, c)).filter(move |t| matches(t, filter)).map(move |t| t.to_exact(f)))
}

fn tiny_all(p: u8, n: usize, filter: Filter) -> Result<Vec<Tiny>> {
    let total = count_for(p, n)?;
    Ok((0..total).map(|c| Tiny::from_code(p, n, c)).filter(|t| matches(t, filter)).collect())
}

/// Cached sum and product sets for one (field, order).
pub struct BruteContext {
    p: u8,
    n: usize,
    sqz: Vec<Tiny>,
    /// sums[k] holds the codes of all sums of k square-zero matrices
    sums: Vec<HashSet<u64>>,
    products: [Option<HashSet<u64>>; 4],
}

impl BruteContext {
    pub fn new(field: FieldSpec, n: usize) -> Result<BruteContext> {
        let p = small_prime(field)?;
        let sqz = tiny_all(p, n, Filter::SquareZero)?;
        let zero: HashSet<u64> = [0u64].into_iter().collect();
        Ok(BruteContext { p, n, sqz, sums: vec![zero], products: [None, None, None, None] })
    }

    fn check(&self, a: &ExactMatrix) -> Result<Tiny> {
        let t = Tiny::from_exact(a)?;
        if t.p != self.p || t.n != self.n {
            return Err(Error::FieldMismatch);
        }
        Ok(t)
    }

    fn sum_level(&mut self, k: usize) -> &HashSet<u64> {
        while self.sums.len() <= k {
            let prev = self.sums.last().unwrap();
            let mut next = HashSet::with_capacity(prev.len());
            for &c in prev {
                let x = Tiny::from_code(self.p, self.n, c);
                for s in &self.sqz {
                    next.insert(x.add(s).code());
                }
            }
            self.sums.push(next);
        }
        &self.sums[k]
    }

    pub fn sum_decide(&mut self, a: &ExactMatrix, k: usize) -> Result<bool> {
        if k > 4 {
            return Err(Error::Construction(format!("brute sums support k <= 4, got {}", k)));
        }
        let t = self.check(a)?;
        Ok(self.sum_level(k).contains(&t.code()))
    }

    fn product_set(&mut self, k: usize, role: Role) -> Result<&HashSet<u64>> {
        let slot = match (k, role) {
            (2, Role::SquareZero) => 0,
            (3, Role::SquareZero) => 1,
            (2, Role::Nilpotent) => 2,
            (3, Role::Nilpotent) => 3,
            _ => return Err(Error::Construction(format!("brute products support k in {{2, 3}} with a nilpotent or square-zero role, got k={} {}", k, role))),
        };
        if self.products[slot].is_none() {
            let base = match role {
                Role::SquareZero => self.sqz.clone(),
                _ => tiny_all(self.p, self.n, Filter::Nilpotent)?,
            };
            let mut level: HashSet<u64> = base.iter().map(Tiny::code).collect();
            for _ in 1..k {
                let mut next = HashSet::new();
                for &c in &level {
                    let x = Tiny::from_code(self.p, self.n, c);
                    for y in &base {
                        next.insert(x.mul(y).code());
                    }
                }
                level = next;
            }
            self.products[slot] = Some(level);
        }
        Ok(self.products[slot].as_ref().unwrap())
    }

    pub fn product_decide(&mut self, a: &ExactMatrix, k: usize, role: Role) -> Result<bool> {
        let t = self.check(a)?;
        Ok(self.product_set(k, role)?.contains(&t.code()))
    }
}

/// Whether A is a sum of k square-zero matrices, by exhaustive search.
pub fn brute_sum_decide(a: &ExactMatrix, k: usize) -> Result<bool> {
    BruteContext::new(a.field(), a.rows())?.sum_decide(a, k)
}

/// Whether A is a product of k matrices of the given role, by exhaustive search.
pub fn brute_product_decide(a: &ExactMatrix, k: usize, role: Role) -> Result<bool> {
    BruteContext::new(a.field(), a.rows())?.product_decide(a, k, role)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub failures: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            write!(f, "pass")
        } else {
            write!(f, "fail: {}", self.failures.join("; "))
        }
    }
}

/// Recompute the combination, the role of each part, and any rank claims.
pub fn verify_certificate(cert: &Certificate) -> VerificationReport {
    let mut failures = Vec::new();
    let what = match cert.kind {
        Combine::Product => "product",
        Combine::Sum => "sum",
    };
    match cert.combined() {
        Ok(m) if m == cert.input => {}
        Ok(_) => failures.push(format!("{} mismatch", what)),
        Err(e) => failures.push(format!("{} mismatch: {}", what, e)),
    }
    for (i, part) in cert.parts.iter().enumerate() {
        if !part.role.holds(&part.matrix) {
            failures.push(format!("role: part {} is not {}", i + 1, part.role));
        }
        if let Some(r) = part.rank {
            let actual = part.matrix.rank();
            if actual != r {
                failures.push(format!("rank claim: part {} claims rank {} but has rank {}", i + 1, r, actual));
            }
        }
    }
    VerificationReport { failures }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Claim {
    SumTwo,
    SumThree,
    SumFour,
    ProductTwoSqz,
    ProductThreeSqz,
    ProductTwoNilpotent,
}

impl Claim {
    pub const ALL: [Claim; 6] =
        [Claim::SumTwo, Claim::SumThree, Claim::SumFour, Claim::ProductTwoSqz, Claim::ProductThreeSqz, Claim::ProductTwoNilpotent];

    pub fn name(&self) -> &'static str {
        match self {
            Claim::SumTwo => "sum2",
            Claim::SumThree => "sum3",
            Claim::SumFour => "sum4",
            Claim::ProductTwoSqz => "prod2-sqz",
            Claim::ProductThreeSqz => "prod3-sqz",
            Claim::ProductTwoNilpotent => "prod2-nil",
        }
    }

    pub fn parse(s: &str) -> Result<Claim> {
        Claim::ALL.iter().copied().find(|c| c.name() == s).ok_or_else(|| Error::Parse(format!("unknown claim '{}'", s)))
    }

    pub fn predicate(&self) -> &'static str {
        match self {
            Claim::SumTwo => "invariant polynomials all even or odd",
            Claim::SumThree => "trace zero (characteristic 2 only)",
            Claim::SumFour => "trace zero",
            Claim::ProductTwoSqz => "r <= n(G) - dim(R(G) ∩ N(G))",
            Claim::ProductThreeSqz => "2r <= n",
            Claim::ProductTwoNilpotent => "singular and not a nonzero nilpotent of order 2",
        }
    }

    /// The predicate the theorem states, evaluated with the exact machinery.
    pub fn theorem(&self, a: &ExactMatrix) -> Result<bool> {
        let n = a.rows();
        Ok(match self {
            Claim::SumTwo => crate::summation::is_sum_two_sqz(a),
            Claim::SumThree | Claim::SumFour => a.trace().is_zero(),
            Claim::ProductTwoSqz => crate::factorize::is_two_sqz_product(a)?,
            Claim::ProductThreeSqz => 2 * a.rank() <= n,
            Claim::ProductTwoNilpotent => a.rank() < n && !(n == 2 && a.is_nilpotent() && !a.is_zero()),
        })
    }

    fn brute(&self, ctx: &mut BruteContext, a: &ExactMatrix) -> Result<bool> {
        match self {
            Claim::SumTwo => ctx.sum_decide(a, 2),
            Claim::SumThree => ctx.sum_decide(a, 3),
            Claim::SumFour => ctx.sum_decide(a, 4),
            Claim::ProductTwoSqz => ctx.product_decide(a, 2, Role::SquareZero),
            Claim::ProductThreeSqz => ctx.product_decide(a, 3, Role::SquareZero),
            Claim::ProductTwoNilpotent => ctx.product_decide(a, 2, Role::Nilpotent),
        }
    }

    pub fn applies_to(&self, f: FieldSpec) -> bool {
        !matches!(self, Claim::SumThree) || f.characteristic() == 2
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusReport {
    pub claim: Claim,
    pub field: FieldSpec,
    pub n: usize,
    pub total: usize,
    pub brute_yes: usize,
    pub theorem_yes: usize,
    pub mismatches: Vec<ExactMatrix>,
}

impl CensusReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compare brute force against the theorem on every matrix of order n.
pub fn census(field: FieldSpec, n: usize, claim: Claim) -> Result<CensusReport> {
    let mut ctx = BruteContext::new(field, n)?;
    let all: Vec<ExactMatrix> = enumerate(EnumSpec { field, n, filter: Filter::All })?.collect();
    let mut brute = Vec::with_capacity(all.len());
    for a in &all {
        brute.push(claim.brute(&mut ctx, a)?);
    }
    // the exact side dominates the cost; split it by leading entry
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(8);
    let chunk = all.len().div_ceil(workers).max(1);
    let theorem: Vec<bool> = std::thread::scope(|s| {
        let handles: Vec<_> = all.chunks(chunk).map(|part| s.spawn(move || part.iter().map(|a| claim.theorem(a)).collect::<Result<Vec<bool>>>())).collect();
        handles.into_iter().map(|h| h.join().expect("census worker panicked")).collect::<Result<Vec<Vec<bool>>>>()
    })?
    .into_iter()
    .flatten()
    .collect();
    let mismatches = all.iter().zip(brute.iter().zip(&theorem)).filter(|(_, (b, t))| b != t).map(|(a, _)| a.clone()).collect();
    Ok(CensusReport {
        claim,
        field,
        n,
        total: all.len(),
        brute_yes: brute.iter().filter(|&&b| b).count(),
        theorem_yes: theorem.iter().filter(|&&b| b).count(),
        mismatches,
    })
}
