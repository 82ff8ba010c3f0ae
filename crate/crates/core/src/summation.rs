//! Sums of nilpotent and square-zero matrices.

use crate::canonform::{elementary_divisors, invariant_polynomials, rcf, similarity_transform};
use crate::certificate::{Certificate, Part, Role};
use crate::densemat::{unit_vector, ExactMatrix};
use crate::error::{Error, Result};
use crate::exactfield::{FieldSpec, Scalar};
use crate::factorize::prescribed_diagonal_conjugator;
use crate::unipoly::{roots_in_field, ParityClass, UniPoly};

fn require_square(a: &ExactMatrix) -> Result<()> {
    if a.is_square() {
        Ok(())
    } else {
        Err(Error::NonSquare)
    }
}

fn finish(input: &ExactMatrix, parts: Vec<Part>, trail: Vec<String>) -> Result<Certificate> {
    let cert = Certificate::sum(input.clone(), parts, trail);
    if &cert.combined()? != input {
        return Err(Error::Construction("summands do not add up to the input".into()));
    }
    for (i, p) in cert.parts.iter().enumerate() {
        if !p.role.holds(&p.matrix) {
            return Err(Error::Construction(format!("summand {} is not {}", i + 1, p.role)));
        }
    }
    Ok(cert)
}

fn conj_back(p: &ExactMatrix, pinv: &ExactMatrix, m: &ExactMatrix) -> ExactMatrix {
    &(p * m) * pinv
}

fn dg(f: FieldSpec, blocks: &[ExactMatrix]) -> ExactMatrix {
    let refs: Vec<&ExactMatrix> = blocks.iter().collect();
    ExactMatrix::block_diag(f, &refs)
}

fn trace_coeff(p: &UniPoly) -> Scalar {
    // the c_{n-1} of x^n - c_{n-1}x^{n-1} - ...
    -&p.coeff(p.deg() - 1)
}

/// P with a zero diagonal in P⁻¹AP.
pub fn zero_diagonal_conjugator(a: &ExactMatrix) -> Result<ExactMatrix> {
    require_square(a)?;
    if a.is_scalar() {
        return Err(Error::ScalarInput);
    }
    if !a.trace().is_zero() {
        return Err(Error::NonzeroTrace);
    }
    let f = a.field();
    prescribed_diagonal_conjugator(a, &vec![f.zero(); a.rows()])
}

/// Two nilpotent summands, or three when A is a nonzero scalar matrix.
pub fn nilpotent_sum(a: &ExactMatrix) -> Result<Certificate> {
    require_square(a)?;
    let f = a.field();
    let n = a.rows();
    if !a.trace().is_zero() {
        return Err(Error::NonzeroTrace);
    }
    if a.is_zero() {
        let z = ExactMatrix::zeros(f, n, n);
        return finish(a, vec![Part::new(z.clone(), Role::Nilpotent), Part::new(z, Role::Nilpotent)], vec!["zero input".into()]);
    }
    if let Some(lambda) = a.scalar_value() {
        let mut t1 = ExactMatrix::zeros(f, n, n);
        let mut t2 = ExactMatrix::zeros(f, n, n);
        for i in 0..n {
            for j in 0..i {
                t1[(i, j)] = f.one();
                t2[(j, i)] = f.one();
            }
        }
        let ones = ExactMatrix::from_rows(f, vec![vec![f.one(); n]; n]);
        let neg = -&lambda;
        let parts = vec![
            Part::new(t1.scale(&neg), Role::Nilpotent),
            Part::new(ones.scale(&lambda), Role::Nilpotent),
            Part::new(t2.scale(&neg), Role::Nilpotent),
        ];
        return finish(a, parts, vec!["nonzero scalar input: three summands".into()]);
    }
    let p = zero_diagonal_conjugator(a)?;
    let pinv = p.inverse()?;
    let c = a.conjugate(&p)?;
    let mut lower = ExactMatrix::zeros(f, n, n);
    let mut upper = ExactMatrix::zeros(f, n, n);
    for i in 0..n {
        for j in 0..n {
            if i > j {
                lower[(i, j)] = c[(i, j)].clone();
            } else if i < j {
                upper[(i, j)] = c[(i, j)].clone();
            }
        }
    }
    let parts = vec![
        Part::new(conj_back(&p, &pinv, &lower), Role::Nilpotent),
        Part::new(conj_back(&p, &pinv, &upper), Role::Nilpotent),
    ];
    finish(a, parts, vec!["zero-diagonal conjugate split into strict triangles".into()])
}

/// Every nonconstant invariant polynomial is even or odd.
pub fn is_sum_two_sqz(a: &ExactMatrix) -> bool {
    a.is_square() && invariant_polynomials(a).map(|inv| inv.nonconstant().iter().all(|p| p.is_even_or_odd())).unwrap_or(false)
}

/// Column split of C(p) for an even or odd p.
pub fn companion_two_split(p: &UniPoly) -> Result<(ExactMatrix, ExactMatrix)> {
    let c = p.companion()?;
    let f = p.field();
    let n = p.deg();
    // 0-based column j holds u_{j+1}
    let first_odd = match p.parity_class() {
        ParityClass::EvenPower => true,
        ParityClass::OddPower => false,
        ParityClass::Neither => return Err(Error::NotSumOfTwo),
    };
    let mut s = ExactMatrix::zeros(f, n, n);
    let mut t = ExactMatrix::zeros(f, n, n);
    for j in 0..n {
        let odd_indexed = j % 2 == 0;
        let target = if odd_indexed == first_odd { &mut s } else { &mut t };
        for i in 0..n {
            target[(i, j)] = c[(i, j)].clone();
        }
    }
    Ok((s, t))
}

/// A = S + T with S² = T² = 0.
pub fn sum_two_sqz(a: &ExactMatrix) -> Result<Certificate> {
    require_square(a)?;
    let f = a.field();
    let r = rcf(a)?;
    if !r.polys.iter().all(|p| p.is_even_or_odd()) {
        return Err(Error::NotSumOfTwo);
    }
    let mut ss = Vec::new();
    let mut ts = Vec::new();
    for p in &r.polys {
        let (s, t) = companion_two_split(p)?;
        ss.push(s);
        ts.push(t);
    }
    let pinv = r.p.inverse()?;
    let s = conj_back(&r.p, &pinv, &dg(f, &ss));
    let t = conj_back(&r.p, &pinv, &dg(f, &ts));
    let names: Vec<String> = r.polys.iter().map(|p| p.to_string()).collect();
    let trail = vec![format!("companion column split over invariant polynomials [{}]", names.join(", "))];
    finish(a, vec![Part::new(s, Role::SquareZero), Part::new(t, Role::SquareZero)], trail)
}

/// Four square-zero summands for any trace-zero A.
pub fn sum_four_sqz(a: &ExactMatrix) -> Result<Certificate> {
    require_square(a)?;
    let f = a.field();
    let n = a.rows();
    if !a.trace().is_zero() {
        return Err(Error::NonzeroTrace);
    }
    match a.scalar_value() {
        Some(lambda) if !lambda.is_zero() => {
            let c = f.characteristic() as usize;
            let x = UniPoly::x(f);
            let p = if c == 2 { x.pow(2) } else { &x.pow(c as u32) - &x };
            let cp = p.companion()?;
            let cq = p.shift(&-f.one()).companion()?;
            let shifted = &ExactMatrix::identity(f, c) + &cp;
            let pm = similarity_transform(&cq, &shifted)?.ok_or_else(|| Error::Construction("I + C(p) not similar to C(p(x-1))".into()))?;
            let g = cq.conjugate(&pm)?;
            let neg = sum_two_sqz(&-&cp)?;
            let pos = sum_two_sqz(&g)?;
            let gadget: Vec<ExactMatrix> =
                neg.parts.iter().chain(pos.parts.iter()).map(|q| q.matrix.scale(&lambda)).collect();
            let copies = n / c;
            let parts = gadget
                .iter()
                .map(|m| Part::new(dg(f, &vec![m.clone(); copies]), Role::SquareZero))
                .collect();
            let trail = vec![format!("scalar input: {} copies of the order-{} identity gadget with p = {}", copies, c, p)];
            finish(a, parts, trail)
        }
        _ => {
            let nil = nilpotent_sum(a)?;
            let mut parts = Vec::new();
            for part in &nil.parts {
                let two = sum_two_sqz(&part.matrix)?;
                parts.extend(two.parts);
            }
            finish(a, parts, vec!["two nilpotent summands, each split into two square-zero matrices".into()])
        }
    }
}

fn is_companion(c: &ExactMatrix) -> bool {
    if !c.is_square() {
        return false;
    }
    let n = c.rows();
    (0..n).all(|i| {
        (0..n - 1).all(|j| {
            let want_one = i == j + 1;
            if want_one {
                c[(i, j)].is_one()
            } else {
                c[(i, j)].is_zero()
            }
        })
    })
}

/// C(p) = S + C(q) where q keeps p's top coefficient and takes b_0..b_{n-2} below it.
pub fn resplit_companion(cp: &ExactMatrix, b: &[Scalar]) -> Result<(ExactMatrix, ExactMatrix)> {
    if !is_companion(cp) {
        return Err(Error::NotCompanion);
    }
    let n = cp.rows();
    if b.len() + 1 != n {
        return Err(Error::LengthMismatch(format!("{} coefficients for order {}", b.len(), n)));
    }
    let f = cp.field();
    let mut s = ExactMatrix::zeros(f, n, n);
    let mut cq = cp.clone();
    for (i, bi) in b.iter().enumerate() {
        s[(i, n - 1)] = &cp[(i, n - 1)] - bi;
        cq[(i, n - 1)] = bi.clone();
    }
    Ok((s, cq))
}

/// (C(p), C(p) − C(q)) for monic p, q of equal degree and equal subleading coefficient.
fn resplit_to(p: &UniPoly, q: &UniPoly) -> Result<(ExactMatrix, ExactMatrix)> {
    let n = p.deg();
    if q.deg() != n {
        return Err(Error::DegreeMismatch);
    }
    if p.coeff(n - 1) != q.coeff(n - 1) {
        return Err(Error::TraceMismatch);
    }
    let b: Vec<Scalar> = (0..n - 1).map(|i| -&q.coeff(i)).collect();
    let cp = p.companion()?;
    let (s, _) = resplit_companion(&cp, &b)?;
    Ok((cp, s))
}

/// Keep only the coefficients matching the parity of x^n; needs trace zero.
fn parity_part(p: &UniPoly) -> UniPoly {
    let n = p.deg();
    let f = p.field();
    UniPoly::new(f, (0..=n).map(|i| if (n - i) % 2 == 0 { p.coeff(i) } else { f.zero() }).collect())
}

/// M(D) = [[C(p1), D], [N, C(p2)]] with char poly p.
pub fn couple_companions(p1: &UniPoly, p2: &UniPoly, p: &UniPoly) -> Result<(ExactMatrix, ExactMatrix)> {
    let f = p.field();
    let (k, m) = (p1.deg(), p2.deg());
    let n = p.deg();
    if k == 0 || m == 0 || n != k + m || !p1.is_monic() || !p2.is_monic() || !p.is_monic() {
        return Err(Error::DegreeMismatch);
    }
    if p.coeff(n - 1) != &p1.coeff(k - 1) + &p2.coeff(m - 1) {
        return Err(Error::TraceMismatch);
    }
    // p2 truncated: p_{(2,i)} = p2 div x^i
    let tail = |i: usize| UniPoly::new(f, p2.coeffs()[i..].to_vec());
    let mut rest = &(p1 * p2) - p;
    let mut d = vec![UniPoly::zero(f); m];
    for (i, di) in d.iter_mut().enumerate().take(m - 1) {
        let t = n - 2 - i;
        let delta = rest.coeff(t);
        *di = UniPoly::monomial(f, delta, k - 1);
        rest = &rest - &(&*di * &tail(i + 1));
    }
    if rest.degree().is_some_and(|dg| dg >= k) {
        return Err(Error::Construction("coupling remainder too large".into()));
    }
    d[m - 1] = rest;
    let mut dm = ExactMatrix::zeros(f, k, m);
    for (i, di) in d.iter().enumerate() {
        for j in 0..k {
            dm[(j, i)] = di.coeff(j);
        }
    }
    let mut mm = ExactMatrix::block_diag(f, &[&p1.companion()?, &p2.companion()?]);
    mm.set_block(0, k, &dm);
    mm[(k, k - 1)] = f.one();
    if &mm.char_poly()? != p {
        return Err(Error::Construction("coupled companion has the wrong characteristic polynomial".into()));
    }
    Ok((mm, dm))
}

fn krylov(x: &ExactMatrix) -> ExactMatrix {
    let f = x.field();
    let n = x.rows();
    let mut cols = vec![unit_vector(f, n, 0)];
    for i in 1..n {
        let next = x.mul_vec(&cols[i - 1]);
        cols.push(next);
    }
    ExactMatrix::from_columns(f, n, &cols)
}

/// Dg[C(p_1), ...] plus ones linking each block's last column to the next block's first row.
fn chain(f: FieldSpec, polys: &[UniPoly]) -> Result<(ExactMatrix, ExactMatrix)> {
    let blocks: Vec<ExactMatrix> = polys.iter().map(|p| p.companion()).collect::<Result<_>>()?;
    let plain = dg(f, &blocks);
    let mut linked = plain.clone();
    let mut at = 0;
    for p in &polys[..polys.len().saturating_sub(1)] {
        at += p.deg();
        linked[(at, at - 1)] = f.one();
    }
    Ok((plain, linked))
}

/// For well-partitioned B = Dg[C(ps), C(qs)]: (B, S) with S² = 0 and B − S ≈ C(target).
fn well_partitioned_split(f: FieldSpec, ps: &[UniPoly], qs: &[UniPoly], target: &UniPoly) -> Result<(ExactMatrix, ExactMatrix)> {
    let (a1, x) = chain(f, ps)?;
    let (a2, y) = chain(f, qs)?;
    let (k1, k2) = (a1.rows(), a2.rows());
    let kx = krylov(&x);
    let ky = krylov(&y);
    let (_, dprime) = couple_companions(&x.char_poly()?, &y.char_poly()?, target)?;
    let d = &(&kx * &dprime) * &ky.inverse()?;
    let mut m = ExactMatrix::block_diag(f, &[&x, &y]);
    m.set_block(0, k1, &d);
    m[(k1, k1 - 1)] = f.one();
    let mut upper = ExactMatrix::block_diag(f, &[&a1, &a2]);
    upper.set_block(0, k1, &d);
    let sprime = &upper - &m;
    let xs = ExactMatrix::solve_sylvester(&a1, &a2, &d)?;
    let mut t = ExactMatrix::identity(f, k1 + k2);
    t.set_block(0, k1, &xs);
    let mut tinv = ExactMatrix::identity(f, k1 + k2);
    tinv.set_block(0, k1, &(-&xs));
    let b = ExactMatrix::block_diag(f, &[&a1, &a2]);
    let s = &(&t * &sprime) * &tinv;
    Ok((b, s))
}

/// Blocks (B_j, S_j); C = Dg[B_j − S_j] must be a two-sum.
fn assemble_three(a: &ExactMatrix, blocks: Vec<(ExactMatrix, ExactMatrix)>, trail: Vec<String>) -> Result<Certificate> {
    let f = a.field();
    let bs: Vec<ExactMatrix> = blocks.iter().map(|x| x.0.clone()).collect();
    let ss: Vec<ExactMatrix> = blocks.iter().map(|x| x.1.clone()).collect();
    let b = dg(f, &bs);
    let s = dg(f, &ss);
    let c = &b - &s;
    let p = similarity_transform(a, &b)?.ok_or_else(|| Error::Construction("block target not similar to input".into()))?;
    let pinv = p.inverse()?;
    let two = sum_two_sqz(&c)?;
    let mut parts: Vec<Part> =
        two.parts.iter().map(|q| Part::new(conj_back(&p, &pinv, &q.matrix), Role::SquareZero)).collect();
    parts.push(Part::new(conj_back(&p, &pinv, &s), Role::SquareZero));
    finish(a, parts, trail)
}

fn expand_divisors(a: &ExactMatrix) -> Result<Vec<(UniPoly, usize)>> {
    let mut out = Vec::new();
    for (q, e, mult) in elementary_divisors(a)? {
        for _ in 0..mult {
            out.push((q.clone(), e));
        }
    }
    Ok(out)
}

fn trace_zero_block(p: &UniPoly) -> Result<(ExactMatrix, ExactMatrix)> {
    resplit_to(p, &parity_part(p))
}

/// Well-partitioned arrangement of divisors with at most one (x − λ) per λ and
/// more than one irreducible; B − S ≈ C(x^k).
fn well_partitioned_blocks(f: FieldSpec, divisors: &[(UniPoly, usize)]) -> Result<(ExactMatrix, ExactMatrix)> {
    let q0 = divisors[0].0.clone();
    let mut own: Vec<usize> = divisors.iter().filter(|d| d.0 == q0).map(|d| d.1).collect();
    own.sort_unstable();
    let ps: Vec<UniPoly> = own.iter().map(|&e| q0.pow(e as u32)).collect();
    let mut qs = Vec::new();
    let mut linear = UniPoly::one(f);
    for (q, e) in divisors.iter().filter(|d| d.0 != q0) {
        if q.deg() == 1 && *e == 1 {
            linear = &linear * q;
        } else {
            qs.push(q.pow(*e as u32));
        }
    }
    if !linear.is_constant() {
        qs.push(linear);
    }
    let k: usize = divisors.iter().map(|d| d.0.deg() * d.1).sum();
    well_partitioned_split(f, &ps, &qs, &UniPoly::monomial(f, f.one(), k))
}

fn linear_root(q: &UniPoly) -> Scalar {
    -&q.coeff(0)
}

/// Three square-zero summands for trace-zero A over a field of characteristic 2.
pub fn sum_three_sqz_char2(a: &ExactMatrix) -> Result<Certificate> {
    require_square(a)?;
    let f = a.field();
    if f.characteristic() != 2 {
        return Err(Error::WrongCharacteristic);
    }
    if !a.trace().is_zero() {
        return Err(Error::NonzeroTrace);
    }
    let n = a.rows();
    if n == 0 || a.is_zero() {
        let z = ExactMatrix::zeros(f, n, n);
        return finish(a, vec![Part::new(z.clone(), Role::SquareZero), Part::new(z.clone(), Role::SquareZero), Part::new(z, Role::SquareZero)], vec!["zero input".into()]);
    }
    let mut blocks = Vec::new();
    let mut rest: Vec<(UniPoly, usize)> = Vec::new();
    let mut trail = Vec::new();
    for (q, e, mult) in elementary_divisors(a)? {
        if q.deg() == 1 && e == 1 {
            let lambda = linear_root(&q);
            for _ in 0..mult / 2 {
                let b = ExactMatrix::scalar(f, 2, &lambda);
                blocks.push((b, -&ExactMatrix::jordan(f, 2, &f.zero())));
            }
            if mult / 2 > 0 {
                trail.push(format!("peeled {} copies of {}I2", mult / 2, lambda));
            }
            if mult % 2 == 1 {
                rest.push((q, 1));
            }
        } else {
            for _ in 0..mult {
                rest.push((q.clone(), e));
            }
        }
    }
    if !rest.is_empty() {
        let q0 = rest[0].0.clone();
        if rest.iter().all(|d| d.0 == q0) {
            let k = q0.deg();
            if q0.coeff(k - 1).is_zero() {
                trail.push(format!("minimum polynomial a power of {}, trace-zero blocks", q0));
                for (q, e) in &rest {
                    blocks.push(trace_zero_block(&q.pow(*e as u32))?);
                }
            } else {
                trail.push(format!("minimum polynomial a power of {}, odd exponents paired", q0));
                let mut odd = Vec::new();
                for (q, e) in &rest {
                    let p = q.pow(*e as u32);
                    if e % 2 == 0 {
                        let c = p.companion()?;
                        let d = c.rows();
                        blocks.push((c, ExactMatrix::zeros(f, d, d)));
                    } else {
                        odd.push(p);
                    }
                }
                if odd.len() % 2 == 1 {
                    return Err(Error::Construction("odd number of odd-exponent blocks".into()));
                }
                for pair in odd.chunks(2) {
                    let (c1, c2) = (pair[0].companion()?, pair[1].companion()?);
                    let (d1, d2) = (c1.rows(), c2.rows());
                    let b = ExactMatrix::block_diag(f, &[&c1, &c2]);
                    let mut s = ExactMatrix::zeros(f, d1 + d2, d1 + d2);
                    s[(d1, d1 - 1)] = -f.one();
                    blocks.push((b, s));
                }
            }
        } else {
            trail.push("well-partitioned arrangement coupled to C(x^k)".into());
            blocks.push(well_partitioned_blocks(f, &rest)?);
        }
    }
    assemble_three(a, blocks, trail)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ThreeSumStatus {
    Yes(Box<Certificate>),
    No(String),
    Unknown(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeSumVerdict {
    pub status: ThreeSumStatus,
    pub checks: Vec<String>,
}

impl ThreeSumVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self.status, ThreeSumStatus::Yes(_))
    }

    pub fn is_no(&self) -> bool {
        matches!(self.status, ThreeSumStatus::No(_))
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match &self.status {
            ThreeSumStatus::Yes(c) => Some(c),
            _ => None,
        }
    }
}

/// Three square-zero summands for min poly (x−a)(x−b) with r linear and m quadratic
/// invariant polynomials, r | 2m, characteristic 0.
fn two_eigenvalue_blocks(f: FieldSpec, a: &Scalar, b: &Scalar, r: usize, m: usize) -> Result<Vec<(ExactMatrix, ExactMatrix)>> {
    let quad = &UniPoly::linear(f, a) * &UniPoly::linear(f, b);
    let s = 2 * m / r;
    let mut out = Vec::new();
    if r % 2 == 1 {
        for _ in 0..r {
            out.extend(one_linear_group(f, a, b, &quad, s / 2)?);
        }
    } else {
        for _ in 0..r / 2 {
            if s % 2 == 0 {
                out.extend(one_linear_group(f, a, b, &quad, s / 2)?);
                out.extend(one_linear_group(f, a, b, &quad, s / 2)?);
            } else {
                out.extend(two_linear_odd_group(f, a, b, &quad, s)?);
            }
        }
    }
    Ok(out)
}

fn one_linear_group(f: FieldSpec, a: &Scalar, b: &Scalar, quad: &UniPoly, count: usize) -> Result<Vec<(ExactMatrix, ExactMatrix)>> {
    let mut out = vec![(ExactMatrix::scalar(f, 1, a), ExactMatrix::zeros(f, 1, 1))];
    let apb = a + b;
    // consecutive blocks share an eigenvalue up to sign; the last one reaches 0
    for i in 2..=count + 1 {
        let beta = &(&f.from_i64(i as i64 - 1) * &apb) + a;
        let alpha = &apb - &beta;
        let target = &UniPoly::linear(f, &alpha) * &UniPoly::linear(f, &beta);
        out.push(resplit_to(quad, &target)?);
    }
    Ok(out)
}

fn two_linear_odd_group(f: FieldSpec, a: &Scalar, b: &Scalar, quad: &UniPoly, s: usize) -> Result<Vec<(ExactMatrix, ExactMatrix)>> {
    let k = (s - 1) / 2;
    let w = f.from_i64(s as i64).inverse()?;
    let mut out = Vec::new();
    let root = -&(a * &w);
    let target = &UniPoly::linear(f, &root) * &UniPoly::linear(f, &root);
    out.push(resplit_to(quad, &target)?);
    let j0 = ExactMatrix::jordan(f, 2, &f.zero());
    for i in 1..=k {
        let c = &(-&f.from_i64(2 * i as i64 + 1)) * &(a * &w);
        let d = &f.from_i64(2 * i as i64 - 1) * &(a * &w);
        if &c == a || &d == a {
            let u = ExactMatrix::block_diag(f, &[&ExactMatrix::jordan(f, 2, &c), &ExactMatrix::jordan(f, 2, &d)]);
            let l = -&ExactMatrix::block_diag(f, &[&j0, &j0]);
            out.push((&u + &l, l));
        } else {
            let e = &(a - &c) * &(&c - b);
            let one = f.one();
            let u = ExactMatrix::from_rows(
                f,
                vec![
                    vec![c.clone(), one.clone(), one.clone(), f.zero()],
                    vec![f.zero(), c.clone(), f.zero(), one.clone()],
                    vec![f.zero(), f.zero(), d.clone(), -&one],
                    vec![f.zero(), f.zero(), f.zero(), d.clone()],
                ],
            );
            let mut l = ExactMatrix::zeros(f, 4, 4);
            l[(2, 0)] = e.clone();
            l[(2, 1)] = &d - &c;
            l[(3, 1)] = e;
            out.push((&u + &l, l));
        }
    }
    out.push((ExactMatrix::scalar(f, 2, a), -&j0));
    Ok(out)
}

/// Decide whether A is a sum of three square-zero matrices, constructing summands where possible.
pub fn sum_three_decide(a: &ExactMatrix) -> ThreeSumVerdict {
    let mut checks = Vec::new();
    let status = decide_inner(a, &mut checks);
    ThreeSumVerdict { status, checks }
}

fn yes_or_unknown(r: Result<Certificate>, checks: &mut Vec<String>, what: &str) -> Option<ThreeSumStatus> {
    match r {
        Ok(c) => Some(ThreeSumStatus::Yes(Box::new(c))),
        Err(e) => {
            checks.push(format!("{} construction failed: {}", what, e));
            None
        }
    }
}

fn decide_inner(a: &ExactMatrix, checks: &mut Vec<String>) -> ThreeSumStatus {
    if !a.is_square() {
        return ThreeSumStatus::No("matrix is not square".into());
    }
    let f = a.field();
    let n = a.rows();
    checks.push("trace".into());
    if !a.trace().is_zero() {
        return ThreeSumStatus::No(format!("trace {} is nonzero", a.trace()));
    }
    if f.characteristic() == 2 {
        checks.push("characteristic 2: trace zero suffices".into());
        return match sum_three_sqz_char2(a) {
            Ok(c) => ThreeSumStatus::Yes(Box::new(c)),
            Err(e) => ThreeSumStatus::Unknown(vec![format!("characteristic 2 construction failed: {}", e)]),
        };
    }
    let charp = match a.char_poly() {
        Ok(p) => p,
        Err(e) => return ThreeSumStatus::Unknown(vec![e.to_string()]),
    };
    checks.push("nullity bound n(A - λI) ≤ 3n/4 at nonzero eigenvalues in the field".into());
    for lambda in roots_in_field(&charp) {
        if lambda.is_zero() {
            continue;
        }
        let m = (a - &ExactMatrix::scalar(f, n, &lambda)).nullspace().dim();
        if 4 * m > 3 * n {
            return ThreeSumStatus::No(format!("n(A - ({})I) = {} > {}/4 = 3n/4", lambda, m, 3 * n));
        }
    }
    let inv = match invariant_polynomials(a) {
        Ok(i) => i.nonconstant(),
        Err(e) => return ThreeSumStatus::Unknown(vec![e.to_string()]),
    };
    let char0 = f.characteristic() == 0;
    let minp = inv.last().cloned().unwrap_or_else(|| UniPoly::one(f));
    if char0 && minp.deg() == 2 {
        let roots = roots_in_field(&minp);
        let linear: Vec<&UniPoly> = inv.iter().filter(|p| p.deg() == 1).collect();
        if roots.len() == 2 && !linear.is_empty() {
            checks.push("two-eigenvalue divisibility criterion r | 2m".into());
            let a0 = linear_root(linear[0]);
            let b0 = if roots[0] == a0 { roots[1].clone() } else { roots[0].clone() };
            let r = linear.len();
            let m = inv.len() - r;
            if (2 * m) % r != 0 {
                return ThreeSumStatus::No(format!("r={} does not divide 2m={}", r, 2 * m));
            }
            let built = two_eigenvalue_blocks(f, &a0, &b0, r, m)
                .and_then(|blocks| assemble_three(a, blocks, vec![format!("two eigenvalues {} and {}: r={} divides 2m={}", a0, b0, r, 2 * m)]));
            if let Some(s) = yes_or_unknown(built, checks, "two-eigenvalue") {
                return s;
            }
        }
    }
    if inv.len() == 1 {
        checks.push("nonderogatory trace-zero split".into());
        let built = trace_zero_block(&inv[0]).and_then(|blk| assemble_three(a, vec![blk], vec!["nonderogatory: companion minus square-zero last column".into()]));
        if let Some(s) = yes_or_unknown(built, checks, "nonderogatory") {
            return s;
        }
    }
    checks.push("all invariant polynomials of trace zero".into());
    if inv.iter().all(|p| trace_coeff(p).is_zero()) {
        let built = inv
            .iter()
            .map(trace_zero_block)
            .collect::<Result<Vec<_>>>()
            .and_then(|blocks| assemble_three(a, blocks, vec!["every invariant polynomial has trace zero".into()]));
        if let Some(s) = yes_or_unknown(built, checks, "trace-zero invariants") {
            return s;
        }
    }
    if char0 && inv.iter().all(|p| p.deg() > 1) {
        checks.push("all invariant polynomials of degree > 1".into());
        let built = degree_two_plus_blocks(f, &inv).and_then(|blocks| assemble_three(a, blocks, vec!["invariant polynomials of degree > 1, eigenvalue chain".into()]));
        if let Some(s) = yes_or_unknown(built, checks, "degree > 1") {
            return s;
        }
    }
    checks.push("one linear elementary divisor per eigenvalue, well-partitioned".into());
    match expand_divisors(a) {
        Ok(divs) => {
            let q0 = &divs[0].0;
            let prime_power = divs.iter().all(|d| &d.0 == q0);
            let mut lin: Vec<&UniPoly> = divs.iter().filter(|d| d.0.deg() == 1 && d.1 == 1).map(|d| &d.0).collect();
            let total = lin.len();
            lin.dedup();
            if !prime_power && lin.len() == total {
                let built = well_partitioned_blocks(f, &divs)
                    .and_then(|blk| assemble_three(a, vec![blk], vec!["well-partitioned arrangement coupled to C(x^n)".into()]));
                if let Some(s) = yes_or_unknown(built, checks, "well-partitioned") {
                    return s;
                }
            }
        }
        Err(e) => checks.push(format!("elementary divisors unavailable: {}", e)),
    }
    let mut notes = vec!["no listed sufficient condition applies; the general case is open".to_string()];
    notes.extend(checks.iter().cloned());
    ThreeSumStatus::Unknown(notes)
}

fn degree_two_plus_blocks(f: FieldSpec, inv: &[UniPoly]) -> Result<Vec<(ExactMatrix, ExactMatrix)>> {
    let traces: Vec<Scalar> = inv.iter().map(trace_coeff).collect();
    let mut prefix = vec![f.zero()];
    for t in &traces {
        let next = prefix.last().unwrap() + t;
        prefix.push(next);
    }
    let two = f.from_i64(2);
    let mut c = f.one();
    loop {
        let ok = !c.is_zero()
            && (1..prefix.len()).all(|i| &two * &c != &prefix[i - 1] + &prefix[i] && c != prefix[i]);
        if ok {
            break;
        }
        c = &c + &f.one();
    }
    let mut out = Vec::new();
    for (i, p) in inv.iter().enumerate() {
        let l1 = &c - &prefix[i];
        let l2 = &prefix[i + 1] - &c;
        let target = &(&UniPoly::linear(f, &l1) * &UniPoly::linear(f, &l2)) * &UniPoly::monomial(f, f.one(), p.deg() - 2);
        out.push(resplit_to(p, &target)?);
    }
    Ok(out)
}
