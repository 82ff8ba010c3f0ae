//! Products of nilpotent and square-zero matrices.

use crate::canonform::fitting;
use crate::certificate::{Certificate, Part, Role};
use crate::densemat::{complete_with_standard, extend_basis, Echelon, ExactMatrix};
use crate::error::{Error, Result};
use crate::exactfield::{FieldSpec, Scalar};
use crate::matdiv::{intersect_colspaces, sqz_quotient_right};

fn require_square(a: &ExactMatrix) -> Result<()> {
    if a.is_square() {
        Ok(())
    } else {
        Err(Error::NonSquare)
    }
}

fn finish(input: &ExactMatrix, parts: Vec<Part>, trail: Vec<String>) -> Result<Certificate> {
    let cert = Certificate::product(input.clone(), parts, trail);
    if &cert.combined()? != input {
        return Err(Error::Construction("factors do not multiply to the input".into()));
    }
    for (i, p) in cert.parts.iter().enumerate() {
        if !p.role.holds(&p.matrix) {
            return Err(Error::Construction(format!("factor {} is not {}", i + 1, p.role)));
        }
    }
    Ok(cert)
}

fn set(m: &mut ExactMatrix, i: usize, j: usize, v: Scalar) {
    m[(i, j)] = v;
}

/// P with P⁻¹NP = Dg[J_{s_1}(0), J_{s_2}(0), ...], sizes non-increasing.
pub fn nilpotent_jordan_basis(n: &ExactMatrix) -> Result<(ExactMatrix, Vec<usize>)> {
    require_square(n)?;
    if !n.is_nilpotent() {
        return Err(Error::NotNilpotent);
    }
    let f = n.field();
    let d = n.rows();
    let mut kernels = vec![Vec::new()];
    let mut pw = ExactMatrix::identity(f, d);
    while kernels.last().unwrap().len() < d {
        pw = &pw * n;
        kernels.push(pw.nullspace().vectors);
    }
    let apply = |v: &[Scalar], times: usize| {
        let mut w = v.to_vec();
        for _ in 0..times {
            w = n.mul_vec(&w);
        }
        w
    };
    let mut leaders: Vec<(Vec<Scalar>, usize)> = Vec::new();
    for j in (1..kernels.len()).rev() {
        let mut e = Echelon::new(f, d);
        for v in &kernels[j - 1] {
            e.insert(v);
        }
        for (v, len) in &leaders {
            e.insert(&apply(v, len - j));
        }
        for v in &kernels[j] {
            if e.insert(v) {
                leaders.push((v.clone(), j));
            }
        }
    }
    let mut cols = Vec::with_capacity(d);
    for (v, len) in &leaders {
        for t in 0..*len {
            cols.push(apply(v, t));
        }
    }
    let sizes = leaders.iter().map(|l| l.1).collect();
    Ok((ExactMatrix::from_columns(f, d, &cols), sizes))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum WuGroup {
    Single(usize),
    /// Dg[J_k(0), J_2(0)]
    WithTwo(usize),
    ThreeTwos,
}

impl WuGroup {
    fn sizes(&self) -> Vec<usize> {
        match *self {
            WuGroup::Single(k) => vec![k],
            WuGroup::WithTwo(k) => vec![k, 2],
            WuGroup::ThreeTwos => vec![2, 2, 2],
        }
    }
}

fn wu_factors(f: FieldSpec, g: WuGroup) -> (ExactMatrix, ExactMatrix) {
    let one = f.one();
    match g {
        WuGroup::Single(1) => (ExactMatrix::zeros(f, 1, 1), ExactMatrix::zeros(f, 1, 1)),
        WuGroup::Single(k) if k % 2 == 1 => {
            let mut n1 = ExactMatrix::zeros(f, k, k);
            let mut n2 = ExactMatrix::zeros(f, k, k);
            set(&mut n1, 1, k - 1, one.clone());
            for i in 0..k - 2 {
                set(&mut n1, i + 2, i, one.clone());
                set(&mut n2, i, i + 1, one.clone());
            }
            set(&mut n2, k - 1, 0, one);
            (n1, n2)
        }
        WuGroup::Single(k) => {
            let mut n4 = ExactMatrix::zeros(f, k, k);
            for i in 0..k - 2 {
                set(&mut n4, i, i + 1, one.clone());
            }
            set(&mut n4, k - 1, 0, one.clone());
            set(&mut n4, 0, 2, one.clone());
            let mut n3 = ExactMatrix::zeros(f, k, k);
            set(&mut n3, 1, k - 2, one.clone());
            set(&mut n3, 1, k - 1, one.clone());
            set(&mut n3, 2, 0, one.clone());
            set(&mut n3, 2, 1, -&one);
            set(&mut n3, 3, 1, one.clone());
            for i in 4..k {
                set(&mut n3, i, i - 2, one.clone());
            }
            (n3, n4)
        }
        WuGroup::WithTwo(1) => (ExactMatrix::unit(f, 3, 3, 2, 0), ExactMatrix::unit(f, 3, 3, 0, 1)),
        WuGroup::WithTwo(k) if k % 2 == 0 => {
            let s = k + 2;
            let mut n1 = ExactMatrix::zeros(f, s, s);
            let mut n2 = ExactMatrix::zeros(f, s, s);
            for i in 0..k - 1 {
                set(&mut n1, i + 1, 2 + i, one.clone());
                set(&mut n2, 2 + i, i, one.clone());
            }
            set(&mut n1, k + 1, 1, one.clone());
            set(&mut n2, 1, k, one);
            (n1, n2)
        }
        WuGroup::WithTwo(k) => {
            let s = k + 2;
            let mut a1 = vec![None; k];
            let mut a2 = vec![None; k];
            a1[0] = Some(1);
            a2[0] = Some(0);
            for p in 0..(k - 3) / 2 {
                a1[2 + 2 * p] = Some(3 + 2 * p);
                a1[3 + 2 * p] = Some(2 + 2 * p);
                a2[1 + 2 * p] = Some(3 + 2 * p);
                a2[2 + 2 * p] = Some(2 + 2 * p);
            }
            a1[k - 1] = Some(k - 1);
            a2[k - 2] = Some(k - 1);
            let mut n3 = ExactMatrix::zeros(f, s, s);
            let mut n4 = ExactMatrix::zeros(f, s, s);
            for j in 0..k {
                if let Some(r) = a1[j] {
                    set(&mut n3, r, 2 + j, one.clone());
                }
                if let Some(r) = a2[j] {
                    set(&mut n4, 2 + r, j, one.clone());
                }
            }
            set(&mut n3, k + 1, 0, one.clone());
            set(&mut n4, 0, k, one);
            (n3, n4)
        }
        WuGroup::ThreeTwos => {
            let mut n5 = ExactMatrix::zeros(f, 6, 6);
            let mut n6 = ExactMatrix::zeros(f, 6, 6);
            set(&mut n5, 1, 5, one.clone());
            set(&mut n5, 3, 0, one.clone());
            set(&mut n5, 5, 2, one.clone());
            set(&mut n6, 0, 2, one.clone());
            set(&mut n6, 2, 4, one.clone());
            set(&mut n6, 5, 0, one);
            (n5, n6)
        }
    }
}

fn wu_groups(sizes: &[usize]) -> Option<Vec<WuGroup>> {
    let others: Vec<usize> = sizes.iter().copied().filter(|&s| s != 2).collect();
    let twos = sizes.len() - others.len();
    let mut groups = Vec::new();
    let mut rest = twos;
    let mut others_iter = others.into_iter();
    if twos % 2 == 1 {
        match others_iter.next() {
            Some(k) => {
                groups.push(WuGroup::WithTwo(k));
                rest -= 1;
            }
            None if twos >= 3 => {
                groups.push(WuGroup::ThreeTwos);
                rest -= 3;
            }
            None => return None,
        }
    }
    for _ in 0..rest / 2 {
        groups.push(WuGroup::WithTwo(2));
    }
    groups.extend(others_iter.map(WuGroup::Single));
    Some(groups)
}

/// N = N₁·N₂ with both factors nilpotent of rank r(N).
pub fn nilpotent_product_nilpotent(n: &ExactMatrix) -> Result<Certificate> {
    require_square(n)?;
    let f = n.field();
    let (p, sizes) = nilpotent_jordan_basis(n)?;
    let groups = wu_groups(&sizes).ok_or(Error::Order2NonzeroNilpotent)?;
    // reorder chain columns to follow the groups
    let mut starts = Vec::new();
    let mut acc = 0;
    for s in &sizes {
        starts.push(acc);
        acc += s;
    }
    let mut used = vec![false; sizes.len()];
    let mut take = |want: usize| -> usize {
        let i = (0..sizes.len()).find(|&i| !used[i] && sizes[i] == want).unwrap();
        used[i] = true;
        i
    };
    let mut order = Vec::new();
    let mut b1 = Vec::new();
    let mut b2 = Vec::new();
    for g in &groups {
        for s in g.sizes() {
            let i = take(s);
            order.extend(starts[i]..starts[i] + s);
        }
        let (x, y) = wu_factors(f, *g);
        b1.push(x);
        b2.push(y);
    }
    let q = &p * &ExactMatrix::identity(f, n.rows()).select_columns(&order);
    let qi = q.inverse()?;
    let r1: Vec<&ExactMatrix> = b1.iter().collect();
    let r2: Vec<&ExactMatrix> = b2.iter().collect();
    let n1 = &(&q * &ExactMatrix::block_diag(f, &r1)) * &qi;
    let n2 = &(&q * &ExactMatrix::block_diag(f, &r2)) * &qi;
    let rank = n.rank();
    if n1.rank() != rank || n2.rank() != rank {
        return Err(Error::Construction("nilpotent factor rank differs from input rank".into()));
    }
    let trail = vec![format!("nilpotent input, Jordan sizes {:?}, groups {:?}", sizes, groups)];
    finish(n, vec![Part::new(n1, Role::Nilpotent), Part::new(n2, Role::Nilpotent)], trail)
}

/// Column vector x with x and Ax independent.
fn independent_vector(a: &ExactMatrix) -> Vec<Scalar> {
    let f = a.field();
    let n = a.rows();
    for i in 0..n {
        for j in 0..n {
            if i != j && !a[(i, j)].is_zero() {
                return crate::densemat::unit_vector(f, n, j);
            }
        }
    }
    vec![f.one(); n]
}

/// S and S⁻¹AS = [[λ, c], [e₁, B]] for non-scalar A.
pub fn specify_diagonal(a: &ExactMatrix, lambda: &Scalar) -> Result<(ExactMatrix, ExactMatrix)> {
    require_square(a)?;
    if a.is_scalar() {
        return Err(Error::ScalarInput);
    }
    let f = a.field();
    let n = a.rows();
    let x = independent_vector(a);
    let ax = a.mul_vec(&x);
    let second: Vec<Scalar> = ax.iter().zip(&x).map(|(u, v)| u - &(lambda * v)).collect();
    let mut cols = vec![x, second];
    let rest = complete_with_standard(f, n, &cols);
    cols.extend(rest);
    let s = ExactMatrix::from_columns(f, n, &cols);
    let c = a.conjugate(&s)?;
    Ok((s, c))
}

fn embed_lower(f: FieldSpec, p: &ExactMatrix) -> ExactMatrix {
    ExactMatrix::block_diag(f, &[&ExactMatrix::identity(f, 1), p])
}

/// P with diag(P⁻¹AP) = lambdas, for non-scalar A with tr(A) = Σ lambdas.
pub fn prescribed_diagonal_conjugator(a: &ExactMatrix, lambdas: &[Scalar]) -> Result<ExactMatrix> {
    require_square(a)?;
    if lambdas.len() != a.rows() {
        return Err(Error::LengthMismatch(format!("{} diagonal entries for order {}", lambdas.len(), a.rows())));
    }
    let f = a.field();
    let total = lambdas.iter().fold(f.zero(), |s, l| &s + l);
    if total != a.trace() {
        return Err(Error::TraceMismatch);
    }
    if a.rows() == 1 {
        return Ok(ExactMatrix::identity(f, 1));
    }
    let p = diag_rec(a, lambdas)?;
    let c = a.conjugate(&p)?;
    if (0..a.rows()).any(|i| c[(i, i)] != lambdas[i]) {
        return Err(Error::Construction("diagonal not attained".into()));
    }
    Ok(p)
}

fn diag_rec(a: &ExactMatrix, lambdas: &[Scalar]) -> Result<ExactMatrix> {
    let f = a.field();
    let n = a.rows();
    if n == 1 {
        return Ok(ExactMatrix::identity(f, 1));
    }
    let (mut s, mut ap) = specify_diagonal(a, &lambdas[0])?;
    if n >= 3 && ap.sub_block(1, n, 1, n).is_scalar() {
        let mut p1 = ExactMatrix::identity(f, n);
        p1[(0, 2)] = f.one();
        ap = ap.conjugate(&p1)?;
        s = &s * &p1;
    }
    let b = ap.sub_block(1, n, 1, n);
    let pb = diag_rec(&b, &lambdas[1..])?;
    Ok(&s * &embed_lower(f, &pb))
}

/// (P, L, U) with P⁻¹AP = LU, diag(L) = xs, diag(U) = ys.
pub fn lu_similarity(a: &ExactMatrix, xs: &[Scalar], ys: &[Scalar]) -> Result<(ExactMatrix, ExactMatrix, ExactMatrix)> {
    require_square(a)?;
    let f = a.field();
    let n = a.rows();
    if a.is_scalar() {
        return Err(Error::ScalarInput);
    }
    let det = a.det()?;
    if det.is_zero() {
        return Err(Error::SingularInput);
    }
    if xs.len() != n || ys.len() != n {
        return Err(Error::LengthMismatch(format!("need {} diagonal entries", n)));
    }
    let prod = xs.iter().chain(ys).fold(f.one(), |s, v| &s * v);
    if prod != det {
        return Err(Error::DeterminantMismatch);
    }
    let z: Vec<Scalar> = xs.iter().zip(ys).map(|(x, y)| x * y).collect();
    let (p, l1, u1) = lu_rec(a, &z)?;
    let d = ExactMatrix::diag(f, xs);
    let dinv = ExactMatrix::diag(f, &xs.iter().map(|x| x.inverse().unwrap()).collect::<Vec<_>>());
    let l = &l1 * &d;
    let u = &dinv * &u1;
    if a.conjugate(&p)? != &l * &u {
        return Err(Error::Construction("LU similarity check failed".into()));
    }
    Ok((p, l, u))
}

/// Diagonals (1, ..., 1) and (1, ..., 1, det A).
pub fn lu_similarity_default(a: &ExactMatrix) -> Result<(ExactMatrix, ExactMatrix, ExactMatrix)> {
    let f = a.field();
    let n = a.rows();
    let xs = vec![f.one(); n];
    let mut ys = vec![f.one(); n];
    ys[n - 1] = a.det()?;
    lu_similarity(a, &xs, &ys)
}

fn lu_rec(a: &ExactMatrix, z: &[Scalar]) -> Result<(ExactMatrix, ExactMatrix, ExactMatrix)> {
    let f = a.field();
    let n = a.rows();
    if n == 1 {
        return Ok((ExactMatrix::identity(f, 1), ExactMatrix::identity(f, 1), a.clone()));
    }
    let (mut s, mut ap) = specify_diagonal(a, &z[0])?;
    let z1inv = z[0].inverse()?;
    let reduce = |ap: &ExactMatrix| {
        let mut b1 = ap.sub_block(1, n, 1, n);
        for j in 0..n - 1 {
            b1[(0, j)] = &b1[(0, j)] - &(&z1inv * &ap[(0, j + 1)]);
        }
        b1
    };
    let mut b1 = reduce(&ap);
    if n >= 3 && b1.is_scalar() {
        let mut s2 = ExactMatrix::identity(f, n);
        s2[(0, 2)] = -f.one();
        ap = ap.conjugate(&s2)?;
        s = &s * &s2;
        b1 = reduce(&ap);
    }
    let (p1, l1, u1) = lu_rec(&b1, &z[1..])?;
    let p1inv = p1.inverse()?;
    let c = ap.sub_block(0, 1, 1, n);
    let mut l = ExactMatrix::zeros(f, n, n);
    l[(0, 0)] = f.one();
    let col = p1inv.column(0);
    for i in 0..n - 1 {
        l[(i + 1, 0)] = &z1inv * &col[i];
    }
    l.set_block(1, 1, &l1);
    let mut u = ExactMatrix::zeros(f, n, n);
    u[(0, 0)] = z[0].clone();
    u.set_block(0, 1, &(&c * &p1));
    u.set_block(1, 1, &u1);
    Ok((&s * &embed_lower(f, &p1), l, u))
}

/// A = N₁·N₂, both nilpotent with the rank of A, for singular A outside the 2×2 exception.
pub fn nilpotent_product_two(a: &ExactMatrix) -> Result<Certificate> {
    require_square(a)?;
    let f = a.field();
    if !a.det()?.is_zero() {
        return Err(Error::NonSingular);
    }
    if a.is_nilpotent() {
        if a.rows() == 2 && !a.is_zero() {
            return Err(Error::ExceptionalCase);
        }
        return Ok(nilpotent_product_nilpotent(a)?.with_step("nilpotent input"));
    }
    let fit = fitting(a)?;
    let (a0, a1) = (&fit.n, &fit.b);
    let (s, k) = (a0.rows(), a1.rows());
    let (p1, l, u) = match a1.scalar_value() {
        Some(_) => (ExactMatrix::identity(f, k), ExactMatrix::identity(f, k), a1.clone()),
        None => lu_similarity_default(a1)?,
    };
    let mut trail = vec![format!("Fitting split: nilpotent part of order {}, invertible part of order {}", s, k)];
    let (q, f1, f2) = if s == 2 && !a0.is_zero() {
        trail.push("nilpotent part similar to J2(0)".into());
        let j = (0..2).find(|&j| !a0.column(j).iter().all(|x| x.is_zero())).unwrap();
        let q2 = crate::densemat::unit_vector(f, 2, j);
        let q1 = a0.mul_vec(&q2);
        let q = ExactMatrix::from_columns(f, 2, &[q1, q2]);
        let n = k + 2;
        let one = f.one();
        let mut n1 = ExactMatrix::zeros(f, n, n);
        n1[(0, 0)] = one.clone();
        n1[(0, n - 1)] = one.clone();
        n1[(n - 1, 0)] = -&one;
        n1[(n - 1, n - 1)] = -&one;
        let mut n2 = ExactMatrix::zeros(f, n, n);
        n2[(0, 1)] = one;
        for i in 0..k {
            for jj in 0..k {
                if !l[(i, jj)].is_zero() {
                    n1[(2 + i, 1 + jj)] = l[(i, jj)].clone();
                }
                if !u[(i, jj)].is_zero() {
                    n2[(1 + i, 2 + jj)] = u[(i, jj)].clone();
                }
            }
        }
        (q, n1, n2)
    } else {
        trail.push(format!("nilpotent part of order {} factored into nilpotent pair", s));
        let (n1, n2) = if a0.is_zero() {
            (ExactMatrix::zeros(f, s, s), ExactMatrix::zeros(f, s, s))
        } else {
            let c = nilpotent_product_nilpotent(a0)?;
            (c.parts[0].matrix.clone(), c.parts[1].matrix.clone())
        };
        let kv = n1.nullspace().vectors.into_iter().next().ok_or_else(|| Error::Construction("nilpotent factor has trivial kernel".into()))?;
        let mut cols = complete_with_standard(f, s, &[kv.clone()]);
        cols.push(kv);
        let q = ExactMatrix::from_columns(f, s, &cols);
        let n1 = n1.conjugate(&q)?;
        let n2 = n2.conjugate(&q)?;
        let n = s + k;
        let mut f1 = ExactMatrix::zeros(f, n, n);
        let mut f2 = ExactMatrix::zeros(f, n, n);
        f1.set_block(0, 0, &n1);
        f2.set_block(0, 0, &n2);
        for i in 0..k {
            f1[(s + i, s - 1)] = l[(i, 0)].clone();
            f2[(s - 1, s + i)] = u[(0, i)].clone();
            for jj in 0..k - 1 {
                f1[(s + i, s + jj)] = l[(i, jj + 1)].clone();
                f2[(s + jj, s + i)] = u[(jj + 1, i)].clone();
            }
        }
        (q, f1, f2)
    };
    let m = &f1 * &f2;
    let n = s + k;
    if !m.sub_block(0, s, s, n).is_zero() {
        return Err(Error::Construction("coupling block is not lower triangular".into()));
    }
    let a0p = m.sub_block(0, s, 0, s);
    let lu = m.sub_block(s, n, s, n);
    let b = m.sub_block(s, n, 0, s);
    let x = ExactMatrix::solve_sylvester(&lu, &a0p, &(-&b))?;
    let mut tinv = ExactMatrix::identity(f, n);
    tinv.set_block(s, 0, &(-&x));
    let w = &(&fit.p * &ExactMatrix::block_diag(f, &[&q, &p1])) * &tinv;
    let winv = w.inverse()?;
    let g1 = &(&w * &f1) * &winv;
    let g2 = &(&w * &f2) * &winv;
    let r = a.rank();
    if g1.rank() != r || g2.rank() != r {
        return Err(Error::Construction("factor rank differs from input rank".into()));
    }
    finish(a, vec![Part::new(g1, Role::Nilpotent), Part::new(g2, Role::Nilpotent)], trail)
}

fn check_rank(requested: usize, low: usize, high: usize) -> Result<()> {
    if requested < low || requested > high {
        Err(Error::RankOutOfBounds { requested, low, high })
    } else {
        Ok(())
    }
}

/// r(G) ≤ n(G) − dim(R(G) ∩ N(G)).
pub fn is_two_sqz_product(g: &ExactMatrix) -> Result<bool> {
    require_square(g)?;
    let r = g.rank();
    let d = intersect_colspaces(g, &g.nullspace().to_matrix(g.field())).dim();
    Ok(r + d <= g.rows() - r)
}

/// G = H·F with H, F square-zero of the requested ranks (default r(G)).
pub fn sqz_product_two(g: &ExactMatrix, rank_h: Option<usize>, rank_f: Option<usize>) -> Result<Certificate> {
    require_square(g)?;
    let f = g.field();
    let m = g.rows();
    let r = g.rank();
    let null = g.nullspace().vectors;
    let inter = intersect_colspaces(g, &ExactMatrix::from_columns(f, m, &null)).vectors;
    if r + inter.len() > m - r {
        return Err(Error::NotTwoSqzFactorable);
    }
    let (rh, rf) = (rank_h.unwrap_or(r), rank_f.unwrap_or(r));
    check_rank(rh, r, m / 2)?;
    check_rank(rf, r, m / 2)?;
    let ext = extend_basis(f, m, &inter, &null);
    let udim = m - 2 * r;
    let mut us = inter.clone();
    us.extend(ext[..udim - inter.len()].iter().map(|&i| null[i].clone()));
    let ws: Vec<Vec<Scalar>> = ext[udim - inter.len()..].iter().map(|&i| null[i].clone()).collect();
    let vs = complete_with_standard(f, m, &null);
    let c = rf - r;
    let zero = vec![f.zero(); m];
    let mut basis = vs.clone();
    basis.extend(ws.iter().cloned());
    basis.extend(us.iter().cloned());
    let mut images = ws.clone();
    images.extend(std::iter::repeat(zero.clone()).take(ws.len()));
    for i in 0..us.len() {
        images.push(if i < c { us[i + c].clone() } else { zero.clone() });
    }
    let bm = ExactMatrix::from_columns(f, m, &basis);
    let fm = &ExactMatrix::from_columns(f, m, &images) * &bm.inverse()?;
    let h = sqz_quotient_right(g, &fm, Some(rh), None)?.h;
    let trail = vec![format!("two square-zero factors: shift length c = {}", c)];
    finish(g, vec![Part::new(h, Role::SquareZero), Part::new(fm, Role::SquareZero)], trail)
}

/// G = H₁·H₂·H₃, all square-zero. Without ranks the block construction over the
/// Fitting decomposition is used; with ranks, an idempotent middle divisor.
pub fn sqz_product_three(g: &ExactMatrix, ranks: Option<[usize; 3]>) -> Result<Certificate> {
    require_square(g)?;
    let m = g.rows();
    let r = g.rank();
    if 2 * r > m {
        return Err(Error::RankTooHigh { rank: r, n: m });
    }
    match ranks {
        None => sqz_three_blocks(g),
        Some(rs) => {
            for &t in &rs {
                check_rank(t, r, m / 2)?;
            }
            sqz_three_idempotent(g, rs)
        }
    }
}

fn sqz_three_idempotent(g: &ExactMatrix, rs: [usize; 3]) -> Result<Certificate> {
    let f = g.field();
    let m = g.rows();
    let null = g.nullspace().vectors;
    let range = g.colspace().vectors;
    let inter = intersect_colspaces(g, &ExactMatrix::from_columns(f, m, &null)).vectors;
    let rcal: Vec<Vec<Scalar>> = extend_basis(f, m, &inter, &range).into_iter().map(|i| range[i].clone()).collect();
    let mut start = inter.clone();
    start.extend(rcal.iter().cloned());
    let ncal: Vec<Vec<Scalar>> = extend_basis(f, m, &start, &null).into_iter().map(|i| null[i].clone()).collect();
    start.extend(ncal.iter().cloned());
    let wcal = complete_with_standard(f, m, &start);
    let tilted: Vec<Vec<Scalar>> = rcal.iter().zip(&ncal).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect()).collect();
    let mut img = wcal.clone();
    img.extend(tilted.iter().cloned());
    let mut dom = img.clone();
    img.extend(std::iter::repeat(vec![f.zero(); m]).take(null.len()));
    dom.extend(null.iter().cloned());
    let fm = &ExactMatrix::from_columns(f, m, &img) * &ExactMatrix::from_columns(f, m, &dom).inverse()?;
    let h1 = sqz_quotient_right(g, &fm, Some(rs[0]), None)?.h;
    let two = sqz_product_two(&fm, Some(rs[1]), Some(rs[2]))?;
    let trail = vec![format!(
        "three square-zero factors via idempotent divisor of rank {} (|W| = {}, |R~| = {})",
        fm.rank(),
        wcal.len(),
        tilted.len()
    )];
    finish(
        g,
        vec![Part::new(h1, Role::SquareZero), Part::new(two.parts[0].matrix.clone(), Role::SquareZero), Part::new(two.parts[1].matrix.clone(), Role::SquareZero)],
        trail,
    )
}

fn sqz_three_blocks(g: &ExactMatrix) -> Result<Certificate> {
    let f = g.field();
    let m = g.rows();
    let fit = fitting(g)?;
    let kn = fit.n.rows();
    let kb = fit.b.rows();
    let (pn, sizes) = nilpotent_jordan_basis(&fit.n)?;
    let lift = |v: Vec<Scalar>| {
        let mut w = v;
        w.resize(m, f.zero());
        w
    };
    let mut starts = Vec::new();
    let mut acc = 0;
    for s in &sizes {
        starts.push(acc);
        acc += s;
    }
    let mut ones: Vec<Vec<Scalar>> =
        sizes.iter().zip(&starts).filter(|(s, _)| **s == 1).map(|(_, &st)| lift(pn.column(st))).collect();
    let mut basis: Vec<Vec<Scalar>> = Vec::new();
    let (mut x, mut y, mut z) = (Vec::new(), Vec::new(), Vec::new());
    let mut take_ones = |count: usize, basis: &mut Vec<Vec<Scalar>>| -> Result<()> {
        if ones.len() < count {
            return Err(Error::RankTooHigh { rank: g.rank(), n: m });
        }
        basis.extend(ones.drain(..count));
        Ok(())
    };
    let one = f.one();
    for (s, st) in sizes.iter().zip(&starts) {
        let s = *s;
        if s == 1 {
            continue;
        }
        for t in 0..s {
            basis.push(lift(pn.column(st + t)));
        }
        if s == 2 {
            x.push(ExactMatrix::unit(f, 2, 2, 1, 0));
            y.push(ExactMatrix::unit(f, 2, 2, 0, 1));
            z.push(ExactMatrix::unit(f, 2, 2, 1, 0));
            continue;
        }
        take_ones(s - 2, &mut basis)?;
        let h = s - 1;
        let mut xb = ExactMatrix::zeros(f, 2 * h, 2 * h);
        xb[(1, 0)] = one.clone();
        for i in 1..h - 1 {
            xb[(i + 1, h + i)] = one.clone();
        }
        xb[(h, 2 * h - 1)] = one.clone();
        let i_h = ExactMatrix::identity(f, h);
        let neg = -&i_h;
        let yb = ExactMatrix::from_blocks(f, &[h, h], &[h, h], &[vec![Some(&neg), Some(&i_h)], vec![Some(&neg), Some(&i_h)]]);
        let zb = ExactMatrix::from_blocks(f, &[h, h], &[h, h], &[vec![None, None], vec![Some(&i_h), None]]);
        x.push(xb);
        y.push(yb);
        z.push(zb);
    }
    if kb > 0 {
        take_ones(kb, &mut basis)?;
        for j in 0..kb {
            basis.push(crate::densemat::unit_vector(f, m, kn + j));
        }
        let i_b = ExactMatrix::identity(f, kb);
        let neg = -&i_b;
        x.push(ExactMatrix::from_blocks(f, &[kb, kb], &[kb, kb], &[vec![None, None], vec![Some(&i_b), None]]));
        y.push(ExactMatrix::from_blocks(f, &[kb, kb], &[kb, kb], &[vec![Some(&i_b), Some(&neg)], vec![Some(&i_b), Some(&neg)]]));
        z.push(ExactMatrix::from_blocks(f, &[kb, kb], &[kb, kb], &[vec![None, Some(&fit.b)], vec![None, None]]));
    }
    let rest = ones.len();
    basis.append(&mut ones);
    if rest > 0 {
        for v in [&mut x, &mut y, &mut z] {
            v.push(ExactMatrix::zeros(f, rest, rest));
        }
    }
    let q = &fit.p * &ExactMatrix::from_columns(f, m, &basis);
    let qi = q.inverse()?;
    let conj = |blocks: &Vec<ExactMatrix>| {
        let refs: Vec<&ExactMatrix> = blocks.iter().collect();
        &(&q * &ExactMatrix::block_diag(f, &refs)) * &qi
    };
    let trail = vec![format!("three square-zero factors from blocks: Jordan sizes {:?}, invertible part of order {}", sizes, kb)];
    finish(g, vec![Part::new(conj(&x), Role::SquareZero), Part::new(conj(&y), Role::SquareZero), Part::new(conj(&z), Role::SquareZero)], trail)
}

/// G = S₁···S_k, k ≥ 3, all square-zero with the requested ranks (default r(G)).
pub fn sqz_product_chain(g: &ExactMatrix, k: usize, ranks: Option<&[usize]>) -> Result<Certificate> {
    require_square(g)?;
    if k < 3 {
        return Err(Error::KTooSmall);
    }
    let m = g.rows();
    let r = g.rank();
    if 2 * r > m {
        return Err(Error::RankTooHigh { rank: r, n: m });
    }
    let rs: Vec<usize> = match ranks {
        Some(rs) if rs.len() != k => return Err(Error::LengthMismatch(format!("{} ranks for {} factors", rs.len(), k))),
        Some(rs) => rs.to_vec(),
        None => vec![r; k],
    };
    for &t in &rs {
        check_rank(t, r, m / 2)?;
    }
    let mut factors = Vec::new();
    let mut target = g.clone();
    for &ri in &rs[..k - 3] {
        let c = sqz_product_three(&target, Some([ri, r, r]))?;
        factors.push(c.parts[0].matrix.clone());
        target = &c.parts[1].matrix * &c.parts[2].matrix;
    }
    let c = sqz_product_three(&target, Some([rs[k - 3], rs[k - 2], rs[k - 1]]))?;
    factors.extend(c.parts.into_iter().map(|p| p.matrix));
    let trail = vec![format!("{} square-zero factors by repeated three-factor splitting", k)];
    finish(g, factors.into_iter().map(|h| Part::new(h, Role::SquareZero)).collect(), trail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::*;
    use proptest::prelude::*;

    const Q: FieldSpec = FieldSpec::Rationals;

    fn jordan_dg(f: FieldSpec, sizes: &[usize]) -> ExactMatrix {
        let blocks: Vec<ExactMatrix> = sizes.iter().map(|&s| ExactMatrix::jordan(f, s, &f.zero())).collect();
        let refs: Vec<&ExactMatrix> = blocks.iter().collect();
        ExactMatrix::block_diag(f, &refs)
    }

    #[test]
    fn wu_recipes_are_valid() {
        for g in (1..12).filter(|&k| k != 2).map(WuGroup::Single).chain((1..12).map(WuGroup::WithTwo)).chain([WuGroup::ThreeTwos]) {
            let (a, b) = wu_factors(Q, g);
            let target = jordan_dg(Q, &g.sizes());
            assert_eq!(&a * &b, target, "{:?}", g);
            assert!(a.is_nilpotent() && b.is_nilpotent(), "{:?}", g);
            assert_eq!(a.rank(), target.rank(), "{:?}", g);
            assert_eq!(b.rank(), target.rank(), "{:?}", g);
        }
    }

    #[test]
    fn jordan_basis_recovers_blocks() {
        let mut rng = rng_from(7);
        for sizes in [vec![3, 1], vec![2, 2, 1], vec![4], vec![1, 1, 1]] {
            let j = jordan_dg(Q, &sizes);
            let p = random_invertible(Q, j.rows(), &mut rng);
            let n = &(&p * &j) * &p.inverse().unwrap();
            let (b, s) = nilpotent_jordan_basis(&n).unwrap();
            let mut want = sizes.clone();
            want.sort_unstable_by(|a, b| b.cmp(a));
            assert_eq!(s, want);
            assert_eq!(n.conjugate(&b).unwrap(), jordan_dg(Q, &s));
        }
    }

    #[test]
    fn j1_j2_example() {
        let n = jordan_dg(Q, &[1, 2]);
        let c = nilpotent_product_nilpotent(&n).unwrap();
        assert_eq!(c.parts[0].matrix.rank(), 1);
        assert_eq!(nilpotent_product_nilpotent(&jordan_dg(Q, &[2])).unwrap_err(), Error::Order2NonzeroNilpotent);
    }

    #[test]
    fn j7_j2_example() {
        let n = jordan_dg(Q, &[7, 2]);
        let c = nilpotent_product_nilpotent(&n).unwrap();
        for p in &c.parts {
            assert!(p.matrix.pow(9).is_zero());
            assert_eq!(p.matrix.rank(), 7);
        }
    }

    #[test]
    fn lu_examples() {
        let a = ExactMatrix::from_i64(Q, &[vec![0, 1], vec![1, 0]]);
        let xs = [Q.one(), Q.one()];
        let ys = [Q.one(), Q.from_i64(-1)];
        let (p, l, u) = lu_similarity(&a, &xs, &ys).unwrap();
        assert_eq!(a.conjugate(&p).unwrap(), &l * &u);
        assert_eq!((l[(0, 0)].clone(), l[(1, 1)].clone()), (Q.one(), Q.one()));
        assert_eq!((u[(0, 0)].clone(), u[(1, 1)].clone()), (Q.one(), Q.from_i64(-1)));
        assert!(l[(0, 1)].is_zero() && u[(1, 0)].is_zero());
        let two = ExactMatrix::scalar(Q, 2, &Q.from_i64(2));
        assert_eq!(lu_similarity(&two, &xs, &ys).unwrap_err(), Error::ScalarInput);
        assert_eq!(lu_similarity(&a, &xs, &xs).unwrap_err(), Error::DeterminantMismatch);
    }

    #[test]
    fn lu_descalarization_branch() {
        // [[z1, c], [e1, B]] with B - e1 c / z1 scalar
        let a = ExactMatrix::from_i64(Q, &[vec![1, 1, 0], vec![1, 3, 0], vec![0, 0, 2]]);
        let (p, l, u) = lu_similarity_default(&a).unwrap();
        assert_eq!(a.conjugate(&p).unwrap(), &l * &u);
    }

    #[test]
    fn laffey_examples() {
        let inv = ExactMatrix::from_i64(Q, &[vec![1, 2], vec![3, 4]]);
        assert_eq!(nilpotent_product_two(&inv).unwrap_err(), Error::NonSingular);
        let j2 = ExactMatrix::from_i64(Q, &[vec![0, 0], vec![1, 0]]);
        assert_eq!(nilpotent_product_two(&j2).unwrap_err(), Error::ExceptionalCase);
        let d = ExactMatrix::from_i64(Q, &[vec![0, 0], vec![0, 2]]);
        let c = nilpotent_product_two(&d).unwrap();
        for p in &c.parts {
            assert!(p.matrix.is_nilpotent());
            assert_eq!(p.matrix.rank(), 1);
        }
    }

    #[test]
    fn laffey_j2_branch() {
        let a = ExactMatrix::block_diag(Q, &[&jordan_dg(Q, &[2]), &ExactMatrix::from_i64(Q, &[vec![2, 1], vec![0, 3]])]);
        let c = nilpotent_product_two(&a).unwrap();
        assert!(c.trail.iter().any(|t| t.contains("J2")));
        assert_eq!(c.parts[0].matrix.rank(), 3);
        assert_eq!(c.parts[1].matrix.rank(), 3);
    }

    #[test]
    fn sqz_two_examples() {
        let j2 = jordan_dg(Q, &[2]);
        assert_eq!(sqz_product_two(&j2, None, None).unwrap_err(), Error::NotTwoSqzFactorable);
        let z = ExactMatrix::zeros(Q, 3, 3);
        let c = sqz_product_two(&z, None, None).unwrap();
        assert!(c.parts.iter().all(|p| p.matrix.is_zero()));
        let f3 = FieldSpec::PrimeField(3);
        let g = ExactMatrix::block_diag(f3, &[&ExactMatrix::zeros(f3, 2, 2), &jordan_dg(f3, &[2])]);
        let mut rng = rng_from(3);
        let p = random_invertible(f3, 4, &mut rng);
        let g = &(&p * &g) * &p.inverse().unwrap();
        for rh in 1..=2 {
            for rf in 1..=2 {
                let c = sqz_product_two(&g, Some(rh), Some(rf)).unwrap();
                assert_eq!(c.parts[0].matrix.rank(), rh);
                assert_eq!(c.parts[1].matrix.rank(), rf);
            }
        }
        assert!(matches!(sqz_product_two(&g, Some(3), None), Err(Error::RankOutOfBounds { .. })));
    }

    #[test]
    fn sqz_three_examples() {
        let j2 = jordan_dg(Q, &[2]);
        let c = sqz_product_three(&j2, None).unwrap();
        let e21 = ExactMatrix::from_i64(Q, &[vec![0, 0], vec![1, 0]]);
        let e12 = ExactMatrix::from_i64(Q, &[vec![0, 1], vec![0, 0]]);
        assert_eq!(c.matrices(), vec![&e21, &e12, &e21]);
        assert!(matches!(sqz_product_three(&ExactMatrix::identity(Q, 2), None), Err(Error::RankTooHigh { .. })));
        let f5 = FieldSpec::PrimeField(5);
        let g = ExactMatrix::from_i64(f5, &[vec![0, 0], vec![0, 3]]);
        let c = sqz_product_three(&g, None).unwrap();
        assert_eq!(c.parts.len(), 3);
        let c = sqz_product_three(&j2, Some([1, 1, 1])).unwrap();
        assert_eq!(c.combined().unwrap(), j2);
    }

    #[test]
    fn sqz_chain_examples() {
        let j2 = jordan_dg(Q, &[2]);
        let c = sqz_product_chain(&j2, 5, None).unwrap();
        assert_eq!(c.parts.len(), 5);
        assert!(c.parts.iter().all(|p| p.matrix.rank() == 1));
        let z = ExactMatrix::zeros(Q, 3, 3);
        let c = sqz_product_chain(&z, 4, None).unwrap();
        assert!(c.parts.iter().all(|p| p.matrix.is_zero()));
        assert!(matches!(sqz_product_chain(&ExactMatrix::identity(Q, 2), 3, None), Err(Error::RankTooHigh { .. })));
        assert_eq!(sqz_product_chain(&j2, 2, None).unwrap_err(), Error::KTooSmall);
    }

    #[test]
    fn odd_pair_display_with_j2_top_right_is_not_nilpotent() {
        let b = ExactMatrix::from_blocks(
            Q,
            &[2, 7],
            &[7, 2],
            &[vec![None, Some(&jordan_dg(Q, &[2]))], vec![Some(&jordan_dg(Q, &[7])), None]],
        );
        assert!(!b.is_nilpotent());
        assert!(!b.pow(9).is_zero());
        // the working factors for Dg[J7, J2] have rank 7
        let (n3, n4) = wu_factors(Q, WuGroup::WithTwo(7));
        assert!(n3.is_nilpotent() && n4.is_nilpotent());
        assert_eq!((n3.rank(), n4.rank()), (7, 7));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(80))]
        #[test]
        fn laffey_random(seed in any::<u64>(), q in any::<bool>()) {
            let f = if q { Q } else { FieldSpec::PrimeField(3) };
            let mut rng = rng_from(seed);
            let n = 1 + (seed % 5) as usize;
            let a = random_of_rank(f, n, n, n.saturating_sub(1 + (seed / 8 % 2) as usize), &mut rng);
            let exceptional = n == 2 && a.is_nilpotent() && !a.is_zero();
            match nilpotent_product_two(&a) {
                Ok(c) => {
                    prop_assert!(!exceptional);
                    prop_assert_eq!(c.combined().unwrap(), a.clone());
                    for p in &c.parts {
                        prop_assert!(p.matrix.is_nilpotent());
                        prop_assert_eq!(p.matrix.rank(), a.rank());
                    }
                }
                Err(e) => prop_assert!(exceptional, "{:?}", e),
            }
        }

        #[test]
        fn nilpotent_random(seed in any::<u64>()) {
            let f = FieldSpec::PrimeField(5);
            let mut rng = rng_from(seed);
            let n = 1 + (seed % 7) as usize;
            let a = random_nilpotent(f, n, &mut rng);
            match nilpotent_product_nilpotent(&a) {
                Ok(c) => {
                    prop_assert_eq!(c.combined().unwrap(), a.clone());
                    prop_assert!(c.parts.iter().all(|p| p.matrix.rank() == a.rank()));
                }
                Err(e) => {
                    prop_assert_eq!(e, Error::Order2NonzeroNilpotent);
                    prop_assert!(n == 2 && !a.is_zero());
                }
            }
        }

        #[test]
        fn lu_random(seed in any::<u64>()) {
            let mut rng = rng_from(seed);
            let n = 2 + (seed % 4) as usize;
            let a = random_invertible(Q, n, &mut rng);
            prop_assume!(!a.is_scalar());
            let xs: Vec<Scalar> = (0..n).map(|_| random_nonzero(Q, &mut rng)).collect();
            let mut ys: Vec<Scalar> = (0..n).map(|_| random_nonzero(Q, &mut rng)).collect();
            let partial = xs.iter().chain(&ys[..n - 1]).fold(Q.one(), |s, v| &s * v);
            ys[n - 1] = a.det().unwrap().div(&partial).unwrap();
            let (p, l, u) = lu_similarity(&a, &xs, &ys).unwrap();
            prop_assert_eq!(a.conjugate(&p).unwrap(), &l * &u);
            for i in 0..n {
                prop_assert_eq!(&l[(i, i)], &xs[i]);
                prop_assert_eq!(&u[(i, i)], &ys[i]);
                for j in i + 1..n {
                    prop_assert!(l[(i, j)].is_zero() && u[(j, i)].is_zero());
                }
            }
        }

        #[test]
        fn sqz_products_random(seed in any::<u64>()) {
            let f = FieldSpec::PrimeField(3);
            let mut rng = rng_from(seed);
            let m = 2 + (seed % 5) as usize;
            let g = random_of_rank(f, m, m, (seed / 8) as usize % (m / 2 + 1), &mut rng);
            let r = g.rank();
            prop_assert!(sqz_product_three(&g, None).is_ok());
            for t in r..=m / 2 {
                let c = sqz_product_three(&g, Some([t, r, m / 2])).unwrap();
                prop_assert_eq!(c.parts[0].matrix.rank(), t);
                prop_assert_eq!(c.parts[2].matrix.rank(), m / 2);
            }
            if is_two_sqz_product(&g).unwrap() {
                let c = sqz_product_two(&g, Some(m / 2), None).unwrap();
                prop_assert_eq!(c.parts[0].matrix.rank(), m / 2);
            }
        }
    }
}
