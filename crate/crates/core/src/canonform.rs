//! Smith form of xI − A, invariant polynomials, rational canonical form,
//! Fitting decomposition and elementary divisors.

use rand::Rng;

use crate::densemat::ExactMatrix;
use crate::error::{Error, Result};
use crate::exactfield::FieldSpec;
use crate::random::{random_scalar, rng_from};
use crate::unipoly::{poly_key, ParityClass, UniPoly};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantData {
    /// f_1 | f_2 | ... | f_n, monic, constants included.
    pub chain: Vec<UniPoly>,
}

impl InvariantData {
    pub fn nonconstant(&self) -> Vec<UniPoly> {
        self.chain.iter().filter(|p| !p.is_constant()).cloned().collect()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.nonconstant().iter().map(|p| p.deg()).collect()
    }

    pub fn parities(&self) -> Vec<ParityClass> {
        self.nonconstant().iter().map(|p| p.parity_class()).collect()
    }

    pub fn minimal_polynomial(&self) -> UniPoly {
        self.chain.last().cloned().unwrap_or_else(|| UniPoly::one(FieldSpec::Rationals))
    }

    pub fn product(&self) -> UniPoly {
        let f = self.chain.first().map_or(FieldSpec::Rationals, |p| p.field());
        self.chain.iter().fold(UniPoly::one(f), |acc, p| &acc * p)
    }
}

#[derive(Debug, Clone)]
pub struct RcfResult {
    pub polys: Vec<UniPoly>,
    pub form: ExactMatrix,
    pub p: ExactMatrix,
}

#[derive(Debug, Clone)]
pub struct FittingResult {
    pub n: ExactMatrix,
    pub b: ExactMatrix,
    pub p: ExactMatrix,
}

struct Smith {
    diag: Vec<UniPoly>,
    /// inverse of the accumulated left multiplier
    uinv: Vec<Vec<UniPoly>>,
}

fn smith_char_matrix(a: &ExactMatrix) -> Smith {
    let n = a.rows();
    let f = a.field();
    let mut m: Vec<Vec<UniPoly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = UniPoly::constant(f, -&a[(i, j)]);
                    if i == j {
                        &c + &UniPoly::x(f)
                    } else {
                        c
                    }
                })
                .collect()
        })
        .collect();
    let mut uinv: Vec<Vec<UniPoly>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { UniPoly::one(f) } else { UniPoly::zero(f) }).collect()).collect();

    for k in 0..n {
        loop {
            let mut best: Option<(usize, usize, usize)> = None;
            for i in k..n {
                for j in k..n {
                    if let Some(d) = m[i][j].degree() {
                        if best.is_none_or(|(bd, _, _)| d < bd) {
                            best = Some((d, i, j));
                        }
                    }
                }
            }
            let Some((_, pi, pj)) = best else { break };
            if pi != k {
                m.swap(pi, k);
                for row in uinv.iter_mut() {
                    row.swap(pi, k);
                }
            }
            if pj != k {
                for row in m.iter_mut() {
                    row.swap(pj, k);
                }
            }
            let lead = m[k][k].lead();
            if !lead.is_one() {
                let inv = lead.inverse().unwrap();
                for j in 0..n {
                    m[k][j] = m[k][j].scale(&inv);
                }
                for row in uinv.iter_mut() {
                    row[k] = row[k].scale(&lead);
                }
            }
            let mut dirty = false;
            for i in k + 1..n {
                if m[i][k].is_zero() {
                    continue;
                }
                let (q, r) = m[i][k].div_rem(&m[k][k]).unwrap();
                for j in k..n {
                    let t = &q * &m[k][j];
                    m[i][j] = &m[i][j] - &t;
                }
                for row in uinv.iter_mut() {
                    let t = &q * &row[i];
                    row[k] = &row[k] + &t;
                }
                if !r.is_zero() {
                    dirty = true;
                }
            }
            for j in k + 1..n {
                if m[k][j].is_zero() {
                    continue;
                }
                let (q, r) = m[k][j].div_rem(&m[k][k]).unwrap();
                for i in k..n {
                    let t = &q * &m[i][k];
                    m[i][j] = &m[i][j] - &t;
                }
                if !r.is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            let bad = (k + 1..n).flat_map(|i| (k + 1..n).map(move |j| (i, j))).find(|&(i, j)| !m[k][k].divides(&m[i][j]));
            if let Some((i, _)) = bad {
                for j in k..n {
                    let t = m[i][j].clone();
                    m[k][j] = &m[k][j] + &t;
                }
                for row in uinv.iter_mut() {
                    let t = row[k].clone();
                    row[i] = &row[i] - &t;
                }
                continue;
            }
            break;
        }
    }
    let diag = (0..n).map(|i| m[i][i].monic()).collect();
    Smith { diag, uinv }
}

pub fn invariant_polynomials(a: &ExactMatrix) -> Result<InvariantData> {
    if !a.is_square() {
        return Err(Error::NonSquare);
    }
    Ok(InvariantData { chain: smith_char_matrix(a).diag })
}

pub fn minimal_polynomial(a: &ExactMatrix) -> Result<UniPoly> {
    let inv = invariant_polynomials(a)?;
    Ok(inv.chain.last().cloned().unwrap_or_else(|| UniPoly::one(a.field())))
}

pub fn companion_blocks(field: FieldSpec, polys: &[UniPoly]) -> ExactMatrix {
    let blocks: Vec<ExactMatrix> = polys.iter().map(|p| p.companion().unwrap()).collect();
    let refs: Vec<&ExactMatrix> = blocks.iter().collect();
    ExactMatrix::block_diag(field, &refs)
}

/// Rational canonical form with P⁻¹AP = Dg[C(f_1), ..., C(f_t)].
pub fn rcf(a: &ExactMatrix) -> Result<RcfResult> {
    if !a.is_square() {
        return Err(Error::NonSquare);
    }
    let f = a.field();
    let n = a.rows();
    let smith = smith_char_matrix(a);
    let polys: Vec<UniPoly> = smith.diag.iter().filter(|p| !p.is_constant()).cloned().collect();
    let form = companion_blocks(f, &polys);
    if n == 0 {
        return Ok(RcfResult { polys, form, p: ExactMatrix::identity(f, 0) });
    }
    let charp = a.char_poly()?;
    // powers[t] = A^t, t < n
    let mut powers = vec![ExactMatrix::identity(f, n)];
    for t in 1..n {
        powers.push(&powers[t - 1] * a);
    }
    let mut cols = Vec::new();
    for (idx, d) in smith.diag.iter().enumerate() {
        if d.is_constant() {
            continue;
        }
        let mut g = vec![f.zero(); n];
        for j in 0..n {
            let q = smith.uinv[j][idx].rem(&charp);
            for (t, c) in q.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for i in 0..n {
                    g[i] = &g[i] + &(c * &powers[t][(i, j)]);
                }
            }
        }
        for _ in 0..d.deg() {
            cols.push(g.clone());
            g = a.mul_vec(&g);
        }
    }
    let p = ExactMatrix::from_columns(f, n, &cols);
    if p.rank() == n && &(a * &p) == &(&p * &form) {
        return Ok(RcfResult { polys, form, p });
    }
    let p = intertwiner(a, &form)?;
    Ok(RcfResult { polys, form, p })
}

/// Invertible P with A·P = P·B, searched inside the solution space of A·X = X·B.
fn intertwiner(a: &ExactMatrix, b: &ExactMatrix) -> Result<ExactMatrix> {
    let f = a.field();
    let n = a.rows();
    let mut k = ExactMatrix::zeros(f, n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            for t in 0..n {
                k[(row, t * n + j)] = &k[(row, t * n + j)] + &a[(i, t)];
                k[(row, i * n + t)] = &k[(row, i * n + t)] - &b[(t, j)];
            }
        }
    }
    let basis = k.nullspace();
    let mut rng = rng_from(0x5eed);
    let to_mat = |v: &[crate::exactfield::Scalar]| {
        let rows = (0..n).map(|i| v[i * n..(i + 1) * n].to_vec()).collect();
        ExactMatrix::from_rows(f, rows)
    };
    for _ in 0..200 {
        let mut v = vec![f.zero(); n * n];
        for b in &basis.vectors {
            let c = if let FieldSpec::Rationals = f { f.from_i64(rng.gen_range(-20..=20)) } else { random_scalar(f, &mut rng) };
            for (x, y) in v.iter_mut().zip(b) {
                *x = &*x + &(&c * y);
            }
        }
        let p = to_mat(&v);
        if p.rank() == n {
            return Ok(p);
        }
    }
    Err(Error::Construction("no invertible intertwiner found".into()))
}

/// P with P⁻¹AP = Dg[N, B], N nilpotent, B invertible.
pub fn fitting(a: &ExactMatrix) -> Result<FittingResult> {
    if !a.is_square() {
        return Err(Error::NonSquare);
    }
    let f = a.field();
    let n = a.rows();
    let an = a.pow(n);
    let null = an.nullspace();
    let col = an.colspace();
    let k = null.dim();
    let mut cols = null.vectors.clone();
    cols.extend(col.vectors.iter().cloned());
    let p = ExactMatrix::from_columns(f, n, &cols);
    let c = a.conjugate(&p)?;
    let nb = c.sub_block(0, k, 0, k);
    let bb = c.sub_block(k, n, k, n);
    debug_assert!(c.sub_block(0, k, k, n).is_zero() && c.sub_block(k, n, 0, k).is_zero());
    Ok(FittingResult { n: nb, b: bb, p })
}

pub fn is_similar(a: &ExactMatrix, b: &ExactMatrix) -> Result<bool> {
    if a.field() != b.field() {
        return Err(Error::FieldMismatch);
    }
    if !a.is_square() || !b.is_square() {
        return Err(Error::NonSquare);
    }
    if a.rows() != b.rows() {
        return Ok(false);
    }
    Ok(invariant_polynomials(a)? == invariant_polynomials(b)?)
}

/// P with P⁻¹AP = B, when A and B are similar.
pub fn similarity_transform(a: &ExactMatrix, b: &ExactMatrix) -> Result<Option<ExactMatrix>> {
    if a.rows() != b.rows() {
        return Ok(None);
    }
    let ra = rcf(a)?;
    let rb = rcf(b)?;
    if ra.polys != rb.polys {
        return Ok(None);
    }
    Ok(Some(&ra.p * &rb.p.inverse()?))
}

/// (irreducible, exponent, multiplicity), sorted by irreducible then exponent.
pub fn elementary_divisors(a: &ExactMatrix) -> Result<Vec<(UniPoly, usize, usize)>> {
    let inv = invariant_polynomials(a)?;
    let mut all: Vec<(UniPoly, usize)> = Vec::new();
    for p in inv.nonconstant() {
        let fl = p.factor(0)?.require_complete()?;
        all.extend(fl.factors);
    }
    all.sort_by(|x, y| poly_key(&x.0).cmp(&poly_key(&y.0)).then(x.1.cmp(&y.1)));
    let mut out: Vec<(UniPoly, usize, usize)> = Vec::new();
    for (q, e) in all {
        match out.last_mut() {
            Some((p, f, m)) if *p == q && *f == e => *m += 1,
            _ => out.push((q, e, 1)),
        }
    }
    Ok(out)
}
