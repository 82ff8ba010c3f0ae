//! Right and left matrix division, with general and square-zero quotients.

use crate::densemat::{Echelon, ExactMatrix, InverseStrategy, SubspaceBasis};
use crate::error::{Error, Result};
use crate::exactfield::FieldSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundCase {
    Small,
    Large,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankBounds {
    pub low: usize,
    pub high: usize,
    pub case: BoundCase,
}

impl RankBounds {
    fn check(&self, t: usize) -> Result<()> {
        if t < self.low || t > self.high {
            Err(Error::RankOutOfBounds { requested: t, low: self.low, high: self.high })
        } else {
            Ok(())
        }
    }
}

/// Free choices in a quotient construction. Unset parts are filled with defaults.
/// In the square-zero large case `x` plays the role of the block Y.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QuotientRecipe {
    pub c: Option<ExactMatrix>,
    pub x: Option<ExactMatrix>,
    pub b: Option<ExactMatrix>,
    pub s: Option<ExactMatrix>,
    pub strategy: Option<InverseStrategy>,
}

impl QuotientRecipe {
    /// `strategy gram|rref`, then any of `C`, `X`, `B`, `S` each followed by a matrix block.
    pub fn to_text(&self) -> String {
        let mut s = String::from("recipe\n");
        if let Some(st) = self.strategy {
            s.push_str(match st {
                InverseStrategy::Gram => "strategy gram\n",
                InverseStrategy::Rref => "strategy rref\n",
            });
        }
        for (tag, m) in [("C", &self.c), ("X", &self.x), ("B", &self.b), ("S", &self.s)] {
            if let Some(m) = m {
                s.push_str(tag);
                s.push('\n');
                s.push_str(&m.to_text());
            }
        }
        s
    }

    pub fn parse(text: &str) -> Result<QuotientRecipe> {
        let lines: Vec<&str> =
            text.lines().map(|l| l.split('#').next().unwrap().trim()).filter(|l| !l.is_empty()).collect();
        let mut r = QuotientRecipe::default();
        let mut i = usize::from(lines.first() == Some(&"recipe"));
        while i < lines.len() {
            let line = lines[i];
            if let Some(st) = line.strip_prefix("strategy") {
                r.strategy = Some(match st.trim() {
                    "gram" => InverseStrategy::Gram,
                    "rref" => InverseStrategy::Rref,
                    other => return Err(Error::Parse(format!("unknown strategy '{}'", other))),
                });
                i += 1;
                continue;
            }
            let slot = match line {
                "C" => &mut r.c,
                "X" => &mut r.x,
                "B" => &mut r.b,
                "S" => &mut r.s,
                other => return Err(Error::Parse(format!("unexpected recipe line '{}'", other))),
            };
            let rows: usize = lines
                .get(i + 2)
                .and_then(|d| d.split_whitespace().next())
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad matrix block after '{}'", line)))?;
            let end = i + 3 + rows;
            if end > lines.len() {
                return Err(Error::Parse(format!("truncated matrix block after '{}'", line)));
            }
            *slot = Some(ExactMatrix::parse(&lines[i + 1..end].join("\n"))?);
            i = end;
        }
        Ok(r)
    }
}

#[derive(Debug, Clone)]
pub struct Quotient {
    pub h: ExactMatrix,
    /// The recipe actually used, every part filled in.
    pub recipe: QuotientRecipe,
    pub strategy: InverseStrategy,
    pub bounds: RankBounds,
}

fn default_strategy(f: FieldSpec) -> InverseStrategy {
    match f {
        FieldSpec::Rationals => InverseStrategy::Gram,
        FieldSpec::PrimeField(_) => InverseStrategy::Rref,
    }
}

fn cols_matrix(f: FieldSpec, rows: usize, v: &[Vec<crate::exactfield::Scalar>]) -> ExactMatrix {
    ExactMatrix::from_columns(f, rows, v)
}

/// Columns e_i that become pivots when `[A | I]` is row reduced.
pub fn complement_columns(a: &ExactMatrix) -> ExactMatrix {
    let f = a.field();
    let m = a.rows();
    let aug = ExactMatrix::hstack(f, &[a, &ExactMatrix::identity(f, m)]);
    let piv = aug.rref().pivots;
    let idx: Vec<usize> = piv.into_iter().filter(|&p| p >= a.cols()).map(|p| p - a.cols()).collect();
    let cols: Vec<_> = idx.iter().map(|&i| crate::densemat::unit_vector(f, m, i)).collect();
    cols_matrix(f, m, &cols)
}

pub fn intersect_colspaces(a: &ExactMatrix, b: &ExactMatrix) -> SubspaceBasis {
    let f = a.field();
    let ab = a.colspace().to_matrix(f);
    let bb = b.colspace().to_matrix(f);
    let joined = ExactMatrix::hstack(f, &[&ab, &(-&bb)]);
    let null = joined.nullspace();
    let k = ab.cols();
    let mut e = Echelon::new(f, a.rows());
    let mut vectors = Vec::new();
    for v in null.vectors {
        let w = ab.mul_vec(&v[..k]);
        if e.insert(&w) {
            vectors.push(w);
        }
    }
    SubspaceBasis { ambient: a.rows(), vectors }
}

fn same_field(g: &ExactMatrix, f: &ExactMatrix) -> Result<()> {
    if g.field() != f.field() {
        Err(Error::FieldMismatch)
    } else {
        Ok(())
    }
}

/// True iff G = H·F for some H.
pub fn divides_right(g: &ExactMatrix, f: &ExactMatrix) -> Result<bool> {
    same_field(g, f)?;
    if g.cols() != f.cols() {
        return Err(Error::DimensionMismatch(format!("G has {} columns, F has {}", g.cols(), f.cols())));
    }
    Ok(f.rank() == ExactMatrix::vstack(g.field(), &[g, f]).rank())
}

/// True iff G = F·H for some H.
pub fn divides_left(g: &ExactMatrix, f: &ExactMatrix) -> Result<bool> {
    divides_right(&g.transpose(), &f.transpose())
}

pub fn quotient_rank_bounds(g: &ExactMatrix, f: &ExactMatrix) -> Result<RankBounds> {
    if !divides_right(g, f)? {
        return Err(Error::NotDivisible);
    }
    let rg = g.rank();
    let high = rg + (g.rows() - rg).min(f.rows() - f.rank());
    Ok(RankBounds { low: rg, high, case: BoundCase::Small })
}

fn check_full_row_rank(m: &ExactMatrix, what: &str) -> Result<()> {
    if m.rank() != m.rows() {
        return Err(Error::BadRecipe(format!("{} is not full row rank", what)));
    }
    Ok(())
}

fn check_shape(m: &ExactMatrix, rows: usize, cols: usize, what: &str) -> Result<()> {
    if m.rows() != rows || m.cols() != cols {
        return Err(Error::BadRecipe(format!("{} must be {}x{}, got {}x{}", what, rows, cols, m.rows(), m.cols())));
    }
    Ok(())
}

/// H = [G X][F C]^R with H·F = G.
pub fn quotient_right(
    g: &ExactMatrix,
    f: &ExactMatrix,
    target_rank: Option<usize>,
    recipe: Option<&QuotientRecipe>,
) -> Result<Quotient> {
    let bounds = quotient_rank_bounds(g, f)?;
    let fld = g.field();
    let (m, k) = (g.rows(), f.rows());
    let rg = bounds.low;
    let rf = f.rank();
    let empty = QuotientRecipe::default();
    let recipe = recipe.unwrap_or(&empty);
    if let Some(t) = target_rank {
        bounds.check(t)?;
    }
    let strategy = recipe.strategy.unwrap_or(default_strategy(fld));
    let c = match &recipe.c {
        Some(c) => {
            check_shape(c, k, k - rf, "C")?;
            c.clone()
        }
        None => complement_columns(f),
    };
    let fc = ExactMatrix::hstack(fld, &[f, &c]);
    check_full_row_rank(&fc, "[F C]")?;
    let x = match &recipe.x {
        Some(x) => {
            check_shape(x, m, k - rf, "X")?;
            x.clone()
        }
        None => {
            let t = target_rank.unwrap_or(rg);
            let ext = complement_columns(g);
            let mut x = ExactMatrix::zeros(fld, m, k - rf);
            for j in 0..t - rg {
                for i in 0..m {
                    x[(i, j)] = ext[(i, j)].clone();
                }
            }
            x
        }
    };
    let gx = ExactMatrix::hstack(fld, &[g, &x]);
    let h = &gx * &fc.right_inverse(strategy)?;
    if &(&h * f) != g {
        return Err(Error::BadRecipe("H·F differs from G".into()));
    }
    let r = h.rank();
    bounds.check(r)?;
    if let Some(t) = target_rank {
        if r != t {
            return Err(Error::BadRecipe(format!("recipe yields rank {}, requested {}", r, t)));
        }
    }
    Ok(Quotient { h, recipe: QuotientRecipe { c: Some(c), x: Some(x), b: None, s: None, strategy: Some(strategy) }, strategy, bounds })
}

/// Left division G = F·H, by transposition.
pub fn quotient_left(
    g: &ExactMatrix,
    f: &ExactMatrix,
    target_rank: Option<usize>,
    recipe: Option<&QuotientRecipe>,
) -> Result<Quotient> {
    let mut q = quotient_right(&g.transpose(), &f.transpose(), target_rank, recipe)?;
    q.h = q.h.transpose();
    Ok(q)
}

fn null_basis_matrix(g: &ExactMatrix) -> ExactMatrix {
    g.nullspace().to_matrix(g.field())
}

/// True iff G = H·F for some square-zero H.
pub fn has_sqz_quotient_right(g: &ExactMatrix, f: &ExactMatrix) -> Result<bool> {
    same_field(g, f)?;
    if g.rows() != f.rows() || g.cols() != f.cols() {
        return Err(Error::DimensionMismatch("G and F must have the same shape".into()));
    }
    let fld = g.field();
    if f.rank() != ExactMatrix::vstack(fld, &[g, f]).rank() {
        return Ok(false);
    }
    let fb = f * &null_basis_matrix(g);
    let lhs = ExactMatrix::hstack(fld, &[g, f]).rank();
    let rhs = g.rank() + ExactMatrix::hstack(fld, &[g, &fb]).rank();
    Ok(lhs == rhs)
}

/// Subspace form of the same test: N(F) ⊆ N(G) and R(G) ∩ R(F) ⊆ R(F restricted to N(G)).
pub fn has_sqz_quotient_right_subspace(g: &ExactMatrix, f: &ExactMatrix) -> bool {
    let fld = g.field();
    let nf = f.nullspace().to_matrix(fld);
    if !(g * &nf).is_zero() {
        return false;
    }
    let inter = intersect_colspaces(g, f);
    let fb = f * &null_basis_matrix(g);
    let mut e = Echelon::new(fld, g.rows());
    for c in fb.columns() {
        e.insert(&c);
    }
    inter.vectors.iter().all(|v| e.contains(v))
}

pub fn has_sqz_quotient_left(g: &ExactMatrix, f: &ExactMatrix) -> Result<bool> {
    has_sqz_quotient_right(&g.transpose(), &f.transpose())
}

pub fn sqz_quotient_rank_bounds(g: &ExactMatrix, f: &ExactMatrix) -> Result<RankBounds> {
    if !has_sqz_quotient_right(g, f)? {
        return Err(Error::NoSqzQuotient);
    }
    let m = g.rows();
    let rg = g.rank();
    let d = ExactMatrix::hstack(g.field(), &[g, f]).rank() - rg;
    if 2 * d <= m {
        Ok(RankBounds { low: rg, high: m / 2, case: BoundCase::Small })
    } else {
        Ok(RankBounds { low: rg, high: m - d, case: BoundCase::Large })
    }
}

/// Columns F·v (v in a basis of N(G)) that extend col(G), taken in index order.
pub fn default_b(g: &ExactMatrix, f: &ExactMatrix) -> ExactMatrix {
    let fld = g.field();
    let fb = f * &null_basis_matrix(g);
    let mut e = Echelon::new(fld, g.rows());
    for c in g.columns() {
        e.insert(&c);
    }
    let kept: Vec<_> = fb.columns().into_iter().filter(|c| e.insert(c)).collect();
    cols_matrix(fld, g.rows(), &kept)
}

/// Shift S of order t with ones at (c + j, j), j < c.
pub fn shift_matrix(fld: FieldSpec, t: usize, c: usize) -> ExactMatrix {
    let mut s = ExactMatrix::zeros(fld, t, t);
    for j in 0..c {
        s[(c + j, j)] = fld.one();
    }
    s
}

fn dg_identity(fld: FieldSpec, rows: usize, cols: usize, k: usize) -> ExactMatrix {
    let mut x = ExactMatrix::zeros(fld, rows, cols);
    for i in 0..k {
        x[(i, i)] = fld.one();
    }
    x
}

/// Square-zero H with H·F = G.
pub fn sqz_quotient_right(
    g: &ExactMatrix,
    f: &ExactMatrix,
    target_rank: Option<usize>,
    recipe: Option<&QuotientRecipe>,
) -> Result<Quotient> {
    let bounds = sqz_quotient_rank_bounds(g, f)?;
    let fld = g.field();
    let m = g.rows();
    let rg = bounds.low;
    let empty = QuotientRecipe::default();
    let recipe = recipe.unwrap_or(&empty);
    if let Some(t) = target_rank {
        bounds.check(t)?;
    }
    let t = target_rank.unwrap_or(rg);
    let strategy = recipe.strategy.unwrap_or(default_strategy(fld));
    let gf = ExactMatrix::hstack(fld, &[g, f]);
    let rgf = gf.rank();
    let b = match &recipe.b {
        Some(b) => {
            let want = rgf - 2 * rg;
            if b.rows() != m || b.cols() != want || b.rank() != want {
                return Err(Error::BadRecipe(format!("B must be {}x{} of full column rank", m, want)));
            }
            let mut e = Echelon::new(fld, m);
            for c in g.columns().iter().chain(f.columns().iter()) {
                e.insert(c);
            }
            let mut eg = Echelon::new(fld, m);
            for c in g.columns() {
                eg.insert(&c);
            }
            for c in b.columns() {
                if !eg.insert(&c) {
                    return Err(Error::BadRecipe("R(B) meets R(G)".into()));
                }
            }
            let fnull = f * &null_basis_matrix(g);
            let mut ef = Echelon::new(fld, m);
            for c in g.columns().iter().chain(fnull.columns().iter()) {
                ef.insert(c);
            }
            if b.columns().iter().any(|c| !ef.contains(c)) {
                return Err(Error::BadRecipe("R(B) is not inside R(G) + R(F restricted to N(G))".into()));
            }
            b.clone()
        }
        None => default_b(g, f),
    };
    let rb = b.cols();
    let c = match &recipe.c {
        Some(c) => {
            check_shape(c, m, m - rgf, "C")?;
            c.clone()
        }
        None => complement_columns(&gf),
    };
    let rc = c.cols();
    let zero_mn = ExactMatrix::zeros(fld, m, g.cols());
    let full = ExactMatrix::hstack(fld, &[g, f, &c]);
    check_full_row_rank(&full, "[G F C]")?;
    let (target_cols, used) = match bounds.case {
        BoundCase::Small => {
            if rc < rb {
                return Err(Error::BadRecipe("C has fewer columns than B".into()));
            }
            let c1 = c.sub_block(0, m, 0, rb);
            let c2 = c.sub_block(0, m, rb, rc);
            let kx = (t - rg).min(rb);
            let x = match &recipe.x {
                Some(x) => {
                    check_shape(x, rb, rb, "X")?;
                    x.clone()
                }
                None => dg_identity(fld, rb, rb, kx),
            };
            let s = match &recipe.s {
                Some(s) => {
                    check_shape(s, rc - rb, rc - rb, "S")?;
                    if !s.is_square_zero() {
                        return Err(Error::BadRecipe("S is not square-zero".into()));
                    }
                    s.clone()
                }
                None => shift_matrix(fld, rc - rb, t - rg - kx),
            };
            let bx = &b * &x;
            let c2s = &c2 * &s;
            let _ = c1;
            (ExactMatrix::hstack(fld, &[&zero_mn, g, &bx, &c2s]), QuotientRecipe { c: Some(c.clone()), x: Some(x), b: Some(b.clone()), s: Some(s), strategy: Some(strategy) })
        }
        BoundCase::Large => {
            let y = match &recipe.x {
                Some(y) => {
                    check_shape(y, rb, rc, "Y")?;
                    y.clone()
                }
                None => dg_identity(fld, rb, rc, t - rg),
            };
            let by = &b * &y;
            (ExactMatrix::hstack(fld, &[&zero_mn, g, &by]), QuotientRecipe { c: Some(c.clone()), x: Some(y), b: Some(b.clone()), s: None, strategy: Some(strategy) })
        }
    };
    let h = &target_cols * &full.right_inverse(strategy)?;
    if &(&h * f) != g || !h.is_square_zero() {
        return Err(Error::BadRecipe("constructed H fails H·F = G or H² = 0".into()));
    }
    let r = h.rank();
    bounds.check(r)?;
    if let Some(t) = target_rank {
        if r != t {
            return Err(Error::BadRecipe(format!("recipe yields rank {}, requested {}", r, t)));
        }
    }
    Ok(Quotient { h, recipe: used, strategy, bounds })
}

/// Square-zero H with F·H = G, by transposition. Bounds use the column count.
pub fn sqz_quotient_left(
    g: &ExactMatrix,
    f: &ExactMatrix,
    target_rank: Option<usize>,
    recipe: Option<&QuotientRecipe>,
) -> Result<Quotient> {
    let mut q = sqz_quotient_right(&g.transpose(), &f.transpose(), target_rank, recipe)?;
    q.h = q.h.transpose();
    Ok(q)
}

pub fn sqz_quotient_rank_bounds_left(g: &ExactMatrix, f: &ExactMatrix) -> Result<RankBounds> {
    sqz_quotient_rank_bounds(&g.transpose(), &f.transpose())
}
