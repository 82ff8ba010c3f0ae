//! Dense exact matrices.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::exactfield::{FieldSpec, Scalar};
use crate::unipoly::UniPoly;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

/// Linearly independent column vectors in an ambient space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceBasis {
    pub ambient: usize,
    pub vectors: Vec<Vec<Scalar>>,
}

impl SubspaceBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn to_matrix(&self, field: FieldSpec) -> ExactMatrix {
        ExactMatrix::from_columns(field, self.ambient, &self.vectors)
    }
}

#[derive(Debug, Clone)]
pub struct RrefResult {
    pub r: ExactMatrix,
    pub t: ExactMatrix,
    pub pivots: Vec<usize>,
}

impl RrefResult {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InverseStrategy {
    Gram,
    Rref,
}

impl ExactMatrix {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        ExactMatrix { field, rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m[(i, i)] = field.one();
        }
        m
    }

    pub fn scalar(field: FieldSpec, n: usize, s: &Scalar) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m[(i, i)] = s.clone();
        }
        m
    }

    /// Unit matrix E(i, j) with 0-based indices.
    pub fn unit(field: FieldSpec, rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(field, rows, cols);
        m[(i, j)] = field.one();
        m
    }

    pub fn from_rows(field: FieldSpec, rows: Vec<Vec<Scalar>>) -> Self {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(m * n);
        for r in rows {
            assert_eq!(r.len(), n, "ragged rows");
            data.extend(r);
        }
        ExactMatrix { field, rows: m, cols: n, data }
    }

    pub fn from_i64(field: FieldSpec, rows: &[Vec<i64>]) -> Self {
        Self::from_rows(field, rows.iter().map(|r| r.iter().map(|&v| field.from_i64(v)).collect()).collect())
    }

    pub fn from_columns(field: FieldSpec, rows: usize, cols: &[Vec<Scalar>]) -> Self {
        let mut m = Self::zeros(field, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, v) in c.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn diag(field: FieldSpec, entries: &[Scalar]) -> Self {
        let mut m = Self::zeros(field, entries.len(), entries.len());
        for (i, v) in entries.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }

    /// Jordan block with ones on the subdiagonal.
    pub fn jordan(field: FieldSpec, k: usize, lambda: &Scalar) -> Self {
        let mut m = Self::scalar(field, k, lambda);
        for i in 1..k {
            m[(i, i - 1)] = field.one();
        }
        m
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn row(&self, i: usize) -> Vec<Scalar> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Scalar>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let cols: Vec<Vec<Scalar>> = idx.iter().map(|&j| self.column(j)).collect();
        Self::from_columns(self.field, self.rows, &cols)
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut m = Self::zeros(self.field, idx.len(), self.cols);
        for (a, &i) in idx.iter().enumerate() {
            for j in 0..self.cols {
                m[(a, j)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        ExactMatrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn trace(&self) -> Scalar {
        let mut t = self.field.zero();
        for i in 0..self.rows.min(self.cols) {
            t = &t + &self[(i, i)];
        }
        t
    }

    /// Some(λ) when the matrix equals λI.
    pub fn scalar_value(&self) -> Option<Scalar> {
        if !self.is_square() {
            return None;
        }
        if self.rows == 0 {
            return Some(self.field.zero());
        }
        let l = self[(0, 0)].clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let want = if i == j { &l } else { &self.field.zero() };
                if &self[(i, j)] != want {
                    return None;
                }
            }
        }
        Some(l)
    }

    pub fn is_scalar(&self) -> bool {
        self.scalar_value().is_some()
    }

    pub fn pow(&self, mut e: usize) -> Self {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut r = Self::identity(self.field, self.rows);
        while e > 0 {
            if e & 1 == 1 {
                r = &r * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        r
    }

    pub fn is_square_zero(&self) -> bool {
        self.is_square() && (self * self).is_zero()
    }

    pub fn is_nilpotent(&self) -> bool {
        self.is_square() && self.pow(self.rows).is_zero()
    }

    pub fn hstack(field: FieldSpec, blocks: &[&ExactMatrix]) -> Self {
        let rows = blocks.first().map_or(0, |b| b.rows);
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(field, rows, cols);
        let mut c0 = 0;
        for b in blocks {
            assert_eq!(b.rows, rows, "hstack row mismatch");
            m.set_block(0, c0, b);
            c0 += b.cols;
        }
        m
    }

    pub fn vstack(field: FieldSpec, blocks: &[&ExactMatrix]) -> Self {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut m = Self::zeros(field, rows, cols);
        let mut r0 = 0;
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack column mismatch");
            m.set_block(r0, 0, b);
            r0 += b.rows;
        }
        m
    }

    /// Dg[...]
    pub fn block_diag(field: FieldSpec, blocks: &[&ExactMatrix]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(field, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            m.set_block(r0, c0, b);
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    /// Assembles a grid of blocks; `None` entries are zero blocks sized by their row and column.
    pub fn from_blocks(field: FieldSpec, row_sizes: &[usize], col_sizes: &[usize], blocks: &[Vec<Option<&ExactMatrix>>]) -> Self {
        let mut m = Self::zeros(field, row_sizes.iter().sum(), col_sizes.iter().sum());
        let mut r0 = 0;
        for (bi, row) in blocks.iter().enumerate() {
            let mut c0 = 0;
            for (bj, b) in row.iter().enumerate() {
                if let Some(b) = b {
                    assert_eq!((b.rows, b.cols), (row_sizes[bi], col_sizes[bj]), "block ({}, {}) has wrong shape", bi, bj);
                    m.set_block(r0, c0, b);
                }
                c0 += col_sizes[bj];
            }
            r0 += row_sizes[bi];
        }
        m
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &ExactMatrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)].clone();
            }
        }
    }

    /// Rows r0..r1 and columns c0..c1.
    pub fn sub_block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        let mut m = Self::zeros(self.field, r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                m[(i - r0, j - c0)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut s = self.field.zero();
                for j in 0..self.cols {
                    if !self[(i, j)].is_zero() && !v[j].is_zero() {
                        s = &s + &(&self[(i, j)] * &v[j]);
                    }
                }
                s
            })
            .collect()
    }

    pub fn try_mul(&self, o: &ExactMatrix) -> Result<ExactMatrix> {
        if self.cols != o.rows {
            return Err(Error::DimensionMismatch(format!("{}x{} times {}x{}", self.rows, self.cols, o.rows, o.cols)));
        }
        Ok(self * o)
    }

    pub fn rref(&self) -> RrefResult {
        let (m, n) = (self.rows, self.cols);
        let f = self.field;
        let mut a: Vec<Vec<Scalar>> = (0..m).map(|i| self.row(i)).collect();
        let mut t: Vec<Vec<Scalar>> = (0..m).map(|i| Self::identity(f, m).row(i)).collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..n {
            if r == m {
                break;
            }
            let Some(p) = (r..m).find(|&i| !a[i][c].is_zero()) else { continue };
            a.swap(r, p);
            t.swap(r, p);
            let inv = a[r][c].inverse().unwrap();
            for v in a[r].iter_mut().chain(t[r].iter_mut()) {
                *v = &*v * &inv;
            }
            for i in 0..m {
                if i != r && !a[i][c].is_zero() {
                    let k = a[i][c].clone();
                    for j in 0..n {
                        if !a[r][j].is_zero() {
                            a[i][j] = &a[i][j] - &(&k * &a[r][j]);
                        }
                    }
                    for j in 0..m {
                        if !t[r][j].is_zero() {
                            t[i][j] = &t[i][j] - &(&k * &t[r][j]);
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        RrefResult { r: Self::from_rows_sized(f, m, n, a), t: Self::from_rows_sized(f, m, m, t), pivots }
    }

    fn from_rows_sized(field: FieldSpec, m: usize, n: usize, rows: Vec<Vec<Scalar>>) -> Self {
        let mut data = Vec::with_capacity(m * n);
        for r in rows {
            data.extend(r);
        }
        ExactMatrix { field, rows: m, cols: n, data }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank()
    }

    pub fn nullspace(&self) -> SubspaceBasis {
        let rr = self.rref();
        nullspace_from_rref(&rr, self.cols, self.field)
    }

    pub fn colspace(&self) -> SubspaceBasis {
        let rr = self.rref();
        SubspaceBasis { ambient: self.rows, vectors: rr.pivots.iter().map(|&j| self.column(j)).collect() }
    }

    pub fn subspace_data(&self) -> (usize, SubspaceBasis, SubspaceBasis) {
        let rr = self.rref();
        let null = nullspace_from_rref(&rr, self.cols, self.field);
        let col = SubspaceBasis { ambient: self.rows, vectors: rr.pivots.iter().map(|&j| self.column(j)).collect() };
        (rr.rank(), null, col)
    }

    pub fn det(&self) -> Result<Scalar> {
        if !self.is_square() {
            return Err(Error::NonSquare);
        }
        let n = self.rows;
        let mut a: Vec<Vec<Scalar>> = (0..n).map(|i| self.row(i)).collect();
        let mut d = self.field.one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return Ok(self.field.zero()) };
            if p != c {
                a.swap(p, c);
                d = -&d;
            }
            d = &d * &a[c][c];
            let inv = a[c][c].inverse().unwrap();
            for i in c + 1..n {
                if a[i][c].is_zero() {
                    continue;
                }
                let k = &a[i][c] * &inv;
                for j in c..n {
                    a[i][j] = &a[i][j] - &(&k * &a[c][j]);
                }
            }
        }
        Ok(d)
    }

    pub fn inverse(&self) -> Result<ExactMatrix> {
        if !self.is_square() {
            return Err(Error::NonSquare);
        }
        let rr = self.rref();
        if rr.rank() < self.rows {
            return Err(Error::Singular);
        }
        Ok(rr.t)
    }

    /// P⁻¹·A·P.
    pub fn conjugate(&self, p: &ExactMatrix) -> Result<ExactMatrix> {
        let pi = p.inverse()?;
        Ok(&(&pi * self) * p)
    }

    /// X with A·X = B; free variables set to zero.
    pub fn solve_right(&self, b: &ExactMatrix) -> Result<ExactMatrix> {
        if b.rows != self.rows {
            return Err(Error::DimensionMismatch(format!("A has {} rows, B has {}", self.rows, b.rows)));
        }
        let rr = self.rref();
        let tb = &rr.t * b;
        let rank = rr.rank();
        for i in rank..self.rows {
            for j in 0..b.cols {
                if !tb[(i, j)].is_zero() {
                    return Err(Error::NoSolution);
                }
            }
        }
        let mut x = Self::zeros(self.field, self.cols, b.cols);
        for (i, &pc) in rr.pivots.iter().enumerate() {
            for j in 0..b.cols {
                x[(pc, j)] = tb[(i, j)].clone();
            }
        }
        Ok(x)
    }

    pub fn right_inverse(&self, strategy: InverseStrategy) -> Result<ExactMatrix> {
        if self.rank() != self.rows {
            return Err(Error::NotFullRowRank);
        }
        match strategy {
            InverseStrategy::Gram => {
                if self.field != FieldSpec::Rationals {
                    return Err(Error::GramUnavailable);
                }
                let at = self.transpose();
                let gram = self * &at;
                Ok(&at * &gram.inverse()?)
            }
            InverseStrategy::Rref => self.solve_right(&Self::identity(self.field, self.rows)),
        }
    }

    /// Characteristic polynomial det(xI − A), division free.
    pub fn char_poly(&self) -> Result<UniPoly> {
        if !self.is_square() {
            return Err(Error::NonSquare);
        }
        let f = self.field;
        let n = self.rows;
        // v holds descending coefficients of the char poly of the leading r×r block
        let mut v = vec![f.one()];
        for r in 0..n {
            let a = &self[(r, r)];
            let row: Vec<Scalar> = (0..r).map(|j| self[(r, j)].clone()).collect();
            let mut col: Vec<Scalar> = (0..r).map(|i| self[(i, r)].clone()).collect();
            let mut toep = vec![f.one(), -a];
            for _ in 0..r {
                let mut s = f.zero();
                for k in 0..r {
                    s = &s + &(&row[k] * &col[k]);
                }
                toep.push(-&s);
                let next: Vec<Scalar> = (0..r)
                    .map(|i| {
                        let mut s = f.zero();
                        for k in 0..r {
                            s = &s + &(&self[(i, k)] * &col[k]);
                        }
                        s
                    })
                    .collect();
                col = next;
            }
            let mut nv = vec![f.zero(); r + 2];
            for (i, slot) in nv.iter_mut().enumerate() {
                for (j, vj) in v.iter().enumerate() {
                    if i >= j {
                        *slot = &*slot + &(&toep[i - j] * vj);
                    }
                }
            }
            v = nv;
        }
        v.reverse();
        Ok(UniPoly::new(f, v))
    }

    /// X with A·X − X·B = D, via the Kronecker linear system.
    pub fn solve_sylvester(a: &ExactMatrix, b: &ExactMatrix, d: &ExactMatrix) -> Result<ExactMatrix> {
        let (n, m) = (a.rows, b.rows);
        if !a.is_square() || !b.is_square() || d.rows != n || d.cols != m {
            return Err(Error::DimensionMismatch("sylvester shapes".into()));
        }
        let f = a.field;
        let mut k = Self::zeros(f, n * m, n * m);
        for i in 0..n {
            for j in 0..m {
                let row = i * m + j;
                for t in 0..n {
                    if !a[(i, t)].is_zero() {
                        k[(row, t * m + j)] = &k[(row, t * m + j)] + &a[(i, t)];
                    }
                }
                for t in 0..m {
                    if !b[(t, j)].is_zero() {
                        k[(row, i * m + t)] = &k[(row, i * m + t)] - &b[(t, j)];
                    }
                }
            }
        }
        let rhs = Self::from_columns(f, n * m, &[d.data.clone()]);
        let x = k.solve_right(&rhs)?;
        Ok(ExactMatrix { field: f, rows: n, cols: m, data: x.data })
    }

    /// Text format: `field Q|GF(p)`, `m n`, then rows.
    pub fn to_text(&self) -> String {
        let mut s = format!("field {}\n{} {}\n", self.field, self.rows, self.cols);
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<ExactMatrix> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap().trim())
            .filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
        let field = parse_field_header(header)?;
        let dims = lines.next().ok_or_else(|| Error::Parse("missing dimensions".into()))?;
        let d: Vec<usize> = dims
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad dimensions '{}'", dims))))
            .collect::<Result<_>>()?;
        if d.len() != 2 {
            return Err(Error::Parse(format!("bad dimensions '{}'", dims)));
        }
        let (m, n) = (d[0], d[1]);
        let mut data = Vec::with_capacity(m * n);
        for i in 0..m {
            let line = lines.next().ok_or_else(|| Error::Parse(format!("missing row {}", i + 1)))?;
            let row: Vec<Scalar> = line.split_whitespace().map(|t| field.parse_scalar(t)).collect::<Result<_>>()?;
            if row.len() != n {
                return Err(Error::Parse(format!("row {} has {} entries, expected {}", i + 1, row.len(), n)));
            }
            data.extend(row);
        }
        if let Some(extra) = lines.next() {
            return Err(Error::Parse(format!("trailing content '{}'", extra)));
        }
        Ok(ExactMatrix { field, rows: m, cols: n, data })
    }
}

pub fn parse_field_header(line: &str) -> Result<FieldSpec> {
    let rest = line
        .strip_prefix("field")
        .ok_or_else(|| Error::Parse(format!("expected 'field ...', got '{}'", line)))?
        .trim();
    parse_field_name(rest)
}

pub fn parse_field_name(name: &str) -> Result<FieldSpec> {
    let name = name.trim();
    if name == "Q" {
        return Ok(FieldSpec::Rationals);
    }
    let p = name
        .strip_prefix("GF(")
        .and_then(|s| s.strip_suffix(')'))
        .and_then(|s| s.trim().parse::<u64>().ok())
        .ok_or_else(|| Error::Parse(format!("unknown field '{}'", name)))?;
    FieldSpec::prime(p)
}

fn nullspace_from_rref(rr: &RrefResult, n: usize, field: FieldSpec) -> SubspaceBasis {
    let mut vectors = Vec::new();
    for free in (0..n).filter(|c| !rr.pivots.contains(c)) {
        let mut v = vec![field.zero(); n];
        v[free] = field.one();
        for (i, &pc) in rr.pivots.iter().enumerate() {
            v[pc] = -&rr.r[(i, free)];
        }
        vectors.push(v);
    }
    SubspaceBasis { ambient: n, vectors }
}

/// Extends `start` with vectors from `pool`, in order, skipping dependents.
/// Returns the indices of the pool vectors that were taken.
pub fn extend_basis(field: FieldSpec, dim: usize, start: &[Vec<Scalar>], pool: &[Vec<Scalar>]) -> Vec<usize> {
    let mut echelon = Echelon::new(field, dim);
    for v in start {
        echelon.insert(v);
    }
    let mut taken = Vec::new();
    for (i, v) in pool.iter().enumerate() {
        if echelon.insert(v) {
            taken.push(i);
        }
    }
    taken
}

/// Standard basis vectors e_i in index order completing `start` to a basis.
pub fn complete_with_standard(field: FieldSpec, dim: usize, start: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let pool: Vec<Vec<Scalar>> = (0..dim).map(|i| unit_vector(field, dim, i)).collect();
    extend_basis(field, dim, start, &pool).into_iter().map(|i| pool[i].clone()).collect()
}

pub fn unit_vector(field: FieldSpec, dim: usize, i: usize) -> Vec<Scalar> {
    let mut v = vec![field.zero(); dim];
    v[i] = field.one();
    v
}

/// Incremental row echelon for independence tests.
pub struct Echelon {
    field: FieldSpec,
    rows: Vec<(usize, Vec<Scalar>)>,
    dim: usize,
}

impl Echelon {
    pub fn new(field: FieldSpec, dim: usize) -> Self {
        Echelon { field, rows: Vec::new(), dim }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        let mut w = v.to_vec();
        for (p, r) in &self.rows {
            if !w[*p].is_zero() {
                let k = w[*p].clone();
                for j in 0..self.dim {
                    if !r[j].is_zero() {
                        w[j] = &w[j] - &(&k * &r[j]);
                    }
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// Adds `v`; false when it was dependent.
    pub fn insert(&mut self, v: &[Scalar]) -> bool {
        let w = self.reduce(v);
        let Some(p) = w.iter().position(|x| !x.is_zero()) else { return false };
        let inv = w[p].inverse().unwrap();
        let w: Vec<Scalar> = w.iter().map(|x| x * &inv).collect();
        for (_, r) in self.rows.iter_mut() {
            if !r[p].is_zero() {
                let k = r[p].clone();
                for j in 0..self.dim {
                    r[j] = &r[j] - &(&k * &w[j]);
                }
            }
        }
        let _ = self.field;
        self.rows.push((p, w));
        true
    }
}

impl Index<(usize, usize)> for ExactMatrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ExactMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<'a> Mul<&'a ExactMatrix> for &'a ExactMatrix {
    type Output = ExactMatrix;
    fn mul(self, o: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, o.rows, "matrix product shape mismatch");
        let mut r = ExactMatrix::zeros(self.field, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero() {
                        r[(i, j)] = &r[(i, j)] + &(a * b);
                    }
                }
            }
        }
        r
    }
}

impl<'a> Add<&'a ExactMatrix> for &'a ExactMatrix {
    type Output = ExactMatrix;
    fn add(self, o: &ExactMatrix) -> ExactMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "matrix sum shape mismatch");
        ExactMatrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a ExactMatrix> for &'a ExactMatrix {
    type Output = ExactMatrix;
    fn sub(self, o: &ExactMatrix) -> ExactMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "matrix difference shape mismatch");
        ExactMatrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ExactMatrix {
    type Output = ExactMatrix;
    fn neg(self) -> ExactMatrix {
        ExactMatrix { field: self.field, rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| -a).collect() }
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.data.iter().map(|s| s.to_string()).collect();
        let w = cells.iter().map(|c| c.len()).max().unwrap_or(1);
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:>w$}", cells[i * self.cols + j], w = w)?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::*;
    use proptest::prelude::*;

    const Q: FieldSpec = FieldSpec::Rationals;

    #[test]
    fn rref_examples() {
        let rr = ExactMatrix::identity(Q, 3).rref();
        assert_eq!(rr.r, ExactMatrix::identity(Q, 3));
        assert_eq!(rr.rank(), 3);
        assert_eq!(ExactMatrix::from_i64(Q, &[vec![1, 2], vec![2, 4]]).rank(), 1);
        let f = ExactMatrix::from_i64(Q, &[vec![1, 4, 7, 10], vec![2, 5, 8, 11], vec![3, 6, 9, 12]]);
        let rr = f.rref();
        assert_eq!(rr.rank(), 2);
        assert_eq!(&rr.t * &f, rr.r);
    }

    #[test]
    fn subspace_examples() {
        let j2 = ExactMatrix::jordan(Q, 2, &Q.zero());
        let (r, n, c) = j2.subspace_data();
        assert_eq!(r, 1);
        assert_eq!(n.vectors, vec![vec![Q.zero(), Q.one()]]);
        assert_eq!(c.vectors, vec![vec![Q.zero(), Q.one()]]);
        let (r, n, _) = ExactMatrix::zeros(Q, 3, 3).subspace_data();
        assert_eq!((r, n.dim()), (0, 3));
    }

    #[test]
    fn solve_right_examples() {
        let b = ExactMatrix::from_i64(Q, &[vec![1, 5], vec![-2, 3]]);
        assert_eq!(ExactMatrix::identity(Q, 2).solve_right(&b).unwrap(), b);
        let a = ExactMatrix::from_i64(Q, &[vec![1], vec![2]]);
        let x = a.solve_right(&ExactMatrix::from_i64(Q, &[vec![3], vec![6]])).unwrap();
        assert_eq!(x, ExactMatrix::from_i64(Q, &[vec![3]]));
        assert_eq!(a.solve_right(&ExactMatrix::from_i64(Q, &[vec![1], vec![0]])), Err(Error::NoSolution));
    }

    #[test]
    fn right_inverse_examples() {
        for s in [InverseStrategy::Gram, InverseStrategy::Rref] {
            assert_eq!(ExactMatrix::identity(Q, 3).right_inverse(s).unwrap(), ExactMatrix::identity(Q, 3));
        }
        let a = ExactMatrix::from_i64(Q, &[vec![1, 2, 3], vec![2, 4, 6]]);
        assert_eq!(a.right_inverse(InverseStrategy::Rref), Err(Error::NotFullRowRank));
        let f5 = FieldSpec::PrimeField(5);
        assert_eq!(ExactMatrix::identity(f5, 2).right_inverse(InverseStrategy::Gram), Err(Error::GramUnavailable));
    }

    #[test]
    fn char_poly_examples() {
        let j3 = ExactMatrix::jordan(Q, 3, &Q.zero());
        assert_eq!(j3.char_poly().unwrap(), UniPoly::from_i64(Q, &[0, 0, 0, 1]));
        let p = UniPoly::from_i64(Q, &[1, -3, 1]);
        assert_eq!(p.companion().unwrap().char_poly().unwrap(), p);
        assert_eq!(ExactMatrix::zeros(Q, 2, 3).char_poly(), Err(Error::NonSquare));
        assert_eq!(ExactMatrix::zeros(Q, 0, 0).char_poly().unwrap(), UniPoly::one(Q));
    }

    #[test]
    fn sylvester_examples() {
        let a = ExactMatrix::from_i64(Q, &[vec![2]]);
        let b = ExactMatrix::from_i64(Q, &[vec![3]]);
        let x = ExactMatrix::solve_sylvester(&a, &b, &ExactMatrix::from_i64(Q, &[vec![5]])).unwrap();
        assert_eq!(x, ExactMatrix::from_i64(Q, &[vec![-5]]));
        let i2 = ExactMatrix::identity(Q, 2);
        let x = ExactMatrix::solve_sylvester(&i2, &i2, &ExactMatrix::zeros(Q, 2, 2)).unwrap();
        assert!(x.is_zero());
        let a = ExactMatrix::from_i64(Q, &[vec![0, 1], vec![0, 0]]);
        let b = ExactMatrix::from_i64(Q, &[vec![1]]);
        let d = ExactMatrix::from_i64(Q, &[vec![4], vec![-7]]);
        let x = ExactMatrix::solve_sylvester(&a, &b, &d).unwrap();
        assert_eq!(&(&a * &x) - &(&x * &b), d);
        // hand elimination: x2 = 7, x1 = 7 - 4 = 3... x1 - ... check explicit values
        // row 2: 0 - x2 = -7 → x2 = 7; row 1: x2 - x1 = 4 → x1 = 3
        assert_eq!(x, ExactMatrix::from_i64(Q, &[vec![3], vec![7]]));
    }

    #[test]
    fn text_round_trip() {
        let m = ExactMatrix::from_rows(Q, vec![vec![Q.from_ratio(1, 3).unwrap(), Q.from_i64(-2)]]);
        let t = m.to_text();
        assert_eq!(ExactMatrix::parse(&t).unwrap(), m);
        let src = "# comment\nfield GF(5)\n\n2 2\n1 7 # trailing\n-1 0\n";
        let m = ExactMatrix::parse(src).unwrap();
        assert_eq!(m, ExactMatrix::from_i64(FieldSpec::PrimeField(5), &[vec![1, 2], vec![4, 0]]));
        assert!(ExactMatrix::parse("field GF(4)\n1 1\n1\n").is_err());
        assert!(ExactMatrix::parse("field Q\n1 2\n1\n").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn rank_nullity_gf5(m in matrix_strategy(FieldSpec::PrimeField(5), 1..=5usize, 1..=5usize)) {
            let rr = m.rref();
            let (r, n, _) = m.subspace_data();
            prop_assert_eq!(r + n.dim(), m.cols());
            prop_assert_eq!(&rr.t * &m, rr.r.clone());
            prop_assert!(rr.t.det().unwrap().is_zero() == false);
            for v in &n.vectors {
                prop_assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
            }
        }

        #[test]
        fn right_inverse_exact(seed in any::<u64>(), q in any::<bool>()) {
            let f = if q { Q } else { FieldSpec::PrimeField(5) };
            let a = random_full_row_rank(f, seed);
            for s in [InverseStrategy::Gram, InverseStrategy::Rref] {
                if s == InverseStrategy::Gram && !q { continue; }
                let r = a.right_inverse(s).unwrap();
                prop_assert_eq!(&a * &r, ExactMatrix::identity(f, a.rows()));
            }
        }

        #[test]
        fn char_poly_similarity_invariant(seed in any::<u64>(), q in any::<bool>()) {
            let f = if q { Q } else { FieldSpec::PrimeField(5) };
            let mut rng = rng_from(seed);
            let n = 1 + (seed % 5) as usize;
            let a = random_matrix(f, n, n, &mut rng);
            let p = random_invertible(f, n, &mut rng);
            let cp = a.char_poly().unwrap();
            prop_assert_eq!(a.conjugate(&p).unwrap().char_poly().unwrap(), cp.clone());
            prop_assert!(cp.eval_matrix(&a).is_zero());
            let b = random_matrix(f, 2, 2, &mut rng);
            let d = ExactMatrix::block_diag(f, &[&a, &b]);
            prop_assert_eq!(d.char_poly().unwrap(), &cp * &b.char_poly().unwrap());
        }

        #[test]
        fn sylvester_residual(seed in any::<u64>()) {
            let f = FieldSpec::PrimeField(5);
            let mut rng = rng_from(seed);
            let a = random_matrix(f, 3, 3, &mut rng);
            let b = random_matrix(f, 2, 2, &mut rng);
            let d = random_matrix(f, 3, 2, &mut rng);
            if let Ok(x) = ExactMatrix::solve_sylvester(&a, &b, &d) {
                prop_assert_eq!(&(&a * &x) - &(&x * &b), d);
            }
        }
    }
}
