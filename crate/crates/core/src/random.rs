//! Seeded random instances for tests, sweeps and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::densemat::ExactMatrix;
use crate::exactfield::{FieldSpec, Scalar};
use crate::unipoly::UniPoly;

pub type TestRng = ChaCha8Rng;

pub fn rng_from(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries in −3..=3 over Q, uniform over GF(p).
pub fn random_scalar(field: FieldSpec, rng: &mut TestRng) -> Scalar {
    match field {
        FieldSpec::Rationals => field.from_i64(rng.gen_range(-3..=3)),
        FieldSpec::PrimeField(p) => Scalar::Mod(rng.gen_range(0..p), p),
    }
}

pub fn random_nonzero(field: FieldSpec, rng: &mut TestRng) -> Scalar {
    loop {
        let s = random_scalar(field, rng);
        if !s.is_zero() {
            return s;
        }
    }
}

pub fn random_matrix(field: FieldSpec, m: usize, n: usize, rng: &mut TestRng) -> ExactMatrix {
    let rows = (0..m).map(|_| (0..n).map(|_| random_scalar(field, rng)).collect()).collect();
    if m == 0 {
        return ExactMatrix::zeros(field, 0, n);
    }
    ExactMatrix::from_rows(field, rows)
}

pub fn random_invertible(field: FieldSpec, n: usize, rng: &mut TestRng) -> ExactMatrix {
    loop {
        let p = random_matrix(field, n, n, rng);
        if p.rank() == n {
            return p;
        }
    }
}

pub fn random_full_row_rank(field: FieldSpec, seed: u64) -> ExactMatrix {
    let mut rng = rng_from(seed);
    let m = rng.gen_range(1..=4);
    let n = rng.gen_range(m..=5);
    loop {
        let a = random_matrix(field, m, n, &mut rng);
        if a.rank() == m {
            return a;
        }
    }
}

/// Random matrix of the given rank, built as a product of full-rank factors.
pub fn random_of_rank(field: FieldSpec, m: usize, n: usize, r: usize, rng: &mut TestRng) -> ExactMatrix {
    loop {
        let a = random_matrix(field, m, r, rng);
        let b = random_matrix(field, r, n, rng);
        let g = &a * &b;
        if g.rank() == r {
            return g;
        }
    }
}

pub fn random_monic(field: FieldSpec, deg: usize, rng: &mut TestRng) -> UniPoly {
    let mut c: Vec<Scalar> = (0..deg).map(|_| random_scalar(field, rng)).collect();
    c.push(field.one());
    UniPoly::new(field, c)
}

/// Random square-zero matrix of order n: P·Dg[J2(0)^k, 0]·P⁻¹.
pub fn random_square_zero(field: FieldSpec, n: usize, rng: &mut TestRng) -> ExactMatrix {
    let k = rng.gen_range(0..=n / 2);
    let mut s = ExactMatrix::zeros(field, n, n);
    for b in 0..k {
        s[(2 * b + 1, 2 * b)] = field.one();
    }
    let p = random_invertible(field, n, rng);
    &(&p * &s) * &p.inverse().unwrap()
}

/// Random nilpotent matrix of order n: conjugate of a strictly lower triangular matrix.
pub fn random_nilpotent(field: FieldSpec, n: usize, rng: &mut TestRng) -> ExactMatrix {
    let mut s = ExactMatrix::zeros(field, n, n);
    for i in 0..n {
        for j in 0..i {
            if rng.gen_bool(0.5) {
                s[(i, j)] = random_scalar(field, rng);
            }
        }
    }
    let p = random_invertible(field, n, rng);
    &(&p * &s) * &p.inverse().unwrap()
}
