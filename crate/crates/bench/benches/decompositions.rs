use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use sqz_core::canonform::rcf;
use sqz_core::factorize::{nilpotent_product_two, sqz_product_three};
use sqz_core::matdiv::{sqz_quotient_right, QuotientRecipe};
use sqz_core::oracle::{census, Claim};
use sqz_core::random::{random_matrix, random_of_rank, random_square_zero, rng_from};
use sqz_core::summation::{sum_three_decide, sum_two_sqz};
use sqz_core::{ExactMatrix, FieldSpec};

const Q: FieldSpec = FieldSpec::Rationals;
const GF5: FieldSpec = FieldSpec::PrimeField(5);

fn canonical(c: &mut Criterion) {
    let mut g = c.benchmark_group("rcf");
    for n in [4, 8, 10] {
        for f in [Q, GF5] {
            let a = random_matrix(f, n, n, &mut rng_from(n as u64));
            g.bench_with_input(BenchmarkId::new(f.to_string(), n), &a, |b, a| b.iter(|| rcf(black_box(a)).unwrap()));
        }
    }
    g.finish();
}

fn quotient(c: &mut Criterion) {
    let u = [3i64, 0, 2, 0, -4, 0, -11];
    let g = ExactMatrix::from_i64(Q, &u.iter().map(|&a| vec![40 * a, 80 * a, 40 * a]).collect::<Vec<_>>());
    let f = ExactMatrix::from_i64(Q, &(0..7).map(|i| vec![11 + 3 * i, 40, 29 - 3 * i]).collect::<Vec<_>>());
    let b: Vec<Vec<i64>> = (-3..=3).map(|v| vec![v]).collect();
    let recipe = QuotientRecipe { b: Some(ExactMatrix::from_i64(Q, &b)), ..Default::default() };
    c.bench_function("sqz_quotient_right/example2", |bch| {
        bch.iter(|| sqz_quotient_right(black_box(&g), black_box(&f), Some(3), Some(&recipe)).unwrap())
    });
}

fn products(c: &mut Criterion) {
    let mut g = c.benchmark_group("products");
    for n in [6, 8] {
        let mut rng = rng_from(100 + n as u64);
        let a = random_of_rank(Q, n, n, n / 2, &mut rng);
        g.bench_with_input(BenchmarkId::new("sqz_product_three", n), &a, |b, a| b.iter(|| sqz_product_three(black_box(a), None).unwrap()));
        let s = random_of_rank(Q, n, n, n - 1, &mut rng);
        g.bench_with_input(BenchmarkId::new("nilpotent_product_two", n), &s, |b, s| b.iter(|| nilpotent_product_two(black_box(s)).unwrap()));
    }
    g.finish();
}

fn sums(c: &mut Criterion) {
    let mut g = c.benchmark_group("sums");
    for n in [4, 8] {
        let mut rng = rng_from(200 + n as u64);
        let a = &random_square_zero(Q, n, &mut rng) + &random_square_zero(Q, n, &mut rng);
        g.bench_with_input(BenchmarkId::new("sum_two_sqz", n), &a, |b, a| b.iter(|| sum_two_sqz(black_box(a)).unwrap()));
        let mut t = random_matrix(Q, n, n, &mut rng);
        let tr = t.trace();
        t[(0, 0)] = &t[(0, 0)] - &tr;
        g.bench_with_input(BenchmarkId::new("sum_three_decide", n), &t, |b, t| b.iter(|| sum_three_decide(black_box(t))));
    }
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("census");
    g.sample_size(10);
    g.bench_function("GF(3) n=3 sum2", |b| b.iter(|| census(FieldSpec::PrimeField(3), 3, Claim::SumTwo).unwrap()));
    g.finish();
}

criterion_group!(benches, canonical, quotient, products, sums, oracle);
criterion_main!(benches);
