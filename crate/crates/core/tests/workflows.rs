//! File text in, certificate text out, certificate text back in.

use sqz_core::certificate::Certificate;
use sqz_core::factorize::{sqz_product_chain, sqz_product_two};
use sqz_core::matdiv::{sqz_quotient_right, QuotientRecipe};
use sqz_core::oracle::verify_certificate;
use sqz_core::random::{random_square_zero, rng_from};
use sqz_core::summation::{nilpotent_sum, sum_three_decide, sum_two_sqz};
use sqz_core::{ExactMatrix, FieldSpec};

fn round_trip(c: &Certificate) {
    let back = Certificate::parse(&c.to_text()).unwrap();
    assert_eq!(&back, c);
    assert!(verify_certificate(&back).passed());
}

#[test]
fn parsed_matrix_to_certificates() {
    let text = "# trace zero, order 4\nfield Q\n4 4\n  1 2 0 -1\n0 3   1/2 0\n\n2 0 -4 1\n0 0 1 0\n";
    let a = ExactMatrix::parse(text).unwrap();
    round_trip(&nilpotent_sum(&a).unwrap());
    let v = sum_three_decide(&a);
    if let Some(c) = v.certificate() {
        round_trip(c);
    }
    let g = ExactMatrix::parse("field GF(5)\n4 4\n0 1 0 0\n0 0 0 0\n0 0 0 0\n0 0 0 0\n").unwrap();
    round_trip(&sqz_product_two(&g, Some(2), Some(1)).unwrap());
    round_trip(&sqz_product_chain(&g, 5, Some(&[1, 2, 1, 2, 1])).unwrap());
}

#[test]
fn random_two_sums_round_trip() {
    let mut rng = rng_from(11);
    for f in [FieldSpec::Rationals, FieldSpec::PrimeField(3), FieldSpec::PrimeField(7)] {
        for n in 1..=6 {
            let a = &random_square_zero(f, n, &mut rng) + &random_square_zero(f, n, &mut rng);
            round_trip(&sum_two_sqz(&a).unwrap());
        }
    }
}

#[test]
fn recipe_file_reproduces_quotient() {
    let u = [3i64, 0, 2, 0, -4, 0, -11];
    let q = FieldSpec::Rationals;
    let g = ExactMatrix::from_i64(q, &u.iter().map(|&a| vec![40 * a, 80 * a, 40 * a]).collect::<Vec<_>>());
    let f = ExactMatrix::from_i64(q, &(0..7).map(|i| vec![11 + 3 * i, 40, 29 - 3 * i]).collect::<Vec<_>>());
    let first = sqz_quotient_right(&g, &f, Some(3), None).unwrap();
    let recipe = QuotientRecipe::parse(&first.recipe.to_text()).unwrap();
    let again = sqz_quotient_right(&g, &f, Some(3), Some(&recipe)).unwrap();
    assert_eq!(first.h, again.h);
}
