//! Constructors succeed exactly on the matrices brute force can decompose,
//! and every certificate they return checks out.

use sqz_core::certificate::{Certificate, Role};
use sqz_core::factorize::{nilpotent_product_two, sqz_product_three, sqz_product_two};
use sqz_core::oracle::{enumerate, verify_certificate, BruteContext, EnumSpec, Filter};
use sqz_core::summation::{sum_four_sqz, sum_three_sqz_char2, sum_two_sqz};
use sqz_core::{ExactMatrix, FieldSpec};

type Constructor = fn(&ExactMatrix) -> sqz_core::Result<Certificate>;

fn constructors(f: FieldSpec) -> Vec<(&'static str, Constructor, bool, usize, Option<Role>)> {
    // (name, constructor, is a sum, number of parts, product role)
    let mut v: Vec<(&'static str, Constructor, bool, usize, Option<Role>)> = vec![
        ("nilpotent_product_two", nilpotent_product_two, false, 2, Some(Role::Nilpotent)),
        ("sqz_product_two", |g| sqz_product_two(g, None, None), false, 2, Some(Role::SquareZero)),
        ("sqz_product_three", |g| sqz_product_three(g, None), false, 3, Some(Role::SquareZero)),
        ("sum_two_sqz", sum_two_sqz, true, 2, None),
        ("sum_four_sqz", sum_four_sqz, true, 4, None),
    ];
    if f.characteristic() == 2 {
        v.push(("sum_three_sqz_char2", sum_three_sqz_char2, true, 3, None));
    }
    v
}

fn check_field(f: FieldSpec) {
    for n in 1..=3 {
        let mut ctx = BruteContext::new(f, n).unwrap();
        let all: Vec<ExactMatrix> = enumerate(EnumSpec { field: f, n, filter: Filter::All }).unwrap().collect();
        for (name, build, is_sum, k, role) in constructors(f) {
            let mut yes = 0;
            for a in &all {
                let brute = if is_sum { ctx.sum_decide(a, k).unwrap() } else { ctx.product_decide(a, k, role.unwrap()).unwrap() };
                let built = build(a);
                assert_eq!(built.is_ok(), brute, "{} over {} disagrees with brute force on\n{}", name, f, a.to_text());
                if let Ok(c) = built {
                    let rep = verify_certificate(&c);
                    assert!(rep.passed(), "{} certificate over {}: {}", name, f, rep);
                    yes += 1;
                }
            }
            assert!(yes > 0 || n == 1, "{} never succeeded over {} at n = {}", name, f, n);
        }
    }
}

#[test]
fn constructors_match_brute_force_gf2() {
    check_field(FieldSpec::PrimeField(2));
}

#[test]
fn constructors_match_brute_force_gf3() {
    check_field(FieldSpec::PrimeField(3));
}
