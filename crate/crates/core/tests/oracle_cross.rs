//! Cross-module consistency of the eta-product oracle with the Hecke
//! recurrence machinery.

use num_integer::Integer;
use num_traits::ToPrimitive;

use newform_signs::characters::DirichletCharacter;
use newform_signs::qseries::{eta_product_expand, series_to_newform, EtaProductSpec};

#[test]
fn delta_coefficients_are_multiplicative() {
    let bound = 10_000usize;
    let spec = EtaProductSpec::parse("1:24").unwrap();
    let series = eta_product_expand(&spec, bound).unwrap();
    for m in 2..=100usize {
        for n in 2..=(bound / m) {
            if m.gcd(&n) != 1 {
                continue;
            }
            let lhs = series.coeff(m * n).to_bigint();
            let rhs = series.coeff(m).to_bigint() * series.coeff(n).to_bigint();
            assert_eq!(lhs, rhs, "tau({m}*{n}) != tau({m})tau({n})");
        }
    }
}

#[test]
fn delta_recurrence_at_prime_squares() {
    let bound = 10_000usize;
    let spec = EtaProductSpec::parse("1:24").unwrap();
    let series = eta_product_expand(&spec, bound).unwrap();
    let form = series_to_newform(&series, 12, 1, DirichletCharacter::trivial(1)).unwrap();
    for p in newform_signs::primes::primes_up_to(100) {
        let direct = series.coeff((p * p) as usize).to_bigint();
        let via_recurrence = form.hecke_power(p, 2).unwrap();
        assert_eq!(
            via_recurrence.exact().unwrap().re.to_integer(),
            direct,
            "recurrence at {p}^2"
        );
    }
}

#[test]
fn multiplicative_extension_reproduces_the_expansion() {
    // the full multiplicativity route: a(n) from prime data only
    let bound = 2_000usize;
    for (spec_text, weight, level, chi) in [
        ("1:24", 12u32, 1u64, DirichletCharacter::trivial(1)),
        ("1:2,11:2", 2, 11, DirichletCharacter::trivial(11)),
        (
            "4:6",
            3,
            16,
            newform_signs::characters::character_from_exponents(16, &[1, 0]).unwrap(),
        ),
        ("4:2,8:2", 2, 32, DirichletCharacter::trivial(32)),
    ] {
        let spec = EtaProductSpec::parse(spec_text).unwrap();
        let series = eta_product_expand(&spec, bound).unwrap();
        let form = series_to_newform(&series, weight, level, chi).unwrap();
        for n in 1..=bound as u64 {
            let rebuilt = form.multiplicative_extend(n).unwrap();
            let g = rebuilt.exact().expect("exact data");
            assert!(g.is_real());
            assert_eq!(
                g.re.to_integer(),
                series.coeff(n as usize).to_bigint(),
                "{spec_text} at n = {n}"
            );
        }
    }
}

#[test]
fn level11_form_agrees_with_reference_values() {
    // first coefficients of the weight-2 level-11 newform
    let spec = EtaProductSpec::parse("1:2,11:2").unwrap();
    let series = eta_product_expand(&spec, 20).unwrap();
    let expected: &[(usize, i64)] = &[
        (1, 1),
        (2, -2),
        (3, -1),
        (4, 2),
        (5, 1),
        (6, 2),
        (7, -2),
        (9, -2),
        (10, -2),
        (11, 1),
        (13, 4),
        (19, 0),
    ];
    for &(n, v) in expected {
        assert_eq!(series.coeff(n).to_bigint().to_i64().unwrap(), v, "a({n})");
    }
}

#[test]
fn all_shipped_fixtures_validate() {
    // Deligne bound and reality of a(p)/zeta hold on every stored prime.
    use newform_signs::qseries::forms;
    for (name, form) in [
        ("delta", forms::delta(5_000)),
        ("eta4-6", forms::eta4_pow6(5_000)),
        ("eta1-11", forms::eta1_11(5_000)),
        ("eta4-8", forms::eta4_8(5_000)),
    ] {
        let issues = form.validate();
        assert!(issues.is_empty(), "{name}: {issues:?}");
    }
}
