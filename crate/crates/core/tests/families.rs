mod common;

use common::oracle;
use num_traits::{One, Zero};
use superdenom::algebra::with_isotropic;
use superdenom::denominator::{
    f_q, finite_identity_check, root_count_table, verify, VerifyOptions,
};
use superdenom::scalar::{q, qi};
use superdenom::{build_spec, FamilyId, Parity, Weight};

fn count(spec: &superdenom::AlgebraSpec, label: &str) -> u64 {
    root_count_table(spec)
        .into_iter()
        .find(|r| r.label == label)
        .unwrap()
        .actual
}

#[test]
fn g3_data_sheet() {
    let s = build_spec(FamilyId::G3, 0, 0).unwrap();
    let expected =
        Weight::lambda0().scale_int(3) + Weight::eps(1) + Weight::eps(2) - Weight::eps(3);
    assert_eq!(s.rho_hat, expected);
    assert_eq!(s.h_dual, qi(3));
    assert_eq!(s.form.norm(&Weight::eps(1)), q(3, 2));
    assert_eq!(s.form.norm(&Weight::eps(2)), q(1, 2));
    assert_eq!(s.form.norm(&Weight::eps(3)), qi(-2));
    let sheet = s.data_sheet();
    for line in [
        "family        G(3)^(2) [G3_2]",
        "h_dual        3/1",
        "M'            1/3*e1 + 1/1*e2; 2/1*e2",
    ] {
        assert!(sheet.contains(line), "{sheet}");
    }
}

#[test]
fn every_sheet_validates() {
    for (f, k, l) in [
        (FamilyId::A2k2lm1, 2, 1),
        (FamilyId::A2l2km1, 2, 1),
        (FamilyId::A2km12lm1, 3, 1),
        (FamilyId::A2lm12km1, 2, 1),
        (FamilyId::A2k2l4, 2, 1),
        (FamilyId::A2l2k4, 2, 1),
        (FamilyId::Dk1l, 2, 1),
        (FamilyId::Dl1k, 2, 1),
        (FamilyId::Cl1, 0, 2),
        (FamilyId::A2km12km1, 3, 3),
        (FamilyId::A2k2k4, 1, 1),
        (FamilyId::Dk1k, 3, 3),
    ] {
        let s = build_spec(f, k, l).unwrap();
        let v = s.validate();
        assert!(v.ok(), "{}: {:?}", s.name(), v.failures);
        assert_eq!(s.bookkeeping(), s.loop_dims, "{}", s.name());
    }
}

#[test]
fn mirror_row_with_isotropic_alpha0_is_noted() {
    let s = build_spec(FamilyId::A2l2km1, 2, 1).unwrap();
    let v = s.validate();
    assert!(v.ok());
    assert!(
        v.notes.iter().any(|n| n.contains("permitted")),
        "{:?}",
        v.notes
    );
    assert_eq!(s.h_dual, qi(1));
}

#[test]
fn non_isotropic_s_fails_validation() {
    let s = build_spec(FamilyId::Dk1l, 2, 1).unwrap();
    let bad = with_isotropic(&s, vec![Weight::eps(1) - Weight::eps(2)]);
    assert!(bad
        .validate()
        .failures
        .iter()
        .any(|f| f == "S not isotropic"));
}

#[test]
fn delta_in_simple_roots_matches_elimination() {
    let s = build_spec(FamilyId::Dl1k, 1, 1).unwrap();
    let basis: Vec<Weight> = s.simple_roots.iter().map(|(w, _)| w.clone()).collect();
    let mut syms = s.form.finite_symbols();
    syms.push(superdenom::BasisSymbol::Delta);
    let expected = oracle::solve(&basis, &syms, &Weight::delta()).unwrap();
    let c = s.coords.decompose(&Weight::delta()).unwrap();
    assert_eq!(c, expected);
    assert!(c.iter().all(|x| x.is_integer() && *x > qi(0)));
    let ht: superdenom::Q = c.iter().sum();
    assert_eq!(ht, s.delta_height());
}

#[test]
fn class_counts_at_k2() {
    let a = build_spec(FamilyId::A2km12km1, 2, 2).unwrap();
    assert_eq!(count(&a, "D0(0)"), 12);
    assert_eq!(count(&a, "D1(0)"), 16);
    assert_eq!(a.imaginary_mult(1, Parity::Even), 2);
    assert_eq!(a.imaginary_mult(0, Parity::Even), 4);

    let b = build_spec(FamilyId::A2k2k4, 2, 2).unwrap();
    assert_eq!(count(&b, "D1(1)"), 4);
    assert_eq!(count(&b, "D1(3)"), 4);
    assert_eq!(b.imaginary_mult(1, Parity::Odd), 1);
    assert_eq!(b.imaginary_mult(3, Parity::Odd), 1);
    assert_eq!(b.imaginary_mult(2, Parity::Even), 4);

    let d = build_spec(FamilyId::Dk1k, 2, 2).unwrap();
    assert_eq!(count(&d, "D0(0)"), 16);
    assert_eq!(d.imaginary_mult(1, Parity::Even), 1);
}

#[test]
fn positive_roots_carry_imaginary_multiplicities() {
    let s = build_spec(FamilyId::A2k2k4, 2, 2).unwrap();
    assert!(s.positive_roots(0).iter().all(|r| !r.is_imaginary()));
    let im: Vec<_> = s
        .positive_roots(3)
        .into_iter()
        .filter(|r| r.is_imaginary())
        .collect();
    let mult = |lvl: i64, p: Parity| {
        im.iter()
            .filter(|r| r.level == lvl && r.parity == p)
            .map(|r| r.multiplicity)
            .sum::<u32>()
    };
    assert_eq!(mult(1, Parity::Odd), 1);
    assert_eq!(mult(2, Parity::Even), 4);
    assert_eq!(mult(3, Parity::Odd), 1);
}

#[test]
fn f_q_rows_start_at_q_cubed() {
    let a = f_q(&build_spec(FamilyId::A2km12km1, 2, 2).unwrap(), 4);
    assert_eq!(a.coefficients[..4], [qi(1), qi(0), qi(0), qi(2)]);
    let b = f_q(&build_spec(FamilyId::A2k2k4, 2, 2).unwrap(), 4);
    assert_eq!(b.coefficients[..4], [qi(1), qi(0), qi(0), qi(-1)]);
    let d = f_q(&build_spec(FamilyId::Dk1k, 2, 2).unwrap(), 4);
    assert_eq!(d.coefficients[..4], [qi(1), qi(0), qi(0), qi(-1)]);
    let one = f_q(&build_spec(FamilyId::Dk1l, 2, 1).unwrap(), 4);
    assert!(one.is_one());
}

#[test]
fn finite_identities_at_depth_8() {
    for (f, k, l) in [(FamilyId::A2k2lm1, 1, 1), (FamilyId::A2km12km1, 2, 2)] {
        let s = build_spec(f, k, l).unwrap();
        let c = finite_identity_check(&s, 8, None).unwrap();
        assert!(c.pass, "{}: {}", s.finite_type, c.detail);
    }
}

#[test]
fn finite_identity_leading_coefficient() {
    let s = build_spec(FamilyId::A2k2lm1, 2, 1).unwrap();
    let fi = superdenom::denominator::finite_identity(&s, 4, None).unwrap();
    assert!(fi.lhs.coefficient(&s.rho).value().unwrap().is_one());
    assert!(fi.rhs.coefficient(&s.rho).value().unwrap().is_one());
}

#[test]
fn small_verifications_match() {
    for (f, k, l, d) in [
        (FamilyId::A2k2lm1, 2, 1, 5),
        (FamilyId::A2lm12km1, 2, 1, 5),
        (FamilyId::A2l2k4, 2, 1, 5),
        (FamilyId::Dl1k, 2, 1, 5),
        (FamilyId::Cl1, 0, 2, 6),
        (FamilyId::G3, 0, 0, 5),
    ] {
        let s = build_spec(f, k, l).unwrap();
        let r = verify(&s, d, &VerifyOptions::default());
        assert!(r.is_match(), "{}: {:?}", s.name(), r.checks);
        assert!(r.lhs_terms > 0);
    }
}

#[test]
fn zero_dual_comparison_is_exact_below_q() {
    // Below height(δ) the f(q) factor cannot contribute, so both sides agree
    // whichever product convention is used.
    for s in common::zero_dual_cases(2) {
        let d = u32::try_from(s.delta_height().floor().to_integer()).unwrap() - 1;
        let r = verify(
            &s,
            d,
            &VerifyOptions {
                ratio: false,
                ..VerifyOptions::default()
            },
        );
        assert!(
            r.mismatches.is_empty(),
            "{}: {:?}",
            s.name(),
            r.mismatches.first()
        );
        assert!(!s.h_dual.is_zero() || r.q_depth == 0);
    }
}
