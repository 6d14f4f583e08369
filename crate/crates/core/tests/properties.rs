mod common;

use std::sync::OnceLock;

use common::*;
use fhc_core::certificates::{decay_certificate_vec, decay_holds_at};
use fhc_core::sets::{build_family, verify_family};
use fhc_core::{Dyadic, FinVec, OperatorSpec};
use num_bigint::BigInt;
use proptest::prelude::*;

fn canon3() -> &'static OperatorSpec {
    static S: OnceLock<OperatorSpec> = OnceLock::new();
    S.get_or_init(|| canonical(3))
}

fn toy_spec() -> &'static OperatorSpec {
    static S: OnceLock<OperatorSpec> = OnceLock::new();
    S.get_or_init(toy)
}

fn dyadic() -> impl Strategy<Value = Dyadic> {
    (-1000i64..1000, -40i64..40).prop_map(|(m, e)| Dyadic::new(m, e))
}

fn finvec(hi: u64) -> impl Strategy<Value = FinVec> {
    prop::collection::vec((0..hi, dyadic()), 0..8).prop_map(FinVec::from_entries)
}

proptest! {
    #[test]
    fn ring_laws_agree_with_rationals(a in dyadic(), b in dyadic(), c in dyadic()) {
        let (qa, qb, qc) = (a.to_rational(), b.to_rational(), c.to_rational());
        prop_assert_eq!((&a + &b).to_rational(), &qa + &qb);
        prop_assert_eq!((&a - &b).to_rational(), &qa - &qb);
        prop_assert_eq!((&a * &b).to_rational(), &qa * &qb);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!((&(&a * &b) - &c).to_rational(), &qa * &qb - &qc);
        prop_assert_eq!(a.cmp(&b), qa.cmp(&qb));
    }

    #[test]
    fn normalization_is_canonical(m in -5000i64..5000, e in -30i64..30, k in 0u32..20) {
        let a = Dyadic::new(m, e);
        let b = Dyadic::new(BigInt::from(m) << k, e - k as i64);
        prop_assert_eq!(&a, &b);
        prop_assert!(a.is_zero() || a.mantissa().bit(0));
        if a.is_zero() {
            prop_assert_eq!(a.exponent(), 0);
        }
    }

    #[test]
    fn rational_round_trip(a in dyadic()) {
        let q = a.to_rational();
        prop_assert_eq!(Dyadic::from_fraction(q.numer(), q.denom()).unwrap(), a);
    }

    #[test]
    fn l1_is_a_norm(x in finvec(50), y in finvec(50), z in finvec(50)) {
        prop_assert!(x.dist_l1(&z) <= &x.dist_l1(&y) + &y.dist_l1(&z));
        prop_assert_eq!(x.dist_l1(&y), y.dist_l1(&x));
        prop_assert_eq!(x.add(&y).sub(&y), x.clone());
        prop_assert_eq!(FinVec::from_entries(x.entries().to_vec()), x);
    }

    #[test]
    fn inverse_round_trip(x in finvec(584)) {
        let t = canon3();
        prop_assert_eq!(t.apply_t(&t.apply_t_inv(&x).unwrap()).unwrap(), x.clone());
        prop_assert_eq!(t.apply_t_inv(&t.apply_t(&x).unwrap()).unwrap(), x);
    }

    #[test]
    fn fast_power_matches_iteration(x in finvec(84), k in -512i64..=512) {
        let t = toy_spec();
        prop_assert_eq!(t.apply_t_power(&x, k).unwrap(), t.apply_t_iter(&x, k).unwrap());
    }

    #[test]
    fn power_is_additive(x in finvec(148), a in -3000i64..3000, b in -3000i64..3000) {
        let t = toy_spec();
        let lhs = t.apply_t_power(&t.apply_t_power(&x, a).unwrap(), b).unwrap();
        prop_assert_eq!(lhs, t.apply_t_power(&x, a + b).unwrap());
    }

    #[test]
    fn matrix_oracle_equivalence(x in finvec(72), k in -64i64..=64) {
        let t = canon3();
        let lay = Layout::of(t, 2);
        prop_assert_eq!(to_q(&t.apply_t_power(&x, k).unwrap()), lay.power(&to_q(&x), k));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn decay_certificate_is_sound(x in finvec(72), ks in prop::collection::vec(0u64..100_000, 5)) {
        let t = canon3();
        let cert = decay_certificate_vec(t, &x).unwrap();
        for k in ks {
            prop_assert!(decay_holds_at(t, &x, cert.k0 + k).unwrap());
        }
        if cert.k0 > 0 {
            prop_assert!(!decay_holds_at(t, &x, cert.k0 - 1).unwrap());
        }
    }

    #[test]
    fn separated_families_verify(pairs in prop::collection::vec((1u64..20, 1u64..40), 1..4)) {
        let fam = build_family(&pairs, 30_000).unwrap();
        prop_assert!(verify_family(&fam, 30_000).unwrap().passed);
        for j in 1..=fam.len() {
            let m = fam.members(j, 30_000).unwrap();
            prop_assert!(m.iter().all(|&n| n >= pairs[j - 1].1));
        }
    }
}
