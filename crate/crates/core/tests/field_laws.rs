use berkdyn_core::berk_points::BerkPoint;
use berkdyn_core::ext_field::{ExtElem, FieldSpec, Val};
use berkdyn_core::rational::{ratio, Rational};
use proptest::prelude::*;

fn field() -> FieldSpec {
    FieldSpec::new(3, 4).unwrap()
}

fn coeff() -> impl Strategy<Value = Rational> {
    // numerators and denominators carrying powers of 3
    (-30i64..=30, prop::sample::select(vec![1i64, 2, 3, 5, 9, 27])).prop_map(|(n, d)| ratio(n, d))
}

fn elem() -> impl Strategy<Value = ExtElem> {
    prop::collection::vec(coeff(), 4).prop_map(|c| ExtElem::from_coeffs(field(), c).unwrap())
}

fn add_val(a: &Val, b: &Val) -> Val {
    match (a, b) {
        (Val::Finite(x), Val::Finite(y)) => Val::Finite(x + y),
        _ => Val::Infinite,
    }
}

fn point() -> impl Strategy<Value = BerkPoint> {
    let centers = prop::sample::select(vec![0i64, 1, 2, 3, 4, 9, -1, 10, 12]);
    (centers, -12i64..=12, 0usize..3).prop_map(|(c, k, shift)| {
        let center = &ExtElem::from_int(field(), c) + &ExtElem::pi_pow(field(), shift as i64 + 1);
        BerkPoint::zeta(center, ratio(k, 4))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn valuation_is_ultrametric_and_multiplicative(x in elem(), y in elem()) {
        let (vx, vy) = (x.val(), y.val());
        let vs = (&x + &y).val();
        prop_assert!(vs >= vx.clone().min(vy.clone()));
        if vx != vy {
            prop_assert_eq!(vs, vx.clone().min(vy.clone()));
        }
        prop_assert_eq!((&x * &y).val(), add_val(&vx, &vy));
    }

    #[test]
    fn hyperbolic_distance_is_a_metric(x in point(), y in point(), z in point()) {
        let d = |a: &BerkPoint, b: &BerkPoint| a.dist_h(b).unwrap();
        prop_assert_eq!(d(&x, &x), Rational::from_integer(0.into()));
        prop_assert_eq!(d(&x, &y), d(&y, &x));
        prop_assert!(d(&x, &y) >= Rational::from_integer(0.into()));
        prop_assert_eq!(d(&x, &y) == Rational::from_integer(0.into()), x.same_point(&y));
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z));
    }
}

#[test]
fn inverse_and_reduction_agree() {
    let f = field();
    let u = &ExtElem::from_int(f, 2) + &ExtElem::pi(f);
    let inv = u.inv().unwrap();
    assert!((&u * &inv).is_one());
    assert_eq!(inv.reduce_unit().unwrap(), 2);
    assert_eq!(ExtElem::pi_pow(f, -3).val(), Val::Finite(ratio(-3, 4)));
}
