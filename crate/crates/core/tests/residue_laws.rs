use berkdyn_core::residue_dyn::fp::FpPoly;
use berkdyn_core::residue_dyn::{ResPoint, ResidueMap, SeparabilityClass};
use proptest::prelude::*;

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7])
}

fn poly(p: u64, max_deg: usize) -> impl Strategy<Value = FpPoly> {
    prop::collection::vec(0..p, 1..=max_deg + 1).prop_map(move |c| FpPoly::new(p, c))
}

fn map() -> impl Strategy<Value = ResidueMap> {
    prime().prop_flat_map(|p| (poly(p, 4), poly(p, 4))).prop_filter_map("constant or zero", |(n, d)| {
        if d.is_zero() {
            None
        } else {
            ResidueMap::new(n, d).ok()
        }
    })
}

fn target(p: u64) -> impl Strategy<Value = ResPoint> {
    prop_oneof![Just(ResPoint::Infinity), (0..p).prop_map(move |a| ResPoint::rational(p, a))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn fibers_have_degree_many_points(psi in map(), t in 0u64..7) {
        let p = psi.p();
        let t = if t == 6 { ResPoint::Infinity } else { ResPoint::rational(p, t % p) };
        prop_assert_eq!(psi.preimages(&t).total(), psi.degree());
    }

    #[test]
    fn composition_multiplies_degrees(f in map(), g in map()) {
        prop_assume!(f.p() == g.p());
        prop_assert_eq!(f.compose(&g).degree(), f.degree() * g.degree());
        for x in 0..f.p() {
            if let Some(gx) = g.eval(Some(x)) {
                if let (Some(l), Some(r)) = (f.compose(&g).eval(Some(x)), f.eval(Some(gx))) {
                    prop_assert_eq!(l, r);
                }
            }
        }
    }

    #[test]
    fn factorization_reassembles(g in prime().prop_flat_map(|p| poly(p, 8))) {
        prop_assume!(g.degree() > Some(0));
        let mut prod = FpPoly::constant(g.p(), g.lead());
        for (h, m) in g.factor() {
            prop_assert!(h.degree() > Some(0));
            prod = prod.mul(&h.pow(m));
        }
        prop_assert_eq!(prod, g);
    }

    #[test]
    fn separable_maps_have_two_d_minus_two_critical_points(psi in map()) {
        prop_assume!(psi.separability_class() == SeparabilityClass::Separable);
        prop_assert_eq!(psi.critical_points().unwrap().total(), 2 * psi.degree() - 2);
    }

    #[test]
    fn identity_fixes_every_target(pt in prime().prop_flat_map(target)) {
        let p = match &pt { ResPoint::Orbit(g) => g.p(), ResPoint::Infinity => 3 };
        let id = ResidueMap::new(FpPoly::x(p), FpPoly::one(p)).unwrap();
        prop_assert!(id.preimages(&pt).contains(&pt));
    }
}
