use berkdyn_core::entropy::roots::disk_count;
use berkdyn_core::entropy::{
    first_return_gf, gurevich_entropy, gurevich_entropy_at, measure_entropy, return_path_counts, solve_masses,
    truncation_profile, QPoly,
};
use berkdyn_core::ext_field::{ExtElem, FieldSpec};
use berkdyn_core::julia_struct::{build_partition, MarkovSystem, State};
use berkdyn_core::map_action::RationalMap;
use berkdyn_core::rational::{ratio, to_f64, Rational};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn sextic_system() -> MarkovSystem {
    let f = FieldSpec::new(3, 6).unwrap();
    let phi = RationalMap::sextic(&ExtElem::from_int(f, 3), &ExtElem::from_int(f, -1)).unwrap();
    build_partition(&phi).unwrap()
}

const CORE: [&str; 5] = ["U_inf_1", "U_inf_2", "U_0p", "U_1p", "U_bbar"];

#[test]
fn path_series_inverts_one_minus_first_return_at_every_core_state() {
    let sys = sextic_system();
    for s in CORE {
        let p: Vec<Rational> =
            return_path_counts(&sys, s, 20).unwrap().into_iter().map(Rational::from_integer).collect();
        let f = first_return_gf(&sys, s).unwrap().series(21);
        let one_minus: Vec<Rational> =
            f.iter().enumerate().map(|(k, c)| if k == 0 { Rational::one() - c } else { -c }).collect();
        for n in 0..=20 {
            let prod: Rational = (0..=n).map(|k| &p[k] * &one_minus[n - k]).sum();
            let want = if n == 0 { Rational::one() } else { Rational::zero() };
            assert_eq!(prod, want, "state {s}, order {n}");
        }
    }
}

#[test]
fn gurevich_root_is_independent_of_the_state() {
    let sys = sextic_system();
    let a = gurevich_entropy_at(&sys, "U_inf_1").unwrap();
    let b = gurevich_entropy_at(&sys, "U_0p").unwrap();
    assert_ne!(first_return_gf(&sys, "U_inf_1").unwrap(), first_return_gf(&sys, "U_0p").unwrap());
    assert_eq!(a.minpoly, b.minpoly);
    assert!(a.interval.0 <= b.interval.1 && b.interval.0 <= a.interval.1);
    assert!((a.nats - b.nats).abs() < 1e-12);
}

#[test]
fn truncations_increase_to_the_gurevich_entropy() {
    let sys = sextic_system();
    let top = gurevich_entropy(&sys).unwrap().nats;
    let prof = truncation_profile(&sys, 16);
    assert!(prof.windows(2).all(|w| w[0] <= w[1]));
    assert!(prof.iter().all(|h| *h <= top + 1e-9));
    assert!(prof.iter().any(|h| top - h < 1e-2));
    assert_eq!(prof, truncation_profile(&sys, 16));
}

#[derive(Clone, Copy, Debug)]
struct C(f64, f64);

impl C {
    fn mul(self, o: C) -> C {
        C(self.0 * o.0 - self.1 * o.1, self.0 * o.1 + self.1 * o.0)
    }
    fn sub(self, o: C) -> C {
        C(self.0 - o.0, self.1 - o.1)
    }
    fn div(self, o: C) -> C {
        let n = o.0 * o.0 + o.1 * o.1;
        C((self.0 * o.0 + self.1 * o.1) / n, (self.1 * o.0 - self.0 * o.1) / n)
    }
    fn abs(self) -> f64 {
        self.0.hypot(self.1)
    }
}

/// Durand–Kerner iteration for the roots of a monic-normalized polynomial.
fn durand_kerner(c: &[f64]) -> Vec<C> {
    let n = c.len() - 1;
    let lead = c[n];
    let eval = |z: C| c.iter().rev().fold(C(0.0, 0.0), |acc, &a| acc.mul(z).sub(C(-a / lead, 0.0)));
    let mut roots: Vec<C> = (0..n)
        .map(|k| {
            let t = 0.4 + 0.9 * k as f64;
            C(t.cos() * 1.3, t.sin() * 1.3)
        })
        .collect();
    for _ in 0..2000 {
        for i in 0..n {
            let mut den = C(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den = den.mul(roots[i].sub(roots[j]));
                }
            }
            roots[i] = roots[i].sub(eval(roots[i]).div(den));
        }
    }
    roots
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn disk_counts_agree_with_numerical_roots(
        coeffs in prop::collection::vec(-9i64..=9, 2..=7),
        rho in prop::sample::select(vec![(1i64, 3i64), (1, 2), (1, 1), (3, 2), (2, 1), (7, 3)]),
    ) {
        prop_assume!(*coeffs.last().unwrap() != 0);
        let p = QPoly::from_ints(&coeffs);
        let r = ratio(rho.0, rho.1);
        let roots = durand_kerner(&coeffs.iter().map(|&x| x as f64).collect::<Vec<_>>());
        let rf = to_f64(&r);
        prop_assume!(roots.iter().all(|z| (z.abs() - rf).abs() > 1e-6 && z.abs().is_finite()));
        let want = roots.iter().filter(|z| z.abs() < rf).count();
        prop_assert_eq!(disk_count(&p, &r), Some(want));
    }
}

/// Systems realized by a map of degree `d = Σ δ_i` that sends each of `n`
/// pieces onto the whole space with local degree `δ_i`: every state then has
/// exactly `d` preimages counted with degree.
fn realizable_system() -> impl Strategy<Value = MarkovSystem> {
    prop::collection::vec(1u32..=4, 1..=5).prop_map(|degs| {
        let names: Vec<String> = (0..degs.len()).map(|i| format!("S{i}")).collect();
        let states = degs
            .iter()
            .zip(&names)
            .map(|(&degree, name)| State { name: name.clone(), image: names.clone(), degree, countable: false })
            .collect();
        MarkovSystem { d: degs.iter().sum(), states, families: vec![] }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn entropy_sandwich(sys in realizable_system()) {
        prop_assume!(sys.d >= 2);
        let m = solve_masses(&sys).unwrap();
        prop_assert_eq!(m.total_check.clone(), Rational::one());
        let top = gurevich_entropy(&sys).unwrap();
        let h = measure_entropy(&sys, &m).nats;
        prop_assert!(h >= -1e-12);
        prop_assert!((top.nats - (sys.states.len() as f64).ln()).abs() < 1e-9);
        prop_assert!(top.nats <= (sys.d as f64).ln() + 1e-12);
        prop_assert!(h <= top.nats + 1e-9, "h_mu {} > h_top {}", h, top.nats);
    }
}

#[test]
fn sandwich_needs_realizability() {
    // S0 -> {S0, S1} with degree 4, S1 -> {S0} with degree 3: S0 has 7
    // preimages counted with degree and S1 has 4, so no degree-6 map realizes it,
    // and the mass solution is not a shift-invariant measure.
    let st = |n: &str, img: &[&str], degree| State {
        name: n.into(),
        image: img.iter().map(|s| s.to_string()).collect(),
        degree,
        countable: false,
    };
    let sys = MarkovSystem { d: 6, states: vec![st("S0", &["S0", "S1"], 4), st("S1", &["S0"], 3)], families: vec![] };
    let h = measure_entropy(&sys, &solve_masses(&sys).unwrap()).nats;
    assert!(h > gurevich_entropy(&sys).unwrap().nats);
}
