use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use z2pcf::bounds::{bound_excludes, PcfType, SignVector};
use z2pcf::galois::{embed, sigma, tau};
use z2pcf::interval::Interval;
use z2pcf::pcf::Pcf;
use z2pcf::ring::TowerSplit;
use z2pcf::units::{
    eta, in_re03, in_re12, pcf03_from_unit, pcf12_from_unit, pell_map, unit_from_pcf03, unit_from_pcf12, RelUnit,
};
use z2pcf::{Level, RingElem};

fn elem(level: u32) -> impl Strategy<Value = RingElem> {
    let d = Level(level).degree();
    prop::collection::vec(-20i64..=20, d).prop_map(move |c| RingElem::from_i64s(Level(level), &c))
}

fn nonzero(level: u32) -> impl Strategy<Value = RingElem> {
    elem(level).prop_filter("nonzero", |x| !x.is_zero())
}

/// Two elements at a shared level 1..=3.
fn pair() -> impl Strategy<Value = (RingElem, RingElem)> {
    (1u32..=3).prop_flat_map(|k| (elem(k), elem(k)))
}

/// `σ^j(η_2)^e` products at level 2.
fn unit2() -> impl Strategy<Value = RelUnit> {
    (-4i64..=4, -4i64..=4, any::<bool>()).prop_map(|(a, b, neg)| {
        let h = eta(Level(2)).unwrap();
        let u = h.pow(a).mul(&h.conjugate(1).pow(b)).unwrap();
        if neg {
            u.neg()
        } else {
            u
        }
    })
}

/// Plain f64 evaluation at `X_n = 2cos(2π/2^(n+2))`.
fn eval_f64(x: &RingElem) -> f64 {
    let t = 2.0 * (2.0 * std::f64::consts::PI / f64::from(1u32 << (x.level().index() + 2))).cos();
    let den: f64 = x.denominator().to_string().parse().unwrap();
    x.numerators().iter().rev().fold(0.0, |acc, c| acc * t + c.to_string().parse::<f64>().unwrap()) / den
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_join_round_trip(x in (1u32..=4).prop_flat_map(elem)) {
        prop_assert_eq!(x.tower_split().unwrap().join().unwrap(), x);
    }

    #[test]
    fn lift_then_descend(x in (0u32..=3).prop_flat_map(elem)) {
        let up = x.lift(Level(x.level().index() + 1)).unwrap();
        prop_assert_eq!(up.descend(x.level()).unwrap(), x);
    }

    #[test]
    fn relative_norm_is_multiplicative((a, b) in pair()) {
        let lhs = (&a * &b).relative_norm().unwrap();
        let rhs = &a.relative_norm().unwrap() * &b.relative_norm().unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn relative_norm_is_p2_minus_x2q2(x in (1u32..=3).prop_flat_map(elem)) {
        let TowerSplit { p, q } = x.tower_split().unwrap();
        let x2 = RingElem::generator(x.level()).square().descend(p.level()).unwrap();
        prop_assert_eq!(x.relative_norm().unwrap(), &p.square() - &(&x2 * &q.square()));
    }

    #[test]
    fn exact_division_recovers_factor((a, b) in pair()) {
        prop_assume!(!b.is_zero());
        prop_assert_eq!((&a * &b).exact_div(&b).unwrap(), Some(a));
    }

    #[test]
    fn inverse_is_two_sided(x in (1u32..=3).prop_flat_map(nonzero)) {
        let inv = x.inverse().unwrap();
        prop_assert!((&x * &inv).is_one());
        prop_assert!((&inv * &x).is_one());
    }

    #[test]
    fn sigma_is_a_ring_automorphism((a, b) in pair(), j in 0u64..16) {
        prop_assert_eq!(sigma(&(&a + &b), j), &sigma(&a, j) + &sigma(&b, j));
        prop_assert_eq!(sigma(&(&a * &b), j), &sigma(&a, j) * &sigma(&b, j));
        let order = a.level().degree() as u64;
        prop_assert_eq!(sigma(&a, order), a.clone());
        prop_assert_eq!(sigma(&sigma(&a, j), order - j % order), a);
    }

    #[test]
    fn tau_fixes_the_subfield(x in (1u32..=3).prop_flat_map(elem)) {
        let n = x.level();
        prop_assert_eq!(tau(&x).unwrap(), sigma(&x, n.degree() as u64 / 2));
        let TowerSplit { p, q } = x.tower_split().unwrap();
        let flipped = TowerSplit { p, q: -q }.join().unwrap();
        prop_assert_eq!(tau(&x).unwrap(), flipped);
    }

    #[test]
    fn display_parse_round_trip(x in (0u32..=3).prop_flat_map(elem)) {
        prop_assert_eq!(x.to_string().parse::<RingElem>().unwrap(), x.clone());
        prop_assert_eq!(RingElem::parse_at(&x.to_string(), x.level()).unwrap(), x);
    }

    #[test]
    fn embedding_agrees_with_f64(x in (1u32..=4).prop_flat_map(nonzero)) {
        let v = embed(&x, 0, 128).unwrap();
        let f = eval_f64(&x);
        // |X_n| < 2, so coefficient i contributes at most |c_i| 2^i
        let scale: f64 = x
            .numerators()
            .iter()
            .enumerate()
            .map(|(i, c)| c.to_string().parse::<f64>().unwrap().abs() * 2f64.powi(i as i32))
            .sum();
        prop_assert!((v.mid_f64() - f).abs() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn embedding_is_a_homomorphism((a, b) in pair(), j in 0u64..8) {
        let j = j % a.level().degree() as u64;
        let prod = embed(&(&a * &b), j, 96).unwrap();
        let sep = embed(&a, j, 96).unwrap().mul(&embed(&b, j, 96).unwrap());
        prop_assert!(prod.overlaps(&sep));
    }

    #[test]
    fn interval_ops_enclose_rationals(
        a in -1000i64..1000, b in 1i64..1000, c in -1000i64..1000, d in 1i64..1000,
    ) {
        let r = |n: i64, m: i64| BigRational::new(BigInt::from(n), BigInt::from(m));
        let iv = |q: &BigRational| Interval::from_ratio(q.numer(), q.denom(), 80);
        let (x, y) = (r(a, b), r(c, d));
        prop_assert!(iv(&x).add(&iv(&y)).overlaps(&iv(&(&x + &y))));
        prop_assert!(iv(&x).sub(&iv(&y)).overlaps(&iv(&(&x - &y))));
        prop_assert!(iv(&x).mul(&iv(&y)).overlaps(&iv(&(&x * &y))));
        if c != 0 {
            let q = iv(&x).div(&iv(&y)).unwrap();
            prop_assert!(q.overlaps(&iv(&(&x / &y))));
        }
        if a > 0 {
            let l = iv(&x).ln().unwrap();
            prop_assert!((l.mid_f64() - (a as f64 / b as f64).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_group_laws(u in unit2(), e in -3i64..=3) {
        let one = RelUnit::one(Level(2));
        prop_assert_eq!(u.mul(&u.inverse()).unwrap(), one.clone());
        prop_assert_eq!(u.pow(e).mul(&u.pow(-e)).unwrap(), one);
        prop_assert_eq!(u.pow(2).elem().clone(), u.elem().square());
        let parity = if e.rem_euclid(2) == 0 { 1 } else { u.norm_sign() };
        prop_assert_eq!(u.pow(e).norm_sign(), parity);
    }

    #[test]
    fn pell_map_identity(u in unit2()) {
        let s = pell_map(&u);
        prop_assert!(s.holds());
        prop_assert_eq!(s.unit().unwrap(), u);
    }

    #[test]
    fn members_round_trip_and_survive_the_bounds(u in unit2()) {
        prop_assume!(!u.is_torsion());
        if in_re12(&u).unwrap() {
            let p = pcf12_from_unit(&u).unwrap();
            prop_assert_eq!(unit_from_pcf12(&p).unwrap(), u.clone());
            prop_assert!(!bound_excludes(&u, PcfType::T12).unwrap());
        }
        if in_re03(&u).unwrap() {
            let p = pcf03_from_unit(&u).unwrap();
            prop_assert_eq!(unit_from_pcf03(&p).unwrap(), u.clone());
            prop_assert!(!bound_excludes(&u, PcfType::T03).unwrap());
        }
    }

    #[test]
    fn pcf_text_round_trip(
        pre in prop::collection::vec(prop::collection::vec(-9i64..=9, 2), 0..=2),
        per in prop::collection::vec(prop::collection::vec(-9i64..=9, 2), 1..=3),
    ) {
        let m = Level(1);
        let to = |v: Vec<Vec<i64>>| v.iter().map(|c| RingElem::from_i64s(m, c)).collect::<Vec<_>>();
        let p = Pcf::new(m, to(pre), to(per)).unwrap();
        prop_assert_eq!(Pcf::parse(&p.to_string(), m).unwrap(), p);
    }

    #[test]
    fn sign_vector_text_round_trip(len in 1usize..=8, bits in any::<u64>()) {
        let s = SignVector::from_index(len, bits & ((1 << len) - 1));
        prop_assert_eq!(s.to_string().parse::<SignVector>().unwrap(), s.clone());
        prop_assert_eq!(s.negate().negate(), s);
    }
}
