//! Randomized invariants.  Smaller corpora than the acceptance gate, but
//! proptest shrinks failures to minimal witnesses.

use brgk_core::arith::{self, is_square_in_qv, is_square_rat, rat, rat_int, square_class_mul};
use brgk_core::brq::{self, hilbert_symbol, SymbolQ};
use brgk_core::descent::{self, CurveAB, CurvePoint, SelmerRep};
use brgk_core::laurent::{self, LaurentClass, MonomialElem};
use brgk_core::qx::{self, ClassQx};
use brgk_core::{Config, PlaceQ, Rat};
use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;

fn cfg() -> Config {
    Config::default()
}

fn nz_rat() -> impl Strategy<Value = Rat> {
    ((-60i64..=60), (1i64..=12))
        .prop_filter("nonzero", |(n, _)| *n != 0)
        .prop_map(|(n, d)| rat(n, d))
}

fn place() -> impl Strategy<Value = PlaceQ> {
    prop_oneof![
        1 => Just(PlaceQ::RealPlace),
        4 => proptest::sample::select(vec![2u64, 3, 5, 7, 11, 13, 17, 19, 23])
            .prop_map(PlaceQ::prime_u64),
    ]
}

// ---------------------------------------------------------------------------
// hilbert symbols over Q
// ---------------------------------------------------------------------------

proptest! {
    #[test]
    fn hilbert_is_symmetric(a in nz_rat(), b in nz_rat(), v in place()) {
        prop_assert_eq!(
            hilbert_symbol(&a, &b, &v).unwrap(),
            hilbert_symbol(&b, &a, &v).unwrap()
        );
    }

    #[test]
    fn hilbert_is_bilinear(a1 in nz_rat(), a2 in nz_rat(), b in nz_rat(), v in place()) {
        let lhs = hilbert_symbol(&(&a1 * &a2), &b, &v).unwrap();
        let rhs = hilbert_symbol(&a1, &b, &v).unwrap() * hilbert_symbol(&a2, &b, &v).unwrap();
        prop_assert_eq!(lhs, rhs);
        // and the square-class product is in the same class as the plain one
        let sc = hilbert_symbol(&square_class_mul(&a1, &a2), &b, &v).unwrap();
        prop_assert_eq!(sc, rhs);
    }

    #[test]
    fn hilbert_norm_relations(a in nz_rat(), v in place()) {
        prop_assert_eq!(hilbert_symbol(&a, &(-&a), &v).unwrap(), 1);
        if a != rat_int(1) {
            let c = rat_int(1) - &a;
            prop_assert_eq!(hilbert_symbol(&a, &c, &v).unwrap(), 1);
        }
    }

    #[test]
    fn hilbert_ignores_squares(a in nz_rat(), b in nz_rat(),
                               s in nz_rat(), t in nz_rat(), v in place()) {
        let lhs = hilbert_symbol(&(&a * &s * &s), &(&b * &t * &t), &v).unwrap();
        prop_assert_eq!(lhs, hilbert_symbol(&a, &b, &v).unwrap());
    }

    #[test]
    fn hilbert_trivial_on_local_squares(a in nz_rat(), b in nz_rat(), v in place()) {
        if is_square_in_qv(&b, &v).unwrap() {
            prop_assert_eq!(hilbert_symbol(&a, &b, &v).unwrap(), 1);
        }
        if is_square_rat(&b) {
            prop_assert!(is_square_in_qv(&b, &v).unwrap());
        }
    }
}

// ---------------------------------------------------------------------------
// classes over Q
// ---------------------------------------------------------------------------

proptest! {
    #[test]
    fn ramification_sets_have_even_size(a in nz_rat(), b in nz_rat()) {
        let sym = SymbolQ::new(a, b).unwrap();
        let c = brq::ramification_set(&sym, cfg().factor_budget).unwrap();
        prop_assert_eq!(c.places().len() % 2, 0);
    }

    #[test]
    fn class_of_is_a_homomorphism(a1 in nz_rat(), b1 in nz_rat(),
                                  a2 in nz_rat(), b2 in nz_rat()) {
        let budget = cfg().factor_budget;
        let s1 = SymbolQ::new(a1, b1).unwrap();
        let s2 = SymbolQ::new(a2, b2).unwrap();
        let joint = brq::class_of(&[s1.clone(), s2.clone()], budget).unwrap();
        let c1 = brq::ramification_set(&s1, budget).unwrap();
        let c2 = brq::ramification_set(&s2, budget).unwrap();
        prop_assert!(brq::equivalent(&joint, &c1.combine(&c2)));
        // 2-torsion: doubling any symbol kills the class
        let doubled = brq::class_of(&[s1.clone(), s1], budget).unwrap();
        prop_assert!(doubled.is_trivial());
    }
}

// ---------------------------------------------------------------------------
// auxiliary arithmetic
// ---------------------------------------------------------------------------

proptest! {
    #[test]
    fn squarefree_part_is_a_square_cofactor(q in nz_rat()) {
        let budget = cfg().factor_budget;
        let s = arith::squarefree_part(&q, budget).unwrap();
        let s_rat = Rat::from_integer(s.clone());
        prop_assert!(is_square_rat(&(&q / &s_rat)));
        prop_assert_eq!(s < BigInt::from(0), q < rat_int(0));
        for (_, e) in arith::factor(&s_rat, budget).unwrap().factors {
            prop_assert_eq!(e, 1);
        }
    }

    #[test]
    fn jacobi_is_multiplicative_and_periodic(a1 in -200i64..=200, a2 in -200i64..=200,
                                             k in 0u64..=199) {
        let n = BigUint::from(2 * k + 1);
        let x1 = BigInt::from(a1);
        let x2 = BigInt::from(a2);
        let lhs = arith::jacobi(&(&x1 * &x2), &n).unwrap();
        prop_assert_eq!(lhs, arith::jacobi(&x1, &n).unwrap() * arith::jacobi(&x2, &n).unwrap());
        let shifted = &x1 + BigInt::from(n.clone());
        prop_assert_eq!(arith::jacobi(&shifted, &n).unwrap(), arith::jacobi(&x1, &n).unwrap());
    }

    #[test]
    fn padic_val_is_additive(q1 in nz_rat(), q2 in nz_rat(),
                             p in proptest::sample::select(vec![2u64, 3, 5, 7])) {
        let p = BigUint::from(p);
        let lhs = arith::padic_val(&(&q1 * &q2), &p).unwrap();
        prop_assert_eq!(lhs, arith::padic_val(&q1, &p).unwrap() + arith::padic_val(&q2, &p).unwrap());
    }
}

// ---------------------------------------------------------------------------
// classes over Q(x)
// ---------------------------------------------------------------------------

fn poly_str(coeffs: &[i64]) -> Option<String> {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0)
        .map(|(i, c)| format!("({c})*x^{i}"))
        .collect();
    if terms.is_empty() {
        None
    } else {
        Some(format!("({})", terms.join(" + ")))
    }
}

fn qx_entry() -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::vec(-6i64..=6, 1..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn qx_classes_are_2_torsion(f in qx_entry(), g in qx_entry()) {
        let (Some(f), Some(g)) = (poly_str(&f), poly_str(&g)) else {
            return Ok(());
        };
        let c = cfg();
        let Ok(cls) = ClassQx::parse(&format!("[({f}, {g})]")) else {
            return Ok(());
        };
        prop_assert!(qx::equivalent_qx(&cls.combine(&cls), &ClassQx::trivial(), &c).unwrap());
        prop_assert!(qx::equivalent_qx(&cls, &cls, &c).unwrap());
    }

    #[test]
    fn qx_specialization_is_a_homomorphism(f1 in qx_entry(), g1 in qx_entry(),
                                           f2 in qx_entry(), g2 in qx_entry()) {
        let (Some(f1), Some(g1), Some(f2), Some(g2)) =
            (poly_str(&f1), poly_str(&g1), poly_str(&f2), poly_str(&g2))
        else {
            return Ok(());
        };
        let c = cfg();
        let (Ok(c1), Ok(c2)) = (
            ClassQx::parse(&format!("[({f1}, {g1})]")),
            ClassQx::parse(&format!("[({f2}, {g2})]")),
        ) else {
            return Ok(());
        };
        let joint = c1.combine(&c2);
        // entries have finitely many zeros and poles, so a small scan always
        // finds a point where all three specializations are defined
        for t in 2i64..=60 {
            let point = rat_int(t);
            let (Ok(s1), Ok(s2), Ok(sj)) = (
                qx::specialize(&c1, &point, &c),
                qx::specialize(&c2, &point, &c),
                qx::specialize(&joint, &point, &c),
            ) else {
                continue;
            };
            prop_assert!(brq::equivalent(&sj, &s1.combine(&s2)));
            return Ok(());
        }
        prop_assert!(false, "no admissible specialization point below 60");
    }

    #[test]
    fn faddeev_round_trips(f in qx_entry(), g in qx_entry()) {
        let (Some(f), Some(g)) = (poly_str(&f), poly_str(&g)) else {
            return Ok(());
        };
        let c = cfg();
        let Ok(cls) = ClassQx::parse(&format!("[({f}, {g})]")) else {
            return Ok(());
        };
        let back = qx::faddeev_decompose(&cls, &c).unwrap().to_class().unwrap();
        prop_assert!(qx::equivalent_qx(&cls, &back, &c).unwrap());
    }
}

// ---------------------------------------------------------------------------
// Laurent towers
// ---------------------------------------------------------------------------

fn monomial(h: usize) -> impl Strategy<Value = MonomialElem> {
    let pool = vec![1i64, 2, 3, 5, 6, 7, 10, 15, -1, -2, -3, -5, -6, -7, -10, -15];
    (proptest::sample::select(pool), proptest::collection::vec(-2i64..=2, h))
        .prop_map(|(c, exps)| MonomialElem::new(rat_int(c), exps).unwrap())
}

fn laurent_class() -> impl Strategy<Value = LaurentClass> {
    (1usize..=3).prop_flat_map(|h| {
        (monomial(h), monomial(h))
            .prop_map(move |(a, b)| LaurentClass::new(h, vec![(a, b)]).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn monomial_squares_are_squares(m in (1usize..=3).prop_flat_map(monomial)) {
        prop_assert!(m.mul(&m).is_square());
        prop_assert!(m.pow(2).is_square());
    }

    #[test]
    fn normal_form_reconstructs_the_class(cls in laurent_class()) {
        let c = cfg();
        let h = cls.height();
        let nf = laurent::normalize(&cls).unwrap();
        let t_top = {
            let mut exps = vec![0i64; h];
            exps[h - 1] = 1;
            MonomialElem::new(rat_int(1), exps).unwrap()
        };
        let recon = nf
            .inertial_residue
            .lift()
            .combine(&LaurentClass::new(h, vec![(nf.nsr_char.lift(), t_top)]).unwrap());
        prop_assert!(laurent::is_trivial(&cls.combine(&recon), &c).unwrap());
    }

    #[test]
    fn laurent_classes_are_2_torsion(cls in laurent_class()) {
        let c = cfg();
        prop_assert!(laurent::is_trivial(&cls.combine(&cls), &c).unwrap());
    }
}

// ---------------------------------------------------------------------------
// descent
// ---------------------------------------------------------------------------

fn curve() -> impl Strategy<Value = CurveAB> {
    ((-8i64..=8), (-30i64..=30))
        .prop_filter("nonsingular", |(a, b)| *b != 0 && a * a != 4 * b)
        .prop_map(|(a, b)| CurveAB::new(BigInt::from(a), BigInt::from(b)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn selmer_sets_are_groups(c in curve()) {
        let conf = cfg();
        for g in [
            descent::selmer_phi(&c, &conf).unwrap(),
            descent::selmer_phihat(&c, &conf).unwrap(),
        ] {
            prop_assert!(g.size().is_power_of_two());
            let width = g.reps[0].0.len();
            prop_assert!(g.contains(&SelmerRep::one(width)));
            for r1 in &g.reps {
                for r2 in &g.reps {
                    let prod = r1.mul(r2, conf.factor_budget).unwrap();
                    prop_assert!(g.contains(&prod), "{:?} * {:?} escapes the group", r1, r2);
                }
            }
        }
    }

    #[test]
    fn two_torsion_image_lands_in_selmer(c in curve()) {
        let conf = cfg();
        // the points feeding S^phi live one isogeny step up, on the dual
        // curve, and those feeding S^phihat one step further
        let o = CurvePoint::Finite(rat_int(0), rat_int(0));
        let up = c.dual();
        let phi = descent::selmer_phi(&c, &conf).unwrap();
        let img = descent::point_image(&up, &o, conf.factor_budget).unwrap();
        prop_assert!(phi.contains(&img), "image of (0,0) missing from S^phi");
        let phihat = descent::selmer_phihat(&c, &conf).unwrap();
        let img2 = descent::point_image(&up.dual(), &o, conf.factor_budget).unwrap();
        prop_assert!(phihat.contains(&img2), "image of (0,0) missing from S^phihat");
    }
}
