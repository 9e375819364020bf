//! Property suites shared by the `properties` and `acceptance` targets.
//!
//! Each suite runs a fixed number of random cases through a proptest
//! runner and returns the number of cases on success.

#![allow(dead_code)]

use std::sync::atomic::{AtomicUsize, Ordering};

use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use qvanish::dissection::{check_pair_numeric, h_kl, prove_pair, verify_certificate, QuadExponent};
use qvanish::qexpr::{parse, Named, ProductExpr};
use qvanish::theta::{product, theta_f, triple_product_factors, Character, Sign};
use qvanish::TruncatedSeries;

pub struct Suite {
    pub name: &'static str,
    pub run: fn(u32) -> Result<u32, String>,
}

pub const SUITES: &[Suite] = &[
    Suite {
        name: "ring laws",
        run: ring_laws,
    },
    Suite {
        name: "invert soundness",
        run: invert_soundness,
    },
    Suite {
        name: "truncation monotonicity",
        run: truncation_monotonicity,
    },
    Suite {
        name: "partition of unity",
        run: partition_of_unity,
    },
    Suite {
        name: "projection algebra",
        run: projection_algebra,
    },
    Suite {
        name: "triple product on fuzzed arguments",
        run: triple_product,
    },
    Suite {
        name: "parser round trip",
        run: parser_round_trip,
    },
    Suite {
        name: "parser totality",
        run: parser_totality,
    },
    Suite {
        name: "evaluation homomorphism",
        run: eval_homomorphism,
    },
    Suite {
        name: "certificate soundness bridge",
        run: certificate_bridge,
    },
];

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn drive<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<u32, String> {
    runner(cases)
        .run(&strategy, test)
        .map(|()| cases)
        .map_err(|e| e.to_string())
}

/// Mostly small coefficients, with enough full-width ones to push products
/// past 128 bits.
fn coefficient() -> impl Strategy<Value = BigInt> {
    prop_oneof![
        4 => (-5i64..=5).prop_map(BigInt::from),
        1 => any::<i64>().prop_map(BigInt::from),
    ]
}

pub fn series_of(order: usize) -> impl Strategy<Value = TruncatedSeries> {
    prop::collection::vec(coefficient(), order + 1).prop_map(TruncatedSeries::from_coeffs)
}

pub fn series() -> impl Strategy<Value = TruncatedSeries> {
    (0usize..24).prop_flat_map(series_of)
}

fn unit_series() -> impl Strategy<Value = TruncatedSeries> {
    (series(), any::<bool>()).prop_map(|(s, neg)| {
        let mut c = s.into_coeffs();
        c[0] = BigInt::from(if neg { -1 } else { 1 });
        TruncatedSeries::from_coeffs(c)
    })
}

fn ring_laws(cases: u32) -> Result<u32, String> {
    let triple = (0usize..20).prop_flat_map(|n| (series_of(n), series_of(n), series_of(n)));
    drive(cases, triple, |(a, b, c)| {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        let same = a.clone();
        prop_assert_eq!(&a - &same, TruncatedSeries::zero(a.order()));
        prop_assert_eq!(&a * &TruncatedSeries::one(a.order()), a.clone());
        Ok(())
    })
}

fn invert_soundness(cases: u32) -> Result<u32, String> {
    drive(cases, unit_series(), |a| {
        let inv = a.invert().map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(&a * &inv, TruncatedSeries::one(a.order()));
        prop_assert_eq!(inv.invert().unwrap(), a);
        Ok(())
    })
}

fn truncation_monotonicity(cases: u32) -> Result<u32, String> {
    let input =
        (1usize..24).prop_flat_map(|n| (unit_series_of(n), series_of(n), 0..n, -3i64..=3, 0..n));
    drive(cases, input, |(a, b, m, e, c)| {
        let t = |s: &TruncatedSeries| s.truncate(m);
        prop_assert_eq!(t(&(&a + &b)), &t(&a) + &t(&b));
        prop_assert_eq!(t(&(&a * &b)), &t(&a) * &t(&b));
        prop_assert_eq!(t(&a.invert().unwrap()), t(&a).invert().unwrap());
        prop_assert_eq!(t(&a.pow(e).unwrap()), t(&a).pow(e).unwrap());
        prop_assert_eq!(t(&b.shift(c)), t(&b).shift(c));
        Ok(())
    })
}

fn unit_series_of(order: usize) -> impl Strategy<Value = TruncatedSeries> {
    series_of(order).prop_map(|s| {
        let mut c = s.into_coeffs();
        c[0] = BigInt::from(1);
        TruncatedSeries::from_coeffs(c)
    })
}

fn modulus() -> impl Strategy<Value = usize> {
    prop::sample::select(vec![2usize, 3, 5, 7, 10])
}

fn partition_of_unity(cases: u32) -> Result<u32, String> {
    drive(cases, (series(), modulus()), |(g, k)| {
        let mut total = TruncatedSeries::zero(g.order());
        for l in 0..k {
            total = &total + &h_kl(&g, k, l);
        }
        prop_assert_eq!(total, g);
        Ok(())
    })
}

fn projection_algebra(cases: u32) -> Result<u32, String> {
    let input = modulus().prop_flat_map(|k| (series(), Just(k), 0..k, 0..k));
    drive(cases, input, |(g, k, l, l2)| {
        let once = h_kl(&g, k, l);
        prop_assert_eq!(h_kl(&once, k, l), once.clone());
        if l != l2 {
            prop_assert!(h_kl(&once, k, l2).is_zero());
        }
        Ok(())
    })
}

fn sign() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Sign::Plus), Just(Sign::Minus)]
}

fn triple_product(cases: u32) -> Result<u32, String> {
    let input = (1u64..15, 1u64..15, sign(), sign(), 0usize..200);
    drive(cases, input, |(x, y, sa, sb, n)| {
        let sum = theta_f(x, y, sa, sb, n).unwrap();
        let prod = product(&triple_product_factors(x, y, sa, sb).unwrap(), n);
        prop_assert_eq!(sum, prod);
        Ok(())
    })
}

fn named() -> impl Strategy<Value = Named> {
    prop_oneof![
        Just(Named::Phi),
        Just(Named::Psi),
        Just(Named::R),
        Just(Named::Rinv),
        (1u64..12).prop_map(Named::E),
        (1u64..9, 1u64..9, sign(), sign()).prop_map(|(x, y, sa, sb)| Named::F { x, y, sa, sb }),
    ]
}

fn character() -> impl Strategy<Value = Character> {
    prop_oneof![Just(Character::Trivial), Just(Character::Alternating)]
}

fn nonzero_offset() -> impl Strategy<Value = i64> {
    (1i64..10, any::<bool>()).prop_map(|(j, neg)| if neg { -j } else { j })
}

/// Leaves that evaluate at every order.
fn leaf() -> impl Strategy<Value = ProductExpr> {
    prop_oneof![
        (0u64..20).prop_map(ProductExpr::Int),
        (1u64..8).prop_map(ProductExpr::QPower),
        (prop::collection::vec(nonzero_offset(), 1..4), 1u64..8)
            .prop_map(|(args, modulus)| ProductExpr::Pochhammer { args, modulus }),
        ((1u64..12), character()).prop_flat_map(|(quad, character)| {
            (-(quad as i64)..=quad as i64).prop_map(move |lin| ProductExpr::Theta {
                quad,
                lin,
                character,
            })
        }),
        named().prop_map(ProductExpr::Named),
    ]
}

/// Arbitrary trees, including ones whose evaluation may fail.
pub fn expr_tree() -> impl Strategy<Value = ProductExpr> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        use ProductExpr::*;
        prop_oneof![
            inner.clone().prop_map(|a| Neg(Box::new(a))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Mul(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Div(Box::new(a), Box::new(b))),
            (inner, -3i64..=3).prop_map(|(a, e)| Pow(Box::new(a), e)),
        ]
    })
}

fn parser_round_trip(cases: u32) -> Result<u32, String> {
    drive(cases, expr_tree(), |e| {
        let text = e.render();
        let back = parse(&text).map_err(|err| TestCaseError::fail(format!("`{text}`: {err}")))?;
        prop_assert_eq!(back.render(), text);
        prop_assert_eq!(back, e);
        Ok(())
    })
}

fn parser_totality(cases: u32) -> Result<u32, String> {
    let alphabet = prop::sample::select(
        "q^()-+*/,;[]0123456789 TAEfphisRnv\u{e9}\u{0}"
            .chars()
            .collect::<Vec<_>>(),
    );
    let noise = prop_oneof![
        prop::collection::vec(alphabet, 0..40).prop_map(|c| c.into_iter().collect::<String>()),
        prop::collection::vec(any::<u8>(), 0..40)
            .prop_map(|b| String::from_utf8_lossy(&b).into_owned()),
    ];
    drive(cases, noise, |text| {
        if let Err(e) = parse(&text) {
            prop_assert!(e.position() <= text.len());
        }
        Ok(())
    })
}

fn eval_homomorphism(cases: u32) -> Result<u32, String> {
    use ProductExpr::*;
    // Leaves with constant term ±1, so division and negative powers apply.
    let unit_leaf = prop_oneof![
        Just(Int(1)),
        (prop::collection::vec(nonzero_offset(), 1..3), 1u64..6)
            .prop_map(|(args, modulus)| Pochhammer { args, modulus }),
        (1u64..6).prop_map(|j| Named(qvanish::qexpr::Named::E(j))),
        Just(Named(qvanish::qexpr::Named::R)),
        (1u64..10, character()).prop_map(|(quad, character)| Theta {
            quad,
            lin: quad as i64 - 1,
            character
        }),
    ];
    let input = (unit_leaf.clone(), unit_leaf, leaf(), -3i64..=3, 0usize..40);
    drive(cases, input, |(x, y, z, e, n)| {
        let ev = |t: &ProductExpr| t.eval(n).unwrap();
        let b = |t: &ProductExpr| Box::new(t.clone());
        let (vx, vy) = (ev(&x), ev(&y));
        if let Ok(vz) = z.eval(n) {
            prop_assert_eq!(ev(&Add(b(&x), b(&z))), &vx + &vz);
            prop_assert_eq!(ev(&Sub(b(&z), b(&y))), &vz - &vy);
            prop_assert_eq!(ev(&Mul(b(&z), b(&x))), &vz * &vx);
        }
        prop_assert_eq!(ev(&Mul(b(&x), b(&y))), &vx * &vy);
        prop_assert_eq!(ev(&Div(b(&x), b(&y))), &vx * &vy.invert().unwrap());
        prop_assert_eq!(ev(&Pow(b(&x), e)), vx.pow(e).unwrap());
        prop_assert_eq!(ev(&Neg(b(&x))), -&vx);
        Ok(())
    })
}

/// Pairs related by a reflection or shift of one summation index, so a
/// certificate usually exists, mixed with unrelated pairs.
fn related_pair() -> impl Strategy<Value = (QuadExponent, QuadExponent, u64, usize, usize)> {
    let k = prop::sample::select(vec![2usize, 3, 5, 7]);
    k.prop_flat_map(|k| {
        let k64 = k as i64;
        (
            Just(k),
            1i64..4,
            -3 * k64..=3 * k64,
            1i64..4,
            -3 * k64..=3 * k64,
            -2i64..=2,
            -2i64..=2,
            any::<bool>(),
            any::<bool>(),
            0..k,
            prop::sample::select(vec![true, true, true, false]),
            (-3 * k64..=3 * k64, -3 * k64..=3 * k64),
        )
    })
    .prop_map(
        |(k, um, bm, un, bn, cm, cn, flip_m, swap, l, related, (other_bm, other_bn))| {
            let k64 = k as i64;
            let (am, an) = (um * k64, un * k64);
            // Clamp linear terms so every sum has a nonnegative exponent.
            let bm = bm.clamp(-am, am);
            let bn = bn.clamp(-an, an);
            let q1 = QuadExponent::new(am, bm, an, bn).unwrap();
            if !related {
                let q2 =
                    QuadExponent::new(am, other_bm.clamp(-am, am), an, other_bn.clamp(-an, an))
                        .unwrap();
                return (q1, q2, 0, k, l);
            }
            // m -> s·m + cm, n -> n + cn, optionally swapping the two indices.
            let s = if flip_m { -1 } else { 1 };
            let bm2 = s * (2 * am * cm + bm);
            let bn2 = 2 * an * cn + bn;
            let shift = am * cm * cm + bm * cm + an * cn * cn + bn * cn;
            let q2 = if swap && am == an {
                QuadExponent::new(an, bn2, am, bm2).unwrap()
            } else {
                QuadExponent::new(am, bm2, an, bn2).unwrap()
            };
            // S(q1) = q^shift S(q2); order the pair so the offset is >= 0.
            if shift >= 0 {
                (q1, q2, shift as u64, k, l)
            } else {
                (q2, q1, (-shift) as u64, k, l)
            }
        },
    )
}

pub static BRIDGE_FOUND: AtomicUsize = AtomicUsize::new(0);

fn certificate_bridge(cases: u32) -> Result<u32, String> {
    BRIDGE_FOUND.store(0, Ordering::SeqCst);
    let result = drive(cases, related_pair(), |(q1, q2, e, k, l)| {
        if q1.min_value() < 0 || q2.min_value() + (e as i64) < 0 {
            return Ok(());
        }
        if let Some(cert) = prove_pair(&q1, &q2, e, k, l, 3).unwrap() {
            BRIDGE_FOUND.fetch_add(1, Ordering::SeqCst);
            prop_assert!(verify_certificate(&cert).is_valid());
            let verdict = check_pair_numeric(&q1, &q2, e, k, l, 2000).unwrap();
            prop_assert!(
                verdict.vanishes,
                "certified pair fails numerically: {:?}",
                verdict
            );
        }
        Ok(())
    })?;
    let found = BRIDGE_FOUND.load(Ordering::SeqCst);
    if found * 4 < cases as usize {
        return Err(format!(
            "only {found} of {cases} cases produced a certificate"
        ));
    }
    Ok(result)
}
