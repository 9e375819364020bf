//! Library results checked against independent, deliberately naive
//! computations.

use num_bigint::BigInt;
use qvanish::dissection::{
    check_pair_numeric, lattice_sum, parametrize_congruence, prove_pair, QuadExponent,
};
use qvanish::qexpr::parse;
use qvanish::theta::{phi, product, psi, NamedProduct, PochhammerFactor, Sign};
use qvanish::vanish::{FamilyKind, FamilySpec};
use qvanish::TruncatedSeries;

/// Polynomial product of `(1 + x q^d)` factors with plain `i128` schoolbook
/// convolution; negative powers via the geometric series.
fn naive_product(factors: &[PochhammerFactor], order: usize) -> Vec<i128> {
    let mut acc = vec![0i128; order + 1];
    acc[0] = 1;
    for f in factors {
        let x: i128 = if f.sign() == Sign::Plus { -1 } else { 1 };
        let mut d = f.offset() as usize;
        while d <= order {
            let mut poly = vec![0i128; order + 1];
            if f.power() > 0 {
                poly[0] = 1;
                poly[d] += x;
            } else {
                // 1 / (1 + x q^d) = Σ (-x)^i q^{di}
                let mut c = 1i128;
                for i in (0..=order).step_by(d) {
                    poly[i] = c;
                    c *= -x;
                }
            }
            for _ in 0..f.power().unsigned_abs() {
                let mut next = vec![0i128; order + 1];
                for (i, &a) in acc.iter().enumerate().filter(|(_, a)| **a != 0) {
                    for (j, &b) in poly[..=order - i].iter().enumerate() {
                        next[i + j] += a * b;
                    }
                }
                acc = next;
            }
            d += f.modulus() as usize;
        }
    }
    acc
}

fn as_i128(s: &TruncatedSeries) -> Vec<i128> {
    s.coeffs()
        .iter()
        .map(|c| i128::try_from(c).expect("fits"))
        .collect()
}

fn partitions(n: usize, largest: usize) -> u64 {
    if n == 0 {
        return 1;
    }
    (1..=largest.min(n)).map(|k| partitions(n - k, k)).sum()
}

#[test]
fn inverse_euler_product_counts_partitions() {
    let e1 = parse("E1").unwrap().eval(12).unwrap();
    let p: Vec<u64> = (0..=12).map(|n| partitions(n, n)).collect();
    assert_eq!(p, [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77]);
    let inv = e1.invert().unwrap();
    let got: Vec<u64> = inv
        .coeffs()
        .iter()
        .map(|c| u64::try_from(c).unwrap())
        .collect();
    assert_eq!(got, p);
}

#[test]
fn euler_product_matches_pentagonal_numbers() {
    let n = 300;
    let mut expected = vec![0i128; n + 1];
    for k in -20i64..=20 {
        let e = (k * (3 * k - 1) / 2) as usize;
        if e <= n {
            expected[e] += if k % 2 == 0 { 1 } else { -1 };
        }
    }
    assert_eq!(as_i128(&parse("E1").unwrap().eval(n).unwrap()), expected);
}

#[test]
fn named_products_match_naive_expansion() {
    for p in NamedProduct::ALL {
        assert_eq!(
            as_i128(&p.build(150)),
            naive_product(&p.factors(), 150),
            "{}",
            p.name()
        );
    }
    let a1 = as_i128(&NamedProduct::A1.build(3));
    assert_eq!(a1, [1, 2, 1, 0]);
}

#[test]
fn families_match_naive_expansion() {
    for (kind, r, s, t) in [
        (FamilyKind::A, 1, 1, 7),
        (FamilyKind::B, 3, 3, 11),
        (FamilyKind::B, 2, 9, 5),
    ] {
        let spec = FamilySpec::new(kind, r, s, t).unwrap();
        assert_eq!(
            as_i128(&spec.build(120)),
            naive_product(&spec.factors(), 120),
            "{spec}"
        );
    }
}

#[test]
fn quotient_matches_naive_expansion() {
    let rr = parse("R").unwrap().eval(100).unwrap();
    let factors = [(1, 1), (4, 1), (2, -1), (3, -1)]
        .map(|(j, p)| PochhammerFactor::new(Sign::Plus, j, 5, p).unwrap());
    assert_eq!(as_i128(&rr), naive_product(&factors, 100));
    assert_eq!(product(&factors, 100), rr);
}

#[test]
fn theta_functions_match_defining_sums() {
    let n = 400;
    let mut squares = vec![0i128; n + 1];
    let mut triangles = vec![0i128; n + 1];
    for k in -30i64..=30 {
        if (k * k) as usize <= n {
            squares[(k * k) as usize] += 1;
        }
    }
    for k in 0..30usize {
        if k * (k + 1) / 2 <= n {
            triangles[k * (k + 1) / 2] += 1;
        }
    }
    assert_eq!(as_i128(&phi(n)), squares);
    assert_eq!(as_i128(&psi(n)), triangles);
    assert_eq!(as_i128(&phi(4)), [1, 2, 0, 0, 2]);
}

fn s_forms() -> Vec<QuadExponent> {
    [
        (2, 6),
        (18, 6),
        (2, 14),
        (18, 14),
        (2, 4),
        (18, 4),
        (2, 16),
        (18, 16),
    ]
    .map(|(bm, bn)| QuadExponent::new(20, bm, 20, bn).unwrap())
    .to_vec()
}

#[test]
fn lattice_sums_equal_products_of_theta_series() {
    for q in s_forms() {
        let route = parse(&format!("T[{},{}]*T[{},{}]", q.am, q.bm, q.an, q.bn))
            .unwrap()
            .eval(500)
            .unwrap();
        assert_eq!(lattice_sum(&q, 0, 500).unwrap(), route, "{q}");
        assert_eq!(lattice_sum(&q, 4, 500).unwrap(), route.shift(4));
    }
}

#[test]
fn basic_pair_fails_off_its_residue() {
    let s = s_forms();
    let verdict = check_pair_numeric(&s[0], &s[1], 4, 5, 0, 2000).unwrap();
    // Direct expansion: S1 - q^4 S2 restricted to multiples of 5.
    let diff = &lattice_sum(&s[0], 0, 2000).unwrap() - &lattice_sum(&s[1], 4, 2000).unwrap();
    let first = (0..=2000)
        .step_by(5)
        .find(|&n| diff.coeffs()[n] != BigInt::from(0));
    assert_eq!(first, Some(0));
    assert_eq!(verdict.first_violation, first);
    assert!(!verdict.vanishes);
    assert_eq!(prove_pair(&s[0], &s[1], 4, 5, 0, 3).unwrap(), None);
}

#[test]
fn parametrization_covers_exactly_the_residue_class() {
    for (q, l) in s_forms()
        .into_iter()
        .flat_map(|q| (0..5).map(move |l| (q, l)))
    {
        let sigma = parametrize_congruence(&q, 5, l).unwrap();
        let mut image = std::collections::HashSet::new();
        for r in -12..=12 {
            for s in -12..=12 {
                let (m, n) = sigma.apply(r, s);
                assert_eq!(q.eval(m, n).rem_euclid(5), l as i64);
                image.insert((m, n));
            }
        }
        // Every small solution is hit, so the map is onto near the origin.
        for m in -4i64..=4 {
            for n in -4i64..=4 {
                if q.eval(m, n).rem_euclid(5) == l as i64 {
                    assert!(image.contains(&(m, n)), "{q} l={l} misses ({m},{n})");
                }
            }
        }
    }
}
