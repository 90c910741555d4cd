use genclass::ellcurve::*;
use genclass::lattice::*;
use genclass::numerics::APComplex;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::{Integer, Rational};

fn delta() -> Rational {
    Rational::from((99, 100))
}

fn norm2(v: &[Integer]) -> Integer {
    dot(v, v)
}

/// `x` with `x·B = target` for square nonsingular `B`, by Gaussian elimination over ℚ.
fn solve_left(b: &[Vec<Integer>], target: &[Integer]) -> Vec<Rational> {
    let n = b.len();
    // augmented system Bᵀ x = target
    let mut m: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rational> = (0..n).map(|j| Rational::from(&b[j][i])).collect();
            row.push(Rational::from(&target[i]));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| m[r][c] != 0).expect("singular");
        m.swap(c, p);
        for r in 0..n {
            if r != c && m[r][c] != 0 {
                let f = Rational::from(&m[r][c] / &m[c][c]);
                let pivot = m[c].clone();
                for (x, y) in m[r][c..].iter_mut().zip(&pivot[c..]) {
                    *x -= Rational::from(&f * y);
                }
            }
        }
    }
    (0..n).map(|i| Rational::from(&m[i][n] / &m[i][i])).collect()
}

fn same_lattice(a: &[Vec<Integer>], b: &[Vec<Integer>]) -> bool {
    let integral = |x: &[Vec<Integer>], y: &[Vec<Integer>]| {
        y.iter().all(|row| solve_left(x, row).iter().all(|c| *c.denom() == 1))
    };
    integral(a, b) && integral(b, a)
}

/// Shortest nonzero squared length among combinations with coefficients in `[-k, k]`.
fn brute_shortest(b: &[Vec<Integer>], k: i64) -> Integer {
    let n = b.len();
    let mut best: Option<Integer> = None;
    let mut c = vec![-k; n];
    loop {
        if c.iter().any(|&x| x != 0) {
            let v: Vec<Integer> = (0..b[0].len()).map(|j| (0..n).map(|i| Integer::from(c[i]) * &b[i][j]).sum()).collect();
            let l = norm2(&v);
            if best.as_ref().is_none_or(|x| l < *x) {
                best = Some(l);
            }
        }
        let mut i = 0;
        while i < n && c[i] == k {
            c[i] = -k;
            i += 1;
        }
        if i == n {
            break;
        }
        c[i] += 1;
    }
    best.unwrap()
}

#[test]
fn lll_small_example() {
    let lat = IntLattice::from_i64s(&[vec![2, 0], vec![1, 2]]).unwrap();
    let red = lll_reduce(&lat, &delta()).unwrap();
    let lens: Vec<Integer> = red.rows.iter().map(|r| norm2(r)).collect();
    assert_eq!(lens[0], 4);
    assert!(lens[1] <= 5);
    assert!(same_lattice(&lat.rows, &red.rows));
}

#[test]
fn lll_recovers_scrambled_basis() {
    // rows of the identity scrambled by a unimodular matrix
    let u = IntLattice::from_i64s(&[vec![1, 7, 3], vec![0, 1, 5], vec![0, 0, 1]]).unwrap();
    let w = IntLattice::from_i64s(&[vec![1, 0, 0], vec![4, 1, 0], vec![9, -2, 1]]).unwrap();
    let prod: Vec<Vec<Integer>> = (0..3)
        .map(|i| (0..3).map(|j| (0..3).map(|k| Integer::from(&u.rows[i][k] * &w.rows[k][j])).sum()).collect())
        .collect();
    let red = lll_reduce(&IntLattice::new(prod).unwrap(), &delta()).unwrap();
    for r in &red.rows {
        assert_eq!(norm2(r), 1, "{red:?}");
    }
}

#[test]
fn golden_ratio_relation() {
    let p = 200;
    let five = APComplex::from_i64(5, p).sqrt();
    let phi = (&APComplex::one(p) + &five).mul_pow2(-1);
    let row = vec![APComplex::one(p), phi.clone(), phi.square()];
    let mut rel = integer_relation(&[row], p, &Integer::from(1000)).unwrap();
    normalize_sign(&mut rel.coeffs);
    let want: Vec<Integer> = [1, 1, -1].map(Integer::from).to_vec();
    let neg: Vec<Integer> = want.iter().map(|c| Integer::from(-c)).collect();
    assert!(rel.coeffs == want || rel.coeffs == neg, "{:?}", rel.coeffs);
}

#[test]
fn relation_rejects_independent_values() {
    let p = 200;
    let pi = APComplex::from_floats(APComplex::pi(p), rug::Float::new(p));
    let e = APComplex::one(p).exp();
    let row = vec![APComplex::one(p), pi, e];
    assert!(integer_relation(&[row], p, &Integer::from(1000)).is_err());
}

#[test]
fn torsion_structure_of_x0plus119() {
    let e = x0plus119();
    let t = x0plus119_torsion();
    let p = &t[1];
    assert!(e.mul(p, &Integer::from(4)).is_infinity());
    assert!(!e.mul(p, &Integer::from(2)).is_infinity());
    assert_eq!(e.torsion_order(p, 16), Some(4));
    assert!(e.add(p, p).eq_f(&t[2]));
    assert!(e.neg(p).eq_f(&t[3]));
}

#[test]
fn rank_one_point_has_infinite_order() {
    let e = WeierstrassModel::from_ints(&Rational::new(), [0, 0, 0, 0, -2]);
    let p = Point::Affine(Rational::from(3), Rational::from(5));
    assert!(e.contains(&p));
    assert_eq!(e.torsion_order(&p, 16), None);
}

#[test]
fn complex_law_matches_exact_law() {
    let p = 128;
    let e = WeierstrassModel::from_ints(&Rational::new(), [0, 0, 0, 0, -2]);
    let ec = WeierstrassModel::from_ints(&APComplex::zero(p), [0, 0, 0, 0, -2]);
    let to_c = |pt: &Point<Rational>| match pt {
        Point::Affine(x, y) => Point::Affine(APComplex::from_rational(x, p), APComplex::from_rational(y, p)),
        Point::Infinity => Point::Infinity,
    };
    let a = Point::Affine(Rational::from(3), Rational::from(5));
    let mut exact = a.clone();
    let mut approx = to_c(&a);
    for _ in 0..4 {
        exact = e.add(&exact, &a);
        approx = ec.add(&approx, &to_c(&a));
        match (to_c(&exact), &approx) {
            (Point::Affine(x, y), Point::Affine(u, v)) => {
                assert!(x.approx_eq(u, 90) && y.approx_eq(v, 90));
            }
            _ => panic!("unexpected point at infinity"),
        }
    }
}

#[test]
fn small_point_counts() {
    let f5 = Fp::new(0, 5);
    let e = WeierstrassModel::short(Fp::new(1, 5), f5);
    assert_eq!(e.point_count_naive(), 4);
    // x0plus119 reduces with good reduction at 5
    let e = WeierstrassModel::from_ints(&f5, [3, -3, -1, 1, 0]);
    assert_eq!(e.point_count_naive() % 4, 0);
}

fn brute_count(e: &WeierstrassModel<Fp>) -> u64 {
    let p = e.prime();
    let mut n = 1;
    for x in 0..p {
        for y in 0..p {
            if e.contains(&Point::Affine(Fp::new(x as i128, p), Fp::new(y as i128, p))) {
                n += 1;
            }
        }
    }
    n
}

fn nonsingular(e: &WeierstrassModel<Fp>) -> bool {
    !Field::is_zero(&e.discriminant())
}

const PRIMES: [u64; 10] = [5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lll_basis_is_short_and_equivalent(n in 2usize..5, entries in prop::collection::vec(-12i64..12, 16)) {
        // diagonally dominant, hence nonsingular
        let rows: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| entries[i * 4 + j] + if i == j { 40 } else { 0 }).collect()).collect();
        let lat = IntLattice::from_i64s(&rows).unwrap();
        let red = lll_reduce(&lat, &delta()).unwrap();
        prop_assert!(same_lattice(&lat.rows, &red.rows));
        let l1 = norm2(&red.rows[0]);
        let best = brute_shortest(&lat.rows, 2).min(brute_shortest(&red.rows, 2));
        prop_assert!(l1 <= best * (1u32 << (n - 1)));
    }

    #[test]
    fn group_law_is_associative(pi in 0usize..10, a in 0i64..40, b in 0i64..40, seed in any::<u64>()) {
        let p = PRIMES[pi];
        let e = WeierstrassModel::from_ints(&Fp::new(0, p), [1, 0, 1, a, b]);
        prop_assume!(nonsingular(&e));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y, z) = (e.random_point(&mut rng), e.random_point(&mut rng), e.random_point(&mut rng));
        prop_assert!(e.contains(&x));
        let l = e.add(&e.add(&x, &y), &z);
        let r = e.add(&x, &e.add(&y, &z));
        prop_assert!(l.eq_f(&r));
        prop_assert!(e.add(&x, &e.neg(&x)).is_infinity());
        let n = e.point_count_naive();
        prop_assert!(e.mul(&x, &Integer::from(n)).is_infinity());
    }

    #[test]
    fn counts_match_enumeration_and_hasse(pi in 0usize..10, a in prop::array::uniform5(0i64..40)) {
        let p = PRIMES[pi];
        let e = WeierstrassModel::from_ints(&Fp::new(0, p), a);
        prop_assume!(nonsingular(&e));
        let n = e.point_count_naive();
        prop_assert_eq!(n, brute_count(&e));
        let t = p as i64 + 1 - n as i64;
        prop_assert!(t * t <= 4 * p as i64);
    }

    #[test]
    fn twists_have_complementary_traces(pi in 0usize..10, jv in 0u64..40) {
        let p = PRIMES[pi];
        let j = Fp::new(jv as i128, p);
        prop_assume!(j.v != 0 && j.v != 1728 % p);
        let cs = curves_with_j(&j).unwrap();
        prop_assert_eq!(cs.len(), 2);
        for c in &cs {
            prop_assert!(c.j_invariant().unwrap().eq_f(&j));
        }
        prop_assert_eq!(cs[0].point_count_naive() + cs[1].point_count_naive(), 2 * p + 2);
    }
}
