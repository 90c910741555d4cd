use genclass::numerics::{eval_series, series_newton_root, APComplex, LaurentSeries};
use genclass::qexp::*;
use proptest::prelude::*;
use rug::{Float, Integer, Rational};

const EXACT: i64 = i64::MAX / 8;

fn r(n: i64) -> Rational {
    Rational::from(n)
}

/// `∏_{n≥1} (1 - qⁿ)^e` to `len` terms by repeated multiplication.
fn euler_power_oracle(e: usize, len: usize) -> Vec<i64> {
    let mut acc = vec![0i64; len];
    acc[0] = 1;
    for _ in 0..e {
        for n in 1..len {
            for k in (n..len).rev() {
                acc[k] -= acc[k - n];
            }
        }
    }
    acc
}

#[test]
fn monomial_shift_and_identity() {
    let f = LaurentSeries::from_i64s(1, -1, &[1, 1], EXACT);
    let g = LaurentSeries::monomial(1, 1);
    let p = f.mul(&g).unwrap();
    assert_eq!(p.val(), 0);
    assert_eq!(p.coeffs(), &[r(1), r(1)]);
    let one = LaurentSeries::constant(r(1), 1);
    assert_eq!(f.mul(&one).unwrap(), f);
}

#[test]
fn eta_series_matches_product() {
    let e = eta_series(30);
    assert_eq!(e.denom(), 24);
    assert_eq!(e.val(), 1);
    assert_eq!(e.leading().unwrap(), &r(1));
    let oracle = euler_power_oracle(1, 30);
    for (k, c) in oracle.iter().enumerate() {
        assert_eq!(e.coeff(1 + 24 * k as i64).unwrap(), *c);
    }
    // pentagonal pattern
    assert_eq!(&oracle[..13], &[1, -1, -1, 0, 0, 1, 0, 1, 0, 0, 0, 0, -1]);
}

#[test]
fn eta_squared_and_24th_power() {
    let e = eta_series(20);
    let sq = e.mul(&e).unwrap();
    let oracle = euler_power_oracle(2, 20);
    assert_eq!(&oracle[..4], &[1, -2, -1, 2]);
    for (k, c) in oracle.iter().enumerate() {
        assert_eq!(sq.coeff(2 + 24 * k as i64).unwrap(), *c);
    }
    let delta = e.pow(24).unwrap().rescale(24).unwrap();
    assert_eq!(delta.val(), 24);
    let want = [1, -24, 252, -1472, 4830];
    for (k, c) in want.iter().enumerate() {
        assert_eq!(delta.coeff(24 + 24 * k as i64).unwrap(), *c);
    }
}

#[test]
fn binomial_square_root() {
    // Y² - (1 + q), seed 1
    let poly = vec![LaurentSeries::from_i64s(1, 0, &[-1, -1], EXACT), LaurentSeries::zero(1, EXACT), LaurentSeries::constant(r(1), 1)];
    let seed = LaurentSeries::from_i64s(1, 0, &[1], 1);
    let s = series_newton_root(&poly, &seed, 12).unwrap();
    // binomial(1/2, k)
    let mut b = Rational::from(1);
    for k in 0..12i64 {
        assert_eq!(s.coeff(k).unwrap(), b, "term {k}");
        b *= Rational::from((1 - 2 * k, 2 * (k + 1)));
    }
}

#[test]
fn linear_newton_returns_target() {
    let f = LaurentSeries::from_i64s(1, -2, &[3, 0, 5, -7, 11], EXACT);
    let poly = vec![f.neg(), LaurentSeries::constant(r(1), 1)];
    let seed = LaurentSeries::from_i64s(1, -2, &[3], -1);
    let s = series_newton_root(&poly, &seed, 3).unwrap();
    assert_eq!(s, f.truncate(3));
}

#[test]
fn newton_x_series_starts_with_listed_terms() {
    let (x, y) = xy_series(40).unwrap();
    let xs: Vec<Rational> = (-2..8).map(|e| x.coeff(e).unwrap()).collect();
    assert_eq!(xs, [1, 1, 1, 1, 2, 2, 3, 3, 4, 5].map(r));
    let ys: Vec<Rational> = (-3..8).map(|e| y.coeff(e).unwrap()).collect();
    assert_eq!(ys, [1, 0, 0, 1, 2, 2, 4, 4, 7, 9, 12].map(r));
    // Weierstrass residual y² + 3xy - y - x³ + 3x² - x
    let three = r(3);
    let lhs = y.mul(&y).unwrap().add(&x.mul(&y).unwrap().scale(&three)).unwrap().sub(&y).unwrap();
    let rhs = x.pow(3).unwrap().sub(&x.mul(&x).unwrap().scale(&three)).unwrap().add(&x).unwrap();
    let res = lhs.sub(&rhs).unwrap();
    assert!(res.is_zero(), "{res:?}");
}

#[test]
fn w_series_is_the_eta_quotient() {
    let w = w717_series(200);
    assert_eq!(w.val(), -4);
    assert_eq!(w.leading().unwrap(), &r(1));
    let e = curve_expansions(300).unwrap();
    let x = e.x_series();
    let y = e.y_series();
    let w2 = x.mul(&x).unwrap().sub(&x).unwrap().sub(&y).unwrap();
    for k in -4..190 {
        assert_eq!(w.coeff(k).unwrap(), w2.coeff(k).unwrap(), "t^{k}");
    }
}

#[test]
fn series_evaluation() {
    let p = 128;
    let one = LaurentSeries::constant(r(1), 1);
    let (v, _) = eval_series(&one, &APComplex::i(p), p);
    assert!(v.approx_eq(&APComplex::one(p), 120));
    let q = LaurentSeries::monomial(1, 1);
    let (v, _) = eval_series(&q, &APComplex::i(p), p);
    assert!((v.re().to_f64() - 0.001_867_442_731_707_988_8).abs() < 1e-15);
    // η(i) from the truncated series
    let (v, tail) = eval_series(&eta_series(40), &APComplex::i(p), p);
    assert!((v.re().to_f64() - 0.768_225_422_326_056_6).abs() < 1e-15);
    assert!(tail < 1e-30);
}

#[test]
fn j_special_values() {
    let p = 200;
    let j = j_eval(&APComplex::i(p), p);
    assert!(j.approx_eq(&APComplex::from_i64(1728, p), 150));
    let rho = &(APComplex::one(p) + (APComplex::i(p) * APComplex::from_i64(3, p).sqrt())) * &APComplex::from_f64(0.5, 0.0, p);
    assert!(j_eval(&rho, p).abs() < Float::with_val(p, 1e-40));
}

#[test]
fn basis_values_are_consistent() {
    let p = 160;
    let tau = APComplex::from_f64(0.11, 0.37, p);
    let v = basis_eval(Basis::Standard, 6, &tau, p).unwrap();
    assert!(v[0].approx_eq(&APComplex::one(p), 150));
    assert!(v[4].approx_eq(&(&v[1] * &v[2]), 140));
    let e = basis_eval(Basis::EtaMixed, 4, &tau, p).unwrap();
    // etamixed b₃ = w = x² - x - y
    let w = &(&v[1].square() - &v[1]) - &v[2];
    assert!(e[3].approx_eq(&w, 140));
    assert!(e[3].approx_eq(&w_eta(&tau, p), 130));
}

fn fricke(tau: &APComplex) -> APComplex {
    (tau.recip()).mul_i64(-119)
}

#[test]
fn fricke_invariance() {
    let p = 160;
    for (re, im) in [(0.01, 0.05), (0.2, 0.09), (-0.3, 0.15), (0.07, 0.03), (0.4, 0.2)] {
        let tau = APComplex::from_f64(re, im, p);
        let a = curve_point(&tau, p).unwrap();
        let b = curve_point(&fricke(&tau), p).unwrap();
        assert!(a.x.approx_eq(&b.x, 120) && a.y.approx_eq(&b.y, 120), "x, y at {re}+{im}i");
        assert!(w_eta(&tau, p).approx_eq(&w_eta(&fricke(&tau), p), 120));
    }
}

#[test]
fn eta_transformation_laws() {
    let p = 160;
    for (re, im) in [(0.1, 0.9), (-0.4, 1.3), (0.25, 0.6), (0.0, 1.1), (0.45, 0.8)] {
        let z = APComplex::from_f64(re, im, p);
        // η(-1/z) = √(-iz) η(z)
        let lhs = eta(&(-z.recip()), p);
        let rhs = &(-(&APComplex::i(p) * &z)).sqrt() * &eta(&z, p);
        assert!(lhs.approx_eq(&rhs, p / 2));
        // η(z + 1) = e^{πi/12} η(z)
        let lhs = eta(&(&z + &APComplex::one(p)), p);
        let pi12 = Float::with_val(p, APComplex::pi(p) / 12u32);
        let phase = APComplex::from_floats(Float::new(p), pi12).exp();
        assert!(lhs.approx_eq(&(&phase * &eta(&z, p)), p / 2));
    }
}

fn arb_series() -> impl Strategy<Value = LaurentSeries> {
    (-3i64..3, prop::collection::vec(-20i64..20, 1..8), 6i64..14).prop_map(|(v, c, t)| LaurentSeries::from_i64s(1, v, &c, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distributive_law(f in arb_series(), g in arb_series(), h in arb_series()) {
        let lhs = f.add(&g).unwrap().mul(&h).unwrap();
        let rhs = f.mul(&h).unwrap().add(&g.mul(&h).unwrap()).unwrap();
        let t = lhs.trunc().min(rhs.trunc());
        prop_assert_eq!(lhs.truncate(t), rhs.truncate(t));
    }

    #[test]
    fn exact_coefficients_are_integral(k in 1usize..40) {
        let e = curve_expansions(64).unwrap();
        prop_assert!(e.x_series().coeff(k as i64).unwrap().denom() == &Integer::from(1));
    }
}
