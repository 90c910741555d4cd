use genclass::classpoly::{genclass, hilbert, norm_to_x, Algo};
use genclass::cmmethod::*;
use genclass::ellcurve::{Field, Fp};
use genclass::numerics::{APComplex, IntPolyUV};
use genclass::qexp::Basis;
use genclass::quadforms::Discriminant;
use genclass::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::Rational;
use std::sync::OnceLock;

fn psi() -> &'static ModularPolynomial {
    static PSI: OnceLock<ModularPolynomial> = OnceLock::new();
    PSI.get_or_init(|| compute_psi_incremental(DJ_X0PLUS119, 512).unwrap())
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

#[test]
fn spec_example_both_pipelines() {
    let spec = FrobeniusSpec::new(4, 17).unwrap();
    assert_eq!(spec.order(), 14);
    assert_eq!(spec.discriminant().unwrap().value(), -52);
    let a = cm_hilbert(&spec, &mut rng(0)).unwrap();
    assert_eq!(a.curve.count, 14);
    assert_eq!(a.curve.curve.point_count_naive(), 14);
    let b = cm_generalized(&spec, psi(), &mut rng(0)).unwrap();
    assert_eq!(b.curve.curve.point_count_naive(), 14);
    let v: serde_json::Value = serde_json::from_str(&b.curve.to_json()).unwrap();
    assert_eq!(v["q"], 17);
    assert_eq!(v["count"], 14);
}

#[test]
fn spec_validation() {
    assert!(FrobeniusSpec::new(2, 2).is_err());
    assert!(FrobeniusSpec::new(3, 15).is_err());
    assert!(FrobeniusSpec::new(9, 17).is_err());
    assert!(FrobeniusSpec::new(17, 17).is_err());
    assert!(FrobeniusSpec::new(0, 17).is_err());
}

#[test]
fn many_frobenius_traces() {
    let mut done = 0;
    for q in (101u64..1600).filter(|&q| is_prime(q)).step_by(5) {
        for t in [1i64, 3, -5] {
            let Ok(spec) = FrobeniusSpec::new(t, q) else { continue };
            let d = spec.discriminant().unwrap();
            let h = hilbert(d, None).unwrap();
            let hroots = fp_roots(&h, q, &mut rng(1));
            let a = cm_hilbert(&spec, &mut rng(2)).unwrap();
            assert_eq!(a.curve.curve.point_count_naive(), spec.order(), "hilbert t={t} q={q}");
            match cm_generalized(&spec, psi(), &mut rng(3)) {
                Ok(b) => {
                    assert_eq!(b.curve.curve.point_count_naive(), spec.order(), "generalized t={t} q={q}");
                    assert!(b.j_candidates.iter().all(|j| hroots.contains(j)), "t={t} q={q}");
                    done += 1;
                }
                // discriminants outside the admissible set for the curve
                Err(Error::NoValidB(_)) | Err(Error::Precondition(_)) => {}
                Err(e) => panic!("t={t} q={q}: {e}"),
            }
        }
    }
    assert!(done >= 15, "only {done} generalized runs");
}

#[test]
fn psi_shape() {
    let p = psi();
    assert_eq!(p.f.len(), DJ_X0PLUS119 + 1);
    assert_eq!(p.content(), 1);
    assert_eq!(ModularPolynomial::from_text(&p.to_text()).unwrap(), *p);
    assert!(ModularPolynomial::from_text("PSI curve=x0plus119 dj=2\nnonsense").is_err());
}

#[test]
fn psi_residuals_shrink_with_precision() {
    let p = psi();
    for (re, im) in [(0.013, 0.021), (-0.2, 0.05), (0.31, 0.008)] {
        for prec in [128u32, 256] {
            let tau = APComplex::from_f64(re, im, prec);
            let bits = p.residual_bits(&tau, prec).unwrap();
            assert!(bits > prec as f64 / 2.0, "τ = {re}+{im}i at {prec}: {bits}");
        }
    }
}

#[test]
fn psi_at_rational_cm_points() {
    // (1, -1) and (0, 1) are CM points of discriminant -19: Ψ = H_{-19}²
    let h19 = [Rational::from(782757789696i64), Rational::from(1769472), Rational::from(1)];
    for (x, y) in [(1, -1), (0, 1)] {
        let c = psi().specialize_rational(&Rational::from(x), &Rational::from(y));
        assert_eq!(c, h19);
        for q in [101u64, 1009] {
            let m = psi().specialize_mod(Fp::new(x as i128, q).v, Fp::new(y as i128, q).v, q);
            let want: Vec<u64> = h19.iter().map(|r| Fp::from_integer(r.numer(), q).v).collect();
            assert_eq!(m.c, want);
        }
    }
}

#[test]
fn specialization_at_d52_points_mod_p() {
    let g = genclass(Discriminant::new(-52).unwrap(), Basis::Standard, Algo::Lll).unwrap().function;
    let hx = norm_to_x(&g).unwrap().h_x;
    let hj = hilbert(Discriminant::new(-52).unwrap(), None).unwrap();
    let mut checked = 0;
    for q in (5u64..400).filter(|&q| is_prime(q)) {
        let jroots = fp_roots(&hj, q, &mut rng(4));
        for x0 in fp_roots(&hx, q, &mut rng(5)) {
            // the function y + 1 vanishes on the orbit, so y0 = -1
            let y0 = q - 1;
            let f = psi().specialize_mod(x0, y0, q);
            if f.is_zero() {
                continue;
            }
            for z in fp_roots_poly(&f, &mut rng(6)) {
                assert!(jroots.contains(&z), "q = {q}, x0 = {x0}, z = {z}");
                checked += 1;
            }
        }
    }
    assert!(checked > 20);
}

fn brute_roots(f: &IntPolyUV, p: u64) -> Vec<u64> {
    let fp = FpPoly::from_int(f, p);
    (0..p).filter(|&x| fp.eval(x) == 0).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn roots_match_brute_force(c in prop::collection::vec(-50i64..50, 1..9), pi in 0usize..8, seed in any::<u64>()) {
        let p = [5u64, 7, 11, 13, 101, 257, 1009, 2003][pi];
        let f = IntPolyUV::from_i64s(&c);
        let fp = FpPoly::from_int(&f, p);
        prop_assume!(!fp.is_zero());
        let r = fp_roots(&f, p, &mut rng(seed));
        prop_assert_eq!(&r, &brute_roots(&f, p));
        // number of distinct roots = degree of gcd(f, X^p - X)
        let mut xp = vec![0u64; p as usize + 1];
        xp[p as usize] = 1;
        xp[1] = p - 1;
        let g = fp.gcd(&FpPoly::new(xp, p));
        prop_assert_eq!(g.degree().unwrap_or(0), r.len());
    }

    #[test]
    fn fp_field_axioms(a in 0u64..1009, b in 1u64..1009) {
        let p = 1009;
        let (x, y) = (Fp::new(a as i128, p), Fp::new(b as i128, p));
        prop_assert!(x.mul(&y).mul(&y.inv().unwrap()).eq_f(&x));
        prop_assert!(x.add(&y).sub(&y).eq_f(&x));
    }
}
