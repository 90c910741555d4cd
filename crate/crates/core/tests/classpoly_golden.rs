use genclass::classpoly::*;
use genclass::ellcurve::{x0plus119_torsion, Point};
use genclass::lattice::integer_relation;
use genclass::nsystem::AbcMode;
use genclass::numerics::{APComplex, IntPolyUV, IntPolyXY};
use genclass::qexp::Basis;
use genclass::quadforms::Discriminant;
use genclass::Error;
use rug::{Integer, Rational};

mod common;
use common::*;

fn disc(d: i64) -> Discriminant {
    Discriminant::new(d).unwrap()
}

#[test]
fn standard_basis_table() {
    for (d, s) in TABLE_XY {
        let o = genclass(disc(d), Basis::Standard, Algo::Lll).unwrap();
        assert!(same_up_to_sign(&standard_terms(&o.function.f), &parse_terms(s, &['x', 'y'])), "D = {d}: {}", o.function.pretty());
    }
}

#[test]
fn etamixed_basis_table() {
    for (d, s) in TABLE_XZW {
        let o = genclass(disc(d), Basis::EtaMixed, Algo::Lll).unwrap();
        assert!(same_up_to_sign(&etamixed_terms(&o.function), &parse_terms(s, &['x', 'z', 'w'])), "D = {d}: {}", o.function.pretty());
    }
}

#[test]
fn bases_describe_the_same_function() {
    for d in [-523, -5347] {
        let s = genclass(disc(d), Basis::Standard, Algo::Lll).unwrap().function;
        let e = genclass(disc(d), Basis::EtaMixed, Algo::Lll).unwrap().function;
        let conv = s.in_basis(Basis::EtaMixed).unwrap();
        assert!(conv.coeffs == e.coeffs || conv.coeffs.iter().zip(&e.coeffs).all(|(a, b)| *a == Integer::from(-b)));
    }
}

#[test]
fn tree_agrees_with_lll() {
    for d in [-52, -523, -5347] {
        let o = genclass(disc(d), Basis::Standard, Algo::Both).unwrap();
        assert_eq!(o.agree, Some(true), "D = {d}");
    }
    let orb = orbit(disc(-52), AbcMode::Plus, 128).unwrap();
    let t = genclass_tree(&orb).unwrap();
    assert_eq!(t.pretty(), "y + 1");
}

#[test]
fn hilbert_polynomials() {
    assert_eq!(hilbert(disc(-3), None).unwrap(), IntPolyUV::from_i64s(&[0, 1]));
    assert_eq!(hilbert(disc(-4), None).unwrap(), IntPolyUV::from_i64s(&[-1728, 1]));
    assert_eq!(hilbert(disc(-7), None).unwrap(), IntPolyUV::from_i64s(&[3375, 1]));
    assert_eq!(hilbert(disc(-19), None).unwrap(), IntPolyUV::from_i64s(&[884736, 1]));
    // H_{-20} = X² - 1264000X - 681472000
    assert_eq!(hilbert(disc(-20), None).unwrap(), IntPolyUV::from_i64s(&[-681472000, -1264000, 1]));
    let h = hilbert(disc(-523), None).unwrap();
    assert_eq!(h.degree(), Some(5));
}

#[test]
fn orbit_dedupe_halves_when_norm_ideal_is_principal_in_subgroup() {
    let o = orbit(disc(-595), AbcMode::Plus, 128).unwrap();
    assert_eq!(o.members.len(), 4);
    assert_eq!(o.deduped_size(), 2);
    assert_eq!(o.subfield_degree, 2);
    let o = orbit(disc(-52), AbcMode::Plus, 128).unwrap();
    assert_eq!(o.deduped_size(), 2);
    assert_eq!(o.subfield_degree, 1);
}

#[test]
fn norm_to_x_matches_relation_oracle() {
    let g = genclass(disc(-52), Basis::Standard, Algo::Lll).unwrap().function;
    let n = norm_to_x(&g).unwrap();
    // minimal polynomial of the x-coordinates found directly from numerics
    let p = 160;
    let orb = orbit(disc(-52), AbcMode::Plus, p).unwrap();
    let rows: Vec<Vec<APComplex>> = orb.points().map(|(x, _)| vec![APComplex::one(p), x.clone(), x.square()]).collect();
    let rel = integer_relation(&rows, p, &Integer::from(1 << 20)).unwrap();
    let mut oracle = IntPolyUV::new(rel.coeffs);
    if oracle.lead().is_some_and(|l| *l < 0) {
        oracle = oracle.neg();
    }
    assert_eq!(n.h_x, oracle);
    assert_eq!(n.h_x, IntPolyUV::from_i64s(&[2, -2, 1]));
    // the Heegner factor is X - 4 (the point (1, -1))
    assert_eq!(n.t, IntPolyUV::from_i64s(&[-4, 1]));
}

#[test]
fn norm_identity_holds_for_table_functions() {
    for d in [-523, -5347] {
        let g = genclass(disc(d), Basis::Standard, Algo::Lll).unwrap().function;
        let n = norm_to_x(&g).unwrap();
        let mut rhs = n.h_big_x.pow(n.d_prime).mul(&n.t);
        if n.sign < 0 {
            rhs = rhs.neg();
        }
        assert_eq!(n.norm, rhs, "D = {d}");
        assert_eq!(n.h_x.degree(), Some(g.orbit_size));
    }
}

#[test]
fn norm_rejects_non_class_function() {
    let mut g = genclass(disc(-52), Basis::Standard, Algo::Lll).unwrap().function;
    g.f = IntPolyXY::from_monomials(&[(Integer::from(1), 0, 1), (Integer::from(2), 0, 0)]).unwrap();
    assert!(matches!(norm_to_x(&g), Err(Error::Divisibility(_))));
}

#[test]
fn heegner_points_are_rational_torsion() {
    let t = x0plus119_torsion();
    for d in [-52, -523, -5347] {
        let g = genclass(disc(d), Basis::Standard, Algo::Lll).unwrap().function;
        assert!(t.iter().any(|p| p.eq_f(&g.heegner)), "D = {d}");
    }
    let g = genclass(disc(-52), Basis::Standard, Algo::Lll).unwrap().function;
    assert_eq!(g.heegner, Point::Affine(Rational::from(1), Rational::from(-1)));
}

#[test]
fn height_examples() {
    let r = heights(&IntPolyUV::from_i64s(&[5, -4, 3]));
    assert_eq!(r.norm1, 12);
    assert_eq!(r.norm_inf, 5);
    assert!((r.mahler.to_f64() - 5.0).abs() < 1e-12);
    assert_eq!(r.measure_inequalities(), [true; 4]);
    // M(x - 2) = 2, M(2x - 1) = 2
    assert!((heights(&IntPolyUV::from_i64s(&[-2, 1])).mahler.to_f64() - 2.0).abs() < 1e-12);
    assert!((heights(&IntPolyUV::from_i64s(&[-1, 2])).mahler.to_f64() - 2.0).abs() < 1e-12);
}

#[test]
fn text_round_trips() {
    for basis in [Basis::Standard, Basis::EtaMixed] {
        let g = genclass(disc(-5347), basis, Algo::Lll).unwrap().function;
        let back = GenClassFunction::from_text(&g.to_text()).unwrap();
        assert_eq!(back.f, g.f);
        assert_eq!(back.coeffs, g.coeffs);
        assert_eq!(back.heegner, g.heegner);
        assert_eq!(back.to_text(), g.to_text());
    }
    assert!(GenClassFunction::from_text("garbage").is_err());
}

#[test]
fn reduction_factors() {
    assert_eq!(r_curve(119, true).unwrap(), 72);
    assert_eq!(r_curve(119, false).unwrap(), 144);
    let h = hilbert(disc(-5347), None).unwrap();
    let g = genclass(disc(-5347), Basis::Standard, Algo::Lll).unwrap().function;
    let r = r_practical(&h, &g).unwrap();
    assert!(r > 20.0 && r < 200.0, "{r}");
}
