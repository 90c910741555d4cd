//! Hilbert class polynomials and generalized class functions on `X0+(119)`.

use crate::ellcurve::{x0plus119, x0plus119_torsion, Field, Point, WeierstrassModel};
use crate::error::{Error, Result};
use crate::lattice::{integer_relation, primitive};
use crate::nsystem::{build_nsystem, find_abc, is_real_case, AbcMode, CMParams};
use crate::numerics::{mahler_measure, APComplex, CPoly, IntPolyUV, IntPolyXY};
use crate::qexp::{basis_values_at, curve_point, j_eval, pole_order_of_index, Basis, LEVEL};
use crate::quadforms::{class_number, enumerate_reduced, s_sum, Discriminant, QuadForm};
use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use std::fmt::Write as _;

pub const CURVE_ID: &str = "x0plus119";
/// Reduction factor of `X0+(119)`.
pub const R_PLUS_119: u32 = 72;
/// Maximum number of precision doublings before giving up.
pub const MAX_DOUBLINGS: u32 = 4;

/// `N·Π(1 + 1/p)`, halved for the Fricke quotient.
pub fn r_curve(n: u64, plus: bool) -> Result<Rational> {
    if n == 0 {
        return Err(Error::Precondition("N must be positive".into()));
    }
    let mut r = Rational::from(n);
    for (p, _) in crate::arith::factor(n) {
        r *= Rational::from((p + 1, p));
    }
    if plus {
        r /= 2;
    }
    Ok(r)
}

/// Initial precision override from `GENCLASS_PREC`.
pub fn prec_override() -> Option<u32> {
    std::env::var("GENCLASS_PREC").ok()?.trim().parse().ok().filter(|&p| p >= 32)
}

fn height_bits(d: Discriminant) -> f64 {
    let s = s_sum(d).to_f64();
    1.4 * std::f64::consts::PI * (d.abs() as f64).sqrt() * s / std::f64::consts::LN_2
}

/// Working precision for the Hilbert class polynomial.
pub fn hilbert_prec(d: Discriminant) -> u32 {
    height_bits(d).ceil() as u32 + 64
}

/// Working precision for generalized class functions (Hilbert height over `r(C)`).
pub fn genclass_prec(d: Discriminant) -> u32 {
    ((height_bits(d) / R_PLUS_119 as f64).ceil() as u32 + 64).max(256)
}

/// `H_D[j]`, by a product tree over `X - j(τ_Q)` for the reduced forms `Q`.
pub fn hilbert(d: Discriminant, prec_hint: Option<u32>) -> Result<IntPolyUV> {
    let forms = enumerate_reduced(d);
    let mut prec = prec_hint.or_else(prec_override).unwrap_or_else(|| hilbert_prec(d));
    for _ in 0..=MAX_DOUBLINGS {
        let wp = prec + 32;
        let js: Vec<APComplex> = forms.par_iter().map(|f| j_eval(&f.tau(wp), wp)).collect();
        if let Some(p) = CPoly::from_roots(&js).round_to_int(0.25) {
            return Ok(p);
        }
        prec *= 2;
    }
    Err(Error::PrecisionBlowup(format!("Hilbert class polynomial of D = {d} did not round")))
}

/// A CM point of the orbit.
#[derive(Clone, Debug)]
pub struct OrbitMember {
    pub form: QuadForm,
    pub x: APComplex,
    pub y: APComplex,
}

/// Galois orbit of `ψ(τ)` on the curve.
#[derive(Clone, Debug)]
pub struct OrbitData {
    pub params: CMParams,
    pub members: Vec<OrbitMember>,
    /// Indices into `members` of pairwise distinct points.
    pub distinct: Vec<usize>,
    pub subfield_degree: usize,
    pub real_flag: bool,
    pub prec: u32,
}

impl OrbitData {
    pub fn deduped_size(&self) -> usize {
        self.distinct.len()
    }

    pub fn points(&self) -> impl Iterator<Item = (&APComplex, &APComplex)> {
        self.distinct.iter().map(|&i| (&self.members[i].x, &self.members[i].y))
    }
}

/// Evaluate the curve coordinates on the N-system of `D` (level 119, Fricke-compatible forms).
pub fn orbit(d: Discriminant, mode: AbcMode, prec: u32) -> Result<OrbitData> {
    let params = find_abc(d, LEVEL as u64, mode)?;
    let forms = build_nsystem(&params)?;
    let members = forms
        .par_iter()
        .map(|f| {
            let v = curve_point(&f.tau(prec + 32), prec)?;
            Ok(OrbitMember { form: *f, x: v.x, y: v.y })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut distinct: Vec<usize> = Vec::new();
    for (i, m) in members.iter().enumerate() {
        let dup = distinct.iter().any(|&j| members[j].x.approx_eq(&m.x, prec / 2) && members[j].y.approx_eq(&m.y, prec / 2));
        if !dup {
            distinct.push(i);
        }
    }
    let h = members.len();
    let subfield_degree = if h % distinct.len() == 0 { h / distinct.len() } else { 1 };
    let real_flag = is_real_case(&params, mode == AbcMode::Plus);
    Ok(OrbitData { params, members, distinct, subfield_degree, real_flag, prec })
}

// --- arithmetic in ℤ[x, y]/(y² + 3xy - y - x³ + 3x² - x) ---------------------

fn curve_f() -> IntPolyUV {
    // y² = f(x) + g(x)·y
    IntPolyUV::from_i64s(&[0, 1, -3, 1])
}

fn curve_g() -> IntPolyUV {
    IntPolyUV::from_i64s(&[1, -3])
}

pub fn xy_add(p: &IntPolyXY, q: &IntPolyXY) -> IntPolyXY {
    IntPolyXY::new(p.a.add(&q.a), p.b.add(&q.b))
}

pub fn xy_sub(p: &IntPolyXY, q: &IntPolyXY) -> IntPolyXY {
    IntPolyXY::new(p.a.sub(&q.a), p.b.sub(&q.b))
}

pub fn xy_scale(p: &IntPolyXY, k: &Integer) -> IntPolyXY {
    IntPolyXY::new(p.a.scale(k), p.b.scale(k))
}

/// Product in the coordinate ring of the curve.
pub fn xy_mul(p: &IntPolyXY, q: &IntPolyXY) -> IntPolyXY {
    let bb = p.b.mul(&q.b);
    let a = p.a.mul(&q.a).add(&bb.mul(&curve_f()));
    let b = p.a.mul(&q.b).add(&p.b.mul(&q.a)).add(&bb.mul(&curve_g()));
    IntPolyXY::new(a, b)
}

fn xy_x() -> IntPolyXY {
    IntPolyXY::new(IntPolyUV::from_i64s(&[0, 1]), IntPolyUV::zero())
}

fn xy_one() -> IntPolyXY {
    IntPolyXY::new(IntPolyUV::one(), IntPolyUV::zero())
}

/// The `i`-th basis function as `A(x) + B(x)·y`.
pub fn basis_element(basis: Basis, i: usize) -> IntPolyXY {
    let m = basis.monomial(i);
    let second = match basis {
        Basis::Standard => IntPolyXY::new(IntPolyUV::zero(), IntPolyUV::one()),
        // z = x + y
        Basis::EtaMixed => IntPolyXY::new(IntPolyUV::from_i64s(&[0, 1]), IntPolyUV::one()),
    };
    // w = x² - x - y
    let w = IntPolyXY::new(IntPolyUV::from_i64s(&[0, -1, 1]), IntPolyUV::from_i64s(&[-1]));
    let mut r = xy_one();
    for _ in 0..m.w {
        r = xy_mul(&r, &w);
    }
    for _ in 0..m.x {
        r = xy_mul(&r, &xy_x());
    }
    if m.yz == 1 {
        r = xy_mul(&r, &second);
    }
    r
}

pub fn to_standard(basis: Basis, coeffs: &[Integer]) -> IntPolyXY {
    let mut f = IntPolyXY::default();
    for (i, c) in coeffs.iter().enumerate() {
        if *c != 0 {
            f = xy_add(&f, &xy_scale(&basis_element(basis, i), c));
        }
    }
    f
}

/// Coefficients of `f` in `basis`; exact, since each basis element has a
/// unit leading coefficient at its own pole order.
pub fn from_standard(basis: Basis, f: &IntPolyXY) -> Result<Vec<Integer>> {
    let Some(pole) = f.pole_order() else { return Ok(vec![]) };
    let top = Basis::index_of_pole(pole).ok_or_else(|| Error::Internal("pole order 1 is impossible".into()))?;
    let mut r = f.clone();
    let mut out = vec![Integer::new(); top + 1];
    for i in (0..=top).rev() {
        let n = pole_order_of_index(i);
        let c = if n.is_multiple_of(2) { r.a.coeff(n / 2) } else { r.b.coeff((n - 3) / 2) };
        if c != 0 {
            r = xy_sub(&r, &xy_scale(&basis_element(basis, i), &c));
            out[i] = c;
        }
    }
    if !r.is_zero() {
        return Err(Error::Internal("basis conversion left a remainder".into()));
    }
    Ok(out)
}

/// A generalized class function `F = A(x) + B(x)·y` on `X0+(119)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GenClassFunction {
    pub d: Discriminant,
    pub basis: Basis,
    /// Coefficients in `basis`, by increasing pole order.
    pub coeffs: Vec<Integer>,
    pub f: IntPolyXY,
    /// Sum of the orbit; `F` vanishes at its negative.
    pub heegner: Point<Rational>,
    pub real_flag: bool,
    pub orbit_size: usize,
    pub subfield_degree: usize,
}

impl GenClassFunction {
    fn assemble(d: Discriminant, basis: Basis, f: IntPolyXY, heegner: Point<Rational>, orbit: &OrbitData) -> Result<Self> {
        let f = f.normalized();
        Ok(GenClassFunction {
            d,
            basis,
            coeffs: from_standard(basis, &f)?,
            f,
            heegner,
            real_flag: orbit.real_flag,
            orbit_size: orbit.deduped_size(),
            subfield_degree: orbit.subfield_degree,
        })
    }

    /// Same function expressed in another basis.
    pub fn in_basis(&self, basis: Basis) -> Result<Self> {
        Ok(GenClassFunction { basis, coeffs: from_standard(basis, &self.f)?, ..self.clone() })
    }

    pub fn pole_order(&self) -> usize {
        self.f.pole_order().unwrap_or(0)
    }

    /// Human-readable polynomial in the function's own basis.
    pub fn pretty(&self) -> String {
        match self.basis {
            Basis::Standard => self.f.pretty(),
            Basis::EtaMixed => pretty_etamixed(&self.coeffs),
        }
    }

    /// Plain-text serialization.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "D={} N={} curve={} basis={} real={}\n",
            self.d,
            LEVEL,
            CURVE_ID,
            self.basis.id(),
            u8::from(self.real_flag)
        );
        match self.basis {
            Basis::Standard => {
                for (c, dx, dy) in self.f.monomials() {
                    let _ = writeln!(s, "{c} {dx} {dy}");
                }
            }
            Basis::EtaMixed => {
                for i in (0..self.coeffs.len()).rev() {
                    if self.coeffs[i] != 0 {
                        let m = self.basis.monomial(i);
                        let _ = writeln!(s, "{} {} {} {}", self.coeffs[i], m.x, m.yz, m.w);
                    }
                }
            }
        }
        s
    }

    /// Parse [`to_text`](Self::to_text) output; the Heegner point is recovered
    /// as the rational torsion point where `F` vanishes (`O` if none does).
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
        let mut d = None;
        let mut basis = Basis::Standard;
        let mut real = true;
        for kv in header.split_whitespace() {
            let (k, v) = kv.split_once('=').ok_or_else(|| Error::Parse(format!("bad header field '{kv}'")))?;
            match k {
                "D" => d = Some(Discriminant::new(v.parse().map_err(|_| Error::Parse(format!("bad D '{v}'")))?)?),
                "N" => {
                    if v != LEVEL.to_string() {
                        return Err(Error::Precondition(format!("unsupported level {v}")));
                    }
                }
                "curve" => {
                    if v != CURVE_ID {
                        return Err(Error::Precondition(format!("unsupported curve {v}")));
                    }
                }
                "basis" => basis = Basis::parse(v)?,
                "real" => real = v == "1",
                _ => return Err(Error::Parse(format!("unknown header field '{k}'"))),
            }
        }
        let d = d.ok_or_else(|| Error::Parse("missing D".into()))?;
        let mut f = IntPolyXY::default();
        for l in lines {
            let parts: Vec<&str> = l.split_whitespace().collect();
            let c: Integer = parts.first().and_then(|p| p.parse().ok()).ok_or_else(|| Error::Parse(format!("bad line '{l}'")))?;
            let e: Vec<usize> = parts[1..].iter().map(|p| p.parse()).collect::<std::result::Result<_, _>>().map_err(|_| Error::Parse(format!("bad line '{l}'")))?;
            let term = match (basis, e.as_slice()) {
                (Basis::Standard, [dx, dy]) => IntPolyXY::from_monomials(&[(c, *dx, *dy)])?,
                (Basis::EtaMixed, [dx, dz, dw]) => {
                    let pole = 2 * dx + 3 * dz + 4 * dw;
                    let i = Basis::index_of_pole(pole).ok_or_else(|| Error::Parse(format!("bad monomial '{l}'")))?;
                    let m = basis.monomial(i);
                    if (m.x, m.yz, m.w) != (*dx, *dz, *dw) {
                        return Err(Error::Parse(format!("'{l}' is not a basis monomial")));
                    }
                    xy_scale(&basis_element(basis, i), &c)
                }
                _ => return Err(Error::Parse(format!("wrong number of columns in '{l}'"))),
            };
            f = xy_add(&f, &term);
        }
        let e = x0plus119();
        let zeros: Vec<Point<Rational>> = x0plus119_torsion()
            .into_iter()
            .filter(|p| matches!(p, Point::Affine(x, y) if f.eval_rational(x, y) == 0))
            .collect();
        let heegner = match zeros.as_slice() {
            [] => Point::Infinity,
            [p] => e.neg(p),
            _ => return Err(Error::Parse("ambiguous Heegner point".into())),
        };
        let pole = f.pole_order().unwrap_or(0);
        let orbit_size = if heegner.is_infinity() { pole } else { pole.saturating_sub(1) };
        let h = class_number(d);
        let coeffs = from_standard(basis, &f)?;
        Ok(GenClassFunction {
            d,
            basis,
            coeffs,
            f,
            heegner,
            real_flag: real,
            orbit_size,
            subfield_degree: if orbit_size > 0 && h.is_multiple_of(orbit_size) { h / orbit_size } else { 1 },
        })
    }

    /// `Σ_i c_i t^(pole order of monomial i)`: the coefficients of `F` laid out
    /// along the pole-order grading, used for Mahler measure and norms.
    pub fn graded_poly(&self) -> IntPolyUV {
        let n = self.pole_order();
        let mut v = vec![Integer::new(); n + 1];
        for (c, dx, dy) in self.f.monomials() {
            v[2 * dx + 3 * dy] = c;
        }
        IntPolyUV::new(v)
    }

    pub fn heights(&self) -> HeightReport {
        heights(&self.graded_poly())
    }
}

fn pretty_etamixed(coeffs: &[Integer]) -> String {
    let mut terms: Vec<(Integer, usize, usize, usize)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0)
        .map(|(i, c)| {
            let m = Basis::EtaMixed.monomial(i);
            (c.clone(), m.x, m.w, m.yz)
        })
        .collect();
    // total degree descending, then z-free first, then x first
    terms.sort_by_key(|&(_, x, w, z)| (std::cmp::Reverse(x + w + z), z, std::cmp::Reverse(x)));
    let mut s = String::new();
    for (k, (c, x, w, z)) in terms.into_iter().enumerate() {
        let mut mono = String::new();
        if x == 1 {
            mono.push('x');
        }
        match w {
            0 => {}
            1 => mono.push('w'),
            e => {
                let _ = write!(mono, "w^{e}");
            }
        }
        if z == 1 {
            mono.push('z');
        }
        let neg = c < 0;
        let a = c.abs();
        if k == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        if mono.is_empty() {
            let _ = write!(s, "{a}");
        } else if a == 1 {
            s.push_str(&mono);
        } else {
            let _ = write!(s, "{a}{mono}");
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

// --- Heegner point ------------------------------------------------------------

fn complex_model(prec: u32) -> WeierstrassModel<APComplex> {
    WeierstrassModel::from_ints(&APComplex::zero(prec), [3, -3, -1, 1, 0])
}

/// Continued-fraction reconstruction of `v` with denominator at most `max_den`.
pub fn rational_approx(v: &Float, tol: &Float, max_den: &Integer) -> Option<Rational> {
    let p = v.prec();
    let (mut h1, mut h2) = (Integer::from(1), Integer::new());
    let (mut k1, mut k2) = (Integer::new(), Integer::from(1));
    let mut x = v.clone();
    for _ in 0..4 * p {
        let a = x.clone().floor().to_integer()?;
        let h = Integer::from(&a * &h1) + &h2;
        let k = Integer::from(&a * &k1) + &k2;
        if k > *max_den {
            return None;
        }
        let r = Rational::from((h.clone(), k.clone()));
        if Float::with_val(p, v - &r).abs() <= *tol {
            return Some(r);
        }
        let frac = Float::with_val(p, &x - &a);
        if frac.is_zero() {
            return None;
        }
        x = frac.recip();
        (h2, h1, k2, k1) = (h1, h, k1, k);
    }
    None
}

/// Identify a numerically computed point as a rational point of the curve.
fn identify_rational(p: &Point<APComplex>, prec: u32) -> Option<Point<Rational>> {
    let Point::Affine(x, y) = p else { return Some(Point::Infinity) };
    for t in x0plus119_torsion() {
        if let Point::Affine(tx, ty) = &t {
            let (ax, ay) = (APComplex::from_rational(tx, prec), APComplex::from_rational(ty, prec));
            if ax.approx_eq(x, prec / 4) && ay.approx_eq(y, prec / 4) {
                return Some(t);
            }
        }
    }
    let tol = Float::with_val(prec, Float::i_exp(1, -((prec / 4) as i32)));
    let maxd = Integer::from(1) << (prec / 8);
    if x.im().clone().abs() > tol || y.im().clone().abs() > tol {
        return None;
    }
    let rx = rational_approx(x.re(), &tol, &maxd)?;
    let ry = rational_approx(y.re(), &tol, &maxd)?;
    let q = Point::Affine(rx, ry);
    x0plus119().contains(&q).then_some(q)
}

fn heegner_of(orbit: &OrbitData) -> Result<Point<Rational>> {
    let e = complex_model(orbit.prec + 32);
    let mut q = Point::Infinity;
    for (x, y) in orbit.points() {
        q = e.add(&q, &Point::Affine(x.clone(), y.clone()));
    }
    identify_rational(&q, orbit.prec).ok_or_else(|| Error::InsufficientPrecision("orbit sum is not a recognizable rational point".into()))
}

/// Exact consistency of `F` with its Heegner point and orbit size.
fn check_heegner(f: &IntPolyXY, heegner: &Point<Rational>, m: usize) -> Result<()> {
    let pole = f.pole_order().unwrap_or(0);
    let ok = match x0plus119().neg(heegner) {
        Point::Infinity => pole == m,
        Point::Affine(x, y) => pole == m + 1 && f.eval_rational(&x, &y) == 0,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InsufficientPrecision("relation does not vanish at the negated Heegner point".into()))
    }
}

// --- LLL construction -----------------------------------------------------------

fn require_real(orbit: &OrbitData) -> Result<()> {
    if orbit.real_flag {
        Ok(())
    } else {
        Err(Error::Precondition("K-coefficients unsupported in this operation".into()))
    }
}

/// Minimal relation among the first `m + 1` basis functions on the orbit.
pub fn genclass_lll(orbit: &OrbitData, basis: Basis) -> Result<GenClassFunction> {
    require_real(orbit)?;
    let m = orbit.deduped_size();
    let prec = orbit.prec;
    let rows: Vec<Vec<APComplex>> = orbit.points().map(|(x, y)| basis_values_at(basis, m, x, y)).collect();
    let bound = Integer::from(1) << (prec / 2);
    let rel = integer_relation(&rows, prec, &bound)?;
    let (coeffs, _) = primitive(&rel.coeffs);
    let f = to_standard(basis, &coeffs);
    let heegner = heegner_of(orbit)?;
    check_heegner(&f, &heegner, m)?;
    GenClassFunction::assemble(orbit.params.d, basis, f, heegner, orbit)
}

// --- binary-tree construction ---------------------------------------------------

/// Node of the tree: `F = A(X) + B(X)·Y` on `Y² = X³ - 3X² - 8X + 16`,
/// with `div F = Σ(P_i) + (-Q) - (pole)·O`.
#[derive(Clone, Debug)]
struct TreeNode {
    a: CPoly,
    b: CPoly,
    q: Point<APComplex>,
    pole: usize,
}

fn g0_f(prec: u32) -> CPoly {
    CPoly::new([16, -8, -3, 1].iter().map(|&c| APComplex::from_i64(c, prec)).collect())
}

fn g0_model(prec: u32) -> WeierstrassModel<APComplex> {
    WeierstrassModel::from_ints(&APComplex::zero(prec), [0, -3, 0, -8, 16])
}

/// `(A1 + B1 Y)(A2 + B2 Y)` reduced by `Y² = f`, Karatsuba-style.
fn fn_mul(a1: &CPoly, b1: &CPoly, a2: &CPoly, b2: &CPoly, f: &CPoly) -> (CPoly, CPoly) {
    let c = a1.mul(a2);
    let d = b1.mul(b2);
    let e = a1.add(b1).mul(&a2.add(b2));
    (c.add(&d.mul(f)), e.sub(&c).sub(&d))
}

fn combine(n1: &TreeNode, n2: &TreeNode, prec: u32) -> TreeNode {
    let e = g0_model(prec);
    let f = g0_f(prec);
    let (a, b) = fn_mul(&n1.a, &n1.b, &n2.a, &n2.b, &f);
    let q3 = e.add(&n1.q, &n2.q);
    let (p1, p2) = match (&n1.q, &n2.q) {
        (Point::Affine(x1, y1), Point::Affine(x2, y2)) => ((x1, y1), (x2, y2)),
        // one side already sums to O: the product has exactly the right divisor
        _ => return TreeNode { a, b, q: q3, pole: n1.pole + n2.pole },
    };
    if q3.is_infinity() {
        // Q1 = -Q2: the chord is vertical
        let (qa, _) = a.divrem_monic(&CPoly::linear(p1.0));
        let (qb, _) = b.divrem_monic(&CPoly::linear(p1.0));
        return TreeNode { a: qa, b: qb, q: q3, pole: n1.pole + n2.pole - 2 };
    }
    let lambda = if Field::eq_f(p1.0, p2.0) {
        let num = p1.0.square().mul_i64(3) - p1.0.mul_i64(6) - APComplex::from_i64(8, prec);
        num / p1.1.mul_i64(2)
    } else {
        (p2.1 - p1.1) / (p2.0 - p1.0)
    };
    let nu = p1.1 - &(&lambda * p1.0);
    // R = Y - λX - ν
    let rc = CPoly::new(vec![-nu, -lambda]);
    let ra = a.mul(&rc).add(&b.mul(&f));
    let rb = a.add(&b.mul(&rc));
    let div = CPoly::linear(p1.0).mul(&CPoly::linear(p2.0));
    let (qa, _) = ra.divrem_monic(&div);
    let (qb, _) = rb.divrem_monic(&div);
    TreeNode { a: qa, b: qb, q: q3, pole: n1.pole + n2.pole - 1 }
}

fn tree_build(leaves: &[TreeNode], prec: u32) -> TreeNode {
    match leaves.len() {
        1 => leaves[0].clone(),
        n => {
            let (l, r) = leaves.split_at(n / 2);
            let (a, b) = rayon::join(|| tree_build(l, prec), || tree_build(r, prec));
            combine(&a, &b, prec)
        }
    }
}

/// Clear the common denominator of real approximations of rationals and round.
fn clear_denominators(vals: &[APComplex], prec: u32) -> Option<Vec<Integer>> {
    let tol = Float::with_val(prec, Float::i_exp(1, -((prec / 2) as i32)));
    let maxd = Integer::from(1) << (prec / 4);
    let mut l = Integer::from(1);
    for v in vals {
        if v.im().clone().abs() > Float::with_val(prec, Float::i_exp(1, -((prec / 4) as i32))) * Float::with_val(prec, v.abs()).max(&Float::with_val(prec, 1)) {
            return None;
        }
        let lv = Float::with_val(prec, v.re() * &l);
        let scale = Float::with_val(prec, lv.clone().abs()).max(&Float::with_val(prec, 1));
        let r = rational_approx(&lv, &Float::with_val(prec, &tol * &scale), &maxd)?;
        l *= r.denom();
    }
    let mut out = Vec::with_capacity(vals.len());
    for v in vals {
        let lv = Float::with_val(prec, v.re() * &l);
        let r = lv.clone().round();
        if Float::with_val(prec, &lv - &r).abs() > 0.25 {
            return None;
        }
        out.push(r.to_integer()?);
    }
    Some(out)
}

/// The same class function built bottom-up from linear factors and chords.
pub fn genclass_tree(orbit: &OrbitData) -> Result<GenClassFunction> {
    require_real(orbit)?;
    let prec = orbit.prec + 32;
    let four = APComplex::from_i64(4, prec);
    let leaves: Vec<TreeNode> = orbit
        .points()
        .map(|(x, y)| {
            // X = 4x, Y = 8y + 12x - 4
            let bx = x.with_prec(prec).mul_i64(4);
            let by = y.with_prec(prec).mul_i64(8) + x.with_prec(prec).mul_i64(12) - four.clone();
            TreeNode { a: CPoly::linear(&bx), b: CPoly::zero(), q: Point::Affine(bx, by), pole: 2 }
        })
        .collect();
    if leaves.is_empty() {
        return Err(Error::Precondition("empty orbit".into()));
    }
    let root = tree_build(&leaves, prec);
    // back to x, y: A(4x) + (12x - 4)·B(4x) + 8·B(4x)·y
    let a4 = root.a.scale_var(&four);
    let b4 = root.b.scale_var(&four);
    let lin = CPoly::new(vec![APComplex::from_i64(-4, prec), APComplex::from_i64(12, prec)]);
    let na = a4.add(&b4.mul(&lin));
    let nb = b4.scale(&APComplex::from_i64(8, prec));
    let p = root.pole;
    let lead = if p.is_multiple_of(2) {
        Integer::from(4).pow(p as u32 / 2)
    } else {
        Integer::from(8) * Integer::from(4).pow((p as u32 - 3) / 2)
    };
    let inv = APComplex::from_integer(&lead, prec).recip();
    let da = p / 2 + 1;
    let db = if p >= 3 { (p - 3) / 2 + 1 } else { 0 };
    let mut vals: Vec<APComplex> = (0..da).map(|i| &na.coeff(i, prec) * &inv).collect();
    vals.extend((0..db).map(|i| &nb.coeff(i, prec) * &inv));
    let ints = clear_denominators(&vals, orbit.prec).ok_or_else(|| Error::InsufficientPrecision("tree coefficients did not round".into()))?;
    let f = IntPolyXY::new(IntPolyUV::new(ints[..da].to_vec()), IntPolyUV::new(ints[da..].to_vec()));
    let heegner = match &root.q {
        Point::Infinity => Point::Infinity,
        Point::Affine(bx, by) => {
            let x = bx.mul_pow2(-2);
            let y = (by - &x.mul_i64(12) + APComplex::from_i64(4, prec)).mul_pow2(-3);
            identify_rational(&Point::Affine(x, y), orbit.prec).ok_or_else(|| Error::InsufficientPrecision("tree Heegner point not rational".into()))?
        }
    };
    check_heegner(&f, &heegner, orbit.deduped_size())?;
    GenClassFunction::assemble(orbit.params.d, Basis::Standard, f, heegner, orbit)
}

// --- driver ---------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algo {
    Lll,
    Tree,
    Both,
}

impl Algo {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "lll" => Ok(Algo::Lll),
            "tree" => Ok(Algo::Tree),
            "both" => Ok(Algo::Both),
            _ => Err(Error::Parse(format!("unknown algorithm '{s}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GenClassOutcome {
    pub function: GenClassFunction,
    /// `Some(equal)` when both algorithms ran.
    pub agree: Option<bool>,
    pub prec: u32,
    pub orbit: OrbitData,
}

/// Compute the class function of `D`, doubling precision on failure.
pub fn genclass(d: Discriminant, basis: Basis, algo: Algo) -> Result<GenClassOutcome> {
    let mut prec = prec_override().unwrap_or_else(|| genclass_prec(d));
    let mut last = Error::PrecisionBlowup(format!("class function of D = {d}"));
    for _ in 0..=MAX_DOUBLINGS {
        let orbit = orbit(d, AbcMode::Plus, prec)?;
        let attempt = || -> Result<(GenClassFunction, Option<bool>)> {
            match algo {
                Algo::Lll => Ok((genclass_lll(&orbit, basis)?, None)),
                Algo::Tree => Ok((genclass_tree(&orbit)?.in_basis(basis)?, None)),
                Algo::Both => {
                    let (l, t) = rayon::join(|| genclass_lll(&orbit, basis), || genclass_tree(&orbit));
                    let l = l?;
                    let t = t?.in_basis(basis)?;
                    let eq = l == t;
                    Ok((l, Some(eq)))
                }
            }
        };
        match attempt() {
            Ok((function, agree)) => return Ok(GenClassOutcome { function, agree, prec, orbit }),
            Err(e @ (Error::InsufficientPrecision(_) | Error::DependentRows)) => last = e,
            Err(e) => return Err(e),
        }
        prec *= 2;
    }
    Err(match last {
        Error::InsufficientPrecision(m) => Error::PrecisionBlowup(m),
        e => e,
    })
}

// --- norms ----------------------------------------------------------------------

/// Result of [`norm_to_x`], on the model `Y² = X³ - 3X² - 8X + 16` (`X = 4x`).
#[derive(Clone, Debug, PartialEq)]
pub struct NormData {
    /// `A² - f·B²` for the primitive integral form of `F` on the short model.
    pub norm: IntPolyUV,
    /// Class polynomial of `X`.
    pub h_big_x: IntPolyUV,
    /// Class polynomial of the original `x`.
    pub h_x: IntPolyUV,
    /// `b²X - a` for the negated Heegner point, or `1`.
    pub t: IntPolyUV,
    pub sign: i32,
    pub d_prime: u32,
}

/// `F` ported to `X = 4x`, `Y = 8y + 12x - 4`, made integral and primitive.
pub fn to_short_model(f: &IntPolyXY) -> (IntPolyUV, IntPolyUV) {
    // x = X/4, y = (Y - 3X + 4)/8
    let da = f.a.degree().unwrap_or(0) as u32;
    let db = f.b.degree().map_or(0, |d| d as u32 + 2);
    let e = da.max(db) + 1;
    // scale by 4^e so that every x^i becomes an integer multiple of X^i
    let s = Integer::from(4).pow(e);
    let sub = |p: &IntPolyUV| -> IntPolyUV {
        IntPolyUV::new(p.coeffs().iter().enumerate().map(|(i, c)| Integer::from(c * &s) >> (2 * i as u32)).collect())
    };
    let a = sub(&f.a);
    let b = sub(&f.b);
    // A(X) + B(X)(Y - 3X + 4)/8, times 8
    let lin = IntPolyUV::from_i64s(&[4, -3]);
    let na = a.scale(&Integer::from(8)).add(&b.mul(&lin));
    let nb = b;
    let g = Integer::from(na.content().gcd_ref(&nb.content()));
    (na.div_exact_scalar(&g).unwrap(), nb.div_exact_scalar(&g).unwrap())
}

fn sign_normalize(p: IntPolyUV) -> (IntPolyUV, i32) {
    let c = p.content();
    let q = p.div_exact_scalar(&c).unwrap();
    if q.lead().is_some_and(|l| *l < 0) {
        (q.neg(), -1)
    } else {
        (q, 1)
    }
}

/// Squarefree part over ℚ, made primitive.
fn squarefree_part(p: &IntPolyUV) -> Result<IntPolyUV> {
    let g = poly_gcd(p, &p.derivative())?;
    Ok(sign_normalize(p.div_exact(&g)?).0)
}

/// Primitive gcd of two integer polynomials (Euclid over ℚ).
pub fn poly_gcd(a: &IntPolyUV, b: &IntPolyUV) -> Result<IntPolyUV> {
    let mut x = a.clone();
    let mut y = b.clone();
    while !y.is_zero() {
        let (_, r) = x.divrem_rational(&y)?;
        let den = r.iter().fold(Integer::from(1), |l, c| l.lcm(c.denom()));
        let ri = IntPolyUV::new(r.iter().map(|c| Rational::from(c * &den).numer().clone()).collect());
        x = y;
        y = if ri.is_zero() { ri } else { sign_normalize(ri).0 };
    }
    if x.is_zero() {
        return Ok(x);
    }
    Ok(sign_normalize(x).0)
}

/// `N(F) = s·H_X^{d'}·T` with `s = ±1`.
pub fn norm_to_x(g: &GenClassFunction) -> Result<NormData> {
    let (a, b) = to_short_model(&g.f);
    let f = IntPolyUV::from_i64s(&[16, -8, -3, 1]);
    let norm = a.mul(&a).sub(&f.mul(&b.mul(&b)));
    let t = match x0plus119().neg(&g.heegner) {
        Point::Infinity => IntPolyUV::one(),
        Point::Affine(x, _) => {
            // X = 4x = 4·num/den
            let num = Integer::from(x.numer() * 4);
            let den = x.denom().clone();
            let gg = Integer::from(num.gcd_ref(&den));
            IntPolyUV::new(vec![-(num / &gg), den / gg])
        }
    };
    let rest = norm.div_exact(&t).map_err(|_| Error::Divisibility("norm is not divisible by the Heegner factor".into()))?;
    let h = squarefree_part(&rest)?;
    let dh = h.degree().unwrap_or(0);
    let dr = rest.degree().unwrap_or(0);
    if dh == 0 || dr % dh != 0 {
        return Err(Error::Divisibility("norm is not a power of its squarefree part".into()));
    }
    let d_prime = (dr / dh) as u32;
    let hp = h.pow(d_prime);
    let sign = if rest == hp {
        1
    } else if rest == hp.neg() {
        -1
    } else {
        return Err(Error::Divisibility("norm quotient is not ±H^d'".into()));
    };
    let h_x = sign_normalize(h.scale_var(&Integer::from(4))).0;
    Ok(NormData { norm, h_big_x: h, h_x, t, sign, d_prime })
}

// --- heights --------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct HeightReport {
    pub norm1: Integer,
    pub norm_inf: Integer,
    pub mahler: Float,
    pub degree: usize,
    pub bit_length: u64,
}

impl HeightReport {
    /// The four inequalities `|P|∞ ≤ |P|₁ ≤ (n+1)|P|∞` and `M(P) ≤ |P|₁ ≤ 2ⁿ M(P)`;
    /// the Mahler comparisons allow a relative slack of `2^-40` for root-finding error.
    pub fn measure_inequalities(&self) -> [bool; 4] {
        let n = self.degree as u32;
        let p = self.mahler.prec();
        let slack = Float::with_val(p, 1) + Float::with_val(p, Float::i_exp(1, -40));
        let l1 = Float::with_val(p, &self.norm1);
        [
            self.norm_inf <= self.norm1,
            self.norm1 <= Integer::from(n + 1) * &self.norm_inf,
            Float::with_val(p, &self.mahler / &slack) <= l1,
            l1 <= Float::with_val(p, &self.mahler * &slack) << n,
        ]
    }

    pub fn log_norm_inf(&self) -> f64 {
        log_integer(&self.norm_inf)
    }
}

pub fn log_integer(v: &Integer) -> f64 {
    if *v == 0 {
        return f64::NEG_INFINITY;
    }
    let (m, e) = v.to_f64_exp();
    m.abs().ln() + e as f64 * std::f64::consts::LN_2
}

pub fn heights(p: &IntPolyUV) -> HeightReport {
    let bits = p.coeffs().iter().map(|c| c.significant_bits()).max().unwrap_or(0);
    HeightReport {
        norm1: p.norm1(),
        norm_inf: p.norm_inf(),
        mahler: mahler_measure(p, 2 * bits + 128),
        degree: p.degree().unwrap_or(0),
        bit_length: p.bit_length(),
    }
}

/// `log|H_D[j]|∞ / log|F|∞`, `None` when `|F|∞ = 1`.
pub fn r_practical(hilbert: &IntPolyUV, f: &GenClassFunction) -> Option<f64> {
    let g = log_integer(&f.f.norm_inf());
    (g > 0.0).then(|| log_integer(&hilbert.norm_inf()) / g)
}

/// One line of a reduction-factor report.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub d: i64,
    pub class_number: usize,
    pub r_practical: Option<f64>,
    pub log_hinf_hilbert: f64,
    pub log_hinf_gen: f64,
    pub bitlen_hilbert: u64,
    pub bitlen_gen: u64,
    pub real_flag: bool,
    pub subfield_degree: usize,
}

impl ReportRow {
    pub const HEADER: &'static str = "D,classNumber,rPractical,logHinfHilbert,logHinfGen,bitLenHilbert,bitLenGen,realFlag,subfieldDegree";

    pub fn csv(&self) -> String {
        let r = self.r_practical.map_or_else(|| "inf".to_string(), |r| format!("{r:.6}"));
        format!(
            "{},{},{},{:.6},{:.6},{},{},{},{}",
            self.d,
            self.class_number,
            r,
            self.log_hinf_hilbert,
            self.log_hinf_gen,
            self.bitlen_hilbert,
            self.bitlen_gen,
            u8::from(self.real_flag),
            self.subfield_degree
        )
    }
}

pub fn report_row(d: Discriminant) -> Result<ReportRow> {
    let h = hilbert(d, None)?;
    let g = genclass(d, Basis::Standard, Algo::Lll)?.function;
    Ok(ReportRow {
        d: d.value(),
        class_number: class_number(d),
        r_practical: r_practical(&h, &g),
        log_hinf_hilbert: log_integer(&h.norm_inf()),
        log_hinf_gen: log_integer(&g.f.norm_inf()),
        bitlen_hilbert: h.bit_length(),
        bitlen_gen: g.f.bit_length(),
        real_flag: g.real_flag,
        subfield_degree: g.subfield_degree,
    })
}
