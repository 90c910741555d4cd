//! Elliptic curves in long Weierstrass form over ℚ, prime fields and
//! approximate complex numbers.

use crate::arith::{is_prime, kronecker, mul_mod, pow_mod, sqrt_mod_prime};
use crate::error::{Error, Result};
use crate::numerics::APComplex;
use rand::Rng;
use rug::{Complete, Integer, Rational};
use std::fmt::Debug;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    Rational,
    PrimeField(u64),
    ComplexApprox(u32),
}

/// Field operations; constants are created "like" an existing element so that
/// context (the modulus, the precision) is carried along.
pub trait Field: Clone + Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    #[allow(clippy::wrong_self_convention)]
    fn from_i64_like(&self, v: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;
    fn is_zero(&self) -> bool;
    fn kind(&self) -> FieldKind;

    fn eq_f(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }
    fn square(&self) -> Self {
        self.mul(self)
    }
    fn mul_i64(&self, k: i64) -> Self {
        self.mul(&self.from_i64_like(k))
    }
}

impl Field for Rational {
    fn zero_like(&self) -> Self {
        Rational::new()
    }
    fn one_like(&self) -> Self {
        Rational::from(1)
    }
    fn from_i64_like(&self, v: i64) -> Self {
        Rational::from(v)
    }
    fn add(&self, o: &Self) -> Self {
        Rational::from(self + o)
    }
    fn sub(&self, o: &Self) -> Self {
        Rational::from(self - o)
    }
    fn mul(&self, o: &Self) -> Self {
        Rational::from(self * o)
    }
    fn neg(&self) -> Self {
        Rational::from(-self)
    }
    fn inv(&self) -> Option<Self> {
        (*self != 0).then(|| Rational::from(self.recip_ref()))
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn kind(&self) -> FieldKind {
        FieldKind::Rational
    }
}

/// An element of `𝔽_p`, `p < 2^63`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp {
    pub v: u64,
    pub p: u64,
}

impl Fp {
    pub fn new(v: i128, p: u64) -> Self {
        Fp { v: v.rem_euclid(p as i128) as u64, p }
    }

    pub fn from_integer(v: &Integer, p: u64) -> Self {
        Fp { v: v.div_rem_euc_ref(&Integer::from(p)).complete().1.to_u64().unwrap(), p }
    }

    pub fn pow(&self, e: u64) -> Self {
        Fp { v: pow_mod(self.v, e, self.p), p: self.p }
    }

    pub fn sqrt(&self) -> Option<Self> {
        sqrt_mod_prime(self.v, self.p).map(|v| Fp { v, p: self.p })
    }

    pub fn is_square(&self) -> bool {
        self.v == 0 || pow_mod(self.v, (self.p - 1) / 2, self.p) == 1
    }
}

impl Field for Fp {
    fn zero_like(&self) -> Self {
        Fp { v: 0, p: self.p }
    }
    fn one_like(&self) -> Self {
        Fp { v: 1 % self.p, p: self.p }
    }
    fn from_i64_like(&self, v: i64) -> Self {
        Fp::new(v as i128, self.p)
    }
    fn add(&self, o: &Self) -> Self {
        Fp { v: ((self.v as u128 + o.v as u128) % self.p as u128) as u64, p: self.p }
    }
    fn sub(&self, o: &Self) -> Self {
        Fp { v: ((self.v as u128 + self.p as u128 - o.v as u128) % self.p as u128) as u64, p: self.p }
    }
    fn mul(&self, o: &Self) -> Self {
        Fp { v: mul_mod(self.v, o.v, self.p), p: self.p }
    }
    fn neg(&self) -> Self {
        Fp { v: (self.p - self.v) % self.p, p: self.p }
    }
    fn inv(&self) -> Option<Self> {
        (self.v != 0).then(|| Fp { v: pow_mod(self.v, self.p - 2, self.p), p: self.p })
    }
    fn is_zero(&self) -> bool {
        self.v == 0
    }
    fn kind(&self) -> FieldKind {
        FieldKind::PrimeField(self.p)
    }
}

/// Approximate complex numbers: zero means `|z| < 2^(-prec/2)`.
impl Field for APComplex {
    fn zero_like(&self) -> Self {
        APComplex::zero(self.prec())
    }
    fn one_like(&self) -> Self {
        APComplex::one(self.prec())
    }
    fn from_i64_like(&self, v: i64) -> Self {
        APComplex::from_i64(v, self.prec())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        (!Field::is_zero(self)).then(|| self.recip())
    }
    fn is_zero(&self) -> bool {
        self.exponent().is_none_or(|e| e < -(self.prec() as i32) / 2)
    }
    fn kind(&self) -> FieldKind {
        FieldKind::ComplexApprox(self.prec())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Point<F> {
    Infinity,
    Affine(F, F),
}

impl<F: Field> Point<F> {
    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn x(&self) -> Option<&F> {
        match self {
            Point::Affine(x, _) => Some(x),
            Point::Infinity => None,
        }
    }

    pub fn y(&self) -> Option<&F> {
        match self {
            Point::Affine(_, y) => Some(y),
            Point::Infinity => None,
        }
    }

    pub fn eq_f(&self, o: &Self) -> bool {
        match (self, o) {
            (Point::Infinity, Point::Infinity) => true,
            (Point::Affine(a, b), Point::Affine(c, d)) => a.eq_f(c) && b.eq_f(d),
            _ => false,
        }
    }
}

/// `x = u² x' + r`, `y = u³ y' + s u² x' + t`.
#[derive(Clone, Debug, PartialEq)]
pub struct Substitution<F> {
    pub u: F,
    pub r: F,
    pub s: F,
    pub t: F,
}

/// `y² + a1 xy + a3 y = x³ + a2 x² + a4 x + a6`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeierstrassModel<F> {
    pub a1: F,
    pub a2: F,
    pub a3: F,
    pub a4: F,
    pub a6: F,
}

/// The model `y² + 3xy - y = x³ - 3x² + x` of `X0+(119)` over ℚ.
pub fn x0plus119() -> WeierstrassModel<Rational> {
    WeierstrassModel::from_ints(&Rational::new(), [3, -3, -1, 1, 0])
}

/// Rational torsion of [`x0plus119`]: `O, P, 2P, 3P` with `P = (0, 0)`.
pub fn x0plus119_torsion() -> Vec<Point<Rational>> {
    let r = |a: i64, b: i64| Point::Affine(Rational::from(a), Rational::from(b));
    vec![Point::Infinity, r(0, 0), r(1, -1), r(0, 1)]
}

impl<F: Field> WeierstrassModel<F> {
    pub fn from_ints(like: &F, a: [i64; 5]) -> Self {
        WeierstrassModel {
            a1: like.from_i64_like(a[0]),
            a2: like.from_i64_like(a[1]),
            a3: like.from_i64_like(a[2]),
            a4: like.from_i64_like(a[3]),
            a6: like.from_i64_like(a[4]),
        }
    }

    pub fn field_kind(&self) -> FieldKind {
        self.a1.kind()
    }

    pub fn b_invariants(&self) -> (F, F, F, F) {
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        let b2 = a1.square().add(&a2.mul_i64(4));
        let b4 = a1.mul(a3).add(&a4.mul_i64(2));
        let b6 = a3.square().add(&a6.mul_i64(4));
        let b8 = a1.square().mul(a6).add(&a2.mul(a6).mul_i64(4)).sub(&a1.mul(a3).mul(a4)).add(&a2.mul(&a3.square())).sub(&a4.square());
        (b2, b4, b6, b8)
    }

    pub fn c4(&self) -> F {
        let (b2, b4, _, _) = self.b_invariants();
        b2.square().sub(&b4.mul_i64(24))
    }

    pub fn c6(&self) -> F {
        let (b2, b4, b6, _) = self.b_invariants();
        b2.square().mul(&b2).neg().add(&b2.mul(&b4).mul_i64(36)).sub(&b6.mul_i64(216))
    }

    pub fn discriminant(&self) -> F {
        let (b2, b4, b6, b8) = self.b_invariants();
        b2.square().mul(&b8).neg().sub(&b4.square().mul(&b4).mul_i64(8)).sub(&b6.square().mul_i64(27)).add(&b2.mul(&b4).mul(&b6).mul_i64(9))
    }

    pub fn j_invariant(&self) -> Option<F> {
        let c4 = self.c4();
        let d = self.discriminant();
        Some(c4.square().mul(&c4).mul(&d.inv()?))
    }

    pub fn contains(&self, p: &Point<F>) -> bool {
        match p {
            Point::Infinity => true,
            Point::Affine(x, y) => {
                let lhs = y.square().add(&self.a1.mul(x).mul(y)).add(&self.a3.mul(y));
                let rhs = x.square().mul(x).add(&self.a2.mul(&x.square())).add(&self.a4.mul(x)).add(&self.a6);
                lhs.eq_f(&rhs)
            }
        }
    }

    pub fn neg(&self, p: &Point<F>) -> Point<F> {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => Point::Affine(x.clone(), y.neg().sub(&self.a1.mul(x)).sub(&self.a3)),
        }
    }

    pub fn add(&self, p: &Point<F>, q: &Point<F>) -> Point<F> {
        let (x1, y1, x2, y2) = match (p, q) {
            (Point::Infinity, _) => return q.clone(),
            (_, Point::Infinity) => return p.clone(),
            (Point::Affine(a, b), Point::Affine(c, d)) => (a, b, c, d),
        };
        let lambda;
        if x1.eq_f(x2) {
            let ysum = y1.add(y2).add(&self.a1.mul(x2)).add(&self.a3);
            if ysum.is_zero() {
                return Point::Infinity;
            }
            let num = x1.square().mul_i64(3).add(&self.a2.mul(x1).mul_i64(2)).add(&self.a4).sub(&self.a1.mul(y1));
            let den = y1.mul_i64(2).add(&self.a1.mul(x1)).add(&self.a3);
            match den.inv() {
                Some(inv) => lambda = num.mul(&inv),
                None => return Point::Infinity,
            }
        } else {
            lambda = y2.sub(y1).mul(&x2.sub(x1).inv().expect("distinct x"));
        }
        let nu = y1.sub(&lambda.mul(x1));
        let x3 = lambda.square().add(&self.a1.mul(&lambda)).sub(&self.a2).sub(x1).sub(x2);
        let y3 = lambda.add(&self.a1).mul(&x3).neg().sub(&nu).sub(&self.a3);
        Point::Affine(x3, y3)
    }

    pub fn double(&self, p: &Point<F>) -> Point<F> {
        self.add(p, p)
    }

    pub fn mul(&self, p: &Point<F>, k: &Integer) -> Point<F> {
        let mut acc = Point::Infinity;
        let base = if *k < 0 { self.neg(p) } else { p.clone() };
        let k = k.clone().abs();
        for i in (0..k.significant_bits()).rev() {
            acc = self.double(&acc);
            if k.get_bit(i) {
                acc = self.add(&acc, &base);
            }
        }
        acc
    }

    /// Order of `p` if it is at most `bound`.
    pub fn torsion_order(&self, p: &Point<F>, bound: u32) -> Option<u32> {
        let mut q = p.clone();
        for n in 1..=bound {
            if q.is_infinity() {
                return Some(n);
            }
            q = self.add(&q, p);
        }
        None
    }

    pub fn transform(&self, sub: &Substitution<F>) -> Result<Self> {
        let Substitution { u, r, s, t } = sub;
        let ui = u.inv().ok_or_else(|| Error::Precondition("u must be invertible".into()))?;
        let u2 = ui.square();
        let u3 = u2.mul(&ui);
        let u4 = u2.square();
        let u6 = u3.square();
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        let na1 = a1.add(&s.mul_i64(2)).mul(&ui);
        let na2 = a2.sub(&s.mul(a1)).add(&r.mul_i64(3)).sub(&s.square()).mul(&u2);
        let na3 = a3.add(&r.mul(a1)).add(&t.mul_i64(2)).mul(&u3);
        let na4 = a4
            .sub(&s.mul(a3))
            .add(&r.mul(a2).mul_i64(2))
            .sub(&t.add(&r.mul(s)).mul(a1))
            .add(&r.square().mul_i64(3))
            .sub(&s.mul(t).mul_i64(2))
            .mul(&u4);
        let na6 = a6
            .add(&r.mul(a4))
            .add(&r.square().mul(a2))
            .add(&r.square().mul(r))
            .sub(&t.mul(a3))
            .sub(&t.square())
            .sub(&r.mul(t).mul(a1))
            .mul(&u6);
        Ok(WeierstrassModel { a1: na1, a2: na2, a3: na3, a4: na4, a6: na6 })
    }

    /// Image of a point of `self` on `self.transform(sub)`.
    pub fn map_point(&self, sub: &Substitution<F>, p: &Point<F>) -> Point<F> {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => {
                let ui = sub.u.inv().expect("u invertible");
                let xr = x.sub(&sub.r);
                let xn = xr.mul(&ui.square());
                let yn = y.sub(&sub.s.mul(&xr)).sub(&sub.t).mul(&ui.square().mul(&ui));
                Point::Affine(xn, yn)
            }
        }
    }
}

impl WeierstrassModel<Fp> {
    pub fn prime(&self) -> u64 {
        self.a1.p
    }

    /// Short model `y² = x³ + a x + b`.
    pub fn short(a: Fp, b: Fp) -> Self {
        let z = a.zero_like();
        WeierstrassModel { a1: z, a2: z, a3: z, a4: a, a6: b }
    }

    /// `(2y + a1 x + a3)² = 4x³ + b2 x² + 2 b4 x + b6` evaluated at `x`.
    fn rhs_square(&self, x: &Fp) -> Fp {
        let (b2, b4, b6, _) = self.b_invariants();
        x.square().mul(x).mul_i64(4).add(&b2.mul(&x.square())).add(&b4.mul(x).mul_i64(2)).add(&b6)
    }

    /// `#E(𝔽_p)` by summing Legendre symbols (odd `p`).
    pub fn point_count_naive(&self) -> u64 {
        let p = self.prime();
        let mut n = 1u64;
        for xv in 0..p {
            let r = self.rhs_square(&Fp { v: xv, p });
            n += if r.v == 0 {
                1
            } else if pow_mod(r.v, (p - 1) / 2, p) == 1 {
                2
            } else {
                0
            };
        }
        n
    }

    pub fn random_point<R: Rng>(&self, rng: &mut R) -> Point<Fp> {
        let p = self.prime();
        loop {
            let x = Fp { v: rng.random_range(0..p), p };
            let r = self.rhs_square(&x);
            if let Some(s) = r.sqrt() {
                // y = (s - a1 x - a3)/2
                let two_inv = Fp { v: 2, p }.inv().unwrap();
                let y = s.sub(&self.a1.mul(&x)).sub(&self.a3).mul(&two_inv);
                return Point::Affine(x, y);
            }
        }
    }

    /// Whether `[n]P = O` for `trials` random points.
    pub fn order_probable<R: Rng>(&self, n: u64, trials: usize, rng: &mut R) -> bool {
        let k = Integer::from(n);
        (0..trials).all(|_| self.mul(&self.random_point(rng), &k).is_infinity())
    }

    /// Quadratic twist by a non-square `c`, as a short model.
    pub fn quadratic_twist(&self, c: &Fp) -> Result<Self> {
        let (a, b) = self.short_coefficients()?;
        Ok(Self::short(a.mul(&c.square()), b.mul(&c.square().mul(c))))
    }

    /// `(A, B)` of an isomorphic short model (`p > 3`).
    pub fn short_coefficients(&self) -> Result<(Fp, Fp)> {
        let p = self.prime();
        if p <= 3 {
            return Err(Error::Precondition("short models need p > 3".into()));
        }
        let c4 = self.c4();
        let c6 = self.c6();
        Ok((c4.mul_i64(-27), c6.mul_i64(-54)))
    }
}

fn nonresidue(p: u64) -> Fp {
    let mut c = 2u64;
    while kronecker(c as i64, p as i64) != -1 {
        c += 1;
    }
    Fp { v: c, p }
}

/// A generator of `𝔽_p^*`.
pub fn primitive_root(p: u64) -> Fp {
    let fs = crate::arith::factor(p - 1);
    let mut g = 2u64;
    loop {
        if fs.iter().all(|&(q, _)| pow_mod(g, (p - 1) / q, p) != 1) {
            return Fp { v: g, p };
        }
        g += 1;
    }
}

/// All twists (up to isomorphism) of a curve over `𝔽_p` with invariant `j`.
pub fn curves_with_j(j: &Fp) -> Result<Vec<WeierstrassModel<Fp>>> {
    let p = j.p;
    if p <= 3 || !is_prime(p) {
        return Err(Error::Precondition(format!("{p} must be a prime > 3")));
    }
    let z = Fp { v: 0, p };
    let g = primitive_root(p);
    if j.v == 0 {
        return Ok((0..6).map(|i| WeierstrassModel::short(z, g.pow(i))).collect());
    }
    if j.v == 1728 % p {
        return Ok((0..4).map(|i| WeierstrassModel::short(g.pow(i), z)).collect());
    }
    let k = j.mul(&Fp::new(1728, p).sub(j).inv().unwrap());
    let e = WeierstrassModel::short(k.mul_i64(3), k.mul_i64(2));
    let t = e.quadratic_twist(&nonresidue(p))?;
    Ok(vec![e, t])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_torsion_of_x0plus119() {
        let e = x0plus119();
        let t = x0plus119_torsion();
        for p in &t {
            assert!(e.contains(p));
        }
        assert_eq!(e.torsion_order(&t[1], 10), Some(4));
        assert!(e.double(&t[1]).eq_f(&t[2]));
        assert!(e.neg(&t[1]).eq_f(&t[3]));
        assert_eq!(e.torsion_order(&t[2], 10), Some(2));
    }

    #[test]
    fn short_model_transform() {
        let e = x0plus119();
        let half = Rational::from((1, 2));
        // complete the square and scale by 2: X = 4x, Y = 8y + 12x - 4
        let sub = Substitution { u: half.clone(), r: Rational::new(), s: Rational::from((-3, 2)), t: half.clone() };
        let f = e.transform(&sub).unwrap();
        assert_eq!((f.a1.clone(), f.a3.clone()), (Rational::new(), Rational::new()));
        assert_eq!((f.a2.clone(), f.a4.clone(), f.a6.clone()), (Rational::from(-3), Rational::from(-8), Rational::from(16)));
        let p = e.map_point(&sub, &Point::Affine(Rational::from(1), Rational::from(-1)));
        assert_eq!(p, Point::Affine(Rational::from(4), Rational::from(0)));
        assert_eq!(e.j_invariant(), f.j_invariant());
    }

    #[test]
    fn twists_over_small_prime() {
        let p = 101;
        let j = Fp::new(5, p);
        let cs = curves_with_j(&j).unwrap();
        let n: Vec<u64> = cs.iter().map(|c| c.point_count_naive()).collect();
        assert_eq!(n[0] + n[1], 2 * (p + 1));
        for c in &cs {
            assert_eq!(c.j_invariant().unwrap(), j);
        }
    }
}
