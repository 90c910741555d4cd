//! Truncated Laurent series in a fractional nome `q^(1/denom)`.

use super::apcomplex::APComplex;
use crate::error::{Error, Result};
use rug::{Float, Integer, Rational};
use std::fmt;

/// Truncation order used for series that are exact (finite) expressions.
pub const EXACT: i64 = i64::MAX / 8;

/// `Σ coeffs[k] · q^((val + k)/denom) + O(q^(trunc/denom))`.
///
/// A nonzero series has `coeffs[0] != 0` and `val < trunc`; the zero series
/// has no coefficients and `val == trunc`.
#[derive(Clone, PartialEq)]
pub struct LaurentSeries {
    denom: u32,
    val: i64,
    coeffs: Vec<Rational>,
    trunc: i64,
}

impl LaurentSeries {
    pub fn new(denom: u32, val: i64, coeffs: Vec<Rational>, trunc: i64) -> Self {
        assert!(denom > 0, "series denominator must be positive");
        let mut s = LaurentSeries { denom, val, coeffs, trunc };
        s.normalize();
        s
    }

    pub fn from_i64s(denom: u32, val: i64, coeffs: &[i64], trunc: i64) -> Self {
        Self::new(denom, val, coeffs.iter().map(|&c| Rational::from(c)).collect(), trunc)
    }

    pub fn from_integers(denom: u32, val: i64, coeffs: &[Integer], trunc: i64) -> Self {
        Self::new(denom, val, coeffs.iter().map(Rational::from).collect(), trunc)
    }

    pub fn zero(denom: u32, trunc: i64) -> Self {
        LaurentSeries { denom, val: trunc, coeffs: Vec::new(), trunc }
    }

    pub fn constant(c: Rational, denom: u32) -> Self {
        Self::new(denom, 0, vec![c], EXACT)
    }

    /// `q^(e/denom)`, exact.
    pub fn monomial(denom: u32, e: i64) -> Self {
        Self::new(denom, e, vec![Rational::from(1)], EXACT)
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().position(|c| *c != 0);
        match lead {
            None => {
                self.coeffs.clear();
                self.val = self.trunc;
            }
            Some(k) => {
                self.coeffs.drain(..k);
                self.val += k as i64;
                let keep = (self.trunc - self.val).max(0) as usize;
                self.coeffs.truncate(keep);
                while self.coeffs.last().is_some_and(|c| *c == 0) {
                    self.coeffs.pop();
                }
                if self.coeffs.is_empty() {
                    self.val = self.trunc;
                }
            }
        }
    }

    pub fn denom(&self) -> u32 {
        self.denom
    }

    /// Valuation (in units of `1/denom`); equals `trunc` for the zero series.
    pub fn val(&self) -> i64 {
        self.val
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `q^(e/denom)`; `None` beyond the truncation.
    pub fn coeff(&self, e: i64) -> Option<Rational> {
        if e >= self.trunc {
            return None;
        }
        if e < self.val {
            return Some(Rational::new());
        }
        Some(self.coeffs.get((e - self.val) as usize).cloned().unwrap_or_default())
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.first()
    }

    pub fn truncate(&self, trunc: i64) -> Self {
        Self::new(self.denom, self.val, self.coeffs.clone(), trunc.min(self.trunc))
    }

    /// Forget the truncation: treat the known terms as an exact expression cut at `trunc`.
    pub fn with_trunc(&self, trunc: i64) -> Self {
        Self::new(self.denom, self.val, self.coeffs.clone(), trunc)
    }

    /// Re-express in the nome `q^(1/new_denom)`; `new_denom` must be a multiple of `denom`.
    pub fn rescale(&self, new_denom: u32) -> Result<Self> {
        if !new_denom.is_multiple_of(self.denom) {
            return Err(Error::DenomMismatch(self.denom, new_denom));
        }
        let f = (new_denom / self.denom) as i64;
        let mut coeffs = vec![Rational::new(); self.coeffs.len().saturating_sub(1) * f as usize + 1];
        if self.coeffs.is_empty() {
            return Ok(Self::zero(new_denom, scale_trunc(self.trunc, f)));
        }
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k * f as usize] = c.clone();
        }
        Ok(Self::new(new_denom, self.val * f, coeffs, scale_trunc(self.trunc, f)))
    }

    /// Substitute `q -> q^f` keeping the same denominator.
    pub fn dilate(&self, f: u32) -> Self {
        let f = f as i64;
        if self.coeffs.is_empty() {
            return Self::zero(self.denom, scale_trunc(self.trunc, f));
        }
        let mut coeffs = vec![Rational::new(); (self.coeffs.len() - 1) * f as usize + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k * f as usize] = c.clone();
        }
        Self::new(self.denom, self.val * f, coeffs, scale_trunc(self.trunc, f))
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.denom != other.denom {
            Err(Error::DenomMismatch(self.denom, other.denom))
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.add_signed(other, false))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.add_signed(other, true))
    }

    fn add_signed(&self, other: &Self, negate: bool) -> Self {
        let trunc = self.trunc.min(other.trunc);
        let lo = self.val.min(other.val).min(trunc);
        let end = |s: &Self| s.val + s.coeffs.len() as i64;
        let hi = trunc.min(end(self).max(end(other)));
        let mut coeffs = vec![Rational::new(); (hi - lo).max(0) as usize];
        for (k, c) in self.coeffs.iter().enumerate() {
            let e = self.val + k as i64;
            if e < hi {
                coeffs[(e - lo) as usize] += c;
            }
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            let e = other.val + k as i64;
            if e < hi {
                if negate {
                    coeffs[(e - lo) as usize] -= c;
                } else {
                    coeffs[(e - lo) as usize] += c;
                }
            }
        }
        Self::new(self.denom, lo, coeffs, trunc)
    }

    pub fn neg(&self) -> Self {
        Self::new(self.denom, self.val, self.coeffs.iter().map(|c| Rational::from(-c)).collect(), self.trunc)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::new(self.denom, self.val, self.coeffs.iter().map(|c| Rational::from(c * k)).collect(), self.trunc)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let trunc = sat_add(self.trunc, other.val).min(sat_add(other.trunc, self.val));
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.denom, trunc));
        }
        let val = self.val + other.val;
        let n = ((trunc - val).max(0) as usize).min(self.coeffs.len() + other.coeffs.len() - 1);
        let mut coeffs = vec![Rational::new(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= n {
                break;
            }
            if *a == 0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                coeffs[i + j] += Rational::from(a * b);
            }
        }
        Ok(Self::new(self.denom, val, coeffs, trunc))
    }

    /// Multiplicative inverse; requires a nonzero series.
    pub fn inverse(&self) -> Result<Self> {
        let a0 = self.leading().ok_or(Error::SingularSeed)?.clone();
        let n = (self.trunc - self.val).min(EXACT / 2) as usize;
        let n = if self.trunc >= EXACT { self.coeffs.len().max(1) } else { n };
        let inv0 = Rational::from(a0.recip_ref());
        let mut b: Vec<Rational> = Vec::with_capacity(n);
        b.push(inv0.clone());
        for m in 1..n {
            let mut s = Rational::new();
            for k in 1..=m.min(self.coeffs.len() - 1) {
                s += Rational::from(&self.coeffs[k] * &b[m - k]);
            }
            b.push(-(s * &inv0));
        }
        let trunc = if self.trunc >= EXACT {
            if self.coeffs.len() == 1 {
                EXACT
            } else {
                return Err(Error::Precondition("inverse of an exact non-monomial needs a truncation".into()));
            }
        } else {
            self.trunc - 2 * self.val
        };
        Ok(Self::new(self.denom, -self.val, b, trunc))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inverse()?)
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Self::constant(Rational::from(1), self.denom);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Whether every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| *c.denom() == 1)
    }

    pub fn integer_coeffs(&self) -> Option<Vec<Integer>> {
        self.coeffs.iter().map(|c| if *c.denom() == 1 { Some(c.numer().clone()) } else { None }).collect()
    }
}

fn scale_trunc(t: i64, f: i64) -> i64 {
    if t >= EXACT {
        EXACT
    } else {
        t * f
    }
}

fn sat_add(a: i64, b: i64) -> i64 {
    if a >= EXACT || b >= EXACT {
        EXACT.max(a.saturating_add(b).min(EXACT))
    } else {
        a + b
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q^(1/{}): ", self.denom)?;
        for (k, c) in self.coeffs.iter().enumerate().take(12) {
            if *c != 0 {
                write!(f, "{}·q^{} ", c, self.val + k as i64)?;
            }
        }
        if self.trunc < EXACT {
            write!(f, "+ O(q^{})", self.trunc)
        } else {
            write!(f, "(exact)")
        }
    }
}

/// Evaluate `P(s) = Σ poly[i] s^i`.
pub fn eval_poly_series(poly: &[LaurentSeries], s: &LaurentSeries) -> Result<LaurentSeries> {
    let mut acc = poly.last().cloned().ok_or_else(|| Error::Precondition("empty polynomial".into()))?;
    for c in poly.iter().rev().skip(1) {
        acc = acc.mul(s)?.add(c)?;
    }
    Ok(acc)
}

/// Formal derivative in the polynomial variable.
pub fn derive_poly(poly: &[LaurentSeries]) -> Vec<LaurentSeries> {
    poly.iter().enumerate().skip(1).map(|(i, c)| c.scale(&Rational::from(i as i64))).collect()
}

/// Newton lifting of a root of `P(Y) = Σ poly[i] Y^i` starting from `seed`.
///
/// The returned series is known modulo `q^(target/denom)`; its terms below the
/// seed truncation must agree with the seed, otherwise the seed was inconsistent.
pub fn series_newton_root(poly: &[LaurentSeries], seed: &LaurentSeries, target: i64) -> Result<LaurentSeries> {
    if poly.len() < 2 {
        return Err(Error::Precondition("polynomial must have degree >= 1".into()));
    }
    let dpoly = derive_poly(poly);
    // guard terms absorb the truncation lost when P'(s) has cancelling leading terms
    let work = target + NEWTON_GUARD;
    let mut s = seed.with_trunc(work);
    for _ in 0..200 {
        let r = eval_poly_series(poly, &s)?;
        let d = eval_poly_series(&dpoly, &s)?;
        if d.is_zero() {
            return Err(Error::SingularSeed);
        }
        let delta = r.div(&d)?;
        let next = s.sub(&delta)?;
        if delta.is_zero() {
            if next.trunc() < target {
                return Err(Error::InsufficientPrecision(format!(
                    "coefficients only determine the root to order {}",
                    next.trunc()
                )));
            }
            let out = next.truncate(target);
            let lim = seed.trunc().min(out.trunc());
            for e in seed.val().min(out.val())..lim {
                if seed.coeff(e) != out.coeff(e) {
                    return Err(Error::NoConvergence(format!("seed disagrees with root at q^{e}")));
                }
            }
            return Ok(out);
        }
        s = next.with_trunc(work);
    }
    Err(Error::NoConvergence("iteration limit reached".into()))
}

/// Extra series terms carried during Newton lifting.
pub const NEWTON_GUARD: i64 = 16;

/// Evaluate a series at `z` in the upper half plane with nome `exp(2πi z/denom)`.
///
/// Returns the value and a heuristic bound on the truncation tail: the largest
/// of the last few kept terms times the geometric factor `|t| / (1 - |t|)`.
pub fn eval_series(f: &LaurentSeries, z: &APComplex, prec: u32) -> (APComplex, f64) {
    let t = nome(z, f.denom(), prec);
    let tabs = t.abs().to_f64();
    let mut acc = APComplex::zero(prec);
    for c in f.coeffs().iter().rev() {
        acc = &acc * &t;
        acc = acc + APComplex::from_rational(c, prec);
    }
    let lead = t.powi(f.val());
    let value = &acc * &lead;
    let n = f.coeffs().len();
    let mut tail: f64 = 0.0;
    for (k, c) in f.coeffs().iter().enumerate().skip(n.saturating_sub(4)) {
        let mag = c.to_f64().abs() * tabs.powf((f.val() + k as i64) as f64);
        tail = tail.max(mag);
    }
    if tabs < 1.0 {
        tail *= tabs / (1.0 - tabs);
    } else {
        tail = f64::INFINITY;
    }
    (value, tail)
}

/// `exp(2πi z / denom)`.
pub fn nome(z: &APComplex, denom: u32, prec: u32) -> APComplex {
    let two_pi = Float::with_val(prec, APComplex::pi(prec) * 2u32) / denom;
    let arg = (z.with_prec(prec) * APComplex::i(prec)).mul_float(&two_pi);
    arg.exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        Rational::from(n)
    }

    #[test]
    fn inverse_of_one_minus_q() {
        let s = LaurentSeries::from_i64s(1, 0, &[1, -1], 10);
        let inv = s.inverse().unwrap();
        assert_eq!(inv.coeffs().len(), 10);
        assert!(inv.coeffs().iter().all(|c| *c == 1));
        let one = s.mul(&inv).unwrap();
        assert_eq!(one.coeffs(), &[r(1)]);
        assert_eq!(one.trunc(), 10);
    }

    #[test]
    fn sqrt_one_plus_q() {
        let p = vec![
            LaurentSeries::from_i64s(1, 0, &[-1, -1], EXACT),
            LaurentSeries::zero(1, EXACT),
            LaurentSeries::constant(r(1), 1),
        ];
        let seed = LaurentSeries::from_i64s(1, 0, &[1], 1);
        let root = series_newton_root(&p, &seed, 8).unwrap();
        let expect = [r(1), Rational::from((1, 2)), Rational::from((-1, 8)), Rational::from((1, 16)), Rational::from((-5, 128))];
        for (k, e) in expect.iter().enumerate() {
            assert_eq!(root.coeff(k as i64).unwrap(), *e);
        }
    }

    #[test]
    fn denominators_must_match() {
        let a = LaurentSeries::from_i64s(1, 0, &[1], 5);
        let b = LaurentSeries::from_i64s(24, 0, &[1], 5);
        assert_eq!(a.add(&b), Err(Error::DenomMismatch(1, 24)));
    }

    #[test]
    fn zero_derivative_is_singular() {
        let p = vec![LaurentSeries::from_i64s(1, 0, &[1], 6), LaurentSeries::zero(1, 6)];
        let seed = LaurentSeries::from_i64s(1, 0, &[1], 1);
        assert_eq!(series_newton_root(&p, &seed, 6), Err(Error::SingularSeed));
    }

    #[test]
    fn exact_products_stay_small() {
        let a = LaurentSeries::from_i64s(1, 0, &[1, 1], EXACT);
        let b = a.mul(&a).unwrap().add(&a).unwrap();
        assert_eq!(b.coeffs(), &[r(2), r(3), r(1)]);
        assert_eq!(b.trunc(), EXACT);
    }

    #[test]
    fn truncation_of_products() {
        let a = LaurentSeries::from_i64s(1, -2, &[1, 1], 3);
        let b = LaurentSeries::from_i64s(1, 1, &[2], 7);
        let c = a.mul(&b).unwrap();
        assert_eq!(c.val(), -1);
        assert_eq!(c.trunc(), 4);
    }
}
