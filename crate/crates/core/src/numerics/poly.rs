//! Dense integer polynomials.

use super::apcomplex::APComplex;
use crate::error::{Error, Result};
use rug::{Complete, Integer, Rational};
use std::fmt;

/// Dense univariate polynomial over ℤ; `coeffs[i]` multiplies `X^i`.
///
/// No trailing zero coefficients are stored, so the zero polynomial is empty.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct IntPolyUV {
    coeffs: Vec<Integer>,
}

impl IntPolyUV {
    pub fn new(mut coeffs: Vec<Integer>) -> Self {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        IntPolyUV { coeffs }
    }

    pub fn from_i64s(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| Integer::from(v)).collect())
    }

    pub fn zero() -> Self {
        IntPolyUV { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_i64s(&[1])
    }

    /// `X - r`.
    pub fn linear(r: &Integer) -> Self {
        Self::new(vec![Integer::from(-r), Integer::from(1)])
    }

    pub fn monomial(c: Integer, deg: usize) -> Self {
        let mut v = vec![Integer::new(); deg + 1];
        v[deg] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Integer> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Integer {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn lead(&self) -> Option<&Integer> {
        self.coeffs.last()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| Integer::from(-c)).collect())
    }

    pub fn scale(&self, k: &Integer) -> Self {
        Self::new(self.coeffs.iter().map(|c| Integer::from(c * k)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Integer::new(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| Integer::from(c * i as u64)).collect())
    }

    /// `P(k·X)`.
    pub fn scale_var(&self, k: &Integer) -> Self {
        let mut pw = Integer::from(1);
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(Integer::from(c * &pw));
            pw *= k;
        }
        Self::new(out)
    }

    /// `P(X + t)`.
    pub fn shift(&self, t: &Integer) -> Self {
        let mut out = Self::zero();
        let lin = Self::new(vec![t.clone(), Integer::from(1)]);
        for c in self.coeffs.iter().rev() {
            out = out.mul(&lin).add(&Self::new(vec![c.clone()]));
        }
        out
    }

    pub fn content(&self) -> Integer {
        let mut g = Integer::new();
        for c in &self.coeffs {
            g.gcd_mut(c);
        }
        g
    }

    /// Divide every coefficient by `k`, failing if any division is inexact.
    pub fn div_exact_scalar(&self, k: &Integer) -> Result<Self> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            let (q, r) = c.div_rem_ref(k).complete();
            if r != 0 {
                return Err(Error::Divisibility(format!("{c} by {k}")));
            }
            out.push(q);
        }
        Ok(Self::new(out))
    }

    /// Exact quotient `self / d` over ℤ.
    pub fn div_exact(&self, d: &Self) -> Result<Self> {
        let (q, r) = self.divrem_rational(d)?;
        if !r.iter().all(|c| *c == 0) {
            return Err(Error::Divisibility("polynomial remainder is nonzero".into()));
        }
        let mut out = Vec::with_capacity(q.len());
        for c in q {
            if *c.denom() != 1 {
                return Err(Error::Divisibility("non-integral quotient".into()));
            }
            out.push(c.into_numer_denom().0);
        }
        Ok(Self::new(out))
    }

    /// Quotient and remainder over ℚ.
    pub fn divrem_rational(&self, d: &Self) -> Result<(Vec<Rational>, Vec<Rational>)> {
        let dd = d.degree().ok_or_else(|| Error::Precondition("division by zero polynomial".into()))?;
        let mut r: Vec<Rational> = self.coeffs.iter().map(Rational::from).collect();
        if self.coeffs.len() <= dd {
            return Ok((Vec::new(), r));
        }
        let lead = Rational::from(d.lead().unwrap());
        let mut q = vec![Rational::new(); self.coeffs.len() - dd];
        for i in (0..q.len()).rev() {
            let c = Rational::from(&r[i + dd] / &lead);
            if c != 0 {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[i + j] -= Rational::from(&c * dc);
                }
            }
            q[i] = c;
        }
        r.truncate(dd);
        Ok((q, r))
    }

    pub fn eval_integer(&self, x: &Integer) -> Integer {
        let mut acc = Integer::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn eval_rational(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn eval_complex(&self, x: &APComplex) -> APComplex {
        let p = x.prec();
        let mut acc = APComplex::zero(p);
        for c in self.coeffs.iter().rev() {
            acc = &acc * x + APComplex::from_integer(c, p);
        }
        acc
    }

    /// `Σ |a_i|`.
    pub fn norm1(&self) -> Integer {
        self.coeffs.iter().map(|c| c.clone().abs()).sum()
    }

    /// `max |a_i|`.
    pub fn norm_inf(&self) -> Integer {
        self.coeffs.iter().map(|c| c.clone().abs()).max().unwrap_or_default()
    }

    /// Total bit size of all nonzero coefficients.
    pub fn bit_length(&self) -> u64 {
        self.coeffs.iter().map(|c| c.significant_bits() as u64).sum()
    }

    /// Pretty form in the variable `var`, highest degree first.
    pub fn pretty(&self, var: &str) -> String {
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            terms.push((c.clone(), mono));
        }
        join_terms(&terms)
    }
}

pub(crate) fn join_terms(terms: &[(Integer, String)]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (k, (c, mono)) in terms.iter().enumerate() {
        let neg = *c < 0;
        let a = c.clone().abs();
        if k == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        if mono.is_empty() {
            s.push_str(&a.to_string());
        } else if a == 1 {
            s.push_str(mono);
        } else {
            s.push_str(&format!("{a}{mono}"));
        }
    }
    s
}

impl fmt::Debug for IntPolyUV {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pretty("X"))
    }
}

impl fmt::Display for IntPolyUV {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pretty("X"))
    }
}

/// `A(X) + B(X)·Y`, the shape of every function in `L(∞O)` on a Weierstrass model.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct IntPolyXY {
    pub a: IntPolyUV,
    pub b: IntPolyUV,
}

impl IntPolyXY {
    pub fn new(a: IntPolyUV, b: IntPolyUV) -> Self {
        IntPolyXY { a, b }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Pole order at the point at infinity (`deg_x = 2`, `deg_y = 3`).
    pub fn pole_order(&self) -> Option<usize> {
        let pa = self.a.degree().map(|d| 2 * d);
        let pb = self.b.degree().map(|d| 2 * d + 3);
        match (pa, pb) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, y) => x.or(y),
        }
    }

    /// Monomials `(coeff, deg_x, deg_y)` sorted by descending pole order.
    pub fn monomials(&self) -> Vec<(Integer, usize, usize)> {
        let mut v: Vec<(Integer, usize, usize)> = Vec::new();
        for (i, c) in self.a.coeffs().iter().enumerate() {
            if *c != 0 {
                v.push((c.clone(), i, 0));
            }
        }
        for (i, c) in self.b.coeffs().iter().enumerate() {
            if *c != 0 {
                v.push((c.clone(), i, 1));
            }
        }
        v.sort_by_key(|(_, dx, dy)| std::cmp::Reverse(2 * dx + 3 * dy));
        v
    }

    pub fn from_monomials(m: &[(Integer, usize, usize)]) -> Result<Self> {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (c, dx, dy) in m {
            let tgt = match dy {
                0 => &mut a,
                1 => &mut b,
                _ => return Err(Error::Parse(format!("y-degree {dy} is not reduced"))),
            };
            if tgt.len() <= *dx {
                tgt.resize(dx + 1, Integer::new());
            }
            tgt[*dx] += c;
        }
        Ok(IntPolyXY { a: IntPolyUV::new(a), b: IntPolyUV::new(b) })
    }

    /// Coefficient of the monomial of highest pole order.
    pub fn leading_coeff(&self) -> Option<Integer> {
        self.monomials().first().map(|m| m.0.clone())
    }

    pub fn content(&self) -> Integer {
        Integer::from(self.a.content().gcd_ref(&self.b.content()))
    }

    /// Primitive and with positive leading coefficient.
    pub fn normalized(&self) -> Self {
        let mut g = self.content();
        if g == 0 {
            return self.clone();
        }
        if self.leading_coeff().is_some_and(|c| c < 0) {
            g = -g;
        }
        IntPolyXY {
            a: self.a.div_exact_scalar(&g).expect("content divides"),
            b: self.b.div_exact_scalar(&g).expect("content divides"),
        }
    }

    pub fn neg(&self) -> Self {
        IntPolyXY { a: self.a.neg(), b: self.b.neg() }
    }

    pub fn eval_complex(&self, x: &APComplex, y: &APComplex) -> APComplex {
        self.a.eval_complex(x) + self.b.eval_complex(x) * y
    }

    pub fn eval_rational(&self, x: &Rational, y: &Rational) -> Rational {
        self.a.eval_rational(x) + self.b.eval_rational(x) * y
    }

    pub fn norm1(&self) -> Integer {
        self.a.norm1() + self.b.norm1()
    }

    pub fn norm_inf(&self) -> Integer {
        self.a.norm_inf().max(self.b.norm_inf())
    }

    pub fn bit_length(&self) -> u64 {
        self.a.bit_length() + self.b.bit_length()
    }

    /// Human-readable form ordered by x-degree, `y`-terms first.
    pub fn pretty(&self) -> String {
        let mut v: Vec<(Integer, usize, usize)> = self.monomials();
        v.sort_by_key(|(_, dx, dy)| std::cmp::Reverse((*dx, *dy)));
        let terms: Vec<(Integer, String)> = v
            .into_iter()
            .map(|(c, dx, dy)| {
                let mut m = match dx {
                    0 => String::new(),
                    1 => "x".to_string(),
                    _ => format!("x^{dx}"),
                };
                if dy == 1 {
                    m.push('y');
                }
                (c, m)
            })
            .collect();
        join_terms(&terms)
    }
}

impl fmt::Debug for IntPolyXY {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pretty())
    }
}

impl fmt::Display for IntPolyXY {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pretty())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_division() {
        let a = IntPolyUV::from_i64s(&[-1, 0, 1]);
        let d = IntPolyUV::from_i64s(&[-1, 1]);
        assert_eq!(a.div_exact(&d).unwrap(), IntPolyUV::from_i64s(&[1, 1]));
        assert!(a.div_exact(&IntPolyUV::from_i64s(&[2, 1])).is_err());
    }

    #[test]
    fn shift_and_scale() {
        let p = IntPolyUV::from_i64s(&[1, 2, 3]);
        let s = p.shift(&Integer::from(1));
        assert_eq!(s, IntPolyUV::from_i64s(&[6, 8, 3]));
        assert_eq!(p.scale_var(&Integer::from(2)), IntPolyUV::from_i64s(&[1, 4, 12]));
    }

    #[test]
    fn pretty_forms() {
        let f = IntPolyXY::new(IntPolyUV::from_i64s(&[0, -3, 1, 1]), IntPolyUV::from_i64s(&[-2, -2]));
        assert_eq!(f.pretty(), "x^3 + x^2 - 2xy - 3x - 2y");
        assert_eq!(f.pole_order(), Some(6));
        let g = IntPolyXY::new(IntPolyUV::from_i64s(&[1]), IntPolyUV::from_i64s(&[1]));
        assert_eq!(g.pretty(), "y + 1");
    }
}
