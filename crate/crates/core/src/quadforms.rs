//! Positive definite binary quadratic forms and class groups of imaginary
//! quadratic orders.

use crate::arith::{gcd, is_squarefree};
use crate::error::{Error, Result};
use crate::numerics::APComplex;
use rug::{Float, Rational};
use std::fmt;

/// A negative discriminant `D ≡ 0, 1 (mod 4)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Discriminant(i64);

impl Discriminant {
    pub fn new(d: i64) -> Result<Self> {
        if d >= 0 || !matches!(d.rem_euclid(4), 0 | 1) {
            return Err(Error::Precondition(format!("{d} is not a negative discriminant")));
        }
        Ok(Discriminant(d))
    }

    pub fn value(self) -> i64 {
        self.0
    }

    pub fn abs(self) -> u64 {
        self.0.unsigned_abs()
    }

    pub fn is_fundamental(self) -> bool {
        is_fundamental(self.0)
    }
}

impl fmt::Display for Discriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn is_fundamental(d: i64) -> bool {
    if d >= 0 {
        return false;
    }
    let n = d.unsigned_abs();
    match d.rem_euclid(4) {
        1 => is_squarefree(n),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// `a X² + b XY + c Y²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        QuadForm { a, b, c }
    }

    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_primitive(&self) -> bool {
        gcd(gcd(self.a, self.b), self.c) == 1
    }

    pub fn is_reduced(&self) -> bool {
        let QuadForm { a, b, c } = *self;
        a > 0 && b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
    }

    /// Value at `(x, y)`.
    pub fn eval(&self, x: i64, y: i64) -> i128 {
        let (x, y) = (x as i128, y as i128);
        self.a as i128 * x * x + self.b as i128 * x * y + self.c as i128 * y * y
    }

    /// Action of `[[p, q], [r, s]]`: `f(p X + q Y, r X + s Y)`.
    pub fn transform(&self, p: i64, q: i64, r: i64, s: i64) -> QuadForm {
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        let (p, q, r, s) = (p as i128, q as i128, r as i128, s as i128);
        let na = a * p * p + b * p * r + c * r * r;
        let nb = 2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s;
        let nc = a * q * q + b * q * s + c * s * s;
        QuadForm::new(na as i64, nb as i64, nc as i64)
    }

    /// The unique reduced form in the proper equivalence class (positive definite input).
    pub fn reduce(&self) -> QuadForm {
        let QuadForm { mut a, mut b, mut c } = *self;
        loop {
            if b.abs() > a || b == -a {
                // normalize b into (-a, a]
                let two_a = 2 * a;
                let k = (a - b).div_euclid(two_a);
                let nb = b + two_a * k;
                c = (nb * nb - self.disc()) / (4 * a);
                b = nb;
            }
            if a > c {
                std::mem::swap(&mut a, &mut c);
                b = -b;
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            if b.abs() <= a && b != -a {
                break;
            }
        }
        QuadForm::new(a, b, c)
    }

    /// Root `τ = (-b + √D)/(2a)` in the upper half plane.
    pub fn tau(&self, prec: u32) -> APComplex {
        form_to_tau(self, prec)
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}]", self.a, self.b, self.c)
    }
}

pub fn form_to_tau(f: &QuadForm, prec: u32) -> APComplex {
    let d = f.disc();
    let re = Rational::from((-f.b, 2 * f.a));
    let im = Float::with_val(prec, -d).sqrt() / (2 * f.a);
    APComplex::from_floats(Float::with_val(prec, &re), im)
}

/// All primitive reduced forms of discriminant `d`, sorted by `(a, b)`.
pub fn enumerate_reduced(d: Discriminant) -> Vec<QuadForm> {
    let dv = d.value();
    let n = -dv;
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= n {
        let mut b = -a + 1;
        while b <= a {
            let num = b * b - dv;
            if num % (4 * a) == 0 {
                let c = num / (4 * a);
                let f = QuadForm::new(a, b, c);
                if c >= a && f.is_reduced() && f.is_primitive() {
                    out.push(f);
                }
            }
            b += 1;
        }
        a += 1;
    }
    out.sort();
    out
}

pub fn class_number(d: Discriminant) -> usize {
    enumerate_reduced(d).len()
}

/// `S(D) = Σ 1/a` over the reduced forms.
pub fn s_sum(d: Discriminant) -> Rational {
    enumerate_reduced(d).iter().map(|f| Rational::from((1, f.a))).sum()
}

/// `h(D)` for every `0 < |D| <= x`, indexed by `|D|` (zero where `-|D|` is not a discriminant).
pub fn class_numbers_up_to(x: u64) -> Vec<u32> {
    let x = x as i64;
    let mut h = vec![0u32; x as usize + 1];
    let mut a = 1i64;
    while 3 * a * a <= x {
        for b in (-a + 1)..=a {
            let mut c = a;
            loop {
                let n = 4 * a * c - b * b;
                if n > x {
                    break;
                }
                let ok = b >= 0 || (c != a);
                if ok && gcd(gcd(a, b), c) == 1 {
                    h[n as usize] += 1;
                }
                c += 1;
            }
        }
        a += 1;
    }
    h
}

/// Conductor `f` of the order: the largest `f` with `D/f²` a discriminant.
pub fn conductor(d: Discriminant) -> u64 {
    let mut f = 1u64;
    let mut n = d.abs();
    for (p, _) in crate::arith::factor(n) {
        while n.is_multiple_of(p * p) && matches!((-((n / (p * p)) as i64)).rem_euclid(4), 0 | 1) {
            f *= p;
            n /= p * p;
        }
    }
    f
}
