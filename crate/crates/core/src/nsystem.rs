//! CM parameters `(a, b, c)` with `N | c` and N-systems of quadratic forms.

use crate::arith::{crt, factor, gcd, is_squarefree, ord, xgcd};
use crate::error::{Error, Result};
use crate::numerics::APComplex;
use crate::quadforms::{enumerate_reduced, form_to_tau, Discriminant, QuadForm};
use rug::Rational;

/// How `b` is chosen in [`find_abc`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AbcMode {
    /// Smallest `b >= 0` with `b² ≡ D (mod 4N)`.
    Generic,
    /// `N | D`: `b ∈ {0, N}`, giving a form fixed by the Fricke involution up to equivalence.
    Ramified,
    /// `b² ≡ D (mod 4N)` and `gcd((b² - D)/(4N), N) = 1`, with `b` the smallest
    /// such integer in the class `±b0 (mod 2N)` of the smallest square root `b0`
    /// of `D` modulo `4N` (any admissible `b` if that class has none).
    Plus,
}

/// A CM form `(a, b, c)` of discriminant `D` with `N | c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CMParams {
    pub d: Discriminant,
    pub n: u64,
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl CMParams {
    pub fn form(&self) -> QuadForm {
        QuadForm::new(self.a, self.b, self.c)
    }

    pub fn tau(&self, prec: u32) -> APComplex {
        form_to_tau(&self.form(), prec)
    }
}

fn is_square_mod(d: i64, m: i64) -> bool {
    (0..m).any(|b| (b * b - d).rem_euclid(m) == 0)
}

/// Which of the three obstructions to a Fricke-compatible `b` applies, if any.
///
/// Returns 1, 2 or 3 for, respectively: a prime `p | N` with `ord_p(N)` odd and
/// `ord_p(D) > ord_p(4N)`; `D = 2^(m+1)·d` with `d ≡ 1 (mod 4)`; `D = 2^m·d` with
/// `d ≡ 1 (mod 8)`, where `m = ord_2(N) > 0`.
pub fn plus_obstruction(d: i64, n: u64) -> Option<u8> {
    for (p, e) in factor(n) {
        let e4 = e + if p == 2 { 2 } else { 0 };
        if e % 2 == 1 && ord(p, d) > e4 {
            return Some(1);
        }
    }
    let m = ord(2, n as i64);
    if m > 0 && m < 62 {
        let s = 1i64 << (m + 1);
        if d % s == 0 && ((d / s).rem_euclid(4)) == 1 {
            return Some(2);
        }
        let s = 1i64 << m;
        if d % s == 0 && ((d / s).rem_euclid(8)) == 1 {
            return Some(3);
        }
    }
    None
}

/// Find `(a, b, c)` with `a = 1`, `N | c` and `b` chosen according to `mode`.
pub fn find_abc(d: Discriminant, n: u64, mode: AbcMode) -> Result<CMParams> {
    if n == 0 {
        return Err(Error::Precondition("N must be positive".into()));
    }
    let dv = d.value();
    let ni = n as i64;
    let m4 = 4 * ni;
    if !is_square_mod(dv, m4) {
        return Err(Error::NoValidB(format!("D = {dv} is not a square modulo 4N = {m4}")));
    }
    let b = match mode {
        AbcMode::Generic => (0..2 * ni).find(|b| (b * b - dv).rem_euclid(m4) == 0).unwrap(),
        AbcMode::Ramified => {
            let ok = if n % 2 == 1 { dv % ni == 0 } else { dv % m4 == 0 };
            if !ok {
                return Err(Error::Precondition(format!("N = {n} does not divide D = {dv} as required")));
            }
            let b = if dv.rem_euclid(2) == 1 { ni } else { 0 };
            if (b * b - dv).rem_euclid(m4) != 0 {
                return Err(Error::NoValidB(format!("b = {b} fails b² ≡ D (mod 4N)")));
            }
            b
        }
        AbcMode::Plus => {
            let lim = (8 * ni * ni).max(2 * ni);
            let admissible = |b: i64| {
                let t = b as i128 * b as i128 - dv as i128;
                t % m4 as i128 == 0 && gcd(((t / m4 as i128) % ni as i128) as i64, ni) == 1
            };
            // orbit class (b mod 2N, up to sign) of the smallest square root
            let b0 = (0..2 * ni).find(|b| (b * b - dv).rem_euclid(m4) == 0).unwrap();
            let same_class = |b: i64| (b - b0).rem_euclid(2 * ni) == 0 || (b + b0).rem_euclid(2 * ni) == 0;
            let found = (1..=lim).find(|&b| same_class(b) && admissible(b)).or_else(|| (1..=lim).find(|&b| admissible(b)));
            match found {
                Some(b) => b,
                None => {
                    let why = match plus_obstruction(dv, n) {
                        Some(k) => format!("exceptional case ({k}) for D = {dv}, N = {n}"),
                        None => format!("no admissible b for D = {dv}, N = {n}"),
                    };
                    return Err(Error::NoValidB(why));
                }
            }
        }
    };
    let c = (b * b - dv) / 4;
    Ok(CMParams { d, n, a: 1, b, c })
}

fn min_coprime_value(f: &QuadForm, n: i64) -> (i64, i64, i64) {
    let mut lim = 4i64;
    loop {
        let mut best: Option<(i64, i64, i64)> = None;
        for y in 0..=lim {
            for x in -lim..=lim {
                if (y == 0 && x != 1) || gcd(x, y) != 1 {
                    continue;
                }
                let v = f.eval(x, y) as i64;
                if gcd(v, n) == 1 && best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, x, y));
                }
            }
        }
        if let Some((v, x, y)) = best {
            // f(x, y) >= (3/4)·a·max(|x|, |y|)² for reduced f
            if 3 * f.a * (lim + 1) * (lim + 1) > 4 * v {
                return (v, x, y);
            }
        }
        lim *= 2;
    }
}

/// One form per class with `gcd(a_i, N) = 1`, `N | c_i` and `b_i ≡ b (mod 2N)`.
///
/// The class of the input form is represented by the input itself.
pub fn build_nsystem(p: &CMParams) -> Result<Vec<QuadForm>> {
    let n = p.n as i64;
    let dv = p.d.value();
    let base = p.form();
    if base.disc() != dv || base.c % n != 0 || gcd(base.a, n) != 1 {
        return Err(Error::Precondition("input form is not a CM form with N | c".into()));
    }
    let base_red = base.reduce();
    let mut out = Vec::new();
    for f in enumerate_reduced(p.d) {
        if f == base_red {
            out.push(base);
            continue;
        }
        let (a, x0, y0) = min_coprime_value(&f, n);
        let (_, s, r) = xgcd(x0 as i128, y0 as i128);
        // x0·s + y0·r = 1, so [[x0, -r], [y0, s]] has determinant 1
        let g = f.transform(x0, -(r as i64), y0, s as i64);
        debug_assert_eq!(g.a, a);
        let (b, l) = crt(p.b as i128, 2 * n as i128, g.b as i128, 2 * a as i128)
            .ok_or_else(|| Error::Internal("inconsistent congruences for b".into()))?;
        let mut b = b;
        if b > l / 2 {
            b -= l;
        }
        let num = b * b - dv as i128;
        if num % (4 * a as i128) != 0 {
            return Err(Error::Internal("c is not integral".into()));
        }
        let c = (num / (4 * a as i128)) as i64;
        let q = QuadForm::new(a, b as i64, c);
        debug_assert_eq!(q.reduce(), f);
        out.push(q);
    }
    Ok(out)
}

/// Whether the values on the N-system are fixed by complex conjugation.
pub fn is_real_case(p: &CMParams, plus: bool) -> bool {
    let n = p.n as i64;
    if plus && gcd((p.c / n).rem_euclid(n.max(1)), n) == 1 {
        return true;
    }
    p.b % n == 0 && p.c % n == 0 && gcd(p.a, n) == 1
}

/// Density of negative discriminants admitting a Fricke-compatible CM form.
pub fn density(n: u64, fundamental_only: bool) -> Result<Rational> {
    if n.is_multiple_of(2) || !is_squarefree(n) {
        return Err(Error::Precondition(format!("N = {n} must be odd and squarefree")));
    }
    let mut r = Rational::from(1);
    for (p, _) in factor(n) {
        let p = p as i64;
        let num = p * p + p - 2;
        let den = if fundamental_only { 2 * (p * p - 1) } else { 2 * p * p };
        r *= Rational::from((num, den));
    }
    Ok(r)
}

/// Fast form of the admissibility test for odd squarefree `N`: every `p | N`
/// has `(D/p) = 1` or `ord_p(D) = 1`.
pub fn plus_admissible(d: i64, n: u64) -> bool {
    factor(n).into_iter().all(|(p, _)| {
        let p = p as i64;
        let v = ord(p as u64, d);
        if v == 0 {
            crate::arith::kronecker(d, p) == 1
        } else {
            v == 1
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(d: i64) -> Discriminant {
        Discriminant::new(d).unwrap()
    }

    #[test]
    fn plus_mode_small_examples() {
        let p = find_abc(disc(-52), 119, AbcMode::Plus).unwrap();
        assert_eq!(p.b * p.b - 4 * p.c, -52);
        assert_eq!(p.c % 119, 0);
        assert_eq!(gcd(p.c / 119, 119), 1);
        let sys = build_nsystem(&p).unwrap();
        assert_eq!(sys.len(), 2);
        for f in &sys {
            assert_eq!(f.disc(), -52);
            assert_eq!(f.c % 119, 0);
            assert_eq!((f.b - p.b).rem_euclid(238), 0);
            assert_eq!(gcd(f.a, 119), 1);
        }
    }

    #[test]
    fn ramified_branch() {
        let p = find_abc(disc(-4 * 15 * 15), 15, AbcMode::Ramified).unwrap();
        assert_eq!((p.a, p.b, p.c), (1, 0, 225));
        let p = find_abc(disc(-7 * 5), 7, AbcMode::Ramified).unwrap();
        assert_eq!(p.b, 7);
        assert!(is_real_case(&p, false));
    }

    #[test]
    fn densities() {
        assert_eq!(density(119, true).unwrap(), Rational::from((19, 64)));
        assert_eq!(density(119, false).unwrap(), Rational::from((4104, 14161)));
        assert_eq!(density(1, false).unwrap(), 1);
        assert!(density(12, false).is_err());
    }

    #[test]
    fn singleton_system_is_input() {
        let p = find_abc(disc(-163), 41, AbcMode::Generic).unwrap();
        assert_eq!(build_nsystem(&p).unwrap(), vec![p.form()]);
    }
}
