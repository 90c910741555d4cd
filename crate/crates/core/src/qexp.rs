//! q-expansions of η, j and of the coordinate functions of `X0+(119)`, and
//! their evaluation at points of the upper half plane.
//!
//! The curve `X0+(119)` is the elliptic curve `y² + 3xy - y = x³ - 3x² + x`
//! with `x, y` expanded in `q^(1/119)`, `q = exp(2πiz)`. The degree-four
//! function `w = x² - x - y` is the eta quotient
//! `η(z/7)η(z/17) / (η(z)η(z/119))`; writing `z = x + y` one has
//! `x² = w + z` and `z² = w(x - 1)`, a triangular system that determines the
//! integer coefficients of `x` and `z` from those of `w`.

use crate::arith::{gcd, xgcd};
use crate::error::{Error, Result};
use crate::numerics::series::{series_newton_root, EXACT};
use crate::numerics::{APComplex, LaurentSeries};
use rug::{Complex, Float, Integer, Rational};
use std::sync::{Arc, OnceLock, RwLock};

/// Level of the modular curve.
pub const LEVEL: i64 = 119;
/// Largest expansion order the evaluator will build.
pub const MAX_ORDER: usize = 60_000;

/// Leading terms of `x` used to seed Newton lifting.
pub const X_SEED: [i64; 8] = [1, 1, 1, 1, 2, 2, 3, 3];

/// Function basis of `L(∞O)`, ordered by pole order at the cusp.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    /// `1, x, y, x², xy, x³, x²y, …`
    Standard,
    /// `w^e · {1, x, z, xz}` with `z = x + y`: `1, x, z, w, xz, wx, wz, w², …`
    EtaMixed,
}

impl Basis {
    pub fn id(self) -> &'static str {
        match self {
            Basis::Standard => "standard",
            Basis::EtaMixed => "etamixed",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "standard" => Ok(Basis::Standard),
            "etamixed" | "eta-mixed" | "eta_mixed" => Ok(Basis::EtaMixed),
            _ => Err(Error::Parse(format!("unknown basis '{s}'"))),
        }
    }

    /// Exponents of the `i`-th basis element: `(deg_x, deg_y)` for the standard
    /// basis, `(deg_x, deg_z)` together with `deg_w` for the eta-mixed one.
    pub fn monomial(self, i: usize) -> BasisMonomial {
        let n = pole_order_of_index(i);
        match self {
            Basis::Standard => {
                if n.is_multiple_of(2) {
                    BasisMonomial { w: 0, x: n / 2, yz: 0 }
                } else {
                    BasisMonomial { w: 0, x: (n - 3) / 2, yz: 1 }
                }
            }
            Basis::EtaMixed => match n % 4 {
                0 => BasisMonomial { w: n / 4, x: 0, yz: 0 },
                2 => BasisMonomial { w: (n - 2) / 4, x: 1, yz: 0 },
                3 => BasisMonomial { w: (n - 3) / 4, x: 0, yz: 1 },
                _ => BasisMonomial { w: (n - 5) / 4, x: 1, yz: 1 },
            },
        }
    }

    /// Index of the basis element with the given pole order (`1` has none).
    pub fn index_of_pole(pole: usize) -> Option<usize> {
        match pole {
            0 => Some(0),
            1 => None,
            n => Some(n - 1),
        }
    }
}

/// `w^w · x^x · (y or z)^yz`, the second factor being `y` in the standard basis
/// and `z` in the eta-mixed one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisMonomial {
    pub w: usize,
    pub x: usize,
    pub yz: usize,
}

/// Pole order of the `i`-th basis element: `0, 2, 3, 4, …`.
pub fn pole_order_of_index(i: usize) -> usize {
    if i == 0 {
        0
    } else {
        i + 1
    }
}

// ---------------------------------------------------------------------------
// integer expansions

/// Coefficients of `∏_{n≥1} (1 - q^n)` below `q^order`.
pub fn euler_product(order: usize) -> Vec<Integer> {
    let mut c = vec![Integer::new(); order];
    let mut k: i64 = 0;
    loop {
        let mut any = false;
        for kk in if k == 0 { vec![0] } else { vec![k, -k] } {
            let e = (kk * (3 * kk - 1) / 2) as usize;
            if e < order {
                c[e] = Integer::from(if k % 2 == 0 { 1 } else { -1 });
                any = true;
            }
        }
        if !any {
            break;
        }
        k += 1;
    }
    c
}

/// `q^4 · w` in the nome `q^(1/119)`, via the logarithmic-derivative recurrence
/// `n f_n = Σ_{k=1}^{n} b_k f_{n-k}`.
fn w_normalized(order: usize) -> Vec<Integer> {
    let a = |m: usize| -> i64 {
        m.is_multiple_of(7) as i64 + m.is_multiple_of(17) as i64 - 1 - m.is_multiple_of(119) as i64
    };
    let mut b = vec![0i64; order];
    for m in 1..order {
        let am = a(m);
        let mut k = m;
        while k < order {
            b[k] -= m as i64 * am;
            k += m;
        }
    }
    let mut f: Vec<Integer> = Vec::with_capacity(order);
    f.push(Integer::from(1));
    let mut acc = Integer::new();
    for n in 1..order {
        acc.assign_i64(0);
        for k in 1..=n {
            if b[k] != 0 {
                acc += &f[n - k] * b[k];
            }
        }
        let (q, r) = acc.clone().div_rem(Integer::from(n));
        debug_assert_eq!(r, 0);
        f.push(q);
    }
    f
}

trait AssignI64 {
    fn assign_i64(&mut self, v: i64);
}

impl AssignI64 for Integer {
    fn assign_i64(&mut self, v: i64) {
        rug::Assign::assign(self, v);
    }
}

/// Integer expansions of `w`, `x` and `z = x + y` in `q^(1/119)`.
///
/// Index `i` of `w` is the coefficient of `q^(i-4)`, of `x` of `q^(i-2)` and of
/// `z` of `q^(i-3)`; every vector holds `order` coefficients.
#[derive(Clone, Debug)]
pub struct CurveExpansions {
    order: usize,
    w: Vec<Integer>,
    x: Vec<Integer>,
    z: Vec<Integer>,
}

impl CurveExpansions {
    pub fn compute(order: usize) -> Result<Self> {
        let order = order.max(16);
        let w = w_normalized(order + 4);
        let zero = Integer::new();
        let wc = |m: i64| -> &Integer { if m < -4 { &zero } else { &w[(m + 4) as usize] } };
        let mut x: Vec<Integer> = Vec::with_capacity(order + 1);
        let mut z: Vec<Integer> = Vec::with_capacity(order + 1);
        x.push(Integer::from(1)); // x_{-2}
        z.push(Integer::from(1)); // z_{-3}
        let mut s = Integer::new();
        let two = Integer::from(2);
        // x_n for n = -1, 0, 1, ... uses z_{n-2}; z_{n-2} comes from z² = w(x - 1) at q^(n-5)
        for n in -1i64..(order as i64 - 2) {
            if n >= 0 {
                let m = n - 5;
                s.assign_i64(0);
                // Σ_{i >= -4} w_i x_{m-i}, x index >= -2
                for i in -4..=(m + 2) {
                    let j = m - i;
                    s += wc(i) * &x[(j + 2) as usize];
                }
                s -= wc(m);
                for i in -2..=(m + 2) {
                    let j = m - i;
                    if (-2..=m + 2).contains(&j) {
                        s -= &z[(i + 3) as usize] * &z[(j + 3) as usize];
                    }
                }
                let (q, r) = s.clone().div_rem(two.clone());
                if r != 0 {
                    return Err(Error::Divisibility(format!("z coefficient at q^{}", n - 2)));
                }
                z.push(q);
            }
            let m = n - 2;
            s.assign_i64(0);
            s += wc(m);
            s += &z[(m + 3) as usize];
            for i in -1..=(n - 1) {
                let j = m - i;
                if (-1..=n - 1).contains(&j) {
                    s -= &x[(i + 2) as usize] * &x[(j + 2) as usize];
                }
            }
            let (q, r) = s.clone().div_rem(two.clone());
            if r != 0 {
                return Err(Error::Divisibility(format!("x coefficient at q^{n}")));
            }
            x.push(q);
        }
        let mut w = w;
        w.truncate(order);
        x.truncate(order);
        z.truncate(order);
        Ok(CurveExpansions { order: x.len().min(z.len()).min(w.len()), w, x, z })
    }

    /// Number of coefficients held for each function.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn w(&self) -> &[Integer] {
        &self.w[..self.order]
    }

    pub fn x(&self) -> &[Integer] {
        &self.x[..self.order]
    }

    pub fn z(&self) -> &[Integer] {
        &self.z[..self.order]
    }

    /// `y = z - x`, valuation `-3`.
    pub fn y(&self) -> Vec<Integer> {
        (0..self.order)
            .map(|i| {
                let xi = if i >= 1 { self.x[i - 1].clone() } else { Integer::new() };
                &self.z[i] - xi
            })
            .collect()
    }

    pub fn x_series(&self) -> LaurentSeries {
        LaurentSeries::from_integers(LEVEL as u32, -2, self.x(), -2 + self.order as i64)
    }

    pub fn y_series(&self) -> LaurentSeries {
        LaurentSeries::from_integers(LEVEL as u32, -3, &self.y(), -3 + self.order as i64)
    }

    pub fn z_series(&self) -> LaurentSeries {
        LaurentSeries::from_integers(LEVEL as u32, -3, self.z(), -3 + self.order as i64)
    }

    pub fn w_series(&self) -> LaurentSeries {
        LaurentSeries::from_integers(LEVEL as u32, -4, self.w(), -4 + self.order as i64)
    }
}

fn cache() -> &'static RwLock<Option<Arc<CurveExpansions>>> {
    static CACHE: OnceLock<RwLock<Option<Arc<CurveExpansions>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(None))
}

/// Shared expansions with at least `order` coefficients; a larger table replaces
/// the cached one atomically.
pub fn curve_expansions(order: usize) -> Result<Arc<CurveExpansions>> {
    if order > MAX_ORDER {
        return Err(Error::InsufficientPrecision(format!("expansion order {order} exceeds {MAX_ORDER}")));
    }
    if let Some(e) = cache().read().unwrap().as_ref() {
        if e.order() >= order {
            return Ok(e.clone());
        }
    }
    let mut guard = cache().write().unwrap();
    if let Some(e) = guard.as_ref() {
        if e.order() >= order {
            return Ok(e.clone());
        }
    }
    let cur = guard.as_ref().map_or(0, |e| e.order());
    let target = order.max(cur + cur / 2).max(512).min(MAX_ORDER.max(order));
    let e = Arc::new(CurveExpansions::compute(target)?);
    *guard = Some(e.clone());
    Ok(e)
}

// ---------------------------------------------------------------------------
// exact series (the specified entry points)

/// `η = q^(1/24) ∏(1 - q^n)` as a series in `q^(1/24)` with `order` q-terms.
pub fn eta_series(order: usize) -> LaurentSeries {
    let e = euler_product(order);
    let mut c = vec![Integer::new(); 24 * order.saturating_sub(1) + 1];
    for (k, v) in e.iter().enumerate() {
        c[24 * k] = v.clone();
    }
    LaurentSeries::from_integers(24, 1, &c, 1 + 24 * order as i64)
}

fn series_mul_int(a: &[Integer], b: &[Integer], n: usize) -> Vec<Integer> {
    let mut out = vec![Integer::new(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// `j = E4³/Δ` with `order` terms starting at `q^-1`.
pub fn j_series(order: usize) -> LaurentSeries {
    let n = order.max(2);
    let mut e4 = vec![Integer::new(); n];
    e4[0] = Integer::from(1);
    for (k, c) in e4.iter_mut().enumerate().skip(1) {
        let s3: u64 = (1..=k as u64).filter(|d| (k as u64).is_multiple_of(*d)).map(|d| d * d * d).sum();
        *c = Integer::from(240) * s3;
    }
    let e4_3 = series_mul_int(&series_mul_int(&e4, &e4, n), &e4, n);
    let p = euler_product(n);
    let p2 = series_mul_int(&p, &p, n);
    let p4 = series_mul_int(&p2, &p2, n);
    let p8 = series_mul_int(&p4, &p4, n);
    let p16 = series_mul_int(&p8, &p8, n);
    let p24 = series_mul_int(&p16, &p8, n);
    // 1/p24 has unit leading term
    let mut inv = vec![Integer::new(); n];
    inv[0] = Integer::from(1);
    for m in 1..n {
        let mut s = Integer::new();
        for k in 1..=m {
            s += &p24[k] * &inv[m - k];
        }
        inv[m] = -s;
    }
    let j = series_mul_int(&e4_3, &inv, n);
    LaurentSeries::from_integers(1, -1, &j, -1 + n as i64)
}

/// The eta quotient `w` in `q^(1/119)` with `order` terms from `q^-4`.
pub fn w717_series(order: usize) -> LaurentSeries {
    let f = w_normalized(order.max(1));
    LaurentSeries::from_integers(LEVEL as u32, -4, &f, -4 + order as i64)
}

/// `(x, y)` with `order` terms each, by Newton lifting of the root of
/// `X⁴ - 2wX² - wX + w² + w` seeded with the first eight terms of `x`.
pub fn xy_series(order: usize) -> Result<(LaurentSeries, LaurentSeries)> {
    if order < X_SEED.len() {
        return Err(Error::Precondition(format!("order must be at least {}", X_SEED.len())));
    }
    let guard = 16;
    let w = w717_series(order + guard + 8);
    let one = LaurentSeries::constant(Rational::from(1), LEVEL as u32);
    let poly = vec![
        w.mul(&w)?.add(&w)?,
        w.neg(),
        w.scale(&Rational::from(-2)),
        LaurentSeries::zero(LEVEL as u32, EXACT),
        one,
    ];
    let seed = LaurentSeries::from_i64s(LEVEL as u32, -2, &X_SEED, -2 + X_SEED.len() as i64);
    let x = series_newton_root(&poly, &seed, -2 + (order + 1) as i64)?;
    let y = x.mul(&x)?.sub(&x)?.sub(&w)?;
    Ok((x.truncate(-2 + order as i64), y.truncate(-3 + order as i64)))
}

// ---------------------------------------------------------------------------
// evaluation

fn two_pi(prec: u32) -> Float {
    Float::with_val(prec, APComplex::pi(prec) * 2u32)
}

/// `exp(2πi τ / m)`.
pub fn nome(tau: &APComplex, m: u32, prec: u32) -> APComplex {
    let arg = (tau.with_prec(prec) * APComplex::i(prec)).mul_float(&(two_pi(prec) / m));
    arg.exp()
}

/// `Σ c_k t^k` by rectangular splitting (few full products, many cheap
/// integer scalings).
pub fn eval_int_poly(coeffs: &[Integer], t: &APComplex, prec: u32) -> APComplex {
    let n = coeffs.len();
    if n == 0 {
        return APComplex::zero(prec);
    }
    let m = ((n as f64).sqrt().ceil() as usize).max(1);
    let t = t.with_prec(prec);
    let mut pw = Vec::with_capacity(m + 1);
    pw.push(Complex::with_val(prec, 1));
    for i in 1..=m {
        let v = Complex::with_val(prec, &pw[i - 1] * t.inner());
        pw.push(v);
    }
    let blocks = n.div_ceil(m);
    let mut acc = Complex::new(prec);
    let mut tmp = Complex::new(prec);
    for bidx in (0..blocks).rev() {
        acc *= &pw[m];
        #[allow(clippy::needless_range_loop)]
        for i in 0..m {
            let k = bidx * m + i;
            if k >= n {
                break;
            }
            let c = &coeffs[k];
            if *c == 0 {
                continue;
            }
            if i == 0 {
                acc += c;
            } else {
                rug::Assign::assign(&mut tmp, &pw[i] * c);
                acc += &tmp;
            }
        }
    }
    APComplex::from_complex(acc)
}

/// An integral 2×2 matrix acting by Möbius transformation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mobius {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Mobius {
    pub fn apply(&self, tau: &APComplex) -> APComplex {
        let p = tau.prec();
        let num = tau.mul_i64(self.a) + APComplex::from_i64(self.b, p);
        let den = tau.mul_i64(self.c) + APComplex::from_i64(self.d, p);
        &num / &den
    }

    fn apply_f64(&self, re: f64, im: f64) -> (f64, f64) {
        let (a, b, c, d) = (self.a as f64, self.b as f64, self.c as f64, self.d as f64);
        let nr = a * re + b;
        let ni = a * im;
        let dr = c * re + d;
        let di = c * im;
        let den = dr * dr + di * di;
        ((nr * dr + ni * di) / den, (ni * dr - nr * di) / den)
    }
}

/// Result of moving `τ` to a representative with large imaginary part.
#[derive(Clone, Debug)]
pub struct ReducedPoint {
    pub tau: APComplex,
    /// Number of Atkin–Lehner `W_7` steps taken, mod 2; on the curve `W_7`
    /// acts as `Q ↦ T - Q` with `T = (0, 0)`.
    pub w7_parity: bool,
    pub moves: Vec<Mobius>,
}

fn best_gamma0(re: f64, im: f64) -> Option<(f64, Mobius)> {
    let n = LEVEL;
    let mut best: Option<(f64, Mobius)> = None;
    let mut c = 1i64;
    while (c as f64) * im < 1.0 {
        let center = -(c as f64) * re;
        for d in [(center - 1.0).ceil() as i64, center.floor() as i64, center.ceil() as i64, (center + 1.0).floor() as i64] {
            let dr = c as f64 * re + d as f64;
            let q = dr * dr + (c as f64 * im).powi(2);
            if q >= 1.0 || gcd(d, n * c) != 1 {
                continue;
            }
            let nim = im / q;
            if best.as_ref().is_none_or(|(b, _)| nim > *b) {
                let a = crate::arith::inv_mod(d as i128, (n * c) as i128).unwrap() as i64;
                let b = ((a as i128 * d as i128 - 1) / c as i128) as i64;
                best = Some((nim, Mobius { a, b, c, d }));
            }
        }
        c += 1;
    }
    best
}

fn best_w7(re: f64, im: f64) -> Option<(f64, Mobius)> {
    let mut best: Option<(f64, Mobius)> = None;
    let r7 = 7f64.sqrt();
    let mut g = 1i64;
    while (g as f64) * im < r7 {
        let center = -(g as f64) * re / 7.0;
        let lo = ((center * 7.0 - r7) / 7.0).floor() as i64;
        let hi = ((center * 7.0 + r7) / 7.0).ceil() as i64;
        for dd in lo..=hi {
            let dr = g as f64 * re + 7.0 * dd as f64;
            let q = dr * dr + (g as f64 * im).powi(2);
            if q >= 7.0 || gcd(7 * dd, 17 * g) != 1 {
                continue;
            }
            let nim = 7.0 * im / q;
            if best.as_ref().is_none_or(|(b, _)| nim > *b) {
                let (_, s, t) = xgcd(7 * dd as i128, 17 * g as i128);
                // 7·dd·s + 17·g·t = 1  =>  α = s, β = -t
                let (al, be) = (s as i64, -t as i64);
                best = Some((nim, Mobius { a: 7 * al, b: 119 * be, c: g, d: 7 * dd }));
            }
        }
        g += 1;
    }
    best
}

/// Move `τ` by `Γ^0(119)`, the Fricke involution and `W_7` so that `Im τ` is
/// (locally) maximal.
pub fn reduce_tau(tau: &APComplex) -> ReducedPoint {
    let mut t = tau.clone();
    let mut parity = false;
    let mut moves = Vec::new();
    for _ in 0..200 {
        // translate into |Re| <= 59.5
        let re = t.re().to_f64();
        let k = (re / LEVEL as f64).round() as i64;
        if k != 0 {
            let m = Mobius { a: 1, b: -LEVEL * k, c: 0, d: 1 };
            t = m.apply(&t);
            moves.push(m);
        }
        let (re, im) = (t.re().to_f64(), t.im().to_f64());
        let mut cands: Vec<(f64, Mobius, bool)> = Vec::new();
        let fr = Mobius { a: 0, b: -LEVEL, c: 1, d: 0 };
        cands.push((fr.apply_f64(re, im).1, fr, false));
        if let Some((v, m)) = best_gamma0(re, im) {
            cands.push((v, m, false));
        }
        if let Some((v, m)) = best_w7(re, im) {
            cands.push((v, m, true));
        }
        let best = cands.into_iter().max_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        match best {
            Some((v, m, w7)) if v > im * (1.0 + 1e-9) => {
                t = m.apply(&t);
                moves.push(m);
                parity ^= w7;
            }
            _ => break,
        }
    }
    ReducedPoint { tau: t, w7_parity: parity, moves }
}

/// Number of expansion terms after which the tail of `x` or `z` is below
/// `2^-bits` at `Im τ = im`, from the growth `log|c_n| <= 2.1·√n + 3`.
pub fn terms_needed(im: f64, bits: u32) -> usize {
    let s = 2.0 * std::f64::consts::PI * im / LEVEL as f64;
    let c = 2.1;
    let l = bits as f64 * std::f64::consts::LN_2 + 3.0;
    let u = (c + (c * c + 4.0 * s * l).sqrt()) / (2.0 * s);
    (u * u).ceil() as usize + 8
}

/// Extra working bits to absorb cancellation among the largest terms.
fn guard_bits(im: f64) -> u32 {
    let s = 2.0 * std::f64::consts::PI * im / LEVEL as f64;
    // max_n (2.1√n - s n) = 2.1²/(4s)
    ((2.1f64 * 2.1 / (4.0 * s)) / std::f64::consts::LN_2).ceil() as u32 + 32
}

/// A point of the curve evaluated at `τ`.
#[derive(Clone, Debug)]
pub struct CurveValue {
    pub x: APComplex,
    pub y: APComplex,
    pub tail: f64,
}

/// `(x(τ), y(τ))` with absolute error about `2^-prec` (relative to `max(1, |x|, |y|)`).
pub fn curve_point(tau: &APComplex, prec: u32) -> Result<CurveValue> {
    if !tau.im().is_sign_positive() || tau.im().is_zero() {
        return Err(Error::Precondition("τ must lie in the upper half plane".into()));
    }
    let red = reduce_tau(tau);
    let im = red.tau.im().to_f64();
    let n = terms_needed(im, prec + 16);
    let wp = prec + guard_bits(im) + 16;
    let exps = curve_expansions(n + 4)?;
    let t = nome(&red.tau.with_prec(wp), LEVEL as u32, wp);
    let tinv = t.recip();
    let xs = eval_int_poly(&exps.x()[..n], &t, wp) * tinv.square();
    let zs = eval_int_poly(&exps.z()[..n], &t, wp) * tinv.powi(3);
    let ys = &zs - &xs;
    let s = 2.0 * std::f64::consts::PI * im / LEVEL as f64;
    let tail = (2.1 * (n as f64).sqrt() + 3.0 - s * n as f64).exp();
    let (x, y) = if red.w7_parity { reflect_t(&xs, &ys)? } else { (xs, ys) };
    Ok(CurveValue { x: x.with_prec(prec + 32), y: y.with_prec(prec + 32), tail })
}

/// `Q ↦ T - Q` with `T = (0, 0)`.
fn reflect_t(x: &APComplex, y: &APComplex) -> Result<(APComplex, APComplex)> {
    let p = x.prec();
    // -Q = (x, -y - 3x + 1)
    let ny = -(y + &x.mul_i64(3)) + APComplex::one(p);
    if x.exponent().is_none_or(|e| e < -(p as i32) / 2) {
        // -Q = (0, ±…): only rational torsion here; T + T = (1, -1), T + (0,0)... handled exactly
        let yv = ny.to_f64_pair().0;
        return if yv.abs() < 0.5 {
            Err(Error::Precondition("point at the cusp".into()))
        } else {
            Ok((APComplex::one(p), APComplex::from_i64(-1, p)))
        };
    }
    let lam = &ny / x;
    let x3 = lam.square() + lam.mul_i64(3) + APComplex::from_i64(3, p) - x;
    let y3 = -((&lam + &APComplex::from_i64(3, p)) * &x3) + APComplex::one(p);
    Ok((x3, y3))
}

/// `η(τ)` by repeated `τ ↦ τ - n`, `τ ↦ -1/τ` and the pentagonal series.
pub fn eta(tau: &APComplex, prec: u32) -> APComplex {
    let wp = prec + 16;
    let mut t = tau.with_prec(wp);
    let mut mult = APComplex::one(wp);
    let pi = APComplex::pi(wp);
    for _ in 0..10_000 {
        let n = t.re().to_f64().round() as i64;
        if n != 0 {
            t = &t - &APComplex::from_i64(n, wp);
            let ph = APComplex::i(wp).mul_float(&(Float::with_val(wp, &pi * n) / 12u32)).exp();
            mult = &mult * &ph;
        }
        if t.norm_sqr() < 0.999_999 {
            // η(τ) = η(-1/τ) / √(-iτ)
            let s = (-(APComplex::i(wp) * &t)).sqrt();
            mult = &mult / &s;
            t = -(t.recip());
        } else {
            break;
        }
    }
    let q = nome(&t, 1, wp);
    let q24 = nome(&t, 24, wp);
    let im = t.im().to_f64();
    let mut sum = APComplex::one(wp);
    let mut k = 1i64;
    loop {
        let e1 = k * (3 * k - 1) / 2;
        if (e1 as f64) * 2.0 * std::f64::consts::PI * im > (wp as f64 + 8.0) * std::f64::consts::LN_2 {
            break;
        }
        let e2 = k * (3 * k + 1) / 2;
        let term = q.powi(e1) + q.powi(e2);
        if k % 2 == 1 {
            sum = &sum - &term;
        } else {
            sum = &sum + &term;
        }
        k += 1;
    }
    (mult * q24 * sum).with_prec(prec)
}

/// `w(τ)` as the eta quotient `η(τ/7)η(τ/17) / (η(τ)η(τ/119))`.
pub fn w_eta(tau: &APComplex, prec: u32) -> APComplex {
    let wp = prec + 16;
    let t = tau.with_prec(wp);
    let e7 = eta(&(&t / &APComplex::from_i64(7, wp)), wp);
    let e17 = eta(&(&t / &APComplex::from_i64(17, wp)), wp);
    let e1 = eta(&t, wp);
    let e119 = eta(&(&t / &APComplex::from_i64(119, wp)), wp);
    ((e7 * e17) / (e1 * e119)).with_prec(prec)
}

/// Move `τ` into the standard fundamental domain of `SL2(ℤ)`.
pub fn sl2_reduce(tau: &APComplex) -> APComplex {
    let p = tau.prec();
    let mut t = tau.clone();
    for _ in 0..10_000 {
        let n = t.re().to_f64().round() as i64;
        if n != 0 {
            t = &t - &APComplex::from_i64(n, p);
        }
        if t.norm_sqr() < 0.999_999_999 {
            t = -(t.recip());
        } else {
            break;
        }
    }
    t
}

/// `j(τ) = E4(τ)³ / Δ(τ)`.
pub fn j_eval(tau: &APComplex, prec: u32) -> APComplex {
    let wp = prec + 32;
    let t = sl2_reduce(&tau.with_prec(wp));
    let q = nome(&t, 1, wp);
    let im = t.im().to_f64();
    let lim = ((wp as f64 + 16.0) * std::f64::consts::LN_2 / (2.0 * std::f64::consts::PI * im)).ceil() as i64 + 2;
    // E4 = 1 + 240 Σ n³ qⁿ/(1 - qⁿ)
    let mut e4 = APComplex::zero(wp);
    let mut qn = APComplex::one(wp);
    for n in 1..=lim {
        qn = &qn * &q;
        let term = &qn.mul_i64(n * n * n) / &(APComplex::one(wp) - &qn);
        e4 = e4 + term;
    }
    let e4 = e4.mul_i64(240) + APComplex::one(wp);
    // Δ = q (Σ (-1)^k q^{k(3k-1)/2})^24
    let mut s = APComplex::one(wp);
    let mut k = 1i64;
    loop {
        let e1 = k * (3 * k - 1) / 2;
        if e1 > lim + 2 {
            break;
        }
        let term = q.powi(e1) + q.powi(k * (3 * k + 1) / 2);
        if k % 2 == 1 {
            s = &s - &term;
        } else {
            s = &s + &term;
        }
        k += 1;
    }
    let s2 = s.square();
    let s4 = s2.square();
    let s8 = s4.square();
    let s24 = &(&s8.square() * &s8) * &APComplex::one(wp);
    let delta = &q * &s24;
    (e4.square() * e4 / delta).with_prec(prec)
}

/// Values `b_0(τ), …, b_k(τ)` of the first `k + 1` basis functions.
pub fn basis_eval(basis: Basis, k: usize, tau: &APComplex, prec: u32) -> Result<Vec<APComplex>> {
    let v = curve_point(tau, prec)?;
    Ok(basis_values_at(basis, k, &v.x, &v.y))
}

/// Basis values at a point `(x, y)` of the curve.
pub fn basis_values_at(basis: Basis, k: usize, x: &APComplex, y: &APComplex) -> Vec<APComplex> {
    let p = x.prec();
    let second = match basis {
        Basis::Standard => y.clone(),
        Basis::EtaMixed => x + y,
    };
    let w = x.square() - x - y;
    let max_x = (k + 2) / 2 + 1;
    let mut xp = vec![APComplex::one(p)];
    for i in 1..=max_x {
        let v = &xp[i - 1] * x;
        xp.push(v);
    }
    let mut wp = vec![APComplex::one(p)];
    for i in 1..=(k / 4 + 2) {
        let v = &wp[i - 1] * &w;
        wp.push(v);
    }
    (0..=k)
        .map(|i| {
            let m = basis.monomial(i);
            let mut v = &wp[m.w] * &xp[m.x];
            if m.yz == 1 {
                v = &v * &second;
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;

    #[test]
    fn first_coefficients() {
        let e = CurveExpansions::compute(40).unwrap();
        let xs: Vec<i64> = e.x()[..10].iter().map(|c| c.to_i64().unwrap()).collect();
        assert_eq!(xs, vec![1, 1, 1, 1, 2, 2, 3, 3, 4, 5]);
        let ys: Vec<i64> = e.y()[..11].iter().map(|c| c.to_i64().unwrap()).collect();
        assert_eq!(ys, vec![1, 0, 0, 1, 2, 2, 4, 4, 7, 9, 12]);
    }

    #[test]
    fn j_leading_terms() {
        let j = j_series(4);
        assert_eq!(j.coeff(-1).unwrap(), 1);
        assert_eq!(j.coeff(0).unwrap(), 744);
        assert_eq!(j.coeff(1).unwrap(), 196884);
        assert_eq!(j.coeff(2).unwrap(), 21493760);
    }

    #[test]
    fn newton_matches_recursion() {
        let (x, y) = xy_series(60).unwrap();
        let e = CurveExpansions::compute(80).unwrap();
        for k in 0..60 {
            assert_eq!(x.coeff(-2 + k as i64).unwrap(), e.x()[k], "x_{}", k as i64 - 2);
            assert_eq!(y.coeff(-3 + k as i64).unwrap(), e.y()[k], "y_{}", k as i64 - 3);
        }
    }

    #[test]
    fn basis_orders() {
        let m: Vec<_> = (0..8).map(|i| Basis::EtaMixed.monomial(i)).collect();
        assert_eq!(m[1], BasisMonomial { w: 0, x: 1, yz: 0 });
        assert_eq!(m[2], BasisMonomial { w: 0, x: 0, yz: 1 });
        assert_eq!(m[3], BasisMonomial { w: 1, x: 0, yz: 0 });
        assert_eq!(m[4], BasisMonomial { w: 0, x: 1, yz: 1 });
        assert_eq!(m[5], BasisMonomial { w: 1, x: 1, yz: 0 });
        assert_eq!(m[7], BasisMonomial { w: 2, x: 0, yz: 0 });
        assert_eq!(Basis::Standard.monomial(6), BasisMonomial { w: 0, x: 2, yz: 1 });
    }

    #[test]
    fn eta_at_i() {
        // η(i) = Γ(1/4) / (2 π^{3/4})
        let v = eta(&APComplex::i(128), 128);
        let g = Float::with_val(128, 0.25).gamma();
        let pi = APComplex::pi(128);
        let expect = g / (Float::with_val(128, pi.pow(0.75f64)) * 2u32);
        assert!(v.approx_eq(&APComplex::from_floats(expect, Float::new(128)), 110));
    }

    #[test]
    fn curve_point_matches_eta_quotient() {
        let taus = [(0.3, 0.02), (-17.2, 0.5), (3.0, 1.0), (0.0, 2.0), (51.7, 0.004), (1.0 / 7.0, 0.001), (0.2, 30.0)];
        for (re, im) in taus {
            let tau = APComplex::from_f64(re, im, 200);
            let v = curve_point(&tau, 160).unwrap();
            let w = &(&v.x.square() - &v.x) - &v.y;
            let we = w_eta(&tau, 160);
            assert!(w.approx_eq(&we, 140), "w mismatch at {re}+{im}i: {w:?} vs {we:?}");
            let (x, y) = (&v.x, &v.y);
            let lhs = y.square() + (x * y).mul_i64(3) - y;
            let rhs = x.powi(3) - x.square().mul_i64(3) + x;
            assert!(lhs.approx_eq(&rhs, 140));
        }
    }
}
