//! The CM method over prime fields: roots of class polynomials modulo `q`,
//! the modular polynomial `Ψ(x, y, Z)` of `j` over the function field of
//! `X0+(119)`, and curves with a prescribed Frobenius trace.

use crate::arith::{gcd, is_prime, mul_mod, pow_mod};
use crate::classpoly::{genclass, hilbert, norm_to_x, Algo, CURVE_ID};
use crate::ellcurve::{curves_with_j, x0plus119, Field, Fp, Point, WeierstrassModel};
use crate::error::{Error, Result};
use crate::numerics::{APComplex, IntPolyUV, IntPolyXY};
use crate::qexp::{curve_expansions, curve_point, j_eval, j_series, Basis};
use crate::quadforms::Discriminant;
use rand::Rng;
use rug::{Integer, Rational};
use serde::Serialize;

// --- polynomials over F_p --------------------------------------------------------

/// Dense polynomial over `𝔽_p`, trimmed (no zero leading coefficient).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpPoly {
    pub c: Vec<u64>,
    pub p: u64,
}

impl FpPoly {
    pub fn new(mut c: Vec<u64>, p: u64) -> Self {
        for v in c.iter_mut() {
            *v %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPoly { c, p }
    }

    pub fn from_int(f: &IntPolyUV, p: u64) -> Self {
        Self::new(f.coeffs().iter().map(|v| Fp::from_integer(v, p).v).collect(), p)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.c.iter().rev().fold(0, |acc, &v| (mul_mod(acc, x, self.p) + v) % self.p)
    }

    fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let g = |v: &Vec<u64>, i: usize| v.get(i).copied().unwrap_or(0);
        Self::new((0..n).map(|i| (g(&self.c, i) + self.p - g(&o.c, i)) % self.p).collect(), self.p)
    }

    fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::new(Vec::new(), self.p);
        }
        let p = self.p as u128;
        let mut acc = vec![0u128; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                acc[i + j] = (acc[i + j] + a as u128 * b as u128) % p;
            }
        }
        Self::new(acc.into_iter().map(|v| v as u64).collect(), self.p)
    }

    /// Remainder modulo a nonzero `d`.
    fn rem(&self, d: &Self) -> Self {
        let dn = d.c.len() - 1;
        let inv = pow_mod(d.c[dn], self.p - 2, self.p);
        let mut r = self.c.clone();
        while r.len() > dn {
            let top = r.len() - 1;
            let k = mul_mod(r[top], inv, self.p);
            if k != 0 {
                for (j, &dc) in d.c.iter().enumerate() {
                    let s = top - dn + j;
                    r[s] = (r[s] + self.p - mul_mod(k, dc, self.p)) % self.p;
                }
            }
            r.pop();
            while r.last() == Some(&0) {
                r.pop();
            }
        }
        Self::new(r, self.p)
    }

    fn monic(&self) -> Self {
        match self.c.last() {
            None => self.clone(),
            Some(&l) => {
                let inv = pow_mod(l, self.p - 2, self.p);
                Self::new(self.c.iter().map(|&v| mul_mod(v, inv, self.p)).collect(), self.p)
            }
        }
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `self^e mod m`.
    fn powmod(&self, mut e: u64, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut acc = Self::new(vec![1], self.p).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }
}

fn split_linear<R: Rng>(g: &FpPoly, rng: &mut R, out: &mut Vec<u64>) {
    match g.degree() {
        None | Some(0) => {}
        Some(1) => {
            let m = g.monic();
            out.push((g.p - m.c[0]) % g.p);
        }
        Some(_) => loop {
            let a = rng.random_range(0..g.p);
            let h = FpPoly::new(vec![a, 1], g.p).powmod((g.p - 1) / 2, g).sub(&FpPoly::new(vec![1], g.p));
            let d = g.gcd(&h);
            let dd = d.degree().unwrap_or(0);
            if dd > 0 && dd < g.degree().unwrap() {
                let (q, _) = divrem(g, &d);
                split_linear(&d, rng, out);
                split_linear(&q, rng, out);
                return;
            }
        },
    }
}

fn divrem(a: &FpPoly, d: &FpPoly) -> (FpPoly, FpPoly) {
    let p = a.p;
    let dn = d.c.len() - 1;
    if a.c.len() <= dn {
        return (FpPoly::new(Vec::new(), p), a.clone());
    }
    let inv = pow_mod(d.c[dn], p - 2, p);
    let mut r = a.c.clone();
    let mut q = vec![0u64; r.len() - dn];
    for i in (0..q.len()).rev() {
        let k = mul_mod(r[i + dn], inv, p);
        q[i] = k;
        for (j, &dc) in d.c.iter().enumerate() {
            r[i + j] = (r[i + j] + p - mul_mod(k, dc, p)) % p;
        }
    }
    r.truncate(dn);
    (FpPoly::new(q, p), FpPoly::new(r, p))
}

/// Distinct roots in `𝔽_p` of `f mod p`, sorted: `gcd(f, X^p - X)` followed by
/// randomized equal-degree splitting. The zero polynomial yields every element.
pub fn fp_roots<R: Rng>(f: &IntPolyUV, p: u64, rng: &mut R) -> Vec<u64> {
    fp_roots_poly(&FpPoly::from_int(f, p), rng)
}

pub fn fp_roots_poly<R: Rng>(f: &FpPoly, rng: &mut R) -> Vec<u64> {
    let p = f.p;
    if f.is_zero() {
        return (0..p).collect();
    }
    if p == 2 {
        return (0..2).filter(|&x| f.eval(x) == 0).collect();
    }
    let x = FpPoly::new(vec![0, 1], p);
    let xp = x.powmod(p, f).sub(&x);
    let g = f.gcd(&xp);
    let mut out = Vec::new();
    split_linear(&g, rng, &mut out);
    out.sort_unstable();
    out
}

// --- Frobenius data ------------------------------------------------------------------

/// Target Frobenius `x² - t x + q` of the curve to construct.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FrobeniusSpec {
    pub t: i64,
    pub q: u64,
}

impl FrobeniusSpec {
    pub fn new(t: i64, q: u64) -> Result<Self> {
        if q < 5 || !is_prime(q) {
            return Err(Error::Precondition(format!("q = {q} must be a prime > 3")));
        }
        if q > (1u64 << 61) {
            return Err(Error::Precondition("q too large".into()));
        }
        if gcd(t, q as i64) != 1 {
            return Err(Error::Precondition(format!("gcd(t, q) must be 1 (t = {t}, q = {q})")));
        }
        if (t as i128) * (t as i128) >= 4 * q as i128 {
            return Err(Error::Precondition("t² - 4q must be negative".into()));
        }
        Ok(FrobeniusSpec { t, q })
    }

    pub fn discriminant(&self) -> Result<Discriminant> {
        Discriminant::new(self.t * self.t - 4 * self.q as i64)
    }

    /// `q + 1 - t`.
    pub fn order(&self) -> u64 {
        (self.q as i64 + 1 - self.t) as u64
    }
}

/// Curve found by a CM pipeline.
#[derive(Clone, Debug)]
pub struct CmCurve {
    pub curve: WeierstrassModel<Fp>,
    pub j: Fp,
    /// `#E(𝔽_q)`; exact for `q ≤ 10⁶`, otherwise the target order confirmed probabilistically.
    pub count: u64,
}

#[derive(Serialize)]
struct CurveJson {
    q: u64,
    a1: u64,
    a2: u64,
    a3: u64,
    a4: u64,
    a6: u64,
    count: u64,
}

impl CmCurve {
    pub fn to_json(&self) -> String {
        let c = &self.curve;
        serde_json::to_string(&CurveJson {
            q: c.prime(),
            a1: c.a1.v,
            a2: c.a2.v,
            a3: c.a3.v,
            a4: c.a4.v,
            a6: c.a6.v,
            count: self.count,
        })
        .expect("plain struct serializes")
    }
}

/// Curve plus every `j`-candidate the pipeline produced.
#[derive(Clone, Debug)]
pub struct CmOutcome {
    pub curve: CmCurve,
    pub j_candidates: Vec<u64>,
}

const NAIVE_LIMIT: u64 = 1_000_000;

fn select_twist<R: Rng>(spec: &FrobeniusSpec, j: Fp, rng: &mut R) -> Result<Option<CmCurve>> {
    let n = spec.order();
    for e in curves_with_j(&j)? {
        if spec.q <= NAIVE_LIMIT {
            let c = e.point_count_naive();
            if c == n {
                return Ok(Some(CmCurve { curve: e, j, count: c }));
            }
        } else if e.order_probable(n, 5, rng) {
            return Ok(Some(CmCurve { curve: e, j, count: n }));
        }
    }
    Ok(None)
}

fn first_curve<R: Rng>(spec: &FrobeniusSpec, js: &[u64], rng: &mut R) -> Result<Option<CmCurve>> {
    for &j in js {
        if let Some(c) = select_twist(spec, Fp { v: j, p: spec.q }, rng)? {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// Classical CM method: a root of `H_D` modulo `q`, then the right twist.
pub fn cm_hilbert<R: Rng>(spec: &FrobeniusSpec, rng: &mut R) -> Result<CmOutcome> {
    let d = spec.discriminant()?;
    let h = hilbert(d, None)?;
    let js = fp_roots(&h, spec.q, rng);
    if js.is_empty() {
        return Err(Error::Internal(format!("H_{d} has no root modulo {}", spec.q)));
    }
    match first_curve(spec, &js, rng)? {
        Some(curve) => Ok(CmOutcome { curve, j_candidates: js }),
        None => Err(Error::Internal(format!("no twist has {} points", spec.order()))),
    }
}

/// CM method through the class function on `X0+(119)` and `Ψ`.
pub fn cm_generalized<R: Rng>(spec: &FrobeniusSpec, psi: &ModularPolynomial, rng: &mut R) -> Result<CmOutcome> {
    let q = spec.q;
    let d = spec.discriminant()?;
    let g = genclass(d, Basis::Standard, Algo::Lll)?.function;
    let nd = norm_to_x(&g)?;
    let e = WeierstrassModel::<Fp>::from_ints(&Fp { v: 0, p: q }, [3, -3, -1, 1, 0]);
    let minus_q = match x0plus119().neg(&g.heegner) {
        Point::Infinity => None,
        Point::Affine(x, y) => match (reduce_rational(&x, q), reduce_rational(&y, q)) {
            (Some(a), Some(b)) => Some((a, b)),
            _ => None,
        },
    };
    let (fa, fb) = (FpPoly::from_int(&g.f.a, q), FpPoly::from_int(&g.f.b, q));
    let mut js: Vec<u64> = Vec::new();
    for x0 in fp_roots(&nd.h_x, q, rng) {
        let (a, b) = (fa.eval(x0), fb.eval(x0));
        let ys: Vec<u64> = if b != 0 {
            // A + B y = 0
            vec![mul_mod(q - a % q, pow_mod(b, q - 2, q), q) % q]
        } else if a == 0 {
            // F vanishes on the whole fibre: both points over x0,
            // y² + (3x0 - 1) y - (x0³ - 3x0² + x0) = 0
            let xv = Fp { v: x0, p: q };
            let fx = xv.square().mul(&xv).sub(&xv.square().mul_i64(3)).add(&xv);
            let lin = xv.mul_i64(3).sub(&xv.one_like());
            let quad = FpPoly::new(vec![fx.neg().v, lin.v, 1], q);
            fp_roots_poly(&quad, rng)
        } else {
            Vec::new()
        };
        for y0 in ys {
            let pt = Point::Affine(Fp { v: x0, p: q }, Fp { v: y0, p: q });
            if !e.contains(&pt) || minus_q == Some((x0, y0)) {
                continue;
            }
            let zpoly = psi.specialize_mod(x0, y0, q);
            if zpoly.is_zero() {
                continue;
            }
            for j in fp_roots_poly(&zpoly, rng) {
                if !js.contains(&j) {
                    js.push(j);
                }
            }
        }
    }
    js.sort_unstable();
    if js.is_empty() {
        return Err(Error::DegenerateReduction(format!("every candidate root for D = {d} modulo {q} is excluded")));
    }
    match first_curve(spec, &js, rng)? {
        Some(curve) => Ok(CmOutcome { curve, j_candidates: js }),
        None => Err(Error::DegenerateReduction(format!("no j-candidate modulo {q} carries a curve with {} points", spec.order()))),
    }
}

fn reduce_rational(r: &Rational, q: u64) -> Option<u64> {
    let den = Fp::from_integer(r.denom(), q);
    let inv = den.inv()?;
    Some(Fp::from_integer(r.numer(), q).mul(&inv).v)
}

// --- Ψ ---------------------------------------------------------------------------------

/// Degree of `j` over the function field of `X0+(119)`.
pub const DJ_X0PLUS119: usize = 2;
/// First pole bound tried by [`compute_psi_incremental`].
pub const PSI_POLE_START: usize = 2 * 144 / 2 + 8;
pub const PSI_POLE_STEP: usize = 8;

/// `Ψ(x, y, Z) = Σ f_i(x, y) Z^i` with `Ψ(x(τ), y(τ), j(τ)) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularPolynomial {
    pub dj: usize,
    pub pole_bound: usize,
    pub f: Vec<IntPolyXY>,
}

/// Laurent series in `t = q^(1/119)` with integer coefficients:
/// `c[k]` multiplies `t^(val + k)`, known for exponents below `val + c.len()`.
#[derive(Clone, Debug)]
struct TSeries {
    val: i64,
    c: Vec<Integer>,
}

impl TSeries {
    fn trunc(&self) -> i64 {
        self.val + self.c.len() as i64
    }

    fn get(&self, e: i64) -> Integer {
        if e < self.val || e >= self.trunc() {
            Integer::new()
        } else {
            self.c[(e - self.val) as usize].clone()
        }
    }

    fn cut(mut self, trunc: i64) -> Self {
        let n = (trunc - self.val).max(0) as usize;
        self.c.truncate(n);
        self
    }

    fn mul(&self, o: &Self, cap: i64) -> Self {
        let val = self.val + o.val;
        let trunc = (self.trunc() + o.val).min(o.trunc() + self.val).min(cap);
        let n = (trunc - val).max(0) as usize;
        let mut c = vec![Integer::new(); n];
        for (i, a) in self.c.iter().enumerate().take(n) {
            if *a == 0 {
                continue;
            }
            for (j, b) in o.c.iter().enumerate().take(n - i) {
                c[i + j] += a * b;
            }
        }
        TSeries { val, c }
    }

    fn add_scaled(&mut self, o: &Self, k: &Integer) {
        let trunc = self.trunc().min(o.trunc());
        let val = self.val.min(o.val);
        let mut c = vec![Integer::new(); (trunc - val).max(0) as usize];
        for (i, v) in c.iter_mut().enumerate() {
            let e = val + i as i64;
            *v = self.get(e) + k * o.get(e);
        }
        *self = TSeries { val, c };
    }
}

/// Standard-basis series `1, x, y, x², xy, …` up to pole order `max_pole`.
fn basis_series(x: &TSeries, y: &TSeries, max_pole: usize, cap: i64) -> Vec<(usize, usize, TSeries)> {
    let mut c = vec![Integer::new(); cap as usize];
    c[0] = Integer::from(1);
    let one = TSeries { val: 0, c };
    let mut out = Vec::new();
    let mut xp = one;
    let mut k = 0usize;
    loop {
        if 2 * k > max_pole {
            break;
        }
        out.push((k, 0, xp.clone()));
        if 2 * k + 3 <= max_pole {
            out.push((k, 1, xp.mul(y, cap)));
        }
        xp = xp.mul(x, cap);
        k += 1;
    }
    out.sort_by_key(|(a, b, _)| 2 * a + 3 * b);
    out
}

/// Express a series with poles only at the cusp as a standard-basis combination;
/// `None` if a nonzero remainder survives below `check_to`.
fn express(s: &TSeries, basis: &[(usize, usize, TSeries)], check_to: i64) -> Option<IntPolyXY> {
    let mut r = s.clone();
    let mut mons: Vec<(Integer, usize, usize)> = Vec::new();
    for (a, b, bs) in basis.iter().rev() {
        let pole = (2 * a + 3 * b) as i64;
        let c = r.get(-pole);
        if c == 0 {
            continue;
        }
        // leading coefficient of every basis series is 1
        r.add_scaled(bs, &Integer::from(-&c));
        mons.push((c, *a, *b));
    }
    if (r.val..check_to.min(r.trunc())).any(|e| r.get(e) != 0) {
        return None;
    }
    if mons.is_empty() {
        return Some(IntPolyXY::default());
    }
    IntPolyXY::from_monomials(&mons).ok()
}

/// Exact kernel vector of the first dependent column prefix (rational elimination).
fn first_dependency(cols: &[Vec<Integer>]) -> Option<Vec<Integer>> {
    // Each reduced column is stored together with its combination of originals.
    let mut pivots: Vec<(usize, Vec<Rational>, Vec<Rational>)> = Vec::new();
    for (m, col) in cols.iter().enumerate() {
        let mut v: Vec<Rational> = col.iter().map(Rational::from).collect();
        let mut comb = vec![Rational::new(); cols.len()];
        comb[m] = Rational::from(1);
        for (row, pv, pc) in &pivots {
            if v[*row] != 0 {
                let k = Rational::from(&v[*row] / &pv[*row]);
                for (a, b) in v.iter_mut().zip(pv) {
                    *a -= Rational::from(&k * b);
                }
                for (a, b) in comb.iter_mut().zip(pc) {
                    *a -= Rational::from(&k * b);
                }
            }
        }
        match v.iter().position(|a| *a != 0) {
            Some(row) => pivots.push((row, v, comb)),
            None => {
                let comb = &comb[..=m];
                let den = comb.iter().fold(Integer::from(1), |l, c| l.lcm(c.denom()));
                let ints: Vec<Integer> = comb.iter().map(|c| Rational::from(c * &den).numer().clone()).collect();
                return Some(crate::lattice::primitive(&ints).0);
            }
        }
    }
    None
}

/// `Ψ` with every `f_i` of pole order at most `pole_bound`, matching
/// `truncation` positive-exponent terms of the `t`-expansions exactly.
///
/// Writes `Ψ = h·(Z - j(τ))(Z - j(τ/119))`: `h` is the first combination of
/// basis functions for which `h·(j + j_N)` and `h·j·j_N` are again polynomials
/// in `x, y`.
pub fn compute_psi(dj: usize, pole_bound: usize, truncation: usize) -> Result<ModularPolynomial> {
    if dj != DJ_X0PLUS119 {
        return Err(Error::Precondition(format!("d_j = {dj} is not the degree of j on {CURVE_ID} (2)")));
    }
    if pole_bound < 121 {
        return Err(Error::Precondition("increase poleBound: j·j_N alone has pole order 120".into()));
    }
    let t = truncation.max(8) as i64;
    let hmax = pole_bound - 120;
    let cap = t + 2 * (pole_bound as i64) + 16;
    let order = (cap + 2 * pole_bound as i64 + 16) as usize;
    let exp = curve_expansions(order)?;
    let x = TSeries { val: -2, c: exp.x().iter().take(order).cloned().collect() };
    let y = TSeries { val: -3, c: exp.y().into_iter().take(order).collect() };
    let basis = basis_series(&x, &y, pole_bound, cap);
    // j(τ) = Σ c_n q^n and j(τ/119) = Σ c_n t^n with q = t^119
    let jn = (cap + 2) as usize;
    let js = j_series(jn);
    let jc: Vec<Integer> = js.coeffs().iter().map(|r| r.numer().clone()).collect();
    let j_small = TSeries { val: -1, c: jc.clone() }.cut(cap);
    let mut big = vec![Integer::new(); (cap + 119) as usize];
    for (k, c) in jc.iter().enumerate() {
        let idx = 119 * k;
        if idx >= big.len() {
            break;
        }
        big[idx] = c.clone();
    }
    let j_big = TSeries { val: -119, c: big };
    let mut sum = j_big.clone();
    sum.add_scaled(&j_small, &Integer::from(1));
    let prod = j_big.mul(&j_small, cap);
    let remainder = |s: &TSeries| -> Vec<Integer> {
        let mut r = s.clone();
        for (a, b, bs) in basis.iter().rev() {
            let c = r.get(-((2 * a + 3 * b) as i64));
            if c != 0 {
                r.add_scaled(bs, &Integer::from(-&c));
            }
        }
        (-1..t).map(|e| r.get(e)).collect()
    };
    let cands: Vec<&(usize, usize, TSeries)> = basis.iter().filter(|(a, b, _)| 2 * a + 3 * b <= hmax).collect();
    let cols: Vec<Vec<Integer>> = cands
        .iter()
        .map(|(_, _, bs)| {
            let mut v = remainder(&bs.mul(&sum, cap));
            v.extend(remainder(&bs.mul(&prod, cap)));
            v
        })
        .collect();
    let kernel = first_dependency(&cols).ok_or_else(|| Error::Precondition(format!("increase poleBound: no Ψ with pole order ≤ {pole_bound}")))?;
    let mut h = TSeries { val: 0, c: vec![Integer::new(); cap as usize] };
    let mut hmons = Vec::new();
    for (c, (a, b, bs)) in kernel.iter().zip(&cands) {
        if *c != 0 {
            h.add_scaled(bs, c);
            hmons.push((c.clone(), *a, *b));
        }
    }
    let f2 = IntPolyXY::from_monomials(&hmons)?;
    let hs = express(&h.mul(&sum, cap), &basis, t).ok_or_else(|| Error::Internal("h·(j + j_N) is not regular".into()))?;
    let hp = express(&h.mul(&prod, cap), &basis, t).ok_or_else(|| Error::Internal("h·j·j_N is not regular".into()))?;
    let mut f = vec![hp, hs.neg(), f2];
    let g = f.iter().fold(Integer::new(), |g, p| g.gcd(&p.content()));
    if g != 1 && g != 0 {
        f = f.iter().map(|p| IntPolyXY::new(p.a.div_exact_scalar(&g).unwrap(), p.b.div_exact_scalar(&g).unwrap())).collect();
    }
    if f[dj].leading_coeff().is_some_and(|l| l < 0) {
        f = f.iter().map(|p| p.neg()).collect();
    }
    Ok(ModularPolynomial { dj, pole_bound, f })
}

/// [`compute_psi`] with the pole bound raised by [`PSI_POLE_STEP`] until a
/// solution exists.
pub fn compute_psi_incremental(dj: usize, max_pole: usize) -> Result<ModularPolynomial> {
    let mut pb = PSI_POLE_START;
    loop {
        match compute_psi(dj, pb, dj * 144 + pb) {
            Err(Error::Precondition(m)) if m.starts_with("increase") && pb + PSI_POLE_STEP <= max_pole => pb += PSI_POLE_STEP,
            r => return r,
        }
    }
}

impl ModularPolynomial {
    pub fn eval_complex(&self, x: &APComplex, y: &APComplex, z: &APComplex) -> APComplex {
        let mut acc = APComplex::zero(x.prec());
        for fi in self.f.iter().rev() {
            acc = &(&acc * z) + &fi.eval_complex(x, y);
        }
        acc
    }

    /// `-log2` of `|Ψ(x(τ), y(τ), j(τ))|` relative to its largest term.
    pub fn residual_bits(&self, tau: &APComplex, prec: u32) -> Result<f64> {
        let wp = prec + 64;
        let v = curve_point(tau, wp)?;
        let j = j_eval(tau, wp);
        let mut zp = APComplex::one(wp);
        let mut acc = APComplex::zero(wp);
        let mut scale: i32 = i32::MIN;
        for fi in &self.f {
            let term = &fi.eval_complex(&v.x, &v.y) * &zp;
            if let Some(e) = term.exponent() {
                scale = scale.max(e);
            }
            acc += &term;
            zp = &zp * &j;
        }
        if acc.is_zero() {
            return Ok(0.0);
        }
        let e = acc.exponent().unwrap_or(i32::MIN) - scale;
        Ok(-(e as f64))
    }

    /// `Ψ(x0, y0, Z)` reduced modulo `q`.
    pub fn specialize_mod(&self, x0: u64, y0: u64, q: u64) -> FpPoly {
        let c = self
            .f
            .iter()
            .map(|fi| {
                let a = FpPoly::from_int(&fi.a, q).eval(x0);
                let b = FpPoly::from_int(&fi.b, q).eval(x0);
                (a + mul_mod(b, y0, q)) % q
            })
            .collect();
        FpPoly::new(c, q)
    }

    /// `Ψ(x0, y0, Z)` over ℚ at a rational point.
    pub fn specialize_rational(&self, x0: &Rational, y0: &Rational) -> Vec<Rational> {
        self.f.iter().map(|fi| fi.eval_rational(x0, y0)).collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("PSI curve={CURVE_ID} dj={} poleBound={}\n", self.dj, self.pole_bound);
        for (i, fi) in self.f.iter().enumerate() {
            s.push_str(&format!("Z={i}\n"));
            for (c, dx, dy) in fi.monomials() {
                s.push_str(&format!("{c} {dx} {dy}\n"));
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty Ψ file".into()))?;
        let mut it = header.split_whitespace();
        if it.next() != Some("PSI") {
            return Err(Error::Parse("missing PSI header".into()));
        }
        let (mut dj, mut pole_bound) = (None, None);
        for kv in it {
            let (k, v) = kv.split_once('=').ok_or_else(|| Error::Parse(format!("bad header field {kv}")))?;
            match k {
                "curve" if v != CURVE_ID => return Err(Error::Parse(format!("unsupported curve {v}"))),
                "curve" => {}
                "dj" => dj = v.parse::<usize>().ok(),
                "poleBound" => pole_bound = v.parse::<usize>().ok(),
                _ => return Err(Error::Parse(format!("unknown header field {k}"))),
            }
        }
        let dj = dj.ok_or_else(|| Error::Parse("missing dj".into()))?;
        let pole_bound = pole_bound.ok_or_else(|| Error::Parse("missing poleBound".into()))?;
        let mut blocks: Vec<Vec<(Integer, usize, usize)>> = Vec::new();
        for l in lines {
            if let Some(i) = l.strip_prefix("Z=") {
                let i: usize = i.parse().map_err(|_| Error::Parse(format!("bad block line {l}")))?;
                if i != blocks.len() {
                    return Err(Error::Parse("Z blocks out of order".into()));
                }
                blocks.push(Vec::new());
                continue;
            }
            let cur = blocks.last_mut().ok_or_else(|| Error::Parse("monomial before first Z block".into()))?;
            let v: Vec<&str> = l.split_whitespace().collect();
            if v.len() != 3 {
                return Err(Error::Parse(format!("bad monomial line {l}")));
            }
            let c: Integer = v[0].parse().map_err(|_| Error::Parse(format!("bad coefficient {}", v[0])))?;
            let dx: usize = v[1].parse().map_err(|_| Error::Parse(format!("bad degree {}", v[1])))?;
            let dy: usize = v[2].parse().map_err(|_| Error::Parse(format!("bad degree {}", v[2])))?;
            if dy > 1 {
                return Err(Error::Parse("deg_y must be at most 1".into()));
            }
            cur.push((c, dx, dy));
        }
        if blocks.len() != dj + 1 {
            return Err(Error::Parse(format!("expected {} Z blocks, found {}", dj + 1, blocks.len())));
        }
        let f = blocks.iter().map(|b| if b.is_empty() { Ok(IntPolyXY::default()) } else { IntPolyXY::from_monomials(b) }).collect::<Result<_>>()?;
        Ok(ModularPolynomial { dj, pole_bound, f })
    }

    /// Joint content of all coefficients.
    pub fn content(&self) -> Integer {
        self.f.iter().fold(Integer::new(), |g, p| g.gcd(&p.content()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(fp_roots(&IntPolyUV::from_i64s(&[-1, 0, 1]), 7, &mut rng), vec![1, 6]);
        assert!(fp_roots(&IntPolyUV::from_i64s(&[1, 0, 1]), 7, &mut rng).is_empty());
        let mut f = IntPolyUV::one();
        for r in [3i64, 17, 50, 99, 17] {
            f = f.mul(&IntPolyUV::from_i64s(&[-r, 1]));
        }
        f = f.mul(&IntPolyUV::from_i64s(&[2, 0, 1])); // -2 is a non-residue mod 101
        assert_eq!(fp_roots(&f, 101, &mut rng), vec![3, 17, 50, 99]);
    }

    #[test]
    fn spec_validation() {
        assert!(FrobeniusSpec::new(2, 2).is_err());
        assert!(FrobeniusSpec::new(17, 17).is_err());
        assert!(FrobeniusSpec::new(9, 17).is_err());
        assert_eq!(FrobeniusSpec::new(4, 17).unwrap().discriminant().unwrap().value(), -52);
    }

    #[test]
    fn hilbert_pipeline() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let o = cm_hilbert(&FrobeniusSpec::new(4, 17).unwrap(), &mut rng).unwrap();
        assert_eq!(o.curve.count, 14);
        assert_eq!(o.curve.curve.point_count_naive(), 14);
        let o = cm_hilbert(&FrobeniusSpec::new(1, 7).unwrap(), &mut rng).unwrap();
        assert_eq!(o.curve.count, 7);
    }
}
