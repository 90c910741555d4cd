//! Dense polynomials with approximate complex coefficients.

use super::apcomplex::APComplex;
use super::poly::IntPolyUV;
use rug::{Float, Integer};

/// `coeffs[i]` multiplies `X^i`; may carry (numerically) zero leading terms.
#[derive(Clone, Debug)]
pub struct CPoly {
    pub coeffs: Vec<APComplex>,
}

impl CPoly {
    pub fn new(coeffs: Vec<APComplex>) -> Self {
        CPoly { coeffs }
    }

    pub fn zero() -> Self {
        CPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: APComplex) -> Self {
        CPoly { coeffs: vec![c] }
    }

    /// `X - r`.
    pub fn linear(r: &APComplex) -> Self {
        CPoly { coeffs: vec![-r, APComplex::one(r.prec())] }
    }

    pub fn from_int(p: &IntPolyUV, prec: u32) -> Self {
        CPoly { coeffs: p.coeffs().iter().map(|c| APComplex::from_integer(c, prec)).collect() }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize, prec: u32) -> APComplex {
        self.coeffs.get(i).cloned().unwrap_or_else(|| APComplex::zero(prec))
    }

    fn prec(&self) -> u32 {
        self.coeffs.first().map_or(64, |c| c.prec())
    }

    pub fn add(&self, o: &Self) -> Self {
        let p = self.prec().max(o.prec());
        let n = self.len().max(o.len());
        CPoly { coeffs: (0..n).map(|i| self.coeff(i, p) + o.coeff(i, p)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let p = self.prec().max(o.prec());
        let n = self.len().max(o.len());
        CPoly { coeffs: (0..n).map(|i| self.coeff(i, p) - o.coeff(i, p)).collect() }
    }

    pub fn scale(&self, k: &APComplex) -> Self {
        CPoly { coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_empty() || o.is_empty() {
            return CPoly::zero();
        }
        let p = self.prec().max(o.prec());
        let mut out = vec![APComplex::zero(p); self.len() + o.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        CPoly { coeffs: out }
    }

    /// `p(k·X)`.
    pub fn scale_var(&self, k: &APComplex) -> Self {
        let mut pw = APComplex::one(k.prec());
        let mut out = Vec::with_capacity(self.len());
        for c in &self.coeffs {
            out.push(c * &pw);
            pw = &pw * k;
        }
        CPoly { coeffs: out }
    }

    /// Quotient by a monic divisor; the remainder is returned alongside.
    pub fn divrem_monic(&self, d: &Self) -> (Self, Self) {
        let dn = d.len() - 1;
        if self.len() <= dn {
            return (CPoly::zero(), self.clone());
        }
        let mut r = self.coeffs.clone();
        let mut q = vec![APComplex::zero(self.prec()); r.len() - dn];
        for i in (0..q.len()).rev() {
            let c = r[i + dn].clone();
            for (j, dc) in d.coeffs.iter().enumerate() {
                let t = &c * dc;
                r[i + j] -= &t;
            }
            q[i] = c;
        }
        r.truncate(dn);
        (CPoly { coeffs: q }, CPoly { coeffs: r })
    }

    pub fn eval(&self, x: &APComplex) -> APComplex {
        let mut acc = APComplex::zero(self.prec().max(x.prec()));
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        CPoly { coeffs: self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c.mul_i64(i as i64)).collect() }
    }

    /// Monic `Π (X - r_i)` by a balanced product tree.
    pub fn from_roots(roots: &[APComplex]) -> Self {
        match roots.len() {
            0 => CPoly::constant(APComplex::one(64)),
            1 => CPoly::linear(&roots[0]),
            n => {
                let (l, r) = roots.split_at(n / 2);
                Self::from_roots(l).mul(&Self::from_roots(r))
            }
        }
    }

    /// Round real parts to integers, accepting only if every coefficient is
    /// within `tol` of an integer (imaginary parts included).
    pub fn round_to_int(&self, tol: f64) -> Option<IntPolyUV> {
        let mut out = Vec::with_capacity(self.len());
        for c in &self.coeffs {
            let (r, dist) = c.round_real()?;
            if dist.to_f64() > tol || c.im().to_f64().abs() > tol {
                return None;
            }
            out.push(r);
        }
        Some(IntPolyUV::new(out))
    }
}

/// All complex roots of an integer polynomial by Aberth–Ehrlich iteration.
pub fn aberth_roots(p: &IntPolyUV, prec: u32) -> Vec<APComplex> {
    let Some(n) = p.degree() else { return Vec::new() };
    if n == 0 {
        return Vec::new();
    }
    // strip roots at zero
    let z = p.coeffs().iter().take_while(|c| **c == 0).count();
    let mut roots: Vec<APComplex> = (0..z).map(|_| APComplex::zero(prec)).collect();
    let q = IntPolyUV::new(p.coeffs()[z..].to_vec());
    let m = n - z;
    if m == 0 {
        return roots;
    }
    let f = CPoly::from_int(&q, prec);
    let df = f.derivative();
    // initial points on circles whose radii come from the Newton polygon of
    // (i, log2|c_i|), so roots of very different sizes each get a nearby start
    let lb = |c: &Integer| if *c == 0 { f64::NEG_INFINITY } else { c.to_f64_exp().1 as f64 + c.to_f64_exp().0.abs().log2() };
    let pts: Vec<(usize, f64)> = q.coeffs().iter().enumerate().map(|(i, c)| (i, lb(c))).filter(|(_, l)| l.is_finite()).collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b if it lies on or below the segment a → pt
            if (b.1 - a.1) * (pt.0 - a.0) as f64 <= (pt.1 - a.1) * (b.0 - a.0) as f64 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut zs: Vec<APComplex> = Vec::with_capacity(m);
    for w in hull.windows(2) {
        let (i, k) = (w[0].0, w[1].0);
        let lrad = (w[0].1 - w[1].1) / (k - i) as f64;
        let (ei, fr) = (lrad.floor() as i32, lrad - lrad.floor());
        let rad = 2f64.powf(fr);
        let cnt = k - i;
        for j in 0..cnt {
            let th = 2.0 * std::f64::consts::PI * (j as f64 + 0.25) / cnt as f64 + 0.4 + 0.7 * i as f64;
            zs.push(APComplex::from_f64(rad * th.cos(), rad * th.sin(), prec).mul_pow2(ei));
        }
    }
    debug_assert_eq!(zs.len(), m);
    let tol = -(prec as i32) + 16;
    for _ in 0..4000 {
        let mut done = true;
        for k in 0..m {
            let fk = f.eval(&zs[k]);
            if fk.is_zero() {
                continue;
            }
            let ratio = &fk / &df.eval(&zs[k]);
            let mut s = APComplex::zero(prec);
            for j in 0..m {
                if j != k {
                    s += &(&zs[k] - &zs[j]).recip();
                }
            }
            let denom = APComplex::one(prec) - &ratio * &s;
            let step = &ratio / &denom;
            let scale = zs[k].exponent().unwrap_or(0).max(0);
            if step.exponent().is_some_and(|e| e - scale > tol) {
                done = false;
            }
            zs[k] -= &step;
        }
        if done {
            break;
        }
    }
    roots.extend(zs);
    roots
}

/// Mahler measure `|lead|·Π max(1, |α_i|)`.
pub fn mahler_measure(p: &IntPolyUV, prec: u32) -> Float {
    let Some(lead) = p.lead() else { return Float::new(prec) };
    let mut m = Float::with_val(prec, lead).abs();
    for r in aberth_roots(p, prec) {
        let a = r.abs();
        if a > 1 {
            m *= a;
        }
    }
    m
}
