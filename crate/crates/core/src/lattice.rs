//! Exact LLL reduction and integer-relation detection.

use crate::error::{Error, Result};
use crate::numerics::APComplex;
use rug::{Complete, Float, Integer, Rational};

/// Lattice spanned by integer row vectors of equal length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntLattice {
    pub rows: Vec<Vec<Integer>>,
}

impl IntLattice {
    pub fn new(rows: Vec<Vec<Integer>>) -> Result<Self> {
        if let Some(first) = rows.first() {
            if rows.iter().any(|r| r.len() != first.len()) {
                return Err(Error::Precondition("rows of unequal length".into()));
            }
        }
        Ok(IntLattice { rows })
    }

    pub fn from_i64s(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(rows.iter().map(|r| r.iter().map(|&v| Integer::from(v)).collect()).collect())
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }
}

pub fn dot(a: &[Integer], b: &[Integer]) -> Integer {
    let mut s = Integer::new();
    for (x, y) in a.iter().zip(b) {
        s += x * y;
    }
    s
}

fn sub_mul(row: &mut [Integer], other: &[Integer], q: &Integer) {
    for (x, y) in row.iter_mut().zip(other) {
        *x -= q * y;
    }
}

/// Round `a / b` to the nearest integer (`b > 0`).
fn round_div(a: &Integer, b: &Integer) -> Integer {
    let two_a = Integer::from(a << 1) + b;
    two_a.div_rem_floor(Integer::from(b << 1)).0
}

struct State {
    b: Vec<Vec<Integer>>,
    // d[i + 1] holds the Gram determinant d_i; d[0] = 1
    d: Vec<Integer>,
    lam: Vec<Vec<Integer>>,
}

impl State {
    fn red(&mut self, k: usize, l: usize) {
        let dl = &self.d[l + 1];
        let twice = Integer::from(self.lam[k][l].abs_ref()) << 1;
        if twice <= *dl {
            return;
        }
        let q = round_div(&self.lam[k][l], dl);
        let (lo, hi) = self.b.split_at_mut(k);
        sub_mul(&mut hi[0], &lo[l], &q);
        let qd = Integer::from(&q * dl);
        self.lam[k][l] -= qd;
        for i in 0..l {
            let t = Integer::from(&q * &self.lam[l][i]);
            self.lam[k][i] -= t;
        }
    }

    fn swap(&mut self, k: usize, kmax: usize) {
        self.b.swap(k, k - 1);
        for j in 0..k - 1 {
            let t = std::mem::take(&mut self.lam[k][j]);
            self.lam[k][j] = std::mem::replace(&mut self.lam[k - 1][j], t);
        }
        let lam = self.lam[k][k - 1].clone();
        let dk = self.d[k + 1].clone();
        let dk1 = self.d[k].clone();
        let dk2 = &self.d[k - 1];
        let bb = (Integer::from(dk2 * &dk) + Integer::from(lam.square_ref())).div_exact(&dk1);
        for i in k + 1..=kmax {
            let t = self.lam[i][k].clone();
            let nk = (Integer::from(&dk * &self.lam[i][k - 1]) - Integer::from(&lam * &t)).div_exact(&dk1);
            let nk1 = (Integer::from(&bb * &t) + Integer::from(&lam * &nk)).div_exact(&dk);
            self.lam[i][k] = nk;
            self.lam[i][k - 1] = nk1;
        }
        self.d[k] = bb;
    }
}

/// δ-LLL reduction in exact integer arithmetic (integral Gram–Schmidt).
pub fn lll_reduce(lat: &IntLattice, delta: &Rational) -> Result<IntLattice> {
    if *delta <= Rational::from((1, 4)) || *delta >= 1 {
        return Err(Error::Precondition("delta must lie in (1/4, 1)".into()));
    }
    let n = lat.dim();
    if n == 0 {
        return Ok(lat.clone());
    }
    let (p, q) = (delta.numer().clone(), delta.denom().clone());
    let mut st = State { b: lat.rows.clone(), d: vec![Integer::from(1); n + 1], lam: vec![vec![Integer::new(); n]; n] };
    st.d[1] = dot(&st.b[0], &st.b[0]);
    if st.d[1] == 0 {
        return Err(Error::DependentRows);
    }
    let mut k = 1usize;
    let mut kmax = 0usize;
    while k < n {
        if k > kmax {
            kmax = k;
            for j in 0..=k {
                let mut u = dot(&st.b[k], &st.b[j]);
                for i in 0..j {
                    u = (Integer::from(&st.d[i + 1] * &u) - Integer::from(&st.lam[k][i] * &st.lam[j][i])).div_exact(&st.d[i]);
                }
                if j < k {
                    st.lam[k][j] = u;
                } else {
                    if u == 0 {
                        return Err(Error::DependentRows);
                    }
                    st.d[k + 1] = u;
                }
            }
        }
        st.red(k, k - 1);
        // Lovász: q·(d_k d_{k-2} + λ²) < p·d_{k-1}² triggers a swap
        let lhs = (Integer::from(&st.d[k + 1] * &st.d[k - 1]) + Integer::from(st.lam[k][k - 1].square_ref())) * &q;
        let rhs = Integer::from(st.d[k].square_ref()) * &p;
        if lhs < rhs {
            st.swap(k, kmax);
            k = k.saturating_sub(1).max(1);
        } else {
            for l in (0..k - 1).rev() {
                st.red(k, l);
            }
            k += 1;
        }
    }
    Ok(IntLattice { rows: st.b })
}

/// Result of [`integer_relation`].
#[derive(Clone, Debug)]
pub struct Relation {
    pub coeffs: Vec<Integer>,
    /// Largest residual over all rows, relative to the row's largest entry.
    pub residual: Float,
}

/// Nonzero `a` with `Σ a_i v[r][i] ≈ 0` for every row `r`.
///
/// Each row is scaled by `2^(prec - e_r)` where `2^e_r` bounds its largest
/// entry, so the residual test is relative: `|Σ a_i v[r][i]| < 2^(e_r - prec/2)`.
pub fn integer_relation(values: &[Vec<APComplex>], prec: u32, coeff_bound: &Integer) -> Result<Relation> {
    let k = values.first().map_or(0, |r| r.len());
    if k == 0 || values.iter().any(|r| r.len() != k) {
        return Err(Error::Precondition("values must be a non-empty rectangular matrix".into()));
    }
    let wprec = prec + 64;
    let scales: Vec<i32> = values.iter().map(|r| r.iter().filter_map(|v| v.exponent()).max().unwrap_or(0)).collect();
    if values.iter().all(|r| r.iter().all(|v| v.is_zero())) {
        let mut coeffs = vec![Integer::new(); k];
        coeffs[0] = Integer::from(1);
        return Ok(Relation { coeffs, residual: Float::new(wprec) });
    }
    let to_int = |f: &Float, shift: i32| -> Integer {
        let g = Float::with_val(wprec, f << shift);
        g.round().to_integer().unwrap_or_default()
    };
    let rows: Vec<Vec<Integer>> = (0..k)
        .map(|i| {
            let mut row = vec![Integer::new(); k];
            row[i] = Integer::from(1);
            for (r, vals) in values.iter().enumerate() {
                let shift = prec as i32 - scales[r];
                row.push(to_int(vals[i].re(), shift));
                row.push(to_int(vals[i].im(), shift));
            }
            row
        })
        .collect();
    let red = lll_reduce(&IntLattice { rows }, &Rational::from((99, 100)))?;
    let mut best: Option<(Integer, Relation)> = None;
    for row in &red.rows {
        let a = &row[..k];
        if a.iter().all(|v| *v == 0) || a.iter().any(|v| Integer::from(v.abs_ref()) > *coeff_bound) {
            continue;
        }
        let residual = relative_residual(values, &scales, a, wprec);
        let limit = Float::with_val(wprec, Float::i_exp(1, -((prec / 2) as i32)));
        if residual >= limit {
            continue;
        }
        let norm = dot(a, a);
        if best.as_ref().is_none_or(|(n, _)| norm < *n) {
            let mut coeffs = a.to_vec();
            normalize_sign(&mut coeffs);
            best = Some((norm, Relation { coeffs, residual }));
        }
    }
    best.map(|(_, r)| r).ok_or_else(|| Error::InsufficientPrecision(format!("no relation passed the residual test at {prec} bits")))
}

fn relative_residual(values: &[Vec<APComplex>], scales: &[i32], a: &[Integer], prec: u32) -> Float {
    let mut worst = Float::new(prec);
    for (r, vals) in values.iter().enumerate() {
        let mut s = APComplex::zero(prec);
        for (c, v) in a.iter().zip(vals) {
            if *c != 0 {
                s += &v.mul_integer(c);
            }
        }
        let rel = Float::with_val(prec, s.abs() >> scales[r]);
        if rel > worst {
            worst = rel;
        }
    }
    worst
}

/// Make the last nonzero entry positive.
pub fn normalize_sign(a: &mut [Integer]) {
    if let Some(v) = a.iter().rev().find(|v| **v != 0) {
        if *v < 0 {
            for x in a.iter_mut() {
                *x = -std::mem::take(x);
            }
        }
    }
}

/// Primitive part, also returning the content.
pub fn primitive(a: &[Integer]) -> (Vec<Integer>, Integer) {
    let g = a.iter().fold(Integer::new(), |g, v| g.gcd(v));
    if g == 0 {
        return (a.to_vec(), g);
    }
    (a.iter().map(|v| v.div_exact_ref(&g).complete()).collect(), g)
}
