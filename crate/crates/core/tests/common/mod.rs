//! Golden tables and a small independent parser for their polynomial notation.
#![allow(dead_code)]

use genclass::classpoly::GenClassFunction;
use genclass::numerics::IntPolyXY;
use std::collections::BTreeMap;

/// Parse a signed sum of monomials such as `- 13 x^5 y + 2xw^{3}z` into
/// `exponents (in the order of `vars`) → coefficient`.
pub fn parse_terms(s: &str, vars: &[char]) -> BTreeMap<Vec<u32>, i64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace() && *c != '{' && *c != '}').collect();
    let mut out = BTreeMap::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let mut sign = 1;
        if chars[i] == '+' || chars[i] == '-' {
            sign = if chars[i] == '-' { -1 } else { 1 };
            i += 1;
        }
        let mut num = String::new();
        while i < chars.len() && chars[i].is_ascii_digit() {
            num.push(chars[i]);
            i += 1;
        }
        let mut exps = vec![0u32; vars.len()];
        while i < chars.len() && chars[i].is_alphabetic() {
            let v = vars.iter().position(|&c| c == chars[i]).expect("unknown variable");
            i += 1;
            let mut e = 1;
            if i < chars.len() && chars[i] == '^' {
                i += 1;
                let mut d = String::new();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    d.push(chars[i]);
                    i += 1;
                }
                e = d.parse().unwrap();
            }
            exps[v] += e;
        }
        let c: i64 = if num.is_empty() { 1 } else { num.parse().unwrap() };
        assert!(out.insert(exps, sign * c).is_none(), "repeated monomial in {s}");
    }
    out
}

pub fn standard_terms(f: &IntPolyXY) -> BTreeMap<Vec<u32>, i64> {
    f.monomials().into_iter().map(|(c, dx, dy)| (vec![dx as u32, dy as u32], c.to_i64().unwrap())).collect()
}

/// Terms of the eta-mixed serialization (`coeff degX degZ degW` lines).
pub fn etamixed_terms(g: &GenClassFunction) -> BTreeMap<Vec<u32>, i64> {
    g.to_text()
        .lines()
        .skip(1)
        .map(|l| {
            let v: Vec<i64> = l.split_whitespace().map(|t| t.parse().unwrap()).collect();
            (vec![v[1] as u32, v[2] as u32, v[3] as u32], v[0])
        })
        .collect()
}

pub fn same_up_to_sign(a: &BTreeMap<Vec<u32>, i64>, b: &BTreeMap<Vec<u32>, i64>) -> bool {
    let neg: BTreeMap<_, _> = b.iter().map(|(k, v)| (k.clone(), -v)).collect();
    a == b || *a == neg
}

pub const TABLE_XY: [(i64, &str); 4] = [
    (-52, "y+1"),
    (-523, "x^3 + x^2 - 2xy - 3x - 2y"),
    (
        -5347,
        "x^7 + 58 x^6 - 13 x^5 y - 39 x^5 - 143 x^4 y - 85 x^4 - 135 x^3 y
         - 19 x^3 - 51 x^2 y + 47 x^2 + 7 x y - 12 x - y + 1",
    ),
    (
        -15139,
        "x^{15} + 1028x^{14} - 40x^{13}y + 37342x^{13} - 10557x^{12}y + 79865x^{12}
         - 167759x^{11}y - 385199x^{11} - 474165x^{10}y - 425857x^{10} - 69261x^9y
         +345059x^9 + 493309x^8y + 309689x^8 + 168403x^7y - 132377x^7
         - 145439x^6y - 22165x^6 - 16029x^5y + 16139x^5 + 15225x^4y - 4867x^4
         - 7127x^3y - 456x^3 + 623x^2y + 423x^2 + 337xy - 65x - 64y",
    ),
];

pub const TABLE_XZW: [(i64, &str); 4] = [
    (-52, "z-x+1"),
    (-523, "xw - xz - x + 3w + z"),
    (
        -5347,
        "xw^3 - 10xw^2z + 42xw^2 + 48w^3 + 13xwz + 35w^2z + 62xw
         + 104w^2 + 39xz + 90wz - 11x + 41w + 39z + 1",
    ),
    (
        -15139,
        "xw^7 - 33xw^6z + 5874xw^6 + 849w^7 - 2119xw^5z - 3865w^6z
         + 31183xw^5 - 4249w^6 + 2200xw^4z - 15449w^5z + 36423xw^4
         -29399w^5+6066xw^3z-46282w^4z+46223xw^3-27578w^4+6207xw^2z
         - 30128w^3z + 31320xw^2 - 47581w^3 + 6757xwz - 35595w^2z
         + 8017xw - 17181w^2 - 742xz - 10159wz - x - 2797w + 22z",
    ),
];
