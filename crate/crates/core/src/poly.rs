//! Real univariate polynomials and exact Sturm sequences.
//!
//! Coefficients arrive as `f64`, which are dyadic rationals, so the chain is
//! built over the integers with a primitive pseudo-remainder sequence. Sign
//! counts are then exact for the polynomial as given.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Float, One, Signed, Zero};
use std::cmp::Ordering;

/// Coefficients in ascending order, `c[0] + c[1] x + ...`.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Poly {
    pub c: Vec<f64>,
}

impl Poly {
    pub fn new(mut c: Vec<f64>) -> Self {
        while c.len() > 1 && c.last() == Some(&0.0) {
            c.pop();
        }
        Poly { c }
    }

    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }
}

/// Integer polynomial, ascending, no trailing zeros except for the zero polynomial.
type IPoly = Vec<BigInt>;

/// `x = m · 2^e` with `m` an integer.
fn decode(x: f64) -> (BigInt, i32) {
    let (mant, exp, sign) = x.integer_decode();
    (BigInt::from(sign) * BigInt::from(mant), exp as i32)
}

fn to_integers(c: &[f64]) -> IPoly {
    assert!(c.iter().all(|v| v.is_finite()), "polynomial coefficients must be finite");
    let parts: Vec<_> = c.iter().map(|&v| decode(v)).collect();
    let emin = parts.iter().filter(|(m, _)| !m.is_zero()).map(|p| p.1).min().unwrap_or(0);
    primitive(parts.into_iter().map(|(m, e)| m << (e - emin) as usize).collect())
}

fn trim(mut p: IPoly) -> IPoly {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn is_zero(p: &IPoly) -> bool {
    p.iter().all(Zero::is_zero)
}

/// Divide out the positive content.
fn primitive(p: IPoly) -> IPoly {
    let p = trim(p);
    let g = p.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
    if g.is_zero() || g.is_one() {
        return p;
    }
    p.into_iter().map(|v| v / &g).collect()
}

fn derivative(p: &IPoly) -> IPoly {
    if p.len() <= 1 {
        return vec![BigInt::zero()];
    }
    primitive(p.iter().enumerate().skip(1).map(|(i, v)| v * i).collect())
}

/// Remainder of `|lc(b)|^k · a` on division by `b`, for some `k ≥ 0`.
fn pseudo_rem(a: &IPoly, b: &IPoly) -> IPoly {
    let db = b.len() - 1;
    let lead = b[db].clone();
    let scale = lead.abs();
    let mut r = a.clone();
    while r.len() > db && !is_zero(&r) {
        let k = r.len() - 1;
        let q = if lead.is_negative() { -&r[k] } else { r[k].clone() };
        for v in r.iter_mut() {
            *v *= &scale;
        }
        for (i, bv) in b.iter().enumerate() {
            r[k - db + i] -= &q * bv;
        }
        r.pop();
        r = trim(r);
    }
    r
}

/// Sign of `p(x)`, computed exactly.
fn sign_at(p: &IPoly, x: f64) -> Ordering {
    let (m, e) = decode(x);
    let n = p.len() - 1;
    let mut acc = p[n].clone();
    if e >= 0 {
        let xi = m << e as usize;
        for v in p[..n].iter().rev() {
            acc = acc * &xi + v;
        }
    } else {
        // p(m / 2^q) · 2^(qn) = Σ c_i m^i 2^(q(n−i))
        let q = (-e) as usize;
        for (j, v) in p[..n].iter().rev().enumerate() {
            acc = acc * &m + (v << (q * (j + 1)));
        }
    }
    acc.sign().cmp_zero()
}

trait CmpZero {
    fn cmp_zero(self) -> Ordering;
}

impl CmpZero for num_bigint::Sign {
    fn cmp_zero(self) -> Ordering {
        match self {
            num_bigint::Sign::Minus => Ordering::Less,
            num_bigint::Sign::NoSign => Ordering::Equal,
            num_bigint::Sign::Plus => Ordering::Greater,
        }
    }
}

/// Sturm sequence of a nonzero polynomial.
pub(crate) struct Sturm {
    chain: Vec<IPoly>,
    bound: f64,
}

impl Sturm {
    pub fn new(p: &Poly) -> Self {
        let bound = root_bound(&p.c);
        let p0 = to_integers(&p.c);
        assert!(!is_zero(&p0), "Sturm sequence of the zero polynomial");
        let mut chain = vec![p0];
        let d = derivative(&chain[0]);
        if !is_zero(&d) {
            chain.push(d);
            loop {
                let n = chain.len();
                let r = pseudo_rem(&chain[n - 2], &chain[n - 1]);
                if is_zero(&r) {
                    break;
                }
                chain.push(primitive(r.into_iter().map(|v| -v).collect()));
                if chain[n].len() == 1 {
                    break;
                }
            }
        }
        Sturm { chain, bound }
    }

    fn changes(signs: impl Iterator<Item = Ordering>) -> usize {
        let mut last = Ordering::Equal;
        let mut count = 0;
        for s in signs.filter(|s| s.is_ne()) {
            if last.is_ne() && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    fn changes_at(&self, x: f64) -> usize {
        Self::changes(self.chain.iter().map(|p| sign_at(p, x)))
    }

    fn changes_at_infinity(&self, positive: bool) -> usize {
        Self::changes(self.chain.iter().map(|p| {
            let s = p.last().unwrap().sign().cmp_zero();
            if positive || (p.len() - 1) % 2 == 0 {
                s
            } else {
                s.reverse()
            }
        }))
    }

    /// Distinct real roots over the whole line.
    pub fn count_all(&self) -> usize {
        self.changes_at_infinity(false)
            .saturating_sub(self.changes_at_infinity(true))
    }

    /// Distinct real roots in `(a, b]`.
    pub fn count_in(&self, a: f64, b: f64) -> usize {
        self.changes_at(a).saturating_sub(self.changes_at(b))
    }

    /// Distinct real roots, located by Sturm-count bisection.
    pub fn roots(&self) -> Vec<f64> {
        let bound = self.bound;
        let mut out = vec![];
        let mut stack = vec![(-bound, bound)];
        let tol = 1e-14 * bound;
        while let Some((a, b)) = stack.pop() {
            let n = self.count_in(a, b);
            if n == 0 {
                continue;
            }
            if n == 1 {
                let (sa, sb) = (sign_at(&self.chain[0], a), sign_at(&self.chain[0], b));
                if sb.is_eq() {
                    out.push(b);
                    continue;
                }
                if sa.is_ne() && sa != sb {
                    out.push(self.refine(a, b, sa, tol));
                    continue;
                }
            }
            let mid = 0.5 * (a + b);
            if b - a <= tol || mid <= a || mid >= b {
                out.push(mid);
                continue;
            }
            stack.push((mid, b));
            stack.push((a, mid));
        }
        out.sort_by(f64::total_cmp);
        out
    }
}

impl Sturm {
    /// Bisection on the sign of the polynomial itself.
    fn refine(&self, mut a: f64, mut b: f64, sa: Ordering, tol: f64) -> f64 {
        loop {
            let mid = 0.5 * (a + b);
            if b - a <= tol || mid <= a || mid >= b {
                return mid;
            }
            match sign_at(&self.chain[0], mid) {
                Ordering::Equal => return mid,
                s if s == sa => a = mid,
                _ => b = mid,
            }
        }
    }
}

/// Cauchy bound on the modulus of all roots, rounded up to a power of two.
fn root_bound(c: &[f64]) -> f64 {
    let n = c.len() - 1;
    let lead = c[n].abs();
    let b = 1.0 + c[..n].iter().fold(0.0_f64, |a, v| a.max(v.abs() / lead));
    2.0_f64.powi(b.log2().ceil() as i32 + 1)
}
