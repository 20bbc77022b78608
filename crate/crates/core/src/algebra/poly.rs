//! Dense univariate polynomials over F_q: the ring A = F_q\[t\].
//!
//! Coefficients are stored ascending; the vector is empty for the zero
//! polynomial and its last entry is nonzero otherwise. The distinguished
//! prime of the crate is ℘ = t, so the t-adic valuation of a polynomial is
//! just the index of its lowest nonzero coefficient.

use alloc::vec;
use alloc::vec::Vec;

use super::field::{FieldElem, FieldSpec};
use super::AlgebraError;

/// A t-adic valuation: finite or +∞ (the valuation of 0), with ∞ ordered
/// above every natural number.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Val {
    Fin(u64),
    Inf,
}

impl Val {
    pub fn is_inf(&self) -> bool {
        matches!(self, Val::Inf)
    }

    pub fn finite(&self) -> Option<u64> {
        match self {
            Val::Fin(v) => Some(*v),
            Val::Inf => None,
        }
    }
}

impl PartialOrd for Val {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Val {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        match (self, other) {
            (Val::Inf, Val::Inf) => core::cmp::Ordering::Equal,
            (Val::Inf, Val::Fin(_)) => core::cmp::Ordering::Greater,
            (Val::Fin(_), Val::Inf) => core::cmp::Ordering::Less,
            (Val::Fin(a), Val::Fin(b)) => a.cmp(b),
        }
    }
}

/// Element of A = F_q\[t\].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Poly {
    coeffs: Vec<FieldElem>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn one(f: &FieldSpec) -> Poly {
        Poly::constant(f.one())
    }

    /// The variable t.
    pub fn t(f: &FieldSpec) -> Poly {
        Poly {
            coeffs: vec![f.zero(), f.one()],
        }
    }

    pub fn constant(c: FieldElem) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { coeffs: vec![c] }
        }
    }

    /// c · t^n.
    pub fn monomial(c: FieldElem, n: usize) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![FieldElem::default(); n + 1];
        coeffs[n] = c;
        Poly { coeffs }
    }

    /// From ascending coefficients; trailing zeros are stripped.
    pub fn from_coeffs(coeffs: Vec<FieldElem>) -> Poly {
        let mut p = Poly { coeffs };
        p.normalize();
        p
    }

    /// Ascending integer coefficients reduced into the prime subfield.
    pub fn from_ints(f: &FieldSpec, ints: &[i64]) -> Poly {
        Poly::from_coeffs(ints.iter().map(|&i| f.from_int(i)).collect())
    }

    fn normalize(&mut self) {
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self, f: &FieldSpec) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == f.one()
    }

    /// Degree; None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree as used in ∞-adic estimates: deg 0 is taken for nonzero
    /// constants; panics on zero.
    pub fn degree_or_panic(&self) -> usize {
        self.degree().expect("degree of zero polynomial")
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElem {
        self.coeffs.get(i).copied().unwrap_or_default()
    }

    pub fn leading(&self) -> Option<FieldElem> {
        self.coeffs.last().copied()
    }

    /// Index of the lowest nonzero coefficient; ∞ for the zero polynomial.
    pub fn t_valuation(&self) -> Val {
        match self.coeffs.iter().position(|c| !c.is_zero()) {
            Some(i) => Val::Fin(i as u64),
            None => Val::Inf,
        }
    }

    pub fn add(&self, other: &Poly, f: &FieldSpec) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(f.add(self.coeff(i), other.coeff(i)));
        }
        Poly::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &Poly, f: &FieldSpec) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(f.sub(self.coeff(i), other.coeff(i)));
        }
        Poly::from_coeffs(coeffs)
    }

    pub fn neg(&self, f: &FieldSpec) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }

    pub fn mul(&self, other: &Poly, f: &FieldSpec) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![FieldElem::default(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = f.add(coeffs[i + j], f.mul(a, b));
            }
        }
        Poly::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: FieldElem, f: &FieldSpec) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    /// Multiply by t^n.
    pub fn shift_up(&self, n: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![FieldElem::default(); n];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { coeffs }
    }

    pub fn pow(&self, mut n: u64, f: &FieldSpec) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(f);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base, f);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base, f);
            }
        }
        acc
    }

    /// Euclidean division: (quotient, remainder) with deg rem < deg divisor.
    pub fn divrem(&self, divisor: &Poly, f: &FieldSpec) -> Result<(Poly, Poly), AlgebraError> {
        if divisor.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        let dd = divisor.coeffs.len();
        let lead_inv = f.inv(divisor.leading().unwrap())?;
        let mut rem = self.coeffs.clone();
        if rem.len() < dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![FieldElem::default(); rem.len() - dd + 1];
        for k in (0..quot.len()).rev() {
            let top = rem[k + dd - 1];
            if top.is_zero() {
                continue;
            }
            let q = f.mul(top, lead_inv);
            quot[k] = q;
            for (i, &dc) in divisor.coeffs.iter().enumerate() {
                rem[k + i] = f.sub(rem[k + i], f.mul(q, dc));
            }
        }
        Ok((Poly::from_coeffs(quot), Poly::from_coeffs(rem)))
    }

    /// Exact division; errors unless divisor divides self.
    pub fn div_exact(&self, divisor: &Poly, f: &FieldSpec) -> Result<Poly, AlgebraError> {
        let (q, r) = self.divrem(divisor, f)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(AlgebraError::Invalid("inexact polynomial division".into()))
        }
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, other: &Poly, f: &FieldSpec) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b, f).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.make_monic(f)
    }

    /// Extended gcd: returns (g, u, v) with u·self + v·other = g, g monic.
    pub fn ext_gcd(&self, other: &Poly, f: &FieldSpec) -> (Poly, Poly, Poly) {
        let mut r0 = self.clone();
        let mut r1 = other.clone();
        let mut s0 = Poly::one(f);
        let mut s1 = Poly::zero();
        let mut t0 = Poly::zero();
        let mut t1 = Poly::one(f);
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1, f).expect("nonzero divisor");
            let s = s0.sub(&q.mul(&s1, f), f);
            let t = t0.sub(&q.mul(&t1, f), f);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        if let Some(lead) = r0.leading() {
            let inv = f.inv(lead).expect("unit leading coefficient");
            r0 = r0.scale(inv, f);
            s0 = s0.scale(inv, f);
            t0 = t0.scale(inv, f);
        }
        (r0, s0, t0)
    }

    pub fn make_monic(&self, f: &FieldSpec) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(l) => self.scale(f.inv(l).expect("nonzero leading"), f),
        }
    }

    pub fn eval(&self, x: FieldElem, f: &FieldSpec) -> FieldElem {
        let mut acc = f.zero();
        for &c in self.coeffs.iter().rev() {
            acc = f.add(f.mul(acc, x), c);
        }
        acc
    }

    /// Composition self(other(t)).
    pub fn compose(&self, other: &Poly, f: &FieldSpec) -> Poly {
        let mut acc = Poly::zero();
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(other, f).add(&Poly::constant(c), f);
        }
        acc
    }

    /// The substitution t ↦ t + c.
    pub fn shift_var(&self, c: FieldElem, f: &FieldSpec) -> Poly {
        let shift = Poly::from_coeffs(vec![c, f.one()]);
        self.compose(&shift, f)
    }

    /// Reduce modulo m (canonical representative of degree < deg m).
    pub fn rem(&self, m: &Poly, f: &FieldSpec) -> Poly {
        self.divrem(m, f).expect("nonzero modulus").1
    }

    /// True if self is a nonzero constant.
    pub fn is_unit(&self) -> bool {
        self.coeffs.len() == 1
    }

    /// Formal derivative.
    pub fn derivative(&self, f: &FieldSpec) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() - 1);
        for (i, &c) in self.coeffs.iter().enumerate().skip(1) {
            coeffs.push(f.mul(c, f.from_int(i as i64)));
        }
        Poly::from_coeffs(coeffs)
    }

    /// Irreducibility over F_q by trial division against all monic divisors
    /// of degree ≤ deg/2. Intended for the small degrees this crate uses.
    pub fn is_irreducible(&self, f: &FieldSpec) -> bool {
        let deg = match self.degree() {
            None | Some(0) => return false,
            Some(d) => d,
        };
        if deg == 1 {
            return true;
        }
        for d in 1..=deg / 2 {
            for cand in enumerate_monic(f, d) {
                let (_, r) = self.divrem(&cand, f).expect("nonzero");
                if r.is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// Render as a human-readable string like "1+2t+t^3".
    pub fn render(&self) -> alloc::string::String {
        use core::fmt::Write;
        if self.is_zero() {
            return "0".into();
        }
        let mut out = alloc::string::String::new();
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                out.push('+');
            }
            first = false;
            let coord0 = c.coord(0);
            let scalar = c.coords()[1..].iter().all(|&x| x == 0);
            let body = if scalar {
                if coord0 == 1 && i > 0 {
                    alloc::string::String::new()
                } else {
                    alloc::format!("{}", coord0)
                }
            } else {
                let mut s = alloc::string::String::from("(");
                for (j, &x) in c.coords().iter().enumerate() {
                    if j > 0 {
                        s.push(',');
                    }
                    let _ = write!(s, "{}", x);
                }
                s.push(')');
                s
            };
            out.push_str(&body);
            if i == 1 {
                out.push('t');
            } else if i > 1 {
                let _ = write!(out, "t^{}", i);
            }
        }
        out
    }
}

/// All monic polynomials of exact degree d.
pub fn enumerate_monic(f: &FieldSpec, d: usize) -> Vec<Poly> {
    let mut out = Vec::new();
    let elems = f.elements();
    let mut idx = vec![0usize; d];
    loop {
        let mut coeffs: Vec<FieldElem> = idx.iter().map(|&i| elems[i]).collect();
        coeffs.push(f.one());
        out.push(Poly::from_coeffs(coeffs));
        let mut i = 0;
        loop {
            if i == d {
                return out;
            }
            idx[i] += 1;
            if idx[i] < elems.len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// All polynomials of degree < d (including zero): canonical representatives
/// of A/(Q) for monic Q of degree d.
pub fn enumerate_below(f: &FieldSpec, d: usize) -> Vec<Poly> {
    let mut out = Vec::new();
    let elems = f.elements();
    let mut idx = vec![0usize; d];
    loop {
        let coeffs: Vec<FieldElem> = idx.iter().map(|&i| elems[i]).collect();
        out.push(Poly::from_coeffs(coeffs));
        let mut i = 0;
        loop {
            if i == d {
                return out;
            }
            idx[i] += 1;
            if idx[i] < elems.len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}
