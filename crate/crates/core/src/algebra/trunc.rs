//! Truncated power series F_q\[\[t\]\]/t^P, the desk-scale model of the integer
//! ring of the local field at t. Arithmetic is closed at a fixed precision P;
//! valuations at or beyond P are reported with an explicit "≥ P" flag rather
//! than silently conflated with exact values.

use alloc::vec;
use alloc::vec::Vec;

use super::field::{FieldElem, FieldSpec};
use super::poly::Poly;
use super::AlgebraError;

/// Valuation of a truncated series: exactly v, or ≥ the working precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TruncVal {
    Exact(usize),
    AtLeast(usize),
}

impl TruncVal {
    pub fn exact(&self) -> Option<usize> {
        match self {
            TruncVal::Exact(v) => Some(*v),
            TruncVal::AtLeast(_) => None,
        }
    }

    /// Lower bound on the valuation in either case.
    pub fn lower_bound(&self) -> usize {
        match self {
            TruncVal::Exact(v) | TruncVal::AtLeast(v) => *v,
        }
    }
}

/// Element of F_q\[\[t\]\]/t^prec; `coeffs` always has length `prec`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSeries {
    prec: usize,
    coeffs: Vec<FieldElem>,
}

impl TruncSeries {
    pub fn zero(prec: usize) -> TruncSeries {
        TruncSeries {
            prec,
            coeffs: vec![FieldElem::default(); prec],
        }
    }

    pub fn one(prec: usize, f: &FieldSpec) -> TruncSeries {
        let mut s = TruncSeries::zero(prec);
        if prec > 0 {
            s.coeffs[0] = f.one();
        }
        s
    }

    pub fn from_poly(p: &Poly, prec: usize) -> TruncSeries {
        let mut s = TruncSeries::zero(prec);
        for i in 0..prec.min(p.coeffs().len()) {
            s.coeffs[i] = p.coeff(i);
        }
        s
    }

    /// The truncation as a polynomial of degree < prec.
    pub fn to_poly(&self) -> Poly {
        Poly::from_coeffs(self.coeffs.clone())
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn coeff(&self, i: usize) -> FieldElem {
        self.coeffs.get(i).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn valuation(&self) -> TruncVal {
        match self.coeffs.iter().position(|c| !c.is_zero()) {
            Some(v) => TruncVal::Exact(v),
            None => TruncVal::AtLeast(self.prec),
        }
    }

    pub fn add(&self, other: &TruncSeries, f: &FieldSpec) -> TruncSeries {
        let prec = self.prec.min(other.prec);
        let mut coeffs = Vec::with_capacity(prec);
        for i in 0..prec {
            coeffs.push(f.add(self.coeffs[i], other.coeffs[i]));
        }
        TruncSeries { prec, coeffs }
    }

    pub fn sub(&self, other: &TruncSeries, f: &FieldSpec) -> TruncSeries {
        let prec = self.prec.min(other.prec);
        let mut coeffs = Vec::with_capacity(prec);
        for i in 0..prec {
            coeffs.push(f.sub(self.coeffs[i], other.coeffs[i]));
        }
        TruncSeries { prec, coeffs }
    }

    pub fn neg(&self, f: &FieldSpec) -> TruncSeries {
        TruncSeries {
            prec: self.prec,
            coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect(),
        }
    }

    pub fn mul(&self, other: &TruncSeries, f: &FieldSpec) -> TruncSeries {
        let prec = self.prec.min(other.prec);
        let mut coeffs = vec![FieldElem::default(); prec];
        for i in 0..prec.min(self.coeffs.len()) {
            let a = self.coeffs[i];
            if a.is_zero() {
                continue;
            }
            for j in 0..(prec - i).min(other.coeffs.len()) {
                let b = other.coeffs[j];
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] = f.add(coeffs[i + j], f.mul(a, b));
            }
        }
        TruncSeries { prec, coeffs }
    }

    pub fn scale(&self, c: FieldElem, f: &FieldSpec) -> TruncSeries {
        TruncSeries {
            prec: self.prec,
            coeffs: self.coeffs.iter().map(|&a| f.mul(a, c)).collect(),
        }
    }

    /// Multiply by t^n (truncating at precision).
    pub fn shift_up(&self, n: usize) -> TruncSeries {
        let mut coeffs = vec![FieldElem::default(); self.prec];
        for i in 0..self.prec.saturating_sub(n) {
            coeffs[i + n] = self.coeffs[i];
        }
        TruncSeries {
            prec: self.prec,
            coeffs,
        }
    }

    /// Inverse of a unit (valuation 0); errors otherwise.
    pub fn inverse(&self, f: &FieldSpec) -> Result<TruncSeries, AlgebraError> {
        let c0 = self.coeff(0);
        if c0.is_zero() {
            return Err(AlgebraError::NotInvertible);
        }
        let c0_inv = f.inv(c0)?;
        let mut inv = vec![FieldElem::default(); self.prec];
        inv[0] = c0_inv;
        for n in 1..self.prec {
            // c_n of the product must vanish: sum_{i=0}^{n} a_i * inv_{n-i} = 0
            let mut acc = f.zero();
            for i in 1..=n {
                acc = f.add(acc, f.mul(self.coeff(i), inv[n - i]));
            }
            inv[n] = f.neg(f.mul(acc, c0_inv));
        }
        Ok(TruncSeries {
            prec: self.prec,
            coeffs: inv,
        })
    }

    /// Exact division when v(self) ≥ v(other); the result has precision
    /// prec − v(other) (the quotient is only determined to that precision).
    pub fn div(&self, other: &TruncSeries, f: &FieldSpec) -> Result<TruncSeries, AlgebraError> {
        let v = match other.valuation() {
            TruncVal::Exact(v) => v,
            TruncVal::AtLeast(_) => return Err(AlgebraError::DivisionByZero),
        };
        if let TruncVal::Exact(vs) = self.valuation() {
            if vs < v {
                return Err(AlgebraError::NotInvertible);
            }
        }
        let prec = self.prec.min(other.prec) - v;
        let num = TruncSeries {
            prec,
            coeffs: self.coeffs[v..v + prec].to_vec(),
        };
        let den = TruncSeries {
            prec,
            coeffs: other.coeffs[v..v + prec].to_vec(),
        };
        Ok(num.mul(&den.inverse(f)?, f))
    }

    /// Change precision (truncate or zero-extend; extension does not create
    /// information and is only used to align shapes).
    pub fn with_prec(&self, prec: usize) -> TruncSeries {
        let mut coeffs = vec![FieldElem::default(); prec];
        for i in 0..prec.min(self.coeffs.len()) {
            coeffs[i] = self.coeffs[i];
        }
        TruncSeries { prec, coeffs }
    }
}
