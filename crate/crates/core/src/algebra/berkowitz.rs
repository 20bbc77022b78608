//! Division-free characteristic polynomials by the Berkowitz/Samuelson
//! recursion, generic over a commutative ring. Fraction-field elimination is
//! useless here: the base rings F_q\[t\] and F_q\[\[t\]\]/t^P live in
//! characteristic p, where the integer divisions of Faddeev-style methods
//! fail, and gcd cancellation over F_q(t) is costly. Berkowitz stays inside
//! the ring.

use alloc::vec;
use alloc::vec::Vec;

use super::field::{FieldElem, FieldSpec};
use super::matrix::{FieldMatrix, PolyMatrix, TruncMatrix};
use super::poly::Poly;
use super::trunc::TruncSeries;
use super::xpoly::XPoly;
use super::AlgebraError;

/// Commutative ring interface for the generic kernels.
pub trait ComRing {
    type El: Clone;
    fn zero(&self) -> Self::El;
    fn one(&self) -> Self::El;
    fn add(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn neg(&self, a: &Self::El) -> Self::El;
    fn mul(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn is_zero(&self, a: &Self::El) -> bool;
}

pub struct PolyRing<'a>(pub &'a FieldSpec);

impl ComRing for PolyRing<'_> {
    type El = Poly;
    fn zero(&self) -> Poly {
        Poly::zero()
    }
    fn one(&self) -> Poly {
        Poly::one(self.0)
    }
    fn add(&self, a: &Poly, b: &Poly) -> Poly {
        a.add(b, self.0)
    }
    fn neg(&self, a: &Poly) -> Poly {
        a.neg(self.0)
    }
    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        a.mul(b, self.0)
    }
    fn is_zero(&self, a: &Poly) -> bool {
        a.is_zero()
    }
}

pub struct TruncRing<'a> {
    pub field: &'a FieldSpec,
    pub prec: usize,
}

impl ComRing for TruncRing<'_> {
    type El = TruncSeries;
    fn zero(&self) -> TruncSeries {
        TruncSeries::zero(self.prec)
    }
    fn one(&self) -> TruncSeries {
        TruncSeries::one(self.prec, self.field)
    }
    fn add(&self, a: &TruncSeries, b: &TruncSeries) -> TruncSeries {
        a.add(b, self.field)
    }
    fn neg(&self, a: &TruncSeries) -> TruncSeries {
        a.neg(self.field)
    }
    fn mul(&self, a: &TruncSeries, b: &TruncSeries) -> TruncSeries {
        a.mul(b, self.field)
    }
    fn is_zero(&self, a: &TruncSeries) -> bool {
        a.is_zero()
    }
}

pub struct FqRing<'a>(pub &'a FieldSpec);

impl ComRing for FqRing<'_> {
    type El = FieldElem;
    fn zero(&self) -> FieldElem {
        self.0.zero()
    }
    fn one(&self) -> FieldElem {
        self.0.one()
    }
    fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        self.0.add(*a, *b)
    }
    fn neg(&self, a: &FieldElem) -> FieldElem {
        self.0.neg(*a)
    }
    fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        self.0.mul(*a, *b)
    }
    fn is_zero(&self, a: &FieldElem) -> bool {
        a.is_zero()
    }
}

/// F_q\[t\]\[Z\] as a coefficient ring, for Sylvester determinants.
pub struct XRing<'a>(pub &'a FieldSpec);

impl ComRing for XRing<'_> {
    type El = XPoly;
    fn zero(&self) -> XPoly {
        XPoly::zero()
    }
    fn one(&self) -> XPoly {
        XPoly::one(self.0)
    }
    fn add(&self, a: &XPoly, b: &XPoly) -> XPoly {
        a.add(b, self.0)
    }
    fn neg(&self, a: &XPoly) -> XPoly {
        a.neg(self.0)
    }
    fn mul(&self, a: &XPoly, b: &XPoly) -> XPoly {
        a.mul(b, self.0)
    }
    fn is_zero(&self, a: &XPoly) -> bool {
        a.is_zero()
    }
}

/// Berkowitz vector of det(X·I − A) in descending order:
/// out\[0\]·X^n + out\[1\]·X^{n−1} + … + out\[n\], with out\[0\] = 1.
pub fn charpoly_descending<R: ComRing>(
    ring: &R,
    n: usize,
    at: &dyn Fn(usize, usize) -> R::El,
) -> Vec<R::El> {
    if n == 0 {
        return vec![ring.one()];
    }
    // p_r for the leading principal r×r block, built by Toeplitz products.
    let mut p = vec![ring.one(), ring.neg(&at(0, 0))];
    for r in 2..=n {
        // Column of the Toeplitz matrix: 1, −a_rr, −R·S, −R·A·S, −R·A²·S, …
        // where A is the (r−1)×(r−1) block, R the row (a_{r,0..r−1}) and S
        // the column (a_{0..r−1,r}).
        let rr = r - 1;
        let mut col = Vec::with_capacity(r + 1);
        col.push(ring.one());
        col.push(ring.neg(&at(rr, rr)));
        let mut w: Vec<R::El> = (0..rr).map(|i| at(i, rr)).collect();
        for step in 0..rr {
            // dot = R · w
            let mut dot = ring.zero();
            for i in 0..rr {
                dot = ring.add(&dot, &ring.mul(&at(rr, i), &w[i]));
            }
            col.push(ring.neg(&dot));
            if step + 1 < rr {
                // w ← A_block · w
                let mut nw = Vec::with_capacity(rr);
                for i in 0..rr {
                    let mut acc = ring.zero();
                    for j in 0..rr {
                        acc = ring.add(&acc, &ring.mul(&at(i, j), &w[j]));
                    }
                    nw.push(acc);
                }
                w = nw;
            }
        }
        // p_r = T · p_{r−1}, T lower-triangular Toeplitz with first column col.
        let mut np = vec![ring.zero(); r + 1];
        for (i, ci) in col.iter().enumerate() {
            if ring.is_zero(ci) {
                continue;
            }
            for (j, pj) in p.iter().enumerate() {
                if i + j <= r {
                    np[i + j] = ring.add(&np[i + j], &ring.mul(ci, pj));
                }
            }
        }
        p = np;
    }
    p
}

/// det(I − M·X) over F_q\[t\]: the reciprocal characteristic polynomial. The
/// constant term is 1 and the coefficient of X is −trace(M).
pub fn charpoly_reciprocal(m: &PolyMatrix, f: &FieldSpec) -> Result<XPoly, AlgebraError> {
    if !m.is_square() {
        return Err(AlgebraError::NonSquareMatrix);
    }
    let ring = PolyRing(f);
    let coeffs = charpoly_descending(&ring, m.rows(), &|i, j| m.at(i, j).clone());
    // det(I − MX) = X^n · det((1/X)I − M): descending charpoly coefficients
    // read in order are exactly the ascending coefficients in X.
    Ok(XPoly::from_coeffs(coeffs))
}

/// det(I − M·X) with coefficients in F_q\[\[t\]\]/t^prec.
pub fn charpoly_reciprocal_trunc(
    m: &TruncMatrix,
    f: &FieldSpec,
) -> Result<Vec<TruncSeries>, AlgebraError> {
    if m.rows() != m.cols() {
        return Err(AlgebraError::NonSquareMatrix);
    }
    let ring = TruncRing {
        field: f,
        prec: m.prec(),
    };
    Ok(charpoly_descending(&ring, m.rows(), &|i, j| {
        m.at(i, j).clone()
    }))
}

/// det(I − M·X) over F_q for a matrix over the residue field.
pub fn charpoly_reciprocal_mod_t(
    m: &FieldMatrix,
    f: &FieldSpec,
) -> Result<Vec<FieldElem>, AlgebraError> {
    if m.rows != m.cols {
        return Err(AlgebraError::NonSquareMatrix);
    }
    let ring = FqRing(f);
    Ok(charpoly_descending(&ring, m.rows, &|i, j| m.at(i, j)))
}

/// Division-free determinant via the Berkowitz constant term:
/// det(A) = (−1)^n · \[X^0\] det(XI − A).
pub fn det_berkowitz<R: ComRing>(ring: &R, n: usize, at: &dyn Fn(usize, usize) -> R::El) -> R::El {
    let p = charpoly_descending(ring, n, at);
    let c = p[n].clone();
    if n % 2 == 1 {
        ring.neg(&c)
    } else {
        c
    }
}
