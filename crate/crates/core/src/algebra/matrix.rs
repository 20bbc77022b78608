//! Dense matrices over F_q\[t\] and over truncated series, plus the exact
//! linear solves the Hecke layer needs: fraction-field Gaussian elimination
//! (for expressing operators in a chosen lattice basis) and a fraction-free
//! Bareiss determinant.

use alloc::vec;
use alloc::vec::Vec;

use super::field::{FieldElem, FieldSpec};
use super::poly::Poly;
use super::trunc::TruncSeries;
use super::AlgebraError;

/// Dense row-major matrix over F_q\[t\].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zero(rows: usize, cols: usize) -> PolyMatrix {
        PolyMatrix {
            rows,
            cols,
            entries: vec![Poly::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize, f: &FieldSpec) -> PolyMatrix {
        let mut m = PolyMatrix::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Poly::one(f);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut g: impl FnMut(usize, usize) -> Poly) -> PolyMatrix {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(g(i, j));
            }
        }
        PolyMatrix { rows, cols, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Poly {
        &mut self.entries[i * self.cols + j]
    }

    pub fn add(&self, o: &PolyMatrix, f: &FieldSpec) -> PolyMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        PolyMatrix::from_fn(self.rows, self.cols, |i, j| self.at(i, j).add(o.at(i, j), f))
    }

    pub fn sub(&self, o: &PolyMatrix, f: &FieldSpec) -> PolyMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        PolyMatrix::from_fn(self.rows, self.cols, |i, j| self.at(i, j).sub(o.at(i, j), f))
    }

    pub fn mul(&self, o: &PolyMatrix, f: &FieldSpec) -> PolyMatrix {
        assert_eq!(self.cols, o.rows);
        let mut out = PolyMatrix::zero(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a.mul(b, f);
                    *out.at_mut(i, j) = out.at(i, j).add(&prod, f);
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &Poly, f: &FieldSpec) -> PolyMatrix {
        PolyMatrix::from_fn(self.rows, self.cols, |i, j| self.at(i, j).mul(c, f))
    }

    pub fn transpose(&self) -> PolyMatrix {
        PolyMatrix::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// Sum of the diagonal.
    pub fn trace(&self, f: &FieldSpec) -> Poly {
        assert!(self.is_square());
        let mut acc = Poly::zero();
        for i in 0..self.rows {
            acc = acc.add(self.at(i, i), f);
        }
        acc
    }

    /// Sub-block [r0, r0+h) × [c0, c0+w).
    pub fn block(&self, r0: usize, c0: usize, h: usize, w: usize) -> PolyMatrix {
        PolyMatrix::from_fn(h, w, |i, j| self.at(r0 + i, c0 + j).clone())
    }

    /// True if every entry is divisible by t^n.
    pub fn divisible_by_tpow(&self, n: u64) -> bool {
        self.entries.iter().all(|e| match e.t_valuation() {
            super::poly::Val::Inf => true,
            super::poly::Val::Fin(v) => v >= n,
        })
    }

    /// Entry-wise reduction mod t^n.
    pub fn reduce_mod_tpow(&self, n: usize) -> PolyMatrix {
        PolyMatrix::from_fn(self.rows, self.cols, |i, j| {
            Poly::from_coeffs(
                self.at(i, j)
                    .coeffs()
                    .iter()
                    .take(n)
                    .copied()
                    .collect::<Vec<_>>(),
            )
        })
    }

    /// Fraction-free Bareiss determinant (exact over F_q\[t\]).
    pub fn det_bareiss(&self, f: &FieldSpec) -> Result<Poly, AlgebraError> {
        if !self.is_square() {
            return Err(AlgebraError::NonSquareMatrix);
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Poly::one(f));
        }
        let mut a: Vec<Vec<Poly>> = (0..n)
            .map(|i| (0..n).map(|j| self.at(i, j).clone()).collect())
            .collect();
        let mut sign = false;
        let mut prev = Poly::one(f);
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = !sign;
                    }
                    None => return Ok(Poly::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a[k][k]
                        .mul(&a[i][j], f)
                        .sub(&a[i][k].mul(&a[k][j], f), f);
                    a[i][j] = num.div_exact(&prev, f)?;
                }
                a[i][k] = Poly::zero();
            }
            prev = a[k][k].clone();
        }
        let mut det = a[n - 1][n - 1].clone();
        if sign {
            det = det.neg(f);
        }
        Ok(det)
    }
}

/// Dense matrix over F_q\[\[t\]\]/t^prec.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncMatrix {
    rows: usize,
    cols: usize,
    prec: usize,
    entries: Vec<TruncSeries>,
}

impl TruncMatrix {
    pub fn zero(rows: usize, cols: usize, prec: usize) -> TruncMatrix {
        TruncMatrix {
            rows,
            cols,
            prec,
            entries: vec![TruncSeries::zero(prec); rows * cols],
        }
    }

    pub fn from_poly_matrix(m: &PolyMatrix, prec: usize) -> TruncMatrix {
        let mut out = TruncMatrix::zero(m.rows(), m.cols(), prec);
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                *out.at_mut(i, j) = TruncSeries::from_poly(m.at(i, j), prec);
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn at(&self, i: usize, j: usize) -> &TruncSeries {
        &self.entries[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut TruncSeries {
        &mut self.entries[i * self.cols + j]
    }

    pub fn mul(&self, o: &TruncMatrix, f: &FieldSpec) -> TruncMatrix {
        assert_eq!(self.cols, o.rows);
        let prec = self.prec.min(o.prec);
        let mut out = TruncMatrix::zero(self.rows, o.cols, prec);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.at(i, k).is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let prod = self.at(i, k).mul(o.at(k, j), f);
                    *out.at_mut(i, j) = out.at(i, j).add(&prod, f);
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[TruncSeries], f: &FieldSpec) -> Vec<TruncSeries> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![TruncSeries::zero(self.prec); self.rows];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let prod = self.at(i, k).mul(&v[k], f);
                out[i] = out[i].add(&prod, f);
            }
        }
        out
    }
}

/// Rational function num/den over F_q\[t\], kept reduced with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFn {
    pub num: Poly,
    pub den: Poly,
}

impl RatFn {
    pub fn new(num: Poly, den: Poly, f: &FieldSpec) -> RatFn {
        assert!(!den.is_zero(), "zero denominator");
        let mut r = RatFn { num, den };
        r.reduce(f);
        r
    }

    pub fn from_poly(p: Poly, f: &FieldSpec) -> RatFn {
        RatFn {
            num: p,
            den: Poly::one(f),
        }
    }

    pub fn zero(f: &FieldSpec) -> RatFn {
        RatFn {
            num: Poly::zero(),
            den: Poly::one(f),
        }
    }

    fn reduce(&mut self, f: &FieldSpec) {
        if self.num.is_zero() {
            self.den = Poly::one(f);
            return;
        }
        let g = self.num.gcd(&self.den, f);
        if !g.is_one(f) {
            self.num = self.num.div_exact(&g, f).expect("gcd divides");
            self.den = self.den.div_exact(&g, f).expect("gcd divides");
        }
        let lead = self.den.leading().expect("nonzero den");
        if lead != f.one() {
            let inv = f.inv(lead).expect("unit");
            self.num = self.num.scale(inv, f);
            self.den = self.den.scale(inv, f);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &RatFn, f: &FieldSpec) -> RatFn {
        RatFn::new(
            self.num
                .mul(&o.den, f)
                .add(&o.num.mul(&self.den, f), f),
            self.den.mul(&o.den, f),
            f,
        )
    }

    pub fn sub(&self, o: &RatFn, f: &FieldSpec) -> RatFn {
        RatFn::new(
            self.num
                .mul(&o.den, f)
                .sub(&o.num.mul(&self.den, f), f),
            self.den.mul(&o.den, f),
            f,
        )
    }

    pub fn mul(&self, o: &RatFn, f: &FieldSpec) -> RatFn {
        RatFn::new(self.num.mul(&o.num, f), self.den.mul(&o.den, f), f)
    }

    pub fn div(&self, o: &RatFn, f: &FieldSpec) -> Result<RatFn, AlgebraError> {
        if o.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(RatFn::new(
            self.num.mul(&o.den, f),
            self.den.mul(&o.num, f),
        f,
        ))
    }

    pub fn neg(&self, f: &FieldSpec) -> RatFn {
        RatFn {
            num: self.num.neg(f),
            den: self.den.clone(),
        }
    }

    /// As a polynomial, when the denominator is 1.
    pub fn as_poly(&self, f: &FieldSpec) -> Option<Poly> {
        if self.den.is_one(f) {
            Some(self.num.clone())
        } else {
            None
        }
    }

    /// Valuation at the infinite place 1/t: deg(den) − deg(num); None for 0.
    pub fn inf_valuation(&self) -> Option<i64> {
        if self.num.is_zero() {
            return None;
        }
        Some(self.den.degree_or_panic() as i64 - self.num.degree_or_panic() as i64)
    }
}

/// Solve A·X = B exactly over the fraction field F_q(t), where A (n×m) has
/// full column rank m. Returns X (m×k) as rational functions cleared into
/// polynomials when possible — the caller checks integrality. Errors if the
/// system is inconsistent or A is column-deficient.
pub fn solve_exact(
    a: &PolyMatrix,
    b: &PolyMatrix,
    f: &FieldSpec,
) -> Result<Vec<Vec<RatFn>>, AlgebraError> {
    assert_eq!(a.rows(), b.rows());
    let n = a.rows();
    let m = a.cols();
    let k = b.cols();
    // Augmented elimination over RatFn.
    let mut w: Vec<Vec<RatFn>> = (0..n)
        .map(|i| {
            (0..m + k)
                .map(|j| {
                    if j < m {
                        RatFn::new(a.at(i, j).clone(), Poly::one(f), f)
                    } else {
                        RatFn::new(b.at(i, j - m).clone(), Poly::one(f), f)
                    }
                })
                .collect()
        })
        .collect();
    let mut pivot_rows = Vec::with_capacity(m);
    let mut row = 0usize;
    for col in 0..m {
        let pr = match (row..n).find(|&r| !w[r][col].is_zero()) {
            Some(pr) => pr,
            None => return Err(AlgebraError::SingularMatrix),
        };
        w.swap(row, pr);
        let inv = RatFn::new(Poly::one(f), Poly::one(f), f).div(&w[row][col].clone(), f)?;
        for j in col..m + k {
            w[row][j] = w[row][j].mul(&inv, f);
        }
        for r in 0..n {
            if r != row && !w[r][col].is_zero() {
                let factor = w[r][col].clone();
                for j in col..m + k {
                    let delta = factor.mul(&w[row][j], f);
                    w[r][j] = w[r][j].sub(&delta, f);
                }
            }
        }
        pivot_rows.push(row);
        row += 1;
    }
    // Consistency: remaining rows must have zero right-hand side.
    for r in row..n {
        for j in m..m + k {
            if !w[r][j].is_zero() {
                return Err(AlgebraError::Invalid(
                    "inconsistent linear system (vector not in column span)".into(),
                ));
            }
        }
    }
    let mut x = vec![vec![RatFn::zero(f); k]; m];
    for (col, &pr) in pivot_rows.iter().enumerate() {
        for j in 0..k {
            x[col][j] = w[pr][m + j].clone();
        }
    }
    Ok(x)
}

/// Convert a RatFn solution matrix to polynomials; errors if any entry has a
/// nontrivial denominator. This is the integrality assertion of the Hecke
/// layer: operators stabilize the A-lattice, so denominators indicate a bug.
pub fn ratfn_to_poly_matrix(
    x: &[Vec<RatFn>],
    f: &FieldSpec,
) -> Result<PolyMatrix, AlgebraError> {
    let rows = x.len();
    let cols = if rows == 0 { 0 } else { x[0].len() };
    let mut out = PolyMatrix::zero(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            match x[i][j].as_poly(f) {
                Some(p) => *out.at_mut(i, j) = p,
                None => {
                    return Err(AlgebraError::Invalid(
                        "integrality violation: denominator appeared".into(),
                    ))
                }
            }
        }
    }
    Ok(out)
}

/// Matrix over F_q (used for mod-t computations).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<FieldElem>,
}

impl FieldMatrix {
    pub fn zero(rows: usize, cols: usize) -> FieldMatrix {
        FieldMatrix {
            rows,
            cols,
            entries: vec![FieldElem::default(); rows * cols],
        }
    }

    pub fn from_poly_matrix_mod_t(m: &PolyMatrix) -> FieldMatrix {
        let mut out = FieldMatrix::zero(m.rows(), m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                out.entries[i * m.cols() + j] = m.at(i, j).coeff(0);
            }
        }
        out
    }

    pub fn at(&self, i: usize, j: usize) -> FieldElem {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElem) {
        self.entries[i * self.cols + j] = v;
    }
}
