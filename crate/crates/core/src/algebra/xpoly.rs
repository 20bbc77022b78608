//! Polynomials in an outer variable X (or Z) with coefficients in F_q\[t\]:
//! characteristic polynomials det(I − MX), their reversals det(XI − M), and
//! resultant-based difference-of-eigenvalue computations.

use alloc::vec;
use alloc::vec::Vec;

use super::berkowitz::{det_berkowitz, XRing};
use super::field::FieldSpec;
use super::newton::{newton_polygon_from_points, NewtonPolygon};
use super::poly::Poly;
use super::AlgebraError;

/// Dense polynomial in the outer variable, ascending coefficients over F_q\[t\].
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct XPoly {
    coeffs: Vec<Poly>,
}

impl XPoly {
    pub fn zero() -> XPoly {
        XPoly { coeffs: Vec::new() }
    }

    pub fn one(f: &FieldSpec) -> XPoly {
        XPoly {
            coeffs: vec![Poly::one(f)],
        }
    }

    pub fn from_coeffs(coeffs: Vec<Poly>) -> XPoly {
        let mut p = XPoly { coeffs };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Poly {
        self.coeffs.get(i).cloned().unwrap_or_else(Poly::zero)
    }

    /// Index of the lowest nonzero coefficient (order at X = 0).
    pub fn x_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, o: &XPoly, f: &FieldSpec) -> XPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coeff(i).add(&o.coeff(i), f));
        }
        XPoly::from_coeffs(coeffs)
    }

    pub fn sub(&self, o: &XPoly, f: &FieldSpec) -> XPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coeff(i).sub(&o.coeff(i), f));
        }
        XPoly::from_coeffs(coeffs)
    }

    pub fn neg(&self, f: &FieldSpec) -> XPoly {
        XPoly::from_coeffs(self.coeffs.iter().map(|c| c.neg(f)).collect())
    }

    pub fn mul(&self, o: &XPoly, f: &FieldSpec) -> XPoly {
        if self.is_zero() || o.is_zero() {
            return XPoly::zero();
        }
        let mut coeffs = vec![Poly::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b, f), f);
            }
        }
        XPoly::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: &Poly, f: &FieldSpec) -> XPoly {
        XPoly::from_coeffs(self.coeffs.iter().map(|a| a.mul(c, f)).collect())
    }

    /// Reverse the coefficient order: for P = Π(1 − λᵢX) of degree D this is
    /// Π(X − λᵢ), the monic eigenvalue-variable form.
    pub fn reverse(&self) -> XPoly {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        XPoly::from_coeffs(coeffs)
    }

    /// Exact division: Some(q) with self = q·d when d divides self over
    /// F_q\[t\]\[X\], None otherwise. Long division in X; coefficient divisions
    /// must be exact at every step, which holds exactly when d | self.
    pub fn try_div_exact(&self, d: &XPoly, f: &FieldSpec) -> Option<XPoly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(XPoly::zero());
        }
        let dd = d.coeffs.len();
        if self.coeffs.len() < dd {
            return None;
        }
        let dlead = d.coeffs.last().unwrap();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Poly::zero(); rem.len() - dd + 1];
        for k in (0..quot.len()).rev() {
            let top = rem[k + dd - 1].clone();
            if top.is_zero() {
                continue;
            }
            let q = match top.div_exact(dlead, f) {
                Ok(q) => q,
                Err(_) => return None,
            };
            quot[k] = q.clone();
            for (i, dc) in d.coeffs.iter().enumerate() {
                rem[k + i] = rem[k + i].sub(&q.mul(dc, f), f);
            }
        }
        if rem.iter().all(|c| c.is_zero()) {
            Some(XPoly::from_coeffs(quot))
        } else {
            None
        }
    }

    /// Substitute a polynomial for the outer variable.
    pub fn eval_at_poly(&self, x: &Poly, f: &FieldSpec) -> Poly {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x, f).add(c, f);
        }
        acc
    }
}

/// The Newton polygon of P ≠ 0: the lower convex hull of the points
/// (l, v_t(coefficient l)) over nonzero coefficients. The segment slopes are
/// the valuations of the reciprocal roots, i.e. eigenvalue slopes when
/// P = det(I − BX).
pub fn newton_polygon(p: &XPoly, _f: &FieldSpec) -> Result<NewtonPolygon, AlgebraError> {
    if p.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    let mut points = Vec::new();
    for (l, c) in p.coeffs().iter().enumerate() {
        if let super::poly::Val::Fin(v) = c.t_valuation() {
            points.push((l, v));
        }
    }
    Ok(newton_polygon_from_points(&points))
}

/// Multiply two outer-variable polynomials whose coefficients are themselves
/// XPoly values (bivariate helper for the shifted resultant).
fn mul_bivariate(a: &[XPoly], b: &[XPoly], f: &FieldSpec) -> Vec<XPoly> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![XPoly::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&ai.mul(bj, f), f);
        }
    }
    out
}

/// Res_X(P(X), Q(X + Z)) as a polynomial in Z over F_q\[t\], computed from the
/// Sylvester matrix by a division-free determinant. Its roots are the
/// differences β − α over roots α of P and β of Q, so its Newton polygon
/// carries the valuations v_t(α − β) of all root pairs.
pub fn resultant_shifted(p: &XPoly, q: &XPoly, f: &FieldSpec) -> Result<XPoly, AlgebraError> {
    if p.is_zero() || q.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    let m = p.degree().unwrap();
    let n = q.degree().unwrap();
    if m == 0 {
        // Res(c, G) = c^{deg G}
        return Ok(XPoly::from_coeffs(vec![p.coeff(0).pow(n as u64, f)]));
    }
    // Q(X+Z) as a polynomial in X with XPoly (Z-polynomial) coefficients.
    let x_plus_z = vec![
        XPoly::from_coeffs(vec![Poly::zero(), Poly::one(f)]), // Z
        XPoly::one(f),                                        // X
    ];
    let mut shifted = vec![XPoly::zero(); 1];
    let mut power = vec![XPoly::one(f)];
    for j in 0..=n {
        let cj = q.coeff(j);
        if !cj.is_zero() {
            let term: Vec<XPoly> = power.iter().map(|w| w.scale(&cj, f)).collect();
            if shifted.len() < term.len() {
                shifted.resize(term.len(), XPoly::zero());
            }
            for (i, t) in term.into_iter().enumerate() {
                shifted[i] = shifted[i].add(&t, f);
            }
        }
        if j < n {
            power = mul_bivariate(&power, &x_plus_z, f);
        }
    }
    // deg_X of Q(X+Z) equals n (leading coefficient is the constant q_n).
    let size = m + n;
    let at = |i: usize, j: usize| -> XPoly {
        if i < n {
            // row of P coefficients, descending, offset i
            let k = m as i64 - (j as i64 - i as i64);
            if (0..=m as i64).contains(&k) {
                XPoly::from_coeffs(vec![p.coeff(k as usize)])
            } else {
                XPoly::zero()
            }
        } else {
            let r = i - n;
            let k = n as i64 - (j as i64 - r as i64);
            if (0..=n as i64).contains(&k) {
                shifted[k as usize].clone()
            } else {
                XPoly::zero()
            }
        }
    };
    let ring = XRing(f);
    Ok(det_berkowitz(&ring, size, &at))
}

/// Difference-of-root valuations: the Newton polygon (in Z) of
/// Res_X(P1(X), P2(X+Z)) after removing the Z-power accounting for exactly
/// coincident root pairs. Inputs are in the eigenvalue variable (roots are
/// the eigenvalues themselves); when P1 is linear with root λ this is the
/// polygon of P2(λ + Z). The polygon's segment slopes are the negatives of
/// the valuations v_t(α − β), so the pair of maximal valuation heads the
/// [`valuations`](DiffValuations::valuations) list.
#[derive(Clone, Debug)]
pub struct DiffValuations {
    /// Polygon of the stripped resultant in Z.
    pub polygon: NewtonPolygon,
    /// Number of exactly coincident root pairs (reported as "∞").
    pub coincident: usize,
}

impl DiffValuations {
    /// The valuations v_t(α − β) with multiplicities over non-coincident
    /// root pairs, in polygon order (descending valuation).
    pub fn valuations(&self) -> alloc::vec::Vec<(crate::algebra::rational::Rational, usize)> {
        self.polygon
            .segments()
            .iter()
            .map(|&(s, m)| (crate::algebra::rational::Rational::zero().sub(s), m))
            .collect()
    }
}

pub fn diff_valuations(
    p1: &XPoly,
    p2: &XPoly,
    f: &FieldSpec,
) -> Result<DiffValuations, AlgebraError> {
    let res = resultant_shifted(p1, p2, f)?;
    if res.is_zero() {
        return Err(AlgebraError::Invalid(
            "vanishing shifted resultant".into(),
        ));
    }
    let s = res.x_order().unwrap();
    let stripped = XPoly::from_coeffs(res.coeffs()[s..].to_vec());
    let polygon = newton_polygon(&stripped, f)?;
    Ok(DiffValuations {
        polygon,
        coincident: s,
    })
}
