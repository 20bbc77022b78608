//! The coefficient field F_q, q = p^e.
//!
//! Elements are coordinate vectors over F_p with respect to the power basis
//! 1, x, ..., x^{e-1} of F_p\[x\]/(modulus). All operations go through a
//! [`FieldSpec`], which carries p, e and the defining modulus; elements
//! themselves are small `Copy` values. For e = 1 the modulus is the identity
//! polynomial x and arithmetic is plain mod-p arithmetic.

use alloc::format;
use alloc::vec::Vec;

use super::AlgebraError;

/// Maximum extension degree supported; irreducibility of the modulus is
/// verified by brute force, which is only reasonable at this scale.
pub const MAX_EXT_DEGREE: usize = 3;

/// An element of F_q, stored as e residues mod p (entries beyond e are 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElem {
    c: [u16; MAX_EXT_DEGREE],
}

impl FieldElem {
    pub fn is_zero(&self) -> bool {
        self.c == [0; MAX_EXT_DEGREE]
    }

    /// Raw coordinates (length MAX_EXT_DEGREE; only the first e are used).
    pub fn coords(&self) -> &[u16; MAX_EXT_DEGREE] {
        &self.c
    }

    /// Coordinate i as an integer.
    pub fn coord(&self, i: usize) -> u16 {
        self.c[i]
    }
}

/// Description of F_q: the prime p, extension degree e, and a monic
/// irreducible modulus of degree e over F_p (the identity when e = 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldSpec {
    p: u16,
    e: usize,
    /// Monic modulus, ascending coefficients, length e + 1.
    modulus: Vec<u16>,
    q: u64,
}

impl FieldSpec {
    /// The prime field F_p.
    pub fn prime(p: u16) -> Result<FieldSpec, AlgebraError> {
        FieldSpec::new(p, &[0, 1])
    }

    /// F_{p^e} defined by the given monic modulus (ascending coefficients,
    /// degree e). Verifies p prime and the modulus irreducible over F_p by
    /// brute-force factor search.
    pub fn new(p: u16, modulus: &[u16]) -> Result<FieldSpec, AlgebraError> {
        if !is_prime(p) {
            return Err(AlgebraError::Invalid(format!("p = {} is not prime", p)));
        }
        if modulus.len() < 2 || modulus.len() > MAX_EXT_DEGREE + 1 {
            return Err(AlgebraError::Invalid(format!(
                "modulus degree must be between 1 and {}",
                MAX_EXT_DEGREE
            )));
        }
        let e = modulus.len() - 1;
        let modulus: Vec<u16> = modulus.iter().map(|&c| c % p).collect();
        if modulus[e] != 1 {
            return Err(AlgebraError::Invalid("modulus must be monic".into()));
        }
        if e > 1 && !is_irreducible_mod_p(&modulus, p) {
            return Err(AlgebraError::Invalid("modulus is reducible".into()));
        }
        let q = (p as u64).pow(e as u32);
        if q <= 1 {
            return Err(AlgebraError::Invalid("q must exceed 1".into()));
        }
        Ok(FieldSpec { p, e, modulus, q })
    }

    pub fn p(&self) -> u16 {
        self.p
    }

    pub fn e(&self) -> usize {
        self.e
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem::default()
    }

    pub fn one(&self) -> FieldElem {
        self.from_int(1)
    }

    /// The element i·1 of the prime subfield.
    pub fn from_int(&self, i: i64) -> FieldElem {
        let p = self.p as i64;
        let mut c = [0u16; MAX_EXT_DEGREE];
        c[0] = (((i % p) + p) % p) as u16;
        FieldElem { c }
    }

    /// Element from explicit coordinates (length ≤ e, ascending powers of x).
    pub fn from_coords(&self, coords: &[u16]) -> FieldElem {
        assert!(coords.len() <= self.e, "too many coordinates");
        let mut c = [0u16; MAX_EXT_DEGREE];
        for (i, &v) in coords.iter().enumerate() {
            c[i] = v % self.p;
        }
        FieldElem { c }
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let mut c = [0u16; MAX_EXT_DEGREE];
        for i in 0..self.e {
            c[i] = (a.c[i] + b.c[i]) % self.p;
        }
        FieldElem { c }
    }

    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let mut c = [0u16; MAX_EXT_DEGREE];
        for i in 0..self.e {
            c[i] = (a.c[i] + self.p - b.c[i]) % self.p;
        }
        FieldElem { c }
    }

    pub fn neg(&self, a: FieldElem) -> FieldElem {
        self.sub(self.zero(), a)
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if self.e == 1 {
            let mut c = [0u16; MAX_EXT_DEGREE];
            c[0] = ((a.c[0] as u32 * b.c[0] as u32) % self.p as u32) as u16;
            return FieldElem { c };
        }
        // Schoolbook product followed by reduction by the monic modulus.
        let p = self.p as u32;
        let mut prod = [0u32; 2 * MAX_EXT_DEGREE];
        for i in 0..self.e {
            for j in 0..self.e {
                prod[i + j] = (prod[i + j] + a.c[i] as u32 * b.c[j] as u32) % p;
            }
        }
        for i in (self.e..2 * self.e - 1).rev() {
            let top = prod[i];
            if top != 0 {
                prod[i] = 0;
                for j in 0..self.e {
                    let m = self.modulus[j] as u32;
                    let sub = (top * m) % p;
                    prod[i - self.e + j] = (prod[i - self.e + j] + p - sub) % p;
                }
            }
        }
        let mut c = [0u16; MAX_EXT_DEGREE];
        for i in 0..self.e {
            c[i] = prod[i] as u16;
        }
        FieldElem { c }
    }

    pub fn pow(&self, a: FieldElem, mut n: u64) -> FieldElem {
        let mut base = a;
        let mut acc = self.one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self, a: FieldElem) -> Result<FieldElem, AlgebraError> {
        if a.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(self.pow(a, self.q - 2))
    }

    /// All q elements, in a fixed lexicographic order (zero first).
    pub fn elements(&self) -> Vec<FieldElem> {
        let mut out = Vec::with_capacity(self.q as usize);
        let mut c = [0u16; MAX_EXT_DEGREE];
        loop {
            out.push(FieldElem { c });
            let mut i = 0;
            loop {
                if i == self.e {
                    return out;
                }
                c[i] += 1;
                if c[i] < self.p {
                    break;
                }
                c[i] = 0;
                i += 1;
            }
        }
    }

    /// The q − 1 nonzero elements.
    pub fn units(&self) -> Vec<FieldElem> {
        self.elements().into_iter().filter(|x| !x.is_zero()).collect()
    }
}

fn is_prime(p: u16) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p as u32 {
        if p as u32 % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Brute-force irreducibility over F_p: a polynomial of degree 2 or 3 is
/// irreducible iff it has no root.
fn is_irreducible_mod_p(modulus: &[u16], p: u16) -> bool {
    let e = modulus.len() - 1;
    debug_assert!(e == 2 || e == 3);
    for x in 0..p {
        let mut acc = 0u32;
        for &c in modulus.iter().rev() {
            acc = (acc * x as u32 + c as u32) % p as u32;
        }
        if acc == 0 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f3_arithmetic() {
        let f = FieldSpec::prime(3).unwrap();
        let two = f.from_int(2);
        assert_eq!(f.mul(two, two), f.one());
        assert_eq!(f.add(two, f.one()), f.zero());
        assert_eq!(f.inv(two).unwrap(), two);
        assert_eq!(f.elements().len(), 3);
    }

    #[test]
    fn f9_field() {
        // x^2 + 1 is irreducible over F_3.
        let f = FieldSpec::new(3, &[1, 0, 1]).unwrap();
        assert_eq!(f.q(), 9);
        let x = f.from_coords(&[0, 1]);
        // x^2 = -1
        assert_eq!(f.mul(x, x), f.from_int(-1));
        for a in f.units() {
            let inv = f.inv(a).unwrap();
            assert_eq!(f.mul(a, inv), f.one());
        }
        assert_eq!(f.units().len(), 8);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(FieldSpec::prime(4).is_err());
        // x^2 - 1 = (x-1)(x+1) is reducible.
        assert!(FieldSpec::new(3, &[2, 0, 1]).is_err());
        // x^2 + x + 1 has root 1 over F_3: 1 + 1 + 1 = 0.
        assert!(FieldSpec::new(3, &[1, 1, 1]).is_err());
        // ...but is irreducible over F_2.
        assert!(FieldSpec::new(2, &[1, 1, 1]).is_ok());
    }
}
