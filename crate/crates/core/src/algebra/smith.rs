//! Smith reduction in two flavors: elementary divisors over the discrete
//! valuation ring F_q\[\[t\]\] (computed in F_q\[\[t\]\]/t^cap with min-valuation
//! pivoting and explicit saturation), and diagonalization over the PID
//! F_q\[t\] with column tracking, used to extract saturated kernel bases.

use alloc::vec::Vec;

use super::field::FieldSpec;
use super::matrix::PolyMatrix;
use super::poly::Poly;
use super::trunc::{TruncSeries, TruncVal};
use super::AlgebraError;

/// t-adic elementary divisors s₁ ≤ … ≤ s_L of a square matrix over F_q\[t\],
/// computed by Smith reduction over F_q\[\[t\]\]/t^cap. A value `AtLeast(cap)`
/// means the divisor is at least the working precision; a zero matrix yields
/// all-saturated output.
///
/// Pivots are chosen by minimal valuation, ties broken by lowest (row, col),
/// so the reduction is deterministic.
pub fn elementary_divisors(m: &PolyMatrix, f: &FieldSpec, cap: usize) -> Vec<TruncVal> {
    assert!(m.is_square(), "elementary divisors of a non-square matrix");
    let n = m.rows();
    let mut a: Vec<Vec<TruncSeries>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| TruncSeries::from_poly(m.at(i, j), cap))
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        // Minimal-valuation pivot in the trailing submatrix.
        let mut best: Option<(usize, usize, usize)> = None;
        for i in k..n {
            for j in k..n {
                if let TruncVal::Exact(v) = a[i][j].valuation() {
                    let better = match best {
                        None => true,
                        Some((bv, _, _)) => v < bv,
                    };
                    if better {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let (v, pi, pj) = match best {
            Some(b) => b,
            None => {
                for _ in k..n {
                    out.push(TruncVal::AtLeast(cap));
                }
                return out;
            }
        };
        a.swap(k, pi);
        for row in a.iter_mut() {
            row.swap(k, pj);
        }
        // Clear column k below the pivot, then row k right of it. The pivot
        // has minimal valuation, so every quotient lies in F_q[[t]].
        let pivot = a[k][k].clone();
        for i in k + 1..n {
            if a[i][k].valuation().exact().is_some() || matches!(a[i][k].valuation(), TruncVal::AtLeast(_)) {
                if a[i][k].is_zero() {
                    continue;
                }
                let factor = a[i][k].div(&pivot, f).expect("pivot divides").with_prec(cap);
                for j in k..n {
                    let delta = factor.mul(&a[k][j], f);
                    a[i][j] = a[i][j].sub(&delta, f);
                }
            }
        }
        for j in k + 1..n {
            if a[k][j].is_zero() {
                continue;
            }
            let factor = a[k][j].div(&pivot, f).expect("pivot divides").with_prec(cap);
            for i in k..n {
                let delta = factor.mul(&a[i][k], f);
                a[i][j] = a[i][j].sub(&delta, f);
            }
        }
        out.push(TruncVal::Exact(v));
    }
    out
}

/// Elementary divisors with the default precision 1 + v_t(det M); errors on
/// singular input, where no finite precision suffices and the caller must
/// supply a cap.
pub fn elementary_divisors_auto(
    m: &PolyMatrix,
    f: &FieldSpec,
) -> Result<Vec<usize>, AlgebraError> {
    let det = m.det_bareiss(f)?;
    let v = match det.t_valuation() {
        super::poly::Val::Fin(v) => v as usize,
        super::poly::Val::Inf => return Err(AlgebraError::SingularMatrix),
    };
    let divisors = elementary_divisors(m, f, v + 1);
    divisors
        .into_iter()
        .map(|d| d.exact().ok_or(AlgebraError::PrecisionExhausted))
        .collect()
}

/// Diagonalize over F_q\[t\] by row and column operations, tracking the column
/// transform: returns (diagonal entries, V) with A·V column-equivalent to a
/// diagonal matrix whose first `rank` entries are nonzero. The columns of V
/// beyond the rank form a basis of the saturated kernel of A.
fn diagonalize_with_cols(
    a0: &PolyMatrix,
    f: &FieldSpec,
) -> (Vec<Poly>, Vec<Vec<Poly>>, usize) {
    let rows = a0.rows();
    let cols = a0.cols();
    let mut a: Vec<Vec<Poly>> = (0..rows)
        .map(|i| (0..cols).map(|j| a0.at(i, j).clone()).collect())
        .collect();
    // v as column vectors: v[j] is the j-th column of V.
    let mut v: Vec<Vec<Poly>> = (0..cols)
        .map(|j| {
            (0..cols)
                .map(|i| if i == j { Poly::one(f) } else { Poly::zero() })
                .collect()
        })
        .collect();
    let n = rows.min(cols);
    let mut rank = 0;
    for k in 0..n {
        loop {
            // Minimal-degree nonzero pivot in the trailing block.
            let mut best: Option<(usize, usize, usize)> = None;
            for i in k..rows {
                for j in k..cols {
                    if let Some(d) = a[i][j].degree() {
                        let better = match best {
                            None => true,
                            Some((bd, _, _)) => d < bd,
                        };
                        if better {
                            best = Some((d, i, j));
                        }
                    }
                }
            }
            let (_, pi, pj) = match best {
                Some(b) => b,
                None => return (diag(&a, n), v, rank),
            };
            a.swap(k, pi);
            if pj != k {
                for row in a.iter_mut() {
                    row.swap(k, pj);
                }
                v.swap(k, pj);
            }
            let mut clean = true;
            for i in k + 1..rows {
                if !a[i][k].is_zero() {
                    let (q, _) = a[i][k].divrem(&a[k][k], f).expect("nonzero pivot");
                    for j in k..cols {
                        let delta = q.mul(&a[k][j], f);
                        a[i][j] = a[i][j].sub(&delta, f);
                    }
                    if !a[i][k].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in k + 1..cols {
                if !a[k][j].is_zero() {
                    let (q, _) = a[k][j].divrem(&a[k][k], f).expect("nonzero pivot");
                    for i in k..rows {
                        let delta = q.mul(&a[i][k], f);
                        a[i][j] = a[i][j].sub(&delta, f);
                    }
                    // column op on V: col_j -= q · col_k
                    for i in 0..cols {
                        let delta = q.mul(&v[k][i], f);
                        v[j][i] = v[j][i].sub(&delta, f);
                    }
                    if !a[k][j].is_zero() {
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
        rank += 1;
    }
    (diag(&a, n), v, rank)
}

fn diag(a: &[Vec<Poly>], n: usize) -> Vec<Poly> {
    (0..n).map(|k| a[k][k].clone()).collect()
}

/// Basis of the saturated kernel {x ∈ A^cols : A·x = 0}, as column vectors.
/// Being columns of a unimodular transform, the basis spans the full lattice
/// kernel (not a finite-index sublattice).
pub fn poly_kernel_basis(a: &PolyMatrix, f: &FieldSpec) -> Vec<Vec<Poly>> {
    let (_, v, rank) = diagonalize_with_cols(a, f);
    v.into_iter().skip(rank).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> FieldSpec {
        FieldSpec::prime(3).unwrap()
    }

    fn diag_matrix(f: &FieldSpec, powers: &[usize]) -> PolyMatrix {
        let n = powers.len();
        let mut m = PolyMatrix::zero(n, n);
        for (i, &p) in powers.iter().enumerate() {
            *m.at_mut(i, i) = Poly::t(f).pow(p as u64, f);
        }
        m
    }

    #[test]
    fn diag_1_t_t3() {
        let f = f3();
        let m = diag_matrix(&f, &[0, 1, 3]);
        let d = elementary_divisors(&m, &f, 5);
        assert_eq!(
            d,
            vec![TruncVal::Exact(0), TruncVal::Exact(1), TruncVal::Exact(3)]
        );
        let auto = elementary_divisors_auto(&m, &f).unwrap();
        assert_eq!(auto, vec![0, 1, 3]);
    }

    #[test]
    fn zero_matrix_saturates() {
        let f = f3();
        let m = PolyMatrix::zero(2, 2);
        let d = elementary_divisors(&m, &f, 4);
        assert_eq!(d, vec![TruncVal::AtLeast(4), TruncVal::AtLeast(4)]);
        assert!(elementary_divisors_auto(&m, &f).is_err());
    }

    #[test]
    fn invariant_under_unimodular() {
        let f = f3();
        let m = diag_matrix(&f, &[0, 1, 3]);
        // G, H invertible over F_q[[t]] (constant-term-invertible).
        let g = PolyMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                Poly::one(&f)
            } else if i < j {
                Poly::from_ints(&f, &[1, 2])
            } else {
                Poly::from_ints(&f, &[0, 1])
            }
        });
        let h = PolyMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                Poly::from_ints(&f, &[2, 1])
            } else if i > j {
                Poly::from_ints(&f, &[1])
            } else {
                Poly::from_ints(&f, &[0, 0, 1])
            }
        });
        let prod = g.mul(&m, &f).mul(&h, &f);
        let d = elementary_divisors(&prod, &f, 5);
        assert_eq!(
            d,
            vec![TruncVal::Exact(0), TruncVal::Exact(1), TruncVal::Exact(3)]
        );
    }

    #[test]
    fn kernel_basis_is_saturated() {
        let f = f3();
        // A = [t, t²]: kernel in A² is spanned by (t, -1)·? — saturated kernel
        // is spanned by (-t, 1) (up to unit), not by t·(that).
        let mut a = PolyMatrix::zero(1, 2);
        *a.at_mut(0, 0) = Poly::t(&f);
        *a.at_mut(0, 1) = Poly::t(&f).pow(2, &f);
        let ker = poly_kernel_basis(&a, &f);
        assert_eq!(ker.len(), 1);
        let x = &ker[0];
        // t·x0 + t²·x1 = 0
        let lhs = Poly::t(&f)
            .mul(&x[0], &f)
            .add(&Poly::t(&f).pow(2, &f).mul(&x[1], &f), &f);
        assert!(lhs.is_zero());
        // Saturation: the entries are coprime.
        let g = x[0].gcd(&x[1], &f);
        assert!(g.is_one(&f));
    }
}
