//! The weight-k coefficient module V_k = Hom(H_{k−2}, ·), harmonic-cocycle
//! extension, and the matrices over F_q\[t\] of the Hecke operators T_Q, the
//! diamond operators ⟨λ⟩, the character projectors ε_χ, and the weight
//! reduction ρ_{k,N} — all with respect to the ordered basis
//! v_{1,0}, …, v_{d,0}, v_{1,1}, …, v_{d,k−2} of 𝒱_k(A) = St ⊗ V_k(A).
//!
//! A Γ-equivariant harmonic cocycle is determined by its values at the Λ₁
//! representatives. The value at any stable edge is a transported
//! representative value ε·γ^{-1}∘c(r(e)); at an unstable edge the vertex-sum
//! relation propagates values recursively away from the cusp fixed by the
//! edge's stabilizer. The expansions are independent of the weight, so they
//! are cached across k.
//!
//! Matrix entries must land in F_q\[t\]: the transports ξ_i^{-1}γ^{-1} all have
//! integral inverse, and the final change of basis into the Steinberg
//! coordinates is checked for integrality rather than assumed.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::berkowitz::charpoly_reciprocal_mod_t;
use crate::algebra::field::{FieldElem, FieldSpec};
use crate::algebra::matrix::{ratfn_to_poly_matrix, solve_exact, FieldMatrix, PolyMatrix, TruncMatrix};
use crate::algebra::poly::{Poly, Val};
use crate::algebra::trunc::TruncSeries;
use crate::algebra::AlgebraError;
use crate::level::{LevelError, QuotientData, SteinbergTerm};
use crate::tree::{act_edge, neighbors, GroupElem, OrientedEdge, TreeError, TreeVertex};

/// Errors from the Hecke layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HeckeError {
    Denominator(String),
    ExtensionBudget,
    NotOrdinaryMultOne { found: usize },
    NonConvergence,
    Level(LevelError),
    Algebra(AlgebraError),
    Tree(TreeError),
    Invalid(String),
}

impl From<LevelError> for HeckeError {
    fn from(e: LevelError) -> Self {
        HeckeError::Level(e)
    }
}

impl From<AlgebraError> for HeckeError {
    fn from(e: AlgebraError) -> Self {
        HeckeError::Algebra(e)
    }
}

impl From<TreeError> for HeckeError {
    fn from(e: TreeError) -> Self {
        HeckeError::Tree(e)
    }
}

impl core::fmt::Display for HeckeError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            HeckeError::Denominator(s) => write!(f, "integrality violation: {}", s),
            HeckeError::ExtensionBudget => {
                write!(f, "cocycle extension budget exceeded (quotient depth too small?)")
            }
            HeckeError::NotOrdinaryMultOne { found } => {
                write!(f, "ordinary multiplicity is {}, expected 1", found)
            }
            HeckeError::NonConvergence => write!(f, "power iteration did not converge"),
            HeckeError::Level(e) => write!(f, "{}", e),
            HeckeError::Algebra(e) => write!(f, "{}", e),
            HeckeError::Tree(e) => write!(f, "{}", e),
            HeckeError::Invalid(s) => write!(f, "{}", s),
        }
    }
}

/// Matrix of ω ↦ ξ∘ω on V_k in the dual basis (X^j Y^{k−2−j})^∨.
///
/// For ξ with integral inverse (a b; c d) ∈ M₂(A) the action is
/// (ξ∘ω)(P) = ω(P(aX + cY, bX + dY)), so column j holds the coordinates of
/// ξ∘ω_j, namely the X^j-coefficients of the substituted monomials. Inputs
/// whose inverse has a genuine denominator are rejected.
pub fn vk_matrix(xi: &GroupElem, k: usize, f: &FieldSpec) -> Result<PolyMatrix, HeckeError> {
    assert!(k >= 2);
    let inv = xi.inverse(f)?;
    if !inv.is_integral(f) {
        return Err(HeckeError::Denominator(
            "group element acts on V_k with denominators".into(),
        ));
    }
    let m = k - 2;
    let [a, b, c, d] = inv.num().clone();
    // pow_ac[l] = (aX + cY)^l and pow_bd[l] = (bX + dY)^l as X-coefficient
    // vectors of homogeneous forms of degree l.
    let mut pow_ac: Vec<Vec<Poly>> = vec![vec![Poly::one(f)]];
    let mut pow_bd: Vec<Vec<Poly>> = vec![vec![Poly::one(f)]];
    for l in 1..=m {
        let mul_lin = |prev: &Vec<Poly>, x_coef: &Poly, y_coef: &Poly| -> Vec<Poly> {
            let mut out = vec![Poly::zero(); l + 1];
            for (j, p) in prev.iter().enumerate() {
                out[j + 1] = out[j + 1].add(&p.mul(x_coef, f), f);
                out[j] = out[j].add(&p.mul(y_coef, f), f);
            }
            out
        };
        pow_ac.push(mul_lin(&pow_ac[l - 1], &a, &c));
        pow_bd.push(mul_lin(&pow_bd[l - 1], &b, &d));
    }
    let mut mat = PolyMatrix::zero(k - 1, k - 1);
    for l in 0..=m {
        // expansion of (aX + cY)^l (bX + dY)^{m−l}
        let left = &pow_ac[l];
        let right = &pow_bd[m - l];
        let mut expansion = vec![Poly::zero(); m + 1];
        for (j1, p1) in left.iter().enumerate() {
            if p1.is_zero() {
                continue;
            }
            for (j2, p2) in right.iter().enumerate() {
                if p2.is_zero() {
                    continue;
                }
                expansion[j1 + j2] = expansion[j1 + j2].add(&p1.mul(p2, f), f);
            }
        }
        for j in 0..=m {
            *mat.at_mut(l, j) = expansion[j].clone();
        }
    }
    // Matrix entry (l, j) is (ξ∘ω_j)(P_l), the X^j-coefficient of the
    // substituted monomial P_l, which is exactly what the loop filled.
    Ok(mat)
}

/// Apply ξ∘ to a V_k element given by its dual-basis coordinates.
pub fn vk_act(
    xi: &GroupElem,
    omega: &[Poly],
    k: usize,
    f: &FieldSpec,
) -> Result<Vec<Poly>, HeckeError> {
    let mat = vk_matrix(xi, k, f)?;
    assert_eq!(omega.len(), k - 1);
    let mut out = vec![Poly::zero(); k - 1];
    for l in 0..k - 1 {
        for j in 0..k - 1 {
            if !omega[j].is_zero() {
                out[l] = out[l].add(&mat.at(l, j).mul(&omega[j], f), f);
            }
        }
    }
    Ok(out)
}

/// One transported representative value: contributes sign · (g ∘ c(rep)).
#[derive(Clone, Debug)]
pub struct Transport {
    pub sign: i8,
    /// The transport γ^{-1} (already inverted; its inverse is integral).
    pub gamma_inv: GroupElem,
    pub rep: usize,
}

/// Weight-independent expansion cache for harmonic-cocycle values: source
/// decompositions of edges and cusp directions of unstable vertices. Bounded;
/// on overflow the memo is dropped wholesale (Hecke summations revisit a
/// small working set, so this only guards against pathological growth).
pub struct HeckeCache<'a> {
    pub qd: &'a QuotientData,
    expand_memo: BTreeMap<OrientedEdge, Vec<Transport>>,
    cusp_memo: BTreeMap<TreeVertex, OrientedEdge>,
    memo_cap: usize,
}

impl<'a> HeckeCache<'a> {
    pub fn new(qd: &'a QuotientData) -> HeckeCache<'a> {
        HeckeCache {
            qd,
            expand_memo: BTreeMap::new(),
            cusp_memo: BTreeMap::new(),
            memo_cap: 1 << 20,
        }
    }

    fn cusp_direction(&mut self, v: &TreeVertex) -> Result<OrientedEdge, HeckeError> {
        if let Some(e) = self.cusp_memo.get(v) {
            return Ok(e.clone());
        }
        let e = self.qd.cusp_direction(v)?;
        if self.cusp_memo.len() >= self.memo_cap {
            self.cusp_memo.clear();
        }
        self.cusp_memo.insert(v.clone(), e.clone());
        Ok(e)
    }

    /// Source decomposition of c(e) as Σ sign·γ^{-1}∘c(rep): the stable case
    /// is the unique expression r(e) = ε γ e; the unstable case expands the
    /// vertex-sum relation at the non-cusp side, moving away from the
    /// rational end fixed by the edge's stabilizer.
    pub fn expand(&mut self, e: &OrientedEdge) -> Result<Vec<Transport>, HeckeError> {
        if let Some(t) = self.expand_memo.get(e) {
            return Ok(t.clone());
        }
        let out = self.expand_inner(e, 0)?;
        if self.expand_memo.len() >= self.memo_cap {
            self.expand_memo.clear();
        }
        self.expand_memo.insert(e.clone(), out.clone());
        Ok(out)
    }

    fn expand_inner(&mut self, e: &OrientedEdge, depth: usize) -> Result<Vec<Transport>, HeckeError> {
        if depth > 64 {
            return Err(HeckeError::ExtensionBudget);
        }
        if let Some(t) = self.expand_memo.get(e) {
            return Ok(t.clone());
        }
        let f = self.qd.field();
        let out = if self.qd.is_stable_edge(e)? {
            let class = self.qd.edge_class(e)?;
            vec![Transport {
                sign: class.sign,
                gamma_inv: class.gamma.inverse(f)?,
                rep: class.rep,
            }]
        } else {
            let dir_o = self.cusp_direction(e.origin())?;
            if &dir_o == e {
                // c(e) = Σ c(f) over the q edges f ≠ −e flowing into o(e).
                let mut acc = Vec::new();
                for x in neighbors(e.origin(), f) {
                    if &x == e.terminus() {
                        continue;
                    }
                    let feeder = OrientedEdge::new(x, e.origin().clone(), f)?;
                    acc.extend(self.expand_inner(&feeder, depth + 1)?);
                }
                acc
            } else {
                // The reverse must point toward the cusp at its origin.
                let rev = e.rev();
                let dir_t = self.cusp_direction(rev.origin())?;
                if dir_t != rev {
                    return Err(HeckeError::Invalid(
                        "unstable edge lies on no cusp ray".into(),
                    ));
                }
                let mut acc = self.expand_inner(&rev, depth + 1)?;
                for t in acc.iter_mut() {
                    t.sign = -t.sign;
                }
                acc
            }
        };
        if self.expand_memo.len() >= self.memo_cap {
            self.expand_memo.clear();
        }
        self.expand_memo.insert(e.clone(), out.clone());
        Ok(out)
    }
}

/// A Γ-equivariant harmonic cocycle of weight k, stored by its values at the
/// Λ₁ representatives (each value in dual-basis coordinates).
#[derive(Clone, Debug)]
pub struct Cocycle {
    pub k: usize,
    pub values: Vec<Vec<Poly>>,
}

impl Cocycle {
    /// The basis cocycle supported at representative `rep` with value ω_j.
    pub fn basis(qd: &QuotientData, k: usize, rep: usize, j: usize) -> Cocycle {
        let f = qd.field();
        let mut values = vec![vec![Poly::zero(); k - 1]; qd.lambda1.len()];
        values[rep][j] = Poly::one(f);
        Cocycle { k, values }
    }
}

/// Evaluate a cocycle at an arbitrary oriented edge through the stable-edge
/// transport and the recursive vertex-sum expansion.
pub fn extend_cocycle(
    cache: &mut HeckeCache,
    c: &Cocycle,
    e: &OrientedEdge,
) -> Result<Vec<Poly>, HeckeError> {
    let f = cache.qd.field();
    let terms = cache.expand(e)?;
    let mut out = vec![Poly::zero(); c.k - 1];
    for t in terms {
        let moved = vk_act(&t.gamma_inv, &c.values[t.rep], c.k, f)?;
        for (o, m) in out.iter_mut().zip(moved) {
            let signed = if t.sign < 0 { m.neg(f) } else { m };
            *o = o.add(&signed, f);
        }
    }
    Ok(out)
}

/// Coordinate index of (rep i, slot j) in L_{1,k}: the ordering is j-major,
/// matching v_{1,0}, …, v_{d,0}, v_{1,1}, … on the Steinberg side.
fn l_index(nrep: usize, i: usize, j: usize) -> usize {
    j * nrep + i
}

/// Matrix on L_{1,k} of the operator c ↦ (e ↦ Σ_i ξ_i^{-1}∘c(ξ_i e)) for a
/// set of coset representatives; this is T_{1,Q} for Hecke cosets and the
/// diamond operator for the single representative η_λ.
fn transfer_matrix(
    cache: &mut HeckeCache,
    k: usize,
    cosets: &[GroupElem],
) -> Result<PolyMatrix, HeckeError> {
    let qd = cache.qd;
    let f = qd.field();
    let nrep = qd.lambda1.len();
    let dim = nrep * (k - 1);
    let mut mat = PolyMatrix::zero(dim, dim);
    let mut vk_memo: BTreeMap<GroupElem, PolyMatrix> = BTreeMap::new();
    for (rho, rep) in qd.lambda1.iter().enumerate() {
        for xi in cosets {
            let image = act_edge(xi, &rep.edge, f)?;
            let terms = cache.expand(&image)?;
            let xi_inv = xi.inverse(f)?;
            for term in terms {
                let prod = xi_inv.mul(&term.gamma_inv, f);
                let vkm = match vk_memo.get(&prod) {
                    Some(m) => m.clone(),
                    None => {
                        let m = vk_matrix(&prod, k, f)?;
                        vk_memo.insert(prod.clone(), m.clone());
                        m
                    }
                };
                for l in 0..k - 1 {
                    for j in 0..k - 1 {
                        let entry = vkm.at(l, j);
                        if entry.is_zero() {
                            continue;
                        }
                        let row = l_index(nrep, rho, l);
                        let col = l_index(nrep, term.rep, j);
                        let cur = mat.at(row, col);
                        let val = if term.sign < 0 {
                            cur.sub(entry, f)
                        } else {
                            cur.add(entry, f)
                        };
                        *mat.at_mut(row, col) = val;
                    }
                }
            }
        }
    }
    Ok(mat)
}

/// The embedding 𝒱_k(A) → L_{1,k}(A): column (i, j) is s_i ⊗ ω_j expanded in
/// the \[rep\]⊗ω_l coordinates via s_i = Σ ε·\[rep\]|_γ and \[rep\]|_γ⊗ω = \[rep\]⊗γ∘ω.
fn embedding_matrix(qd: &QuotientData, k: usize) -> Result<PolyMatrix, HeckeError> {
    let f = qd.field();
    let nrep = qd.lambda1.len();
    let d = qd.d;
    let mut e = PolyMatrix::zero(nrep * (k - 1), d * (k - 1));
    let mut vk_memo: BTreeMap<GroupElem, PolyMatrix> = BTreeMap::new();
    for (i, terms) in qd.steinberg.iter().enumerate() {
        for SteinbergTerm { sign, gamma, rep } in terms {
            let vkm = match vk_memo.get(gamma) {
                Some(m) => m.clone(),
                None => {
                    let m = vk_matrix(gamma, k, f)?;
                    vk_memo.insert(gamma.clone(), m.clone());
                    m
                }
            };
            for l in 0..k - 1 {
                for j in 0..k - 1 {
                    let entry = vkm.at(l, j);
                    if entry.is_zero() {
                        continue;
                    }
                    let row = l_index(nrep, *rep, l);
                    let col = l_index(d, i, j);
                    let cur = e.at(row, col);
                    let val = if *sign < 0 {
                        cur.sub(entry, f)
                    } else {
                        cur.add(entry, f)
                    };
                    *e.at_mut(row, col) = val;
                }
            }
        }
    }
    Ok(e)
}

/// Express an operator on L_{1,k} that stabilizes 𝒱_k in the ordered
/// Steinberg basis: solve E·X = T·E exactly and insist on integral entries.
fn restrict_to_steinberg(
    qd: &QuotientData,
    t_mat: &PolyMatrix,
    k: usize,
) -> Result<PolyMatrix, HeckeError> {
    let f = qd.field();
    let e = embedding_matrix(qd, k)?;
    if e.rows() == e.cols() {
        // No stable vertices: 𝒱_k = L_{1,k}. When the embedding is the
        // identity the operator matrix is already in the right basis.
        if e == PolyMatrix::identity(e.rows(), f) {
            return Ok(t_mat.clone());
        }
    }
    let te = t_mat.mul(&e, f);
    let x = solve_exact(&e, &te, f).map_err(|err| match err {
        AlgebraError::Invalid(_) => HeckeError::Invalid(
            "operator does not stabilize the Steinberg submodule".into(),
        ),
        other => HeckeError::Algebra(other),
    })?;
    let xp = ratfn_to_poly_matrix(&x, f)
        .map_err(|_| HeckeError::Denominator("operator matrix has denominators".into()))?;
    // verify exactly
    if e.mul(&xp, f) != te {
        return Err(HeckeError::Invalid("basis solve verification failed".into()));
    }
    Ok(xp)
}

/// The d(k−1) × d(k−1) matrix of T_Q on 𝒱_k(A) in the ordered basis 𝔅_k.
/// Entries are asserted to lie in F_q\[t\].
pub fn hecke_matrix(
    cache: &mut HeckeCache,
    k: usize,
    q_poly: &Poly,
) -> Result<PolyMatrix, HeckeError> {
    let cosets = crate::level::hecke_cosets(cache.qd.level(), q_poly)?;
    let t_mat = transfer_matrix(cache, k, &cosets)?;
    restrict_to_steinberg(cache.qd, &t_mat, k)
}

/// The U-operator T_℘ at the distinguished prime ℘ = t.
pub fn u_matrix(cache: &mut HeckeCache, k: usize) -> Result<PolyMatrix, HeckeError> {
    let f = cache.qd.field();
    let u = hecke_matrix(cache, k, &Poly::t(f))?;
    // Column divisibility from the j-graded basis: U(v_{i,j}) ∈ t^{k−2−j}𝒱_k.
    let d = cache.qd.d;
    for j in 0..k - 1 {
        let tpow = (k - 2 - j) as u64;
        for col in j * d..(j + 1) * d {
            for row in 0..u.rows() {
                match u.at(row, col).t_valuation() {
                    Val::Inf => {}
                    Val::Fin(v) => {
                        if v < tpow {
                            return Err(HeckeError::Invalid(
                                "U-matrix violates column divisibility".into(),
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(u)
}

/// Matrix of the diamond operator ⟨λ⟩ on 𝒱_k(A).
pub fn diamond_matrix(
    cache: &mut HeckeCache,
    k: usize,
    lambda: FieldElem,
) -> Result<PolyMatrix, HeckeError> {
    let eta = crate::level::eta_lambda(cache.qd.level(), lambda)?;
    let t_mat = transfer_matrix(cache, k, &[eta])?;
    restrict_to_steinberg(cache.qd, &t_mat, k)
}

/// The projector ε_χ = −Σ_λ χ(λ)^{-1}·⟨λ⟩ onto the χ-part, for the character
/// χ(λ) = λ^c of F_q^×.
pub fn chi_projector(
    cache: &mut HeckeCache,
    k: usize,
    chi_exp: usize,
) -> Result<PolyMatrix, HeckeError> {
    let f = cache.qd.field().clone();
    let dim = cache.qd.d * (k - 1);
    let mut acc = PolyMatrix::zero(dim, dim);
    let qm1 = (f.q() - 1) as u64;
    for lambda in f.units() {
        let dia = diamond_matrix(cache, k, lambda)?;
        // χ(λ)^{-1} = λ^{-c} = λ^{(q−1−c) mod (q−1)}
        let exp = (qm1 - (chi_exp as u64 % qm1)) % qm1;
        let scalar = f.pow(lambda, exp);
        acc = acc.add(&dia.scale(&Poly::constant(scalar), &f), &f);
    }
    Ok(acc.scale(&Poly::constant(f.from_int(-1)), &f))
}

/// Basis of the χ-part lattice 𝒱_k(A)(χ) = ker(I − ε_χ) over A, as columns.
pub fn chi_part_basis(
    cache: &mut HeckeCache,
    k: usize,
    chi_exp: usize,
) -> Result<PolyMatrix, HeckeError> {
    let f = cache.qd.field().clone();
    let proj = chi_projector(cache, k, chi_exp)?;
    let id = PolyMatrix::identity(proj.rows(), &f);
    let ker = crate::algebra::smith::poly_kernel_basis(&id.sub(&proj, &f), &f);
    let mut basis = PolyMatrix::zero(proj.rows(), ker.len());
    for (j, col) in ker.iter().enumerate() {
        for i in 0..proj.rows() {
            *basis.at_mut(i, j) = col[i].clone();
        }
    }
    Ok(basis)
}

/// Representing matrix of an operator on the χ-part, with respect to the
/// saturated kernel basis of ε_χ. The operator must commute with ε_χ.
pub fn chi_part_matrix(
    cache: &mut HeckeCache,
    k: usize,
    chi_exp: usize,
    op: &PolyMatrix,
) -> Result<PolyMatrix, HeckeError> {
    let f = cache.qd.field().clone();
    let proj = chi_projector(cache, k, chi_exp)?;
    if proj.mul(op, &f) != op.mul(&proj, &f) {
        return Err(HeckeError::Invalid(
            "operator does not commute with the character projector".into(),
        ));
    }
    let basis = chi_part_basis(cache, k, chi_exp)?;
    let target = op.mul(&basis, &f);
    let x = solve_exact(&basis, &target, &f)?;
    let xp = ratfn_to_poly_matrix(&x, &f)
        .map_err(|_| HeckeError::Denominator("χ-part matrix has denominators".into()))?;
    if basis.mul(&xp, &f) != target {
        return Err(HeckeError::Invalid("χ-part solve verification failed".into()));
    }
    Ok(xp)
}

/// Matrix of the weight reduction 1⊗ρ_{k,N} : 𝒱_{k+N} → 𝒱_k in the ordered
/// bases: slot (i, j) of 𝔅_{k+N} maps to (i, j−N) when j ≥ N and to 0
/// otherwise.
pub fn weight_reduction_matrix(k: usize, n_shift: usize, d: usize, f: &FieldSpec) -> PolyMatrix {
    let rows = d * (k - 1);
    let cols = d * (k + n_shift - 1);
    let mut m = PolyMatrix::zero(rows, cols);
    for j in n_shift..k + n_shift - 1 {
        for i in 0..d {
            *m.at_mut(l_index(d, i, j - n_shift), l_index(d, i, j)) = Poly::one(f);
        }
    }
    m
}

/// Slope-zero eigenvector of U by t-adic power iteration at precision `prec`.
/// Requires d(U, 0) = 1 (checked first via the mod-t characteristic
/// polynomial); returns the eigenvector (normalized with a unit coordinate)
/// and its eigenvalue.
pub fn ordinary_eigenvector(
    u: &PolyMatrix,
    f: &FieldSpec,
    prec: usize,
) -> Result<(Vec<TruncSeries>, TruncSeries), HeckeError> {
    assert!(u.is_square());
    let n = u.rows();
    let u_bar = FieldMatrix::from_poly_matrix_mod_t(u);
    let cp = charpoly_reciprocal_mod_t(&u_bar, f)?;
    let deg = cp.iter().rposition(|c| !c.is_zero()).unwrap_or(0);
    if deg != 1 {
        return Err(HeckeError::NotOrdinaryMultOne { found: deg });
    }
    // det(I − ŪX) = 1 + c₁X: the unique nonzero eigenvalue mod t is −c₁.
    let lambda_bar = f.neg(cp[1]);
    // Mod-t eigenvector: kernel of (Ū − λ̄·I) by Gaussian elimination.
    let mut a: Vec<Vec<FieldElem>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let v = u_bar.at(i, j);
                    if i == j {
                        f.sub(v, lambda_bar)
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0usize;
    for col in 0..n {
        if let Some(r) = (row..n).find(|&r| !a[r][col].is_zero()) {
            a.swap(row, r);
            let inv = f.inv(a[row][col]).expect("unit");
            for j in 0..n {
                a[row][j] = f.mul(a[row][j], inv);
            }
            for r2 in 0..n {
                if r2 != row && !a[r2][col].is_zero() {
                    let factor = a[r2][col];
                    for j in 0..n {
                        a[r2][j] = f.sub(a[r2][j], f.mul(factor, a[row][j]));
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
    }
    let free_col = (0..n)
        .find(|c| !pivots.contains(c))
        .ok_or(HeckeError::NonConvergence)?;
    let mut v0 = vec![f.zero(); n];
    v0[free_col] = f.one();
    for (r, &pc) in pivots.iter().enumerate() {
        v0[pc] = f.neg(a[r][free_col]);
    }
    // Power iteration over F_q[[t]]/t^prec from the mod-t eigendirection.
    let ut = TruncMatrix::from_poly_matrix(u, prec);
    let mut v: Vec<TruncSeries> = v0
        .iter()
        .map(|&c| TruncSeries::from_poly(&Poly::constant(c), prec))
        .collect();
    let unit_idx = v0.iter().position(|c| !c.is_zero()).unwrap();
    let mut prev = v.clone();
    for step in 0..2 * prec {
        let mut w = ut.apply(&v, f);
        // normalize at the unit coordinate
        let pivot = w[unit_idx].clone();
        if pivot.valuation().exact() != Some(0) {
            return Err(HeckeError::NonConvergence);
        }
        let inv = pivot.inverse(f)?;
        for x in w.iter_mut() {
            *x = x.mul(&inv, f);
        }
        if w == prev && step > 0 {
            break;
        }
        prev = v;
        v = w;
    }
    if v != prev {
        return Err(HeckeError::NonConvergence);
    }
    // Eigenvalue from U·v at the unit coordinate; verify the full identity.
    let uv = ut.apply(&v, f);
    let lambda = uv[unit_idx].clone();
    for i in 0..n {
        if uv[i] != v[i].mul(&lambda, f) {
            return Err(HeckeError::NonConvergence);
        }
    }
    Ok((v, lambda))
}
