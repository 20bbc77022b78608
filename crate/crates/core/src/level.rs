//! Congruence subgroups Γ₁ᶿ(n, t^r) ⊆ SL₂(A) and the data of the quotient
//! graph Γ\𝒯 needed for Hecke computations: coset labels over SL₂(A/m) with
//! m = n·t^r, per-level orbit tables of cells over the standard half-line,
//! stable-edge representatives Λ₁, cusp directions at unstable vertices,
//! Hecke double-coset representatives, and diamond representatives η_λ.
//!
//! The Steinberg module is handled through its geodesic-symbol description:
//! St is free of rank d = \[Γ₁(t) : Γ\] over ℤ\[Γ\], with basis the transports by
//! coset representatives α_j ∈ Γ₁(t) of the symbol attached to the geodesic
//! from the end ∞ to the end 0. Concretely each basis element is the finite
//! signed sum of the Γ-stable edges on a translated copy of the standard
//! bi-infinite line, expanded in the Λ₁ coordinates of ℤ\[T̄₁ᵒ,st\]. For
//! Γ = Γ₁(t) itself the line carries exactly one stable edge and the basis
//! degenerates to that single Λ₁ class.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::algebra::field::{FieldElem, FieldSpec};
use crate::algebra::poly::{enumerate_below, Poly};
use crate::tree::{
    act_edge, act_vertex, neighbors, reduce_edge, reduce_vertex, std_stabilizer, CellKind,
    GroupElem, OrientedEdge, TreeError, TreeVertex,
};

/// Errors from the level layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LevelError {
    NotSl2a,
    DepthTooSmall { required: usize },
    BudgetExceeded(String),
    Validation(String),
    UnstableCell,
    StableCell,
    Inconsistent(String),
    Tree(TreeError),
}

impl From<TreeError> for LevelError {
    fn from(e: TreeError) -> LevelError {
        LevelError::Tree(e)
    }
}

impl core::fmt::Display for LevelError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            LevelError::NotSl2a => write!(f, "element is not in SL2(A)"),
            LevelError::DepthTooSmall { required } => {
                write!(f, "quotient depth too small; need at least {}", required)
            }
            LevelError::BudgetExceeded(s) => write!(f, "budget exceeded: {}", s),
            LevelError::Validation(s) => write!(f, "invalid level: {}", s),
            LevelError::UnstableCell => write!(f, "cell is unstable"),
            LevelError::StableCell => write!(f, "cell is stable"),
            LevelError::Inconsistent(s) => write!(f, "internal inconsistency: {}", s),
            LevelError::Tree(e) => write!(f, "{}", e),
        }
    }
}

/// The subgroup Θ ⊆ 1 + t·A_r of units of A_r = A/(t^r).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Theta {
    /// Θ = {1}: the level is Γ₁(n·t^r).
    Trivial,
    /// Θ = 1 + t·A_r: the level is Γ₁ᵖ(n, t^r) (written Γ₀ᵖ(t^r) when n = 1).
    Full,
    /// Generated by the given units (each ≡ 1 mod t).
    Gens(Vec<Poly>),
}

/// A congruence level Γ₁ᶿ(n, t^r) = Γ₁(n) ∩ Γ₀ᶿ(t^r).
///
/// Invariants: n ≠ 0 is coprime to t (normalized monic here), r ≥ 1, every
/// element of Θ is ≡ 1 mod t; the induced group is p′-torsion free. The
/// distinguished prime is ℘ = t, so n·℘ always has the degree-one prime
/// factor π = t and the Steinberg module over Γ is free of rank
/// d = \[Γ₁(t) : Γ\].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSpec {
    field: FieldSpec,
    n: Poly,
    r: usize,
    /// Enumerated residues of Θ mod t^r, sorted canonically.
    theta: Vec<Poly>,
    /// m = n·t^r.
    m: Poly,
}

impl LevelSpec {
    pub fn new(field: FieldSpec, n: Poly, r: usize, theta: Theta) -> Result<LevelSpec, LevelError> {
        if n.is_zero() {
            return Err(LevelError::Validation("n must be nonzero".into()));
        }
        if r < 1 {
            return Err(LevelError::Validation("r must be at least 1".into()));
        }
        if n.coeff(0).is_zero() {
            return Err(LevelError::Validation("n must be prime to t".into()));
        }
        let n = n.make_monic(&field);
        let tr = Poly::one(&field).shift_up(r);
        let m = n.mul(&tr, &field);
        let theta = match theta {
            Theta::Trivial => alloc::vec![Poly::one(&field)],
            Theta::Full => {
                // all 1 + t·a with deg a < r − 1
                let mut out = Vec::new();
                if r == 1 {
                    out.push(Poly::one(&field));
                } else {
                    for a in enumerate_below(&field, r - 1) {
                        let u = Poly::one(&field).add(&a.shift_up(1), &field);
                        out.push(u.rem(&tr, &field));
                    }
                }
                out
            }
            Theta::Gens(gens) => {
                for g in &gens {
                    if g.coeff(0) != field.one() {
                        return Err(LevelError::Validation(
                            "theta generators must be ≡ 1 mod t".into(),
                        ));
                    }
                }
                // close under multiplication mod t^r
                let mut set: Vec<Poly> = alloc::vec![Poly::one(&field)];
                let mut frontier: Vec<Poly> = set.clone();
                while let Some(x) = frontier.pop() {
                    for g in &gens {
                        let y = x.mul(g, &field).rem(&tr, &field);
                        if !set.contains(&y) {
                            set.push(y.clone());
                            frontier.push(y);
                        }
                    }
                }
                set
            }
        };
        let mut theta = theta;
        theta.sort();
        theta.dedup();
        Ok(LevelSpec {
            field,
            n,
            r,
            theta,
            m,
        })
    }

    /// Γ₁(t): n = 1, r = 1, Θ trivial.
    pub fn gamma1_t(field: FieldSpec) -> LevelSpec {
        let one = Poly::one(&field);
        LevelSpec::new(field, one, 1, Theta::Trivial).expect("valid")
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn n(&self) -> &Poly {
        &self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn modulus(&self) -> &Poly {
        &self.m
    }

    pub fn theta(&self) -> &[Poly] {
        &self.theta
    }

    /// Membership of γ ∈ SL₂(A) in Γ₁ᶿ(n, t^r); errors on non-SL₂(A) input.
    pub fn member(&self, g: &GroupElem) -> Result<bool, LevelError> {
        let f = &self.field;
        if !g.is_sl2a(f) {
            return Err(LevelError::NotSl2a);
        }
        Ok(self.member_mod(&reduce_mat(g.num(), &self.m, f)))
    }

    /// Membership test on a matrix reduced mod m.
    fn member_mod(&self, mat: &[Poly; 4]) -> bool {
        let f = &self.field;
        // mod n: (1 *; 0 1)
        if !self.n.is_one(f) {
            let a = mat[0].rem(&self.n, f);
            let c = mat[2].rem(&self.n, f);
            let d = mat[3].rem(&self.n, f);
            if !a.is_one(f) || !c.is_zero() || !d.is_one(f) {
                return false;
            }
        }
        // mod t^r: upper triangular with diagonal entries in Θ
        let tr = Poly::one(f).shift_up(self.r);
        let a = mat[0].rem(&tr, f);
        let c = mat[2].rem(&tr, f);
        let d = mat[3].rem(&tr, f);
        c.is_zero() && self.theta.contains(&a) && self.theta.contains(&d)
    }

    /// Γ₁(t)-membership pattern (the ambient group of the Steinberg basis).
    fn member_gamma1_t(&self, mat: &[Poly; 4]) -> bool {
        let f = &self.field;
        let t = Poly::t(f);
        mat[0].rem(&t, f).is_one(f) && mat[2].rem(&t, f).is_zero() && mat[3].rem(&t, f).is_one(f)
    }
}

fn reduce_mat(mat: &[Poly; 4], m: &Poly, f: &FieldSpec) -> [Poly; 4] {
    [
        mat[0].rem(m, f),
        mat[1].rem(m, f),
        mat[2].rem(m, f),
        mat[3].rem(m, f),
    ]
}

fn mat_key(mat: &[Poly; 4]) -> Vec<u16> {
    let mut key = Vec::new();
    for e in mat {
        key.push(e.coeffs().len() as u16);
        for c in e.coeffs() {
            for &x in c.coords() {
                key.push(x);
            }
        }
    }
    key
}

fn mat_mul(a: &[Poly; 4], b: &[Poly; 4], m: &Poly, f: &FieldSpec) -> [Poly; 4] {
    [
        a[0].mul(&b[0], f).add(&a[1].mul(&b[2], f), f).rem(m, f),
        a[0].mul(&b[1], f).add(&a[1].mul(&b[3], f), f).rem(m, f),
        a[2].mul(&b[0], f).add(&a[3].mul(&b[2], f), f).rem(m, f),
        a[2].mul(&b[1], f).add(&a[3].mul(&b[3], f), f).rem(m, f),
    ]
}

/// SL₂(A/m), enumerated breadth-first from the generators S and
/// (1 t^j; 0 1), with canonical lifts to SL₂(A) recorded as generator words.
struct Sl2ModM {
    elements: Vec<[Poly; 4]>,
    index: BTreeMap<Vec<u16>, u32>,
    /// (parent index, generator id) per element; the identity is its own root.
    parents: Vec<(u32, u8)>,
    gen_lifts: Vec<GroupElem>,
}

impl Sl2ModM {
    fn build(m: &Poly, f: &FieldSpec, budget: usize) -> Result<Sl2ModM, LevelError> {
        let deg_m = m.degree_or_panic();
        let mut gens_mod: Vec<[Poly; 4]> = Vec::new();
        let mut gen_lifts: Vec<GroupElem> = Vec::new();
        // Translations over an F_p-basis of F_q generate the full unipotent
        // group; together with the inversion they generate SL₂(A/m).
        for j in 0..deg_m.max(1) {
            for b_idx in 0..f.e() {
                let mut coords = alloc::vec![0u16; f.e()];
                coords[b_idx] = 1;
                let b = Poly::monomial(f.from_coords(&coords), j);
                gen_lifts.push(GroupElem::translation(b.clone(), f));
                gens_mod.push(reduce_mat(
                    &[Poly::one(f), b, Poly::zero(), Poly::one(f)],
                    m,
                    f,
                ));
            }
        }
        gen_lifts.push(GroupElem::inversion(f));
        gens_mod.push(reduce_mat(
            &[
                Poly::zero(),
                Poly::one(f).neg(f),
                Poly::one(f),
                Poly::zero(),
            ],
            m,
            f,
        ));

        let id = [Poly::one(f), Poly::zero(), Poly::zero(), Poly::one(f)];
        let id = reduce_mat(&id, m, f);
        let mut elements = alloc::vec![id.clone()];
        let mut index = BTreeMap::new();
        index.insert(mat_key(&id), 0u32);
        let mut parents = alloc::vec![(0u32, 0u8)];
        let mut frontier = alloc::vec![0u32];
        while let Some(cur) = frontier.pop() {
            let cur_mat = elements[cur as usize].clone();
            for (gi, g) in gens_mod.iter().enumerate() {
                // new element = generator · current, so lift words read
                // outermost-first
                let next = mat_mul(g, &cur_mat, m, f);
                let key = mat_key(&next);
                if !index.contains_key(&key) {
                    if elements.len() >= budget {
                        return Err(LevelError::BudgetExceeded(format!(
                            "SL2(A/m) exceeds enumeration budget {}",
                            budget
                        )));
                    }
                    let id = elements.len() as u32;
                    index.insert(key, id);
                    elements.push(next);
                    parents.push((cur, gi as u8));
                    frontier.push(id);
                }
            }
        }
        Ok(Sl2ModM {
            elements,
            index,
            parents,
            gen_lifts,
        })
    }

    fn index_of(&self, mat: &[Poly; 4]) -> u32 {
        *self
            .index
            .get(&mat_key(mat))
            .expect("matrix not in SL2(A/m)")
    }

    /// Canonical lift of element i to SL₂(A): the BFS generator word.
    fn lift(&self, i: u32, f: &FieldSpec) -> GroupElem {
        let mut word = Vec::new();
        let mut cur = i;
        while cur != 0 {
            let (p, g) = self.parents[cur as usize];
            word.push(g);
            cur = p;
        }
        let mut out = GroupElem::identity(f);
        for &g in word.iter() {
            out = out.mul(&self.gen_lifts[g as usize], f);
        }
        out
    }
}

/// Expected |SL₂(A/m)| from the factorization of m: the product over prime
/// powers P^e || m of Q^{3e}(1 − Q^{-2}), Q = q^{deg P}. The BFS count is
/// checked against this.
fn sl2_order(m: &Poly, f: &FieldSpec) -> u128 {
    let mut mm = m.make_monic(f);
    let mut order: u128 = 1;
    let mut d = 1usize;
    while mm.degree() != Some(0) {
        for p in crate::algebra::poly::enumerate_monic(f, d) {
            if !p.is_irreducible(f) {
                continue;
            }
            let mut e = 0u32;
            loop {
                match mm.divrem(&p, f) {
                    Ok((q2, rem)) if rem.is_zero() => {
                        mm = q2;
                        e += 1;
                    }
                    _ => break,
                }
            }
            if e > 0 {
                let big_q = (f.q() as u128).pow(d as u32);
                order *= big_q.pow(3 * e - 2) * (big_q.pow(2) - 1);
            }
        }
        d += 1;
        if d > m.degree_or_panic() + 1 {
            break;
        }
    }
    order
}

/// One Γ-orbit of cells lying over a standard cell.
#[derive(Clone, Debug)]
pub struct CellOrbit {
    /// Canonical representative coset label (minimal label in the orbit).
    pub rep_label: u32,
    /// Trivial Γ-stabilizer?
    pub stable: bool,
    /// Index into Λ₁ for stable edge orbits.
    pub lambda_index: Option<usize>,
}

/// Orbit table for one standard level and cell kind.
#[derive(Clone, Debug)]
struct OrbitTable {
    orbit_of_label: BTreeMap<u32, u32>,
    orbits: Vec<CellOrbit>,
}

/// A Λ₁ representative: a Γ-stable oriented edge over a standard edge.
#[derive(Clone, Debug)]
pub struct LambdaRep {
    pub level_i: usize,
    pub label: u32,
    /// Lift g ∈ SL₂(A) with edge = g ∘ e_i.
    pub lift: GroupElem,
    pub edge: OrientedEdge,
}

/// One term ε·\[r\]|_γ of a Steinberg basis element: the edge contributes
/// ε · (γ ∘ ω) to the \[r\]-coordinate when tensored with ω ∈ V_k.
#[derive(Clone, Debug)]
pub struct SteinbergTerm {
    pub sign: i8,
    pub gamma: GroupElem,
    pub rep: usize,
}

/// The computed quotient data of Γ\𝒯.
pub struct QuotientData {
    level: LevelSpec,
    depth: usize,
    sl2: Sl2ModM,
    /// Coset label (a canonical element index) per element index.
    coset_label: Vec<u32>,
    /// \[SL₂(A) : Γ\].
    pub index: usize,
    /// d = \[Γ₁(t) : Γ\]: the Steinberg rank.
    pub d: usize,
    edge_tables: Vec<OrbitTable>,
    vertex_tables: Vec<OrbitTable>,
    pub lambda1: Vec<LambdaRep>,
    pub stable_vertex_count: usize,
    /// Steinberg basis elements s_1, …, s_d expanded over Λ₁.
    pub steinberg: Vec<Vec<SteinbergTerm>>,
    edge_stabs: Vec<Vec<GroupElem>>,
    vertex_stabs: Vec<Vec<GroupElem>>,
}

/// The unique decomposition data of a stable edge: r(e) = ε·γ·e.
#[derive(Clone, Debug)]
pub struct EdgeClass {
    pub rep: usize,
    pub sign: i8,
    pub gamma: GroupElem,
}

impl QuotientData {
    pub fn level(&self) -> &LevelSpec {
        &self.level
    }

    pub fn field(&self) -> &FieldSpec {
        self.level.field()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    fn label_of(&self, g: &GroupElem) -> u32 {
        let f = self.field();
        let mat = reduce_mat(g.num(), self.level.modulus(), f);
        self.coset_label[self.sl2.index_of(&mat) as usize]
    }

    fn edge_stab(&self, i: usize) -> &[GroupElem] {
        &self.edge_stabs[i.min(self.edge_stabs.len() - 1)]
    }

    /// Γ-stability of an arbitrary oriented edge.
    pub fn is_stable_edge(&self, e: &OrientedEdge) -> Result<bool, LevelError> {
        let f = self.field();
        let (i, _, g) = reduce_edge(e, f)?;
        if i >= self.edge_tables.len() {
            // Beyond the scan depth every class is unstable: once i ≥ deg m
            // the stabilizer of any cell over e_i contains a conjugate of
            // (1 m·t^j; 0 1) ≡ 1 mod m.
            return Ok(false);
        }
        let ginv = g.inverse(f)?;
        let label = self.label_of(&ginv);
        let table = &self.edge_tables[i];
        let orbit = table.orbit_of_label[&label];
        Ok(table.orbits[orbit as usize].stable)
    }

    /// Γ-stability of a vertex.
    pub fn is_stable_vertex(&self, v: &TreeVertex) -> Result<bool, LevelError> {
        let f = self.field();
        let (i, g) = reduce_vertex(v, f)?;
        if i >= self.vertex_tables.len() {
            return Ok(false);
        }
        let ginv = g.inverse(f)?;
        let label = self.label_of(&ginv);
        let table = &self.vertex_tables[i];
        let orbit = table.orbit_of_label[&label];
        Ok(table.orbits[orbit as usize].stable)
    }

    /// Identify the Γ-orbit of a stable vertex: an index into the list of
    /// stable vertex classes (ordered by level, then table order).
    pub fn stable_vertex_index(&self, v: &TreeVertex) -> Result<Option<usize>, LevelError> {
        let f = self.field();
        let (i, g) = reduce_vertex(v, f)?;
        if i >= self.vertex_tables.len() {
            return Ok(None);
        }
        let ginv = g.inverse(f)?;
        let label = self.label_of(&ginv);
        let table = &self.vertex_tables[i];
        let oid = table.orbit_of_label[&label] as usize;
        if !table.orbits[oid].stable {
            return Ok(None);
        }
        let mut idx = 0;
        for (lvl, t) in self.vertex_tables.iter().enumerate() {
            for (o, orbit) in t.orbits.iter().enumerate() {
                if orbit.stable {
                    if lvl == i && o == oid {
                        return Ok(Some(idx));
                    }
                    idx += 1;
                }
            }
        }
        Ok(None)
    }

    /// Decompose a Γ-stable edge as r(e) = ε·γ·e with r(e) ∈ Λ₁.
    pub fn edge_class(&self, e: &OrientedEdge) -> Result<EdgeClass, LevelError> {
        let f = self.field();
        let (i, fwd, g) = reduce_edge(e, f)?;
        if i >= self.edge_tables.len() {
            return Err(LevelError::UnstableCell);
        }
        let ginv = g.inverse(f)?;
        let label = self.label_of(&ginv);
        let table = &self.edge_tables[i];
        let orbit = &table.orbits[table.orbit_of_label[&label] as usize];
        let rep_idx = orbit.lambda_index.ok_or(LevelError::UnstableCell)?;
        let rep = &self.lambda1[rep_idx];
        // Witness: δ = lift(rep)·s·g maps e to ±rep.edge for exactly one s in
        // the standard edge stabilizer (the Γ-stabilizer of e is trivial).
        for s in self.edge_stab(i) {
            let delta = rep.lift.mul(s, f).mul(&g, f);
            if self.level.member(&delta)? {
                let sign = if fwd { 1 } else { -1 };
                debug_assert_eq!(
                    act_edge(&delta, e, f)?,
                    if fwd {
                        rep.edge.clone()
                    } else {
                        rep.edge.rev()
                    }
                );
                return Ok(EdgeClass {
                    rep: rep_idx,
                    sign,
                    gamma: delta,
                });
            }
        }
        Err(LevelError::Inconsistent(
            "no coset witness found for stable edge".into(),
        ))
    }

    /// Nontrivial elements of the Γ-stabilizer of a vertex.
    pub fn vertex_stabilizer_in_gamma(
        &self,
        v: &TreeVertex,
    ) -> Result<Vec<GroupElem>, LevelError> {
        let f = self.field();
        let (i, g) = reduce_vertex(v, f)?;
        let ginv = g.inverse(f)?;
        let stab: Vec<GroupElem> = if i < self.vertex_stabs.len() {
            self.vertex_stabs[i].clone()
        } else {
            std_stabilizer(i, CellKind::Vertex, f)
        };
        let mut out = Vec::new();
        let id = GroupElem::identity(f);
        for s in &stab {
            let sigma = ginv.mul(s, f).mul(&g, f);
            if sigma != id && self.level.member(&sigma)? {
                out.push(sigma);
            }
        }
        Ok(out)
    }

    /// The unique edge at an unstable vertex pointing toward the rational end
    /// b(v): the common fixed neighbor direction of every nontrivial
    /// stabilizer element.
    pub fn cusp_direction(&self, v: &TreeVertex) -> Result<OrientedEdge, LevelError> {
        let f = self.field();
        let stab = self.vertex_stabilizer_in_gamma(v)?;
        if stab.is_empty() {
            return Err(LevelError::StableCell);
        }
        let mut fixed = Vec::new();
        for w in neighbors(v, f) {
            let mut all_fix = true;
            for sigma in &stab {
                if act_vertex(sigma, &w, f)? != w {
                    all_fix = false;
                    break;
                }
            }
            if all_fix {
                fixed.push(w);
            }
        }
        if fixed.len() != 1 {
            // The stabilizer fixes a unique rational end; anything else is a
            // build bug, reported rather than resolved silently.
            return Err(LevelError::Inconsistent(format!(
                "unstable vertex has {} common fixed directions",
                fixed.len()
            )));
        }
        Ok(OrientedEdge::new(v.clone(), fixed.remove(0), f)?)
    }
}

/// Build the quotient data, scanning standard levels 0..=depth. Completeness
/// requires depth ≥ deg m + 1: every stable cell lies over a level < deg m,
/// and the extra levels are verified to carry no stable classes.
pub fn build_quotient(level: &LevelSpec, depth: usize) -> Result<QuotientData, LevelError> {
    let f = level.field().clone();
    let m = level.modulus().clone();
    let deg_m = m.degree_or_panic();
    if depth < deg_m + 1 {
        return Err(LevelError::DepthTooSmall { required: deg_m + 1 });
    }
    let sl2 = Sl2ModM::build(&m, &f, 2_000_000)?;
    let expected = sl2_order(&m, &f);
    if sl2.elements.len() as u128 != expected {
        return Err(LevelError::Inconsistent(format!(
            "SL2(A/m) enumeration found {} elements, expected {}",
            sl2.elements.len(),
            expected
        )));
    }

    // Γ̄ as element indices, then left-coset labels Γ̄\SL₂(A/m).
    let gamma_bar: Vec<u32> = (0..sl2.elements.len() as u32)
        .filter(|&i| level.member_mod(&sl2.elements[i as usize]))
        .collect();
    let ne = sl2.elements.len();
    let mut coset_label: Vec<u32> = alloc::vec![u32::MAX; ne];
    for i in 0..ne as u32 {
        if coset_label[i as usize] != u32::MAX {
            continue;
        }
        let mut members = Vec::with_capacity(gamma_bar.len());
        let mut min_label = u32::MAX;
        for &g in &gamma_bar {
            let prod = mat_mul(&sl2.elements[g as usize], &sl2.elements[i as usize], &m, &f);
            let idx = sl2.index_of(&prod);
            min_label = min_label.min(idx);
            members.push(idx);
        }
        for idx in members {
            coset_label[idx as usize] = min_label;
        }
    }
    let labels_list: Vec<u32> = {
        let mut l: Vec<u32> = coset_label.clone();
        l.sort_unstable();
        l.dedup();
        l
    };
    let index = labels_list.len();
    let q = f.q() as usize;
    if index % (q * q - 1) != 0 {
        return Err(LevelError::Inconsistent(
            "index not divisible by q² − 1".into(),
        ));
    }
    let d = index / (q * q - 1);

    let mut edge_stabs = Vec::with_capacity(depth + 1);
    let mut vertex_stabs = Vec::with_capacity(depth + 1);
    for i in 0..=depth {
        edge_stabs.push(std_stabilizer(i, CellKind::Edge, &f));
        vertex_stabs.push(std_stabilizer(i, CellKind::Vertex, &f));
    }

    let make_table = |stab: &[GroupElem]| -> OrbitTable {
        let id = GroupElem::identity(&f);
        let stab_mod: Vec<(bool, [Poly; 4])> = stab
            .iter()
            .map(|s| (*s == id, reduce_mat(s.num(), &m, &f)))
            .collect();
        let mut orbit_of_label: BTreeMap<u32, u32> = BTreeMap::new();
        let mut orbits: Vec<CellOrbit> = Vec::new();
        for &l in &labels_list {
            if orbit_of_label.contains_key(&l) {
                continue;
            }
            let oid = orbits.len() as u32;
            let mut members = Vec::new();
            let mut rep_label = l;
            for (_, s) in &stab_mod {
                let prod = mat_mul(&sl2.elements[l as usize], s, &m, &f);
                let lbl = coset_label[sl2.index_of(&prod) as usize];
                if !members.contains(&lbl) {
                    members.push(lbl);
                    rep_label = rep_label.min(lbl);
                }
            }
            for lbl in &members {
                orbit_of_label.insert(*lbl, oid);
            }
            // Stability at the representative: g s g^{-1} ∈ Γ for some
            // nontrivial s, tested mod m (Γ is a congruence condition).
            let g_mat = &sl2.elements[rep_label as usize];
            let g_inv = invert_mod(g_mat, &m, &f);
            let mut stable = true;
            for (is_id, s) in &stab_mod {
                if *is_id {
                    continue;
                }
                let conj = mat_mul(&mat_mul(g_mat, s, &m, &f), &g_inv, &m, &f);
                if level.member_mod(&conj) {
                    stable = false;
                    break;
                }
            }
            orbits.push(CellOrbit {
                rep_label,
                stable,
                lambda_index: None,
            });
        }
        OrbitTable {
            orbit_of_label,
            orbits,
        }
    };

    let mut edge_tables: Vec<OrbitTable> = Vec::with_capacity(depth + 1);
    let mut vertex_tables: Vec<OrbitTable> = Vec::with_capacity(depth + 1);
    for i in 0..=depth {
        edge_tables.push(make_table(&edge_stabs[i]));
        vertex_tables.push(make_table(&vertex_stabs[i]));
    }

    // Stable classes live strictly below deg m; the boundary levels verify
    // the stabilization.
    for i in deg_m..=depth {
        if edge_tables[i].orbits.iter().any(|o| o.stable)
            || vertex_tables[i].orbits.iter().any(|o| o.stable)
        {
            return Err(LevelError::Inconsistent(format!(
                "stable class at level {} contradicts the stabilization bound",
                i
            )));
        }
    }

    // Λ₁: representatives of stable oriented-edge orbits mod ±1, all taken
    // forward (opposite orientations lie over distinct vertex types, so no
    // forward class meets a backward one).
    let mut lambda1 = Vec::new();
    for (i, table) in edge_tables.iter_mut().enumerate() {
        for orbit in table.orbits.iter_mut() {
            if orbit.stable {
                let lift = sl2.lift(orbit.rep_label, &f);
                let edge = act_edge(&lift, &OrientedEdge::standard(i as i64), &f)?;
                orbit.lambda_index = Some(lambda1.len());
                lambda1.push(LambdaRep {
                    level_i: i,
                    label: orbit.rep_label,
                    lift,
                    edge,
                });
            }
        }
    }
    let stable_vertex_count = vertex_tables
        .iter()
        .map(|t| t.orbits.iter().filter(|o| o.stable).count())
        .sum::<usize>();

    // Rank identity from the split Steinberg sequence.
    if lambda1.len() != d + stable_vertex_count {
        return Err(LevelError::Inconsistent(format!(
            "|Λ₁| = {} but d + #stable vertices = {} + {}",
            lambda1.len(),
            d,
            stable_vertex_count
        )));
    }

    let mut qd = QuotientData {
        level: level.clone(),
        depth,
        sl2,
        coset_label,
        index,
        d,
        edge_tables,
        vertex_tables,
        lambda1,
        stable_vertex_count,
        steinberg: Vec::new(),
        edge_stabs,
        vertex_stabs,
    };
    qd.steinberg = steinberg_basis(&qd)?;
    Ok(qd)
}

/// Invert a unimodular matrix mod m (adjugate; det ≡ 1 mod m).
fn invert_mod(mat: &[Poly; 4], m: &Poly, f: &FieldSpec) -> [Poly; 4] {
    [
        mat[3].rem(m, f),
        mat[1].neg(f).rem(m, f),
        mat[2].neg(f).rem(m, f),
        mat[0].rem(m, f),
    ]
}

/// The Steinberg basis over ℤ\[Γ\]: transports by Γ\Γ₁(t) coset representatives
/// of the geodesic symbol from ∞ to 0, expanded in Λ₁ coordinates.
pub(crate) fn steinberg_basis(qd: &QuotientData) -> Result<Vec<Vec<SteinbergTerm>>, LevelError> {
    let f = qd.field();
    let level = &qd.level;
    let deg_m = level.modulus().degree_or_panic();

    // Coset representatives of Γ\Γ₁(t): minimal element index per label.
    let mut rep_of_label: BTreeMap<u32, u32> = BTreeMap::new();
    for i in 0..qd.sl2.elements.len() as u32 {
        if level.member_gamma1_t(&qd.sl2.elements[i as usize]) {
            let label = qd.coset_label[i as usize];
            rep_of_label.entry(label).or_insert(i);
        }
    }
    if rep_of_label.len() != qd.d {
        return Err(LevelError::Inconsistent(format!(
            "found {} cosets of Γ in Γ₁(t), expected d = {}",
            rep_of_label.len(),
            qd.d
        )));
    }

    // The standard bi-infinite line w_j = (j, 0); symbol edges flow from the
    // ∞ end (large levels) toward the 0 end.
    let window = deg_m as i64 + 2;
    let mut basis = Vec::with_capacity(qd.d);
    for (_, &rep_idx) in rep_of_label.iter() {
        let alpha = qd.sl2.lift(rep_idx, f);
        let alpha_inv = alpha.inverse(f)?;
        let mut terms = Vec::new();
        let mut boundary: BTreeMap<TreeVertex, i64> = BTreeMap::new();
        for n in -window..=window {
            let line_edge = OrientedEdge::new(
                TreeVertex::standard(n + 1),
                TreeVertex::standard(n),
                f,
            )?;
            let edge = act_edge(&alpha_inv, &line_edge, f)?;
            if !qd.is_stable_edge(&edge)? {
                continue;
            }
            if n.abs() >= window - 1 {
                return Err(LevelError::Inconsistent(
                    "stable line edge at the window boundary".into(),
                ));
            }
            let class = qd.edge_class(&edge)?;
            terms.push(SteinbergTerm {
                sign: class.sign,
                gamma: class.gamma,
                rep: class.rep,
            });
            for (v, s) in [(edge.terminus().clone(), 1i64), (edge.origin().clone(), -1)] {
                if qd.is_stable_vertex(&v)? {
                    *boundary.entry(v).or_insert(0) += s;
                }
            }
        }
        if terms.is_empty() {
            return Err(LevelError::Inconsistent("empty Steinberg symbol".into()));
        }
        if boundary.values().any(|&c| c != 0) {
            return Err(LevelError::Inconsistent(
                "Steinberg symbol has nonzero boundary".into(),
            ));
        }
        basis.push(terms);
    }
    Ok(basis)
}

/// Right coset representatives ξ_i of the double coset Γ·diag(1,Q)·Γ for
/// irreducible Q: {(1 β; 0 Q) : β ∈ R_Q} when Q | m, and additionally
/// ξ_⋄ = η_⋄·diag(Q, 1) with η_⋄ = (R S; m Q), RQ − mS = 1, otherwise.
pub fn hecke_cosets(level: &LevelSpec, q_poly: &Poly) -> Result<Vec<GroupElem>, LevelError> {
    let f = level.field();
    if !q_poly.is_irreducible(f) {
        return Err(LevelError::Validation(
            "Hecke operators are only built at irreducible Q".into(),
        ));
    }
    let deg_q = q_poly.degree_or_panic();
    let mut out = Vec::new();
    let divides = level
        .modulus()
        .divrem(q_poly, f)
        .map(|(_, r)| r.is_zero())
        .unwrap_or(false);
    if !divides {
        let m = level.modulus();
        let (g, u, v) = q_poly.ext_gcd(m, f);
        if !g.is_one(f) {
            return Err(LevelError::Validation(
                "Q must divide m or be coprime to it".into(),
            ));
        }
        // u·Q + v·m = 1 gives R = u, S = −v with RQ − mS = 1.
        let r = u;
        let s = v.neg(f);
        let eta = GroupElem::from_polys([r, s, m.clone(), q_poly.clone()], f);
        debug_assert!(eta.is_sl2a(f));
        out.push(eta.mul(&GroupElem::diagonal(q_poly.clone(), Poly::one(f), f), f));
    }
    for beta in enumerate_below(f, deg_q) {
        out.push(GroupElem::from_polys(
            [Poly::one(f), beta, Poly::zero(), q_poly.clone()],
            f,
        ));
    }
    Ok(out)
}

/// A representative η_λ ∈ SL₂(A) with η_λ ≡ I mod n and
/// η_λ ≡ diag(λ^{-1}, λ) mod t^r, built by a deterministic lowest-degree
/// CRT lift; correctness of the diamond operator is choice-independent.
pub fn eta_lambda(level: &LevelSpec, lambda: FieldElem) -> Result<GroupElem, LevelError> {
    let f = level.field();
    if lambda.is_zero() {
        return Err(LevelError::Validation("λ must be a unit".into()));
    }
    if lambda == f.one() {
        return Ok(GroupElem::identity(f));
    }
    let m = level.modulus();
    let tr = Poly::one(f).shift_up(level.r());
    let n = level.n();
    let lam = Poly::constant(lambda);
    let lam_inv = Poly::constant(f.inv(lambda).expect("unit"));
    let crt = |x: &Poly, y: &Poly| -> Poly {
        if n.is_one(f) {
            return y.rem(&tr, f);
        }
        let (g, u, v) = n.ext_gcd(&tr, f);
        debug_assert!(g.is_one(f));
        // u·n + v·t^r = 1
        let e_n = v.mul(&tr, f); // ≡ 1 mod n, ≡ 0 mod t^r
        let e_t = u.mul(n, f); // ≡ 0 mod n, ≡ 1 mod t^r
        x.mul(&e_n, f).add(&y.mul(&e_t, f), f).rem(m, f)
    };
    let d0 = crt(&Poly::one(f), &lam);
    // Complete the bottom row (m, d0) to det 1: a·d0 − b·m = 1.
    let (g, u, _) = d0.ext_gcd(m, f);
    if !g.is_one(f) {
        return Err(LevelError::Inconsistent("CRT diagonal not a unit mod m".into()));
    }
    let a = u.rem(m, f);
    let b = a
        .mul(&d0, f)
        .sub(&Poly::one(f), f)
        .div_exact(m, f)
        .map_err(|_| LevelError::Inconsistent("lift division failed".into()))?;
    let eta0 = GroupElem::from_polys([a.clone(), b.clone(), m.clone(), d0.clone()], f);
    debug_assert!(eta0.is_sl2a(f));
    // Clear the top-right residue: η = η0·(1 β; 0 1), β = −b·a^{-1} mod m.
    let (ga, ua, _) = a.ext_gcd(m, f);
    if !ga.is_one(f) {
        return Err(LevelError::Inconsistent("lift diagonal not a unit".into()));
    }
    let beta = b.neg(f).mul(&ua, f).rem(m, f);
    let eta = eta0.mul(&GroupElem::translation(beta, f), f);
    // Verify both congruences; a ≡ d0^{-1} mod m makes the mod-n block I and
    // the mod-t^r block diag(λ^{-1}, λ) automatically, but check anyway.
    let check = reduce_mat(eta.num(), m, f);
    let ok_n = n.is_one(f)
        || (check[0].rem(n, f).is_one(f)
            && check[1].rem(n, f).is_zero()
            && check[2].rem(n, f).is_zero()
            && check[3].rem(n, f).is_one(f));
    let ok_t = check[0].rem(&tr, f) == lam_inv.rem(&tr, f)
        && check[1].rem(&tr, f).is_zero()
        && check[2].rem(&tr, f).is_zero()
        && check[3].rem(&tr, f) == lam.rem(&tr, f);
    if !eta.is_sl2a(f) || !ok_n || !ok_t {
        return Err(LevelError::Inconsistent("η_λ congruences failed".into()));
    }
    Ok(eta)
}

/// Scan depth guaranteeing a complete stable-cell classification.
pub fn default_depth(level: &LevelSpec) -> usize {
    level.modulus().degree_or_panic() + 1
}
