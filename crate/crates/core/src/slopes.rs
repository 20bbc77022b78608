//! Slope decompositions d(k, a), the explicit perturbation bounds C₁/C₂/C
//! and D₂/D, elementary-divisor and window checks, Gouvêa–Mazur-type
//! constancy verification, Hida constancy in the level exponent r, seeded
//! perturbation trials, and the family-congruence verifier for eigenvalues
//! in nearby weights.
//!
//! Slope data always flows through Newton polygons of reciprocal
//! characteristic polynomials det(I − UX); eigenvalues are only ever
//! materialized as truncated series in F_q\[\[t\]\]/t^P, never as elements of a
//! field extension. Checks return structured reports: every verified claim
//! is a theorem of the underlying theory, so a FAIL verdict means a build
//! bug, not new mathematics.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::berkowitz::{
    charpoly_reciprocal, charpoly_reciprocal_mod_t, charpoly_reciprocal_trunc,
};
use crate::algebra::field::FieldSpec;
use crate::algebra::matrix::{FieldMatrix, PolyMatrix, TruncMatrix};
use crate::algebra::newton::newton_prefix_below;
use crate::algebra::poly::Poly;
use crate::algebra::rational::Rational;
use crate::algebra::smith::elementary_divisors;
use crate::algebra::trunc::{TruncSeries, TruncVal};
use crate::algebra::xpoly::newton_polygon;
use crate::algebra::AlgebraError;
use crate::hecke::{
    chi_part_basis, chi_part_matrix, chi_projector, hecke_matrix, ordinary_eigenvector, u_matrix,
    weight_reduction_matrix, HeckeCache, HeckeError,
};
use crate::level::{build_quotient, default_depth, LevelSpec, Theta};
use crate::rng::SplitMix64;

/// Errors from the slopes layer.
#[derive(Clone, Debug)]
pub enum SlopeError {
    Hecke(HeckeError),
    Algebra(AlgebraError),
    Level(crate::level::LevelError),
    Hypothesis(String),
    Precision(String),
    Invalid(String),
}

impl From<HeckeError> for SlopeError {
    fn from(e: HeckeError) -> Self {
        SlopeError::Hecke(e)
    }
}

impl From<AlgebraError> for SlopeError {
    fn from(e: AlgebraError) -> Self {
        SlopeError::Algebra(e)
    }
}

impl From<crate::level::LevelError> for SlopeError {
    fn from(e: crate::level::LevelError) -> Self {
        SlopeError::Level(e)
    }
}

impl core::fmt::Display for SlopeError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SlopeError::Hecke(e) => write!(f, "{}", e),
            SlopeError::Algebra(e) => write!(f, "{}", e),
            SlopeError::Level(e) => write!(f, "{}", e),
            SlopeError::Hypothesis(s) => write!(f, "hypothesis not satisfied: {}", s),
            SlopeError::Precision(s) => write!(f, "precision shortfall: {}", s),
            SlopeError::Invalid(s) => write!(f, "{}", s),
        }
    }
}

/// One verified claim inside a report.
#[derive(Clone, Debug)]
pub struct ReportItem {
    pub claim: String,
    pub computed: String,
    pub bound: String,
    pub pass: bool,
}

/// A structured verification report.
#[derive(Clone, Debug)]
pub struct Report {
    pub name: String,
    pub params: Vec<(String, String)>,
    pub items: Vec<ReportItem>,
}

impl Report {
    pub fn new(name: &str) -> Report {
        Report {
            name: name.to_string(),
            params: Vec::new(),
            items: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl core::fmt::Display) {
        self.params.push((key.to_string(), format!("{}", value)));
    }

    pub fn item(&mut self, claim: impl Into<String>, computed: impl Into<String>, bound: impl Into<String>, pass: bool) {
        self.items.push(ReportItem {
            claim: claim.into(),
            computed: computed.into(),
            bound: bound.into(),
            pass,
        });
    }

    pub fn pass(&self) -> bool {
        self.items.iter().all(|i| i.pass)
    }
}

/// Slope multiplicities of the U-operator in one weight (and χ-part):
/// entries (a, d(k, a)) with strictly increasing slopes. `deficiency` counts
/// the formal "slope ∞" eigenvalues (dimension minus X-degree of the
/// characteristic polynomial). For a prefix table only slopes below `bound`
/// are listed and the deficiency is not meaningful.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeTable {
    pub k: usize,
    pub chi: Option<usize>,
    pub entries: Vec<(Rational, usize)>,
    pub deficiency: usize,
    pub complete: bool,
    pub bound: Option<Rational>,
}

impl SlopeTable {
    pub fn multiplicity(&self, a: Rational) -> usize {
        self.entries
            .iter()
            .find(|&&(s, _)| s == a)
            .map(|&(_, m)| m)
            .unwrap_or(0)
    }
}

/// The matrix whose slopes are requested: U on 𝒱_k or on its χ-part.
fn u_operator(
    cache: &mut HeckeCache,
    k: usize,
    chi: Option<usize>,
) -> Result<PolyMatrix, SlopeError> {
    let u = u_matrix(cache, k)?;
    match chi {
        None => Ok(u),
        Some(c) => Ok(chi_part_matrix(cache, k, c, &u)?),
    }
}

/// Complete slope table from the exact Newton polygon.
pub fn slope_decomposition(
    cache: &mut HeckeCache,
    k: usize,
    chi: Option<usize>,
) -> Result<SlopeTable, SlopeError> {
    let f = cache.qd.field().clone();
    let u = u_operator(cache, k, chi)?;
    let dim = u.rows();
    if dim == 0 {
        return Ok(SlopeTable {
            k,
            chi,
            entries: Vec::new(),
            deficiency: 0,
            complete: true,
            bound: None,
        });
    }
    let cp = charpoly_reciprocal(&u, &f)?;
    let np = newton_polygon(&cp, &f)?;
    Ok(SlopeTable {
        k,
        chi,
        entries: np.segments().to_vec(),
        deficiency: dim - cp.degree().unwrap_or(0),
        complete: true,
        bound: None,
    })
}

/// Prefix slope table: the entries with slope < bound, computed over
/// truncated series at a precision that certifies the prefix.
pub fn slope_table_below(
    cache: &mut HeckeCache,
    k: usize,
    chi: Option<usize>,
    bound: Rational,
) -> Result<SlopeTable, SlopeError> {
    let f = cache.qd.field().clone();
    let u = u_operator(cache, k, chi)?;
    let dim = u.rows();
    if dim == 0 {
        return Ok(SlopeTable {
            k,
            chi,
            entries: Vec::new(),
            deficiency: 0,
            complete: true,
            bound: Some(bound),
        });
    }
    // cap > bound·dim certifies every sub-bound hull segment.
    let cap = ((bound.num().max(0) as usize * dim) / bound.den() as usize) + 2;
    let um = TruncMatrix::from_poly_matrix(&u, cap);
    let coeffs = charpoly_reciprocal_trunc(&um, &f)?;
    let points: Vec<TruncVal> = coeffs.iter().map(|c| c.valuation()).collect();
    let entries = newton_prefix_below(&points, bound)?;
    Ok(SlopeTable {
        k,
        chi,
        entries,
        deficiency: 0,
        complete: false,
        bound: Some(bound),
    })
}

/// d(k, 0) (or d(k, χ, 0)) from the mod-t characteristic polynomial.
pub fn ordinary_dimension(
    cache: &mut HeckeCache,
    k: usize,
    chi: Option<usize>,
) -> Result<usize, SlopeError> {
    let f = cache.qd.field().clone();
    let u = u_operator(cache, k, chi)?;
    if u.rows() == 0 {
        return Ok(0);
    }
    let cp = charpoly_reciprocal_mod_t(&FieldMatrix::from_poly_matrix_mod_t(&u), &f)?;
    Ok(cp.iter().rposition(|c| !c.is_zero()).unwrap_or(0))
}

/// Parameters (p, n, d₀, ε₀) of the perturbation bounds, ε₀ ≤ d₀.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundParams {
    pub p: u64,
    pub n: u32,
    pub d0: u64,
    pub eps0: u64,
}

impl BoundParams {
    pub fn new(p: u64, n: u32, d0: u64, eps0: u64) -> Result<BoundParams, SlopeError> {
        if eps0 > d0 {
            return Err(SlopeError::Invalid("ε₀ must not exceed d₀".into()));
        }
        if n == 0 || d0 == 0 {
            return Err(SlopeError::Invalid("n and d₀ must be positive".into()));
        }
        // C₂ minimizes over a range of length d₀·pⁿ; keep it enumerable.
        if p.checked_pow(n).map_or(true, |pn| d0.saturating_mul(pn) > 100_000_000) {
            return Err(SlopeError::Invalid(
                "bound parameters too large to enumerate".into(),
            ));
        }
        Ok(BoundParams { p, n, d0, eps0 })
    }

    pub fn pn(&self) -> u64 {
        self.p.pow(self.n)
    }
}

/// C₁(n, d₀, ε₀) = pⁿ(4 + d₀pⁿ − d₀)/(4 + 2d₀pⁿ − 2ε₀).
pub fn bound_c1(bp: &BoundParams) -> Rational {
    let pn = bp.pn() as i64;
    let d0 = bp.d0 as i64;
    let e0 = bp.eps0 as i64;
    Rational::new(pn * (4 + d0 * pn - d0), 4 + 2 * d0 * pn - 2 * e0)
}

/// C₂(n, d₀, ε₀) = min over ε₀ < l ≤ 1 + d₀pⁿ of
/// (2pⁿ + d₀q_l(q_l − 1) + 2q_l(r_l + 1)) / (2(l − ε₀)),
/// with q₁ = r₁ = 0 and, for l ≥ 2, q_l = ⌊(l−2)/d₀⌋ and r_l = l − 2 − d₀q_l.
pub fn bound_c2(bp: &BoundParams) -> Rational {
    let pn = bp.pn() as i64;
    let d0 = bp.d0 as i64;
    let e0 = bp.eps0 as i64;
    let mut best: Option<Rational> = None;
    for l in (e0 + 1)..=(1 + d0 * pn) {
        let (ql, rl) = if l == 1 {
            (0, 0)
        } else {
            let ql = (l - 2) / d0;
            (ql, l - 2 - d0 * ql)
        };
        let val = Rational::new(2 * pn + d0 * ql * (ql - 1) + 2 * ql * (rl + 1), 2 * (l - e0));
        best = Some(match best {
            None => val,
            Some(b) => b.min(val),
        });
    }
    best.expect("nonempty range since ε₀ ≤ d₀ < 1 + d₀pⁿ")
}

/// C = min(C₁, C₂) ∈ (0, pⁿ).
pub fn bound_c(bp: &BoundParams) -> Rational {
    bound_c1(bp).min(bound_c2(bp))
}

/// The Gouvêa–Mazur-variant side conditions: when p = 2, n ≥ 3 or
/// d₀ − ε₀ ≤ 1; and 2pⁿ > n(d₀n + 2 + d₀ − 2ε₀).
pub fn gm_condition(bp: &BoundParams) -> bool {
    let clause1 = bp.p != 2 || bp.n >= 3 || bp.d0 - bp.eps0 <= 1;
    let n = bp.n as i64;
    let d0 = bp.d0 as i64;
    let e0 = bp.eps0 as i64;
    let clause2 = 2 * bp.pn() as i64 > n * (d0 * n + 2 + d0 - 2 * e0);
    clause1 && clause2
}

/// Exact symbolic value scale·√radicand + offset (scale > 0), kept free of
/// floating point; comparisons go through sign analysis and squaring.
#[derive(Clone, Copy, Debug)]
pub struct SqrtBound {
    pub radicand: u64,
    pub scale: Rational,
    pub offset: Rational,
}

impl SqrtBound {
    /// Normal form: pull the largest square factor of the radicand into the
    /// scale, and collapse perfect squares into a plain rational (radicand 1).
    pub fn normalize(&self) -> SqrtBound {
        let mut rad = self.radicand;
        let mut scale = self.scale;
        let mut s = 2u64;
        while s * s <= rad {
            while rad % (s * s) == 0 {
                rad /= s * s;
                scale = scale.mul(Rational::integer(s as i64));
            }
            s += 1;
        }
        if rad == 1 {
            SqrtBound {
                radicand: 1,
                scale: Rational::zero(),
                offset: self.offset.add(scale),
            }
        } else {
            SqrtBound {
                radicand: rad,
                scale,
                offset: self.offset,
            }
        }
    }

    /// Compare a rational a against this value, exactly.
    pub fn compare_rational(&self, a: Rational) -> core::cmp::Ordering {
        let norm = self.normalize();
        if norm.radicand == 1 || norm.scale == Rational::zero() {
            return a.cmp(&norm.offset);
        }
        // a vs scale·√r + offset  ⟺  (a − offset)/scale vs √r, scale > 0.
        let y = a.sub(norm.offset).mul(invert(norm.scale));
        if y < Rational::zero() {
            return core::cmp::Ordering::Less;
        }
        // y ≥ 0: compare y² with r exactly.
        let y2 = y.mul(y);
        y2.cmp(&Rational::integer(norm.radicand as i64))
    }

    /// Structural equality after normalization.
    pub fn equals(&self, other: &SqrtBound) -> bool {
        let a = self.normalize();
        let b = other.normalize();
        a.radicand == b.radicand && a.scale == b.scale && a.offset == b.offset
    }
}

fn invert(r: Rational) -> Rational {
    Rational::new(r.den(), r.num())
}

/// D₂(n, d, ε) = (√(2dpⁿ + (d − ε + 1)(2d − ε − 1)) − 3d/2 + ε)/d.
pub fn bound_d2(bp: &BoundParams) -> SqrtBound {
    let pn = bp.pn() as i64;
    let d = bp.d0 as i64;
    let e = bp.eps0 as i64;
    let radicand = 2 * d * pn + (d - e + 1) * (2 * d - e - 1);
    SqrtBound {
        radicand: radicand as u64,
        scale: Rational::new(1, d),
        offset: Rational::new(2 * e - 3 * d, 2 * d),
    }
}

/// D(n, d, ε) = min{C₁, D₂}, kept exact: either the rational C₁ or the surd.
#[derive(Clone, Copy, Debug)]
pub enum DBound {
    Rat(Rational),
    Surd(SqrtBound),
}

impl DBound {
    /// Order a rational against the bound value.
    pub fn compare_rational(&self, a: Rational) -> core::cmp::Ordering {
        match self {
            DBound::Rat(r) => a.cmp(r),
            DBound::Surd(s) => s.compare_rational(a),
        }
    }

    /// a < D?
    pub fn admits(&self, a: Rational) -> bool {
        match self {
            DBound::Rat(r) => a < *r,
            DBound::Surd(s) => s.compare_rational(a) == core::cmp::Ordering::Less,
        }
    }
}

pub fn bound_d(bp: &BoundParams) -> DBound {
    let c1 = bound_c1(bp);
    let d2 = bound_d2(bp);
    // min{C₁, D₂}: compare the surd against the rational exactly.
    match d2.compare_rational(c1) {
        // compare_rational(c1) orders c1 vs d2
        core::cmp::Ordering::Less | core::cmp::Ordering::Equal => DBound::Rat(c1),
        core::cmp::Ordering::Greater => DBound::Surd(d2),
    }
}

/// Elementary-divisor floor: sᵢ ≥ ⌊(i−1)/d⌋ for the matrix of U on 𝒱_k
/// (Kedlaya comparison applied to the t-power column grading).
pub fn check_eldiv_bound(m: &PolyMatrix, f: &FieldSpec, d: usize) -> Report {
    let mut report = Report::new("eldiv");
    report.param("dim", m.rows());
    report.param("d", d);
    let dim = m.rows();
    if dim == 0 {
        return report;
    }
    let max_floor = (dim - 1) / d;
    let cap = max_floor + 2;
    let divisors = elementary_divisors(m, f, cap);
    for (idx, s) in divisors.iter().enumerate() {
        let floor = idx / d; // (i − 1)/d with i = idx + 1
        let (computed, pass) = match s {
            TruncVal::Exact(v) => (format!("{}", v), *v >= floor),
            TruncVal::AtLeast(c) => (format!(">={}", c), *c >= floor),
        };
        report.item(
            format!("s_{} >= {}", idx + 1, floor),
            computed,
            format!("{}", floor),
            pass,
        );
    }
    report
}

/// Window check: with pⁿ = p^n, the representing matrices satisfy
/// U^{(k+pⁿ)} ≡ (0 *; 0 U^{(k)}) mod t^{pⁿ} blockwise in the ordered bases
/// (the blocks split at the first d·pⁿ coordinates, which the weight
/// reduction kills), and the upper-left block is divisible by t^{k−1}.
pub fn check_window(cache: &mut HeckeCache, k: usize, n: u32) -> Result<Report, SlopeError> {
    let f = cache.qd.field().clone();
    let d = cache.qd.d;
    let p = f.p() as usize;
    let pn = p.pow(n);
    let mut report = Report::new("window");
    report.param("k", k);
    report.param("n", n);
    report.param("pn", pn);
    let u_hi = u_matrix(cache, k + pn)?;
    let u_lo = u_matrix(cache, k)?;
    let split = d * pn;
    let n_hi = u_hi.rows();
    let lower_left = u_hi.block(split, 0, n_hi - split, split);
    let lower_right = u_hi.block(split, split, n_hi - split, n_hi - split);
    let upper_left = u_hi.block(0, 0, split, split);
    report.item(
        "lower-left ≡ 0 mod t^pn",
        format!("{}", lower_left.divisible_by_tpow(pn as u64)),
        "true".to_string(),
        lower_left.divisible_by_tpow(pn as u64),
    );
    let diff = lower_right.sub(&u_lo, &f);
    report.item(
        "lower-right ≡ U^(k) mod t^pn",
        format!("{}", diff.divisible_by_tpow(pn as u64)),
        "true".to_string(),
        diff.divisible_by_tpow(pn as u64),
    );
    report.item(
        "upper-left divisible by t^(k-1)",
        format!("{}", upper_left.divisible_by_tpow((k - 1) as u64)),
        "true".to_string(),
        upper_left.divisible_by_tpow((k - 1) as u64),
    );
    // Alignment with the weight reduction: ρ·U^{(k+pⁿ)} ≡ U^{(k)}·ρ mod t^{pⁿ}.
    let rho = weight_reduction_matrix(k, pn, d, &f);
    let lhs = rho.mul(&u_hi, &f).reduce_mod_tpow(pn);
    let rhs = u_lo.mul(&rho, &f).reduce_mod_tpow(pn);
    report.item(
        "ρ∘U^(k+pn) ≡ U^(k)∘ρ mod t^pn",
        format!("{}", lhs == rhs),
        "true".to_string(),
        lhs == rhs,
    );
    Ok(report)
}

/// χ-part window check, with k′ = k + pⁿ(q^d − 1): in the mixed basis made
/// of projector images ε_χ(v_{i,j}) (j < pⁿ(q^d−1)) and lifts through the
/// weight reduction of a χ-basis at weight k, the matrix of U has the same
/// block congruences as the plain window.
pub fn check_window_chi(
    cache: &mut HeckeCache,
    k: usize,
    n: u32,
    chi: usize,
) -> Result<Report, SlopeError> {
    let f = cache.qd.field().clone();
    let d = cache.qd.d;
    let p = f.p() as usize;
    let pn = p.pow(n);
    let m_ord = (f.q() as usize).pow(d as u32) - 1;
    let shift = pn * m_ord;
    let k_hi = k + shift;
    let mut report = Report::new("window-chi");
    report.param("k", k);
    report.param("n", n);
    report.param("chi", chi);
    report.param("k_hi", k_hi);

    let u_hi = u_matrix(cache, k_hi)?;
    let u_lo = u_matrix(cache, k)?;
    let basis_lo = chi_part_basis(cache, k, chi)?;
    let u_lo_chi = chi_part_matrix(cache, k, chi, &u_lo)?;
    let proj_hi = chi_projector(cache, k_hi, chi)?;

    // Σ-selection: a maximal mod-t-independent set among the projector images
    // of the low-slot basis vectors v_{i,j}, j < shift.
    let n_hi = u_hi.rows();
    let mut sigma_cols: Vec<usize> = Vec::new();
    let mut echelon: Vec<Vec<crate::algebra::field::FieldElem>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for col in 0..d * shift {
        let mut v: Vec<crate::algebra::field::FieldElem> =
            (0..n_hi).map(|r| proj_hi.at(r, col).coeff(0)).collect();
        for (row, &pc) in echelon.iter().zip(pivots.iter()) {
            if !v[pc].is_zero() {
                let factor = v[pc];
                for j in 0..n_hi {
                    v[j] = f.sub(v[j], f.mul(factor, row[j]));
                }
            }
        }
        if let Some(pc) = v.iter().position(|x| !x.is_zero()) {
            let inv = f.inv(v[pc]).expect("unit");
            for x in v.iter_mut() {
                *x = f.mul(*x, inv);
            }
            echelon.push(v);
            pivots.push(pc);
            sigma_cols.push(col);
        }
    }

    // Lifted weight-k χ-basis: w_β = ε_χ(shift-section of u_β).
    let c_lo = basis_lo.cols();
    let mut combined = PolyMatrix::zero(n_hi, sigma_cols.len() + c_lo);
    for (j, &col) in sigma_cols.iter().enumerate() {
        for r in 0..n_hi {
            *combined.at_mut(r, j) = proj_hi.at(r, col).clone();
        }
    }
    for b in 0..c_lo {
        // section: slot (i, j) ↦ slot (i, j + shift)
        let mut lifted = vec![Poly::zero(); n_hi];
        for j in 0..k - 1 {
            for i in 0..d {
                lifted[(j + shift) * d + i] = basis_lo.at(j * d + i, b).clone();
            }
        }
        for r in 0..n_hi {
            let mut acc = Poly::zero();
            for c2 in 0..n_hi {
                if !lifted[c2].is_zero() {
                    acc = acc.add(&proj_hi.at(r, c2).mul(&lifted[c2], &f), &f);
                }
            }
            *combined.at_mut(r, sigma_cols.len() + b) = acc;
        }
    }

    // The combined columns must form a basis of the χ-part lattice at k_hi.
    let basis_hi = chi_part_basis(cache, k_hi, chi)?;
    if basis_hi.cols() != combined.cols() {
        return Err(SlopeError::Invalid(format!(
            "χ-part dimension mismatch: {} vs {}",
            basis_hi.cols(),
            combined.cols()
        )));
    }
    let x = crate::algebra::matrix::solve_exact(&basis_hi, &combined, &f)?;
    let xp = crate::algebra::matrix::ratfn_to_poly_matrix(&x, &f)
        .map_err(|_| SlopeError::Invalid("combined basis not integral over χ-part".into()))?;
    let det = xp.det_bareiss(&f)?;
    let unit = det.is_unit();
    report.item(
        "mixed basis spans the χ-part lattice",
        format!("det unit: {}", unit),
        "unit".to_string(),
        unit,
    );
    if !unit {
        return Ok(report);
    }

    // U in the mixed basis.
    let target = u_hi.mul(&combined, &f);
    let y = crate::algebra::matrix::solve_exact(&combined, &target, &f)?;
    let u_mixed = crate::algebra::matrix::ratfn_to_poly_matrix(&y, &f)
        .map_err(|_| SlopeError::Invalid("U not integral in mixed basis".into()))?;
    let split = sigma_cols.len();
    let nm = u_mixed.rows();
    let lower_left = u_mixed.block(split, 0, nm - split, split);
    let lower_right = u_mixed.block(split, split, nm - split, nm - split);
    let upper_left = u_mixed.block(0, 0, split, split);
    report.item(
        "lower-left ≡ 0 mod t^pn",
        format!("{}", lower_left.divisible_by_tpow(pn as u64)),
        "true".to_string(),
        lower_left.divisible_by_tpow(pn as u64),
    );
    let diff = lower_right.sub(&u_lo_chi, &f);
    report.item(
        "lower-right ≡ U_χ^(k) mod t^pn",
        format!("{}", diff.divisible_by_tpow(pn as u64)),
        "true".to_string(),
        diff.divisible_by_tpow(pn as u64),
    );
    report.item(
        "upper-left divisible by t^(k-1)",
        format!("{}", upper_left.divisible_by_tpow((k - 1) as u64)),
        "true".to_string(),
        upper_left.divisible_by_tpow((k - 1) as u64),
    );
    Ok(report)
}

/// Slope constancy d(k, a) = d(k′, a) for a < min(C(n, d, ε), k − 1, a_max),
/// requiring k′ ≥ k and k′ ≡ k mod pⁿ (mod pⁿ(q^d − 1) for a χ-part).
pub fn check_constancy(
    cache: &mut HeckeCache,
    k: usize,
    k_prime: usize,
    n: u32,
    a_max: Option<Rational>,
    chi: Option<usize>,
) -> Result<Report, SlopeError> {
    let f = cache.qd.field().clone();
    let d = cache.qd.d;
    let p = f.p() as u64;
    let pn = p.pow(n) as usize;
    let modulus = match chi {
        None => pn,
        Some(_) => pn * ((f.q() as usize).pow(d as u32) - 1),
    };
    if k_prime < k || (k_prime - k) % modulus != 0 {
        return Err(SlopeError::Hypothesis(format!(
            "need k' ≥ k and k' ≡ k mod {}",
            modulus
        )));
    }
    let eps = ordinary_dimension(cache, k, chi)? as u64;
    let bp = BoundParams::new(p, n, d as u64, eps)?;
    let c = bound_c(&bp);
    let mut bound = c.min(Rational::integer(k as i64 - 1));
    if let Some(am) = a_max {
        bound = bound.min(am);
    }
    let mut report = Report::new("constancy");
    report.param("k", k);
    report.param("k_prime", k_prime);
    report.param("n", n);
    if let Some(c) = chi {
        report.param("chi", c);
    }
    report.param("epsilon", eps);
    report.param("C", c);
    report.param("bound", bound);
    if bound <= Rational::zero() {
        report.item("vacuous window", "bound ≤ 0", "-", true);
        return Ok(report);
    }
    let t1 = slope_table_below(cache, k, chi, bound)?;
    let t2 = slope_table_below(cache, k_prime, chi, bound)?;
    let mut slopes: Vec<Rational> = t1
        .entries
        .iter()
        .chain(t2.entries.iter())
        .map(|&(a, _)| a)
        .collect();
    slopes.sort();
    slopes.dedup();
    if slopes.is_empty() {
        report.item("no slopes below bound", "-", "-", true);
    }
    for a in slopes {
        let m1 = t1.multiplicity(a);
        let m2 = t2.multiplicity(a);
        report.item(
            format!("d({}, {}) = d({}, {})", k, a, k_prime, a),
            format!("{} vs {}", m1, m2),
            "equal".to_string(),
            m1 == m2,
        );
    }
    Ok(report)
}

/// Hida constancy: d(Γ₀ᵖ(t^r), k, 0) is independent of r, exactly one
/// character carries the ordinary part (with multiplicity 1), and the
/// slope-zero Hecke eigenvalues are 1.
pub fn hida_check(
    field: &FieldSpec,
    n_poly: &Poly,
    k: usize,
    r1: usize,
    r2: usize,
    prec: usize,
) -> Result<Report, SlopeError> {
    let mut report = Report::new("hida");
    report.param("k", k);
    report.param("r", r1);
    report.param("r_prime", r2);
    let mut dims = Vec::new();
    for r in [r1, r2] {
        let level = LevelSpec::new(field.clone(), n_poly.clone(), r, Theta::Full)?;
        let qd = build_quotient(&level, default_depth(&level))?;
        let mut cache = HeckeCache::new(&qd);
        let d0 = ordinary_dimension(&mut cache, k, None)?;
        dims.push(d0);
        // unique-χ ordinary statement
        let qm1 = (field.q() - 1) as usize;
        let mut nonzero = Vec::new();
        for chi in 0..qm1 {
            let dc = ordinary_dimension(&mut cache, k, Some(chi))?;
            if dc != 0 {
                nonzero.push((chi, dc));
            }
        }
        report.item(
            format!("unique ordinary χ at r = {}", r),
            format!("{:?}", nonzero),
            "one χ with multiplicity 1".to_string(),
            nonzero.len() == 1 && nonzero[0].1 == 1,
        );
        // ordinary eigenvalues are 1: T_Q v ≡ v  for Q ∈ {t, 1 + t}
        let u = u_matrix(&mut cache, k)?;
        let (v, lam) = ordinary_eigenvector(&u, field, prec)?;
        let one = TruncSeries::one(prec, field);
        report.item(
            format!("slope-zero U-eigenvalue is 1 at r = {}", r),
            format!("match: {}", lam == one),
            "1".to_string(),
            lam == one,
        );
        for q_poly in [Poly::t(field), Poly::from_ints(field, &[1, 1])] {
            let tq = hecke_matrix(&mut cache, k, &q_poly)?;
            let tv = TruncMatrix::from_poly_matrix(&tq, prec).apply(&v, field);
            let fixes = tv == v;
            report.item(
                format!("T_Q v ≡ v at r = {} (Q = {})", r, q_poly.render()),
                format!("{}", fixes),
                "true".to_string(),
                fixes,
            );
        }
    }
    report.item(
        format!("d(k,0) independent of r: {} vs {}", dims[0], dims[1]),
        format!("{} vs {}", dims[0], dims[1]),
        "equal".to_string(),
        dims[0] == dims[1],
    );
    Ok(report)
}

/// One family of seeded perturbation trials: B = R·diag(t^{⌊(i−1)/d₀⌋}) with
/// R constant-term invertible (so the elementary-divisor floor holds by the
/// product comparison), B′ = B + t^{pⁿ}·E, and the slope tables below
/// C(n, d₀, ε₀) must agree — below n as well when the GM-variant side
/// conditions hold. Failures are falsifications of proved statements.
pub fn perturb_trial(
    f: &FieldSpec,
    seed: u64,
    dim: usize,
    d0: u64,
    n: u32,
    trials: usize,
) -> Result<Report, SlopeError> {
    let mut report = Report::new("perturb");
    report.param("seed", seed);
    report.param("dim", dim);
    report.param("d0", d0);
    report.param("n", n);
    report.param("trials", trials);
    let mut rng = SplitMix64::new(seed);
    let pn = (f.p() as u64).pow(n) as usize;
    let mut failures = 0usize;
    for trial in 0..trials {
        let mut trial_rng = rng.fork(trial as u64);
        let b = random_floor_matrix(f, &mut trial_rng, dim, d0);
        // measured ordinary dimension ε₀ = d(B, 0)
        let cp0 = charpoly_reciprocal_mod_t(&FieldMatrix::from_poly_matrix_mod_t(&b), f)?;
        let eps0 = cp0.iter().rposition(|c| !c.is_zero()).unwrap_or(0) as u64;
        let bp = BoundParams::new(f.p() as u64, n, d0, eps0.min(d0))?;
        let c = bound_c(&bp);
        // verify the elementary-divisor floor the construction guarantees
        let cap = (dim - 1) / d0 as usize + 2;
        for (idx, s) in elementary_divisors(&b, f, cap).iter().enumerate() {
            let floor = idx / d0 as usize;
            let ok = match s {
                TruncVal::Exact(v) => *v >= floor,
                TruncVal::AtLeast(c2) => *c2 >= floor,
            };
            if !ok {
                return Err(SlopeError::Invalid(
                    "trial matrix violates its designed divisor floor".into(),
                ));
            }
        }
        // perturb
        let mut e = PolyMatrix::zero(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                *e.at_mut(i, j) = crate::slopes::random_poly_below(f, &mut trial_rng, 3);
            }
        }
        let b_prime = b.add(&e.scale(&Poly::one(f).shift_up(pn), f), f);
        let ok_c = tables_agree_below(f, &b, &b_prime, c)?;
        let ok_gm = if gm_condition(&bp) {
            tables_agree_up_to(f, &b, &b_prime, Rational::integer(n as i64))?
        } else {
            true
        };
        if !(ok_c && ok_gm) {
            failures += 1;
        }
    }
    report.item(
        "slope tables agree below the bound on every trial",
        format!("{} failures", failures),
        "0".to_string(),
        failures == 0,
    );
    Ok(report)
}

pub(crate) fn random_poly_below(f: &FieldSpec, rng: &mut SplitMix64, max_deg: usize) -> Poly {
    let deg = rng.below(max_deg as u64 + 1) as usize;
    Poly::from_coeffs(
        (0..=deg)
            .map(|_| f.from_int(rng.below(f.q()) as i64))
            .collect(),
    )
}

/// R·diag(t^{⌊(i−1)/d₀⌋}) with R constant-term invertible.
pub(crate) fn random_floor_matrix(
    f: &FieldSpec,
    rng: &mut SplitMix64,
    dim: usize,
    d0: u64,
) -> PolyMatrix {
    loop {
        let r = PolyMatrix::from_fn(dim, dim, |_, _| random_poly_below(f, rng, 2));
        let r0 = FieldMatrix::from_poly_matrix_mod_t(&r);
        // invertible mod t ⟺ the mod-t reciprocal charpoly has full degree
        let cp = charpoly_reciprocal_mod_t(&r0, f).expect("square");
        if cp.iter().rposition(|c| !c.is_zero()) != Some(dim) {
            continue;
        }
        let mut m = r;
        for j in 0..dim {
            let power = j / d0 as usize;
            for i in 0..dim {
                *m.at_mut(i, j) = m.at(i, j).shift_up(power);
            }
        }
        return m;
    }
}

fn trunc_table_below(
    f: &FieldSpec,
    m: &PolyMatrix,
    bound: Rational,
) -> Result<Vec<(Rational, usize)>, SlopeError> {
    let dim = m.rows();
    let cap = ((bound.num().max(0) as usize * dim) / bound.den() as usize) + 2;
    let coeffs = charpoly_reciprocal_trunc(&TruncMatrix::from_poly_matrix(m, cap), f)?;
    let points: Vec<TruncVal> = coeffs.iter().map(|c| c.valuation()).collect();
    Ok(newton_prefix_below(&points, bound)?)
}

fn tables_agree_below(
    f: &FieldSpec,
    a: &PolyMatrix,
    b: &PolyMatrix,
    bound: Rational,
) -> Result<bool, SlopeError> {
    Ok(trunc_table_below(f, a, bound)? == trunc_table_below(f, b, bound)?)
}

/// Agreement of slopes a ≤ n (inclusive).
fn tables_agree_up_to(
    f: &FieldSpec,
    a: &PolyMatrix,
    b: &PolyMatrix,
    n: Rational,
) -> Result<bool, SlopeError> {
    let bound = n.add(Rational::new(1, 2));
    let ta: Vec<_> = trunc_table_below(f, a, bound)?
        .into_iter()
        .filter(|&(s, _)| s <= n)
        .collect();
    let tb: Vec<_> = trunc_table_below(f, b, bound)?
        .into_iter()
        .filter(|&(s, _)| s <= n)
        .collect();
    Ok(ta == tb)
}

/// Truncated-series eigenvalue of U on the one-dimensional slope-a block,
/// by a Hensel/Newton iteration on the reversed characteristic polynomial:
/// λ = t^a·y with y the unique unit root of G(t^a·y)/t^{v*} mod t.
fn slope_block_u_eigenvalue(
    f: &FieldSpec,
    u: &PolyMatrix,
    a: usize,
    prec: usize,
) -> Result<TruncSeries, SlopeError> {
    let um = TruncMatrix::from_poly_matrix(u, prec);
    let recip = charpoly_reciprocal_trunc(&um, f)?;
    // reversed: G(X) = X^n·P(1/X) is monic with the eigenvalues as roots.
    let g: Vec<TruncSeries> = recip.into_iter().rev().collect();
    // H(y) = G(t^a y): coefficient l is g_l·t^{a·l}.
    let h: Vec<TruncSeries> = g
        .iter()
        .enumerate()
        .map(|(l, c)| c.shift_up(a * l))
        .collect();
    let vstar = h
        .iter()
        .filter_map(|c| c.valuation().exact())
        .min()
        .ok_or_else(|| SlopeError::Precision("all coefficients saturated".into()))?;
    let work = prec - vstar;
    if work < 8 {
        return Err(SlopeError::Precision("insufficient working precision".into()));
    }
    // Drop the common t^{vstar}: coefficient i becomes coefficient i + vstar.
    let h: Vec<TruncSeries> = h
        .iter()
        .map(|c| {
            let coeffs: Vec<crate::algebra::field::FieldElem> =
                (0..work).map(|i| c.coeff(i + vstar)).collect();
            TruncSeries::from_poly(&Poly::from_coeffs(coeffs), work)
        })
        .collect();
    // Unit root of H̄ mod t, required simple.
    let eval_mod_t = |y: crate::algebra::field::FieldElem| {
        let mut acc = f.zero();
        let mut pow = f.one();
        for c in &h {
            acc = f.add(acc, f.mul(c.coeff(0), pow));
            pow = f.mul(pow, y);
        }
        acc
    };
    let mut roots = Vec::new();
    for y in f.units() {
        if eval_mod_t(y).is_zero() {
            roots.push(y);
        }
    }
    if roots.len() != 1 {
        return Err(SlopeError::Hypothesis(format!(
            "slope-{} block is not one-dimensional over the residue field ({} unit roots)",
            a,
            roots.len()
        )));
    }
    // Newton iteration y ← y − H(y)/H'(y) in F_q[[t]]/t^work.
    let eval = |y: &TruncSeries| -> TruncSeries {
        let mut acc = TruncSeries::zero(work);
        for c in h.iter().rev() {
            acc = acc.mul(y, f).add(c, f);
        }
        acc
    };
    let eval_deriv = |y: &TruncSeries| -> TruncSeries {
        let mut acc = TruncSeries::zero(work);
        for (l, c) in h.iter().enumerate().rev() {
            if l == 0 {
                continue;
            }
            let cl = c.scale(f.from_int(l as i64), f);
            // Horner on the derivative Σ l·c_l y^{l−1}
            acc = acc.mul(y, f).add(&cl, f);
        }
        acc
    };
    let mut y = TruncSeries::from_poly(&Poly::constant(roots[0]), work);
    for _ in 0..work + 2 {
        let hy = eval(&y);
        if hy.is_zero() {
            break;
        }
        let dy = eval_deriv(&y);
        let step = hy.div(&dy, f)?.with_prec(work);
        let new_y = y.sub(&step, f);
        if new_y == y {
            break;
        }
        y = new_y;
    }
    if !eval(&y).is_zero() {
        return Err(SlopeError::Precision("Newton iteration did not close".into()));
    }
    // λ = t^a·y, known modulo t^{work + a}: y carries `work` digits and the
    // shift adds a zero digits below, so the precision grows accordingly.
    Ok(TruncSeries::from_poly(&y.to_poly().shift_up(a), work + a))
}

/// Eigenvector for the simple eigenvalue λ of U over truncated series, via
/// the complementary factor: w = R(U)·v₀ with G = (X − λ)·R, then T_Q acts on
/// the line and the eigenvalue is read off at a unit coordinate.
fn eigen_line_and_hecke_value(
    f: &FieldSpec,
    u: &PolyMatrix,
    tq: &PolyMatrix,
    lambda: &TruncSeries,
    prec: usize,
) -> Result<TruncSeries, SlopeError> {
    let dim = u.rows();
    // One working precision everywhere; λ itself may carry fewer digits than
    // requested, and truncated-series equality is only meaningful at a
    // common precision.
    let wp = prec.min(lambda.prec());
    let lam = lambda.with_prec(wp);
    let um = TruncMatrix::from_poly_matrix(u, wp);
    let recip = charpoly_reciprocal_trunc(&um, f)?;
    let g: Vec<TruncSeries> = recip.into_iter().rev().collect();
    // synthetic division G / (X − λ): r_{dim−1} = 1, r_{j−1} = g_j + λ·r_j
    let mut r = vec![TruncSeries::zero(wp); dim];
    r[dim - 1] = g[dim].clone();
    for j in (1..dim).rev() {
        r[j - 1] = g[j].add(&lam.mul(&r[j], f), f);
    }
    for start in 0..dim {
        // w = R(U)·e_start by Horner; w spans the λ-eigenline since
        // (U − λ)·R(U) = G(U) = 0 and λ is a simple root.
        let mut w: Vec<TruncSeries> = (0..dim)
            .map(|i| {
                if i == start {
                    r[dim - 1].clone()
                } else {
                    TruncSeries::zero(wp)
                }
            })
            .collect();
        for j in (0..dim - 1).rev() {
            let mut next = um.apply(&w, f);
            next[start] = next[start].add(&r[j], f);
            w = next;
        }
        // normalize by the minimal valuation
        let vmin = w.iter().filter_map(|x| x.valuation().exact()).min();
        let vmin = match vmin {
            Some(v) if wp > v + 8 => v,
            _ => continue,
        };
        let work = wp - vmin;
        let wnorm: Vec<TruncSeries> = w
            .iter()
            .map(|x| {
                let p = x.to_poly();
                let shifted = Poly::from_coeffs(p.coeffs().iter().skip(vmin).copied().collect());
                TruncSeries::from_poly(&shifted, work)
            })
            .collect();
        let unit_idx = wnorm
            .iter()
            .position(|x| x.valuation().exact() == Some(0))
            .expect("minimal valuation coordinate");
        // verify the U-eigenrelation at the working precision
        let uw = TruncMatrix::from_poly_matrix(u, work).apply(&wnorm, f);
        let lam_w = lam.with_prec(work);
        let ok_u = uw
            .iter()
            .zip(wnorm.iter())
            .all(|(a, b)| *a == b.mul(&lam_w, f));
        if !ok_u {
            continue;
        }
        let tw = TruncMatrix::from_poly_matrix(tq, work).apply(&wnorm, f);
        let lam_q = tw[unit_idx].div(&wnorm[unit_idx], f)?.with_prec(work);
        // the full line must satisfy T_Q w = λ_Q w
        let ok = tw
            .iter()
            .zip(wnorm.iter())
            .all(|(a, b)| *a == b.mul(&lam_q, f));
        if ok {
            return Ok(lam_q);
        }
    }
    Err(SlopeError::Precision(
        "no starting vector produced a clean eigenline".into(),
    ))
}

/// The U-eigenvalue on the one-dimensional slope-a generalized eigenspace,
/// as a truncated series.
pub fn slope_block_u_value(
    cache: &mut HeckeCache,
    k: usize,
    a: usize,
    prec: usize,
) -> Result<TruncSeries, SlopeError> {
    let f = cache.qd.field().clone();
    let u = u_matrix(cache, k)?;
    slope_block_u_eigenvalue(&f, &u, a, prec)
}

/// The T_Q-eigenvalue on the one-dimensional slope-a generalized
/// U-eigenspace, as a truncated series.
pub fn slope_block_hecke_eigenvalue(
    cache: &mut HeckeCache,
    k: usize,
    a: usize,
    q_poly: &Poly,
    prec: usize,
) -> Result<TruncSeries, SlopeError> {
    let f = cache.qd.field().clone();
    let u = u_matrix(cache, k)?;
    let tq = hecke_matrix(cache, k, q_poly)?;
    let lam = slope_block_u_eigenvalue(&f, &u, a, prec)?;
    eigen_line_and_hecke_value(&f, &u, &tq, &lam, prec)
}

/// Verify the family congruence: for weights k₁ ≡ k₂ mod pⁿ with
/// d(k₁, a) = 1 and a below the bounds, the slope-a T_Q-eigenvalues satisfy
/// v_t(λ_Q(F₁) − λ_Q(F₂)) > p^m − p^{n′} − a, where m = v_p(k₂ − k₁) is the
/// effective congruence exponent (at least the requested n; using it gives
/// the strongest bound the theorem supports, since the bounds increase with
/// the exponent). Hypothesis failures are reported, not asserted; precision
/// shortfalls retry with doubled precision.
pub fn family_congruence(
    cache: &mut HeckeCache,
    k1: usize,
    k2: usize,
    a: Rational,
    q_poly: &Poly,
    n: u32,
    n_prime: u32,
) -> Result<Report, SlopeError> {
    let f = cache.qd.field().clone();
    let d = cache.qd.d as u64;
    let p = f.p() as u64;
    let pn_req = p.pow(n) as usize;
    // Hypotheses on the weight congruence.
    if k2 < k1 || (k2 - k1) % pn_req != 0 {
        return Err(SlopeError::Hypothesis(format!(
            "need k2 ≥ k1 and k2 ≡ k1 mod {}",
            pn_req
        )));
    }
    // Effective exponent: the exact p-adic valuation of k2 − k1.
    let n_eff = if k2 == k1 {
        n
    } else {
        let mut diff = (k2 - k1) as u64;
        let mut m = 0u32;
        while diff % p == 0 {
            diff /= p;
            m += 1;
        }
        m.max(n)
    };
    let pn = p.pow(n_eff) as i64;
    let pn_prime = p.pow(n_prime) as i64;
    let mut report = Report::new("family");
    report.param("k1", k1);
    report.param("k2", k2);
    report.param("a", a);
    report.param("Q", q_poly.render());
    report.param("n", n);
    report.param("n_effective", n_eff);
    report.param("n_prime", n_prime);

    if k1 == k2 {
        report.item(
            "identical weights give identical eigenvalues",
            "v = ∞".to_string(),
            "any bound".to_string(),
            true,
        );
        return Ok(report);
    }
    let eps = ordinary_dimension(cache, k1, None)? as u64;
    let bp_n = BoundParams::new(p, n_eff, d, eps)?;
    let bp_np = BoundParams::new(p, n_prime, d, eps)?;
    let c_n = bound_c(&bp_n);
    let c_np = bound_c(&bp_np);
    let claim = Rational::integer(pn - pn_prime).sub(a);
    if !(a < c_n && a < Rational::integer(k1 as i64 - 1)) {
        return Err(SlopeError::Hypothesis(format!(
            "need a < min(C(n) = {}, k1 − 1)",
            c_n
        )));
    }
    if claim < Rational::zero() {
        return Err(SlopeError::Hypothesis("need pⁿ − pⁿ′ − a ≥ 0".into()));
    }
    if !(a < c_np) {
        return Err(SlopeError::Hypothesis(format!("need a < C(n′) = {}", c_np)));
    }
    let u1 = u_matrix(cache, k1)?;
    let table1 = {
        let bound = a.add(Rational::integer(1));
        trunc_table_below(&f, &u1, bound)?
    };
    let mult = table1
        .iter()
        .find(|&&(s, _)| s == a)
        .map(|&(_, m)| m)
        .unwrap_or(0);
    if mult != 1 {
        return Err(SlopeError::Hypothesis(format!(
            "d(k1, a) = {} but the theorem requires 1",
            mult
        )));
    }
    if !a.is_integer() || a.num() < 0 {
        // A length-one Newton segment has integral slope, so this cannot
        // happen under d(k1, a) = 1; guard anyway.
        return Err(SlopeError::Hypothesis("slope must be a natural number".into()));
    }
    let a_int = a.num() as usize;

    let u2 = u_matrix(cache, k2)?;
    let tq1 = hecke_matrix(cache, k1, q_poly)?;
    let tq2 = hecke_matrix(cache, k2, q_poly)?;

    let mut prec = 2 * (claim.num().max(0) as usize + a_int * u2.rows() + 8) + 16;
    for _attempt in 0..3 {
        let run = || -> Result<(TruncSeries, TruncSeries), SlopeError> {
            let lam_u1 = slope_block_u_eigenvalue(&f, &u1, a_int, prec)?;
            let lam_u2 = slope_block_u_eigenvalue(&f, &u2, a_int, prec)?;
            let lq1 = eigen_line_and_hecke_value(&f, &u1, &tq1, &lam_u1, prec)?;
            let lq2 = eigen_line_and_hecke_value(&f, &u2, &tq2, &lam_u2, prec)?;
            Ok((lq1, lq2))
        };
        match run() {
            Ok((lq1, lq2)) => {
                let work = lq1.prec().min(lq2.prec());
                let diff = lq1.with_prec(work).sub(&lq2.with_prec(work), &f);
                let (computed, vlow) = match diff.valuation() {
                    TruncVal::Exact(v) => (format!("{}", v), Rational::integer(v as i64)),
                    TruncVal::AtLeast(c) => (format!(">={}", c), Rational::integer(c as i64)),
                };
                let pass = vlow > claim;
                report.item(
                    format!("v_t(λ_Q(F_{}) − λ_Q(F_{})) > {}", k1, k2, claim),
                    computed,
                    format!("> {}", claim),
                    pass,
                );
                return Ok(report);
            }
            Err(SlopeError::Precision(_)) => {
                prec *= 2;
                continue;
            }
            Err(e) => return Err(e),
        }
    }
    Err(SlopeError::Precision(
        "family congruence exhausted its precision retries".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::f3;

    fn gamma1_t_cachebase() -> crate::level::QuotientData {
        let l = LevelSpec::gamma1_t(f3());
        build_quotient(&l, default_depth(&l)).unwrap()
    }

    #[test]
    fn bound_values_from_hand_evaluation() {
        // C₁(3,1,1,1) = 3·6/8 = 9/4
        let bp = BoundParams::new(3, 1, 1, 1).unwrap();
        assert_eq!(bound_c1(&bp), Rational::new(9, 4));
        // C₂(3,1,1,1) = 2: the minimum over l ∈ {2,3,4} of 3, 2, 2
        assert_eq!(bound_c2(&bp), Rational::integer(2));
        assert_eq!(bound_c(&bp), Rational::integer(2));
        // D(n,1,1) = √(2·3ⁿ) − 1/2
        for n in 1..=4u32 {
            let bp = BoundParams::new(3, n, 1, 1).unwrap();
            let d = bound_d(&bp);
            let expected = SqrtBound {
                radicand: 2 * 3u64.pow(n),
                scale: Rational::integer(1),
                offset: Rational::new(-1, 2),
            };
            match d {
                DBound::Surd(s) => assert!(s.equals(&expected)),
                DBound::Rat(_) => panic!("D(n,1,1) must be the surd branch"),
            }
        }
        // D(1,1,1) = √6 − 1/2 ≈ 1.949…: 1 < D < 2
        let bp = BoundParams::new(3, 1, 1, 1).unwrap();
        let d = bound_d(&bp);
        assert!(d.admits(Rational::integer(1)));
        assert!(!d.admits(Rational::integer(2)));
        // and D ≤ C on a parameter sweep
        let mut rng = SplitMix64::new(40);
        for _ in 0..200 {
            let n = 1 + (rng.below(3) as u32);
            let d0 = 1 + rng.below(4);
            let e0 = rng.below(d0 + 1);
            let p = [2u64, 3, 5][rng.below(3) as usize];
            let bp = BoundParams::new(p, n, d0, e0).unwrap();
            let c = bound_c(&bp);
            match bound_d(&bp) {
                DBound::Rat(r) => assert!(r <= c),
                DBound::Surd(s) => {
                    // s ≤ c ⟺ not (c < s)
                    assert!(s.compare_rational(c) != core::cmp::Ordering::Less);
                }
            }
        }
    }

    #[test]
    fn gm_condition_examples() {
        // (3,1,1,1): 6 > 1·(1+2+1−2) = 2
        assert!(gm_condition(&BoundParams::new(3, 1, 1, 1).unwrap()));
        // (2,2,3,0): clause (1) fails (n < 3 and d₀ − ε₀ = 3 > 1)
        assert!(!gm_condition(&BoundParams::new(2, 2, 3, 0).unwrap()));
        // n ≥ 3 satisfies clause (1) by the disjunct; with d₀ = ε₀ = 1 the
        // size clause 16 > 3·(3+2+1−2) = 12 holds too.
        assert!(gm_condition(&BoundParams::new(2, 3, 1, 1).unwrap()));
    }

    #[test]
    fn slope_tables_gamma1_t() {
        let qd = gamma1_t_cachebase();
        let mut cache = HeckeCache::new(&qd);
        // k = 2: table {0: 1}
        let t2 = slope_decomposition(&mut cache, 2, None).unwrap();
        assert_eq!(t2.entries, vec![(Rational::integer(0), 1)]);
        assert_eq!(t2.deficiency, 0);
        // k = 10: contains {0:1, 1:1}, total (with deficiency) = 9
        let t10 = slope_decomposition(&mut cache, 10, None).unwrap();
        assert_eq!(t10.multiplicity(Rational::integer(0)), 1);
        assert_eq!(t10.multiplicity(Rational::integer(1)), 1);
        let total: usize = t10.entries.iter().map(|&(_, m)| m).sum::<usize>() + t10.deficiency;
        assert_eq!(total, 9);
        // slopes are never negative and the deficiency accounting closes
        for k in [6usize, 9, 12] {
            let t = slope_decomposition(&mut cache, k, None).unwrap();
            assert!(t.entries.iter().all(|&(a, _)| a >= Rational::zero()));
            let total: usize = t.entries.iter().map(|&(_, m)| m).sum::<usize>() + t.deficiency;
            assert_eq!(total, k - 1);
        }
        // prefix table agrees with the exact one below its bound
        let prefix = slope_table_below(&mut cache, 10, None, Rational::integer(2)).unwrap();
        let expected: Vec<_> = t10
            .entries
            .iter()
            .copied()
            .take_while(|&(s, _)| s < Rational::integer(2))
            .collect();
        assert_eq!(prefix.entries, expected);
        // d(k, 0) = 1 helper
        assert_eq!(ordinary_dimension(&mut cache, 7, None).unwrap(), 1);
    }

    #[test]
    fn eldiv_bound_and_negative_control() {
        let f = f3();
        let qd = gamma1_t_cachebase();
        let mut cache = HeckeCache::new(&qd);
        for k in [4usize, 6, 8] {
            let u = u_matrix(&mut cache, k).unwrap();
            let rep = check_eldiv_bound(&u, &f, qd.d);
            assert!(rep.pass(), "eldiv floor at k = {}", k);
        }
        // negative control: the identity violates s₂ ≥ 1
        let id = PolyMatrix::identity(3, &f);
        let rep = check_eldiv_bound(&id, &f, 1);
        assert!(!rep.pass());
    }

    #[test]
    fn window_small() {
        let qd = gamma1_t_cachebase();
        let mut cache = HeckeCache::new(&qd);
        let rep = check_window(&mut cache, 3, 1).unwrap();
        assert!(rep.pass(), "window at k = 3, n = 1: {:?}", rep.items);
        // n = 0 degenerate: congruence mod t
        let rep = check_window(&mut cache, 4, 0).unwrap();
        assert!(rep.pass());
    }

    #[test]
    fn window_chi_small() {
        let qd = gamma1_t_cachebase();
        let mut cache = HeckeCache::new(&qd);
        // k' = k + pⁿ(q^d − 1) = k + 6 at n = 1
        for k in [3usize, 4] {
            for chi in 0..2usize {
                let rep = check_window_chi(&mut cache, k, 1, chi).unwrap();
                assert!(rep.pass(), "k = {}, chi = {}: {:?}", k, chi, rep.items);
            }
        }
    }

    #[test]
    fn chi_ordinary_constancy_mod_qd_minus_one() {
        // d(k₁, χ, 0) = d(k₂, χ, 0) whenever k₁ ≡ k₂ mod q^d − 1.
        let qd = gamma1_t_cachebase();
        let mut cache = HeckeCache::new(&qd);
        for chi in 0..2usize {
            for k in 3..=6usize {
                let a = ordinary_dimension(&mut cache, k, Some(chi)).unwrap();
                let b = ordinary_dimension(&mut cache, k + 2, Some(chi)).unwrap();
                let c = ordinary_dimension(&mut cache, k + 4, Some(chi)).unwrap();
                assert_eq!(a, b, "chi = {}, k = {}", chi, k);
                assert_eq!(b, c, "chi = {}, k = {}", chi, k);
            }
        }
    }

    #[test]
    fn constancy_k4_k7() {
        let qd = gamma1_t_cachebase();
        let mut cache = HeckeCache::new(&qd);
        let rep = check_constancy(&mut cache, 4, 7, 1, None, None).unwrap();
        assert!(rep.pass(), "{:?}", rep.items);
        // trivial k' = k
        let rep = check_constancy(&mut cache, 5, 5, 1, None, None).unwrap();
        assert!(rep.pass());
        // congruence violated
        assert!(check_constancy(&mut cache, 4, 6, 1, None, None).is_err());
    }

    #[test]
    fn perturb_negative_control() {
        let f = f3();
        // A perturbation of size t¹ against a claimed pⁿ = 3 must produce
        // detectable violations for some seed: construct one explicitly.
        let mut b = PolyMatrix::identity(2, &f);
        *b.at_mut(1, 1) = Poly::one(&f).shift_up(3); // diag(1, t³): slopes 0, 3
        let mut b2 = b.clone();
        *b2.at_mut(1, 1) = b2.at(1, 1).add(&Poly::one(&f).shift_up(1), &f); // + t
        let bound = Rational::integer(2);
        assert!(!tables_agree_below(&f, &b, &b2, bound).unwrap());
        // while a genuine t³ perturbation keeps everything below C intact
        let mut b3 = b.clone();
        *b3.at_mut(0, 1) = Poly::one(&f).shift_up(3);
        assert!(tables_agree_below(&f, &b, &b3, bound).unwrap());
    }

    #[test]
    fn perturb_trials_pass() {
        let f = f3();
        let rep = perturb_trial(&f, 7, 6, 2, 1, 40).unwrap();
        assert!(rep.pass(), "{:?}", rep.items);
    }

    #[test]
    fn family_10_19_at_t() {
        let qd = gamma1_t_cachebase();
        let mut cache = HeckeCache::new(&qd);
        let f = f3();
        let rep = family_congruence(
            &mut cache,
            10,
            19,
            Rational::integer(1),
            &Poly::t(&f),
            2,
            1,
        )
        .unwrap();
        assert!(rep.pass(), "{:?}", rep.items);
        // observed valuation is exactly 9 against the bound 5
        assert!(rep.items[0].computed == "9", "got {}", rep.items[0].computed);
        // k2 = k1: identical eigen-data, reported as infinite valuation
        let rep = family_congruence(
            &mut cache,
            10,
            10,
            Rational::integer(1),
            &Poly::t(&f),
            1,
            1,
        )
        .unwrap();
        assert!(rep.pass());
        assert!(rep.items[0].computed.contains('∞'));
    }
}
