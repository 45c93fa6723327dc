//! The Čech model of `H²_m(X, W_n O_X)` for an RDP hypersurface
//! `X = Spec R`, with respect to the cover `{D(x), D(y)}`:
//!
//! ```text
//! H²_m(X, W_n O_X) = W_n(R[(xy)^{-1}]) / (W_n(R[x^{-1}]) + W_n(R[y^{-1}]))
//! ```
//!
//! Classes are represented by Witt vectors of Laurent polynomials.  A greedy
//! peeling procedure produces a normal form supported on doubly-negative
//! monomials at each Witt level; the form is all-zero exactly for boundary
//! classes.  On top of this sit:
//!
//! * exact F_p linear algebra on bounded pole boxes (`w1_frobenius_matrix`,
//!   `f_infinity_kernel`, `f_injective`),
//! * the level-by-level lifting algorithm (`lifting_obstruction`,
//!   `compute_module`) computing `lim_n H²_m(X, W_n O_X)[F^∞]` together with
//!   its F- and V-actions, and
//! * extraction of a labeled presentation in the Teichmüller generators
//!   `f_j^{(l)}` (`compute_dieu_presentation`).

use crate::algebra::{frobenius_power, Family, LaurentPoly, Mono, PrimeField, RdpEquation};
use crate::error::{Error, Result};
use crate::witt::{
    teichmuller, witt_add, witt_embed, witt_f, witt_pad, witt_scale, witt_sub, witt_vend,
    witt_zero, PolyRing, WittVec, N_MAX,
};
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};

/// Cap on the number of Frobenius applications when testing F-nilpotency of
/// a class.
const M_STAR_CAP: u32 = 12;

/// Cap on the number of module basis elements (the enumeration of F_p
/// coefficient tuples is exponential in this count).
const BASIS_CAP: usize = 14;

// ---------------------------------------------------------------------------
// Boxes
// ---------------------------------------------------------------------------

/// A bound on pole orders: the finite truncation `{x^{-i} y^{-j} z^c : 1 ≤
/// i, j ≤ B, c < zdeg}` of the infinite Čech basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Box {
    pub b: u32,
}

impl Box {
    pub fn new(b: u32) -> Result<Box> {
        if b < 4 {
            return Err(Error::Internal(format!("box bound {b} < 4")));
        }
        Ok(Box { b })
    }

    /// Default bound: `2n + 8` for the A and D families, 24 for E.
    pub fn default_for(eq: &RdpEquation) -> Box {
        let b = match eq.family {
            Family::A | Family::D => 2 * eq.n + 8,
            _ => 24,
        };
        Box { b }
    }

    /// The box basis monomials in a fixed deterministic order.
    pub fn basis(&self, eq: &RdpEquation) -> Vec<Mono> {
        let mut out = Vec::new();
        for i in 1..=self.b as i32 {
            for j in 1..=self.b as i32 {
                for c in 0..eq.zdeg as u16 {
                    out.push((-i, -j, c));
                }
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Sparse F_p column echelon (keys are arbitrary ordered row labels)
// ---------------------------------------------------------------------------

pub(crate) type SparseVec<K> = BTreeMap<K, u32>;

fn sv_axpy<K: Ord + Clone>(field: &PrimeField, dst: &mut SparseVec<K>, c: u32, src: &SparseVec<K>) {
    // dst -= c * src
    for (k, &s) in src {
        let cur = dst.get(k).copied().unwrap_or(0);
        let nv = field.sub(cur, field.mul(c, s));
        if nv == 0 {
            dst.remove(k);
        } else {
            dst.insert(k.clone(), nv);
        }
    }
}

fn combo_axpy(field: &PrimeField, dst: &mut BTreeMap<usize, u32>, c: u32, src: &BTreeMap<usize, u32>) {
    for (&t, &s) in src {
        let cur = dst.get(&t).copied().unwrap_or(0);
        let nv = field.add(cur, field.mul(c, s));
        if nv == 0 {
            dst.remove(&t);
        } else {
            dst.insert(t, nv);
        }
    }
}

/// Incremental column echelon over F_p with expression tracking: every
/// stored column remembers its expansion in terms of the originally inserted
/// (tagged) vectors.
pub(crate) struct Echelon<K: Ord + Clone> {
    field: PrimeField,
    pivots: BTreeMap<K, usize>,
    cols: Vec<SparseVec<K>>,
    hist: Vec<BTreeMap<usize, u32>>,
}

impl<K: Ord + Clone> Echelon<K> {
    pub fn new(p: u32) -> Self {
        Echelon {
            field: PrimeField::new(p),
            pivots: BTreeMap::new(),
            cols: Vec::new(),
            hist: Vec::new(),
        }
    }

    /// Fully reduce `v`, accumulating into `expr` the combination of
    /// original vectors subtracted: on return, `v_in = v_out + Σ expr[t]·orig_t`.
    fn reduce(&self, v: &mut SparseVec<K>, expr: &mut BTreeMap<usize, u32>) {
        loop {
            let hit = v
                .iter()
                .find_map(|(k, &c)| self.pivots.get(k).map(|&idx| (idx, c)));
            match hit {
                None => return,
                Some((idx, c)) => {
                    sv_axpy(&self.field, v, c, &self.cols[idx]);
                    combo_axpy(&self.field, expr, c, &self.hist[idx]);
                }
            }
        }
    }

    /// Insert a tagged vector.  Returns `Some(combo)` if the vector is
    /// dependent on earlier insertions, where `combo` is a nontrivial
    /// F_p-combination of original vectors summing to zero (including `tag`
    /// with coefficient 1).
    pub fn insert(&mut self, v: SparseVec<K>, tag: usize) -> Option<BTreeMap<usize, u32>> {
        let mut v = v;
        let mut expr = BTreeMap::new();
        self.reduce(&mut v, &mut expr);
        if v.is_empty() {
            // orig_tag = Σ expr[t]·orig_t  ⇒  orig_tag − Σ expr·orig = 0
            let mut combo = BTreeMap::new();
            combo.insert(tag, 1u32);
            for (t, c) in expr {
                let cur = combo.get(&t).copied().unwrap_or(0);
                let nv = self.field.sub(cur, c);
                if nv == 0 {
                    combo.remove(&t);
                } else {
                    combo.insert(t, nv);
                }
            }
            return Some(combo);
        }
        let lead = v.keys().next().cloned().expect("nonempty");
        let lc = *v.get(&lead).unwrap();
        let inv = self.field.inv(lc);
        let v: SparseVec<K> = v
            .into_iter()
            .map(|(k, c)| (k, self.field.mul(inv, c)))
            .collect();
        // stored = inv·(orig_tag − Σ expr·orig)
        let mut hist = BTreeMap::new();
        hist.insert(tag, inv);
        for (t, c) in expr {
            let cur = hist.get(&t).copied().unwrap_or(0);
            let nv = self.field.sub(cur, self.field.mul(inv, c));
            if nv == 0 {
                hist.remove(&t);
            } else {
                hist.insert(t, nv);
            }
        }
        self.pivots.insert(lead, self.cols.len());
        self.cols.push(v);
        self.hist.push(hist);
        None
    }

    /// Solve `target = Σ c_t·orig_t`; returns the coefficients if solvable.
    pub fn solve(&self, target: &SparseVec<K>) -> Option<BTreeMap<usize, u32>> {
        let mut v = target.clone();
        let mut expr = BTreeMap::new();
        self.reduce(&mut v, &mut expr);
        if v.is_empty() {
            Some(expr)
        } else {
            None
        }
    }
}

fn poly_to_sv(poly: &LaurentPoly) -> SparseVec<Mono> {
    poly.terms().map(|(&m, &c)| (m, c)).collect()
}

fn sv_to_poly(p: u32, sv: &SparseVec<Mono>) -> LaurentPoly {
    LaurentPoly::from_terms(p, sv.iter().map(|(&m, &c)| (m, c)))
}

// ---------------------------------------------------------------------------
// W_1 Frobenius on the box
// ---------------------------------------------------------------------------

/// The matrix data of the p-power map on the boxed W_1 basis.
pub struct W1Map {
    pub basis: Vec<Mono>,
    pub cols: Vec<SparseVec<Mono>>,
}

fn fpow_column(eq: &RdpEquation, mono: Mono, m: u32) -> Result<SparseVec<Mono>> {
    let (a, b, c) = mono;
    let poly = LaurentPoly::monomial(eq.p, a, b, c, 1);
    let img = frobenius_power(&poly, m, eq)?;
    Ok(poly_to_sv(&img.doubly_negative_part()))
}

/// The matrix of `c ↦ class(c^p)` on the F_p-span of the box basis.
///
/// The image of a box monomial has pole orders at most `p·B` (the rewrite
/// rules of Table 1 only involve non-negative exponents), which is verified
/// defensively.
pub fn w1_frobenius_matrix(eq: &RdpEquation, bx: &Box) -> Result<W1Map> {
    let basis = bx.basis(eq);
    let bound = (eq.p * bx.b) as i32;
    let mut cols = Vec::with_capacity(basis.len());
    for &mono in &basis {
        let col = fpow_column(eq, mono, 1)?;
        if col.keys().any(|&(a, b, _)| -a > bound || -b > bound) {
            return Err(Error::BoxOverflow { b: bx.b });
        }
        cols.push(col);
    }
    Ok(W1Map { basis, cols })
}

/// One stabilized-union step is a kernel of `F` modulo a given subspace.
/// Returns a basis of `{v ∈ box span : F(v) ∈ span(modulo)}` as classes.
fn f_preimage_step(
    eq: &RdpEquation,
    basis: &[Mono],
    cols: &[SparseVec<Mono>],
    modulo: &[SparseVec<Mono>],
) -> Vec<SparseVec<Mono>> {
    let mut ech: Echelon<Mono> = Echelon::new(eq.p);
    let off = basis.len();
    for (i, k) in modulo.iter().enumerate() {
        // tags ≥ off are the quotient directions; their coefficients are
        // irrelevant to the extracted kernel combos.
        ech.insert(k.clone(), off + i);
    }
    let mut out = Vec::new();
    for (i, col) in cols.iter().enumerate() {
        if let Some(combo) = ech.insert(col.clone(), i) {
            let mut vec: SparseVec<Mono> = BTreeMap::new();
            let field = PrimeField::new(eq.p);
            for (&t, &c) in &combo {
                if t < off {
                    let cur = vec.get(&basis[t]).copied().unwrap_or(0);
                    let nv = field.add(cur, c);
                    if nv == 0 {
                        vec.remove(&basis[t]);
                    } else {
                        vec.insert(basis[t], nv);
                    }
                }
            }
            if !vec.is_empty() {
                out.push(vec);
            }
        }
    }
    out
}

fn f_infinity_kernel_raw(eq: &RdpEquation, b: u32) -> Result<Vec<SparseVec<Mono>>> {
    let w1 = w1_frobenius_matrix(eq, &Box { b })?;
    let mut kernel = f_preimage_step(eq, &w1.basis, &w1.cols, &[]);
    for _ in 0..64 {
        let next = f_preimage_step(eq, &w1.basis, &w1.cols, &kernel);
        if next.len() == kernel.len() {
            return Ok(kernel);
        }
        kernel = next;
    }
    Err(Error::Internal(
        "F^∞-kernel iteration failed to stabilize".into(),
    ))
}

/// Basis of `H²_m(X, O_X)[F^∞]` as doubly-negative Laurent classes, with a
/// box-doubling stabilization check.
pub fn f_infinity_kernel(eq: &RdpEquation, bx: &Box) -> Result<Vec<LaurentPoly>> {
    let at_b = f_infinity_kernel_raw(eq, bx.b)?;
    let at_2b = f_infinity_kernel_raw(eq, 2 * bx.b)?;
    if at_b.len() != at_2b.len() {
        return Err(Error::Unstable {
            b: bx.b,
            dim_b: at_b.len(),
            dim_2b: at_2b.len(),
        });
    }
    Ok(at_b.iter().map(|sv| sv_to_poly(eq.p, sv)).collect())
}

/// Is Frobenius injective on `H²_m(X, O_X)`?  (Equivalently: is
/// `Picloc^{loc,loc}` trivial.)
pub fn f_injective(eq: &RdpEquation, bx: &Box) -> Result<bool> {
    let w1 = w1_frobenius_matrix(eq, bx)?;
    let k_b = f_preimage_step(eq, &w1.basis, &w1.cols, &[]).len();
    let w2 = w1_frobenius_matrix(eq, &Box { b: 2 * bx.b })?;
    let k_2b = f_preimage_step(eq, &w2.basis, &w2.cols, &[]).len();
    if k_b != k_2b {
        return Err(Error::Unstable {
            b: bx.b,
            dim_b: k_b,
            dim_2b: k_2b,
        });
    }
    Ok(k_b == 0)
}

// ---------------------------------------------------------------------------
// Normal forms
// ---------------------------------------------------------------------------

/// A local cohomology class with its cached peeled normal form.
#[derive(Debug, Clone)]
pub struct CohClass {
    pub level: usize,
    pub rep: WittVec<LaurentPoly>,
    pub normal: Vec<LaurentPoly>,
}

impl CohClass {
    pub fn new(rep: WittVec<LaurentPoly>, eq: &RdpEquation) -> Result<CohClass> {
        let normal = normal_form(&rep, eq)?;
        Ok(CohClass {
            level: rep.len(),
            rep,
            normal,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.normal.iter().all(|r| r.is_zero())
    }
}

/// Peel a representative down to its normal form `(r_0, …, r_{n−1})` of
/// doubly-negative components: the class equals `⊞_i V^i(τ(r_i))` modulo
/// `W_n(R[x^{-1}]) + W_n(R[y^{-1}])`, and the `r_i` depend only on the class
/// (splitting off a boundary term never changes a doubly-negative leading
/// part, and `R[x^{-1}] ∩ R[y^{-1}] = R` since the Table 1 rings are normal).
pub fn normal_form(w: &WittVec<LaurentPoly>, eq: &RdpEquation) -> Result<Vec<LaurentPoly>> {
    let ring = PolyRing { eq };
    let mut comps = Vec::with_capacity(w.len());
    for c in &w.comps {
        comps.push(c.reduce(eq)?);
    }
    let mut cur = WittVec { p: eq.p, comps };
    let mut rs = Vec::with_capacity(w.len());
    while !cur.is_empty() {
        let n = cur.len();
        let (u, v, r) = cur.comps[0].split_trichotomy();
        rs.push(r.clone());
        let mut sub = teichmuller(&ring, u, n);
        sub = witt_add(&ring, &sub, &teichmuller(&ring, v, n))?;
        sub = witt_add(&ring, &sub, &teichmuller(&ring, r, n))?;
        let diff = witt_sub(&ring, &cur, &sub)?;
        if !diff.comps[0].is_zero() {
            return Err(Error::Internal(
                "peeling left a nonzero leading component".into(),
            ));
        }
        cur = WittVec {
            p: eq.p,
            comps: diff.comps[1..].to_vec(),
        };
    }
    Ok(rs)
}

pub fn is_zero_class(w: &WittVec<LaurentPoly>, eq: &RdpEquation) -> Result<bool> {
    Ok(normal_form(w, eq)?.iter().all(|r| r.is_zero()))
}

/// Canonical signature of a class (derived from the normal form); equal for
/// representatives of the same class.
pub(crate) type Sig = Vec<(u16, Mono, u32)>;

fn signature(nf: &[LaurentPoly]) -> Sig {
    let mut out = Vec::new();
    for (i, r) in nf.iter().enumerate() {
        for (&m, &c) in r.terms() {
            out.push((i as u16, m, c));
        }
    }
    out
}

fn class_signature(w: &WittVec<LaurentPoly>, eq: &RdpEquation) -> Result<Sig> {
    Ok(signature(&normal_form(w, eq)?))
}

/// Replace a representative by the small canonical one `⊞_i V^i(τ(r_i))`
/// rebuilt from its normal form (same class, bounded pole orders).
fn canonicalize(w: &WittVec<LaurentPoly>, eq: &RdpEquation) -> Result<WittVec<LaurentPoly>> {
    let ring = PolyRing { eq };
    let nf = normal_form(w, eq)?;
    let n = w.len();
    let mut acc = witt_zero(&ring, n);
    for (i, r) in nf.iter().enumerate() {
        if r.is_zero() {
            continue;
        }
        let t = witt_embed(&ring, &teichmuller(&ring, r.clone(), n - i), n);
        acc = witt_add(&ring, &acc, &t)?;
    }
    Ok(acc)
}

/// The length-`n` vector `(0, …, 0, g) = V^{n−1}(τ(g))`.
fn bottom(eq: &RdpEquation, g: &LaurentPoly, n: usize) -> WittVec<LaurentPoly> {
    let ring = PolyRing { eq };
    witt_embed(&ring, &teichmuller(&ring, g.clone(), 1), n)
}

// ---------------------------------------------------------------------------
// Lifting
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub enum LiftOutcome {
    /// A corrected lift whose F-powers vanish.
    Lifts(WittVec<LaurentPoly>),
    /// The obstruction class `g ∈ H²_m(O)` (not in `F^{m}(H²_m(O)) + [F^∞]`).
    Obstructed(LaurentPoly),
}

/// Decide whether a class `f ∈ H²_m(W_l)[F^∞]` lifts to `H²_m(W_{l+1})[F^∞]`.
///
/// With `m*` minimal such that `F^{m*}(f) = 0`, the zero-padded candidate
/// `f̃` satisfies `F^{m*}(f̃) ≡ V^l(τ(g))` for a unique doubly-negative `g`,
/// and `f` lifts iff `g ∈ F^{m*}(H²_m(O)) + H²_m(O)[F^∞]`; the corrected lift
/// is then `f̃ ⊟ V^l(τ(h))` for a solution `g = F^{m*}(h) + k`.
pub fn lifting_obstruction(
    f: &WittVec<LaurentPoly>,
    eq: &RdpEquation,
    bx: &Box,
) -> Result<LiftOutcome> {
    let kinf = f_infinity_kernel(eq, bx)?;
    lifting_obstruction_with(f, eq, bx, &kinf)
}

fn lifting_obstruction_with(
    f: &WittVec<LaurentPoly>,
    eq: &RdpEquation,
    bx: &Box,
    kinf: &[LaurentPoly],
) -> Result<LiftOutcome> {
    let ring = PolyRing { eq };
    let l = f.len();
    // F-nilpotency order at the current level.
    let mut m_star = 0u32;
    {
        let mut g = f.clone();
        while !is_zero_class(&g, eq)? {
            g = witt_f(&ring, &g)?;
            m_star += 1;
            if m_star > M_STAR_CAP {
                return Err(Error::PeelFailure { depth: l });
            }
        }
    }
    let pad = witt_pad(&ring, f);
    let mut t = pad.clone();
    for _ in 0..m_star {
        t = witt_f(&ring, &t)?;
    }
    let nf = normal_form(&t, eq)?;
    for (i, r) in nf.iter().enumerate().take(l) {
        if !r.is_zero() {
            return Err(Error::PeelFailure { depth: i });
        }
    }
    let g0 = nf[l].clone();

    // Solve g0 = F^{m*}(h) + k with h in the box span, k ∈ span(kinf).
    let mut solution = solve_correction(eq, bx.b, m_star, kinf, &g0)?;
    if solution.is_none() {
        // guard against a too-small search box before declaring obstruction
        solution = solve_correction(eq, 2 * bx.b, m_star, kinf, &g0)?;
    }
    let h = match solution {
        None => return Ok(LiftOutcome::Obstructed(g0)),
        Some(h) => h,
    };
    let lift = witt_sub(&ring, &pad, &bottom(eq, &h, l + 1))?;
    // verify F-nilpotency of the corrected lift
    let mut v = lift.clone();
    for _ in 0..(m_star + 8) {
        if is_zero_class(&v, eq)? {
            let lift = canonicalize(&lift, eq)?;
            return Ok(LiftOutcome::Lifts(lift));
        }
        v = witt_f(&ring, &v)?;
    }
    Err(Error::Internal(
        "corrected lift is not F-nilpotent".into(),
    ))
}

/// Find `h` (box span) with `g0 − F^{m}(h) ∈ span(kinf)`, if possible.
fn solve_correction(
    eq: &RdpEquation,
    b: u32,
    m: u32,
    kinf: &[LaurentPoly],
    g0: &LaurentPoly,
) -> Result<Option<LaurentPoly>> {
    let mut ech: Echelon<Mono> = Echelon::new(eq.p);
    for (i, k) in kinf.iter().enumerate() {
        ech.insert(poly_to_sv(k), i);
    }
    let off = kinf.len();
    let basis = Box { b }.basis(eq);
    for (i, &mono) in basis.iter().enumerate() {
        ech.insert(fpow_column(eq, mono, m)?, off + i);
    }
    let expr = match ech.solve(&poly_to_sv(g0)) {
        None => return Ok(None),
        Some(e) => e,
    };
    let mut h = LaurentPoly::zero(eq.p);
    for (&t, &c) in &expr {
        if t >= off {
            let (a, bb, cc) = basis[t - off];
            h = h.add(&LaurentPoly::monomial(eq.p, a, bb, cc, c))?;
        }
    }
    Ok(Some(h))
}

// ---------------------------------------------------------------------------
// The layered module computation
// ---------------------------------------------------------------------------

/// The stabilized colimit `lim_n H²_m(X, W_n O_X)[F^∞]`, presented at Witt
/// level `level` with an F_p coordinate basis: every element is uniquely
/// `⊞_i [c_i]·b_i` over the basis.  The F-action is componentwise p-power;
/// the V-action is the shift endomorphism (prepend 0, drop last).
pub struct ModuleData {
    pub level: usize,
    pub basis: Vec<WittVec<LaurentPoly>>,
    pub kinf: Vec<LaurentPoly>,
}

fn coords_of_index(p: u32, k: usize, mut idx: usize) -> Vec<u32> {
    let mut out = vec![0u32; k];
    for slot in out.iter_mut() {
        *slot = (idx % p as usize) as u32;
        idx /= p as usize;
    }
    out
}

fn combo_of(
    eq: &RdpEquation,
    basis: &[WittVec<LaurentPoly>],
    coords: &[u32],
) -> Result<WittVec<LaurentPoly>> {
    let ring = PolyRing { eq };
    let n = basis.first().map(|b| b.len()).unwrap_or(1);
    let mut acc = witt_zero(&ring, n);
    for (b, &c) in basis.iter().zip(coords) {
        if c != 0 {
            acc = witt_add(&ring, &acc, &witt_scale(&ring, c, b)?)?;
        }
    }
    Ok(acc)
}

/// Compute the colimit module by layered lifting.
///
/// Level 1 is `H²_m(O)[F^∞]`.  At each level the liftable subspace is an
/// F_p-subspace (restriction is additive); it is found by testing coefficient
/// tuples outside the span of the already-known liftable combinations, seeded
/// with the V-images of the previous level's lifts.  The next basis is the
/// V-image of the current one plus corrected lifts of a complement, and the
/// iteration stops when the dimension stalls (the transition is then an
/// isomorphism onto the colimit).
pub fn compute_module(eq: &RdpEquation, bx: &Box) -> Result<ModuleData> {
    let ring = PolyRing { eq };
    let kinf = f_infinity_kernel(eq, bx)?;
    let mut basis: Vec<WittVec<LaurentPoly>> = kinf
        .iter()
        .map(|g| teichmuller(&ring, g.clone(), 1))
        .collect();
    if basis.is_empty() {
        return Ok(ModuleData {
            level: 1,
            basis,
            kinf,
        });
    }
    // (coords over current basis, corrected lift at the next level)
    let mut liftable: Vec<(Vec<u32>, WittVec<LaurentPoly>)> = Vec::new();
    for level in 1..N_MAX {
        let k = basis.len();
        if k > BASIS_CAP {
            return Err(Error::Internal(format!(
                "module basis exceeded the enumeration cap ({k} > {BASIS_CAP})"
            )));
        }
        let mut ech: Echelon<usize> = Echelon::new(eq.p);
        let mut new_lifts: Vec<WittVec<LaurentPoly>> = Vec::new();
        let seeded = liftable.len();
        for (i, (coords, _)) in liftable.iter().enumerate() {
            let sv: SparseVec<usize> = coords
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(j, &c)| (j, c))
                .collect();
            ech.insert(sv, i);
        }
        let total = (eq.p as usize).pow(k as u32);
        for idx in 1..total {
            let coords = coords_of_index(eq.p, k, idx);
            let sv: SparseVec<usize> = coords
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(j, &c)| (j, c))
                .collect();
            if ech.solve(&sv).is_some() {
                continue;
            }
            let w = combo_of(eq, &basis, &coords)?;
            match lifting_obstruction_with(&w, eq, bx, &kinf)? {
                LiftOutcome::Lifts(lift) => {
                    ech.insert(sv, seeded + new_lifts.len());
                    new_lifts.push(lift.clone());
                    liftable.push((coords, lift));
                }
                LiftOutcome::Obstructed(_) => {}
            }
        }
        let mut next: Vec<WittVec<LaurentPoly>> = Vec::with_capacity(k + new_lifts.len());
        for b in &basis {
            next.push(crate::witt::witt_v(&ring, b));
        }
        next.extend(new_lifts);
        if next.len() == basis.len() {
            return Ok(ModuleData {
                level,
                basis,
                kinf,
            });
        }
        // prepare next level: V-images of all liftable elements seed the
        // liftable subspace one level up (their lifts are the V-images of
        // the stored lifts, landing in the first block of the new basis)
        let mut carried = Vec::with_capacity(liftable.len());
        for (coords, lift) in &liftable {
            let mut c2 = vec![0u32; next.len()];
            c2[..coords.len()].copy_from_slice(coords);
            carried.push((c2, crate::witt::witt_v(&ring, lift)));
        }
        liftable = carried;
        basis = next;
    }
    Err(Error::LevelCapExceeded { cap: N_MAX })
}

// ---------------------------------------------------------------------------
// Abstract module (coordinates, F/V index maps) for Dieudonné extraction
// ---------------------------------------------------------------------------

/// The computed module as a finite abelian group with F and V: elements are
/// indexed by F_p coefficient tuples over the basis (base-p digit order);
/// `f_of`/`v_of` give the actions as index maps and `add` composes
/// representatives.
pub struct AbstractModule<'a> {
    pub eq: &'a RdpEquation,
    pub dim: usize,
    pub level: usize,
    reps: Vec<WittVec<LaurentPoly>>,
    sig_to_idx: HashMap<Sig, usize>,
    pub f_of: Vec<usize>,
    pub v_of: Vec<usize>,
}

impl<'a> AbstractModule<'a> {
    pub fn p(&self) -> u32 {
        self.eq.p
    }

    pub fn size(&self) -> usize {
        self.reps.len()
    }

    pub fn add(&self, i: usize, j: usize) -> Result<usize> {
        let ring = PolyRing { eq: self.eq };
        let s = witt_add(&ring, &self.reps[i], &self.reps[j])?;
        let sig = class_signature(&s, self.eq)?;
        self.sig_to_idx
            .get(&sig)
            .copied()
            .ok_or_else(|| Error::Internal("sum escaped the module".into()))
    }
}

/// Enumerate all F_p-combinations of `basis` and index their signatures;
/// errors if two combinations collide (i.e. the basis is dependent).
fn combo_table(
    eq: &RdpEquation,
    basis: &[WittVec<LaurentPoly>],
) -> Result<(Vec<WittVec<LaurentPoly>>, HashMap<Sig, usize>)> {
    let ring = PolyRing { eq };
    let p = eq.p as usize;
    let n = basis.first().map(|b| b.len()).unwrap_or(1);
    let mut reps: Vec<WittVec<LaurentPoly>> = vec![witt_zero(&ring, n)];
    for b in basis {
        let mut next = Vec::with_capacity(reps.len() * p);
        for c in 0..p as u32 {
            let cb = witt_scale(&ring, c, b)?;
            for r in &reps {
                next.push(witt_add(&ring, r, &cb)?);
            }
        }
        reps = next;
    }
    // index order must be base-p digits over the basis: rebuild in that order
    // (the loop above grows the *most* significant digit last with the digit
    // outermost, so index = c_k·p^{k-1}·... — fix by construction below)
    let mut table = HashMap::with_capacity(reps.len());
    let mut ordered = Vec::with_capacity(reps.len());
    for idx in 0..reps.len() {
        // map digit-order index to the construction order used above:
        // construction index = Σ c_i · p^i with c_i the digit of basis i —
        // identical to base-p digit order, so no permutation is needed.
        let w = canonicalize(&reps[idx], eq)?;
        let sig = class_signature(&w, eq)?;
        if table.insert(sig, idx).is_some() {
            return Err(Error::Internal(
                "basis combinations collide; basis is dependent".into(),
            ));
        }
        ordered.push(w);
    }
    Ok((ordered, table))
}

/// Extract the abstract module (element table plus F/V index maps).
pub fn abstract_module<'a>(
    eq: &'a RdpEquation,
    data: &ModuleData,
) -> Result<AbstractModule<'a>> {
    let ring = PolyRing { eq };
    let (reps, sig_to_idx) = combo_table(eq, &data.basis)?;
    let mut f_of = Vec::with_capacity(reps.len());
    let mut v_of = Vec::with_capacity(reps.len());
    for r in &reps {
        let fr = witt_f(&ring, r)?;
        let sig = class_signature(&fr, eq)?;
        f_of.push(
            *sig_to_idx
                .get(&sig)
                .ok_or_else(|| Error::Internal("F-image escaped the module".into()))?,
        );
        let vr = witt_vend(&ring, r);
        let sig = class_signature(&vr, eq)?;
        v_of.push(
            *sig_to_idx
                .get(&sig)
                .ok_or_else(|| Error::Internal("V-image escaped the module".into()))?,
        );
    }
    Ok(AbstractModule {
        eq,
        dim: data.basis.len(),
        level: data.level,
        reps,
        sig_to_idx,
        f_of,
        v_of,
    })
}

// ---------------------------------------------------------------------------
// Labeled presentations (Teichmüller generators f_j^{(l)})
// ---------------------------------------------------------------------------

/// A Teichmüller generator label: `f_j^{(l)}`, the level-`l` lift of
/// `f_j = z/(x y^j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GenLabel {
    pub j: u32,
    pub l: u32,
}

/// A machine-verified presentation of the computed Dieudonné module.
#[derive(Serialize)]
pub struct DieuPresentation {
    pub eq: String,
    pub equation: String,
    pub generators: Vec<GenLabel>,
    pub relations: Vec<String>,
    pub length: usize,
    #[serde(skip)]
    pub level: usize,
    /// Representatives of the listed generators (same order).
    #[serde(skip)]
    pub gen_reps: Vec<WittVec<LaurentPoly>>,
}

/// `C(l, j) = 2^{l−1}(2j−1)`, the bijection between generator labels and
/// the D_n^r index set.
pub fn c_of(l: u32, j: u32) -> u32 {
    (1u32 << (l - 1)) * (2 * j - 1)
}

struct Chain {
    j: u32,
    depth: u32,
    /// levels[l−1] = representative of f_j^{(l)}
    levels: Vec<WittVec<LaurentPoly>>,
}

fn teichmuller_chains(eq: &RdpEquation, bx: &Box, data: &ModuleData) -> Result<Vec<Chain>> {
    let ring = PolyRing { eq };
    // level-1 kernel as an echelon for membership tests
    let mut kech: Echelon<Mono> = Echelon::new(eq.p);
    for (i, k) in data.kinf.iter().enumerate() {
        kech.insert(poly_to_sv(k), i);
    }
    let mut chains = Vec::new();
    for j in 1..=bx.b {
        let fj = LaurentPoly::monomial(eq.p, -1, -(j as i32), 1, 1);
        if kech.solve(&poly_to_sv(&fj)).is_none() {
            continue;
        }
        let mut levels = vec![teichmuller(&ring, fj, 1)];
        while levels.len() < data.level + 1 {
            let top = levels.last().unwrap();
            match lifting_obstruction_with(top, eq, bx, &data.kinf)? {
                LiftOutcome::Lifts(lift) => levels.push(lift),
                LiftOutcome::Obstructed(_) => break,
            }
        }
        chains.push(Chain {
            j,
            depth: levels.len() as u32,
            levels,
        });
    }
    let span: usize = chains.len();
    if span != data.kinf.len() {
        return Err(Error::Internal(format!(
            "monomial generators span {span} of the {} level-1 kernel dimensions",
            data.kinf.len()
        )));
    }
    let total: u32 = chains.iter().map(|c| c.depth).sum();
    if total as usize != data.basis.len() {
        return Err(Error::Internal(format!(
            "chain depths sum to {total}, module dimension is {}",
            data.basis.len()
        )));
    }
    Ok(chains)
}

fn render_term(p: u32, coeff: u32, vpow: u32, gidx: usize) -> String {
    let (sign, mag) = if coeff <= p / 2 {
        ("-", coeff)
    } else {
        ("+", p - coeff)
    };
    let mut term = String::new();
    if mag != 1 {
        term.push_str(&format!("{mag}*"));
    }
    match vpow {
        0 => {}
        1 => term.push_str("V*"),
        a => term.push_str(&format!("V^{a}*")),
    }
    term.push_str(&format!("g{gidx}"));
    format!(" {sign} {term}")
}

/// Compute the full labeled presentation for one singularity.
pub fn compute_dieu_presentation(eq: &RdpEquation, bx: &Box) -> Result<DieuPresentation> {
    let data = compute_module(eq, bx)?;
    presentation_from_module(eq, bx, &data)
}

pub fn presentation_from_module(
    eq: &RdpEquation,
    bx: &Box,
    data: &ModuleData,
) -> Result<DieuPresentation> {
    let ring = PolyRing { eq };
    if data.basis.is_empty() {
        return Ok(DieuPresentation {
            eq: eq.label(),
            equation: eq.equation_string(),
            generators: vec![],
            relations: vec![],
            length: 0,
            level: data.level,
            gen_reps: vec![],
        });
    }
    let chains = teichmuller_chains(eq, bx, data)?;
    let level = data.level;

    // descendant basis: every f_j^{(l)} embedded at the common level;
    // verify independence and build the coordinate table.
    let mut desc: Vec<WittVec<LaurentPoly>> = Vec::new();
    let mut desc_label: Vec<GenLabel> = Vec::new();
    for ch in &chains {
        for (li, rep) in ch.levels.iter().enumerate() {
            desc.push(witt_embed(&ring, rep, level));
            desc_label.push(GenLabel {
                j: ch.j,
                l: li as u32 + 1,
            });
        }
    }
    let (_, coord_table) = combo_table(eq, &desc)?;
    let coords_of = |w: &WittVec<LaurentPoly>| -> Result<Vec<u32>> {
        let sig = class_signature(w, eq)?;
        let idx = *coord_table
            .get(&sig)
            .ok_or_else(|| Error::Internal("class outside the generated module".into()))?;
        Ok(coords_of_index(eq.p, desc.len(), idx))
    };

    let mut generators: Vec<GenLabel> = Vec::new();
    let mut gen_reps: Vec<WittVec<LaurentPoly>> = Vec::new();
    let mut relations: Vec<String> = Vec::new();

    if eq.family == Family::D {
        // Table 3 style for D_n^r: every f_j^{(l)} is listed, ordered by
        // C(l, j).
        let mut order: Vec<usize> = (0..desc.len()).collect();
        order.sort_by_key(|&i| c_of(desc_label[i].l, desc_label[i].j));
        let pos_of: HashMap<(u32, u32), usize> = order
            .iter()
            .enumerate()
            .map(|(pos, &i)| ((desc_label[i].j, desc_label[i].l), pos))
            .collect();
        for &i in &order {
            generators.push(desc_label[i]);
            gen_reps.push(desc[i].clone());
        }
        for (pos, &i) in order.iter().enumerate() {
            let GenLabel { j, l } = desc_label[i];
            if l == 1 {
                relations.push(format!("V*g{pos}"));
            } else {
                let below = pos_of[&(j, l - 1)];
                relations.push(format!("V*g{pos} - g{below}"));
            }
            let fw = witt_f(&ring, &desc[i])?;
            let c = coords_of(&fw)?;
            let mut rel = format!("F*g{pos}");
            for (t, &ct) in c.iter().enumerate() {
                if ct != 0 {
                    let lbl = desc_label[t];
                    rel.push_str(&render_term(eq.p, ct, 0, pos_of[&(lbl.j, lbl.l)]));
                }
            }
            relations.push(rel);
        }
    } else {
        // E style: only chain tops are generators; relations express F of
        // each top and the V-depth.
        let mut desc_owner: Vec<(usize, u32)> = Vec::new(); // (gen index, V-power)
        for (gi, ch) in chains.iter().enumerate() {
            for li in 0..ch.levels.len() {
                desc_owner.push((gi, ch.depth - 1 - li as u32));
            }
        }
        for ch in &chains {
            generators.push(GenLabel {
                j: ch.j,
                l: ch.depth,
            });
            gen_reps.push(witt_embed(&ring, ch.levels.last().unwrap(), level));
        }
        for (gi, rep) in gen_reps.iter().enumerate() {
            let fw = witt_f(&ring, rep)?;
            let c = coords_of(&fw)?;
            let mut rel = format!("F*g{gi}");
            for (t, &ct) in c.iter().enumerate() {
                if ct != 0 {
                    let (owner, vpow) = desc_owner[t];
                    rel.push_str(&render_term(eq.p, ct, vpow, owner));
                }
            }
            relations.push(rel);
            relations.push(match generators[gi].l {
                1 => format!("V*g{gi}"),
                d => format!("V^{d}*g{gi}"),
            });
        }
    }

    Ok(DieuPresentation {
        eq: eq.label(),
        equation: eq.equation_string(),
        generators,
        relations,
        length: desc.len(),
        level,
        gen_reps,
    })
}

/// Exhaustive independence check: every nonzero F_p-combination of the given
/// classes and their V-shift descendants is a nonzero class.
pub fn verify_independence(gens: &[WittVec<LaurentPoly>], eq: &RdpEquation) -> Result<bool> {
    let ring = PolyRing { eq };
    let mut desc: Vec<WittVec<LaurentPoly>> = Vec::new();
    for g in gens {
        let mut cur = g.clone();
        loop {
            if is_zero_class(&cur, eq)? {
                break;
            }
            desc.push(cur.clone());
            cur = witt_vend(&ring, &cur);
        }
    }
    if desc.len() > BASIS_CAP {
        return Err(Error::Internal("too many descendants to enumerate".into()));
    }
    let total = (eq.p as usize).pow(desc.len() as u32);
    for idx in 1..total {
        let coords = coords_of_index(eq.p, desc.len(), idx);
        let w = combo_of(eq, &desc, &coords)?;
        if is_zero_class(&w, eq)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rdp_equation;
    use crate::witt::teichmuller;

    fn tau1(eq: &RdpEquation, a: i32, b: i32, c: u16) -> WittVec<LaurentPoly> {
        let ring = PolyRing { eq };
        teichmuller(&ring, LaurentPoly::monomial(eq.p, a, b, c, 1), 1)
    }

    #[test]
    fn normal_form_examples() {
        let eq = rdp_equation(5, Family::E8, 8, Some(0)).unwrap();
        // x^{-1} y^2 lies in R[x^{-1}]
        assert!(is_zero_class(&tau1(&eq, -1, 2, 0), &eq).unwrap());
        // f_1 = z/(xy) is a nonzero class with normal form f_{1,1}
        let f1 = tau1(&eq, -1, -1, 1);
        let nf = normal_form(&f1, &eq).unwrap();
        assert_eq!(nf[0].coeff(&(-1, -1, 1)), 1);
        assert_eq!(nf[0].num_terms(), 1);
        // (z/xy)^5 is a boundary
        let ring = PolyRing { eq: &eq };
        let ff1 = witt_f(&ring, &f1).unwrap();
        assert!(is_zero_class(&ff1, &eq).unwrap());
    }

    #[test]
    fn w1_matrix_d_row() {
        // (2, D, 10, r2=2): F(e_{1,1}) = e_{2,2}; F(f_{1,1}) = 0
        let eq = rdp_equation(2, Family::D, 10, Some(2)).unwrap();
        let col = fpow_column(&eq, (-1, -1, 0), 1).unwrap();
        assert_eq!(col.len(), 1);
        assert_eq!(col.get(&(-2, -2, 0)), Some(&1));
        let col = fpow_column(&eq, (-1, -1, 1), 1).unwrap();
        assert!(col.is_empty());
    }

    #[test]
    fn kernels_and_injectivity() {
        let bx = |eq: &RdpEquation| Box::default_for(eq);
        let e85 = rdp_equation(5, Family::E8, 8, Some(0)).unwrap();
        let k = f_infinity_kernel(&e85, &bx(&e85)).unwrap();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0].coeff(&(-1, -1, 1)), 1);

        let e6 = rdp_equation(2, Family::E6, 6, Some(2)).unwrap();
        assert!(f_injective(&e6, &bx(&e6)).unwrap());
        assert!(f_infinity_kernel(&e6, &bx(&e6)).unwrap().is_empty());

        let d10 = rdp_equation(2, Family::D, 10, Some(2)).unwrap();
        let k = f_infinity_kernel(&d10, &bx(&d10)).unwrap();
        assert_eq!(k.len(), 2); // f_1 and f_2

        let e7 = rdp_equation(2, Family::E7, 7, Some(0)).unwrap();
        assert!(!f_injective(&e7, &bx(&e7)).unwrap());

        let d12 = rdp_equation(2, Family::D, 12, Some(10)).unwrap();
        assert!(f_injective(&d12, &bx(&d12)).unwrap()); // r = m−1
    }

    #[test]
    fn lifting_examples() {
        // (3, E6, 6, 0): f_1 is obstructed with g = −f_{3,1}
        let eq = rdp_equation(3, Family::E6, 6, Some(0)).unwrap();
        let bx = Box::default_for(&eq);
        let f1 = tau1(&eq, -1, -1, 1);
        match lifting_obstruction(&f1, &eq, &bx).unwrap() {
            LiftOutcome::Obstructed(g) => {
                assert_eq!(g.coeff(&(-3, -1, 1)), 2); // −1 mod 3
                assert_eq!(g.num_terms(), 1);
            }
            LiftOutcome::Lifts(_) => panic!("expected obstruction"),
        }

        // (5, E8, 8, 0): obstructed with g = −f_5
        let eq = rdp_equation(5, Family::E8, 8, Some(0)).unwrap();
        let bx = Box::default_for(&eq);
        let f1 = tau1(&eq, -1, -1, 1);
        match lifting_obstruction(&f1, &eq, &bx).unwrap() {
            LiftOutcome::Obstructed(g) => {
                assert_eq!(g.coeff(&(-1, -5, 1)), 4);
                assert_eq!(g.num_terms(), 1);
            }
            LiftOutcome::Lifts(_) => panic!("expected obstruction"),
        }

        // (2, E7, 7, 0): f_1 lifts twice, f_1^{(3)} is obstructed
        let eq = rdp_equation(2, Family::E7, 7, Some(0)).unwrap();
        let bx = Box::default_for(&eq);
        let f1 = tau1(&eq, -1, -1, 1);
        let l2 = match lifting_obstruction(&f1, &eq, &bx).unwrap() {
            LiftOutcome::Lifts(l) => l,
            _ => panic!("f_1 should lift"),
        };
        let l3 = match lifting_obstruction(&l2, &eq, &bx).unwrap() {
            LiftOutcome::Lifts(l) => l,
            _ => panic!("f_1^{{(2)}} should lift"),
        };
        assert!(matches!(
            lifting_obstruction(&l3, &eq, &bx).unwrap(),
            LiftOutcome::Obstructed(_)
        ));
    }

    #[test]
    fn presentation_e8_1_char2() {
        let eq = rdp_equation(2, Family::E8, 8, Some(2)).unwrap();
        let bx = Box::default_for(&eq);
        let pres = compute_dieu_presentation(&eq, &bx).unwrap();
        assert_eq!(pres.length, 4);
        assert_eq!(
            pres.generators,
            vec![GenLabel { j: 1, l: 3 }, GenLabel { j: 2, l: 1 }]
        );
        assert!(pres.relations.contains(&"F*g1 - V^2*g0".to_string()));
        assert!(pres.relations.contains(&"F*g0".to_string()));
        assert!(pres.relations.contains(&"V^3*g0".to_string()));
        assert!(pres.relations.contains(&"V*g1".to_string()));
        assert!(verify_independence(&pres.gen_reps, &eq).unwrap());
    }

    #[test]
    fn presentation_d10_1() {
        let eq = rdp_equation(2, Family::D, 10, Some(2)).unwrap();
        let bx = Box::default_for(&eq);
        let pres = compute_dieu_presentation(&eq, &bx).unwrap();
        assert_eq!(pres.length, 4);
        let labels: Vec<(u32, u32)> = pres.generators.iter().map(|g| (g.j, g.l)).collect();
        assert_eq!(labels, vec![(1, 1), (1, 2), (2, 1), (1, 3)]);
        // F(f_1^{(3)}) = f_{C(3,1)−3} = f_1: generator order is by C, so
        // g3 = f_1^{(3)} and g0 = f_1.
        assert!(pres.relations.contains(&"F*g3 - g0".to_string()));
        assert!(pres.relations.contains(&"V*g3 - g1".to_string()));
    }
}
