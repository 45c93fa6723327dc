//! Machine-verified reproductions of the paper's tables.
//!
//! * Table 1 — the F-injectivity column, recomputed from the Frobenius
//!   action on `H^2_m(X, O_X)` ([`finj_report`]).
//! * Table 2 — the `Picloc^{loc,loc}` column, recomputed through the full
//!   Witt-vector pipeline and identified against the named group schemes
//!   ([`table2_locloc`]); the `π_ét` and `Cl` columns are *literature data*
//!   (Artin's fundamental groups, Lipman's class groups), embedded read-only
//!   and merged for display.
//! * Table 3 — generators, relations and lengths of the Dieudonné modules
//!   ([`verify_table3`]).
//! * The §6.5 coincidence `length M[F] = r_max − r` ([`coincidence_check`]).
//!
//! Reports serialize to JSON with a fixed field order and no
//! machine-dependent content (timings are text-only), so identical inputs
//! produce byte-identical JSON.  Rows are evaluated in parallel and merged
//! in input order.

use crate::algebra::{catalog_rows, rdp_equation, Family, RdpEquation};
use crate::cohomology::{
    abstract_module, c_of, compute_module, f_injective, presentation_from_module,
    verify_independence, Box, DieuPresentation, GenLabel,
};
use crate::dieudonne::{
    from_abstract, identify_with, invariant_profile, DieuModule, GroupSchemeId,
};
use crate::dnr::{valid_r2, DnrModel};
use crate::error::Result;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
}

/// One verified row of Table 2 or Table 3.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableRowReport {
    pub label: String,
    pub equation: String,
    pub length: u32,
    pub generators: Vec<String>,
    pub relations: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub identified: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub expected_length: Option<u32>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub expected_relations: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub expected_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pi_et: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cl: Option<String>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub diff: Vec<String>,
    #[serde(skip, default)]
    pub millis: u64,
}

/// The embedded `π_ét` / `Cl` columns of Table 2 (Artin resp. Lipman via the
/// paper; never computed, never consumed by a verdict).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LiteratureRow {
    pub pi_et: String,
    pub cl: String,
}

fn prime_to_p_part(mut n: u32, p: u32) -> u32 {
    while n % p == 0 {
        n /= p;
    }
    n
}

pub fn literature(eq: &RdpEquation) -> LiteratureRow {
    let p = eq.p;
    let cyc = |k: u32| {
        if k == 1 {
            "0".to_string()
        } else {
            format!("C_{k}")
        }
    };
    let (pi_et, cl) = match eq.family {
        Family::A => (
            cyc(prime_to_p_part(eq.n + 1, p)),
            cyc(eq.n + 1),
        ),
        Family::D => {
            let cl = if eq.n % 2 == 0 { "C_2^2" } else { "C_4" }.to_string();
            if p != 2 {
                (format!("BD_{}", prime_to_p_part(4 * (eq.n - 2), p)), cl)
            } else {
                let r2 = eq.r2().unwrap();
                let pi = if 2 * r2 > eq.n {
                    format!("D_{}", 2 * prime_to_p_part(2 * r2 - eq.n, 2))
                } else if 2 * r2 == eq.n {
                    "C_2".to_string()
                } else {
                    "0".to_string()
                };
                (pi, cl)
            }
        }
        Family::E6 => match (p, eq.r2()) {
            (3, Some(2)) => ("C_3".into(), "C_3".into()),
            (3, Some(_)) => ("0".into(), "C_3".into()),
            (2, Some(2)) => ("C_6".into(), "C_3".into()),
            (2, Some(_)) => ("C_3".into(), "C_3".into()),
            _ => ("BT_24".into(), "C_3".into()),
        },
        Family::E7 => match (p, eq.r2()) {
            (3, Some(2)) => ("C_6".into(), "C_2".into()),
            (3, Some(_)) => ("C_2".into(), "C_2".into()),
            (2, Some(6)) => ("C_4".into(), "C_2".into()),
            (2, Some(_)) => ("0".into(), "C_2".into()),
            _ => ("BO_48".into(), "C_2".into()),
        },
        Family::E8 => match (p, eq.r2()) {
            (5, Some(2)) => ("C_5".into(), "0".into()),
            (5, Some(_)) => ("0".into(), "0".into()),
            (3, Some(4)) => ("BT_24".into(), "0".into()),
            (3, Some(_)) => ("0".into(), "0".into()),
            (2, Some(8)) => ("Dic_12".into(), "0".into()),
            (2, Some(4)) => ("C_2".into(), "0".into()),
            (2, Some(_)) => ("0".into(), "0".into()),
            _ => ("BI_120".into(), "0".into()),
        },
    };
    LiteratureRow { pi_et, cl }
}

/// `2·r_max` for the (family, characteristic) pair, derived from the span of
/// co-indices in the equation catalog (Table 1 row counts), not hard-coded.
/// Zero exactly for the taut rows.
pub fn r_max2(p: u32, family: Family, n: u32) -> u32 {
    match family {
        Family::A => 0,
        Family::D => {
            if p == 2 {
                // co-indices 2r ∈ {n mod 2, …, n−2}; the coincidence uses
                // the count-based r_max = (n−2)/2 (classes − 1 resp. − 1/2)
                n - 2
            } else {
                0
            }
        }
        _ => catalog_rows(p, 0, 3)
            .iter()
            .filter(|eq| eq.family == family)
            .filter_map(|eq| eq.r2())
            .max()
            .unwrap_or(0),
    }
}

fn pick_box(eq: &RdpEquation, over: Option<u32>) -> Result<Box> {
    match over {
        Some(b) => Box::new(b),
        None => Ok(Box::default_for(eq)),
    }
}

fn gen_name(g: &GenLabel) -> String {
    if g.l == 1 {
        format!("f_{}", g.j)
    } else {
        format!("f_{}^({})", g.j, g.l)
    }
}

// ---------------------------------------------------------------------------
// Table 3
// ---------------------------------------------------------------------------

struct Table3Expected {
    gens: Vec<(u32, u32)>, // (j, l)
    rels: Vec<String>,
    length: u32,
}

/// The thirteen non-F-injective E-rows of Table 3, with relations in the
/// renderer's canonical spelling (`F*g0 - V*g0` means `F(g0) = V(g0)`).
fn table3_expected_e(p: u32, family: Family, r2: u32) -> Option<Table3Expected> {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let (gens, rels, length) = match (p, family, r2 / 2) {
        (5, Family::E8, 0) | (3, Family::E6, 0) | (3, Family::E7, 0) | (2, Family::E6, 0) => {
            (vec![(1, 1)], s(&["F*g0", "V*g0"]), 1)
        }
        // The computed relation is F − V ≡ 0 (with the pinned Teichmüller
        // generator), matching M_2 = L_{2,2}[F−V]; the reference table's
        // `(F + V) ≡ 0` spelling is the twisted form, isomorphic to this one
        // only after base change to F_9 (harmless over k̄).
        (3, Family::E8, 1) => (vec![(1, 2)], s(&["F*g0 - V*g0", "V^2*g0"]), 2),
        (3, Family::E8, 0) => (vec![(1, 2)], s(&["F*g0", "V^2*g0"]), 2),
        (2, Family::E7, 2) => (vec![(1, 2)], s(&["F*g0 - V*g0", "V^2*g0"]), 2),
        (2, Family::E7, 1) => (vec![(1, 3)], s(&["F*g0 - V^2*g0", "V^3*g0"]), 3),
        (2, Family::E7, 0) => (vec![(1, 3)], s(&["F*g0", "V^3*g0"]), 3),
        (2, Family::E8, 3) => (vec![(1, 3)], s(&["F*g0 - V*g0", "V^3*g0"]), 3),
        (2, Family::E8, 2) => (vec![(1, 3)], s(&["F*g0 - V^2*g0", "V^3*g0"]), 3),
        (2, Family::E8, 1) => (
            vec![(1, 3), (2, 1)],
            s(&["F*g0", "V^3*g0", "F*g1 - V^2*g0", "V*g1"]),
            4,
        ),
        (2, Family::E8, 0) => (
            vec![(1, 3), (2, 1)],
            s(&["F*g0", "V^3*g0", "F*g1", "V*g1"]),
            4,
        ),
        _ => return None,
    };
    Some(Table3Expected { gens, rels, length })
}

/// The D_n^r row of Table 3, generated from the closed form: generators
/// `f_j^{(l)}` with `C(l, j) ≤ L_n^r` ordered by `C` (so position `x − 1`
/// holds the label with `C(l, j) = x`), relations
/// `V(f_j^{(l)}) = f_j^{(l−1)}` and `F(f_j^{(l)}) = f_{2C−T}^{(1)}` in the
/// model coordinate `x' = 2x − T`, `T = n − 2r − 1`.
fn table3_expected_d(n: u32, r2: u32) -> Result<Table3Expected> {
    let model = DnrModel::new(n, r2)?;
    let label_of = |x: u32| -> (u32, u32) {
        let l = x.trailing_zeros() + 1;
        let j = ((x >> (l - 1)) + 1) / 2;
        (j, l)
    };
    let mut gens = Vec::new();
    let mut rels = Vec::new();
    for x in model.s() {
        let (j, l) = label_of(x);
        debug_assert_eq!(c_of(l, j), x);
        let pos = x - 1;
        gens.push((j, l));
        if l == 1 {
            rels.push(format!("V*g{pos}"));
        } else {
            rels.push(format!("V*g{pos} - g{}", x / 2 - 1));
        }
        let fx = model.f_map(x);
        if fx == 0 {
            rels.push(format!("F*g{pos}"));
        } else {
            rels.push(format!("F*g{pos} - g{}", fx - 1));
        }
    }
    Ok(Table3Expected {
        gens,
        rels,
        length: model.l,
    })
}

fn table3_expected(eq: &RdpEquation) -> Result<Table3Expected> {
    if eq.family == Family::D {
        table3_expected_d(eq.n, eq.r2().unwrap())
    } else {
        table3_expected_e(eq.p, eq.family, eq.r2().unwrap_or(0)).ok_or_else(|| {
            crate::error::Error::Internal(format!("{} is not a Table 3 row", eq.label()))
        })
    }
}

/// The thirteen non-F-injective E-rows, in the paper's order.
pub fn table3_e_rows() -> Vec<RdpEquation> {
    let spec: &[(u32, Family, u32)] = &[
        (5, Family::E8, 0),
        (3, Family::E6, 0),
        (3, Family::E7, 0),
        (3, Family::E8, 2),
        (3, Family::E8, 0),
        (2, Family::E6, 0),
        (2, Family::E7, 4),
        (2, Family::E7, 2),
        (2, Family::E7, 0),
        (2, Family::E8, 6),
        (2, Family::E8, 4),
        (2, Family::E8, 2),
        (2, Family::E8, 0),
    ];
    spec.iter()
        .map(|&(p, fam, r2)| {
            let n = match fam {
                Family::E6 => 6,
                Family::E7 => 7,
                _ => 8,
            };
            rdp_equation(p, fam, n, Some(r2)).unwrap()
        })
        .collect()
}

/// All non-F-injective `D_n^r` rows (p = 2) with `4 ≤ n ≤ n_max`.
pub fn table3_d_rows(n_max: u32) -> Vec<RdpEquation> {
    let mut out = Vec::new();
    for n in 4..=n_max {
        for r2 in valid_r2(n) {
            if r2 == n - 2 {
                continue; // F-injective boundary, zero module
            }
            out.push(rdp_equation(2, Family::D, n, Some(r2)).unwrap());
        }
    }
    out
}

fn chain_tops(pres: &DieuPresentation) -> Vec<usize> {
    (0..pres.generators.len())
        .filter(|&i| {
            let g = pres.generators[i];
            !pres
                .generators
                .iter()
                .any(|h| h.j == g.j && h.l == g.l + 1)
        })
        .collect()
}

fn verify_table3_row(eq: &RdpEquation, over: Option<u32>) -> Result<TableRowReport> {
    let start = Instant::now();
    let bx = pick_box(eq, over)?;
    let expected = table3_expected(eq)?;
    let data = compute_module(eq, &bx)?;
    let pres = presentation_from_module(eq, &bx, &data)?;
    let mut diff = Vec::new();
    if pres.length as u32 != expected.length {
        diff.push(format!(
            "length: computed {}, expected {}",
            pres.length, expected.length
        ));
    }
    let comp_gens: Vec<(u32, u32)> = pres.generators.iter().map(|g| (g.j, g.l)).collect();
    if comp_gens != expected.gens {
        diff.push(format!(
            "generators: computed {comp_gens:?}, expected {:?}",
            expected.gens
        ));
    }
    if pres.relations != expected.rels {
        diff.push(format!(
            "relations: computed {:?}, expected {:?}",
            pres.relations, expected.rels
        ));
    }
    let tops: Vec<_> = chain_tops(&pres)
        .into_iter()
        .map(|i| pres.gen_reps[i].clone())
        .collect();
    if !verify_independence(&tops, eq)? {
        diff.push("independence check failed".into());
    }
    Ok(TableRowReport {
        label: eq.label(),
        equation: eq.equation_string(),
        length: pres.length as u32,
        generators: pres.generators.iter().map(gen_name).collect(),
        relations: pres.relations.clone(),
        identified: None,
        expected_length: Some(expected.length),
        expected_relations: expected.rels,
        expected_id: None,
        pi_et: None,
        cl: None,
        verdict: if diff.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        diff,
        millis: start.elapsed().as_millis() as u64,
    })
}

/// Verify a selection of Table 3 rows; failures are collected per row, never
/// aborting the remaining rows.
pub fn verify_table3(rows: &[RdpEquation], over: Option<u32>) -> Result<Vec<TableRowReport>> {
    rows.par_iter()
        .map(|eq| verify_table3_row(eq, over))
        .collect()
}

// ---------------------------------------------------------------------------
// Table 2
// ---------------------------------------------------------------------------

/// The expected `Picloc^{loc,loc}` column of Table 2.
pub fn table2_expected(eq: &RdpEquation) -> GroupSchemeId {
    use GroupSchemeId::*;
    match eq.family {
        Family::A => Zero,
        Family::D => {
            if eq.p == 2 {
                GNR(eq.n, eq.r2().unwrap())
            } else {
                Zero
            }
        }
        Family::E6 => match (eq.p, eq.r2()) {
            (3, Some(0)) | (2, Some(0)) => AlphaP(1),
            _ => Zero,
        },
        Family::E7 => match (eq.p, eq.r2()) {
            (3, Some(0)) => AlphaP(1),
            (2, Some(4)) => M(2),
            (2, Some(2)) => LKernel(2, 3, "V+F^2".into()),
            (2, Some(0)) => AlphaP(3),
            _ => Zero,
        },
        Family::E8 => match (eq.p, eq.r2()) {
            (5, Some(0)) => AlphaP(1),
            (3, Some(2)) => M(2),
            (3, Some(0)) => AlphaP(2),
            (2, Some(6)) => M(3),
            (2, Some(4)) => LKernel(2, 3, "V+F^2".into()),
            (2, Some(2)) => LKernel(2, 3, "p".into()),
            (2, Some(0)) => Product(vec![AlphaP(1), AlphaP(3)]),
            _ => Zero,
        },
    }
}

/// Compute the module of a single row through the full pipeline.
pub fn computed_dieu_module(eq: &RdpEquation, over: Option<u32>) -> Result<DieuModule> {
    let bx = pick_box(eq, over)?;
    let data = compute_module(eq, &bx)?;
    if data.basis.is_empty() {
        return Ok(DieuModule {
            p: eq.p,
            exponent: 0,
            orders: vec![],
            f: vec![],
            v: vec![],
        });
    }
    let am = abstract_module(eq, &data)?;
    from_abstract(&am)
}

fn table2_row(eq: &RdpEquation, over: Option<u32>) -> Result<TableRowReport> {
    let start = Instant::now();
    let expected = table2_expected(eq);
    let lit = literature(eq);
    let m = computed_dieu_module(eq, over)?;
    let mut diff = Vec::new();
    let identified = if eq.family == Family::D && eq.p == 2 {
        // verified against the combinatorial model, displayed as G_n^r
        let model = DnrModel::new(eq.n, eq.r2().unwrap())?.build_module()?;
        identify_with(&m, &[(expected.clone(), model)])?
    } else {
        identify_with(&m, &[])?
    };
    let ok = match (&expected, &identified) {
        // the F-injective D-boundary has G_n^r = 0
        (GroupSchemeId::GNR(n, r2), GroupSchemeId::Zero) => {
            DnrModel::new(*n, *r2)?.l == 0
        }
        (e, c) => e == c,
    };
    if !ok {
        diff.push(format!(
            "identified {}, expected {}",
            identified.notation(eq.p),
            expected.notation(eq.p)
        ));
    }
    Ok(TableRowReport {
        label: eq.label(),
        equation: eq.equation_string(),
        length: m.length(),
        generators: vec![],
        relations: vec![],
        identified: Some(identified.notation(eq.p)),
        expected_length: None,
        expected_relations: vec![],
        expected_id: Some(expected.notation(eq.p)),
        pi_et: Some(lit.pi_et),
        cl: Some(lit.cl),
        verdict: if diff.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        diff,
        millis: start.elapsed().as_millis() as u64,
    })
}

/// The Table 2 row set for one characteristic (`A_n` up to `max_a`, `D_n`
/// up to `max_d`, all E-rows).
pub fn table2_rows(p: u32, max_a: u32, max_d: u32) -> Vec<RdpEquation> {
    catalog_rows(p, max_a, max_d)
}

/// Verify the `Picloc^{loc,loc}` column, merging the literature columns for
/// display.
pub fn table2_locloc(rows: &[RdpEquation], over: Option<u32>) -> Result<Vec<TableRowReport>> {
    rows.par_iter().map(|eq| table2_row(eq, over)).collect()
}

// ---------------------------------------------------------------------------
// Table 1 (F-injectivity)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FinjRowReport {
    pub label: String,
    pub equation: String,
    pub computed: bool,
    pub expected: bool,
    pub verdict: Verdict,
    #[serde(skip, default)]
    pub millis: u64,
}

/// The Table 1 verdict: F-injective iff the row is at its maximal co-index
/// (taut rows always; `D_n^r` p = 2 iff `r = m−1` resp. `m−1/2`,
/// i.e. `2r = n−2`).
pub fn finj_expected(eq: &RdpEquation) -> bool {
    match eq.r2() {
        None => true,
        Some(r2) => r2 == r_max2(eq.p, eq.family, eq.n),
    }
}

pub fn finj_report(rows: &[RdpEquation], over: Option<u32>) -> Result<Vec<FinjRowReport>> {
    rows.par_iter()
        .map(|eq| {
            let start = Instant::now();
            let bx = pick_box(eq, over)?;
            let computed = f_injective(eq, &bx)?;
            let expected = finj_expected(eq);
            Ok(FinjRowReport {
                label: eq.label(),
                equation: eq.equation_string(),
                computed,
                expected,
                verdict: if computed == expected {
                    Verdict::Pass
                } else {
                    Verdict::Fail
                },
                millis: start.elapsed().as_millis() as u64,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// §6.5 coincidence
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoincidenceRow {
    pub label: String,
    pub dim_m_f: u32,
    pub expected: u32,
    pub verdict: Verdict,
    #[serde(skip, default)]
    pub millis: u64,
}

/// `length M[F]`, read off the invariant profile.
pub fn dim_m_f(m: &DieuModule) -> Result<u32> {
    let prof = invariant_profile(m, 1)?;
    Ok(prof
        .words
        .iter()
        .find(|(w, _)| *w == (1, 0))
        .map(|(_, (ker, _))| *ker)
        .unwrap_or(0))
}

fn coincidence_row(eq: &RdpEquation, m: &DieuModule) -> Result<CoincidenceRow> {
    let start = Instant::now();
    let r2 = eq.r2().unwrap_or(0);
    let expected = (r_max2(eq.p, eq.family, eq.n) - r2) / 2;
    let dim = dim_m_f(m)?;
    Ok(CoincidenceRow {
        label: eq.label(),
        dim_m_f: dim,
        expected,
        verdict: if dim == expected {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        millis: start.elapsed().as_millis() as u64,
    })
}

/// Check `length M[F] = r_max − r` across all co-indices of one
/// (family, characteristic) pair.  E- and A-rows go through the cohomology
/// pipeline; `D_n^r` rows (p = 2, `4 ≤ n ≤ d_max`) use the combinatorial
/// model, whose profile is bridged to the cohomology side separately.
pub fn coincidence_check(
    family: Family,
    p: u32,
    d_max: u32,
    over: Option<u32>,
) -> Result<Vec<CoincidenceRow>> {
    if family == Family::D && p == 2 {
        let mut rows = Vec::new();
        for n in 4..=d_max {
            for r2 in valid_r2(n) {
                rows.push((n, r2));
            }
        }
        return rows
            .par_iter()
            .map(|&(n, r2)| {
                let eq = rdp_equation(2, Family::D, n, Some(r2))?;
                let m = DnrModel::new(n, r2)?.build_module()?;
                coincidence_row(&eq, &m)
            })
            .collect();
    }
    let max_a = if family == Family::A { 4 } else { 0 };
    let max_d = if family == Family::D { d_max.min(8) } else { 0 };
    let rows: Vec<RdpEquation> = catalog_rows(p, max_a, max_d)
        .into_iter()
        .filter(|eq| eq.family == family)
        .collect();
    rows.par_iter()
        .map(|eq| {
            let m = computed_dieu_module(eq, over)?;
            coincidence_row(eq, &m)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

pub fn to_json<T: Serialize>(rows: &T) -> Result<String> {
    serde_json::to_string_pretty(rows)
        .map_err(|e| crate::error::Error::Internal(format!("serialization: {e}")))
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "FAIL",
    }
}

/// Plain-text table mirroring the paper's layout.
pub fn render_table_rows(rows: &[TableRowReport]) -> String {
    let mut out = String::new();
    for r in rows {
        let body = if let Some(id) = &r.identified {
            format!(
                "{:<28} pi_et: {:<10} Cl: {:<6}",
                format!(
                    "{} (expected {})",
                    id,
                    r.expected_id.as_deref().unwrap_or("-")
                ),
                r.pi_et.as_deref().unwrap_or("-"),
                r.cl.as_deref().unwrap_or("-"),
            )
        } else {
            format!(
                "gens [{}]  rels [{}]",
                r.generators.join(", "),
                r.relations.join(", ")
            )
        };
        out.push_str(&format!(
            "{:<10} len {:<3} {}  [{}] ({} ms)\n",
            r.label,
            r.length,
            body,
            verdict_str(r.verdict),
            r.millis
        ));
        for d in &r.diff {
            out.push_str(&format!("           diff: {d}\n"));
        }
    }
    out
}

pub fn render_finj_rows(rows: &[FinjRowReport]) -> String {
    let mut out = String::new();
    for r in rows {
        out.push_str(&format!(
            "{:<10} F-injective: {:<5} expected: {:<5} [{}] ({} ms)\n",
            r.label, r.computed, r.expected, verdict_str(r.verdict), r.millis
        ));
    }
    out
}

pub fn render_coincidence_rows(rows: &[CoincidenceRow]) -> String {
    let mut out = String::new();
    for r in rows {
        out.push_str(&format!(
            "{:<10} dim M[F] = {:<3} r_max - r = {:<3} [{}] ({} ms)\n",
            r.label, r.dim_m_f, r.expected, verdict_str(r.verdict), r.millis
        ));
    }
    out
}

pub fn all_pass_table(rows: &[TableRowReport]) -> bool {
    rows.iter().all(|r| r.verdict == Verdict::Pass)
}

pub fn all_pass_finj(rows: &[FinjRowReport]) -> bool {
    rows.iter().all(|r| r.verdict == Verdict::Pass)
}

pub fn all_pass_coincidence(rows: &[CoincidenceRow]) -> bool {
    rows.iter().all(|r| r.verdict == Verdict::Pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literature_rows() {
        let a5 = rdp_equation(2, Family::A, 5, None).unwrap();
        let lit = literature(&a5);
        assert_eq!(lit.pi_et, "C_3"); // (5+1)' = 3 at p = 2
        assert_eq!(lit.cl, "C_6");
        let d10 = rdp_equation(2, Family::D, 10, Some(8)).unwrap();
        let lit = literature(&d10);
        assert_eq!(lit.pi_et, "D_6"); // 4r = 16 > 10, (16-10)' = 3
        assert_eq!(lit.cl, "C_2^2");
        let d10 = rdp_equation(2, Family::D, 10, Some(2)).unwrap();
        assert_eq!(literature(&d10).pi_et, "0"); // 4r = 4 < 10
        let e8 = rdp_equation(7, Family::E8, 8, None).unwrap();
        assert_eq!(literature(&e8).pi_et, "BI_120");
        assert_eq!(literature(&e8).cl, "0");
    }

    #[test]
    fn r_max_and_finj_expected() {
        assert_eq!(r_max2(2, Family::E8, 8), 8);
        assert_eq!(r_max2(3, Family::E8, 8), 4);
        assert_eq!(r_max2(5, Family::E8, 8), 2);
        assert_eq!(r_max2(2, Family::E7, 7), 6);
        assert_eq!(r_max2(3, Family::E6, 6), 2);
        assert_eq!(r_max2(2, Family::D, 13), 11);
        assert_eq!(r_max2(7, Family::E8, 8), 0);
        let e7_3 = rdp_equation(2, Family::E7, 7, Some(6)).unwrap();
        assert!(finj_expected(&e7_3));
        let e7_2 = rdp_equation(2, Family::E7, 7, Some(4)).unwrap();
        assert!(!finj_expected(&e7_2));
        let d7 = rdp_equation(2, Family::D, 7, Some(5)).unwrap();
        assert!(finj_expected(&d7)); // r = m − 1/2 with m = 3
    }

    #[test]
    fn d_row_expectations() {
        // D_10^1: S = {1,2,3,4}, T = 7: F(4) = 1 is the only F-image
        let exp = table3_expected_d(10, 2).unwrap();
        assert_eq!(exp.length, 4);
        assert_eq!(exp.gens, vec![(1, 1), (1, 2), (2, 1), (1, 3)]);
        assert_eq!(
            exp.rels,
            vec![
                "V*g0", "F*g0", "V*g1 - g0", "F*g1", "V*g2", "F*g2", "V*g3 - g1", "F*g3 - g0",
            ]
        );
    }

    #[test]
    fn one_table3_row_end_to_end() {
        let rows = vec![rdp_equation(3, Family::E6, 6, Some(0)).unwrap()];
        let reps = verify_table3(&rows, None).unwrap();
        assert_eq!(reps.len(), 1);
        assert_eq!(reps[0].verdict, Verdict::Pass, "{:?}", reps[0].diff);
        assert_eq!(reps[0].length, 1);
        // byte-identical serialization across repeated runs
        let a = to_json(&reps).unwrap();
        let b = to_json(&verify_table3(&rows, None).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
