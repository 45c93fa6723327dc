//! Finite left modules over the Dieudonné ring `D = W(F_p){F, V}/(FV − p)`
//! (σ = id since the scalars are restricted to Z_p), with exact integer
//! linear algebra: quotients by left ideals, kernels of words, Cartier
//! duality, invariant profiles, and identification against the group-scheme
//! catalog of §3.5 (L_{n,m}, M_n, α_{p^n}, bracket kernels, products).
//!
//! A module is presented as `⊕_i Z/p^{e_i}` with F and V as integer
//! matrices acting on generators by columns: `F(g_j) = Σ_i F[i][j] g_i`.
//!
//! Conventions fixed here:
//! * `Dieu(L_{n,m}) = D/(F^n, V^m)`; `α_{p^m} = L_{1,m}`, so the Dieudonné
//!   module of `α_{p^m}` is `D/(F, V^m)`.
//! * `Dieu` of the group-scheme Frobenius is left multiplication by `V`, so
//!   a bracket word `L_{n,m}[w]` (a kernel of `w` on the *group*) is
//!   computed as the kernel of `w` with F and V exchanged on the module.
//! * Identification is geometric (over the algebraic closure): isomorphism
//!   testing allows the unit twist `F ↦ εF`, `V ↦ ε⁻¹V` for `ε ∈ F_p^×`,
//!   which is exactly what a semilinear rescaling of the basis realizes.

use crate::error::{Error, Result};
use serde::Serialize;

/// An integer word in F and V: a sum of terms `c · F^a · V^b`.  The letters
/// refer to the operators as written in the paper's group-scheme brackets;
/// see [`kernel_of_word`] for the F/V exchange.  `text` is the display form
/// ("F-V", "V+F^2", "p").
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word {
    pub terms: Vec<(i64, u32, u32)>,
    pub text: String,
}

impl Word {
    pub fn new(terms: Vec<(i64, u32, u32)>, text: &str) -> Word {
        Word {
            terms,
            text: text.to_string(),
        }
    }

    /// The word `p` (multiplication by p).
    pub fn times_p(p: u32) -> Word {
        Word::new(vec![(p as i64, 0, 0)], "p")
    }

    /// `F^a + sign·V^b`, with the display string ordering the lower-degree
    /// term first when the sign is `+` (matching the paper's "V+F^2").
    pub fn f_pow_plus_v_pow(a: u32, sign: i64, b: u32) -> Word {
        let tf = if a == 1 { "F".into() } else { format!("F^{a}") };
        let tv = if b == 1 { "V".into() } else { format!("V^{b}") };
        let text = if sign >= 0 {
            if b < a {
                format!("{tv}+{tf}")
            } else {
                format!("{tf}+{tv}")
            }
        } else {
            format!("{tf}-{tv}")
        };
        Word {
            terms: vec![(1, a, 0), (sign.signum(), 0, b)],
            text,
        }
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.text)
    }
}

// ---------------------------------------------------------------------------
// Integer matrix utilities (i128; the matrices here are tiny)
// ---------------------------------------------------------------------------

type Mat = Vec<Vec<i128>>;

fn mat_zero(r: usize, c: usize) -> Mat {
    vec![vec![0; c]; r]
}

fn mat_id(k: usize) -> Mat {
    let mut m = mat_zero(k, k);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1;
    }
    m
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let r = a.len();
    let inner = b.len();
    let c = if inner == 0 { 0 } else { b[0].len() };
    let mut out = mat_zero(r, c);
    for i in 0..r {
        for (t, brow) in b.iter().enumerate() {
            let av = a[i][t];
            if av == 0 {
                continue;
            }
            for j in 0..c {
                out[i][j] += av * brow[j];
            }
        }
    }
    out
}

fn mat_apply(a: &Mat, x: &[i128]) -> Vec<i128> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(&r, &v)| r * v).sum())
        .collect()
}

fn mat_pow(a: &Mat, e: u32) -> Mat {
    let mut out = mat_id(a.len());
    for _ in 0..e {
        out = mat_mul(&out, a);
    }
    out
}

/// Diagonalize `a` by row and column operations: returns `(d, u, uinv, w)`
/// with `u·a·w` diagonal (entries `d`, nonnegative) and `u·uinv = id`.
fn diagonalize(mut a: Mat) -> (Vec<i128>, Mat, Mat, Mat) {
    let r = a.len();
    let c = if r == 0 { 0 } else { a[0].len() };
    let mut u = mat_id(r);
    let mut uinv = mat_id(r);
    let mut w = mat_id(c);
    let mut t = 0usize;
    while t < r && t < c {
        // locate a nonzero pivot of minimal magnitude
        let mut piv: Option<(usize, usize)> = None;
        for i in t..r {
            for j in t..c {
                if a[i][j] != 0
                    && piv.map(|(pi, pj)| a[i][j].abs() < a[pi][pj].abs()).unwrap_or(true)
                {
                    piv = Some((i, j));
                }
            }
        }
        let (pi, pj) = match piv {
            None => break,
            Some(p) => p,
        };
        a.swap(t, pi);
        u.swap(t, pi);
        for row in uinv.iter_mut() {
            row.swap(t, pi);
        }
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        for row in w.iter_mut() {
            row.swap(t, pj);
        }
        let mut clean = false;
        while !clean {
            clean = true;
            for i in t + 1..r {
                if a[i][t] != 0 {
                    let q = a[i][t].div_euclid(a[t][t]);
                    for j in 0..c {
                        a[i][j] -= q * a[t][j];
                    }
                    for j in 0..r {
                        u[i][j] -= q * u[t][j];
                    }
                    for row in uinv.iter_mut() {
                        let add = q * row[i];
                        row[t] += add;
                    }
                    if a[i][t] != 0 {
                        // remainder became the smaller pivot
                        a.swap(t, i);
                        u.swap(t, i);
                        for row in uinv.iter_mut() {
                            row.swap(t, i);
                        }
                        clean = false;
                    }
                }
            }
            for j in t + 1..c {
                if a[t][j] != 0 {
                    let q = a[t][j].div_euclid(a[t][t]);
                    for row in a.iter_mut() {
                        let sub = q * row[t];
                        row[j] -= sub;
                    }
                    for row in w.iter_mut() {
                        let sub = q * row[t];
                        row[j] -= sub;
                    }
                    if a[t][j] != 0 {
                        for row in a.iter_mut() {
                            row.swap(t, j);
                        }
                        for row in w.iter_mut() {
                            row.swap(t, j);
                        }
                        clean = false;
                    }
                }
            }
        }
        if a[t][t] < 0 {
            for j in 0..c {
                a[t][j] = -a[t][j];
            }
            for j in 0..r {
                u[t][j] = -u[t][j];
            }
            for row in uinv.iter_mut() {
                row[t] = -row[t];
            }
        }
        t += 1;
    }
    let mut d = vec![0i128; r.min(c)];
    for (i, slot) in d.iter_mut().enumerate() {
        *slot = a[i][i];
    }
    (d, u, uinv, w)
}

/// Basis of the integer kernel `{x : a·x = 0}` via tracked column reduction.
fn col_kernel(a: &Mat) -> Vec<Vec<i128>> {
    let r = a.len();
    let c = if r == 0 { 0 } else { a[0].len() };
    let mut a = a.clone();
    let mut w = mat_id(c);
    let mut t = 0usize;
    for row in 0..r {
        if t >= c {
            break;
        }
        loop {
            let mut piv: Option<usize> = None;
            for j in t..c {
                if a[row][j] != 0
                    && piv.map(|pj| a[row][j].abs() < a[row][pj].abs()).unwrap_or(true)
                {
                    piv = Some(j);
                }
            }
            let pj = match piv {
                None => break,
            Some(j) => j,
            };
            for rr in a.iter_mut() {
                rr.swap(t, pj);
            }
            for rr in w.iter_mut() {
                rr.swap(t, pj);
            }
            let mut done = true;
            for j in t + 1..c {
                if a[row][j] != 0 {
                    let q = a[row][j].div_euclid(a[row][t]);
                    for rr in a.iter_mut() {
                        let sub = q * rr[t];
                        rr[j] -= sub;
                    }
                    for rr in w.iter_mut() {
                        let sub = q * rr[t];
                        rr[j] -= sub;
                    }
                    if a[row][j] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                t += 1;
                break;
            }
        }
    }
    (t..c).map(|j| w.iter().map(|row| row[j]).collect()).collect()
}

/// Column-HNF basis of the lattice spanned by `vecs` in Z^k; errors unless
/// the lattice has full rank `k`.
fn lattice_basis(vecs: &[Vec<i128>], k: usize) -> Result<Mat> {
    let mut a = mat_zero(k, vecs.len());
    for (j, v) in vecs.iter().enumerate() {
        for i in 0..k {
            a[i][j] = v[i];
        }
    }
    let mut t = 0usize;
    let c = vecs.len();
    for row in 0..k {
        if t >= c {
            break;
        }
        loop {
            let mut piv: Option<usize> = None;
            for j in t..c {
                if a[row][j] != 0
                    && piv.map(|pj| a[row][j].abs() < a[row][pj].abs()).unwrap_or(true)
                {
                    piv = Some(j);
                }
            }
            let pj = match piv {
                None => {
                    return Err(Error::Internal(
                        "lattice is not of full rank".into(),
                    ))
                }
                Some(j) => j,
            };
            for rr in a.iter_mut() {
                rr.swap(t, pj);
            }
            let mut done = true;
            for j in t + 1..c {
                if a[row][j] != 0 {
                    let q = a[row][j].div_euclid(a[row][t]);
                    for rr in a.iter_mut() {
                        let sub = q * rr[t];
                        rr[j] -= sub;
                    }
                    if a[row][j] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                t += 1;
                break;
            }
        }
    }
    Ok((0..k)
        .map(|i| (0..k).map(|j| a[i][j]).collect::<Vec<_>>())
        .collect::<Vec<_>>()
        .into_iter()
        .map(|row: Vec<i128>| row)
        .collect())
}

/// Exact solver for `b·y = x` with square full-rank `b`, via a one-time
/// diagonalization.
struct Solver {
    d: Vec<i128>,
    u: Mat,
    w: Mat,
}

impl Solver {
    fn new(b: Mat) -> Result<Solver> {
        let k = b.len();
        let (d, u, _uinv, w) = diagonalize(b);
        if d.len() < k || d.iter().any(|&x| x == 0) {
            return Err(Error::Internal("singular matrix in solver".into()));
        }
        Ok(Solver { d, u, w })
    }

    fn solve(&self, x: &[i128]) -> Option<Vec<i128>> {
        let z = mat_apply(&self.u, x);
        let mut y = Vec::with_capacity(z.len());
        for (zi, &di) in z.iter().zip(&self.d) {
            if zi % di != 0 {
                return None;
            }
            y.push(zi / di);
        }
        Some(mat_apply(&self.w, &y))
    }
}

fn logp(p: u32, mut x: i128) -> Result<u32> {
    let mut e = 0;
    while x > 1 {
        if x % p as i128 != 0 {
            return Err(Error::Internal(format!("{x} is not a power of {p}")));
        }
        x /= p as i128;
        e += 1;
    }
    Ok(e)
}

fn pw(p: u32, e: u32) -> i128 {
    (p as i128).pow(e)
}

// ---------------------------------------------------------------------------
// DieuModule
// ---------------------------------------------------------------------------

/// A finite left D-module `⊕_i Z/p^{e_i}` (orders descending) with F and V
/// acting by the columns of the matrices: `F(g_j) = Σ_i F[i][j] g_i`.
#[derive(Debug, Clone, Serialize)]
pub struct DieuModule {
    pub p: u32,
    /// The minimal `e` with `p^e` annihilating the module.
    pub exponent: u32,
    /// Generator orders `p^{e_i}` (descending).
    pub orders: Vec<u64>,
    #[serde(rename = "F")]
    pub f: Vec<Vec<i64>>,
    #[serde(rename = "V")]
    pub v: Vec<Vec<i64>>,
}

impl DieuModule {
    /// Generator-order exponents `e_i`.
    pub fn exps(&self) -> Vec<u32> {
        self.orders
            .iter()
            .map(|&o| {
                let mut e = 0;
                let mut x = o;
                while x > 1 {
                    x /= self.p as u64;
                    e += 1;
                }
                e
            })
            .collect()
    }

    /// Length as a W-module: `Σ e_i`.
    pub fn length(&self) -> u32 {
        self.exps().iter().sum()
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    fn fmat(&self) -> Mat {
        self.f
            .iter()
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect()
    }

    fn vmat(&self) -> Mat {
        self.v
            .iter()
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect()
    }

    /// The relation lattice `diag(p^{e_i})`.
    fn lambda(&self) -> Mat {
        let e = self.exps();
        let k = e.len();
        let mut m = mat_zero(k, k);
        for i in 0..k {
            m[i][i] = pw(self.p, e[i]);
        }
        m
    }

    fn validate(&self) -> Result<()> {
        let e = self.exps();
        let k = e.len();
        let f = self.fmat();
        let v = self.vmat();
        let check_hom = |a: &Mat, name: &str| -> Result<()> {
            for i in 0..k {
                for j in 0..k {
                    if e[i] > e[j] && a[i][j] % pw(self.p, e[i] - e[j]) != 0 {
                        return Err(Error::Internal(format!(
                            "{name} is not a well-defined endomorphism"
                        )));
                    }
                }
            }
            Ok(())
        };
        check_hom(&f, "F")?;
        check_hom(&v, "V")?;
        for (prod, name) in [(mat_mul(&f, &v), "FV"), (mat_mul(&v, &f), "VF")] {
            for i in 0..k {
                for j in 0..k {
                    let expect = if i == j { self.p as i128 } else { 0 };
                    if (prod[i][j] - expect) % pw(self.p, e[i]) != 0 {
                        return Err(Error::Internal(format!("{name} ≠ p·id")));
                    }
                }
            }
        }
        // nilpotency of F and V (loc-loc condition)
        let steps = self.length() + 1;
        for (a, name) in [(f, "F"), (v, "V")] {
            let pow = mat_pow(&a, steps);
            for i in 0..k {
                for j in 0..k {
                    if pow[i][j] % pw(self.p, e[i]) != 0 {
                        return Err(Error::Internal(format!("{name} is not nilpotent")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Build a module from the quotient `Z^k / rel` with induced actions,
/// normalizing: unimodular change of basis, unit coordinates dropped,
/// generators sorted by descending order, entries reduced.
fn module_from_lattice(p: u32, rel: &[Vec<i128>], f: Mat, v: Mat) -> Result<DieuModule> {
    let k = f.len();
    let mut relmat = mat_zero(k, rel.len());
    for (j, col) in rel.iter().enumerate() {
        for i in 0..k {
            relmat[i][j] = col[i];
        }
    }
    let (d, u, uinv, _w) = diagonalize(relmat);
    if d.len() < k || d.iter().any(|&x| x == 0) {
        return Err(Error::Internal("quotient module is not finite".into()));
    }
    let f2 = mat_mul(&mat_mul(&u, &f), &uinv);
    let v2 = mat_mul(&mat_mul(&u, &v), &uinv);
    let mut idx: Vec<(u32, usize)> = Vec::new();
    for (i, &di) in d.iter().enumerate() {
        let e = logp(p, di)?;
        if e > 0 {
            idx.push((e, i));
        }
    }
    idx.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let kk = idx.len();
    let reduce = |a: &Mat| -> Vec<Vec<i64>> {
        let mut out = vec![vec![0i64; kk]; kk];
        for (ri, &(ei, i)) in idx.iter().enumerate() {
            let m = pw(p, ei);
            for (rj, &(_, j)) in idx.iter().enumerate() {
                out[ri][rj] = a[i][j].rem_euclid(m) as i64;
            }
        }
        out
    };
    let module = DieuModule {
        p,
        exponent: idx.first().map(|&(e, _)| e).unwrap_or(0),
        orders: idx.iter().map(|&(e, _)| pw(p, e) as u64).collect(),
        f: reduce(&f2),
        v: reduce(&v2),
    };
    module.validate()?;
    Ok(module)
}

/// Evaluate a word as a matrix, with the letters F and V interpreted by the
/// supplied matrices.
fn word_matrix(w: &Word, f: &Mat, v: &Mat, k: usize) -> Mat {
    let mut out = mat_zero(k, k);
    for &(c, a, b) in &w.terms {
        let m = mat_mul(&mat_pow(f, a), &mat_pow(v, b));
        for i in 0..k {
            for j in 0..k {
                out[i][j] += c as i128 * m[i][j];
            }
        }
    }
    out
}

/// The quotient `D/D(F^n, V^m, extra…)`: the left module spanned by the
/// monomials `F^a` (a < n) and `V^b` (0 < b < m), further divided by the
/// submodules generated by the extra words (which act as written, as
/// elements of D).
pub fn quotient_module(p: u32, n: u32, m: u32, extra: &[Word]) -> Result<DieuModule> {
    if n < 1 || m < 1 {
        return Err(Error::Internal("quotient_module requires n, m ≥ 1".into()));
    }
    let k = (n + m - 1) as usize;
    let e: Vec<u32> = (0..n)
        .map(|a| (n - a).min(m))
        .chain((1..m).map(|b| (m - b).min(n)))
        .collect();
    let fi = |a: u32| a as usize; // index of F^a
    let vi = |b: u32| (n - 1 + b) as usize; // index of V^b (b ≥ 1)
    let mut f = mat_zero(k, k);
    let mut v = mat_zero(k, k);
    for a in 0..n {
        if a + 1 < n {
            f[fi(a + 1)][fi(a)] = 1;
        }
        if a >= 1 {
            v[fi(a - 1)][fi(a)] = p as i128;
        }
    }
    if m >= 2 {
        v[vi(1)][fi(0)] = 1;
    }
    for b in 1..m {
        f[if b == 1 { fi(0) } else { vi(b - 1) }][vi(b)] = p as i128;
        if b + 1 < m {
            v[vi(b + 1)][vi(b)] = 1;
        }
    }
    let mut rel: Vec<Vec<i128>> = (0..k)
        .map(|i| {
            let mut col = vec![0; k];
            col[i] = pw(p, e[i]);
            col
        })
        .collect();
    for w in extra {
        let wm = word_matrix(w, &f, &v, k);
        let mut one = vec![0i128; k];
        one[fi(0)] = 1;
        let x = mat_apply(&wm, &one);
        // Z-span of {F^a x} ∪ {V^b x} is the D-submodule generated by x
        for a in 0..=n {
            rel.push(mat_apply(&mat_pow(&f, a), &x));
        }
        for b in 1..=m {
            rel.push(mat_apply(&mat_pow(&v, b), &x));
        }
    }
    module_from_lattice(p, &rel, f, v)
}

/// The kernel of a bracket word on a module, as in `L_{n,m}[w]`.  The word
/// is written in the group-scheme operators; under the covariant dictionary
/// (`Dieu(F) = V·(−)`) the operator applied to the module is the word with F
/// and V exchanged.
pub fn kernel_of_word(m: &DieuModule, w: &Word) -> Result<DieuModule> {
    let k = m.rank();
    if k == 0 {
        return Ok(m.clone());
    }
    let f = m.fmat();
    let v = m.vmat();
    let wm = word_matrix(w, &v, &f, k); // F/V exchanged
    let lambda = m.lambda();
    let mut aug = mat_zero(k, 2 * k);
    for i in 0..k {
        for j in 0..k {
            aug[i][j] = wm[i][j];
            aug[i][k + j] = lambda[i][j];
        }
    }
    let mut gens: Vec<Vec<i128>> = col_kernel(&aug)
        .into_iter()
        .map(|x| x[..k].to_vec())
        .collect();
    for j in 0..k {
        gens.push((0..k).map(|i| lambda[i][j]).collect());
    }
    let b = lattice_basis(&gens, k)?;
    let solver = Solver::new(b.clone())?;
    let express = |cols: &Mat| -> Result<Mat> {
        let k2 = cols[0].len();
        let mut out = mat_zero(k, k2);
        for j in 0..k2 {
            let col: Vec<i128> = (0..k).map(|i| cols[i][j]).collect();
            let y = solver
                .solve(&col)
                .ok_or_else(|| Error::Internal("sublattice is not invariant".into()))?;
            for i in 0..k {
                out[i][j] = y[i];
            }
        }
        Ok(out)
    };
    let c = express(&lambda)?;
    let f_n = express(&mat_mul(&f, &b))?;
    let v_n = express(&mat_mul(&v, &b))?;
    let rel: Vec<Vec<i128>> = (0..k).map(|j| (0..k).map(|i| c[i][j]).collect()).collect();
    module_from_lattice(m.p, &rel, f_n, v_n)
}

/// Cartier dual: on `⊕ Z/p^{e_i}` identified with its Pontryagin dual, the
/// dual of a homomorphism `A` is `A^D[i][j] = A[j][i]·p^{e_i − e_j}`, and F
/// and V exchange.
pub fn dual(m: &DieuModule) -> Result<DieuModule> {
    let e = m.exps();
    let k = e.len();
    let adj = |a: &Mat| -> Result<Mat> {
        let mut out = mat_zero(k, k);
        for i in 0..k {
            for j in 0..k {
                let val = a[j][i];
                out[i][j] = if e[i] >= e[j] {
                    val * pw(m.p, e[i] - e[j])
                } else {
                    let q = pw(m.p, e[j] - e[i]);
                    if val % q != 0 {
                        return Err(Error::Internal("dual matrix is not integral".into()));
                    }
                    val / q
                };
            }
        }
        Ok(out)
    };
    let f_d = adj(&m.vmat())?;
    let v_d = adj(&m.fmat())?;
    let rel: Vec<Vec<i128>> = (0..k)
        .map(|j| {
            let mut col = vec![0; k];
            col[j] = pw(m.p, e[j]);
            col
        })
        .collect();
    module_from_lattice(m.p, &rel, f_d, v_d)
}

/// Direct sum (block diagonal, renormalized).
pub fn direct_sum(a: &DieuModule, b: &DieuModule) -> Result<DieuModule> {
    if a.p != b.p {
        return Err(Error::CharacteristicMismatch(a.p, b.p));
    }
    let (ka, kb) = (a.rank(), b.rank());
    let k = ka + kb;
    let block = |x: &Mat, y: &Mat| -> Mat {
        let mut m = mat_zero(k, k);
        for i in 0..ka {
            for j in 0..ka {
                m[i][j] = x[i][j];
            }
        }
        for i in 0..kb {
            for j in 0..kb {
                m[ka + i][ka + j] = y[i][j];
            }
        }
        m
    };
    let ea = a.exps();
    let eb = b.exps();
    let rel: Vec<Vec<i128>> = (0..k)
        .map(|j| {
            let mut col = vec![0; k];
            col[j] = pw(a.p, if j < ka { ea[j] } else { eb[j - ka] });
            col
        })
        .collect();
    module_from_lattice(
        a.p,
        &rel,
        block(&a.fmat(), &b.fmat()),
        block(&a.vmat(), &b.vmat()),
    )
}

// ---------------------------------------------------------------------------
// Invariant profile
// ---------------------------------------------------------------------------

/// Canonical isomorphism invariants: generator orders plus, for every
/// monomial word `F^a V^b` with `a + b ≤ max_word_len`, the W-lengths of its
/// kernel and image.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Profile {
    pub p: u32,
    pub length: u32,
    pub exponent: u32,
    pub orders: Vec<u64>,
    pub words: Vec<((u32, u32), (u32, u32))>,
}

pub fn invariant_profile(m: &DieuModule, max_word_len: u32) -> Result<Profile> {
    let k = m.rank();
    let total = m.length();
    let f = m.fmat();
    let v = m.vmat();
    let lambda = m.lambda();
    let mut words = Vec::new();
    for a in 0..=max_word_len {
        for b in 0..=(max_word_len - a) {
            if a == 0 && b == 0 {
                continue;
            }
            let (ker, im) = if k == 0 {
                (0, 0)
            } else {
                let wm = mat_mul(&mat_pow(&f, a), &mat_pow(&v, b));
                let mut aug = mat_zero(k, 2 * k);
                for i in 0..k {
                    for j in 0..k {
                        aug[i][j] = wm[i][j];
                        aug[i][k + j] = lambda[i][j];
                    }
                }
                let (d, _, _, _) = diagonalize(aug);
                let mut s = 0;
                for &di in d.iter().take(k) {
                    if di == 0 {
                        return Err(Error::Internal("image lattice is degenerate".into()));
                    }
                    s += logp(m.p, di)?;
                }
                (s, total - s)
            };
            words.push(((a, b), (ker, im)));
        }
    }
    Ok(Profile {
        p: m.p,
        length: total,
        exponent: m.exponent,
        orders: m.orders.clone(),
        words,
    })
}

// ---------------------------------------------------------------------------
// Isomorphism testing
// ---------------------------------------------------------------------------

const ISO_BUDGET: u64 = 2_000_000;

/// Search for an isomorphism `T: M → N` with `T·F_M = ε·F_N·T` and
/// `T·V_M = δ·V_N·T` for units ε, δ (the geometric twist: a semilinear
/// rescaling over the algebraic closure realizes these).  When the modules
/// are not killed by p, `T·(FV) = εδ·(FV)·T` forces εδ = 1; for p-torsion
/// modules the twists are independent (`FV = 0` there, and the k̄-classification
/// of such F/V-pairs is discrete, so twisting does not change the class).
/// Returns `None` if the search space exceeds the budget (callers then fall
/// back to profile equality).
pub fn iso_up_to_twist(m: &DieuModule, n: &DieuModule) -> Result<Option<bool>> {
    if m.p != n.p || m.exps() != n.exps() {
        return Ok(Some(false));
    }
    let p = m.p;
    let e = m.exps();
    let k = e.len();
    if k == 0 {
        return Ok(Some(true));
    }
    // all elements of N as coordinate tuples
    let mut elems: Vec<Vec<i128>> = vec![vec![]];
    for &ei in &e {
        let mut next = Vec::new();
        for el in &elems {
            for c in 0..pw(p, ei) {
                let mut e2 = el.clone();
                e2.push(c);
                next.push(e2);
            }
        }
        elems = next;
    }
    // candidate images for generator j: order must divide p^{e_j}
    let mut cands: Vec<Vec<usize>> = Vec::with_capacity(k);
    for &ej in &e {
        let mut list = Vec::new();
        'el: for (idx, el) in elems.iter().enumerate() {
            for (i, &ei) in e.iter().enumerate() {
                if ei > ej && el[i] % pw(p, ei - ej) != 0 {
                    continue 'el;
                }
            }
            list.push(idx);
        }
        cands.push(list);
    }
    let space: u64 = cands
        .iter()
        .map(|c| c.len() as u64)
        .try_fold(1u64, |a, b| a.checked_mul(b))
        .unwrap_or(u64::MAX);
    if space > ISO_BUDGET {
        return Ok(None);
    }
    let f_m = m.fmat();
    let v_m = m.vmat();
    let f_n = n.fmat();
    let v_n = n.vmat();
    let lambda: Vec<i128> = e.iter().map(|&ei| pw(p, ei)).collect();
    let mut choice = vec![0usize; k];
    let p_torsion = m.exponent <= 1 && n.exponent <= 1;
    let mut twists: Vec<(i128, i128)> = Vec::new();
    for eps in 1..p.max(2) as i128 {
        for delta in 1..p.max(2) as i128 {
            if p_torsion || (eps * delta) % p as i128 == 1 {
                twists.push((eps, delta));
            }
        }
    }
    loop {
        // assemble T from the current choice
        let mut t = mat_zero(k, k);
        for (j, &ci) in choice.iter().enumerate() {
            let el = &elems[cands[j][ci]];
            for i in 0..k {
                t[i][j] = el[i];
            }
        }
        // surjectivity: T columns + Λ must span Z^k
        let mut aug = mat_zero(k, 2 * k);
        for i in 0..k {
            for j in 0..k {
                aug[i][j] = t[i][j];
            }
            aug[i][k + i] = lambda[i];
        }
        let (d, _, _, _) = diagonalize(aug);
        let surjective = d.iter().take(k).all(|&x| x == 1 || x == -1);
        if surjective {
            let ok = |lhs: &Mat, rhs: &Mat, scale: i128| -> bool {
                for i in 0..k {
                    for j in 0..k {
                        if (lhs[i][j] - scale * rhs[i][j]) % pw(p, e[i]) != 0 {
                            return false;
                        }
                    }
                }
                true
            };
            let tf = mat_mul(&t, &f_m);
            let ft = mat_mul(&f_n, &t);
            let tv = mat_mul(&t, &v_m);
            let vt = mat_mul(&v_n, &t);
            for &(eps, delta) in &twists {
                if ok(&tf, &ft, eps) && ok(&tv, &vt, delta) {
                    return Ok(Some(true));
                }
            }
        }
        // advance
        let mut j = 0;
        loop {
            if j == k {
                return Ok(Some(false));
            }
            choice[j] += 1;
            if choice[j] < cands[j].len() {
                break;
            }
            choice[j] = 0;
            j += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Group scheme identification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum GroupSchemeId {
    Zero,
    /// `α_{p^n}`
    AlphaP(u32),
    /// `α_{p^n}^D`
    AlphaPDual(u32),
    /// `L_{n,m}`
    L(u32, u32),
    /// `M_n`
    M(u32),
    /// `L_{n,m}[word]`
    LKernel(u32, u32, String),
    /// `G_n^r` (r2 = 2r)
    GNR(u32, u32),
    Product(Vec<GroupSchemeId>),
    Unidentified,
}

fn sup(r2: u32) -> String {
    if r2 % 2 == 0 {
        format!("{}", r2 / 2)
    } else {
        format!("{{{}/2}}", r2)
    }
}

impl GroupSchemeId {
    /// Paper notation; `p` is needed to print `α_{p^n}` numerically.
    pub fn notation(&self, p: u32) -> String {
        match self {
            GroupSchemeId::Zero => "0".to_string(),
            GroupSchemeId::AlphaP(n) => format!("α_{}", (p as u64).pow(*n)),
            GroupSchemeId::AlphaPDual(n) => format!("α_{}^D", (p as u64).pow(*n)),
            GroupSchemeId::L(n, m) => format!("L_{{{n},{m}}}"),
            GroupSchemeId::M(n) => format!("M_{n}"),
            GroupSchemeId::LKernel(n, m, w) => format!("L_{{{n},{m}}}[{w}]"),
            GroupSchemeId::GNR(n, r2) => format!("G_{}^{}", n, sup(*r2)),
            GroupSchemeId::Product(parts) => parts
                .iter()
                .map(|g| g.notation(p))
                .collect::<Vec<_>>()
                .join("×"),
            GroupSchemeId::Unidentified => "?".to_string(),
        }
    }
}

fn bracket_words(p: u32) -> Vec<Word> {
    let mut out = vec![Word::times_p(p)];
    for deg in 2..=6u32 {
        for a in 1..deg.min(4) {
            let b = deg - a;
            if b > 3 || a > 3 {
                continue;
            }
            if p != 2 {
                // for p = 2 the sign variants coincide; keep only the
                // canonical "+" spelling
                out.push(Word::f_pow_plus_v_pow(a, -1, b));
            }
            out.push(Word::f_pow_plus_v_pow(a, 1, b));
        }
    }
    out
}

/// The named catalog up to the given length, in deterministic priority
/// order.
fn catalog(p: u32, len: u32) -> Result<Vec<(GroupSchemeId, DieuModule)>> {
    let mut out: Vec<(GroupSchemeId, DieuModule)> = Vec::new();
    for n in 1..=len {
        out.push((GroupSchemeId::AlphaP(n), quotient_module(p, 1, n, &[])?));
    }
    for n in 2..=len {
        out.push((GroupSchemeId::AlphaPDual(n), quotient_module(p, n, 1, &[])?));
    }
    for n in 2..=len {
        out.push((
            GroupSchemeId::M(n),
            quotient_module(p, n, n, &[Word::f_pow_plus_v_pow(1, -1, 1)])?,
        ));
    }
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for n in 2..=len {
        for m in 2..=len {
            pairs.push((n, m));
        }
    }
    pairs.sort_by_key(|&(n, m)| (n + m, n));
    for &(n, m) in &pairs {
        if n * m <= len {
            out.push((GroupSchemeId::L(n, m), quotient_module(p, n, m, &[])?));
        }
    }
    let words = bracket_words(p);
    let cap = len.min(5);
    let mut kpairs: Vec<(u32, u32)> = Vec::new();
    for n in 2..=cap {
        for m in 2..=cap {
            kpairs.push((n, m));
        }
    }
    kpairs.sort_by_key(|&(n, m)| (n + m, n));
    for &(n, m) in &kpairs {
        let l = quotient_module(p, n, m, &[])?;
        for w in &words {
            let ker = kernel_of_word(&l, w)?;
            if ker.length() > 0 && ker.length() <= len {
                out.push((GroupSchemeId::LKernel(n, m, w.text.clone()), ker));
            }
        }
    }
    Ok(out)
}

pub fn identify(m: &DieuModule) -> Result<GroupSchemeId> {
    identify_with(m, &[])
}

/// Identify the module against the catalog.  `extra` entries (e.g. the
/// combinatorial `G_n^r` models) are tried first.  A candidate matches when
/// the invariant profiles agree and, at length ≤ 4, a brute-force
/// isomorphism (up to unit twist) confirms it.
pub fn identify_with(
    m: &DieuModule,
    extra: &[(GroupSchemeId, DieuModule)],
) -> Result<GroupSchemeId> {
    let len = m.length();
    if len == 0 {
        return Ok(GroupSchemeId::Zero);
    }
    let prof = invariant_profile(m, 6)?;
    let mut candidates: Vec<(GroupSchemeId, DieuModule)> = extra.to_vec();
    let cat = catalog(m.p, len)?;
    // products of two proper catalog members
    let mut products = Vec::new();
    for (i, (ida, ma)) in cat.iter().enumerate() {
        if ma.length() == 0 || ma.length() >= len {
            continue;
        }
        for (idb, mb) in cat.iter().skip(i) {
            if ma.length() + mb.length() != len {
                continue;
            }
            products.push((
                GroupSchemeId::Product(vec![ida.clone(), idb.clone()]),
                direct_sum(ma, mb)?,
            ));
        }
    }
    candidates.extend(cat);
    candidates.extend(products);
    for (id, cand) in &candidates {
        if cand.length() != len {
            continue;
        }
        if invariant_profile(cand, 6)? != prof {
            continue;
        }
        if len <= 4 {
            match iso_up_to_twist(m, cand)? {
                Some(true) | None => return Ok(id.clone()),
                Some(false) => continue,
            }
        }
        return Ok(id.clone());
    }
    Ok(GroupSchemeId::Unidentified)
}

// ---------------------------------------------------------------------------
// Extraction from the cohomology side
// ---------------------------------------------------------------------------

use crate::cohomology::AbstractModule;

/// Convert the computed colimit (a finite abelian group with F and V as
/// index maps) into a presented D-module: decompose the group into cyclic
/// factors by a backtracking generator search, then express F and V in the
/// resulting coordinates.
pub fn from_abstract(am: &AbstractModule) -> Result<DieuModule> {
    let p = am.p();
    let size = am.size();
    if size == 1 {
        return Ok(DieuModule {
            p,
            exponent: 0,
            orders: vec![],
            f: vec![],
            v: vec![],
        });
    }
    let mul_p: Vec<usize> = (0..size).map(|i| am.v_of[am.f_of[i]]).collect();
    let ord_exp = |mut x: usize| -> u32 {
        let mut e = 0;
        while x != 0 {
            x = mul_p[x];
            e += 1;
        }
        e
    };
    // order exponents from the p-power filtration
    let mut exps: Vec<u32> = Vec::new();
    {
        let mut layer: Vec<usize> = (0..size).collect();
        let mut sizes = vec![size];
        loop {
            let mut next: Vec<usize> = layer.iter().map(|&x| mul_p[x]).collect();
            next.sort_unstable();
            next.dedup();
            sizes.push(next.len());
            if next.len() == 1 {
                break;
            }
            layer = next;
        }
        let logs: Vec<u32> = sizes
            .iter()
            .map(|&s| logp(p, s as i128))
            .collect::<Result<_>>()?;
        // #{cyclic factors with exponent ≥ j} = log|p^{j−1}M| − log|p^j M|;
        // difference consecutive counts to get the factors of exponent
        // exactly j.
        for j in 1..logs.len() {
            let ge_j = logs[j - 1] - logs[j];
            let ge_next = if j + 1 < logs.len() {
                logs[j] - logs[j + 1]
            } else {
                0
            };
            for _ in 0..(ge_j - ge_next) {
                exps.push(j as u32);
            }
        }
        exps.sort_unstable_by(|a, b| b.cmp(a));
    }
    // backtracking search for independent generators of the given orders
    let closure = |gens: &[usize]| -> Result<Vec<usize>> {
        let mut seen = vec![false; size];
        seen[0] = true;
        let mut queue = vec![0usize];
        let mut qi = 0;
        while qi < queue.len() {
            let x = queue[qi];
            qi += 1;
            for &g in gens {
                let y = am.add(x, g)?;
                if !seen[y] {
                    seen[y] = true;
                    queue.push(y);
                }
            }
        }
        Ok(queue)
    };
    fn search(
        am: &AbstractModule,
        exps: &[u32],
        chosen: &mut Vec<usize>,
        ord_exp: &dyn Fn(usize) -> u32,
        closure: &dyn Fn(&[usize]) -> Result<Vec<usize>>,
    ) -> Result<bool> {
        let i = chosen.len();
        if i == exps.len() {
            return Ok(true);
        }
        let target: u64 = exps[..=i].iter().map(|&e| (am.p() as u64).pow(e)).product();
        for g in 1..am.size() {
            if ord_exp(g) != exps[i] {
                continue;
            }
            chosen.push(g);
            if closure(chosen)?.len() as u64 == target
                && search(am, exps, chosen, ord_exp, closure)?
            {
                return Ok(true);
            }
            chosen.pop();
        }
        Ok(false)
    }
    let mut gens: Vec<usize> = Vec::new();
    if !search(am, &exps, &mut gens, &ord_exp, &closure)? {
        return Err(Error::Internal(
            "abelian group decomposition failed".into(),
        ));
    }
    // coordinates of every element in the chosen generators
    let k = gens.len();
    let mut coords_of: Vec<Option<Vec<i64>>> = vec![None; size];
    let mut frontier: Vec<(usize, Vec<i64>)> = vec![(0, vec![0; k])];
    coords_of[0] = Some(vec![0; k]);
    for (j, &g) in gens.iter().enumerate() {
        let ordj = (p as i64).pow(exps[j]);
        let mut next = frontier.clone();
        let mut mult = 0usize; // c·g_j
        for c in 1..ordj {
            mult = am.add(mult, g)?;
            for (idx, co) in &frontier {
                let y = am.add(*idx, mult)?;
                let mut co2 = co.clone();
                co2[j] = c;
                if coords_of[y].is_none() {
                    coords_of[y] = Some(co2.clone());
                }
                next.push((y, co2));
            }
        }
        frontier = next;
    }
    let col = |target: usize| -> Result<Vec<i64>> {
        coords_of[target]
            .clone()
            .ok_or_else(|| Error::Internal("element missing coordinates".into()))
    };
    let mut f = vec![vec![0i64; k]; k];
    let mut v = vec![vec![0i64; k]; k];
    for (j, &g) in gens.iter().enumerate() {
        for (i, val) in col(am.f_of[g])?.into_iter().enumerate() {
            f[i][j] = val;
        }
        for (i, val) in col(am.v_of[g])?.into_iter().enumerate() {
            v[i][j] = val;
        }
    }
    let module = DieuModule {
        p,
        exponent: exps.first().copied().unwrap_or(0),
        orders: exps.iter().map(|&e| (p as u64).pow(e)).collect(),
        f,
        v,
    };
    module.validate()?;
    Ok(module)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(p: u32, n: u32, m: u32) -> DieuModule {
        quotient_module(p, n, m, &[]).unwrap()
    }

    #[test]
    fn quotient_lengths() {
        for p in [2u32, 3, 5] {
            for n in 1..=4 {
                for m in 1..=4 {
                    assert_eq!(l(p, n, m).length(), n * m, "p={p} n={n} m={m}");
                }
            }
        }
    }

    #[test]
    fn m_n_constructions_agree() {
        for p in [2u32, 3] {
            for n in 2..=3 {
                let q = quotient_module(p, n, n, &[Word::f_pow_plus_v_pow(1, -1, 1)]).unwrap();
                assert_eq!(q.length(), n);
                let ker = kernel_of_word(&l(p, n, n), &Word::f_pow_plus_v_pow(1, -1, 1)).unwrap();
                assert_eq!(ker.length(), n);
                assert_eq!(iso_up_to_twist(&q, &ker).unwrap(), Some(true));
            }
        }
        // M_3 is not killed by p
        let m3 = quotient_module(2, 3, 3, &[Word::f_pow_plus_v_pow(1, -1, 1)]).unwrap();
        assert_eq!(m3.exponent, 2);
    }

    #[test]
    fn bracket_kernels() {
        // L_{2,3}[V+F^2] has length 3; L_{2,3}[p] has length 4
        let l23 = l(2, 2, 3);
        let k1 = kernel_of_word(&l23, &Word::f_pow_plus_v_pow(2, 1, 1)).unwrap();
        assert_eq!(k1.length(), 3);
        let k2 = kernel_of_word(&l23, &Word::times_p(2)).unwrap();
        assert_eq!(k2.length(), 4);
        // identity word has zero kernel
        let k0 = kernel_of_word(&l23, &Word::new(vec![(1, 0, 0)], "1")).unwrap();
        assert_eq!(k0.length(), 0);
    }

    #[test]
    fn duality() {
        for p in [2u32, 3] {
            for (n, m) in [(1, 2), (2, 2), (2, 3), (3, 2)] {
                let d = dual(&l(p, n, m)).unwrap();
                assert_eq!(
                    invariant_profile(&d, 6).unwrap(),
                    invariant_profile(&l(p, m, n), 6).unwrap()
                );
                let dd = dual(&d).unwrap();
                assert_eq!(
                    invariant_profile(&dd, 6).unwrap(),
                    invariant_profile(&l(p, n, m), 6).unwrap()
                );
            }
            let m2 = quotient_module(p, 2, 2, &[Word::f_pow_plus_v_pow(1, -1, 1)]).unwrap();
            let d = dual(&m2).unwrap();
            assert_eq!(iso_up_to_twist(&m2, &d).unwrap(), Some(true));
        }
    }

    #[test]
    fn length_two_catalog_distinct() {
        let p = 2;
        let mods = [
            l(p, 1, 2),                       // α_4
            l(p, 2, 1),                       // α_4^D
            quotient_module(p, 2, 2, &[Word::f_pow_plus_v_pow(1, -1, 1)]).unwrap(), // M_2
            direct_sum(&l(p, 1, 1), &l(p, 1, 1)).unwrap(), // α_2 × α_2
        ];
        for i in 0..mods.len() {
            for j in i + 1..mods.len() {
                assert_ne!(
                    invariant_profile(&mods[i], 6).unwrap(),
                    invariant_profile(&mods[j], 6).unwrap(),
                    "modules {i} and {j} collide"
                );
            }
        }
    }

    #[test]
    fn identification() {
        // the p = 3 sign twist: D/(F+V, V²) is geometrically M_2
        let tw = quotient_module(3, 2, 2, &[Word::f_pow_plus_v_pow(1, 1, 1)]).unwrap();
        assert_eq!(identify(&tw).unwrap(), GroupSchemeId::M(2));
        // α_8
        let a8 = l(2, 1, 3);
        assert_eq!(identify(&a8).unwrap(), GroupSchemeId::AlphaP(3));
        // L_{2,3}[p]
        let k = kernel_of_word(&l(2, 2, 3), &Word::times_p(2)).unwrap();
        assert_eq!(
            identify(&k).unwrap(),
            GroupSchemeId::LKernel(2, 3, "p".into())
        );
        // α_2 × α_8
        let prod = direct_sum(&l(2, 1, 1), &l(2, 1, 3)).unwrap();
        assert_eq!(
            identify(&prod).unwrap(),
            GroupSchemeId::Product(vec![GroupSchemeId::AlphaP(1), GroupSchemeId::AlphaP(3)])
        );
        // E_7^1 style: D/(F+V², V³) → L_{2,3}[V+F^2]
        let e71 = quotient_module(2, 2, 3, &[Word::f_pow_plus_v_pow(1, 1, 2)]).unwrap();
        assert_eq!(e71.length(), 3);
        assert_eq!(
            identify(&e71).unwrap(),
            GroupSchemeId::LKernel(2, 3, "V+F^2".into())
        );
        // notation
        assert_eq!(
            GroupSchemeId::LKernel(2, 3, "V+F^2".into()).notation(2),
            "L_{2,3}[V+F^2]"
        );
        assert_eq!(GroupSchemeId::AlphaP(2).notation(3), "α_9");
    }
}
