//! Truncated p-typical Witt vectors over any component ring of
//! characteristic p.
//!
//! The addition and negation structure laws are not hand-coded: for each
//! `(p, n)` they are derived once from the ghost polynomials
//! `w_i(x) = sum_{j<=i} p^j x_j^{p^{i-j}}` by solving
//! `w_i(S) = w_i(a) + w_i(b)` level by level and asserting that the division
//! by `p^i` is exact, then reducing mod p.  The solve is performed in
//! `Z/p^{i+1}`, which determines the mod-p law exactly: if `S_j` is known
//! mod `p`, then `S_j^{p^{i-j}}` is determined mod `p^{1+i-j}`, so the
//! level-`i` numerator is determined mod `p^{i+1}`.
//!
//! Multiplication polynomials are intentionally not derived: downstream code
//! only needs Teichmüller-scalar products (componentwise, since
//! `c^{p^i} = c` for `c` in F_p) and multiplication by p (p-fold addition).

use crate::algebra::{frobenius_power, LaurentPoly, PrimeField, RdpEquation};
use crate::error::{Error, Result};
use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Maximum supported Witt length.
pub const N_MAX: usize = 6;

// ---------------------------------------------------------------------------
// Multivariate polynomials over F_p (the derived laws)
// ---------------------------------------------------------------------------

/// Sparse multivariate polynomial over F_p; exponent vectors are indexed by
/// variable.  For addition laws the variables are `a_0..a_{n-1}, b_0..b_{n-1}`
/// (so `nvars = 2n`); for negation laws they are `a_0..a_{n-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MPoly {
    pub nvars: usize,
    /// Sorted by exponent vector for determinism.
    pub terms: Vec<(Vec<u16>, u32)>,
}

impl MPoly {
    /// Evaluate on elements of a component ring.
    pub fn eval<R: WittRing>(&self, ctx: &R, args: &[R::Elem]) -> Result<R::Elem> {
        assert_eq!(args.len(), self.nvars);
        let mut acc = ctx.zero();
        // Cache powers of each argument.
        let mut pows: Vec<HashMap<u16, R::Elem>> = vec![HashMap::new(); self.nvars];
        for (exps, coeff) in &self.terms {
            let mut term = ctx.scalar(*coeff);
            for (v, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pe = match pows[v].get(&e) {
                    Some(x) => x.clone(),
                    None => {
                        let x = ring_pow_base_p(ctx, &args[v], e as u64)?;
                        pows[v].insert(e, x.clone());
                        x
                    }
                };
                term = ctx.mul(&term, &pe)?;
            }
            acc = ctx.add(&acc, &term)?;
        }
        Ok(acc)
    }
}

/// `a^e` using the base-p expansion of `e`: the p-power steps go through
/// `frob` (termwise and cheap in characteristic p), leaving at most
/// `(p-1)·log_p(e)` genuine ring multiplications.
fn ring_pow_base_p<R: WittRing + ?Sized>(ctx: &R, a: &R::Elem, e: u64) -> Result<R::Elem> {
    let p = ctx.p() as u64;
    let mut digits = Vec::new();
    let mut rest = e;
    while rest > 0 {
        digits.push((rest % p) as u32);
        rest /= p;
    }
    let mut acc = ctx.scalar(1);
    let mut base = a.clone(); // a^{p^i}
    for (i, &d) in digits.iter().enumerate() {
        for _ in 0..d {
            acc = ctx.mul(&acc, &base)?;
        }
        if i + 1 < digits.len() {
            base = ctx.frob(&base)?;
        }
    }
    Ok(acc)
}

fn ring_pow<R: WittRing + ?Sized>(ctx: &R, a: &R::Elem, mut e: u64) -> Result<R::Elem> {
    let mut base = a.clone();
    let mut acc = ctx.scalar(1);
    while e > 0 {
        if e & 1 == 1 {
            acc = ctx.mul(&acc, &base)?;
        }
        e >>= 1;
        if e > 0 {
            base = ctx.mul(&base, &base)?;
        }
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Law derivation
// ---------------------------------------------------------------------------

/// Structure laws of `W_n` over F_p-algebras, derived from ghost components.
#[derive(Debug, Clone)]
pub struct WittLaws {
    pub p: u32,
    pub n: usize,
    /// `add_polys[i]` = `S_i(a_0..a_{n-1}, b_0..b_{n-1})` mod p (only the
    /// first `i+1` of each block occur).
    pub add_polys: Vec<MPoly>,
    /// `neg_polys[i]` = `N_i(a_0..a_{n-1})` mod p.
    pub neg_polys: Vec<MPoly>,
}

/// Integer polynomial with coefficients in `Z/m` (m a prime power), used
/// only during law derivation.  Keys are exponent vectors.
type ZModPoly = HashMap<Vec<u16>, u64>;

fn zm_mul(a: &ZModPoly, b: &ZModPoly, m: u64) -> ZModPoly {
    let mut out: ZModPoly = HashMap::with_capacity(a.len() * b.len() / 2 + 1);
    for (ea, &ca) in a {
        for (eb, &cb) in b {
            let c = (ca as u128 * cb as u128 % m as u128) as u64;
            if c == 0 {
                continue;
            }
            let exps: Vec<u16> = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
            let e = out.entry(exps).or_insert(0);
            *e = (*e + c) % m;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn zm_pow(a: &ZModPoly, mut e: u64, m: u64, nvars: usize) -> ZModPoly {
    let mut acc: ZModPoly = HashMap::new();
    acc.insert(vec![0u16; nvars], 1 % m);
    let mut base = a.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = zm_mul(&acc, &base, m);
        }
        e >>= 1;
        if e > 0 {
            base = zm_mul(&base, &base, m);
        }
    }
    acc
}

fn zm_axpy(dst: &mut ZModPoly, scale: u64, src: &ZModPoly, m: u64) {
    for (exps, &c) in src {
        let cc = (scale as u128 * c as u128 % m as u128) as u64;
        if cc == 0 {
            continue;
        }
        let e = dst.entry(exps.clone()).or_insert(0);
        *e = (*e + cc) % m;
    }
    dst.retain(|_, c| *c != 0);
}

/// Derive the level-`i` law numerator and divide by `p^i`.
///
/// `ghost_rhs` produces, for level `i`, the target ghost value as a
/// polynomial mod `p^{i+1}` (for addition: `w_i(a) + w_i(b)`; for negation:
/// `-w_i(a)`).  `prev` are the already-derived laws `S_0..S_{i-1}` mod p.
fn derive_level(
    p: u32,
    i: usize,
    nvars: usize,
    prev: &[MPoly],
    ghost_rhs: impl Fn(u64) -> ZModPoly,
) -> Result<MPoly> {
    let pu = p as u64;
    let modulus = pu.pow(i as u32 + 1);
    let mut num = ghost_rhs(modulus);
    // subtract sum_{j<i} p^j S_j^{p^{i-j}}
    for (j, sj) in prev.iter().enumerate().take(i) {
        let lifted: ZModPoly = sj
            .terms
            .iter()
            .map(|(e, c)| (e.clone(), *c as u64 % modulus))
            .collect();
        let pw = zm_pow(&lifted, pu.pow((i - j) as u32), modulus, nvars);
        let scale = modulus - (pu.pow(j as u32) % modulus); // -p^j
        zm_axpy(&mut num, scale % modulus, &pw, modulus);
    }
    // integrality: every coefficient divisible by p^i
    let pi = pu.pow(i as u32);
    let mut terms: Vec<(Vec<u16>, u32)> = Vec::new();
    for (exps, c) in num {
        if c % pi != 0 {
            return Err(Error::Internal(format!(
                "ghost solve at p={p}, level {i}: coefficient {c} of {exps:?} \
                 is not divisible by p^{i}"
            )));
        }
        let red = ((c / pi) % pu) as u32;
        if red != 0 {
            terms.push((exps, red));
        }
    }
    terms.sort();
    Ok(MPoly { nvars, terms })
}

fn ghost_monomials(p: u32, i: usize, vars: &[usize], nvars: usize, modulus: u64, sign_neg: bool) -> ZModPoly {
    // sum over the given variable blocks of sum_{j<=i} p^j x_j^{p^{i-j}}
    let pu = p as u64;
    let mut out: ZModPoly = HashMap::new();
    for &block in vars {
        for j in 0..=i {
            let mut exps = vec![0u16; nvars];
            exps[block + j] = pu.pow((i - j) as u32) as u16;
            let mut c = pu.pow(j as u32) % modulus;
            if sign_neg {
                c = (modulus - c) % modulus;
            }
            let e = out.entry(exps).or_insert(0);
            *e = (*e + c) % modulus;
        }
    }
    out
}

static LAWS_CACHE: Lazy<Mutex<HashMap<(u32, usize), Arc<WittLaws>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Derive (or fetch from the per-(p, n) cache) the structure laws of `W_n`.
pub fn derive_laws(p: u32, n: usize) -> Result<Arc<WittLaws>> {
    if n == 0 || n > N_MAX {
        return Err(Error::LengthCapExceeded {
            requested: n,
            cap: N_MAX,
        });
    }
    assert!(crate::algebra::is_prime(p));
    {
        let cache = LAWS_CACHE.lock().unwrap();
        if let Some(l) = cache.get(&(p, n)) {
            return Ok(l.clone());
        }
    }
    let nvars_add = 2 * n;
    let mut add_polys: Vec<MPoly> = Vec::with_capacity(n);
    for i in 0..n {
        let s = derive_level(p, i, nvars_add, &add_polys, |m| {
            ghost_monomials(p, i, &[0, n], nvars_add, m, false)
        })?;
        add_polys.push(s);
    }
    let mut neg_polys: Vec<MPoly> = Vec::with_capacity(n);
    for i in 0..n {
        let s = derive_level(p, i, n, &neg_polys, |m| {
            ghost_monomials(p, i, &[0], n, m, true)
        })?;
        neg_polys.push(s);
    }
    // S_0 = a_0 + b_0 always.
    debug_assert_eq!(add_polys[0].terms, {
        let mut a0 = vec![0u16; nvars_add];
        a0[0] = 1;
        let mut b0 = vec![0u16; nvars_add];
        b0[n] = 1;
        let mut expected = vec![(a0, 1u32), (b0, 1u32)];
        expected.sort();
        expected
    });
    let laws = Arc::new(WittLaws {
        p,
        n,
        add_polys,
        neg_polys,
    });
    let mut cache = LAWS_CACHE.lock().unwrap();
    Ok(cache.entry((p, n)).or_insert(laws).clone())
}

// ---------------------------------------------------------------------------
// Component rings
// ---------------------------------------------------------------------------

/// A commutative ring of characteristic p serving as the component ring of
/// Witt vectors.  Operations go through a context object so that quotient
/// rings can carry their rewrite rule.
pub trait WittRing {
    type Elem: Clone + PartialEq + std::fmt::Debug;
    fn p(&self) -> u32;
    fn zero(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Image of an F_p scalar.
    fn scalar(&self, k: u32) -> Self::Elem;
    /// Frobenius `a -> a^p` (may be faster than repeated `mul`).
    fn frob(&self, a: &Self::Elem) -> Result<Self::Elem> {
        ring_pow(self, a, self.p() as u64)
    }
}

/// The prime field itself as a component ring (scalar Witt vectors
/// `W_n(F_p)`, used by the self-test oracles).
#[derive(Debug, Clone, Copy)]
pub struct FpScalars {
    pub field: PrimeField,
}

impl FpScalars {
    pub fn new(p: u32) -> Self {
        FpScalars {
            field: PrimeField::new(p),
        }
    }
}

impl WittRing for FpScalars {
    type Elem = u32;
    fn p(&self) -> u32 {
        self.field.p
    }
    fn zero(&self) -> u32 {
        0
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn add(&self, a: &u32, b: &u32) -> Result<u32> {
        Ok(self.field.add(*a, *b))
    }
    fn mul(&self, a: &u32, b: &u32) -> Result<u32> {
        Ok(self.field.mul(*a, *b))
    }
    fn neg(&self, a: &u32) -> u32 {
        self.field.neg(*a)
    }
    fn scalar(&self, k: u32) -> u32 {
        k % self.field.p
    }
    fn frob(&self, a: &u32) -> Result<u32> {
        Ok(*a) // a^p = a in F_p
    }
}

/// The localized coordinate ring `R[(xy)^{-1}]` of an RDP as a component
/// ring.
#[derive(Debug, Clone)]
pub struct PolyRing<'a> {
    pub eq: &'a RdpEquation,
}

impl<'a> WittRing for PolyRing<'a> {
    type Elem = LaurentPoly;
    fn p(&self) -> u32 {
        self.eq.p
    }
    fn zero(&self) -> LaurentPoly {
        LaurentPoly::zero(self.eq.p)
    }
    fn is_zero(&self, a: &LaurentPoly) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &LaurentPoly, b: &LaurentPoly) -> Result<LaurentPoly> {
        a.add(b)
    }
    fn mul(&self, a: &LaurentPoly, b: &LaurentPoly) -> Result<LaurentPoly> {
        crate::algebra::laurent_mul(a, b, self.eq)
    }
    fn neg(&self, a: &LaurentPoly) -> LaurentPoly {
        a.neg()
    }
    fn scalar(&self, k: u32) -> LaurentPoly {
        LaurentPoly::monomial(self.eq.p, 0, 0, 0, k)
    }
    fn frob(&self, a: &LaurentPoly) -> Result<LaurentPoly> {
        frobenius_power(a, 1, self.eq)
    }
}

// ---------------------------------------------------------------------------
// Witt vectors
// ---------------------------------------------------------------------------

/// A truncated Witt vector; immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct WittVec<E> {
    pub p: u32,
    pub comps: Vec<E>,
}

impl<E: Clone> WittVec<E> {
    pub fn len(&self) -> usize {
        self.comps.len()
    }
    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }
}

fn check_match<E>(u: &WittVec<E>, v: &WittVec<E>) -> Result<()> {
    if u.p != v.p || u.comps.len() != v.comps.len() {
        return Err(Error::LawsMismatch);
    }
    Ok(())
}

/// The zero vector of length n.
pub fn witt_zero<R: WittRing>(ctx: &R, n: usize) -> WittVec<R::Elem> {
    WittVec {
        p: ctx.p(),
        comps: vec![ctx.zero(); n],
    }
}

/// Teichmüller lift `(a, 0, ..., 0)` of length n.
pub fn teichmuller<R: WittRing>(ctx: &R, a: R::Elem, n: usize) -> WittVec<R::Elem> {
    let mut comps = vec![ctx.zero(); n];
    comps[0] = a;
    WittVec { p: ctx.p(), comps }
}

/// Witt sum via the derived addition laws.
pub fn witt_add<R: WittRing>(
    ctx: &R,
    u: &WittVec<R::Elem>,
    v: &WittVec<R::Elem>,
) -> Result<WittVec<R::Elem>> {
    check_match(u, v)?;
    let n = u.len();
    if n == 0 {
        return Ok(u.clone());
    }
    let laws = derive_laws(ctx.p(), n)?;
    let args: Vec<R::Elem> = u.comps.iter().chain(v.comps.iter()).cloned().collect();
    let comps = laws
        .add_polys
        .iter()
        .map(|s| s.eval(ctx, &args))
        .collect::<Result<Vec<_>>>()?;
    Ok(WittVec { p: ctx.p(), comps })
}

/// Witt negation via the derived negation laws.
pub fn witt_neg<R: WittRing>(ctx: &R, u: &WittVec<R::Elem>) -> Result<WittVec<R::Elem>> {
    let n = u.len();
    if n == 0 {
        return Ok(u.clone());
    }
    let laws = derive_laws(ctx.p(), n)?;
    let comps = laws
        .neg_polys
        .iter()
        .map(|s| s.eval(ctx, &u.comps))
        .collect::<Result<Vec<_>>>()?;
    Ok(WittVec { p: ctx.p(), comps })
}

pub fn witt_sub<R: WittRing>(
    ctx: &R,
    u: &WittVec<R::Elem>,
    v: &WittVec<R::Elem>,
) -> Result<WittVec<R::Elem>> {
    let nv = witt_neg(ctx, v)?;
    witt_add(ctx, u, &nv)
}

/// Frobenius: componentwise p-th power (length preserved).
pub fn witt_f<R: WittRing>(ctx: &R, u: &WittVec<R::Elem>) -> Result<WittVec<R::Elem>> {
    let comps = u
        .comps
        .iter()
        .map(|c| ctx.frob(c))
        .collect::<Result<Vec<_>>>()?;
    Ok(WittVec { p: ctx.p(), comps })
}

/// Verschiebung `W_n -> W_{n+1}`: prepend a zero component.
pub fn witt_v<R: WittRing>(ctx: &R, u: &WittVec<R::Elem>) -> WittVec<R::Elem> {
    let mut comps = Vec::with_capacity(u.len() + 1);
    comps.push(ctx.zero());
    comps.extend(u.comps.iter().cloned());
    WittVec { p: ctx.p(), comps }
}

/// The V-endomorphism of `W_n` (shift with truncation): prepend a zero and
/// drop the last component.  Equals `R ∘ V = V ∘ R`.
pub fn witt_vend<R: WittRing>(ctx: &R, u: &WittVec<R::Elem>) -> WittVec<R::Elem> {
    let mut comps = Vec::with_capacity(u.len());
    comps.push(ctx.zero());
    comps.extend(u.comps[..u.len().saturating_sub(1)].iter().cloned());
    WittVec { p: ctx.p(), comps }
}

/// Restriction `W_n -> W_{n-1}`: drop the last component.
pub fn witt_restrict<E: Clone>(u: &WittVec<E>) -> WittVec<E> {
    WittVec {
        p: u.p,
        comps: u.comps[..u.len() - 1].to_vec(),
    }
}

/// Zero-padding lift candidate `W_{n} -> W_{n+1}` (a section of restriction,
/// not additive).
pub fn witt_pad<R: WittRing>(ctx: &R, u: &WittVec<R::Elem>) -> WittVec<R::Elem> {
    let mut comps = u.comps.clone();
    comps.push(ctx.zero());
    WittVec { p: ctx.p(), comps }
}

/// Transition embedding into length `len` (iterated Verschiebung): prepend
/// zeros.
pub fn witt_embed<R: WittRing>(ctx: &R, u: &WittVec<R::Elem>, len: usize) -> WittVec<R::Elem> {
    assert!(len >= u.len());
    let mut comps = vec![ctx.zero(); len - u.len()];
    comps.extend(u.comps.iter().cloned());
    WittVec { p: ctx.p(), comps }
}

/// Product with the Teichmüller lift of an F_p scalar: componentwise scaling
/// (since `k^{p^i} = k`).
pub fn witt_scale<R: WittRing>(ctx: &R, k: u32, u: &WittVec<R::Elem>) -> Result<WittVec<R::Elem>> {
    let kk = ctx.scalar(k);
    let comps = u
        .comps
        .iter()
        .map(|c| ctx.mul(&kk, c))
        .collect::<Result<Vec<_>>>()?;
    Ok(WittVec { p: ctx.p(), comps })
}

/// Multiplication by p, computed as p-fold Witt sum.
pub fn witt_pmul<R: WittRing>(ctx: &R, u: &WittVec<R::Elem>) -> Result<WittVec<R::Elem>> {
    let mut acc = witt_zero(ctx, u.len());
    for _ in 0..ctx.p() {
        acc = witt_add(ctx, &acc, u)?;
    }
    Ok(acc)
}

pub fn witt_is_zero<R: WittRing>(ctx: &R, u: &WittVec<R::Elem>) -> bool {
    u.comps.iter().all(|c| ctx.is_zero(c))
}

// ---------------------------------------------------------------------------
// Scalar oracles (used by self-tests)
// ---------------------------------------------------------------------------

/// The Teichmüller-digit isomorphism `W_n(F_p) ≅ Z/p^n`:
/// `phi(u) = sum_i p^i w(u_i)` with `w(a) = lim a^{p^k}` the multiplicative
/// lift.  Independent of the derived laws.
pub fn scalar_witt_to_zpn(u: &WittVec<u32>) -> u64 {
    let p = u.p as u64;
    let n = u.len() as u32;
    let modulus = p.pow(n);
    let omega = |a: u32| -> u64 {
        if a == 0 {
            return 0;
        }
        let mut x = a as u64 % modulus;
        loop {
            let mut y = x;
            for _ in 1..p {
                y = y * x % modulus;
            }
            // y = x^p mod p^n
            if y == x {
                return x;
            }
            x = y;
        }
    };
    let mut acc = 0u64;
    for (i, &c) in u.comps.iter().enumerate() {
        acc = (acc + p.pow(i as u32) % modulus * omega(c)) % modulus;
    }
    acc
}

/// Integer-lift ghost component `w_i` of a scalar vector, reduced mod `m`
/// (the lift is the digits themselves, viewed in Z).
pub fn scalar_ghost_mod(u: &WittVec<u32>, i: usize, m: u128) -> u128 {
    let p = u.p as u128;
    let powmod = |base: u128, mut e: u64| -> u128 {
        let mut b = base % m;
        let mut acc = 1u128 % m;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % m;
            }
            e >>= 1;
            b = b * b % m;
        }
        acc
    };
    let mut acc = 0u128;
    for j in 0..=i {
        let e = (u.p as u64).pow((i - j) as u32);
        acc = (acc + p.pow(j as u32) % m * powmod(u.comps[j] as u128, e)) % m;
    }
    acc
}

// ---------------------------------------------------------------------------
// Self-test
// ---------------------------------------------------------------------------

/// Outcome of [`self_test`]: how many instances of each identity were
/// checked, and whether all of them held.
#[derive(Debug, Clone, serde::Serialize)]
pub struct WittSelfTest {
    pub trials: u32,
    pub ghost_checks: u64,
    pub zpn_checks: u64,
    pub fv_checks: u64,
    pub teichmuller_checks: u64,
    pub failures: Vec<String>,
    pub ok: bool,
}

/// Check the derived structure laws for `p ∈ {2, 3, 5}` and lengths up to 4
/// against two oracles that bypass the laws entirely: the integer-lift ghost
/// components (addition is componentwise on ghosts, mod `p^{i+1}`) and the
/// Teichmüller-digit isomorphism `W_n(F_p) ≅ Z/p^n`.  Also checks
/// `FV = VF = p`-fold addition and `F(τ(a)) = τ(a^p)` exhaustively on
/// scalars.  Deterministic for a fixed seed.
pub fn self_test(trials: u32, seed: u64) -> Result<WittSelfTest> {
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    let mut rng = StdRng::seed_from_u64(seed);
    let mut rep = WittSelfTest {
        trials,
        ghost_checks: 0,
        zpn_checks: 0,
        fv_checks: 0,
        teichmuller_checks: 0,
        failures: Vec::new(),
        ok: true,
    };
    let fail = |failures: &mut Vec<String>, msg: String| {
        if failures.len() < 16 {
            failures.push(msg);
        }
    };
    for p in [2u32, 3, 5] {
        let ctx = FpScalars::new(p);
        for n in 1..=4usize {
            let modulus = (p as u64).pow(n as u32);
            for _ in 0..trials {
                let u = WittVec {
                    p,
                    comps: (0..n).map(|_| rng.gen_range(0..p)).collect(),
                };
                let v = WittVec {
                    p,
                    comps: (0..n).map(|_| rng.gen_range(0..p)).collect(),
                };
                let s = witt_add(&ctx, &u, &v)?;
                for i in 0..n {
                    let m = (p as u128).pow(i as u32 + 1);
                    rep.ghost_checks += 1;
                    if scalar_ghost_mod(&s, i, m)
                        != (scalar_ghost_mod(&u, i, m) + scalar_ghost_mod(&v, i, m)) % m
                    {
                        fail(
                            &mut rep.failures,
                            format!("ghost w_{i} mismatch: p={p} u={:?} v={:?}", u.comps, v.comps),
                        );
                    }
                }
                rep.zpn_checks += 1;
                if scalar_witt_to_zpn(&s)
                    != (scalar_witt_to_zpn(&u) + scalar_witt_to_zpn(&v)) % modulus
                {
                    fail(
                        &mut rep.failures,
                        format!("Z/p^n mismatch: p={p} u={:?} v={:?}", u.comps, v.comps),
                    );
                }
                // FV = VF = p-fold sum
                rep.fv_checks += 1;
                let fu = witt_f(&ctx, &u)?;
                let pu = witt_pmul(&ctx, &u)?;
                if witt_vend(&ctx, &fu) != pu || witt_f(&ctx, &witt_vend(&ctx, &u))? != pu {
                    fail(
                        &mut rep.failures,
                        format!("FV/VF mismatch: p={p} u={:?}", u.comps),
                    );
                }
            }
        }
        // F(tau(a)) = tau(a^p) = tau(a) over F_p, exhaustively
        for a in 0..p {
            rep.teichmuller_checks += 1;
            let t = teichmuller(&ctx, a, 4);
            if witt_f(&ctx, &t)? != t {
                fail(&mut rep.failures, format!("F(tau({a})) != tau({a}) at p={p}"));
            }
        }
    }
    rep.ok = rep.failures.is_empty();
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn derived_law_examples() {
        // p=2, n=2: S_1 = a_1 + b_1 + a_0 b_0
        let laws = derive_laws(2, 2).unwrap();
        let s1 = &laws.add_polys[1];
        let mut expected = vec![
            (vec![0u16, 1, 0, 0], 1u32), // a_1
            (vec![0, 0, 0, 1], 1),       // b_1
            (vec![1, 0, 1, 0], 1),       // a_0 b_0
        ];
        expected.sort();
        assert_eq!(s1.terms, expected);

        // p=3, n=2: S_1 = a_1 + b_1 - (a_0^2 b_0 + a_0 b_0^2)
        let laws = derive_laws(3, 2).unwrap();
        let s1 = &laws.add_polys[1];
        let mut expected = vec![
            (vec![0u16, 1, 0, 0], 1u32),
            (vec![0, 0, 0, 1], 1),
            (vec![2, 0, 1, 0], 2),
            (vec![1, 0, 2, 0], 2),
        ];
        expected.sort();
        assert_eq!(s1.terms, expected);
    }

    fn rand_vec(rng: &mut StdRng, p: u32, n: usize) -> WittVec<u32> {
        WittVec {
            p,
            comps: (0..n).map(|_| rng.gen_range(0..p)).collect(),
        }
    }

    #[test]
    fn zpn_oracle_addition() {
        let mut rng = StdRng::seed_from_u64(7);
        for p in [2u32, 3, 5] {
            let ctx = FpScalars::new(p);
            for n in 1..=4usize {
                let modulus = (p as u64).pow(n as u32);
                for _ in 0..100 {
                    let u = rand_vec(&mut rng, p, n);
                    let v = rand_vec(&mut rng, p, n);
                    let s = witt_add(&ctx, &u, &v).unwrap();
                    assert_eq!(
                        scalar_witt_to_zpn(&s),
                        (scalar_witt_to_zpn(&u) + scalar_witt_to_zpn(&v)) % modulus,
                        "p={p} n={n} u={:?} v={:?}",
                        u.comps,
                        v.comps
                    );
                    let m = witt_neg(&ctx, &u).unwrap();
                    assert_eq!(
                        (scalar_witt_to_zpn(&u) + scalar_witt_to_zpn(&m)) % modulus,
                        0
                    );
                }
            }
        }
    }

    #[test]
    fn ghost_lift_oracle() {
        let mut rng = StdRng::seed_from_u64(11);
        for p in [2u32, 3, 5] {
            let ctx = FpScalars::new(p);
            for n in 1..=4usize {
                for _ in 0..100 {
                    let u = rand_vec(&mut rng, p, n);
                    let v = rand_vec(&mut rng, p, n);
                    let s = witt_add(&ctx, &u, &v).unwrap();
                    for i in 0..n {
                        let m = (p as u128).pow(i as u32 + 1);
                        assert_eq!(
                            scalar_ghost_mod(&s, i, m),
                            (scalar_ghost_mod(&u, i, m) + scalar_ghost_mod(&v, i, m)) % m
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn fv_identities() {
        let mut rng = StdRng::seed_from_u64(13);
        for p in [2u32, 3, 5] {
            let ctx = FpScalars::new(p);
            for n in 2..=4usize {
                for _ in 0..20 {
                    let u = rand_vec(&mut rng, p, n);
                    // V(F(u)) = F(V(u)) = p*u  (as endomorphisms, via vend)
                    let fu = witt_f(&ctx, &u).unwrap();
                    let vfu = witt_vend(&ctx, &fu);
                    let fvu = witt_f(&ctx, &witt_vend(&ctx, &u)).unwrap();
                    let pu = witt_pmul(&ctx, &u).unwrap();
                    assert_eq!(vfu, pu);
                    assert_eq!(fvu, pu);
                    // phi(vend(u)) = p * phi(u)
                    let modulus = (p as u64).pow(n as u32);
                    assert_eq!(
                        scalar_witt_to_zpn(&witt_vend(&ctx, &u)),
                        p as u64 * scalar_witt_to_zpn(&u) % modulus
                    );
                }
            }
        }
    }

    #[test]
    fn teichmuller_props() {
        for p in [2u32, 3, 5] {
            let ctx = FpScalars::new(p);
            for a in 0..p {
                let t = teichmuller(&ctx, a, 3);
                let ft = witt_f(&ctx, &t).unwrap();
                assert_eq!(ft, t); // tau(a)^F = tau(a^p) = tau(a) over F_p
                let neg = witt_neg(&ctx, &t).unwrap();
                let s = witt_add(&ctx, &t, &neg).unwrap();
                assert!(witt_is_zero(&ctx, &s));
            }
        }
    }

    #[test]
    fn restrict_and_pad() {
        let ctx = FpScalars::new(3);
        let t = teichmuller(&ctx, 2, 3);
        let r = witt_restrict(&t);
        assert_eq!(r, teichmuller(&ctx, 2, 2));
        let vv = witt_v(&ctx, &t);
        assert_eq!(vv.comps, vec![0, 2, 0, 0]);
        assert_ne!(witt_restrict(&vv), t);
    }

    #[test]
    fn public_self_test() {
        let rep = self_test(10, 42).unwrap();
        assert!(rep.ok, "{:?}", rep.failures);
        assert_eq!(rep.teichmuller_checks, 10);
    }

    #[test]
    fn length_cap() {
        assert!(matches!(
            derive_laws(2, N_MAX + 1),
            Err(Error::LengthCapExceeded { .. })
        ));
    }
}
