//! Exact scalar arithmetic over F_p and sparse Laurent polynomial arithmetic
//! in the coordinate rings of RDP hypersurfaces, plus the RDP equation
//! catalog.
//!
//! All computations run over the prime field F_p.  This is sufficient: every
//! equation in the catalog has F_p coefficients, the Frobenius-semilinear
//! operators appearing downstream have F_p-rational matrices, and kernels of
//! such operators are defined over F_p with dimension stable under base
//! extension.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

// ---------------------------------------------------------------------------
// F_p scalar arithmetic
// ---------------------------------------------------------------------------

/// The prime field F_p.  Elements are represented by integers in `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeField {
    pub p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Self {
        assert!(is_prime(p), "characteristic must be prime, got {p}");
        PrimeField { p }
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        (a + b) % self.p
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        (a + self.p - b % self.p) % self.p
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        (self.p - a % self.p) % self.p
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        (a as u64 * b as u64 % self.p as u64) as u32
    }

    pub fn pow(&self, mut a: u32, mut e: u64) -> u32 {
        let mut acc = 1u32;
        a %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u32) -> u32 {
        assert!(a % self.p != 0, "division by zero in F_{}", self.p);
        self.pow(a, self.p as u64 - 2)
    }

    /// Canonical representative of a signed integer.
    #[inline]
    pub fn from_i64(&self, a: i64) -> u32 {
        a.rem_euclid(self.p as i64) as u32
    }
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// ---------------------------------------------------------------------------
// Monomials and Laurent polynomials
// ---------------------------------------------------------------------------

/// Exponent triple `(a, b, c)` of a monomial `x^a y^b z^c`.  After reduction
/// by the RDP equation, `0 <= c < zdeg` (for the D/E families `zdeg = 2`, so
/// `c` is 0 or 1; for `A_n` it is `n + 1`).
pub type Mono = (i32, i32, u16);

/// A sparse Laurent polynomial over F_p in `x, y, z`.  Stored coefficients
/// are never zero, and the term map is ordered lexicographically in
/// `(a, b, c)` for deterministic serialization and hashing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    pub p: u32,
    terms: BTreeMap<Mono, u32>,
}

#[inline]
fn ck_add(a: i32, b: i32) -> Result<i32> {
    a.checked_add(b).ok_or(Error::ExponentOverflow)
}

#[inline]
fn ck_mul(a: i32, b: i32) -> Result<i32> {
    a.checked_mul(b).ok_or(Error::ExponentOverflow)
}

impl LaurentPoly {
    pub fn zero(p: u32) -> Self {
        LaurentPoly {
            p,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(p: u32) -> Self {
        Self::monomial(p, 0, 0, 0, 1)
    }

    pub fn monomial(p: u32, a: i32, b: i32, c: u16, coeff: u32) -> Self {
        let mut t = BTreeMap::new();
        if coeff % p != 0 {
            t.insert((a, b, c), coeff % p);
        }
        LaurentPoly { p, terms: t }
    }

    pub fn from_terms(p: u32, terms: impl IntoIterator<Item = (Mono, u32)>) -> Self {
        let mut out = Self::zero(p);
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &u32)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Mono) -> u32 {
        *self.terms.get(m).unwrap_or(&0)
    }

    fn add_term(&mut self, m: Mono, coeff: u32) {
        let f = PrimeField { p: self.p };
        let c = f.add(self.coeff(&m), coeff);
        if c == 0 {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, c);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::CharacteristicMismatch(self.p, other.p));
        }
        let mut out = self.clone();
        for (&m, &c) in &other.terms {
            out.add_term(m, c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let f = PrimeField { p: self.p };
        LaurentPoly {
            p: self.p,
            terms: self.terms.iter().map(|(&m, &c)| (m, f.neg(c))).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: u32) -> Self {
        let f = PrimeField { p: self.p };
        let k = k % self.p;
        if k == 0 {
            return Self::zero(self.p);
        }
        LaurentPoly {
            p: self.p,
            terms: self.terms.iter().map(|(&m, &c)| (m, f.mul(c, k))).collect(),
        }
    }

    /// Raw product without reduction by the RDP equation; z-exponents may
    /// grow beyond the reduced range.
    pub fn mul_raw(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::CharacteristicMismatch(self.p, other.p));
        }
        let f = PrimeField { p: self.p };
        let mut out = Self::zero(self.p);
        for (&(a1, b1, c1), &k1) in &self.terms {
            for (&(a2, b2, c2), &k2) in &other.terms {
                let m = (
                    ck_add(a1, a2)?,
                    ck_add(b1, b2)?,
                    c1.checked_add(c2).ok_or(Error::ExponentOverflow)?,
                );
                out.add_term(m, f.mul(k1, k2));
            }
        }
        Ok(out)
    }

    /// Reduce all z-exponents below `eq.zdeg` using the rewrite rule
    /// `z^zdeg = eq.rewrite`.  Idempotent on reduced inputs.  Terminates
    /// because the rewrite has z-degree strictly below `zdeg`.
    pub fn reduce(&self, eq: &RdpEquation) -> Result<Self> {
        if self.p != eq.p {
            return Err(Error::CharacteristicMismatch(self.p, eq.p));
        }
        let d = eq.zdeg as u16;
        let mut cur = self.clone();
        loop {
            let high: Vec<(Mono, u32)> = cur
                .terms
                .iter()
                .filter(|((_, _, c), _)| *c >= d)
                .map(|(&m, &k)| (m, k))
                .collect();
            if high.is_empty() {
                return Ok(cur);
            }
            for ((a, b, c), k) in high {
                cur.terms.remove(&(a, b, c));
                // x^a y^b z^c = x^a y^b z^{c-d} * rewrite
                let stub = LaurentPoly::monomial(self.p, a, b, c - d, k);
                let repl = stub.mul_raw(&eq.rewrite)?;
                for (&m, &kk) in &repl.terms {
                    cur.add_term(m, kk);
                }
            }
        }
    }

    /// Split into the boundary parts and the doubly-negative part:
    /// terms with `b >= 0` lie in `R[x^{-1}]`, the remaining terms with
    /// `a >= 0` lie in `R[y^{-1}]`, and the rest has both pole orders
    /// positive.  Returns `(u, v, r)` with `self = u + v + r`.
    pub fn split_trichotomy(&self) -> (Self, Self, Self) {
        let mut u = Self::zero(self.p);
        let mut v = Self::zero(self.p);
        let mut r = Self::zero(self.p);
        for (&(a, b, c), &k) in &self.terms {
            if b >= 0 {
                u.terms.insert((a, b, c), k);
            } else if a >= 0 {
                v.terms.insert((a, b, c), k);
            } else {
                r.terms.insert((a, b, c), k);
            }
        }
        (u, v, r)
    }

    /// The doubly-negative part (image in the Čech quotient basis).
    pub fn doubly_negative_part(&self) -> Self {
        self.split_trichotomy().2
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, w: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(w, "0");
        }
        let mut first = true;
        for (&(a, b, c), &k) in &self.terms {
            if !first {
                write!(w, " + ")?;
            }
            first = false;
            let mut parts: Vec<String> = Vec::new();
            if k != 1 || (a, b, c) == (0, 0, 0) {
                parts.push(format!("{k}"));
            }
            for (name, e) in [("x", a as i64), ("y", b as i64), ("z", c as i64)] {
                if e == 1 {
                    parts.push(name.to_string());
                } else if e != 0 {
                    parts.push(format!("{name}^{e}"));
                }
            }
            write!(w, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// The RDP equation catalog (Table 1)
// ---------------------------------------------------------------------------

/// Dynkin family of an RDP singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    D,
    E6,
    E7,
    E8,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::A => "A",
            Family::D => "D",
            Family::E6 => "E6",
            Family::E7 => "E7",
            Family::E8 => "E8",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        match s.to_ascii_uppercase().as_str() {
            "A" => Some(Family::A),
            "D" => Some(Family::D),
            "E6" => Some(Family::E6),
            "E7" => Some(Family::E7),
            "E8" => Some(Family::E8),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, w: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(w, "{}", self.as_str())
    }
}

/// A validated row of the RDP equation catalog.
///
/// The Artin co-index `r` is stored doubled (`r2 = 2r`) so that the
/// half-integer co-indices of odd `D_n` singularities in characteristic 2 are
/// exact.  `r2 = None` marks the rows without a co-index (the F-regular
/// families in large characteristic, and `A_n` in every characteristic).
///
/// The defining equation is `f = z^zdeg - rewrite` with `rewrite` of
/// z-degree `< zdeg`.  For the `D` and `E` families `zdeg = 2`; for `A_n` the
/// equation `z^{n+1} + xy` is not quadratic in `z` and we keep the general
/// rewrite `z^{n+1} = -xy`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RdpEquation {
    pub p: u32,
    pub family: Family,
    pub n: u32,
    pub r2: Option<u32>,
    pub zdeg: u32,
    pub rewrite: LaurentPoly,
}

impl RdpEquation {
    /// The Artin co-index as an exact pair `(numerator, 2)`; `None` when the
    /// row has no co-index.
    pub fn r2(&self) -> Option<u32> {
        self.r2
    }

    /// Human-readable label such as `D_10^1` or `E_8^{3/2}`.
    pub fn label(&self) -> String {
        let fam = match self.family {
            Family::A => format!("A_{}", self.n),
            Family::D => format!("D_{}", self.n),
            Family::E6 => "E_6".to_string(),
            Family::E7 => "E_7".to_string(),
            Family::E8 => "E_8".to_string(),
        };
        match self.r2 {
            None => fam,
            Some(r2) if r2 % 2 == 0 => format!("{}^{}", fam, r2 / 2),
            Some(r2) => format!("{}^{{{}/2}}", fam, r2),
        }
    }

    /// The full equation as a polynomial (`z^zdeg - rewrite`).
    pub fn equation_poly(&self) -> LaurentPoly {
        let lead = LaurentPoly::monomial(self.p, 0, 0, self.zdeg as u16, 1);
        lead.add(&self.rewrite.neg()).expect("same characteristic")
    }

    /// ASCII equation string, e.g. `z^2 + x^2*y + x*y^3`.
    pub fn equation_string(&self) -> String {
        format!("{}", self.equation_poly())
    }
}

fn invalid(p: u32, family: Family, n: u32, r2: Option<u32>, reason: &str) -> Error {
    Error::InvalidRdpParameters {
        p,
        family: family.as_str().to_string(),
        n,
        r2,
        reason: reason.to_string(),
    }
}

/// Look up a Table 1 row and extract its rewrite rule.
///
/// `r2` is twice the Artin co-index; pass `None` for the rows that carry no
/// co-index (F-regular characteristic, or the `A` family).
pub fn rdp_equation(p: u32, family: Family, n: u32, r2: Option<u32>) -> Result<RdpEquation> {
    if !is_prime(p) {
        return Err(invalid(p, family, n, r2, "characteristic must be prime"));
    }
    // Terms of f besides the leading z-power, with their characteristic-p
    // signs; the rewrite is their negation.
    let mut tail: Vec<(Mono, i64)> = Vec::new();
    let zdeg: u32;
    match family {
        Family::A => {
            if n < 1 {
                return Err(invalid(p, family, n, r2, "A_n requires n >= 1"));
            }
            if r2.is_some() {
                return Err(invalid(p, family, n, r2, "A_n carries no co-index"));
            }
            // z^{n+1} + xy
            zdeg = n + 1;
            tail.push(((1, 1, 0), 1));
        }
        Family::D => {
            if n < 4 {
                return Err(invalid(p, family, n, r2, "D_n requires n >= 4"));
            }
            zdeg = 2;
            if p != 2 {
                if r2.is_some() {
                    return Err(invalid(p, family, n, r2, "D_n has a co-index only for p = 2"));
                }
                // z^2 + x^2 y + y^{n-1}
                tail.push(((2, 1, 0), 1));
                tail.push(((0, (n - 1) as i32, 0), 1));
            } else {
                let Some(r2v) = r2 else {
                    return Err(invalid(p, family, n, r2, "D_n in p = 2 requires a co-index"));
                };
                if r2v % 2 != n % 2 || r2v > n - 2 || (n % 2 == 1 && r2v < 1) {
                    return Err(invalid(
                        p,
                        family,
                        n,
                        r2,
                        "co-index out of range: need 2r = n mod 2 and 0 <= 2r <= n-2 \
                         (2r >= 1 for odd n)",
                    ));
                }
                if n % 2 == 0 {
                    // D_{2m}^r: z^2 + x^2 y + x y^m + z x y^{m-r}
                    let m = n / 2;
                    let r = r2v / 2;
                    tail.push(((2, 1, 0), 1));
                    tail.push(((1, m as i32, 0), 1));
                    tail.push(((1, (m - r) as i32, 1), 1));
                } else {
                    // D_{2m+1}^{s+1/2}: z^2 + x^2 y + z y^m + z x y^{m-s}
                    let m = (n - 1) / 2;
                    let s = (r2v - 1) / 2;
                    tail.push(((2, 1, 0), 1));
                    tail.push(((0, m as i32, 1), 1));
                    tail.push(((1, (m - s) as i32, 1), 1));
                }
            }
        }
        Family::E6 | Family::E7 | Family::E8 => {
            let expected_n = match family {
                Family::E6 => 6,
                Family::E7 => 7,
                _ => 8,
            };
            if n != expected_n {
                return Err(invalid(p, family, n, r2, "index n must match the family"));
            }
            zdeg = 2;
            // Base equation.
            let base: &[(Mono, i64)] = match family {
                Family::E6 => &[((3, 0, 0), 1), ((0, 4, 0), 1)], // x^3 + y^4
                Family::E7 => &[((3, 0, 0), 1), ((1, 3, 0), 1)], // x^3 + x y^3
                _ => &[((3, 0, 0), 1), ((0, 5, 0), 1)],          // x^3 + y^5
            };
            let fregular_bound = match family {
                Family::E6 | Family::E7 => 3,
                _ => 5,
            };
            if p > fregular_bound {
                if r2.is_some() {
                    return Err(invalid(
                        p,
                        family,
                        n,
                        r2,
                        "this characteristic is F-regular; the row carries no co-index",
                    ));
                }
                tail.extend_from_slice(base);
            } else {
                let Some(r2v) = r2 else {
                    return Err(invalid(p, family, n, r2, "this characteristic requires a co-index"));
                };
                if r2v % 2 != 0 {
                    return Err(invalid(p, family, n, r2, "E-family co-indices are integers"));
                }
                let r = r2v / 2;
                // The extra monomial per (family, p, r); `None` entry = base
                // equation (r = 0), invalid co-index otherwise.
                let extra: Option<Option<(Mono, i64)>> = match (family, p, r) {
                    (Family::E6, 3, 1) => Some(Some(((2, 2, 0), 1))), // + x^2 y^2
                    (Family::E6, 3, 0) => Some(None),
                    (Family::E6, 2, 1) => Some(Some(((1, 1, 1), 1))), // base has y^2 z; + xyz
                    (Family::E6, 2, 0) => Some(None),
                    (Family::E7, 3, 1) => Some(Some(((2, 2, 0), 1))),
                    (Family::E7, 3, 0) => Some(None),
                    (Family::E7, 2, 3) => Some(Some(((1, 1, 1), 1))),
                    (Family::E7, 2, 2) => Some(Some(((0, 3, 1), 1))),
                    (Family::E7, 2, 1) => Some(Some(((2, 1, 1), 1))),
                    (Family::E7, 2, 0) => Some(None),
                    (Family::E8, 5, 1) => Some(Some(((1, 4, 0), 1))),
                    (Family::E8, 5, 0) => Some(None),
                    (Family::E8, 3, 2) => Some(Some(((2, 2, 0), 1))),
                    (Family::E8, 3, 1) => Some(Some(((2, 3, 0), 1))),
                    (Family::E8, 3, 0) => Some(None),
                    (Family::E8, 2, 4) => Some(Some(((1, 1, 1), 1))),
                    (Family::E8, 2, 3) => Some(Some(((0, 3, 1), 1))),
                    (Family::E8, 2, 2) => Some(Some(((1, 2, 1), 1))),
                    (Family::E8, 2, 1) => Some(Some(((1, 3, 1), 1))),
                    (Family::E8, 2, 0) => Some(None),
                    _ => None,
                };
                let Some(extra) = extra else {
                    return Err(invalid(p, family, n, r2, "no such Table 1 row"));
                };
                if family == Family::E6 && p == 2 {
                    // p = 2 E_6 base equation is z^2 + x^3 + y^2 z.
                    tail.push(((3, 0, 0), 1));
                    tail.push(((0, 2, 1), 1));
                } else {
                    tail.extend_from_slice(base);
                }
                if let Some(t) = extra {
                    tail.push(t);
                }
            }
        }
    }
    let f = PrimeField::new(p);
    let rewrite = LaurentPoly::from_terms(
        p,
        tail.into_iter().map(|(m, c)| (m, f.neg(f.from_i64(c)))),
    );
    debug_assert!(rewrite.terms().all(|((_, _, c), _)| (*c as u32) < zdeg));
    Ok(RdpEquation {
        p,
        family,
        n,
        r2,
        zdeg,
        rewrite,
    })
}

/// Fully reduced exact product in `R[(xy)^{-1}]`.
pub fn laurent_mul(a: &LaurentPoly, b: &LaurentPoly, eq: &RdpEquation) -> Result<LaurentPoly> {
    a.mul_raw(b)?.reduce(eq)
}

/// `a^{p^m}`, reduced.  Since coefficients lie in F_p, a single Frobenius is
/// the monomial-exponent dilation `x^a y^b z^c -> x^{pa} y^{pb} z^{pc}`
/// followed by reduction.
pub fn frobenius_power(a: &LaurentPoly, m: u32, eq: &RdpEquation) -> Result<LaurentPoly> {
    if a.p != eq.p {
        return Err(Error::CharacteristicMismatch(a.p, eq.p));
    }
    let p = eq.p as i32;
    let mut cur = a.clone();
    for _ in 0..m {
        let mut dil = LaurentPoly::zero(eq.p);
        for (&(x, y, c), &k) in cur.terms.clone().iter() {
            let cc = (c as u32)
                .checked_mul(eq.p)
                .filter(|v| *v <= u16::MAX as u32)
                .ok_or(Error::ExponentOverflow)? as u16;
            dil.add_term((ck_mul(x, p)?, ck_mul(y, p)?, cc), k);
        }
        cur = dil.reduce(eq)?;
    }
    Ok(cur)
}

/// All rows of the equation catalog for a characteristic, with `D_n` rows up
/// to the given index bound (the `A` and `D` families are infinite).
pub fn catalog_rows(p: u32, max_a: u32, max_d: u32) -> Vec<RdpEquation> {
    let mut rows = Vec::new();
    for n in 1..=max_a {
        rows.push(rdp_equation(p, Family::A, n, None).unwrap());
    }
    for n in 4..=max_d {
        if p == 2 {
            let start = n % 2;
            let mut r2 = start;
            while r2 <= n - 2 {
                rows.push(rdp_equation(p, Family::D, n, Some(r2)).unwrap());
                r2 += 2;
            }
        } else {
            rows.push(rdp_equation(p, Family::D, n, None).unwrap());
        }
    }
    for family in [Family::E6, Family::E7, Family::E8] {
        let n = match family {
            Family::E6 => 6,
            Family::E7 => 7,
            _ => 8,
        };
        let bound = match family {
            Family::E6 | Family::E7 => 3,
            _ => 5,
        };
        if p > bound {
            rows.push(rdp_equation(p, family, n, None).unwrap());
        } else {
            for r in 0..=4 {
                if let Ok(eq) = rdp_equation(p, family, n, Some(2 * r)) {
                    rows.push(eq);
                }
            }
        }
    }
    rows
}

/// Serializable catalog row (see the JSON external interface).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatalogRowJson {
    pub p: u32,
    pub family: String,
    pub n: u32,
    pub r2: Option<u32>,
    pub equation: String,
}

impl From<&RdpEquation> for CatalogRowJson {
    fn from(eq: &RdpEquation) -> Self {
        CatalogRowJson {
            p: eq.p,
            family: eq.family.as_str().to_string(),
            n: eq.n,
            r2: eq.r2,
            equation: eq.equation_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(p: u32, a: i32, b: i32, c: u16) -> LaurentPoly {
        LaurentPoly::monomial(p, a, b, c, 1)
    }

    #[test]
    fn table1_sample_equations() {
        let eq = rdp_equation(3, Family::E6, 6, Some(0)).unwrap();
        assert_eq!(eq.equation_string(), "z^2 + y^4 + x^3");
        // rewrite z^2 = -(x^3 + y^4)
        assert_eq!(eq.rewrite.coeff(&(3, 0, 0)), 2);
        assert_eq!(eq.rewrite.coeff(&(0, 4, 0)), 2);

        // D_6^0 in p = 2: z^2 + x^2 y + x y^3 + z x y^3
        let eq = rdp_equation(2, Family::D, 6, Some(0)).unwrap();
        assert_eq!(eq.rewrite.coeff(&(2, 1, 0)), 1);
        assert_eq!(eq.rewrite.coeff(&(1, 3, 0)), 1);
        assert_eq!(eq.rewrite.coeff(&(1, 3, 1)), 1);

        // F-regular E6 in p = 5 carries no co-index.
        assert!(rdp_equation(5, Family::E6, 6, Some(0)).is_err());
        assert!(rdp_equation(5, Family::E6, 6, None).is_ok());
    }

    #[test]
    fn an_equation_general_degree() {
        let eq = rdp_equation(2, Family::A, 3, None).unwrap();
        assert_eq!(eq.zdeg, 4);
        // z^4 = xy in characteristic 2
        assert_eq!(eq.rewrite.coeff(&(1, 1, 0)), 1);
        let z3 = mono(2, 0, 0, 3);
        let sq = laurent_mul(&z3, &z3, &eq).unwrap();
        // z^6 = z^2 * xy
        assert_eq!(sq, mono(2, 1, 1, 2));
    }

    #[test]
    fn z_squared_in_e8() {
        let eq = rdp_equation(2, Family::E8, 8, Some(0)).unwrap();
        let z = mono(2, 0, 0, 1);
        let z2 = laurent_mul(&z, &z, &eq).unwrap();
        let expected = mono(2, 3, 0, 0).add(&mono(2, 0, 5, 0)).unwrap();
        assert_eq!(z2, expected);
    }

    #[test]
    fn frobenius_of_f1_in_e8_1() {
        // (z/xy)^2 = (y^3 + zxy)/x^2 + x/y^2 in E_8^1, p = 2.
        let eq = rdp_equation(2, Family::E8, 8, Some(2)).unwrap();
        let f1 = mono(2, -1, -1, 1);
        let sq = frobenius_power(&f1, 1, &eq).unwrap();
        let expected = LaurentPoly::from_terms(
            2,
            [((-2, 3, 0), 1), ((-1, 1, 1), 1), ((1, -2, 0), 1)],
        );
        assert_eq!(sq, expected);
    }

    #[test]
    fn frobenius_is_additive() {
        let eq = rdp_equation(3, Family::E8, 8, Some(2)).unwrap();
        let a = LaurentPoly::from_terms(3, [((-1, -2, 1), 2), ((0, -1, 0), 1), ((2, 3, 1), 2)]);
        let b = LaurentPoly::from_terms(3, [((-2, -1, 1), 1), ((1, 1, 0), 2)]);
        let lhs = frobenius_power(&a.add(&b).unwrap(), 1, &eq).unwrap();
        let rhs = frobenius_power(&a, 1, &eq)
            .unwrap()
            .add(&frobenius_power(&b, 1, &eq).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn reduction_idempotent_and_equation_vanishes() {
        for p in [2u32, 3, 5] {
            for eq in catalog_rows(p, 4, 9) {
                let f = eq.equation_poly();
                let red = f.reduce(&eq).unwrap();
                assert!(red.is_zero(), "equation must vanish in {}", eq.label());
                let r2 = eq.rewrite.reduce(&eq).unwrap();
                assert_eq!(r2, eq.rewrite);
            }
        }
    }

    #[test]
    fn trichotomy_splits() {
        let a = LaurentPoly::from_terms(2, [((-1, -1, 1), 1), ((0, -2, 0), 1), ((-3, 2, 0), 1)]);
        let (u, v, r) = a.split_trichotomy();
        assert_eq!(u, mono(2, -3, 2, 0));
        assert_eq!(v, mono(2, 0, -2, 0));
        assert_eq!(r, mono(2, -1, -1, 1));
        let sum = u.add(&v).unwrap().add(&r).unwrap();
        assert_eq!(sum, a);
    }
}
