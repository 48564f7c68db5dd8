//! Exact scalar fields: the rationals and finite fields `GF(p^k)`.
//!
//! All linear algebra in this crate is generic over the [`Field`] trait.
//! A field value acts as a context object: elements themselves are plain
//! data (`BigRational` for the rationals, a coefficient vector for
//! `GF(p^k)`) and every arithmetic operation goes through the field.
//! This keeps runtime-chosen moduli out of the element type while the
//! rest of the crate stays scalar-type-agnostic.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported finite-field order. Modulus irreducibility is checked
/// by trial factorization, which stays cheap up to this size.
pub const MAX_FIELD_ORDER: u128 = 1 << 20;

/// Serializable description of a scalar field.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum FieldSpec {
    #[serde(rename = "Q")]
    Rationals,
    #[serde(rename = "GF")]
    FiniteField {
        p: u64,
        k: u32,
        /// Monic modulus, constant coefficient first, length `k + 1`.
        /// Omitted in canonical serializations (the lexicographically
        /// smallest monic irreducible is implied).
        #[serde(skip_serializing_if = "Option::is_none", default)]
        modulus: Option<Vec<u64>>,
    },
}

impl FieldSpec {
    pub fn gf(p: u64, k: u32) -> Self {
        FieldSpec::FiniteField { p, k, modulus: None }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::FiniteField { p, k: 1, .. } => write!(f, "GF{p}"),
            FieldSpec::FiniteField { p, k, .. } => write!(f, "GF{p}^{k}"),
        }
    }
}

/// An exact field of scalars. Elements are inert data; the field supplies
/// all operations (so constructors like `from_i64` naturally live on the
/// field value).
#[allow(clippy::wrong_self_convention)]
pub trait Field: Clone + PartialEq + Eq + fmt::Debug {
    type Elem: Clone + PartialEq + Eq + std::hash::Hash + fmt::Debug;

    fn spec(&self) -> FieldSpec;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }
    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    /// Number of elements, `None` for infinite fields.
    fn order(&self) -> Option<u128>;

    /// All elements in canonical order, `None` for infinite fields.
    fn elements(&self) -> Option<Vec<Self::Elem>>;

    /// Total order on elements used for canonical enumeration output.
    fn cmp_elems(&self, a: &Self::Elem, b: &Self::Elem) -> Ordering;

    fn elem_to_string(&self, a: &Self::Elem) -> String;
    fn parse_elem(&self, s: &str) -> Result<Self::Elem>;

    /// The degree-`degree` extension of this field, when one is supported.
    fn extension(&self, degree: u32) -> Result<Self>;

    /// Precomputed data for [`Field::embed`] into `target` (an extension
    /// produced by [`Field::extension`]).
    fn embedding_data(&self, target: &Self) -> Result<Vec<Self::Elem>>;

    /// Map an element into `target` using data from [`Field::embedding_data`].
    fn embed(&self, a: &Self::Elem, target: &Self, data: &[Self::Elem]) -> Self::Elem;

    /// All roots of the polynomial with the given ascending coefficients.
    /// Exhaustive over finite fields; over the rationals via the rational
    /// root theorem (divisor search capped, every candidate verified by
    /// evaluation).
    fn roots_of_poly(&self, coeffs: &[Self::Elem]) -> Vec<Self::Elem>;
}

/// The field of arbitrary-precision rationals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Rationals;

impl Rationals {
    pub fn ratio(&self, num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

impl Field for Rationals {
    type Elem = BigRational;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Rationals
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> Result<BigRational> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(a.recip())
    }
    fn order(&self) -> Option<u128> {
        None
    }
    fn elements(&self) -> Option<Vec<BigRational>> {
        None
    }
    fn cmp_elems(&self, a: &BigRational, b: &BigRational) -> Ordering {
        a.cmp(b)
    }
    fn elem_to_string(&self, a: &BigRational) -> String {
        if a.denom().is_one() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
    fn parse_elem(&self, s: &str) -> Result<BigRational> {
        let s = s.trim();
        let parse_int = |t: &str| -> Result<BigInt> {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| Error::MalformedInput(format!("bad rational: {s:?}")))
        };
        match s.split_once('/') {
            Some((n, d)) => {
                let den = parse_int(d)?;
                if den.is_zero() {
                    return Err(Error::MalformedInput(format!("zero denominator: {s:?}")));
                }
                Ok(BigRational::new(parse_int(n)?, den))
            }
            None => Ok(BigRational::from_integer(parse_int(s)?)),
        }
    }
    fn extension(&self, degree: u32) -> Result<Self> {
        if degree == 1 {
            Ok(Rationals)
        } else {
            Err(Error::UnsupportedField)
        }
    }
    fn embedding_data(&self, target: &Self) -> Result<Vec<BigRational>> {
        if target == self {
            Ok(Vec::new())
        } else {
            Err(Error::UnsupportedField)
        }
    }
    fn embed(&self, a: &BigRational, _target: &Self, _data: &[BigRational]) -> BigRational {
        a.clone()
    }
    fn roots_of_poly(&self, coeffs: &[BigRational]) -> Vec<BigRational> {
        rational_roots(coeffs)
    }
}

/// Rational roots by the rational root theorem. Divisor enumeration is
/// capped; candidates are always verified, so reported roots are exact.
fn rational_roots(coeffs: &[BigRational]) -> Vec<BigRational> {
    use num_traits::ToPrimitive;
    let mut c: Vec<BigRational> = coeffs.to_vec();
    while c.last().map(|x| x.is_zero()).unwrap_or(false) {
        c.pop();
    }
    if c.len() <= 1 {
        return Vec::new();
    }
    let mut roots = Vec::new();
    // Factor out x while the constant term vanishes.
    let mut has_zero_root = false;
    while c.len() > 1 && c[0].is_zero() {
        has_zero_root = true;
        c.remove(0);
    }
    if has_zero_root {
        roots.push(BigRational::zero());
    }
    if c.len() <= 1 {
        return roots;
    }
    // Clear denominators.
    let mut denom_lcm = BigInt::one();
    for x in &c {
        denom_lcm = num_integer::lcm(denom_lcm, x.denom().clone());
    }
    let ints: Vec<BigInt> =
        c.iter().map(|x| (x * BigRational::from_integer(denom_lcm.clone())).to_integer()).collect();
    let eval = |r: &BigRational| -> bool {
        let mut acc = BigRational::zero();
        for k in c.iter().rev() {
            acc = acc * r + k;
        }
        acc.is_zero()
    };
    let divisors = |n: &BigInt| -> Vec<BigInt> {
        let n = n.magnitude().to_u128().unwrap_or(u128::MAX);
        let mut out = Vec::new();
        let mut d = 1u128;
        while d.saturating_mul(d) <= n && d <= 1 << 20 {
            if n.is_multiple_of(d) {
                out.push(BigInt::from(d));
                out.push(BigInt::from(n / d));
            }
            d += 1;
        }
        out
    };
    let const_divs = divisors(&ints[0]);
    let lead_divs = divisors(ints.last().unwrap());
    let mut seen = std::collections::HashSet::new();
    for p in &const_divs {
        for q in &lead_divs {
            for sign in [1i64, -1] {
                let cand = BigRational::new(p * BigInt::from(sign), q.clone());
                if seen.insert(cand.clone()) && eval(&cand) {
                    roots.push(cand);
                }
            }
        }
    }
    roots
}

/// Rational from an integer pair, for test and construction convenience.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

// ---------------------------------------------------------------------------
// Polynomials over the prime field F_p, used for modulus construction and
// GF(p^k) arithmetic. Coefficients are ascending, trailing zeros trimmed.
// ---------------------------------------------------------------------------

fn fp_trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn fp_add(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = (x + y) % p;
    }
    fp_trim(out)
}

fn fp_scale(p: u64, a: &[u64], c: u64) -> Vec<u64> {
    fp_trim(a.iter().map(|x| x * c % p).collect())
}

fn fp_mul(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    fp_trim(out)
}

fn fp_inv_scalar(p: u64, a: u64) -> u64 {
    // Fermat; p is prime and a nonzero.
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

/// Division with remainder; divisor must be nonzero.
fn fp_divrem(p: u64, a: &[u64], b: &[u64]) -> (Vec<u64>, Vec<u64>) {
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    if a.len() < b.len() {
        return (Vec::new(), fp_trim(rem));
    }
    let mut quo = vec![0u64; a.len() - b.len() + 1];
    let lead_inv = fp_inv_scalar(p, b[db]);
    while rem.len() >= b.len() && !rem.is_empty() {
        let dr = rem.len() - 1;
        let c = rem[dr] * lead_inv % p;
        quo[dr - db] = c;
        for (i, bc) in b.iter().enumerate() {
            let idx = dr - db + i;
            rem[idx] = (rem[idx] + p - bc * c % p) % p;
        }
        rem = fp_trim(rem);
    }
    (fp_trim(quo), rem)
}

fn fp_gcd_ext(p: u64, a: &[u64], b: &[u64]) -> (Vec<u64>, Vec<u64>, Vec<u64>) {
    // Returns (g, s, t) with s*a + t*b = g.
    let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
    let (mut s0, mut s1) = (vec![1u64], Vec::new());
    let (mut t0, mut t1) = (Vec::new(), vec![1u64]);
    while !r1.is_empty() {
        let (q, r) = fp_divrem(p, &r0, &r1);
        let new_s = fp_add(p, &s0, &fp_scale(p, &fp_mul(p, &q, &s1), p - 1));
        let new_t = fp_add(p, &t0, &fp_scale(p, &fp_mul(p, &q, &t1), p - 1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, new_s);
        t0 = std::mem::replace(&mut t1, new_t);
    }
    (r0, s0, t0)
}

fn fp_is_irreducible(p: u64, m: &[u64]) -> bool {
    let deg = m.len() - 1;
    if deg == 0 {
        return false;
    }
    if deg == 1 {
        return true;
    }
    // Trial division by every monic polynomial of degree 1..=deg/2.
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut n = idx;
            for _ in 0..d {
                g.push(n % p);
                n /= p;
            }
            g.push(1);
            let (_, r) = fp_divrem(p, m, &g);
            if r.is_empty() {
                return false;
            }
        }
    }
    true
}

/// The lexicographically smallest monic irreducible of degree `k` over F_p,
/// ordering polynomials by the base-`p` value of their coefficient vector.
fn fp_smallest_irreducible(p: u64, k: u32) -> Vec<u64> {
    let k = k as usize;
    let count = p.pow(k as u32);
    for idx in 0..count {
        let mut m = Vec::with_capacity(k + 1);
        let mut n = idx;
        for _ in 0..k {
            m.push(n % p);
            n /= p;
        }
        m.push(1);
        if fp_is_irreducible(p, &m) {
            return m;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over F_p")
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

// ---------------------------------------------------------------------------
// GF(p^k)
// ---------------------------------------------------------------------------

/// An element of `GF(p^k)`: residue coefficients, ascending, length `k`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GfElem(pub Vec<u64>);

impl fmt::Debug for GfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf{:?}", self.0)
    }
}

#[derive(Debug, PartialEq, Eq)]
struct GfInner {
    p: u64,
    k: u32,
    /// Monic irreducible modulus, ascending coefficients, length `k + 1`.
    modulus: Vec<u64>,
}

/// The finite field `GF(p^k)` presented as `F_p[x]/(modulus)`.
#[derive(Debug, Clone)]
pub struct GaloisField(Arc<GfInner>);

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0 || *self.0 == *other.0
    }
}
impl Eq for GaloisField {}

impl GaloisField {
    /// Field with the canonical (lexicographically smallest) modulus.
    pub fn new(p: u64, k: u32) -> Result<Self> {
        Self::with_modulus(p, k, None)
    }

    /// Prime field `F_p`.
    pub fn prime(p: u64) -> Result<Self> {
        Self::new(p, 1)
    }

    pub fn with_modulus(p: u64, k: u32, modulus: Option<Vec<u64>>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::PreconditionViolated(format!("{p} is not prime")));
        }
        if k == 0 {
            return Err(Error::PreconditionViolated("extension degree must be >= 1".into()));
        }
        let order = (p as u128).checked_pow(k).filter(|&o| o <= MAX_FIELD_ORDER);
        if order.is_none() {
            return Err(Error::BoundExceeded(format!(
                "field order {p}^{k} exceeds {MAX_FIELD_ORDER}"
            )));
        }
        let modulus = match modulus {
            Some(m) => {
                let m: Vec<u64> = m.iter().map(|c| c % p).collect();
                if m.len() != k as usize + 1 || *m.last().unwrap() != 1 {
                    return Err(Error::PreconditionViolated(
                        "modulus must be monic of degree k".into(),
                    ));
                }
                if !fp_is_irreducible(p, &m) {
                    return Err(Error::PreconditionViolated("modulus is reducible".into()));
                }
                m
            }
            None => fp_smallest_irreducible(p, k),
        };
        Ok(GaloisField(Arc::new(GfInner { p, k, modulus })))
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<Self> {
        match spec {
            FieldSpec::Rationals => Err(Error::UnsupportedField),
            FieldSpec::FiniteField { p, k, modulus } => {
                Self::with_modulus(*p, *k, modulus.clone())
            }
        }
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }
    pub fn degree(&self) -> u32 {
        self.0.k
    }
    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    fn reduce(&self, coeffs: Vec<u64>) -> GfElem {
        let (_, mut r) = fp_divrem(self.0.p, &coeffs, &self.0.modulus);
        r.resize(self.0.k as usize, 0);
        GfElem(r)
    }

    /// Element with the given canonical index (base-`p` digits).
    pub fn elem_from_index(&self, mut idx: u128) -> GfElem {
        let mut coeffs = Vec::with_capacity(self.0.k as usize);
        for _ in 0..self.0.k {
            coeffs.push((idx % self.0.p as u128) as u64);
            idx /= self.0.p as u128;
        }
        GfElem(coeffs)
    }

    pub fn elem_index(&self, a: &GfElem) -> u128 {
        let mut idx = 0u128;
        for c in a.0.iter().rev() {
            idx = idx * self.0.p as u128 + *c as u128;
        }
        idx
    }

    /// The residue class of `x`, a generator of the field over `F_p` when
    /// `k > 1`.
    pub fn gen(&self) -> GfElem {
        if self.0.k == 1 {
            // x reduces to -modulus[0] in F_p.
            let c = (self.0.p - self.0.modulus[0] % self.0.p) % self.0.p;
            GfElem(vec![c])
        } else {
            let mut coeffs = vec![0u64; self.0.k as usize];
            coeffs[1] = 1;
            GfElem(coeffs)
        }
    }
}

impl Field for GaloisField {
    type Elem = GfElem;

    fn spec(&self) -> FieldSpec {
        FieldSpec::FiniteField {
            p: self.0.p,
            k: self.0.k,
            modulus: if self.0.modulus == fp_smallest_irreducible(self.0.p, self.0.k) {
                None
            } else {
                Some(self.0.modulus.clone())
            },
        }
    }
    fn zero(&self) -> GfElem {
        GfElem(vec![0; self.0.k as usize])
    }
    fn one(&self) -> GfElem {
        let mut c = vec![0; self.0.k as usize];
        c[0] = 1;
        GfElem(c)
    }
    fn from_i64(&self, n: i64) -> GfElem {
        let p = self.0.p as i64;
        let r = ((n % p) + p) % p;
        let mut c = vec![0; self.0.k as usize];
        c[0] = r as u64;
        GfElem(c)
    }
    fn add(&self, a: &GfElem, b: &GfElem) -> GfElem {
        let p = self.0.p;
        GfElem(a.0.iter().zip(&b.0).map(|(x, y)| (x + y) % p).collect())
    }
    fn sub(&self, a: &GfElem, b: &GfElem) -> GfElem {
        let p = self.0.p;
        GfElem(a.0.iter().zip(&b.0).map(|(x, y)| (x + p - y) % p).collect())
    }
    fn neg(&self, a: &GfElem) -> GfElem {
        let p = self.0.p;
        GfElem(a.0.iter().map(|x| (p - x) % p).collect())
    }
    fn mul(&self, a: &GfElem, b: &GfElem) -> GfElem {
        self.reduce(fp_mul(self.0.p, &fp_trim(a.0.clone()), &fp_trim(b.0.clone())))
    }
    fn inv(&self, a: &GfElem) -> Result<GfElem> {
        let at = fp_trim(a.0.clone());
        if at.is_empty() {
            return Err(Error::DivisionByZero);
        }
        let (g, s, _) = fp_gcd_ext(self.0.p, &at, &self.0.modulus);
        debug_assert_eq!(g.len(), 1, "modulus is irreducible");
        let ginv = fp_inv_scalar(self.0.p, g[0]);
        Ok(self.reduce(fp_scale(self.0.p, &s, ginv)))
    }
    fn is_zero(&self, a: &GfElem) -> bool {
        a.0.iter().all(|&c| c == 0)
    }
    fn order(&self) -> Option<u128> {
        Some((self.0.p as u128).pow(self.0.k))
    }
    fn elements(&self) -> Option<Vec<GfElem>> {
        let order = self.order().unwrap();
        Some((0..order).map(|i| self.elem_from_index(i)).collect())
    }
    fn cmp_elems(&self, a: &GfElem, b: &GfElem) -> Ordering {
        self.elem_index(a).cmp(&self.elem_index(b))
    }
    fn elem_to_string(&self, a: &GfElem) -> String {
        if self.0.k == 1 {
            a.0[0].to_string()
        } else {
            let parts: Vec<String> = a.0.iter().map(|c| c.to_string()).collect();
            format!("[{}]", parts.join(","))
        }
    }
    fn parse_elem(&self, s: &str) -> Result<GfElem> {
        let s = s.trim();
        let bad = || Error::MalformedInput(format!("bad GF element: {s:?}"));
        let parse_c = |t: &str| -> Result<u64> {
            let n: i64 = t.trim().parse().map_err(|_| bad())?;
            let p = self.0.p as i64;
            Ok((((n % p) + p) % p) as u64)
        };
        if let Some(inner) = s.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
            let mut coeffs = Vec::new();
            if !inner.trim().is_empty() {
                for part in inner.split(',') {
                    coeffs.push(parse_c(part)?);
                }
            }
            if coeffs.len() > self.0.k as usize {
                return Err(bad());
            }
            coeffs.resize(self.0.k as usize, 0);
            Ok(GfElem(coeffs))
        } else {
            let mut coeffs = vec![0; self.0.k as usize];
            coeffs[0] = parse_c(s)?;
            Ok(GfElem(coeffs))
        }
    }
    fn extension(&self, degree: u32) -> Result<Self> {
        if degree == 0 {
            return Err(Error::PreconditionViolated("extension degree must be >= 1".into()));
        }
        GaloisField::new(self.0.p, self.0.k * degree)
    }
    fn embedding_data(&self, target: &Self) -> Result<Vec<GfElem>> {
        if self.0.p != target.0.p || !target.0.k.is_multiple_of(self.0.k) {
            return Err(Error::FieldMismatch(format!(
                "{} does not embed into {}",
                self.spec(),
                target.spec()
            )));
        }
        if self.0.k == 1 {
            // Constants embed as constants; no root needed.
            return Ok(Vec::new());
        }
        if self == target {
            return Ok(Vec::new());
        }
        // Find the first root of our modulus in the target, then tabulate
        // its powers. Any root gives a field embedding.
        let order = target.order().unwrap();
        for idx in 0..order {
            let cand = target.elem_from_index(idx);
            let mut acc = target.zero();
            // Horner evaluation of the modulus at cand.
            for &c in self.0.modulus.iter().rev() {
                acc = target.mul(&acc, &cand);
                acc = target.add(&acc, &target.from_i64(c as i64));
            }
            if target.is_zero(&acc) {
                let mut powers = Vec::with_capacity(self.0.k as usize);
                let mut pw = target.one();
                for _ in 0..self.0.k {
                    powers.push(pw.clone());
                    pw = target.mul(&pw, &cand);
                }
                return Ok(powers);
            }
        }
        Err(Error::FieldMismatch("modulus has no root in target field".into()))
    }
    fn roots_of_poly(&self, coeffs: &[GfElem]) -> Vec<GfElem> {
        let mut c: Vec<GfElem> = coeffs.to_vec();
        while c.last().map(|x| self.is_zero(x)).unwrap_or(false) {
            c.pop();
        }
        if c.len() <= 1 {
            return Vec::new();
        }
        self.elements()
            .unwrap()
            .into_iter()
            .filter(|e| {
                let mut acc = self.zero();
                for k in c.iter().rev() {
                    acc = self.add(&self.mul(&acc, e), k);
                }
                self.is_zero(&acc)
            })
            .collect()
    }
    fn embed(&self, a: &GfElem, target: &Self, data: &[GfElem]) -> GfElem {
        if self == target {
            return a.clone();
        }
        if data.is_empty() {
            // Prime-field constants.
            let mut c = vec![0; target.0.k as usize];
            c[0] = a.0[0];
            return GfElem(c);
        }
        let mut acc = target.zero();
        for (c, pw) in a.0.iter().zip(data) {
            let term = target.mul(&target.from_i64(*c as i64), pw);
            acc = target.add(&acc, &term);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_arithmetic() {
        let q = Rationals;
        // 1/3 + 1/6 = 1/2
        assert_eq!(q.add(&rat(1, 3), &rat(1, 6)), rat(1, 2));
        assert_eq!(q.elem_to_string(&rat(1, 2)), "1/2");
        assert_eq!(q.elem_to_string(&rat(-4, 2)), "-2");
        assert_eq!(q.parse_elem("-7/3").unwrap(), rat(-7, 3));
        assert!(q.inv(&q.zero()).is_err());
    }

    #[test]
    fn gf4_modulus_and_product() {
        let f4 = GaloisField::new(2, 2).unwrap();
        // Canonical modulus is x^2 + x + 1.
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        let x = f4.gen();
        let x1 = f4.add(&x, &f4.one());
        // x * (x + 1) = 1
        assert_eq!(f4.mul(&x, &x1), f4.one());
    }

    #[test]
    fn gf3_inverse() {
        let f3 = GaloisField::prime(3).unwrap();
        let two = f3.from_i64(2);
        assert_eq!(f3.inv(&two).unwrap(), two);
    }

    #[test]
    fn gf8_canonical_modulus() {
        let f8 = GaloisField::new(2, 3).unwrap();
        // x^3 + x + 1 has smaller base-2 value than x^3 + x^2 + 1.
        assert_eq!(f8.modulus(), &[1, 1, 0, 1]);
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(GaloisField::new(4, 1).is_err());
        assert!(GaloisField::new(2, 0).is_err());
        assert!(GaloisField::with_modulus(2, 2, Some(vec![0, 0, 1])).is_err());
        assert!(GaloisField::new(2, 21).is_err());
    }

    #[test]
    fn every_nonzero_element_inverts() {
        for field in [GaloisField::new(2, 2).unwrap(), GaloisField::new(3, 2).unwrap()] {
            for e in field.elements().unwrap() {
                if field.is_zero(&e) {
                    continue;
                }
                let inv = field.inv(&e).unwrap();
                assert_eq!(field.mul(&e, &inv), field.one());
            }
        }
    }

    #[test]
    fn embedding_is_a_ring_map() {
        let f4 = GaloisField::new(2, 2).unwrap();
        let f16 = f4.extension(2).unwrap();
        assert_eq!(f16.degree(), 4);
        let data = f4.embedding_data(&f16).unwrap();
        let elems = f4.elements().unwrap();
        for a in &elems {
            for b in &elems {
                let lhs = f4.embed(&f4.mul(a, b), &f16, &data);
                let rhs = f16.mul(&f4.embed(a, &f16, &data), &f4.embed(b, &f16, &data));
                assert_eq!(lhs, rhs);
                let lhs = f4.embed(&f4.add(a, b), &f16, &data);
                let rhs = f16.add(&f4.embed(a, &f16, &data), &f4.embed(b, &f16, &data));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn scalar_strings_round_trip() {
        let f4 = GaloisField::new(2, 2).unwrap();
        for e in f4.elements().unwrap() {
            let s = f4.elem_to_string(&e);
            assert_eq!(f4.parse_elem(&s).unwrap(), e);
        }
        let f5 = GaloisField::prime(5).unwrap();
        assert_eq!(f5.elem_to_string(&f5.from_i64(3)), "3");
        assert_eq!(f5.parse_elem("-1").unwrap(), f5.from_i64(4));
    }
}
