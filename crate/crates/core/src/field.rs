//! Exact scalar fields: prime fields, small extension fields in a fixed
//! polynomial basis, and the rationals.
//!
//! A [`Field`] is a context object; its elements ([`Field::Elem`]) are plain
//! values that only make sense together with the field that produced them.
//! Finite field elements are encoded as `u32` indices `Σ c_i p^i` over the
//! coefficient vector `(c_0, …, c_{k-1})` of the polynomial basis, so the
//! prime subfield occupies indices `0..p` in every extension.

use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly;

/// Largest finite field we are willing to represent with `u32` indices.
const MAX_ORDER: u64 = 1 << 24;
/// Fields up to this order get precomputed addition and multiplication tables.
const TABLE_LIMIT: u64 = 512;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("characteristic {0} is neither 0 nor a prime")]
    NonPrimeCharacteristic(u64),
    #[error("modulus is reducible over F_{p}")]
    ReducibleModulus { p: u64 },
    #[error("degree {degree} requires a modulus polynomial")]
    MissingModulus { degree: u32 },
    #[error("invalid field description: {0}")]
    InvalidSpec(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("field too small: {requested} distinct elements requested, {available} available")]
    FieldTooSmall { requested: usize, available: u64 },
    #[error("cannot parse scalar `{text}`: {reason}")]
    Parse { text: String, reason: String },
}

/// Serializable description of a field, as it appears in algebra files.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    #[serde(rename = "char")]
    pub characteristic: u64,
    pub degree: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
}

impl FieldSpec {
    pub fn prime(p: u64) -> Self {
        FieldSpec { characteristic: p, degree: 1, modulus: None }
    }

    pub fn rationals() -> Self {
        FieldSpec { characteristic: 0, degree: 1, modulus: None }
    }

    pub fn build(&self) -> Result<AnyField, FieldError> {
        field_make(self.characteristic, self.degree, self.modulus.as_deref())
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.characteristic, &self.modulus) {
            (0, _) => write!(f, "Q"),
            (p, None) => write!(f, "F_{p}"),
            (p, Some(m)) => {
                let q = (p as u128).pow(self.degree);
                write!(f, "F_{q}[{}]", poly_text(m))
            }
        }
    }
}

fn poly_text(coeffs: &[u64]) -> String {
    let mut terms = Vec::new();
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => "x".to_string(),
            _ => format!("x^{i}"),
        };
        terms.push(match (c, i) {
            (_, 0) => c.to_string(),
            (1, _) => mono,
            _ => format!("{c}{mono}"),
        });
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}

/// Exact field arithmetic.
///
/// All operations take operands by reference and return canonical values, so
/// `==` on elements is value equality.
pub trait Field: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    type Elem: Clone + fmt::Debug + PartialEq + Eq + Hash + Ord + Send + Sync + 'static;

    fn spec(&self) -> FieldSpec;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem, FieldError>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn from_i64(&self, n: i64) -> Self::Elem;

    /// Number of elements, `None` for infinite fields.
    fn order(&self) -> Option<u64>;
    fn characteristic(&self) -> u64;

    /// The `idx`-th element of the canonical enumeration.
    fn nth_element(&self, idx: u64) -> Self::Elem;
    /// Position of `a` in the canonical enumeration, when it has one.
    fn element_index(&self, a: &Self::Elem) -> Option<u64>;

    fn format_elem(&self, a: &Self::Elem) -> String;
    fn parse_elem(&self, text: &str) -> Result<Self::Elem, FieldError>;
    /// Checks that a value is a canonical element of this field.
    fn validate(&self, a: &Self::Elem) -> Result<(), FieldError>;
    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    /// Roots in this field of a polynomial given low-to-high, in canonical order.
    fn poly_roots(&self, coeffs: &[Self::Elem]) -> Vec<Self::Elem>;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, FieldError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    /// `acc + a·b`
    fn mul_add(&self, acc: &Self::Elem, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(acc, &self.mul(a, b))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn is_finite(&self) -> bool {
        self.order().is_some()
    }

    /// Canonical enumeration; infinite for the rationals.
    fn elements(&self) -> Box<dyn Iterator<Item = Self::Elem> + '_> {
        match self.order() {
            Some(q) => Box::new((0..q).map(move |i| self.nth_element(i))),
            None => Box::new((0..).map(move |i| self.nth_element(i))),
        }
    }
}

// ---------------------------------------------------------------------------
// Finite fields

#[derive(Debug)]
struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

#[derive(Debug)]
struct FiniteInner {
    p: u32,
    degree: u32,
    q: u32,
    /// Monic modulus, low to high; empty for prime fields.
    modulus: Vec<u32>,
    tables: Option<Tables>,
}

/// `F_p` or `F_p[x]/(m)` for a monic irreducible `m`.
#[derive(Clone)]
pub struct FiniteField {
    inner: Arc<FiniteInner>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.spec())
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p
                && self.inner.degree == other.inner.degree
                && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for FiniteField {}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl FiniteField {
    pub fn prime(p: u64) -> Result<Self, FieldError> {
        Self::new(p, 1, None)
    }

    pub fn new(p: u64, degree: u32, modulus: Option<&[u64]>) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NonPrimeCharacteristic(p));
        }
        if degree == 0 {
            return Err(FieldError::InvalidSpec("degree must be at least 1".into()));
        }
        let q = (p as u128).checked_pow(degree).filter(|&q| q <= MAX_ORDER as u128);
        let q = match q {
            Some(q) => q as u32,
            None => {
                return Err(FieldError::InvalidSpec(format!(
                    "p^degree = {p}^{degree} exceeds the supported order {MAX_ORDER}"
                )))
            }
        };
        let modulus = match (degree, modulus) {
            (1, None) => Vec::new(),
            (1, Some(m)) => {
                // A linear modulus is accepted only in its trivial form.
                if m.len() == 2 && m[1] == 1 && m[0] == 0 {
                    Vec::new()
                } else {
                    return Err(FieldError::InvalidSpec(
                        "prime fields take no modulus (or exactly [0,1])".into(),
                    ));
                }
            }
            (_, None) => return Err(FieldError::MissingModulus { degree }),
            (_, Some(m)) => {
                if m.len() != degree as usize + 1 {
                    return Err(FieldError::InvalidSpec(format!(
                        "modulus has {} coefficients, expected {}",
                        m.len(),
                        degree + 1
                    )));
                }
                if m[degree as usize] != 1 {
                    return Err(FieldError::InvalidSpec("modulus must be monic".into()));
                }
                if let Some(&c) = m.iter().find(|&&c| c >= p) {
                    return Err(FieldError::InvalidSpec(format!(
                        "modulus coefficient {c} is not reduced mod {p}"
                    )));
                }
                let base = Self::build(p as u32, 1, q_of(p, 1), Vec::new());
                let as_elems: Vec<u32> = m.iter().map(|&c| c as u32).collect();
                if !poly::is_irreducible(&base, &as_elems) {
                    return Err(FieldError::ReducibleModulus { p });
                }
                as_elems
            }
        };
        Ok(Self::build(p as u32, degree, q, modulus))
    }

    fn build(p: u32, degree: u32, q: u32, modulus: Vec<u32>) -> Self {
        let bare = FiniteField { inner: Arc::new(FiniteInner { p, degree, q, modulus, tables: None }) };
        if (q as u64) <= TABLE_LIMIT {
            let qs = q as usize;
            let mut add = vec![0u32; qs * qs];
            let mut mul = vec![0u32; qs * qs];
            let mut neg = vec![0u32; qs];
            let mut inv = vec![0u32; qs];
            for a in 0..q {
                neg[a as usize] = bare.slow_neg(a);
                if a != 0 {
                    inv[a as usize] = bare.slow_inv(a);
                }
                for b in 0..q {
                    add[a as usize * qs + b as usize] = bare.slow_add(a, b);
                    mul[a as usize * qs + b as usize] = bare.slow_mul(a, b);
                }
            }
            let inner = Arc::try_unwrap(bare.inner).expect("fresh arc");
            return FiniteField {
                inner: Arc::new(FiniteInner { tables: Some(Tables { add, mul, neg, inv }), ..inner }),
            };
        }
        bare
    }

    pub fn p(&self) -> u32 {
        self.inner.p
    }

    pub fn degree(&self) -> u32 {
        self.inner.degree
    }

    pub fn q(&self) -> u32 {
        self.inner.q
    }

    /// Coefficients `(c_0, …, c_{k-1})` of an element in the polynomial basis.
    pub fn coefficients(&self, a: u32) -> Vec<u32> {
        let p = self.inner.p;
        let mut out = Vec::with_capacity(self.inner.degree as usize);
        let mut v = a;
        for _ in 0..self.inner.degree {
            out.push(v % p);
            v /= p;
        }
        out
    }

    pub fn from_coefficients(&self, coeffs: &[u32]) -> u32 {
        let p = self.inner.p;
        coeffs.iter().rev().fold(0u32, |acc, &c| acc * p + c % p)
    }

    /// Embeds an element of a prime field of the same characteristic.
    pub fn embed_prime(&self, a: u32) -> u32 {
        a % self.inner.p
    }

    fn slow_add(&self, a: u32, b: u32) -> u32 {
        let p = self.inner.p as u64;
        if self.inner.degree == 1 {
            return ((a as u64 + b as u64) % p) as u32;
        }
        let (ca, cb) = (self.coefficients(a), self.coefficients(b));
        let sum: Vec<u32> = ca.iter().zip(&cb).map(|(&x, &y)| ((x as u64 + y as u64) % p) as u32).collect();
        self.from_coefficients(&sum)
    }

    fn slow_neg(&self, a: u32) -> u32 {
        let p = self.inner.p;
        if self.inner.degree == 1 {
            return (p - a % p) % p;
        }
        let c: Vec<u32> = self.coefficients(a).iter().map(|&x| (p - x) % p).collect();
        self.from_coefficients(&c)
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let p = self.inner.p as u64;
        if self.inner.degree == 1 {
            return ((a as u64 * b as u64) % p) as u32;
        }
        let k = self.inner.degree as usize;
        let (ca, cb) = (self.coefficients(a), self.coefficients(b));
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in ca.iter().enumerate() {
            for (j, &y) in cb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        let m = &self.inner.modulus;
        for d in (k..prod.len()).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            // x^d = x^{d-k} · x^k ≡ −x^{d-k} · Σ_{i<k} m_i x^i
            for i in 0..k {
                let sub = c * m[i] as u64 % p;
                prod[d - k + i] = (prod[d - k + i] + p - sub) % p;
            }
            prod[d] = 0;
        }
        let out: Vec<u32> = prod[..k].iter().map(|&c| c as u32).collect();
        self.from_coefficients(&out)
    }

    fn slow_inv(&self, a: u32) -> u32 {
        if self.inner.degree == 1 {
            let p = self.inner.p as i64;
            let (mut r0, mut r1) = (p, a as i64);
            let (mut t0, mut t1) = (0i64, 1i64);
            while r1 != 0 {
                let qt = r0 / r1;
                (r0, r1) = (r1, r0 - qt * r1);
                (t0, t1) = (t1, t0 - qt * t1);
            }
            return t0.rem_euclid(p) as u32;
        }
        // a^{q-2}
        let mut e = self.inner.q as u64 - 2;
        let mut base = a;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.slow_mul(acc, base);
            }
            base = self.slow_mul(base, base);
            e >>= 1;
        }
        acc
    }
}

fn q_of(p: u64, degree: u32) -> u32 {
    (p as u32).pow(degree)
}

impl Field for FiniteField {
    type Elem = u32;

    fn spec(&self) -> FieldSpec {
        FieldSpec {
            characteristic: self.inner.p as u64,
            degree: self.inner.degree,
            modulus: if self.inner.degree == 1 {
                None
            } else {
                Some(self.inner.modulus.iter().map(|&c| c as u64).collect())
            },
        }
    }

    #[inline]
    fn zero(&self) -> u32 {
        0
    }

    #[inline]
    fn one(&self) -> u32 {
        1
    }

    #[inline]
    fn add(&self, a: &u32, b: &u32) -> u32 {
        match &self.inner.tables {
            Some(t) => t.add[*a as usize * self.inner.q as usize + *b as usize],
            None => self.slow_add(*a, *b),
        }
    }

    #[inline]
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        let nb = self.neg(b);
        self.add(a, &nb)
    }

    #[inline]
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        match &self.inner.tables {
            Some(t) => t.mul[*a as usize * self.inner.q as usize + *b as usize],
            None => self.slow_mul(*a, *b),
        }
    }

    #[inline]
    fn neg(&self, a: &u32) -> u32 {
        match &self.inner.tables {
            Some(t) => t.neg[*a as usize],
            None => self.slow_neg(*a),
        }
    }

    fn inv(&self, a: &u32) -> Result<u32, FieldError> {
        if *a == 0 {
            return Err(FieldError::DivisionByZero);
        }
        Ok(match &self.inner.tables {
            Some(t) => t.inv[*a as usize],
            None => self.slow_inv(*a),
        })
    }

    #[inline]
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }

    fn from_i64(&self, n: i64) -> u32 {
        n.rem_euclid(self.inner.p as i64) as u32
    }

    fn order(&self) -> Option<u64> {
        Some(self.inner.q as u64)
    }

    fn characteristic(&self) -> u64 {
        self.inner.p as u64
    }

    fn nth_element(&self, idx: u64) -> u32 {
        assert!(idx < self.inner.q as u64, "element index out of range");
        idx as u32
    }

    fn element_index(&self, a: &u32) -> Option<u64> {
        Some(*a as u64)
    }

    fn format_elem(&self, a: &u32) -> String {
        if self.inner.degree == 1 {
            a.to_string()
        } else {
            let c: Vec<String> = self.coefficients(*a).iter().map(|c| c.to_string()).collect();
            format!("[{}]", c.join(","))
        }
    }

    fn parse_elem(&self, text: &str) -> Result<u32, FieldError> {
        let err = |reason: &str| FieldError::Parse { text: text.to_string(), reason: reason.to_string() };
        let t = text.trim();
        let p = self.inner.p as u64;
        if self.inner.degree == 1 {
            let v: u64 = t.parse().map_err(|_| err("expected a decimal residue"))?;
            if v >= p {
                return Err(err("residue not reduced"));
            }
            return Ok(v as u32);
        }
        let body = t
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| err("expected a bracketed coefficient list"))?;
        let coeffs: Vec<u64> = body
            .split(',')
            .map(|c| c.trim().parse::<u64>())
            .collect::<Result<_, _>>()
            .map_err(|_| err("bad coefficient"))?;
        if coeffs.len() != self.inner.degree as usize {
            return Err(err("wrong number of coefficients"));
        }
        if coeffs.iter().any(|&c| c >= p) {
            return Err(err("coefficient not reduced"));
        }
        let c32: Vec<u32> = coeffs.iter().map(|&c| c as u32).collect();
        Ok(self.from_coefficients(&c32))
    }

    fn validate(&self, a: &u32) -> Result<(), FieldError> {
        if *a < self.inner.q {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch)
        }
    }

    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.gen_range(0..self.inner.q)
    }

    fn poly_roots(&self, coeffs: &[u32]) -> Vec<u32> {
        poly::finite_roots(self, coeffs)
    }
}

// ---------------------------------------------------------------------------
// Rationals

/// The field of rational numbers with arbitrary-precision reduced fractions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn spec(&self) -> FieldSpec {
        FieldSpec::rationals()
    }

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn inv(&self, a: &BigRational) -> Result<BigRational, FieldError> {
        if a.is_zero() {
            Err(FieldError::DivisionByZero)
        } else {
            Ok(a.recip())
        }
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn order(&self) -> Option<u64> {
        None
    }

    fn characteristic(&self) -> u64 {
        0
    }

    /// Non-negative integers in increasing order; every finite prefix used for
    /// parameter selection lies among them.
    fn nth_element(&self, idx: u64) -> BigRational {
        BigRational::from_integer(BigInt::from(idx))
    }

    fn element_index(&self, a: &BigRational) -> Option<u64> {
        if a.is_integer() && !a.is_negative() {
            a.to_integer().to_u64()
        } else {
            None
        }
    }

    fn format_elem(&self, a: &BigRational) -> String {
        if a.is_integer() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }

    fn parse_elem(&self, text: &str) -> Result<BigRational, FieldError> {
        let err = |reason: &str| FieldError::Parse { text: text.to_string(), reason: reason.to_string() };
        let t = text.trim();
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let n: BigInt = num.parse().map_err(|_| err("bad numerator"))?;
        let d: BigInt = den.parse().map_err(|_| err("bad denominator"))?;
        if d.is_zero() {
            return Err(err("zero denominator"));
        }
        Ok(BigRational::new(n, d))
    }

    fn validate(&self, _a: &BigRational) -> Result<(), FieldError> {
        Ok(())
    }

    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        let n: i64 = rng.gen_range(-9..=9);
        let d: i64 = rng.gen_range(1..=5);
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn poly_roots(&self, coeffs: &[BigRational]) -> Vec<BigRational> {
        rational_roots(coeffs)
    }
}

/// Rational roots by the rational root theorem on the integer-cleared polynomial.
fn rational_roots(coeffs: &[BigRational]) -> Vec<BigRational> {
    let mut c: Vec<BigRational> = coeffs.to_vec();
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    if c.len() <= 1 {
        return Vec::new();
    }
    let mut roots = Vec::new();
    // strip factors of x
    let shift = c.iter().position(|x| !x.is_zero()).unwrap_or(0);
    if shift > 0 {
        roots.push(BigRational::zero());
        c.drain(..shift);
    }
    if c.len() <= 1 {
        return roots;
    }
    let lcm = c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = c.iter().map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let (Some(a0), Some(an)) = (ints[0].abs().to_u64(), ints[ints.len() - 1].abs().to_u64()) else {
        return roots;
    };
    let eval_zero = |r: &BigRational| {
        let mut acc = BigRational::zero();
        for x in c.iter().rev() {
            acc = acc * r + x;
        }
        acc.is_zero()
    };
    for num in divisors(a0) {
        for den in divisors(an) {
            for sign in [1i64, -1] {
                let r = BigRational::new(BigInt::from(sign) * BigInt::from(num), BigInt::from(den));
                if !roots.contains(&r) && eval_zero(&r) {
                    roots.push(r);
                }
            }
        }
    }
    roots.sort();
    roots
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d != n / d {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

// ---------------------------------------------------------------------------

/// A field chosen at runtime.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyField {
    Finite(FiniteField),
    Rational(Rationals),
}

impl AnyField {
    pub fn spec(&self) -> FieldSpec {
        match self {
            AnyField::Finite(f) => f.spec(),
            AnyField::Rational(f) => f.spec(),
        }
    }
}

/// Validates a field description and builds the field.
pub fn field_make(characteristic: u64, degree: u32, modulus: Option<&[u64]>) -> Result<AnyField, FieldError> {
    if characteristic == 0 {
        if degree != 1 || modulus.is_some() {
            return Err(FieldError::InvalidSpec("the rationals take degree 1 and no modulus".into()));
        }
        return Ok(AnyField::Rational(Rationals));
    }
    FiniteField::new(characteristic, degree, modulus).map(AnyField::Finite)
}

/// The first `count` elements of the canonical enumeration that avoid 0, 1 and `exclude`.
pub fn distinct_units<F: Field>(field: &F, count: usize, exclude: &[F::Elem]) -> Result<Vec<F::Elem>, FieldError> {
    let zero = field.zero();
    let one = field.one();
    let skip = |x: &F::Elem| *x == zero || *x == one || exclude.contains(x);
    if let Some(q) = field.order() {
        let mut excluded: Vec<&F::Elem> = exclude.iter().collect();
        excluded.sort();
        excluded.dedup();
        let extra = excluded.iter().filter(|x| ***x != zero && ***x != one).count() as u64;
        let available = q.saturating_sub(2 + extra);
        if (count as u64) > available {
            return Err(FieldError::FieldTooSmall { requested: count, available });
        }
    }
    Ok(field.elements().filter(|x| !skip(x)).take(count).collect())
}

/// The first monic irreducible polynomial of `degree` over `F_p`, low to high,
/// counting the lower coefficients as base-`p` digits with `c_0` least significant.
pub fn first_irreducible_modulus(p: u64, degree: u32) -> Result<Vec<u64>, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NonPrimeCharacteristic(p));
    }
    if degree <= 1 {
        return Ok(vec![0, 1]);
    }
    let base = FiniteField::prime(p)?;
    let count = (p as u128).checked_pow(degree).filter(|&c| c <= MAX_ORDER as u128).ok_or_else(|| {
        FieldError::InvalidSpec(format!("p^degree = {p}^{degree} exceeds the supported order {MAX_ORDER}"))
    })? as u64;
    for idx in 0..count {
        let mut m: Vec<u64> = (0..degree).map(|i| (idx / p.pow(i)) % p).collect();
        m.push(1);
        let as_elems: Vec<u32> = m.iter().map(|&c| c as u32).collect();
        if poly::is_irreducible(&base, &as_elems) {
            return Ok(m);
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Exponent helper used by polynomial routines: `q^d` as a big integer.
pub(crate) fn big_pow(q: u64, d: usize) -> BigUint {
    num_traits::pow(BigUint::from(q), d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f7() -> FiniteField {
        FiniteField::prime(7).unwrap()
    }

    #[test]
    fn make_prime_and_extension() {
        let AnyField::Finite(f) = field_make(7, 1, None).unwrap() else { panic!() };
        assert_eq!(f.order(), Some(7));
        let AnyField::Finite(f49) = field_make(7, 2, Some(&[1, 0, 1])).unwrap() else { panic!() };
        assert_eq!(f49.order(), Some(49));
        assert_eq!(field_make(4, 1, None), Err(FieldError::NonPrimeCharacteristic(4)));
        assert_eq!(field_make(7, 2, None), Err(FieldError::MissingModulus { degree: 2 }));
        // x^2 + 1 = (x+2)(x+3) over F_5
        assert_eq!(field_make(5, 2, Some(&[1, 0, 1])), Err(FieldError::ReducibleModulus { p: 5 }));
    }

    #[test]
    fn default_moduli() {
        assert_eq!(first_irreducible_modulus(7, 2).unwrap(), vec![1, 0, 1]);
        assert_eq!(first_irreducible_modulus(5, 2).unwrap(), vec![2, 0, 1]);
        assert_eq!(first_irreducible_modulus(2, 3).unwrap(), vec![1, 1, 0, 1]);
    }

    #[test]
    fn modulus_root_search_agrees_with_irreducibility() {
        // degree 2 and 3 polynomials are irreducible iff rootless
        for p in [2u64, 3, 5, 7] {
            for a in 0..p {
                for b in 0..p {
                    let has_root = (0..p).any(|x| (x * x + a * x + b) % p == 0);
                    let ok = FiniteField::new(p, 2, Some(&[b, a, 1])).is_ok();
                    assert_eq!(ok, !has_root, "p={p} x^2+{a}x+{b}");
                }
            }
        }
    }

    #[test]
    fn arithmetic_examples() {
        let f = f7();
        assert_eq!(f.inv(&3).unwrap(), 5);
        assert_eq!(f.inv(&0), Err(FieldError::DivisionByZero));
        let f49 = FiniteField::new(7, 2, Some(&[1, 0, 1])).unwrap();
        let x = f49.from_coefficients(&[0, 1]);
        let six_x = f49.from_coefficients(&[0, 6]);
        assert_eq!(f49.add(&x, &six_x), 0);
        // x·x = -1
        assert_eq!(f49.mul(&x, &x), 6);
        let q = Rationals;
        let half = q.parse_elem("1/2").unwrap();
        let three_q = q.parse_elem("3/4").unwrap();
        assert_eq!(q.format_elem(&q.div(&half, &three_q).unwrap()), "2/3");
    }

    #[test]
    fn exhaustive_inverses_and_closure() {
        let fields = [
            FiniteField::prime(2).unwrap(),
            FiniteField::prime(11).unwrap(),
            FiniteField::new(2, 3, Some(&[1, 1, 0, 1])).unwrap(),
            FiniteField::new(3, 2, Some(&[1, 0, 1])).unwrap(),
            FiniteField::new(7, 2, Some(&[1, 0, 1])).unwrap(),
            FiniteField::new(11, 2, Some(&[1, 0, 1])).unwrap(),
        ];
        for f in &fields {
            let q = f.order().unwrap();
            let all: Vec<u32> = f.elements().collect();
            assert_eq!(all.len() as u64, q);
            for a in &all {
                if *a != 0 {
                    assert_eq!(f.mul(a, &f.inv(a).unwrap()), 1, "{f:?} a={a}");
                }
                for b in &all {
                    assert!(f.add(a, b) < q as u32);
                    assert!(f.mul(a, b) < q as u32);
                }
            }
        }
    }

    #[test]
    fn table_and_direct_arithmetic_agree() {
        // F_{3^6} = 729 has no tables; compare a few products against F_729 slow path symmetry
        let big = FiniteField::new(3, 6, Some(&[2, 1, 0, 0, 0, 0, 1])).unwrap();
        let a = 123u32;
        let b = 456u32;
        assert_eq!(big.mul(&a, &b), big.mul(&b, &a));
        assert_eq!(big.mul(&a, &big.inv(&a).unwrap()), 1);
        assert_eq!(big.pow(&a, 728), 1);
    }

    #[test]
    fn distinct_units_examples() {
        assert_eq!(distinct_units(&f7(), 3, &[0, 1]).unwrap(), vec![2, 3, 4]);
        let f3 = FiniteField::prime(3).unwrap();
        assert!(matches!(distinct_units(&f3, 3, &[0, 1]), Err(FieldError::FieldTooSmall { requested: 3, available: 1 })));
        let q = Rationals;
        let got: Vec<String> = distinct_units(&q, 4, &[q.zero(), q.one()]).unwrap().iter().map(|x| q.format_elem(x)).collect();
        assert_eq!(got, vec!["2", "3", "4", "5"]);
        assert_eq!(distinct_units(&f7(), 2, &[2]).unwrap(), vec![3, 4]);
    }

    #[test]
    fn scalar_text_round_trip() {
        let f49 = FiniteField::new(7, 2, Some(&[1, 0, 1])).unwrap();
        for a in f49.elements() {
            assert_eq!(f49.parse_elem(&f49.format_elem(&a)).unwrap(), a);
        }
        assert!(f7().parse_elem("7").is_err());
    }

    #[test]
    fn rational_roots_found() {
        let q = Rationals;
        // (x - 1/2)(x + 3) x = x^3 + 5/2 x^2 - 3/2 x
        let c = vec![q.zero(), q.parse_elem("-3/2").unwrap(), q.parse_elem("5/2").unwrap(), q.one()];
        let r: Vec<String> = q.poly_roots(&c).iter().map(|x| q.format_elem(x)).collect();
        assert_eq!(r, vec!["-3", "0", "1/2"]);
    }
}
