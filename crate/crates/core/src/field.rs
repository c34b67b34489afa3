//! Exact arithmetic in GF(p^e).
//!
//! Elements are encoded as integers `0..q`: the base-p digits of an encoding
//! are the coefficients (little-endian) of its residue modulo the defining
//! polynomial. For prime fields the encoding is the residue itself.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 16;

/// JSON description of a field: `{"p":2,"e":2,"modulus":[1,1,1]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    #[serde(default = "one")]
    pub e: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
}

fn one() -> u32 {
    1
}

struct Inner {
    p: u32,
    e: u32,
    q: u32,
    /// Monic, little-endian, length e + 1. Present iff e > 1.
    modulus: Option<Vec<u32>>,
    /// exp[k] = g^k for a primitive element g; only for e > 1.
    exp: Vec<u32>,
    log: Vec<u32>,
    inv: Vec<u32>,
}

/// A finite field GF(p^e). Cheap to clone; immutable after construction.
#[derive(Clone)]
pub struct FiniteField(Arc<Inner>);

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.e == other.0.e && self.0.modulus == other.0.modulus)
    }
}

impl Eq for FiniteField {}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.modulus {
            None => write!(f, "GF({})", self.0.p),
            Some(m) => write!(f, "GF({}^{}; {:?})", self.0.p, self.0.e, m),
        }
    }
}

impl Serialize for FiniteField {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.spec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteField {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let spec = FieldSpec::deserialize(d)?;
        FiniteField::from_spec(&spec).map_err(serde::de::Error::custom)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

/// Splits `q` into `(p, e)` with `q = p^e`.
pub fn prime_power(q: u64) -> Result<(u32, u32)> {
    if q < 2 {
        return Err(Error::NotPrimePower(q));
    }
    let mut p = 2;
    while !q.is_multiple_of(p) {
        p += 1;
    }
    let (mut rest, mut e) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    if rest != 1 {
        return Err(Error::NotPrimePower(q));
    }
    Ok((p as u32, e))
}

// Dense polynomials over GF(p), little-endian, used only for the modulus and
// extension-field reduction.
mod fp_poly {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn inv_mod(a: u32, p: u32) -> u32 {
        // p is prime and a != 0
        let (mut t, mut new_t) = (0i64, 1i64);
        let (mut r, mut new_r) = (p as i64, a as i64);
        while new_r != 0 {
            let quot = r / new_r;
            (t, new_t) = (new_t, t - quot * new_t);
            (r, new_r) = (new_r, r - quot * new_r);
        }
        t.rem_euclid(p as i64) as u32
    }

    pub fn rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let lead_inv = inv_mod(b[db], p) as u64;
        while r.len() > db {
            let shift = r.len() - 1 - db;
            let c = (*r.last().unwrap() as u64 * lead_inv) % p as u64;
            for (i, &bi) in b.iter().enumerate() {
                let sub = (c * bi as u64) % p as u64;
                let slot = &mut r[shift + i];
                *slot = ((*slot as u64 + p as u64 - sub) % p as u64) as u32;
            }
            trim(&mut r);
        }
        r
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        let mut out: Vec<u32> = out.into_iter().map(|v| v as u32).collect();
        trim(&mut out);
        out
    }

    pub fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let len = a.len().max(b.len());
        let mut out: Vec<u32> = (0..len)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut out);
        out
    }

    /// Quotient and remainder of a / b, b nonzero.
    pub fn divmod(a: &[u32], b: &[u32], p: u32) -> (Vec<u32>, Vec<u32>) {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let lead_inv = inv_mod(b[db], p) as u64;
        let mut quot = vec![0u32; r.len().saturating_sub(db)];
        while r.len() > db {
            let shift = r.len() - 1 - db;
            let c = ((*r.last().unwrap() as u64 * lead_inv) % p as u64) as u32;
            quot[shift] = c;
            for (i, &bi) in b.iter().enumerate() {
                let s = (c as u64 * bi as u64) % p as u64;
                let slot = &mut r[shift + i];
                *slot = ((*slot as u64 + p as u64 - s) % p as u64) as u32;
            }
            trim(&mut r);
        }
        trim(&mut quot);
        (quot, r)
    }

    /// Inverse of `a` modulo the irreducible `m` via extended Euclid.
    pub fn inv_poly(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let (mut r0, mut r1) = (m.to_vec(), a.to_vec());
        let (mut t0, mut t1): (Vec<u32>, Vec<u32>) = (Vec::new(), vec![1]);
        trim(&mut r1);
        while !r1.is_empty() {
            let (quot, rem) = divmod(&r0, &r1, p);
            let t2 = sub(&t0, &mul(&quot, &t1, p), p);
            r0 = std::mem::replace(&mut r1, rem);
            t0 = std::mem::replace(&mut t1, t2);
        }
        // r0 is a nonzero constant
        let c = inv_mod(r0[0], p) as u64;
        let mut out: Vec<u32> = t0.iter().map(|&v| ((v as u64 * c) % p as u64) as u32).collect();
        trim(&mut out);
        out
    }

    /// True if the monic `f` of degree >= 1 has no monic factor of degree 1..=deg/2.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let deg = f.len() - 1;
        for k in 1..=deg / 2 {
            let count = (p as u64).pow(k as u32);
            for low in 0..count {
                let mut g = digits(low, p, k);
                g.push(1);
                if rem(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    pub fn digits(mut v: u64, p: u32, len: usize) -> Vec<u32> {
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            out.push((v % p as u64) as u32);
            v /= p as u64;
        }
        out
    }
}

impl FiniteField {
    /// Builds GF(p^e). Without a modulus and `e > 1`, the first monic
    /// irreducible of degree `e` in increasing little-endian encoding of its
    /// lower coefficients is chosen.
    pub fn new(p: u32, e: u32, modulus: Option<Vec<u32>>) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if e < 1 {
            return Err(Error::InvalidExtensionDegree);
        }
        let q = (p as u64).checked_pow(e).unwrap_or(u64::MAX);
        if q > MAX_ORDER {
            return Err(Error::FieldTooLarge(q));
        }
        let q = q as u32;
        if e == 1 {
            if let Some(m) = &modulus {
                // a degree-1 modulus carries no information but must be well formed
                if m.len() != 2 || m[1] != 1 || m[0] >= p {
                    return Err(Error::ModulusShape(m.clone(), e));
                }
            }
            let inv = (0..q).map(|a| if a == 0 { 0 } else { fp_poly::inv_mod(a, p) }).collect();
            return Ok(FiniteField(Arc::new(Inner {
                p,
                e,
                q,
                modulus: None,
                exp: Vec::new(),
                log: Vec::new(),
                inv,
            })));
        }
        let modulus = match modulus {
            Some(m) => {
                if m.len() != e as usize + 1 || m[e as usize] != 1 || m.iter().any(|&c| c >= p) {
                    return Err(Error::ModulusShape(m, e));
                }
                if !fp_poly::is_irreducible(&m, p) {
                    return Err(Error::ReducibleModulus(m, p));
                }
                m
            }
            None => Self::first_irreducible(p, e),
        };
        let mut inner = Inner { p, e, q, modulus: Some(modulus), exp: Vec::new(), log: Vec::new(), inv: Vec::new() };
        Self::build_tables(&mut inner);
        Ok(FiniteField(Arc::new(inner)))
    }

    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1, None)
    }

    /// GF(q) for a prime power `q`, default modulus.
    pub fn with_order(q: u64) -> Result<Self> {
        let (p, e) = prime_power(q)?;
        Self::new(p, e, None)
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<Self> {
        Self::new(spec.p, spec.e, spec.modulus.clone())
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec { p: self.0.p, e: self.0.e, modulus: self.0.modulus.clone() }
    }

    fn first_irreducible(p: u32, e: u32) -> Vec<u32> {
        let count = (p as u64).pow(e);
        (0..count)
            .map(|low| {
                let mut f = fp_poly::digits(low, p, e as usize);
                f.push(1);
                f
            })
            .find(|f| fp_poly::is_irreducible(f, p))
            .expect("an irreducible polynomial exists in every degree")
    }

    fn build_tables(inner: &mut Inner) {
        let (p, e, q) = (inner.p, inner.e as usize, inner.q);
        let m = inner.modulus.clone().unwrap();
        let as_poly = |v: u32| {
            let mut d = fp_poly::digits(v as u64, p, e);
            fp_poly::trim(&mut d);
            d
        };
        let encode = |d: &[u32]| d.iter().rev().fold(0u64, |acc, &c| acc * p as u64 + c as u64) as u32;
        let mul = |a: u32, b: u32| encode(&fp_poly::rem(&fp_poly::mul(&as_poly(a), &as_poly(b), p), &m, p));

        let order = q - 1;
        let generator = (2..q)
            .find(|&g| {
                let mut x = g;
                for _ in 1..order {
                    if x == 1 {
                        return false;
                    }
                    x = mul(x, g);
                }
                true
            })
            .expect("the multiplicative group is cyclic");
        let mut exp = Vec::with_capacity(order as usize);
        let mut x = 1u32;
        for _ in 0..order {
            exp.push(x);
            x = mul(x, generator);
        }
        let mut log = vec![0u32; q as usize];
        for (k, &x) in exp.iter().enumerate() {
            log[x as usize] = k as u32;
        }
        let inv = (0..q)
            .map(|a| if a == 0 { 0 } else { encode(&fp_poly::inv_poly(&as_poly(a), &m, p)) })
            .collect();
        inner.exp = exp;
        inner.log = log;
        inner.inv = inv;
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.0.p
    }

    #[inline]
    pub fn e(&self) -> u32 {
        self.0.e
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.0.q
    }

    pub fn modulus(&self) -> Option<&[u32]> {
        self.0.modulus.as_deref()
    }

    #[inline]
    pub fn contains(&self, v: u32) -> bool {
        v < self.0.q
    }

    pub fn check(&self, v: u32) -> Result<u32> {
        if self.contains(v) {
            Ok(v)
        } else {
            Err(Error::ElementOutOfRange { value: v, q: self.0.q })
        }
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let p = self.0.p;
        if self.0.e == 1 {
            let s = a + b;
            return if s >= p { s - p } else { s };
        }
        if p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let (mut out, mut place) = (0, 1);
        while a > 0 || b > 0 {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        let p = self.0.p;
        if self.0.e == 1 {
            return if a == 0 { 0 } else { p - a };
        }
        if p == 2 {
            return a;
        }
        let mut a = a;
        let (mut out, mut place) = (0, 1);
        while a > 0 {
            out += ((p - a % p) % p) * place;
            a /= p;
            place *= p;
        }
        out
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if self.0.e == 1 {
            return ((a as u64 * b as u64) % self.0.p as u64) as u32;
        }
        if a == 0 || b == 0 {
            return 0;
        }
        let order = self.0.q - 1;
        let k = self.0.log[a as usize] + self.0.log[b as usize];
        self.0.exp[(if k >= order { k - order } else { k }) as usize]
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            Err(Error::DivisionByZero)
        } else {
            Ok(self.0.inv[a as usize])
        }
    }

    pub fn div(&self, a: u32, b: u32) -> Result<u32> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: u32, mut k: u64) -> u32 {
        let (mut base, mut acc) = (a, 1);
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    /// Embeds an integer through the prime subfield.
    pub fn from_int(&self, n: u64) -> u32 {
        (n % self.0.p as u64) as u32
    }

    pub fn elements(&self) -> std::ops::Range<u32> {
        0..self.0.q
    }

    pub fn element(&self, v: u32) -> Result<FieldElement> {
        Ok(FieldElement { field: self.clone(), value: self.check(v)? })
    }

    /// All q elements in increasing encoding order.
    pub fn enumerate_elements(&self) -> Vec<FieldElement> {
        self.elements().map(|value| FieldElement { field: self.clone(), value }).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// An element tied to its field, for checked mixed-field arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: FiniteField,
    value: u32,
}

impl FieldElement {
    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

pub fn arith(a: &FieldElement, b: &FieldElement, op: ArithOp) -> Result<FieldElement> {
    if a.field != b.field {
        return Err(Error::FieldMismatch);
    }
    let f = &a.field;
    let value = match op {
        ArithOp::Add => f.add(a.value, b.value),
        ArithOp::Sub => f.sub(a.value, b.value),
        ArithOp::Mul => f.mul(a.value, b.value),
        ArithOp::Div => f.div(a.value, b.value)?,
    };
    Ok(FieldElement { field: f.clone(), value })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fields() -> Vec<FiniteField> {
        [2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16].iter().map(|&q| FiniteField::with_order(q).unwrap()).collect()
    }

    #[test]
    fn constructs_and_rejects() {
        assert_eq!(FiniteField::new(3, 1, None).unwrap().q(), 3);
        assert_eq!(FiniteField::new(4, 1, None), Err(Error::NotPrime(4)));
        assert_eq!(FiniteField::new(3, 0, None), Err(Error::InvalidExtensionDegree));
        assert!(matches!(FiniteField::new(2, 17, None), Err(Error::FieldTooLarge(_))));
        assert!(matches!(FiniteField::new(2, 2, Some(vec![1, 0, 1])), Err(Error::ReducibleModulus(..))));
        assert!(matches!(FiniteField::new(2, 2, Some(vec![1, 1])), Err(Error::ModulusShape(..))));
        assert!(matches!(FiniteField::with_order(6), Err(Error::NotPrimePower(6))));
    }

    #[test]
    fn gf4_default_modulus_is_the_unique_irreducible_quadratic() {
        // exhaustive: among x^2, x^2+1, x^2+x, x^2+x+1 only the last has no root in GF(2)
        let irreducible: Vec<_> = (0..4u64)
            .map(|low| {
                let mut f = fp_poly::digits(low, 2, 2);
                f.push(1);
                f
            })
            .filter(|f| (0..2u64).all(|x| !(f[0] as u64 + f[1] as u64 * x + x * x).is_multiple_of(2)))
            .collect();
        assert_eq!(irreducible, vec![vec![1, 1, 1]]);
        let f = FiniteField::new(2, 2, None).unwrap();
        assert_eq!(f.modulus(), Some(&[1u32, 1, 1][..]));
    }

    #[test]
    fn small_examples() {
        let f2 = FiniteField::prime(2).unwrap();
        assert_eq!(f2.add(1, 1), 0);
        let f5 = FiniteField::prime(5).unwrap();
        assert_eq!(f5.mul(2, 3), 1);
        assert_eq!(f5.div(1, 2).unwrap(), 3);
        let f4 = FiniteField::new(2, 2, None).unwrap();
        // x * x = x + 1
        assert_eq!(f4.mul(2, 2), 3);
        assert_eq!(f5.div(1, 0), Err(Error::DivisionByZero));
    }

    #[test]
    fn element_arith_checks_fields() {
        let f3 = FiniteField::prime(3).unwrap();
        let f5 = FiniteField::prime(5).unwrap();
        let a = f3.element(2).unwrap();
        let b = f5.element(2).unwrap();
        assert_eq!(arith(&a, &b, ArithOp::Add), Err(Error::FieldMismatch));
        let c = f3.element(2).unwrap();
        assert_eq!(arith(&a, &c, ArithOp::Mul).unwrap().value(), 1);
        assert_eq!(arith(&a, &f3.element(0).unwrap(), ArithOp::Div), Err(Error::DivisionByZero));
        assert!(f3.element(3).is_err());
    }

    #[test]
    fn enumeration_is_ordered() {
        let vals = |q| FiniteField::with_order(q).unwrap().enumerate_elements().iter().map(|e| e.value()).collect::<Vec<_>>();
        assert_eq!(vals(2), vec![0, 1]);
        assert_eq!(vals(3), vec![0, 1, 2]);
        assert_eq!(vals(4), vec![0, 1, 2, 3]);
    }

    #[test]
    fn field_axioms_exhaustive() {
        for f in fields() {
            let q = f.q();
            for a in 0..q {
                assert_eq!(f.add(a, f.neg(a)), 0);
                assert_eq!(f.pow(a, q as u64), a, "Frobenius in {f:?}");
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for b in 0..q {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in 0..q {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn construction_is_deterministic() {
        for q in [8u64, 9, 16, 25, 27] {
            let a = FiniteField::with_order(q).unwrap();
            let b = FiniteField::with_order(q).unwrap();
            assert_eq!(a, b);
            for x in 0..a.q() {
                for y in 0..a.q() {
                    assert_eq!(a.mul(x, y), b.mul(x, y));
                }
            }
        }
    }

    #[test]
    fn spec_round_trip() {
        let f = FiniteField::with_order(9).unwrap();
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, r#"{"p":3,"e":2,"modulus":[1,0,1]}"#);
        let g: FiniteField = serde_json::from_str(&json).unwrap();
        assert_eq!(f, g);
        let h: FiniteField = serde_json::from_str(r#"{"p":3}"#).unwrap();
        assert_eq!(h.q(), 3);
    }
}
