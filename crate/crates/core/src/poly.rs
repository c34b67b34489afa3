//! Sparse multivariate polynomials over a finite field, Hasse derivatives
//! and orders of vanishing.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FiniteField;
use crate::monomial::{enumerate_monomials, Exponent};

/// A point of F_q^n, coordinates as field encodings. Ordered lexicographically.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<u32>);

impl Point {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<Vec<u32>> for Point {
    fn from(v: Vec<u32>) -> Self {
        Point(v)
    }
}

/// `C(a, b) mod p` by Lucas' theorem.
pub fn binomial_mod_p(mut a: u64, mut b: u64, p: u32) -> u32 {
    let p = p as u64;
    let mut acc = 1u64;
    while b > 0 {
        let (ad, bd) = (a % p, b % p);
        if bd > ad {
            return 0;
        }
        // C(ad, bd) with ad < p: no factor of p in the factorials
        let mut num = 1u64;
        let mut den = 1u64;
        for k in 0..bd {
            num = num * (ad - k) % p;
            den = den * (k + 1) % p;
        }
        acc = acc * num % p * pow_mod(den, p - 2, p) % p;
        a /= p;
        b /= p;
    }
    acc as u32
}

fn pow_mod(mut base: u64, mut k: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while k > 0 {
        if k & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        k >>= 1;
    }
    acc
}

/// `D^i(x^a)` evaluated at `point`: `prod_j C(a_j, i_j) point_j^(a_j - i_j)`.
pub fn hasse_monomial_at(field: &FiniteField, a: &[u32], i: &[u32], point: &[u32]) -> u32 {
    let mut acc = 1;
    for ((&aj, &ij), &xj) in a.iter().zip(i).zip(point) {
        if ij > aj {
            return 0;
        }
        let c = binomial_mod_p(aj as u64, ij as u64, field.p());
        if c == 0 {
            return 0;
        }
        acc = field.mul(acc, field.mul(c, field.pow(xj, (aj - ij) as u64)));
        if acc == 0 {
            return 0;
        }
    }
    acc
}

/// Order of vanishing at a point as found by probing up to a cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    Finite(u32),
    /// All Hasse derivatives of order below the cap vanish.
    AtLeast(u32),
    /// The zero polynomial.
    Infinite,
}

impl Order {
    /// True if the order is known to be at least `m`.
    pub fn at_least(self, m: u32) -> bool {
        match self {
            Order::Finite(k) => k >= m,
            Order::AtLeast(k) => k >= m,
            Order::Infinite => true,
        }
    }
}

/// JSON form of one term: `{"exp":[a1,...,an],"coef":c}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub exp: Vec<u32>,
    pub coef: u32,
}

#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    field: FiniteField,
    n: usize,
    terms: BTreeMap<Exponent, u32>,
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().rev().map(|(a, c)| format!("{c}*x^{a:?}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Polynomial {
    pub fn zero(field: &FiniteField, n: usize) -> Self {
        Polynomial { field: field.clone(), n, terms: BTreeMap::new() }
    }

    pub fn constant(field: &FiniteField, n: usize, c: u32) -> Self {
        Self::monomial(field, Exponent::zero(n), c)
    }

    pub fn monomial(field: &FiniteField, a: Exponent, c: u32) -> Self {
        let n = a.dim();
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(a, c);
        }
        Polynomial { field: field.clone(), n, terms }
    }

    /// The variable `x_{i+1}`.
    pub fn var(field: &FiniteField, n: usize, i: usize) -> Self {
        Self::monomial(field, Exponent::unit(n, i), 1)
    }

    /// Collects terms, summing repeated exponents and dropping zeros.
    pub fn from_terms(field: &FiniteField, n: usize, terms: impl IntoIterator<Item = (Exponent, u32)>) -> Result<Self> {
        let mut out = Polynomial::zero(field, n);
        for (a, c) in terms {
            if a.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: a.dim() });
            }
            field.check(c)?;
            out.add_term(a, c);
        }
        Ok(out)
    }

    pub fn from_json_terms(field: &FiniteField, n: usize, terms: &[PolyTerm]) -> Result<Self> {
        Self::from_terms(field, n, terms.iter().map(|t| (Exponent::new(t.exp.clone()), t.coef)))
    }

    pub fn to_json_terms(&self) -> Vec<PolyTerm> {
        self.terms.iter().map(|(a, &c)| PolyTerm { exp: a.as_slice().to_vec(), coef: c }).collect()
    }

    fn add_term(&mut self, a: Exponent, c: u32) {
        if c == 0 {
            return;
        }
        let f = &self.field;
        match self.terms.entry(a) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = f.add(*o.get(), c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Exponent::degree).max()
    }

    /// Grlex-largest monomial with its coefficient.
    pub fn leading_term(&self) -> Option<(&Exponent, u32)> {
        self.terms.iter().next_back().map(|(a, &c)| (a, c))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, u32)> {
        self.terms.iter().map(|(a, &c)| (a, c))
    }

    pub fn coefficient(&self, a: &Exponent) -> u32 {
        self.terms.get(a).copied().unwrap_or(0)
    }

    fn compatible(&self, other: &Polynomial) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        Ok(())
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (a, &c) in &other.terms {
            out.add_term(a.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.add(&other.scale(self.field.neg(1)))
    }

    pub fn scale(&self, c: u32) -> Polynomial {
        let mut out = Polynomial::zero(&self.field, self.n);
        for (a, &v) in &self.terms {
            out.add_term(a.clone(), self.field.mul(v, c));
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.compatible(other)?;
        let mut out = Polynomial::zero(&self.field, self.n);
        for (a, &c) in &self.terms {
            for (b, &d) in &other.terms {
                out.add_term(a.add(b), self.field.mul(c, d));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Polynomial::constant(&self.field, self.n, 1);
        for _ in 0..k {
            acc = acc.mul(self).expect("same ring");
        }
        acc
    }

    fn check_point(&self, p: &Point) -> Result<()> {
        if p.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: p.dim() });
        }
        for &c in p.coords() {
            self.field.check(c)?;
        }
        Ok(())
    }

    pub fn evaluate(&self, p: &Point) -> Result<u32> {
        self.check_point(p)?;
        let f = &self.field;
        Ok(self.terms.iter().fold(0, |acc, (a, &c)| {
            let mono = a.as_slice().iter().zip(p.coords()).fold(1, |m, (&e, &x)| f.mul(m, f.pow(x, e as u64)));
            f.add(acc, f.mul(c, mono))
        }))
    }

    /// `D^i P`, termwise: `D^i(x^a) = prod_j C(a_j, i_j) x^(a - i)`.
    pub fn hasse_derivative(&self, i: &Exponent) -> Result<Polynomial> {
        if i.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: i.dim() });
        }
        let f = &self.field;
        let mut out = Polynomial::zero(f, self.n);
        for (a, &c) in &self.terms {
            let Some(rest) = a.checked_sub(i) else { continue };
            let coef = a
                .as_slice()
                .iter()
                .zip(i.as_slice())
                .fold(1, |acc, (&aj, &ij)| f.mul(acc, binomial_mod_p(aj as u64, ij as u64, f.p())));
            out.add_term(rest, f.mul(c, coef));
        }
        Ok(out)
    }

    /// `D^i P (p)` without building the derivative.
    pub fn hasse_at(&self, i: &Exponent, p: &Point) -> Result<u32> {
        self.check_point(p)?;
        let f = &self.field;
        Ok(self.terms.iter().fold(0, |acc, (a, &c)| {
            f.add(acc, f.mul(c, hasse_monomial_at(f, a.as_slice(), i.as_slice(), p.coords())))
        }))
    }

    /// Smallest `|i|` with `D^i P(p) != 0`, probing `|i| < cap`.
    pub fn order_at(&self, p: &Point, cap: u32) -> Result<Order> {
        if cap < 1 {
            return Err(Error::InvalidArgument("order probe cap must be at least 1".into()));
        }
        self.check_point(p)?;
        if self.is_zero() {
            return Ok(Order::Infinite);
        }
        let mut indices = enumerate_monomials(self.n, cap - 1, None).into_iter().peekable();
        for level in 0..cap {
            while let Some(i) = indices.next_if(|i| i.degree() == level) {
                if self.hasse_at(&i, p)? != 0 {
                    return Ok(Order::Finite(level));
                }
            }
        }
        Ok(Order::AtLeast(cap))
    }

    /// True iff every `D^i P` with `|i| < m` vanishes at `p`.
    pub fn vanishes_to_order(&self, p: &Point, m: u32) -> Result<bool> {
        if m == 0 {
            return Ok(true);
        }
        Ok(self.order_at(p, m)?.at_least(m))
    }

    /// `P(g_1, ..., g_n)` for polynomials `g_j` in a common ring.
    pub fn substitute(&self, images: &[Polynomial]) -> Result<Polynomial> {
        if images.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: images.len() });
        }
        let Some(first) = images.first() else {
            return Ok(self.clone());
        };
        let k = first.n;
        for g in images {
            if g.field != self.field {
                return Err(Error::FieldMismatch);
            }
            if g.n != k {
                return Err(Error::DimensionMismatch { expected: k, got: g.n });
            }
        }
        let mut out = Polynomial::zero(&self.field, k);
        for (a, &c) in &self.terms {
            let mut mono = Polynomial::constant(&self.field, k, c);
            for (g, &e) in images.iter().zip(a.as_slice()) {
                mono = mono.mul(&g.pow(e))?;
            }
            out = out.add(&mono)?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf(q: u64) -> FiniteField {
        FiniteField::with_order(q).unwrap()
    }

    fn pt(c: &[u32]) -> Point {
        Point(c.to_vec())
    }

    fn ex(a: &[u32]) -> Exponent {
        Exponent::new(a.to_vec())
    }

    #[test]
    fn evaluation_examples() {
        let f = gf(3);
        let x = Polynomial::var(&f, 2, 0);
        let y = Polynomial::var(&f, 2, 1);
        assert_eq!(x.sub(&y).unwrap().evaluate(&pt(&[2, 2])).unwrap(), 0);
        let one = Polynomial::constant(&f, 2, 1);
        assert_eq!(one.evaluate(&pt(&[1, 2])).unwrap(), 1);
        assert!(one.evaluate(&pt(&[1])).is_err());
        assert!(one.evaluate(&pt(&[1, 3])).is_err());
        for q in [2u64, 3, 4, 5, 8, 9] {
            let f = gf(q);
            let x = Polynomial::var(&f, 1, 0);
            let frob = x.pow(f.q()).sub(&x).unwrap();
            for a in f.elements() {
                assert_eq!(frob.evaluate(&pt(&[a])).unwrap(), 0);
            }
        }
    }

    #[test]
    fn hasse_examples() {
        let f2 = gf(2);
        let x2 = Polynomial::monomial(&f2, ex(&[2]), 1);
        assert!(x2.hasse_derivative(&ex(&[1])).unwrap().is_zero());
        assert_eq!(x2.hasse_derivative(&ex(&[2])).unwrap(), Polynomial::constant(&f2, 1, 1));

        // (x + t1)(y + t2) = xy + y t1 + x t2 + t1 t2
        let f3 = gf(3);
        let xy = Polynomial::monomial(&f3, ex(&[1, 1]), 1);
        assert_eq!(xy.hasse_derivative(&ex(&[1, 1])).unwrap(), Polynomial::constant(&f3, 2, 1));
        assert_eq!(xy.hasse_derivative(&ex(&[1, 0])).unwrap(), Polynomial::var(&f3, 2, 1));
    }

    #[test]
    fn order_examples() {
        let f3 = gf(3);
        assert_eq!(Polynomial::zero(&f3, 2).order_at(&pt(&[0, 0]), 5).unwrap(), Order::Infinite);
        let xy = Polynomial::monomial(&f3, ex(&[1, 1]), 1);
        assert_eq!(xy.order_at(&pt(&[0, 0]), 5).unwrap(), Order::Finite(2));
        assert_eq!(xy.order_at(&pt(&[0, 0]), 2).unwrap(), Order::AtLeast(2));
        assert_eq!(Polynomial::constant(&f3, 2, 1).order_at(&pt(&[1, 2]), 3).unwrap(), Order::Finite(0));
        assert!(xy.order_at(&pt(&[0, 0]), 0).is_err());
    }

    #[test]
    fn lucas_matches_direct_binomials() {
        for p in [2u32, 3, 5, 7] {
            for a in 0..40u64 {
                for b in 0..=a {
                    let exact = crate::monomial::binomial(a, b) % p as u128;
                    assert_eq!(binomial_mod_p(a, b, p) as u128, exact, "C({a},{b}) mod {p}");
                }
            }
        }
    }

    #[test]
    fn json_terms() {
        let f = gf(5);
        let p = Polynomial::from_terms(&f, 2, vec![(ex(&[1, 0]), 1), (ex(&[0, 1]), 4), (ex(&[1, 0]), 2)]).unwrap();
        let json = serde_json::to_string(&p.to_json_terms()).unwrap();
        assert_eq!(json, r#"[{"exp":[0,1],"coef":4},{"exp":[1,0],"coef":3}]"#);
        let terms: Vec<PolyTerm> = serde_json::from_str(&json).unwrap();
        assert_eq!(Polynomial::from_json_terms(&f, 2, &terms).unwrap(), p);
    }

    fn random_poly(f: &FiniteField, n: usize, raw: &[(Vec<u32>, u32)], maxdeg: u32) -> Polynomial {
        let terms = raw.iter().filter_map(|(a, c)| {
            let a: Vec<u32> = a[..n].to_vec();
            (a.iter().sum::<u32>() <= maxdeg).then(|| (Exponent::new(a), c % f.q()))
        });
        Polynomial::from_terms(f, n, terms).unwrap()
    }

    fn term_strategy() -> impl Strategy<Value = Vec<(Vec<u32>, u32)>> {
        prop::collection::vec((prop::collection::vec(0u32..=6, 3), 0u32..100), 0..8)
    }

    proptest! {
        #[test]
        fn taylor_identity(qi in 0usize..4, n in 1usize..=3, raw in term_strategy(), base in prop::collection::vec(0u32..100, 3), shift in prop::collection::vec(0u32..100, 3)) {
            let f = gf([2u64, 3, 4, 5][qi]);
            let p = random_poly(&f, n, &raw, 6);
            let x = Point(base[..n].iter().map(|v| v % f.q()).collect());
            let t = Point(shift[..n].iter().map(|v| v % f.q()).collect());
            let xt = Point(x.coords().iter().zip(t.coords()).map(|(&a, &b)| f.add(a, b)).collect());
            let lhs = p.evaluate(&xt).unwrap();
            let deg = p.degree().unwrap_or(0);
            let mut rhs = 0;
            for i in enumerate_monomials(n, deg, None) {
                let di = p.hasse_derivative(&i).unwrap().evaluate(&x).unwrap();
                prop_assert_eq!(di, p.hasse_at(&i, &x).unwrap());
                let ti = i.as_slice().iter().zip(t.coords()).fold(1, |acc, (&e, &v)| f.mul(acc, f.pow(v, e as u64)));
                rhs = f.add(rhs, f.mul(di, ti));
            }
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn hasse_lowers_degree(n in 1usize..=3, raw in term_strategy(), idx in prop::collection::vec(0u32..=3, 3)) {
            let f = gf(3);
            let p = random_poly(&f, n, &raw, 6);
            let i = Exponent::new(idx[..n].to_vec());
            let d = p.hasse_derivative(&i).unwrap();
            if let (Some(dd), Some(pd)) = (d.degree(), p.degree()) {
                prop_assert!(dd + i.degree() <= pd);
            }
        }

        #[test]
        fn order_is_additive(qi in 0usize..3, n in 1usize..=2, a in term_strategy(), b in term_strategy(), base in prop::collection::vec(0u32..100, 3)) {
            let f = gf([2u64, 3, 5][qi]);
            let p = random_poly(&f, n, &a, 4);
            let q = random_poly(&f, n, &b, 4);
            let x = Point(base[..n].iter().map(|v| v % f.q()).collect());
            let cap = 20;
            let (op, oq, opq) = (p.order_at(&x, cap).unwrap(), q.order_at(&x, cap).unwrap(), p.mul(&q).unwrap().order_at(&x, cap).unwrap());
            match (op, oq) {
                (Order::Finite(u), Order::Finite(v)) => prop_assert_eq!(opq, Order::Finite(u + v)),
                _ => prop_assert_eq!(opq, Order::Infinite),
            }
        }

        #[test]
        fn vanishing_order_matches_derivatives(n in 1usize..=2, raw in term_strategy(), base in prop::collection::vec(0u32..100, 3), m in 1u32..4) {
            let f = gf(5);
            let p = random_poly(&f, n, &raw, 6);
            let x = Point(base[..n].iter().map(|v| v % f.q()).collect());
            let all = enumerate_monomials(n, m - 1, None).iter().all(|i| p.hasse_derivative(i).unwrap().evaluate(&x).unwrap() == 0);
            prop_assert_eq!(p.vanishes_to_order(&x, m).unwrap(), all);
        }
    }
}
