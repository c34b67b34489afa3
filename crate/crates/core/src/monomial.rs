//! Exponent vectors, the graded lexicographic order and staircases.
//!
//! `x_1` is the largest variable: among exponents of equal degree the first
//! differing coordinate decides, the smaller entry giving the smaller
//! monomial. So for `n = 2` the order starts `1 < y < x < y^2 < xy < x^2`.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of N^n, read as the monomial `x_1^{a_1} ... x_n^{a_n}`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Exponent(Vec<u32>);

impl Exponent {
    pub fn new(a: Vec<u32>) -> Self {
        Exponent(a)
    }

    pub fn zero(n: usize) -> Self {
        Exponent(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut a = vec![0; n];
        a[i] = 1;
        Exponent(a)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn add(&self, other: &Exponent) -> Exponent {
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other`, or `None` unless `other <= self` componentwise.
    pub fn checked_sub(&self, other: &Exponent) -> Option<Exponent> {
        self.0.iter().zip(&other.0).map(|(a, b)| a.checked_sub(*b)).collect::<Option<Vec<_>>>().map(Exponent)
    }

    /// Componentwise `self <= other`.
    pub fn divides(&self, other: &Exponent) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl From<Vec<u32>> for Exponent {
    fn from(a: Vec<u32>) -> Self {
        Exponent(a)
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn grlex_compare(a: &Exponent, b: &Exponent) -> Result<Ordering> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    Ok(a.cmp(b))
}

/// All exponents with `|a| <= d` (and `a_i <= caps_i` when given), ascending in grlex.
pub fn enumerate_monomials(n: usize, d: u32, caps: Option<&[u32]>) -> Vec<Exponent> {
    let mut out = Vec::new();
    for deg in 0..=d {
        push_of_degree(n, deg, caps, &mut out);
    }
    out
}

/// Exponents with `|a| = d`, ascending in grlex.
pub fn monomials_of_degree(n: usize, d: u32) -> Vec<Exponent> {
    let mut out = Vec::new();
    push_of_degree(n, d, None, &mut out);
    out
}

fn push_of_degree(n: usize, deg: u32, caps: Option<&[u32]>, out: &mut Vec<Exponent>) {
    fn fill(prefix: &mut Vec<u32>, n: usize, left: u32, caps: Option<&[u32]>, out: &mut Vec<Exponent>) {
        let i = prefix.len();
        if i + 1 == n {
            if caps.is_none_or(|c| left <= c[i]) {
                prefix.push(left);
                out.push(Exponent(prefix.clone()));
                prefix.pop();
            }
            return;
        }
        let top = caps.map_or(left, |c| left.min(c[i]));
        for a in 0..=top {
            prefix.push(a);
            fill(prefix, n, left - a, caps, out);
            prefix.pop();
        }
    }
    if n == 0 {
        if deg == 0 {
            out.push(Exponent(Vec::new()));
        }
        return;
    }
    fill(&mut Vec::with_capacity(n), n, deg, caps, out);
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Number of monomials in `n` variables of degree at most `d`.
pub fn monomial_count(n: usize, d: u32) -> u128 {
    binomial(n as u64 + d as u64, n as u64)
}

/// A finite set of exponents in N^n, kept sorted in grlex order.
#[derive(Clone, PartialEq, Eq)]
pub struct Staircase {
    n: usize,
    members: BTreeSet<Exponent>,
}

impl fmt::Debug for Staircase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.members.iter()).finish()
    }
}

impl Serialize for Staircase {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.members.iter())
    }
}

impl<'de> Deserialize<'de> for Staircase {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let members: Vec<Exponent> = Vec::deserialize(d)?;
        let n = members.first().map_or(0, Exponent::dim);
        Staircase::new(n, members).map_err(serde::de::Error::custom)
    }
}

impl Staircase {
    pub fn new(n: usize, members: impl IntoIterator<Item = Exponent>) -> Result<Self> {
        let members: BTreeSet<Exponent> = members.into_iter().collect();
        if let Some(bad) = members.iter().find(|a| a.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: bad.dim() });
        }
        Ok(Staircase { n, members })
    }

    pub fn empty(n: usize) -> Self {
        Staircase { n, members: BTreeSet::new() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, a: &Exponent) -> bool {
        self.members.contains(a)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Exponent> {
        self.members.iter()
    }

    pub fn members(&self) -> &BTreeSet<Exponent> {
        &self.members
    }

    pub fn into_members(self) -> BTreeSet<Exponent> {
        self.members
    }

    pub fn insert(&mut self, a: Exponent) -> Result<bool> {
        if a.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: a.dim() });
        }
        Ok(self.members.insert(a))
    }

    /// `|S_{<=d}|`.
    pub fn count_le(&self, d: u32) -> usize {
        count_le(&self.members, d)
    }

    pub fn is_lower_set(&self) -> bool {
        is_lower_set(&self.members)
    }

    pub fn is_upper_set_within(&self, caps: &[u32]) -> bool {
        is_upper_set_within(&self.members, caps)
    }
}

pub fn count_le(s: &BTreeSet<Exponent>, d: u32) -> usize {
    // grlex sorts by degree first
    s.iter().take_while(|a| a.degree() <= d).count()
}

/// `{a : sum_j floor(a_j / sides_j) <= m - 1}`, the standard monomials of
/// `I^m(E_1 x ... x E_n)` with `|E_j| = sides_j`.
pub fn floor_staircase(sides: &[u32], m: u32) -> Staircase {
    let n = sides.len();
    let mut members = BTreeSet::new();
    if m == 0 {
        return Staircase { n, members };
    }
    // each a_j < m * sides_j
    let caps: Vec<u32> = sides.iter().map(|&s| m * s - 1).collect();
    let mut current = vec![0u32; n];
    loop {
        let level: u32 = current.iter().zip(sides).map(|(a, s)| a / s).sum();
        if level < m {
            members.insert(Exponent(current.clone()));
        }
        // odometer
        let mut i = 0;
        loop {
            if i == n {
                return Staircase { n, members };
            }
            if current[i] < caps[i] {
                current[i] += 1;
                break;
            }
            current[i] = 0;
            i += 1;
        }
    }
}

/// The q-box `{0, ..., q-1}^n`.
pub fn box_staircase(q: u32, n: usize) -> Staircase {
    floor_staircase(&vec![q; n], 1)
}

pub fn multiplicity_staircase(q: u32, n: usize, m: u32) -> Staircase {
    floor_staircase(&vec![q; n], m)
}

pub fn staircase_count_le(s: &Staircase, d: u32) -> usize {
    s.count_le(d)
}

/// `|floor_staircase(sides, m)_{<=d}|` without materializing the staircase.
pub fn floor_staircase_count_le(sides: &[u32], m: u32, d: u32) -> u128 {
    if m == 0 {
        return 0;
    }
    // ways[level][deg]
    let (levels, degs) = (m as usize, d as usize + 1);
    let mut ways = vec![vec![0u128; degs]; levels];
    ways[0][0] = 1;
    for &s in sides {
        let mut next = vec![vec![0u128; degs]; levels];
        for (lv, row) in ways.iter().enumerate() {
            for (dg, &w) in row.iter().enumerate() {
                if w == 0 {
                    continue;
                }
                for a in 0..(degs - dg) {
                    let l2 = lv + a / s as usize;
                    if l2 >= levels {
                        break;
                    }
                    next[l2][dg + a] += w;
                }
            }
        }
        ways = next;
    }
    ways.iter().flatten().sum()
}

/// `S ∪ (S + e_1) ∪ ... ∪ (S + e_n)`.
pub fn s_plus(s: &BTreeSet<Exponent>, n: usize) -> BTreeSet<Exponent> {
    let mut out = s.clone();
    for a in s {
        for i in 0..n {
            out.insert(a.add(&Exponent::unit(n, i)));
        }
    }
    out
}

/// Exact integer form of `|(S+)_{<=d+1}| >= (n+d+1)/(d+1) |S_{<=d}|`:
/// `lhs = (n+d+1)|S_{<=d}|`, `rhs = (d+1)|(S+)_{<=d+1}|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthCheck {
    pub lhs: u128,
    pub rhs: u128,
    pub holds: bool,
}

impl GrowthCheck {
    fn new(lhs: u128, rhs: u128) -> Self {
        GrowthCheck { lhs, rhs, holds: lhs <= rhs }
    }
}

pub fn check_splus_growth(s: &BTreeSet<Exponent>, n: usize, d: u32) -> GrowthCheck {
    let plus = s_plus(s, n);
    let lhs = (n as u128 + d as u128 + 1) * count_le(s, d) as u128;
    let rhs = (d as u128 + 1) * count_le(&plus, d + 1) as u128;
    GrowthCheck::new(lhs, rhs)
}

/// For a lower set `T` and `m1 >= m2`:
/// `|T_{<=m1}| C(n+m2, n) <= |T_{<=m2}| C(n+m1, n)`.
pub fn check_lower_set_growth(t: &BTreeSet<Exponent>, n: usize, m1: u32, m2: u32) -> GrowthCheck {
    let lhs = count_le(t, m1) as u128 * monomial_count(n, m2);
    let rhs = count_le(t, m2) as u128 * monomial_count(n, m1);
    GrowthCheck::new(lhs, rhs)
}

pub fn is_lower_set(s: &BTreeSet<Exponent>) -> bool {
    s.iter().all(|a| {
        (0..a.dim()).filter(|&i| a.0[i] > 0).all(|i| {
            let mut b = a.0.clone();
            b[i] -= 1;
            s.contains(&Exponent(b))
        })
    })
}

/// Upward closure inside the box `a_i <= caps_i`.
pub fn is_upper_set_within(s: &BTreeSet<Exponent>, caps: &[u32]) -> bool {
    s.iter().all(|a| {
        (0..a.dim()).filter(|&i| a.0[i] < caps[i]).all(|i| {
            let mut b = a.0.clone();
            b[i] += 1;
            s.contains(&Exponent(b))
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_counts_match_materialized_staircases() {
        for sides in [vec![2], vec![3, 2], vec![2, 2, 2], vec![4, 1, 3]] {
            for m in 0..4 {
                let s = floor_staircase(&sides, m);
                for d in 0..14 {
                    assert_eq!(floor_staircase_count_le(&sides, m, d), s.count_le(d) as u128, "{sides:?} m={m} d={d}");
                }
            }
        }
    }
    use proptest::prelude::*;

    fn e(a: &[u32]) -> Exponent {
        Exponent(a.to_vec())
    }

    fn set(items: &[&[u32]]) -> BTreeSet<Exponent> {
        items.iter().map(|a| e(a)).collect()
    }

    #[test]
    fn grlex_examples() {
        assert_eq!(grlex_compare(&e(&[1, 0]), &e(&[0, 0])).unwrap(), Ordering::Greater);
        assert_eq!(grlex_compare(&e(&[0, 2]), &e(&[1, 1])).unwrap(), Ordering::Less);
        assert_eq!(grlex_compare(&e(&[1, 1]), &e(&[1, 1])).unwrap(), Ordering::Equal);
        assert!(grlex_compare(&e(&[1]), &e(&[1, 1])).is_err());
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_monomials(2, 1, None), vec![e(&[0, 0]), e(&[0, 1]), e(&[1, 0])]);
        assert_eq!(
            enumerate_monomials(2, 2, Some(&[1, 1])),
            vec![e(&[0, 0]), e(&[0, 1]), e(&[1, 0]), e(&[1, 1])]
        );
        assert_eq!(enumerate_monomials(1, 3, None).len(), 4);
        for n in 1..4 {
            for d in 0..6 {
                let mons = enumerate_monomials(n, d, None);
                assert_eq!(mons.len() as u128, monomial_count(n, d));
                assert!(mons.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn staircase_examples() {
        assert_eq!(box_staircase(2, 2).len(), 4);
        assert_eq!(box_staircase(3, 1).into_members(), set(&[&[0], &[1], &[2]]));
        assert_eq!(box_staircase(3, 2).len(), 9);
        assert_eq!(multiplicity_staircase(2, 1, 2).into_members(), set(&[&[0], &[1], &[2], &[3]]));
        assert_eq!(multiplicity_staircase(2, 2, 2).len(), 12);
        assert_eq!(box_staircase(3, 2).count_le(2), 6);
        assert_eq!(box_staircase(2, 2).count_le(2), 4);
        assert_eq!(box_staircase(2, 2).count_le(0), 1);
        assert_eq!(Staircase::empty(2).count_le(0), 0);
    }

    #[test]
    fn multiplicity_staircase_sizes_and_reduction() {
        // brute-force count of {a : sum floor(a_j/q) <= m-1}; every a_j < m q
        for q in 2..=3u32 {
            for n in 1..=3usize {
                for m in 1..=4u32 {
                    let bound = m * q;
                    let mut count = 0u128;
                    let total = (bound as u64).pow(n as u32);
                    for code in 0..total {
                        let mut c = code;
                        let mut level = 0;
                        for _ in 0..n {
                            level += (c % bound as u64) as u32 / q;
                            c /= bound as u64;
                        }
                        if level < m {
                            count += 1;
                        }
                    }
                    let s = multiplicity_staircase(q, n, m);
                    assert_eq!(s.len() as u128, count);
                    assert_eq!(count, binomial((m as u64) + n as u64 - 1, n as u64) * (q as u128).pow(n as u32));
                    assert!(s.is_lower_set());
                }
                assert_eq!(multiplicity_staircase(q, n, 1), box_staircase(q, n));
            }
        }
    }

    #[test]
    fn s_plus_examples() {
        assert_eq!(s_plus(&set(&[&[0, 0]]), 2), set(&[&[0, 0], &[1, 0], &[0, 1]]));
        assert!(s_plus(&BTreeSet::new(), 2).is_empty());
        assert_eq!(
            s_plus(&set(&[&[1, 0], &[0, 1]]), 2),
            set(&[&[1, 0], &[0, 1], &[2, 0], &[1, 1], &[0, 2]])
        );
        let g = check_splus_growth(&set(&[&[0, 0]]), 2, 0);
        assert_eq!((g.lhs, g.rhs, g.holds), (3, 3, true));
        assert!(check_splus_growth(&BTreeSet::new(), 3, 2).holds);
    }

    #[test]
    fn lower_and_upper_sets() {
        assert!(is_lower_set(&set(&[&[0, 0], &[1, 0]])));
        assert!(!is_lower_set(&set(&[&[1, 0]])));
        assert!(box_staircase(3, 2).is_lower_set());
        assert!(is_upper_set_within(&set(&[&[1, 1], &[1, 0], &[0, 1]]), &[1, 1]));
        assert!(!is_upper_set_within(&set(&[&[1, 0]]), &[1, 1]));
    }

    #[test]
    fn staircase_json_is_array_of_arrays() {
        let s = box_staircase(2, 1);
        assert_eq!(serde_json::to_string(&s).unwrap(), "[[0],[1]]");
        let back: Staircase = serde_json::from_str("[[0],[1]]").unwrap();
        assert_eq!(back, s);
    }

    fn exponent(n: usize) -> impl Strategy<Value = Exponent> {
        prop::collection::vec(0u32..6, n).prop_map(Exponent)
    }

    fn lower_closure(s: &BTreeSet<Exponent>) -> BTreeSet<Exponent> {
        let mut out = BTreeSet::new();
        for a in s {
            let caps = a.as_slice().to_vec();
            for b in enumerate_monomials(a.dim(), a.degree(), Some(&caps)) {
                out.insert(b);
            }
        }
        out
    }

    proptest! {
        #[test]
        fn grlex_is_a_monomial_order(a in exponent(3), b in exponent(3), c in exponent(3)) {
            prop_assert!(Exponent::zero(3) <= a);
            if a < b {
                prop_assert!(a.add(&c) < b.add(&c));
            }
            if a < b && b < c {
                prop_assert!(a < c);
            }
        }

        #[test]
        fn splus_growth_always_holds(n in 1usize..=4, raw in prop::collection::btree_set(prop::collection::vec(0u32..5, 4), 0..50), d in 0u32..7) {
            let s: BTreeSet<Exponent> = raw.into_iter().map(|v| Exponent(v[..n].to_vec())).collect();
            prop_assert!(check_splus_growth(&s, n, d).holds);
        }

        #[test]
        fn lower_sets_grow_slower_than_all_monomials(n in 1usize..=3, raw in prop::collection::vec(prop::collection::vec(0u32..5, 3), 1..6), m2 in 0u32..6, extra in 0u32..6) {
            let gens: BTreeSet<Exponent> = raw.into_iter().map(|v| Exponent(v[..n].to_vec())).collect();
            let t = lower_closure(&gens);
            prop_assert!(is_lower_set(&t));
            prop_assert!(check_lower_set_growth(&t, n, m2 + extra, m2).holds);
        }
    }
}
