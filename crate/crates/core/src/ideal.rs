//! Vanishing ideals of finite point sets: evaluation matrices with
//! multiplicity, kernel bases of `I^m(Y)_{<=d}`, affine Hilbert functions and
//! standard monomials.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldSpec, FiniteField};
use crate::linalg::{kernel_from_rref, EchelonBasis, Matrix};
use crate::monomial::{binomial, enumerate_monomials, monomial_count, monomials_of_degree, Exponent, Staircase};
use crate::poly::{binomial_mod_p, Point, Polynomial};

/// Size guards for grid enumeration and evaluation matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub max_grid: u64,
    pub max_matrix_entries: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_grid: 10_000_000, max_matrix_entries: 100_000_000 }
    }
}

impl Limits {
    pub fn check_grid(&self, q: u32, n: usize) -> Result<u64> {
        let size = (q as u128).pow(n as u32);
        if size > self.max_grid as u128 {
            return Err(Error::GridTooLarge { size, cap: self.max_grid });
        }
        Ok(size as u64)
    }

    fn check_matrix(&self, rows: u128, cols: u128) -> Result<()> {
        let size = rows * cols;
        if size > self.max_matrix_entries as u128 {
            return Err(Error::MatrixTooLarge { size, cap: self.max_matrix_entries });
        }
        Ok(())
    }
}

/// A deduplicated finite subset of F_q^n, kept in lexicographic point order.
#[derive(Clone, PartialEq, Eq)]
pub struct PointSet {
    field: FiniteField,
    n: usize,
    points: Vec<Point>,
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}^{} {:?}", self.field, self.n, self.points)
    }
}

#[derive(Serialize, Deserialize)]
struct PointSetJson {
    field: FieldSpec,
    n: usize,
    points: Vec<Vec<u32>>,
}

impl Serialize for PointSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PointSetJson {
            field: self.field.spec(),
            n: self.n,
            points: self.points.iter().map(|p| p.0.clone()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PointSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PointSetJson::deserialize(d)?;
        let field = FiniteField::from_spec(&raw.field).map_err(serde::de::Error::custom)?;
        PointSet::new(&field, raw.n, raw.points.into_iter().map(Point)).map_err(serde::de::Error::custom)
    }
}

/// Lexicographic index of a grid point, first coordinate most significant.
pub fn grid_index(q: u32, p: &Point) -> u64 {
    p.coords().iter().fold(0u64, |acc, &c| acc * q as u64 + c as u64)
}

pub fn grid_point(q: u32, n: usize, mut index: u64) -> Point {
    let mut coords = vec![0u32; n];
    for slot in coords.iter_mut().rev() {
        *slot = (index % q as u64) as u32;
        index /= q as u64;
    }
    Point(coords)
}

impl PointSet {
    pub fn new(field: &FiniteField, n: usize, points: impl IntoIterator<Item = Point>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        let mut pts: Vec<Point> = Vec::new();
        for p in points {
            if p.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: p.dim() });
            }
            for &c in p.coords() {
                field.check(c)?;
            }
            pts.push(p);
        }
        pts.sort();
        pts.dedup();
        Ok(PointSet { field: field.clone(), n, points: pts })
    }

    pub fn from_coords(field: &FiniteField, n: usize, points: &[Vec<u32>]) -> Result<Self> {
        Self::new(field, n, points.iter().cloned().map(Point))
    }

    pub fn empty(field: &FiniteField, n: usize) -> Self {
        PointSet { field: field.clone(), n, points: Vec::new() }
    }

    /// All of F_q^n, subject to the grid cap.
    pub fn grid(field: &FiniteField, n: usize, limits: &Limits) -> Result<Self> {
        let size = limits.check_grid(field.q(), n)?;
        let points = (0..size).map(|i| grid_point(field.q(), n, i)).collect();
        Ok(PointSet { field: field.clone(), n, points })
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.points.iter()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.points.binary_search(p).is_ok()
    }

    fn same_space(&self, other: &PointSet) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        Ok(())
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.points.iter().all(|p| other.contains(p))
    }

    pub fn union(&self, other: &PointSet) -> Result<PointSet> {
        self.same_space(other)?;
        PointSet::new(&self.field, self.n, self.points.iter().chain(other.points.iter()).cloned())
    }

    pub fn intersection(&self, other: &PointSet) -> Result<PointSet> {
        self.same_space(other)?;
        Ok(PointSet {
            field: self.field.clone(),
            n: self.n,
            points: self.points.iter().filter(|p| other.contains(p)).cloned().collect(),
        })
    }

    /// Bitmask over the lexicographic grid; only for `q^n <= 64`.
    pub fn grid_mask(&self) -> Option<u64> {
        let q = self.field.q();
        if (q as u128).pow(self.n as u32) > 64 {
            return None;
        }
        Some(self.points.iter().fold(0u64, |m, p| m | (1 << grid_index(q, p))))
    }

    pub fn coords(&self) -> Vec<Vec<u32>> {
        self.points.iter().map(|p| p.0.clone()).collect()
    }
}

/// Multi-indices `i` with `|i| <= m - 1`, grlex ascending.
pub fn derivative_indices(n: usize, m: u32) -> Vec<Exponent> {
    if m == 0 {
        Vec::new()
    } else {
        enumerate_monomials(n, m - 1, None)
    }
}

/// Rows are `(point, i)` with `|i| < m`, points in lexicographic order and
/// indices in grlex; columns are the monomials of degree `<= d` in grlex.
#[derive(Debug, Clone)]
pub struct EvaluationMatrix {
    pub matrix: Matrix,
    pub columns: Vec<Exponent>,
    pub rows: Vec<(Point, Exponent)>,
}

/// Evaluates `D^i(x^a)` at one point for a list of monomials.
pub(crate) struct RowEvaluator<'a> {
    field: &'a FiniteField,
    binom: Vec<Vec<u32>>,
}

impl<'a> RowEvaluator<'a> {
    pub(crate) fn new(field: &'a FiniteField, max_exp: u32, max_index: u32) -> Self {
        let binom = (0..=max_exp)
            .map(|a| (0..=max_index).map(|i| binomial_mod_p(a as u64, i as u64, field.p())).collect())
            .collect();
        RowEvaluator { field, binom }
    }

    pub(crate) fn powers(&self, point: &Point, max_exp: u32) -> Vec<Vec<u32>> {
        point
            .coords()
            .iter()
            .map(|&x| {
                let mut pw = Vec::with_capacity(max_exp as usize + 1);
                let mut acc = 1;
                for _ in 0..=max_exp {
                    pw.push(acc);
                    acc = self.field.mul(acc, x);
                }
                pw
            })
            .collect()
    }

    pub(crate) fn entry(&self, powers: &[Vec<u32>], a: &Exponent, i: &Exponent) -> u32 {
        let f = self.field;
        let mut acc = 1;
        for (j, (&aj, &ij)) in a.as_slice().iter().zip(i.as_slice()).enumerate() {
            if ij > aj {
                return 0;
            }
            let c = self.binom[aj as usize][ij as usize];
            if c == 0 {
                return 0;
            }
            acc = f.mul(acc, f.mul(c, powers[j][(aj - ij) as usize]));
        }
        acc
    }
}

pub fn evaluation_matrix(y: &PointSet, d: u32, m: u32) -> Result<EvaluationMatrix> {
    evaluation_matrix_with(y, d, m, &Limits::default())
}

pub fn evaluation_matrix_with(y: &PointSet, d: u32, m: u32, limits: &Limits) -> Result<EvaluationMatrix> {
    if m < 1 {
        return Err(Error::InvalidArgument("multiplicity must be at least 1".into()));
    }
    let n = y.dim();
    let nrows = y.len() as u128 * monomial_count(n, m - 1);
    limits.check_matrix(nrows, monomial_count(n, d))?;
    let columns = enumerate_monomials(n, d, None);
    let indices = derivative_indices(n, m);
    let eval = RowEvaluator::new(y.field(), d, m - 1);
    let mut rows = Vec::with_capacity(nrows as usize);
    let mut data = Vec::with_capacity(nrows as usize);
    for p in y.iter() {
        let pw = eval.powers(p, d);
        for i in &indices {
            data.push(columns.iter().map(|a| eval.entry(&pw, a, i)).collect());
            rows.push((p.clone(), i.clone()));
        }
    }
    Ok(EvaluationMatrix { matrix: Matrix::from_rows(columns.len(), data), columns, rows })
}

/// A canonical basis of `I^m(Y)_{<=d}` together with `HF^m(Y, d)`.
///
/// Each basis element is monic in its grlex-leading monomial and no leading
/// monomial appears in any other basis element.
#[derive(Debug, Clone)]
pub struct IdealSlice {
    pub source: PointSet,
    pub d: u32,
    pub m: u32,
    pub columns: Vec<Exponent>,
    pub basis: Vec<Polynomial>,
    pub rank: usize,
    /// Columns carrying a pivot: the standard monomials of degree `<= d`.
    pub pivot_columns: Vec<usize>,
}

#[derive(Serialize)]
struct IdealSliceJson<'a> {
    source: &'a PointSet,
    d: u32,
    m: u32,
    rank: usize,
    columns: &'a [Exponent],
    basis: Vec<Vec<crate::poly::PolyTerm>>,
}

impl Serialize for IdealSlice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IdealSliceJson {
            source: &self.source,
            d: self.d,
            m: self.m,
            rank: self.rank,
            columns: &self.columns,
            basis: self.basis.iter().map(Polynomial::to_json_terms).collect(),
        }
        .serialize(s)
    }
}

pub fn ideal_slice(y: &PointSet, d: u32, m: u32) -> Result<IdealSlice> {
    ideal_slice_with(y, d, m, &Limits::default())
}

pub fn ideal_slice_with(y: &PointSet, d: u32, m: u32, limits: &Limits) -> Result<IdealSlice> {
    let em = evaluation_matrix_with(y, d, m, limits)?;
    let f = y.field();
    let mut reduced = em.matrix;
    let pivots = reduced.rref(f);
    let kernel = kernel_from_rref(&reduced, &pivots, f);
    let n = y.dim();
    let basis = kernel
        .iter()
        .map(|v| {
            Polynomial::from_terms(f, n, v.iter().zip(&em.columns).filter(|(c, _)| **c != 0).map(|(&c, a)| (a.clone(), c)))
                .expect("columns match the ring")
        })
        .collect();
    Ok(IdealSlice { source: y.clone(), d, m, columns: em.columns, basis, rank: pivots.len(), pivot_columns: pivots })
}

/// `HF^m(Y, d)`, the rank of the multiplicity evaluation matrix.
pub fn hilbert_function(y: &PointSet, d: u32, m: u32) -> Result<usize> {
    hilbert_function_with(y, d, m, &Limits::default())
}

pub fn hilbert_function_with(y: &PointSet, d: u32, m: u32, limits: &Limits) -> Result<usize> {
    if y.is_empty() {
        if m < 1 {
            return Err(Error::InvalidArgument("multiplicity must be at least 1".into()));
        }
        return Ok(0);
    }
    Ok(evaluation_matrix_with(y, d, m, limits)?.matrix.rank(y.field()))
}

/// `C(m+n-1, n) |Y|`: the dimension of `F[x]/I^m(Y)`.
pub fn quotient_dimension(n: usize, m: u32, size: usize) -> u128 {
    if m == 0 {
        return 0;
    }
    binomial(m as u64 + n as u64 - 1, n as u64) * size as u128
}

/// Stabilization degree bound `n(q-1) + (m-1)q`.
pub fn stabilization_degree(q: u32, n: usize, m: u32) -> u32 {
    n as u32 * (q - 1) + m.saturating_sub(1) * q
}

/// Standard monomials of `I^m(Y)` under grlex, found incrementally: a
/// monomial is standard iff its evaluation column is independent of the
/// columns of the standard monomials before it.
pub fn standard_monomials(y: &PointSet, m: u32) -> Result<Staircase> {
    if m < 1 {
        return Err(Error::InvalidArgument("multiplicity must be at least 1".into()));
    }
    let n = y.dim();
    let f = y.field();
    let target = quotient_dimension(n, m, y.len()) as usize;
    let mut stairs = Staircase::empty(n);
    if target == 0 {
        return Ok(stairs);
    }
    let indices = derivative_indices(n, m);
    let cap = stabilization_degree(f.q(), n, m);
    let eval = RowEvaluator::new(f, cap, m - 1);
    let powers: Vec<Vec<Vec<u32>>> = y.iter().map(|p| eval.powers(p, cap)).collect();
    let mut basis = EchelonBasis::new(target);
    for deg in 0..=cap {
        for a in monomials_of_degree(n, deg) {
            let column: Vec<u32> =
                powers.iter().flat_map(|pw| indices.iter().map(|i| eval.entry(pw, &a, i)).collect::<Vec<_>>()).collect();
            if basis.insert(&column, f) {
                stairs.insert(a)?;
                if basis.dim() == target {
                    return Ok(stairs);
                }
            }
        }
    }
    unreachable!("the quotient is spanned by monomials of degree <= n(q-1) + (m-1)q")
}

/// `HF^m(Y, d)` for `d = 0..=dmax`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertProfile {
    pub source: PointSet,
    pub m: u32,
    pub values: Vec<usize>,
}

impl HilbertProfile {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d,value\n");
        for (d, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{d},{v}\n"));
        }
        out
    }
}

/// One elimination at `dmax`: the rank of a column prefix is its pivot count.
pub fn hilbert_profile(y: &PointSet, m: u32, dmax: u32) -> Result<HilbertProfile> {
    hilbert_profile_with(y, m, dmax, &Limits::default())
}

pub fn hilbert_profile_with(y: &PointSet, m: u32, dmax: u32, limits: &Limits) -> Result<HilbertProfile> {
    let em = evaluation_matrix_with(y, dmax, m, limits)?;
    let mut reduced = em.matrix;
    let pivots = reduced.rref(y.field());
    let n = y.dim();
    let values = (0..=dmax)
        .map(|d| {
            let width = monomial_count(n, d) as usize;
            pivots.iter().take_while(|&&c| c < width).count()
        })
        .collect();
    Ok(HilbertProfile { source: y.clone(), m, values })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnionCheck {
    pub d: u32,
    pub union_value: usize,
    pub part_values: Vec<usize>,
    pub sum: usize,
    pub holds: bool,
}

/// `HF(X_1 ∪ ... ∪ X_k, d) <= sum_i HF(X_i, d)`.
pub fn union_subadditivity_check(parts: &[PointSet], d: u32) -> Result<UnionCheck> {
    let Some(first) = parts.first() else {
        return Err(Error::InvalidArgument("at least one part is required".into()));
    };
    let mut union = first.clone();
    for p in &parts[1..] {
        union = union.union(p)?;
    }
    let part_values = parts.iter().map(|p| hilbert_function(p, d, 1)).collect::<Result<Vec<_>>>()?;
    let union_value = hilbert_function(&union, d, 1)?;
    let sum = part_values.iter().sum();
    Ok(UnionCheck { d, union_value, part_values, sum, holds: union_value <= sum })
}
