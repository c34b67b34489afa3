//! Degree closures `cl_d(Y) = V(I(Y)_{<=d})` and their multiplicity
//! variants `cl_d^{l,m}(Y) = V^l(I^m(Y)_{<=d})`, computed by evaluating the
//! canonical kernel basis at every point of the grid.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ideal::{derivative_indices, grid_point, hilbert_profile_with, ideal_slice_with, IdealSlice, Limits, PointSet, RowEvaluator};
use crate::monomial::binomial;

#[derive(Debug, Clone)]
pub struct ClosureResult {
    pub input: PointSet,
    pub d: u32,
    pub l: u32,
    pub m: u32,
    pub output: PointSet,
    pub kernel: IdealSlice,
}

impl ClosureResult {
    pub fn kernel_rank(&self) -> usize {
        self.kernel.basis.len()
    }
}

#[derive(Serialize)]
struct ClosureJson<'a> {
    input: &'a PointSet,
    d: u32,
    l: u32,
    m: u32,
    output: Vec<Vec<u32>>,
    size: usize,
    kernel_rank: usize,
    hilbert_value: usize,
}

impl Serialize for ClosureResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ClosureJson {
            input: &self.input,
            d: self.d,
            l: self.l,
            m: self.m,
            output: self.output.coords(),
            size: self.output.len(),
            kernel_rank: self.kernel_rank(),
            hilbert_value: self.kernel.rank,
        }
        .serialize(s)
    }
}

pub fn closure(y: &PointSet, d: u32) -> Result<ClosureResult> {
    closure_with(y, d, &Limits::default())
}

pub fn closure_with(y: &PointSet, d: u32, limits: &Limits) -> Result<ClosureResult> {
    multiplicity_closure_with(y, d, 1, 1, limits)
}

pub fn multiplicity_closure(y: &PointSet, d: u32, l: u32, m: u32) -> Result<ClosureResult> {
    multiplicity_closure_with(y, d, l, m, &Limits::default())
}

pub fn multiplicity_closure_with(y: &PointSet, d: u32, l: u32, m: u32, limits: &Limits) -> Result<ClosureResult> {
    if l < 1 || m < 1 {
        return Err(Error::InvalidArgument("l and m must be at least 1".into()));
    }
    let f = y.field();
    let n = y.dim();
    let size = limits.check_grid(f.q(), n)?;
    let kernel = ideal_slice_with(y, d, m, limits)?;
    // sparse kernel vectors over the column list
    let sparse: Vec<Vec<(usize, u32)>> = kernel
        .basis
        .iter()
        .map(|p| p.terms().map(|(a, c)| (kernel.columns.binary_search(a).expect("basis lies in the slice"), c)).collect())
        .collect();
    let indices = derivative_indices(n, l);
    let eval = RowEvaluator::new(f, d, l - 1);
    let q = f.q();
    let members: Vec<bool> = (0..size)
        .into_par_iter()
        .map(|idx| {
            let x = grid_point(q, n, idx);
            let pw = eval.powers(&x, d);
            indices.iter().all(|i| {
                let row: Vec<u32> = kernel.columns.iter().map(|a| eval.entry(&pw, a, i)).collect();
                sparse.iter().all(|v| v.iter().fold(0, |acc, &(c, coef)| f.add(acc, f.mul(coef, row[c]))) == 0)
            })
        })
        .collect();
    let points = (0..size).filter(|&i| members[i as usize]).map(|i| grid_point(q, n, i));
    let output = PointSet::new(f, n, points)?;
    Ok(ClosureResult { input: y.clone(), d, l, m, output, kernel })
}

/// Closure-operator laws for `cl_d` on one pair of sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosureAxiomsReport {
    pub d: u32,
    pub extensive: bool,
    /// `None` when `X` is not a subset of `Y`.
    pub monotone: Option<bool>,
    pub idempotent: bool,
    /// `HF(cl_d(X), e) = HF(X, e)` for every `e <= d`.
    pub hilbert_agrees: bool,
    pub closure_size: usize,
    pub holds: bool,
}

pub fn closure_axioms_check(x: &PointSet, y: &PointSet, d: u32) -> Result<ClosureAxiomsReport> {
    closure_axioms_check_with(x, y, d, &Limits::default())
}

pub fn closure_axioms_check_with(x: &PointSet, y: &PointSet, d: u32, limits: &Limits) -> Result<ClosureAxiomsReport> {
    let cx = closure_with(x, d, limits)?.output;
    let extensive = x.is_subset(&cx);
    let monotone = if x.is_subset(y) { Some(cx.is_subset(&closure_with(y, d, limits)?.output)) } else { None };
    let idempotent = closure_with(&cx, d, limits)?.output == cx;
    let hilbert_agrees = hilbert_profile_with(&cx, 1, d, limits)?.values == hilbert_profile_with(x, 1, d, limits)?.values;
    let holds = extensive && monotone.unwrap_or(true) && idempotent && hilbert_agrees;
    Ok(ClosureAxiomsReport { d, extensive, monotone, idempotent, hilbert_agrees, closure_size: cx.len(), holds })
}

/// If `cl_d(X)` is the whole space then `C(d+n, n) <= |X|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WholeSpaceReport {
    pub d: u32,
    pub closure_is_whole_space: bool,
    pub monomials: u128,
    pub size: usize,
    pub holds: bool,
}

pub fn whole_space_degree_check(x: &PointSet, d: u32) -> Result<WholeSpaceReport> {
    whole_space_degree_check_with(x, d, &Limits::default())
}

pub fn whole_space_degree_check_with(x: &PointSet, d: u32, limits: &Limits) -> Result<WholeSpaceReport> {
    let q = x.field().q();
    if d >= q {
        return Err(Error::HypothesisNotMet(format!("degree {d} must be below q = {q}")));
    }
    let n = x.dim();
    let whole = closure_with(x, d, limits)?.output.len() as u128 == (q as u128).pow(n as u32);
    let monomials = binomial(d as u64 + n as u64, n as u64);
    let holds = !whole || monomials <= x.len() as u128;
    Ok(WholeSpaceReport { d, closure_is_whole_space: whole, monomials, size: x.len(), holds })
}
