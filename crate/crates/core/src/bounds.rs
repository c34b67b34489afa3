//! Exact checkers for the size and closure inequalities, the FKG hypothesis
//! checker and subset sweeps. Every comparison is done in integers by
//! cross-multiplication.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::closure::{closure_axioms_check_with, closure_with, multiplicity_closure_with};
use crate::error::{Error, Result};
use crate::field::FiniteField;
use crate::generators::{curve_points, product_set, rng, CurveSpec, InstanceBundle};
use crate::ideal::{grid_point, hilbert_function_with, hilbert_profile_with, union_subadditivity_check, Limits, PointSet};
use crate::monomial::{binomial, check_splus_growth, floor_staircase_count_le, Exponent, Staircase};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    SizeBound,
    ClosureBound,
    ProductClosureBound,
    MultSetBound,
    MultClosureBound,
    HilbertGrowth,
    SchwartzZippelMult,
    StatisticalKakeya,
    PartialLines,
    SplusGrowth,
    UnionSubadditivity,
    ClosureAxioms,
}

impl TheoremId {
    pub const ALL: [TheoremId; 12] = [
        TheoremId::SizeBound,
        TheoremId::ClosureBound,
        TheoremId::ProductClosureBound,
        TheoremId::MultSetBound,
        TheoremId::MultClosureBound,
        TheoremId::HilbertGrowth,
        TheoremId::SchwartzZippelMult,
        TheoremId::StatisticalKakeya,
        TheoremId::PartialLines,
        TheoremId::SplusGrowth,
        TheoremId::UnionSubadditivity,
        TheoremId::ClosureAxioms,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::SizeBound => "size-bound",
            TheoremId::ClosureBound => "closure-bound",
            TheoremId::ProductClosureBound => "product-closure-bound",
            TheoremId::MultSetBound => "mult-set-bound",
            TheoremId::MultClosureBound => "mult-closure-bound",
            TheoremId::HilbertGrowth => "hilbert-growth",
            TheoremId::SchwartzZippelMult => "schwartz-zippel-mult",
            TheoremId::StatisticalKakeya => "statistical-kakeya",
            TheoremId::PartialLines => "partial-lines",
            TheoremId::SplusGrowth => "splus-growth",
            TheoremId::UnionSubadditivity => "union-subadditivity",
            TheoremId::ClosureAxioms => "closure-axioms",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL.into_iter().find(|t| t.as_str() == s).ok_or_else(|| {
            let names: Vec<_> = TheoremId::ALL.iter().map(|t| t.as_str()).collect();
            Error::InvalidArgument(format!("unknown theorem id '{s}'; expected one of {}", names.join(", ")))
        })
    }
}

/// A side condition checked alongside the main inequality.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub lhs: u128,
    pub rhs: u128,
    /// `lhs = rhs` rather than `lhs <= rhs`.
    pub equality: bool,
    pub holds: bool,
    /// Informational checks never fail a report.
    pub asserted: bool,
}

impl Check {
    pub fn le(name: impl Into<String>, lhs: u128, rhs: u128) -> Self {
        Check { name: name.into(), lhs, rhs, equality: false, holds: lhs <= rhs, asserted: true }
    }

    pub fn eq(name: impl Into<String>, lhs: u128, rhs: u128) -> Self {
        Check { name: name.into(), lhs, rhs, equality: true, holds: lhs == rhs, asserted: true }
    }

    /// A yes/no law encoded as `violations <= 0`.
    pub fn law(name: impl Into<String>, ok: bool) -> Self {
        Check::le(name, u128::from(!ok), 0)
    }

    pub fn informational(mut self) -> Self {
        self.asserted = false;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem_id: TheoremId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u32>,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    pub lhs: u128,
    pub rhs: u128,
    pub holds: bool,
    /// `rhs/lhs` in lowest terms, or `n/a` when `lhs = 0`.
    pub ratio: String,
    #[serde(default)]
    pub witness: Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub aux: BTreeMap<String, String>,
}

pub fn ratio_string(num: u128, den: u128) -> String {
    if den == 0 {
        return "n/a".into();
    }
    let r = Ratio::new(num, den);
    format!("{}/{}", r.numer(), r.denom())
}

impl BoundReport {
    pub fn new(theorem_id: TheoremId, q: Option<u32>, n: usize, d: Option<u32>, lhs: u128, rhs: u128, witness: Value) -> Self {
        BoundReport {
            theorem_id,
            q,
            n,
            d,
            lhs,
            rhs,
            holds: lhs <= rhs,
            ratio: ratio_string(rhs, lhs),
            witness,
            checks: Vec::new(),
            aux: BTreeMap::new(),
        }
    }

    fn with_checks(mut self, checks: Vec<Check>) -> Self {
        self.checks = checks;
        self
    }

    fn with_aux(mut self, key: &str, value: impl Into<String>) -> Self {
        self.aux.insert(key.into(), value.into());
        self
    }

    /// The main inequality and every asserted side condition hold.
    pub fn passed(&self) -> bool {
        self.holds && self.checks.iter().all(|c| c.holds || !c.asserted)
    }

    /// `rhs/lhs <= other.rhs/other.lhs`, i.e. at least as tight.
    fn tighter_or_equal(&self, other: &BoundReport) -> bool {
        self.rhs * other.lhs <= other.rhs * self.lhs
    }
}

pub const CSV_HEADER: [&str; 10] = ["theorem_id", "q", "n", "d", "lhs", "rhs", "ratio", "holds", "realized", "constant"];

/// One row per report, columns in `CSV_HEADER` order.
pub fn reports_to_csv(reports: &[BoundReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::InvalidArgument(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in reports {
        let opt = |v: Option<String>| v.unwrap_or_default();
        w.write_record([
            r.theorem_id.to_string(),
            opt(r.q.map(|q| q.to_string())),
            r.n.to_string(),
            opt(r.d.map(|d| d.to_string())),
            r.lhs.to_string(),
            r.rhs.to_string(),
            r.ratio.clone(),
            r.holds.to_string(),
            opt(r.aux.get("realized_ratio").cloned()),
            opt(r.aux.get("corollary_constant").or_else(|| r.aux.get("constant")).cloned()),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn overflow() -> Error {
    Error::InvalidArgument("integer overflow in bound arithmetic".into())
}

fn cmul(a: u128, b: u128) -> Result<u128> {
    a.checked_mul(b).ok_or_else(overflow)
}

fn cpow(a: u128, e: u32) -> Result<u128> {
    a.checked_pow(e).ok_or_else(overflow)
}

fn grid_size(f: &FiniteField, n: usize) -> Result<u128> {
    cpow(f.q() as u128, n as u32)
}

/// `HF^m(F_q^n, d)`, counted on the staircase of `I^m(F_q^n)`.
pub fn whole_space_hilbert(q: u32, n: usize, d: u32, m: u32) -> u128 {
    floor_staircase_count_le(&vec![q; n], m, d)
}

fn point_witness(y: &PointSet, extra: Value) -> Value {
    let mut w = json!({ "points": y.coords() });
    if let (Value::Object(map), Value::Object(more)) = (&mut w, extra) {
        map.extend(more);
    }
    w
}

fn actual_curve_degree(spec: &CurveSpec) -> u32 {
    spec.components.iter().map(|c| c.iter().rposition(|&v| v != 0).unwrap_or(0) as u32).max().unwrap_or(0)
}

fn factorial(n: usize) -> Result<u128> {
    (1..=n as u128).try_fold(1u128, cmul)
}

/// Runs the checkers under fixed size limits.
#[derive(Debug, Clone, Copy, Default)]
pub struct Verifier {
    pub limits: Limits,
}

impl Verifier {
    pub fn new(limits: Limits) -> Self {
        Verifier { limits }
    }

    /// `HF(F_q^n, d) |Y| <= HF(Y, d) q^n`.
    pub fn size_bound(&self, y: &PointSet, d: u32) -> Result<BoundReport> {
        let (f, n) = (y.field(), y.dim());
        let lhs = cmul(whole_space_hilbert(f.q(), n, d, 1), y.len() as u128)?;
        let hf = hilbert_function_with(y, d, 1, &self.limits)?;
        let rhs = cmul(hf as u128, grid_size(f, n)?)?;
        Ok(BoundReport::new(TheoremId::SizeBound, Some(f.q()), n, Some(d), lhs, rhs, point_witness(y, json!({ "d": d }))))
    }

    /// `HF(F_q^n, d) |cl_d(Y)| <= q^n |Y|`, with `HF(cl_d(Y), e) = HF(Y, e)`
    /// for `e <= d` and `HF(Y, d) <= |Y|` as side conditions.
    pub fn closure_bound(&self, y: &PointSet, d: u32) -> Result<BoundReport> {
        let (f, n) = (y.field(), y.dim());
        let cl = closure_with(y, d, &self.limits)?.output;
        let lhs = cmul(whole_space_hilbert(f.q(), n, d, 1), cl.len() as u128)?;
        let rhs = cmul(grid_size(f, n)?, y.len() as u128)?;
        let from_cl = hilbert_profile_with(&cl, 1, d, &self.limits)?.values;
        let from_y = hilbert_profile_with(y, 1, d, &self.limits)?.values;
        let mut checks: Vec<Check> =
            from_cl.iter().zip(&from_y).enumerate().map(|(e, (&a, &b))| Check::eq(format!("hf-closure-agrees-{e}"), a as u128, b as u128)).collect();
        checks.push(Check::le("hf-at-most-size", from_y[d as usize] as u128, y.len() as u128));
        Ok(BoundReport::new(TheoremId::ClosureBound, Some(f.q()), n, Some(d), lhs, rhs, point_witness(y, json!({ "d": d })))
            .with_checks(checks)
            .with_aux("closure_size", cl.len().to_string()))
    }

    /// `HF(E, d) |cl_d(Y) ∩ E| <= |E| |Y|` for `Y ⊆ E = E_1 x ... x E_n`.
    ///
    /// The same product with the closure taken over the whole grid is
    /// reported as an informational check.
    pub fn product_closure_bound(&self, factors: &[Vec<u32>], y: &PointSet, d: u32) -> Result<BoundReport> {
        let f = y.field();
        let e = product_set(f, factors)?;
        if e.dim() != y.dim() {
            return Err(Error::DimensionMismatch { expected: e.dim(), got: y.dim() });
        }
        if !y.is_subset(&e) {
            return Err(Error::NotInProduct);
        }
        let sides: Vec<u32> = factors.iter().map(|s| s.iter().collect::<BTreeSet<_>>().len() as u32).collect();
        let hf_e = floor_staircase_count_le(&sides, 1, d);
        let cl = closure_with(y, d, &self.limits)?.output;
        let inside = cl.intersection(&e)?;
        let lhs = cmul(hf_e, inside.len() as u128)?;
        let rhs = cmul(e.len() as u128, y.len() as u128)?;
        let checks = vec![
            Check::eq("hf-product-staircase", hf_e, hilbert_function_with(&e, d, 1, &self.limits)? as u128),
            Check::le("ambient-closure", cmul(hf_e, cl.len() as u128)?, rhs).informational(),
        ];
        Ok(BoundReport::new(
            TheoremId::ProductClosureBound,
            Some(f.q()),
            y.dim(),
            Some(d),
            lhs,
            rhs,
            point_witness(y, json!({ "d": d, "factors": factors })),
        )
        .with_checks(checks)
        .with_aux("closure_size", cl.len().to_string())
        .with_aux("closure_in_product", inside.len().to_string()))
    }

    /// `HF^m(F_q^n, d) |Y| <= HF^m(Y, d) q^n`.
    pub fn mult_set_bound(&self, y: &PointSet, d: u32, m: u32) -> Result<BoundReport> {
        if m < 1 {
            return Err(Error::InvalidArgument("multiplicity must be at least 1".into()));
        }
        let (f, n) = (y.field(), y.dim());
        let lhs = cmul(whole_space_hilbert(f.q(), n, d, m), y.len() as u128)?;
        let rhs = cmul(hilbert_function_with(y, d, m, &self.limits)? as u128, grid_size(f, n)?)?;
        Ok(BoundReport::new(TheoremId::MultSetBound, Some(f.q()), n, Some(d), lhs, rhs, point_witness(y, json!({ "d": d, "m": m }))))
    }

    /// `HF^l(F_q^n, d) |X| <= q^n C(m+n-1, n) |Y|` for `X = cl_d^{l,m}(Y)`.
    pub fn mult_closure_bound(&self, y: &PointSet, d: u32, l: u32, m: u32) -> Result<BoundReport> {
        let (f, n) = (y.field(), y.dim());
        let x = multiplicity_closure_with(y, d, l, m, &self.limits)?.output;
        let grid = grid_size(f, n)?;
        let hf_space = whole_space_hilbert(f.q(), n, d, l);
        let lhs = cmul(hf_space, x.len() as u128)?;
        let quotient = cmul(binomial(m as u64 + n as u64 - 1, n as u64), y.len() as u128)?;
        let rhs = cmul(grid, quotient)?;
        let hf_x = hilbert_function_with(&x, d, l, &self.limits)? as u128;
        let hf_y = hilbert_function_with(y, d, m, &self.limits)? as u128;
        let mut checks = vec![
            Check::le("mult-set-bound-on-closure", lhs, cmul(hf_x, grid)?),
            Check::le("hilbert-transfer", hf_x, hf_y),
            Check::le("quotient-dimension", hf_y, quotient),
        ];
        if l <= m {
            checks.push(Check::eq("extensive", y.len() as u128, y.intersection(&x)?.len() as u128));
        }
        Ok(BoundReport::new(TheoremId::MultClosureBound, Some(f.q()), n, Some(d), lhs, rhs, point_witness(y, json!({ "d": d, "l": l, "m": m })))
            .with_checks(checks)
            .with_aux("closure_size", x.len().to_string()))
    }

    /// `HF(m1) C(n+m2, n) <= HF(m2) C(n+m1, n)` for the ideal `I^mult(Y)`, `m1 >= m2`.
    pub fn hilbert_growth(&self, y: &PointSet, m1: u32, m2: u32, mult: u32) -> Result<BoundReport> {
        if m1 < m2 {
            return Err(Error::InvalidArgument(format!("need m1 >= m2, got m1 = {m1}, m2 = {m2}")));
        }
        let n = y.dim();
        let prof = hilbert_profile_with(y, mult, m1, &self.limits)?.values;
        let c = |k: u32| binomial(n as u64 + k as u64, n as u64);
        let lhs = cmul(prof[m1 as usize] as u128, c(m2))?;
        let rhs = cmul(prof[m2 as usize] as u128, c(m1))?;
        Ok(BoundReport::new(
            TheoremId::HilbertGrowth,
            Some(y.field().q()),
            n,
            Some(m1),
            lhs,
            rhs,
            point_witness(y, json!({ "m1": m1, "m2": m2, "multiplicity": mult })),
        ))
    }

    /// Checks that the whole curve lies in `cl_d^{l,m}(X)` when
    /// `lambda d < |X|(m-l+1) + l - 1`; `lhs = |C|`, `rhs = |C ∩ closure|`.
    pub fn schwartz_zippel_mult(&self, x: &PointSet, spec: &CurveSpec, d: u32, l: u32, m: u32) -> Result<BoundReport> {
        spec.validate()?;
        if spec.field != *x.field() {
            return Err(Error::FieldMismatch);
        }
        if spec.dim() != x.dim() {
            return Err(Error::DimensionMismatch { expected: x.dim(), got: spec.dim() });
        }
        let curve = curve_points(spec);
        if !x.is_subset(&curve) {
            return Err(Error::HypothesisNotMet("X is not contained in the curve".into()));
        }
        let lam = spec.degree_bound as i128;
        let budget = x.len() as i128 * (m as i128 - l as i128 + 1) + l as i128 - 1;
        if lam * d as i128 >= budget {
            return Err(Error::HypothesisNotMet(format!("lambda*d = {} is not below |X|(m-l+1)+l-1 = {budget}", lam * d as i128)));
        }
        let cl = multiplicity_closure_with(x, d, l, m, &self.limits)?.output;
        let covered = curve.intersection(&cl)?.len();
        Ok(BoundReport::new(
            TheoremId::SchwartzZippelMult,
            Some(x.field().q()),
            x.dim(),
            Some(d),
            curve.len() as u128,
            covered as u128,
            point_witness(x, json!({ "d": d, "l": l, "m": m, "curve": spec })),
        ))
    }

    /// Every point of `X` lies on a recorded curve of degree `<= lambda` that
    /// meets `Y` in at least `tau` points.
    pub fn check_curve_hypothesis(&self, bundle: &InstanceBundle, lambda: u32, tau: usize) -> Result<()> {
        let f = bundle.x.field();
        if bundle.y.field() != f {
            return Err(Error::FieldMismatch);
        }
        if tau > f.q() as usize {
            return Err(Error::TauTooLarge { tau, available: f.q() as usize });
        }
        let n = bundle.x.dim();
        let mut good = Vec::with_capacity(bundle.curves.len());
        for c in &bundle.curves {
            c.validate()?;
            let usable = c.field == *f && c.dim() == n && actual_curve_degree(c) <= lambda;
            let pts = curve_points(c);
            let hits = if usable { pts.intersection(&bundle.y)?.len() } else { 0 };
            good.push((pts, usable && hits >= tau));
        }
        let mut assigned: BTreeMap<&[u32], Vec<usize>> = BTreeMap::new();
        for w in &bundle.witnesses {
            if w.curve >= bundle.curves.len() {
                return Err(Error::InvalidArgument(format!("witness refers to missing curve {}", w.curve)));
            }
            assigned.entry(w.point.as_slice()).or_default().push(w.curve);
        }
        let all: Vec<usize> = (0..bundle.curves.len()).collect();
        let offending: Vec<&[u32]> = bundle
            .x
            .iter()
            .filter(|p| {
                let candidates = assigned.get(p.coords()).unwrap_or(&all);
                !candidates.iter().any(|&c| good[c].1 && good[c].0.contains(p))
            })
            .map(|p| p.coords())
            .collect();
        if offending.is_empty() {
            Ok(())
        } else {
            let shown: Vec<String> = offending.iter().take(5).map(|p| format!("{p:?}")).collect();
            Err(Error::HypothesisNotMet(format!(
                "{} point(s) lack a curve of degree <= {lambda} meeting Y in >= {tau} points, e.g. {}",
                offending.len(),
                shown.join(" ")
            )))
        }
    }

    /// `|X| tau^n <= (tau + lambda (q-1))^n |Y|`.
    pub fn statistical_kakeya(&self, bundle: &InstanceBundle, lambda: u32, tau: usize) -> Result<BoundReport> {
        self.check_curve_hypothesis(bundle, lambda, tau)?;
        let q = bundle.x.field().q() as u128;
        let n = bundle.x.dim() as u32;
        let (xs, ys) = (bundle.x.len() as u128, bundle.y.len() as u128);
        let top = cpow(tau as u128 + lambda as u128 * (q - 1), n)?;
        let bottom = cpow(tau as u128, n)?;
        let lhs = cmul(xs, bottom)?;
        let rhs = cmul(top, ys)?;
        let corollary = ratio_string(cpow(3 * q - 2, n)?, cpow(q, n)?);
        Ok(BoundReport::new(
            TheoremId::StatisticalKakeya,
            Some(q as u32),
            n as usize,
            None,
            lhs,
            rhs,
            json!({ "x_size": xs as u64, "y_size": ys as u64, "tau": tau, "lambda": lambda, "seed": bundle.seed }),
        )
        .with_aux("realized_ratio", ratio_string(xs, ys))
        .with_aux("bound_constant", ratio_string(top, bottom))
        .with_aux("corollary_constant", corollary))
    }

    /// Finite-`l` form of the Kakeya argument: when `lambda d < tau(m-l+1)+l-1`
    /// and `d >= n(q-1) + (l-1)q`, `C(l+n-1, n)|X| <= C(m+n-1, n)|Y|`, with the
    /// containment `X ⊆ cl_d^{l,m}(Y)` as a side condition.
    pub fn kakeya_chain(&self, bundle: &InstanceBundle, lambda: u32, tau: usize, d: u32, l: u32, m: u32) -> Result<BoundReport> {
        self.check_curve_hypothesis(bundle, lambda, tau)?;
        let (q, n) = (bundle.x.field().q(), bundle.x.dim());
        if (lambda as i128) * d as i128 >= tau as i128 * (m as i128 - l as i128 + 1) + l as i128 - 1 {
            return Err(Error::HypothesisNotMet("lambda*d must be below tau(m-l+1)+l-1".into()));
        }
        let stable = crate::ideal::stabilization_degree(q, n, l);
        if d < stable {
            return Err(Error::HypothesisNotMet(format!("d must be at least {stable} so that the whole-space function is stable")));
        }
        let cl = multiplicity_closure_with(&bundle.y, d, l, m, &self.limits)?.output;
        let lhs = cmul(binomial(l as u64 + n as u64 - 1, n as u64), bundle.x.len() as u128)?;
        let rhs = cmul(binomial(m as u64 + n as u64 - 1, n as u64), bundle.y.len() as u128)?;
        Ok(BoundReport::new(
            TheoremId::StatisticalKakeya,
            Some(q),
            n,
            Some(d),
            lhs,
            rhs,
            json!({ "tau": tau, "lambda": lambda, "l": l, "m": m, "seed": bundle.seed }),
        )
        .with_checks(vec![Check::eq("x-in-closure", bundle.x.len() as u128, bundle.x.intersection(&cl)?.len() as u128)]))
    }

    /// Both constants for unions of lines sampled in at least `ceil(q/2)`
    /// points: `|X| <= n! 2^n |Y|` and `|X| q^n <= (3q-2)^n |Y|`.
    pub fn partial_lines(&self, bundle: &InstanceBundle) -> Result<Vec<BoundReport>> {
        let q = bundle.x.field().q();
        let half = q.div_ceil(2) as usize;
        if bundle.tau < half {
            return Err(Error::HypothesisNotMet(format!("tau = {} is below ceil(q/2) = {half}", bundle.tau)));
        }
        self.check_curve_hypothesis(bundle, 1, half)?;
        let n = bundle.x.dim();
        let (xs, ys) = (bundle.x.len() as u128, bundle.y.len() as u128);
        let first_const = cmul(factorial(n)?, cpow(2, n as u32)?)?;
        let qn = cpow(q as u128, n as u32)?;
        let second_top = cpow(3 * q as u128 - 2, n as u32)?;
        let tighter = if cmul(second_top, 1)? <= cmul(first_const, qn)? { "multiplicity" } else { "degree-closure" };
        let witness = json!({ "x_size": xs as u64, "y_size": ys as u64, "tau": bundle.tau, "seed": bundle.seed });
        let first = BoundReport::new(TheoremId::PartialLines, Some(q), n, None, xs, cmul(first_const, ys)?, witness.clone())
            .with_aux("form", "degree-closure")
            .with_aux("constant", ratio_string(first_const, 1));
        let second = BoundReport::new(TheoremId::PartialLines, Some(q), n, None, cmul(xs, qn)?, cmul(second_top, ys)?, witness)
            .with_aux("form", "multiplicity")
            .with_aux("constant", ratio_string(second_top, qn));
        Ok([first, second]
            .into_iter()
            .map(|r| r.with_aux("realized_ratio", ratio_string(xs, ys)).with_aux("tighter", tighter))
            .collect())
    }

    /// Lines sampled in at least `q^alpha` points, `alpha = num/den` in
    /// `[0, 1]`: with `t = ceil(q^alpha)`, `|X| t^n <= (t + q - 1)^n |Y|`.
    pub fn partial_lines_alpha(&self, bundle: &InstanceBundle, num: u32, den: u32) -> Result<BoundReport> {
        if den == 0 || num > den {
            return Err(Error::InvalidArgument("alpha must be a fraction in [0, 1]".into()));
        }
        let q = bundle.x.field().q();
        let target = cpow(q as u128, num)?;
        let t = (1..=q as u128).find(|&t| t.checked_pow(den).is_none_or(|v| v >= target)).expect("t = q always qualifies");
        self.check_curve_hypothesis(bundle, 1, t as usize)?;
        let n = bundle.x.dim() as u32;
        let (xs, ys) = (bundle.x.len() as u128, bundle.y.len() as u128);
        let lhs = cmul(xs, cpow(t, n)?)?;
        let rhs = cmul(cpow(t + q as u128 - 1, n)?, ys)?;
        Ok(BoundReport::new(
            TheoremId::PartialLines,
            Some(q),
            n as usize,
            None,
            lhs,
            rhs,
            json!({ "x_size": xs as u64, "y_size": ys as u64, "alpha": format!("{num}/{den}"), "tau_alpha": t as u64, "seed": bundle.seed }),
        )
        .with_aux("form", "alpha")
        .with_aux("realized_ratio", ratio_string(xs, ys)))
    }

    /// `(n+d+1)|S_{<=d}| <= (d+1)|(S+)_{<=d+1}|`.
    pub fn splus_growth(&self, s: &Staircase, d: u32) -> BoundReport {
        let g = check_splus_growth(s.members(), s.dim(), d);
        let points: Vec<&Exponent> = s.iter().collect();
        BoundReport::new(TheoremId::SplusGrowth, None, s.dim(), Some(d), g.lhs, g.rhs, json!({ "set": points, "d": d }))
    }

    /// `HF(X_1 ∪ ... ∪ X_k, d) <= sum_i HF(X_i, d)`.
    pub fn union_subadditivity(&self, parts: &[PointSet], d: u32) -> Result<BoundReport> {
        let r = union_subadditivity_check(parts, d)?;
        let first = &parts[0];
        let witness = json!({ "parts": parts.iter().map(PointSet::coords).collect::<Vec<_>>(), "d": d });
        Ok(BoundReport::new(TheoremId::UnionSubadditivity, Some(first.field().q()), first.dim(), Some(d), r.union_value as u128, r.sum as u128, witness))
    }

    /// Closure-operator laws; `lhs` counts violated laws, `rhs = 0`.
    pub fn closure_axioms(&self, x: &PointSet, y: &PointSet, d: u32) -> Result<BoundReport> {
        let r = closure_axioms_check_with(x, y, d, &self.limits)?;
        let mut checks = vec![Check::law("extensive", r.extensive), Check::law("idempotent", r.idempotent), Check::law("hilbert-agrees", r.hilbert_agrees)];
        if let Some(ok) = r.monotone {
            checks.push(Check::law("monotone", ok));
        }
        let failed = checks.iter().filter(|c| !c.holds).count() as u128;
        let witness = json!({ "x": x.coords(), "y": y.coords(), "d": d });
        Ok(BoundReport::new(TheoremId::ClosureAxioms, Some(x.field().q()), x.dim(), Some(d), failed, 0, witness)
            .with_checks(checks)
            .with_aux("closure_size", r.closure_size.to_string()))
    }
}

// ---------------------------------------------------------------------------
// FKG

/// A nonnegative rational given in JSON as an integer or a `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum RationalValue {
    Int(i64),
    Text(String),
}

impl RationalValue {
    fn parse(&self) -> Result<BigRational> {
        match self {
            RationalValue::Int(v) => Ok(BigRational::from_integer(BigInt::from(*v))),
            RationalValue::Text(s) => {
                let s = s.trim();
                let r = if s.contains('/') { BigRational::from_str(s).ok() } else { BigInt::from_str(s).ok().map(BigRational::from_integer) };
                r.ok_or_else(|| Error::InvalidArgument(format!("not a rational number: '{s}'")))
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct LatticeJson {
    #[serde(rename = "box")]
    caps: Vec<u32>,
    mu: Vec<RationalValue>,
    f: Vec<RationalValue>,
    g: Vec<RationalValue>,
}

/// Nonnegative functions on the box `[0, b_1] x ... x [0, b_n]`, tabulated
/// row-major with the first coordinate most significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LatticeJson", into = "LatticeJson")]
pub struct LatticeFunctions {
    pub caps: Vec<u32>,
    pub mu: Vec<BigRational>,
    pub f: Vec<BigRational>,
    pub g: Vec<BigRational>,
}

impl TryFrom<LatticeJson> for LatticeFunctions {
    type Error = Error;

    fn try_from(raw: LatticeJson) -> Result<Self> {
        let parse = |v: &[RationalValue]| v.iter().map(RationalValue::parse).collect::<Result<Vec<_>>>();
        LatticeFunctions::new(raw.caps, parse(&raw.mu)?, parse(&raw.f)?, parse(&raw.g)?)
    }
}

impl From<LatticeFunctions> for LatticeJson {
    fn from(l: LatticeFunctions) -> Self {
        let render = |v: &[BigRational]| {
            v.iter().map(|r| if r.is_integer() { RationalValue::Text(r.numer().to_string()) } else { RationalValue::Text(r.to_string()) }).collect()
        };
        LatticeJson { mu: render(&l.mu), f: render(&l.f), g: render(&l.g), caps: l.caps }
    }
}

impl LatticeFunctions {
    pub fn new(caps: Vec<u32>, mu: Vec<BigRational>, f: Vec<BigRational>, g: Vec<BigRational>) -> Result<Self> {
        let size = caps.iter().try_fold(1u128, |acc, &b| cmul(acc, b as u128 + 1))?;
        for (name, table) in [("mu", &mu), ("f", &f), ("g", &g)] {
            if table.len() as u128 != size {
                return Err(Error::DimensionMismatch { expected: size as usize, got: table.len() });
            }
            if table.iter().any(Signed::is_negative) {
                return Err(Error::InvalidArgument(format!("{name} takes a negative value")));
            }
        }
        Ok(LatticeFunctions { caps, mu, f, g })
    }

    pub fn from_integers(caps: Vec<u32>, mu: &[i64], f: &[i64], g: &[i64]) -> Result<Self> {
        let conv = |v: &[i64]| v.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect();
        LatticeFunctions::new(caps, conv(mu), conv(f), conv(g))
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    fn decode(&self, mut idx: usize) -> Vec<u32> {
        let mut v = vec![0; self.caps.len()];
        for (slot, &b) in v.iter_mut().zip(&self.caps).rev() {
            *slot = (idx % (b as usize + 1)) as u32;
            idx /= b as usize + 1;
        }
        v
    }

    fn encode(&self, v: &[u32]) -> usize {
        v.iter().zip(&self.caps).fold(0, |acc, (&x, &b)| acc * (b as usize + 1) + x as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Monotonicity {
    Constant,
    Increasing,
    Decreasing,
    Neither,
}

impl Monotonicity {
    fn allows_increasing(self) -> bool {
        matches!(self, Monotonicity::Constant | Monotonicity::Increasing)
    }

    fn allows_decreasing(self) -> bool {
        matches!(self, Monotonicity::Constant | Monotonicity::Decreasing)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FkgReport {
    pub log_supermodular: bool,
    pub f_monotone: Monotonicity,
    pub g_monotone: Monotonicity,
    /// `mu` log-supermodular and `f, g` both increasing or both decreasing.
    pub hypotheses_hold: bool,
    /// `(sum mu f)(sum mu g)` as a reduced fraction.
    pub lhs: String,
    /// `(sum mu)(sum mu f g)` as a reduced fraction.
    pub rhs: String,
    pub inequality_holds: bool,
    pub flags: Vec<String>,
}

fn monotonicity(lf: &LatticeFunctions, h: &[BigRational]) -> Monotonicity {
    let (mut up, mut down) = (false, false);
    for idx in 0..lf.len() {
        let x = lf.decode(idx);
        for i in 0..x.len() {
            if x[i] < lf.caps[i] {
                let mut y = x.clone();
                y[i] += 1;
                match h[idx].cmp(&h[lf.encode(&y)]) {
                    std::cmp::Ordering::Less => up = true,
                    std::cmp::Ordering::Greater => down = true,
                    std::cmp::Ordering::Equal => {}
                }
            }
        }
    }
    match (up, down) {
        (false, false) => Monotonicity::Constant,
        (true, false) => Monotonicity::Increasing,
        (false, true) => Monotonicity::Decreasing,
        (true, true) => Monotonicity::Neither,
    }
}

/// Checks the FKG hypotheses and the correlation inequality separately; the
/// inequality is evaluated even when a hypothesis fails.
pub fn fkg_check(lf: &LatticeFunctions, limits: &Limits) -> Result<FkgReport> {
    let size = lf.len() as u128;
    if size * size > limits.max_matrix_entries as u128 {
        return Err(Error::MatrixTooLarge { size: size * size, cap: limits.max_matrix_entries });
    }
    let points: Vec<Vec<u32>> = (0..lf.len()).map(|i| lf.decode(i)).collect();
    let log_supermodular = (0..lf.len()).into_par_iter().all(|a| {
        (a + 1..lf.len()).all(|b| {
            let join: Vec<u32> = points[a].iter().zip(&points[b]).map(|(x, y)| *x.max(y)).collect();
            let meet: Vec<u32> = points[a].iter().zip(&points[b]).map(|(x, y)| *x.min(y)).collect();
            &lf.mu[a] * &lf.mu[b] <= &lf.mu[lf.encode(&join)] * &lf.mu[lf.encode(&meet)]
        })
    });
    let f_monotone = monotonicity(lf, &lf.f);
    let g_monotone = monotonicity(lf, &lf.g);
    let same_direction = (f_monotone.allows_increasing() && g_monotone.allows_increasing())
        || (f_monotone.allows_decreasing() && g_monotone.allows_decreasing());
    let mut flags = Vec::new();
    if !log_supermodular {
        flags.push("mu is not log-supermodular".to_string());
    }
    for (name, m) in [("f", f_monotone), ("g", g_monotone)] {
        if m == Monotonicity::Neither {
            flags.push(format!("{name} is not monotone"));
        }
    }
    if f_monotone != Monotonicity::Neither && g_monotone != Monotonicity::Neither && !same_direction {
        flags.push("f and g are monotone in opposite directions".to_string());
    }
    let sum = |h: &dyn Fn(usize) -> BigRational| (0..lf.len()).fold(BigRational::zero(), |acc, i| acc + h(i));
    let smu = sum(&|i| lf.mu[i].clone());
    let smf = sum(&|i| &lf.mu[i] * &lf.f[i]);
    let smg = sum(&|i| &lf.mu[i] * &lf.g[i]);
    let smfg = sum(&|i| &lf.mu[i] * &lf.f[i] * &lf.g[i]);
    let lhs = smf * smg;
    let rhs = smu * smfg;
    let render = |r: &BigRational| if r.denom().is_one() { format!("{}/1", r.numer()) } else { format!("{}/{}", r.numer(), r.denom()) };
    Ok(FkgReport {
        log_supermodular,
        f_monotone,
        g_monotone,
        hypotheses_hold: log_supermodular && same_direction,
        inequality_holds: lhs <= rhs,
        lhs: render(&lhs),
        rhs: render(&rhs),
        flags,
    })
}

/// On the box `{0..q-1}^n`: `mu = 1`, `f` the indicator of `s`, `g` the
/// indicator of degree `<= d`. The inequality reads
/// `|S| |M ∩ T| <= |T| |S ∩ M|`.
pub fn staircase_fkg_instance(q: u32, n: usize, s: &Staircase, d: u32) -> Result<LatticeFunctions> {
    let caps = vec![q - 1; n];
    let size = (q as usize).pow(n as u32);
    let mut f = vec![0i64; size];
    let mut g = vec![0i64; size];
    for (idx, (fv, gv)) in f.iter_mut().zip(g.iter_mut()).enumerate() {
        let a = grid_point(q, n, idx as u64);
        *fv = i64::from(s.contains(&Exponent::new(a.0.clone())));
        *gv = i64::from(a.0.iter().sum::<u32>() <= d);
    }
    LatticeFunctions::from_integers(caps, &vec![1; size], &f, &g)
}

// ---------------------------------------------------------------------------
// Sweeps

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    ClosureBound,
    SizeBound,
}

impl FromStr for SweepMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closure-bound" => Ok(SweepMode::ClosureBound),
            "size-bound" => Ok(SweepMode::SizeBound),
            _ => Err(Error::InvalidArgument(format!("unknown sweep mode '{s}'; expected closure-bound or size-bound"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub q: u64,
    pub n: usize,
    pub d_min: u32,
    pub d_max: u32,
    pub mode: SweepMode,
    /// `None` enumerates every subset (needs `q^n <= 16`).
    pub samples: Option<usize>,
    pub seed: u64,
}

/// Largest grid enumerated exhaustively.
pub const EXHAUSTIVE_MAX_POINTS: u128 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub exhaustive: bool,
    pub instances: usize,
    pub violations: usize,
    /// Smallest `rhs/lhs` among instances with `lhs > 0`; ties go to the
    /// first instance in `(d, subset)` order.
    pub tightest: Option<BoundReport>,
    /// Sorted by `(d, subset encoding)`.
    pub reports: Vec<BoundReport>,
}

/// Bitset over grid indices, ordered as a binary number.
#[derive(Debug, Clone, PartialEq, Eq)]
struct SubsetCode(Vec<u64>);

impl Ord for SubsetCode {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.iter().rev().cmp(other.0.iter().rev())
    }
}

impl PartialOrd for SubsetCode {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl SubsetCode {
    fn points(&self, q: u32, n: usize) -> impl Iterator<Item = crate::poly::Point> + '_ {
        self.0.iter().enumerate().flat_map(move |(w, &bits)| {
            (0..64).filter(move |b| bits >> b & 1 == 1).map(move |b| grid_point(q, n, w as u64 * 64 + b))
        })
    }
}

impl Verifier {
    pub fn sweep(&self, cfg: &SweepConfig) -> Result<SweepReport> {
        if cfg.d_min > cfg.d_max {
            return Err(Error::InvalidArgument("empty degree range".into()));
        }
        let field = FiniteField::with_order(cfg.q)?;
        let q = field.q();
        let size = self.limits.check_grid(q, cfg.n)? as u128;
        let words = size.div_ceil(64) as usize;
        let mut codes: Vec<SubsetCode> = match cfg.samples {
            None => {
                if size > EXHAUSTIVE_MAX_POINTS {
                    return Err(Error::InvalidArgument(format!(
                        "exhaustive sweep needs q^n <= {EXHAUSTIVE_MAX_POINTS}, got {size}; pass a sample count"
                    )));
                }
                (0..1u64 << size).map(|m| SubsetCode(vec![m])).collect()
            }
            Some(count) => {
                let mut r = rng(cfg.seed);
                (0..count)
                    .map(|_| {
                        let mut code = vec![0u64; words];
                        for i in 0..size as usize {
                            if r.gen::<bool>() {
                                code[i / 64] |= 1 << (i % 64);
                            }
                        }
                        SubsetCode(code)
                    })
                    .collect()
            }
        };
        codes.sort();
        codes.dedup();
        let jobs: Vec<(u32, &SubsetCode)> = (cfg.d_min..=cfg.d_max).flat_map(|d| codes.iter().map(move |c| (d, c))).collect();
        let reports = jobs
            .par_iter()
            .map(|&(d, code)| {
                let y = PointSet::new(&field, cfg.n, code.points(q, cfg.n))?;
                match cfg.mode {
                    SweepMode::ClosureBound => self.closure_bound(&y, d),
                    SweepMode::SizeBound => self.size_bound(&y, d),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let violations = reports.iter().filter(|r| !r.passed()).count();
        let tightest = reports.iter().filter(|r| r.lhs > 0).fold(None::<&BoundReport>, |best, r| match best {
            Some(b) if b.tighter_or_equal(r) => Some(b),
            _ => Some(r),
        });
        Ok(SweepReport {
            config: *cfg,
            exhaustive: cfg.samples.is_none(),
            instances: reports.len(),
            violations,
            tightest: tightest.cloned(),
            reports,
        })
    }
}
