//! Seeded instance generators: lines, parametric curves, unions of partially
//! sampled lines, Nikodym-style sets and product sets.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FiniteField;
use crate::ideal::{grid_point, Limits, PointSet};
use crate::monomial::Exponent;
use crate::poly::{Point, Polynomial};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `lambda -> (C_1(lambda), ..., C_n(lambda))` with every `deg C_j <= lambda_deg`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub field: FiniteField,
    /// Coefficients of each component, constant term first.
    pub components: Vec<Vec<u32>>,
    #[serde(rename = "lambda")]
    pub degree_bound: u32,
}

impl CurveSpec {
    pub fn new(field: &FiniteField, components: Vec<Vec<u32>>, degree_bound: u32) -> Result<Self> {
        let spec = CurveSpec { field: field.clone(), components, degree_bound };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree_bound < 1 {
            return Err(Error::InvalidArgument("curve degree bound must be at least 1".into()));
        }
        if self.components.is_empty() {
            return Err(Error::InvalidArgument("a curve needs at least one component".into()));
        }
        for c in &self.components {
            for &v in c {
                self.field.check(v)?;
            }
            let deg = c.iter().rposition(|&v| v != 0).unwrap_or(0);
            if deg as u32 > self.degree_bound {
                return Err(Error::InvalidArgument(format!("component degree {deg} exceeds bound {}", self.degree_bound)));
            }
        }
        Ok(())
    }

    pub fn line(field: &FiniteField, base: &Point, direction: &Point) -> Result<Self> {
        check_line_args(field, base, direction)?;
        let components = base.coords().iter().zip(direction.coords()).map(|(&b, &v)| vec![b, v]).collect();
        CurveSpec::new(field, components, 1)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn at(&self, lambda: u32) -> Point {
        let f = &self.field;
        Point(self.components.iter().map(|c| c.iter().rev().fold(0, |acc, &v| f.add(f.mul(acc, lambda), v))).collect())
    }

    /// Components as polynomials in one variable.
    pub fn polynomials(&self) -> Vec<Polynomial> {
        self.components
            .iter()
            .map(|c| {
                Polynomial::from_terms(&self.field, 1, c.iter().enumerate().map(|(k, &v)| (Exponent::new(vec![k as u32]), v)))
                    .expect("coefficients were validated")
            })
            .collect()
    }

    /// `P(C_1(t), ..., C_n(t))`, of degree at most `lambda * deg P`.
    pub fn restrict(&self, p: &Polynomial) -> Result<Polynomial> {
        p.substitute(&self.polynomials())
    }
}

/// The image of the curve over all parameter values.
pub fn curve_points(spec: &CurveSpec) -> PointSet {
    PointSet::new(&spec.field, spec.dim(), spec.field.elements().map(|t| spec.at(t))).expect("curve points lie in the grid")
}

fn check_line_args(field: &FiniteField, base: &Point, direction: &Point) -> Result<()> {
    if base.dim() != direction.dim() {
        return Err(Error::DimensionMismatch { expected: base.dim(), got: direction.dim() });
    }
    for &c in base.coords().iter().chain(direction.coords()) {
        field.check(c)?;
    }
    if direction.coords().iter().all(|&c| c == 0) {
        return Err(Error::ZeroDirection);
    }
    Ok(())
}

/// `{ base + t * direction : t in F_q }`.
pub fn line(field: &FiniteField, base: &Point, direction: &Point) -> Result<PointSet> {
    Ok(curve_points(&CurveSpec::line(field, base, direction)?))
}

/// The Cartesian product `E_1 x ... x E_n`.
pub fn product_set(field: &FiniteField, factors: &[Vec<u32>]) -> Result<PointSet> {
    if factors.is_empty() {
        return Err(Error::InvalidArgument("at least one factor is required".into()));
    }
    let mut sets = Vec::with_capacity(factors.len());
    for (i, e) in factors.iter().enumerate() {
        for &v in e {
            field.check(v)?;
        }
        let s: BTreeSet<u32> = e.iter().copied().collect();
        if s.is_empty() {
            return Err(Error::EmptyFactor(i));
        }
        sets.push(s.into_iter().collect::<Vec<_>>());
    }
    let mut points = vec![Vec::new()];
    for s in &sets {
        points = points.into_iter().flat_map(|p: Vec<u32>| s.iter().map(move |&v| [p.clone(), vec![v]].concat())).collect();
    }
    PointSet::new(field, factors.len(), points.into_iter().map(Point))
}

/// A point of `X` together with the recorded curve that witnesses it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub point: Vec<u32>,
    pub curve: usize,
}

/// `X` is a union of full curves, `Y` the union of the sampled subsets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceBundle {
    pub x: PointSet,
    pub y: PointSet,
    pub tau: usize,
    pub curves: Vec<CurveSpec>,
    /// Sampled subset of each curve, aligned with `curves`.
    pub samples: Vec<Vec<Vec<u32>>>,
    #[serde(default)]
    pub witnesses: Vec<Witness>,
    pub seed: u64,
}

fn random_direction(rng: &mut ChaCha8Rng, q: u32, n: usize) -> Point {
    loop {
        let v: Vec<u32> = (0..n).map(|_| rng.gen_range(0..q)).collect();
        if v.iter().any(|&c| c != 0) {
            return Point(v);
        }
    }
}

fn random_subset(rng: &mut ChaCha8Rng, points: &PointSet, tau: usize) -> Vec<Vec<u32>> {
    let mut idx = sample(rng, points.len(), tau).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| points.points()[i].0.clone()).collect()
}

#[allow(clippy::too_many_arguments)]
fn assemble(field: &FiniteField, n: usize, x: PointSet, tau: usize, curves: Vec<CurveSpec>, samples: Vec<Vec<Vec<u32>>>, witnesses: Vec<Witness>, seed: u64) -> Result<InstanceBundle> {
    let y = PointSet::new(field, n, samples.iter().flatten().cloned().map(Point))?;
    Ok(InstanceBundle { x, y, tau, curves, samples, witnesses, seed })
}

/// Witness each point of `x` by the first curve containing it.
fn first_curve_witnesses(x: &PointSet, curves: &[PointSet]) -> Vec<Witness> {
    x.iter()
        .map(|p| Witness { point: p.0.clone(), curve: curves.iter().position(|c| c.contains(p)).expect("x is the union of the curves") })
        .collect()
}

/// `count` distinct random lines in F_q^n, each with a uniform subset of
/// exactly `tau` of its points.
pub fn partial_lines_instance(q: u64, n: usize, count: usize, tau: usize, seed: u64) -> Result<InstanceBundle> {
    let field = FiniteField::with_order(q)?;
    let q = field.q();
    if tau > q as usize {
        return Err(Error::TauTooLarge { tau, available: q as usize });
    }
    if count == 0 || n == 0 {
        return Err(Error::InvalidArgument("count and n must be at least 1".into()));
    }
    let qq = q as u128;
    let total_lines = qq.pow(n as u32 - 1) * (qq.pow(n as u32) - 1) / (qq - 1);
    if count as u128 > total_lines {
        return Err(Error::InvalidArgument(format!("only {total_lines} distinct lines exist")));
    }
    let mut rng = rng(seed);
    let mut seen = BTreeSet::new();
    let (mut curves, mut lines, mut samples) = (Vec::new(), Vec::new(), Vec::new());
    while curves.len() < count {
        let base = Point((0..n).map(|_| rng.gen_range(0..q)).collect());
        let dir = random_direction(&mut rng, q, n);
        let spec = CurveSpec::line(&field, &base, &dir)?;
        let pts = curve_points(&spec);
        if !seen.insert(pts.coords()) {
            continue;
        }
        samples.push(random_subset(&mut rng, &pts, tau));
        curves.push(spec);
        lines.push(pts);
    }
    let x = PointSet::new(&field, n, lines.iter().flat_map(|l| l.iter().cloned()))?;
    let witnesses = first_curve_witnesses(&x, &lines);
    assemble(&field, n, x, tau, curves, samples, witnesses, seed)
}

/// For every grid point a random line through it and a random `tau`-subset
/// of that line; `Y` is the union of the subsets and `X` the whole grid.
pub fn nikodym_instance(q: u64, n: usize, tau: usize, seed: u64, limits: &Limits) -> Result<InstanceBundle> {
    let field = FiniteField::with_order(q)?;
    let q = field.q();
    if tau > q as usize {
        return Err(Error::TauTooLarge { tau, available: q as usize });
    }
    let size = limits.check_grid(q, n)?;
    let mut rng = rng(seed);
    let (mut curves, mut samples, mut witnesses) = (Vec::new(), Vec::new(), Vec::new());
    for idx in 0..size {
        let x = grid_point(q, n, idx);
        let dir = random_direction(&mut rng, q, n);
        let spec = CurveSpec::line(&field, &x, &dir)?;
        samples.push(random_subset(&mut rng, &curve_points(&spec), tau));
        witnesses.push(Witness { point: x.0, curve: curves.len() });
        curves.push(spec);
    }
    let grid = PointSet::grid(&field, n, limits)?;
    assemble(&field, n, grid, tau, curves, samples, witnesses, seed)
}

/// One curve with a uniform `tau`-subset of its points.
pub fn curve_instance(spec: &CurveSpec, tau: usize, seed: u64) -> Result<InstanceBundle> {
    spec.validate()?;
    let pts = curve_points(spec);
    if tau > pts.len() {
        return Err(Error::TauTooLarge { tau, available: pts.len() });
    }
    let mut rng = rng(seed);
    let samples = vec![random_subset(&mut rng, &pts, tau)];
    let witnesses = first_curve_witnesses(&pts, std::slice::from_ref(&pts));
    assemble(&spec.field, spec.dim(), pts, tau, vec![spec.clone()], samples, witnesses, seed)
}
