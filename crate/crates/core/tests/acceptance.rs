//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs without the libtest harness so the lines are always shown.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use polyclosure::bounds::{fkg_check, reports_to_csv, staircase_fkg_instance, whole_space_hilbert, LatticeFunctions, Monotonicity, SweepConfig, SweepMode, Verifier};
use polyclosure::closure::{closure, closure_axioms_check};
use polyclosure::generators::{curve_points, line, nikodym_instance, rng, CurveSpec};
use polyclosure::ideal::{grid_point, hilbert_function, hilbert_profile, stabilization_degree, standard_monomials, union_subadditivity_check, Limits};
use polyclosure::monomial::{binomial, Exponent, Staircase};
use polyclosure::{FiniteField, Point, PointSet};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn gf(q: u64) -> FiniteField {
    FiniteField::with_order(q).unwrap()
}

fn from_mask(f: &FiniteField, n: usize, mask: u64) -> PointSet {
    let size = (f.q() as u64).pow(n as u32);
    PointSet::new(f, n, (0..size).filter(|i| mask >> i & 1 == 1).map(|i| grid_point(f.q(), n, i))).unwrap()
}

fn random_subset(r: &mut ChaCha8Rng, f: &FiniteField, n: usize, max: usize) -> PointSet {
    let size = (f.q() as u64).pow(n as u32);
    let k = r.gen_range(0..=max.min(size as usize));
    let mut idx: Vec<u64> = (0..size).collect();
    idx.shuffle(r);
    PointSet::new(f, n, idx[..k].iter().map(|&i| grid_point(f.q(), n, i))).unwrap()
}

fn random_point(r: &mut ChaCha8Rng, q: u32, n: usize) -> Point {
    Point((0..n).map(|_| r.gen_range(0..q)).collect())
}

fn random_direction(r: &mut ChaCha8Rng, q: u32, n: usize) -> Point {
    loop {
        let p = random_point(r, q, n);
        if p.coords().iter().any(|&c| c != 0) {
            return p;
        }
    }
}

fn exhaustive_sweeps(mode: SweepMode) -> Outcome {
    let v = Verifier::default();
    let start = Instant::now();
    let mut total = 0;
    for (q, d_max, expected) in [(2u64, 2u32, 16 * 3), (3, 4, 512 * 5)] {
        let cfg = SweepConfig { q, n: 2, d_min: 0, d_max, mode, samples: None, seed: 0 };
        let r = v.sweep(&cfg).map_err(|e| e.to_string())?;
        ensure(r.instances == expected, || format!("q={q}: {} instances, expected {expected}", r.instances))?;
        ensure(r.violations == 0, || format!("q={q}: {} violations", r.violations))?;
        // re-check the integer comparison independently of the report flag
        ensure(r.reports.iter().all(|b| b.lhs <= b.rhs), || format!("q={q}: lhs > rhs somewhere"))?;
        total += r.instances;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1}s"))?;
    Ok(format!("{total} (subset, d) instances, 0 violations, {secs:.2}s"))
}

fn criterion_1() -> Outcome {
    exhaustive_sweeps(SweepMode::ClosureBound)
}

fn criterion_2() -> Outcome {
    exhaustive_sweeps(SweepMode::SizeBound)
}

/// Rank-based Hilbert function against counting incrementally found
/// standard monomials.
fn criterion_3() -> Outcome {
    let mut r = rng(3);
    let mut count = 0;
    let mut comparisons = 0;
    for q in [2u64, 3, 5] {
        for n in 1..=3usize {
            for m in 1..=3u32 {
                let f = gf(q);
                for _ in 0..8 {
                    let y = random_subset(&mut r, &f, n, 20);
                    let stairs = standard_monomials(&y, m).map_err(|e| e.to_string())?;
                    let expected = binomial(m as u64 + n as u64 - 1, n as u64) * y.len() as u128;
                    ensure(stairs.len() as u128 == expected, || format!("{y:?} m={m}: {} standard monomials, expected {expected}", stairs.len()))?;
                    ensure(stairs.is_lower_set(), || format!("{y:?} m={m}: staircase not a lower set"))?;
                    let top = stabilization_degree(f.q(), n, m);
                    let prof = hilbert_profile(&y, m, top).map_err(|e| e.to_string())?;
                    for (d, &v) in prof.values.iter().enumerate() {
                        ensure(v == stairs.count_le(d as u32), || format!("{y:?} m={m} d={d}: rank {v} vs staircase {}", stairs.count_le(d as u32)))?;
                        comparisons += 1;
                    }
                    count += 1;
                }
            }
        }
    }
    ensure(count >= 200, || format!("only {count} instances"))?;
    Ok(format!("{count} instances, {comparisons} (instance, d) equalities"))
}

/// Over F_2 with exponents in {0,1}^2: intersect the zero sets of every
/// polynomial of degree <= d that vanishes on Y.
fn oracle_closure_gf2(points: &BTreeSet<(u32, u32)>, d: u32) -> BTreeSet<(u32, u32)> {
    let monos: Vec<(u32, u32)> = [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().filter(|(a, b)| a + b <= d).collect();
    let value = |coefs: u32, (x, y): (u32, u32)| -> u32 {
        monos.iter().enumerate().filter(|(k, _)| coefs >> k & 1 == 1).map(|(_, &(a, b))| x.pow(a) * y.pow(b)).sum::<u32>() % 2
    };
    let vanishing: Vec<u32> = (0..1u32 << monos.len()).filter(|&c| points.iter().all(|&p| value(c, p) == 0)).collect();
    let grid = [(0, 0), (0, 1), (1, 0), (1, 1)];
    grid.into_iter().filter(|&p| vanishing.iter().all(|&c| value(c, p) == 0)).collect()
}

fn criterion_4() -> Outcome {
    let f = gf(2);
    let mut checked = 0;
    for mask in 0..16u64 {
        let y = from_mask(&f, 2, mask);
        let pts: BTreeSet<(u32, u32)> = y.iter().map(|p| (p.coords()[0], p.coords()[1])).collect();
        for d in 0..=2 {
            let got: BTreeSet<(u32, u32)> = closure(&y, d).map_err(|e| e.to_string())?.output.iter().map(|p| (p.coords()[0], p.coords()[1])).collect();
            let want = oracle_closure_gf2(&pts, d);
            ensure(got == want, || format!("mask {mask} d {d}: {got:?} vs oracle {want:?}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} closures equal the brute-force oracle"))
}

fn criterion_5() -> Outcome {
    let mut r = rng(5);
    let mut count = 0;
    for q in [2u64, 3, 4, 5] {
        for n in 1..=3usize {
            for m in 1..=3u32 {
                let f = gf(q);
                for _ in 0..3 {
                    let mut y = random_subset(&mut r, &f, n, 6);
                    if y.is_empty() {
                        y = PointSet::new(&f, n, [random_point(&mut r, f.q(), n)]).unwrap();
                    }
                    let size = y.len();
                    let full = binomial(m as u64 + n as u64 - 1, n as u64) * size as u128;
                    let hf = |d: u32, mult: u32| hilbert_function(&y, d, mult).map(|v| v as u128).map_err(|e| e.to_string());
                    let d1 = n as u32 * (f.q() - 1);
                    ensure(hf(d1, 1)? == size as u128, || format!("{y:?}: HF(Y, {d1}) != |Y|"))?;
                    let d2 = d1 + (m - 1) * f.q();
                    ensure(hf(d2, m)? == full, || format!("{y:?} m={m}: HF^m(Y, {d2}) != {full}"))?;
                    let d3 = (2 * m as usize * size - m as usize - size) as u32;
                    ensure(hf(d3, m)? == full, || format!("{y:?} m={m}: HF^m(Y, {d3}) != {full}"))?;
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} instances, three thresholds each"))
}

fn criterion_6() -> Outcome {
    let mut r = rng(6);
    let mut count = 0;
    for q in [3u64, 5, 7] {
        for n in [2usize, 3] {
            let f = gf(q);
            for _ in 0..3 {
                let base = random_point(&mut r, f.q(), n);
                let dir = random_direction(&mut r, f.q(), n);
                let l = line(&f, &base, &dir).map_err(|e| e.to_string())?;
                for d in 0..f.q() {
                    let mut pts = l.points().to_vec();
                    pts.shuffle(&mut r);
                    let y = PointSet::new(&f, n, pts[..=d as usize].iter().cloned()).unwrap();
                    let c = closure(&y, d).map_err(|e| e.to_string())?;
                    ensure(l.is_subset(&c.output), || format!("q={q} n={n} d={d}: line {l:?} not in closure of {y:?}"))?;
                    // second route: direct evaluation of each kernel polynomial on the line
                    for p in &c.kernel.basis {
                        for x in l.iter() {
                            ensure(p.evaluate(x).unwrap() == 0, || format!("kernel polynomial nonzero at {x:?}"))?;
                        }
                    }
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} (line, d) instances, full line contained each time"))
}

fn criterion_7() -> Outcome {
    let v = Verifier::default();
    let mut r = rng(7);
    let mut count = 0;
    let mut parabolas = 0;
    while count < 60 {
        let q = [3u64, 5, 7][r.gen_range(0..3)];
        let f = gf(q);
        let qq = f.q();
        let spec = if r.gen_bool(0.5) {
            let base = random_point(&mut r, qq, 2);
            let dir = random_direction(&mut r, qq, 2);
            CurveSpec::line(&f, &base, &dir).unwrap()
        } else {
            let c1 = vec![r.gen_range(0..qq), r.gen_range(1..qq)];
            let c2 = vec![r.gen_range(0..qq), r.gen_range(0..qq), r.gen_range(1..qq)];
            parabolas += 1;
            CurveSpec::new(&f, vec![c1, c2], 2).unwrap()
        };
        let curve = curve_points(&spec);
        let mut pts = curve.points().to_vec();
        pts.shuffle(&mut r);
        let k = r.gen_range(1..=pts.len());
        let x = PointSet::new(&f, 2, pts[..k].iter().cloned()).unwrap();
        let m = r.gen_range(1..=3u32);
        let l = r.gen_range(1..=m);
        let budget = k as u32 * (m - l + 1) + l - 1;
        let d_max = (budget - 1) / spec.degree_bound;
        let d = r.gen_range(0..=d_max);
        let rep = v.schwartz_zippel_mult(&x, &spec, d, l, m).map_err(|e| e.to_string())?;
        ensure(rep.holds && rep.lhs == rep.rhs, || format!("curve {spec:?} X={x:?} d={d} l={l} m={m}: {}/{} curve points covered", rep.rhs, rep.lhs))?;
        count += 1;
    }
    Ok(format!("{count} instances ({parabolas} parabolas), curve contained each time"))
}

fn criterion_8() -> Outcome {
    let v = Verifier::default();
    let mut reports = Vec::new();
    for q in [3u64, 5, 7] {
        for n in [2usize, 3] {
            let tau = q.div_ceil(2) as usize;
            let b = nikodym_instance(q, n, tau, 100 + q * 10 + n as u64, &Limits::default()).map_err(|e| e.to_string())?;
            let rep = v.statistical_kakeya(&b, 1, tau).map_err(|e| format!("q={q} n={n}: {e}"))?;
            let qn = (q as u128).pow(n as u32);
            let direct_lhs = b.x.len() as u128 * (tau as u128).pow(n as u32);
            let direct_rhs = (tau as u128 + q as u128 - 1).pow(n as u32) * b.y.len() as u128;
            ensure(rep.lhs == direct_lhs && rep.rhs == direct_rhs && direct_lhs <= direct_rhs, || format!("q={q} n={n}: {rep:?}"))?;
            // realized |X|/|Y| against (3 - 2/q)^n
            ensure(b.x.len() as u128 * qn <= (3 * q as u128 - 2).pow(n as u32) * b.y.len() as u128, || format!("q={q} n={n}: corollary constant exceeded"))?;
            reports.push(rep);
        }
    }
    let csv = reports_to_csv(&reports).map_err(|e| e.to_string())?;
    for line in csv.lines() {
        println!("      {line}");
    }
    Ok(format!("{} Nikodym instances, hypothesis and inequality hold", reports.len()))
}

fn criterion_9() -> Outcome {
    let v = Verifier::default();
    let mut r = rng(9);
    let mut count = 0;
    let mut cross = 0;
    while count < 120 {
        let q = [2u64, 3, 4, 5][r.gen_range(0..4)];
        let n = r.gen_range(1..=2usize);
        let f = gf(q);
        let m = r.gen_range(1..=3u32);
        let l = r.gen_range(1..=m);
        let d = r.gen_range(0..=stabilization_degree(f.q(), n, m));
        let y = random_subset(&mut r, &f, n, 8);
        let a = v.mult_set_bound(&y, d, m).map_err(|e| e.to_string())?;
        let b = v.mult_closure_bound(&y, d, l, m).map_err(|e| e.to_string())?;
        ensure(a.passed(), || format!("mult-set-bound failed: {a:?}"))?;
        ensure(b.passed(), || format!("mult-closure-bound failed: {b:?}"))?;
        // the whole-space value used on the left, against a rank computation
        let grid = PointSet::grid(&f, n, &Limits::default()).unwrap();
        let rank = hilbert_function(&grid, d, l).unwrap() as u128;
        ensure(rank == whole_space_hilbert(f.q(), n, d, l), || format!("q={q} n={n} d={d} l={l}: staircase count differs from rank"))?;
        cross += 1;
        count += 1;
    }
    Ok(format!("{count} instances of each bound, {cross} whole-space cross-checks, 0 violations"))
}

fn criterion_10() -> Outcome {
    let v = Verifier::default();
    let mut r = rng(10);
    for i in 0..600 {
        let n = r.gen_range(1..=4usize);
        let size = r.gen_range(0..=40usize);
        let set = Staircase::new(n, (0..size).map(|_| Exponent::new((0..n).map(|_| r.gen_range(0..5)).collect()))).unwrap();
        let d = r.gen_range(0..12);
        let rep = v.splus_growth(&set, d);
        ensure(rep.holds, || format!("S+ growth failed on instance {i}: {rep:?}"))?;
    }
    for i in 0..120 {
        let f = gf([2u64, 3, 4, 5][r.gen_range(0..4)]);
        let n = r.gen_range(1..=3usize);
        let y = random_subset(&mut r, &f, n, 10);
        let mult = r.gen_range(1..=2u32);
        let m1 = r.gen_range(0..=8u32);
        let m2 = r.gen_range(0..=m1);
        let rep = v.hilbert_growth(&y, m1, m2, mult).map_err(|e| e.to_string())?;
        ensure(rep.holds, || format!("Hilbert growth failed on instance {i}: {rep:?}"))?;
    }
    for i in 0..120 {
        let f = gf([2u64, 3, 5][r.gen_range(0..3)]);
        let n = r.gen_range(1..=2usize);
        let k = r.gen_range(1..=4);
        let parts: Vec<PointSet> = (0..k).map(|_| random_subset(&mut r, &f, n, 6)).collect();
        let d = r.gen_range(0..6);
        let rep = union_subadditivity_check(&parts, d).map_err(|e| e.to_string())?;
        ensure(rep.holds, || format!("union subadditivity failed on instance {i}: {rep:?}"))?;
    }
    Ok("600 S+ sets, 120 Hilbert-growth ideals, 120 unions, 0 violations".into())
}

fn criterion_11() -> Outcome {
    let mut r = rng(11);
    for i in 0..120 {
        let f = gf([2u64, 3, 4, 5][r.gen_range(0..4)]);
        let n = r.gen_range(1..=2usize);
        let y = random_subset(&mut r, &f, n, 12);
        let keep: Vec<Point> = y.iter().filter(|_| r.gen_bool(0.6)).cloned().collect();
        let x = PointSet::new(&f, n, keep).unwrap();
        let d = r.gen_range(0..=n as u32 * (f.q() - 1));
        let rep = closure_axioms_check(&x, &y, d).map_err(|e| e.to_string())?;
        ensure(rep.holds && rep.monotone == Some(true), || format!("instance {i}: {rep:?}"))?;
    }
    Ok("120 instances: extensive, monotone, idempotent, HF agrees up to d".into())
}

fn criterion_12() -> Outcome {
    let mut count = 0;
    for q in [2u64, 3] {
        let f = gf(q);
        let n = 2;
        for mask in 0..1u64 << (q * q) {
            let y = from_mask(&f, n, mask);
            let s = standard_monomials(&y, 1).map_err(|e| e.to_string())?;
            for d in 0..=2 * (f.q() - 1) {
                let lf = staircase_fkg_instance(f.q(), n, &s, d).map_err(|e| e.to_string())?;
                let rep = fkg_check(&lf, &Limits::default()).map_err(|e| e.to_string())?;
                ensure(rep.hypotheses_hold && rep.inequality_holds, || format!("q={q} mask={mask} d={d}: {rep:?}"))?;
                // |S| |M ∩ T| and |T| |S ∩ M|, counted directly
                let box_pts = (0..f.q()).flat_map(|a| (0..f.q()).map(move |b| (a, b)));
                let in_m = box_pts.clone().filter(|(a, b)| a + b <= d).count();
                let s_in_m = s.iter().filter(|e| e.degree() <= d).count();
                let lhs = s.len() * in_m;
                let rhs = (q * q) as usize * s_in_m;
                ensure(rep.lhs == format!("{lhs}/1") && rep.rhs == format!("{rhs}/1"), || format!("q={q} mask={mask} d={d}: {} vs {lhs}, {} vs {rhs}", rep.lhs, rep.rhs))?;
                count += 1;
            }
        }
    }
    let bad = LatticeFunctions::from_integers(vec![1, 1], &[1, 1, 1, 1], &[0, 1, 1, 1], &[0, 0, 1, 0]).unwrap();
    let rep = fkg_check(&bad, &Limits::default()).map_err(|e| e.to_string())?;
    ensure(rep.g_monotone == Monotonicity::Neither && !rep.hypotheses_hold && !rep.flags.is_empty(), || format!("non-monotone g not flagged: {rep:?}"))?;
    Ok(format!("{count} indicator instances reproduce the size bound; non-monotone g flagged"))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("exhaustive closure bound", criterion_1),
        ("exhaustive size bound", criterion_2),
        ("rank vs standard-monomial Hilbert function", criterion_3),
        ("brute-force closure oracle", criterion_4),
        ("stabilization thresholds", criterion_5),
        ("d+1 collinear points", criterion_6),
        ("vanishing with multiplicity on curves", criterion_7),
        ("statistical Kakeya on Nikodym instances", criterion_8),
        ("multiplicity bounds", criterion_9),
        ("combinatorial lemmas", criterion_10),
        ("closure-operator axioms", criterion_11),
        ("FKG checker", criterion_12),
    ];
    let start = Instant::now();
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail} ({secs:.2}s)", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {:>2} {name}: {detail} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed, {:.2}s total", criteria.len() - failures, start.elapsed().as_secs_f64());
    if failures > 0 {
        std::process::exit(1);
    }
}
