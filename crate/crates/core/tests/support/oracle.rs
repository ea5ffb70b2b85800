#![allow(clippy::needless_range_loop)]

//! Straight-line re-implementations of every mutation strategy and every
//! componentwise repair method, replaying the same random draws.

use modde_core::bchm::{repair, BchmKind, RepairContext};
use modde_core::mutation::{mutate, MutationStrategy};
use modde_core::population::{Individual, Population};
use modde_core::rng::RngStream;
use modde_core::space::SearchSpace;

const TOL: f64 = 1e-12;

fn random_population(rng: &mut RngStream, m: usize, n: usize) -> Population {
    Population::from_members(
        (0..m)
            .map(|_| {
                let x: Vec<f64> = (0..n).map(|_| rng.uniform_in(-5.0, 5.0)).collect();
                let f = rng.uniform_in(-3.0, 10.0);
                Individual::evaluated(x, f)
            })
            .collect(),
    )
}

fn fit(p: &Population, i: usize) -> f64 {
    p.members[i].fitness.unwrap()
}

fn pick(rng: &mut RngStream, m: usize, excluded: &[usize]) -> usize {
    loop {
        let r = rng.index(m);
        if !excluded.contains(&r) {
            return r;
        }
    }
}

fn picks(rng: &mut RngStream, m: usize, target: usize, k: usize) -> Vec<usize> {
    let mut excluded = vec![target];
    let mut out = vec![];
    for _ in 0..k {
        let r = pick(rng, m, &excluded);
        excluded.push(r);
        out.push(r);
    }
    out
}

fn best(p: &Population) -> usize {
    let mut b = 0;
    for i in 0..p.len() {
        if fit(p, i) < fit(p, b) {
            b = i;
        }
    }
    b
}

fn sorted_by_fitness(p: &Population) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..p.len()).collect();
    idx.sort_by(|&a, &b| fit(p, a).partial_cmp(&fit(p, b)).unwrap().then(a.cmp(&b)));
    idx
}

fn roulette(rng: &mut RngStream, w: &[f64], excluded: &mut Vec<usize>) -> usize {
    let total: f64 = (0..w.len()).filter(|i| !excluded.contains(i)).map(|i| w[i]).sum();
    let u = rng.uniform() * total;
    let mut acc = 0.0;
    let mut last = usize::MAX;
    for i in 0..w.len() {
        if excluded.contains(&i) || w[i] <= 0.0 {
            continue;
        }
        last = i;
        acc += w[i];
        if u < acc {
            excluded.push(i);
            return i;
        }
    }
    excluded.push(last);
    last
}

/// Returns (donor, base).
fn oracle(s: MutationStrategy, p: &Population, t: usize, f: f64, rng: &mut RngStream) -> (Vec<f64>, Vec<f64>) {
    let m = p.len();
    let n = p.x(0).len();
    let x = |i: usize| p.x(i).to_vec();
    let mut donor = vec![0.0; n];
    let base;
    match s {
        MutationStrategy::Rand1 => {
            let r = picks(rng, m, t, 3);
            for j in 0..n {
                donor[j] = x(r[0])[j] + f * (x(r[1])[j] - x(r[2])[j]);
            }
            base = x(r[0]);
        }
        MutationStrategy::Best1 => {
            let b = best(p);
            let r = picks(rng, m, t, 2);
            for j in 0..n {
                donor[j] = x(b)[j] + f * (x(r[0])[j] - x(r[1])[j]);
            }
            base = x(b);
        }
        MutationStrategy::TargetToBest1 => {
            let b = best(p);
            let r = picks(rng, m, t, 2);
            for j in 0..n {
                donor[j] = x(t)[j] + f * (x(b)[j] - x(t)[j]) + f * (x(r[0])[j] - x(r[1])[j]);
            }
            base = x(t);
        }
        MutationStrategy::Best2 => {
            let b = best(p);
            let r = picks(rng, m, t, 4);
            for j in 0..n {
                donor[j] = x(b)[j] + f * (x(r[0])[j] - x(r[1])[j]) + f * (x(r[2])[j] - x(r[3])[j]);
            }
            base = x(b);
        }
        MutationStrategy::Rand2 => {
            let r = picks(rng, m, t, 5);
            for j in 0..n {
                donor[j] = x(r[0])[j] + f * (x(r[1])[j] - x(r[2])[j]) + f * (x(r[3])[j] - x(r[4])[j]);
            }
            base = x(r[0]);
        }
        MutationStrategy::TargetToBest2 => {
            let b = best(p);
            let r = picks(rng, m, t, 4);
            for j in 0..n {
                donor[j] = x(t)[j]
                    + f * (x(b)[j] - x(t)[j])
                    + f * (x(r[0])[j] - x(r[1])[j])
                    + f * (x(r[2])[j] - x(r[3])[j]);
            }
            base = x(t);
        }
        MutationStrategy::TargetToPbest1 | MutationStrategy::RankingPbest1 => {
            let pool = ((0.05f64.max(3.0 / m as f64)) * m as f64).ceil() as usize;
            let order = sorted_by_fitness(p);
            let pb = order[rng.index(pool)];
            let (r1, r2) = if s == MutationStrategy::TargetToPbest1 {
                let r = picks(rng, m, t, 2);
                (r[0], r[1])
            } else {
                let mut w = vec![0.0; m];
                for (rank_pos, &i) in order.iter().enumerate() {
                    w[i] = (m - rank_pos) as f64;
                }
                let mut excluded = vec![t];
                let r1 = roulette(rng, &w, &mut excluded);
                let r2 = pick(rng, m, &excluded);
                (r1, r2)
            };
            for j in 0..n {
                donor[j] = x(t)[j] + f * (x(pb)[j] - x(t)[j]) + f * (x(r1)[j] - x(r2)[j]);
            }
            base = x(t);
        }
        MutationStrategy::Rand2Dir => {
            let r = picks(rng, m, t, 4);
            let (a, b) = if fit(p, r[0]) <= fit(p, r[1]) { (r[0], r[1]) } else { (r[1], r[0]) };
            let (c, d) = if fit(p, r[2]) <= fit(p, r[3]) { (r[2], r[3]) } else { (r[3], r[2]) };
            for j in 0..n {
                donor[j] = x(a)[j] + f / 2.0 * (x(a)[j] - x(b)[j] + x(c)[j] - x(d)[j]);
            }
            base = x(a);
        }
        MutationStrategy::Nsde => {
            let r = picks(rng, m, t, 3);
            let k = if rng.uniform() < 0.5 { rng.normal(0.5, 0.5) } else { rng.cauchy(0.0, 1.0) };
            for j in 0..n {
                donor[j] = x(r[0])[j] + (x(r[1])[j] - x(r[2])[j]) * k;
            }
            base = x(r[0]);
        }
        MutationStrategy::Trigonometric => {
            let gamma = rng.uniform();
            let r = picks(rng, m, t, 3);
            let pp = fit(p, r[0]).abs() + fit(p, r[1]).abs() + fit(p, r[2]).abs();
            if gamma < 0.05 && pp > 0.0 {
                let (p1, p2, p3) = (fit(p, r[0]).abs() / pp, fit(p, r[1]).abs() / pp, fit(p, r[2]).abs() / pp);
                let (a, b, c) = (x(r[0]), x(r[1]), x(r[2]));
                let centroid: Vec<f64> = (0..n).map(|j| (a[j] + b[j] + c[j]) / 3.0).collect();
                for j in 0..n {
                    donor[j] = centroid[j] + (p2 - p1) * (a[j] - b[j]) + (p3 - p2) * (b[j] - c[j]) + (p1 - p3) * (c[j] - a[j]);
                }
                base = centroid;
            } else {
                for j in 0..n {
                    donor[j] = x(r[0])[j] + f * (x(r[1])[j] - x(r[2])[j]);
                }
                base = x(r[0]);
            }
        }
        MutationStrategy::TwoOpt1 | MutationStrategy::TwoOpt2 => {
            let k = if s == MutationStrategy::TwoOpt1 { 3 } else { 5 };
            let r = picks(rng, m, t, k);
            let first_better = fit(p, r[0]) < fit(p, r[1]);
            let (b, o) = if first_better { (r[0], r[1]) } else { (r[1], r[0]) };
            for j in 0..n {
                donor[j] = x(b)[j] + f * (x(o)[j] - x(r[2])[j]);
                if k == 5 {
                    donor[j] += f * (x(r[3])[j] - x(r[4])[j]);
                }
            }
            base = x(b);
        }
        MutationStrategy::ProximityRand1 => {
            let w: Vec<f64> = (0..m)
                .map(|i| (0..n).map(|j| (x(i)[j] - x(t)[j]).powi(2)).sum::<f64>().sqrt())
                .collect();
            let mut excluded = vec![t];
            let r: Vec<usize> = (0..3).map(|_| roulette(rng, &w, &mut excluded)).collect();
            for j in 0..n {
                donor[j] = x(r[0])[j] + f * (x(r[1])[j] - x(r[2])[j]);
            }
            base = x(r[0]);
        }
    }
    (donor, base)
}

fn check_close(a: &[f64], b: &[f64], what: &str) -> Result<(), String> {
    if a.len() != b.len() {
        return Err(format!("{what}: length {} vs {}", a.len(), b.len()));
    }
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > TOL || x.is_nan() != y.is_nan() {
            return Err(format!("{what}: {a:?} vs {b:?}"));
        }
    }
    Ok(())
}

/// Compares every strategy with its oracle on `cases` seeded populations;
/// returns the number of comparisons made.
pub fn check_mutations(cases: u64) -> Result<usize, String> {
    let mut checked = 0;
    let mut setup = RngStream::new(2024);
    for case in 0..cases {
        let m = 6 + (case % 5) as usize;
        let n = 2 + (case % 2) as usize;
        let pop = random_population(&mut setup, m, n);
        let target = setup.index(m);
        let f = setup.uniform_in(0.1, 1.5);
        for s in MutationStrategy::ALL {
            let mut rng = RngStream::new(case * 31 + s as u64);
            let mut replay = rng.clone();
            let out = mutate(s, &pop, target, f, &mut rng).map_err(|e| format!("{}: {e}", s.tag()))?;
            let (donor, base) = oracle(s, &pop, target, f, &mut replay);
            check_close(&out.donor, &donor, s.tag())?;
            check_close(&out.base, &base, s.tag())?;
            checked += 1;
        }
    }
    Ok(checked)
}

fn oracle_component(kind: BchmKind, v: f64, lo: f64, hi: f64, b: f64, t: f64, rng: &mut RngStream) -> f64 {
    if lo <= v && v <= hi && kind != BchmKind::Transformation {
        return v;
    }
    match kind {
        BchmKind::Reinitialization => lo + rng.uniform() * (hi - lo),
        BchmKind::Projection => {
            if v < lo {
                lo
            } else {
                hi
            }
        }
        BchmKind::Reflection => {
            // the literal iterated rule
            let mut x = v;
            while !(lo <= x && x <= hi) {
                x = if x < lo { 2.0 * lo - x } else { 2.0 * hi - x };
            }
            x
        }
        BchmKind::Wrapping => {
            let w = (hi - lo).abs();
            if v < lo {
                hi - (lo - v) % w
            } else {
                lo + (v - hi) % w
            }
        }
        BchmKind::Transformation => {
            let al = ((hi - lo) / 2.0).min(1.0 + lo.abs() / 20.0);
            let au = ((hi - lo) / 2.0).min(1.0 + hi.abs() / 20.0);
            if lo + al <= v && v <= hi - au {
                return v;
            }
            let (pre_lo, pre_hi) = (lo - al, hi + au);
            let period = 2.0 * (hi - lo + al + au);
            let mut x = v;
            // shift by whole periods into [start, start + period]
            let start = lo - 2.0 * al - (hi - lo) / 2.0;
            while x < start {
                x += period;
            }
            while x > start + period {
                x -= period;
            }
            if x > pre_hi {
                x = 2.0 * pre_hi - x;
            }
            if x < pre_lo {
                x = 2.0 * pre_lo - x;
            }
            if x < lo + al {
                lo + (x - pre_lo).powi(2) / (4.0 * al)
            } else if x > hi - au {
                hi - (x - pre_hi).powi(2) / (4.0 * au)
            } else {
                x
            }
        }
        BchmKind::RandBase => {
            let u = rng.uniform();
            if v < lo {
                lo + u * (b - lo)
            } else {
                b + u * (hi - b)
            }
        }
        BchmKind::MidpointBase => {
            if v < lo {
                (lo + b) / 2.0
            } else {
                (b + hi) / 2.0
            }
        }
        BchmKind::MidpointTarget => {
            if v < lo {
                (lo + t) / 2.0
            } else {
                (t + hi) / 2.0
            }
        }
        _ => unreachable!(),
    }
}

/// Compares the eight componentwise methods with their oracles on `cases`
/// random boxes; returns the number of comparisons made.
pub fn check_componentwise(cases: u64) -> Result<usize, String> {
    let mut checked = 0;
    let mut setup = RngStream::new(77);
    let componentwise: Vec<BchmKind> = BchmKind::ALL.into_iter().filter(|k| k.is_componentwise()).collect();
    if componentwise.len() != 8 {
        return Err(format!("expected 8 componentwise methods, found {}", componentwise.len()));
    }
    for case in 0..cases {
        let n = 2 + (case % 4) as usize;
        let lower: Vec<f64> = (0..n).map(|_| setup.uniform_in(-10.0, 0.0)).collect();
        let upper: Vec<f64> = lower.iter().map(|lo| lo + setup.uniform_in(0.5, 12.0)).collect();
        let space = SearchSpace::new(lower.clone(), upper.clone()).unwrap();
        let inside = |s: &mut RngStream| -> Vec<f64> { (0..n).map(|j| s.uniform_in(lower[j], upper[j])).collect() };
        let base = inside(&mut setup);
        let target = inside(&mut setup);
        let donor: Vec<f64> = (0..n)
            .map(|j| {
                let w = upper[j] - lower[j];
                setup.uniform_in(lower[j] - 3.0 * w, upper[j] + 3.0 * w)
            })
            .collect();
        for &kind in &componentwise {
            let mut rng = RngStream::new(case ^ (kind as u64) << 20);
            let mut replay = rng.clone();
            let ctx = RepairContext { donor: &donor, base: &base, target: &target, space: &space };
            let got = repair(kind, &ctx, &mut rng).map_err(|e| e.to_string())?;
            let got = got.result.as_vector().ok_or("repair returned a penalty")?;
            let expected: Vec<f64> = (0..n)
                .map(|j| oracle_component(kind, donor[j], lower[j], upper[j], base[j], target[j], &mut replay))
                .collect();
            check_close(got, &expected, kind.tag())?;
            checked += 1;
        }
    }
    Ok(checked)
}
