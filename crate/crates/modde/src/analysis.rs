//! Friedman ranking of BCHMs per (mutation, crossover, function group) cell,
//! Hochberg post-hoc against the best-ranked method, best-method counts and
//! ECDF curves over fixed targets.

use std::collections::BTreeMap;
use std::path::Path;

use modde_core::runner::RunLog;
use modde_core::{BchmKind, CrossoverKind, MutationStrategy, ProblemKind};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::io::write_csv;

pub const DEFAULT_ALPHA: f64 = 0.05;
pub const GROUPS: [u8; 5] = [1, 2, 3, 4, 5];
/// Targets are `f_opt + 10^e` for these exponents.
pub const ECDF_TARGET_EXPONENTS: [i32; 10] = [1, 0, -1, -2, -3, -4, -5, -6, -7, -8];
const RANK_TIE_EPS: f64 = 1e-9;

/// Ranks of `values` (1 = smallest), averaging over ties.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = r;
        }
        i = j + 1;
    }
    ranks
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    pub treatments: Vec<String>,
    pub blocks: Vec<String>,
    /// `block_ranks[b][t]`.
    pub block_ranks: Vec<Vec<f64>>,
    pub mean_ranks: Vec<f64>,
    /// Treatments sharing the lowest mean rank.
    pub best_set: Vec<usize>,
    /// Treatments significantly worse than the best; filled by [`RankTable::mark`].
    pub worse_set: Vec<usize>,
}

impl RankTable {
    /// Ranks a `values[block][treatment]` matrix; lower values rank first.
    pub fn from_values(treatments: Vec<String>, blocks: Vec<String>, values: &[Vec<f64>]) -> Result<Self> {
        let k = treatments.len();
        if k < 2 {
            return Err(Error::Usage(format!("need at least 2 treatments, got {k}")));
        }
        if blocks.len() < 2 || blocks.len() != values.len() {
            return Err(Error::Usage(format!(
                "need at least 2 blocks with one row each, got {} labels and {} rows",
                blocks.len(),
                values.len()
            )));
        }
        for (b, row) in values.iter().enumerate() {
            if row.len() != k {
                return Err(Error::Gap(format!("block {} has {} of {k} treatments", blocks[b], row.len())));
            }
            if let Some(t) = row.iter().position(|v| v.is_nan()) {
                return Err(Error::Gap(format!("block {} treatment {} is NaN", blocks[b], treatments[t])));
            }
        }
        let block_ranks: Vec<Vec<f64>> = values.iter().map(|row| midranks(row)).collect();
        let n = block_ranks.len() as f64;
        let mean_ranks: Vec<f64> = (0..k)
            .map(|t| block_ranks.iter().map(|r| r[t]).sum::<f64>() / n)
            .collect();
        let lowest = mean_ranks.iter().copied().fold(f64::INFINITY, f64::min);
        let best_set = (0..k).filter(|&t| mean_ranks[t] - lowest <= RANK_TIE_EPS).collect();
        Ok(Self {
            treatments,
            blocks,
            block_ranks,
            mean_ranks,
            best_set,
            worse_set: Vec::new(),
        })
    }

    pub fn k(&self) -> usize {
        self.treatments.len()
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// The reference treatment for post-hoc comparisons.
    pub fn best(&self) -> usize {
        self.best_set[0]
    }

    /// Runs the Friedman test and, if `p <= alpha`, the Hochberg
    /// post-hoc; stores the rejected treatments in `worse_set`.
    pub fn mark(&mut self, alpha: f64) -> Result<Marking> {
        let friedman = friedman_test(self)?;
        let posthoc = hochberg_posthoc(self, alpha)?;
        self.worse_set = if alpha > 0.0 && friedman.p_value <= alpha {
            posthoc.comparisons.iter().filter(|c| c.rejected).map(|c| c.treatment).collect()
        } else {
            Vec::new()
        };
        Ok(Marking { friedman, posthoc })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Marking {
    pub friedman: Friedman,
    pub posthoc: Posthoc,
}

/// Ranks the BCHMs in `logs`, one block per (function, instance), scoring each
/// by the median final best over its runs.
pub fn compute_ranks(logs: &[RunLog]) -> Result<RankTable> {
    let mut blocks: Vec<(String, u64)> = Vec::new();
    let mut cells: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
    for log in logs {
        let key = (log.function.clone(), log.instance_seed);
        let b = blocks.iter().position(|x| *x == key).unwrap_or_else(|| {
            blocks.push(key);
            blocks.len() - 1
        });
        let t = BchmKind::ALL.iter().position(|&x| x == log.bchm).unwrap_or_default();
        cells.entry((b, t)).or_default().push(log.final_best);
    }
    let present: Vec<usize> = (0..BchmKind::ALL.len())
        .filter(|&t| cells.keys().any(|&(_, x)| x == t))
        .collect();
    let labels: Vec<String> = blocks.iter().map(|(f, s)| format!("{f}@{s:016x}")).collect();
    let mut counts = cells.iter().map(|(&(b, t), runs)| (b, t, runs.len()));
    if let Some((b0, t0, c0)) = counts.next() {
        if let Some((b, t, c)) = counts.find(|&(_, _, c)| c != c0) {
            return Err(Error::Gap(format!(
                "unequal run counts: {} on {} has {c0}, {} on {} has {c}",
                BchmKind::ALL[t0],
                labels[b0],
                BchmKind::ALL[t],
                labels[b]
            )));
        }
    }
    let mut values = Vec::with_capacity(blocks.len());
    for (b, label) in labels.iter().enumerate() {
        let row = present
            .iter()
            .map(|&t| {
                cells
                    .get(&(b, t))
                    .map(|runs| median(runs))
                    .ok_or_else(|| Error::Gap(format!("no runs of {} on {label}", BchmKind::ALL[t])))
            })
            .collect::<Result<Vec<f64>>>()?;
        values.push(row);
    }
    let treatments = present.iter().map(|&t| BchmKind::ALL[t].tag().to_string()).collect();
    RankTable::from_values(treatments, labels, &values)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Friedman {
    pub statistic: f64,
    pub df: f64,
    pub p_value: f64,
}

/// Friedman statistic `12N/(k(k+1)) * sum_j (R_j - (k+1)/2)^2` against chi-square(k-1).
pub fn friedman_test(table: &RankTable) -> Result<Friedman> {
    let k = table.k() as f64;
    let n = table.n_blocks() as f64;
    let centre = (k + 1.0) / 2.0;
    let ss: f64 = table.mean_ranks.iter().map(|r| (r - centre) * (r - centre)).sum();
    let statistic = 12.0 * n / (k * (k + 1.0)) * ss;
    let df = k - 1.0;
    let chi = ChiSquared::new(df).map_err(|e| Error::Usage(e.to_string()))?;
    Ok(Friedman {
        statistic,
        df,
        p_value: chi.sf(statistic).clamp(0.0, 1.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub treatment: usize,
    pub z: f64,
    pub p_value: f64,
    pub rejected: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Posthoc {
    pub reference: usize,
    pub comparisons: Vec<Comparison>,
}

/// Each treatment against the best one: `z = (R_a - R_best) / sqrt(k(k+1)/(6N))`,
/// two-sided normal p-values, Hochberg step-up at `alpha`.
pub fn hochberg_posthoc(table: &RankTable, alpha: f64) -> Result<Posthoc> {
    let k = table.k() as f64;
    let n = table.n_blocks() as f64;
    let se = (k * (k + 1.0) / (6.0 * n)).sqrt();
    let normal = Normal::standard();
    let reference = table.best();
    let mut comparisons: Vec<Comparison> = (0..table.k())
        .filter(|&t| t != reference)
        .map(|t| {
            let z = (table.mean_ranks[t] - table.mean_ranks[reference]) / se;
            Comparison {
                treatment: t,
                z,
                p_value: (2.0 * normal.sf(z.abs())).min(1.0),
                rejected: false,
            }
        })
        .collect();
    let p: Vec<f64> = comparisons.iter().map(|c| c.p_value).collect();
    for (c, r) in comparisons.iter_mut().zip(hochberg_reject(&p, alpha)) {
        c.rejected = r;
    }
    Ok(Posthoc { reference, comparisons })
}

/// Hochberg step-up: with sorted `p_(1) <= .. <= p_(m)`, reject the first `i`
/// hypotheses for the largest `i` with `p_(i) <= alpha / (m - i + 1)`.
pub fn hochberg_reject(p_values: &[f64], alpha: f64) -> Vec<bool> {
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p_values[a].total_cmp(&p_values[b]));
    let mut reject = vec![false; m];
    if alpha <= 0.0 {
        return reject;
    }
    let cut = (1..=m)
        .rev()
        .find(|&i| p_values[order[i - 1]] <= alpha / (m - i + 1) as f64);
    if let Some(i) = cut {
        for &idx in &order[..i] {
            reject[idx] = true;
        }
    }
    reject
}

pub fn bonferroni_reject(p_values: &[f64], alpha: f64) -> Vec<bool> {
    let m = p_values.len() as f64;
    p_values.iter().map(|&p| alpha > 0.0 && p <= alpha / m).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellKey {
    pub mutation: MutationStrategy,
    pub crossover: CrossoverKind,
    pub group: u8,
}

impl CellKey {
    pub fn label(&self) -> String {
        format!("{}:{}", self.mutation, self.crossover)
    }
}

fn function_group(function: &str) -> Option<u8> {
    function.parse::<ProblemKind>().ok().and_then(ProblemKind::group)
}

fn operator_order(m: MutationStrategy, c: CrossoverKind) -> (usize, usize) {
    (
        MutationStrategy::ALL.iter().position(|&x| x == m).unwrap_or_default(),
        CrossoverKind::ALL.iter().position(|&x| x == c).unwrap_or_default(),
    )
}

/// Splits logs by cell, in group, mutation, crossover order. Runs on
/// functions outside the five groups are dropped.
pub fn group_cells(logs: &[RunLog]) -> Vec<(CellKey, Vec<RunLog>)> {
    type Slot = (CellKey, Vec<RunLog>);
    let mut map: BTreeMap<(u8, (usize, usize)), Slot> = BTreeMap::new();
    for log in logs {
        let Some(group) = function_group(&log.function) else { continue };
        let key = CellKey {
            mutation: log.mutation,
            crossover: log.crossover,
            group,
        };
        map.entry((group, operator_order(log.mutation, log.crossover)))
            .or_insert_with(|| (key, Vec::new()))
            .1
            .push(log.clone());
    }
    map.into_values().collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub key: CellKey,
    pub table: RankTable,
    pub marking: Marking,
    /// Mean PORS per treatment, in table order.
    pub mean_pors: Vec<Option<f64>>,
}

pub fn mean_pors(logs: &[RunLog], bchm: BchmKind) -> Option<f64> {
    let v: Vec<f64> = logs.iter().filter(|l| l.bchm == bchm).filter_map(RunLog::pors).collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

pub fn analyze_cell(key: CellKey, logs: &[RunLog], alpha: f64) -> Result<CellResult> {
    let mut table = compute_ranks(logs).map_err(|e| match e {
        Error::Gap(msg) => Error::Gap(format!("cell {} group {}: {msg}", key.label(), key.group)),
        Error::Usage(msg) => Error::Gap(format!("cell {} group {}: {msg}", key.label(), key.group)),
        other => other,
    })?;
    let marking = table.mark(alpha)?;
    let mean_pors = table
        .treatments
        .iter()
        .map(|t| t.parse::<BchmKind>().ok().and_then(|b| mean_pors(logs, b)))
        .collect();
    Ok(CellResult {
        key,
        table,
        marking,
        mean_pors,
    })
}

pub fn analyze(logs: &[RunLog], alpha: f64) -> Result<Vec<CellResult>> {
    group_cells(logs)
        .into_iter()
        .map(|(key, cell)| analyze_cell(key, &cell, alpha))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountMatrix {
    pub treatments: Vec<String>,
    pub groups: Vec<u8>,
    /// `counts[t][g]`.
    pub counts: Vec<Vec<u64>>,
}

impl CountMatrix {
    pub fn get(&self, treatment: &str, group: u8) -> u64 {
        match (
            self.treatments.iter().position(|t| t == treatment),
            self.groups.iter().position(|&g| g == group),
        ) {
            (Some(t), Some(g)) => self.counts[t][g],
            _ => 0,
        }
    }

    pub fn total(&self, treatment: &str) -> u64 {
        self.treatments
            .iter()
            .position(|t| t == treatment)
            .map_or(0, |t| self.counts[t].iter().sum())
    }
}

/// How often each BCHM is in a cell's best set, per group. Tied best
/// methods each count once.
pub fn best_bchm_counts(cells: &[CellResult]) -> CountMatrix {
    let treatments: Vec<String> = BchmKind::ALL.iter().map(|b| b.tag().to_string()).collect();
    let groups = GROUPS.to_vec();
    let mut counts = vec![vec![0u64; groups.len()]; treatments.len()];
    for cell in cells {
        let Some(g) = groups.iter().position(|&g| g == cell.key.group) else { continue };
        for &b in &cell.table.best_set {
            let name = &cell.table.treatments[b];
            if let Some(t) = treatments.iter().position(|x| x == name) {
                counts[t][g] += 1;
            }
        }
    }
    CountMatrix { treatments, groups, counts }
}

fn best_at(trajectory: &[(u64, f64)], evals: u64) -> f64 {
    let idx = trajectory.partition_point(|&(e, _)| e <= evals);
    if idx == 0 {
        f64::INFINITY
    } else {
        trajectory[idx - 1].1
    }
}

/// Share of (run, target) pairs reached by each evaluation count, with the
/// x axis scaled by the dimension. Points sit at every evaluation count where
/// some trajectory changes and at every run's final count.
pub fn compute_ecdf(logs: &[RunLog]) -> Result<Vec<(f64, f64)>> {
    let Some(first) = logs.first() else {
        return Err(Error::Gap("no runs for ECDF".into()));
    };
    let n = first.n;
    let mut grid: Vec<u64> = Vec::new();
    for log in logs {
        if log.n != n {
            return Err(Error::Usage(format!("mixed dimensions {} and {} in one ECDF", n, log.n)));
        }
        if log.f_opt.is_none() {
            return Err(Error::Usage(format!("{} has no known optimum", log.function)));
        }
        grid.extend(log.trajectory.iter().map(|&(e, _)| e));
        grid.push(log.evals_used);
    }
    grid.sort_unstable();
    grid.dedup();
    let total = (logs.len() * ECDF_TARGET_EXPONENTS.len()) as f64;
    let points = grid
        .iter()
        .map(|&e| {
            let hits: usize = logs
                .iter()
                .map(|log| {
                    let best = best_at(&log.trajectory, e);
                    let f_opt = log.f_opt.unwrap_or(f64::NAN);
                    ECDF_TARGET_EXPONENTS
                        .iter()
                        .filter(|&&x| best <= f_opt + 10f64.powi(x))
                        .count()
                })
                .sum();
            (e as f64 / n as f64, hits as f64 / total)
        })
        .collect();
    Ok(points)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

/// Writes `ranks_group<g>.csv`, `pors_group<g>.csv`, `marks_group<g>.csv`,
/// `friedman_group<g>.csv` for every group present and `counts.csv`.
pub fn write_analysis(outdir: &Path, cells: &[CellResult]) -> Result<()> {
    for g in GROUPS {
        let in_group: Vec<&CellResult> = cells.iter().filter(|c| c.key.group == g).collect();
        if in_group.is_empty() {
            continue;
        }
        let header = std::iter::once("bchm".to_string())
            .chain(in_group.iter().map(|c| c.key.label()))
            .collect::<Vec<_>>()
            .join(",");
        let mut rank_rows = Vec::new();
        let mut pors_rows = Vec::new();
        for b in BchmKind::ALL {
            let lookup = |c: &CellResult| c.table.treatments.iter().position(|t| t == b.tag());
            if in_group.iter().all(|c| lookup(c).is_none()) {
                continue;
            }
            let ranks = in_group.iter().map(|c| fmt_opt(lookup(c).map(|t| c.table.mean_ranks[t])));
            let pors = in_group.iter().map(|c| fmt_opt(lookup(c).and_then(|t| c.mean_pors[t])));
            rank_rows.push(std::iter::once(b.tag().to_string()).chain(ranks).collect::<Vec<_>>().join(","));
            pors_rows.push(std::iter::once(b.tag().to_string()).chain(pors).collect::<Vec<_>>().join(","));
        }
        write_csv(&outdir.join(format!("ranks_group{g}.csv")), &header, &rank_rows)?;
        write_csv(&outdir.join(format!("pors_group{g}.csv")), &header, &pors_rows)?;

        let mut marks = Vec::new();
        let mut tests = Vec::new();
        for c in &in_group {
            let f = &c.marking.friedman;
            tests.push(format!(
                "{},{},{},{:?},{:?}",
                c.key.label(),
                c.table.n_blocks(),
                c.table.k(),
                f.statistic,
                f.p_value
            ));
            for &t in &c.table.best_set {
                marks.push(format!("{},{},best,{:?},", c.key.label(), c.table.treatments[t], c.table.mean_ranks[t]));
            }
            for &t in &c.table.worse_set {
                let p = c.marking.posthoc.comparisons.iter().find(|x| x.treatment == t).map(|x| x.p_value);
                marks.push(format!(
                    "{},{},worse,{:?},{}",
                    c.key.label(),
                    c.table.treatments[t],
                    c.table.mean_ranks[t],
                    fmt_opt(p)
                ));
            }
        }
        write_csv(&outdir.join(format!("marks_group{g}.csv")), "cell,bchm,mark,mean_rank,p_value", &marks)?;
        write_csv(
            &outdir.join(format!("friedman_group{g}.csv")),
            "cell,blocks,treatments,statistic,p_value",
            &tests,
        )?;
    }
    let counts = best_bchm_counts(cells);
    let header = std::iter::once("bchm".to_string())
        .chain(counts.groups.iter().map(|g| format!("group{g}")))
        .chain(std::iter::once("total".to_string()))
        .collect::<Vec<_>>()
        .join(",");
    let rows: Vec<String> = counts
        .treatments
        .iter()
        .zip(&counts.counts)
        .map(|(t, row)| {
            let cols = row.iter().map(u64::to_string);
            std::iter::once(t.clone())
                .chain(cols)
                .chain(std::iter::once(row.iter().sum::<u64>().to_string()))
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    write_csv(&outdir.join("counts.csv"), &header, &rows)
}

/// Writes one ECDF per (mutation, crossover, BCHM) over the runs of group `g`
/// to `ecdf_group<g>/<config_id>.csv`, plus an `index.csv`.
pub fn write_ecdfs(outdir: &Path, logs: &[RunLog], group: u8) -> Result<usize> {
    let mut by_config: BTreeMap<(usize, usize, usize), Vec<RunLog>> = BTreeMap::new();
    for log in logs.iter().filter(|l| function_group(&l.function) == Some(group)) {
        let (m, c) = operator_order(log.mutation, log.crossover);
        let b = BchmKind::ALL.iter().position(|&x| x == log.bchm).unwrap_or_default();
        by_config.entry((m, c, b)).or_default().push(log.clone());
    }
    if by_config.is_empty() {
        return Err(Error::Gap(format!("no runs in group {group}")));
    }
    let dir = outdir.join(format!("ecdf_group{group}"));
    let mut index = Vec::new();
    for runs in by_config.values() {
        let head = &runs[0];
        let file = format!("{}.csv", head.config_id);
        let rows: Vec<String> = compute_ecdf(runs)?
            .iter()
            .map(|(x, y)| format!("{x:?},{y:?}"))
            .collect();
        write_csv(&dir.join(&file), "evals_over_n,proportion", &rows)?;
        index.push(format!("{},{},{},{}", head.mutation, head.crossover, head.bchm, file));
    }
    write_csv(&dir.join("index.csv"), "mutation,crossover,bchm,file", &index)?;
    Ok(index.len())
}
